"""Neural network approximation operators on lattices.

All operators sample the target at ``k/n`` for integer vectors ``k`` and
weight the samples with ``rho(n*y - k)``:

* ``classical``     weighted mean (sum / sum),
* ``max_product``   ``max_k h(k/n) rho(n y - k) / max_k rho(n y - k)``,
* ``max_min``       ``max_k min(h(k/n), rho(n y - k) / max_d rho(n y - d))``,
* ``quasi_max_min`` the max-min operator with ``k`` ranging over all of Z^r,
* ``extended_max_min`` the max-min operator lifted to bounded targets of one
  sign regime through reciprocals and negation.

Evaluation is windowed: only lattice points within the kernel's truncation
radius of ``n*y`` (per axis) are visited.  Outside that box the normalised
kernel ratio is below ``tail_epsilon``, so max-based results are exact up to
that level and the classical sums omit at most a ``tail_epsilon`` fraction.
"""

from __future__ import annotations

import json
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .activations import warn_if_outside_assumptions
from .kernel import KernelDecayError, KernelProfile, _phi_peak, phi
from .lattice import BoxDomain, LatticeError, build_lattice, uniform_grid
from .targets import UNIT, TargetFunction

__all__ = [
    "OPERATOR_KINDS",
    "KernelVanished",
    "MixedRangeError",
    "GridField",
    "evaluate_points",
    "classical_nn",
    "max_product_nn",
    "max_min_nn",
    "quasi_interpolation_max_min",
    "extended_max_min",
    "evaluate_on_grid",
    "LatticeError",
]

OPERATOR_KINDS = ("classical", "max_product", "max_min", "quasi_max_min", "extended_max_min")

DEFAULT_BATCH = 256
# sample tables above this many lattice points are not precomputed
_TABLE_LIMIT = 20_000_000
# window cells held in memory per batch
_BATCH_CELLS = 4_000_000


class KernelVanished(ArithmeticError):
    """Kernel weights underflowed at an evaluation point."""


class MixedRangeError(ValueError):
    """Target range straddles more than one sign regime."""


@dataclass
class _Plan:
    """Everything an evaluation needs that does not depend on the points."""

    kind: str
    h: TargetFunction
    n: int
    profile: KernelProfile
    ranges: tuple | None  # per-axis (lo, hi), or None for Z^r
    half: int | None  # window offsets -half..half, None for the full box lattice
    tail_threshold: float
    table: np.ndarray | None = None
    table_origin: tuple = ()
    h_sup: float = 1.0

    @property
    def r(self):
        return self.profile.dimension


def _make_plan(kind, h, n, profile, domain, full_lattice):
    if h.dimension != profile.dimension:
        raise ValueError(
            f"target dimension {h.dimension} does not match kernel dimension {profile.dimension}"
        )
    if kind == "quasi_max_min":
        if not h.on_whole_space:
            raise ValueError(
                f"quasi-interpolation needs a target defined on all of R^{h.dimension}; "
                f"{h.description} is restricted to {h.domain}"
            )
        if not profile.windowed:
            raise KernelDecayError(
                f"{profile.activation.name} decays too slowly for tail_epsilon="
                f"{profile.tail_epsilon:g}; quasi-interpolation needs a finite window"
            )
        if full_lattice:
            raise ValueError("the integer lattice Z^r is infinite; full_lattice is not available")
        ranges = None
    else:
        if domain is None:
            raise ValueError("box operators need a domain")
        if domain.dimension != profile.dimension:
            raise ValueError("domain dimension does not match kernel dimension")
        ranges = build_lattice(n, domain).ranges
    windowed = profile.windowed and not full_lattice
    half = int(math.ceil(profile.truncation_radius)) + 1 if windowed else None
    if half is not None and ranges is not None:
        # a window wider than the whole box lattice buys nothing
        if 2 * half + 1 >= max(hi - lo + 1 for lo, hi in ranges):
            half = None
    r = profile.dimension
    act = profile.activation
    thr = profile.tail_epsilon * profile.lower_bound / _phi_peak(act) ** (r - 1)
    return _Plan(kind, h, int(n), profile, ranges, half, thr)


def _axis_indices(plan, i, y):
    """Lattice indices and validity mask along axis ``i`` for coordinates ``y``."""
    n = plan.n
    if plan.half is None:
        lo, hi = plan.ranges[i]
        ks = np.arange(lo, hi + 1)
        K = np.broadcast_to(ks, (len(y), len(ks)))
        return K, np.ones(K.shape, dtype=bool)
    offs = np.arange(-plan.half, plan.half + 1)
    K = np.floor(n * y).astype(np.int64)[:, None] + offs[None, :]
    if plan.ranges is None:
        return K, np.ones(K.shape, dtype=bool)
    lo, hi = plan.ranges[i]
    return K, (K >= lo) & (K <= hi)


def _prepare_table(plan, points):
    """Precompute target samples on the lattice box the points can reach."""
    r = plan.r
    if plan.ranges is not None:
        box = list(plan.ranges)
    else:
        box = []
        for i in range(r):
            c = np.floor(plan.n * points[:, i])
            box.append((int(c.min()) - plan.half, int(c.max()) + plan.half))
    size = math.prod(hi - lo + 1 for lo, hi in box)
    window = (2 * plan.half + 1) ** r if plan.half is not None else size
    # direct evaluation is cheaper for a handful of points
    if size > _TABLE_LIMIT or len(points) * window < size:
        return
    axes = [np.arange(lo, hi + 1) / plan.n for lo, hi in box]
    grids = np.meshgrid(*axes, indexing="ij")
    plan.table = plan.h(np.stack(grids, axis=-1))
    plan.table_origin = tuple(lo for lo, _ in box)


def _gather(plan, Ks, valids):
    """Target samples over the window tensor, shape ``(B, m_1, ..., m_r)``."""
    r = plan.r
    B = Ks[0].shape[0]
    shapes = []
    for i, K in enumerate(Ks):
        s = [B] + [1] * r
        s[i + 1] = K.shape[1]
        shapes.append(s)
    if plan.table is not None:
        idx = []
        for i, K in enumerate(Ks):
            j = np.clip(K - plan.table_origin[i], 0, plan.table.shape[i] - 1)
            idx.append(j.reshape(shapes[i]))
        return plan.table[tuple(idx)]
    coords = []
    for i, (K, v) in enumerate(zip(Ks, valids)):
        # invalid slots are pinned to a valid lattice index; they are masked later
        if plan.ranges is not None:
            lo, hi = plan.ranges[i]
            K = np.clip(K, lo, hi)
        coords.append(np.broadcast_to((K / plan.n).reshape(shapes[i]), [B] + [Kj.shape[1] for Kj in Ks]))
    return plan.h(np.stack(coords, axis=-1))


def _outer(factors):
    B = factors[0].shape[0]
    r = len(factors)
    out = None
    for i, f in enumerate(factors):
        s = [B] + [1] * r
        s[i + 1] = f.shape[1]
        f = f.reshape(s)
        out = f if out is None else out * f
    return out


def _batch(plan, pts):
    act = plan.profile.activation
    n = plan.n
    Ks, valids, Phis = [], [], []
    for i in range(plan.r):
        K, v = _axis_indices(plan, i, pts[:, i])
        P = np.where(v, phi(act, n * pts[:, i][:, None] - K), 0.0)
        Ks.append(K)
        valids.append(v)
        Phis.append(P)
    H = _gather(plan, Ks, valids)
    B = len(pts)
    axis_max = [P.max(axis=1) for P in Phis]
    floor = np.min(np.stack(axis_max, axis=1), axis=1)
    # out-of-window ratio bound per point
    tail = plan.tail_threshold / np.where(floor > 0, floor, np.inf)
    if plan.kind == "classical":
        W = _outer(Phis).reshape(B, -1)
        num = (H.reshape(B, -1) * W).sum(axis=1)
        den = W.sum(axis=1)
        if np.any(den < 1e-300):
            raise KernelVanished("kernel vanished: sum of weights underflowed at an evaluation point")
        return num / den, tail
    if np.any(floor <= 0.0):
        raise KernelVanished("kernel vanished: no lattice point carries positive weight")
    R = _outer([P / m[:, None] for P, m in zip(Phis, axis_max)]).reshape(B, -1)
    Hf = H.reshape(B, -1)
    if plan.kind == "max_product":
        return (Hf * R).max(axis=1), tail
    return np.minimum(Hf, R).max(axis=1), tail


def evaluate_points(
    kind,
    h,
    n,
    profile,
    points,
    domain=None,
    full_lattice=False,
    threads=None,
    batch=DEFAULT_BATCH,
):
    """Evaluate an operator at an ``(m, r)`` array of points.

    Returns ``(values, info)`` where ``info`` records the window half-width
    and the largest out-of-window kernel ratio over all points.  Batches
    have a fixed size independent of ``threads`` and every point is reduced
    in lexicographic lattice order, so results are bit-for-bit reproducible.
    """
    if kind == "extended_max_min":
        return _extended(h, n, profile, points, domain, full_lattice, threads, batch)
    if kind not in OPERATOR_KINDS:
        raise ValueError(f"unknown operator kind {kind!r}")
    if kind in ("max_min", "quasi_max_min") and h.range_class != UNIT:
        raise ValueError(
            f"max-min operators need a unit-interval target; {h.description} is "
            f"{h.range_class}, use extended_max_min"
        )
    warn_if_outside_assumptions(profile.activation)
    if h.dimension != profile.dimension:
        raise ValueError(
            f"target dimension {h.dimension} does not match kernel dimension {profile.dimension}"
        )
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    if pts.shape[1] != profile.dimension:
        raise ValueError(f"points must have {profile.dimension} coordinates")
    if domain is not None and kind != "quasi_max_min" and not np.all(domain.contains(pts)):
        raise ValueError(f"evaluation points must lie in the domain {domain}")
    plan = _make_plan(kind, h, n, profile, domain, full_lattice)
    _prepare_table(plan, pts)
    if plan.table is not None and plan.table.size:
        plan.h_sup = float(np.max(np.abs(plan.table)))

    m = len(pts)
    values = np.empty(m)
    tails = np.empty(m)
    # batch size depends only on the plan, never on the thread count
    cells = math.prod(
        2 * plan.half + 1 if plan.half is not None else hi - lo + 1
        for lo, hi in (plan.ranges or [(0, 0)] * plan.r)
    )
    batch = max(1, min(batch, _BATCH_CELLS // max(cells, 1)))
    slices = [slice(s, min(s + batch, m)) for s in range(0, m, batch)]

    def run(sl):
        values[sl], tails[sl] = _batch(plan, pts[sl])

    workers = threads or os.cpu_count() or 1
    if workers <= 1 or len(slices) <= 1:
        for sl in slices:
            run(sl)
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            list(pool.map(run, slices))

    tail_ratio = float(tails.max()) if m else 0.0
    refetched = 0
    if plan.half is not None and plan.ranges is not None and kind in ("max_product", "max_min"):
        # a result smaller than what an omitted term could reach is redone on the full lattice
        suspect = np.flatnonzero(values < plan.h_sup * tails)
        if suspect.size:
            full, _ = evaluate_points(kind, h, n, profile, pts[suspect], domain, True, 1, batch)
            values[suspect] = full
            refetched = int(suspect.size)
    info = {
        "kind": kind,
        "n": int(n),
        "activation": profile.activation.name,
        "dimension": profile.dimension,
        "tail_epsilon": profile.tail_epsilon,
        "window_half_width": plan.half,
        "truncation_radius": profile.truncation_radius if plan.half is not None else None,
        "tail_ratio_bound": tail_ratio if plan.half is not None else 0.0,
        "full_lattice_fallbacks": refetched,
    }
    return values, info


def _point_value(kind, h, n, domain, profile, ybar, full_lattice=False):
    y = np.asarray(ybar, dtype=float).reshape(1, -1)
    values, _ = evaluate_points(kind, h, n, profile, y, domain, full_lattice, threads=1)
    return float(values[0])


def classical_nn(h, n, domain, profile, ybar, full_lattice=False):
    """Classical operator: kernel-weighted mean of the lattice samples."""
    return _point_value("classical", h, n, domain, profile, ybar, full_lattice)


def max_product_nn(h, n, domain, profile, ybar, full_lattice=False):
    return _point_value("max_product", h, n, domain, profile, ybar, full_lattice)


def max_min_nn(h, n, domain, profile, ybar, full_lattice=False):
    """Max-min operator on the box lattice; ``h`` must map into [0, 1]."""
    return _point_value("max_min", h, n, domain, profile, ybar, full_lattice)


def quasi_interpolation_max_min(h, n, profile, ybar):
    """Max-min operator with lattice indices over all of Z^r."""
    return _point_value("quasi_max_min", h, n, None, profile, ybar)


def extended_max_min(h, n, domain, profile, ybar, full_lattice=False):
    """Max-min operator for a bounded target whose range sits in one regime.

    The regimes and their transforms are ``[0, 1]`` (none), ``(1, inf)``
    (reciprocal), ``[-1, 0)`` (negation) and ``(-inf, -1)`` (negation then
    reciprocal).  Targets that cross a regime boundary are rejected.
    """
    return _point_value("extended_max_min", h, n, domain, profile, ybar, full_lattice)


_REGIMES = {
    "unit": (lambda v: v, lambda v: v),
    "above_one": (lambda v: 1.0 / v, lambda v: 1.0 / v),
    "negative_unit": (lambda v: -v, lambda v: -v),
    "below_minus_one": (lambda v: -1.0 / v, lambda v: -1.0 / v),
}


def _regime(values):
    v = np.asarray(values, dtype=float)
    if np.any(~np.isfinite(v)):
        raise ValueError("target is not bounded on the sample set")
    found = set()
    found.update(["unit"] if np.any((v >= 0) & (v <= 1)) else [])
    found.update(["above_one"] if np.any(v > 1) else [])
    found.update(["negative_unit"] if np.any((v >= -1) & (v < 0)) else [])
    found.update(["below_minus_one"] if np.any(v < -1) else [])
    if len(found) != 1:
        raise MixedRangeError(
            f"mixed range unsupported: target values fall in regimes {sorted(found)}; "
            "split the domain so each piece stays in one of [0,1], (1,inf), [-1,0), (-inf,-1)"
        )
    return found.pop()


def _extended(h, n, profile, points, domain, full_lattice, threads, batch):
    if domain is None:
        raise ValueError("extended_max_min needs a box domain")
    lat = build_lattice(n, domain)
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    # regime is read from the lattice samples the operator sees and the evaluation points
    axes = [lat.axis(i) / lat.n for i in range(domain.dimension)]
    samples = h.raw(np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1)).ravel()
    regime = _regime(np.concatenate([samples, h.raw(pts)]))
    forward, backward = _REGIMES[regime]
    g = TargetFunction(
        lambda p: forward(h.raw(p)),
        h.dimension,
        h.domain,
        UNIT,
        description=f"{regime}({h.description})",
    )
    values, info = evaluate_points("max_min", g, n, profile, pts, domain, full_lattice, threads, batch)
    info = dict(info, kind="extended_max_min", regime=regime)
    return backward(values), info


@dataclass
class GridField:
    """Operator values on a uniform tensor grid, stored in row-major order."""

    axes: list
    values: np.ndarray
    metadata: dict = field(default_factory=dict)

    @property
    def dimension(self):
        return len(self.axes)

    @property
    def shape(self):
        return tuple(len(a) for a in self.axes)

    def points(self):
        grids = np.meshgrid(*self.axes, indexing="ij")
        return np.stack([g.ravel() for g in grids], axis=-1)

    def to_csv(self, path):
        """Write ``y1,...,yr,value`` rows; floats use shortest round-trip repr."""
        pts = self.points()
        vals = self.values.ravel()
        header = ",".join([f"y{i + 1}" for i in range(self.dimension)] + ["value"])
        lines = [header]
        for p, v in zip(pts.tolist(), vals.tolist()):
            lines.append(",".join(repr(float(x)) for x in (*p, v)))
        Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8", newline="\n")

    def write(self, path):
        """CSV plus a ``.meta.json`` sidecar; returns the sidecar path."""
        path = Path(path)
        self.to_csv(path)
        meta = path.with_suffix(".meta.json")
        meta.write_text(json.dumps(self.metadata, indent=2, sort_keys=True) + "\n", encoding="utf-8")
        return meta


def evaluate_on_grid(
    kind,
    h,
    n,
    domain,
    profile,
    grid=101,
    full_lattice=False,
    threads=None,
    batch=DEFAULT_BATCH,
):
    """Evaluate an operator on ``grid`` points per axis, endpoints included."""
    if isinstance(domain, BoxDomain):
        axes = uniform_grid(domain, grid)
    else:
        raise ValueError("evaluate_on_grid needs a BoxDomain to lay the grid on")
    field_ = GridField(axes, np.empty(0))
    pts = field_.points()
    op_domain = None if kind == "quasi_max_min" else domain
    values, info = evaluate_points(kind, h, n, profile, pts, op_domain, full_lattice, threads, batch)
    field_.values = values.reshape(field_.shape)
    field_.metadata = dict(
        info,
        target=h.description,
        domain=[list(iv) for iv in domain.intervals],
        grid=int(grid),
    )
    return field_

