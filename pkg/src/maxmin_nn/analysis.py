"""Error measurement, moduli of continuity, Jackson-type bounds, rates."""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import asdict, dataclass, field
from typing import NamedTuple

import numpy as np

from .kernel import MomentInfiniteError, absolute_moment
from .lattice import uniform_grid
from .operators import evaluate_on_grid

__all__ = [
    "ErrorTable",
    "BoundReport",
    "ModulusEstimate",
    "RateExponents",
    "sup_norm_error",
    "modulus_of_continuity",
    "estimate_modulus",
    "jackson_bound",
    "lipschitz_rate",
    "empirical_order",
    "compare_operators",
    "REFERENCE_ERRORS",
    "default_moment",
]

# (n, classical, max-product, max-min) sup-norm errors for (y1^2 + y2^2)/2, logistic kernel
REFERENCE_ERRORS = (
    (20, 0.10867, 0.043789, 0.096539),
    (55, 0.041218, 0.016589, 0.037195),
    (77, 0.02964, 0.011673, 0.026791),
    (100, 0.022911, 0.0066111, 0.020389),
    (150, 0.015339, 0.00010367, 0.013133),
    (1000, 0.0023175, 0.00066211, 0.0020606),
)


def sup_norm_error(field_, h):
    """Largest absolute deviation of a grid field from ``h`` at the grid points."""
    if h.dimension != field_.dimension:
        raise ValueError(
            f"field has dimension {field_.dimension}, target has dimension {h.dimension}"
        )
    pts = field_.points()
    if h.domain is not None and not np.all(h.domain.contains(pts)):
        raise ValueError(f"field grid leaves the target domain {h.domain}")
    exact = h.raw(pts).reshape(field_.shape)
    return float(np.max(np.abs(field_.values - exact)))


@dataclass(frozen=True)
class ModulusEstimate:
    """Grid estimate of the modulus of continuity.

    ``lower`` is the largest sampled oscillation over pairs at distance at
    most ``delta``, hence a lower estimate.  ``holder_constant`` is the
    largest sampled ratio ``|h(x) - h(y)| / |x - y|^beta`` over neighbouring
    pairs; ``upper = max(lower, holder_constant * delta^beta)``.
    """

    delta: float
    lower: float
    upper: float
    holder_constant: float
    beta: float
    spacing: float


def _offsets(spacing, radius, r):
    """Integer offset vectors ``o`` with ``|o * spacing| <= radius``, one per +-pair."""
    m = int(math.floor(radius / spacing + 1e-12))
    rng = np.arange(-m, m + 1)
    grids = np.meshgrid(*([rng] * r), indexing="ij")
    offs = np.stack([g.ravel() for g in grids], axis=-1)
    d2 = (offs.astype(float) * spacing) ** 2
    keep = d2.sum(axis=1) <= radius**2 * (1 + 1e-12)
    offs = offs[keep]
    # lexicographically positive half suffices, |h(x)-h(y)| is symmetric
    nz = offs[np.any(offs != 0, axis=1)]
    first = np.argmax(nz != 0, axis=1)
    return nz[nz[np.arange(len(nz)), first] > 0]


def _shift_pairs(values, off):
    """Views ``(a, b)`` of ``values`` with ``b`` displaced by ``off`` grid steps."""
    a_sl, b_sl = [], []
    for o, size in zip(off, values.shape):
        if o >= 0:
            a_sl.append(slice(0, size - o))
            b_sl.append(slice(o, size))
        else:
            a_sl.append(slice(-o, size))
            b_sl.append(slice(0, size + o))
    return values[tuple(a_sl)], values[tuple(b_sl)]


def estimate_modulus(h, domain, delta, resolution=None, beta=1.0):
    """Full :class:`ModulusEstimate` of ``h`` on ``domain`` at radius ``delta``.

    The grid has ``resolution`` points per axis (default: spacing
    ``delta/4`` on the widest axis).  All grid pairs within distance
    ``delta`` are compared.
    """
    if not delta > 0:
        raise ValueError("delta must be positive")
    widths = domain.upper - domain.lower
    if resolution is None:
        resolution = int(math.ceil(4 * widths.max() / delta)) + 1
    spacings = widths / (resolution - 1)
    if not np.allclose(spacings, spacings[0]):
        raise ValueError("modulus estimation needs a domain with equal side lengths")
    spacing = float(spacings[0])
    if spacing > delta / 4 * (1 + 1e-12):
        raise ValueError(
            f"resolution too coarse for delta={delta:g}: spacing {spacing:g} exceeds delta/4"
        )
    r = domain.dimension
    axes = uniform_grid(domain, resolution)
    grids = np.meshgrid(*axes, indexing="ij")
    vals = h.raw(np.stack(grids, axis=-1))

    lower = 0.0
    for off in _offsets(spacing, delta, r):
        a, b = _shift_pairs(vals, off)
        if a.size:
            lower = max(lower, float(np.max(np.abs(a - b))))

    holder = 0.0
    for off in _offsets(spacing, math.sqrt(r) * spacing, r):
        a, b = _shift_pairs(vals, off)
        if a.size:
            dist = spacing * float(np.linalg.norm(off))
            holder = max(holder, float(np.max(np.abs(a - b))) / dist**beta)
    upper = max(lower, holder * delta**beta)
    return ModulusEstimate(delta, lower, upper, holder, beta, spacing)


def modulus_of_continuity(h, domain, delta, resolution=None):
    """Lower grid estimate of ``sup{|h(x) - h(y)| : |x - y| <= delta}``."""
    return estimate_modulus(h, domain, delta, resolution).lower


class RateExponents(NamedTuple):
    rate: float
    delta_exponent: float


def lipschitz_rate(alpha, beta):
    """Predicted error exponent ``alpha*beta/(alpha+beta)`` and the matching ``delta_n`` exponent."""
    if not alpha > 0:
        raise ValueError("alpha must be positive")
    if not 0 < beta <= 1:
        raise ValueError("beta must lie in (0, 1]")
    return RateExponents(alpha * beta / (alpha + beta), alpha / (alpha + beta))


@dataclass
class BoundReport:
    n: int
    delta_n: float
    omega_term: float
    moment_term: float
    bound: float
    observed_error: float | None = None
    omega_lower: float | None = None
    alpha: float | None = None

    @property
    def violated(self):
        return self.observed_error is not None and self.observed_error > self.bound

    def to_json(self):
        return json.dumps(asdict(self), sort_keys=True)


def jackson_bound(
    h,
    n,
    delta_n,
    alpha,
    profile,
    moment,
    domain=None,
    beta=1.0,
    resolution=None,
    observed_error=None,
):
    """Evaluate ``max(omega(h, delta_n), m_alpha / (phi(1)^r n^alpha delta_n^alpha))``.

    For asymmetric activations ``phi(1)^r`` is replaced by the profile's
    :attr:`~maxmin_nn.kernel.KernelProfile.lower_bound`.

    ``omega`` is the conservative grid estimate (see :class:`ModulusEstimate`)
    over ``domain`` (default: the target's own domain; required for targets
    on all of R^r).  The moment's safety factor is applied.
    """
    act = profile.activation
    if alpha > act.decay_exponent:
        raise MomentInfiniteError(
            f"alpha={alpha} exceeds the decay exponent {act.decay_exponent} of {act.name}"
        )
    if not math.isclose(moment.beta, alpha):
        raise ValueError(f"moment has order {moment.beta}, bound needs order {alpha}")
    domain = domain if domain is not None else h.domain
    if domain is None:
        raise ValueError("a domain is needed to estimate the modulus of a target on R^r")
    om = estimate_modulus(h, domain, delta_n, resolution, beta)
    moment_term = moment.bound_value / (profile.lower_bound * n**alpha * delta_n**alpha)
    return BoundReport(
        n=int(n),
        delta_n=float(delta_n),
        omega_term=om.upper,
        moment_term=float(moment_term),
        bound=max(om.upper, float(moment_term)),
        observed_error=observed_error,
        omega_lower=om.lower,
        alpha=float(alpha),
    )


def empirical_order(samples, min_samples=2):
    """Least-squares slope of ``-log(error)`` against ``log(n)``."""
    data = sorted(samples)
    if len(data) < min_samples:
        raise ValueError(f"need at least {min_samples} samples, got {len(data)}")
    ns = np.array([d[0] for d in data], dtype=float)
    errs = np.array([d[1] for d in data], dtype=float)
    if np.any(np.diff(ns) <= 0):
        raise ValueError("n values must be strictly increasing")
    if np.any(errs <= 0):
        raise ValueError("errors must be positive to take logarithms")
    slope = np.polyfit(np.log(ns), -np.log(errs), 1)[0]
    return float(slope)


@dataclass
class ErrorTable:
    rows: list = field(default_factory=list)  # (n, classical, max_product, max_min)
    metadata: dict = field(default_factory=dict)

    COLUMNS = ("n", "classical", "max_product", "max_min")

    def __post_init__(self):
        ns = [row[0] for row in self.rows]
        if any(b <= a for a, b in zip(ns, ns[1:])):
            raise ValueError("n must be strictly increasing across rows")

    def column(self, name):
        j = self.COLUMNS.index(name)
        return [row[j] for row in self.rows]

    def to_csv(self):
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(self.COLUMNS)
        for n, *errs in self.rows:
            w.writerow([n] + [repr(float(e)) for e in errs])
        return buf.getvalue()

    def format(self):
        head = f"{'n':>6}  {'classical':>12}  {'max_product':>12}  {'max_min':>12}"
        lines = [head]
        for n, c, p, m in self.rows:
            lines.append(f"{n:>6}  {c:>12.6g}  {p:>12.6g}  {m:>12.6g}")
        return "\n".join(lines)


def compare_operators(h, n_list, domain, profile, grid=151, threads=None, full_lattice=False):
    """Sup-norm errors of the three box operators for every ``n`` on a shared grid."""
    rows = []
    for n in sorted(n_list):
        errs = []
        for kind in ("classical", "max_product", "max_min"):
            f = evaluate_on_grid(kind, h, n, domain, profile, grid, full_lattice, threads)
            errs.append(sup_norm_error(f, h))
        rows.append((int(n), *errs))
    meta = {
        "target": h.description,
        "activation": profile.activation.name,
        "grid": int(grid),
        "domain": [list(iv) for iv in domain.intervals],
        "tail_epsilon": profile.tail_epsilon,
    }
    return ErrorTable(rows, meta)


def default_moment(profile, alpha=2.0, resolution=200):
    return absolute_moment(profile, alpha, resolution)

