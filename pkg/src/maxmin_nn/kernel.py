"""Density kernels induced by a sigmoidal activation.

``phi(y) = (mu(y + 1) - mu(y - 1)) / 2`` is a bump on the real line and
``rho`` is its r-fold tensor product.  Evaluations on lattices are truncated
to a per-axis window whose half-width is chosen so that everything outside
it is below ``tail_epsilon``.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .activations import SigmoidalActivation, eval_sigmoid, parse_activation
from .lattice import build_lattice

__all__ = [
    "KernelDecayError",
    "MomentInfiniteError",
    "KernelProfile",
    "MomentEstimate",
    "phi",
    "rho",
    "truncation_radius",
    "absolute_moment",
    "lattice_max_rho",
    "zr_max_rho",
    "shell_max",
]

MAX_RADIUS = 1e6


class KernelDecayError(RuntimeError):
    """The kernel decays too slowly for the requested tail epsilon."""


class MomentInfiniteError(ValueError):
    """Requested moment order exceeds the activation's decay exponent."""


def phi(act, y):
    """Univariate density ``(mu(y+1) - mu(y-1)) / 2``."""
    y = np.asarray(y, dtype=float)
    if act.satisfies_a:
        # phi is even; on the left both terms are small, so no cancellation in the tail
        y = -np.abs(y)
    out = (eval_sigmoid(act, y + 1.0) - eval_sigmoid(act, y - 1.0)) / 2.0
    if np.ndim(out) == 0:
        return float(out)
    return out


def _radius_below(f, threshold, cap=MAX_RADIUS, what="kernel"):
    """Smallest ``w`` (to bisection accuracy) with ``f(t) < threshold`` for ``t > w``.

    ``f`` must be vectorised over ``t >= 0``.  Doubling finds a bracket whose
    whole outer octave ``[t, 2t]`` is below threshold; bisection then
    locates the crossing inside ``[t/2, t]``.
    """

    def below_from(t):
        probe = np.linspace(t, 2.0 * t, 257)
        return bool(np.all(f(probe) < threshold))

    t = 0.5
    while not below_from(t):
        t *= 2.0
        if t > cap:
            raise KernelDecayError(
                f"{what} decays too slowly for requested eps (no radius below {cap:g})"
            )
    lo, hi = t / 2.0, t
    if below_from(lo) and lo <= 0.5:
        lo = 0.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        # coarse probe between mid and hi guards against non-monotone tails
        if np.all(f(np.linspace(mid, hi, 33)) < threshold):
            hi = mid
        else:
            lo = mid
        if hi - lo <= 1e-13 * max(1.0, hi):
            break
    return hi


def _phi_peak(act):
    y = np.linspace(-3.0, 3.0, 6001)
    return float(max(np.max(phi(act, y)), phi(act, 0.0)))


def _phi_floor(act):
    """Smallest ``phi`` on ``[-1, 1]``; every point has a lattice neighbour that close."""
    y = np.concatenate([[-1.0, 1.0], np.linspace(-1.0, 1.0, 2001)])
    return float(np.min(phi(act, y)))


def truncation_radius(act, r=1, eps=1e-15):
    """Per-axis window half-width for lattice evaluations.

    Returns ``W`` with ``phi(y) < eps * floor^r / peak^(r-1)`` whenever
    ``|y| > W``, where ``floor`` is the smallest value of ``phi`` on
    ``[-1, 1]`` (``phi(1)`` for symmetric activations).  Outside the box ``|z_i| <= W`` this keeps both ``rho(z)``
    and the normalised ratio ``rho(z) / max rho`` below ``eps``.
    """
    if not eps > 0:
        raise ValueError("eps must be positive")
    act = parse_activation(act)
    threshold = eps * _phi_floor(act) ** r / _phi_peak(act) ** (r - 1)

    def tail(t):
        return np.maximum(phi(act, t), phi(act, -t))

    return _radius_below(tail, threshold)


@dataclass(frozen=True)
class KernelProfile:
    """Activation plus dimension plus a certified truncation window.

    ``truncation_radius`` is the per-axis half-width of the evaluation
    window; the Euclidean ball of radius ``sqrt(r) * truncation_radius``
    contains the window.  When the activation decays too slowly for
    ``tail_epsilon`` the radius is ``inf`` and box operators fall back to the
    full lattice.
    """

    activation: SigmoidalActivation
    dimension: int
    tail_epsilon: float = 1e-15
    truncation_radius: float = field(init=False)
    phi0: float = field(init=False)
    phi1: float = field(init=False)
    phi_floor: float = field(init=False)

    def __post_init__(self):
        act = parse_activation(self.activation)
        object.__setattr__(self, "activation", act)
        if int(self.dimension) != self.dimension or self.dimension < 1:
            raise ValueError("dimension must be a positive integer")
        object.__setattr__(self, "dimension", int(self.dimension))
        try:
            w = truncation_radius(act, self.dimension, self.tail_epsilon)
        except KernelDecayError as exc:
            warnings.warn(f"{exc}; windowing disabled", stacklevel=3)
            w = math.inf
        object.__setattr__(self, "truncation_radius", w)
        object.__setattr__(self, "phi0", phi(act, 0.0))
        object.__setattr__(self, "phi1", phi(act, 1.0))
        object.__setattr__(self, "phi_floor", _phi_floor(act))

    @property
    def windowed(self):
        return math.isfinite(self.truncation_radius)

    @property
    def lower_bound(self):
        """Guaranteed floor of the lattice maximum of ``rho``.

        ``phi(1)^r`` for symmetric activations; in general the r-th power of
        the smallest ``phi`` on ``[-1, 1]``.
        """
        return self.phi_floor**self.dimension

    def phi(self, y):
        return phi(self.activation, y)

    def rho(self, ybar):
        return rho(self, ybar)


def rho(profile, ybar):
    """Product density at ``ybar``; trailing axis has length ``r``."""
    y = np.asarray(ybar, dtype=float)
    if y.shape[-1:] != (profile.dimension,):
        raise ValueError(
            f"point has {y.shape[-1] if y.ndim else 1} coordinates, profile dimension is "
            f"{profile.dimension}"
        )
    out = np.prod(phi(profile.activation, y), axis=-1)
    if np.ndim(out) == 0:
        return float(out)
    return out


@dataclass(frozen=True)
class MomentEstimate:
    beta: float
    value: float
    resolution: int
    lattice_window: int
    safety_factor: float = 1.05

    @property
    def bound_value(self):
        """Inflated value for use inside error bounds."""
        return self.value * self.safety_factor


def absolute_moment(profile, beta, resolution=200, safety_factor=1.05):
    """Grid estimate of the generalised absolute moment of order ``beta``.

    The supremum over the whole space is reduced to the unit cell by lattice
    periodicity, so the estimate is the maximum of ``rho(z) |z|^beta`` over
    ``z`` on the unit-cell grid shifted by every lattice vector in the
    window.  Cells whose per-axis bound cannot beat the running maximum are
    skipped.
    """
    act = profile.activation
    r = profile.dimension
    if beta < 0:
        raise ValueError("beta must be >= 0")
    if beta > act.decay_exponent:
        raise MomentInfiniteError(
            f"moment may be infinite: beta={beta} exceeds decay exponent "
            f"{act.decay_exponent} of {act.name}"
        )
    if resolution < 50:
        raise ValueError("resolution must be at least 50 points per axis")

    peak = _phi_peak(act)
    eps = profile.tail_epsilon

    def tail(t):
        t = np.asarray(t, dtype=float)
        with np.errstate(divide="ignore", invalid="ignore"):
            bound = np.maximum(phi(act, t), phi(act, -t)) * peak ** (r - 1)
            return bound * (math.sqrt(r) * t) ** beta

    window = int(math.ceil(_radius_below(tail, eps, what="moment integrand"))) + 1

    cell = np.linspace(0.0, 1.0, resolution)
    shifts = np.arange(-window, window + 1)
    # per-axis tables: axis_phi[j] = phi(cell - shift_j)
    z1 = cell[None, :] - shifts[:, None]
    axis_phi = phi(act, z1)
    axis_peak = axis_phi.max(axis=1)
    axis_far = np.abs(z1).max(axis=1)

    # branch and bound over lattice cells, axes visited in order of decreasing peak
    order = np.argsort(-axis_peak, kind="stable")
    norm_cap = (r * float(axis_far.max()) ** 2) ** (beta / 2.0)
    best = 0.0

    def visit(chosen, partial):
        nonlocal best
        depth = len(chosen)
        if depth == r:
            norm_bound = math.sqrt(sum(axis_far[i] ** 2 for i in chosen)) ** beta
            if partial * norm_bound <= best:
                return
            dens = math.prod(np.meshgrid(*(axis_phi[i] for i in chosen), indexing="ij"))
            if beta:
                grids = np.meshgrid(*(z1[i] for i in chosen), indexing="ij")
                dens = dens * sum(g * g for g in grids) ** (beta / 2.0)
            best = max(best, float(dens.max()))
            return
        rest = float(axis_peak[order[0]]) ** (r - depth - 1)
        for i in order:
            p = partial * float(axis_peak[i])
            if p * rest * norm_cap <= best:
                break
            visit(chosen + (i,), p)

    visit((), 1.0)
    return MomentEstimate(
        beta=float(beta),
        value=best,
        resolution=resolution,
        lattice_window=window,
        safety_factor=safety_factor,
    )


def _axis_window(center, radius, lo, hi):
    """Integer range ``[max(lo, ...), min(hi, ...)]`` around ``center``."""
    if math.isfinite(radius):
        a = max(lo, math.floor(center - radius))
        b = min(hi, math.ceil(center + radius))
    else:
        a, b = lo, hi
    return a, b


def lattice_max_rho(profile, n, domain, ybar):
    """``max_k rho(n*ybar - k)`` over the box lattice ``J_n^r``.

    The kernel is a product, so the maximum splits into per-axis maxima,
    each taken over the window around ``n * y_i``.
    """
    lat = build_lattice(n, domain)
    y = np.asarray(ybar, dtype=float).reshape(-1)
    if y.shape != (profile.dimension,) or domain.dimension != profile.dimension:
        raise ValueError("point, domain and profile dimensions must agree")
    out = 1.0
    for i, (lo, hi) in enumerate(lat.ranges):
        a, b = _axis_window(n * y[i], profile.truncation_radius, lo, hi)
        if a > b:
            # the window missed the lattice; the closest lattice point is an endpoint
            a, b = (lo, lo) if n * y[i] < lo else (hi, hi)
        ks = np.arange(a, b + 1)
        out *= float(np.max(phi(profile.activation, n * y[i] - ks)))
    return out


def zr_max_rho(profile, n, ybar):
    """``max_k rho(n*ybar - k)`` over the full integer lattice."""
    y = np.asarray(ybar, dtype=float).reshape(-1)
    # unwindowed profiles: the peak of phi sits within [-3, 3] for every catalog entry
    w = profile.truncation_radius if profile.windowed else 4.0
    out = 1.0
    for yi in y:
        ks = np.arange(math.floor(n * yi - w), math.ceil(n * yi + w) + 1)
        out *= float(np.max(phi(profile.activation, n * yi - ks)))
    return out


def shell_max(profile, radius, samples=4096, seed=0):
    """Largest sampled ``rho`` on the sphere ``|z| = radius`` (plus axis points)."""
    r = profile.dimension
    rng = np.random.default_rng(seed)
    dirs = rng.normal(size=(samples, r))
    dirs /= np.linalg.norm(dirs, axis=1, keepdims=True)
    axes = np.vstack([np.eye(r), -np.eye(r)])
    pts = radius * np.vstack([dirs, axes])
    return float(np.max(rho(profile, pts)))

