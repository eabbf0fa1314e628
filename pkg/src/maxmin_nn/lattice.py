"""Box domains and the integer lattices sampled by the operators."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = ["LatticeError", "BoxDomain", "LatticeIndexSet", "build_lattice", "uniform_grid"]

# n*a that is within this relative distance of an integer is snapped to it,
# so 10 * 0.3 counts as 3 rather than 3.0000000000000004
_SNAP = 1e-9


class LatticeError(ValueError):
    """The lattice for the requested n and domain is empty."""


@dataclass(frozen=True)
class BoxDomain:
    intervals: tuple[tuple[float, float], ...]

    def __post_init__(self):
        ivs = tuple((float(a), float(b)) for a, b in self.intervals)
        if not ivs:
            raise ValueError("domain needs at least one interval")
        for a, b in ivs:
            if not (math.isfinite(a) and math.isfinite(b)):
                raise ValueError("domain endpoints must be finite")
            if not a < b:
                raise ValueError(f"interval ({a}, {b}) is empty or degenerate")
        object.__setattr__(self, "intervals", ivs)

    @classmethod
    def cube(cls, a, b, r):
        return cls(((a, b),) * r)

    @classmethod
    def parse(cls, text):
        """``"a1,b1,a2,b2,..."`` -> domain."""
        vals = [float(v) for v in text.split(",")]
        if len(vals) % 2:
            raise ValueError(f"domain needs an even number of endpoints, got {len(vals)}")
        return cls(tuple(zip(vals[0::2], vals[1::2])))

    @property
    def dimension(self):
        return len(self.intervals)

    @property
    def lower(self):
        return np.array([a for a, _ in self.intervals])

    @property
    def upper(self):
        return np.array([b for _, b in self.intervals])

    def contains(self, points, slack=1e-12):
        p = np.asarray(points, dtype=float)
        return np.all((p >= self.lower - slack) & (p <= self.upper + slack), axis=-1)

    def __str__(self):
        return " x ".join(f"[{a:g},{b:g}]" for a, b in self.intervals)


def _snap(x):
    k = round(x)
    return float(k) if abs(x - k) <= _SNAP * max(1.0, abs(x)) else x


@dataclass(frozen=True)
class LatticeIndexSet:
    """Full integer box ``prod_i {ceil(n a_i), ..., floor(n b_i)}``."""

    n: int
    ranges: tuple[tuple[int, int], ...]

    @property
    def shape(self):
        return tuple(hi - lo + 1 for lo, hi in self.ranges)

    @property
    def size(self):
        return math.prod(self.shape)

    def axis(self, i):
        lo, hi = self.ranges[i]
        return np.arange(lo, hi + 1)

    def points(self):
        """All indices as an ``(size, r)`` integer array in lexicographic order."""
        grids = np.meshgrid(*(self.axis(i) for i in range(len(self.ranges))), indexing="ij")
        return np.stack([g.ravel() for g in grids], axis=-1)


def build_lattice(n, domain):
    if int(n) != n or n < 1:
        raise ValueError(f"n must be a positive integer, got {n}")
    n = int(n)
    ranges = []
    for a, b in domain.intervals:
        lo = math.ceil(_snap(n * a))
        hi = math.floor(_snap(n * b))
        if lo > hi:
            raise LatticeError(
                f"n too small for domain: n={n} leaves no lattice point in [{a:g}, {b:g}]"
            )
        ranges.append((lo, hi))
    return LatticeIndexSet(n, tuple(ranges))


def uniform_grid(domain, points):
    """Per-axis coordinate arrays with ``points`` samples including endpoints."""
    if points < 2:
        raise ValueError("grid needs at least 2 points per axis")
    return [np.linspace(a, b, points) for a, b in domain.intervals]
