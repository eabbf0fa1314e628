"""Seeded numeric property suites for the kernel and the max-min operator.

Three families are checked:

* lattice algebra of max and min on random sequences,
* kernel facts (lower bound of the lattice maximum, tail decay, moment
  bound, symmetry),
* semiring behaviour of the max-min operator (monotone, pseudo-linear,
  subadditive, contractive, range preserving).

Operator checks use random targets that are arbitrary on the lattice
``k/n``; the operators only ever sample there, so this is the most general
target at a given ``n``.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .activations import check_conditions, parse_activation
from .kernel import KernelProfile, absolute_moment, lattice_max_rho, phi, shell_max, zr_max_rho
from .lattice import BoxDomain, build_lattice
from .operators import evaluate_points
from .targets import TargetFunction

__all__ = ["PropertyResult", "SuiteReport", "run_suite", "lattice_target"]

TOL = 1e-12
SHELL_RADII = (5.0, 10.0, 20.0, 40.0)


@dataclass
class PropertyResult:
    name: str
    trials: int
    failures: int = 0
    worst: float = 0.0  # largest violation seen, 0 when none
    informational: bool = False
    detail: str = ""

    @property
    def passed(self):
        return self.failures == 0

    def line(self):
        verdict = "PASS" if self.passed else "FAIL"
        if self.informational:
            verdict += " (informational)"
        text = f"{self.name:<28} {verdict:<22} trials={self.trials} failures={self.failures}"
        if self.failures:
            text += f" worst={self.worst:.3g}"
        if self.detail:
            text += f"  {self.detail}"
        return text


@dataclass
class SuiteReport:
    activation: str
    seed: int
    trials: int
    results: list = field(default_factory=list)

    @property
    def passed(self):
        return all(r.passed for r in self.results if not r.informational)

    def lines(self):
        head = f"activation={self.activation} seed={self.seed} trials={self.trials}"
        return [head] + [r.line() for r in self.results]


def _record(res, violation):
    if violation > 0:
        res.failures += 1
        res.worst = max(res.worst, float(violation))


def lattice_target(values, n, lattice, domain):
    """Target taking ``values[k - lo]`` at ``k/n``, nearest-lattice lookup elsewhere."""
    lo = np.array([a for a, _ in lattice.ranges])
    hi = np.array([b for _, b in lattice.ranges])
    table = np.asarray(values, dtype=float)

    def func(p):
        k = np.clip(np.rint(p * n).astype(np.int64), lo, hi) - lo
        return table[tuple(k[..., i] for i in range(k.shape[-1]))]

    return TargetFunction(func, len(lo), domain, description="lattice_random")


# lattice algebra


def _check_c1(rng, trials):
    res = PropertyResult("C1 |max a - max b|", trials)
    for _ in range(trials):
        m = int(rng.integers(1, 40))
        scale = 10.0 ** rng.uniform(-3, 3)
        a, b = rng.normal(size=m) * scale, rng.normal(size=m) * scale
        lhs = abs(a.max() - b.max())
        rhs = np.abs(a - b).max()
        _record(res, lhs - rhs - TOL * max(1.0, scale))
    return res


def _check_c2(rng, trials):
    res = PropertyResult("C2 |x^y - x^z|", trials)
    x, y, z = rng.random((3, trials))
    lhs = np.abs(np.minimum(x, y) - np.minimum(x, z))
    rhs = np.minimum(x, np.abs(y - z))
    for v in lhs - rhs - TOL:
        _record(res, v)
    return res


# kernel


def _random_box(rng, r):
    a = rng.uniform(-2.0, 1.0, size=r)
    b = a + rng.uniform(0.2, 3.0, size=r)
    return BoxDomain(tuple(zip(a, b)))


def _check_lower_bound(rng, act, trials, tail_eps):
    res = PropertyResult("A2/A3 lattice max >= phi(1)^r", trials)
    profiles = {r: KernelProfile(act, r, tail_eps) for r in (1, 2, 3)}
    for _ in range(trials):
        r = int(rng.integers(1, 4))
        prof = profiles[r]
        dom = _random_box(rng, r)
        n_min = max(1, math.ceil(1.0 / min(b - a for a, b in dom.intervals)))
        n = int(rng.integers(n_min, n_min + 200))
        y = rng.uniform(dom.lower, dom.upper)
        floor_ = prof.lower_bound * (1 - TOL)
        _record(res, floor_ - lattice_max_rho(prof, n, dom, y))
        _record(res, floor_ - zr_max_rho(prof, n, y))
    return res


def _check_shell(act, tail_eps):
    prof = KernelProfile(act, 2, tail_eps)
    maxima = [shell_max(prof, R) for R in SHELL_RADII]
    res = PropertyResult("A1/A4 shell decay", len(SHELL_RADII))
    for a, b in zip(maxima, maxima[1:]):
        _record(res, b - a)
    exponential = math.isinf(prof.activation.decay_exponent)
    if exponential:
        _record(res, maxima[-1] - 1e-12)
    res.detail = "max at R=40: %.3g%s" % (maxima[-1], "" if exponential else " (polynomial tail)")
    return res


def _check_moment(act, tail_eps):
    res = PropertyResult("A5 m0 <= 2^-r", 3)
    vals = []
    for r in (1, 2, 3):
        m0 = absolute_moment(KernelProfile(act, r, tail_eps), 0.0, resolution=50).value
        vals.append(m0)
        _record(res, m0 - 2.0**-r)
    res.detail = "m0=" + ",".join(f"{v:.6g}" for v in vals)
    return res


def _check_symmetry(act):
    res = PropertyResult("phi symmetry", 1)
    ys = np.linspace(0.0, 30.0, 3001)
    defect = float(np.max(np.abs(phi(act, ys) - phi(act, -ys))))
    _record(res, defect - TOL)
    res.detail = f"defect={defect:.3g}"
    return res


def _condition_results(act):
    rep = check_conditions(act)
    out = []
    for key, measured in (("a", rep.satisfies_a), ("b", rep.satisfies_b)):
        declared = getattr(act, f"satisfies_{key}")
        r = PropertyResult(f"condition ({key})", 1, informational=not declared)
        if not measured:
            r.failures, r.worst = 1, 1.0
        r.detail = "declared " + ("yes" if declared else "no")
        out.append(r)
    return out


# max-min operator


def _check_operator(rng, act, trials, tail_eps, points=4):
    names = ("B2 monotone", "B3 pseudo-linear", "B4 subadditive", "B5 contraction", "range")
    res = {k: PropertyResult(k, trials) for k in names}
    profiles = {r: KernelProfile(act, r, tail_eps) for r in (1, 2)}
    for _ in range(trials):
        r = int(rng.integers(1, 3))
        prof = profiles[r]
        dom = BoxDomain.cube(0.0, 1.0, r)
        n = int(rng.integers(1, 13 if r == 1 else 7))
        lat = build_lattice(n, dom)
        shape = lat.shape
        ys = rng.random((points, r))

        def L(values):
            t = lattice_target(values, n, lat, dom)
            return evaluate_points("max_min", t, n, prof, ys, dom, threads=1)[0]

        h, g = rng.random(shape), rng.random(shape)
        Lh, Lg = L(h), L(g)

        up = np.minimum(h + rng.random(shape) * rng.random(), 1.0)
        _record(res["B2 monotone"], np.max(Lh - L(up)))

        al, be = rng.random(2)
        mix = np.maximum(np.minimum(al, h), np.minimum(be, g))
        rhs = np.maximum(np.minimum(al, Lh), np.minimum(be, Lg))
        _record(res["B3 pseudo-linear"], np.max(np.abs(L(mix) - rhs)) - TOL)

        w = rng.random(shape)
        hs, gs = h * w, (1.0 - h) * w * rng.random(shape)
        _record(res["B4 subadditive"], np.max(L(hs + gs) - L(hs) - L(gs)) - TOL)

        _record(res["B5 contraction"], np.max(np.abs(Lh - Lg) - L(np.abs(h - g))) - TOL)

        _record(res["range"], max(np.max(Lh) - h.max(), -np.min(Lh)) - TOL)
    return list(res.values())


def run_suite(activation="logistic", seed=0, trials=1000, tail_epsilon=None):
    """Run every property suite and return a :class:`SuiteReport`.

    Condition checks for conditions the activation is not declared to
    satisfy are reported but do not affect :attr:`SuiteReport.passed`.
    """
    act = parse_activation(activation)
    if tail_epsilon is None:
        # polynomial tails cannot reach the double-precision floor
        tail_epsilon = 1e-15 if math.isinf(act.decay_exponent) else 1e-6
    rng = np.random.default_rng(seed)
    report = SuiteReport(act.name, seed, trials)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        report.results += [_check_c1(rng, trials), _check_c2(rng, trials)]
        report.results += _condition_results(act)
        if act.satisfies_a:
            report.results.append(_check_symmetry(act))
        report.results.append(_check_lower_bound(rng, act, trials, tail_epsilon))
        report.results.append(_check_shell(act, tail_epsilon))
        report.results.append(_check_moment(act, tail_epsilon))
        report.results += _check_operator(rng, act, trials, tail_epsilon)
    return report
