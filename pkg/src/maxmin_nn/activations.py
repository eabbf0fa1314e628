"""Sigmoidal activation catalog and numeric checks of the structural conditions.

Every catalog entry maps the real line into [0, 1], is non-decreasing, and
tends to 0 at -inf and 1 at +inf.  The three structural conditions used by the
convergence theory are

(a) ``mu(y) - 1/2`` is odd,
(b) ``mu`` is C^2 and concave on ``y >= 0``,
(c) ``mu(y) <= C |y|^(-alpha)`` for ``y < -L``.

They are declared per entry and can be re-checked numerically with
:func:`check_conditions`.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.special import expit

__all__ = [
    "KINDS",
    "ActivationParameterError",
    "warn_if_outside_assumptions",
    "SigmoidalActivation",
    "ConditionReport",
    "eval_sigmoid",
    "check_conditions",
    "parse_activation",
    "catalog",
]

KINDS = ("logistic", "tanh", "ramp", "three_step", "power_tail", "gompertz")

_DECLARED_FLAGS = {
    # kind: (a, b, c)
    "logistic": (True, True, True),
    "tanh": (True, True, True),
    "ramp": (True, False, True),
    "three_step": (True, False, True),
    "power_tail": (True, False, True),
    "gompertz": (False, False, True),
}


class ActivationParameterError(ValueError):
    """Invalid activation kind or parameters."""


@dataclass(frozen=True)
class SigmoidalActivation:
    """An immutable sigmoidal activation from the catalog.

    ``params`` holds ``gamma`` for ``power_tail`` and ``alpha``/``beta`` for
    ``gompertz``; it is empty for the other kinds.  ``decay_exponent`` is the
    largest usable exponent in condition (c), ``math.inf`` when every
    exponent works.
    """

    kind: str
    params: tuple[tuple[str, float], ...] = ()
    decay_exponent: float = field(init=False)
    satisfies_a: bool = field(init=False)
    satisfies_b: bool = field(init=False)
    satisfies_c: bool = field(init=False)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ActivationParameterError(
                f"unknown activation {self.kind!r}; expected one of {', '.join(KINDS)}"
            )
        p = dict(self.params)
        expected = {"power_tail": {"gamma"}, "gompertz": {"alpha", "beta"}}.get(self.kind, set())
        if set(p) != expected:
            raise ActivationParameterError(
                f"{self.kind} takes parameters {sorted(expected)}, got {sorted(p)}"
            )
        for name, value in p.items():
            if not (math.isfinite(value) and value > 0):
                raise ActivationParameterError(f"{self.kind}: {name} must be > 0, got {value}")
        # canonical ordering keeps equality/hash independent of construction order
        object.__setattr__(self, "params", tuple(sorted((k, float(v)) for k, v in p.items())))
        decay = p["gamma"] if self.kind == "power_tail" else math.inf
        object.__setattr__(self, "decay_exponent", decay)
        a, b, c = _DECLARED_FLAGS[self.kind]
        object.__setattr__(self, "satisfies_a", a)
        object.__setattr__(self, "satisfies_b", b)
        object.__setattr__(self, "satisfies_c", c)

    @classmethod
    def logistic(cls):
        return cls("logistic")

    @classmethod
    def tanh(cls):
        return cls("tanh")

    @classmethod
    def ramp(cls):
        return cls("ramp")

    @classmethod
    def three_step(cls):
        return cls("three_step")

    @classmethod
    def power_tail(cls, gamma):
        return cls("power_tail", (("gamma", gamma),))

    @classmethod
    def gompertz(cls, alpha, beta):
        return cls("gompertz", (("alpha", alpha), ("beta", beta)))

    def param(self, name):
        return dict(self.params)[name]

    @property
    def name(self):
        """Catalog string, round-trips through :func:`parse_activation`."""
        if self.kind == "power_tail":
            return f"power_tail:gamma={self.param('gamma'):g}"
        if self.kind == "gompertz":
            return f"gompertz:alpha={self.param('alpha'):g},beta={self.param('beta'):g}"
        return self.kind

    def __call__(self, y):
        return eval_sigmoid(self, y)

    def __repr__(self):
        return f"SigmoidalActivation({self.name!r})"


def eval_sigmoid(act, y):
    """Evaluate ``act`` at ``y`` (scalar or array); values lie in [0, 1]."""
    y = np.asarray(y, dtype=float)
    kind = act.kind
    if kind == "logistic":
        out = expit(y)
    elif kind == "tanh":
        out = (np.tanh(y) + 1.0) / 2.0
    elif kind == "ramp":
        out = np.clip(y + 0.5, 0.0, 1.0)
    elif kind == "three_step":
        # closed middle interval: mu(+-1/2) = 1/2
        out = np.where(y < -0.5, 0.0, np.where(y > 0.5, 1.0, 0.5))
    elif kind == "power_tail":
        g = act.param("gamma")
        knot = 2.0 ** (1.0 / g)
        a = np.abs(y)
        with np.errstate(over="ignore", invalid="ignore"):
            t = a**g
            tail = np.where(y < 0, 1.0 / (t + 2.0), (t + 1.0) / (t + 2.0))
            # 1 - 1/(t+2) is the stable form of (t+1)/(t+2) for huge t
            tail = np.where((y > 0) & ~np.isfinite(t), 1.0, tail)
            tail = np.where((y < 0) & ~np.isfinite(t), 0.0, tail)
        mid = 2.0 ** (-1.0 / g - 2.0) * y + 0.5
        out = np.where(a <= knot, mid, tail)
    else:  # gompertz
        al, be = act.param("alpha"), act.param("beta")
        with np.errstate(over="ignore"):
            out = np.exp(-al * np.exp(-be * y))
    if out.ndim == 0:
        return float(out)
    return out


def parse_activation(spec):
    """Parse a catalog string such as ``"power_tail:gamma=0.4"``.

    A bare kind name gives the :func:`catalog` instance of that kind.

    Greek parameter names are accepted as well
    (``"gompertz:α=1,β=2"``).
    """
    if isinstance(spec, SigmoidalActivation):
        return spec
    text = spec.strip()
    kind, _, rest = text.partition(":")
    kind = kind.strip().lower()
    if not rest.strip():
        # a bare name picks the catalog instance, e.g. gompertz with alpha = beta = 1
        for act in catalog():
            if act.kind == kind:
                return act
    aliases = {"γ": "gamma", "α": "alpha", "β": "beta"}
    params = {}
    if rest.strip():
        for item in rest.split(","):
            key, eq, value = item.partition("=")
            key = aliases.get(key.strip(), key.strip().lower())
            if not eq:
                raise ActivationParameterError(f"malformed activation parameter {item!r}")
            try:
                params[key] = float(value)
            except ValueError:
                raise ActivationParameterError(f"non-numeric value in {item!r}") from None
    return SigmoidalActivation(kind, tuple(params.items()))


def catalog(gamma=0.4, gompertz=(1.0, 1.0)):
    """One instance of every catalog kind."""
    return [
        SigmoidalActivation.logistic(),
        SigmoidalActivation.tanh(),
        SigmoidalActivation.ramp(),
        SigmoidalActivation.three_step(),
        SigmoidalActivation.power_tail(gamma),
        SigmoidalActivation.gompertz(*gompertz),
    ]


@dataclass(frozen=True)
class ConditionReport:
    symmetry_defect: float
    monotonicity_ok: bool
    concavity_defect: float
    smooth: bool
    decay_fit: float
    limits_ok: bool
    ordered_ok: bool
    concavity_tol: float = 1e-8

    @property
    def satisfies_a(self):
        return self.symmetry_defect <= 1e-12

    @property
    def satisfies_b(self):
        return self.smooth and self.concavity_defect <= self.concavity_tol


def check_conditions(
    act,
    half_width=20.0,
    points=4001,
    step=1e-3,
    concavity_tol=1e-8,
    tail=(1e3, 1e6),
    large=1e300,
):
    """Sample ``act`` and report how well it meets conditions (a)-(c).

    The grid is symmetric, ``[-half_width, half_width]`` with ``points``
    samples.  Concavity uses second differences with spacing ``step`` on
    ``y >= 0``; a second difference that grows as the spacing halves marks
    the activation as not C^2.  ``decay_fit`` is the slope of a log-log
    regression of ``mu(-y)`` over ``y`` in ``tail``, or ``inf`` when the
    tail vanishes faster than any power.
    """
    if half_width < 10 or points < 1000:
        raise ValueError("grid must cover [-Y, Y] with Y >= 10 and at least 1000 points")
    y = np.linspace(-half_width, half_width, points)
    v = eval_sigmoid(act, y)
    symmetry = float(np.max(np.abs(v + eval_sigmoid(act, -y) - 1.0)))
    monotone = bool(np.all(np.diff(v) >= 0.0))
    limits = abs(eval_sigmoid(act, large) - 1.0) <= 1e-6 and abs(eval_sigmoid(act, -large)) <= 1e-6
    ordered = eval_sigmoid(act, 2.0) > eval_sigmoid(act, 1.0)

    yp = np.arange(0.0, half_width, step)
    d2 = eval_sigmoid(act, yp + step) - 2.0 * eval_sigmoid(act, yp) + eval_sigmoid(act, yp - step)
    concavity = float(max(np.max(d2), 0.0))
    h2 = step / 2.0
    d2_fine = eval_sigmoid(act, yp + h2) - 2.0 * eval_sigmoid(act, yp) + eval_sigmoid(act, yp - h2)
    # bounded mu'' keeps |d2|/h^2 stable under refinement; kinks and jumps blow it up
    coarse = np.max(np.abs(d2)) / step**2
    fine = np.max(np.abs(d2_fine)) / h2**2
    smooth = bool(fine <= 1.5 * coarse + 1e-6)

    return ConditionReport(
        symmetry_defect=symmetry,
        monotonicity_ok=monotone,
        concavity_defect=concavity,
        smooth=smooth,
        decay_fit=_decay_fit(act, *tail),
        limits_ok=bool(limits),
        ordered_ok=bool(ordered),
        concavity_tol=concavity_tol,
    )


def _decay_fit(act, lo, hi, samples=64, cap=50.0):
    y = np.geomspace(lo, hi, samples)
    v = eval_sigmoid(act, -y)
    if np.any(v <= 0.0):
        return math.inf
    slope = -np.polyfit(np.log(y), np.log(v), 1)[0]
    return math.inf if slope > cap else float(slope)


def warn_if_outside_assumptions(act):
    if not act.satisfies_a:
        warnings.warn(
            f"{act.name} does not satisfy condition (a); operators run but "
            "convergence guarantees do not apply",
            stacklevel=3,
        )

