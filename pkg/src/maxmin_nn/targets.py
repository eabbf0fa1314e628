"""Target functions handed to the operators."""

from __future__ import annotations

import ast
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .lattice import BoxDomain

__all__ = [
    "RangeViolation",
    "ExpressionError",
    "TargetFunction",
    "table1",
    "identity",
    "cosine_bump",
    "constant",
    "expression",
    "parse_target",
]

UNIT = "unit_interval"
BOUNDED = "bounded_general"


class RangeViolation(ValueError):
    """A unit-interval target produced a value outside [0, 1]."""


@dataclass(frozen=True)
class TargetFunction:
    """A vectorised function of ``r`` variables.

    ``func`` takes an array whose last axis has length ``dimension`` and
    returns the values over the leading axes.  ``domain=None`` means the
    function is defined on all of R^r.  Unit-interval targets are checked
    at every sample they are evaluated on.

    ``func`` may be called concurrently from several threads and must not
    mutate shared state.
    """

    func: Callable[[np.ndarray], np.ndarray]
    dimension: int
    domain: BoxDomain | None = None
    range_class: str = UNIT
    bound: float | None = None
    description: str = "h"

    def __post_init__(self):
        if self.range_class not in (UNIT, BOUNDED):
            raise ValueError(f"unknown range class {self.range_class!r}")
        if self.domain is not None and self.domain.dimension != self.dimension:
            raise ValueError("domain dimension does not match target dimension")

    @property
    def on_whole_space(self):
        return self.domain is None

    def raw(self, points):
        p = np.asarray(points, dtype=float)
        if p.shape[-1] != self.dimension:
            raise ValueError(
                f"target {self.description} expects {self.dimension} coordinates, got {p.shape[-1]}"
            )
        out = np.asarray(self.func(p), dtype=float)
        return np.broadcast_to(out, p.shape[:-1])

    def __call__(self, points):
        out = self.raw(points)
        if self.range_class == UNIT:
            bad = (out < 0.0) | (out > 1.0) | np.isnan(out)
            if np.any(bad):
                v = out[bad].flat[0]
                raise RangeViolation(
                    f"target {self.description} takes value {v!r} outside [0, 1]; "
                    "use extended_max_min for general bounded targets"
                )
        return out

    def with_func(self, func, description=None, range_class=None):
        return TargetFunction(
            func,
            self.dimension,
            self.domain,
            range_class or self.range_class,
            self.bound,
            description or self.description,
        )

    def on(self, domain):
        return TargetFunction(
            self.func, self.dimension, domain, self.range_class, self.bound, self.description
        )


def table1():
    """``(y1^2 + y2^2) / 2`` on the unit square."""
    return TargetFunction(
        lambda p: (p[..., 0] ** 2 + p[..., 1] ** 2) / 2.0,
        2,
        BoxDomain.cube(0.0, 1.0, 2),
        description="table1",
    )


def identity(r=1):
    """Mean of the coordinates on ``[0, 1]^r``; ``h(y) = y`` for ``r = 1``."""
    return TargetFunction(
        lambda p: p.mean(axis=-1), r, BoxDomain.cube(0.0, 1.0, r), description="identity"
    )


def cosine_bump(r=2):
    """``(1 + prod cos y_i) / 4 + 1/4`` on all of R^r, values in [1/4, 3/4]."""
    return TargetFunction(
        lambda p: (1.0 + np.prod(np.cos(p), axis=-1)) / 4.0 + 0.25,
        r,
        None,
        description="cosine_bump",
        bound=0.75,
    )


def constant(c, r=1, domain=None):
    c = float(c)
    rc = UNIT if 0.0 <= c <= 1.0 else BOUNDED
    return TargetFunction(
        lambda p: np.full(p.shape[:-1], c),
        r,
        domain,
        rc,
        bound=abs(c),
        description=f"const:{c:g}",
    )


_FUNCS = {"sin": np.sin, "cos": np.cos, "exp": np.exp, "abs": np.abs}
_BINOPS = {
    ast.Add: np.add,
    ast.Sub: np.subtract,
    ast.Mult: np.multiply,
    ast.Div: np.divide,
    ast.Pow: np.power,
}


class ExpressionError(ValueError):
    pass


def _compile(node, r):
    if isinstance(node, ast.Expression):
        return _compile(node.body, r)
    if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)):
        v = float(node.value)
        return lambda p: v
    if isinstance(node, ast.Name):
        name = node.id
        if name == "pi":
            return lambda p: math.pi
        if name.startswith("y") and name[1:].isdigit() and 1 <= int(name[1:]) <= r:
            i = int(name[1:]) - 1
            return lambda p: p[..., i]
        raise ExpressionError(f"unknown variable {name!r} (use y1..y{r})")
    if isinstance(node, ast.BinOp) and type(node.op) in _BINOPS:
        op = _BINOPS[type(node.op)]
        left, right = _compile(node.left, r), _compile(node.right, r)
        return lambda p: op(left(p), right(p))
    if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
        inner = _compile(node.operand, r)
        sign = -1.0 if isinstance(node.op, ast.USub) else 1.0
        return lambda p: sign * inner(p)
    if (
        isinstance(node, ast.Call)
        and isinstance(node.func, ast.Name)
        and node.func.id in _FUNCS
        and len(node.args) == 1
        and not node.keywords
    ):
        fn, arg = _FUNCS[node.func.id], _compile(node.args[0], r)
        return lambda p: fn(arg(p))
    raise ExpressionError(f"unsupported syntax in expression: {ast.dump(node)[:60]}")


def expression(text, r, domain=None, range_class=UNIT):
    """Compile an arithmetic expression over ``y1 .. yr``.

    Supports ``+ - * / ^`` (``^`` is power), unary minus, numeric constants,
    ``pi`` and ``sin``, ``cos``, ``exp``, ``abs``.
    """
    try:
        tree = ast.parse(text.replace("^", "**"), mode="eval")
    except SyntaxError as exc:
        raise ExpressionError(f"cannot parse expression {text!r}: {exc.msg}") from None
    f = _compile(tree, r)

    def func(p):
        with np.errstate(all="ignore"):
            return f(p)

    return TargetFunction(func, r, domain, range_class, description=text)


def parse_target(name, r=None, domain=None, range_class=UNIT):
    """Resolve a builtin name, ``const:<c>``, or an expression."""
    key = name.strip()
    if key == "table1":
        t = table1()
    elif key == "identity":
        t = identity(r or 1)
    elif key == "cosine_bump":
        t = cosine_bump(r or 2)
    elif key.startswith("const:"):
        try:
            c = float(key.split(":", 1)[1])
        except ValueError:
            raise ExpressionError(f"bad constant target {name!r}") from None
        t = constant(c, r or (domain.dimension if domain else 2))
    else:
        if r is None:
            r = domain.dimension if domain is not None else 2
        t = expression(key, r, range_class=range_class)
    if domain is not None:
        if domain.dimension != t.dimension:
            raise ValueError(
                f"target {t.description} has dimension {t.dimension}, domain has {domain.dimension}"
            )
        if t.domain is not None:
            t = t.on(domain)
    return t
