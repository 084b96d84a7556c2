"""Closed-form analytic functions of one complex variable.

Expressions are small immutable trees built from a fixed catalog of nodes:
constants, the identity ``z``, sums, products, scalings, ``A*exp(k*z)``,
non-negative integer powers and Mobius maps applied to an inner expression.
The catalog is closed under differentiation; antiderivatives exist for every
tree whose expansion is a sum of monomials ``c*z**n`` and pure exponentials
``c*exp(k*z)``.

Evaluation is numpy-aware: ``z`` may be a Python complex or an array.

>>> e = ExpLinear(1.0, 1j)
>>> complex(evaluate(derivative(e), 0.0))
1j
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Union

import numpy as np

from .errors import NonFinite, NotClosedForm, PoleHit

POLE_TOL = 1e-14
# below this |k| the primitive (exp(k z) - 1)/k of exp(k z) is summed as a series
SMALL_K = 1e-5
SMALL_K_TERMS = 6


class AnalyticExpr:
    """Base class of all expression nodes.

    Supports ``expr(z)`` for evaluation and ``+``/``*`` for building trees;
    numbers are promoted to :class:`Constant` (or absorbed into :class:`Scale`).
    """

    def __call__(self, z):
        return evaluate(self, z)

    def __add__(self, other):
        return add(self, _lift(other))

    def __radd__(self, other):
        return add(_lift(other), self)

    def __mul__(self, other):
        if isinstance(other, AnalyticExpr):
            return multiply(self, other)
        return scale(complex(other), self)

    def __rmul__(self, other):
        return scale(complex(other), self)

    def __neg__(self):
        return scale(-1.0, self)

    def __sub__(self, other):
        return add(self, scale(-1.0, _lift(other)))


@dataclass(frozen=True, eq=True, repr=True)
class Constant(AnalyticExpr):
    c: complex


@dataclass(frozen=True, eq=True, repr=True)
class Identity(AnalyticExpr):
    pass


@dataclass(frozen=True, eq=True, repr=True)
class Sum(AnalyticExpr):
    lhs: AnalyticExpr
    rhs: AnalyticExpr


@dataclass(frozen=True, eq=True, repr=True)
class Product(AnalyticExpr):
    lhs: AnalyticExpr
    rhs: AnalyticExpr


@dataclass(frozen=True, eq=True, repr=True)
class Scale(AnalyticExpr):
    c: complex
    inner: AnalyticExpr


@dataclass(frozen=True, eq=True, repr=True)
class ExpLinear(AnalyticExpr):
    """``A * exp(k * z)``."""

    A: complex
    k: complex


@dataclass(frozen=True, eq=True, repr=True)
class Power(AnalyticExpr):
    inner: AnalyticExpr
    n: int

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 0:
            raise ValueError(f"Power exponent must be a non-negative integer, got {self.n!r}")


@dataclass(frozen=True, eq=True, repr=True)
class Mobius(AnalyticExpr):
    """``(m*w + n) / (s*w + d)`` with ``w`` the value of ``inner``."""

    m: complex
    n: complex
    s: complex
    d: complex
    inner: AnalyticExpr

    def __post_init__(self):
        if self.m * self.d - self.n * self.s == 0:
            raise ValueError("Mobius map is degenerate: m*d - n*s == 0")


ExprLike = Union[AnalyticExpr, complex, float, int]


def _lift(x: ExprLike) -> AnalyticExpr:
    return x if isinstance(x, AnalyticExpr) else Constant(complex(x))


# ---------------------------------------------------------------------------
# constant-folding constructors
# ---------------------------------------------------------------------------

def _is_const(e: AnalyticExpr, value: complex | None = None) -> bool:
    return isinstance(e, Constant) and (value is None or e.c == value)


def add(a: AnalyticExpr, b: AnalyticExpr) -> AnalyticExpr:
    if _is_const(a, 0):
        return b
    if _is_const(b, 0):
        return a
    if isinstance(a, Constant) and isinstance(b, Constant):
        return Constant(a.c + b.c)
    return Sum(a, b)


def multiply(a: AnalyticExpr, b: AnalyticExpr) -> AnalyticExpr:
    if _is_const(a, 0) or _is_const(b, 0):
        return Constant(0j)
    if isinstance(a, Constant):
        return scale(a.c, b)
    if isinstance(b, Constant):
        return scale(b.c, a)
    return Product(a, b)


def scale(c: complex, e: AnalyticExpr) -> AnalyticExpr:
    c = complex(c)
    if c == 0:
        return Constant(0j)
    if c == 1:
        return e
    if isinstance(e, Constant):
        return Constant(c * e.c)
    if isinstance(e, Scale):
        return scale(c * e.c, e.inner)
    if isinstance(e, ExpLinear):
        return ExpLinear(c * e.A, e.k)
    return Scale(c, e)


def power(e: AnalyticExpr, n: int) -> AnalyticExpr:
    if n == 0:
        return Constant(1 + 0j)
    if n == 1:
        return e
    if isinstance(e, Constant):
        return Constant(e.c ** n)
    return Power(e, n)


# ---------------------------------------------------------------------------
# evaluation
# ---------------------------------------------------------------------------

def _eval(e: AnalyticExpr, z):
    if isinstance(e, Constant):
        return e.c + 0 * z
    if isinstance(e, Identity):
        return z + 0j
    if isinstance(e, Sum):
        return _eval(e.lhs, z) + _eval(e.rhs, z)
    if isinstance(e, Product):
        return _eval(e.lhs, z) * _eval(e.rhs, z)
    if isinstance(e, Scale):
        return e.c * _eval(e.inner, z)
    if isinstance(e, ExpLinear):
        return e.A * np.exp(e.k * z)
    if isinstance(e, Power):
        return _eval(e.inner, z) ** e.n
    if isinstance(e, Mobius):
        w = _eval(e.inner, z)
        den = e.s * w + e.d
        if np.any(np.abs(den) < POLE_TOL):
            raise PoleHit(f"Mobius denominator vanishes at z = {z!r}")
        return (e.m * w + e.n) / den
    raise TypeError(f"not an AnalyticExpr node: {e!r}")


def evaluate(expr: AnalyticExpr, z):
    """Value of ``expr`` at ``z`` (scalar or array).

    Raises
    ------
    PoleHit
        if a Mobius denominator is within ``1e-14`` of zero.
    NonFinite
        if the result overflows.
    """
    with np.errstate(over="ignore", invalid="ignore"):
        value = _eval(expr, np.asarray(z, dtype=complex) if np.ndim(z) else complex(z))
    if not np.all(np.isfinite(value)):
        raise NonFinite(f"expression {expr!r} is not finite at the requested points")
    return value


# ---------------------------------------------------------------------------
# differentiation
# ---------------------------------------------------------------------------

def derivative(expr: AnalyticExpr) -> AnalyticExpr:
    """Exact symbolic derivative d/dz."""
    e = expr
    if isinstance(e, Constant):
        return Constant(0j)
    if isinstance(e, Identity):
        return Constant(1 + 0j)
    if isinstance(e, Sum):
        return add(derivative(e.lhs), derivative(e.rhs))
    if isinstance(e, Product):
        return add(multiply(derivative(e.lhs), e.rhs), multiply(e.lhs, derivative(e.rhs)))
    if isinstance(e, Scale):
        return scale(e.c, derivative(e.inner))
    if isinstance(e, ExpLinear):
        return ExpLinear(e.A * e.k, e.k) if e.k != 0 else Constant(0j)
    if isinstance(e, Power):
        if e.n == 0:
            return Constant(0j)
        return scale(e.n, multiply(power(e.inner, e.n - 1), derivative(e.inner)))
    if isinstance(e, Mobius):
        det = e.m * e.d - e.n * e.s
        inner_d = derivative(e.inner)
        if e.s == 0:
            return scale(e.m / e.d, inner_d)
        # d/dw (m w + n)/(s w + d) = det / (s w + d)^2
        recip = Mobius(0j, 1 + 0j, e.s, e.d, e.inner)
        return scale(det, multiply(power(recip, 2), inner_d))
    raise TypeError(f"not an AnalyticExpr node: {e!r}")


# ---------------------------------------------------------------------------
# antidifferentiation via expansion into c * z**n * exp(k z) terms
# ---------------------------------------------------------------------------

_Terms = dict  # {(n, k): coefficient}


def _expand(e: AnalyticExpr) -> _Terms:
    if isinstance(e, Constant):
        return {(0, 0j): e.c} if e.c != 0 else {}
    if isinstance(e, Identity):
        return {(1, 0j): 1 + 0j}
    if isinstance(e, ExpLinear):
        return {(0, complex(e.k)): complex(e.A)} if e.A != 0 else {}
    if isinstance(e, Sum):
        out = dict(_expand(e.lhs))
        for key, c in _expand(e.rhs).items():
            out[key] = out.get(key, 0j) + c
        return out
    if isinstance(e, Scale):
        return {key: e.c * c for key, c in _expand(e.inner).items()}
    if isinstance(e, Product):
        return _times(_expand(e.lhs), _expand(e.rhs))
    if isinstance(e, Power):
        base = _expand(e.inner)
        out: _Terms = {(0, 0j): 1 + 0j}
        for _ in range(e.n):
            out = _times(out, base)
        return out
    if isinstance(e, Mobius):
        raise NotClosedForm("Mobius nodes have no closed-form antiderivative in the catalog")
    raise TypeError(f"not an AnalyticExpr node: {e!r}")


def _times(a: _Terms, b: _Terms) -> _Terms:
    out: _Terms = {}
    for (n1, k1), c1 in a.items():
        for (n2, k2), c2 in b.items():
            key = (n1 + n2, k1 + k2)
            out[key] = out.get(key, 0j) + c1 * c2
    return out


def antiderivative(expr: AnalyticExpr) -> AnalyticExpr:
    """Antiderivative normalized to vanish at ``z = 0``.

    Raises
    ------
    NotClosedForm
        for Mobius nodes and for products that expand into mixed
        polynomial-times-exponential terms.
    """
    terms = _expand(expr)
    result: AnalyticExpr = Constant(0j)
    offset = 0j
    for (n, k), c in terms.items():
        if c == 0:
            continue
        if k == 0:
            result = add(result, scale(c / (n + 1), power(Identity(), n + 1)))
        elif n == 0 and abs(k) < SMALL_K:
            # (exp(k z) - 1)/k = sum_j k^(j-1) z^j / j!, which avoids cancellation
            coef = c
            for j in range(1, SMALL_K_TERMS + 1):
                coef = coef / j
                result = add(result, scale(coef, power(Identity(), j)))
                coef = coef * k
        elif n == 0:
            result = add(result, ExpLinear(c / k, k))
            offset -= c / k
        else:
            raise NotClosedForm(
                f"term z**{n} * exp({k} z) has no closed-form antiderivative in the catalog"
            )
    if offset != 0:
        result = add(result, Constant(offset))
    return result


def cauchy_riemann_residual(expr: AnalyticExpr, z: complex, h: float) -> float:
    """Discrete Cauchy-Riemann defect ``|dF/dy - i dF/dx|`` by central differences."""
    if not 1e-7 <= h <= 1e-3:
        raise ValueError(f"step h={h} outside [1e-7, 1e-3]")
    dx = (evaluate(expr, z + h) - evaluate(expr, z - h)) / (2 * h)
    dy = (evaluate(expr, z + 1j * h) - evaluate(expr, z - 1j * h)) / (2 * h)
    return float(abs(dy - 1j * dx))


# ---------------------------------------------------------------------------
# JSON grammar
# ---------------------------------------------------------------------------

def _cplx(value: Any, where: str) -> complex:
    from .errors import ManifestError

    if isinstance(value, (int, float)) and not isinstance(value, bool):
        return complex(value)
    if (
        isinstance(value, (list, tuple))
        and len(value) == 2
        and all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in value)
    ):
        return complex(value[0], value[1])
    raise ManifestError(where, f"expected [re, im] pair, got {value!r}")


def expr_from_json(obj: Any, where: str = "expr") -> AnalyticExpr:
    """Build an expression from its JSON manifest form."""
    from .errors import ManifestError

    if not isinstance(obj, dict) or "kind" not in obj:
        raise ManifestError(where, "expression must be an object with a 'kind'")
    kind = obj["kind"]
    try:
        if kind == "identity":
            return Identity()
        if kind == "const":
            return Constant(_cplx(obj["c"], f"{where}.c"))
        if kind == "exp_linear":
            return ExpLinear(_cplx(obj["A"], f"{where}.A"), _cplx(obj["k"], f"{where}.k"))
        if kind == "scale":
            return Scale(_cplx(obj["c"], f"{where}.c"), expr_from_json(obj["inner"], f"{where}.inner"))
        if kind == "power":
            n = obj["n"]
            if not isinstance(n, int) or isinstance(n, bool) or n < 0:
                raise ManifestError(f"{where}.n", "power must be a non-negative integer")
            return Power(expr_from_json(obj["inner"], f"{where}.inner"), n)
        if kind in ("sum", "product"):
            items = obj["terms" if kind == "sum" else "factors"]
            if not isinstance(items, list) or not items:
                raise ManifestError(where, f"{kind} needs a non-empty list")
            parts = [expr_from_json(x, f"{where}[{i}]") for i, x in enumerate(items)]
            node = parts[0]
            for p in parts[1:]:
                node = Sum(node, p) if kind == "sum" else Product(node, p)
            return node
        if kind == "mobius":
            coeffs = [_cplx(obj[key], f"{where}.{key}") for key in ("m", "n", "s", "d")]
            inner = expr_from_json(obj.get("inner", {"kind": "identity"}), f"{where}.inner")
            try:
                return Mobius(*coeffs, inner)
            except ValueError as exc:
                raise ManifestError(where, str(exc)) from None
    except KeyError as exc:
        raise ManifestError(f"{where}.{exc.args[0]}", "missing field") from None
    raise ManifestError(f"{where}.kind", f"unknown expression kind {kind!r}")


def _pair(c: complex) -> list[float]:
    return [float(c.real), float(c.imag)]


def expr_to_json(e: AnalyticExpr) -> dict:
    """Inverse of :func:`expr_from_json`."""
    if isinstance(e, Identity):
        return {"kind": "identity"}
    if isinstance(e, Constant):
        return {"kind": "const", "c": _pair(e.c)}
    if isinstance(e, ExpLinear):
        return {"kind": "exp_linear", "A": _pair(e.A), "k": _pair(e.k)}
    if isinstance(e, Scale):
        return {"kind": "scale", "c": _pair(e.c), "inner": expr_to_json(e.inner)}
    if isinstance(e, Power):
        return {"kind": "power", "n": e.n, "inner": expr_to_json(e.inner)}
    if isinstance(e, Sum):
        return {"kind": "sum", "terms": [expr_to_json(e.lhs), expr_to_json(e.rhs)]}
    if isinstance(e, Product):
        return {"kind": "product", "factors": [expr_to_json(e.lhs), expr_to_json(e.rhs)]}
    if isinstance(e, Mobius):
        return {
            "kind": "mobius",
            "m": _pair(e.m), "n": _pair(e.n), "s": _pair(e.s), "d": _pair(e.d),
            "inner": expr_to_json(e.inner),
        }
    raise TypeError(f"not an AnalyticExpr node: {e!r}")
