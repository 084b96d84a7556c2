"""Scalar functions of time with analytic derivatives.

A :class:`ScalarPath` is an immutable tree (``Constant``, ``Linear``, ``Poly``,
``Sinusoid``, ``SqrtQuad``, ``Quotient`` plus the algebra nodes ``PathSum``,
``PathProduct`` and ``PathScale`` needed to close the family under
differentiation).  ``value`` and ``deriv`` are vectorized over numpy arrays of
times.  Complex-valued paths are pairs of real paths in Cartesian or polar
form (:class:`ComplexPath`).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Any

import numpy as np

from .errors import ManifestError, NonFinite


class ScalarPath:
    """Real-valued function of time carrying its own derivative."""

    def value(self, t):
        raise NotImplementedError

    def deriv(self, t):
        """First time derivative, evaluated analytically."""
        raise NotImplementedError

    def derivative(self) -> "ScalarPath":
        """The derivative as another path."""
        raise NotImplementedError

    def __call__(self, t):
        return self.value(t)

    def __add__(self, other: "ScalarPath") -> "ScalarPath":
        return PathSum(self, _lift(other))

    def __mul__(self, other) -> "ScalarPath":
        if isinstance(other, ScalarPath):
            return PathProduct(self, other)
        return PathScale(float(other), self)

    __rmul__ = __mul__


def _lift(x) -> ScalarPath:
    return x if isinstance(x, ScalarPath) else Constant(float(x))


def _f(t):
    return np.asarray(t, dtype=float)


@dataclass(frozen=True)
class Constant(ScalarPath):
    v: float

    def value(self, t):
        return self.v + 0.0 * _f(t)

    def deriv(self, t):
        return 0.0 * _f(t)

    def derivative(self):
        return Constant(0.0)


@dataclass(frozen=True)
class Linear(ScalarPath):
    """``a*t + b``."""

    a: float
    b: float

    def value(self, t):
        return self.a * _f(t) + self.b

    def deriv(self, t):
        return self.a + 0.0 * _f(t)

    def derivative(self):
        return Constant(self.a)


@dataclass(frozen=True)
class Poly(ScalarPath):
    """``sum(coeffs[j] * t**j)`` (ascending powers)."""

    coeffs: tuple

    def __post_init__(self):
        object.__setattr__(self, "coeffs", tuple(float(c) for c in self.coeffs))
        if not self.coeffs:
            raise ValueError("Poly needs at least one coefficient")

    def value(self, t):
        t = _f(t)
        out = 0.0 * t
        for c in reversed(self.coeffs):
            out = out * t + c
        return out

    def deriv(self, t):
        return self.derivative().value(t)

    def derivative(self):
        if len(self.coeffs) == 1:
            return Poly((0.0,))
        return Poly(tuple(j * c for j, c in enumerate(self.coeffs) if j > 0))


@dataclass(frozen=True)
class Sinusoid(ScalarPath):
    """``amp * sin(freq*t + phase)``."""

    amp: float
    freq: float
    phase: float = 0.0

    def value(self, t):
        return self.amp * np.sin(self.freq * _f(t) + self.phase)

    def deriv(self, t):
        return self.amp * self.freq * np.cos(self.freq * _f(t) + self.phase)

    def derivative(self):
        return Sinusoid(self.amp * self.freq, self.freq, self.phase + math.pi / 2)


@dataclass(frozen=True)
class SqrtQuad(ScalarPath):
    """``sqrt(a*t**2 + b*t + c)``; NaN where the radicand is negative."""

    a: float
    b: float
    c: float

    def _radicand(self, t):
        t = _f(t)
        return self.a * t * t + self.b * t + self.c

    def value(self, t):
        with np.errstate(invalid="ignore"):
            return np.sqrt(self._radicand(t))

    def deriv(self, t):
        with np.errstate(invalid="ignore", divide="ignore"):
            return (self.a * _f(t) + 0.5 * self.b) / np.sqrt(self._radicand(t))

    def derivative(self):
        return Quotient(Linear(self.a, 0.5 * self.b), self)


@dataclass(frozen=True)
class Quotient(ScalarPath):
    num: ScalarPath
    den: ScalarPath

    def value(self, t):
        with np.errstate(divide="ignore", invalid="ignore"):
            return self.num.value(t) / self.den.value(t)

    def deriv(self, t):
        n, d = self.num.value(t), self.den.value(t)
        with np.errstate(divide="ignore", invalid="ignore"):
            return (self.num.deriv(t) * d - n * self.den.deriv(t)) / (d * d)

    def derivative(self):
        top = PathSum(PathProduct(self.num.derivative(), self.den),
                      PathScale(-1.0, PathProduct(self.num, self.den.derivative())))
        return Quotient(top, PathProduct(self.den, self.den))

    def check_denominator(self, t0: float, t1: float, samples: int = 2001, tol: float = 1e-12):
        """Raise ``NonFinite`` if the denominator comes within ``tol`` of zero on ``[t0, t1]``."""
        d = self.den.value(np.linspace(t0, t1, samples))
        if not np.all(np.isfinite(d)) or np.min(np.abs(d)) < tol:
            raise NonFinite(f"quotient denominator vanishes on [{t0}, {t1}]")


@dataclass(frozen=True)
class PathSum(ScalarPath):
    lhs: ScalarPath
    rhs: ScalarPath

    def value(self, t):
        return self.lhs.value(t) + self.rhs.value(t)

    def deriv(self, t):
        return self.lhs.deriv(t) + self.rhs.deriv(t)

    def derivative(self):
        return PathSum(self.lhs.derivative(), self.rhs.derivative())


@dataclass(frozen=True)
class PathProduct(ScalarPath):
    lhs: ScalarPath
    rhs: ScalarPath

    def value(self, t):
        return self.lhs.value(t) * self.rhs.value(t)

    def deriv(self, t):
        return self.lhs.deriv(t) * self.rhs.value(t) + self.lhs.value(t) * self.rhs.deriv(t)

    def derivative(self):
        return PathSum(PathProduct(self.lhs.derivative(), self.rhs),
                       PathProduct(self.lhs, self.rhs.derivative()))


@dataclass(frozen=True)
class PathScale(ScalarPath):
    c: float
    inner: ScalarPath

    def value(self, t):
        return self.c * self.inner.value(t)

    def deriv(self, t):
        return self.c * self.inner.deriv(t)

    def derivative(self):
        return PathScale(self.c, self.inner.derivative())


def quotients(path: ScalarPath):
    """All :class:`Quotient` nodes inside ``path`` (for denominator checks)."""
    if isinstance(path, Quotient):
        yield path
    for name in ("num", "den", "lhs", "rhs", "inner", "re", "im", "mod", "arg"):
        child = getattr(path, name, None)
        if isinstance(child, (ScalarPath, ComplexPath)):
            yield from quotients(child)


# ---------------------------------------------------------------------------
# complex-valued paths
# ---------------------------------------------------------------------------

class ComplexPath:
    """Complex-valued function of time with analytic derivative."""

    def value(self, t):
        raise NotImplementedError

    def deriv(self, t):
        raise NotImplementedError

    def derivative(self) -> "ComplexPath":
        raise NotImplementedError

    def __call__(self, t):
        return self.value(t)


@dataclass(frozen=True)
class Cartesian(ComplexPath):
    """``re(t) + i*im(t)``."""

    re: ScalarPath
    im: ScalarPath

    def value(self, t):
        return self.re.value(t) + 1j * self.im.value(t)

    def deriv(self, t):
        return self.re.deriv(t) + 1j * self.im.deriv(t)

    def derivative(self):
        return Cartesian(self.re.derivative(), self.im.derivative())


@dataclass(frozen=True)
class Polar(ComplexPath):
    """``mod(t) * exp(i*arg(t))``."""

    mod: ScalarPath
    arg: ScalarPath

    def value(self, t):
        return self.mod.value(t) * np.exp(1j * self.arg.value(t))

    def deriv(self, t):
        m = self.mod.value(t)
        return (self.mod.deriv(t) + 1j * m * self.arg.deriv(t)) * np.exp(1j * self.arg.value(t))

    def derivative(self):
        return ComplexProduct(
            Cartesian(self.mod.derivative(), PathProduct(self.mod, self.arg.derivative())),
            Polar(Constant(1.0), self.arg),
        )


@dataclass(frozen=True)
class ComplexProduct(ComplexPath):
    lhs: ComplexPath
    rhs: ComplexPath

    def value(self, t):
        return self.lhs.value(t) * self.rhs.value(t)

    def deriv(self, t):
        return self.lhs.deriv(t) * self.rhs.value(t) + self.lhs.value(t) * self.rhs.deriv(t)

    def derivative(self):
        return ComplexSum(ComplexProduct(self.lhs.derivative(), self.rhs),
                          ComplexProduct(self.lhs, self.rhs.derivative()))


@dataclass(frozen=True)
class ComplexSum(ComplexPath):
    lhs: ComplexPath
    rhs: ComplexPath

    def value(self, t):
        return self.lhs.value(t) + self.rhs.value(t)

    def deriv(self, t):
        return self.lhs.deriv(t) + self.rhs.deriv(t)

    def derivative(self):
        return ComplexSum(self.lhs.derivative(), self.rhs.derivative())


def as_complex_path(p) -> ComplexPath:
    """Promote a real path to a complex one with zero imaginary part."""
    if isinstance(p, ComplexPath):
        return p
    return Cartesian(_lift(p), Constant(0.0))


# ---------------------------------------------------------------------------
# JSON grammar
# ---------------------------------------------------------------------------

def _num(obj: dict, key: str, where: str) -> float:
    if key not in obj:
        raise ManifestError(f"{where}.{key}", "missing field")
    v = obj[key]
    if isinstance(v, bool) or not isinstance(v, (int, float)) or not math.isfinite(v):
        raise ManifestError(f"{where}.{key}", f"expected a finite number, got {v!r}")
    return float(v)


def path_from_json(obj: Any, where: str = "path") -> ScalarPath:
    """Parse a real path manifest; a bare number means a constant."""
    if isinstance(obj, (int, float)) and not isinstance(obj, bool):
        return Constant(float(obj))
    if not isinstance(obj, dict) or "kind" not in obj:
        raise ManifestError(where, "path must be a number or an object with a 'kind'")
    kind = obj["kind"]
    if kind == "constant":
        return Constant(_num(obj, "v", where))
    if kind == "linear":
        return Linear(_num(obj, "a", where), _num(obj, "b", where))
    if kind == "poly":
        coeffs = obj.get("coeffs")
        if not isinstance(coeffs, list) or not coeffs:
            raise ManifestError(f"{where}.coeffs", "expected a non-empty list of numbers")
        return Poly(tuple(_num({"c": c}, "c", f"{where}.coeffs[{i}]") for i, c in enumerate(coeffs)))
    if kind == "sinusoid":
        return Sinusoid(_num(obj, "amp", where), _num(obj, "freq", where),
                        _num(obj, "phase", where) if "phase" in obj else 0.0)
    if kind == "sqrt_quad":
        return SqrtQuad(_num(obj, "a", where), _num(obj, "b", where), _num(obj, "c", where))
    if kind == "quotient":
        return Quotient(path_from_json(obj.get("num"), f"{where}.num"),
                        path_from_json(obj.get("den"), f"{where}.den"))
    if kind == "sum":
        return PathSum(path_from_json(obj.get("lhs"), f"{where}.lhs"),
                       path_from_json(obj.get("rhs"), f"{where}.rhs"))
    if kind == "product":
        return PathProduct(path_from_json(obj.get("lhs"), f"{where}.lhs"),
                           path_from_json(obj.get("rhs"), f"{where}.rhs"))
    if kind == "scale":
        return PathScale(_num(obj, "c", where), path_from_json(obj.get("inner"), f"{where}.inner"))
    raise ManifestError(f"{where}.kind", f"unknown path kind {kind!r}")


def path_to_json(p: ScalarPath) -> dict:
    if isinstance(p, Constant):
        return {"kind": "constant", "v": p.v}
    if isinstance(p, Linear):
        return {"kind": "linear", "a": p.a, "b": p.b}
    if isinstance(p, Poly):
        return {"kind": "poly", "coeffs": list(p.coeffs)}
    if isinstance(p, Sinusoid):
        return {"kind": "sinusoid", "amp": p.amp, "freq": p.freq, "phase": p.phase}
    if isinstance(p, SqrtQuad):
        return {"kind": "sqrt_quad", "a": p.a, "b": p.b, "c": p.c}
    if isinstance(p, Quotient):
        return {"kind": "quotient", "num": path_to_json(p.num), "den": path_to_json(p.den)}
    if isinstance(p, PathSum):
        return {"kind": "sum", "lhs": path_to_json(p.lhs), "rhs": path_to_json(p.rhs)}
    if isinstance(p, PathProduct):
        return {"kind": "product", "lhs": path_to_json(p.lhs), "rhs": path_to_json(p.rhs)}
    if isinstance(p, PathScale):
        return {"kind": "scale", "c": p.c, "inner": path_to_json(p.inner)}
    raise TypeError(f"not a ScalarPath: {p!r}")


def complex_path_from_json(obj: Any, where: str = "path") -> ComplexPath:
    """``{"re":..,"im":..}`` or ``{"mod":..,"arg":..}``; a real path is promoted."""
    if isinstance(obj, dict) and ("re" in obj or "im" in obj):
        return Cartesian(path_from_json(obj.get("re", 0.0), f"{where}.re"),
                         path_from_json(obj.get("im", 0.0), f"{where}.im"))
    if isinstance(obj, dict) and ("mod" in obj or "arg" in obj):
        return Polar(path_from_json(obj.get("mod", 1.0), f"{where}.mod"),
                     path_from_json(obj.get("arg", 0.0), f"{where}.arg"))
    return as_complex_path(path_from_json(obj, where))


def complex_path_to_json(p: ComplexPath) -> dict:
    if isinstance(p, Cartesian):
        return {"re": path_to_json(p.re), "im": path_to_json(p.im)}
    if isinstance(p, Polar):
        return {"mod": path_to_json(p.mod), "arg": path_to_json(p.arg)}
    raise TypeError(f"complex path {p!r} has no manifest form")
