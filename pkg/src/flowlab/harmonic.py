"""Harmonic maps ``K = F + conj(G)`` and their Schwarzian-type derivatives.

All z-derivatives come from the symbolic kernel in :mod:`flowlab.expr`;
finite differences are used only by the tests.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .errors import DegenerateDilatation, ZeroDenominator
from .expr import AnalyticExpr, Mobius, Scale, Sum, derivative, evaluate

ZERO_TOL = 1e-14
DEGENERACY_TOL = 1e-12


@dataclass(frozen=True)
class HarmonicMap:
    """The map ``z -> F(z) + conj(G(z))``.

    Only the derivatives ``F'`` and ``G'`` enter the local quantities, so a map
    may also be built from them directly with :meth:`from_derivatives` when
    closed-form antiderivatives are unavailable.
    """

    F: AnalyticExpr | None
    G: AnalyticExpr | None
    Fp: AnalyticExpr = field(default=None, repr=False)
    Gp: AnalyticExpr = field(default=None, repr=False)

    def __post_init__(self):
        if self.Fp is None:
            object.__setattr__(self, "Fp", derivative(self.F))
        if self.Gp is None:
            object.__setattr__(self, "Gp", derivative(self.G))

    @classmethod
    def from_derivatives(cls, f: AnalyticExpr, g: AnalyticExpr) -> "HarmonicMap":
        return cls(None, None, f, g)

    @cached_property
    def Fpp(self):
        return derivative(self.Fp)

    @cached_property
    def Fppp(self):
        return derivative(self.Fpp)

    @cached_property
    def Gpp(self):
        return derivative(self.Gp)

    @cached_property
    def Gppp(self):
        return derivative(self.Gpp)

    def conjugate(self) -> "HarmonicMap":
        """The map with the roles of F and G exchanged, i.e. ``conj(K)``."""
        return HarmonicMap(self.G, self.F, self.Gp, self.Fp)


def _nonzero(w, what: str):
    if np.any(np.abs(w) < ZERO_TOL):
        raise ZeroDenominator(f"|{what}| < {ZERO_TOL:g}")
    return w


def jacobian(hmap: HarmonicMap, z):
    """``|F'|^2 - |G'|^2``."""
    return np.abs(evaluate(hmap.Fp, z)) ** 2 - np.abs(evaluate(hmap.Gp, z)) ** 2


def dilatation(hmap: HarmonicMap, z):
    """Second complex dilatation ``q = G'/F'``."""
    fp = _nonzero(evaluate(hmap.Fp, z), "F'")
    return evaluate(hmap.Gp, z) / fp


def _q_parts(hmap: HarmonicMap, z):
    """Return F', F'', F''', q, q', q'' at z."""
    f1 = _nonzero(evaluate(hmap.Fp, z), "F'")
    f2 = evaluate(hmap.Fpp, z)
    f3 = evaluate(hmap.Fppp, z)
    g1 = evaluate(hmap.Gp, z)
    g2 = evaluate(hmap.Gpp, z)
    g3 = evaluate(hmap.Gppp, z)
    q = g1 / f1
    q1 = g2 / f1 - g1 * f2 / f1**2
    q2 = g3 / f1 - 2 * g2 * f2 / f1**2 - g1 * f3 / f1**2 + 2 * g1 * f2**2 / f1**3
    return f1, f2, f3, q, q1, q2


def _one_minus_q2(q):
    w = 1.0 - np.abs(q) ** 2
    # The cutoff is applied to |1 - |q|^2| so that sense-reversing maps
    # (such as conj(K) of a sense-preserving K) remain admissible.
    if np.any(np.abs(w) < DEGENERACY_TOL):
        raise DegenerateDilatation(f"|1 - |q|^2| < {DEGENERACY_TOL:g}")
    return w


def pre_schwarzian(hmap: HarmonicMap, z):
    """``P_H = F''/F' - q' conj(q) / (1 - |q|^2)``, which equals d/dz log J."""
    f1, f2, _, q, q1, _ = _q_parts(hmap, z)
    w = _one_minus_q2(q)
    return f2 / f1 - q1 * np.conj(q) / w


def classical_schwarzian(F: AnalyticExpr, z):
    """``S(F) = (F''/F')' - (F''/F')^2 / 2`` via exact derivatives."""
    f1e = derivative(F)
    f2e = derivative(f1e)
    f3e = derivative(f2e)
    f1 = _nonzero(evaluate(f1e, z), "F'")
    f2 = evaluate(f2e, z)
    f3 = evaluate(f3e, z)
    return _schwarzian_from(f1, f2, f3)


def _schwarzian_from(f1, f2, f3):
    return f3 / f1 - 1.5 * (f2 / f1) ** 2


def schwarzian(hmap: HarmonicMap, z):
    """Harmonic Schwarzian ``S_H`` from its expanded form.

    ``S(F) + conj(q)/(1-|q|^2) * (F'' q'/F' - q'') - 3/2 (q' conj(q)/(1-|q|^2))^2``
    """
    f1, f2, f3, q, q1, q2 = _q_parts(hmap, z)
    w = _one_minus_q2(q)
    qb = np.conj(q)
    return (
        _schwarzian_from(f1, f2, f3)
        + qb / w * (f2 * q1 / f1 - q2)
        - 1.5 * (q1 * qb / w) ** 2
    )


def transfer_pair(
    hmap: HarmonicMap, alpha: complex, beta: complex, gamma: float, c: float = 1.0
) -> HarmonicMap:
    """Build ``K2`` from ``K1`` with ``J(K1) = c * J(K2)`` pointwise.

    ``F2' = (alpha F1' + beta e^{i gamma} G1') / sqrt(c)`` and
    ``G2' = (conj(beta) F1' + conj(alpha) e^{i gamma} G1') / sqrt(c)``
    with ``|alpha|^2 - |beta|^2 = 1``.  For ``c = 1`` this is the plain
    unimodular transfer; the ``1/sqrt(c)`` factor supplies the Jacobian ratio.
    """
    if abs(abs(alpha) ** 2 - abs(beta) ** 2 - 1.0) > 1e-12:
        raise ValueError("transfer coefficients must satisfy |alpha|^2 - |beta|^2 = 1")
    if c <= 0:
        raise ValueError("Jacobian ratio c must be positive")
    s = 1.0 / np.sqrt(c)
    rot = np.exp(1j * gamma)
    f2 = Sum(Scale(s * alpha, hmap.Fp), Scale(s * beta * rot, hmap.Gp))
    g2 = Sum(Scale(s * np.conj(beta), hmap.Fp), Scale(s * np.conj(alpha) * rot, hmap.Gp))
    return HarmonicMap.from_derivatives(f2, g2)


def mobius_compose(m: complex, n: complex, s: complex, d: complex, F: AnalyticExpr) -> AnalyticExpr:
    """``T o F`` for the Mobius map ``T(w) = (m w + n)/(s w + d)``."""
    return Mobius(m, n, s, d, F)


__all__ = [
    "HarmonicMap",
    "jacobian",
    "dilatation",
    "pre_schwarzian",
    "schwarzian",
    "classical_schwarzian",
    "transfer_pair",
    "mobius_compose",
]
