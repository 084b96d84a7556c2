"""Named, fully parameterized flows: the classical Kirchhoff and Gerstner
solutions and the worked examples of each family."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

from . import expr as ex
from .errors import UnknownPreset
from .families import (
    FamilySpec,
    GeneralLinIndep,
    GeneralLinIndepFlat,
    LinDepGeneral,
    LinDepScaled,
    LinIndepCase1,
    LinIndepCase2,
    LinIndepCase3,
    LinIndepCase4,
)
from .paths import Constant, Linear, Poly, Polar, Sinusoid, SqrtQuad


@dataclass(frozen=True)
class DomainHint:
    """Suggested label rectangle and time window for a preset."""

    a_range: tuple[float, float]
    b_range: tuple[float, float]
    t_range: tuple[float, float] = (0.0, 1.0)


@dataclass(frozen=True)
class Preset:
    name: str
    spec: FamilySpec
    f0: ex.AnalyticExpr
    g0: ex.AnalyticExpr
    domain: DomainHint
    description: str
    notes: str = ""

    def __iter__(self):
        # allows ``spec, f0, g0, domain = preset(...)``
        return iter((self.spec, self.f0, self.g0, self.domain))


def kirchhoff(A: float = 1.0, k: float = 1.0, lam: float = 0.5, c: float = 1.0) -> Preset:
    """Rotating Kirchhoff vortex: ``f = kA e^{i(ct + kz)}``, ``g = kA|lambda| e^{ikz}``.

    Realized as the scaled linearly dependent family with ``r = |lambda|``,
    ``phi = 0`` and constant prescribed function ``c``.
    """
    if not 0 < abs(lam) < 1:
        raise ValueError("Kirchhoff needs 0 < |lambda| < 1")
    if A == 0 or k == 0:
        raise ValueError("Kirchhoff needs nonzero A and k")
    lam = abs(lam)
    spec = LinDepScaled(lam=lam, r=Constant(lam), phi=Constant(0.0), c=0.0, d=c)
    f0 = ex.ExpLinear(k * A, 1j * k)
    g0 = ex.ExpLinear(k * A * lam, 1j * k)
    period = 2 * math.pi / abs(k)
    return Preset("kirchhoff", spec, f0, g0,
                  DomainHint((-0.45 * period, 0.45 * period), (-1.0, 1.0), (0.0, 2 * math.pi / max(abs(c), 1e-12))),
                  "Kirchhoff elliptical vortex (linearly dependent family, r = |lambda|, phi = Xi = 0)")


def gerstner(k: float = 1.0, g: float = 9.81) -> Preset:
    """Gerstner wave: ``D1 = D2 = sqrt(k g)``, ``C4 = 0``, ``f0 = 1``, ``g0 = -e^{-ikz}``."""
    if k <= 0 or g <= 0:
        raise ValueError("Gerstner needs k > 0 and g > 0")
    s = math.sqrt(k * g)
    spec = GeneralLinIndep(D1=Constant(s), D2=Constant(s), C4mod=Constant(0.0), phi=Constant(0.0))
    period = 2 * math.pi / k
    return Preset("gerstner", spec, ex.Constant(1.0), ex.ExpLinear(-1.0, -1j * k),
                  DomainHint((-0.45 * period, 0.45 * period), (-2.0, -0.1), (0.0, 1.0)),
                  "Gerstner trochoidal wave (general family, D1 = D2 = sqrt(k g), Lambda = 2 sqrt(k g) t)")


def example_4_1(A: float = 1.0, k: float = 1.0, lam: float = 0.5, c: float = 1.0) -> Preset:
    """The scaled linearly dependent example with ``d = 0`` taken literally.

    With ``d = 0`` the prescribed function is ``c t`` and the phase is
    ``c t^2 / 2``; compare :func:`kirchhoff`, which uses the constant ``c``.
    """
    spec = LinDepScaled(lam=lam, r=Constant(lam), phi=Constant(0.0), c=c, d=0.0)
    return Preset("example-4-1", spec, ex.ExpLinear(k * A, 1j * k), ex.ExpLinear(k * A * lam, 1j * k),
                  DomainHint((-2.8, 2.8), (-1.0, 1.0), (0.0, 2.0)),
                  "scaled linearly dependent example (r = |lambda|, phi = 0, d = 0)",
                  "phase is c t^2/2 because the prescribed function is c t")


def example_4_2(r0: float = 2.0, k1: float = 1.0, k2: float = 2.0) -> Preset:
    """Case 1 example with ``r = r0``, ``psi = (1 + r0^2) t / r0^2``, ``h = 1 + r0^2``."""
    s = 1.0 + r0 * r0
    spec = LinIndepCase1(r=Constant(r0), psi=Linear(s / (r0 * r0), 0.0), h=s, d0=0.0)
    f0 = ex.ExpLinear(r0 * r0 / math.sqrt(s), 1j * k1)
    g0 = ex.ExpLinear(1.0 / r0, 1j * k2)
    return Preset("example-4-2", spec, f0, g0, DomainHint((-1.4, 1.4), (0.0, 1.0), (0.0, 1.0)),
                  "linearly independent case 1 example")


def example_4_3(A1: float = 2.0, A2: float = 1.0, k1: float = 1.0, k2: float = 2.0,
                c2: float = 1.0) -> Preset:
    """Case 2 example with ``w = c2``, ``p = h = d0 = 0``, ``psi = t``; valid for ``t > 1``."""
    spec = LinIndepCase2(c2=c2, w=c2, p=0.0, psi=Linear(1.0, 0.0), h=0.0, d0=0.0)
    return Preset("example-4-3", spec, ex.ExpLinear(A1, 1j * k1), ex.ExpLinear(A2, 1j * k2),
                  DomainHint((-1.4, 1.4), (0.5, 1.5), (1.5, 3.0)),
                  "linearly independent case 2 example (valid for t > 1)")


def example_4_4(A1: float = 2.0, A2: float = 1.0, k1: float = 1.0, k2: float = 2.0,
                c1: float = 1.0, h: float = 0.0) -> Preset:
    """Case 3 example with ``w = 2 c1``: moduli ``sqrt(6)/2`` and ``sqrt(2)/2``."""
    spec = LinIndepCase3(c1=c1, w=2 * c1, psi=Linear(1.0, 0.0), h=h, d0=0.0)
    return Preset("example-4-4", spec, ex.ExpLinear(A1, 1j * k1), ex.ExpLinear(A2, 1j * k2),
                  DomainHint((-1.4, 1.4), (0.5, 1.5), (0.0, 1.0)),
                  "linearly independent case 3 example (w = 2 c1)")


def example_4_5(A1: float = 2.0, A2: float = 1.0, k1: float = 1.0, k2: float = 2.0,
                c1: float = 1.0, c2: float = 1.0, h: float = 0.0) -> Preset:
    """Case 4 example with ``w = 2 c1``, ``p = 2 c2``: constant moduli again."""
    spec = LinIndepCase4(c1=c1, c2=c2, w=2 * c1, p=2 * c2, psi=Linear(1.0, 0.0), h=h, d0=0.0)
    return Preset("example-4-5", spec, ex.ExpLinear(A1, 1j * k1), ex.ExpLinear(A2, 1j * k2),
                  DomainHint((-1.4, 1.4), (0.5, 1.5), (0.0, 1.0)),
                  "linearly independent case 4 example (w = 2 c1, p = 2 c2)")


def example_5_1(A3: float = 1.0, k3: float = 1.0, lam: float = 0.5, nu0: float = 1.0) -> Preset:
    """General linearly dependent example with ``Xi = nu0 e^{i nu0 t}``.

    ``Xi`` is not purely imaginary, so the phase is complex and the modulus
    invariant fails; the preset exists to expose that.
    """
    spec = LinDepGeneral(lam=lam, r=Constant(lam), phi=Linear(1.0, 0.0),
                         Xi=Polar(Constant(nu0), Linear(nu0, 0.0)))
    return Preset("example-5-1", spec, ex.ExpLinear(A3, 1j * k3), ex.ExpLinear(A3 * lam, 1j * k3),
                  DomainHint((-2.8, 2.8), (-1.0, 1.0), (0.0, 1.0)),
                  "general linearly dependent example (Xi = nu0 e^{i nu0 t})",
                  "complex prescribed function: modulus invariant is not preserved")


def example_5_2(A4: float = 2.0, A5: float = 1.0, k4: float = 1.0, k5: float = 2.0,
                r1: float = 0.5) -> Preset:
    """Flat general example: ``D1 = 3 (1 + r1^2) t^2``, ``phi = (1 + r1^2) t / r1^2``."""
    s = 1.0 + r1 * r1
    spec = GeneralLinIndepFlat(r=Constant(r1), phi=Linear(s / (r1 * r1), 0.0), D1=Poly((0.0, 0.0, 3 * s)))
    return Preset("example-5-2", spec, ex.ExpLinear(A4, 1j * k4), ex.ExpLinear(A5, 1j * k5),
                  DomainHint((-1.4, 1.4), (0.5, 1.5), (0.0, 1.0)),
                  "general family, flat branch example")


def example_5_3(A6: float = 2.0, A7: float = 1.0, k6: float = 1.0, k7: float = 2.0,
                phi0: float = 0.5) -> Preset:
    """General example with ``|C4| = |sin t|`` and ``D1 = D2 = sqrt(1 + t^2)``."""
    root = SqrtQuad(1.0, 0.0, 1.0)
    spec = GeneralLinIndep(D1=root, D2=root, C4mod=Sinusoid(1.0, 1.0, 0.0), phi=Constant(phi0))
    return Preset("example-5-3", spec, ex.ExpLinear(A6, 1j * k6), ex.ExpLinear(A7, 1j * k7),
                  DomainHint((-1.4, 1.4), (0.5, 1.5), (0.0, 1.0)),
                  "general family example (|C4| = |sin t|, D1 = D2 = sqrt(1 + t^2))")


PRESETS: dict[str, Callable[..., Preset]] = {
    "kirchhoff": kirchhoff,
    "gerstner": gerstner,
    "example-4-1": example_4_1,
    "example-4-2": example_4_2,
    "example-4-3": example_4_3,
    "example-4-4": example_4_4,
    "example-4-5": example_4_5,
    "example-5-1": example_5_1,
    "example-5-2": example_5_2,
    "example-5-3": example_5_3,
}


def preset(name: str, **params) -> Preset:
    """Look up a preset by name, forwarding keyword overrides to its builder.

    >>> preset("gerstner").spec.kind
    'general'
    """
    try:
        builder = PRESETS[name]
    except KeyError:
        raise UnknownPreset(f"unknown preset {name!r}; known: {', '.join(PRESETS)}") from None
    return builder(**params)


def preset_names() -> list[str]:
    return list(PRESETS)
