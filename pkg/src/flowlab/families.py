"""Explicit solution families and their time coefficients.

Every family produces coefficients ``alpha(t) = R e^{i Phi}``,
``beta(t) = rho e^{i phi}`` and a rotation ``gamma(t)`` that act on the
initial pair ``(f0, g0)``:

* linearly independent form:
  ``f = alpha f0 + e^{i gamma} beta g0``, ``g = conj(beta) f0 + e^{i gamma} conj(alpha) g0``
  with ``|alpha|^2 - |beta|^2 = 1``;
* linearly dependent form (``g0 = lambda f0``):
  ``f = alpha f0``, ``g = beta f0`` with ``|alpha|^2 - |beta|^2 = 1 - |lambda|^2``.

The moduli ``R``, ``rho`` and the rotation ``gamma`` are closed-form per
family.  The phase ``Phi`` always comes from the master relation

    Im(alpha' conj(alpha) - beta' conj(beta)) = m(t),

i.e. ``Phi' = (m + rho^2 phi') / R^2``, integrated from ``t = 0`` by adaptive
quadrature.  ``m`` is the family's prescribed function.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Any, ClassVar

import numpy as np

from . import expr as ex
from .errors import ManifestError, MismatchedInitialPair, NonFinite, OutsideValidity
from .paths import (
    ComplexPath,
    Constant,
    ScalarPath,
    complex_path_from_json,
    complex_path_to_json,
    path_from_json,
    path_to_json,
    quotients,
)
from .quadrature import DEFAULT_QUADRATURE, QuadratureConfig, integrate_from_zero

LIN_DEP = "lin_dep"
LIN_INDEP = "lin_indep"

INITIAL_PAIR_TOL = 1e-10


@dataclass(frozen=True)
class CoefficientPath:
    """Coefficients of one family at the query time(s) ``t``.

    Fields are scalars for a scalar ``t`` and arrays for an array ``t``.
    ``master`` is the prescribed function ``m(t)`` of the master relation and
    ``lam`` is ``lambda`` for the linearly dependent form (``None`` otherwise).
    """

    mode: str
    t: Any
    alpha: Any
    beta: Any
    gamma: Any
    alpha_t: Any
    beta_t: Any
    gamma_t: Any
    master: Any
    lam: complex | None = None

    @property
    def modulus_constant(self) -> float:
        return 1.0 if self.mode == LIN_INDEP else 1.0 - abs(self.lam) ** 2

    def modulus_residual(self):
        """``|alpha|^2 - |beta|^2`` minus its conserved value."""
        return np.abs(self.alpha) ** 2 - np.abs(self.beta) ** 2 - self.modulus_constant

    def master_residual(self):
        """``Im(alpha' conj(alpha) - beta' conj(beta)) - m``."""
        lhs = self.alpha_t * np.conj(self.alpha) - self.beta_t * np.conj(self.beta)
        return np.imag(lhs) - self.master

    def real_part_residual(self):
        """``Re(alpha' conj(alpha) - beta' conj(beta))``, zero when the modulus is conserved."""
        return np.real(self.alpha_t * np.conj(self.alpha) - self.beta_t * np.conj(self.beta))

    def matrix(self):
        """Entries ``(a, b, c, d)`` and their time derivatives with
        ``f = a f0 + b g0`` and ``g = c f0 + d g0``."""
        if self.mode == LIN_DEP:
            zero = 0 * self.alpha
            return (self.alpha, zero, self.beta, zero), (self.alpha_t, zero, self.beta_t, zero)
        rot = np.exp(1j * self.gamma)
        a, b = self.alpha, rot * self.beta
        c, d = np.conj(self.beta), rot * np.conj(self.alpha)
        a_t = self.alpha_t
        b_t = rot * (1j * self.gamma_t * self.beta + self.beta_t)
        c_t = np.conj(self.beta_t)
        d_t = rot * (1j * self.gamma_t * np.conj(self.alpha) + np.conj(self.alpha_t))
        return (a, b, c, d), (a_t, b_t, c_t, d_t)


# ---------------------------------------------------------------------------
# family specifications
# ---------------------------------------------------------------------------

def _sqrt_with_rate(sq, sq_t):
    """``sqrt(sq)`` and its time derivative; zero rate where the root vanishes."""
    root = np.sqrt(np.maximum(sq, 0.0))
    with np.errstate(divide="ignore", invalid="ignore"):
        rate = np.where(root > 0, sq_t / (2.0 * np.where(root > 0, root, 1.0)), 0.0)
    return root, rate


@dataclass(frozen=True)
class Moduli:
    R: Any
    R_t: Any
    rho: Any
    rho_t: Any
    phi: Any
    phi_t: Any
    gamma: Any
    gamma_t: Any
    master: Any


class FamilySpec:
    """Base class: subclasses fill in moduli, rotation and prescribed function."""

    mode: ClassVar[str] = LIN_INDEP
    kind: ClassVar[str] = ""
    predicate: ClassVar[str] = "always valid"

    # -- per-family pieces -------------------------------------------------
    def valid(self, t) -> np.ndarray:
        return np.ones(np.shape(t), dtype=bool)

    def master(self, t):
        raise NotImplementedError

    def squares(self, t):
        """``(R^2, rho^2)`` at ``t``; must stay finite outside the validity set
        wherever the phase integrand is still meaningful."""
        raise NotImplementedError

    def beta_phase(self) -> ScalarPath:
        raise NotImplementedError

    def moduli(self, t, cfg: QuadratureConfig) -> Moduli:
        raise NotImplementedError

    def paths(self):
        return ()

    # -- shared machinery --------------------------------------------------
    def phase_rate(self, s):
        """``Phi'(s) = (m(s) + rho(s)^2 phi'(s)) / R(s)^2``."""
        R2, rho2 = self.squares(s)
        with np.errstate(divide="ignore", invalid="ignore"):
            return (self.master(s) + rho2 * self.beta_phase().deriv(s)) / R2

    def check_validity(self, t):
        t_arr = np.atleast_1d(np.asarray(t, dtype=float))
        ok = self.valid(t_arr)
        if not np.all(ok):
            bad = float(t_arr[~ok][0])
            raise OutsideValidity(f"{self.kind}: predicate '{self.predicate}' fails at t = {bad!r}")

    def check_paths(self, t0: float, t1: float) -> None:
        """Dense check that no quotient denominator vanishes on ``[t0, t1]``."""
        for p in self.paths():
            for q in quotients(p):
                q.check_denominator(min(0.0, t0), t1)

    def coefficients(self, t, cfg: QuadratureConfig = DEFAULT_QUADRATURE) -> CoefficientPath:
        scalar = np.ndim(t) == 0
        t_arr = np.atleast_1d(np.asarray(t, dtype=float))
        self.check_validity(t_arr)
        try:
            mo = self.moduli(t_arr, cfg)
            Phi = integrate_from_zero(self.phase_rate, t_arr, cfg)
        except NonFinite as exc:
            raise OutsideValidity(f"{self.kind}: {exc} (predicate '{self.predicate}')") from None
        Phi_t = self.phase_rate(t_arr)
        e_Phi = np.exp(1j * Phi)
        e_phi = np.exp(1j * mo.phi)
        alpha = mo.R * e_Phi
        alpha_t = (mo.R_t + 1j * mo.R * Phi_t) * e_Phi
        beta = mo.rho * e_phi
        beta_t = (mo.rho_t + 1j * mo.rho * mo.phi_t) * e_phi
        fields = dict(
            alpha=alpha, beta=beta, gamma=np.asarray(mo.gamma, dtype=float) + 0 * t_arr,
            alpha_t=alpha_t, beta_t=beta_t,
            gamma_t=np.asarray(mo.gamma_t, dtype=float) + 0 * t_arr,
            master=mo.master + 0 * t_arr,
        )
        if not all(np.all(np.isfinite(v)) for v in fields.values()):
            raise OutsideValidity(f"{self.kind}: non-finite coefficients (predicate '{self.predicate}')")
        if scalar:
            fields = {k: v[0].item() for k, v in fields.items()}
            t_out = float(t_arr[0])
        else:
            t_out = t_arr
        return CoefficientPath(mode=self.mode, t=t_out, lam=getattr(self, "lam", None), **fields)

    def to_json(self) -> dict:
        return {"family": self.kind, "params": self._params_json()}

    def _params_json(self) -> dict:
        raise NotImplementedError


def _lam_ok(lam: complex, kind: str):
    if not 0 < abs(lam) < 1:
        raise ValueError(f"{kind}: need 0 < |lambda| < 1, got {lam!r}")


def _start_matches(r: ScalarPath, phi: ScalarPath, lam: complex, kind: str):
    beta0 = float(r.value(0.0)) * np.exp(1j * float(phi.value(0.0)))
    if abs(beta0 - lam) > INITIAL_PAIR_TOL:
        raise ValueError(f"{kind}: r(0) e^(i phi(0)) = {beta0:.12g} must equal lambda = {lam!r}")


@dataclass(frozen=True)
class LinDepCommuting(FamilySpec):
    """``alpha = cosh r``, ``beta = e^{-i k0} sinh r``, ``gamma = 0``."""

    r: ScalarPath
    k0: float = 0.0

    kind: ClassVar[str] = "lin_dep_commuting"

    def master(self, t):
        return 0.0 * np.asarray(t, dtype=float)

    def squares(self, t):
        r = self.r.value(t)
        return np.cosh(r) ** 2, np.sinh(r) ** 2

    def beta_phase(self):
        return Constant(-self.k0)

    def moduli(self, t, cfg):
        r, r_t = self.r.value(t), self.r.deriv(t)
        zero = 0.0 * t
        return Moduli(np.cosh(r), np.sinh(r) * r_t, np.sinh(r), np.cosh(r) * r_t,
                      zero - self.k0, zero, zero, zero, zero)

    def paths(self):
        return (self.r,)

    def _params_json(self):
        return {"r": path_to_json(self.r), "k0": self.k0}


@dataclass(frozen=True)
class LinDepScaled(FamilySpec):
    """``R^2 = 1 - |lambda|^2 + r^2`` with prescribed function ``c t + d``."""

    lam: complex
    r: ScalarPath
    phi: ScalarPath
    c: float = 0.0
    d: float = 0.0

    mode: ClassVar[str] = LIN_DEP
    kind: ClassVar[str] = "lin_dep_scaled"

    def __post_init__(self):
        object.__setattr__(self, "lam", complex(self.lam))
        _lam_ok(self.lam, self.kind)
        _start_matches(self.r, self.phi, self.lam, self.kind)

    def master(self, t):
        return self.c * np.asarray(t, dtype=float) + self.d

    def squares(self, t):
        r = self.r.value(t)
        return 1.0 - abs(self.lam) ** 2 + r * r, r * r

    def beta_phase(self):
        return self.phi

    def moduli(self, t, cfg):
        r, r_t = self.r.value(t), self.r.deriv(t)
        R2, _ = self.squares(t)
        R, R_t = _sqrt_with_rate(R2, 2 * r * r_t)
        zero = 0.0 * t
        return Moduli(R, R_t, r, r_t, self.phi.value(t), self.phi.deriv(t), zero, zero, self.master(t))

    def paths(self):
        return (self.r, self.phi)

    def _params_json(self):
        return {"lambda": [self.lam.real, self.lam.imag], "r": path_to_json(self.r),
                "phi": path_to_json(self.phi), "c": self.c, "d": self.d}


@dataclass(frozen=True)
class LinDepGeneral(FamilySpec):
    """Prescribed function ``-i Xi(t)``; complex unless ``Xi`` is purely imaginary."""

    lam: complex
    r: ScalarPath
    phi: ScalarPath
    Xi: ComplexPath

    mode: ClassVar[str] = LIN_DEP
    kind: ClassVar[str] = "lin_dep_general"

    def __post_init__(self):
        object.__setattr__(self, "lam", complex(self.lam))
        _lam_ok(self.lam, self.kind)
        _start_matches(self.r, self.phi, self.lam, self.kind)

    def master(self, t):
        return -1j * self.Xi.value(t)

    def squares(self, t):
        r = self.r.value(t)
        return 1.0 - abs(self.lam) ** 2 + r * r, r * r

    def beta_phase(self):
        return self.phi

    def moduli(self, t, cfg):
        r, r_t = self.r.value(t), self.r.deriv(t)
        R2, _ = self.squares(t)
        R, R_t = _sqrt_with_rate(R2, 2 * r * r_t)
        zero = 0.0 * t
        return Moduli(R, R_t, r, r_t, self.phi.value(t), self.phi.deriv(t), zero, zero, self.master(t))

    def paths(self):
        return (self.r, self.phi, self.Xi)

    def _params_json(self):
        return {"lambda": [self.lam.real, self.lam.imag], "r": path_to_json(self.r),
                "phi": path_to_json(self.phi), "Xi": complex_path_to_json(self.Xi)}


@dataclass(frozen=True)
class LinIndepCase1(FamilySpec):
    """``R^2 = 1 + r^2``, ``gamma = 0``, prescribed ``h t + d0``."""

    r: ScalarPath
    psi: ScalarPath
    h: float = 0.0
    d0: float = 0.0

    kind: ClassVar[str] = "lin_indep_case1"

    def master(self, t):
        return self.h * np.asarray(t, dtype=float) + self.d0

    def squares(self, t):
        r = self.r.value(t)
        return 1.0 + r * r, r * r

    def beta_phase(self):
        return self.psi

    def moduli(self, t, cfg):
        r, r_t = self.r.value(t), self.r.deriv(t)
        R, R_t = _sqrt_with_rate(1.0 + r * r, 2 * r * r_t)
        zero = 0.0 * t
        return Moduli(R, R_t, r, r_t, self.psi.value(t), self.psi.deriv(t), zero, zero, self.master(t))

    def paths(self):
        return (self.r, self.psi)

    def _params_json(self):
        return {"r": path_to_json(self.r), "psi": path_to_json(self.psi), "h": self.h, "d0": self.d0}


class _RationalModuli(FamilySpec):
    """Shared assembly for the three rational-modulus cases."""

    def master(self, t):
        return self.h * np.asarray(t, dtype=float) + self.d0

    def beta_phase(self):
        return self.psi

    def _square_rates(self, t):
        raise NotImplementedError

    def _rotation(self, t):
        raise NotImplementedError

    def moduli(self, t, cfg):
        R2, rho2 = self.squares(t)
        R2_t, rho2_t = self._square_rates(t)
        R, R_t = _sqrt_with_rate(R2, R2_t)
        rho, rho_t = _sqrt_with_rate(rho2, rho2_t)
        gamma, gamma_t = self._rotation(t)
        return Moduli(R, R_t, rho, rho_t, self.psi.value(t), self.psi.deriv(t),
                      gamma, gamma_t, self.master(t))

    def paths(self):
        return (self.psi,)


@dataclass(frozen=True)
class LinIndepCase2(_RationalModuli):
    """``R^2 = (w t + p + c2)/(2 c2)``, ``rho^2 = (w t + p - c2)/(2 c2)``, ``gamma = c2 t``."""

    c2: float
    w: float
    p: float
    psi: ScalarPath
    h: float = 0.0
    d0: float = 0.0

    kind: ClassVar[str] = "lin_indep_case2"
    predicate: ClassVar[str] = "(w t + p)/c2 > 1"

    def __post_init__(self):
        if self.c2 == 0:
            raise ValueError("lin_indep_case2 needs c2 != 0")

    def valid(self, t):
        return (self.w * t + self.p) / self.c2 > 1.0

    def squares(self, t):
        v = self.w * np.asarray(t, dtype=float) + self.p
        return (v + self.c2) / (2 * self.c2), (v - self.c2) / (2 * self.c2)

    def _square_rates(self, t):
        rate = self.w / (2 * self.c2) + 0.0 * t
        return rate, rate

    def _rotation(self, t):
        return self.c2 * t, self.c2 + 0.0 * t

    def _params_json(self):
        return {"c2": self.c2, "w": self.w, "p": self.p, "psi": path_to_json(self.psi),
                "h": self.h, "d0": self.d0}


@dataclass(frozen=True)
class LinIndepCase3(_RationalModuli):
    """Constant moduli ``R^2 = (w + c1)/(2 c1)``, ``rho^2 = (w - c1)/(2 c1)``, ``gamma = c1 t^2``."""

    c1: float
    w: float
    psi: ScalarPath
    h: float = 0.0
    d0: float = 0.0

    kind: ClassVar[str] = "lin_indep_case3"
    predicate: ClassVar[str] = "w/c1 > 1"

    def __post_init__(self):
        if self.c1 == 0:
            raise ValueError("lin_indep_case3 needs c1 != 0")

    def valid(self, t):
        return np.full(np.shape(t), self.w / self.c1 > 1.0)

    def squares(self, t):
        zero = 0.0 * np.asarray(t, dtype=float)
        return zero + (self.w + self.c1) / (2 * self.c1), zero + (self.w - self.c1) / (2 * self.c1)

    def _square_rates(self, t):
        zero = 0.0 * t
        return zero, zero

    def _rotation(self, t):
        return self.c1 * t * t, 2 * self.c1 * t

    def _params_json(self):
        return {"c1": self.c1, "w": self.w, "psi": path_to_json(self.psi), "h": self.h, "d0": self.d0}


@dataclass(frozen=True)
class LinIndepCase4(_RationalModuli):
    """``R^2 = ((w+c1) t + p + c2) / (2 (c1 t + c2))``, ``gamma = c1 t^2 + c2 t``."""

    c1: float
    c2: float
    w: float
    p: float
    psi: ScalarPath
    h: float = 0.0
    d0: float = 0.0

    kind: ClassVar[str] = "lin_indep_case4"
    predicate: ClassVar[str] = "(w t + p)/(c1 t + c2) > 1"

    def __post_init__(self):
        if self.c1 == 0 or self.c2 == 0:
            raise ValueError("lin_indep_case4 needs c1 != 0 and c2 != 0")

    def valid(self, t):
        den = self.c1 * t + self.c2
        with np.errstate(divide="ignore", invalid="ignore"):
            return (den != 0) & ((self.w * t + self.p) / den > 1.0)

    def squares(self, t):
        t = np.asarray(t, dtype=float)
        den = 2 * (self.c1 * t + self.c2)
        with np.errstate(divide="ignore", invalid="ignore"):
            return ((self.w + self.c1) * t + self.p + self.c2) / den, \
                   ((self.w - self.c1) * t + self.p - self.c2) / den

    def _square_rates(self, t):
        den = self.c1 * t + self.c2
        # d/dt [(A t + B) / (2 (c1 t + c2))] = (A c2 - B c1) / (2 (c1 t + c2)^2)
        R2_t = ((self.w + self.c1) * self.c2 - (self.p + self.c2) * self.c1) / (2 * den * den)
        rho2_t = ((self.w - self.c1) * self.c2 - (self.p - self.c2) * self.c1) / (2 * den * den)
        return R2_t, rho2_t

    def _rotation(self, t):
        return self.c1 * t * t + self.c2 * t, 2 * self.c1 * t + self.c2

    def _params_json(self):
        return {"c1": self.c1, "c2": self.c2, "w": self.w, "p": self.p,
                "psi": path_to_json(self.psi), "h": self.h, "d0": self.d0}


@dataclass(frozen=True)
class GeneralLinIndepFlat(FamilySpec):
    """``R^2 = 1 + r^2``, ``gamma = 0``, prescribed ``D1(t)``."""

    r: ScalarPath
    phi: ScalarPath
    D1: ScalarPath

    kind: ClassVar[str] = "general_flat"

    def master(self, t):
        return self.D1.value(t)

    def squares(self, t):
        r = self.r.value(t)
        return 1.0 + r * r, r * r

    def beta_phase(self):
        return self.phi

    def moduli(self, t, cfg):
        r, r_t = self.r.value(t), self.r.deriv(t)
        R, R_t = _sqrt_with_rate(1.0 + r * r, 2 * r * r_t)
        zero = 0.0 * t
        return Moduli(R, R_t, r, r_t, self.phi.value(t), self.phi.deriv(t), zero, zero, self.master(t))

    def paths(self):
        return (self.r, self.phi, self.D1)

    def _params_json(self):
        return {"r": path_to_json(self.r), "phi": path_to_json(self.phi), "D1": path_to_json(self.D1)}


@dataclass(frozen=True)
class GeneralLinIndep(FamilySpec):
    """Rotation ``Lambda(t) = int_0^t sqrt((D1+D2)^2 - 4 |C4|^2)`` (non-negative branch).

    ``R^2 = (D1 + D2 + Lambda')/(2 Lambda')``, ``rho^2 = (D1 + D2 - Lambda')/(2 Lambda')``,
    prescribed ``D1(t)``.  Only ``|C4|^2`` enters, so ``C4mod`` may change sign.
    """

    D1: ScalarPath
    D2: ScalarPath
    C4mod: ScalarPath
    phi: ScalarPath

    kind: ClassVar[str] = "general"
    predicate: ClassVar[str] = "D1(t) + D2(t) > 2 |C4(t)|"

    def valid(self, t):
        S = self.D1.value(t) + self.D2.value(t)
        return S > 2.0 * np.abs(self.C4mod.value(t))

    def lambda_rate(self, t):
        S = self.D1.value(t) + self.D2.value(t)
        C = self.C4mod.value(t)
        with np.errstate(invalid="ignore"):
            return np.sqrt(S * S - 4.0 * C * C)

    def master(self, t):
        return self.D1.value(t)

    def squares(self, t):
        S = self.D1.value(t) + self.D2.value(t)
        C = self.C4mod.value(t)
        L = self.lambda_rate(t)
        # S - L = 4 C^2 / (S + L) avoids cancellation when |C4| is small
        with np.errstate(divide="ignore", invalid="ignore"):
            return (S + L) / (2 * L), 2 * C * C / (L * (S + L))

    def beta_phase(self):
        return self.phi

    def moduli(self, t, cfg):
        S = self.D1.value(t) + self.D2.value(t)
        S_t = self.D1.deriv(t) + self.D2.deriv(t)
        C, C_t = self.C4mod.value(t), self.C4mod.deriv(t)
        L = self.lambda_rate(t)
        L_t = (S * S_t - 4.0 * C * C_t) / L
        R2, _ = self.squares(t)
        R, R_t = _sqrt_with_rate(R2, (S_t * L - S * L_t) / (2 * L * L))
        # signed modulus rho = sqrt(2) C / sqrt(L (S + L)) stays smooth where C4 vanishes
        Q = L * (S + L)
        Q_t = L_t * (S + L) + L * (S_t + L_t)
        rho = math.sqrt(2.0) * C / np.sqrt(Q)
        rho_t = math.sqrt(2.0) * (C_t / np.sqrt(Q) - C * Q_t / (2.0 * Q ** 1.5))
        Lam = integrate_from_zero(self.lambda_rate, t, cfg)
        return Moduli(R, R_t, rho, rho_t, self.phi.value(t), self.phi.deriv(t), Lam, L, self.master(t))

    def paths(self):
        return (self.D1, self.D2, self.C4mod, self.phi)

    def _params_json(self):
        return {"D1": path_to_json(self.D1), "D2": path_to_json(self.D2),
                "C4mod": path_to_json(self.C4mod), "phi": path_to_json(self.phi)}


FAMILIES = {
    cls.kind: cls
    for cls in (LinDepCommuting, LinDepScaled, LinDepGeneral, LinIndepCase1, LinIndepCase2,
                LinIndepCase3, LinIndepCase4, GeneralLinIndepFlat, GeneralLinIndep)
}


# ---------------------------------------------------------------------------
# public operations
# ---------------------------------------------------------------------------

def coefficients_at(spec: FamilySpec, t, cfg: QuadratureConfig = DEFAULT_QUADRATURE) -> CoefficientPath:
    """Coefficients ``(alpha, beta, gamma)`` and their time derivatives at ``t``."""
    return spec.coefficients(t, cfg)


def combine(coeffs: CoefficientPath, u0, v0):
    """Apply the coefficient matrix to values ``u0, v0`` of ``(f0, g0)`` or ``(F0, G0)``.

    Returns ``(u, v, u_t, v_t)``.
    """
    (a, b, c, d), (a_t, b_t, c_t, d_t) = coeffs.matrix()
    if coeffs.mode == LIN_DEP:
        return a * u0, c * u0, a_t * u0, c_t * u0
    return a * u0 + b * v0, c * u0 + d * v0, a_t * u0 + b_t * v0, c_t * u0 + d_t * v0


def check_initial_pair(spec: FamilySpec, f0: ex.AnalyticExpr, g0: ex.AnalyticExpr, z) -> None:
    """For linearly dependent families, require ``g0 = lambda f0`` at the sample labels."""
    if spec.mode != LIN_DEP:
        return
    fz = ex.evaluate(f0, z)
    gz = ex.evaluate(g0, z)
    dev = np.abs(gz - spec.lam * fz) / np.maximum(np.abs(fz), 1.0)
    if np.any(dev > INITIAL_PAIR_TOL):
        raise MismatchedInitialPair(
            f"g0/f0 deviates from lambda = {spec.lam!r} by {float(np.max(dev)):.3e}"
        )


def fg_at(spec: FamilySpec, f0: ex.AnalyticExpr, g0: ex.AnalyticExpr, t, z,
          cfg: QuadratureConfig = DEFAULT_QUADRATURE):
    """``(f, g, f_t, g_t)`` at time ``t`` and label(s) ``z``."""
    check_initial_pair(spec, f0, g0, z)
    coeffs = coefficients_at(spec, t, cfg)
    return combine(coeffs, ex.evaluate(f0, z), ex.evaluate(g0, z))


def expected_K(coeffs: CoefficientPath, f0z, g0z):
    """The K-field predicted by the master relation, independent of ``f``, ``g``.

    Linearly independent form::

        m (|f0|^2 - |g0|^2) + gamma' (|alpha|^2 + |beta|^2) |g0|^2
            + 2 Re(gamma' beta conj(alpha) e^{i gamma} conj(f0) g0)

    Linearly dependent form::

        (m + 2 Im(beta' conj(beta))) |f0|^2
    """
    m = coeffs.master
    if coeffs.mode == LIN_DEP:
        return (m + 2 * np.imag(coeffs.beta_t * np.conj(coeffs.beta))) * np.abs(f0z) ** 2
    a, b, gam, gam_t = coeffs.alpha, coeffs.beta, coeffs.gamma, coeffs.gamma_t
    cross = gam_t * b * np.conj(a) * np.exp(1j * gam) * np.conj(f0z) * g0z
    return (
        m * (np.abs(f0z) ** 2 - np.abs(g0z) ** 2)
        + gam_t * (np.abs(a) ** 2 + np.abs(b) ** 2) * np.abs(g0z) ** 2
        + 2 * np.real(cross)
    )


# ---------------------------------------------------------------------------
# manifest grammar
# ---------------------------------------------------------------------------

def _number(params: dict, key: str, where: str, default=None) -> float:
    if key not in params:
        if default is not None:
            return default
        raise ManifestError(f"{where}.{key}", "missing field")
    v = params[key]
    if isinstance(v, bool) or not isinstance(v, (int, float)) or not math.isfinite(v):
        raise ManifestError(f"{where}.{key}", f"expected a finite number, got {v!r}")
    return float(v)


def _complex(params: dict, key: str, where: str) -> complex:
    return ex._cplx(params[key], f"{where}.{key}") if key in params else _missing(where, key)


def _missing(where, key):
    raise ManifestError(f"{where}.{key}", "missing field")


def _path(params: dict, key: str, where: str, default=None) -> ScalarPath:
    if key not in params:
        if default is not None:
            return default
        _missing(where, key)
    return path_from_json(params[key], f"{where}.{key}")


def family_from_json(kind: str, params: dict, where: str = "flow.params") -> FamilySpec:
    """Build a :class:`FamilySpec` from its manifest name and parameter object."""
    if kind not in FAMILIES:
        raise ManifestError("flow.family", f"unknown family {kind!r}; expected one of {sorted(FAMILIES)}")
    if not isinstance(params, dict):
        raise ManifestError(where, "params must be an object")
    P = params
    num = lambda k, default=None: _number(P, k, where, default)  # noqa: E731
    pth = lambda k, default=None: _path(P, k, where, default)  # noqa: E731
    zero = Constant(0.0)
    try:
        if kind == "lin_dep_commuting":
            return LinDepCommuting(pth("r"), num("k0", 0.0))
        if kind == "lin_dep_scaled":
            return LinDepScaled(_complex(P, "lambda", where), pth("r"), pth("phi", zero),
                                num("c", 0.0), num("d", 0.0))
        if kind == "lin_dep_general":
            if "Xi" not in P:
                _missing(where, "Xi")
            return LinDepGeneral(_complex(P, "lambda", where), pth("r"), pth("phi", zero),
                                 complex_path_from_json(P["Xi"], f"{where}.Xi"))
        if kind == "lin_indep_case1":
            return LinIndepCase1(pth("r"), pth("psi", zero), num("h", 0.0), num("d0", 0.0))
        if kind == "lin_indep_case2":
            return LinIndepCase2(num("c2"), num("w"), num("p"), pth("psi", zero), num("h", 0.0), num("d0", 0.0))
        if kind == "lin_indep_case3":
            return LinIndepCase3(num("c1"), num("w"), pth("psi", zero), num("h", 0.0), num("d0", 0.0))
        if kind == "lin_indep_case4":
            return LinIndepCase4(num("c1"), num("c2"), num("w"), num("p"), pth("psi", zero),
                                 num("h", 0.0), num("d0", 0.0))
        if kind == "general_flat":
            return GeneralLinIndepFlat(pth("r"), pth("phi", zero), pth("D1"))
        return GeneralLinIndep(pth("D1"), pth("D2"), pth("C4mod", zero), pth("phi", zero))
    except ValueError as exc:
        raise ManifestError(where, str(exc)) from None
