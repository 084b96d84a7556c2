"""2x2 complex matrix exponentials and the commuting fundamental solution.

For ``D(t) = [[0, conj(B(t))], [B(t), 0]]`` the linear system ``X' = D X``,
``X(0) = I`` is solved by ``exp(int_0^t D)`` exactly when ``D(t)`` commutes
with its integral.  :func:`fundamental_solution` tests that hypothesis and
:func:`ode_oracle` provides an independent RK4 reference.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import NonFinite
from .quadrature import DEFAULT_QUADRATURE, QuadratureConfig, integrate

COMMUTE_TOL = 1e-9
TAYLOR_TERMS = 18


def antidiagonal(b: complex) -> np.ndarray:
    """``[[0, conj(b)], [b, 0]]``."""
    return np.array([[0.0, np.conj(b)], [b, 0.0]], dtype=complex)


def _is_hermitian_antidiagonal(M: np.ndarray) -> bool:
    return M[0, 0] == 0 and M[1, 1] == 0 and M[0, 1] == np.conj(M[1, 0])


def mat2_exp(M) -> np.ndarray:
    """Matrix exponential of a 2x2 complex matrix.

    ``[[0, conj(b)], [b, 0]]`` uses ``cosh|b| I + sinh|b|/|b| M``; anything else
    goes through scaling and squaring around a truncated Taylor series.
    """
    M = np.asarray(M, dtype=complex)
    if M.shape != (2, 2):
        raise ValueError("mat2_exp expects a 2x2 matrix")
    if not np.all(np.isfinite(M)):
        raise NonFinite("matrix entries must be finite")
    if _is_hermitian_antidiagonal(M):
        r = abs(M[1, 0])
        sinhc = 1.0 if r == 0 else math.sinh(r) / r
        return math.cosh(r) * np.eye(2, dtype=complex) + sinhc * M
    norm = np.abs(M).sum(axis=1).max()
    squarings = max(0, int(math.ceil(math.log2(norm))) + 1) if norm > 0.5 else 0
    A = M / (2.0 ** squarings)
    result = np.eye(2, dtype=complex)
    term = np.eye(2, dtype=complex)
    for j in range(1, TAYLOR_TERMS + 1):
        term = term @ A / j
        result = result + term
    for _ in range(squarings):
        result = result @ result
    return result


def commute_residual(A, C) -> float:
    """Largest entry magnitude of ``AC - CA``."""
    A = np.asarray(A, dtype=complex)
    C = np.asarray(C, dtype=complex)
    return float(np.abs(A @ C - C @ A).max())


@dataclass(frozen=True)
class NonCommuting:
    """Returned when ``D(s)`` fails to commute with ``int_0^s D``.

    ``residual`` is the worst commutator magnitude over the probed times and
    ``candidate`` is ``exp(int_0^t D)``, which then is *not* the solution.
    """

    residual: float
    at_time: float
    candidate: np.ndarray


def _B_value(B, t):
    return complex(np.asarray(B.value(t) if hasattr(B, "value") else B(t)).item())


def fundamental_solution(B, t: float, cfg: QuadratureConfig = DEFAULT_QUADRATURE,
                         probes: int = 8):
    """``exp(int_0^t D)`` if the commuting hypothesis holds, else :class:`NonCommuting`.

    The commutator ``[D(s), int_0^s D]`` is tested at ``s = t`` and at
    ``probes - 1`` further equally spaced times in ``(0, t)``.
    """
    fn = B.value if hasattr(B, "value") else B
    integral = integrate(lambda s: np.asarray(fn(s), dtype=complex), 0.0, t, cfg)
    candidate = mat2_exp(antidiagonal(integral))
    worst, worst_s = 0.0, float(t)
    for s in np.linspace(0.0, t, probes + 1)[1:]:
        I_s = integral if s == t else integrate(lambda u: np.asarray(fn(u), dtype=complex), 0.0, s, cfg)
        res = commute_residual(antidiagonal(_B_value(B, s)), antidiagonal(I_s))
        if res > worst:
            worst, worst_s = res, float(s)
    if worst >= COMMUTE_TOL:
        return NonCommuting(worst, worst_s, candidate)
    return candidate


def ode_oracle(B, t: float, steps: int) -> np.ndarray:
    """Classical RK4 solution of ``X' = D(s) X`` on ``[0, t]`` with ``X(0) = I``."""
    if steps < 100:
        raise ValueError("ode_oracle needs at least 100 steps")
    h = t / steps
    fn = B.value if hasattr(B, "value") else B
    b = np.asarray(fn(np.arange(2 * steps + 1) * (h / 2.0)), dtype=complex)
    bc = np.conj(b)
    X = np.eye(2, dtype=complex)

    def D_times(k, Y):
        return np.array([[bc[k] * Y[1, 0], bc[k] * Y[1, 1]], [b[k] * Y[0, 0], b[k] * Y[0, 1]]])

    for n in range(steps):
        k0 = 2 * n
        k1 = D_times(k0, X)
        k2 = D_times(k0 + 1, X + 0.5 * h * k1)
        k3 = D_times(k0 + 1, X + 0.5 * h * k2)
        k4 = D_times(k0 + 2, X + h * k3)
        X = X + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
    if not np.all(np.isfinite(X)):
        raise NonFinite("RK4 solution overflowed")
    return X
