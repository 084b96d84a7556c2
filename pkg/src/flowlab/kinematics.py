"""Positions, velocities and derived fields of a labelled flow.

A flow maps the label ``z = a + ib`` to ``x + iy = F(t, z) + conj(G(t, z))``
where ``(F, G)`` is the family's coefficient matrix applied to the initial
antiderivatives ``(F0, G0)``.  Every function here broadcasts ``t`` against
``z``, so a whole grid or a whole time series costs one vectorized call.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Any, NamedTuple

import numpy as np

from . import expr as ex
from .errors import NotClosedForm, SensePreservationViolated
from .families import FamilySpec, check_initial_pair
from .presets import DomainHint, preset
from .quadrature import DEFAULT_QUADRATURE, QuadratureConfig, integrate_many


@dataclass(frozen=True)
class LabelGrid:
    """Rectangular label grid, row-major with ``a`` as the outer index."""

    a_min: float
    a_max: float
    b_min: float
    b_max: float
    na: int = 16
    nb: int = 16

    def __post_init__(self):
        if not (self.a_min < self.a_max and self.b_min < self.b_max):
            raise ValueError("label grid needs a_min < a_max and b_min < b_max")
        if self.na < 2 or self.nb < 2:
            raise ValueError("label grid needs at least 2 points per axis")

    @classmethod
    def from_hint(cls, hint: DomainHint, na: int = 16, nb: int = 16) -> "LabelGrid":
        return cls(*hint.a_range, *hint.b_range, na, nb)

    def labels(self) -> np.ndarray:
        a = np.linspace(self.a_min, self.a_max, self.na)
        b = np.linspace(self.b_min, self.b_max, self.nb)
        return (a[:, None] + 1j * b[None, :]).ravel()

    def to_json(self) -> dict:
        return {"a": [self.a_min, self.a_max], "b": [self.b_min, self.b_max], "na": self.na, "nb": self.nb}


@dataclass(frozen=True)
class LabeledFlow:
    """A family together with its initial pair.

    ``F0``/``G0`` default to the closed-form antiderivatives of ``f0``/``g0``;
    when those do not exist they stay ``None`` and positions fall back to
    straight-segment quadrature from the origin.
    """

    spec: FamilySpec
    f0: ex.AnalyticExpr
    g0: ex.AnalyticExpr
    F0: ex.AnalyticExpr | None = None
    G0: ex.AnalyticExpr | None = None
    domain: LabelGrid | None = None
    t_range: tuple[float, float] = (0.0, 1.0)
    quad: QuadratureConfig = field(default=DEFAULT_QUADRATURE, repr=False)
    allow_path_quadrature: bool = True
    perturbation: Any = field(default=None, repr=False)

    def __post_init__(self):
        for name, source in (("F0", self.f0), ("G0", self.g0)):
            if getattr(self, name) is None:
                try:
                    object.__setattr__(self, name, ex.antiderivative(source))
                except NotClosedForm:
                    pass
        if self.domain is not None:
            check_initial_pair(self.spec, self.f0, self.g0, self.domain.labels())

    @classmethod
    def from_preset(cls, name: str, na: int = 16, nb: int = 16, **params) -> "LabeledFlow":
        p = preset(name, **params)
        return cls(p.spec, p.f0, p.g0, domain=LabelGrid.from_hint(p.domain, na, nb), t_range=p.domain.t_range)

    def with_spec(self, spec: FamilySpec) -> "LabeledFlow":
        return replace(self, spec=spec)

    def with_domain(self, domain: LabelGrid) -> "LabeledFlow":
        return replace(self, domain=domain)

    def coefficients(self, t):
        return self.spec.coefficients(t, self.quad)


class FlowSample(NamedTuple):
    t: float
    a: float
    b: float
    x: float
    y: float
    u: float
    v: float
    J: float
    omega: float
    K: float


CSV_COLUMNS = FlowSample._fields


# ---------------------------------------------------------------------------
# broadcasting helpers
# ---------------------------------------------------------------------------

def _coeffs_broadcast(flow: LabeledFlow, t, z):
    """Coefficients evaluated once per distinct time and broadcast against ``z``."""
    t_b, z_b = np.broadcast_arrays(np.asarray(t, dtype=float), np.asarray(z, dtype=complex))
    uniq, inverse = np.unique(t_b.ravel(), return_inverse=True)
    c = flow.coefficients(uniq)
    (a, b, cc, d), (a_t, b_t, c_t, d_t) = c.matrix()

    def take(v):
        return np.asarray(v)[inverse].reshape(t_b.shape)

    mats = tuple(take(v) for v in (a, b, cc, d)), tuple(take(v) for v in (a_t, b_t, c_t, d_t))
    return c, mats, z_b


def _apply(mode: str, mats, u0, v0):
    (a, b, c, d), (a_t, b_t, c_t, d_t) = mats
    if mode == "lin_dep":
        return a * u0, c * u0, a_t * u0, c_t * u0
    return a * u0 + b * v0, c * u0 + d * v0, a_t * u0 + b_t * v0, c_t * u0 + d_t * v0


def segment_integral(expr: ex.AnalyticExpr, z, cfg: QuadratureConfig = DEFAULT_QUADRATURE):
    """``int_0^z expr(w) dw`` along the straight segment, by adaptive quadrature."""
    z_arr = np.asarray(z, dtype=complex)
    flat = z_arr.ravel()
    out = integrate_many(lambda s: ex.evaluate(expr, s[:, None] * flat[None, :]) * flat[None, :],
                         [0.0], [1.0], cfg)[0]
    return out.reshape(z_arr.shape)


def _antiderivative_values(flow: LabeledFlow, z):
    vals = []
    for prim, source in ((flow.F0, flow.f0), (flow.G0, flow.g0)):
        if prim is not None:
            vals.append(ex.evaluate(prim, z))
        elif flow.allow_path_quadrature:
            vals.append(segment_integral(source, z, flow.quad))
        else:
            raise NotClosedForm("no closed-form antiderivative and path quadrature is disabled")
    return vals


# ---------------------------------------------------------------------------
# pointwise fields
# ---------------------------------------------------------------------------

def _derivs(flow: LabeledFlow, c, mats, t, z_b):
    out = _apply(c.mode, mats, ex.evaluate(flow.f0, z_b), ex.evaluate(flow.g0, z_b))
    if flow.perturbation is not None:
        out = flow.perturbation.derivatives(np.broadcast_to(t, z_b.shape), z_b, *out)
    return out


def _primitives(flow: LabeledFlow, c, mats, t, z_b):
    out = _apply(c.mode, mats, *_antiderivative_values(flow, z_b))
    if flow.perturbation is not None:
        out = flow.perturbation.primitives(np.broadcast_to(t, z_b.shape), z_b, *out)
    return out


def fg(flow: LabeledFlow, t, z):
    """``(f, g, f_t, g_t)`` broadcast over ``t`` and ``z``."""
    c, mats, z_b = _coeffs_broadcast(flow, t, z)
    return _derivs(flow, c, mats, np.asarray(t, dtype=float), z_b)


def position_velocity(flow: LabeledFlow, t, z):
    c, mats, z_b = _coeffs_broadcast(flow, t, z)
    F, G, F_t, G_t = _primitives(flow, c, mats, np.asarray(t, dtype=float), z_b)
    return F + np.conj(G), F_t + np.conj(G_t)


def position(flow: LabeledFlow, t, z):
    """``x + iy = F(t, z) + conj(G(t, z))``."""
    return position_velocity(flow, t, z)[0]


def velocity(flow: LabeledFlow, t, z):
    """``u + iv = F_t + conj(G_t)`` from closed-form coefficient derivatives."""
    return position_velocity(flow, t, z)[1]


def key_lhs(f, g, f_t, g_t):
    """``f_t conj(f) - conj(g_t) g``, which should be ``i K`` with ``K`` real."""
    return f_t * np.conj(f) - np.conj(g_t) * g


def local_fields(f, g, f_t, g_t):
    """Jacobian, vorticity and K from the label derivatives.

    ``x_a + i y_a = f + conj(g)`` and ``x_b + i y_b = i (f - conj(g))``; the
    velocity derivatives follow by replacing ``f, g`` with ``f_t, g_t``.
    """
    pa = f + np.conj(g)
    pb = 1j * (f - np.conj(g))
    va = f_t + np.conj(g_t)
    vb = 1j * (f_t - np.conj(g_t))
    J = pa.real * pb.imag - pb.real * pa.imag
    with np.errstate(divide="ignore", invalid="ignore"):  # J = 0 is reported by check_sense
        omega = (pb.imag * va.imag - pa.imag * vb.imag + pb.real * va.real - pa.real * vb.real) / J
    lhs = key_lhs(f, g, f_t, g_t)
    return J, omega, lhs.imag, lhs.real


def fields(flow: LabeledFlow, t, z) -> dict:
    """All kinematic fields as arrays broadcast over ``t`` and ``z``.

    Keys: ``t, a, b, x, y, u, v, J, omega, K, K_imag``; ``K_imag`` is the
    residual imaginary part of ``-i (f_t conj(f) - conj(g_t) g)``.
    """
    c, mats, z_b = _coeffs_broadcast(flow, t, z)
    t_arr = np.asarray(t, dtype=float)
    f, g, f_t, g_t = _derivs(flow, c, mats, t_arr, z_b)
    F, G, F_t, G_t = _primitives(flow, c, mats, t_arr, z_b)
    pos, vel = F + np.conj(G), F_t + np.conj(G_t)
    J, omega, K, re_part = local_fields(f, g, f_t, g_t)
    t_b = np.broadcast_to(np.asarray(t, dtype=float), z_b.shape)
    return {
        "t": t_b, "a": z_b.real, "b": z_b.imag, "x": pos.real, "y": pos.imag,
        "u": vel.real, "v": vel.imag, "J": J, "omega": omega, "K": K, "K_imag": -re_part,
    }


def _samples(arrs: dict) -> list[FlowSample]:
    cols = [np.ravel(arrs[k]) for k in CSV_COLUMNS]
    return [FlowSample(*(float(c[i]) for c in cols)) for i in range(cols[0].size)]


def kinematics_at(flow: LabeledFlow, t: float, z: complex) -> FlowSample:
    """One fully populated :class:`FlowSample`."""
    return _samples(fields(flow, float(t), complex(z)))[0]


def jacobian_at(flow: LabeledFlow, t, z):
    f, g, _, _ = fg(flow, t, z)
    return np.abs(f) ** 2 - np.abs(g) ** 2


def K_at(flow: LabeledFlow, t, z):
    f, g, f_t, g_t = fg(flow, t, z)
    return key_lhs(f, g, f_t, g_t).imag


def theta_x(flow: LabeledFlow, t: float, z, dt: float = 1e-4):
    """Inviscid temperature gradient ``theta_x = 2 K_t / J`` by central differences."""
    if not 1e-6 <= dt <= 1e-3:
        raise ValueError("dt must lie in [1e-6, 1e-3]")
    K = K_at(flow, np.array([t - dt, t + dt])[:, None], np.atleast_1d(z)[None, :])
    out = (K[1] - K[0]) / dt / jacobian_at(flow, t, np.atleast_1d(z))
    return out[0] if np.ndim(z) == 0 else out.reshape(np.shape(z))


def eulerian_divergence(flow: LabeledFlow, t: float, z, h: float = 1e-4):
    """``(y_b u_a - y_a u_b + x_a v_b - x_b v_a) / J`` with label central differences."""
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    shifts = np.array([h, -h, 1j * h, -1j * h])
    pos, vel = position_velocity(flow, t, z[None, :] + shifts[:, None])
    pa, pb = (pos[0] - pos[1]) / (2 * h), (pos[2] - pos[3]) / (2 * h)
    va, vb = (vel[0] - vel[1]) / (2 * h), (vel[2] - vel[3]) / (2 * h)
    J = pa.real * pb.imag - pb.real * pa.imag
    return (pb.imag * va.real - pa.imag * vb.real + pa.real * vb.imag - pb.real * va.imag) / J


# ---------------------------------------------------------------------------
# trajectories and grids
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Trajectory:
    """Closed-form samples of one particle plus the RK4 replay residual."""

    z0: complex
    t: np.ndarray
    x: np.ndarray
    y: np.ndarray
    u: np.ndarray
    v: np.ndarray
    rk4_residual: float

    def rows(self):
        return list(zip(self.t.tolist(), self.x.tolist(), self.y.tolist(), self.u.tolist(), self.v.tolist()))


def rk4_replay(flow: LabeledFlow, z0: complex, times, steps: int = 10_000):
    """Integrate ``x' = u, y' = v`` from the closed-form start with RK4.

    Steps are spread over the sample intervals in proportion to their length;
    returns the replayed positions at ``times``.
    """
    times = np.asarray(times, dtype=float)
    start = position(flow, times[0], z0)
    if times.size == 1:
        return np.array([start])
    lengths = np.diff(times)
    counts = np.maximum(1, np.round(steps * lengths / lengths.sum()).astype(int))
    grid = np.concatenate([np.linspace(times[i], times[i + 1], counts[i] + 1)[:-1] for i in range(lengths.size)]
                          + [times[-1:]])
    hs = np.diff(grid)
    stage_t = np.concatenate([grid[:-1], grid[:-1] + hs / 2, grid[1:]])
    vel = velocity(flow, stage_t, z0)
    n = hs.size
    k1, k2, k4 = vel[:n], vel[n:2 * n], vel[2 * n:]
    # the velocity of a fixed label does not depend on position, so k2 = k3
    incr = hs / 6.0 * (k1 + 4.0 * k2 + k4)
    path = start + np.concatenate([[0.0], np.cumsum(incr)])
    marks = np.concatenate([[0], np.cumsum(counts)])
    return path[marks]


def trajectory(flow: LabeledFlow, z0: complex, times, rk4_steps: int = 10_000) -> Trajectory:
    """Closed-form particle path at ``times`` with an RK4 consistency residual."""
    times = np.asarray(times, dtype=float)
    if times.ndim != 1 or times.size == 0:
        raise ValueError("times must be a non-empty 1-D sequence")
    pos, vel = position_velocity(flow, times, complex(z0))
    replay = rk4_replay(flow, complex(z0), times, rk4_steps)
    resid = float(np.max(np.abs(replay - pos)))
    return Trajectory(complex(z0), times, pos.real, pos.imag, vel.real, vel.imag, resid)


def check_sense(arrs: dict) -> None:
    J = np.ravel(arrs["J"])
    bad = np.flatnonzero(~(J > 0))
    if bad.size:
        i = bad[0]
        z = complex(np.ravel(arrs["a"])[i], np.ravel(arrs["b"])[i])
        raise SensePreservationViolated(z, float(J[i]))


def grid_sample(flow: LabeledFlow, grid: LabelGrid, t: float) -> list[FlowSample]:
    """Row-major samples over ``grid`` at time ``t``; every sample has ``J > 0``."""
    arrs = fields(flow, float(t), grid.labels())
    check_sense(arrs)
    return _samples(arrs)


def label_series(flow: LabeledFlow, labels, times) -> list[FlowSample]:
    """Samples for every label (outer) and time (inner)."""
    labels = np.asarray(labels, dtype=complex)
    times = np.asarray(times, dtype=float)
    arrs = fields(flow, times[None, :], labels[:, None])
    check_sense(arrs)
    return _samples(arrs)
