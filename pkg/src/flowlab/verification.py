"""Residual checks that certify a labelled flow.

Each check returns a :class:`CheckReport` whose ``passed`` flag is exactly
``max_residual <= tolerance``.  The module also ships the corrupted fixtures
used as negative controls: every check has at least one corruption it must
reject.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Any, Callable

import numpy as np

from . import expr as ex
from .errors import DegenerateBasis, DepthExceeded, FlowlabError
from .families import LIN_DEP, CoefficientPath, LinDepCommuting, expected_K
from .harmonic import HarmonicMap, pre_schwarzian, schwarzian
from .kinematics import LabeledFlow, LabelGrid, fg, key_lhs, local_fields, position
from .matrices import NonCommuting, fundamental_solution, ode_oracle
from .paths import ComplexPath, Constant, Linear, Polar
from .quadrature import integrate_many

GRAM_COND_LIMIT = 1e12
MATRIX_TOL = 1e-8
MIN_SEPARATION = 1e-10


@dataclass(frozen=True)
class ToleranceConfig:
    """Tolerances and sampling for the verification suite.

    ``grid`` and ``t_range`` default to the flow's own domain when ``None``.
    """

    analytic_tol: float = 1e-9
    fd_tol: float = 1e-5
    fd_step_t: float = 1e-4
    fd_step_z: float = 1e-4
    samples_t: int = 16
    grid: LabelGrid | None = None
    t_range: tuple[float, float] | None = None
    conservation_tol: float = 1e-6
    span_seed: int = 0

    def __post_init__(self):
        for name in ("analytic_tol", "fd_tol", "fd_step_t", "fd_step_z", "conservation_tol"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")
        if self.fd_step_t < 1e-7 or self.fd_step_z < 1e-7:
            raise ValueError("finite-difference steps must be at least 1e-7")
        if self.samples_t < 1:
            raise ValueError("samples_t must be at least 1")
        if self.t_range is not None and not self.t_range[0] <= self.t_range[1]:
            raise ValueError("t_range must be ordered")


@dataclass(frozen=True)
class CheckReport:
    name: str
    max_residual: float
    tolerance: float
    passed: bool
    worst_sample: tuple[float, float, float]
    notes: str = ""
    extras: dict = field(default_factory=dict, compare=False, repr=False)

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "max_residual": _json_float(self.max_residual),
            "tolerance": self.tolerance,
            "pass": self.passed,
            "worst_sample": [_json_float(v) for v in self.worst_sample],
            "notes": self.notes,
        }


def _json_float(v: float):
    v = float(v)
    return v if math.isfinite(v) else None


def _report(name, resid, tol, worst, notes="", extras=None) -> CheckReport:
    resid = float(resid)
    return CheckReport(name, resid, float(tol), bool(resid <= tol), tuple(float(w) for w in worst),
                       notes, extras or {})


def _grid(flow: LabeledFlow, cfg: ToleranceConfig) -> LabelGrid:
    grid = cfg.grid or flow.domain
    if grid is None:
        raise ValueError("no label grid: pass one in ToleranceConfig or attach a domain to the flow")
    return grid


def _times(flow: LabeledFlow, cfg: ToleranceConfig) -> np.ndarray:
    t0, t1 = cfg.t_range or flow.t_range
    return np.linspace(t0, t1, cfg.samples_t) if cfg.samples_t > 1 else np.array([t0])


def _worst(resid: np.ndarray, t_b: np.ndarray, z_b: np.ndarray):
    resid = np.nan_to_num(np.asarray(resid, dtype=float), nan=np.inf)
    i = int(np.argmax(resid))
    z = np.ravel(z_b)[i]
    return float(np.ravel(resid)[i]), (float(np.ravel(t_b)[i]), z.real, z.imag)


def _tz(flow, cfg):
    t = _times(flow, cfg)[:, None]
    z = _grid(flow, cfg).labels()[None, :]
    t_b, z_b = np.broadcast_arrays(t, z)
    return t_b, z_b


# ---------------------------------------------------------------------------
# checks
# ---------------------------------------------------------------------------

def check_jacobian_invariance(flow: LabeledFlow, cfg: ToleranceConfig = ToleranceConfig()) -> CheckReport:
    """``|J(t, z) - J0(z)|`` with ``J0 = |f0|^2 - |g0|^2`` from the initial pair."""
    t_b, z_b = _tz(flow, cfg)
    f, g, _, _ = fg(flow, t_b, z_b)
    J0 = np.abs(ex.evaluate(flow.f0, z_b)) ** 2 - np.abs(ex.evaluate(flow.g0, z_b)) ** 2
    resid, worst = _worst(np.abs(np.abs(f) ** 2 - np.abs(g) ** 2 - J0), t_b, z_b)
    return _report("jacobian_invariance", resid, cfg.analytic_tol, worst)


def _coherence(flow: LabeledFlow, times: np.ndarray) -> np.ndarray:
    """Per-interval mismatch between coefficient increments and integrated rates.

    For each matrix entry ``X`` of the coefficient map this compares
    ``X(t_j) - X(t_{j-1})`` with ``int X'`` over the interval, which ties the
    reported derivatives to the reported values.
    """
    if times.size < 2:
        return np.zeros(0)

    def rates(s):
        _, d = flow.coefficients(s).matrix()
        return np.stack([np.broadcast_to(x, s.shape) for x in d], axis=1)

    incr = integrate_many(rates, times[:-1], times[1:], flow.quad)
    values, _ = flow.coefficients(times).matrix()
    X = np.stack([np.broadcast_to(x, times.shape) for x in values], axis=1)
    return np.abs(np.diff(X, axis=0) - incr).max(axis=1)


def check_key_equation(flow: LabeledFlow, cfg: ToleranceConfig = ToleranceConfig()) -> CheckReport:
    """``f_t conj(f) - conj(g_t) g = i K`` with ``K`` predicted by the master relation.

    Residual is the largest of ``|Re(LHS)|``, ``|Im(LHS) - K_expected|`` and the
    coefficient time-coherence mismatch.
    """
    times = _times(flow, cfg)
    t_b, z_b = _tz(flow, cfg)
    f, g, f_t, g_t = fg(flow, t_b, z_b)
    lhs = key_lhs(f, g, f_t, g_t)
    coeffs = flow.coefficients(times)
    col = lambda v: np.asarray(v)[:, None]  # noqa: E731
    c_b = replace(coeffs, alpha=col(coeffs.alpha), beta=col(coeffs.beta), gamma=col(coeffs.gamma),
                  alpha_t=col(coeffs.alpha_t), beta_t=col(coeffs.beta_t),
                  gamma_t=col(coeffs.gamma_t), master=col(coeffs.master))
    K_exp = expected_K(c_b, ex.evaluate(flow.f0, z_b), ex.evaluate(flow.g0, z_b))
    pointwise = np.maximum(np.abs(lhs.real), np.abs(lhs.imag - K_exp))
    r_point, worst = _worst(pointwise, t_b, z_b)
    try:
        coh = _coherence(flow, times)
        r_coh = float(coh.max()) if coh.size else 0.0
        notes = f"pointwise {r_point:.3e}; time coherence {r_coh:.3e}"
    except DepthExceeded:
        # rates that never integrate to the increments (e.g. a jump in the
        # coefficients) make the adaptive quadrature give up
        coh = np.full(max(times.size - 1, 1), np.inf)
        r_coh = math.inf
        notes = f"pointwise {r_point:.3e}; time coherence: coefficient rates are not integrable to the increments"
    if np.iscomplexobj(coeffs.master) and np.any(np.abs(np.imag(coeffs.master)) > 0):
        notes += "; prescribed function is not real"
    if r_coh > r_point:
        j = int(np.argmax(coh))
        z0 = z_b[0, 0]
        worst = (float(times[j + 1]), z0.real, z0.imag)
    return _report("key_equation", max(r_point, r_coh), cfg.analytic_tol, worst, notes)


def _span_points(grid: LabelGrid, seed: int) -> np.ndarray:
    rng = np.random.default_rng(seed)
    da = (grid.a_max - grid.a_min) / (grid.na - 1)
    db = (grid.b_max - grid.b_min) / (grid.nb - 1)
    z = grid.labels()
    jitter = rng.uniform(-0.25, 0.25, size=(z.size, 2))
    return z + jitter[:, 0] * da + 1j * jitter[:, 1] * db


def _lstsq(B: np.ndarray, y: np.ndarray):
    G = B.conj().T @ B
    if np.linalg.cond(G) > GRAM_COND_LIMIT:
        return None
    return np.linalg.solve(G, B.conj().T @ y)


def check_span_decomposition(flow: LabeledFlow, t: float, cfg: ToleranceConfig = ToleranceConfig()
                             ) -> CheckReport:
    """Fit ``i K`` over ``|f0|^2, |g0|^2, f0 conj(g0), conj(f0) g0`` at fixed ``t``.

    Falls back to the single function ``|f0|^2`` when the four-term Gram
    matrix is ill-conditioned (linearly dependent initial pair).
    """
    z = _span_points(_grid(flow, cfg), cfg.span_seed)
    if z.size < 8:
        raise DegenerateBasis("span fit needs at least 8 sample labels")
    f, g, f_t, g_t = fg(flow, float(t), z)
    y = 1j * key_lhs(f, g, f_t, g_t).imag
    f0, g0 = ex.evaluate(flow.f0, z), ex.evaluate(flow.g0, z)
    B = np.stack([np.abs(f0) ** 2, np.abs(g0) ** 2, f0 * np.conj(g0), np.conj(f0) * g0], axis=1)
    coef = _lstsq(B, y)
    basis = "4-term"
    if coef is None:
        B = B[:, :1]
        coef = _lstsq(B, y)
        basis = "1-term |f0|^2"
        if coef is None:
            raise DegenerateBasis("both the 4-term and the 1-term bases are degenerate")
    resid, worst = _worst(np.abs(B @ coef - y), np.full(z.shape, float(t)), z)
    shown = ", ".join(f"C{i + 1}={c.real:.9g}{c.imag:+.9g}i" for i, c in enumerate(coef))
    return _report("span_decomposition", resid, cfg.analytic_tol, worst,
                   f"{basis} basis at t={float(t)!r}: {shown}", {"coefficients": coef, "basis": basis})


def _fd_times(flow, cfg, count=None):
    t0, t1 = cfg.t_range or flow.t_range
    dt = cfg.fd_step_t
    n = count or cfg.samples_t
    if t1 - t0 <= 2 * dt:
        return np.array([0.5 * (t0 + t1)])
    return np.linspace(t0 + dt, t1 - dt, n) if n > 1 else np.array([0.5 * (t0 + t1)])


def vorticity_identity_residual(flow: LabeledFlow, times, z, dt: float):
    """Pointwise ``|J d_t omega - 2 d_t K|`` with central differences of step ``dt``.

    ``J d_t omega`` is assembled as ``x_b u_at + y_b v_at - x_a u_bt - y_a v_bt``
    from finite differences of the exact label derivatives of the velocity.
    """
    times = np.asarray(times, dtype=float)
    stencil = np.stack([times - dt, times, times + dt])[:, :, None]
    f, g, f_t, g_t = fg(flow, stencil, np.asarray(z)[None, None, :])
    va = f_t + np.conj(g_t)
    vb = 1j * (f_t - np.conj(g_t))
    va_t = (va[2] - va[0]) / (2 * dt)
    vb_t = (vb[2] - vb[0]) / (2 * dt)
    pa = f[1] + np.conj(g[1])
    pb = 1j * (f[1] - np.conj(g[1]))
    J_omega_t = (pb.real * va_t.real + pb.imag * va_t.imag) - (pa.real * vb_t.real + pa.imag * vb_t.imag)
    K = key_lhs(f, g, f_t, g_t).imag
    K_t = (K[2] - K[0]) / (2 * dt)
    return np.abs(J_omega_t - 2 * K_t)


def check_vorticity_identity(flow: LabeledFlow, cfg: ToleranceConfig = ToleranceConfig()) -> CheckReport:
    """``J d_t omega = 2 d_t K`` by central time differences."""
    times = _fd_times(flow, cfg)
    z = _grid(flow, cfg).labels()
    resid = vorticity_identity_residual(flow, times, z, cfg.fd_step_t)
    t_b, z_b = np.broadcast_arrays(times[:, None], z[None, :])
    r, worst = _worst(resid, t_b, z_b)
    return _report("vorticity_identity", r, cfg.fd_tol, worst, f"step {cfg.fd_step_t:g}")


def K_is_constant(flow: LabeledFlow, cfg: ToleranceConfig = ToleranceConfig()) -> bool:
    """True when ``K`` does not change over the sampled times (up to roundoff)."""
    t_b, z_b = _tz(flow, cfg)
    f, g, f_t, g_t = fg(flow, t_b, z_b)
    K = key_lhs(f, g, f_t, g_t).imag
    return bool(np.max(np.abs(K - K[:1])) <= cfg.analytic_tol * max(1.0, float(np.max(np.abs(K)))))


def check_vorticity_conservation(flow: LabeledFlow, cfg: ToleranceConfig = ToleranceConfig()) -> CheckReport:
    """``|omega(t, z) - omega(t0, z)|``; meaningful for families with constant ``K``."""
    t_b, z_b = _tz(flow, cfg)
    f, g, f_t, g_t = fg(flow, t_b, z_b)
    _, omega, _, _ = local_fields(f, g, f_t, g_t)
    r, worst = _worst(np.abs(omega - omega[:1]), t_b, z_b)
    return _report("vorticity_conservation", r, cfg.conservation_tol, worst)


def _map_at(flow: LabeledFlow, coeffs: CoefficientPath, t: float) -> HarmonicMap:
    (a, b, c, d), _ = coeffs.matrix()
    if coeffs.mode == LIN_DEP:
        f_e, g_e = ex.scale(a, flow.f0), ex.scale(c, flow.f0)
    else:
        f_e = ex.add(ex.scale(a, flow.f0), ex.scale(b, flow.g0))
        g_e = ex.add(ex.scale(c, flow.f0), ex.scale(d, flow.g0))
    if flow.perturbation is not None:
        f_e, g_e = flow.perturbation.exprs(t, f_e, g_e)
    return HarmonicMap.from_derivatives(f_e, g_e)


def check_schwarzian_time_invariance(flow: LabeledFlow, cfg: ToleranceConfig = ToleranceConfig()
                                     ) -> CheckReport:
    """``|P_H(t, z) - P_H(z)|`` and ``|S_H(t, z) - S_H(z)|`` against the initial pair's map."""
    z = _grid(flow, cfg).labels()
    ref = HarmonicMap.from_derivatives(flow.f0, flow.g0)
    P0, S0 = pre_schwarzian(ref, z), schwarzian(ref, z)
    times = _times(flow, cfg)
    coeffs = flow.coefficients(times)
    rows_p, rows_s = [], []
    for j, t in enumerate(times):
        cj = replace(coeffs, **{k: np.asarray(getattr(coeffs, k))[j].item()
                                for k in ("alpha", "beta", "gamma", "alpha_t", "beta_t", "gamma_t", "master")})
        H = _map_at(flow, cj, float(t))
        rows_p.append(np.abs(pre_schwarzian(H, z) - P0))
        rows_s.append(np.abs(schwarzian(H, z) - S0))
    rp, rs = np.array(rows_p), np.array(rows_s)
    t_b, z_b = np.broadcast_arrays(times[:, None], z[None, :])
    r, worst = _worst(np.maximum(rp, rs), t_b, z_b)
    return _report("schwarzian_time_invariance", r, cfg.analytic_tol, worst,
                   f"P_H {rp.max():.3e}; S_H {rs.max():.3e}")


def check_sense_preserving_and_injectivity(flow: LabeledFlow, t: float,
                                           cfg: ToleranceConfig = ToleranceConfig()) -> CheckReport:
    """Sampled univalence surrogate at time ``t``.

    The residual is the largest violation margin among ``-min J``,
    ``max |q| - 1`` and ``1e-10 - min pairwise distance``; the check passes
    when all three are negative (tolerance 0).
    """
    z = _grid(flow, cfg).labels()
    f, g, _, _ = fg(flow, float(t), z)
    J = np.abs(f) ** 2 - np.abs(g) ** 2
    with np.errstate(divide="ignore", invalid="ignore"):
        q = np.where(np.abs(f) > 0, np.abs(g) / np.abs(f), np.inf)
    p = position(flow, float(t), z)
    dist = np.abs(p[:, None] - p[None, :])
    np.fill_diagonal(dist, np.inf)
    i, k = np.unravel_index(int(np.argmin(dist)), dist.shape)
    margins = {"jacobian": -float(J.min()), "dilatation": float(q.max()) - 1.0,
               "separation": MIN_SEPARATION - float(dist[i, k])}
    name = max(margins, key=margins.get)
    idx = {"jacobian": int(np.argmin(J)), "dilatation": int(np.argmax(q)), "separation": int(i)}[name]
    worst = (float(t), z[idx].real, z[idx].imag)
    notes = f"min J {J.min():.3e}; max |q| {q.max():.6f}; min separation {dist[i, k]:.3e}"
    if margins["separation"] > 0:
        notes += f"; labels {complex(z[i])!r} and {complex(z[k])!r} collide"
    return _report("sense_preserving_injectivity", margins[name], 0.0, worst, notes)


def check_matrix_lemma(B: ComplexPath, t_max: float, cfg: ToleranceConfig = ToleranceConfig(),
                       times=None, steps: int = 10_000) -> CheckReport:
    """Compare ``exp(int_0^t D)`` with an RK4 solution of ``X' = D X``.

    Passes when the closed form matches the ODE to ``1e-8`` at every probe
    time; the commutator residual is reported alongside.
    """
    times = np.asarray(times if times is not None else (t_max / 4, t_max / 2, t_max), dtype=float)
    mismatch, commute, worst_t = 0.0, 0.0, float(times[0])
    for t in times:
        sol = fundamental_solution(B, float(t))
        cand = sol.candidate if isinstance(sol, NonCommuting) else sol
        if isinstance(sol, NonCommuting):
            commute = max(commute, sol.residual)
        mm = float(np.max(np.abs(cand - ode_oracle(B, float(t), steps))))
        if mm > mismatch:
            mismatch, worst_t = mm, float(t)
    notes = f"commute residual {commute:.3e}; closed-form/ODE mismatch {mismatch:.3e}"
    return _report("matrix_lemma", mismatch, MATRIX_TOL, (worst_t, math.nan, math.nan), notes,
                   {"commute_residual": commute, "mismatch": mismatch})


def commuting_generator(spec: LinDepCommuting) -> ComplexPath:
    """``B(t) = r'(t) e^{i k0}`` whose fundamental solution reproduces the family."""
    return Polar(spec.r.derivative(), Constant(spec.k0))


# ---------------------------------------------------------------------------
# suite
# ---------------------------------------------------------------------------

def _threads(threads: int | None) -> int:
    if threads is None:
        try:
            threads = int(os.environ.get("FLOWLAB_THREADS", "1"))
        except ValueError:
            threads = 1
    if threads == 0:
        threads = os.cpu_count() or 1
    return max(1, threads)


def suite_checks(flow: LabeledFlow, cfg: ToleranceConfig) -> list[tuple[str, Callable[[], CheckReport]]]:
    times = _times(flow, cfg)
    t_mid = float(times[len(times) // 2])
    checks = [
        ("jacobian_invariance", lambda: check_jacobian_invariance(flow, cfg)),
        ("key_equation", lambda: check_key_equation(flow, cfg)),
        ("span_decomposition", lambda: check_span_decomposition(flow, t_mid, cfg)),
        ("vorticity_identity", lambda: check_vorticity_identity(flow, cfg)),
        ("schwarzian_time_invariance", lambda: check_schwarzian_time_invariance(flow, cfg)),
        ("sense_preserving_injectivity",
         lambda: check_sense_preserving_and_injectivity(flow, float(times[-1]), cfg)),
    ]
    try:
        constant_K = K_is_constant(flow, cfg)
    except FlowlabError:
        constant_K = False
    if constant_K:
        checks.append(("vorticity_conservation", lambda: check_vorticity_conservation(flow, cfg)))
    if isinstance(flow.spec, LinDepCommuting):
        t_max = float(times[-1]) if times[-1] > 0 else 1.0
        B = commuting_generator(flow.spec)
        checks.append(("matrix_lemma", lambda: check_matrix_lemma(B, t_max, cfg)))
    return checks


def _guarded(name: str, thunk: Callable[[], CheckReport]) -> CheckReport:
    try:
        return thunk()
    except (FlowlabError, ValueError, np.linalg.LinAlgError) as exc:
        return CheckReport(name, math.inf, 0.0, False, (math.nan, math.nan, math.nan),
                           f"{type(exc).__name__}: {exc}")


def run_suite(flow: LabeledFlow, cfg: ToleranceConfig = ToleranceConfig(),
              threads: int | None = None) -> list[CheckReport]:
    """All applicable checks in a fixed order.

    Errors raised by a check become failing reports.  ``threads`` (or the
    ``FLOWLAB_THREADS`` environment variable, ``0`` meaning one per CPU)
    sets the worker count; results keep the same order either way.
    """
    checks = suite_checks(flow, cfg)
    n = _threads(threads)
    if n == 1:
        return [_guarded(name, thunk) for name, thunk in checks]
    with ThreadPoolExecutor(max_workers=n) as pool:
        return list(pool.map(lambda item: _guarded(*item), checks))


def suite_passed(reports: list[CheckReport]) -> bool:
    return all(r.passed for r in reports)


def report_json(flow_manifest: Any, reports: list[CheckReport]) -> dict:
    return {"flow": flow_manifest, "checks": [r.to_json() for r in reports], "pass": suite_passed(reports)}


# ---------------------------------------------------------------------------
# corruptions (negative controls)
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CorruptedSpec:
    """Wraps a family and tampers with its coefficients at ``t > 0``."""

    base: Any
    beta_scale: float = 1.0
    gamma_offset: float = 0.0

    @property
    def mode(self):
        return self.base.mode

    @property
    def kind(self):
        return self.base.kind

    @property
    def lam(self):
        return getattr(self.base, "lam", None)

    def check_validity(self, t):
        self.base.check_validity(t)

    def check_paths(self, t0, t1):
        self.base.check_paths(t0, t1)

    def to_json(self):
        return {**self.base.to_json(), "corruption": {"beta_scale": self.beta_scale,
                                                       "gamma_offset": self.gamma_offset}}

    def coefficients(self, t, cfg=None):
        c = self.base.coefficients(t, cfg) if cfg is not None else self.base.coefficients(t)
        on = np.asarray(c.t) > 0
        s = np.where(on, self.beta_scale, 1.0)
        off = np.where(on, self.gamma_offset, 0.0)
        if np.ndim(c.t) == 0:
            s, off = s.item(), off.item()
        return replace(c, beta=c.beta * s, beta_t=c.beta_t * s, gamma=c.gamma + off)


@dataclass(frozen=True)
class LabelWarp:
    """Adds ``eps t z^2`` to ``f`` (and ``eps t z^3 / 3`` to ``F``): not a member of any family."""

    eps: float = 0.01

    def derivatives(self, t, z, f, g, f_t, g_t):
        return f + self.eps * t * z * z, g, f_t + self.eps * z * z, g_t

    def primitives(self, t, z, F, G, F_t, G_t):
        return F + self.eps * t * z ** 3 / 3, G, F_t + self.eps * z ** 3 / 3, G_t

    def exprs(self, t, f, g):
        return ex.add(f, ex.scale(self.eps * t, ex.power(ex.Identity(), 2))), g


@dataclass(frozen=True)
class RateTwist:
    """Rotates ``f_t`` (and ``F_t``) by a fixed angle at ``t > 0``."""

    angle: float = 0.01

    def _twist(self, t):
        return np.where(np.asarray(t) > 0, np.exp(1j * self.angle), 1.0)

    def derivatives(self, t, z, f, g, f_t, g_t):
        return f, g, f_t * self._twist(t), g_t

    def primitives(self, t, z, F, G, F_t, G_t):
        return F, G, F_t * self._twist(t), G_t

    def exprs(self, t, f, g):
        return f, g


def corrupt(flow: LabeledFlow, kind: str) -> LabeledFlow:
    """Apply a named corruption: ``beta_scale``, ``gamma_offset``, ``label_warp`` or ``rate_twist``."""
    if kind == "beta_scale":
        return replace(flow, spec=CorruptedSpec(flow.spec, beta_scale=1.01))
    if kind == "gamma_offset":
        return replace(flow, spec=CorruptedSpec(flow.spec, gamma_offset=0.01))
    if kind == "label_warp":
        return replace(flow, perturbation=LabelWarp())
    if kind == "rate_twist":
        return replace(flow, perturbation=RateTwist())
    raise ValueError(f"unknown corruption {kind!r}")


CORRUPTIONS = ("beta_scale", "gamma_offset", "label_warp", "rate_twist")


def two_period_kirchhoff() -> LabeledFlow:
    """Kirchhoff flow on a strip two periods wide, where labels ``2 pi`` apart collide."""
    flow = LabeledFlow.from_preset("kirchhoff")
    return flow.with_domain(LabelGrid(0.0, 4 * math.pi, -0.5, 0.5, 17, 5))


def non_commuting_generator() -> ComplexPath:
    """``B = d/dt (t e^{i t})``: the phase of the generator is not constant."""
    return Polar(Linear(1.0, 0.0), Linear(1.0, 0.0)).derivative()


def negative_controls(cfg: ToleranceConfig = ToleranceConfig()) -> list[tuple[str, str, Callable[[], CheckReport]]]:
    """``(check name, fixture description, thunk)`` for every shipped negative control."""
    kir = LabeledFlow.from_preset("kirchhoff")
    ger = LabeledFlow.from_preset("gerstner")
    warped = corrupt(ger, "label_warp")
    twisted = corrupt(ger, "rate_twist")
    t_mid = float(_times(ger, cfg)[cfg.samples_t // 2])
    return [
        ("jacobian_invariance", "kirchhoff with beta scaled by 1.01",
         lambda: check_jacobian_invariance(corrupt(kir, "beta_scale"), cfg)),
        ("key_equation", "gerstner with gamma offset by 0.01",
         lambda: check_key_equation(corrupt(ger, "gamma_offset"), cfg)),
        ("span_decomposition", "gerstner with f warped by 0.01 t z^2",
         lambda: check_span_decomposition(warped, t_mid, cfg)),
        ("schwarzian_time_invariance", "gerstner with f warped by 0.01 t z^2",
         lambda: check_schwarzian_time_invariance(warped, cfg)),
        ("vorticity_identity", "gerstner with f_t rotated by 0.01 rad",
         lambda: check_vorticity_identity(twisted, cfg)),
        ("sense_preserving_injectivity", "kirchhoff on a two-period strip",
         lambda: check_sense_preserving_and_injectivity(two_period_kirchhoff(), 0.5, cfg)),
        ("matrix_lemma", "generator with phase Theta(t) = t",
         lambda: check_matrix_lemma(non_commuting_generator(), 2.0, cfg)),
    ]
