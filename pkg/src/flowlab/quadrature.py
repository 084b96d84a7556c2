"""Adaptive Simpson quadrature, batched over many intervals at once.

The integrand is called with a 1-D array of abscissae and must return an
array whose leading axis matches (trailing axes are allowed for vector-valued
integrands).  All intervals that are still refining are evaluated together,
so the cost per refinement level is one vectorized call.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DepthExceeded, NonFinite

#: every interval is bisected at least this many times before the error
#: estimate is trusted, which protects against accidental agreement of the
#: coarse and refined Simpson sums for oscillatory integrands
MIN_DEPTH = 3


@dataclass(frozen=True)
class QuadratureConfig:
    abs_tol: float = 1e-10
    max_depth: int = 40

    def __post_init__(self):
        if not self.abs_tol > 0:
            raise ValueError("abs_tol must be positive")
        if self.max_depth < MIN_DEPTH:
            raise ValueError(f"max_depth must be at least {MIN_DEPTH}")


DEFAULT_QUADRATURE = QuadratureConfig()


def _call(fn, x):
    y = np.asarray(fn(x))
    if y.ndim == 0:
        y = np.full(x.shape, y)
    finite = np.isfinite(y).reshape(len(x), -1).all(axis=1)
    if not np.all(finite):
        raise NonFinite(f"integrand is not finite at t = {x[~finite][:3].tolist()}")
    return y


def _err(delta):
    a = np.abs(delta)
    return a.reshape(a.shape[0], -1).max(axis=1) if a.ndim > 1 else a


def integrate_many(fn, lower, upper, cfg: QuadratureConfig = DEFAULT_QUADRATURE):
    """Integrals of ``fn`` over ``[lower[i], upper[i]]`` for every ``i``.

    Raises
    ------
    DepthExceeded
        if any interval needs more than ``cfg.max_depth`` bisections.
    NonFinite
        if the integrand returns NaN or infinity anywhere it is sampled.
    """
    lo = np.atleast_1d(np.asarray(lower, dtype=float))
    hi = np.atleast_1d(np.asarray(upper, dtype=float))
    lo, hi = np.broadcast_arrays(lo, hi)
    lo, hi = lo.ravel(), hi.ravel()
    n = lo.size
    mid = 0.5 * (lo + hi)
    y = _call(fn, np.concatenate([lo, mid, hi]))
    fa, fm, fb = y[:n], y[n:2 * n], y[2 * n:]
    shape_tail = y.shape[1:]
    h = (hi - lo).reshape((n,) + (1,) * len(shape_tail))
    whole = h / 6.0 * (fa + 4.0 * fm + fb)
    total = np.zeros((n,) + shape_tail, dtype=y.dtype if np.iscomplexobj(y) else float)

    a, b, owner = lo, hi, np.arange(n)
    tol = np.full(n, cfg.abs_tol)
    depth = np.zeros(n, dtype=int)
    while a.size:
        m = 0.5 * (a + b)
        lm = 0.5 * (a + m)
        rm = 0.5 * (m + b)
        k = a.size
        y = _call(fn, np.concatenate([lm, rm]))
        flm, frm = y[:k], y[k:]
        hh = ((m - a) / 6.0).reshape((k,) + (1,) * len(shape_tail))
        left = hh * (fa + 4.0 * flm + fm)
        right = hh * (fm + 4.0 * frm + fb)
        delta = left + right - whole
        done = (_err(delta) <= 15.0 * tol) & (depth >= MIN_DEPTH)
        if np.any(done):
            if np.iscomplexobj(delta) and not np.iscomplexobj(total):
                total = total.astype(complex)
            np.add.at(total, owner[done], (left + right + delta / 15.0)[done])
        keep = ~done
        if not np.any(keep):
            break
        if np.any(depth[keep] + 1 > cfg.max_depth):
            raise DepthExceeded(f"adaptive Simpson exceeded depth {cfg.max_depth}")
        a_k, b_k, m_k = a[keep], b[keep], m[keep]
        a = np.concatenate([a_k, m_k])
        b = np.concatenate([m_k, b_k])
        fa_new = np.concatenate([fa[keep], fm[keep]])
        fm_new = np.concatenate([flm[keep], frm[keep]])
        fb_new = np.concatenate([fm[keep], fb[keep]])
        whole = np.concatenate([left[keep], right[keep]])
        fa, fm, fb = fa_new, fm_new, fb_new
        owner = np.concatenate([owner[keep], owner[keep]])
        tol = np.concatenate([tol[keep], tol[keep]]) / 2.0
        depth = np.concatenate([depth[keep], depth[keep]]) + 1
    return total


def integrate(fn, t0: float, t1: float, cfg: QuadratureConfig = DEFAULT_QUADRATURE):
    """Adaptive Simpson estimate of ``int_{t0}^{t1} fn(s) ds``.

    ``fn`` may be a vectorized callable or any object with a ``value`` method
    (such as a :class:`~flowlab.paths.ScalarPath`).

    >>> round(float(integrate(lambda s: 2 * s, 0.0, 1.0)), 12)
    1.0
    """
    f = fn.value if hasattr(fn, "value") else fn
    out = integrate_many(f, [t0], [t1], cfg)[0]
    return out.item() if np.ndim(out) == 0 else out


def integrate_from_zero(fn, t, cfg: QuadratureConfig = DEFAULT_QUADRATURE):
    """``int_0^t fn`` for scalar or array ``t`` (result has the shape of ``t``)."""
    t_arr = np.asarray(t, dtype=float)
    out = integrate_many(fn, np.zeros(t_arr.size), t_arr.ravel(), cfg)
    return out.reshape(t_arr.shape + out.shape[1:])
