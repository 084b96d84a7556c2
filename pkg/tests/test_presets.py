"""Named presets reproduce the stated closed forms of the classical flows and
worked examples."""

from __future__ import annotations

import math

import numpy as np
import pytest

from flowlab import expr as ex
from flowlab.errors import UnknownPreset
from flowlab.families import fg_at
from flowlab.presets import PRESETS, Preset, preset, preset_names

T = np.linspace(0.0, 1.0, 11)
Z = np.array([0.2 - 0.3j, -1.0 + 0.1j, 0.5j, 1.2])


class TestRegistry:
    def test_names(self):
        assert preset_names() == list(PRESETS)
        assert {"kirchhoff", "gerstner"} <= set(preset_names())
        assert len(preset_names()) == 10

    def test_unknown(self):
        with pytest.raises(UnknownPreset, match="unknown preset 'vortex'"):
            preset("vortex")
        with pytest.raises(KeyError):
            preset("vortex")

    def test_unpacking(self):
        spec, f0, g0, domain = preset("gerstner")
        assert spec.kind == "general" and domain.b_range[1] < 0

    @pytest.mark.parametrize("name", list(PRESETS))
    def test_every_preset_is_finite_on_its_window(self, name):
        p = preset(name)
        assert isinstance(p, Preset)
        t = np.linspace(*p.domain.t_range, 9)
        f, g, f_t, g_t = fg_at(p.spec, p.f0, p.g0, t[:, None], Z[None, :])
        assert all(np.all(np.isfinite(v)) for v in (f, g, f_t, g_t))

    @pytest.mark.parametrize("name, bad", [
        ("kirchhoff", {"lam": 1.2}),
        ("kirchhoff", {"A": 0.0}),
        ("gerstner", {"k": -1.0}),
    ])
    def test_invalid_parameters(self, name, bad):
        with pytest.raises(ValueError):
            preset(name, **bad)


class TestClassicalFlows:
    @pytest.mark.parametrize("A, k, lam, c", [(1.0, 1.0, 0.5, 1.0), (1.3, 0.8, 0.3, 1.7)])
    def test_kirchhoff_closed_form(self, A, k, lam, c):
        p = preset("kirchhoff", A=A, k=k, lam=lam, c=c)
        f, g, _, _ = fg_at(p.spec, p.f0, p.g0, T[:, None], Z[None, :])
        tt, zz = T[:, None], Z[None, :]
        np.testing.assert_allclose(f, k * A * np.exp(1j * (c * tt + k * zz)), rtol=1e-12)
        np.testing.assert_allclose(g, k * A * lam * np.exp(1j * k * zz) + 0 * tt, rtol=1e-12)

    def test_kirchhoff_jacobian(self):
        A, k, lam = 1.3, 0.8, 0.3
        p = preset("kirchhoff", A=A, k=k, lam=lam)
        z = np.array([0.1, -0.7j])
        f, g, _, _ = fg_at(p.spec, p.f0, p.g0, 0.6, z)
        J = np.abs(f) ** 2 - np.abs(g) ** 2
        expected = k * k * A * A * (1 - lam * lam) * np.exp(-2 * k * z.imag)
        np.testing.assert_allclose(J, expected, rtol=1e-12)

    @pytest.mark.parametrize("k, grav", [(1.0, 9.81), (2.0, 3.0)])
    def test_gerstner_parameters(self, k, grav):
        p = preset("gerstner", k=k, g=grav)
        s = math.sqrt(k * grav)
        assert float(p.spec.D1.value(0.3)) == float(p.spec.D2.value(0.3)) == pytest.approx(s)
        c = p.spec.coefficients(T)
        np.testing.assert_allclose(c.gamma, 2 * s * T, atol=1e-12)
        np.testing.assert_allclose(c.alpha, np.exp(1j * s * T), atol=1e-10)
        np.testing.assert_allclose(c.beta, 0.0, atol=1e-15)
        assert ex.evaluate(p.f0, 0.3j) == 1.0
        assert ex.evaluate(p.g0, -0.5j) == pytest.approx(-np.exp(-0.5 * k))


class TestWorkedExamples:
    def test_literal_d_zero_phase(self):
        c = preset("example-4-1", c=2.0).spec.coefficients(T)
        np.testing.assert_allclose(c.alpha, np.exp(1j * T * T), atol=1e-10)

    def test_case1_example(self):
        r0 = 2.0
        c = preset("example-4-2", r0=r0).spec.coefficients(T)
        np.testing.assert_allclose(np.abs(c.alpha), math.sqrt(1 + r0 * r0))
        np.testing.assert_allclose(np.abs(c.beta), r0)
        # master relation: Phi' = (h t + r0^2 psi') / (1 + r0^2) = t + 1
        np.testing.assert_allclose(np.angle(c.alpha), T * T / 2 + T, atol=1e-10)

    def test_case2_example(self):
        t = np.linspace(1.5, 3.0, 7)
        c = preset("example-4-3").spec.coefficients(t)
        np.testing.assert_allclose(np.abs(c.alpha) ** 2, (t + 1) / 2, rtol=1e-12)
        np.testing.assert_allclose(np.abs(c.beta) ** 2, (t - 1) / 2, rtol=1e-12)
        np.testing.assert_allclose(c.gamma, t, atol=1e-15)
        phase = t - 2 * np.log(t + 1)
        np.testing.assert_allclose(np.exp(1j * phase), c.alpha / np.abs(c.alpha), atol=1e-9)

    def test_case3_example_moduli(self):
        c = preset("example-4-4").spec.coefficients(T)
        np.testing.assert_allclose(np.abs(c.alpha), math.sqrt(6) / 2, rtol=1e-14)
        np.testing.assert_allclose(np.abs(c.beta), math.sqrt(2) / 2, rtol=1e-14)
        np.testing.assert_allclose(c.gamma, T * T, atol=1e-15)

    def test_case4_example_moduli(self):
        c = preset("example-4-5").spec.coefficients(T)
        np.testing.assert_allclose(np.abs(c.alpha), math.sqrt(6) / 2, rtol=1e-14)
        np.testing.assert_allclose(np.abs(c.beta), math.sqrt(2) / 2, rtol=1e-14)
        np.testing.assert_allclose(c.gamma, T * T + T, atol=1e-15)

    def test_complex_prescribed_function_example(self):
        A3, k3, lam, nu0 = 1.5, 0.7, 0.5, 2.0
        p = preset("example-5-1", A3=A3, k3=k3, lam=lam, nu0=nu0)
        tt, zz = T[:, None], Z[None, :]
        f, g, _, _ = fg_at(p.spec, p.f0, p.g0, tt, zz)
        expected_f = A3 * np.exp(1j * (1 + lam * lam * tt - np.exp(1j * nu0 * tt) + k3 * zz))
        np.testing.assert_allclose(f, expected_f, rtol=1e-9)
        np.testing.assert_allclose(g, lam * A3 * np.exp(1j * (tt + k3 * zz)), rtol=1e-12)
        # the exponent is complex, so |alpha|^2 - |beta|^2 drifts away from 1 - |lambda|^2
        c = p.spec.coefficients(T)
        assert np.max(np.abs(c.modulus_residual())) > 1e-2

    def test_flat_general_example(self):
        c = preset("example-5-2").spec.coefficients(T)
        np.testing.assert_allclose(np.abs(c.alpha) ** 2, 1.25, rtol=1e-14)
        np.testing.assert_allclose(np.exp(1j * (T ** 3 + T)), c.alpha / np.abs(c.alpha), atol=1e-9)

    def test_general_example_rotation_rate(self):
        c = preset("example-5-3").spec.coefficients(T)
        np.testing.assert_allclose(c.gamma_t, 2 * np.sqrt(T * T + np.cos(T) ** 2), rtol=1e-13)
        np.testing.assert_allclose(np.abs(c.alpha) ** 2 - np.abs(c.beta) ** 2, 1.0, atol=1e-12)
