"""Verification checks on clean presets, corrupted fixtures and degenerate inputs."""

from __future__ import annotations

import json
import math

import numpy as np
import pytest

from flowlab import expr as ex
from flowlab.errors import DegenerateBasis
from flowlab.families import LinDepCommuting, LinIndepCase1
from flowlab.kinematics import LabeledFlow, LabelGrid
from flowlab.matrices import fundamental_solution
from flowlab.paths import Constant, Linear, Poly, Sinusoid
from flowlab.presets import preset_names
from flowlab.verification import (
    CORRUPTIONS,
    CheckReport,
    ToleranceConfig,
    K_is_constant,
    check_jacobian_invariance,
    check_key_equation,
    check_matrix_lemma,
    check_sense_preserving_and_injectivity,
    check_span_decomposition,
    check_vorticity_conservation,
    check_vorticity_identity,
    commuting_generator,
    corrupt,
    negative_controls,
    report_json,
    run_suite,
    suite_passed,
    vorticity_identity_residual,
)

CLEAN_PRESETS = [n for n in preset_names() if n != "example-5-1"]


def commuting_flow():
    spec = LinDepCommuting(Sinusoid(0.6, 1.5, 0.0), 0.3)
    return LabeledFlow(spec, ex.ExpLinear(1.0, 1j), ex.Constant(0.0), domain=LabelGrid(-1, 1, 0.2, 1.0, 6, 5))


class TestConfig:
    @pytest.mark.parametrize("kw", [
        {"analytic_tol": 0.0}, {"fd_tol": -1.0}, {"fd_step_t": 1e-9}, {"samples_t": 0}, {"t_range": (1.0, 0.0)},
    ])
    def test_rejects_invalid(self, kw):
        with pytest.raises(ValueError):
            ToleranceConfig(**kw)

    def test_defaults(self):
        cfg = ToleranceConfig()
        assert (cfg.analytic_tol, cfg.fd_tol, cfg.fd_step_t, cfg.samples_t) == (1e-9, 1e-5, 1e-4, 16)


class TestSuiteOnPresets:
    @pytest.mark.parametrize("name", CLEAN_PRESETS)
    def test_clean_presets_pass(self, name):
        reports = run_suite(LabeledFlow.from_preset(name, na=8, nb=6))
        failing = [(r.name, r.max_residual, r.notes) for r in reports if not r.passed]
        assert not failing
        for r in reports:
            assert r.passed == (r.max_residual <= r.tolerance)

    def test_complex_prescribed_function_is_exposed(self):
        reports = {r.name: r for r in run_suite(LabeledFlow.from_preset("example-5-1", na=8, nb=6))}
        assert not reports["jacobian_invariance"].passed
        assert not reports["key_equation"].passed
        assert "not real" in reports["key_equation"].notes
        assert reports["vorticity_identity"].passed

    def test_threads_do_not_change_results(self, gerstner_flow):
        one = [r.to_json() for r in run_suite(gerstner_flow, threads=1)]
        many = [r.to_json() for r in run_suite(gerstner_flow, threads=4)]
        assert one == many

    def test_errors_become_failing_reports(self):
        flow = LabeledFlow.from_preset("example-4-3", na=4, nb=4)
        reports = run_suite(flow, ToleranceConfig(t_range=(0.0, 1.0)))
        assert not suite_passed(reports)
        assert all(math.isinf(r.max_residual) for r in reports)
        assert "OutsideValidity" in reports[0].notes

    def test_report_json(self, kirchhoff_flow):
        reports = run_suite(kirchhoff_flow)
        doc = report_json({"preset": "kirchhoff"}, reports)
        assert doc["pass"] is True
        assert [c["name"] for c in doc["checks"]][:2] == ["jacobian_invariance", "key_equation"]
        assert "vorticity_conservation" in [c["name"] for c in doc["checks"]]
        json.dumps(doc, allow_nan=False)

    def test_infinite_residual_serializes_as_null(self):
        r = CheckReport("x", math.inf, 0.0, False, (math.nan, 0.0, 0.0))
        doc = r.to_json()
        assert doc["max_residual"] is None and doc["worst_sample"][0] is None and doc["pass"] is False


class TestIndividualChecks:
    def test_kirchhoff_jacobian_exact(self, kirchhoff_flow):
        assert check_jacobian_invariance(kirchhoff_flow).max_residual < 1e-12

    def test_key_equation_reports_both_parts(self, gerstner_flow):
        r = check_key_equation(gerstner_flow)
        assert r.passed and "pointwise" in r.notes and "time coherence" in r.notes

    def test_gerstner_span_coefficients(self, gerstner_flow):
        r = check_span_decomposition(gerstner_flow, 0.5)
        coef = r.extras["coefficients"]
        assert r.extras["basis"] == "4-term"
        np.testing.assert_allclose(coef[:2], 1j * math.sqrt(9.81), atol=1e-6)
        np.testing.assert_allclose(coef[2:], 0.0, atol=1e-6)

    def test_span_falls_back_for_dependent_pair(self, kirchhoff_flow):
        r = check_span_decomposition(kirchhoff_flow, 0.5)
        assert r.passed and r.extras["basis"] == "1-term |f0|^2"
        # K = d |f0|^2 with d = 1 for the Kirchhoff preset
        assert r.extras["coefficients"][0] == pytest.approx(1j, abs=1e-12)

    def test_span_needs_enough_labels(self, gerstner_flow):
        cfg = ToleranceConfig(grid=LabelGrid(0, 1, -1, -0.5, 2, 2))
        with pytest.raises(DegenerateBasis):
            check_span_decomposition(gerstner_flow, 0.5, cfg)

    def test_constant_K_detection(self, kirchhoff_flow, gerstner_flow):
        assert K_is_constant(kirchhoff_flow) and K_is_constant(gerstner_flow)
        assert not K_is_constant(LabeledFlow.from_preset("example-4-2", na=4, nb=4))

    def test_vorticity_conservation_for_constant_K(self, gerstner_flow):
        assert check_vorticity_conservation(gerstner_flow).max_residual < 1e-6

    def test_vorticity_changes_when_K_varies(self):
        flow = LabeledFlow.from_preset("example-4-2", na=4, nb=4)
        assert not check_vorticity_conservation(flow).passed

    def test_vorticity_residual_is_second_order(self):
        spec = LinIndepCase1(Poly((1.0, 0.8, -0.6)), Linear(1.5, 0.0), h=2.0, d0=0.5)
        flow = LabeledFlow(spec, ex.ExpLinear(1.0, 1j), ex.ExpLinear(0.5, 2j))
        z = np.array([0.2 + 0.3j, -0.5 + 0.8j])
        coarse = vorticity_identity_residual(flow, [0.5], z, 2e-2).max()
        fine = vorticity_identity_residual(flow, [0.5], z, 1e-2).max()
        assert coarse / fine >= 3.0

    def test_injectivity_margin_is_negative_when_passing(self, gerstner_flow):
        r = check_sense_preserving_and_injectivity(gerstner_flow, 0.5)
        assert r.passed and r.max_residual < 0 and r.tolerance == 0.0

    def test_matrix_lemma_for_commuting_family(self):
        flow = commuting_flow()
        r = check_matrix_lemma(commuting_generator(flow.spec), 2.0, times=(0.5, 1.0, 2.0))
        assert r.passed and r.extras["commute_residual"] == 0.0
        names = [r.name for r in run_suite(flow)]
        assert "matrix_lemma" in names

    def test_commuting_family_reproduces_its_coefficients(self):
        spec = commuting_flow().spec
        for t in (0.5, 1.0, 2.0):
            X = fundamental_solution(commuting_generator(spec), t)
            c = spec.coefficients(t)
            assert X[0, 0] == pytest.approx(c.alpha, abs=1e-10)
            # first row of X holds (alpha, beta)
            assert X[0, 1] == pytest.approx(c.beta, abs=1e-10)


class TestNegativeControls:
    @pytest.mark.parametrize("index", range(7))
    def test_each_control_fails(self, index):
        check, _, thunk = negative_controls()[index]
        r = thunk()
        assert r.name == check
        assert not r.passed

    def test_every_check_has_a_control(self):
        covered = {c for c, _, _ in negative_controls()}
        assert covered == {"jacobian_invariance", "key_equation", "span_decomposition", "vorticity_identity",
                           "schwarzian_time_invariance", "sense_preserving_injectivity", "matrix_lemma"}

    @pytest.mark.parametrize("kind", CORRUPTIONS)
    def test_corrupted_suites_fail(self, gerstner_flow, kirchhoff_flow, kind):
        # Gerstner has beta = 0, so the beta scaling is exercised on Kirchhoff
        base = kirchhoff_flow if kind == "beta_scale" else gerstner_flow
        assert not suite_passed(run_suite(corrupt(base, kind)))

    def test_corruption_leaves_time_zero_alone(self, kirchhoff_flow):
        bad = corrupt(kirchhoff_flow, "beta_scale")
        a, b = kirchhoff_flow.coefficients(0.0), bad.coefficients(0.0)
        assert a.beta == b.beta
        assert bad.spec.to_json()["corruption"]["beta_scale"] == 1.01

    def test_unknown_corruption(self, gerstner_flow):
        with pytest.raises(ValueError):
            corrupt(gerstner_flow, "melt")

    def test_vorticity_check_is_sensitive_to_rate_errors(self, gerstner_flow):
        clean = check_vorticity_identity(gerstner_flow)
        bad = check_vorticity_identity(corrupt(gerstner_flow, "rate_twist"))
        assert bad.max_residual > 100 * max(clean.max_residual, 1e-9)


def test_constant_path_family_has_static_schwarzian():
    spec = LinIndepCase1(Constant(0.5), Constant(0.0))
    flow = LabeledFlow(spec, ex.ExpLinear(1.0, 1j), ex.ExpLinear(0.2, 2j), domain=LabelGrid(-1, 1, 0.1, 0.8, 5, 4))
    assert suite_passed(run_suite(flow))
