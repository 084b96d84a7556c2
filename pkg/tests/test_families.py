"""Coefficient families: conserved modulus, master relation, K-field and validity.

The K-field oracle is brute force: evaluate ``f_t conj(f) - conj(g_t) g`` from
the combined coefficients and compare with the closed-form prediction.
"""

from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from family_draws import BUILDERS, draw
from flowlab import expr as ex
from flowlab.errors import ManifestError, MismatchedInitialPair, NonFinite, OutsideValidity
from flowlab.families import (
    FAMILIES,
    GeneralLinIndep,
    LinDepCommuting,
    LinDepScaled,
    LinIndepCase1,
    LinIndepCase2,
    check_initial_pair,
    coefficients_at,
    combine,
    expected_K,
    family_from_json,
    fg_at,
)
from flowlab.kinematics import key_lhs
from flowlab.paths import Constant, Linear, Poly, Quotient, Sinusoid

kinds = st.sampled_from(sorted(BUILDERS))
seeds = st.integers(0, 2 ** 32 - 1)
TIMES = np.linspace(0.0, 1.0, 50)
LABELS = np.array([0.1 + 0.2j, -0.3 + 0.5j, 0.7 + 0.9j, -0.5 + 1.2j])
F0 = ex.ExpLinear(2.0, 1j)
G0 = ex.ExpLinear(1.0, 2j)


def pair_for(spec):
    if spec.mode == "lin_dep":
        lam = getattr(spec, "lam", None)
        if lam is None:  # the commuting family carries no lambda: pair with g0 = 0
            return F0, ex.Constant(0.0)
        return F0, ex.Scale(lam, F0)
    return F0, G0


class TestInvariants:
    @given(kinds, seeds)
    @settings(max_examples=90, deadline=None)
    def test_modulus_real_part_and_master(self, kind, seed):
        c = draw(kind, seed).coefficients(TIMES)
        assert np.max(np.abs(c.modulus_residual())) < 1e-9
        assert np.max(np.abs(c.real_part_residual())) < 1e-9
        assert np.max(np.abs(c.master_residual())) < 1e-8

    @given(kinds, seeds)
    @settings(max_examples=45, deadline=None)
    def test_rates_match_finite_differences(self, kind, seed):
        spec = draw(kind, seed)
        t = np.array([0.3, 0.55, 0.8])
        h = 1e-5
        c, lo, hi = spec.coefficients(t), spec.coefficients(t - h), spec.coefficients(t + h)
        (_, rates) = c.matrix()
        fd = [(b - a) / (2 * h) for a, b in zip(lo.matrix()[0], hi.matrix()[0])]
        for exact, approx in zip(rates, fd):
            np.testing.assert_allclose(exact, approx, atol=1e-6 * max(1.0, np.max(np.abs(exact))))

    @given(kinds, seeds)
    @settings(max_examples=45, deadline=None)
    def test_key_equation_brute_force(self, kind, seed):
        spec = draw(kind, seed)
        f0, g0 = pair_for(spec)
        t = np.array([0.0, 0.4, 1.0])[:, None]
        f, g, f_t, g_t = fg_at(spec, f0, g0, t, LABELS[None, :])
        lhs = key_lhs(f, g, f_t, g_t)
        c = spec.coefficients(t)
        K = expected_K(c, ex.evaluate(f0, LABELS)[None, :], ex.evaluate(g0, LABELS)[None, :])
        scale = max(1.0, float(np.max(np.abs(lhs))))
        assert np.max(np.abs(lhs.real)) < 1e-9 * scale
        assert np.max(np.abs(lhs.imag - K)) < 1e-9 * scale


class TestSpecificFamilies:
    def test_commuting_family_has_zero_K(self):
        spec = LinDepCommuting(Sinusoid(0.5, 2.0, 0.0), 0.4)
        f, g, f_t, g_t = fg_at(spec, F0, ex.Constant(0.0), TIMES[:, None], LABELS[None, :])
        assert np.max(np.abs(key_lhs(f, g, f_t, g_t))) < 1e-12

    def test_commuting_family_at_rest(self):
        c = LinDepCommuting(Constant(0.0)).coefficients(TIMES)
        np.testing.assert_allclose(c.alpha, 1.0)
        np.testing.assert_allclose(c.beta, 0.0)
        np.testing.assert_allclose(c.alpha_t, 0.0)

    @pytest.mark.parametrize("c_rate, d", [(0.0, 1.0), (1.5, -0.5), (-2.0, 0.3)])
    def test_scaled_family_K_is_affine_in_time(self, c_rate, d):
        lam = 0.4 * np.exp(0.3j)
        spec = LinDepScaled(lam, Poly((0.4, 0.2, 0.1)), Constant(0.3), c_rate, d)
        g0 = ex.Scale(lam, F0)
        t = TIMES[:, None]
        f, g, f_t, g_t = fg_at(spec, F0, g0, t, LABELS[None, :])
        K = key_lhs(f, g, f_t, g_t).imag
        expected = (c_rate * t + d) * np.abs(ex.evaluate(F0, LABELS))[None, :] ** 2
        assert np.max(np.abs(K - expected)) < 1e-9

    def test_scalar_time_gives_scalars(self):
        c = draw("general", 3).coefficients(0.5)
        assert isinstance(c.alpha, complex) and isinstance(c.t, float)

    def test_combine_matches_matrix(self):
        c = draw("lin_indep_case4", 1).coefficients(0.6)
        (a, b, cc, d), _ = c.matrix()
        u0, v0 = 1.3 - 0.2j, 0.4 + 0.9j
        f, g, _, _ = combine(c, u0, v0)
        assert f == pytest.approx(a * u0 + b * v0)
        assert g == pytest.approx(cc * u0 + d * v0)

    def test_initial_coefficients_of_scaled_family(self):
        lam = 0.5j
        spec = LinDepScaled(lam, Constant(0.5), Constant(np.pi / 2), 1.0, 0.0)
        c = coefficients_at(spec, 0.0)
        assert c.alpha == pytest.approx(1.0)
        assert c.beta == pytest.approx(lam)


class TestValidity:
    def test_case2_outside_predicate(self):
        spec = LinIndepCase2(c2=1.0, w=1.0, p=0.0, psi=Linear(1.0, 0.0))
        spec.coefficients(np.array([1.5, 2.0]))
        with pytest.raises(OutsideValidity, match=r"\(w t \+ p\)/c2 > 1"):
            spec.coefficients(0.5)

    def test_general_family_predicate(self):
        spec = GeneralLinIndep(Constant(1.0), Linear(-1.0, 1.0), Constant(0.2), Constant(0.0))
        spec.coefficients(np.linspace(0.0, 1.5, 5))
        with pytest.raises(OutsideValidity):
            spec.coefficients(1.7)

    def test_vanishing_quotient_denominator(self):
        spec = LinIndepCase1(Quotient(Constant(1.0), Linear(1.0, -0.5)), Constant(0.0))
        spec.check_paths(0.0, 0.4)
        with pytest.raises(NonFinite):
            spec.check_paths(0.0, 1.0)

    @pytest.mark.parametrize("lam", [0.0, 1.0, 1.5j])
    def test_lambda_range(self, lam):
        with pytest.raises(ValueError):
            LinDepScaled(lam, Constant(abs(lam)), Constant(0.0))

    def test_start_must_match_lambda(self):
        with pytest.raises(ValueError, match="must equal lambda"):
            LinDepScaled(0.5, Constant(0.4), Constant(0.0))

    def test_mismatched_initial_pair(self):
        spec = LinDepScaled(0.5, Constant(0.5), Constant(0.0))
        check_initial_pair(spec, F0, ex.Scale(0.5, F0), LABELS)
        with pytest.raises(MismatchedInitialPair):
            check_initial_pair(spec, F0, G0, LABELS)

    def test_case_constructors_reject_zero_rates(self):
        with pytest.raises(ValueError):
            LinIndepCase2(c2=0.0, w=1.0, p=2.0, psi=Constant(0.0))


class TestJson:
    @given(kinds, seeds)
    @settings(max_examples=30, deadline=None)
    def test_round_trip(self, kind, seed):
        spec = draw(kind, seed)
        doc = spec.to_json()
        back = family_from_json(doc["family"], doc["params"])
        assert type(back) is type(spec)
        a, b = spec.coefficients(TIMES[::7]), back.coefficients(TIMES[::7])
        np.testing.assert_allclose(b.alpha, a.alpha, rtol=1e-12, atol=1e-12)
        np.testing.assert_allclose(b.beta, a.beta, rtol=1e-12, atol=1e-12)

    def test_registry_covers_every_variant(self):
        assert set(FAMILIES) == set(BUILDERS)

    @pytest.mark.parametrize("kind, params, field", [
        ("nope", {}, "flow.family"),
        ("lin_indep_case1", {}, "flow.params.r"),
        ("lin_indep_case2", {"c2": 1, "w": "x", "p": 2}, "flow.params.w"),
        ("lin_dep_scaled", {"lambda": [2, 0], "r": 2}, "flow.params"),
        ("lin_dep_general", {"lambda": 0.5, "r": 0.5}, "flow.params.Xi"),
        ("general", [], "flow.params"),
    ])
    def test_errors(self, kind, params, field):
        with pytest.raises(ManifestError) as info:
            family_from_json(kind, params)
        assert info.value.field == field
