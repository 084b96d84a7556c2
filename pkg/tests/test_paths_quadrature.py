"""Scalar and complex time paths, and the adaptive Simpson integrator.

Path derivatives are checked against central differences; integrals against
``scipy.integrate.quad``.
"""

from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import quad

from flowlab.errors import DepthExceeded, ManifestError, NonFinite
from flowlab.paths import (
    Cartesian,
    ComplexProduct,
    Constant,
    Linear,
    PathProduct,
    PathScale,
    PathSum,
    Polar,
    Poly,
    Quotient,
    Sinusoid,
    SqrtQuad,
    as_complex_path,
    complex_path_from_json,
    complex_path_to_json,
    path_from_json,
    path_to_json,
    quotients,
)
from flowlab.quadrature import QuadratureConfig, integrate, integrate_from_zero, integrate_many

coef = st.floats(min_value=-2.0, max_value=2.0, allow_nan=False)
time = st.floats(min_value=0.05, max_value=1.0)

leaf_paths = st.one_of(
    st.builds(Constant, coef),
    st.builds(Linear, coef, coef),
    st.builds(lambda c: Poly(tuple(c)), st.lists(coef, min_size=1, max_size=4)),
    st.builds(Sinusoid, coef, coef, coef),
    st.builds(SqrtQuad, st.floats(0, 2), st.floats(0, 2), st.floats(0.5, 2)),
)
paths = st.recursive(
    leaf_paths,
    lambda kids: st.one_of(
        st.builds(PathSum, kids, kids),
        st.builds(PathProduct, kids, kids),
        st.builds(PathScale, coef, kids),
        st.builds(Quotient, kids, st.builds(SqrtQuad, st.floats(0, 1), st.floats(0, 1), st.floats(1, 2))),
    ),
    max_leaves=5,
)


def fd(fn, t, h=1e-6):
    return (fn(t + h) - fn(t - h)) / (2 * h)


class TestScalarPaths:
    def test_values(self):
        t = 0.5
        assert Linear(2.0, 1.0).value(t) == 2.0
        assert Poly((1.0, 0.0, 3.0)).value(t) == pytest.approx(1.75)
        assert Sinusoid(2.0, 3.0, 0.1).value(t) == pytest.approx(2 * math.sin(1.6))
        assert SqrtQuad(1.0, 0.0, 1.0).value(t) == pytest.approx(math.sqrt(1.25))
        assert Quotient(Linear(1, 0), Constant(4.0)).value(t) == 0.125

    @given(paths, time)
    @settings(max_examples=100, deadline=None)
    def test_deriv_matches_central_difference(self, p, t):
        exact = float(p.deriv(t))
        assert abs(exact - fd(p.value, t)) <= 1e-6 * max(1.0, abs(exact))

    @given(paths, time)
    @settings(max_examples=60, deadline=None)
    def test_derivative_path_agrees_with_deriv(self, p, t):
        assert float(p.derivative().value(t)) == pytest.approx(float(p.deriv(t)), rel=1e-10, abs=1e-12)

    def test_vectorized(self):
        p = PathSum(Sinusoid(1, 2, 0), Poly((0, 1, 1)))
        ts = np.linspace(0, 1, 7)
        np.testing.assert_allclose(p.value(ts), [float(p.value(t)) for t in ts])

    def test_operators(self):
        p = Linear(1, 0) + 2.0
        q = Linear(1, 0) * Linear(1, 1)
        assert p.value(3.0) == 5.0 and q.value(2.0) == 6.0
        assert (3 * Linear(1, 0)).value(2.0) == 6.0

    def test_empty_poly_rejected(self):
        with pytest.raises(ValueError):
            Poly(())

    def test_quotient_denominator_check(self):
        q = Quotient(Constant(1.0), Linear(1.0, -0.5))
        q.check_denominator(0.0, 0.4)
        with pytest.raises(NonFinite):
            q.check_denominator(0.0, 1.0)

    def test_quotients_are_found_in_nested_paths(self):
        inner = Quotient(Constant(1.0), Linear(1.0, 2.0))
        tree = PathSum(Constant(1.0), PathScale(2.0, inner))
        assert list(quotients(tree)) == [inner]
        assert list(quotients(Polar(tree, Constant(0.0)))) == [inner]


class TestComplexPaths:
    @pytest.mark.parametrize("p", [
        Cartesian(Sinusoid(1, 2, 0), Linear(1, 1)),
        Polar(Poly((1, 0.5)), Linear(2, 0.3)),
        ComplexProduct(Polar(Constant(2), Linear(1, 0)), Cartesian(Linear(1, 1), Constant(1))),
    ])
    def test_deriv_and_derivative(self, p):
        for t in (0.1, 0.6):
            assert abs(p.deriv(t) - fd(p.value, t)) < 1e-7
            assert abs(p.derivative().value(t) - p.deriv(t)) < 1e-12

    def test_promotion(self):
        p = as_complex_path(Linear(1.0, 0.0))
        assert p.value(2.0) == 2.0
        assert as_complex_path(p) is p


class TestJson:
    @given(paths, time)
    @settings(max_examples=50, deadline=None)
    def test_round_trip(self, p, t):
        back = path_from_json(path_to_json(p))
        assert float(back.value(t)) == pytest.approx(float(p.value(t)), rel=1e-14, abs=1e-14)

    def test_bare_number_is_constant(self):
        assert path_from_json(2.5) == Constant(2.5)

    def test_complex_forms(self):
        c = complex_path_from_json({"re": 1.0, "im": {"kind": "linear", "a": 2.0, "b": 0.0}})
        assert c.value(1.0) == 1 + 2j
        p = complex_path_from_json({"mod": 2.0, "arg": 0.0})
        assert p.value(0.3) == 2.0
        assert complex_path_from_json(complex_path_to_json(p)).value(0.3) == 2.0

    @pytest.mark.parametrize("obj, field", [
        ({"kind": "linear", "a": 1.0}, "path.b"),
        ({"kind": "warp"}, "path.kind"),
        ({"kind": "constant", "v": float("nan")}, "path.v"),
        ({"kind": "poly", "coeffs": []}, "path.coeffs"),
        ("x", "path"),
    ])
    def test_errors(self, obj, field):
        with pytest.raises(ManifestError) as info:
            path_from_json(obj)
        assert info.value.field == field


class TestQuadrature:
    @pytest.mark.parametrize("fn, a, b", [
        (np.sin, 0.0, 3.0),
        (lambda t: np.exp(-t * t), -1.0, 2.0),
        (lambda t: 1.0 / (1.0 + t * t), 0.0, 5.0),
        (lambda t: np.sqrt(t + 1e-3), 0.0, 1.0),
    ])
    def test_matches_scipy(self, fn, a, b):
        expected = quad(fn, a, b, epsabs=1e-13, epsrel=1e-13)[0]
        assert integrate(fn, a, b) == pytest.approx(expected, abs=1e-9)

    @given(paths, st.floats(0.1, 1.0))
    @settings(max_examples=40, deadline=None)
    def test_path_integral_matches_scipy(self, p, t1):
        expected = quad(lambda s: float(p.value(s)), 0.0, t1, epsabs=1e-12, epsrel=1e-12)[0]
        assert integrate(p, 0.0, t1) == pytest.approx(expected, abs=1e-8)

    def test_vector_valued_and_batched(self):
        out = integrate_many(lambda t: np.stack([t, t * t * (1 + 1j)], axis=1), [0.0, 1.0], [1.0, 2.0])
        np.testing.assert_allclose(out, [[0.5, 1 / 3 * (1 + 1j)], [1.5, 7 / 3 * (1 + 1j)]], atol=1e-12)

    def test_integrate_from_zero_keeps_shape(self):
        t = np.array([[0.5, 1.0], [1.5, 2.0]])
        np.testing.assert_allclose(integrate_from_zero(lambda s: 2 * s, t), t * t, atol=1e-12)

    def test_depth_exceeded(self):
        cfg = QuadratureConfig(abs_tol=1e-14, max_depth=4)
        with pytest.raises(DepthExceeded):
            integrate(lambda t: np.sin(50 * t), 0.0, 1.0, cfg)

    def test_non_finite(self):
        with pytest.raises(NonFinite), np.errstate(divide="ignore"):
            integrate(lambda t: 1.0 / t, 0.0, 1.0)

    def test_config_validation(self):
        with pytest.raises(ValueError):
            QuadratureConfig(abs_tol=0.0)
        with pytest.raises(ValueError):
            QuadratureConfig(max_depth=2)
