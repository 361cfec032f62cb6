import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import quad

from symprec.error_hamiltonians import (
    QUADRATIC_PARAMS,
    ErrorCoefficients,
    ErrorHamiltonianId,
    QuadraticFamilyParams,
)
from symprec.integrators import named_scheme
from symprec.precession import (
    c_n,
    delta_theta_central,
    delta_theta_for,
    delta_theta_quadratic,
    precession_prediction,
    predict_algorithm_precession,
    quadratic_parts,
    quartic_parts,
    s_n,
)

PI = math.pi

# closed-form C_n polynomials; n = 7 and 8 carry an e**6 on the last term
TABLE_1 = {
    0: lambda e: 0.0,
    1: lambda e: PI,
    2: lambda e: 2 * PI,
    3: lambda e: 3 * PI * (1 + e**2 / 4),
    4: lambda e: 4 * PI * (1 + 3 * e**2 / 4),
    5: lambda e: 5 * PI * (1 + 3 * e**2 / 2 + e**4 / 8),
    6: lambda e: 6 * PI * (1 + 5 * e**2 / 2 + 5 * e**4 / 8),
    7: lambda e: 7 * PI * (1 + 15 * e**2 / 4 + 15 * e**4 / 8 + 5 * e**6 / 64),
    8: lambda e: 8 * PI * (1 + 21 * e**2 / 4 + 35 * e**4 / 8 + 35 * e**6 / 64),
}


def c_quad(n, e):
    val, _ = quad(lambda t: (1 + e * math.cos(t)) ** n * math.cos(t), 0, 2 * PI, epsabs=1e-14, epsrel=1e-13, limit=200)
    return val / e


# Frozen adaptive-quadrature values
QUAD_ORACLE = [
    (3, 0.9, 11.333295497825178),
    (6, 0.9, 64.74940268773074),
    (7, 0.9, 116.75554517780958),
    (3, 0.37, 9.747340986476711),
]


class TestCn:
    @pytest.mark.parametrize("n,e,expected", [(0, 0.9, 0.0), (1, 0.37, PI), (2, 0.5, 2 * PI)])
    def test_low_rows(self, n, e, expected):
        assert c_n(n, e) == pytest.approx(expected, rel=1e-15, abs=0)

    @pytest.mark.parametrize("n,e,expected", QUAD_ORACLE)
    def test_frozen_quadrature(self, n, e, expected):
        assert c_n(n, e) == pytest.approx(expected, rel=1e-12)

    @pytest.mark.parametrize("e", [0.0, 0.3, 0.9])
    @pytest.mark.parametrize("n", range(9))
    def test_table_one(self, n, e):
        assert c_n(n, e) == pytest.approx(TABLE_1[n](e), rel=1e-12, abs=1e-300)

    def test_unprinted_e6_factor_matters(self):
        literal = 7 * PI * (1 + 15 * 0.81 / 4 + 15 * 0.6561 / 8 + 5 / 64)
        assert abs(c_n(7, 0.9) - literal) > 0.1

    @pytest.mark.parametrize("e", [0.3, 0.6, 0.9])
    @pytest.mark.parametrize("n", range(1, 9))
    def test_against_quadrature(self, n, e):
        assert c_n(n, e) == pytest.approx(c_quad(n, e), rel=1e-10)

    @pytest.mark.parametrize("n", range(17))
    def test_circular_limit(self, n):
        assert c_n(n, 0.0) == pytest.approx(n * PI, rel=1e-14)

    @settings(max_examples=100, deadline=None)
    @given(st.floats(0.0, 0.99), st.integers(1, 15))
    def test_recursion_identity(self, e, n):
        lhs = (1 + 1 / (n + 1)) * c_n(n + 1, e)
        rhs = (2 + 1 / n) * c_n(n, e) - (1 - e * e) * c_n(n - 1, e)
        assert lhs == pytest.approx(rhs, rel=1e-12)

    @pytest.mark.parametrize("n,e", [(17, 0.5), (-1, 0.5), (3, 1.0), (3, -0.1)])
    def test_range_errors(self, n, e):
        with pytest.raises(ValueError):
            c_n(n, e)


class TestSn:
    @pytest.mark.parametrize("e", [0.0, 0.4, 0.9])
    def test_zero(self, e):
        assert s_n(0, e) == pytest.approx(PI)

    def test_examples(self):
        assert s_n(2, 0.9) == pytest.approx(3.777765165941726, rel=1e-12)
        assert s_n(5, 0.0) == pytest.approx(PI, rel=1e-14)

    @pytest.mark.parametrize("n", [1, 3, 6])
    def test_by_quadrature(self, n):
        e = 0.7
        val, _ = quad(lambda t: (1 + e * math.cos(t)) ** n * math.sin(t) ** 2, 0, 2 * PI)
        assert s_n(n, e) == pytest.approx(val, rel=1e-10)


class TestDeltaThetaCentral:
    def test_inverse_square(self):
        assert delta_theta_central({0: 3.7}, 1.3, 0.5) == 0.0

    def test_vtv(self):
        assert delta_theta_central({3: 4.0}, 1.0, 0.9) == pytest.approx(45.33318, abs=5e-5)

    def test_vtvtv(self):
        assert delta_theta_central({6: 28.0}, 1.0, 0.9) == pytest.approx(1812.98, abs=5e-3)

    def test_nonpositive_semi_latus(self):
        with pytest.raises(ValueError):
            delta_theta_central({3: 4.0}, 0.0, 0.5)


class TestQuadratic:
    @pytest.mark.parametrize(
        "params,expected,tol",
        [
            (QuadraticFamilyParams(3, 3.0, 1.0), -45.33318, 5e-5),
            (QuadraticFamilyParams(6, 6.0, 4.0), -1812.98, 5e-3),
            (QuadraticFamilyParams(6, 3.0, 9.0), -5933.72, 5e-3),
        ],
    )
    def test_examples(self, params, expected, tol):
        assert delta_theta_quadratic(params, 1.0, 0.9) == pytest.approx(expected, abs=tol)

    def test_ttv_closed_form(self):
        assert delta_theta_quadratic(QuadraticFamilyParams(3, 3.0), 1.0, 0.9) == pytest.approx(
            -4 * c_n(3, 0.9), rel=1e-13
        )

    @pytest.mark.parametrize("n", [1, 2, 3, 5, 6, 9])
    @pytest.mark.parametrize("e", [0.0, 0.45, 0.9])
    def test_n_equals_alpha_cancellation(self, n, e):
        parts = quadratic_parts(QuadraticFamilyParams(n, float(n), 2.5), 1.7, e)
        assert parts.g + parts.h == pytest.approx(0.0, abs=1e-12 * abs(parts.h))
        assert parts.f == pytest.approx(-2.5 * (n + 1) * c_n(n, e) / 1.7**n, rel=1e-12)

    def test_rejects_n_zero(self):
        with pytest.raises(ValueError):
            quadratic_parts(QuadraticFamilyParams(0, 1.0), 1.0, 0.5)


class TestQuartic:
    @pytest.mark.parametrize("semi_latus,e", [(1.0, 0.9), (1.0, 0.0), (2.3, 0.4), (0.7, 0.75)])
    def test_simplified_parts(self, semi_latus, e):
        c6, c7 = c_n(6, e), c_n(7, e)
        w = semi_latus**-6
        parts = quartic_parts(semi_latus, e)
        assert parts.f == pytest.approx(36 * w * (c6 + 4 / 7 * c7), rel=1e-12)
        assert parts.g == pytest.approx(12 * w * (-2 * c6 - 3 / 7 * c7), rel=1e-12)
        assert parts.h == pytest.approx(12 * w * (2 * c6 + 9 / 7 * c7), rel=1e-12)
        assert parts.total == pytest.approx(36 * w * (c6 + 6 / 7 * c7), rel=1e-12)

    def test_matches_negated_vtttv(self):
        for semi_latus, e in [(1.0, 0.9), (1.9, 0.2), (0.6, 0.6)]:
            quartic = quartic_parts(semi_latus, e).total
            vtttv = delta_theta_quadratic(QUADRATIC_PARAMS[ErrorHamiltonianId.VTTTV], semi_latus, e)
            assert quartic == pytest.approx(-vtttv, rel=1e-10)


class TestDeltaThetaFor:
    @pytest.mark.parametrize(
        "tag,expected,tol",
        [
            ("VTV", 45.33318, 5e-5),
            ("TTV", -45.33318, 5e-5),
            ("VTVTV", 1812.98, 5e-3),
            ("TTVTV", -1812.98, 5e-3),
            ("TTTTV", 5933.72, 5e-3),
            ("VTTTV", -5933.72, 5e-3),
        ],
    )
    def test_standard_orbit(self, tag, expected, tol):
        assert delta_theta_for(tag, 1.0, 0.9) == pytest.approx(expected, abs=tol)

    def test_ttv_circular(self):
        assert delta_theta_for("TTV", 2.0, 0.0) == pytest.approx(-4.71238898038469, rel=1e-13)

    @pytest.mark.parametrize("order_pair", [("TTV", "VTV"), ("TTVTV", "VTVTV"), ("TTTTV", "VTTTV")])
    def test_pairwise_negation(self, order_pair):
        rng = np.random.default_rng(2024)
        t, v = order_pair
        for _ in range(20):
            semi_latus = rng.uniform(0.3, 4.0)
            e = rng.uniform(0.0, 0.95)
            a, b = delta_theta_for(t, semi_latus, e), delta_theta_for(v, semi_latus, e)
            assert a + b == pytest.approx(0.0, abs=1e-10 * abs(b))


class TestPrediction:
    def _scaled(self, name, e=None):
        _, coeffs = named_scheme(name, e=e)
        return precession_prediction(coeffs, 1.0, 0.9)

    def test_vv(self):
        pred = self._scaled("VV")
        assert pred.second_order() == pytest.approx(-1.8888, abs=1e-4)
        assert pred.second_order() == pytest.approx(delta_theta_for("TTV", 1, 0.9) / 24, rel=1e-13)

    def test_forest_ruth(self):
        pred = self._scaled("FR")
        assert pred.fourth_order() == pytest.approx(-10.8987, abs=5e-4)
        contrib = pred.contributions()
        ttttv = contrib[ErrorHamiltonianId.TTTTV] + contrib[ErrorHamiltonianId.VTTTV]
        assert ttttv == pytest.approx(49.0593, abs=5e-3)

    def test_algorithm_c(self):
        assert self._scaled("C").fourth_order() == pytest.approx(0.003570, abs=5e-6)

    def test_cprime(self):
        assert self._scaled("CPRIME").fourth_order() == pytest.approx(-0.1144622, abs=5e-7)

    def test_tailored_vanishes(self):
        assert self._scaled("TAILORED", e=0.9).fourth_order() == pytest.approx(0.0, abs=1e-9)

    @pytest.mark.parametrize("name", ["TI", "NF", "4S"])
    def test_paired_correctors_vanish(self, name):
        pred = self._scaled(name)
        assert pred.total(0.01) == pytest.approx(0.0, abs=1e-15)

    def test_paired_coefficients(self):
        coeffs = ErrorCoefficients(e_TTV=0.3, e_VTV=0.3, e_TTTTV=-2.0, e_VTTTV=-2.0, e_TTVTV=5, e_VTVTV=5)
        assert predict_algorithm_precession(coeffs, 0.1, 1.4, 0.6) == pytest.approx(0.0, abs=1e-12)

    def test_total_combines_orders(self):
        coeffs = ErrorCoefficients(e_TTV=1.0, e_VTTTV=1.0)
        total = predict_algorithm_precession(coeffs, 0.1, 1.0, 0.9)
        expected = 0.01 * delta_theta_for("TTV", 1, 0.9) + 1e-4 * delta_theta_for("VTTTV", 1, 0.9)
        assert total == pytest.approx(expected, rel=1e-14)
