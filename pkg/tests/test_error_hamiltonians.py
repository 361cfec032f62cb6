import math

import numpy as np
import pytest

from symprec.error_hamiltonians import (
    QUADRATIC_PARAMS,
    ErrorCoefficients,
    ErrorHamiltonianId,
    QuadraticFamilyParams,
    eom_fields,
    error_h_flow_derivatives,
    eval_error_h,
    flow_field,
    quadratic_eom,
    quartic_eom,
)
from symprec.errors import DomainError
from symprec.kepler import PhaseState

IDS = list(ErrorHamiltonianId)


def state(qx, qy, px, py):
    return PhaseState.from_components(qx, qy, px, py)


def random_bound_states(n, seed):
    rng = np.random.default_rng(seed)
    out = []
    while len(out) < n:
        r = rng.uniform(0.5, 5.0)
        phi = rng.uniform(-math.pi, math.pi)
        speed = rng.uniform(0.1, 0.95) * math.sqrt(2.0 / r)
        heading = rng.uniform(-math.pi, math.pi)
        out.append(
            state(
                r * math.cos(phi),
                r * math.sin(phi),
                speed * math.cos(heading),
                speed * math.sin(heading),
            )
        )
    return out


def fd_hamilton(tag, s, h=1e-6):
    """(dH/dp, -dH/dq) by central differences."""
    z = np.array(s.components())
    grad = np.zeros(4)
    for i in range(4):
        dz = np.zeros(4)
        dz[i] = h * max(1.0, abs(z[i]))
        plus = eval_error_h(tag, state(*(z + dz)))
        minus = eval_error_h(tag, state(*(z - dz)))
        grad[i] = (plus - minus) / (2 * dz[i])
    return grad[2:], -grad[:2]


class TestIds:
    def test_six_variants(self):
        assert len(IDS) == 6

    @pytest.mark.parametrize(
        "tag,order,partner",
        [("TTV", 2, "VTV"), ("TTVTV", 4, "VTVTV"), ("TTTTV", 4, "VTTTV")],
    )
    def test_order_and_partner(self, tag, order, partner):
        t = ErrorHamiltonianId(tag)
        assert t.order == order
        assert t.partner.value == partner
        assert t.partner.partner is t

    def test_quadratic_params(self):
        got = {t.value: (p.n, p.alpha, p.scale) for t, p in QUADRATIC_PARAMS.items()}
        assert got == {"TTV": (3, 3.0, 1.0), "TTVTV": (6, 6.0, 4.0), "VTTTV": (6, 3.0, 9.0)}


class TestEvalErrorH:
    @pytest.mark.parametrize(
        "tag,s,expected",
        [
            ("VTV", (10, 0, 0.3, -0.2), -1e-4),
            ("TTV", (1, 0, 0, 1), 1.0),
            ("TTV", (1, 0, 1, 0), -2.0),
            ("VTVTV", (2, 0, 0, 0), -0.03125),
        ],
    )
    def test_examples(self, tag, s, expected):
        assert eval_error_h(tag, state(*s)) == pytest.approx(expected, rel=1e-14)

    def test_quartic_contraction(self):
        # r = 2, p along r_hat: -9 * 2**-5 * (1 - 10 + 35/3)
        assert eval_error_h("TTTTV", state(2, 0, 1, 0)) == pytest.approx(-0.75, rel=1e-14)

    def test_unknown_tag(self):
        with pytest.raises(ValueError):
            eval_error_h("TVT", state(1, 0, 0, 1))


class TestQuadraticEom:
    def test_ttv_example(self):
        f = quadratic_eom(QuadraticFamilyParams(3, 3.0, 1.0), state(1, 0, 0, 1))
        assert (f.f, f.g, f.h) == pytest.approx((3.0, 6.0, 2.0), rel=1e-14)

    def test_zero_momentum_is_fixed_point_in_q(self):
        for tag, prm in QUADRATIC_PARAMS.items():
            qdot, _ = error_h_flow_derivatives(tag, state(1.5, -0.5, 0, 0))
            np.testing.assert_array_equal(qdot, 0.0)
            assert quadratic_eom(prm, state(1.5, -0.5, 0, 0)).f == 0.0

    def test_vtttv_against_gradient(self):
        s = state(1, 0, 0, 1)
        fields = quadratic_eom(QUADRATIC_PARAMS[ErrorHamiltonianId.VTTTV], s)
        assert fields.f == pytest.approx(54.0, rel=1e-14)
        _, pdot_fd = fd_hamilton("VTTTV", s)
        np.testing.assert_allclose(pdot_fd, (fields.f, 0.0), rtol=1e-7, atol=1e-7)


class TestQuarticEom:
    def test_unit_state(self):
        f = quartic_eom(state(1, 0, 0, 1))
        assert (f.f, f.g, f.h) == pytest.approx((-45.0, -180.0, -36.0), rel=1e-14)

    def test_radial_momentum(self):
        assert quartic_eom(state(2, 0, 1, 0)).f == pytest.approx(-5.625, rel=1e-14)

    def test_zero_momentum(self):
        f = quartic_eom(state(0.3, 1.1, 0, 0))
        assert f.f == 0.0 and f.g == 0.0


class TestFlowDerivatives:
    def test_vtv_unit_radius(self):
        qdot, pdot = error_h_flow_derivatives("VTV", state(1, 0, 0.2, 0.7))
        np.testing.assert_array_equal(qdot, 0.0)
        np.testing.assert_allclose(pdot, (-4.0, 0.0), rtol=1e-15)

    @pytest.mark.parametrize("tag", ["VTV", "VTVTV"])
    def test_central_terms_are_separable(self, tag):
        for s in random_bound_states(20, 3):
            f = eom_fields(tag, s)
            assert f.g == 0.0 and f.h == 0.0
            qdot, _ = error_h_flow_derivatives(tag, s)
            np.testing.assert_array_equal(qdot, 0.0)

    @pytest.mark.parametrize("tag", IDS)
    def test_origin(self, tag):
        with pytest.raises(DomainError):
            flow_field(ErrorHamiltonianId(tag), 0.0, 0.0, 1.0, 0.0)

    @pytest.mark.parametrize("tag", IDS)
    def test_gradient_consistency(self, tag):
        for s in random_bound_states(100, 11):
            qdot, pdot = error_h_flow_derivatives(tag, s)
            qdot_fd, pdot_fd = fd_hamilton(tag, s)
            scale = max(np.abs(np.concatenate([qdot, pdot])).max(), 1e-12)
            assert np.abs(qdot - qdot_fd).max() < 1e-6 * scale
            assert np.abs(pdot - pdot_fd).max() < 1e-6 * scale

    @pytest.mark.parametrize("tag", IDS)
    def test_angular_momentum_conserved(self, tag):
        for s in random_bound_states(100, 5):
            qdot, pdot = error_h_flow_derivatives(tag, s)
            q, p = s.q, s.p
            ldot = (q[0] * pdot[1] - q[1] * pdot[0]) + (qdot[0] * p[1] - qdot[1] * p[0])
            bound = 1e-12 * np.linalg.norm(q) * np.linalg.norm(p)
            mag = np.abs(np.concatenate([qdot, pdot])).max()
            assert abs(ldot) < bound * max(1.0, mag)


class TestErrorCoefficients:
    def test_defaults(self):
        c = ErrorCoefficients()
        assert (c.e_T, c.e_V) == (1.0, 1.0)
        assert c.is_paired(2) and c.is_paired(4)

    def test_pairing(self):
        c = ErrorCoefficients(e_TTV=1 / 12, e_VTV=1 / 24)
        assert not c.is_paired(2)
        assert c.is_paired(4)
        assert c.get("TTV") == 1 / 12

    def test_correction(self):
        c = ErrorCoefficients(e_VTV=2.0)
        s = state(10, 0, 0, 0.1)
        assert c.modified_hamiltonian_correction(s, 0.5) == pytest.approx(2.0 * 0.25 * -1e-4)
