import numpy as np
import pytest
from dataclasses import replace

from specquad.desitter import DeSitterParams, assemble_quadruple
from specquad.operators import interior_residual, op_norm
from specquad.reconstruct import (
    commutator_expansion,
    extract_adm,
    extract_mass_scale,
    massless_degeneracy_check,
    third_order_coefficient,
)


class TestExpansion:
    def test_low_orders_vanish(self, q_standard):
        exp = commutator_expansion(q_standard.ih, q_standard.u, q_standard.u, 3, 4)
        assert interior_residual(exp[0], 4) == 0.0
        assert interior_residual(exp[1], 4) <= 1e-10
        assert interior_residual(exp[2], 4) <= 1e-10
        assert interior_residual(exp[3], 4) > 0.1  # massive: third order lives

    def test_margin_guard(self, q_standard):
        with pytest.raises(ValueError):
            commutator_expansion(q_standard.ih, q_standard.u, q_standard.u, 5, 4)

    def test_order_scaling_under_generator_rescale(self, q_standard):
        # iH -> 2 iH multiplies term k by exactly 2^k
        exp1 = commutator_expansion(q_standard.ih, q_standard.u, q_standard.u, 3, 4)
        exp2 = commutator_expansion(2.0 * q_standard.ih, q_standard.u,
                                    q_standard.u, 3, 4)
        for k in (1, 2, 3):
            assert op_norm(exp2[k] - (2.0 ** k) * exp1[k]) <= 1e-12 * 2 ** k \
                * max(op_norm(exp1[k]), 1.0)


class TestMassScale:
    def test_roundtrip_standard(self, q_standard):
        assert extract_mass_scale(q_standard, 4) == pytest.approx(1.0, abs=1e-8)

    def test_roundtrip_across_parameters(self):
        for rm in (0.1, 0.7, 2.0, 4.0):
            for theta in (0.0, 0.6, 1.0):
                q = assemble_quadruple(DeSitterParams(rm=rm, theta=theta, nmax=20))
                assert extract_mass_scale(q, 4) == pytest.approx(rm, abs=1e-8)

    def test_theta_independence(self):
        qa = assemble_quadruple(DeSitterParams(rm=2.0, theta=1.0, nmax=20))
        assert extract_mass_scale(qa, 4) == pytest.approx(2.0, abs=1e-8)

    def test_massless_returns_zero(self, q_massless):
        assert extract_mass_scale(q_massless, 4) == 0.0

    def test_linearity_in_mass(self):
        theta = 0.4
        qa = assemble_quadruple(DeSitterParams(rm=0.8, theta=theta, nmax=20))
        qb = assemble_quadruple(DeSitterParams(rm=1.6, theta=theta, nmax=20))
        ka, _ = third_order_coefficient(qa, 4)
        kb, _ = third_order_coefficient(qb, 4)
        assert abs(kb - 2.0 * ka) <= 1e-8 * abs(ka)

    def test_measured_constant_matches_model(self, q_standard):
        # kappa = (2/3) rm / cosh^2 under the 1/k! convention
        kappa, fit = third_order_coefficient(q_standard, 4)
        assert fit <= 1e-12
        assert kappa == pytest.approx((2.0 / 3.0) / np.cosh(0.3) ** 2, rel=1e-10)

    def test_wrong_shape_rejected(self, q_standard):
        # replacing iH with a generator whose third order is not e_perp u^2
        bad = replace(q_standard, ih=q_standard.ih @ q_standard.ih @ q_standard.ih)
        with pytest.raises(ValueError):
            extract_mass_scale(bad, 4)

    def test_gauge_invariance(self):
        plain = assemble_quadruple(DeSitterParams(rm=1.3, theta=0.5, nmax=16))
        gauged = assemble_quadruple(
            DeSitterParams(rm=1.3, theta=0.5, nmax=16, rho=0.4, y=0.9))
        assert extract_mass_scale(gauged, 4) == pytest.approx(
            extract_mass_scale(plain, 4), abs=1e-10)

    def test_truncation_refinement_stability(self):
        vals = [extract_mass_scale(
            assemble_quadruple(DeSitterParams(rm=1.5, theta=0.7, nmax=nmax)),
            nmax // 4) for nmax in (16, 32)]
        assert abs(vals[0] - vals[1]) <= 1e-8


class TestAdm:
    def test_shift_vanishes(self, q_standard):
        adm = extract_adm(q_standard, margin=4)
        assert adm.shift <= 1e-10

    def test_lapse_mass(self, q_standard):
        adm = extract_adm(q_standard, margin=4)
        assert adm.lapse_mass == pytest.approx(1.0, abs=1e-8)

    def test_identity_element(self, q_standard):
        from specquad.operators import TruncatedOperator
        one = TruncatedOperator.identity(q_standard.basis)
        adm = extract_adm(q_standard, f=one, margin=4)
        assert adm.shift == 0.0 and adm.shape_residual == 0.0

    def test_shape_check(self, q_standard):
        adm = extract_adm(q_standard, margin=4)
        assert adm.shape_residual <= 1e-10

    def test_order_residuals_reported(self, q_standard):
        adm = extract_adm(q_standard, margin=4)
        assert len(adm.order_residuals) == 4
        assert adm.order_residuals[0] == 0.0


class TestMasslessDegeneracy:
    def test_all_orders_vanish(self, q_massless):
        assert massless_degeneracy_check(q_massless, kmax=5, margin=6) <= 1e-10

    def test_small_mass_control(self):
        q = assemble_quadruple(DeSitterParams(rm=1e-3, theta=0.0, nmax=32))
        # the third order is linear in the mass: ~ (2/3) * 1e-3
        assert massless_degeneracy_check(q, kmax=5, margin=6) > 1e-5

    def test_order_zero_trivial(self, q_massless):
        assert massless_degeneracy_check(q_massless, kmax=0, margin=2) == 0.0
