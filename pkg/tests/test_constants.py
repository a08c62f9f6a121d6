"""Certified constants, critical rates, and the numerical condition checker."""

import math

import numpy as np
import pytest

from flowlab.models import (
    CertifiedConstants, InvalidRadiusError, beta0, beta_star_lower,
    beta_star_upper, check_conditions, gamma0, get_model, make_mult1d,
    make_ou1d, make_radial2d,
)


class TestBeta0:
    def test_d1_is_exactly_zero(self):
        assert beta0(CertifiedConstants(5, 3, 7), 1) == 0.0

    def test_hand_value_d2(self):
        # inner term 2+sqrt(3), and (1+sqrt(3))^2 = 2(2+sqrt(3))
        assert beta0(CertifiedConstants(1, 1, 1), 2) == pytest.approx(
            1 + math.sqrt(3), abs=1e-12)

    def test_zero_lambda_d2(self):
        assert beta0(CertifiedConstants(0, 1, 1), 2) == pytest.approx(2.0, abs=1e-12)

    def test_d1_zero_on_random_grid(self):
        rng = np.random.default_rng(7)
        for _ in range(100):
            c = CertifiedConstants(rng.uniform(0, 10), rng.uniform(0.01, 5),
                                   rng.uniform(0.01, 5))
            assert beta0(c, 1) == 0.0

    def test_monotone_in_each_parameter(self):
        rng = np.random.default_rng(11)
        for _ in range(50):
            lam, sl, sb = rng.uniform(0, 4), rng.uniform(0.1, 3), rng.uniform(0.1, 3)
            d = int(rng.integers(2, 6))
            base = beta0(CertifiedConstants(lam, sl, sb), d)
            assert beta0(CertifiedConstants(lam + 0.5, sl, sb), d) >= base
            assert beta0(CertifiedConstants(lam, sl + 0.5, sb), d) >= base
            assert beta0(CertifiedConstants(lam, sl, sb + 0.5), d) >= base

    def test_rejects_bad_dimension(self):
        with pytest.raises(ValueError):
            beta0(CertifiedConstants(1, 1, 1), 0)


class TestGamma0:
    def test_d1_reduces_to_lambda(self):
        assert gamma0(CertifiedConstants(4, 2, 1), 1) == 4.0

    def test_hand_value_d2(self):
        assert gamma0(CertifiedConstants(1, 1, 1), 2) == pytest.approx(
            2 + math.sqrt(3), abs=1e-12)

    def test_identity_with_beta0(self):
        # (d-1) Gamma_0 = beta0^2 / (2 sigma_B^2)
        rng = np.random.default_rng(3)
        for _ in range(100):
            c = CertifiedConstants(rng.uniform(0, 5), rng.uniform(0.1, 3),
                                   rng.uniform(0.1, 3))
            d = int(rng.integers(1, 6))
            lhs = (d - 1) * gamma0(c, d)
            rhs = beta0(c, d) ** 2 / (2 * c.sigma_B**2)
            assert lhs == pytest.approx(rhs, rel=1e-9, abs=1e-12)


class TestRadialRates:
    def test_inward_radial_profile(self):
        # radial component is constantly -3 beyond radius 1
        m = make_radial2d(beta=3.0, inward=True, sigma=1.0, sigma_w=1e-9)
        assert beta_star_upper(m, 2.0) == pytest.approx(-3.0 + 1.0 / 4.0, rel=1e-6)

    def test_d1_has_no_curvature_term(self):
        m = make_ou1d(beta=2.0)
        assert beta_star_upper(m, 5.0) == -2.0

    def test_outward_lower_rate(self):
        m = make_radial2d(beta=2.0, inward=False)
        assert beta_star_lower(m, 1.0) == 2.0

    def test_rejects_small_radius(self):
        m = make_ou1d()
        with pytest.raises(InvalidRadiusError):
            beta_star_upper(m, 0.5)
        with pytest.raises(InvalidRadiusError):
            beta_star_lower(m, 0.99)

    def test_mult1d_profiles_are_infinite_where_unbounded(self):
        m = make_mult1d(lam=1.0, sigma=1.0)
        assert beta_star_upper(m, 1.0) == math.inf
        assert beta_star_lower(m, 2.0) == 2.0
        mneg = make_mult1d(lam=-1.0, sigma=1.0)
        assert mneg.radial_lower(1.0) == -math.inf

    def test_profile_ordering_on_grid(self):
        for name in ("ou1d", "radial2d-in", "radial2d-out", "mult1d"):
            m = get_model(name)
            for r in (1.0, 2.0, 5.0, 25.0):
                assert m.radial_lower(r) <= m.radial_upper(r)


class TestConstantsValidation:
    def test_rejects_nonpositive(self):
        with pytest.raises(ValueError):
            CertifiedConstants(-1, 1, 1)
        with pytest.raises(ValueError):
            CertifiedConstants(0, 0, 1)
        with pytest.raises(ValueError):
            CertifiedConstants(0, 1, 0)

    def test_mult1d_unbounded_diffusion(self):
        m = make_mult1d()
        assert not m.diffusion_bounded
        assert get_model("radial2d-in").diffusion_bounded


class TestConditionChecker:
    @pytest.mark.parametrize("name", ["ou1d", "radial2d-in", "radial2d-out",
                                      "mult1d"])
    def test_builtins_pass_at_shipped_constants(self, name):
        m = get_model(name)
        assert check_conditions(m, sample_count=20000, box_radius=100.0,
                                seed=5) == []

    def test_catches_wrong_sigma_b(self):
        # certifying a finite sigma_B for the multiplicative model must fail
        m = make_mult1d()
        bad = CertifiedConstants(m.constants.lam, m.constants.sigma_L, 2.0)
        m2 = type(m)(name=m.name, dimension=m.dimension, drift=m.drift,
                     fields=m.fields, constants=bad,
                     radial_upper=m.radial_upper, radial_lower=m.radial_lower,
                     kernel_id=m.kernel_id, kernel_params=m.kernel_params)
        violations = check_conditions(m2, sample_count=2000, box_radius=10.0,
                                      seed=1)
        assert violations
        assert all(v.kind == "diffusion-bound" for v in violations)

    def test_catches_wrong_sigma_l(self):
        m = get_model("radial2d-in")
        bad = CertifiedConstants(m.constants.lam, m.constants.sigma_L / 10,
                                 m.constants.sigma_B)
        m2 = type(m)(name=m.name, dimension=m.dimension, drift=m.drift,
                     fields=m.fields, constants=bad,
                     radial_upper=m.radial_upper, radial_lower=m.radial_lower,
                     kernel_id=m.kernel_id, kernel_params=m.kernel_params)
        kinds = {v.kind for v in check_conditions(m2, sample_count=5000,
                                                  box_radius=50.0, seed=2)}
        assert "two-point-lipschitz" in kinds

    def test_constant_field_has_zero_two_point_variation(self):
        # A(x,y) = 0 for the constant-field model, any sigma_L certifies it
        m = make_ou1d(beta=0.0, sigma=2.0, sigma_L=1e-6)
        assert check_conditions(m, sample_count=3000, seed=3) == []


def test_model_registry_names():
    for name in ("ou1d", "radial2d-in", "radial2d-out", "mult1d"):
        assert get_model(name).name == name
    with pytest.raises(ValueError, match="unknown model"):
        get_model("nope")
