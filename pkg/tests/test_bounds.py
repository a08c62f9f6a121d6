"""Closed-form tail bounds: hand values, identities, and fuzzed invariants."""

import math

import numpy as np
import pytest

from flowlab import bounds as bd
from flowlab.models import CertifiedConstants


class TestElementaryTails:
    def test_at_zero_threshold(self):
        assert bd.gaussian_tail(0, 1).raw == 0.5
        assert bd.running_max_tail(0, 1).raw == 1.0

    def test_hand_values(self):
        assert bd.running_max_tail(1, 1).raw == pytest.approx(math.exp(-0.5))
        # scale invariance c^2/t
        assert bd.running_max_tail(2, 4).raw == pytest.approx(math.exp(-0.5))

    def test_reflection_and_drifted_sup_agree_at_zero_drift(self):
        for c in (0.3, 1.0, 2.5):
            assert bd.drifted_sup_tail(c, 0.0, 1.0) == pytest.approx(
                bd.reflection_tail(c, 1.0), rel=1e-12)

    def test_drifted_sup_vacuous_below_zero(self):
        assert bd.drifted_sup_tail(-1.0, 0.5, 2.0) == 1.0


class TestOnePointBounds:
    def test_escape_hand_values(self):
        assert bd.escape_upper(10, 20, 5, 1, 1, 0).raw == pytest.approx(math.exp(-50))
        assert bd.escape_upper(10, 20, 5, 1, 1, 5).raw == pytest.approx(math.exp(-12.5))

    def test_escape_vacuous_when_drift_covers_gap(self):
        # S <= R + beta*.T, positive part vanishes
        assert bd.escape_upper(10, 11, 5, 1, 1, 2).raw == 1.0

    def test_return_hand_values(self):
        assert bd.return_upper(10, 20, 5, 100, 1, 1).raw == pytest.approx(math.exp(-60.5))
        assert bd.return_upper(10, 20, 5, 1, 1, 0).raw == pytest.approx(math.exp(-50))

    def test_return_vacuous(self):
        assert bd.return_upper(10, 20, 5, 1, 1, -11).raw == 1.0

    def test_escape_return_swap_symmetry(self):
        # the return bound is the escape bound with the start/target roles
        # interchanged, which in formula slots means the same (R, S) and a
        # negated radial rate: return(R, S, beta) == escape(R, S, -beta)
        rng = np.random.default_rng(17)
        for _ in range(200):
            r_bar = rng.uniform(1, 3)
            R = r_bar + rng.uniform(0.1, 10)
            S = r_bar + rng.uniform(0.1, 10)
            T = rng.uniform(0.1, 20)
            sb = rng.uniform(0.2, 3)
            beta = rng.uniform(-5, 5)
            a = bd.return_upper(R, S, r_bar, T, sb, beta).raw
            b = bd.escape_upper(R, S, r_bar, T, sb, -beta).raw
            assert a == pytest.approx(b, rel=1e-12)

    def test_hypothesis_violations(self):
        with pytest.raises(bd.HypothesisViolationError):
            bd.escape_upper(10, 20, 0.5, 1, 1, 0)      # r_bar < 1
        with pytest.raises(bd.HypothesisViolationError):
            bd.escape_upper(2, 20, 5, 1, 1, 0)         # R <= r_bar
        with pytest.raises(bd.HypothesisViolationError):
            bd.return_upper(10, 3, 5, 1, 1, 0)         # S <= r_bar

    def test_dip_values(self):
        assert bd.dip_bound(6, 5, 1, 1).raw == pytest.approx(math.exp(-2))
        assert bd.dip_bound(5.0001, 5, 1, 1).raw == pytest.approx(1.0, rel=1e-3)
        assert bd.dip_bound(6, 5, 1, 0).raw == 1.0     # reduction to beta_* > 0
        assert bd.dip_bound(6, 5, 1, -2).raw == 1.0
        with pytest.raises(bd.HypothesisViolationError):
            bd.dip_bound(5, 5, 1, 1)

    def test_crossing_values(self):
        assert bd.crossing_bound(10, 10, 1, 1).raw == 2.0
        assert bd.crossing_bound(10, 10, 1, 1).capped == 1.0
        assert bd.crossing_bound(0, 4, 1, 1).raw == pytest.approx(2 * math.exp(-2))
        assert bd.crossing_bound(0, 2, 1, 1).raw == pytest.approx(2 * math.exp(-0.5))
        with pytest.raises(bd.HypothesisViolationError):
            bd.crossing_bound(5, 4, 1, 1)

    def test_excursion_values(self):
        assert bd.excursion_bound(1e-12, 1, 1).raw == pytest.approx(3.0)
        assert bd.excursion_bound(4, 1, 1).raw == pytest.approx(3 * math.exp(-2))
        assert bd.excursion_bound(1, 1e-2, 1).raw == pytest.approx(3 * math.exp(-12.5))


class TestTwoPointTail:
    def test_zero_separation(self):
        exact, tb = bd.two_point_tail(0.0, 1.0, 1.0, 1.0, 0.0)
        assert exact == 0.0 and tb.raw == 0.0

    def test_hand_value(self):
        exact, tb = bd.two_point_tail(1.0, math.e, 1.0, 1.0, 0.0)
        assert exact == pytest.approx(0.31731050786, rel=1e-9)
        assert tb.raw == pytest.approx(math.exp(-0.5))

    def test_vacuous_when_threshold_below_drifted_separation(self):
        exact, tb = bd.two_point_tail(1.0, 1.0, 1.0, 1.0, 0.5)
        assert exact == 1.0 and tb.raw == 1.0

    def test_exact_below_bound(self):
        rng = np.random.default_rng(4)
        for _ in range(100):
            sep = rng.uniform(0.01, 2)
            u = sep * rng.uniform(1.01, 50)
            exact, tb = bd.two_point_tail(sep, u, rng.uniform(0.1, 10),
                                          rng.uniform(0.1, 3), rng.uniform(0, 2))
            assert exact <= tb.capped + 1e-12


class TestKolmogorovAndBall:
    def test_hand_value(self):
        tb = bd.kolmogorov_tail(2, 1, 1, 0.25, 1, 1)
        factor1 = (2 / (1 - 2**-0.25)) ** 2
        moment = 2**-0.5 / (1 - 2**-0.5)
        assert tb.raw == pytest.approx(factor1 * moment, rel=1e-12)
        assert tb.raw == pytest.approx(381.5, rel=1e-3)
        assert tb.capped == 1.0

    def test_moment_factor_exposed(self):
        m = bd.kolmogorov_moment(2, 1, 1, 0.25, 1)
        assert m == pytest.approx(2**-0.5 / (1 - 2**-0.5), rel=1e-12)
        tb = bd.kolmogorov_tail(2, 1, 1, 0.25, 1, 1)
        assert tb.inputs["moment_factor"] == pytest.approx(m)

    def test_decay_in_u(self):
        big = bd.kolmogorov_tail(2, 1, 1, 0.25, 1, 1e6).raw
        assert big == pytest.approx(381.48349 / 1e12, rel=1e-4)

    def test_kappa_out_of_range(self):
        with pytest.raises(bd.KappaOutOfRangeError):
            bd.kolmogorov_tail(2, 1, 1, 0.5, 1, 1)     # kappa = b/a exactly
        with pytest.raises(bd.KappaOutOfRangeError):
            bd.kolmogorov_tail(2, 1, 1, -0.1, 1, 1)

    def test_ball_equals_kolmogorov_substitution(self):
        # a=q, b=q-d, c = c_bar^q exp((Lambda+q sigma^2/2) q T) xi^q
        rng = np.random.default_rng(12)
        for _ in range(50):
            d = int(rng.integers(1, 4))
            q = d + rng.uniform(0.5, 5)
            kappa = rng.uniform(0.05, 0.95) * (1 - d / q)
            xi, T, u = rng.uniform(0.1, 2), rng.uniform(0, 3), rng.uniform(0.1, 5)
            cb, Lam, sig = rng.uniform(0.5, 3), rng.uniform(0, 1), rng.uniform(0.1, 1)
            ball = bd.ball_diameter_bound(xi, T, u, q, kappa, cb, Lam, sig, d)
            c = cb**q * math.exp((Lam + 0.5 * q * sig**2) * q * T) * xi**q
            kol = bd.kolmogorov_tail(q, q - d, c, kappa, d, u)
            assert ball.raw == pytest.approx(kol.raw, rel=1e-9)

    def test_ball_scaling_in_xi(self):
        a = bd.ball_diameter_bound(2.0, 1, 1, 3, 0.2, 2, 0, 1, 1)
        b = bd.ball_diameter_bound(1.0, 1, 1, 3, 0.2, 2, 0, 1, 1)
        assert a.raw / b.raw == pytest.approx(2.0**3, rel=1e-9)

    def test_q_too_small(self):
        with pytest.raises(bd.QTooSmallError):
            bd.ball_diameter_bound(1, 1, 1, 2, 0.1, 2, 0, 1, 2)


class TestBallOpt:
    def test_minimum_beats_reference_grid_point(self):
        xi, T, u, cb, Lam, sig, d = 0.5, 2.0, 1.0, 2.0, 0.1, 0.5, 2
        tb, q, kappa = bd.ball_diameter_bound_opt(xi, T, u, cb, Lam, sig, d)
        ref = bd.ball_diameter_bound(xi, T, u, d + 1, (1 - d / (d + 1)) / 2,
                                     cb, Lam, sig, d)
        assert tb.log_raw <= ref.log_raw + 1e-12

    def test_monotone_in_u(self):
        a = bd.ball_diameter_bound_opt(0.5, 1.0, 1.0, 2.0, 0.0, 1.0, 1)[0]
        b = bd.ball_diameter_bound_opt(0.5, 1.0, 2.0, 2.0, 0.0, 1.0, 1)[0]
        assert b.log_raw <= a.log_raw + 1e-12

    def test_rate_approaches_I(self):
        # -(1/T) log bound -> I(gamma) through T = 10, 20, 40 within 15%
        Lam, sig, d, gam = 0.0, 1.0, 1, 3.0
        target = bd.rate_I(gam, Lam, sig, d)
        prev = -math.inf
        for T in (10.0, 20.0, 40.0):
            tb, _, _ = bd.ball_diameter_bound_opt(math.exp(-gam * T), T, 1.0,
                                                  1.0, Lam, sig, d)
            rate = -tb.log_raw / T
            assert abs(rate - target) / target <= 0.15
            assert rate >= prev    # monotone approach from below
            prev = rate


class TestRateI:
    def test_branch_values(self):
        assert bd.rate_I(3, 0, 1, 1) == 4.5
        assert bd.rate_I(2, 0, 1, 2) == 2.0           # both branches give 2
        assert bd.rate_I(1.0, 0, 1, 2) == 0.0         # third branch boundary

    def test_continuity_at_branch_points(self):
        rng = np.random.default_rng(23)
        for _ in range(100):
            Lam = rng.uniform(0, 3)
            sig = rng.uniform(0.1, 2)
            d = int(rng.integers(1, 6))
            g1 = Lam + 0.5 * sig**2 * d
            g2 = Lam + sig**2 * d
            for g in (g1, g2):
                lo = bd.rate_I(g * (1 - 1e-13) - 1e-15, Lam, sig, d)
                hi = bd.rate_I(g * (1 + 1e-13) + 1e-15, Lam, sig, d)
                assert abs(hi - lo) <= 1e-9 * max(1.0, abs(hi))

    def test_one_to_one_substitution(self):
        # d -> d-1: in dimension 1 the quadratic branch starts at Lambda
        assert bd.rate_I(0.5, 0, 1, 1, one_to_one=True) == pytest.approx(0.125)
        assert bd.rate_I(0.5, 0, 1, 1, one_to_one=False) == 0.0


class TestChainingBound:
    def test_zero_tail(self):
        res = bd.chaining_bound(lambda gap, v: 0.0, [2**-j for j in range(1, 9)],
                                1.0, 4.0, 8)
        assert res.bound.raw == 0.0 and not res.truncated

    def test_all_one_tail_capped_with_flag(self):
        res = bd.chaining_bound(lambda gap, v: 1.0, [2**-j for j in range(1, 11)],
                                1.0, 4.0, 10)
        assert res.bound.raw == pytest.approx(2**10 - 1)
        assert res.bound.capped == 1.0
        assert res.truncated

    def test_weight_violation(self):
        with pytest.raises(bd.WeightViolationError):
            bd.chaining_bound(lambda g, v: 0.0, [0.6, 0.6], 1.0, 1.0, 2)
        with pytest.raises(bd.WeightViolationError):
            bd.chaining_bound(lambda g, v: 0.0, [0.5, -0.1], 1.0, 1.0, 2)
        with pytest.raises(bd.WeightViolationError):
            bd.chaining_bound(lambda g, v: 0.0, [0.5], 1.0, 1.0, 2)

    def test_bad_tail_value(self):
        with pytest.raises(ValueError, match="outside"):
            bd.chaining_bound(lambda g, v: 1.5, [0.5], 1.0, 1.0, 1)


class TestRateCertificate:
    def test_d1_always_feasible(self):
        c = CertifiedConstants(1.0, 1.0, 1.0)
        rc = bd.rate_certificate(2.0, 0.5, 0.2, c, 1)
        assert rc.feasible
        assert rc.rate_A1 == pytest.approx(-(2.0 - 0.5) ** 2 / 2.0)
        assert rc.rate_A3 < 0
        assert rc.rate_A2 == -math.inf

    def test_shipped_instance(self):
        c = CertifiedConstants(1, 1, 1)
        rc = bd.rate_certificate(4.0, 1.0, 0.1, c, 2)
        assert rc.feasible and rc.rate_A1 < 0 and rc.rate_A3 < 0
        assert rc.Gamma > rc.gamma0

    def test_hypothesis_violation(self):
        c = CertifiedConstants(1, 1, 1)
        with pytest.raises(bd.HypothesisViolationError):
            bd.rate_certificate(3.0, 0.2, 0.1, c, 2)   # gamma+eps >= beta-beta0
        with pytest.raises(bd.HypothesisViolationError):
            bd.rate_certificate(4.0, 1.0, 0.7, c, 2)   # epsilon >= 1/2
        with pytest.raises(bd.HypothesisViolationError):
            bd.rate_certificate(4.0, 0.0, 0.1, c, 2)   # gamma <= 0


class TestSchedule:
    def test_two_steps_by_hand(self):
        s = bd.borel_cantelli_schedule(2.0, 1.0, 0.5, 3)
        S = [p[0] for p in s.pairs]
        assert S[0] == 2.0
        assert S[1] == pytest.approx(2 + math.sqrt(2), rel=1e-12)
        assert S[2] == pytest.approx(S[1] + math.sqrt(S[1]), rel=1e-12)
        assert s.pairs[0][1] == pytest.approx(math.sqrt(2))

    def test_tail_summability(self):
        s = bd.borel_cantelli_schedule(2.0, 1.0, 0.5, 400)
        tail = s.partial_sums[-1] - s.partial_sums[199]
        assert tail < 1e-6

    def test_validation(self):
        with pytest.raises(bd.HypothesisViolationError):
            bd.borel_cantelli_schedule(1.0, 1.0, 0.5, 3)
        with pytest.raises(bd.HypothesisViolationError):
            bd.borel_cantelli_schedule(2.0, 0.0, 0.5, 3)
        with pytest.raises(bd.HypothesisViolationError):
            bd.borel_cantelli_schedule(2.0, 1.0, 1.0, 3)


class TestTailBoundInvariants:
    def test_raw_nonnegative_capped_unit_interval(self):
        rng = np.random.default_rng(31)
        for _ in range(300):
            c, t = rng.uniform(0, 5), rng.uniform(0.01, 10)
            for tb in (bd.gaussian_tail(c, t), bd.running_max_tail(c, t),
                       bd.crossing_bound(1, 1 + c, t, rng.uniform(0.1, 2)),
                       bd.excursion_bound(c + 0.01, t, rng.uniform(0.1, 2))):
                assert tb.raw >= 0
                assert 0 <= tb.capped <= 1

    def test_negative_raw_rejected(self):
        with pytest.raises(ValueError):
            bd.TailBound("x", -0.1)
