import math

import numpy as np
import pytest
import scipy.linalg

from agcal.gauges import B_s, exp_gauge, parse_gauge
from agcal.index_core import FAILS, HOLDS
from agcal.ode import (ODEError, ODEProblem, entry_bound, expm, expm_scaled, minimality_check, solve_linear,
                       uniqueness_residual, verify_moderate_expB)

Bs = B_s()
EBs = exp_gauge(Bs)


class TestExpm:
    @pytest.mark.parametrize("seed", range(6))
    def test_against_library(self, seed):
        rng = np.random.default_rng(seed)
        d = 1 + seed % 4
        X = rng.uniform(-3, 3, (d, d))
        assert np.allclose(expm(X), scipy.linalg.expm(X), rtol=1e-12, atol=1e-13)

    def test_zero(self):
        assert np.array_equal(expm(np.zeros((3, 3))), np.eye(3))

    def test_rotation(self):
        w = 2.5
        R = expm(np.array([[0.0, w], [-w, 0.0]]))
        assert np.allclose(R, [[math.cos(w), math.sin(w)], [-math.sin(w), math.cos(w)]], atol=1e-14)

    def test_scaled_avoids_overflow(self):
        Y, L = expm_scaled(np.array([[2000.0]]))
        assert L + math.log(abs(Y[0, 0])) == pytest.approx(2000.0, rel=1e-12)

    def test_extra_squarings_agree(self):
        X = np.array([[1.0, 2.0], [-0.5, 0.3]])
        assert np.allclose(expm(X), expm(X, extra=3), rtol=1e-12)


class TestEntryBound:
    def test_examples(self):
        A = np.array([[1.0, 0.0], [0.0, 1.0]])
        assert entry_bound(A, 0.5) == pytest.approx((math.e ** 1, 1 + (math.e - 1) / 2))
        assert entry_bound(np.zeros((2, 2)), 3.0) == (0.0, 1.0)
        assert entry_bound(np.array([[2.0]]), 0.5) == pytest.approx((2 * math.e, math.e))

    @pytest.mark.parametrize("seed", range(5))
    def test_bound_dominates(self, seed):
        rng = np.random.default_rng(100 + seed)
        d = rng.integers(1, 5)
        A = rng.uniform(-2, 2, (d, d))
        for t in np.linspace(-3, 3, 13):
            _, corr = entry_bound(A, t)
            assert np.max(np.abs(expm(-t * A))) <= corr * (1 + 1e-12)


class TestClosedForm:
    def test_scalar_decay(self):
        p = ODEProblem.of([["1/eps"]], ["1"], Bs)
        sol = solve_linear(p)
        for e in (0.1, 0.01, 1e-3):
            for t in (-1.0, -0.3, 0.5, 1.0):
                assert sol.log_abs(e, t, 0) == pytest.approx(-t / e, rel=1e-12, abs=1e-12)

    def test_zero_matrix_keeps_initial_value(self):
        p = ODEProblem.of([["0", "0"], ["0", "0"]], ["1/eps", "2"], Bs)
        sol = solve_linear(p)
        assert np.allclose(sol.state(0.01, 0.7), [100.0, 2.0])

    def test_rotation(self):
        p = ODEProblem.of([["0", "-1/eps"], ["1/eps", "0"]], ["1", "0"], Bs)
        sol = solve_linear(p)
        e, t = 0.05, 0.37
        w = 1 / e
        assert np.allclose(sol.state(e, t), [math.cos(w * t), -math.sin(w * t)], atol=1e-12)

    def test_residual_small(self):
        # x' + A x = 0, checked by centered differences
        p = ODEProblem.of([["1", "1/eps"], ["-1/eps", "2"]], ["1", "eps"], Bs)
        sol = solve_linear(p)
        h = 1e-6
        for e in (0.5, 0.2):
            A = p.A.at(e)
            for t in (-0.5, 0.0, 0.4):
                x = sol.state(e, t)
                dx = (sol.state(e, t + h) - sol.state(e, t - h)) / (2 * h)
                assert np.max(np.abs(dx + A @ x)) <= 1e-7 * max(1.0, np.max(np.abs(x)) / e)

    def test_two_runs_agree(self):
        p = ODEProblem.of([["1/eps"]], ["1"], Bs)
        a, b = solve_linear(p), solve_linear(p, extra=3)
        for e in (0.1, 0.01):
            assert a.log_abs(e, -0.8, 0) == pytest.approx(b.log_abs(e, -0.8, 0), abs=1e-9)

    def test_certificate_has_no_violations(self):
        p = ODEProblem.of([["0", "-1/eps"], ["1/eps", "0"]], ["1", "0"], Bs)
        assert solve_linear(p).certificate["bound_violations"] == []


class TestValidation:
    def test_unbounded_entry(self):
        with pytest.raises(Exception):
            ODEProblem.of([["exp(1/eps)"]], ["1"], Bs)

    def test_wrong_length(self):
        with pytest.raises(ODEError):
            ODEProblem.of([["1/eps"]], ["1", "2"], Bs)


class TestModerate:
    def test_exponential_gauge(self):
        sol = solve_linear(ODEProblem.of([["1/eps"]], ["1"], Bs))
        assert verify_moderate_expB(sol).status == HOLDS

    def test_power_gauge_too_small(self):
        sol = solve_linear(ODEProblem.of([["1/eps"]], ["1"], Bs))
        assert verify_moderate_expB(sol, Bs).status == FAILS

    def test_constant_solution_power_moderate(self):
        sol = solve_linear(ODEProblem.of([["0"]], ["1/eps"], Bs))
        assert verify_moderate_expB(sol, Bs).status == HOLDS


class TestUniqueness:
    def setup_method(self):
        self.p = ODEProblem.of([["1/eps"]], ["1"], Bs)

    def test_negligible_perturbations(self):
        v = uniqueness_residual(self.p, n=["exp(-exp(2/eps))"], v=["exp(-exp(2/eps))"])
        assert v.status == HOLDS

    def test_zero(self):
        assert uniqueness_residual(self.p).status == HOLDS

    def test_finite_perturbation(self):
        assert uniqueness_residual(self.p, v=["eps"]).status == FAILS


class TestMinimality:
    def test_exponential_gauge_is_enough(self):
        v = minimality_check(Bs, EBs)
        assert v.status == HOLDS and v.get("algebra_order") == HOLDS

    def test_power_gauge_is_not(self):
        v = minimality_check(Bs, Bs)
        assert v.status == FAILS and v.get("probe") == "eps^-1"

    def test_exponential_powers_of_one_generator(self):
        v = minimality_check(Bs, parse_gauge("powers_nat(exp(1/eps))"))
        assert v.status == FAILS and v.get("probe") == "eps^-2"
