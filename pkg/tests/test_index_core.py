import math

import pytest

from agcal import rates
from agcal.index_core import (EXACT, FAILS, HOLDS, HALF_OPEN, INCONCLUSIVE, NATURALS, NUMERIC, Compare,
                              GridConfig, Net, Verdict, big_o, conjunction, eventually, limit_of, order_gt,
                              using_grid)


class TestEventually:
    def test_threshold_predicate(self):
        v = eventually(HALF_OPEN, lambda e: e < 0.5)
        assert v.status == HOLDS
        assert v.witness[1] == pytest.approx(0.5, rel=1e-9)

    def test_oscillating_predicate_fails_with_counterexamples(self):
        v = eventually(HALF_OPEN, lambda e: math.sin(1 / e) > 0)
        assert v.status == FAILS
        assert v.counterexample and all(math.sin(1 / e) <= 0 for e in v.counterexample)

    def test_constant_true(self):
        v = eventually(HALF_OPEN, lambda e: True)
        assert v.status == HOLDS and v.witness[1] == 1.0

    def test_zero_budget_rejected(self):
        with pytest.raises(ValueError):
            eventually(HALF_OPEN, lambda e: True, budget=0)

    def test_symbolic_compare_is_exact(self):
        v = eventually(HALF_OPEN, Compare(rates.parse("1/eps"), ">", rates.parse("7")))
        assert v.status == HOLDS and v.mode == EXACT

    def test_naturals_probe_points_are_reciprocals(self):
        pts = NATURALS.points(GridConfig(n=10))
        assert all(abs(1 / p - round(1 / p)) < 1e-9 for p in pts)


class TestBigO:
    def test_power_pair_exact_with_witness(self):
        v = big_o("eps^-2", "eps^-3")
        assert (v.status, v.mode) == (HOLDS, EXACT)
        assert v.witness == (1.0, 1.0)

    def test_exponential_beats_powers(self):
        v = big_o("exp(1/eps)", "eps^-9")
        assert (v.status, v.mode) == (FAILS, EXACT)

    def test_sampled_against_symbolic(self):
        pts = GridConfig().points()
        x = Net.sampled([(e, 3 / e + e ** -0.5) for e in pts])
        v = big_o(x, "eps^-1")
        assert (v.status, v.mode) == (HOLDS, NUMERIC)
        # sup of 3 + sqrt(eps) over the grid is 3 + sqrt(0.1)
        assert 3.0 <= v.witness[0] <= 4.5

    def test_index_set_mismatch(self):
        with pytest.raises(ValueError):
            big_o(Net.symbolic("eps", HALF_OPEN), Net.symbolic("eps", NATURALS))


class TestOrder:
    def test_infinite_beats_constant(self):
        assert order_gt("1/eps", 7).status == HOLDS

    def test_irreflexive(self):
        assert order_gt("eps^2 + 1", "eps^2 + 1").status == FAILS

    def test_oscillating_difference_is_inconclusive(self):
        i = Net.callable(lambda e: 1 / e + math.sin(1 / e))
        v = order_gt(i, "1/eps")
        assert v.status == INCONCLUSIVE and v.mode == NUMERIC


class TestLimits:
    def test_finite(self):
        L = limit_of("eps^2 + 3")
        assert L.kind == "Finite" and L.value == 3

    def test_plus_infinity(self):
        assert limit_of("exp(1/eps)").kind == "PlusInf"

    def test_alternating_sign_diverging(self):
        f = Net.callable(lambda e: (-1) ** math.floor(1 / e) / e)
        assert limit_of(f).kind == "UnsignedInf"


class TestVerdicts:
    def test_conjunction_propagates_inconclusive(self):
        a = Verdict(HOLDS, EXACT)
        b = Verdict(INCONCLUSIVE, NUMERIC, confidence=0.3)
        assert conjunction([a, b]).status == INCONCLUSIVE
        assert conjunction([a, b, Verdict(FAILS, EXACT)]).status == FAILS
        assert conjunction([a, a]).status == HOLDS

    def test_numeric_confidence_range(self):
        with pytest.raises(ValueError):
            Verdict(HOLDS, NUMERIC, confidence=1.5)

    def test_bool_misuse_guard(self):
        with pytest.raises(TypeError):
            bool(Verdict(HOLDS))


def test_grid_override_is_scoped():
    cfg = GridConfig(0.05, 0.5, 12)
    with using_grid(cfg):
        assert Net.symbolic("eps").points() == cfg.points()
    assert Net.symbolic("eps").points() == GridConfig().points()


def test_log_callable_evaluates_without_overflow():
    n = Net.log_callable(lambda e: 1e4 / e)
    assert n.log_abs(0.01) == pytest.approx(1e6)
    assert big_o(n, "exp(eps^-2)").status == HOLDS
