import random

import numpy as np
from hypothesis import HealthCheck, given, settings, strategies as st

from agcal import rates
from agcal.functions import SIN, COS, GAUSS, SeparableSum, SumFamily, ScaledKernel, poly
from agcal.gauges import AG, AlgebraSpec, B_s, equivalent_gauges, is_moderate, is_negligible_num, parse_gauge
from agcal.index_core import HOLDS
from agcal.laws import random_net
from agcal.numbers import gn, gn_eq

SETTINGS = settings(max_examples=40, deadline=None, suppress_health_check=[HealthCheck.too_slow])
S_AG = AlgebraSpec.of(AG("1/eps"))

nets = st.integers(0, 10**6).map(lambda s: random_net(random.Random(s)))
powers = st.integers(-4, 4).map(lambda k: rates.parse(f"{k}*eps^-{abs(k) % 3 + 1} + 2"))
negligibles = st.integers(1, 3).map(lambda k: rates.parse(f"exp(-{k}/eps)"))
GAUGES = ["powers(1/eps)", "powers(eps^-2)", "powers_nat(1/eps)", "expof(powers(1/eps))", "tower(1/eps)",
          "powers(hyper(1))", "powers_nat(exp(1/eps))"]
gauges = st.sampled_from(GAUGES).map(parse_gauge)


class TestRing:
    @SETTINGS
    @given(powers, powers, powers)
    def test_axioms(self, a, b, c):
        x, y, z = gn(a, S_AG), gn(b, S_AG), gn(c, S_AG)
        assert gn_eq((x + y) + z, x + (y + z)).status == HOLDS
        assert gn_eq(x * y, y * x).status == HOLDS
        assert gn_eq(x * (y + z), x * y + x * z).status == HOLDS
        assert gn_eq(x - x, gn("0", S_AG)).status == HOLDS

    @SETTINGS
    @given(negligibles, powers)
    def test_negligible_ideal(self, n, m):
        a, b = gn(n, S_AG), gn(m, S_AG)
        zero = gn("0", S_AG)
        assert gn_eq(a, zero).status == HOLDS
        assert gn_eq(a * b, zero).status == HOLDS

    @SETTINGS
    @given(powers, powers, negligibles)
    def test_equality_is_equivalence(self, a, b, n):
        x, y = gn(a, S_AG), gn(b, S_AG)
        xn = gn(rates.Add(a, n), S_AG)
        assert gn_eq(x, x).status == HOLDS
        assert gn_eq(x, y).status == gn_eq(y, x).status
        assert gn_eq(x, xn).status == HOLDS and gn_eq(xn, x).status == HOLDS
        if gn_eq(x, y).status == HOLDS:
            assert gn_eq(xn, y).status == HOLDS


class TestRates:
    @SETTINGS
    @given(nets)
    def test_normalize_idempotent_through_print(self, e):
        nf = rates.normalize(e)
        assert rates.normalize(rates.parse(rates.pretty(e))) == nf

    @SETTINGS
    @given(nets, nets)
    def test_compare_total_and_antisymmetric(self, x, y):
        r = rates.compare_O(x, y)
        assert r in (rates.XBIGOY, rates.YBIGOX, rates.BOTH)
        flip = {rates.XBIGOY: rates.YBIGOX, rates.YBIGOX: rates.XBIGOY, rates.BOTH: rates.BOTH}
        assert rates.compare_O(y, x) == flip[r]

    @SETTINGS
    @given(nets, nets)
    def test_compare_matches_samples(self, x, y):
        r = rates.compare_O(x, y)
        if r == rates.BOTH:
            return
        big, small = (y, x) if r == rates.XBIGOY else (x, y)
        gaps = []
        for e in (1e-3, 1e-4, 1e-5):
            try:
                gaps.append(rates.log_abs_at(big, e) - rates.log_abs_at(small, e))
            except rates.RateError:
                return
        # the dominated side never overtakes without bound
        assert gaps[-1] >= gaps[0] - 1e-6 * (1 + abs(gaps[0]))


class TestGauges:
    @SETTINGS
    @given(gauges, gauges)
    def test_equivalence_reflexive_symmetric(self, a, b):
        assert equivalent_gauges(a, a).status == HOLDS
        assert equivalent_gauges(a, b).status == equivalent_gauges(b, a).status

    @SETTINGS
    @given(gauges)
    def test_closure_idempotent(self, g):
        c = g.closure()
        assert equivalent_gauges(c.closure(), c).status == HOLDS
        assert equivalent_gauges(c, g).status == HOLDS

    @SETTINGS
    @given(nets)
    def test_negligible_implies_moderate(self, x):
        if is_negligible_num(x, AG("1/eps")).status == HOLDS:
            assert is_moderate(x, B_s()).status == HOLDS

    @SETTINGS
    @given(negligibles, gauges)
    def test_negligible_moderate_everywhere(self, n, g):
        assert is_moderate(n, g).status == HOLDS


class TestSupNorm:
    @SETTINGS
    @given(st.sampled_from([SIN, COS, GAUSS, poly(1, -1, 2)]), st.sampled_from([SIN, GAUSS, poly(0, 3)]),
           st.integers(1, 3), st.floats(0.01, 0.1))
    def test_triangle_inequality(self, f, g, k, e):
        u = SeparableSum.of([(f"eps^-{k}", f)])
        v = ScaledKernel(g, "1/eps", "1", 0.0)
        K = (-1.0, 1.0)
        s = SumFamily((u, v)).sup_norm_net(K, 0).value(e)
        assert s <= u.sup_norm_net(K, 0).value(e) + v.sup_norm_net(K, 0).value(e) + 1e-9
        xs = np.linspace(*K, 401)
        assert s >= float(np.max(np.abs(u.value(e, xs) + v.value(e, xs)))) - 1e-9
