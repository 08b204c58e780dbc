import pytest

from agcal import rates
from agcal.gauges import (AG, AlgebraSpec, B_fin_exp, B_inf_exp, B_s, Gauge, GaugeError, algebra_order,
                          check_axioms, equivalent_gauges, exp_gauge, ideal_compatible, is_moderate,
                          is_negligible_num, parse_gauge, principal_generator, subsumed)
from agcal.index_core import EXACT, FAILS, HOLDS, big_o

Bs = B_s()
EBs = exp_gauge(Bs)


def all_hold(rep):
    return all(v.holds for v in rep.values()) and sorted(rep) == ["i", "ii", "iii", "iv", "v"]


class TestAxioms:
    @pytest.mark.parametrize("g", [Bs, AG("1/eps"), B_fin_exp(), B_inf_exp(), EBs],
                             ids=["Bs", "AG", "Bfin", "Binf", "eBs"])
    def test_named_gauges(self, g):
        assert all_hold(check_axioms(g))

    def test_singleton_fails_closure(self):
        rep = check_axioms(Gauge.gens(["1/eps"]))
        assert rep["iii"].status == FAILS
        assert rep["iii"].get("pair") == ["1/eps", "1/eps"]

    def test_validating_constructor_rejects(self):
        with pytest.raises(GaugeError):
            Gauge.gens(["1/eps"], validate=True)

    def test_base_must_diverge(self):
        with pytest.raises(GaugeError):
            Gauge.powers("eps")


class TestModerate:
    def test_log_times_power(self):
        v = is_moderate("eps^-7*log(1/eps)", Bs)
        assert v.status == HOLDS and v.mode == EXACT
        assert rates.compare_O(v.get("member"), "eps^-8") in ("XbigOofY", "Both")

    def test_exponential_not_power_moderate(self):
        assert is_moderate("exp(1/eps)", Bs).status == FAILS

    def test_exponential_gauge_member(self):
        v = is_moderate("exp(1/eps)*eps^-3", EBs)
        assert v.status == HOLDS
        assert big_o("exp(1/eps)*eps^-3", v.get("member")).holds

    def test_numeric_superpolynomial_trend(self):
        from agcal.index_core import Net
        import math

        v = is_moderate(Net.callable(lambda e: math.exp(1 / e)), Bs)
        assert v.status == FAILS


class TestNegligible:
    def test_exponential_decay(self):
        assert is_negligible_num("exp(-1/eps)", AG("1/eps")).status == HOLDS

    def test_finite_power(self):
        assert is_negligible_num("eps^10", AG("1/eps")).status == FAILS

    @pytest.mark.parametrize("m", [1, 5, 40])
    def test_powers_not_negligible_in_exponential_gauge(self, m):
        assert is_negligible_num(f"eps^{m}", EBs).status == FAILS
        assert big_o(f"eps^{m}", "exp(-eps^-2)").status == FAILS


class TestPrincipal:
    def test_power_family(self):
        g, _ = principal_generator(Bs)
        assert rates.pretty(g) == "eps^-1"
        g, _ = principal_generator(parse_gauge("powers(1/eps)"))
        assert rates.pretty(g) == "1/eps"

    def test_exponential_family_has_no_generator(self):
        g, cert = principal_generator(EBs)
        assert g is None and cert["verified"]
        assert rates.compare_O(cert["escaper"], "exp(eps^-2)") == "Both"

    def test_finite_generators(self):
        g, _ = principal_generator(Gauge.gens(["1/eps", "eps^-3"]))
        assert rates.pretty(g) == "eps^-3"


class TestRelations:
    def test_equivalent_triple(self):
        a, b, c = parse_gauge("powers(1/eps)"), parse_gauge("powers(eps^-2)"), parse_gauge("powers_nat(1/eps)")
        for x, y in ((a, b), (b, c), (a, c)):
            assert equivalent_gauges(x, y).status == HOLDS

    def test_not_equivalent_to_exponential(self):
        v = equivalent_gauges(Bs, EBs)
        assert v.status == FAILS and v.get("escaper")

    def test_ideal_compatibility(self):
        assert ideal_compatible(Bs, Bs).holds
        assert ideal_compatible(EBs, Bs).fails
        assert ideal_compatible(Bs, EBs).holds

    def test_member_dominates(self):
        assert rates.compare_O("exp(1/eps)*eps^-5", "exp(3*eps^-2)") == "XbigOofY"
        assert subsumed(Bs, EBs).holds

    def test_exponential_of_AG_union(self):
        e = exp_gauge(AG("1/eps"))
        for k in (1, 2, 5):
            assert is_moderate(f"exp(eps^-{k})", e).holds
            assert is_moderate(f"exp(eps^-{k})", AG(f"exp(eps^-{k})")).holds


class TestAlgebraOrder:
    def test_powers_below_exponential(self):
        assert algebra_order(AlgebraSpec.of(Bs), AlgebraSpec.of(EBs)).status == HOLDS

    def test_reflexive(self):
        s = AlgebraSpec.of(EBs)
        assert algebra_order(s, s).status == HOLDS

    def test_not_reversed(self):
        assert algebra_order(AlgebraSpec.of(EBs), AlgebraSpec.of(Bs)).status == FAILS

    def test_spec_requires_inclusion(self):
        with pytest.raises(GaugeError):
            AlgebraSpec(EBs, Bs)


class TestLiterals:
    def test_roundtrip(self):
        for text in ("powers(1/eps)", "powers_nat(exp(1/eps))", "tower(1/eps)", "expof(powers(1/eps))",
                     "gens[1/eps, eps^-3]"):
            assert parse_gauge(text).describe() == text

    def test_composition_with_scale(self):
        g = parse_gauge("comp(powers(1/eps), eps^2)")
        assert equivalent_gauges(g, Bs).holds

    @pytest.mark.parametrize("bad", ["powers(1/eps", "nonsense(1)", "powers(eps)", "gens[]"])
    def test_malformed(self, bad):
        with pytest.raises(GaugeError):
            parse_gauge(bad)
