import math
from fractions import Fraction

import pytest

from agcal import rates
from agcal.rates import (BOTH, XBIGOY, YBIGOX, Eps, Exp, IterExp, Num, Pow, compare_O, compose, eval_at,
                         limit_class, log_abs_at, normalize, parse, pretty)


class TestParse:
    def test_rational_exponents(self):
        e = parse("eps^(-3/2) * log(1/eps)^2")
        nf = normalize(e)
        assert nf.exponents == {"inv": Fraction(3, 2), "log": Fraction(2)}

    def test_iterated_exponential_atom(self):
        e = parse("exp@2(1/eps)")
        assert isinstance(e, IterExp) and e.k == 2

    def test_exp_of_infinitesimal_is_finite(self):
        assert limit_class(parse("exp(eps)")) == ("finite", 1.0)

    def test_syntax_error_reports_position(self):
        with pytest.raises(rates.RateSyntaxError) as ei:
            parse("eps^-2 * * eps")
        assert ei.value.position == 9

    def test_roundtrip_on_canonical_text(self):
        for text in ("eps^-2", "exp(1/eps) * eps^3", "log(1/eps)^2 + 1/eps", "exp@3(1/eps)", "hyper(1)"):
            assert pretty(parse(text)) == text


class TestNormalize:
    def test_sum_keeps_dominant_term(self):
        nf = normalize(parse("eps^-1 + eps^-2"))
        assert nf.exponents == {"inv": 2} and nf.sum_remainder

    def test_constant_factor_and_abs(self):
        nf = normalize(parse("5*abs(-eps^-1)"))
        assert nf.c == 5 and nf.sign == 1 and nf.exponents == {"inv": 1}

    def test_exp_factor(self):
        e = parse("exp(3/eps) * eps^-2")
        nf = normalize(e)
        assert nf.exponents == {"inv": 2, "e1": 3}
        # oracle: log(exp(3/e) e^-2), computed with 30-digit arithmetic
        assert log_abs_at(e, 1e-2) == pytest.approx(309.210340371976182736, rel=1e-12)
        assert log_abs_at(e, 1e-3) == pytest.approx(3013.81551055796427410, rel=1e-12)

    def test_idempotent(self):
        e = parse("3*exp(2/eps)*log(1/eps) - eps^-4")
        nf = normalize(e)
        assert normalize(e) == nf


class TestCompare:
    def test_powers(self):
        assert compare_O("eps^-2", "eps^-3") == XBIGOY

    def test_exponential_against_polynomially_corrected(self):
        x, y = parse("exp(2/eps)"), parse("exp(1/eps)*eps^-5")
        assert compare_O(x, y) == YBIGOX
        for e in (0.05, 0.01, 0.002):
            assert log_abs_at(x, e) > log_abs_at(y, e)

    def test_constant_multiple(self):
        assert compare_O("7*eps^-1", "eps^-1") == BOTH


class TestCompose:
    def test_power_substitution(self):
        assert normalize(compose("eps^-1", "eps^2")) == normalize(parse("eps^-2"))

    def test_exponential_substitution(self):
        assert normalize(compose("exp(1/eps)", "eps^3")) == normalize(parse("exp(eps^-3)"))

    def test_callable_scale(self):
        from agcal.index_core import Net, big_o

        f = compose("eps^-1", lambda e: e * (2 + math.sin(1 / e)))
        assert callable(f)
        assert big_o(Net.callable(f), "eps^-1").status == "Holds"

    def test_scale_must_be_infinitesimal(self):
        with pytest.raises(rates.PreconditionError):
            compose("eps^-1", "1 + eps")


class TestEval:
    def test_power(self):
        assert eval_at("eps^-2", 0.1) == pytest.approx(100.0, rel=1e-14)

    def test_iterated_exponential(self):
        assert eval_at("exp@2(1/eps)", 0.5) == pytest.approx(1618.17799191265350166869, rel=1e-12)

    def test_boundary_excluded(self):
        with pytest.raises(rates.RateArgumentError):
            eval_at("eps^-1", 0.0)

    def test_overflow_is_signalled(self):
        with pytest.raises(rates.RateOverflow):
            eval_at("exp(1/eps)", 1e-4)

    def test_log_abs_does_not_overflow(self):
        assert log_abs_at("exp(1/eps)", 1e-4) == pytest.approx(1e4)

    def test_exception_message_names_expression(self):
        with pytest.raises(rates.RateOverflow, match=r"exp\(1/eps\)"):
            eval_at("exp(1/eps)", 1e-4)


def test_constructors_compose():
    e = Pow(Exp(Pow(Eps(), Fraction(-1))), Fraction(2))
    assert compare_O(e, parse("exp(2/eps)")) == BOTH
    assert compare_O(Num(Fraction(3)), parse("1")) == BOTH
