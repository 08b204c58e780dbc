import math
from fractions import Fraction

import numpy as np
import pytest
from scipy.integrate import quad

from agcal.embedding import (EmbeddingError, PreconditionError, build_mollifier, check_strict_delta,
                             compare_embeddings, dd, delta, delta_pairing, density, embed, l_m,
                             model_delta_net, necessity_certificate, sigma, strict_delta_net,
                             taylor_residual_slope)
from agcal.functions import BUMP, COS, GAUSS, SIN, gf_sub, is_negligible_fn, poly
from agcal.gauges import AG, B_s, exp_gauge
from agcal.index_core import FAILS, HOLDS

SQPI = math.sqrt(math.pi)
# sqrt(pi) * rho for M = 0, 2, 4, 6, solved symbolically by an independent route
ORACLE = {
    0: [Fraction(1)],
    2: [Fraction(3, 2), 0, Fraction(-1)],
    4: [Fraction(15, 8), 0, Fraction(-5, 2), 0, Fraction(1, 2)],
    6: [Fraction(35, 16), 0, Fraction(-35, 8), 0, Fraction(7, 4), 0, Fraction(-1, 6)],
}


class TestMollifier:
    @pytest.mark.parametrize("M", sorted(ORACLE))
    def test_exact_coefficients(self, M):
        rho = build_mollifier(M)
        want = ORACLE[M]
        got = list(rho.coeffs) + [0] * (len(want) - len(rho.coeffs))
        assert [Fraction(c) for c in got] == want

    @pytest.mark.parametrize("M", [2, 4, 6])
    def test_moments_by_quadrature(self, M):
        rho = build_mollifier(M)
        f = lambda x, k: float(rho(np.array([x]))[0]) * x ** k
        assert quad(f, -np.inf, np.inf, args=(0,), epsabs=1e-13)[0] == pytest.approx(1.0, abs=1e-10)
        for k in range(1, M + 1):
            assert abs(quad(f, -np.inf, np.inf, args=(k,), epsabs=1e-13)[0]) < 1e-10
            assert rho.moment(k) == 0

    def test_value_at_zero(self):
        assert build_mollifier(4).value_at_zero == pytest.approx(15 / 8 / SQPI, rel=1e-15)

    def test_positive_radius(self):
        assert build_mollifier(4).positive_radius() == pytest.approx(math.sqrt(5 / 2 - math.sqrt(10) / 2))

    def test_cap(self):
        with pytest.raises(EmbeddingError):
            build_mollifier(14)


class TestDeltaNet:
    def test_scaled_values(self):
        rho = build_mollifier(2)
        k = model_delta_net("1/eps", rho)
        x = np.array([0.0, 0.003, -0.01])
        assert np.allclose(k.value(0.01, x), 100 * rho(100 * x), rtol=1e-14)

    def test_requires_infinite_scale(self):
        with pytest.raises(Exception):
            model_delta_net("eps", build_mollifier(2))

    def test_pairing_with_cos_converges(self):
        r = delta_pairing(delta(0), COS, "1/eps", build_mollifier(2))
        errs = [row[2] for row in r["report"].table]
        assert errs[-1] < errs[0] and errs[-1] < 1e-6

    def test_pairing_derivative_delta(self):
        r = delta_pairing(dd(1, 0.0), SIN, "1/eps", build_mollifier(4))
        assert r["exact"] == pytest.approx(-1.0)

    def test_pairing_density(self):
        w = density(BUMP, (0.2, 0.4))
        want = quad(lambda t: math.exp(-1 / (1 - (10 * (t - 0.3)) ** 2)) * math.cos(t) if abs(10 * (t - 0.3)) < 1 else 0,
                    0.2, 0.4, epsabs=1e-14)[0]
        assert w.pairing(COS) == pytest.approx(want, rel=1e-10)


class TestEmbedding:
    def test_delta_at_origin(self):
        rho = build_mollifier(4)
        u = embed(delta(0), "1/eps", rho)
        assert u.value(0.02, np.array([0.0]))[0] == pytest.approx(50 * rho.value_at_zero, rel=1e-14)

    def test_linearity(self):
        rho = build_mollifier(4)
        a, b = delta(0.1), density(BUMP, (-0.3, 0.0))
        x = np.linspace(-0.5, 0.5, 21)
        lhs = embed(a + b, "1/eps", rho).value(0.05, x)
        rhs = embed(a, "1/eps", rho).value(0.05, x) + embed(b, "1/eps", rho).value(0.05, x)
        assert np.allclose(lhs, rhs, atol=1e-9)

    def test_agrees_with_constant_embedding(self):
        rho = build_mollifier(4)
        u = embed(density(GAUSS), "1/eps", rho)
        diff = gf_sub(u, sigma(GAUSS, u.spec))
        v = is_negligible_fn(diff, [(-1.0, 1.0)], alpha_max=1, mmax=4)
        assert v.status == HOLDS

    def test_density_support(self):
        u = embed(density(BUMP, (0.2, 0.4)), "1/eps", build_mollifier(4), (0.0, 1.0))
        from agcal.functions import support_estimate

        assert support_estimate(u, 0.05) == [(0.2, 0.4)]


class TestTaylor:
    def test_polynomial_residual_vanishes(self):
        rep = taylor_residual_slope(poly(1, -2, 0.5, 3, -1), "1/eps", build_mollifier(4))
        assert rep.max_residual < 1e-12

    def test_m2_sin_slope(self):
        # odd moment 3 vanishes by symmetry, so the leading error is order 4
        rep = taylor_residual_slope(SIN, "1/eps", build_mollifier(2))
        assert rep.slope >= 2.7
        assert rep.slope == pytest.approx(4.0, abs=0.15)

    @pytest.mark.parametrize("f", [SIN, GAUSS], ids=["sin", "gauss"])
    def test_m4_slope(self, f):
        rep = taylor_residual_slope(f, "1/eps", build_mollifier(4))
        assert rep.slope >= 4.5

    def test_direct_method_flags_noise_floor(self):
        rep = taylor_residual_slope(GAUSS, "1/eps", build_mollifier(4), method="direct")
        assert rep.noise_flag
        assert rep.slope >= 4.5

    def test_routes_agree_above_noise(self):
        rho = build_mollifier(4)
        a = taylor_residual_slope(SIN, "1/eps", rho, eps_range=(2e-2, 1e-1))
        b = taylor_residual_slope(SIN, "1/eps", rho, eps_range=(2e-2, 1e-1), method="direct")
        for (_, _, r1), (_, _, r2) in zip(a.table, b.table):
            assert r1 == pytest.approx(r2, rel=1e-4)

    def test_slope_record_carries_grid(self):
        rep = taylor_residual_slope(SIN, "1/eps", build_mollifier(4)).as_dict()
        assert rep["grid"]["eps0"] == 0.1 and rep["grid"]["r"] == 0.7 and rep["grid"]["count"] > 5


class TestStrictDelta:
    def test_properties(self):
        rep = strict_delta_net("1/eps", 8)
        chk = check_strict_delta(rep)
        assert chk["i_support"] and chk["ii_mass"] and chk["iii_selection"] and chk["iv_moments"]

    def test_l1_against_independent_values(self):
        rep = strict_delta_net("1/eps", 4)
        # 30-digit quadrature split at the polynomial roots
        assert rep.l1[0] == pytest.approx(1.0, abs=1e-12)
        assert rep.l1[2] == pytest.approx(1.24714298363554, abs=1e-12)
        assert rep.l1[4] == pytest.approx(1.39305632703040, abs=1e-12)
        assert rep.M_values[0] == pytest.approx(0.828568839869105, rel=1e-12)

    def test_l1_bound_only_for_low_orders(self):
        chk = check_strict_delta(strict_delta_net("1/eps", 8))
        meets = chk["v_meets_1_plus_1_over_m"]
        assert all(meets[m] for m in meets if m <= 3)
        assert not any(meets[m] for m in meets if m >= 4)

    def test_selection_rule(self):
        rep = strict_delta_net("1/eps", 8)
        for row in rep.rows:
            m = row["m"]
            if m is None:
                assert rep.M_values[0] > row["b"]
                continue
            assert rep.M_values[m] <= row["b"]
            if m < rep.mcap:
                assert rep.M_values[m + 1] > row["b"]

    def test_cap_range(self):
        with pytest.raises(EmbeddingError):
            strict_delta_net("1/eps", 9)


class TestComparison:
    def test_different_scales(self):
        v = compare_embeddings("1/eps", "2/eps", build_mollifier(4))
        assert v.status == FAILS and v.get("numeric") == FAILS

    def test_negligible_perturbation(self):
        v = compare_embeddings("1/eps", "1/eps + exp(-1/eps)", build_mollifier(4))
        assert v.status == HOLDS and v.get("numeric") == HOLDS

    def test_same(self):
        assert compare_embeddings("1/eps", "1/eps", build_mollifier(2)).status == HOLDS


class TestNecessity:
    L_ORACLE = {1: 0.0617894000813984620847, 2: 0.00858186112241645306732,
                3: 0.00146694044907401236079, 4: 0.000277344487018131257152}

    def test_l_m_values(self):
        rho = build_mollifier(4)
        for m, want in self.L_ORACLE.items():
            assert l_m(rho, m, 0.5) == pytest.approx(want, rel=1e-12)

    def test_exponential_gauge_refutes_agreement(self):
        cert = necessity_certificate("1/eps", exp_gauge(B_s()), [1, 2, 3, 4], build_mollifier(4),
                                     q=0.5, z="exp(eps^-2)")
        assert cert["L_positive"] and cert["L_decreasing"] and cert["lower_bound_holds"]
        assert not cert["generator"]
        assert all(s == FAILS for s in cert["b_pow_neg_m_is_O_inv_z"].values())
        assert cert["agreement"] == "agreement impossible"

    def test_generated_gauge(self):
        cert = necessity_certificate("1/eps", AG("1/eps"), [1, 2], build_mollifier(4))
        assert cert["generator"] and cert["escaper"] is None

    def test_geometry_checked(self):
        with pytest.raises(PreconditionError):
            necessity_certificate("1/eps", AG("1/eps"), [1], build_mollifier(4), q=0.99)
