"""Mollifiers, the model delta-net embedding and related certificates."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Optional, Sequence, Union

import numpy as np
from numpy.polynomial import polynomial as P

from . import rates
from .functions import (
    BUMP,
    BlackBox,
    Family,
    GenFunction,
    Profile,
    ScaledKernel,
    SeparableSum,
    SumFamily,
    _const,
)
from .gauges import AG, AlgebraSpec, Gauge, is_moderate, is_negligible_num, subsumed
from .index_core import (
    FAILS,
    HOLDS,
    GridConfig,
    Net,
    Verdict,
    big_o,
    grid_config,
)
from .rates import Mul, Num, Pow, RateExpr

SQRT_PI = math.sqrt(math.pi)
TAIL = 12.0  # |t| cut for gaussian-weighted integrals; exp(-144) is far below 1e-10


class EmbeddingError(ValueError):
    pass


class PreconditionError(ValueError):
    pass


def _expr(x) -> RateExpr:
    if isinstance(x, RateExpr):
        return x
    if isinstance(x, Net) and x.is_symbolic:
        return x.expr
    return rates.parse(x) if isinstance(x, str) else Num(Fraction(x))


# ---------------------------------------------------------------------------
# Quadrature helpers


def _gl(n: int):
    return np.polynomial.legendre.leggauss(n)


def _gl_on(lo: float, hi: float, n: int = 64, panels: int = 1):
    """Composite Gauss-Legendre nodes and weights on [lo, hi]."""
    x, w = _gl(n)
    edges = np.linspace(lo, hi, panels + 1)
    xs, ws = [], []
    for a, b in zip(edges, edges[1:]):
        xs.append(0.5 * (b - a) * x + 0.5 * (a + b))
        ws.append(0.5 * (b - a) * w)
    return np.concatenate(xs), np.concatenate(ws)


_HERMITE = np.polynomial.hermite.hermgauss(90)
_SGRID = _gl_on(0.0, 1.0, 24)


def _double_factorial_ratio(n: int) -> Fraction:
    """(2n-1)!!/2^n, i.e. Gamma(n+1/2)/sqrt(pi)."""
    r = Fraction(1)
    for k in range(1, n + 1):
        r *= Fraction(2 * k - 1, 2)
    return r


# ---------------------------------------------------------------------------
# Mollifier


@dataclass(frozen=True)
class Mollifier:
    """rho(x) = p(x) exp(-x^2) with p even, unit mass and vanishing moments 1..M.

    ``coeffs`` are the rational coefficients of sqrt(pi)*p (ascending, even
    powers only), so every moment is an exact rational.
    """

    M: int
    coeffs: tuple
    condition: float

    @cached_property
    def profile(self) -> Profile:
        return Profile("gauss", tuple(float(c) / SQRT_PI for c in self.coeffs))

    def __call__(self, x):
        return self.profile(x)

    def moment(self, k: int) -> Fraction:
        """Exact int rho(x) x^k dx."""
        if k % 2:
            return Fraction(0)
        return sum((c * _double_factorial_ratio((j + k) // 2) for j, c in enumerate(self.coeffs) if c),
                   Fraction(0))

    @property
    def value_at_zero(self) -> float:
        return float(self.coeffs[0]) / SQRT_PI

    @cached_property
    def l1_norm(self) -> float:
        t, w = _gl_on(-TAIL, TAIL, 64, 24)
        return float(np.sum(w * np.abs(self(t))))

    def positive_radius(self) -> float:
        """Largest p with rho > 0 on (-p, p)."""
        roots = P.polyroots(np.array([float(c) for c in self.coeffs]))
        pos = [r.real for r in roots if abs(r.imag) < 1e-12 and r.real > 0]
        return min(pos) if pos else math.inf

    def describe(self) -> str:
        return f"mollifier({self.M})"


def build_mollifier(M: int) -> Mollifier:
    """Solve the even moment system sum_j d_j r_{i+j} = delta_{i0} exactly."""
    if not 0 <= M <= 12:
        raise EmbeddingError("moment order must lie in 0..12")
    J = M // 2 + 1
    r = [_double_factorial_ratio(n) for n in range(2 * J)]
    A = [[r[i + j] for j in range(J)] + [Fraction(int(i == 0))] for i in range(J)]
    cond = float(np.linalg.cond(np.array([[float(v) for v in row[:-1]] for row in A])))
    if cond > 1e14:
        raise EmbeddingError(f"moment system ill-conditioned (condition {cond:.3g})")
    # Gauss-Jordan in exact arithmetic
    for i in range(J):
        piv = next(k for k in range(i, J) if A[k][i] != 0)
        A[i], A[piv] = A[piv], A[i]
        pv = A[i][i]
        A[i] = [v / pv for v in A[i]]
        for k in range(J):
            if k != i and A[k][i] != 0:
                f = A[k][i]
                A[k] = [a - f * b for a, b in zip(A[k], A[i])]
    d = [A[i][J] for i in range(J)]
    coeffs = []
    for j in range(J):
        coeffs += [d[j], Fraction(0)]
    return Mollifier(M, tuple(coeffs[:-1]), cond)


# ---------------------------------------------------------------------------
# Compactly supported distributions


@dataclass(frozen=True)
class PointMass:
    """coef * d^alpha delta_a."""

    a: float
    alpha: int = 0
    coef: float = 1.0

    def support(self):
        return (self.a, self.a)


@dataclass(frozen=True)
class Density:
    """coef * d^alpha f where f = profile mapped onto [lo, hi].

    With ``support=None`` the profile is used as is (a smooth function on the
    line, not necessarily compactly supported).
    """

    profile: Profile
    support_: Optional[tuple] = None
    alpha: int = 0
    coef: float = 1.0

    @cached_property
    def f(self) -> Profile:
        p = self.profile
        if self.support_ is not None:
            lo, hi = self.support_
            p = Profile(p.kind, p.coeffs, p.upow, 2.0 / (hi - lo), 0.5 * (lo + hi))
        return p.deriv(self.alpha).scaled(self.coef)

    def support(self):
        if self.support_ is not None:
            return tuple(self.support_)
        s = self.f.support()
        return s

    @property
    def compact(self) -> bool:
        return all(math.isfinite(v) for v in self.support())


Term = Union[PointMass, Density]


@dataclass(frozen=True)
class CompactDistribution:
    terms: tuple

    def __post_init__(self):
        for t in self.terms:
            if isinstance(t, Density) and t.support_ is not None and t.profile.kind != "bump":
                raise EmbeddingError("densities with a declared support must use a bump profile")

    @staticmethod
    def of(*terms: Term) -> "CompactDistribution":
        return CompactDistribution(tuple(terms))

    def __add__(self, other: "CompactDistribution") -> "CompactDistribution":
        return CompactDistribution(self.terms + other.terms)

    def support(self) -> list:
        return sorted(t.support() for t in self.terms)

    def pairing(self, phi: Profile) -> float:
        """<w, phi> in closed form or by Gauss-Legendre on the density support."""
        tot = 0.0
        for t in self.terms:
            if isinstance(t, PointMass):
                tot += t.coef * (-1) ** t.alpha * float(phi.deriv(t.alpha)(np.array([t.a]))[0])
            else:
                lo, hi = _finite_support(t)
                y, w = _gl_on(lo, hi, 64, 16)
                tot += float(np.sum(w * t.f(y) * phi(y)))
        return tot


def delta(a: float = 0.0) -> CompactDistribution:
    return CompactDistribution((PointMass(float(a)),))


def dd(alpha: int, a: float = 0.0) -> CompactDistribution:
    return CompactDistribution((PointMass(float(a), int(alpha)),))


def density(profile: Profile, support=None, alpha: int = 0) -> CompactDistribution:
    return CompactDistribution((Density(profile, None if support is None else tuple(map(float, support)), alpha),))


def _finite_support(t: Density) -> tuple:
    lo, hi = t.support()
    if not (math.isfinite(lo) and math.isfinite(hi)):
        raise EmbeddingError("density has no compact support")
    return lo, hi


# ---------------------------------------------------------------------------
# Model delta-net and embedding


def _check_infinite(b: RateExpr) -> None:
    try:
        lim = rates.limit_class(b)
    except rates.RateError:
        lim = None
    if lim is None or lim[0] != "+inf":
        raise PreconditionError(f"{rates.pretty(b)} is not a positive infinite net")


def model_delta_net(b, rho: Mollifier) -> ScaledKernel:
    b = _expr(b)
    _check_infinite(b)
    return ScaledKernel(rho.profile, b, b, 0.0)


def _conv(f: Profile, rho: Mollifier, b: float, x: np.ndarray, support=None, n: int = 96) -> np.ndarray:
    """(f * rho_eps)(x) = int f(x - t/b) rho(t) dt."""
    x = np.asarray(x, dtype=float)
    gx, gw = _gl(n)
    lo = np.full_like(x, -TAIL)
    hi = np.full_like(x, TAIL)
    if support is not None:
        lo = np.maximum(lo, b * (x - support[1]))
        hi = np.minimum(hi, b * (x - support[0]))
    width = np.maximum(hi - lo, 0.0)
    t = 0.5 * width[:, None] * gx[None, :] + 0.5 * (hi + lo)[:, None]
    vals = f(x[:, None] - t / b) * rho(t)
    return 0.5 * width * (vals @ gw)


def _density_family(t: Density, b: RateExpr, rho: Mollifier) -> Family:
    f = t.f
    if f.kind == "poly" and t.support_ is None:
        # f * rho_eps = sum_k (-1)^k mu_k b^-k f^(k)/k!, exact
        pairs = []
        for k in range(len(f.coeffs)):
            mu = rho.moment(k)
            if mu == 0:
                continue
            c = Fraction((-1) ** k) * mu / math.factorial(k)
            coef = Num(c) if k == 0 else Mul(Num(c), Pow(b, Fraction(-k)))
            pairs.append((coef, f.deriv(k)))
        return SeparableSum.of(pairs)
    supp = t.support() if t.compact else None
    bnorm = None
    if supp is not None:
        y, w = _gl_on(supp[0], supp[1], 64, 16)
        bnorm = float(np.sum(w * np.abs(f(y))))

    def fn(e, x):
        return _conv(f, rho, rates.eval_at(b, e), x, supp)

    def dfn(e, x, k):
        return _conv(f.deriv(k), rho, rates.eval_at(b, e), x, supp)

    def envelope(lo, hi, k):
        if supp is None or (supp[0] <= hi and lo <= supp[1]):
            return None
        near = supp[1] if lo > supp[1] else supp[0]
        net = ScaledKernel(rho.profile, b, b, near).sup_norm_net((lo, hi), k)
        return Mul(_const(bnorm), net.expr)

    return BlackBox(fn=fn, max_deriv=64, label=f"conv({f.describe()})", deriv_fn=dfn, envelope=envelope,
                    fd_width=1.0)


def embed(w: CompactDistribution, b, rho: Mollifier, domain=(-math.inf, math.inf)) -> GenFunction:
    """i_b(w) = [(w * rho_eps)|_Omega] in G(AG(b), AG(b), Omega)."""
    b = _expr(b)
    _check_infinite(b)
    parts = []
    for t in w.terms:
        if isinstance(t, PointMass):
            k = ScaledKernel(rho.profile, b, b, t.a).deriv(t.alpha)
            if t.coef != 1.0:
                k = k.scale(Num(Fraction(t.coef)))
            parts.append(k)
        else:
            parts.append(_density_family(t, b, rho))
    fam = parts[0] if len(parts) == 1 else SumFamily(tuple(parts))
    spec = AlgebraSpec.of(AG(b))
    return GenFunction(fam, spec, (float(domain[0]), float(domain[1])))


def sigma(f: Profile, spec: AlgebraSpec, domain=(-math.inf, math.inf)) -> GenFunction:
    """The constant embedding of a smooth function."""
    return GenFunction(SeparableSum.of([(1, f)]), spec, domain)


# ---------------------------------------------------------------------------
# Taylor residual and delta pairing


def _remainder_mean(g: Profile, x: np.ndarray, b: float, rho: Mollifier) -> np.ndarray:
    """int rho(t) [g(x - t/b) - g(x)] dt via the integral Taylor remainder.

    Terms of order 1..M integrate to zero against rho, so only the remainder
    h^{M+1}/M! int_0^1 (1-s)^M g^{(M+1)}(x+s h) ds, h = -t/b, survives.  This
    avoids the cancellation of the direct difference.
    """
    M = rho.M
    gd = g.deriv(M + 1)
    x = np.asarray(x, dtype=float)
    if gd.is_zero:
        return np.zeros_like(x)
    t, wt = _HERMITE
    pw = P.polyval(t, np.array([float(c) for c in rho.coeffs])) / SQRT_PI
    s, ws = _SGRID
    h = -t / b
    kern = (1 - s) ** M * ws  # (ns,)
    out = np.empty_like(x)
    for i, xi in enumerate(x):
        arg = xi + np.outer(h, s)  # (nt, ns)
        inner = gd(arg) @ kern  # (nt,)
        out[i] = float(np.sum(wt * pw * h ** (M + 1) * inner)) / math.factorial(M)
    return out


def _remainder_direct(g: Profile, x: np.ndarray, b: float, rho: Mollifier) -> np.ndarray:
    return _conv(g, rho, b, x) - g(np.asarray(x, dtype=float))


def _fit(table: Sequence[tuple]) -> Optional[float]:
    pts = [(math.log(b), math.log(r)) for _, b, r in table if r > 0 and math.isfinite(r)]
    if len(pts) < 2:
        return None
    xs, ys = zip(*pts)
    return -float(np.polyfit(xs, ys, 1)[0])


def _window(cfg: Optional[GridConfig], lo: float, hi: float) -> list:
    pts = (cfg or grid_config()).points()
    return [e for e in pts if lo * (1 - 1e-12) <= e <= hi * (1 + 1e-12)]


@dataclass(frozen=True)
class SlopeReport:
    slope: Optional[float]
    table: tuple  # (eps, b_eps, residual)
    max_residual: float
    noise_flag: bool = False
    method: str = "remainder"
    grid: dict = field(default_factory=dict)

    def as_dict(self) -> dict:
        return {
            "slope": None if self.slope is None else float(f"{self.slope:.6g}"),
            "max_residual": float(f"{self.max_residual:.6g}"),
            "noise_flag": self.noise_flag,
            "method": self.method,
            "grid": self.grid,
            "table": [[float(f"{e:.6g}"), float(f"{r:.6g}")] for e, _, r in self.table],
        }


def _slope_report(rows, method: str, eps_range, cfg, floor: float) -> SlopeReport:
    flag = False
    if method == "direct":
        kept = []
        for row in rows:
            if row[2] <= floor:
                flag = True
                break
            kept.append(row)
        fit_rows = kept
    else:
        fit_rows = rows
    c = cfg or grid_config()
    grid = {"eps0": c.eps0, "r": c.r, "count": len(rows), "range": [eps_range[0], eps_range[1]]}
    mx = max((r for _, _, r in rows), default=0.0)
    return SlopeReport(_fit(fit_rows), tuple(rows), mx, flag, method, grid)


def taylor_residual_slope(f: Profile, b, rho: Mollifier, K=(-1.0, 1.0), eps_range=(1e-3, 1e-1),
                          method: str = "remainder", nx: int = 65,
                          cfg: Optional[GridConfig] = None) -> SlopeReport:
    """Fit log sup_K |f*rho_eps - f| against log b_eps; expected slope about M+1."""
    b = _expr(b)
    xs = np.linspace(K[0], K[1], nx)
    rows = []
    for e in _window(cfg, *eps_range):
        be = rates.eval_at(b, e)
        res = _remainder_mean(f, xs, be, rho) if method == "remainder" else _remainder_direct(f, xs, be, rho)
        rows.append((e, be, float(np.max(np.abs(res)))))
    floor = 1e-13 * max(1.0, float(np.max(np.abs(f(xs)))))
    return _slope_report(rows, method, eps_range, cfg, floor)


def delta_pairing(w: CompactDistribution, phi: Profile, b, rho: Mollifier, eps_range=(1e-3, 1e-1),
                  method: str = "remainder", cfg: Optional[GridConfig] = None) -> dict:
    """Errors |int (w*rho_eps) phi - <w, phi>| on the grid, with fitted decay order."""
    b = _expr(b)
    exact = w.pairing(phi)
    rows = []
    for e in _window(cfg, *eps_range):
        be = rates.eval_at(b, e)
        err = 0.0
        for t in w.terms:
            if isinstance(t, PointMass):
                g = phi.deriv(t.alpha)
                x = np.array([t.a])
                r = _remainder_mean(g, x, be, rho) if method == "remainder" else _remainder_direct(g, x, be, rho)
                err += t.coef * (-1) ** t.alpha * float(r[0])
            else:
                lo, hi = _finite_support(t)
                y, wy = _gl_on(lo, hi, 64, 16)
                r = _remainder_mean(phi, y, be, rho) if method == "remainder" else _remainder_direct(phi, y, be, rho)
                err += float(np.sum(wy * t.f(y) * r))
        rows.append((e, be, abs(err)))
    rep = _slope_report(rows, method, eps_range, cfg, 1e-13 * max(1.0, abs(exact)))
    return {"exact": exact, "report": rep}


# ---------------------------------------------------------------------------
# Strict delta-nets


@dataclass(frozen=True)
class StrictDeltaReport:
    mcap: int
    phis: tuple  # Profile per m
    M_values: tuple  # M_m = sup_{alpha<=m} sup |d^alpha phi_m|
    l1: tuple  # int |phi_m|
    rows: tuple  # per eps: dict
    cap_note: str = ""

    def psi(self, m: int) -> Profile:
        return self.phis[m]

    def as_dict(self) -> dict:
        return {"mcap": self.mcap, "M": [float(f"{v:.6g}") for v in self.M_values],
                "l1": [float(f"{v:.9g}") for v in self.l1], "rows": list(self.rows),
                "note": self.cap_note}


def _bump_moments(n: int) -> list:
    y, w = _gl_on(-1.0, 1.0, 64, 32)
    bv = BUMP(y)
    return [float(np.sum(w * bv * y ** k)) for k in range(n)]


def _strict_phi(m: int, beta: list) -> tuple:
    A = np.array([[beta[j + k] for j in range(m + 1)] for k in range(m + 1)])
    rhs = np.zeros(m + 1)
    rhs[0] = 1.0
    cond = float(np.linalg.cond(A))
    c = np.linalg.solve(A, rhs)
    c[1::2] = 0.0  # odd coefficients vanish by symmetry
    return Profile("bump", tuple(c)), cond


def _l1_bump(phi: Profile) -> float:
    """int |phi| over (-1, 1), split at the real roots of the polynomial factor."""
    r = np.roots(np.array(phi.coeffs[::-1], dtype=float)) if len(phi.coeffs) > 1 else np.array([])
    cuts = sorted({-1.0, 0.0, 1.0} | {float(z.real) for z in r if abs(z.imag) < 1e-12 and -1 < z.real < 1})
    tot = 0.0
    for a, b in zip(cuts, cuts[1:]):
        y, w = _gl_on(a, b, 64, 4)
        tot += abs(float(np.sum(w * phi(y))))
    return tot


def strict_delta_net(b, mcap: int = 8, cfg: Optional[GridConfig] = None) -> StrictDeltaReport:
    if not 0 <= mcap <= 8:
        raise EmbeddingError("mCap must lie in 0..8")
    b = _expr(b)
    _check_infinite(b)
    beta = _bump_moments(2 * mcap + 2)
    phis, Ms, l1s = [], [], []
    note = ""
    y, w = _gl_on(-1.0, 1.0, 64, 32)
    for m in range(mcap + 1):
        phi, cond = _strict_phi(m, beta)
        if cond > 1e13:
            note = f"cap lowered to {m - 1}: condition {cond:.3g}"
            break
        phis.append(phi)
        Ms.append(max(phi.deriv(a).global_sup() for a in range(m + 1)))
        l1s.append(_l1_bump(phi))
    cap = len(phis) - 1
    rows = []
    for e in (cfg or grid_config()).points():
        be = rates.eval_at(b, e)
        ok = [m for m in range(cap + 1) if Ms[m] <= be]
        m_e = max(ok) if ok else None
        row = {"eps": float(f"{e:.12g}"), "b": float(f"{be:.12g}"), "m": m_e}
        if m_e is not None:
            row["l1"] = float(f"{l1s[m_e]:.9g}")
        rows.append(row)
    return StrictDeltaReport(cap, tuple(phis), tuple(Ms), tuple(l1s), tuple(rows), note)


def check_strict_delta(rep: StrictDeltaReport, tol: float = 1e-8) -> dict:
    """Verify properties (i)-(iv) and report (v) for every selected m."""
    from scipy.integrate import quad

    out = {}
    used = sorted({r["m"] for r in rep.rows if r["m"] is not None})
    sel_ok = True
    for r in rep.rows:
        m = r["m"]
        if m is None:
            continue
        if not rep.M_values[m] <= r["b"]:
            sel_ok = False
        if m < rep.mcap and not rep.M_values[m + 1] > r["b"]:
            sel_ok = False
    mass_ok, mom_ok = True, True
    masses, moments = {}, {}
    for m in used:
        phi = rep.phis[m]
        mass = quad(lambda t: float(phi(np.array([t]))[0]), -1, 1, epsabs=1e-13, epsrel=1e-13, limit=200)[0]
        masses[m] = mass
        mass_ok &= abs(mass - 1.0) <= tol
        mm = []
        for k in range(1, m + 1):
            v = quad(lambda t: float(phi(np.array([t]))[0]) * t ** k, -1, 1, epsabs=1e-13, epsrel=1e-13, limit=200)[0]
            mm.append(v)
            mom_ok &= abs(v) <= tol
        moments[m] = mm
    supp_ok = all(p.kind == "bump" and p.a == 1.0 and p.c == 0.0 for p in rep.phis)
    out["i_support"] = supp_ok
    out["ii_mass"] = mass_ok
    out["iii_selection"] = sel_ok
    out["iv_moments"] = mom_ok
    out["v_l1"] = {m: rep.l1[m] for m in used}
    out["v_meets_1_plus_1_over_m"] = {m: rep.l1[m] <= 1 + 1.0 / max(m, 1) for m in used}
    out["masses"] = masses
    out["moments"] = moments
    return out


# ---------------------------------------------------------------------------
# Embedding comparison and the principality certificate


def compare_embeddings(bnet, cnet, rho: Mollifier, mmax: int = 8,
                       cfg: Optional[GridConfig] = None) -> Verdict:
    """i_b = i_c iff [b] = [c] in G(AG(b), R); exact oracle plus delta-at-0 check."""
    if rho.value_at_zero == 0:
        raise PreconditionError("the mollifier vanishes at 0")
    b, c = _expr(bnet), _expr(cnet)
    Z = AG(b)
    diff = rates.Sub(b, c)
    exact = is_negligible_num(diff, Z)
    r0 = rho.value_at_zero

    def logdelta(e):
        try:
            return rates.log_abs_at(diff, e) + math.log(abs(r0))
        except (rates.RateArgumentError, ValueError):
            return -math.inf

    net = Net.log_callable(logdelta, label="delta at 0 difference")
    vs = [big_o(net, Pow(b, Fraction(-m)), cfg) for m in range(1, mmax + 1)]
    if all(v.holds for v in vs):
        num = HOLDS
    elif any(v.fails for v in vs):
        num = FAILS
    else:
        num = "Inconclusive"
    agree = num == exact.status
    note = "numeric delta-at-0 check " + ("agrees" if agree else f"disagrees ({num})")
    return exact.with_note(note).with_info(numeric=num, delta0=float(f"{r0:.12g}"))


def smooth_cutoff(p: float, q: float):
    """psi in D(R), 0 <= psi <= 1, psi = 1 on [-q, q], supp psi = [-p, p]."""

    def h(t):
        t = np.asarray(t, dtype=float)
        out = np.zeros_like(t)
        pos = t > 0
        out[pos] = np.exp(-1.0 / t[pos])
        return out

    def psi(s):
        a = np.abs(np.asarray(s, dtype=float))
        u = (p - a) / (p - q)
        return h(u) / (h(u) + h(1 - u))

    return psi


def l_m(rho: Mollifier, m: int, q: float) -> float:
    """int_{-q}^{q} t^{2m} rho(t) dt by Gauss-Legendre."""
    t, w = _gl_on(-q, q, 64, 4)
    return float(np.sum(w * t ** (2 * m) * rho(t)))


def necessity_certificate(b, Z: Gauge, m_range: Sequence[int], rho: Mollifier, p: Optional[float] = None,
                          q: float = 0.5, z=None, cfg: Optional[GridConfig] = None) -> dict:
    b = _expr(b)
    _check_infinite(b)
    pr = rho.positive_radius()
    p = min(pr, 1.0) if p is None else float(p)
    if not (p <= pr and 0 < q < min(p, 1.0)):
        raise PreconditionError("need rho > 0 on (-p, p) and q < min(p, 1)")
    psi = smooth_cutoff(p, q)
    tt, tw = _gl_on(-p, p, 64, 8)
    Ls, rows, bound_ok = {}, [], True
    for m in m_range:
        L = l_m(rho, m, q)
        Ls[m] = L
        for e in (cfg or grid_config()).points()[:: 8]:
            be = rates.eval_at(b, e)
            s = -tt / be
            f = s ** (2 * m) * be ** (2 * m) * psi(be * s)
            c = float(np.sum(tw * f * rho(tt)))
            rows.append({"m": m, "eps": float(f"{e:.6g}"), "c": float(f"{c:.9g}")})
            bound_ok &= c >= L * (1 - 1e-12)
    ms = list(m_range)
    decreasing = all(Ls[a] > Ls[c] for a, c in zip(ms, ms[1:]))
    positive = all(v > 0 for v in Ls.values())
    # generator test: b generates Z iff every member of Z is a power-bounded net of b
    sub = subsumed(Z, AG(b))
    esc = rates.parse(z) if isinstance(z, str) else z
    if esc is None and not sub.holds:
        esc = rates.parse(sub.get("escaper")) if sub.get("escaper") else None
    per_m = {}
    if esc is not None:
        inv = rates.Div(Num(Fraction(1)), esc)
        for m in ms:
            per_m[m] = big_o(Pow(b, Fraction(-m)), inv, cfg).status
        all_m = is_moderate(esc, AG(b)).status  # Fails means no m with z = O(b^m)
    generates = sub.holds
    return {
        "L": {m: Ls[m] for m in ms},
        "L_positive": positive,
        "L_decreasing": decreasing,
        "lower_bound_holds": bound_ok,
        "p": p,
        "q": q,
        "generator": generates,
        "escaper": None if esc is None else rates.pretty(esc),
        "b_pow_neg_m_is_O_inv_z": per_m,
        "z_moderate_in_AG_b": None if esc is None else all_m,
        "agreement": "embedding agreement consistent" if generates else "agreement impossible",
        "rows": rows,
        "truncation": f"moment order M={rho.M}",
    }
