"""Linear constant-coefficient systems x' + A x = 0 with generalized coefficients."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Optional, Sequence

import numpy as np

from . import rates
from .functions import EXP, BlackBox, GenFunction, ScaledKernel, is_moderate_fn
from .gauges import AlgebraSpec, Gauge, algebra_order, exp_gauge, is_negligible_num, subsumed
from .index_core import EXACT, GridConfig, Verdict, conjunction, grid_config, holds
from .numbers import GenNumber, is_bounded_by
from .rates import Abs, Add, Exp, Mul, Num, Pow, RateExpr


class ODEError(ValueError):
    pass


# ---------------------------------------------------------------------------
# Matrix exponential: diagonal Pade approximant with scaling and squaring


PADE_ORDER = 8


def _pade_coeffs(q: int) -> list[float]:
    f = math.factorial
    return [f(2 * q - k) * f(q) / (f(2 * q) * f(k) * f(q - k)) for k in range(q + 1)]


_PADE = _pade_coeffs(PADE_ORDER)


def _norm1(X: np.ndarray) -> float:
    return float(np.max(np.sum(np.abs(X), axis=0))) if X.size else 0.0


def _pade(X: np.ndarray) -> np.ndarray:
    d = X.shape[0]
    I = np.eye(d)
    N = np.zeros_like(X)
    D = np.zeros_like(X)
    Xk = I
    for k, c in enumerate(_PADE):
        if k:
            Xk = Xk @ X
        N = N + c * Xk
        D = D + (-1) ** k * c * Xk
    return np.linalg.solve(D, N)


def _squarings(X: np.ndarray, target: float = 0.5) -> int:
    n = _norm1(X)
    return 0 if n <= target else int(math.ceil(math.log2(n / target)))


def expm_scaled(X, extra: int = 0) -> tuple[np.ndarray, float]:
    """exp(X) = Y * e^L with max|Y| = 1, so huge exponents never overflow.

    ``extra`` adds squarings beyond the minimum (an independent second run).
    """
    X = np.atleast_2d(np.asarray(X, dtype=float))
    s = _squarings(X) + extra
    Y = _pade(X / 2.0 ** s)
    L = 0.0
    m = float(np.max(np.abs(Y)))
    Y, L = Y / m, math.log(m)
    for _ in range(s):
        Y = Y @ Y
        L *= 2.0
        m = float(np.max(np.abs(Y)))
        if m == 0.0:
            return Y, -math.inf
        Y, L = Y / m, L + math.log(m)
    return Y, L


def expm(X, extra: int = 0) -> np.ndarray:
    Y, L = expm_scaled(X, extra)
    with np.errstate(over="ignore"):
        return Y * math.exp(L) if L < 709.0 else Y * np.inf


# ---------------------------------------------------------------------------
# Problem data


def _expr(x) -> RateExpr:
    if isinstance(x, RateExpr):
        return x
    if isinstance(x, GenNumber):
        e = x.rep.exact_expr()
        if e is None:
            raise ODEError("matrix entries must be symbolic nets")
        return e
    return rates.parse(x) if isinstance(x, str) else Num(Fraction(x))


@dataclass(frozen=True)
class GenMatrix:
    entries: tuple  # tuple of rows of RateExpr
    bounded_by: Gauge

    @staticmethod
    def of(rows, bounded_by: Gauge, spec: Optional[AlgebraSpec] = None) -> "GenMatrix":
        ent = tuple(tuple(_expr(a) for a in row) for row in rows)
        d = len(ent)
        if any(len(r) != d for r in ent):
            raise ODEError("coefficient matrix must be square")
        spec = spec or AlgebraSpec.of(exp_gauge(bounded_by))
        for row in ent:
            for a in row:
                v = is_bounded_by(GenNumber.of(a, spec, trust=True), bounded_by)
                if not v.holds:
                    raise ODEError(f"entry {rates.pretty(a)} is not bounded by {bounded_by.describe()}")
        return GenMatrix(ent, bounded_by)

    @property
    def dim(self) -> int:
        return len(self.entries)

    def at(self, eps: float) -> np.ndarray:
        return np.array([[rates.eval_at(a, eps) for a in row] for row in self.entries], dtype=float)

    def abs_sum(self) -> RateExpr:
        acc: Optional[RateExpr] = None
        for row in self.entries:
            for a in row:
                if isinstance(a, Num) and a.value == 0:
                    continue
                acc = Abs(a) if acc is None else Add(acc, Abs(a))
        return acc if acc is not None else Num(Fraction(0))

    def frobenius(self) -> RateExpr:
        acc: Optional[RateExpr] = None
        for row in self.entries:
            for a in row:
                if isinstance(a, Num) and a.value == 0:
                    continue
                sq = Mul(a, a)
                acc = sq if acc is None else Add(acc, sq)
        return Pow(acc, Fraction(1, 2)) if acc is not None else Num(Fraction(0))


@dataclass(frozen=True)
class ODEProblem:
    A: GenMatrix
    c: tuple  # RateExpr per component
    t0: float
    B: Gauge
    solution_spec: AlgebraSpec

    @staticmethod
    def of(A_rows, c, B: Gauge, t0: float = 0.0, solution_spec: Optional[AlgebraSpec] = None) -> "ODEProblem":
        spec = solution_spec or AlgebraSpec.of(exp_gauge(B))
        A = GenMatrix.of(A_rows, B, spec)
        cv = tuple(_expr(x) for x in c)
        if len(cv) != A.dim:
            raise ODEError("initial vector has the wrong length")
        for x in cv:
            if not is_bounded_by(GenNumber.of(x, spec, trust=True), B).holds:
                raise ODEError(f"initial value {rates.pretty(x)} is not bounded by {B.describe()}")
        chain = [subsumed(exp_gauge(B), spec.B), subsumed(spec.B, spec.Z)]
        if not all(v.holds for v in chain):
            raise ODEError("need R_M(e^B) within R_M(B') within R_M(Z')")
        return ODEProblem(A, cv, float(t0), B, spec)

    @property
    def dim(self) -> int:
        return self.A.dim

    def c_at(self, eps: float) -> np.ndarray:
        return np.array([rates.eval_at(x, eps) for x in self.c], dtype=float)


# ---------------------------------------------------------------------------
# Solutions


@dataclass(frozen=True)
class ODESolution:
    problem: ODEProblem
    extra: int = 0
    nt: int = 401
    components: tuple = field(default=(), compare=False)
    certificate: dict = field(default_factory=dict, compare=False)

    def state(self, eps: float, t: float) -> np.ndarray:
        """x_eps(t) by one scaled exponential; may overflow to inf."""
        v, L = self.state_scaled(eps, t)
        with np.errstate(over="ignore"):
            return v * math.exp(L) if L < 709.0 else v * np.inf

    def state_scaled(self, eps: float, t: float) -> tuple[np.ndarray, float]:
        p = self.problem
        Y, L = expm_scaled(-(t - p.t0) * p.A.at(eps), self.extra)
        v = Y @ p.c_at(eps)
        m = float(np.max(np.abs(v)))
        if m == 0.0:
            return v, -math.inf
        return v / m, L + math.log(m)

    def log_abs(self, eps: float, t: float, i: int, k: int = 0) -> float:
        v, L = self.state_scaled(eps, t)
        w = _apply_power(-self.problem.A.at(eps), v, k)
        a = abs(float(w[i]))
        return -math.inf if a == 0 else L + math.log(a)

    def log_sup(self, eps: float, lo: float, hi: float, k: int, i: int) -> float:
        return _log_sup_table(self, eps, lo, hi, k)[i]


def _apply_power(M: np.ndarray, v: np.ndarray, k: int) -> np.ndarray:
    for _ in range(k):
        v = M @ v
    return v


@lru_cache(maxsize=2048)
def _log_sup_table(sol: ODESolution, eps: float, lo: float, hi: float, k: int) -> tuple:
    """max over a uniform t-grid on [lo, hi] of log|x_i^(k)(t)|, per component."""
    p = sol.problem
    A = p.A.at(eps)
    ts = np.linspace(lo, hi, sol.nt)
    step = ts[1] - ts[0] if sol.nt > 1 else 0.0
    S, Ls = expm_scaled(-step * A, sol.extra)
    v, L = sol.state_scaled(eps, lo)
    best = np.full(p.dim, -math.inf)
    negA = -A
    for j in range(sol.nt):
        if j:
            v = S @ v
            L += Ls
            m = float(np.max(np.abs(v)))
            if m == 0.0:
                break
            v, L = v / m, L + math.log(m)
        w = _apply_power(negA, v, k)
        with np.errstate(divide="ignore"):
            lw = np.log(np.abs(w)) + L
        best = np.maximum(best, lw)
    return tuple(float(b) for b in best)


def solve_linear(p: ODEProblem, eps_grid: Optional[Sequence[float]] = None,
                 t_grid: Optional[Sequence[float]] = None, extra: int = 0) -> ODESolution:
    """x_eps(t) = expm(-(t - t0) A_eps) c_eps as a vector of generalized functions."""
    sol = ODESolution(p, extra)
    comps = []
    for i in range(p.dim):

        def fn(e, x, i=i):
            x = np.atleast_1d(np.asarray(x, dtype=float))
            return np.array([sol.state(e, t)[i] for t in x])

        def dfn(e, x, k, i=i):
            x = np.atleast_1d(np.asarray(x, dtype=float))
            negA = -p.A.at(e)
            return np.array([_apply_power(negA, sol.state(e, t), k)[i] for t in x])

        def lsup(e, lo, hi, k, i=i):
            return sol.log_sup(e, lo, hi, k, i)

        fam = BlackBox(fn=fn, max_deriv=64, label=f"x{i + 1}", deriv_fn=dfn, log_sup=lsup)
        comps.append(GenFunction(fam, p.solution_spec))
    cert = _certificate(sol, eps_grid, t_grid)
    object.__setattr__(sol, "components", tuple(comps))
    object.__setattr__(sol, "certificate", cert)
    return sol


def _certificate(sol: ODESolution, eps_grid, t_grid) -> dict:
    p = sol.problem
    eps_grid = list(eps_grid) if eps_grid is not None else grid_config().points()[:20]
    t_grid = list(t_grid) if t_grid is not None else list(np.linspace(p.t0 - 1, p.t0 + 1, 21))
    viol, truncated = [], []
    for e in eps_grid:
        A = p.A.at(e)
        ce = p.c_at(e)
        for t in t_grid:
            v, L = sol.state_scaled(e, t)
            _, corr = entry_bound(A, t - p.t0)
            if not math.isfinite(L):
                continue
            lb = math.log(corr) + math.log(max(float(np.sum(np.abs(ce))), 1e-300)) if math.isfinite(corr) else math.inf
            la = L + math.log(float(np.max(np.abs(v))))
            if la > lb + 1e-9:
                viol.append((e, t))
            if L > 709.0:
                truncated.append(e)
    return {"bound_violations": viol, "overflow_eps": sorted(set(truncated), reverse=True),
            "bound": "sum_j |c_j| (1 + (exp(d M |t|) - 1)/d)"}


def entry_bound(A, t: float) -> tuple[float, float]:
    """(M e^{dM|t|}, 1 + (e^{dM|t|} - 1)/d) for the entries of exp(-tA)."""
    A = np.atleast_2d(np.asarray(A, dtype=float))
    d = A.shape[0]
    M = float(np.max(np.abs(A))) if A.size else 0.0
    with np.errstate(over="ignore"):
        g = math.exp(d * M * abs(t)) if d * M * abs(t) < 709 else math.inf
    return M * g, 1.0 + (g - 1.0) / d


# ---------------------------------------------------------------------------
# Verification


def _envelope(p: ODEProblem, R: float, k: int) -> RateExpr:
    d = p.dim
    S = p.A.abs_sum()
    C: Optional[RateExpr] = None
    for x in p.c:
        C = Abs(x) if C is None else Add(C, Abs(x))
    env = Mul(C, Exp(Mul(Num(Fraction(d) * Fraction(str(R))), S)))
    if k:
        env = Mul(Pow(Mul(Num(Fraction(d)), S), Fraction(k)), env)
    return env


def verify_moderate_expB(sol: ODESolution, gauge: Optional[Gauge] = None, Kset=None, alpha_max: int = 4,
                         cfg: Optional[GridConfig] = None) -> Verdict:
    """Moderateness of the solution w.r.t. ``gauge`` (default e^B).

    The analytic envelope (sum_ij |a_ij|-based) is tried first; when it is
    gauge-moderate and dominates the measured sup on the grid, the verdict is
    exact.  Otherwise the measured sup-norm nets decide.
    """
    p = sol.problem
    gauge = gauge or exp_gauge(p.B)
    spec = AlgebraSpec.of(gauge)
    Kset = Kset or [(-1.0, 1.0)]
    from .gauges import is_moderate

    env_ok = True
    dominated = True
    pts = (cfg or grid_config()).points()[:20]
    for lo, hi in Kset:
        R = max(abs(lo - p.t0), abs(hi - p.t0))
        for k in range(alpha_max + 1):
            env = _envelope(p, R, k)
            if not is_moderate(env, gauge).holds:
                env_ok = False
                break
            for e in pts:
                try:
                    le = rates.log_abs_at(env, e)
                except (rates.RateError, ValueError):
                    continue
                for i in range(p.dim):
                    if sol.log_sup(e, lo, hi, k, i) > le + 1e-9:
                        dominated = False
        if not env_ok:
            break
    note = f"verified up to K={[list(K) for K in Kset]}, alpha<={alpha_max}"
    if env_ok and dominated:
        return holds(EXACT, note=note + "; analytic envelope").with_info(envelope=True)
    vs = [is_moderate_fn(GenFunction(c.family, spec, c.domain), Kset, alpha_max, cfg) for c in sol.components]
    v = conjunction(vs, note=note)
    return v.with_info(envelope=False, envelope_dominates=dominated)


def uniqueness_residual(p: ODEProblem, n=None, v=None, R: float = 1.0, candidate: Optional[ODESolution] = None,
                        cfg: Optional[GridConfig] = None) -> Verdict:
    """Bound e^{R|A|}|v| + R e^{R|A|}|n| (Frobenius |A|) and its Z'-negligibility."""
    Z = p.solution_spec.Z
    zero = Num(Fraction(0))
    nv = [_expr(x) for x in (n or [])] or [zero]
    vv = [_expr(x) for x in (v or [])] or [zero]

    def norm(xs):
        acc: Optional[RateExpr] = None
        for x in xs:
            if isinstance(x, Num) and x.value == 0:
                continue
            acc = Abs(x) if acc is None else Add(acc, Abs(x))
        return acc

    F = p.A.frobenius()
    grow = Exp(Mul(Num(Fraction(str(R))), F))
    vn, nn = norm(vv), norm(nv)
    parts = []
    if vn is not None:
        parts.append(Mul(grow, vn))
    if nn is not None:
        parts.append(Mul(Mul(Num(Fraction(str(R))), grow), nn))
    if candidate is not None and not parts:
        parts.append(zero)
    bound = zero
    for x in parts:
        bound = x if bound is zero else Add(bound, x)
    neg_inputs = conjunction([is_negligible_num(x, Z, cfg) for x in nv + vv])
    verdict = is_negligible_num(bound, Z, cfg)
    return verdict.with_info(bound=rates.pretty(bound), inputs_negligible=neg_inputs.status, norm="Frobenius")


def _probe_members(B: Gauge, probes: int) -> list:
    if B.kind == "powers":
        return [B.member(k) for k in range(1, probes + 1)]
    if B.kind == "tower":
        return [B.member(k) for k in range(probes)]
    return B.sample_members()[:probes]


def minimality_check(B: Gauge, Bprime: Gauge, probes: int = 3, alpha_max: int = 2,
                     cfg: Optional[GridConfig] = None) -> Verdict:
    """Every probe solution e^{b t}, b in B, must be B'-moderate on [-1, 1]."""
    spec = AlgebraSpec.of(Bprime)
    for b in _probe_members(B, probes):
        u = GenFunction(ScaledKernel(EXP, b, 1, 0.0), spec, (-math.inf, math.inf))
        v = is_moderate_fn(u, [(-1.0, 1.0)], alpha_max, cfg)
        if not v.holds:
            return Verdict(v.status, v.mode, note=f"probe b={rates.pretty(b)}").with_info(probe=rates.pretty(b))
    order = algebra_order(AlgebraSpec.of(exp_gauge(B)), spec)
    return holds(EXACT, note=f"{probes} probes moderate").with_info(algebra_order=order.status)
