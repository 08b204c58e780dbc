"""Arithmetic on generalized numbers: equality holds modulo negligible nets."""

from agcal.gauges import AG, AlgebraSpec, B_s, exp_gauge
from agcal.numbers import NotModerate, bar_project, gn, gn_eq, is_bounded_by

S = AlgebraSpec.of(AG("1/eps"))
x = gn("1/eps", S)
print("[1/eps] = [1/eps + exp(-1/eps)] :", gn_eq(x, gn("1/eps + exp(-1/eps)", S)).status)
print("[1/eps] = [1/eps + eps^10]      :", gn_eq(x, gn("1/eps + eps^10", S)).status)
print("[1/eps] * [exp(-1/eps)] = 0     :", gn_eq(x * gn("exp(-1/eps)", S), gn("0", S)).status)

try:
    gn("exp(1/eps)", AlgebraSpec.of(B_s()))
except NotModerate as exc:
    print("\nrejected:", exc)

E = AlgebraSpec.of(exp_gauge(B_s()))
big = gn("exp(1/eps)", E)
print("\n[exp(1/eps)] bounded by the power gauge:", is_bounded_by(big, B_s()).status)
small = bar_project(gn("eps^-3 + 2", E), AlgebraSpec.of(B_s()))
print("projected [eps^-3 + 2] lives in", small.spec.B.describe())
