"""Moderateness and negligibility of function families, point values and supports."""

from agcal.functions import EXP, SIN, GenFunction, ScaledKernel, SeparableSum, is_moderate_fn, is_negligible_fn, \
    point_value, poly
from agcal.gauges import AG, AlgebraSpec, B_s, exp_gauge
from agcal.numbers import CompactPoint

decay = ScaledKernel(EXP, "-1/eps", "1")  # exp(-t/eps)
for name, g in (("power gauge", B_s()), ("exponential gauge", exp_gauge(B_s()))):
    v = is_moderate_fn(GenFunction(decay, AlgebraSpec.of(g)), [(-1, 1)])
    print(f"exp(-t/eps) moderate on [-1,1] for the {name}: {v.status}  ({v.note})")

S = AlgebraSpec.of(AG("1/eps"))
tiny = GenFunction(SeparableSum.of([("exp(-1/eps)", SIN)]), S)
print("\nexp(-1/eps) sin(x) negligible:", is_negligible_fn(tiny).status)
w = GenFunction(SeparableSum.of([("eps^5", poly(0, 0, 1))]), S)
v = is_negligible_fn(w, mmax=6)
print("eps^5 x^2 negligible:", v.status, "first failing order m =", v.get("m"))

sq = GenFunction(SeparableSum.of([(1, poly(0, 0, 1))]), S)
pv = point_value(sq, CompactPoint.of("eps", (0.0, 1.0)))
print("\n(x^2)(eps) at eps = 0.1:", pv.rep.value(0.1))
