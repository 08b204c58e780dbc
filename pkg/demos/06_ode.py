"""Linear ODEs with generalized coefficients: x' + A x = 0."""

import math

from agcal.gauges import B_s, exp_gauge, parse_gauge
from agcal.ode import ODEProblem, minimality_check, solve_linear, uniqueness_residual, verify_moderate_expB

Bs = B_s()
p = ODEProblem.of([["1/eps"]], ["1"], Bs)
sol = solve_linear(p)
for e in (0.1, 0.01, 0.001):
    got = sol.log_abs(e, -1.0, 0)
    print(f"eps={e:<6} log x(-1) = {got:.6f}   exact {1 / e:.6f}")

print("\nmoderate for the power gauge:      ", verify_moderate_expB(sol, Bs).status)
print("moderate for the exponential gauge:", verify_moderate_expB(sol, exp_gauge(Bs)).status)

rot = solve_linear(ODEProblem.of([["0", "-1/eps"], ["1/eps", "0"]], ["1", "0"], Bs))
e, t = 0.05, 0.37
print("\nrotation at eps=0.05, t=0.37:", rot.state(e, t), "expected", [math.cos(t / e), -math.sin(t / e)])

v = uniqueness_residual(p, n=["exp(-exp(2/eps))"], v=["exp(-exp(2/eps))"])
print("\nnegligible perturbations stay negligible:", v.status, "| bound", v.get("bound"))

print("\nsmallest algebra:")
print("  into exponential gauge:      ", minimality_check(Bs, exp_gauge(Bs)).status)
v = minimality_check(Bs, parse_gauge("powers_nat(exp(1/eps))"))
print("  into powers of exp(1/eps):   ", v.status, v.note)
