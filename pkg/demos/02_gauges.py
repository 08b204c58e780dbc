"""Gauge axioms, equivalence, principal generators and the exponential gauge."""

from agcal import rates
from agcal.gauges import B_s, Gauge, check_axioms, equivalent_gauges, exp_gauge, parse_gauge, principal_generator

Bs = B_s()
EBs = exp_gauge(Bs)

for g in (Bs, EBs, parse_gauge("tower(1/eps)"), Gauge.gens(["1/eps"])):
    rep = check_axioms(g)
    print(f"{g.describe():<28}", " ".join(f"{k}:{v.status}" for k, v in rep.items()))

a, b = parse_gauge("powers(1/eps)"), parse_gauge("powers_nat(1/eps)")
print("\npowers(1/eps) ~ powers_nat(1/eps):", equivalent_gauges(a, b).status)
print("powers(1/eps) ~ its exponential: ", equivalent_gauges(Bs, EBs).status)

g, _ = principal_generator(Bs)
print("\ngenerator of the power gauge:", rates.pretty(g))
g, cert = principal_generator(EBs)
print("exponential gauge generator:", g, "| escaping member:", cert["escaper"])
