"""Deciding big-O between closed-form nets, with witnesses and a sampled cross-check."""

from agcal import rates
from agcal.index_core import Net, big_o

pairs = [("eps^-2", "eps^-3"), ("exp(2/eps)", "exp(1/eps)*eps^-5"), ("7*eps^-1", "1/eps"),
         ("log(1/eps)^9", "eps^(-1/10)")]
for x, y in pairs:
    print(f"{x:>20}  vs  {y:<20} {rates.compare_O(x, y)}")

v = big_o("eps^-2 + 3/eps", "eps^-2")
print("\nsymbolic:", v.status, v.mode, "witness (H, eps0) =", v.witness)

# the same question for a black-box net, decided from grid samples
v = big_o(Net.callable(lambda e: e ** -2 * (2 + __import__("math").sin(1 / e))), "eps^-2")
print("sampled: ", v.status, v.mode, f"confidence={v.confidence}")

nf = rates.normalize(rates.parse("3*exp(2/eps)*log(1/eps) - eps^-4"))
print("\ndominant term of 3*exp(2/eps)*log(1/eps) - eps^-4:", nf.c, nf.exponents)
