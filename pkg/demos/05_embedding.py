"""Mollifier embedding of distributions: moments, Taylor agreement, pairings and supports."""

from agcal.embedding import (build_mollifier, compare_embeddings, delta, delta_pairing, density, embed,
                             strict_delta_net, taylor_residual_slope)
from agcal.functions import BUMP, COS, GAUSS, SIN, support_estimate

rho = build_mollifier(4)
print("mollifier coefficients (times sqrt(pi)):", [str(c) for c in rho.coeffs])
print("moments 1..4:", [rho.moment(k) for k in range(1, 5)])

for f in (SIN, GAUSS):
    rep = taylor_residual_slope(f, "1/eps", rho)
    print(f"sup|f*rho_eps - f| for {f.describe():<6} decays with slope {rep.slope:.2f}")

r = delta_pairing(delta(0), COS, "1/eps", rho)
print(f"<delta_eps, cos> - 1 decays with slope {r['report'].slope:.2f}")

u = embed(delta(0.5), "1/eps", rho, (0.0, 1.0))
print("\nsupport of embedded delta(0.5):", support_estimate(u, 0.05))
u = embed(density(BUMP, (0.2, 0.4)), "1/eps", rho, (0.0, 1.0))
print("support of embedded bump on [0.2, 0.4]:", support_estimate(u, 0.05))

print("\nscales 1/eps vs 2/eps give the same embedding:", compare_embeddings("1/eps", "2/eps", rho).status)
print("scales 1/eps vs 1/eps + exp(-1/eps):", compare_embeddings("1/eps", "1/eps + exp(-1/eps)", rho).status)

sd = strict_delta_net("1/eps", 8)
print("\nstrict delta net, first rows:")
for row in sd.rows[:5]:
    print("  ", row)
