"""Mean-field spin dynamics: the double-well free energy, its crossover
formula, and the exact lumped birth-death oracle, cross-checked three ways.
"""

import math

import mpmath as mp
import numpy as np

from ipslab import analytics as an
from ipslab import dynamics, graphgen, rng
from ipslab.models import SIM

BETA, H = 1.5, 0.1

print("field threshold chi(%.1f) = %.5f (metastable for 0 < h < chi)" %
      (BETA, an.chi(BETA)))
tri = an.kramers(BETA, H)
print("wells and saddle: m- = %.4f, m* = %.4f, m+ = %.4f" %
      (tri.m_minus, tri.m_star, tri.m_plus))
print("barrier Gamma = %.5f, prefactor K = %.3f" % (tri.gamma, tri.prefactor))

print("\nexact lumped-chain crossover vs K e^{N Gamma}:")
for n in (100, 200, 400, 800):
    et = an.cw_crossover_time(BETA, H, n)
    log_ratio = float(mp.log(et) / (math.log(tri.prefactor) + n * tri.gamma))
    print("  N=%4d: E[tau] = %-12s log-ratio = %.3f" % (n, mp.nstr(et, 4), log_ratio))

print("\nfull spin simulation on the 20-clique vs the oracle:")
n = 20
model = SIM(beta=BETA, J=1.0 / n, h=H)
k_minus, k_plus = an.cw_lumped_endpoints(BETA, H, n)
oracle = float(an.bd_mean_absorption(*an.lumped_rates(model, n), k_minus, k_plus))
g = graphgen.generate(graphgen.Complete(n), 0)
init = np.array([1] * k_minus + [-1] * (n - k_minus))
taus = []
for k in range(400):
    seed = int(rng.derive_seed(np.uint64(31415), np.uint64(k)))
    taus.append(dynamics.run_to_ones_count(g, model, init, k_plus, seed, 1e9).tau)
print("  oracle %.2f   simulated %.2f +- %.2f" %
      (oracle, np.mean(taus), 1.96 * np.std(taus, ddof=1) / math.sqrt(len(taus))))
