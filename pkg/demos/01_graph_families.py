"""Tour of the graph generators.

Every family is a pure function of (spec, seed); rerunning this script
prints identical numbers.
"""

import numpy as np

from ipslab import graphgen as gg

print("== complete / torus ==")
k4 = gg.generate(gg.Complete(4), 0)
print("K4:", k4.num_edges, "edges, degrees", k4.degrees())
t = gg.generate(gg.Torus(2, 3), 0)
print("3x3 torus:", t.n, "vertices,", t.num_edges, "edges (all degree 4)")

print("\n== Bernoulli graphs ==")
er = gg.generate(gg.ER(1000, 0.01), 42)
print("ER(1000, 0.01): %d edges (mean 4995)" % er.num_edges)
chung_lu = gg.generate(gg.Graphon(500, rank1=lambda x: 0.4 + 0.4 * x), 7)
print("rank-1 kernel graph: %d edges" % chung_lu.num_edges)

print("\n== half-edge pairing ==")
seq = gg.sample_degrees({3: 0.7, 4: 0.2, 8: 0.1}, 2000, 11)
cm = gg.generate(gg.ConfigModel(seq.degrees), 12)
stats = gg.degree_stats(cm)
loops = sum(1 for u, v in cm.edges if u == v)
print("CM(2000): d_ave = %s, m2 = %s, %d self-loops kept" %
      (float(stats.d_ave), float(stats.m2), loops))
rrg = gg.generate(gg.Regular(1000, 3), 13)
print("random 3-regular: degrees all 3 ->", bool(np.all(rrg.degrees() == 3)))

print("\n== growth and directed matching ==")
pa = gg.generate(gg.PrefAttach(5000, 2, 0.1), 21)
print("preferential attachment: max degree %d (hubs), mean %.2f"
      % (pa.degrees().max(), pa.degrees().mean()))
din = dout = (2,) * 100
dcm = gg.generate(gg.DirectedCM(din, dout), 5)
print("directed CM: out-degrees exact ->", bool(np.all(dcm.degrees() == 2)),
      ", in-degrees exact ->", bool(np.all(dcm.in_degrees() == 2)))
