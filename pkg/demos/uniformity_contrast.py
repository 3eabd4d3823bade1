"""Uniform versus non-uniform pairs of subalgebras.

A genuine ideal pair admits a joint approximation of nearby elements inside
the intersection with a constant independent of matrix amplification.  Two
hereditary corners at a small principal angle do not: their intersection is
trivial while the corners still contain elements at distance O(theta), and
the measured ratio blows up as the angle shrinks.
"""

from approxk import boundary, scenarios

blk = scenarios.block_ideal_pair()
rep = boundary.uniformity_probe(blk["c"], blk["d"], sample_count=40)
print("block ideal pair: sup achieved/delta ratio over",
      len(rep.samples), "draws =", f"{rep.ratio_sup:.3f}")

print()
print("hereditary corners at shrinking principal angle:")
for theta in (0.3, 0.1, 0.03):
    scn = scenarios.hereditary_pair(theta)
    rep = boundary.uniformity_probe(scn["c"], scn["d"], sample_count=40)
    print(f"  theta = {theta:5.2f}: ratio sup = {rep.ratio_sup:8.3f}")

print()
print("the ideal pair stays bounded; the corners diverge like 1/theta")
