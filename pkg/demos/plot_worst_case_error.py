"""
Discrepancy as a worst-case integration error
=============================================

For functions vanishing on the upper faces of the cube, with square
integrable mixed derivative, the integration error of a point set is at
most the function's norm times the L2 star discrepancy. The bound is
attained by the representer of the error functional.
"""

import numpy as np

from stratdisc import RngStream, l2_exact, lp_estimate, make_sampler, sample, star_exact_small
from stratdisc.rkhs import approx_error, integrand_suite, worst_case_error_identity

x = sample(make_sampler("jittered", 2, 64), RngStream(seed=3))

###############################################################################
# Three discrepancies of the same point set. L1 <= L2 <= star.

l2 = l2_exact(x).value
l1 = lp_estimate(x, 1, 10**5, RngStream(seed=3))
print(f"L1 ~ {l1.value:.5f} (+- {l1.stderr:.1e} on L1)")
print(f"L2 = {l2:.5f}")
print(f"D* = {star_exact_small(x).value:.5f}")

###############################################################################
# The normalized representer has unit norm and integration error equal to L2.

err, l2_again = worst_case_error_identity(x)
print(f"error of the representer {err:.12f} vs L2 {l2_again:.12f}")

###############################################################################
# The test integrands stay below norm * L2.

for f in integrand_suite(2):
    e = approx_error(f, x)
    print(f"{f.id}: error {e:.2e} <= {f.norm_h1k * l2:.2e}")
