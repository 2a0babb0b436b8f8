"""Stratified sampling over equal-measure partitions of the unit cube.

Sampling (simple random, jittered/grid, Latin hypercube, Hilbert-curve),
discrepancy functionals, the kernel-space worst-case error and a replication
engine for expected discrepancies and integration errors.
"""

from .discrepancy import (DiscrepancyEstimate, SizeGuardError, l2_exact, l2_squared,
                          local_discrepancy, lp_estimate, star_exact_small)
from .experiments import (MomentReport, MomentSpec, RateFit, bound, estimate_moment,
                          fit_rate, random_l2_expectation)
from .hilbert import (HilbertParams, ScrambleTree, hilbert_cell_region, hilbert_cells,
                      hilbert_index, hilbert_map, scrambled_vdc, van_der_corput)
from .partition import (AnchoredBox, Cell, Partition, PartitionSpec, box_count,
                        build_partition, count_boundary_cells)
from .rkhs import (Integrand, approx_error, integrand_suite, kernel, mean_embedding,
                   representer, worst_case_error_identity)
from .sampling import (RngStream, SamplerSpec, make_sampler, read_points, sample,
                       sample_many, write_points)

__version__ = "0.1.0"
