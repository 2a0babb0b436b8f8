"""
The Hilbert curve as a partition of the square
===============================================

Cutting [0, 1) into N equal intervals and pushing each through the Hilbert
curve gives N equal-measure regions whose diameter shrinks like
N^(-1/d). Sampling one point per region is Hilbert-curve stratification.
"""

import math

import numpy as np

from stratdisc import HilbertParams, RngStream, hilbert_cell_region, hilbert_cells, make_sampler, sample

###############################################################################
# The level-2 curve in two dimensions visits the 16 cells of a 4 x 4 grid.
# Consecutive cells share a face.

params = HilbertParams(d=2, depth=2)
order = hilbert_cells(params, np.arange(params.n_cells))
grid = np.full((4, 4), -1)
grid[order[:, 1], order[:, 0]] = np.arange(16)
print("visit order (row = y, from the top):")
print(grid[::-1])

###############################################################################
# Each quarter of the parameter interval fills one quadrant.

for i in range(4):
    cells = hilbert_cell_region(params, i / 4, (i + 1) / 4)
    print(f"[{i}/4, {i + 1}/4) -> cells {cells.tolist()}")

###############################################################################
# Region diameters against the locality bound 2 sqrt(d+3) (b - a)^(1/d).

params = HilbertParams(d=2, depth=5)
cells = hilbert_cells(params, np.arange(params.n_cells))
for n in (4, 16, 64, 256):
    blocks = cells.reshape(n, -1, 2)
    span = blocks.max(axis=1) + 1 - blocks.min(axis=1)
    diam = np.sqrt((span.astype(float) ** 2).sum(axis=1)).max() / params.side
    print(f"N={n:4d}  largest diameter {diam:.4f}  bound {2 * math.sqrt(5) / math.sqrt(n):.4f}")

###############################################################################
# One Hilbert-stratified draw of 16 points.

x = sample(make_sampler("hsfc", 2, 16), RngStream(seed=7))
print(np.round(x, 3))
