"""Random point sets: simple random, stratified, Latin hypercube and Hilbert-curve sampling.

Every sampler draws from an explicit :class:`RngStream`, so a point set is a
pure function of ``(spec, seed, replication)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Optional

import numpy as np

from .hilbert import HilbertParams, hilbert_cells
from .partition import PartitionSpec, grid_corners

__all__ = [
    "RngStream",
    "SamplerSpec",
    "STRATEGIES",
    "read_points",
    "sample",
    "make_sampler",
    "sample_many",
    "write_points",
]

STRATEGIES = ("simple_random", "stratified", "lhs", "hsfc")

# substream keys
POINTS = 0
NODES = 1
_LHS_AXIS = 2


@dataclass(frozen=True)
class RngStream:
    """Deterministic random stream identified by ``(seed, replication)``.

    ``generator(key)`` returns an independent numpy ``Generator`` for each
    integer ``key``; equal arguments always give identical draws, whatever the
    execution order or thread count.
    """

    seed: int
    replication: int = 0

    def __post_init__(self):
        if self.seed < 0 or self.replication < 0:
            raise ValueError("seed and replication must be non-negative")

    def generator(self, key: int = POINTS) -> np.random.Generator:
        ss = np.random.SeedSequence(self.seed, spawn_key=(self.replication, key))
        return np.random.default_rng(ss)


@dataclass(frozen=True)
class SamplerSpec:
    """Which sampler to run and at what size.

    ``stratified`` takes a grid, rect_grid or trivial partition; ``hsfc``
    takes an hsfc partition; ``simple_random`` and ``lhs`` need none.
    """

    strategy: str
    d: int
    n: int
    partition: Optional[PartitionSpec] = None
    seed: int = 0

    def __post_init__(self):
        if self.strategy not in STRATEGIES:
            raise ValueError(f"unknown strategy {self.strategy!r}")
        if self.d < 1 or self.n < 1:
            raise ValueError("need d >= 1 and N >= 1")
        if self.strategy in ("stratified", "hsfc"):
            part = self.partition
            if part is None:
                raise ValueError(f"{self.strategy} sampling needs a partition")
            if part.d != self.d or part.n != self.n:
                raise ValueError(
                    f"partition has d={part.d}, N={part.n}; sampler wants d={self.d}, N={self.n}")
            want = ("hsfc",) if self.strategy == "hsfc" else ("grid", "rect_grid", "trivial")
            if part.kind not in want:
                raise ValueError(f"{self.strategy} sampling cannot use a {part.kind} partition")

    @property
    def label(self) -> str:
        """Short name used in reports: jittered, rect_grid, hsfc, lhs, simple_random."""
        if self.strategy == "stratified":
            return {"grid": "jittered", "rect_grid": "rect_grid",
                    "trivial": "simple_random"}[self.partition.kind]
        return self.strategy


class _Plan:
    """Per-spec precomputation shared by every replication."""

    def __init__(self, spec: SamplerSpec):
        self.spec = spec
        kind = spec.partition.kind if spec.partition is not None else None
        if spec.strategy == "stratified" and kind in ("grid", "rect_grid"):
            self.lower, self.upper = grid_corners(spec.partition)
            self.width = self.upper - self.lower
        if spec.strategy == "hsfc":
            self.params = HilbertParams(spec.d, spec.partition.depth)
            total, n = self.params.n_cells, spec.n
            # integer cell ranges [ceil(i*total/n), ceil((i+1)*total/n))
            edges = [-((-i * total) // n) for i in range(n + 1)]
            self.cell_lo = np.array(edges[:-1], dtype=np.int64)
            self.cell_hi = np.array(edges[1:], dtype=np.int64)

    def draw(self, stream: RngStream) -> np.ndarray:
        spec = self.spec
        g = stream.generator(POINTS)
        n, d = spec.n, spec.d
        if spec.strategy == "simple_random" or (
                spec.strategy == "stratified" and spec.partition.kind == "trivial"):
            return g.random((n, d))
        if spec.strategy == "stratified":
            x = self.lower + g.random((n, d)) * self.width
            # keep points inside their half-open cell after rounding
            return np.where(x < self.upper, x, np.where(self.upper < 1.0,
                            np.nextafter(self.upper, 0.0), self.upper))
        if spec.strategy == "lhs":
            u = g.random((n, d))
            perms = np.stack([stream.generator(_LHS_AXIS + j).permutation(n)
                              for j in range(d)], axis=1)
            return (perms + u) / n
        raise ValueError("hsfc draws go through _draw_hsfc")

    def finish_hsfc(self, h: np.ndarray, offset: np.ndarray) -> np.ndarray:
        corners = hilbert_cells(self.params, h.astype(np.uint64)).astype(np.float64)
        return np.ldexp(corners + offset, -self.params.depth)


@lru_cache(maxsize=64)
def _plan(spec: SamplerSpec) -> _Plan:
    return _Plan(spec)


def _draw_hsfc(plan: _Plan, stream: RngStream):
    # a uniform level-K cell among those covering I_i, then a uniform point in it
    g = stream.generator(POINTS)
    h = g.integers(plan.cell_lo, plan.cell_hi)
    offset = g.random((plan.spec.n, plan.spec.d))
    return h, offset


def sample(spec: SamplerSpec, stream: RngStream) -> np.ndarray:
    """Draw one point set of shape ``(N, d)``.

    Examples
    --------
    >>> spec = SamplerSpec("stratified", 2, 4, PartitionSpec.grid(2, 2))
    >>> sample(spec, RngStream(seed=1)).shape
    (4, 2)
    """
    return sample_many(spec, stream.seed, [stream.replication])[0]


def sample_many(spec: SamplerSpec, seed: int, replications) -> np.ndarray:
    """Point sets for several replications, shape ``(R, N, d)``.

    Replication ``r`` equals ``sample(spec, RngStream(seed, r))`` bit for bit.
    """
    plan = _plan(spec)
    reps = list(replications)
    if spec.strategy == "hsfc":
        hs, offs = zip(*(_draw_hsfc(plan, RngStream(seed, r)) for r in reps))
        return plan.finish_hsfc(np.stack(hs), np.stack(offs))
    return np.stack([plan.draw(RngStream(seed, r)) for r in reps])


def make_sampler(strategy: str, d: int, n: int, m=None, depth=None, seed: int = 0) -> SamplerSpec:
    """Build a :class:`SamplerSpec` from a short strategy name.

    Names: ``simple_random``, ``jittered`` (isometric grid, ``n = m**d``),
    ``rect_grid`` (``m`` lists the strata per axis), ``hsfc`` (``depth``
    optional), ``lhs`` and ``stratified`` (an alias of ``jittered``).
    """
    if strategy in ("jittered", "stratified", "grid"):
        side = round(n ** (1.0 / d)) if m is None else int(m)
        if side**d != n:
            raise ValueError(f"jittered sampling needs N = m**d; got N={n}, d={d}")
        return SamplerSpec("stratified", d, n, PartitionSpec.grid(d, side), seed)
    if strategy == "rect_grid":
        if m is None:
            raise ValueError("rect_grid needs the strata counts m")
        part = PartitionSpec.rect_grid(list(m))
        if part.d != d or part.n != n:
            raise ValueError("rect_grid strata disagree with d and N")
        return SamplerSpec("stratified", d, n, part, seed)
    if strategy == "hsfc":
        return SamplerSpec("hsfc", d, n, PartitionSpec.hsfc(d, n, depth), seed)
    if strategy in ("simple_random", "lhs"):
        return SamplerSpec(strategy, d, n, None, seed)
    raise ValueError(f"unknown strategy {strategy!r}")


# --------------------------------------------------------------------------
# point files: "d N" header, then one point per line


def write_points(path, points) -> None:
    x = np.asarray(points, dtype=np.float64)
    if x.ndim != 2:
        raise ValueError("points must be an (N, d) array")
    n, d = x.shape
    with open(path, "w") as fh:
        fh.write(f"{d} {n}\n")
        for row in x:
            fh.write(" ".join("%.17g" % v for v in row) + "\n")


def read_points(path) -> np.ndarray:
    with open(path) as fh:
        header = fh.readline().split()
        if len(header) != 2:
            raise ValueError("point file must start with 'd N'")
        d, n = int(header[0]), int(header[1])
        rows = [line.split() for line in fh if line.strip()]
    if len(rows) != n or any(len(r) != d for r in rows):
        raise ValueError(f"point file declares {n} points in d={d} but has a different shape")
    x = np.array(rows, dtype=np.float64).reshape(n, d)
    if not np.all(np.isfinite(x)) or np.any(x < 0.0) or np.any(x > 1.0):
        raise ValueError("point coordinates must lie in [0, 1]")
    return x
