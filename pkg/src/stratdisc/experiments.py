"""Replication engine, closed-form bound table and log-log rate fitting."""

from __future__ import annotations

import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Optional, Sequence

import numpy as np
from scipy.special import gamma

from .discrepancy import l2_squared, lp_power_samples
from .partition import PartitionSpec
from .rkhs import get_integrand
from .sampling import NODES, RngStream, SamplerSpec, sample_many

__all__ = [
    "BOUND_ALIASES",
    "BOUNDS",
    "CSV_HEADER",
    "MomentReport",
    "MomentSpec",
    "RateFit",
    "TARGETS",
    "bound",
    "estimate_moment",
    "fit_rate",
    "infer_bound",
    "random_l2_expectation",
]

TARGETS = ("lp_discrepancy_pth_power", "squared_l2", "mse_integration", "variance_of_mean")

BOUNDS = (
    "partition_mse", "grid_mse", "hsfc_mse", "lhs_variance", "random_mse",
    "partition_lp", "grid_lp", "hsfc_lp", "random_lp",
)

# short ids accepted on the command line
BOUND_ALIASES = {
    "thm3.3": "partition_mse",
    "cor3.4": "grid_mse",
    "cor3.5": "hsfc_mse",
    "thm3.6": "lhs_variance",
    "cor3.8": "random_mse",
    "thm4.1": "partition_lp",
    "cor4.2": "grid_lp",
    "cor4.3": "hsfc_lp",
    "cor4.5": "random_lp",
}

CSV_HEADER = "strategy,d,N,p,target,reps,seed,estimate,stderr,bound,bound_id,margin"


def _canonical(theorem_id: str) -> str:
    tid = BOUND_ALIASES.get(theorem_id.lower(), theorem_id)
    if tid not in BOUNDS:
        raise ValueError(f"unknown bound id {theorem_id!r}")
    return tid


def bound(theorem_id: str, d: int, N: int, p: float = 2.0,
          partition: Optional[PartitionSpec] = None, C: Optional[float] = None,
          c2: Optional[float] = None) -> float:
    """Closed-form upper bound on a second moment or p-th moment.

    ``*_mse`` ids bound the expected squared worst-case error over the unit
    ball of the kernel space (equivalently ``E[L2^2]``); ``*_lp`` ids bound
    ``E[L_p^p]``; ``lhs_variance`` bounds the variance of the Latin hypercube
    mean of an integrand with variance constant ``C``. ``partition_*`` ids need
    the upper diameter constant, passed as ``c2`` or through ``partition``.

    Examples
    --------
    >>> bound("grid_mse", d=2, N=16)
    0.03125
    """
    tid = _canonical(theorem_id)
    if d < 1 or N < 1:
        raise ValueError("need d >= 1 and N >= 1")
    if p < 1:
        raise ValueError("need p >= 1")
    if tid.startswith("partition"):
        if c2 is None:
            if partition is None or partition.c2 is None:
                raise ValueError(f"{tid} needs the diameter constant c2 or a partition")
            c2 = partition.c2
    rate = N ** (1.0 + 1.0 / d)
    lp_rate = N ** (p / 2.0 + p / (2.0 * d))
    if tid == "partition_mse":
        return d * c2 / rate
    if tid == "grid_mse":
        return d / rate
    if tid == "hsfc_mse":
        return 2.0 * d * math.sqrt(d + 3) / rate
    if tid == "lhs_variance":
        if C is None:
            raise ValueError("lhs_variance needs the variance constant C")
        if N < 2:
            raise ValueError("lhs_variance needs N >= 2")
        return C / (N - 1)
    if tid == "random_mse":
        return d**1.5 / N
    if tid == "partition_lp":
        return (d * c2) ** (p / 2.0) / lp_rate
    if tid == "grid_lp":
        return d ** (p / 2.0) / lp_rate
    if tid == "hsfc_lp":
        return (2.0 * d * math.sqrt(d + 3)) ** (p / 2.0) / lp_rate
    # random_lp: normal absolute moment times int (lambda(1-lambda))^(p/2) <= (2/(2+p))^d
    const = 2.0 ** (p / 2.0) / math.sqrt(math.pi) * gamma((1.0 + p) / 2.0)
    return const * (2.0 / (2.0 + p)) ** d * N ** (-p / 2.0)


def random_l2_expectation(d: int, N: int) -> float:
    """Exact ``E[L2^2]`` for N i.i.d. uniform points: ``(2**-d - 3**-d) / N``."""
    return (2.0 ** (-d) - 3.0 ** (-d)) / N


@dataclass(frozen=True)
class MomentSpec:
    """What to estimate by replication.

    ``target`` is one of ``lp_discrepancy_pth_power`` (``E[L_p^p]``),
    ``squared_l2`` (``E[L2^2]``), ``mse_integration`` (``E[(I_N f - I f)^2]``
    for ``integrand``) or ``variance_of_mean`` (the variance of the sample
    mean of ``integrand`` across replications). ``nodes`` is the Monte Carlo
    node count used for ``L_p`` with ``p != 2``; ``p = 2`` always uses the
    exact formula.
    """

    sampler: SamplerSpec
    p: float = 2.0
    target: str = "squared_l2"
    reps: int = 1000
    seed: int = 0
    integrand: Optional[str] = None
    nodes: int = 10_000

    def __post_init__(self):
        if self.target not in TARGETS:
            raise ValueError(f"unknown target {self.target!r}")
        if self.reps < 2:
            raise ValueError("need at least two replications")
        if self.p < 1:
            raise ValueError("need p >= 1")
        if self.target in ("squared_l2", "mse_integration") and self.p != 2:
            raise ValueError(f"{self.target} requires p = 2")
        if self.target in ("mse_integration", "variance_of_mean"):
            if self.integrand is None:
                raise ValueError(f"{self.target} needs an integrand")
            get_integrand(self.integrand, self.sampler.d)
        if self.nodes < 2:
            raise ValueError("need at least two nodes")
        if self.seed < 0:
            raise ValueError("seed must be non-negative")


@dataclass
class MomentReport:
    strategy: str
    d: int
    N: int
    p: float
    target: str
    reps: int
    seed: int
    estimate: float
    stderr: float
    bound: Optional[float] = None
    bound_id: Optional[str] = None
    margin: Optional[float] = None
    exact: Optional[float] = None
    runtime: float = field(default=0.0, compare=False)

    def to_dict(self, timing: bool = False) -> dict:
        out = asdict(self)
        if not timing:
            out.pop("runtime")
        return out

    def csv_row(self) -> str:
        def fmt(v):
            if v is None:
                return ""
            if isinstance(v, float):
                return "%.17g" % v
            return str(v)
        vals = [self.strategy, self.d, self.N, self.p, self.target, self.reps, self.seed,
                self.estimate, self.stderr, self.bound, self.bound_id, self.margin]
        return ",".join(fmt(v) for v in vals)


def infer_bound(spec: MomentSpec):
    """The ``(bound_id, value)`` matching the sampler and target, or ``(None, None)``."""
    s = spec.sampler
    label = s.label
    d, n, p = s.d, s.n, spec.p
    part = s.partition
    if spec.target == "variance_of_mean" or (spec.target == "mse_integration" and label == "lhs"):
        if label != "lhs" or n < 2:
            return None, None
        C = get_integrand(spec.integrand, d).variance
        return "lhs_variance", bound("lhs_variance", d, n, C=C)
    family = "lp" if spec.target == "lp_discrepancy_pth_power" else "mse"
    prefix = {"jittered": "grid", "rect_grid": "partition", "hsfc": "hsfc",
              "simple_random": "random"}.get(label)
    if prefix is None:
        return None, None
    tid = f"{prefix}_{family}"
    value = bound(tid, d, n, p, partition=part)
    if spec.target == "mse_integration":
        value *= get_integrand(spec.integrand, d).norm_h1k ** 2
    return tid, value


def _block_values(spec: MomentSpec, reps: Sequence[int]) -> np.ndarray:
    s = spec.sampler
    x = sample_many(s, spec.seed, reps)
    if spec.target == "squared_l2" or (spec.target == "lp_discrepancy_pth_power" and spec.p == 2):
        return l2_squared(x)
    if spec.target == "lp_discrepancy_pth_power":
        out = np.empty(len(reps))
        for j, r in enumerate(reps):
            nodes = RngStream(spec.seed, r).generator(NODES).random((spec.nodes, s.d))
            out[j] = lp_power_samples(x[j], spec.p, nodes).mean()
        return out
    f = get_integrand(spec.integrand, s.d)
    means = f(x).mean(axis=-1)
    if spec.target == "mse_integration":
        return (means - f.exact_integral) ** 2
    return means


def _rep_block(spec: MomentSpec) -> int:
    n = spec.sampler.n
    return max(1, min(4096, 2**20 // (n * n)))


def estimate_moment(spec: MomentSpec, workers: int = 1) -> MomentReport:
    """Run ``spec.reps`` independent replications and summarize them.

    Replication ``r`` uses the stream ``(seed, r)``; replications are grouped
    in blocks whose size depends only on ``(N, d)``, and results are reduced
    in replication order, so the output does not depend on ``workers``.
    """
    t0 = time.perf_counter()
    size = _rep_block(spec)
    blocks = [range(s, min(s + size, spec.reps)) for s in range(0, spec.reps, size)]
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(lambda b: _block_values(spec, b), blocks))
    else:
        parts = [_block_values(spec, b) for b in blocks]
    vals = np.concatenate(parts)
    R = len(vals)
    if spec.target == "variance_of_mean":
        dev = vals - vals.mean()
        est = float(dev @ dev / (R - 1))
        m4 = float(np.mean(dev**4))
        var_s2 = (m4 - est**2 * (R - 3) / (R - 1)) / R
        se = math.sqrt(max(var_s2, 0.0))
    else:
        est = float(vals.mean())
        se = float(vals.std(ddof=1) / math.sqrt(R))
    bid, bval = infer_bound(spec)
    s = spec.sampler
    exact = None
    if s.label == "simple_random" and (
            spec.target == "squared_l2" or (spec.target == "lp_discrepancy_pth_power" and spec.p == 2)):
        exact = random_l2_expectation(s.d, s.n)
    return MomentReport(
        strategy=s.label, d=s.d, N=s.n, p=float(spec.p), target=spec.target,
        reps=R, seed=spec.seed, estimate=est, stderr=se,
        bound=bval, bound_id=bid,
        margin=(bval / est if bval is not None and est > 0 else None),
        exact=exact, runtime=time.perf_counter() - t0,
    )


@dataclass(frozen=True)
class RateFit:
    pairs: tuple
    slope: float
    intercept: float
    r_squared: float

    def to_dict(self) -> dict:
        return {"slope": self.slope, "intercept": self.intercept,
                "r_squared": self.r_squared, "pairs": [list(p) for p in self.pairs]}


def fit_rate(pairs) -> RateFit:
    """Least-squares fit of ``log(estimate) = intercept + slope * log(N)``.

    Examples
    --------
    >>> fit = fit_rate([(n, n ** -1.5) for n in (4, 16, 64)])
    >>> round(fit.slope, 12), round(fit.r_squared, 12)
    (-1.5, 1.0)
    """
    pairs = tuple((float(n), float(e)) for n, e in pairs)
    if len(pairs) < 3:
        raise ValueError("need at least three (N, estimate) pairs")
    if any(n <= 0 or e <= 0 for n, e in pairs):
        raise ValueError("N and estimates must be positive")
    lx = np.log([n for n, _ in pairs])
    ly = np.log([e for _, e in pairs])
    slope, intercept = np.polyfit(lx, ly, 1)
    resid = ly - (intercept + slope * lx)
    ss_tot = float(np.sum((ly - ly.mean()) ** 2))
    r2 = 1.0 - float(resid @ resid) / ss_tot if ss_tot > 0 else 1.0
    return RateFit(pairs, float(slope), float(intercept), r2)
