"""Local discrepancy, L2 / Lp star discrepancy and exact star discrepancy.

All functionals use origin-anchored half-open boxes ``[0, z)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .partition import as_points
from .sampling import NODES, RngStream

__all__ = [
    "DiscrepancyEstimate",
    "SizeGuardError",
    "l2_exact",
    "l2_squared",
    "local_discrepancy",
    "lp_estimate",
    "lp_power_samples",
    "star_exact_small",
]

STAR_GUARD = 10**7


class SizeGuardError(ValueError):
    """Raised when an exact computation would exceed its size guard."""


@dataclass(frozen=True)
class DiscrepancyEstimate:
    """A discrepancy value ``L_p`` (not its p-th power) with provenance.

    ``stderr`` is the standard error of the ``L_p^p`` estimate and is ``None``
    for exact values.
    """

    p: float
    value: float
    variant: str = "exact"
    nodes: Optional[int] = None
    stderr: Optional[float] = None

    def to_dict(self) -> dict:
        p = "star" if math.isinf(self.p) else self.p
        return {"p": p, "value": self.value, "stderr": self.stderr}


def local_discrepancy(points, z) -> np.ndarray:
    """``A([0, z)) / N - prod(z)`` for one corner or an array of corners."""
    x = as_points(points)
    z = np.asarray(z, dtype=np.float64)
    if z.shape[-1] != x.shape[1]:
        raise ValueError("dimension mismatch between points and corner")
    inside = np.all(x < z[..., None, :], axis=-1)
    return inside.mean(axis=-1) - np.prod(z, axis=-1)


def l2_squared(points) -> np.ndarray:
    """Squared L2 star discrepancy by Warnock's closed form.

    Accepts one point set ``(N, d)`` or a batch ``(R, N, d)`` and costs
    ``O(N**2 d)`` per set.
    """
    x = np.asarray(points, dtype=np.float64)
    if x.ndim < 2 or x.shape[-2] < 1:
        raise ValueError("need at least one point")
    n, d = x.shape[-2:]
    single = np.prod((1.0 - x * x) / 2.0, axis=-1).sum(axis=-1)
    y = (1.0 - x).reshape(-1, n, d)
    pair = np.empty(len(y))
    # whole (N, N) products per set, or row blocks when N is large
    rows = min(n, max(1, 2**22 // n))
    step = max(1, 2**20 // (n * n)) if rows == n else 1
    for s in range(0, len(y), step):
        c = y[s:s + step]
        acc = np.zeros(len(c))
        for r in range(0, n, rows):
            blk = c[:, r:r + rows]
            prod = np.minimum(blk[:, :, None, 0], c[:, None, :, 0])
            for k in range(1, d):
                prod *= np.minimum(blk[:, :, None, k], c[:, None, :, k])
            acc += prod.sum(axis=(1, 2))
        pair[s:s + step] = acc
    pair = pair.reshape(x.shape[:-2])
    val = 3.0 ** (-d) - (2.0 / n) * single + pair / n**2
    return np.maximum(val, 0.0)


def l2_exact(points) -> DiscrepancyEstimate:
    """Exact L2 star discrepancy of a point set.

    Examples
    --------
    >>> round(l2_exact([[0.5]]).value ** 2, 12)
    0.083333333333
    """
    x = as_points(points)
    return DiscrepancyEstimate(2.0, float(math.sqrt(l2_squared(x))))


def _box_fraction(x: np.ndarray, z: np.ndarray, chunk: int = 4096) -> np.ndarray:
    n = x.shape[0]
    out = np.empty(len(z))
    for s in range(0, len(z), chunk):
        zc = z[s:s + chunk]
        inside = np.ones((len(zc), n), dtype=bool)
        for k in range(x.shape[1]):
            inside &= x[None, :, k] < zc[:, None, k]
        out[s:s + chunk] = inside.sum(axis=1) / n
    return out


def lp_power_samples(points, p: float, nodes: np.ndarray) -> np.ndarray:
    """``|local discrepancy|**p`` at each node ``z`` (rows of ``nodes``)."""
    x = as_points(points)
    z = np.asarray(nodes, dtype=np.float64)
    delta = _box_fraction(x, z) - np.prod(z, axis=1)
    return np.abs(delta) ** p


def lp_estimate(points, p: float, M: int, stream: RngStream) -> DiscrepancyEstimate:
    """Monte Carlo estimate of the Lp star discrepancy over ``M`` uniform nodes.

    Parameters
    ----------
    points : array_like, shape (N, d)
    p : float
        Exponent, ``p >= 1``.
    M : int
        Number of uniform integration nodes, ``M >= 2``.
    stream : RngStream
        Source of the nodes (substream ``NODES``).

    Returns
    -------
    DiscrepancyEstimate
        ``value`` is ``(mean |Delta|^p)^(1/p)``; ``stderr`` is the CLT
        standard error of the mean of ``|Delta|^p``.
    """
    if p < 1:
        raise ValueError("need p >= 1")
    if M < 2:
        raise ValueError("need at least two nodes")
    x = as_points(points)
    nodes = stream.generator(NODES).random((M, x.shape[1]))
    vals = lp_power_samples(x, p, nodes)
    mean = float(vals.mean())
    se = float(vals.std(ddof=1) / math.sqrt(M))
    return DiscrepancyEstimate(float(p), mean ** (1.0 / p), "monte_carlo", M, se)


def star_exact_small(points, guard: int = STAR_GUARD) -> DiscrepancyEstimate:
    """Exact star discrepancy by enumerating the critical grid.

    The grid on each axis is the set of point coordinates together with 1.
    At every grid corner ``z`` both one-sided terms
    ``prod(z) - A_open(z)/N`` and ``A_closed(z)/N - prod(z)`` are evaluated,
    using cumulative counts over the grid. Raises :class:`SizeGuardError` when
    ``N**d`` exceeds ``guard``.
    """
    x = as_points(points)
    n, d = x.shape
    if n**d > guard:
        raise SizeGuardError(f"N**d = {n}**{d} exceeds the exact star-discrepancy guard {guard}")
    axes = [np.union1d(x[:, k], [1.0]) for k in range(d)]
    ranks = tuple(np.searchsorted(axes[k], x[:, k]) for k in range(d))
    shape = tuple(len(a) for a in axes)
    hist = np.zeros(shape, dtype=np.int64)
    np.add.at(hist, ranks, 1)
    closed = hist
    for k in range(d):
        closed = np.cumsum(closed, axis=k)
    # open count at index idx is the closed count at idx - 1 on every axis
    opened = np.pad(closed, [(1, 0)] * d)[tuple(slice(0, s) for s in shape)]
    vol = np.ones(shape)
    for k, a in enumerate(axes):
        vol = vol * a.reshape([-1 if j == k else 1 for j in range(d)])
    val = max(float(np.max(vol - opened / n)), float(np.max(closed / n - vol)))
    return DiscrepancyEstimate(math.inf, val)
