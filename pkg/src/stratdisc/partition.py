"""Equal-measure partitions of the unit cube.

Three constructions are supported: the isometric grid (``m`` strata per axis),
the rectangular grid (``m_1 x ... x m_d`` strata) and the Hilbert-curve
partition, whose cells are images of the parameter intervals
``[i/N, (i+1)/N)`` under the Hilbert map. A ``trivial`` partition, where every
cell is the whole cube, models simple random sampling.

Grid cells are half-open ``[l, u)`` on every axis, except that cells touching
the upper face of the cube close that face, so the cells form an exact
disjoint cover of ``[0, 1]^d``.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

__all__ = [
    "AnchoredBox",
    "Cell",
    "Partition",
    "PartitionSpec",
    "box_count",
    "build_partition",
    "count_boundary_cells",
    "grid_corners",
    "as_points",
]

_INDEX_MAX = 2**63 - 1
KINDS = ("grid", "rect_grid", "hsfc", "trivial")


def as_points(points, d: Optional[int] = None) -> np.ndarray:
    """Validate and return ``points`` as a float64 array of shape (N, d)."""
    x = np.asarray(points, dtype=np.float64)
    if x.ndim == 1:
        x = x[:, None] if d == 1 else x[None, :]
    if x.ndim != 2 or x.shape[1] < 1:
        raise ValueError(f"points must have shape (N, d), got {x.shape}")
    if d is not None and x.shape[1] != d:
        raise ValueError(f"dimension mismatch: points have d={x.shape[1]}, expected {d}")
    if not np.all(np.isfinite(x)) or np.any(x < 0.0) or np.any(x > 1.0):
        raise ValueError("point coordinates must be finite and lie in [0, 1]")
    return x


@dataclass(frozen=True)
class AnchoredBox:
    """The box ``[0, upper)`` anchored at the origin."""

    upper: tuple

    def __post_init__(self):
        z = tuple(float(v) for v in np.atleast_1d(self.upper))
        if len(z) == 0 or any(not (0.0 <= v <= 1.0) for v in z):
            raise ValueError("box corner must lie in [0, 1]^d")
        object.__setattr__(self, "upper", z)

    @property
    def d(self) -> int:
        return len(self.upper)

    @property
    def volume(self) -> float:
        return float(np.prod(self.upper))


@dataclass(frozen=True)
class PartitionSpec:
    """Description of an equal-measure partition.

    Use the constructors :meth:`grid`, :meth:`rect_grid`, :meth:`hsfc` and
    :meth:`trivial` rather than the raw initializer.
    """

    d: int
    kind: str
    m: tuple = ()
    n: int = 0
    depth: Optional[int] = None

    def __post_init__(self):
        if self.d < 1:
            raise ValueError("dimension d must be >= 1")
        if self.kind not in KINDS:
            raise ValueError(f"unknown partition kind {self.kind!r}")
        if self.kind in ("grid", "rect_grid"):
            m = tuple(int(v) for v in self.m)
            if len(m) != self.d:
                raise ValueError("rect_grid needs one stratum count per axis")
            if any(v <= 0 for v in m):
                raise ValueError("stratum counts must be positive")
            n = math.prod(m)
            if n > _INDEX_MAX:
                raise OverflowError(f"cell count {n} overflows a 64-bit index")
            object.__setattr__(self, "m", m)
            object.__setattr__(self, "n", n)
        else:
            if self.n < 1:
                raise ValueError("cell count N must be >= 1")
            if self.kind == "hsfc":
                if self.d < 2:
                    raise ValueError("the Hilbert partition needs d >= 2")
                depth = self.depth if self.depth is not None else 62 // self.d
                if depth < 1 or self.d * depth > 62:
                    raise ValueError("hsfc depth must satisfy 1 <= d*depth <= 62")
                if self.n > 2 ** (self.d * depth):
                    raise ValueError("hsfc needs N <= 2**(d*depth)")
                object.__setattr__(self, "depth", depth)

    @classmethod
    def grid(cls, d: int, m: int) -> "PartitionSpec":
        if d < 1:
            raise ValueError("dimension d must be >= 1")
        if m < 1:
            raise ValueError("m must be >= 1")
        return cls(d=d, kind="grid", m=(m,) * d)

    @classmethod
    def rect_grid(cls, m: Sequence[int]) -> "PartitionSpec":
        return cls(d=len(m), kind="rect_grid", m=tuple(m))

    @classmethod
    def hsfc(cls, d: int, n: int, depth: Optional[int] = None) -> "PartitionSpec":
        return cls(d=d, kind="hsfc", n=n, depth=depth)

    @classmethod
    def trivial(cls, d: int, n: int) -> "PartitionSpec":
        return cls(d=d, kind="trivial", n=n)

    @property
    def N(self) -> int:
        return self.n

    @property
    def c1(self) -> Optional[float]:
        """Lower diameter constant: ``diam >= c1 * N**(-1/d)`` for every cell."""
        if self.kind in ("grid", "rect_grid"):
            return math.sqrt(self.d)
        if self.kind == "hsfc":
            # a set of measure 1/N has diameter at least (1/N)**(1/d)
            return 1.0
        return None

    @property
    def c2(self) -> Optional[float]:
        """Upper diameter constant: ``diam <= c2 * N**(-1/d)`` for every cell."""
        if self.kind == "grid":
            return math.sqrt(self.d)
        if self.kind == "rect_grid":
            return self.n ** (1.0 / self.d) * math.sqrt(sum(1.0 / v**2 for v in self.m))
        if self.kind == "hsfc":
            return 2.0 * math.sqrt(self.d + 3)
        return None

    @property
    def diameter_certified(self) -> bool:
        """Whether ``c2`` is a proven bound for this spec.

        Hilbert cells only carry the certificate when ``N = 2**(d*k)``.
        """
        if self.kind in ("grid", "rect_grid"):
            return True
        if self.kind == "hsfc":
            k, r = divmod(self.n.bit_length() - 1, self.d)
            return r == 0 and self.n == 2 ** (self.d * k)
        return False

    def to_dict(self) -> dict:
        out = {"d": self.d, "kind": self.kind}
        if self.kind == "grid":
            out["m"] = self.m[0]
        elif self.kind == "rect_grid":
            out["m"] = list(self.m)
        else:
            out["n"] = self.n
            if self.kind == "hsfc":
                out["depth"] = self.depth
        return out

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_dict(cls, obj: dict) -> "PartitionSpec":
        kind = obj["kind"]
        if kind == "grid":
            return cls.grid(int(obj["d"]), int(obj["m"]))
        if kind == "rect_grid":
            spec = cls.rect_grid([int(v) for v in obj["m"]])
            if "d" in obj and int(obj["d"]) != spec.d:
                raise ValueError("rect_grid 'd' disagrees with len('m')")
            return spec
        if kind == "hsfc":
            return cls.hsfc(int(obj["d"]), int(obj["n"]), obj.get("depth"))
        if kind == "trivial":
            return cls.trivial(int(obj["d"]), int(obj["n"]))
        raise ValueError(f"unknown partition kind {kind!r}")

    @classmethod
    def from_json(cls, text: str) -> "PartitionSpec":
        return cls.from_dict(json.loads(text))


@dataclass(frozen=True)
class Cell:
    """One cell of a partition.

    Axis-box cells carry ``lower``/``upper`` corners; Hilbert cells carry the
    parameter interval ``(a, b)`` whose image under the Hilbert map is the cell.
    """

    index: int
    kind: str
    measure: float
    lower: Optional[tuple] = None
    upper: Optional[tuple] = None
    a: Optional[float] = None
    b: Optional[float] = None

    @property
    def diameter(self) -> Optional[float]:
        if self.lower is None:
            return None
        return math.dist(self.lower, self.upper)


@dataclass(frozen=True)
class Partition:
    """Ordered list of the N cells of a partition, plus vectorized corners."""

    spec: PartitionSpec
    cells: tuple = field(repr=False)

    def __len__(self) -> int:
        return len(self.cells)

    def __iter__(self):
        return iter(self.cells)

    def __getitem__(self, i):
        return self.cells[i]

    @property
    def lowers(self) -> np.ndarray:
        return np.array([c.lower for c in self.cells], dtype=np.float64)

    @property
    def uppers(self) -> np.ndarray:
        return np.array([c.upper for c in self.cells], dtype=np.float64)

    def locate(self, points) -> np.ndarray:
        """Index of the (unique) grid cell containing each point."""
        if self.spec.kind not in ("grid", "rect_grid"):
            raise ValueError("locate is defined for axis-box partitions only")
        x = as_points(points, self.spec.d)
        idx = np.zeros(len(x), dtype=np.int64)
        for k, mk in enumerate(self.spec.m):
            edges = _axis_edges(mk)
            # cells are [edges[j], edges[j+1]) with the last one closed at 1
            j = np.searchsorted(edges, x[:, k], side="right") - 1
            j = np.clip(j, 0, mk - 1)
            idx = idx * mk + j
        return idx


def _axis_edges(m: int) -> np.ndarray:
    return np.array([j / m for j in range(m + 1)], dtype=np.float64)


def grid_corners(spec: PartitionSpec):
    """Lower and upper corners, shape (N, d), of the cells of a grid spec."""
    if spec.kind not in ("grid", "rect_grid"):
        raise ValueError("grid_corners needs a grid or rect_grid spec")
    idx = np.indices(spec.m).reshape(spec.d, -1).T
    lo = np.empty(idx.shape)
    hi = np.empty(idx.shape)
    for k, mk in enumerate(spec.m):
        edges = _axis_edges(mk)
        lo[:, k] = edges[idx[:, k]]
        hi[:, k] = edges[idx[:, k] + 1]
    return lo, hi


def build_partition(spec: PartitionSpec) -> Partition:
    """Materialize the ordered cells of ``spec``.

    Grid cells are ordered lexicographically with the first axis most
    significant; Hilbert cells are ordered by parameter interval.
    """
    n = spec.n
    measure = float(Fraction(1, n))
    cells = []
    if spec.kind in ("grid", "rect_grid"):
        lows, highs = grid_corners(spec)
        for i, (lo, hi) in enumerate(zip(lows.tolist(), highs.tolist())):
            cells.append(Cell(i, "axis_box", measure, lower=tuple(lo), upper=tuple(hi)))
    elif spec.kind == "hsfc":
        for i in range(n):
            cells.append(Cell(i, "hsfc_interval", measure, a=i / n, b=(i + 1) / n))
    else:
        # every cell is the whole cube; ``measure`` is its 1/N sampling weight
        lo, hi = (0.0,) * spec.d, (1.0,) * spec.d
        cells = [Cell(i, "axis_box", measure, lower=lo, upper=hi) for i in range(n)]
    return Partition(spec, tuple(cells))


def count_boundary_cells(spec: PartitionSpec, box: AnchoredBox) -> int:
    """Number of grid cells meeting the inner boundary of ``box``.

    The boundary consists of the faces ``x_k = z_k`` (restricted to the closed
    footprint ``0 <= x_j <= z_j``) that do not lie on the cube's own boundary.
    Cells are half-open, and comparisons are done in exact rational
    arithmetic, so the result never exceeds ``d * c2 * N**(1 - 1/d)``.
    """
    if spec.kind not in ("grid", "rect_grid"):
        raise ValueError("boundary-cell counting needs an axis-box partition")
    if box.d != spec.d:
        raise ValueError("dimension mismatch between box and partition")
    # last cell index along each axis whose lower edge is <= z_k
    last = []
    inner = []
    for zk, mk in zip(box.upper, spec.m):
        z = Fraction(zk)
        last.append(min(math.floor(z * mk), mk - 1))
        inner.append(0 < z < 1)
    if not any(inner):
        return 0
    within = math.prod(t + 1 for t in last)
    off_faces = math.prod(t + 1 - int(f) for t, f in zip(last, inner))
    return within - off_faces


def box_count(points, box) -> int:
    """Number of points strictly inside ``[0, z)`` on every axis."""
    z = np.asarray(box.upper if isinstance(box, AnchoredBox) else box, dtype=np.float64)
    x = np.asarray(points, dtype=np.float64)
    if x.ndim != 2 or x.shape[0] == 0:
        raise ValueError("points must be a nonempty (N, d) array")
    if x.shape[1] != z.shape[-1]:
        raise ValueError("dimension mismatch between points and box")
    return int(np.count_nonzero(np.all(x < z, axis=1)))
