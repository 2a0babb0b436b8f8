"""Van der Corput points, nested uniform scrambling and the Hilbert curve.

The d-dimensional Hilbert curve follows Skilling's Gray-code construction
("Programming the Hilbert curve", AIP Conf. Proc. 707, 2004). At depth ``K``
the parameter interval ``[0, 1)`` is cut into ``2**(d*K)`` equal pieces; piece
``h`` is sent to the level-``K`` subcube whose integer corner is
``hilbert_cells(params, h)``. The curve starts at the origin and consecutive
subcubes share a face.
"""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass
from typing import Optional

import numpy as np

__all__ = [
    "HilbertParams",
    "ScrambleTree",
    "default_digits",
    "hilbert_cell_region",
    "hilbert_cells",
    "hilbert_index",
    "hilbert_map",
    "point_cell_index",
    "region_contains",
    "scrambled_vdc",
    "scrambled_vdc_points",
    "van_der_corput",
    "van_der_corput_points",
]

ORIENTATION = "skilling-gray"
_U1 = np.uint64(1)


@dataclass(frozen=True)
class HilbertParams:
    """Dimension ``d`` and recursion depth ``depth`` of the discrete curve."""

    d: int
    depth: Optional[int] = None
    orientation: str = ORIENTATION

    def __post_init__(self):
        if self.d < 2:
            raise ValueError("Hilbert curve needs d >= 2")
        depth = 62 // self.d if self.depth is None else int(self.depth)
        if depth < 1 or self.d * depth > 62:
            raise ValueError("need 1 <= depth and d*depth <= 62")
        if self.orientation != ORIENTATION:
            raise ValueError(f"unsupported orientation {self.orientation!r}")
        object.__setattr__(self, "depth", depth)

    @property
    def bits(self) -> int:
        return self.d * self.depth

    @property
    def n_cells(self) -> int:
        return 1 << self.bits

    @property
    def side(self) -> int:
        return 1 << self.depth


def _index_to_transpose(h: np.ndarray, d: int, K: int) -> list:
    X = [np.zeros(h.shape, dtype=np.uint64) for _ in range(d)]
    for level in range(K):
        for j in range(d):
            shift = np.uint64(d * K - 1 - (level * d + j))
            X[j] |= ((h >> shift) & _U1) << np.uint64(K - 1 - level)
    return X


def _transpose_to_index(X: list, d: int, K: int) -> np.ndarray:
    h = np.zeros(X[0].shape, dtype=np.uint64)
    for level in range(K):
        for j in range(d):
            bit = (X[j] >> np.uint64(K - 1 - level)) & _U1
            h |= bit << np.uint64(d * K - 1 - (level * d + j))
    return h


def _transpose_to_axes(X: list, d: int, K: int) -> list:
    X = [x.copy() for x in X]
    top = np.uint64(2) << np.uint64(K - 1)
    # Gray decode
    t = X[d - 1] >> _U1
    for i in range(d - 1, 0, -1):
        X[i] ^= X[i - 1]
    X[0] ^= t
    # undo excess work
    q = np.uint64(2)
    while q != top:
        p = q - _U1
        for i in range(d - 1, -1, -1):
            hit = (X[i] & q) != 0
            t = np.where(hit, np.uint64(0), (X[0] ^ X[i]) & p)
            X[0] ^= np.where(hit, p, t)
            if i:
                X[i] ^= t
        q <<= _U1
    return X


def _axes_to_transpose(X: list, d: int, K: int) -> list:
    X = [x.copy() for x in X]
    m = _U1 << np.uint64(K - 1)
    # inverse undo
    q = m
    while q > _U1:
        p = q - _U1
        for i in range(d):
            hit = (X[i] & q) != 0
            t = np.where(hit, np.uint64(0), (X[0] ^ X[i]) & p)
            X[0] ^= np.where(hit, p, t)
            if i:
                X[i] ^= t
        q >>= _U1
    # Gray encode
    for i in range(1, d):
        X[i] ^= X[i - 1]
    t = np.zeros(X[0].shape, dtype=np.uint64)
    q = m
    while q > _U1:
        t ^= np.where((X[d - 1] & q) != 0, q - _U1, np.uint64(0))
        q >>= _U1
    for i in range(d):
        X[i] ^= t
    return X


def hilbert_cells(params: HilbertParams, h) -> np.ndarray:
    """Integer corners (shape ``(..., d)``) of the level-``K`` cells with indices ``h``."""
    h = np.asarray(h, dtype=np.uint64)
    d, K = params.d, params.depth
    X = _transpose_to_axes(_index_to_transpose(h, d, K), d, K)
    return np.stack(X, axis=-1).astype(np.int64)


def hilbert_index(params: HilbertParams, cells) -> np.ndarray:
    """Inverse of :func:`hilbert_cells`: curve index of integer cell corners."""
    c = np.asarray(cells, dtype=np.int64)
    if c.shape[-1] != params.d:
        raise ValueError("cell coordinates must have trailing dimension d")
    if np.any(c < 0) or np.any(c >= params.side):
        raise ValueError("cell coordinates out of range")
    d, K = params.d, params.depth
    X = [c[..., j].astype(np.uint64) for j in range(d)]
    return _transpose_to_index(_axes_to_transpose(X, d, K), d, K).astype(np.int64)


def hilbert_map(params: HilbertParams, u) -> np.ndarray:
    """Map parameters ``u`` in ``[0, 1)`` to points of ``[0, 1)^d``.

    The level-``K`` cell containing ``u`` gives the lower corner; the
    fractional position of ``u`` inside its parameter cell moves the point
    along the cell's main diagonal. The point therefore stays in the cell of
    ``u`` and is within ``sqrt(d) * 2**-K`` of the continuous curve.
    """
    u = np.asarray(u, dtype=np.float64)
    if np.any(~np.isfinite(u)) or np.any(u < 0.0) or np.any(u >= 1.0):
        raise ValueError("hilbert_map needs u in [0, 1)")
    scaled = np.ldexp(u, params.bits)
    h = np.floor(scaled)
    frac = (scaled - h)[..., None]
    lo = hilbert_cells(params, h.astype(np.uint64)).astype(np.float64)
    return np.ldexp(lo + frac, -params.depth)


def point_cell_index(params: HilbertParams, points) -> np.ndarray:
    """Curve index of the level-``K`` cell containing each point.

    Cells are half-open; points on the upper face go to the last cell.
    """
    x = np.asarray(points, dtype=np.float64)
    c = np.floor(np.ldexp(x, params.depth)).astype(np.int64)
    c = np.clip(c, 0, params.side - 1)
    return hilbert_index(params, c)


def _aligned_index(params: HilbertParams, t: float) -> int:
    scaled = math.ldexp(t, params.bits)
    if scaled != math.floor(scaled):
        raise ValueError(f"{t!r} is not a multiple of 2**-{params.bits}")
    return int(scaled)


def hilbert_cell_region(params: HilbertParams, a: float, b: float,
                        max_cells: int = 1 << 24) -> np.ndarray:
    """Integer corners of the level-``K`` cells making up ``H([a, b))``.

    ``a`` and ``b`` must be multiples of ``2**-(d*K)``. The region has measure
    exactly ``b - a``: one cell of volume ``2**-(d*K)`` per parameter cell.
    """
    if not (0.0 <= a < b <= 1.0):
        raise ValueError("need 0 <= a < b <= 1")
    lo, hi = _aligned_index(params, a), _aligned_index(params, b)
    if hi - lo > max_cells:
        raise ValueError(f"region has {hi - lo} cells, above max_cells={max_cells}")
    return hilbert_cells(params, np.arange(lo, hi, dtype=np.uint64))


def region_contains(params: HilbertParams, a: float, b: float, points) -> np.ndarray:
    """Whether each point lies in the level-``K`` cells of ``H([a, b))``."""
    lo, hi = _aligned_index(params, a), _aligned_index(params, b)
    idx = point_cell_index(params, points)
    return (idx >= lo) & (idx < hi)


# --------------------------------------------------------------------------
# van der Corput and nested uniform scrambling


def van_der_corput(b: int, i: int) -> float:
    """Radical inverse of ``i - 1`` in base ``b`` (the i-th point, i >= 1)."""
    if b < 2 or i < 1:
        raise ValueError("need base >= 2 and index >= 1")
    n, num, den = i - 1, 0, 1
    while n:
        n, r = divmod(n, b)
        num = num * b + r
        den *= b
    return num / den


def van_der_corput_points(b: int, n: int) -> np.ndarray:
    """The first ``n`` van der Corput points in base ``b``."""
    return np.array([van_der_corput(b, i) for i in range(1, n + 1)])


def default_digits(b: int) -> int:
    """Truncation depth: 32 base-2 digits, or the same resolution in base ``b``."""
    return 32 if b == 2 else math.ceil(32 / math.log2(b))


class ScrambleTree:
    """Lazily drawn digit permutations for a nested uniform scramble.

    The permutation attached to a digit prefix is derived from
    ``(seed, prefix)`` alone, so it does not depend on the order in which
    prefixes are visited; drawn permutations are memoized.

    Parameters
    ----------
    base : int
        Digit base ``b >= 2``.
    seed : int
        Non-negative seed.
    identity : bool
        Test hook: every permutation is the identity.
    """

    def __init__(self, base: int = 2, seed: int = 0, identity: bool = False):
        if base < 2:
            raise ValueError("base must be >= 2")
        if seed < 0:
            raise ValueError("seed must be non-negative")
        self.base = base
        self.seed = seed
        self.identity = identity
        self._perms: dict = {}
        self._lock = threading.Lock()

    def permutation(self, prefix: tuple) -> np.ndarray:
        perm = self._perms.get(prefix)
        if perm is None:
            if self.identity:
                perm = np.arange(self.base)
            else:
                ss = np.random.SeedSequence(self.seed, spawn_key=(0, len(prefix), *prefix))
                perm = np.random.default_rng(ss).permutation(self.base)
            with self._lock:
                perm = self._perms.setdefault(prefix, perm)
        return perm

    def tail(self, digits: tuple) -> float:
        ss = np.random.SeedSequence(self.seed, spawn_key=(1, len(digits), *digits))
        return float(np.random.default_rng(ss).random())

    def __len__(self) -> int:
        return len(self._perms)


def scrambled_vdc(tree: ScrambleTree, i: int, J: Optional[int] = None,
                  randomize_tail: bool = False) -> float:
    """Scrambled van der Corput point ``x_i`` truncated to ``J`` digits.

    Digit ``j`` of ``i - 1`` (least significant first) is replaced by
    ``pi_prefix(y_j)`` where ``prefix`` holds the original lower digits.
    With ``randomize_tail`` a uniform value fills the digits past ``J``.
    """
    if i < 1:
        raise ValueError("index must be >= 1")
    b = tree.base
    J = default_digits(b) if J is None else J
    if J < 1:
        raise ValueError("need J >= 1")
    n = i - 1
    y = []
    for _ in range(J):
        n, r = divmod(n, b)
        y.append(r)
    num = 0
    for j in range(J):
        num = num * b + int(tree.permutation(tuple(y[:j]))[y[j]])
    x = num / b**J
    if randomize_tail:
        x += tree.tail(tuple(y)) / b**J
    return x


def scrambled_vdc_points(tree: ScrambleTree, n: int, J: Optional[int] = None,
                         randomize_tail: bool = False) -> np.ndarray:
    return np.array([scrambled_vdc(tree, i, J, randomize_tail) for i in range(1, n + 1)])
