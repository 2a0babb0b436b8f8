"""The Sobolev space with kernel ``K(x, y) = prod_k (1 - max(x_k, y_k))``.

Functions in this space vanish on the upper faces ``x_k = 1`` and carry the
inner product ``<f, g> = int (d^d f / dx)(d^d g / dx)``. The integration error
of any point set is the inner product of ``f`` with the representer ``h``, and
``||h||`` is the L2 star discrepancy of the point set.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from scipy.special import gamma

from .discrepancy import l2_exact
from .partition import as_points

__all__ = [
    "Integrand",
    "approx_error",
    "h1k_inner",
    "integrand_suite",
    "get_integrand",
    "kernel",
    "kernel_mixed_derivative",
    "mean_embedding",
    "representer",
    "representer_mixed_derivative",
    "worst_case_error_identity",
]


def _pair(x, y):
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if x.shape[-1] != y.shape[-1]:
        raise ValueError("dimension mismatch")
    return x, y


def kernel(x, y) -> np.ndarray:
    """``prod_k (1 - max(x_k, y_k))``, broadcasting over leading axes."""
    x, y = _pair(x, y)
    return np.prod(1.0 - np.maximum(x, y), axis=-1)


def kernel_mixed_derivative(t, y) -> np.ndarray:
    """Mixed first derivative of ``K(., y)`` at ``t``: ``prod_k -[t_k > y_k]``."""
    t, y = _pair(t, y)
    return np.prod(-(t > y).astype(np.float64), axis=-1)


def mean_embedding(z) -> np.ndarray:
    """``int K(z, x) dx = prod_k (1 - z_k**2) / 2``."""
    z = np.asarray(z, dtype=np.float64)
    return np.prod((1.0 - z * z) / 2.0, axis=-1)


def representer(points, z) -> np.ndarray:
    """Representer of the integration error, ``h(z) = int K(z, x) dx - mean_n K(z, x_n)``."""
    x = as_points(points)
    z = np.asarray(z, dtype=np.float64)
    if z.shape[-1] != x.shape[1]:
        raise ValueError("dimension mismatch")
    return mean_embedding(z) - kernel(z[..., None, :], x).mean(axis=-1)


def representer_mixed_derivative(points, t) -> np.ndarray:
    """Mixed derivative of ``h``; its magnitude is the local discrepancy at ``t``."""
    x = as_points(points)
    t = np.asarray(t, dtype=np.float64)
    return np.prod(-t, axis=-1) - kernel_mixed_derivative(t[..., None, :], x).mean(axis=-1)


def h1k_inner(df: Callable, dg: Callable, d: int, breaks=None, order: int = 20) -> float:
    """``int df * dg`` over the cube by tensor Gauss-Legendre quadrature.

    ``df`` and ``dg`` are mixed derivatives taking an ``(M, d)`` array.
    ``breaks[k]`` lists interior breakpoints on axis ``k`` where the
    integrand is discontinuous; the rule is applied on each sub-interval.
    """
    gx, gw = np.polynomial.legendre.leggauss(order)
    nodes, weights = [], []
    for k in range(d):
        cuts = np.unique(np.concatenate([[0.0, 1.0], np.asarray(breaks[k] if breaks else [])]))
        cuts = cuts[(cuts >= 0.0) & (cuts <= 1.0)]
        a, b = cuts[:-1], cuts[1:]
        half = (b - a)[:, None] / 2.0
        nodes.append(((a + b)[:, None] / 2.0 + half * gx).ravel())
        weights.append((half * gw).ravel())
    grid = np.stack(np.meshgrid(*nodes, indexing="ij"), axis=-1).reshape(-1, d)
    w = weights[0]
    for wk in weights[1:]:
        w = np.multiply.outer(w, wk)
    return float(np.sum(w.ravel() * df(grid) * dg(grid)))


def worst_case_error_identity(points) -> tuple:
    """Integration error of the normalized representer, and the L2 discrepancy.

    ``f* = h / ||h||`` has unit norm, and its integration error equals
    ``||h||``, the L2 star discrepancy; the two returned numbers agree to
    rounding. The integral and the quadrature sum of ``h`` are computed from
    the kernel, independently of Warnock's formula.
    """
    x = as_points(points)
    l2 = l2_exact(x).value
    if l2 == 0.0:
        raise ZeroDivisionError("representer has zero norm")
    d = x.shape[1]
    exact = (3.0 ** (-d) - mean_embedding(x).mean()) / l2
    approx = representer(x, x).mean() / l2
    return abs(exact - approx), l2


# --------------------------------------------------------------------------
# test integrands


@dataclass(frozen=True)
class Integrand:
    """Test function with closed-form integral, norms and variance constant.

    ``norm_dq(q)`` is ``(int |d^d f / dx|^q)^(1/q)`` (``q = inf`` gives the
    sup norm); ``norm_h1k`` equals ``norm_dq(2)``; ``variance`` is
    ``int (f - I(f))^2``; ``boundary_ok`` means ``f`` vanishes whenever some
    coordinate equals 1.
    """

    id: str
    d: int
    f: Callable = field(repr=False)
    mixed_derivative: Callable = field(repr=False)
    exact_integral: float
    _axis_norm: Callable = field(repr=False)
    variance: Optional[float] = None
    boundary_ok: bool = True

    def __call__(self, x) -> np.ndarray:
        return self.f(np.asarray(x, dtype=np.float64))

    def norm_dq(self, q: float) -> float:
        return self._axis_norm(q) ** self.d

    @property
    def norm_h1k(self) -> float:
        return self.norm_dq(2.0)


def _abs_cos_moment(q: float) -> float:
    # int_0^1 |cos(pi x)|^q dx
    return gamma((q + 1) / 2) / (math.sqrt(math.pi) * gamma(q / 2 + 1))


def integrand_suite(d: int) -> list:
    if d < 1:
        raise ValueError("need d >= 1")
    f1 = Integrand(
        "f1", d,
        f=lambda x: np.prod(1.0 - x, axis=-1),
        mixed_derivative=lambda x: np.full(x.shape[:-1], (-1.0) ** d),
        exact_integral=2.0 ** (-d),
        _axis_norm=lambda q: 1.0,
        variance=3.0 ** (-d) - 4.0 ** (-d),
    )
    f2 = Integrand(
        "f2", d,
        f=lambda x: np.prod(1.0 - x * x, axis=-1),
        mixed_derivative=lambda x: np.prod(-2.0 * x, axis=-1),
        exact_integral=(2.0 / 3.0) ** d,
        _axis_norm=lambda q: 2.0 if math.isinf(q) else 2.0 / (q + 1.0) ** (1.0 / q),
        variance=(8.0 / 15.0) ** d - (4.0 / 9.0) ** d,
    )
    f3 = Integrand(
        "f3", d,
        f=lambda x: np.prod(np.sin(np.pi * x), axis=-1),
        mixed_derivative=lambda x: np.prod(np.pi * np.cos(np.pi * x), axis=-1),
        exact_integral=(2.0 / math.pi) ** d,
        _axis_norm=lambda q: math.pi if math.isinf(q) else math.pi * _abs_cos_moment(q) ** (1.0 / q),
        variance=0.5**d - (4.0 / math.pi**2) ** d,
    )
    return [f1, f2, f3]


def get_integrand(name: str, d: int) -> Integrand:
    for f in integrand_suite(d):
        if f.id == name:
            return f
    raise KeyError(f"unknown integrand {name!r}")


def approx_error(f: Integrand, points) -> float:
    """``|mean_n f(x_n) - I(f)|``."""
    x = as_points(points, f.d)
    return float(abs(np.mean(f(x)) - f.exact_integral))
