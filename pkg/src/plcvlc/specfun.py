"""Special functions and Gauss-Legendre quadrature used across the toolkit.

The Gaussian CDF and the upper incomplete gamma function are thin wrappers
around scipy's cephes kernels (erfc-based ndtr, series/continued-fraction
igamc), which implement exactly the standard algorithms and accept arrays.
Quadrature rules are computed here by Newton iteration on the Legendre
polynomials so that node symmetry is exact by construction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy import special as _sp

MAX_QUAD_ORDER = 256
MAX_BINOMIAL_N = 64


@dataclass(frozen=True)
class QuadratureRule:
    """Nodes and weights of a Gauss-Legendre rule on [-1, 1].

    Nodes are strictly increasing and symmetric about zero; weights are
    positive and sum to 2. A rule of order n integrates polynomials up to
    degree 2n - 1 exactly.
    """

    order: int
    nodes: tuple[float, ...]
    weights: tuple[float, ...]

    def __post_init__(self):
        if self.order < 1 or len(self.nodes) != self.order or len(self.weights) != self.order:
            raise ValueError("inconsistent quadrature rule")

    def integrate(self, f, a: float, b: float) -> float:
        """Integral of f over [a, b] via the affine map to [-1, 1]."""
        half = 0.5 * (b - a)
        mid = 0.5 * (b + a)
        x = half * np.asarray(self.nodes) + mid
        return half * float(np.dot(self.weights, f(x)))


def std_normal_cdf(x):
    """CDF of the standard Gaussian, Phi(x). Accepts scalars or arrays."""
    return _sp.ndtr(x)


def std_normal_log_cdf(x):
    """log Phi(x), accurate far into the lower tail."""
    return _sp.log_ndtr(x)


def upper_incomplete_gamma(p, x):
    """Upper incomplete gamma Gamma(p, x) = int_x^inf t^(p-1) e^-t dt.

    Requires p > 0 and x >= 0; Gamma(p, 0) is the complete gamma function.
    """
    p_arr = np.asarray(p, dtype=float)
    x_arr = np.asarray(x, dtype=float)
    if np.any(p_arr <= 0.0):
        raise ValueError(f"upper_incomplete_gamma: p must be > 0, got {p}")
    if np.any(x_arr < 0.0):
        raise ValueError(f"upper_incomplete_gamma: x must be >= 0, got {x}")
    out = _sp.gammaincc(p_arr, x_arr) * _sp.gamma(p_arr)
    if np.isscalar(p) and np.isscalar(x):
        return float(out)
    return out


def binomial_coeff(n: int, k: int) -> int:
    """Exact binomial coefficient C(n, k) for 0 <= k <= n <= 64."""
    if not (0 <= k <= n <= MAX_BINOMIAL_N):
        raise ValueError(f"binomial_coeff: need 0 <= k <= n <= {MAX_BINOMIAL_N}, got n={n}, k={k}")
    return math.comb(n, k)


@lru_cache(maxsize=None)
def gauss_legendre_rule(order: int) -> QuadratureRule:
    """Gauss-Legendre rule of the given order on [-1, 1].

    Roots of P_n are found by Newton iteration started from the Tricomi
    asymptotic estimate; only the negative half is iterated and the positive
    half is mirrored, so the symmetry invariant holds exactly.
    """
    if not isinstance(order, int) or isinstance(order, bool):
        raise ValueError(f"gauss_legendre_rule: order must be an integer, got {order!r}")
    if not (1 <= order <= MAX_QUAD_ORDER):
        raise ValueError(f"gauss_legendre_rule: order must be in [1, {MAX_QUAD_ORDER}], got {order}")
    if order == 1:
        return QuadratureRule(1, (0.0,), (2.0,))

    n = order
    half = n // 2
    neg_nodes = []
    neg_weights = []
    for i in range(1, half + 1):
        # Tricomi initial guess for the i-th root (descending in |x|)
        theta = math.pi * (i - 0.25) / (n + 0.5)
        x = math.cos(theta) * (1.0 - (n - 1.0) / (8.0 * n**3))
        x = -x  # work on the negative half, roots ascending
        for _ in range(100):
            p_n, dp_n = _legendre_and_derivative(n, x)
            dx = p_n / dp_n
            x -= dx
            if abs(p_n) < 1e-15 and abs(dx) < 1e-15:
                break
        p_n, dp_n = _legendre_and_derivative(n, x)
        neg_nodes.append(x)
        neg_weights.append(2.0 / ((1.0 - x * x) * dp_n * dp_n))

    pairs = sorted(zip(neg_nodes, neg_weights))
    neg_nodes = [x for x, _ in pairs]
    neg_weights = [w for _, w in pairs]
    if n % 2 == 1:
        _, dp_n = _legendre_and_derivative(n, 0.0)
        mid_nodes = [0.0]
        mid_weights = [2.0 / (dp_n * dp_n)]
    else:
        mid_nodes = []
        mid_weights = []
    nodes = tuple(neg_nodes + mid_nodes + [-x for x in reversed(neg_nodes)])
    weights = tuple(neg_weights + mid_weights + list(reversed(neg_weights)))
    return QuadratureRule(n, nodes, weights)


def _legendre_and_derivative(n: int, x: float) -> tuple[float, float]:
    """P_n(x) and P_n'(x) by the three-term recurrence."""
    p_prev, p = 1.0, x
    for k in range(1, n):
        p_prev, p = p, ((2 * k + 1) * x * p - k * p_prev) / (k + 1)
    if x == 1.0 or x == -1.0:
        dp = x ** (n - 1) * n * (n + 1) / 2.0
    else:
        dp = n * (x * p - p_prev) / (x * x - 1.0)
    return p, dp
