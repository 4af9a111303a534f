"""Feature scaling, the RBF kernel, and the SMO dual solver.

The solver follows the classic working-set scheme: pick the maximal-violating
pair, solve the two-variable subproblem analytically, and stop when the
duality-gap proxy drops below the tolerance. No shrinking or kernel caching;
training sets here are small.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import InvalidInputError


@dataclass(frozen=True)
class SvmParams:
    c: float = 1.0
    gamma: float = 0.5
    tolerance: float = 1e-3
    max_iter: int = 100000

    def __post_init__(self):
        if self.c <= 0 or self.gamma <= 0:
            raise InvalidInputError("C and gamma must be > 0")


@dataclass(frozen=True)
class ScalingParams:
    lo: np.ndarray  # per-dimension training minimum
    hi: np.ndarray  # per-dimension training maximum


def scale_fit(X: np.ndarray) -> ScalingParams:
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2 or X.shape[0] == 0:
        raise InvalidInputError("scale_fit needs a non-empty (n, d) sample matrix")
    return ScalingParams(X.min(axis=0), X.max(axis=0))


def scale_apply(params: ScalingParams, x: np.ndarray) -> np.ndarray:
    """Map each dimension into [-1, +1]; constant dimensions map to 0.

    A dimension whose training range is exactly [-1, +1] maps onto itself;
    that case returns the input unchanged (exact, avoids float round-trip).
    """
    x = np.asarray(x, dtype=np.float64)
    span = params.hi - params.lo
    safe = np.where(span > 0, span, 1.0)
    scaled = -1.0 + 2.0 * (x - params.lo) / safe
    scaled = np.where((params.lo == -1.0) & (params.hi == 1.0), x, scaled)
    return np.where(span > 0, scaled, 0.0)


def identity_scaling(dim: int) -> ScalingParams:
    """Scaling that leaves vectors unchanged: [-1, +1] maps onto itself."""
    return ScalingParams(np.full(dim, -1.0), np.full(dim, 1.0))


def rbf(x, y, gamma: float) -> float:
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if x.shape != y.shape:
        raise InvalidInputError(f"length mismatch: {x.shape} vs {y.shape}")
    d = x - y
    return float(np.exp(-gamma * np.dot(d, d)))


def kernel_matrix(X: np.ndarray, Y: np.ndarray, gamma: float) -> np.ndarray:
    X = np.asarray(X, dtype=np.float64)
    Y = np.asarray(Y, dtype=np.float64)
    sq = (np.sum(X * X, axis=1)[:, None] + np.sum(Y * Y, axis=1)[None, :]
          - 2.0 * X @ Y.T)
    return np.exp(-gamma * np.maximum(sq, 0.0))


def train_binary_smo(X: np.ndarray, y: np.ndarray, params: SvmParams):
    """Solve the soft-margin dual for labels in {-1, +1}.

    Returns (alpha, rho): box-constrained dual variables and the bias in the
    decision function f(x) = sum_i alpha_i y_i K(x_i, x) - rho. At
    convergence the KKT conditions hold within ``params.tolerance``.
    """
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if set(np.unique(y)) != {-1.0, 1.0}:
        raise InvalidInputError("binary training needs both labels -1 and +1")
    n = y.size
    K = kernel_matrix(X, X, params.gamma)
    c = params.c
    tol = params.tolerance

    alpha = np.zeros(n)
    grad = -np.ones(n)  # gradient of the dual objective at alpha = 0

    for _ in range(params.max_iter):
        neg_yg = -y * grad
        up = ((y > 0) & (alpha < c)) | ((y < 0) & (alpha > 0))
        low = ((y < 0) & (alpha < c)) | ((y > 0) & (alpha > 0))
        if not up.any() or not low.any():
            break
        up_vals = np.where(up, neg_yg, -np.inf)
        low_vals = np.where(low, neg_yg, np.inf)
        i = int(np.argmax(up_vals))
        j = int(np.argmin(low_vals))
        m, mm = up_vals[i], low_vals[j]
        if m - mm <= tol:
            break

        quad = K[i, i] + K[j, j] - 2.0 * K[i, j]
        if quad <= 0:
            quad = 1e-12
        step = (m - mm) / quad
        # box limits keep both updated variables inside [0, C]
        hi_i = c - alpha[i] if y[i] > 0 else alpha[i]
        hi_j = alpha[j] if y[j] > 0 else c - alpha[j]
        step = min(step, hi_i, hi_j)

        new_i = min(max(alpha[i] + y[i] * step, 0.0), c)
        new_j = min(max(alpha[j] - y[j] * step, 0.0), c)
        d_i = new_i - alpha[i]
        d_j = new_j - alpha[j]
        alpha[i], alpha[j] = new_i, new_j
        grad += d_i * y[i] * (y * K[:, i]) + d_j * y[j] * (y * K[:, j])

    neg_yg = -y * grad
    free = (alpha > 0) & (alpha < c)
    if free.any():
        bias = float(np.mean(neg_yg[free]))
    else:
        up = ((y > 0) & (alpha < c)) | ((y < 0) & (alpha > 0))
        low = ((y < 0) & (alpha < c)) | ((y > 0) & (alpha > 0))
        hi = np.max(np.where(up, neg_yg, -np.inf)) if up.any() else 0.0
        lo = np.min(np.where(low, neg_yg, np.inf)) if low.any() else 0.0
        bias = float((hi + lo) / 2.0)
    return alpha, -bias
