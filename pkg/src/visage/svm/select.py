"""Seeded stratified cross-validation and (C, gamma) grid search."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import InvalidInputError
from .core import SvmParams
from .model import predict, train_multiclass


def default_c_grid():
    return [2.0 ** e for e in range(-3, 8, 2)]


def default_gamma_grid():
    return [2.0 ** e for e in range(-7, 4, 2)]


def stratified_folds(y, k: int, seed: int) -> np.ndarray:
    """Deterministic fold assignment, class-balanced by round-robin deal."""
    y = np.asarray(y)
    if k < 2:
        raise InvalidInputError("need at least 2 folds")
    if k > y.size:
        raise InvalidInputError(f"{k} folds for {y.size} samples")
    rng = np.random.default_rng(seed)
    folds = np.zeros(y.size, dtype=np.int64)
    for c in np.unique(y):
        idx = np.nonzero(y == c)[0]
        rng.shuffle(idx)
        folds[idx] = np.arange(idx.size) % k
    return folds


def cross_validate_predictions(X, y, params: SvmParams, k: int = 5, seed: int = 0):
    """Held-out prediction for every sample across seeded stratified folds."""
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.int64)
    folds = stratified_folds(y, k, seed)
    y_pred = np.zeros_like(y)
    for f in range(k):
        test = folds == f
        if not test.any():
            continue
        model = train_multiclass(X[~test], y[~test], params)
        for idx in np.nonzero(test)[0]:
            y_pred[idx], _ = predict(model, X[idx])
    return y_pred


def cross_validate(X, y, params: SvmParams, k: int = 5, seed: int = 0) -> float:
    """Mean held-out accuracy over seeded stratified folds."""
    y = np.asarray(y, dtype=np.int64)
    y_pred = cross_validate_predictions(X, y, params, k=k, seed=seed)
    return float(np.mean(y_pred == y))


@dataclass
class GridResult:
    c: float
    gamma: float
    accuracy: float
    table: list  # [(c, gamma, accuracy), ...] in sweep order


def grid_search(X, y, c_grid=None, gamma_grid=None, k: int = 5, seed: int = 0,
                tolerance: float = 1e-3) -> GridResult:
    """Exhaustive CV sweep; ties prefer smaller C, then smaller gamma."""
    c_grid = sorted(c_grid if c_grid is not None else default_c_grid())
    gamma_grid = sorted(gamma_grid if gamma_grid is not None else default_gamma_grid())
    if not c_grid or not gamma_grid:
        raise InvalidInputError("empty parameter grid")
    best = None
    table = []
    for c in c_grid:
        for gamma in gamma_grid:
            acc = cross_validate(X, y, SvmParams(c=c, gamma=gamma, tolerance=tolerance),
                                 k=k, seed=seed)
            table.append((c, gamma, acc))
            if best is None or acc > best[2]:
                best = (c, gamma, acc)
    return GridResult(best[0], best[1], best[2], table)
