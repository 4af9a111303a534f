"""Trainer entity: run labeled sequences through the pipeline, gather one
displacement vector per full smoothing window, then grid-search and train the
classifier."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import DegenerateTrainingError
from ..svm import SvmParams, grid_search, scale_apply, scale_fit, train_multiclass
from .config import SessionConfig
from .session import Session


@dataclass
class TrainReport:
    vectors_per_class: dict
    best_c: float
    best_gamma: float
    cv_accuracy: float
    grid: list  # [(c, gamma, accuracy), ...]

    def to_dict(self):
        return {
            "vectors_per_class": dict(self.vectors_per_class),
            "best_c": self.best_c,
            "best_gamma": self.best_gamma,
            "cv_accuracy": round(self.cv_accuracy, 6),
            "grid": [[c, g, round(a, 6)] for c, g, a in self.grid],
        }


def collect_vectors(sequences, config: SessionConfig):
    """One labeled feature vector per completed window of every sequence."""
    X, y = [], []
    for label, frames in sequences:
        session = Session(config)
        session.set_label(label)
        for frame in frames:
            session.process_frame(frame)
        for label_id, values in session.pool:
            X.append(values)
            y.append(label_id)
    if not X:
        raise DegenerateTrainingError("no feature vectors extracted (no faces found)")
    return np.asarray(X), np.asarray(y, dtype=np.int64)


def train_session(sequences, config: SessionConfig):
    """Returns (model, report). Needs vectors from at least two classes."""
    X, y = collect_vectors(sequences, config)
    if np.unique(y).size < 2:
        raise DegenerateTrainingError("training needs at least two labeled classes")

    scaling = scale_fit(X)
    Xs = scale_apply(scaling, X)
    grid = config.svm
    result = grid_search(Xs, y, grid.c_grid, grid.gamma_grid,
                         k=min(grid.folds, len(y)), seed=grid.seed,
                         tolerance=grid.tolerance)
    params = SvmParams(c=result.c, gamma=result.gamma, tolerance=grid.tolerance)
    model = train_multiclass(X, y, params, scaling)

    per_class = {}
    for label_id in np.unique(y):
        per_class[config.labels[label_id]] = int(np.sum(y == label_id))
    report = TrainReport(per_class, result.c, result.gamma, result.accuracy, result.table)
    return model, report
