"""Sparse training-data files: ``label index:value ...`` with 1-based indices."""

from __future__ import annotations

import numpy as np

from ..errors import ModelFormatError


def write_problem(path, X, y) -> None:
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y)
    with open(path, "w", encoding="utf-8") as fh:
        for label, row in zip(y, X):
            parts = [str(int(label))]
            for d, v in enumerate(row):
                if v != 0:
                    parts.append(f"{d + 1}:{repr(float(v))}")
            fh.write(" ".join(parts) + "\n")


def read_problem(path, dim: int | None = None):
    """Returns (X, y); ``dim`` pads/validates the feature width."""
    rows = []
    labels = []
    max_dim = dim or 0
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            tokens = line.split()
            if not tokens:
                continue
            try:
                labels.append(int(float(tokens[0])))
                feats = []
                for t in tokens[1:]:
                    idx_s, val_s = t.split(":", 1)
                    idx = int(idx_s)
                    if idx < 1:
                        raise ValueError(f"index {idx} not 1-based")
                    feats.append((idx, float(val_s)))
            except ValueError as exc:
                raise ModelFormatError(lineno, f"malformed data line: {exc}") from None
            if feats:
                max_dim = max(max_dim, max(i for i, _ in feats))
            rows.append(feats)
    if dim is not None and max_dim > dim:
        raise ModelFormatError(1, f"feature index {max_dim} exceeds declared dim {dim}")
    X = np.zeros((len(rows), max_dim))
    for r, feats in enumerate(rows):
        for idx, val in feats:
            X[r, idx - 1] = val
    return X, np.asarray(labels, dtype=np.int64)
