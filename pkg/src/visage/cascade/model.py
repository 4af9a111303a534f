"""Weak/strong classifiers and the attentional cascade."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..errors import InvalidInputError
from ..imgcore import Rect
from .features import RectFeature, eval_feature


@dataclass(frozen=True)
class WeakClassifier:
    feature: RectFeature
    threshold: float
    polarity: int  # +1 or -1

    def __post_init__(self):
        if self.polarity not in (-1, 1):
            raise InvalidInputError(f"polarity must be +1 or -1, got {self.polarity}")


@dataclass(frozen=True)
class StrongClassifier:
    weak: tuple  # ((WeakClassifier, alpha), ...), alpha >= 0
    threshold: float  # phi

    def __post_init__(self):
        if any(alpha < 0 for _, alpha in self.weak):
            raise InvalidInputError("strong-classifier weights must be non-negative")


@dataclass
class Cascade:
    stages: list = field(default_factory=list)  # [StrongClassifier, ...]
    base: tuple = (24, 24)
    label: str = "frontal"


def eval_weak(w: WeakClassifier, f_value: float) -> int:
    """1 iff polarity * value < polarity * threshold."""
    return 1 if w.polarity * f_value < w.polarity * w.threshold else 0


def eval_strong(s: StrongClassifier, ii: np.ndarray, window: Rect,
                base=(24, 24), ii_sq=None, normalize=False):
    """Weighted vote of the weak classifiers against the stage threshold.

    Returns (decision, raw score sum(alpha_i * h_i)).
    """
    score = 0.0
    for wc, alpha in s.weak:
        value = eval_feature(wc.feature, ii, window, base=base,
                             ii_sq=ii_sq, normalize=normalize)
        score += alpha * eval_weak(wc, value)
    return (1 if score >= s.threshold else 0), score


def eval_cascade(c: Cascade, ii: np.ndarray, window: Rect,
                 ii_sq=None, normalize=False):
    """Run stages in order, stopping at the first rejection.

    Returns (accepted, index of the rejecting stage or None).
    """
    for idx, stage in enumerate(c.stages):
        decision, _ = eval_strong(stage, ii, window, base=c.base,
                                  ii_sq=ii_sq, normalize=normalize)
        if not decision:
            return False, idx
    return True, None
