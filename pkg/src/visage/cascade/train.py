"""AdaBoost training of strong classifiers and cascade stage assembly.

Weak-learner search is vectorized: feature values for every (feature, sample)
pair are computed once, pre-sorted, and each boosting round sweeps all
candidate thresholds of all features with prefix sums.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..errors import DegenerateTrainingError, InvalidInputError
from ..imgcore import Rect, integral
from .features import feature_pool, scaled_rects
from .model import Cascade, StrongClassifier, WeakClassifier, eval_strong

_EPS = 1e-12


def _sample_std(iis: np.ndarray) -> np.ndarray:
    """Per-sample pixel std of base-window patches, recovered from integrals."""
    n_samples, hp, wp = iis.shape
    h, w = hp - 1, wp - 1
    n = h * w
    pixels = np.diff(np.diff(iis, axis=1), axis=2)
    s1 = iis[:, h, w].astype(np.float64)
    s2 = np.sum(pixels.astype(np.float64) ** 2, axis=(1, 2))
    mean = s1 / n
    var = s2 / n - mean * mean
    return np.where(var > 0, np.sqrt(np.maximum(var, 0.0)), 1.0)


def feature_matrix(iis: np.ndarray, pool, normalize=False) -> np.ndarray:
    """(n_features, n_samples) matrix of feature values at base scale."""
    n_samples = iis.shape[0]
    out = np.zeros((len(pool), n_samples), dtype=np.float64)
    for j, feat in enumerate(pool):
        acc = np.zeros(n_samples, dtype=np.float64)
        for x0, y0, x1, y1, wt in scaled_rects(feat, 1.0, 1.0):
            sums = (iis[:, y1, x1] - iis[:, y0, x1]
                    - iis[:, y1, x0] + iis[:, y0, x0])
            acc += wt * sums
        out[j] = acc
    if normalize:
        out /= _sample_std(iis)[None, :]
    return out


def _best_stump(F, Fs, order, y, w):
    """Lowest weighted-error decision stump over all features and thresholds.

    Returns (feature index, threshold, polarity, weighted error). Ties break
    toward the smallest feature index, then polarity +1, then the smallest
    split position.
    """
    n = y.size
    ws = np.take_along_axis(np.broadcast_to(w, F.shape), order, axis=1)
    ys = np.take_along_axis(np.broadcast_to(y, F.shape), order, axis=1)
    wp = ws * ys
    wn = ws - wp
    pad = np.zeros((F.shape[0], 1))
    prefix_p = np.concatenate([pad, np.cumsum(wp, axis=1)], axis=1)
    prefix_n = np.concatenate([pad, np.cumsum(wn, axis=1)], axis=1)
    total_p = prefix_p[:, -1:]
    total_n = prefix_n[:, -1:]

    # polarity +1 predicts face below the split, -1 above it
    err_pos = (total_p - prefix_p) + prefix_n
    err_neg = prefix_p + (total_n - prefix_n)

    invalid = np.zeros(err_pos.shape, dtype=bool)
    invalid[:, 1:n] = Fs[:, 1:] <= Fs[:, :-1]
    err_pos[invalid] = np.inf
    err_neg[invalid] = np.inf

    stacked = np.stack([err_pos, err_neg], axis=1)  # (n_feat, 2, n+1)
    flat = int(np.argmin(stacked))
    j, pol_idx, k = np.unravel_index(flat, stacked.shape)
    eps = float(stacked[j, pol_idx, k])
    if k == 0:
        theta = float(Fs[j, 0] - 1.0)
    elif k == n:
        theta = float(Fs[j, n - 1] + 1.0)
    else:
        theta = float((Fs[j, k - 1] + Fs[j, k]) / 2.0)
    polarity = 1 if pol_idx == 0 else -1
    return int(j), theta, polarity, eps


def train_adaboost(samples, pool, rounds: int, normalize=False) -> StrongClassifier:
    """Boost ``rounds`` decision stumps over the feature pool.

    ``samples`` is a list of (integral image of a base-window patch, label)
    pairs with labels in {0, 1}. Misclassified-sample weights grow by
    exp(alpha) each round and the weight vector is renormalized to sum 1.
    The returned stage threshold is half the total vote mass.
    """
    if not pool:
        raise InvalidInputError("empty feature pool")
    if rounds < 1:
        raise InvalidInputError("rounds must be >= 1")
    labels = np.array([lab for _, lab in samples], dtype=np.int64)
    if labels.size == 0 or np.all(labels == labels[0]):
        raise DegenerateTrainingError("training needs both positive and negative samples")
    iis = np.stack([ii for ii, _ in samples]).astype(np.int64)

    F = feature_matrix(iis, pool, normalize=normalize)
    order = np.argsort(F, axis=1, kind="stable")
    Fs = np.take_along_axis(F, order, axis=1)
    y = labels.astype(np.float64)
    w = np.full(y.size, 1.0 / y.size)

    weak = []
    for _ in range(rounds):
        j, theta, polarity, eps = _best_stump(F, Fs, order, y, w)
        if eps >= 0.5:
            raise DegenerateTrainingError(
                f"no weak classifier beats chance (best weighted error {eps:.4f})")
        alpha = math.log((1.0 - eps) / max(eps, _EPS))
        if polarity == 1:
            h = (F[j] < theta).astype(np.float64)
        else:
            h = (F[j] > theta).astype(np.float64)
        misclassified = h != y
        w = np.where(misclassified, w * math.exp(alpha), w)
        w = w / w.sum()
        weak.append((WeakClassifier(pool[j], theta, polarity), alpha))

    phi = 0.5 * sum(alpha for _, alpha in weak)
    return StrongClassifier(tuple(weak), phi)


@dataclass
class CascadeTrainParams:
    max_stages: int = 4
    rounds_per_stage: tuple = (4, 8, 16, 32)
    target_detection: float = 0.99
    target_stage_fpr: float = 0.5
    pool_stride: int = 2
    pool_cap: int = 50000
    normalize: bool = True
    base: int = 24
    label: str = "frontal"


def _scores(strong, iis, base, normalize):
    out = np.empty(len(iis))
    for i, (ii, ii_sq) in enumerate(iis):
        window = Rect(0, 0, ii.shape[1] - 1, ii.shape[0] - 1)
        _, out[i] = eval_strong(strong, ii, window, base=base,
                                ii_sq=ii_sq, normalize=normalize)
    return out


def train_cascade(pos_patches, neg_patches, params: CascadeTrainParams = CascadeTrainParams()) -> Cascade:
    """Train an attentional cascade on base-window patches.

    Each stage is boosted on the positives plus the negatives that earlier
    stages still accept; the stage threshold is lowered until at least
    ``target_detection`` of the positives pass.
    """
    if len(pos_patches) == 0 or len(neg_patches) == 0:
        raise InvalidInputError("need positive and negative patches")
    pool = feature_pool(params.base, params.pool_stride, params.pool_cap)

    def prep(patches):
        pairs = []
        for p in patches:
            ii = integral(np.asarray(p))
            ii_sq = integral(np.asarray(p).astype(np.int64) ** 2) if params.normalize else None
            pairs.append((ii, ii_sq))
        return pairs

    pos = prep(pos_patches)
    negs = prep(neg_patches)
    base = (params.base, params.base)

    stages = []
    for stage_idx in range(params.max_stages):
        if not negs:
            break
        rounds = params.rounds_per_stage[min(stage_idx, len(params.rounds_per_stage) - 1)]
        samples = [(ii, 1) for ii, _ in pos] + [(ii, 0) for ii, _ in negs]
        strong = train_adaboost(samples, pool, rounds, normalize=params.normalize)

        pos_scores = np.sort(_scores(strong, pos, base, params.normalize))
        k = int(math.floor((1.0 - params.target_detection) * len(pos)))
        phi = float(pos_scores[k])
        strong = StrongClassifier(strong.weak, phi)
        stages.append(strong)

        neg_scores = _scores(strong, negs, base, params.normalize)
        negs = [pair for pair, s in zip(negs, neg_scores) if s >= phi]
    return Cascade(stages, base=base, label=params.label)
