"""Multi-scale window scanning, detection merging, and the frontal/profile
interleave scheduler.

Scanning is vectorized per scale over the whole position grid, but the
arithmetic mirrors the scalar evaluators exactly, so the accepted-window set
equals a per-window ``eval_cascade`` sweep in sequential scan order
(ascending scale, then y, then x).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import InvalidInputError
from ..imgcore import Rect, integral
from .features import scaled_rects
from .model import Cascade


@dataclass(frozen=True)
class ScanParams:
    scale_start: float = 1.0
    scale_factor: float = 1.25
    step: int = 1
    normalize: bool = True

    def __post_init__(self):
        if self.scale_factor <= 1.0:
            raise InvalidInputError("scale factor must be > 1")
        if self.step < 1:
            raise InvalidInputError("step must be >= 1")


@dataclass(frozen=True)
class Detection:
    box: Rect
    neighbors: int


def _scales(img_w, img_h, base, params):
    out = []
    s = params.scale_start
    while round(base[0] * s) <= img_w and round(base[1] * s) <= img_h:
        out.append(s)
        s *= params.scale_factor
    return out


def _grid_rect_sums(ii, ys, xs, y0, x0, y1, x1):
    """Rectangle sums for one window-relative rect over a full position grid."""
    return (ii[np.ix_(ys + y1, xs + x1)] - ii[np.ix_(ys + y0, xs + x1)]
            - ii[np.ix_(ys + y1, xs + x0)] + ii[np.ix_(ys + y0, xs + x0)])


def _point_rect_sums(ii, ys, xs, y0, x0, y1, x1):
    """Same as _grid_rect_sums for flat position vectors (sparse survivors)."""
    return (ii[ys + y1, xs + x1] - ii[ys + y0, xs + x1]
            - ii[ys + y1, xs + x0] + ii[ys + y0, xs + x0])


def _stage_pass(stage, sums, std, rect_cache):
    # Division by std (not multiplication by its inverse) keeps results
    # bit-identical to the scalar evaluator.
    score = 0.0
    for wc, alpha in stage.weak:
        acc = 0.0
        for key in rect_cache[id(wc.feature)]:
            acc = acc + key[4] * sums(key)
        value = acc / std if std is not None else acc
        h = (wc.polarity * value) < (wc.polarity * wc.threshold)
        score = score + alpha * h
    return score >= stage.threshold


def scan_windows(c: Cascade, img: np.ndarray, params: ScanParams = ScanParams()):
    """All windows the cascade accepts, in sequential scan order."""
    if img.ndim != 2:
        raise InvalidInputError("scanning expects a grayscale image")
    h, w = img.shape
    ii = integral(img)
    ii_sq = integral(img.astype(np.int64) ** 2) if params.normalize else None

    accepted = []
    for s in _scales(w, h, c.base, params):
        win_w = round(c.base[0] * s)
        win_h = round(c.base[1] * s)
        step = max(1, round(params.step * s))
        xs = np.arange(0, w - win_w + 1, step)
        ys = np.arange(0, h - win_h + 1, step)
        if xs.size == 0 or ys.size == 0:
            continue
        sx = win_w / c.base[0]
        sy = win_h / c.base[1]
        # per-scale cache of endpoint-rounded rects, keyed by feature identity
        rect_cache = {}
        for stage in c.stages:
            for wc, _ in stage.weak:
                if id(wc.feature) not in rect_cache:
                    rect_cache[id(wc.feature)] = [
                        (x0, y0, x1, y1, wt)
                        for x0, y0, x1, y1, wt in scaled_rects(wc.feature, sx, sy)]

        if params.normalize:
            n = win_w * win_h
            s1 = _grid_rect_sums(ii, ys, xs, 0, 0, win_h, win_w)
            s2 = _grid_rect_sums(ii_sq, ys, xs, 0, 0, win_h, win_w)
            mean = s1 / n
            var = s2 / n - mean * mean
            std_grid = np.where(var > 0, np.sqrt(np.maximum(var, 0.0)), 1.0)
        else:
            std_grid = None

        alive = np.ones((ys.size, xs.size), dtype=bool)
        dense = True
        ay = ax = None
        std_flat = None
        for stage in c.stages:
            if dense:
                def sums(key, _ys=ys, _xs=xs):
                    return _grid_rect_sums(ii, _ys, _xs, key[1], key[0], key[3], key[2])
                passed = _stage_pass(stage, sums, std_grid, rect_cache)
                alive &= passed
                if alive.sum() * 4 < alive.size:
                    iy, ix = np.nonzero(alive)
                    ay, ax = ys[iy], xs[ix]
                    std_flat = std_grid[iy, ix] if std_grid is not None else None
                    dense = False
            else:
                if ay.size == 0:
                    break
                def sums(key, _ys=ay, _xs=ax):
                    return _point_rect_sums(ii, _ys, _xs, key[1], key[0], key[3], key[2])
                passed = _stage_pass(stage, sums, std_flat, rect_cache)
                if np.isscalar(passed) or np.ndim(passed) == 0:
                    passed = np.full(ay.size, bool(passed))
                ay, ax = ay[passed], ax[passed]
                if std_flat is not None:
                    std_flat = std_flat[passed]
        if dense:
            iy, ix = np.nonzero(alive)
            ay, ax = ys[iy], xs[ix]
        order = np.lexsort((ax, ay))
        for k in order:
            accepted.append(Rect(int(ax[k]), int(ay[k]), win_w, win_h))
    return accepted


def _iou(a: Rect, b: Rect) -> float:
    ix = max(0, min(a.x2, b.x2) - max(a.x, b.x))
    iy = max(0, min(a.y2, b.y2) - max(a.y, b.y))
    inter = ix * iy
    union = a.area + b.area - inter
    return inter / union if union else 0.0


def merge_detections(raw, iou_threshold=0.3, min_neighbors=2):
    """Group raw hits by IoU overlap and report mean boxes of big groups.

    Groups are the transitive closure of the pairwise IoU relation; a group
    survives with at least ``min_neighbors`` members. Output is sorted by
    descending neighbor count (ties by position).
    """
    n = len(raw)
    groups = {}
    if n:
        arr = np.array([[r.x, r.y, r.w, r.h] for r in raw], dtype=np.float64)
        x2 = arr[:, 0] + arr[:, 2]
        y2 = arr[:, 1] + arr[:, 3]
        area = arr[:, 2] * arr[:, 3]
        ix = np.minimum(x2[:, None], x2[None, :]) - np.maximum(arr[:, 0, None], arr[None, :, 0])
        iy = np.minimum(y2[:, None], y2[None, :]) - np.maximum(arr[:, 1, None], arr[None, :, 1])
        inter = np.maximum(ix, 0.0) * np.maximum(iy, 0.0)
        union = area[:, None] + area[None, :] - inter
        adj = np.where(union > 0, inter / np.where(union > 0, union, 1.0), 0.0) >= iou_threshold

        # connected components by min-label propagation with pointer jumping
        labels = np.arange(n)
        while True:
            new = np.minimum(labels, np.min(np.where(adj, labels[None, :], n), axis=1))
            new = new[new]
            if np.array_equal(new, labels):
                break
            labels = new
        for i in range(n):
            groups.setdefault(int(labels[i]), []).append(raw[i])

    out = []
    for members in groups.values():
        if len(members) < min_neighbors:
            continue
        mean = Rect(round(sum(m.x for m in members) / len(members)),
                    round(sum(m.y for m in members) / len(members)),
                    round(sum(m.w for m in members) / len(members)),
                    round(sum(m.h for m in members) / len(members)))
        out.append(Detection(mean, len(members)))
    out.sort(key=lambda d: (-d.neighbors, d.box.y, d.box.x, d.box.w, d.box.h))
    return out


def detect_multiscale(c: Cascade, img: np.ndarray, params: ScanParams = ScanParams(),
                      iou_threshold=0.3, min_neighbors=2):
    """Scan at all scales and positions, then merge overlapping hits."""
    raw = scan_windows(c, img, params)
    return merge_detections(raw, iou_threshold, min_neighbors)


@dataclass
class InterleaveState:
    frame_index: int = 0
    last_box: Rect | None = None


@dataclass(frozen=True)
class InterleaveOutcome:
    kind: str  # "detected" | "track" | "none"
    box: Rect | None = None
    source: str | None = None  # "frontal" | "profile"


def interleaved_detect(state: InterleaveState, frontal: Cascade, profile: Cascade,
                       img: np.ndarray, params: ScanParams = ScanParams(),
                       verify=None) -> InterleaveOutcome:
    """Alternate frontal/profile cascades per frame, retrying the other on miss.

    Even frames schedule the frontal cascade first. The best detection of the
    scheduled cascade is offered to ``verify`` (skin gate); a rejected or
    absent detection falls through to the other cascade, and if both fail the
    outcome is tracking fallback when a face was ever seen, else nothing.
    """
    if state.frame_index % 2 == 0:
        order = ((frontal, "frontal"), (profile, "profile"))
    else:
        order = ((profile, "profile"), (frontal, "frontal"))
    state.frame_index += 1

    for cascade_obj, source in order:
        detections = detect_multiscale(cascade_obj, img, params)
        if not detections:
            continue
        best = detections[0].box
        if verify is not None and not verify(best):
            continue
        state.last_box = best
        return InterleaveOutcome("detected", best, source)

    if state.last_box is not None:
        return InterleaveOutcome("track")
    return InterleaveOutcome("none")
