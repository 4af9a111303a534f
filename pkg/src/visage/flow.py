"""Displacement search for landmark tracking, median smoothing over the
10-frame window, and displacement feature vectors.

The tracker minimizes the sum of squared window differences over an integer
search box; ties break toward the smallest Manhattan displacement, then
row-major scan order, so results are fully deterministic.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

import numpy as np

from .errors import BoundsError, InvalidInputError
from .landmarks import LandmarkSet, interocular_distance


@dataclass(frozen=True)
class FlowParams:
    wx: int = 4  # window half-size in x
    wy: int = 4
    radius: int = 6  # per-axis search radius
    max_error: float | None = None  # tracked point invalidated above this

    def __post_init__(self):
        if self.wx < 1 or self.wy < 1:
            raise InvalidInputError("window half-sizes must be >= 1")
        if self.radius < 0:
            raise InvalidInputError("search radius must be >= 0")


def _window(img, x, y, wx, wy):
    h, w = img.shape
    if x - wx < 0 or y - wy < 0 or x + wx >= w or y + wy >= h:
        return None
    return img[y - wy:y + wy + 1, x - wx:x + wx + 1]


def ssd(img1: np.ndarray, img2: np.ndarray, point, delta, p: FlowParams = FlowParams()) -> int:
    """Sum of squared differences between the window at ``point`` in img1 and
    the window displaced by ``delta`` in img2. Exact integer arithmetic."""
    x, y = int(point[0]), int(point[1])
    dx, dy = int(delta[0]), int(delta[1])
    a = _window(img1, x, y, p.wx, p.wy)
    b = _window(img2, x + dx, y + dy, p.wx, p.wy)
    if a is None or b is None:
        raise BoundsError(f"window around {point} (+{delta}) leaves the frame")
    diff = a.astype(np.int64) - b.astype(np.int64)
    return int(np.sum(diff * diff))


def track_point(img1: np.ndarray, img2: np.ndarray, point, p: FlowParams = FlowParams()):
    """Exhaustive displacement search around one landmark.

    Returns ((new_x, new_y), min_error). Candidate displacements whose window
    leaves img2 are skipped; raises BoundsError when the source window does
    not fit or no candidate fits at all.
    """
    x, y = int(round(point[0])), int(round(point[1]))
    src = _window(img1, x, y, p.wx, p.wy)
    if src is None:
        raise BoundsError(f"source window around {point} leaves the frame")
    src = src.astype(np.int64)
    h, w = img2.shape
    r = p.radius

    if (x - p.wx - r >= 0 and y - p.wy - r >= 0
            and x + p.wx + r < w and y + p.wy + r < h):
        # whole search region in bounds: evaluate all candidates at once
        region = img2[y - p.wy - r:y + p.wy + r + 1,
                      x - p.wx - r:x + p.wx + r + 1].astype(np.int64)
        windows = np.lib.stride_tricks.sliding_window_view(
            region, (2 * p.wy + 1, 2 * p.wx + 1))
        diff = windows - src[None, None]
        errs = np.sum(diff * diff, axis=(2, 3))
        dys, dxs = np.mgrid[-r:r + 1, -r:r + 1]
        manhattan = np.abs(dxs) + np.abs(dys)
        flat = np.lexsort((dxs.ravel(), dys.ravel(), manhattan.ravel(), errs.ravel()))[0]
        dy, dx = int(dys.ravel()[flat]), int(dxs.ravel()[flat])
        return (x + dx, y + dy), int(errs.ravel()[flat])

    best = None
    best_key = None
    for dy in range(-r, r + 1):
        for dx in range(-r, r + 1):
            nx, ny = x + dx, y + dy
            if nx - p.wx < 0 or ny - p.wy < 0 or nx + p.wx >= w or ny + p.wy >= h:
                continue
            cand = img2[ny - p.wy:ny + p.wy + 1, nx - p.wx:nx + p.wx + 1].astype(np.int64)
            diff = src - cand
            err = int(np.sum(diff * diff))
            key = (err, abs(dx) + abs(dy), dy, dx)
            if best_key is None or key < best_key:
                best_key = key
                best = (nx, ny)
    if best is None:
        raise BoundsError(f"no displacement keeps the window inside the frame at {point}")
    return best, best_key[0]


def track_set(img1: np.ndarray, img2: np.ndarray, lset: LandmarkSet,
              p: FlowParams = FlowParams()) -> LandmarkSet:
    """Track every valid landmark; points that cannot be tracked go invalid."""
    out = lset.copy()
    for i in range(21):
        if not lset.valid[i]:
            continue
        try:
            (nx, ny), err = track_point(img1, img2, lset.xy[i], p)
        except BoundsError:
            out.valid[i] = False
            continue
        if p.max_error is not None and err > p.max_error:
            out.valid[i] = False
            continue
        out.xy[i] = (nx, ny)
    return out


def median_smooth(history) -> LandmarkSet:
    """Per-slot, per-coordinate median over the frames where the slot is valid.

    A slot stays valid iff it is valid in at least half of the frames. Even
    counts take the mean of the two middle values.
    """
    sets = list(history)
    if not sets:
        raise InvalidInputError("median over an empty history")
    n = len(sets)
    xy = np.zeros((21, 2))
    valid = np.zeros(21, dtype=bool)
    for i in range(21):
        xs = [s.xy[i, 0] for s in sets if s.valid[i]]
        ys = [s.xy[i, 1] for s in sets if s.valid[i]]
        if 2 * len(xs) >= n and xs:
            xy[i, 0] = np.median(xs)
            xy[i, 1] = np.median(ys)
            valid[i] = True
    return LandmarkSet(xy, valid, sets[0].regions)


@dataclass
class FeatureVector:
    values: np.ndarray  # (42,) interleaved (dx, dy) per slot
    mask: np.ndarray  # (21,) bool, False entries contribute zeros

    def __post_init__(self):
        if self.values.shape != (42,) or self.mask.shape != (21,):
            raise InvalidInputError("feature vector holds 42 values and a 21-slot mask")


def feature_vector(current: LandmarkSet, reference: LandmarkSet,
                   interocular: float) -> FeatureVector:
    """Normalized landmark displacements between reference and current sets."""
    if interocular <= 0:
        raise InvalidInputError(f"inter-ocular distance must be > 0, got {interocular}")
    values = np.zeros(42)
    mask = np.zeros(21, dtype=bool)
    for i in range(21):
        if current.valid[i] and reference.valid[i]:
            values[2 * i] = (current.xy[i, 0] - reference.xy[i, 0]) / interocular
            values[2 * i + 1] = (current.xy[i, 1] - reference.xy[i, 1]) / interocular
            mask[i] = True
    return FeatureVector(values, mask)


class TrackHistory:
    """Ring buffer of the most recent landmark sets plus the reference pose."""

    def __init__(self, window: int = 10):
        if window < 1:
            raise InvalidInputError("smoothing window must be >= 1")
        self.window = window
        self.buffer = deque(maxlen=window)
        self.reference: LandmarkSet | None = None
        self.interocular: float | None = None

    def set_reference(self, lset: LandmarkSet, normalize: bool = True):
        self.reference = lset.copy()
        dist = interocular_distance(lset) if normalize else None
        self.interocular = dist if dist and dist > 0 else 1.0

    def append(self, lset: LandmarkSet):
        self.buffer.append(lset)

    def __len__(self):
        return len(self.buffer)
