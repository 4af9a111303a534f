"""Haar-like rectangle features over integral images.

A feature is a signed combination of rectangle sums inside a base window
(24x24 by default). Grey rectangles carry positive weight, white ones
negative, scaled so the weighted areas of the base feature cancel exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..errors import BoundsError, InvalidInputError
from ..imgcore import Rect, rect_sum

FEATURE_KINDS = ("two-h", "two-v", "three-h", "three-v", "four")


@dataclass(frozen=True)
class RectFeature:
    kind: str
    rects: tuple  # ((Rect, weight), ...) in base-window coordinates

    def fits_in(self, base_w: int, base_h: int) -> bool:
        host = Rect(0, 0, base_w, base_h)
        return all(host.contains(r) for r, _ in self.rects)


def make_feature(kind: str, r: Rect) -> RectFeature:
    """Build one feature of ``kind`` spanning the outline rect ``r``."""
    x, y, w, h = r
    if kind == "two-h":
        half = w // 2
        rects = ((Rect(x, y, half, h), -1.0), (Rect(x + half, y, half, h), 1.0))
    elif kind == "two-v":
        half = h // 2
        rects = ((Rect(x, y, w, half), -1.0), (Rect(x, y + half, w, half), 1.0))
    elif kind == "three-h":
        third = w // 3
        rects = ((Rect(x, y, third, h), -1.0),
                 (Rect(x + third, y, third, h), 2.0),
                 (Rect(x + 2 * third, y, third, h), -1.0))
    elif kind == "three-v":
        third = h // 3
        rects = ((Rect(x, y, w, third), -1.0),
                 (Rect(x, y + third, w, third), 2.0),
                 (Rect(x, y + 2 * third, w, third), -1.0))
    elif kind == "four":
        hw, hh = w // 2, h // 2
        rects = ((Rect(x, y, hw, hh), -1.0),
                 (Rect(x + hw, y, hw, hh), 1.0),
                 (Rect(x, y + hh, hw, hh), 1.0),
                 (Rect(x + hw, y + hh, hw, hh), -1.0))
    else:
        raise InvalidInputError(f"unknown feature kind {kind!r}")
    return RectFeature(kind, rects)


def feature_pool(base: int = 24, stride: int = 2, cap: int = 50000):
    """Exhaustive feature pool on a stride grid of the base window.

    Enumeration order is deterministic (kind, then y, x, h, w) and the list
    is truncated at ``cap``.
    """
    if cap < 1:
        raise InvalidInputError("cap must be >= 1")
    min_side = {"two-h": (2, 1), "two-v": (1, 2), "three-h": (3, 1),
                "three-v": (1, 3), "four": (2, 2)}
    unit = {"two-h": (2, 1), "two-v": (1, 2), "three-h": (3, 1),
            "three-v": (1, 3), "four": (2, 2)}
    pool = []
    for kind in FEATURE_KINDS:
        uw, uh = unit[kind]
        mw, mh = min_side[kind]
        for y in range(0, base, stride):
            for x in range(0, base, stride):
                for h in range(max(mh, uh), base - y + 1, max(uh, stride)):
                    if h % uh:
                        continue
                    for w in range(max(mw, uw), base - x + 1, max(uw, stride)):
                        if w % uw:
                            continue
                        pool.append(make_feature(kind, Rect(x, y, w, h)))
                        if len(pool) >= cap:
                            return pool
    return pool


def scaled_rects(feature: RectFeature, sx: float, sy: float):
    """Feature rects scaled into a window, as window-relative corner tuples.

    Endpoints are rounded independently so scaled rects can never overflow a
    window whose size is the scaled base window. Rounding skews the area
    ratio between sibling rects, which would make constant regions produce
    nonzero values; the first nonempty rect's weight is recomputed so the
    weighted areas cancel at this scale too.
    """
    out = []
    for r, wt in feature.rects:
        x0 = round(r.x * sx)
        y0 = round(r.y * sy)
        x1 = round((r.x + r.w) * sx)
        y1 = round((r.y + r.h) * sy)
        out.append((x0, y0, x1, y1, wt))
    for k, (x0, y0, x1, y1, _) in enumerate(out):
        area = (x1 - x0) * (y1 - y0)
        if area > 0:
            rest = sum((rx1 - rx0) * (ry1 - ry0) * rwt
                       for i, (rx0, ry0, rx1, ry1, rwt) in enumerate(out) if i != k)
            out[k] = (x0, y0, x1, y1, -rest / area)
            break
    return out


def window_std(ii: np.ndarray, ii_sq: np.ndarray, window: Rect) -> float:
    """Pixel standard deviation over a window; 1.0 for flat windows."""
    n = window.w * window.h
    mean = rect_sum(ii, window) / n
    var = rect_sum(ii_sq, window) / n - mean * mean
    return math.sqrt(var) if var > 0 else 1.0


def eval_feature(feature: RectFeature, ii: np.ndarray, window: Rect,
                 base=(24, 24), ii_sq: np.ndarray | None = None,
                 normalize: bool = False) -> float:
    """Weighted rectangle-sum value of ``feature`` scaled to ``window``.

    With ``normalize`` the raw value is divided by the window's pixel
    standard deviation (requires ``ii_sq``, the squared-pixel integral).
    """
    ih, iw = ii.shape[0] - 1, ii.shape[1] - 1
    if not Rect(0, 0, iw, ih).contains(window):
        raise BoundsError(f"window {window} outside {iw}x{ih} image")
    sx = window.w / base[0]
    sy = window.h / base[1]
    value = 0.0
    for x0, y0, x1, y1, wt in scaled_rects(feature, sx, sy):
        r = Rect(window.x + x0, window.y + y0, x1 - x0, y1 - y0)
        if not Rect(0, 0, iw, ih).contains(r) or r.x < window.x or r.y < window.y \
                or r.x2 > window.x2 or r.y2 > window.y2:
            raise BoundsError(f"feature rect {r} overflows window {window}")
        value += wt * rect_sum(ii, r)
    if normalize:
        if ii_sq is None:
            raise InvalidInputError("normalization requires the squared integral image")
        value /= window_std(ii, ii_sq, window)
    return value
