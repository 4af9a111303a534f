"""Geometric face division, min-eigenvalue corner maps and the 21-point set.

The face box is split into fractional eye/nose/mouth regions; each region
contributes its quota of strongest corners (structure-tensor minimum
eigenvalue, non-maxima suppressed, spacing-constrained), and shortfall is
back-filled from the whole face box.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidInputError
from .imgcore import Rect, SobelParams, sobel

REGION_NAMES = ("left_eye", "right_eye", "nose", "mouth")


@dataclass(frozen=True)
class FaceRegions:
    # fractional (x0, y0, x1, y1) spans of the face box
    left_eye: tuple = (0.12, 0.20, 0.48, 0.48)
    right_eye: tuple = (0.52, 0.20, 0.88, 0.48)
    nose: tuple = (0.30, 0.42, 0.70, 0.68)
    mouth: tuple = (0.22, 0.65, 0.78, 0.95)

    def __post_init__(self):
        for name in REGION_NAMES:
            x0, y0, x1, y1 = getattr(self, name)
            if not (0 <= x0 <= x1 <= 1 and 0 <= y0 <= y1 <= 1):
                raise InvalidInputError(f"{name} fractions must satisfy 0 <= lo <= hi <= 1")


@dataclass(frozen=True)
class CornerParams:
    block_size: int = 3
    quality_level: float = 0.01
    min_distance: float = 5.0
    quotas: tuple = (5, 5, 3, 8)  # left_eye, right_eye, nose, mouth

    def __post_init__(self):
        if sum(self.quotas) != 21:
            raise InvalidInputError(f"quotas must sum to 21, got {sum(self.quotas)}")
        if not 0 < self.quality_level <= 1:
            raise InvalidInputError("quality_level must be in (0, 1]")
        if self.min_distance < 0:
            raise InvalidInputError("min_distance must be >= 0")
        if self.block_size < 1:
            raise InvalidInputError("block_size must be >= 1")


def slot_regions(quotas=(5, 5, 3, 8)):
    """Region tag of each of the 21 landmark slots, in quota order."""
    tags = []
    for name, quota in zip(REGION_NAMES, quotas):
        tags.extend([name] * quota)
    return tuple(tags)


@dataclass
class LandmarkSet:
    xy: np.ndarray  # (21, 2) float64
    valid: np.ndarray  # (21,) bool
    regions: tuple = field(default_factory=slot_regions)

    def __post_init__(self):
        if self.xy.shape != (21, 2) or self.valid.shape != (21,) or len(self.regions) != 21:
            raise InvalidInputError("a landmark set holds exactly 21 entries")

    def copy(self):
        return LandmarkSet(self.xy.copy(), self.valid.copy(), self.regions)


def empty_landmark_set(quotas=(5, 5, 3, 8)) -> LandmarkSet:
    return LandmarkSet(np.zeros((21, 2)), np.zeros(21, dtype=bool), slot_regions(quotas))


def divide_face(box: Rect, ratios: FaceRegions = FaceRegions()):
    """Scale the fractional regions into a face box, clamped to integer pixels."""
    if box.w < 1 or box.h < 1:
        raise InvalidInputError(f"empty face box {box}")
    out = {}
    for name in REGION_NAMES:
        fx0, fy0, fx1, fy1 = getattr(ratios, name)
        x0 = min(round(fx0 * box.w), box.w)
        x1 = min(round(fx1 * box.w), box.w)
        y0 = min(round(fy0 * box.h), box.h)
        y1 = min(round(fy1 * box.h), box.h)
        out[name] = Rect(box.x + x0, box.y + y0, x1 - x0, y1 - y0)
    return out


def min_eigen_map(img: np.ndarray, block_size: int = 3) -> np.ndarray:
    """Smaller structure-tensor eigenvalue at every pixel.

    Gradients are 3x3 Sobel; the tensor sums gradient products over a
    block_size x block_size window. Border pixels whose window leaves the
    image are zero.
    """
    if img.ndim != 2:
        raise InvalidInputError("expected a grayscale image")
    h, w = img.shape
    if h <= block_size or w <= block_size:
        raise InvalidInputError(f"image {w}x{h} not larger than block {block_size}")
    ix = sobel(img, SobelParams(1, 0))
    iy = sobel(img, SobelParams(0, 1))

    def box_sum(a):
        c = np.zeros((h + 1, w + 1), dtype=np.int64)
        np.cumsum(np.cumsum(a, axis=0), axis=1, out=c[1:, 1:])
        return (c[block_size:, block_size:] - c[:-block_size, block_size:]
                - c[block_size:, :-block_size] + c[:-block_size, :-block_size])

    sxx = box_sum(ix * ix)
    syy = box_sum(iy * iy)
    sxy = box_sum(ix * iy)
    tr = (sxx + syy).astype(np.float64)
    det = sxx.astype(np.float64) * syy - sxy.astype(np.float64) * sxy
    disc = np.maximum(tr * tr - 4.0 * det, 0.0)
    lam = 0.5 * (tr - np.sqrt(disc))

    out = np.zeros((h, w), dtype=np.float64)
    off = block_size // 2
    out[off:off + lam.shape[0], off:off + lam.shape[1]] = lam
    return out


def _suppressed_candidates(lam):
    """Pixels that are local 3x3 maxima of a positive score map."""
    h, w = lam.shape
    padded = np.pad(lam, 1, mode="constant", constant_values=-np.inf)
    keep = np.ones((h, w), dtype=bool)
    for dy in (-1, 0, 1):
        for dx in (-1, 0, 1):
            if dy == 0 and dx == 0:
                continue
            keep &= lam >= padded[1 + dy:1 + dy + h, 1 + dx:1 + dx + w]
    return keep & (lam > 0)


def good_features(img: np.ndarray, region: Rect, p: CornerParams = CornerParams(),
                  max_n: int | None = None):
    """Strongest well-separated corners inside a region.

    Pipeline: min-eigenvalue map on the region crop, 3x3 non-maxima
    suppression, rejection below quality_level * map maximum, then greedy
    selection in descending score with pairwise distance >= min_distance.
    Returns [(x, y, score), ...] in selection order, image coordinates.
    """
    h, w = img.shape
    if not Rect(0, 0, w, h).contains(region):
        raise InvalidInputError(f"region {region} outside {w}x{h} image")
    if region.w <= p.block_size or region.h <= p.block_size:
        return []
    crop = img[region.y:region.y2, region.x:region.x2]
    lam = min_eigen_map(crop, p.block_size)
    lam_max = lam.max()
    if lam_max <= 0:
        return []
    keep = _suppressed_candidates(lam) & (lam >= p.quality_level * lam_max)
    ys, xs = np.nonzero(keep)
    scores = lam[ys, xs]
    order = np.lexsort((xs, ys, -scores))

    chosen = []
    min_d2 = p.min_distance * p.min_distance
    for k in order:
        cx, cy, score = int(xs[k]), int(ys[k]), float(scores[k])
        ok = True
        for px, py, _ in chosen:
            dx = (px - region.x) - cx
            dy = (py - region.y) - cy
            if dx * dx + dy * dy < min_d2:
                ok = False
                break
        if ok:
            chosen.append((region.x + cx, region.y + cy, score))
            if max_n is not None and len(chosen) >= max_n:
                break
    return chosen


def select_21(img: np.ndarray, face_box: Rect, regions: dict,
              p: CornerParams = CornerParams()) -> LandmarkSet:
    """Fill the 21 landmark slots from per-region corners.

    Regions that come up short are back-filled from the strongest remaining
    face-box corners; slots still unfilled are marked invalid. The result
    always holds exactly 21 entries in quota order.
    """
    tags = slot_regions(p.quotas)
    xy = np.zeros((21, 2))
    valid = np.zeros(21, dtype=bool)

    taken = []
    slot = 0
    unfilled = []
    for name, quota in zip(REGION_NAMES, p.quotas):
        corners = good_features(img, regions[name], p, max_n=quota)
        # assign slots in (y, x) order so a slot keeps tracking the same
        # physical corner across frames
        corners = sorted(corners, key=lambda c: (c[1], c[0]))
        for i in range(quota):
            if i < len(corners):
                xy[slot] = corners[i][:2]
                valid[slot] = True
                taken.append(corners[i])
            else:
                unfilled.append(slot)
            slot += 1

    if unfilled:
        pool = good_features(img, face_box, p, max_n=3 * 21)
        min_d2 = p.min_distance * p.min_distance
        fill = iter(unfilled)
        pending = next(fill, None)
        for cx, cy, score in pool:
            if pending is None:
                break
            clash = False
            for tx, ty, _ in taken:
                dx, dy = tx - cx, ty - cy
                if dx * dx + dy * dy < min_d2:
                    clash = True
                    break
            if clash:
                continue
            xy[pending] = (cx, cy)
            valid[pending] = True
            taken.append((cx, cy, score))
            pending = next(fill, None)

    return LandmarkSet(xy, valid, tags)


def interocular_distance(lset: LandmarkSet):
    """Distance between valid left-eye and right-eye centroids, or None."""
    pts = {"left_eye": [], "right_eye": []}
    for i, name in enumerate(lset.regions):
        if name in pts and lset.valid[i]:
            pts[name].append(lset.xy[i])
    if not pts["left_eye"] or not pts["right_eye"]:
        return None
    left = np.mean(pts["left_eye"], axis=0)
    right = np.mean(pts["right_eye"], axis=0)
    return float(np.hypot(*(right - left)))


def landmarks_csv_line(frame_index: int, slot: int, lset: LandmarkSet) -> str:
    x, y = lset.xy[slot]
    return f"{frame_index},{slot},{lset.regions[slot]},{x:.2f},{y:.2f},{int(lset.valid[slot])}"


def write_landmarks_csv(fh, frame_index: int, lset: LandmarkSet) -> None:
    for slot in range(21):
        fh.write(landmarks_csv_line(frame_index, slot, lset) + "\n")
