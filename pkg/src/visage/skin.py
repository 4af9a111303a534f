"""Hue-threshold skin detection used to confirm that a detection box is a face.

Grayscale streams carry no hue, so the pipeline skips this gate for them and
flags the frame result accordingly.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidInputError
from .imgcore import Rect


@dataclass(frozen=True)
class SkinParams:
    # Default band wraps through red: [340, 360) plus [0, 50].
    hue_low: float = 340.0
    hue_high: float = 50.0
    sat_min: float = 0.15
    val_min: float = 0.15
    min_skin_fraction: float = 0.4

    def __post_init__(self):
        for name in ("hue_low", "hue_high"):
            v = getattr(self, name)
            if not 0.0 <= v < 360.0:
                raise InvalidInputError(f"{name} must be in [0, 360), got {v}")
        for name in ("sat_min", "val_min", "min_skin_fraction"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise InvalidInputError(f"{name} must be in [0, 1], got {v}")


def rgb_to_hue(r: int, g: int, b: int):
    """Standard HSV decomposition of one 8-bit pixel.

    Returns (hue_degrees | None, saturation, value); hue is None for
    achromatic pixels (max == min), which are never skin.
    """
    mx = max(r, g, b)
    mn = min(r, g, b)
    value = mx / 255.0
    if mx == 0:
        return None, 0.0, 0.0
    saturation = (mx - mn) / mx
    if mx == mn:
        return None, saturation, value
    delta = mx - mn
    if mx == r:
        hue = 60.0 * ((g - b) / delta)
    elif mx == g:
        hue = 60.0 * (2.0 + (b - r) / delta)
    else:
        hue = 60.0 * (4.0 + (r - g) / delta)
    if hue < 0.0:
        hue += 360.0
    return hue, saturation, value


def _hue_mask(hue, sat, val, chromatic, p: SkinParams):
    if p.hue_low <= p.hue_high:
        in_band = (hue >= p.hue_low) & (hue <= p.hue_high)
    else:  # wrapping band, e.g. [340, 50]
        in_band = (hue >= p.hue_low) | (hue <= p.hue_high)
    return in_band & chromatic & (sat >= p.sat_min) & (val >= p.val_min)


def skin_fraction(img: np.ndarray, region: Rect, p: SkinParams = SkinParams()):
    """Fraction of skin-colored pixels in ``region``, plus the binary mask."""
    if img.ndim != 3 or img.shape[2] != 3:
        raise InvalidInputError("skin detection expects an RGB image")
    h, w = img.shape[:2]
    if not Rect(0, 0, w, h).contains(region):
        raise InvalidInputError(f"region {region} outside {w}x{h} image")
    if region.area == 0:
        raise InvalidInputError("empty region")

    patch = img[region.y:region.y2, region.x:region.x2].astype(np.float64)
    r, g, b = patch[:, :, 0], patch[:, :, 1], patch[:, :, 2]
    mx = np.maximum(np.maximum(r, g), b)
    mn = np.minimum(np.minimum(r, g), b)
    delta = mx - mn
    chromatic = delta > 0
    safe_delta = np.where(chromatic, delta, 1.0)

    hue = np.where(mx == r, (g - b) / safe_delta,
                   np.where(mx == g, 2.0 + (b - r) / safe_delta,
                            4.0 + (r - g) / safe_delta)) * 60.0
    hue = np.where(hue < 0.0, hue + 360.0, hue)
    val = mx / 255.0
    sat = np.where(mx > 0, delta / np.where(mx > 0, mx, 1.0), 0.0)

    mask = _hue_mask(hue, sat, val, chromatic, p)
    return float(mask.sum()) / region.area, mask


def verify_face(img: np.ndarray, box: Rect, p: SkinParams = SkinParams()) -> bool:
    """True iff the box's skin fraction reaches ``min_skin_fraction``."""
    fraction, _ = skin_fraction(img, box, p)
    return fraction >= p.min_skin_fraction
