"""Pixel buffers, integral images, rectangle sums and Sobel derivatives.

Conventions used throughout the package:

* a grayscale image is a 2-D numpy array indexed ``[y, x]``, ``uint8`` for I/O
  and promoted to wider integers for arithmetic;
* an RGB image is a 3-D ``(h, w, 3)`` ``uint8`` array;
* an integral image is a ``(h+1, w+1)`` ``int64`` table whose entry ``(y, x)``
  is the sum of all source pixels strictly above and to the left, so the first
  row and column are zero and no edge special-casing is needed.
"""

from __future__ import annotations

import io
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import BoundsError, InvalidInputError, ModelFormatError

GRAY_WEIGHTS = (0.299, 0.587, 0.114)


class Rect(NamedTuple):
    x: int
    y: int
    w: int
    h: int

    @property
    def x2(self):
        return self.x + self.w

    @property
    def y2(self):
        return self.y + self.h

    @property
    def area(self):
        return self.w * self.h

    def contains(self, other: "Rect") -> bool:
        return (self.x <= other.x and self.y <= other.y
                and other.x2 <= self.x2 and other.y2 <= self.y2)


def to_grayscale(img: np.ndarray) -> np.ndarray:
    """Convert an RGB image to 8-bit luma with Rec.601 weights."""
    if img.ndim != 3 or img.shape[2] != 3:
        raise InvalidInputError("to_grayscale expects an (h, w, 3) RGB image")
    r, g, b = GRAY_WEIGHTS
    luma = r * img[:, :, 0] + g * img[:, :, 1] + b * img[:, :, 2]
    return np.rint(luma).astype(np.uint8)


def integral(img: np.ndarray) -> np.ndarray:
    """Cumulative-sum table of a single-channel image, 64-bit accumulator."""
    if img.ndim != 2:
        raise InvalidInputError("integral expects a single-channel image")
    h, w = img.shape
    table = np.zeros((h + 1, w + 1), dtype=np.int64)
    np.cumsum(np.cumsum(img.astype(np.int64), axis=0), axis=1, out=table[1:, 1:])
    return table


def rect_sum(ii: np.ndarray, r: Rect) -> int:
    """Sum of source pixels inside ``r``, from exactly 4 table lookups."""
    if r.w < 0 or r.h < 0:
        raise BoundsError(f"negative rect extent: {r}")
    ih, iw = ii.shape[0] - 1, ii.shape[1] - 1
    if r.x < 0 or r.y < 0 or r.x2 > iw or r.y2 > ih:
        raise BoundsError(f"rect {r} outside {iw}x{ih} image")
    return int(ii[r.y2, r.x2] - ii[r.y, r.x2] - ii[r.y2, r.x] + ii[r.y, r.x])


@dataclass(frozen=True)
class SobelParams:
    xorder: int = 1
    yorder: int = 0
    aperture: int = 3

    def __post_init__(self):
        if self.xorder + self.yorder != 1 or self.xorder not in (0, 1):
            raise InvalidInputError("exactly one of xorder/yorder must be 1")
        if self.aperture != 3:
            raise InvalidInputError("only aperture 3 is supported")


# 3x3 kernels applied by cross-correlation, the usual CV convention.
_SOBEL_X = np.array([[-1, 0, 1], [-2, 0, 2], [-1, 0, 1]], dtype=np.int64)
_SOBEL_Y = _SOBEL_X.T


def sobel(img: np.ndarray, params: SobelParams = SobelParams()) -> np.ndarray:
    """First image derivative via the 3x3 Sobel kernel.

    Border pixels use replicate-edge padding; only interior values are
    contractual. Output is signed int64.
    """
    if img.ndim != 2:
        raise InvalidInputError("sobel expects a single-channel image")
    h, w = img.shape
    if h < params.aperture or w < params.aperture:
        raise InvalidInputError(f"image {w}x{h} smaller than {params.aperture}x{params.aperture} kernel")
    kernel = _SOBEL_X if params.xorder == 1 else _SOBEL_Y
    padded = np.pad(img.astype(np.int64), 1, mode="edge")
    out = np.zeros((h, w), dtype=np.int64)
    for dy in range(3):
        for dx in range(3):
            k = kernel[dy, dx]
            if k:
                out += k * padded[dy:dy + h, dx:dx + w]
    return out


# ---------------------------------------------------------------------------
# netpbm I/O: binary PGM (P5) for grayscale, PPM (P6) for RGB, maxval 255.

def _read_header_tokens(data: bytes, count: int):
    """Yield ``count`` whitespace-separated header tokens, skipping # comments.

    Returns the tokens and the offset where raster data starts (one whitespace
    byte after the last token).
    """
    tokens = []
    pos = 0
    n = len(data)
    while len(tokens) < count:
        while pos < n and data[pos:pos + 1].isspace():
            pos += 1
        if pos < n and data[pos:pos + 1] == b"#":
            while pos < n and data[pos] not in (0x0A, 0x0D):
                pos += 1
            continue
        start = pos
        while pos < n and not data[pos:pos + 1].isspace():
            pos += 1
        if start == pos:
            raise ModelFormatError(1, "truncated netpbm header")
        tokens.append(data[start:pos])
    return tokens, pos + 1


def decode_netpbm(data: bytes) -> np.ndarray:
    """Parse binary PGM/PPM bytes into a 2-D or (h, w, 3) uint8 array."""
    if len(data) < 2:
        raise ModelFormatError(1, "not a netpbm file")
    magic = data[:2]
    if magic not in (b"P5", b"P6"):
        raise ModelFormatError(1, f"unsupported netpbm magic {magic!r}")
    tokens, offset = _read_header_tokens(data, 4)
    try:
        width, height, maxval = (int(t) for t in tokens[1:])
    except ValueError:
        raise ModelFormatError(1, "non-numeric netpbm header field") from None
    if width < 1 or height < 1:
        raise ModelFormatError(1, f"bad dimensions {width}x{height}")
    if maxval != 255:
        raise ModelFormatError(1, f"only maxval 255 supported, got {maxval}")
    channels = 1 if magic == b"P5" else 3
    need = width * height * channels
    raster = data[offset:offset + need]
    if len(raster) != need:
        raise ModelFormatError(1, f"raster truncated: expected {need} bytes, got {len(raster)}")
    arr = np.frombuffer(raster, dtype=np.uint8)
    if channels == 1:
        return arr.reshape(height, width).copy()
    return arr.reshape(height, width, 3).copy()


def encode_netpbm(img: np.ndarray) -> bytes:
    """Encode a uint8 image as binary PGM (gray) or PPM (RGB)."""
    if img.dtype != np.uint8:
        raise InvalidInputError("netpbm output requires uint8 samples")
    if img.ndim == 2:
        magic = b"P5"
        h, w = img.shape
    elif img.ndim == 3 and img.shape[2] == 3:
        magic = b"P6"
        h, w = img.shape[:2]
    else:
        raise InvalidInputError("expected (h, w) or (h, w, 3) image")
    header = b"%s\n%d %d\n255\n" % (magic, w, h)
    return header + img.tobytes()


def read_netpbm(path) -> np.ndarray:
    with open(path, "rb") as fh:
        return decode_netpbm(fh.read())


def write_netpbm(path, img: np.ndarray) -> None:
    with open(path, "wb") as fh:
        fh.write(encode_netpbm(img))


def netpbm_roundtrip(img: np.ndarray) -> np.ndarray:
    """Encode then decode; used by tests to assert bit-exactness."""
    return decode_netpbm(encode_netpbm(img))


def load_netpbm_stream(fh: io.BufferedReader) -> np.ndarray:
    return decode_netpbm(fh.read())
