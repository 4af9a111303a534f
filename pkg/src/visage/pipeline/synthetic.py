"""Deterministic schematic face sequences with parametric expression motion.

Each sequence draws a high-contrast schematic face (brows, textured eyes,
nose, two-bar mouth with end caps) on a plain background and ramps one
class-specific deformation from zero to ``max_deform`` pixels over the
frames: Smile lifts the mouth corners, Angry drops the brows, Excited opens
the mouth and raises the brows, Neutral moves nothing. Ground truth (face
box, per-frame deformation and anchor positions) is emitted alongside.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass

import numpy as np

from ..errors import InvalidInputError
from ..imgcore import Rect, encode_netpbm
from .config import DEFAULT_LABELS

GRAY = {"bg": 60, "face": 190, "feature": 25, "dot": 245}
RGB = {"bg": (70, 80, 115), "face": (214, 170, 132),
       "feature": (28, 18, 18), "dot": (250, 250, 250)}

# fractional (x0, y0, x1, y1) part layout inside the face square
PARTS = {
    "brow_l": (0.18, 0.24, 0.44, 0.29),
    "brow_r": (0.56, 0.24, 0.82, 0.29),
    "eye_l": (0.24, 0.34, 0.38, 0.46),
    "eye_r": (0.62, 0.34, 0.76, 0.46),
    "dot_l": (0.28, 0.37, 0.34, 0.43),
    "dot_r": (0.66, 0.37, 0.72, 0.43),
    "nose": (0.47, 0.48, 0.53, 0.62),
    "nose_base": (0.42, 0.59, 0.58, 0.63),
    "lip_upper": (0.30, 0.76, 0.70, 0.80),
    "lip_lower": (0.28, 0.80, 0.72, 0.84),
    "cap_l": (0.26, 0.75, 0.33, 0.85),
    "cap_r": (0.67, 0.75, 0.74, 0.85),
}


@dataclass(frozen=True)
class SyntheticSpec:
    seed: int = 7
    classes: tuple = DEFAULT_LABELS
    sequences_per_class: int = 8
    frames: int = 40
    width: int = 320
    height: int = 240
    color: bool = False
    noise: float = 2.0
    max_deform: int = 8
    face_frac: float = 0.5
    jitter: int = 8

    def __post_init__(self):
        size = self.face_size
        if size < 48:
            raise InvalidInputError(f"face of {size}px is too small to texture")
        if (self.width - size) // 2 - self.jitter < 0 or (self.height - size) // 2 - self.jitter < 0:
            raise InvalidInputError("face plus jitter does not fit inside the frame")
        if self.max_deform > round(0.12 * size):
            raise InvalidInputError(
                f"deformation {self.max_deform}px would push features outside the face")
        if self.frames < 1 or self.sequences_per_class < 1:
            raise InvalidInputError("need at least one frame and one sequence")

    @property
    def face_size(self) -> int:
        return round(self.height * self.face_frac)


def _scaled(face: Rect, frac, dy: int = 0) -> Rect:
    fx0, fy0, fx1, fy1 = frac
    x0 = face.x + round(fx0 * face.w)
    x1 = face.x + round(fx1 * face.w)
    y0 = face.y + round(fy0 * face.h) + dy
    y1 = face.y + round(fy1 * face.h) + dy
    return Rect(x0, y0, x1 - x0, y1 - y0)


def _fill(canvas, rect: Rect, value):
    canvas[rect.y:rect.y2, rect.x:rect.x2] = value


def class_offsets(label: str, d: int, face_h: int):
    """Per-part vertical offsets for deformation magnitude ``d``."""
    brow = cap = lower = 0
    if label == "Smile":
        cap = -d
    elif label == "Angry":
        brow = d
    elif label == "Excited":
        brow = -min(d, round(0.03 * face_h))
        cap = d
        lower = d
    return {"brow": brow, "cap": cap, "lower_lip": lower}


def render_face(canvas, face: Rect, label: str, d: int, palette):
    _fill(canvas, face, palette["face"])
    off = class_offsets(label, d, face.h)
    _fill(canvas, _scaled(face, PARTS["brow_l"], off["brow"]), palette["feature"])
    _fill(canvas, _scaled(face, PARTS["brow_r"], off["brow"]), palette["feature"])
    for eye, dot in (("eye_l", "dot_l"), ("eye_r", "dot_r")):
        _fill(canvas, _scaled(face, PARTS[eye]), palette["feature"])
        _fill(canvas, _scaled(face, PARTS[dot]), palette["dot"])
    _fill(canvas, _scaled(face, PARTS["nose"]), palette["feature"])
    _fill(canvas, _scaled(face, PARTS["nose_base"]), palette["feature"])
    _fill(canvas, _scaled(face, PARTS["lip_upper"]), palette["feature"])
    _fill(canvas, _scaled(face, PARTS["lip_lower"], off["lower_lip"]), palette["feature"])
    _fill(canvas, _scaled(face, PARTS["cap_l"], off["cap"]), palette["feature"])
    _fill(canvas, _scaled(face, PARTS["cap_r"], off["cap"]), palette["feature"])


def render_frame(spec: SyntheticSpec, face: Rect, label: str, d: int, rng) -> np.ndarray:
    palette = RGB if spec.color else GRAY
    shape = (spec.height, spec.width, 3) if spec.color else (spec.height, spec.width)
    canvas = np.empty(shape, dtype=np.float64)
    canvas[...] = palette["bg"]
    render_face(canvas, face, label, d, palette)
    canvas += rng.normal(0.0, spec.noise, shape)
    return np.clip(np.rint(canvas), 0, 255).astype(np.uint8)


def deformation(spec: SyntheticSpec, frame_index: int) -> int:
    if spec.frames == 1:
        return 0
    return round(spec.max_deform * frame_index / (spec.frames - 1))


def generate_synthetic(spec: SyntheticSpec, out_dir):
    """Write every sequence to disk; returns [(label, sequence dir), ...].

    Output per sequence: ``frame_%06d.pgm`` (``.ppm`` in color mode) plus a
    ``ground_truth.json`` with the face box and per-frame anchors. A
    ``manifest.tsv`` covering all sequences lands in ``out_dir``.
    """
    os.makedirs(out_dir, exist_ok=True)
    size = spec.face_size
    ext = "ppm" if spec.color else "pgm"
    entries = []
    for c_idx, label in enumerate(spec.classes):
        for s_idx in range(spec.sequences_per_class):
            rng = np.random.default_rng([spec.seed, c_idx, s_idx])
            jx, jy = (int(v) for v in rng.integers(-spec.jitter, spec.jitter + 1, 2))
            face = Rect((spec.width - size) // 2 + jx, (spec.height - size) // 2 + jy,
                        size, size)
            seq_name = f"{label}_{s_idx:02d}"
            seq_dir = os.path.join(out_dir, seq_name)
            os.makedirs(seq_dir, exist_ok=True)

            gt_frames = []
            for f_idx in range(spec.frames):
                d = deformation(spec, f_idx)
                frame = render_frame(spec, face, label, d, rng)
                with open(os.path.join(seq_dir, f"frame_{f_idx:06d}.{ext}"), "wb") as fh:
                    fh.write(encode_netpbm(frame))
                off = class_offsets(label, d, face.h)
                cap_l = _scaled(face, PARTS["cap_l"], off["cap"])
                cap_r = _scaled(face, PARTS["cap_r"], off["cap"])
                gt_frames.append({
                    "d": d,
                    "mouth_left": [cap_l.x, cap_l.y],
                    "mouth_right": [cap_r.x2 - 1, cap_r.y],
                    "brow_y": _scaled(face, PARTS["brow_l"], off["brow"]).y,
                    "lower_lip_y": _scaled(face, PARTS["lip_lower"], off["lower_lip"]).y,
                })
            gt = {"label": label, "seed": spec.seed, "sequence": s_idx,
                  "face_box": list(face), "frames": gt_frames}
            with open(os.path.join(seq_dir, "ground_truth.json"), "w", encoding="utf-8") as fh:
                json.dump(gt, fh, sort_keys=True, indent=1)
            entries.append((label, seq_dir))
    from .manifest import write_manifest
    write_manifest(os.path.join(out_dir, "manifest.tsv"), entries)
    return entries


# --- 24x24 patch corpora for desk-scale cascade training ---------------------

def synthetic_face_patches(n: int, seed: int, size: int = 24):
    """Neutral schematic faces filling most of a patch, with pose jitter."""
    rng = np.random.default_rng([seed, 101])
    patches = []
    for _ in range(n):
        canvas = np.full((size, size), float(GRAY["bg"]))
        x0 = int(rng.integers(0, 3))
        y0 = int(rng.integers(0, 3))
        x1 = size - int(rng.integers(0, 3))
        y1 = size - int(rng.integers(0, 3))
        face = Rect(x0, y0, x1 - x0, y1 - y0)
        render_face(canvas, face, "Neutral", 0, GRAY)
        canvas += rng.normal(0.0, 2.0, canvas.shape)
        patches.append(np.clip(np.rint(canvas), 0, 255).astype(np.uint8))
    return patches


def synthetic_background_patches(n: int, seed: int, size: int = 24):
    """Non-face clutter: flat background, noise, gradients, random blocks."""
    rng = np.random.default_rng([seed, 202])
    patches = []
    for i in range(n):
        kind = i % 4
        if kind == 0:
            canvas = np.full((size, size), float(GRAY["bg"]))
        elif kind == 1:
            canvas = rng.uniform(0, 255, (size, size))
        elif kind == 2:
            lo, hi = sorted(rng.uniform(0, 255, 2))
            axis = rng.integers(0, 2)
            ramp = np.linspace(lo, hi, size)
            canvas = np.tile(ramp, (size, 1)) if axis == 0 else np.tile(ramp[:, None], (1, size))
        else:
            canvas = np.full((size, size), float(GRAY["bg"]))
            for _ in range(int(rng.integers(2, 5))):
                rx, ry = rng.integers(0, size - 4, 2)
                rw, rh = rng.integers(2, 10, 2)
                val = rng.uniform(0, 255)
                canvas[ry:min(ry + rh, size), rx:min(rx + rw, size)] = val
        canvas += rng.normal(0.0, 2.0, canvas.shape)
        patches.append(np.clip(np.rint(canvas), 0, 255).astype(np.uint8))
    return patches


def train_synthetic_cascade(seed: int = 7, n_pos: int = 120, n_neg: int = 240,
                            params=None, label: str = "frontal"):
    """Desk-scale cascade trained on schematic faces vs clutter patches."""
    from ..cascade import CascadeTrainParams, train_cascade
    if params is None:
        params = CascadeTrainParams(max_stages=3, rounds_per_stage=(4, 8, 12),
                                    pool_stride=3, pool_cap=6000, label=label)
    pos = synthetic_face_patches(n_pos, seed)
    neg = synthetic_background_patches(n_neg, seed)
    return train_cascade(pos, neg, params)
