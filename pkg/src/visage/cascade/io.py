"""Cascade persistence: native line-oriented text format plus an importer for
the widespread XML stump-cascade schema.

The native format round-trips bit-exactly: floats are written with ``repr``
and re-parsed to the same binary value.
"""

from __future__ import annotations

import xml.etree.ElementTree as ET

from ..errors import InvalidInputError, ModelFormatError
from ..imgcore import Rect
from .features import RectFeature
from .model import Cascade, StrongClassifier, WeakClassifier

MAGIC = "visage-cascade 1"


def _format_float(x: float) -> str:
    return repr(float(x))


def dumps_cascade(c: Cascade) -> str:
    lines = [MAGIC,
             f"window {c.base[0]} {c.base[1]}",
             f"label {c.label}",
             f"stages {len(c.stages)}"]
    for stage in c.stages:
        lines.append(f"stage {_format_float(stage.threshold)} {len(stage.weak)}")
        for wc, alpha in stage.weak:
            parts = ["weak", wc.feature.kind, str(len(wc.feature.rects))]
            for r, wt in wc.feature.rects:
                parts += [str(r.x), str(r.y), str(r.w), str(r.h), _format_float(wt)]
            parts += [_format_float(wc.threshold), str(wc.polarity), _format_float(alpha)]
            lines.append(" ".join(parts))
    return "\n".join(lines) + "\n"


def save_cascade(c: Cascade, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dumps_cascade(c))


class _Lines:
    def __init__(self, text):
        self.lines = text.splitlines()
        self.pos = 0

    def next(self, what):
        if self.pos >= len(self.lines):
            raise ModelFormatError(self.pos + 1, f"expected {what}, got end of file")
        self.pos += 1
        return self.lines[self.pos - 1]

    @property
    def lineno(self):
        return self.pos


def loads_cascade(text: str) -> Cascade:
    src = _Lines(text)
    if src.next("magic header") != MAGIC:
        raise ModelFormatError(1, "not a cascade file")

    def expect(keyword):
        line = src.next(keyword)
        fields = line.split()
        if not fields or fields[0] != keyword:
            raise ModelFormatError(src.lineno, f"expected {keyword!r} line")
        return fields[1:]

    try:
        base = tuple(int(v) for v in expect("window"))
        label = expect("label")[0]
        n_stages = int(expect("stages")[0])
        stages = []
        for _ in range(n_stages):
            phi_s, nweak_s = expect("stage")
            weak = []
            for _ in range(int(nweak_s)):
                fields = expect("weak")
                kind = fields[0]
                nrects = int(fields[1])
                rects = []
                pos = 2
                for _ in range(nrects):
                    x, y, w, h = (int(v) for v in fields[pos:pos + 4])
                    wt = float(fields[pos + 4])
                    rects.append((Rect(x, y, w, h), wt))
                    pos += 5
                theta = float(fields[pos])
                polarity = int(fields[pos + 1])
                alpha = float(fields[pos + 2])
                feature = RectFeature(kind, tuple(rects))
                if not feature.fits_in(*base):
                    raise ModelFormatError(src.lineno, f"feature rects outside {base} window")
                weak.append((WeakClassifier(feature, theta, polarity), alpha))
            stages.append(StrongClassifier(tuple(weak), float(phi_s)))
    except (ValueError, IndexError) as exc:
        raise ModelFormatError(src.lineno, f"malformed field: {exc}") from None
    return Cascade(stages, base=base, label=label)


def load_cascade(path) -> Cascade:
    with open(path, "r", encoding="utf-8") as fh:
        return loads_cascade(fh.read())


def import_opencv_xml(path, mirror: bool = False) -> Cascade:
    """Convert an old-style XML stump cascade (stages/trees/rects) to a Cascade.

    Each stump contributes ``left_val`` when its feature value is below the
    node threshold and ``right_val`` otherwise; the conversion folds those
    into non-negative vote weights plus a shifted stage threshold. ``mirror``
    flips every rect horizontally inside the base window to cover the
    opposite profile direction.
    """
    tree = ET.parse(path)
    root = tree.getroot()
    classifier = None
    for child in root:
        if child.get("type_id") == "opencv-haar-classifier":
            classifier = child
            break
    if classifier is None:
        raise InvalidInputError("no opencv-haar-classifier element found")

    size_text = classifier.findtext("size", default="24 24").split()
    base = (int(size_text[0]), int(size_text[1]))

    stages = []
    for stage_el in classifier.find("stages"):
        stage_threshold = float(stage_el.findtext("stage_threshold"))
        weak = []
        shift = 0.0
        for tree_el in stage_el.find("trees"):
            nodes = list(tree_el)
            if len(nodes) != 1:
                raise InvalidInputError("only stump trees (single node) are supported")
            node = nodes[0]
            feature_el = node.find("feature")
            if feature_el.findtext("tilted", "0").strip() not in ("0", "0."):
                raise InvalidInputError("tilted features are not supported")
            rects = []
            for rect_el in feature_el.find("rects"):
                vals = rect_el.text.split()
                x, y, w, h = (int(float(v)) for v in vals[:4])
                wt = float(vals[4])
                if mirror:
                    x = base[0] - x - w
                rects.append((Rect(x, y, w, h), wt))
            threshold = float(node.findtext("threshold"))
            left = float(node.findtext("left_val"))
            right = float(node.findtext("right_val"))
            feature = RectFeature("imported", tuple(rects))
            if not feature.fits_in(*base):
                raise InvalidInputError(f"imported feature outside {base} window")
            if left >= right:
                # fires below threshold, worth (left - right) on top of right
                weak.append((WeakClassifier(feature, threshold, 1), left - right))
                shift += right
            else:
                weak.append((WeakClassifier(feature, threshold, -1), right - left))
                shift += left
        stages.append(StrongClassifier(tuple(weak), stage_threshold - shift))
    return Cascade(stages, base=base, label="profile" if mirror else "frontal")
