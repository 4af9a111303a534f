"""Sequence manifests: one ``label<TAB>dir`` line per sequence; each dir holds
zero-padded ``frame_%06d.pgm`` or ``.ppm`` files."""

from __future__ import annotations

import os
import re

from ..errors import InvalidInputError
from ..imgcore import read_netpbm

_FRAME_RE = re.compile(r"^frame_(\d{6})\.(pgm|ppm)$")


def write_manifest(path, entries) -> None:
    base = os.path.dirname(os.path.abspath(path))
    with open(path, "w", encoding="utf-8") as fh:
        for label, seq_dir in entries:
            rel = os.path.relpath(os.path.abspath(seq_dir), base)
            fh.write(f"{label}\t{rel}\n")


def read_manifest(path):
    """Returns [(label, absolute sequence dir), ...]."""
    base = os.path.dirname(os.path.abspath(path))
    entries = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.rstrip("\n")
            if not line.strip():
                continue
            if "\t" not in line:
                raise InvalidInputError(f"{path}:{lineno}: expected label<TAB>dir")
            label, seq_dir = line.split("\t", 1)
            entries.append((label, os.path.normpath(os.path.join(base, seq_dir))))
    return entries


def frame_files(seq_dir):
    if not os.path.isdir(seq_dir):
        raise InvalidInputError(f"sequence directory not found: {seq_dir}")
    frames = sorted(f for f in os.listdir(seq_dir) if _FRAME_RE.match(f))
    if not frames:
        raise InvalidInputError(f"no frame_NNNNNN.pgm|ppm files in {seq_dir}")
    return [os.path.join(seq_dir, f) for f in frames]


def load_sequence(seq_dir):
    """All frames of a sequence, in index order."""
    frames = []
    for path in frame_files(seq_dir):
        if not os.path.exists(path):
            raise InvalidInputError(f"missing frame file: {path}")
        frames.append(read_netpbm(path))
    return frames


def load_manifest_sequences(path):
    """[(label, [frames...]), ...] for every manifest entry."""
    return [(label, load_sequence(d)) for label, d in read_manifest(path)]
