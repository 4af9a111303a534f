"""Session config files: flat ``key = value`` text with dotted section keys.

Example::

    frontal_cascade = detector.cascade
    scan.scale_start = 3.0
    scan.step = 3
    corners.quotas = 5,5,3,8
    labels = Neutral,Smile,Angry,Excited

Relative cascade paths resolve against the config file's directory.
"""

from __future__ import annotations

import os

from ..cascade import ScanParams, load_cascade
from ..errors import InvalidInputError
from ..flow import FlowParams
from ..landmarks import CornerParams, FaceRegions
from ..pipeline import SessionConfig, SvmGrid
from ..skin import SkinParams


def _parse_value(raw: str):
    raw = raw.strip()
    if raw.lower() in ("true", "false"):
        return raw.lower() == "true"
    if "," in raw:
        return tuple(_parse_value(part) for part in raw.split(","))
    try:
        return int(raw)
    except ValueError:
        pass
    try:
        return float(raw)
    except ValueError:
        pass
    return raw


def parse_config_file(path) -> dict:
    values = {}
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            stripped = line.split("#", 1)[0].strip()
            if not stripped:
                continue
            if "=" not in stripped:
                raise InvalidInputError(f"{path}:{lineno}: expected key = value")
            key, _, raw = stripped.partition("=")
            values[key.strip()] = _parse_value(raw)
    return values


def _section(values: dict, prefix: str) -> dict:
    out = {}
    for key, val in values.items():
        if key.startswith(prefix + "."):
            out[key[len(prefix) + 1:]] = val
    return out


def _region_kwargs(values: dict) -> dict:
    out = {}
    for name in ("left_eye", "right_eye", "nose", "mouth"):
        if f"regions.{name}" in values:
            out[name] = tuple(float(v) for v in values[f"regions.{name}"])
    return out


def build_session_config(values: dict, base_dir: str = ".") -> SessionConfig:
    if "frontal_cascade" not in values:
        raise InvalidInputError("config must name a frontal_cascade")

    def resolve(p):
        return p if os.path.isabs(p) else os.path.join(base_dir, p)

    frontal = load_cascade(resolve(values["frontal_cascade"]))
    profile = None
    if "profile_cascade" in values:
        profile = load_cascade(resolve(values["profile_cascade"]))

    def as_tuple(v):
        return v if isinstance(v, tuple) else (v,)

    kwargs = {}
    if "smoothing_window" in values:
        kwargs["smoothing_window"] = int(values["smoothing_window"])
    if "labels" in values:
        kwargs["labels"] = as_tuple(values["labels"])
    if "normalize_displacements" in values:
        kwargs["normalize_displacements"] = bool(values["normalize_displacements"])

    svm_kwargs = _section(values, "svm")
    for key in ("c_grid", "gamma_grid"):
        if key in svm_kwargs:
            svm_kwargs[key] = as_tuple(svm_kwargs[key])
    corner_kwargs = _section(values, "corners")
    if "quotas" in corner_kwargs:
        corner_kwargs["quotas"] = as_tuple(corner_kwargs["quotas"])

    return SessionConfig(
        frontal_cascade=frontal,
        profile_cascade=profile,
        scan=ScanParams(**_section(values, "scan")),
        skin=SkinParams(**_section(values, "skin")),
        regions=FaceRegions(**_region_kwargs(values)),
        corners=CornerParams(**corner_kwargs),
        flow=FlowParams(**_section(values, "flow")),
        svm=SvmGrid(**svm_kwargs),
        **kwargs,
    )


def load_session_config(path) -> SessionConfig:
    values = parse_config_file(path)
    return build_session_config(values, os.path.dirname(os.path.abspath(path)))
