"""Session configuration shared by the trainer and evaluator entities."""

from __future__ import annotations

from dataclasses import dataclass, field

from ..cascade import Cascade, ScanParams
from ..errors import InvalidInputError
from ..flow import FlowParams
from ..landmarks import CornerParams, FaceRegions
from ..skin import SkinParams

DEFAULT_LABELS = ("Neutral", "Smile", "Angry", "Excited")


@dataclass
class SvmGrid:
    c_grid: tuple = (0.125, 0.5, 2.0, 8.0, 32.0, 128.0)
    gamma_grid: tuple = (0.0078125, 0.03125, 0.125, 0.5, 2.0, 8.0)
    folds: int = 5
    seed: int = 0
    tolerance: float = 1e-3


@dataclass
class SessionConfig:
    frontal_cascade: Cascade
    profile_cascade: Cascade | None = None
    scan: ScanParams = field(default_factory=ScanParams)
    skin: SkinParams = field(default_factory=SkinParams)
    regions: FaceRegions = field(default_factory=FaceRegions)
    corners: CornerParams = field(default_factory=CornerParams)
    flow: FlowParams = field(default_factory=FlowParams)
    svm: SvmGrid = field(default_factory=SvmGrid)
    smoothing_window: int = 10
    labels: tuple = DEFAULT_LABELS
    normalize_displacements: bool = True

    def __post_init__(self):
        if self.smoothing_window < 1:
            raise InvalidInputError("smoothing window must be >= 1")
        if len(set(self.labels)) != len(self.labels):
            raise InvalidInputError("duplicate expression labels")

    @property
    def profile_or_frontal(self) -> Cascade:
        return self.profile_cascade if self.profile_cascade is not None else self.frontal_cascade

    def label_id(self, label: str) -> int:
        try:
            return self.labels.index(label)
        except ValueError:
            raise InvalidInputError(f"unknown label {label!r}; expected one of {self.labels}") from None
