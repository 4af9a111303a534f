from .config import SessionConfig, SvmGrid
from .session import FrameResult, Session
from .synthetic import SyntheticSpec, generate_synthetic
from .manifest import load_sequence, read_manifest, write_manifest
from .report import (ConfusionMatrix, EvalReport, REFERENCE_CLIP_COUNTS,
                     REFERENCE_REPORTED_OVERALL, evaluate_session)
from .training import TrainReport, train_session
from .bench import BenchmarkReport, benchmark

__all__ = [
    "SessionConfig", "SvmGrid", "Session", "FrameResult",
    "SyntheticSpec", "generate_synthetic",
    "read_manifest", "write_manifest", "load_sequence",
    "ConfusionMatrix", "EvalReport", "evaluate_session",
    "REFERENCE_CLIP_COUNTS", "REFERENCE_REPORTED_OVERALL",
    "TrainReport", "train_session",
    "BenchmarkReport", "benchmark",
]
