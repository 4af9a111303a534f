"""Throughput measurement: per-stage and per-frame wall times, reported as the
milliseconds-per-10-frames figure used to judge near-real-time operation."""

from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np

from ..errors import InvalidInputError
from .config import SessionConfig
from .session import Session


@dataclass
class BenchmarkReport:
    frames: int
    total_ms: float
    per_frame_ms: list
    stage_sums_ms: list  # per frame, sum of recorded stage times
    stage_medians_us: dict
    accounting_ok: bool  # stage sum <= frame total on every frame

    @property
    def median_frame_ms(self) -> float:
        return float(np.median(self.per_frame_ms))

    @property
    def p95_frame_ms(self) -> float:
        return float(np.percentile(self.per_frame_ms, 95))

    @property
    def ms_per_10_frames(self) -> float:
        return 10.0 * self.total_ms / self.frames

    def to_dict(self):
        return {
            "frames": self.frames,
            "total_ms": round(self.total_ms, 3),
            "ms_per_10_frames": round(self.ms_per_10_frames, 3),
            "median_frame_ms": round(self.median_frame_ms, 3),
            "p95_frame_ms": round(self.p95_frame_ms, 3),
            "stage_medians_us": {k: round(v, 1) for k, v in self.stage_medians_us.items()},
            "accounting_ok": self.accounting_ok,
        }


def benchmark(sequences, config: SessionConfig, model=None) -> BenchmarkReport:
    """Run every sequence through a fresh session, timing each frame."""
    if not sequences:
        raise InvalidInputError("no sequences to benchmark")
    per_frame = []
    stage_sums = []
    stage_samples = {}
    for _, frames in sequences:
        session = Session(config, model=model)
        for frame in frames:
            t0 = time.perf_counter_ns()
            result = session.process_frame(frame)
            elapsed = (time.perf_counter_ns() - t0) / 1e6
            per_frame.append(elapsed)
            stage_sums.append(sum(result.timings_us.values()) / 1e3)
            for stage, us in result.timings_us.items():
                stage_samples.setdefault(stage, []).append(us)
    accounting_ok = all(s <= f for s, f in zip(stage_sums, per_frame))
    medians = {k: float(np.median(v)) for k, v in stage_samples.items()}
    return BenchmarkReport(len(per_frame), float(sum(per_frame)), per_frame,
                           stage_sums, medians, accounting_ok)
