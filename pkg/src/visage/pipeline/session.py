"""Per-frame orchestration: detect, verify, extract or track landmarks,
smooth over the 10-frame window, and classify.

A session is stateful and strictly sequential; run independent sessions for
independent streams.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from ..cascade import InterleaveState, interleaved_detect
from ..errors import InvalidInputError
from ..flow import TrackHistory, feature_vector, median_smooth, track_set
from ..imgcore import Rect, to_grayscale
from ..landmarks import LandmarkSet, divide_face, select_21
from ..skin import skin_fraction
from ..svm import Model, predict
from .config import SessionConfig


@dataclass
class FrameResult:
    index: int
    source: str  # "frontal" | "profile" | "tracked" | "none"
    box: Rect | None = None
    skin_checked: bool = False
    skin_fraction: float | None = None
    landmarks: LandmarkSet | None = None
    feature: object | None = None  # FeatureVector on window completion
    predicted: str | None = None
    timings_us: dict = field(default_factory=dict)


class Session:
    """One trainer/evaluator stream over ordered frames."""

    def __init__(self, config: SessionConfig, model: Model | None = None):
        self.config = config
        self.model = model
        self.state = InterleaveState()
        self.history = TrackHistory(config.smoothing_window)
        self.frame_shape = None
        self.prev_gray = None
        self.appended = 0
        self.active_label: str | None = None
        self.pool: list = []  # (label id, feature values) training vectors

    def reset_reference(self):
        """Drop the neutral reference; the next detection recaptures it."""
        self.history.reference = None
        self.history.interocular = None

    def set_label(self, label: str | None):
        if label is not None:
            self.config.label_id(label)
        self.active_label = label

    def pool_counts(self) -> dict:
        counts = {name: 0 for name in self.config.labels}
        for label_id, _ in self.pool:
            counts[self.config.labels[label_id]] += 1
        return counts

    def process_frame(self, frame: np.ndarray) -> FrameResult:
        if self.frame_shape is None:
            self.frame_shape = frame.shape
        elif frame.shape != self.frame_shape:
            raise InvalidInputError(
                f"frame shape {frame.shape} does not match session {self.frame_shape}")

        timings = {}
        index = self.state.frame_index
        result = FrameResult(index=index, source="none", timings_us=timings)

        color = frame.ndim == 3
        gray = to_grayscale(frame) if color else frame

        skin_ns = 0
        if color:
            result.skin_checked = True

            def verify(box: Rect) -> bool:
                nonlocal skin_ns
                t0 = time.perf_counter_ns()
                fraction, _ = skin_fraction(frame, box, self.config.skin)
                skin_ns += time.perf_counter_ns() - t0
                result.skin_fraction = fraction
                return fraction >= self.config.skin.min_skin_fraction
        else:
            verify = None

        t0 = time.perf_counter_ns()
        outcome = interleaved_detect(self.state, self.config.frontal_cascade,
                                     self.config.profile_or_frontal, gray,
                                     self.config.scan, verify=verify)
        timings["detect"] = (time.perf_counter_ns() - t0 - skin_ns) // 1000
        timings["skin"] = skin_ns // 1000

        # Landmarks are extracted once, at the first verified detection, and
        # tracked frame-to-frame afterwards; displacement features need every
        # slot to keep following the same physical point. Detection keeps
        # maintaining the face box and the fallback state.
        current = None
        if outcome.kind == "detected":
            result.source = outcome.source
            result.box = outcome.box
            if self.history.reference is None:
                t0 = time.perf_counter_ns()
                regions = divide_face(outcome.box, self.config.regions)
                current = select_21(gray, outcome.box, regions, self.config.corners)
                timings["landmarks"] = (time.perf_counter_ns() - t0) // 1000
                self.history.set_reference(current, self.config.normalize_displacements)
        elif outcome.kind == "track":
            result.source = "tracked"
            result.box = self.state.last_box

        if current is None and outcome.kind != "none" \
                and self.prev_gray is not None and len(self.history):
            t0 = time.perf_counter_ns()
            current = track_set(self.prev_gray, gray, self.history.buffer[-1],
                                self.config.flow)
            timings["track"] = (time.perf_counter_ns() - t0) // 1000

        if current is not None:
            result.landmarks = current
            self.history.append(current)
            self.appended += 1
            if self.appended % self.config.smoothing_window == 0 \
                    and self.history.reference is not None:
                t0 = time.perf_counter_ns()
                median = median_smooth(self.history.buffer)
                timings["median"] = (time.perf_counter_ns() - t0) // 1000
                t0 = time.perf_counter_ns()
                fv = feature_vector(median, self.history.reference,
                                    self.history.interocular)
                timings["features"] = (time.perf_counter_ns() - t0) // 1000
                result.feature = fv
                if self.active_label is not None:
                    self.pool.append((self.config.label_id(self.active_label), fv.values))
                if self.model is not None:
                    t0 = time.perf_counter_ns()
                    label_id, _ = predict(self.model, fv.values)
                    timings["predict"] = (time.perf_counter_ns() - t0) // 1000
                    result.predicted = self.config.labels[label_id]

        self.prev_gray = gray
        return result

    def run(self, frames) -> list:
        return [self.process_frame(f) for f in frames]
