import numpy as np
import pytest

from visage.cascade import CascadeTrainParams, ScanParams, train_cascade
from visage.pipeline import SessionConfig
from visage.pipeline.synthetic import train_synthetic_cascade


@pytest.fixture(scope="session")
def face_cascade():
    """Cascade trained on schematic-face patches; reused by pipeline tests."""
    return train_synthetic_cascade(seed=7)


@pytest.fixture(scope="session")
def square_cascade():
    """Detector for a centered bright square on dark background.

    Negatives include off-center and wrong-scale squares so the detector is
    position- and scale-selective, plus noise/flat/constant clutter.
    """
    rng = np.random.default_rng(11)

    def patch_with_square(side, ox, oy):
        patch = rng.integers(20, 40, (24, 24)).astype(np.uint8)
        ox, oy = max(0, min(ox, 24 - side)), max(0, min(oy, 24 - side))
        patch[oy:oy + side, ox:ox + side] = 220
        return patch

    def centered(side, jitter):
        base = (24 - side) // 2
        return patch_with_square(side,
                                 base + int(rng.integers(-jitter, jitter + 1)),
                                 base + int(rng.integers(-jitter, jitter + 1)))

    pos = [centered(int(rng.integers(12, 16)), 1) for _ in range(150)]
    neg = []
    for i in range(900):
        kind = i % 6
        if kind == 0:
            side = int(rng.integers(12, 16))
            base = (24 - side) // 2
            off = int(rng.integers(4, 10)) * int(rng.choice([-1, 1]))
            if rng.integers(0, 2):
                neg.append(patch_with_square(side, base + off, base + int(rng.integers(-2, 3))))
            else:
                neg.append(patch_with_square(side, base + int(rng.integers(-2, 3)), base + off))
        elif kind == 1:
            neg.append(centered(int(rng.integers(5, 10)), 1))
        elif kind == 2:
            neg.append(centered(int(rng.integers(19, 23)), 1))
        elif kind == 3:
            neg.append(rng.integers(0, 255, (24, 24)).astype(np.uint8))
        elif kind == 4:
            neg.append(rng.integers(20, 40, (24, 24)).astype(np.uint8))
        else:
            neg.append(np.full((24, 24), int(rng.integers(0, 256)), dtype=np.uint8))
    params = CascadeTrainParams(max_stages=3, rounds_per_stage=(12, 20, 30),
                                pool_stride=4, pool_cap=4000)
    return train_cascade(pos, neg, params)


@pytest.fixture(scope="session")
def synth_scan():
    """Scan parameters matched to the synthetic 320x240 sequences."""
    return ScanParams(scale_start=3.0, scale_factor=1.25, step=3)


@pytest.fixture()
def synth_config(face_cascade, synth_scan):
    return SessionConfig(frontal_cascade=face_cascade, scan=synth_scan)
