from .features import RectFeature, eval_feature, feature_pool, scaled_rects, window_std
from .model import (Cascade, StrongClassifier, WeakClassifier, eval_cascade,
                    eval_strong, eval_weak)
from .train import CascadeTrainParams, train_adaboost, train_cascade
from .detect import (Detection, InterleaveOutcome, InterleaveState, ScanParams,
                     detect_multiscale, interleaved_detect, merge_detections,
                     scan_windows)
from .io import import_opencv_xml, load_cascade, save_cascade

__all__ = [
    "RectFeature", "eval_feature", "feature_pool", "scaled_rects", "window_std",
    "WeakClassifier", "StrongClassifier", "Cascade",
    "eval_weak", "eval_strong", "eval_cascade",
    "train_adaboost", "train_cascade", "CascadeTrainParams",
    "ScanParams", "Detection", "scan_windows", "detect_multiscale",
    "merge_detections", "InterleaveState", "InterleaveOutcome", "interleaved_detect",
    "save_cascade", "load_cascade", "import_opencv_xml",
]
