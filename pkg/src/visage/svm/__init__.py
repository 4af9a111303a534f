from .core import (ScalingParams, SvmParams, identity_scaling, kernel_matrix,
                   rbf, scale_apply, scale_fit, train_binary_smo)
from .model import (Model, decision_values, dumps_model_text, load_model,
                    predict, save_model, train_multiclass)
from .select import (cross_validate, cross_validate_predictions,
                     default_c_grid, default_gamma_grid, grid_search,
                     stratified_folds)
from .data import read_problem, write_problem

__all__ = [
    "SvmParams", "ScalingParams", "scale_fit", "scale_apply", "identity_scaling",
    "rbf", "kernel_matrix", "train_binary_smo",
    "Model", "train_multiclass", "predict", "decision_values",
    "save_model", "load_model", "dumps_model_text",
    "cross_validate", "cross_validate_predictions", "grid_search",
    "stratified_folds", "default_c_grid", "default_gamma_grid",
    "read_problem", "write_problem",
]
