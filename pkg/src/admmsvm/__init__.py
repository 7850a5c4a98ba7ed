"""ADMM-based SVM training with Nystrom low-rank kernel approximation."""

from .admm import (
    AdmmConfig,
    AugmentedDesign,
    AdmmState,
    ConvergenceTrace,
    LinearModel,
    TraceRow,
    admm_step,
    build_system_matrix,
    initialize_state,
    precompute_z,
    primal_objective,
    soft_threshold,
    solve_linear,
)
from .data_io import (
    Dataset,
    ScalingRecord,
    SplitSpec,
    load_delimited,
    load_idx_dataset,
    load_sparse_text,
    read_idx,
    save_delimited,
    scale_features,
    split,
)
from .eigen import (
    EvdResult,
    SpectralTruncation,
    SymmetricMatrix,
    jacobi_evd,
    truncate_spectrum,
)
from .kernel import KernelParams, KernelMatrix, build_kernel_matrix, kernel_columns, rbf
from .nystrom import (
    NystromConfig,
    NystromFactor,
    approximation_mse,
    nystrom_factor,
    sample_subset,
)
from .smo import SmoConfig, SmoResult, smo_train
from .svm import (
    NonlinearModel,
    TrainReport,
    alpha_vector,
    decision_value,
    decision_values,
    kernel_objective,
    load_model,
    predict_linear,
    predict_nonlinear,
    save_model,
    train_nonlinear,
)
from . import errors, synthetic

__all__ = [
    "AdmmConfig",
    "AdmmState",
    "AugmentedDesign",
    "ConvergenceTrace",
    "Dataset",
    "EvdResult",
    "KernelMatrix",
    "KernelParams",
    "LinearModel",
    "NonlinearModel",
    "NystromConfig",
    "NystromFactor",
    "ScalingRecord",
    "SmoConfig",
    "SmoResult",
    "SpectralTruncation",
    "SplitSpec",
    "SymmetricMatrix",
    "TraceRow",
    "TrainReport",
    "admm_step",
    "alpha_vector",
    "approximation_mse",
    "build_kernel_matrix",
    "build_system_matrix",
    "decision_value",
    "decision_values",
    "errors",
    "initialize_state",
    "jacobi_evd",
    "kernel_columns",
    "kernel_objective",
    "load_delimited",
    "load_idx_dataset",
    "load_model",
    "load_sparse_text",
    "nystrom_factor",
    "precompute_z",
    "predict_linear",
    "predict_nonlinear",
    "primal_objective",
    "rbf",
    "read_idx",
    "sample_subset",
    "save_delimited",
    "save_model",
    "scale_features",
    "smo_train",
    "soft_threshold",
    "solve_linear",
    "split",
    "synthetic",
    "train_nonlinear",
    "truncate_spectrum",
]
