"""Complex-valued Kolmogorov-Arnold networks.

Learnable complex RBF edge functions on a G x G grid with CSiLU residuals,
complex batch normalization, a reproducible cross-validation harness, and
relevance-based explainability with a JSON export for the viewer.
"""

__version__ = "0.1.0"

from .complexval import ComplexBatch
from .data import (Dataset, gen_circuit, gen_holography, gen_knot_surrogate,
                   gen_symbolic, load_knots, recombine, to_split_real)
from .errors import (BatchStatsError, ConfigError, CvkanError, DataError,
                     GradientError, SchemaError, ShapeError, TrainingDiverged)
from .explain import (RelevanceReport, complex_std, export_viz, load_model,
                      prune_features, ranked_features, relevance,
                      sample_edge_surface, save_model)
from .layers import CsiluParams, EdgeFunction, GridSpec, csilu, edge_forward, make_grid
from .model import (CvkanModel, FastKanModel, ModelConfig, build_layout,
                    init_params, make_model, param_count)
from .norms import NormLayer
from .optim import Adam, AdamConfig
from .train import ExperimentConfig, RunSummary, config_from_dict, load_config, run_cv

__all__ = [
    "Adam", "AdamConfig", "BatchStatsError", "ComplexBatch", "ConfigError",
    "CsiluParams", "CvkanError", "CvkanModel", "Dataset", "EdgeFunction",
    "ExperimentConfig", "FastKanModel", "GradientError", "GridSpec",
    "ModelConfig", "NormLayer", "RelevanceReport", "RunSummary", "SchemaError",
    "ShapeError", "TrainingDiverged", "build_layout", "complex_std",
    "config_from_dict", "csilu", "edge_forward", "export_viz", "gen_circuit",
    "gen_holography", "gen_knot_surrogate", "gen_symbolic", "init_params",
    "load_config", "load_knots", "load_model", "make_grid", "make_model",
    "param_count", "prune_features", "ranked_features", "recombine",
    "relevance", "run_cv", "sample_edge_surface", "save_model",
    "to_split_real",
]
