"""Equivalences between holographic, polynomial and bounded-network representations
of fuzzy Boolean functions, with exhaustive and Monte Carlo verification."""

__version__ = "0.1.0"

from .activations import CLIP, CLIPPED_SQUARE, Activation
from .functions import (
    CoordinateMeasure,
    FuzzyFunction,
    Junta,
    Parity,
    TableFunction,
    WeightedAverage,
    eval_function,
)
from .holographic import (
    HoloScheme,
    averaged_test,
    build_mean_scheme,
    build_junta_scheme,
    eval_scheme_once,
    holo_check,
    identicalize,
)
from .network import Network, audit_complexity, compile_poly_to_nn, forward
from .polynomial import PolyRep, eval_poly, holo_to_poly, poly_complexity, substitute_scaling
from .regularity import Partition, StepArray, weak_box_regularize
from .sampling import nn_to_holo, plan_network, run_affine, run_plan
from .serialization import dumps, load, loads, save
from .verification import PipelineConfig, lemma_suite, run_pipeline, sup_norm_error

__all__ = [
    "Activation", "CLIP", "CLIPPED_SQUARE", "CoordinateMeasure", "FuzzyFunction", "Junta",
    "Parity", "TableFunction", "WeightedAverage", "eval_function", "HoloScheme",
    "averaged_test", "build_mean_scheme", "build_junta_scheme", "eval_scheme_once",
    "holo_check", "identicalize", "Network", "audit_complexity", "compile_poly_to_nn",
    "forward", "PolyRep", "eval_poly", "holo_to_poly", "poly_complexity",
    "substitute_scaling", "Partition", "StepArray", "weak_box_regularize", "nn_to_holo",
    "plan_network", "run_affine", "run_plan", "dumps", "load", "loads", "save",
    "PipelineConfig", "lemma_suite", "run_pipeline", "sup_norm_error",
]
