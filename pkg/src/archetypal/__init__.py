"""Archetypal analysis: extreme observations as convex combinations of data."""

__version__ = "0.1.0"

from .analytics import (
    HullInfo,
    HullPosition,
    PercentileProfile,
    assignments,
    composition_query,
    convex_hull_2d,
    dominant_pair,
    nearest_observations,
    percentile_profile,
    point_in_hull,
    ternary_coordinates,
    threshold_cohort,
)
from .core import ArchetypalModel, DataMatrix, FitConfig, compute_rss, fit, init_beta, update_alpha, update_beta
from .errors import (
    ArchetypalError,
    ConfigurationError,
    ConvergenceError,
    FitError,
    InputError,
    NotEnoughPointsError,
)
from .io import ingest_csv, load_model, save_model
from .nnls import SimplexLsProblem, nnls, solve_simplex_ls
from .scaling import ScalingParams, standardize, unscale_archetypes
from .selection import ScreeSeries, scree, suggest_elbow

__all__ = [
    "ArchetypalError",
    "ArchetypalModel",
    "ConfigurationError",
    "ConvergenceError",
    "DataMatrix",
    "FitConfig",
    "FitError",
    "HullInfo",
    "HullPosition",
    "InputError",
    "NotEnoughPointsError",
    "PercentileProfile",
    "ScalingParams",
    "ScreeSeries",
    "SimplexLsProblem",
    "assignments",
    "composition_query",
    "compute_rss",
    "convex_hull_2d",
    "dominant_pair",
    "fit",
    "ingest_csv",
    "init_beta",
    "load_model",
    "nearest_observations",
    "nnls",
    "percentile_profile",
    "point_in_hull",
    "save_model",
    "scree",
    "solve_simplex_ls",
    "standardize",
    "suggest_elbow",
    "ternary_coordinates",
    "threshold_cohort",
    "unscale_archetypes",
    "update_alpha",
    "update_beta",
]
