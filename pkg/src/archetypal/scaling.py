"""Column standardization applied before fitting, and its inverse."""

import warnings
from dataclasses import dataclass, field

import numpy as np

from .core import DataMatrix
from .errors import ConfigurationError

__all__ = ["SCALING_METHODS", "ScalingParams", "standardize", "unscale_archetypes"]

SCALING_METHODS = ("none", "zscore", "minmax")
SD_FLOOR = 1e-12


@dataclass(frozen=True, eq=False)
class ScalingParams:
    """Per-column ``(x - offset) / divisor`` transform.

    ``constant_columns`` flags columns whose spread was below the floor;
    they get divisor 1.
    """

    method: str
    offset: np.ndarray
    divisor: np.ndarray
    constant_columns: tuple = field(default=())

    def __post_init__(self):
        if self.method not in SCALING_METHODS:
            raise ConfigurationError(f"unknown scaling method {self.method!r}")
        offset = np.array(self.offset, dtype=float)
        divisor = np.array(self.divisor, dtype=float)
        if offset.shape != divisor.shape or offset.ndim != 1:
            raise ConfigurationError("offset and divisor must be 1-D of equal length")
        if np.any(divisor <= 0):
            raise ConfigurationError("every divisor must be positive")
        object.__setattr__(self, "offset", offset)
        object.__setattr__(self, "divisor", divisor)
        object.__setattr__(self, "constant_columns", tuple(bool(c) for c in self.constant_columns))

    def scale(self, values):
        return (np.asarray(values, dtype=float) - self.offset) / self.divisor

    def unscale(self, values):
        return np.asarray(values, dtype=float) * self.divisor + self.offset

    def to_dict(self):
        return {
            "method": self.method,
            "offset": self.offset.tolist(),
            "divisor": self.divisor.tolist(),
            "constant_columns": list(self.constant_columns),
        }

    @classmethod
    def from_dict(cls, d):
        return cls(d["method"], d["offset"], d["divisor"], tuple(d.get("constant_columns", ())))


def standardize(data, method="zscore"):
    """Scale every column of ``data``.

    ``zscore`` uses the sample standard deviation (``ddof=1``); ``minmax``
    maps each column onto ``[0, 1]``. Columns with spread below 1e-12 keep
    divisor 1 and raise a warning.

    Returns
    -------
    scaled : DataMatrix
        Same labels and metadata, with ``scaling`` set.
    params : ScalingParams
    """
    X = data.values
    n, m = X.shape
    if method == "none":
        offset = np.zeros(m)
        spread = np.ones(m)
    elif method == "zscore":
        offset = X.mean(axis=0)
        spread = X.std(axis=0, ddof=1) if n > 1 else np.zeros(m)
    elif method == "minmax":
        offset = X.min(axis=0)
        spread = X.max(axis=0) - offset
    else:
        raise ConfigurationError(f"unknown scaling method {method!r}; expected one of {SCALING_METHODS}")

    constant = spread < SD_FLOOR
    divisor = np.where(constant, 1.0, spread)
    if method != "none" and constant.any():
        names = [c for c, flag in zip(data.column_names, constant) if flag]
        warnings.warn(f"constant columns left unscaled: {names}", RuntimeWarning, stacklevel=2)
    params = ScalingParams(method, offset, divisor, tuple(constant) if method != "none" else ())
    scaled = DataMatrix(
        params.scale(X), data.column_names, data.row_labels, data.metadata, scaling=params
    )
    return scaled, params


def unscale_archetypes(archetypes, params):
    """Map archetypes from the scaled space back to original units."""
    if params is None:
        return np.array(archetypes, dtype=float)
    return params.unscale(archetypes)
