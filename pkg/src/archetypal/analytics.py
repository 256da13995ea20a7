"""Interpreting a fitted model: profiles, assignments, cohorts, geometry.

Archetype indices are zero-based throughout this module.
"""

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import ConfigurationError, InputError

__all__ = [
    "AssignmentRow",
    "AssignmentTable",
    "HullInfo",
    "HullPosition",
    "PercentileProfile",
    "assignments",
    "composition_query",
    "convex_hull_2d",
    "dominant_pair",
    "nearest_observations",
    "percentile_profile",
    "point_in_hull",
    "sample_rows",
    "ternary_coordinates",
    "threshold_cohort",
]

TERNARY_CORNERS = np.array([[0.0, 0.0], [1.0, 0.0], [0.5, np.sqrt(3.0) / 2.0]])


@dataclass(frozen=True, eq=False)
class PercentileProfile:
    values: np.ndarray
    column_names: tuple


@dataclass(frozen=True)
class AssignmentRow:
    label: str
    alpha: tuple
    nearest: int
    max_alpha: float


@dataclass(frozen=True)
class AssignmentTable:
    rows: tuple

    def __len__(self):
        return len(self.rows)

    def __iter__(self):
        return iter(self.rows)

    @property
    def nearest(self):
        return np.array([r.nearest for r in self.rows], dtype=int)


@dataclass(frozen=True)
class HullInfo:
    """Counter-clockwise hull vertices as indices into the input points."""

    vertex_indices: tuple

    @property
    def N(self):
        return len(self.vertex_indices)


class HullPosition(str, Enum):
    INSIDE = "inside"
    ON = "on"
    OUTSIDE = "outside"


def _original_values(data):
    if data.scaling is None:
        return np.asarray(data.values)
    return data.scaling.unscale(data.values)


def _fitted_values(model, data):
    """Data expressed in the space the model was fitted in."""
    if data.scaling is not None or model.scaling is None:
        return np.asarray(data.values)
    return model.scaling.scale(data.values)


def _check_columns(model, data):
    if model.archetypes.shape[1] != data.m:
        raise InputError(f"model has {model.archetypes.shape[1]} columns, data has {data.m}")
    if model.column_names is not None and tuple(model.column_names) != tuple(data.column_names):
        raise InputError(
            f"column mismatch: model {list(model.column_names)}, data {list(data.column_names)}"
        )


def _check_rows(model, data):
    if model.alpha.shape[0] != data.n:
        raise InputError(f"model has {model.alpha.shape[0]} observations, data has {data.n}")


def percentile_profile(model, data):
    """Percentile of each archetype value within its data column.

    Entry ``(j, c)`` is ``100 * #{i : X[i, c] <= Z[j, c]} / n`` on original
    units. The comparison allows ``1e-9`` relative slack so that an
    archetype sitting exactly on an observation survives the scaling round
    trip.
    """
    _check_columns(model, data)
    X = _original_values(data)
    Z = model.archetypes_original()
    slack = 1e-9 * np.maximum(1.0, np.abs(X).max(axis=0))
    counts = (X[None, :, :] <= Z[:, None, :] + slack).sum(axis=1)
    return PercentileProfile(100.0 * counts / X.shape[0], tuple(data.column_names))


def assignments(model, data):
    """One row per observation: its alpha, argmax archetype and max alpha.

    ``np.argmax`` returns the first maximum, so ties go to the lowest index.
    """
    _check_rows(model, data)
    alpha = model.alpha
    nearest = np.argmax(alpha, axis=1)
    rows = tuple(
        AssignmentRow(data.label(i), tuple(float(a) for a in alpha[i]), int(nearest[i]), float(alpha[i, nearest[i]]))
        for i in range(data.n)
    )
    return AssignmentTable(rows)


def nearest_observations(model, data, tie_tol=1e-12):
    """Index of the observation with the largest weight on each archetype.

    Weights within ``tie_tol`` of the maximum are tied; ties go to the
    observation closest to the archetype, then to the lower row index.
    """
    _check_rows(model, data)
    X = _fitted_values(model, data)
    result = []
    for j in range(model.k):
        a = model.alpha[:, j]
        tied = np.flatnonzero(a >= a.max() - tie_tol)
        dist = np.linalg.norm(X[tied] - model.archetypes[j], axis=1)
        result.append(int(tied[np.lexsort((tied, dist))[0]]))
    return result


def _sorted_by_alpha(alpha_column, rows):
    rows = np.asarray(rows, dtype=int)
    return [int(i) for i in rows[np.lexsort((rows, -alpha_column[rows]))]]


def threshold_cohort(model, data, archetype_index, t):
    """Rows whose weight on ``archetype_index`` exceeds ``t``, by descending weight."""
    _check_rows(model, data)
    if not 0 <= archetype_index < model.k:
        raise IndexError(f"archetype index {archetype_index} out of range for k = {model.k}")
    if not 0.0 <= t <= 1.0:
        raise ConfigurationError(f"threshold must lie in [0, 1], got {t}")
    a = model.alpha[:, archetype_index]
    return _sorted_by_alpha(a, np.flatnonzero(a > t))


def composition_query(model, data, predicate, sort_by=0):
    """Rows whose alpha vector satisfies ``predicate``.

    Ordered by descending weight on archetype ``sort_by`` (row order breaks
    ties).
    """
    _check_rows(model, data)
    hits = [i for i in range(data.n) if predicate(model.alpha[i])]
    return _sorted_by_alpha(model.alpha[:, sort_by], hits)


def dominant_pair(primary, secondary, zero_tol=0.005):
    """Predicate: only ``primary`` and ``secondary`` contribute, ``primary`` more.

    Weights below ``zero_tol`` count as zero; the default matches values
    that round to 0.00.
    """

    def predicate(alpha):
        others = np.delete(alpha, [primary, secondary])
        return bool(alpha[primary] > alpha[secondary] and np.all(others < zero_tol))

    return predicate


def sample_rows(rows, size, seed=0):
    """Reproducible random subset of ``rows``, kept in the original order."""
    rows = list(rows)
    if size >= len(rows):
        return rows
    rng = np.random.default_rng(seed)
    picked = sorted(rng.choice(len(rows), size=size, replace=False))
    return [rows[i] for i in picked]


def ternary_coordinates(model):
    """Map three-archetype weights onto the triangle (0,0), (1,0), (1/2, sqrt(3)/2)."""
    if model.k != 3:
        raise ConfigurationError(f"ternary coordinates need k = 3, got k = {model.k}")
    return model.alpha @ TERNARY_CORNERS


def _cross(o, a, b):
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def convex_hull_2d(points):
    """Monotone-chain hull; collinear and duplicate points are not vertices."""
    P = np.asarray(points, dtype=float)
    if P.ndim != 2 or P.shape[1] != 2 or P.shape[0] < 1:
        raise InputError(f"expected an (n, 2) array with n >= 1, got shape {P.shape}")
    if not np.all(np.isfinite(P)):
        raise InputError("non-finite hull coordinates")

    order = np.lexsort((np.arange(len(P)), P[:, 1], P[:, 0]))
    unique = [int(order[0])]
    for i in order[1:]:
        if not np.array_equal(P[i], P[unique[-1]]):
            unique.append(int(i))
    if len(unique) <= 2:
        return HullInfo(tuple(unique))

    def chain(indices):
        out = []
        for i in indices:
            while len(out) >= 2 and _cross(P[out[-2]], P[out[-1]], P[i]) <= 0:
                out.pop()
            out.append(i)
        return out

    lower = chain(unique)
    upper = chain(reversed(unique))
    return HullInfo(tuple(lower[:-1] + upper[:-1]))


def _segment_distance(q, a, b):
    ab = b - a
    denom = ab @ ab
    t = 0.0 if denom == 0 else np.clip((q - a) @ ab / denom, 0.0, 1.0)
    return float(np.linalg.norm(q - (a + t * ab)))


def point_in_hull(hull, points, query, tol=1e-9):
    """Classify ``query`` against a hull built from ``points``.

    ``on`` means within ``tol`` of the hull boundary; otherwise the signed
    area of every counter-clockwise edge decides inside versus outside.
    """
    P = np.asarray(points, dtype=float)[list(hull.vertex_indices)]
    q = np.asarray(query, dtype=float)
    if len(P) == 1:
        return HullPosition.ON if np.linalg.norm(q - P[0]) <= tol else HullPosition.OUTSIDE
    edges = [(P[i], P[(i + 1) % len(P)]) for i in range(len(P) if len(P) > 2 else 1)]
    if min(_segment_distance(q, a, b) for a, b in edges) <= tol:
        return HullPosition.ON
    if len(P) == 2:
        return HullPosition.OUTSIDE
    if all(_cross(a, b, q) > 0 for a, b in edges):
        return HullPosition.INSIDE
    return HullPosition.OUTSIDE
