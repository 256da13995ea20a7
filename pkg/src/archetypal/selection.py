"""Choosing the number of archetypes from the RSS-versus-k curve."""

from dataclasses import dataclass, replace
from typing import Optional

import numpy as np

from .core import DataMatrix, fit
from .errors import ArchetypalError, ConfigurationError, NotEnoughPointsError

__all__ = ["ElbowSuggestion", "ScreeEntry", "ScreeSeries", "scree", "suggest_elbow"]


@dataclass(frozen=True)
class ScreeEntry:
    k: int
    best_rss: float
    best_rss_rel: float
    restart_rss_spread: float
    converged_fraction: float
    error: Optional[str] = None


@dataclass(frozen=True)
class ScreeSeries:
    entries: tuple
    k_max: int
    models: tuple = ()

    def rss(self):
        return np.array([e.best_rss for e in self.entries])

    @classmethod
    def from_rss(cls, rss):
        """Series from a plain ``{k: rss}`` mapping or a list for ``k = 1, 2, ...``."""
        items = rss.items() if isinstance(rss, dict) else enumerate(rss, start=1)
        entries = tuple(ScreeEntry(int(k), float(v), float("nan"), 0.0, 1.0) for k, v in items)
        return cls(entries, entries[-1].k if entries else 0)


@dataclass(frozen=True)
class ElbowSuggestion:
    k: int
    scores: dict


def scree(data, k_max, config_template):
    """Fit ``k = 1..k_max`` and collect the best RSS for each.

    The fit for ``k + 1`` gets one extra start built from the best
    ``k``-solution plus one randomly chosen observation as the new
    archetype. Padding its ``alpha`` with a zero column reproduces the
    ``k`` residual, so the series cannot increase.

    A failing ``k`` is recorded in its entry (``error`` set, RSS NaN)
    instead of aborting the series.
    """
    if not isinstance(data, DataMatrix):
        data = DataMatrix.from_array(data)
    if not 1 <= k_max <= data.n:
        raise ConfigurationError(f"k_max must be in [1, {data.n}], got {k_max}")

    entries = []
    models = []
    previous = None
    for k in range(1, k_max + 1):
        config = replace(config_template, k=k)
        warm = []
        if previous is not None:
            rng = np.random.default_rng(config.seed + 7919 * k)
            extra = np.zeros((1, data.n))
            extra[0, rng.integers(data.n)] = 1.0
            warm.append(np.vstack([previous.beta, extra]))
        try:
            model = fit(data, config, initial_betas=warm)
        except ArchetypalError as err:
            entries.append(ScreeEntry(k, float("nan"), float("nan"), float("nan"), 0.0, str(err)))
            models.append(None)
            previous = None
            continue
        finished = [d for d in model.restarts if d.error is None]
        rss_values = np.array([d.rss for d in finished])
        entries.append(
            ScreeEntry(
                k=k,
                best_rss=model.rss,
                best_rss_rel=model.rss_rel,
                restart_rss_spread=float(rss_values.max() - rss_values.min()),
                converged_fraction=sum(d.converged for d in finished) / len(model.restarts),
            )
        )
        models.append(model)
        previous = model
    return ScreeSeries(tuple(entries), k_max, tuple(models))


def suggest_elbow(series):
    """Pick the interior ``k`` with the largest discrete second difference.

    ``score(k) = rss(k-1) - 2 rss(k) + rss(k+1)``. Scores within
    ``1e-12 * max rss`` of the best count as ties, which go to the
    smaller ``k``.
    """
    entries = series.entries if isinstance(series, ScreeSeries) else series
    if len(entries) < 3:
        raise NotEnoughPointsError(f"need at least 3 scree points, got {len(entries)}")
    ks = [e.k for e in entries]
    rss = np.array([e.best_rss for e in entries], dtype=float)
    scores = {ks[i]: float(rss[i - 1] - 2 * rss[i] + rss[i + 1]) for i in range(1, len(ks) - 1)}
    finite = {k: s for k, s in scores.items() if np.isfinite(s)}
    if not finite:
        raise NotEnoughPointsError("no finite second differences in the scree series")
    best = max(finite.values())
    tie = 1e-12 * np.nanmax(np.abs(rss))
    k = min(k for k, s in finite.items() if s >= best - tie)
    return ElbowSuggestion(k, scores)
