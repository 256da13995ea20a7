"""Archetypal analysis by alternating constrained least squares.

The model approximates an ``n x m`` data matrix ``X`` by ``alpha @ Z`` where
the ``k`` archetypes ``Z = beta @ X`` are themselves convex combinations of
observations. Rows of ``alpha`` (n x k) and ``beta`` (k x n) are probability
vectors.
"""

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import ConfigurationError, ConvergenceError, FitError, InputError
from .nnls import SimplexLsProblem, simplex_ls_batch, solve_simplex_ls

__all__ = [
    "INIT_STRATEGIES",
    "ArchetypalModel",
    "DataMatrix",
    "FitConfig",
    "RestartDiagnostics",
    "compute_rss",
    "fit",
    "init_beta",
    "update_alpha",
    "update_beta",
]

INIT_STRATEGIES = ("furthest-sum", "random-beta")


@dataclass(frozen=True, eq=False)
class DataMatrix:
    """Observation matrix with column names and optional row labels.

    ``metadata`` keeps non-numeric columns (team, role, position, ...) as
    tuples of strings aligned with the rows. ``scaling`` is set when the
    values have been standardized.
    """

    values: np.ndarray
    column_names: tuple
    row_labels: Optional[tuple] = None
    metadata: dict = field(default_factory=dict)
    scaling: object = None

    def __post_init__(self):
        values = np.array(self.values, dtype=float)
        if values.ndim != 2:
            raise InputError(f"data must be 2-D, got shape {values.shape}")
        n, m = values.shape
        if n < 1 or m < 1:
            raise InputError(f"data must have at least one row and column, got {values.shape}")
        if not np.all(np.isfinite(values)):
            bad = np.argwhere(~np.isfinite(values))[0]
            raise InputError(f"non-finite value at row {bad[0]}, column {bad[1]}")
        names = tuple(str(c) for c in self.column_names)
        if len(names) != m:
            raise InputError(f"{len(names)} column names for {m} columns")
        if len(set(names)) != m:
            raise InputError(f"column names are not distinct: {names}")
        labels = self.row_labels
        if labels is not None:
            labels = tuple(str(r) for r in labels)
            if len(labels) != n:
                raise InputError(f"{len(labels)} row labels for {n} rows")
        metadata = {str(k): tuple(v) for k, v in self.metadata.items()}
        for key, column in metadata.items():
            if len(column) != n:
                raise InputError(f"metadata column {key!r} has {len(column)} rows, expected {n}")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "column_names", names)
        object.__setattr__(self, "row_labels", labels)
        object.__setattr__(self, "metadata", metadata)

    @classmethod
    def from_array(cls, values, column_names=None, row_labels=None, **kwargs):
        values = np.asarray(values, dtype=float)
        if values.ndim == 1:
            values = values[:, None]
        if column_names is None:
            column_names = [f"x{j + 1}" for j in range(values.shape[1])]
        return cls(values, column_names, row_labels, **kwargs)

    @property
    def n(self):
        return self.values.shape[0]

    @property
    def m(self):
        return self.values.shape[1]

    def label(self, i):
        return self.row_labels[i] if self.row_labels is not None else str(i + 1)


@dataclass(frozen=True)
class FitConfig:
    """Settings for :func:`fit`.

    ``penalty_weight=None`` lets the kernel pick ``200 * max|A|`` for each
    subproblem.
    """

    k: int
    restarts: int = 10
    max_iterations: int = 100
    rel_tolerance: float = 1e-6
    penalty_weight: Optional[float] = None
    init: str = "furthest-sum"
    seed: int = 0

    def __post_init__(self):
        if int(self.k) != self.k or self.k < 1:
            raise ConfigurationError(f"k must be a positive integer, got {self.k}")
        if int(self.restarts) != self.restarts or self.restarts < 1:
            raise ConfigurationError(f"restarts must be >= 1, got {self.restarts}")
        if int(self.max_iterations) != self.max_iterations or self.max_iterations < 1:
            raise ConfigurationError(f"max_iterations must be >= 1, got {self.max_iterations}")
        if not (self.rel_tolerance > 0):
            raise ConfigurationError(f"rel_tolerance must be > 0, got {self.rel_tolerance}")
        if self.penalty_weight is not None and not (
            np.isfinite(self.penalty_weight) and self.penalty_weight > 0
        ):
            raise ConfigurationError(f"penalty_weight must be positive, got {self.penalty_weight}")
        if self.init not in INIT_STRATEGIES:
            raise ConfigurationError(f"init must be one of {INIT_STRATEGIES}, got {self.init!r}")


@dataclass(frozen=True)
class RestartDiagnostics:
    seed: Optional[int]
    start: str
    rss: float
    iterations: int
    converged: bool
    rss_history: tuple = ()
    error: Optional[str] = None


@dataclass(frozen=True, eq=False)
class ArchetypalModel:
    """A fitted archetypal analysis.

    Attributes
    ----------
    archetypes : ndarray, shape (k, m)
        In the units of the data the model was fitted on.
    alpha : ndarray, shape (n, k)
    beta : ndarray, shape (k, n)
    rss : float
        Frobenius norm of ``X - alpha @ archetypes``.
    rss_rel : float
        ``rss / ||X||_F``.
    rss_history : tuple
        RSS after initialization and after every iteration of the winning
        restart.
    """

    k: int
    archetypes: np.ndarray
    alpha: np.ndarray
    beta: np.ndarray
    rss: float
    rss_rel: float
    iterations: int
    converged: bool
    seed: Optional[int]
    scaling: object = None
    column_names: Optional[tuple] = None
    rss_history: tuple = ()
    restarts: tuple = ()
    duplicate_archetypes: tuple = ()

    def __post_init__(self):
        for name in ("archetypes", "alpha", "beta"):
            arr = np.array(getattr(self, name), dtype=float)
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    def archetypes_original(self):
        """Archetypes mapped back to the units of the unscaled data."""
        if self.scaling is None:
            return np.array(self.archetypes)
        return self.scaling.unscale(self.archetypes)


def _values(data):
    return data.values if isinstance(data, DataMatrix) else np.asarray(data, dtype=float)


def compute_rss(data, alpha, archetypes):
    """Frobenius norm of the residual ``X - alpha @ archetypes``."""
    X = _values(data)
    alpha = np.asarray(alpha, dtype=float)
    Z = np.asarray(archetypes, dtype=float)
    if alpha.shape[0] != X.shape[0] or Z.shape[1] != X.shape[1] or alpha.shape[1] != Z.shape[0]:
        raise ValueError(
            f"inconsistent shapes: data {X.shape}, alpha {alpha.shape}, archetypes {Z.shape}"
        )
    return float(np.linalg.norm(X - alpha @ Z))


def update_alpha(data, archetypes, alpha=None, penalty_weight=None):
    """Best convex weights of every observation over fixed archetypes.

    When the previous ``alpha`` is given it seeds the active sets and any
    row whose new residual would be larger keeps its old weights.
    """
    X = _values(data)
    Z = np.asarray(archetypes, dtype=float)
    if Z.shape[1] != X.shape[1]:
        raise ValueError(f"archetypes have {Z.shape[1]} columns, data has {X.shape[1]}")
    new = simplex_ls_batch(Z.T, X, x0=alpha, penalty_weight=penalty_weight)
    if alpha is not None:
        alpha = np.asarray(alpha, dtype=float)
        old_err = np.sum((X - alpha @ Z) ** 2, axis=1)
        new_err = np.sum((X - new @ Z) ** 2, axis=1)
        worse = new_err > old_err
        new[worse] = alpha[worse]
    return new


def update_beta(data, alpha, beta=None, penalty_weight=None):
    """Best archetypes for fixed ``alpha``, one archetype at a time.

    Archetype ``j`` is re-solved with the others held fixed: with
    ``R = X - sum_{l != j} alpha_l z_l^T`` the block objective equals
    ``||alpha_j||^2 ||z_j - R^T alpha_j / ||alpha_j||^2||^2`` plus a constant,
    a simplex least-squares problem in the weights ``beta_j``. Each block
    solve is exact, so the RSS cannot increase. Archetypes with an all-zero
    ``alpha`` column are left where they are.

    Returns
    -------
    beta : ndarray, shape (k, n)
    archetypes : ndarray, shape (k, m)
    """
    X = _values(data)
    alpha = np.asarray(alpha, dtype=float)
    n, k = alpha.shape
    if n != X.shape[0]:
        raise ValueError(f"alpha has {n} rows, data has {X.shape[0]}")
    if beta is None:
        beta = np.full((k, n), 1.0 / n)
    else:
        beta = np.array(beta, dtype=float)
    Z = beta @ X
    residual = X - alpha @ Z
    for j in range(k):
        a = alpha[:, j]
        weight = a @ a
        if weight <= 0:
            continue
        partial = residual + np.outer(a, Z[j])
        target = partial.T @ a / weight
        candidate = solve_simplex_ls(
            SimplexLsProblem(X.T, target, penalty_weight), support=beta[j] > 0
        )
        z_new = candidate @ X
        if np.sum((z_new - target) ** 2) <= np.sum((Z[j] - target) ** 2):
            beta[j] = candidate
            Z[j] = z_new
        residual = partial - np.outer(a, Z[j])
    return beta, beta @ X


def _furthest_sum(X, k, rng, max_sweeps=10):
    n = X.shape[0]
    dist = lambda i: np.linalg.norm(X - X[i], axis=1)
    start = int(rng.integers(n))
    picked = [int(np.argmax(dist(start)))]
    summed = dist(picked[0])
    available = np.ones(n, dtype=bool)
    available[picked[0]] = False
    while len(picked) < k:
        choice = int(np.argmax(np.where(available, summed, -np.inf)))
        picked.append(choice)
        available[choice] = False
        summed += dist(choice)

    # Swap passes: re-pick each member against the others until stable.
    for _ in range(max_sweeps if k > 1 else 0):
        changed = False
        for slot in range(k):
            old = picked[slot]
            summed -= dist(old)
            available[old] = True
            choice = int(np.argmax(np.where(available, summed, -np.inf)))
            picked[slot] = choice
            available[choice] = False
            summed += dist(choice)
            changed |= choice != old
        if not changed:
            break
    return picked


def init_beta(data, k, strategy="furthest-sum", seed=None):
    """Initial ``beta`` with unit rows picking ``k`` distinct observations.

    ``random-beta`` draws the observations uniformly without replacement.
    ``furthest-sum`` starts from a random observation, takes the one
    furthest from it, and then repeatedly adds the observation with the
    largest summed distance to those already picked; the random starting
    point itself is discarded. Swap passes then replace each pick by the
    best candidate against the remaining ``k - 1`` until nothing changes.
    """
    X = _values(data)
    n = X.shape[0]
    if k > n:
        raise ConfigurationError(f"k = {k} exceeds the number of observations {n}")
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    if strategy == "random-beta":
        picked = rng.choice(n, size=k, replace=False)
    elif strategy == "furthest-sum":
        picked = _furthest_sum(X, k, rng)
    else:
        raise ConfigurationError(f"unknown init strategy {strategy!r}")
    beta = np.zeros((k, n))
    beta[np.arange(k), picked] = 1.0
    return beta


def _mean_padded_beta(n, k, rng):
    beta = np.zeros((k, n))
    beta[0] = 1.0 / n
    if k > 1:
        picked = rng.choice(n, size=k - 1, replace=False)
        beta[np.arange(1, k), picked] = 1.0
    return beta


def _run(X, beta, config):
    Z = beta @ X
    alpha = update_alpha(X, Z, penalty_weight=config.penalty_weight)
    rss = compute_rss(X, alpha, Z)
    history = [rss]
    converged = False
    iterations = 0
    for iterations in range(1, config.max_iterations + 1):
        beta, Z = update_beta(X, alpha, beta, penalty_weight=config.penalty_weight)
        alpha = update_alpha(X, Z, alpha, penalty_weight=config.penalty_weight)
        new_rss = compute_rss(X, alpha, Z)
        history.append(new_rss)
        improvement = (rss - new_rss) / max(rss, 1e-30)
        rss = new_rss
        if improvement < config.rel_tolerance:
            converged = True
            break
    return alpha, beta, Z, rss, tuple(history), iterations, converged


def _duplicates(Z, scale):
    pairs = []
    for i in range(len(Z)):
        for j in range(i + 1, len(Z)):
            if np.linalg.norm(Z[i] - Z[j]) <= 1e-9 * scale:
                pairs.append((i, j))
    return tuple(pairs)


def fit(data, config, initial_betas=()):
    """Fit ``config.k`` archetypes to ``data``.

    Runs ``config.restarts`` starts seeded ``seed, seed + 1, ...`` with the
    configured initialization, plus one start whose first archetype is the
    sample mean (so the fit never loses to the one-archetype optimum), plus
    any ``initial_betas`` supplied by the caller. The lowest RSS wins, ties
    going to the earlier start.

    Parameters
    ----------
    data : DataMatrix or array_like, shape (n, m)
    config : FitConfig
    initial_betas : sequence of ndarray, shape (k, n)
        Extra warm starts, e.g. a (k-1)-solution padded with one row.

    Returns
    -------
    ArchetypalModel
        Archetypes ordered by decreasing row sum.
    """
    if not isinstance(data, DataMatrix):
        data = DataMatrix.from_array(data)
    X = np.asarray(data.values)
    n = data.n
    k = config.k
    if k > n:
        raise ConfigurationError(f"k = {k} exceeds the number of observations {n}")

    starts = []
    for r in range(config.restarts):
        seed = config.seed + r
        starts.append((seed, config.init, lambda s=seed: init_beta(X, k, config.init, s)))
    mean_seed = config.seed + config.restarts
    starts.append(
        (mean_seed, "mean-padded",
         lambda: _mean_padded_beta(n, k, np.random.default_rng(mean_seed)))
    )
    for beta0 in initial_betas:
        beta0 = np.asarray(beta0, dtype=float)
        if beta0.shape != (k, n):
            raise ConfigurationError(f"initial beta has shape {beta0.shape}, expected {(k, n)}")
        starts.append((None, "warm-start", lambda b=beta0: b.copy()))

    diagnostics = []
    best = None
    for seed, label, make in starts:
        try:
            alpha, beta, Z, rss, history, iterations, converged = _run(X, make(), config)
        except ConvergenceError as err:
            diagnostics.append(RestartDiagnostics(seed, label, float("nan"), 0, False, error=str(err)))
            continue
        diagnostics.append(RestartDiagnostics(seed, label, rss, iterations, converged, history))
        if best is None or rss < best[3] - 1e-12:
            best = (alpha, beta, Z, rss, history, iterations, converged, seed)

    if best is None:
        raise FitError(f"all {len(starts)} starts failed", diagnostics)

    alpha, beta, Z, rss, history, iterations, converged, seed = best
    order = np.argsort(-Z.sum(axis=1), kind="stable")
    alpha = alpha[:, order]
    beta = beta[order]
    Z = beta @ X
    norm_x = float(np.linalg.norm(X))
    rss = compute_rss(X, alpha, Z)
    return ArchetypalModel(
        k=k,
        archetypes=Z,
        alpha=alpha,
        beta=beta,
        rss=rss,
        rss_rel=rss / norm_x if norm_x > 0 else 0.0,
        iterations=iterations,
        converged=converged,
        seed=seed,
        scaling=data.scaling,
        column_names=data.column_names,
        rss_history=history,
        restarts=tuple(diagnostics),
        duplicate_archetypes=_duplicates(Z, max(1.0, float(np.abs(X).max()))),
    )

