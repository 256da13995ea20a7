"""Least-squares kernels: non-negative and simplex-constrained.

Both archetypal half-steps reduce to many small problems of the form

    minimize ||A x - b||  subject to  x >= 0,  sum(x) = 1.

The sum-to-one constraint is folded into a non-negative least squares
problem by appending a heavily weighted row of ones to ``A`` (and the same
weight to ``b``).  The remaining violation of the sum is driven to zero by
shifting the appended target (a method-of-multipliers correction), so the
inner solver stays a plain NNLS throughout.
"""

from dataclasses import dataclass

import numpy as np

from .errors import ConvergenceError, InputError

__all__ = [
    "SimplexLsProblem",
    "default_penalty_weight",
    "nnls",
    "penalized_nnls",
    "simplex_ls_batch",
    "solve_simplex_ls",
]

PENALTY_FACTOR = 200.0
KKT_TOLERANCE = 1e-10
CLAMP = 1e-12
SUM_TOLERANCE = 1e-12


def default_penalty_weight(coefficient_matrix):
    """Return ``200 * max|A|`` with the max floored at 1."""
    scale = np.max(np.abs(coefficient_matrix)) if np.size(coefficient_matrix) else 0.0
    return PENALTY_FACTOR * max(float(scale), 1.0)


@dataclass(frozen=True)
class SimplexLsProblem:
    """One ``min ||A x - b||`` problem over the probability simplex.

    Parameters
    ----------
    coefficient_matrix : ndarray, shape (rows, unknowns)
    target : ndarray, shape (rows,)
    penalty_weight : float, optional
        Weight of the appended sum-to-one row. Defaults to
        :func:`default_penalty_weight` of the coefficient matrix.
    """

    coefficient_matrix: np.ndarray
    target: np.ndarray
    penalty_weight: float = None

    def __post_init__(self):
        A = np.asarray(self.coefficient_matrix, dtype=float)
        b = np.asarray(self.target, dtype=float)
        if A.ndim != 2 or A.shape[1] < 1:
            raise ValueError("coefficient_matrix must be 2-D with at least one column")
        if b.ndim != 1 or b.shape[0] != A.shape[0]:
            raise ValueError(
                f"target length {b.shape} does not match {A.shape[0]} rows"
            )
        if not (np.all(np.isfinite(A)) and np.all(np.isfinite(b))):
            raise InputError("non-finite entries in simplex least-squares problem")
        weight = self.penalty_weight
        if weight is None:
            weight = default_penalty_weight(A)
        weight = float(weight)
        if not np.isfinite(weight) or weight <= 0:
            raise ValueError(f"penalty_weight must be positive and finite, got {weight}")
        object.__setattr__(self, "coefficient_matrix", A)
        object.__setattr__(self, "target", b)
        object.__setattr__(self, "penalty_weight", weight)

    @property
    def n_unknowns(self):
        return self.coefficient_matrix.shape[1]


def _passive_solve(A, b, passive):
    z = np.zeros(A.shape[1])
    if passive.any():
        z[passive] = np.linalg.lstsq(A[:, passive], b, rcond=None)[0]
    return z


def nnls(A, b, max_iter=None, tol=KKT_TOLERANCE, passive=None):
    """Solve ``argmin_x ||A x - b||`` subject to ``x >= 0``.

    Lawson-Hanson active-set iteration. Variables move from the active set
    (held at zero) to the passive set (solved unconstrained) one at a time,
    in order of largest dual residual ``A^T (b - A x)``.

    Parameters
    ----------
    A : array_like, shape (m, n)
    b : array_like, shape (m,)
    max_iter : int, optional
        Cap on outer iterations, default ``10 * n``.
    tol : float
        KKT tolerance on the dual residual, relative to ``max(1, ||A|| ||b||)``.
    passive : array_like of bool, shape (n,), optional
        Warm-start support. It is pruned until the unconstrained solution on
        it is positive, then the usual iteration continues from there.

    Returns
    -------
    x : ndarray, shape (n,)

    Raises
    ------
    ConvergenceError
        If the cap is reached before the KKT conditions hold. The best
        iterate is attached as ``err.best``.
    """
    A = np.asarray(A, dtype=float)
    b = np.asarray(b, dtype=float)
    if A.ndim != 2 or b.ndim != 1 or A.shape[0] != b.shape[0]:
        raise ValueError(f"incompatible dimensions {A.shape} and {b.shape}")
    if not (np.all(np.isfinite(A)) and np.all(np.isfinite(b))):
        raise InputError("non-finite entries passed to nnls")

    n = A.shape[1]
    if max_iter is None:
        max_iter = 10 * n
    threshold = tol * max(1.0, np.linalg.norm(A) * np.linalg.norm(b))

    x = np.zeros(n)
    if passive is None:
        passive = np.zeros(n, dtype=bool)
    else:
        passive = np.array(passive, dtype=bool)
        while passive.any():
            z = _passive_solve(A, b, passive)
            negative = passive & (z <= CLAMP)
            if not negative.any():
                x = z
                break
            passive &= ~negative
    w = A.T @ (b - A @ x)
    # Variables whose entry immediately failed; skipped until x changes.
    rejected = np.zeros(n, dtype=bool)

    for _ in range(max_iter):
        candidates = ~passive & ~rejected
        if not candidates.any() or np.max(w[candidates]) <= threshold:
            break
        j = int(np.argmax(np.where(candidates, w, -np.inf)))
        passive[j] = True
        z = _passive_solve(A, b, passive)
        if z[j] <= 0:
            # Numerically dependent column; the entering step would be void.
            passive[j] = False
            rejected[j] = True
            continue

        while np.any(z[passive] <= 0):
            blocking = passive & (z <= 0)
            step = np.min(x[blocking] / (x[blocking] - z[blocking]))
            x = x + step * (z - x)
            passive &= x > CLAMP
            x[~passive] = 0.0
            z = _passive_solve(A, b, passive)
        x = z
        rejected[:] = False
        w = A.T @ (b - A @ x)
    else:
        candidates = ~passive & ~rejected
        if candidates.any() and np.max(w[candidates]) > threshold:
            raise ConvergenceError(
                f"nnls did not satisfy KKT conditions in {max_iter} iterations",
                best=np.where(x < 0, 0.0, x),
            )

    x[(x < 0) & (x > -CLAMP)] = 0.0
    return np.maximum(x, 0.0)


def penalized_nnls(A, b, penalty_weight, shift=0.0, passive=None):
    """NNLS on ``A`` with a row of ``penalty_weight`` appended.

    The appended target is ``penalty_weight * (1 + shift)``; with
    ``shift = 0`` this is the plain penalty embedding of ``sum(x) = 1``.
    """
    A_aug = np.vstack([A, np.full((1, A.shape[1]), penalty_weight)])
    b_aug = np.append(b, penalty_weight * (1.0 + shift))
    return nnls(A_aug, b_aug, passive=passive)


def _kkt_polish(A, b, support):
    """Exact minimizer of ``||A x - b||`` on ``support`` with ``sum(x) = 1``.

    Returns None unless the point is non-negative and no variable outside
    the support has a descent direction, i.e. unless it is the optimum.
    """
    s = np.flatnonzero(support)
    As = A[:, s]
    size = s.size
    kkt = np.zeros((size + 1, size + 1))
    kkt[:size, :size] = As.T @ As
    kkt[:size, size] = 1.0
    kkt[size, :size] = 1.0
    rhs = np.append(As.T @ b, 1.0)
    sol = np.linalg.lstsq(kkt, rhs, rcond=None)[0]
    y = sol[:size]
    if np.any(y < -CLAMP) or abs(y.sum() - 1.0) > 1e-10:
        return None
    x = np.zeros(A.shape[1])
    x[s] = np.maximum(y, 0.0)
    grad = A.T @ (A @ x - b)
    # On the support grad + mu = 0; off it grad + mu must be >= 0.
    mu = -np.mean(grad[s])
    scale = max(1.0, np.linalg.norm(A) * (np.linalg.norm(b) + np.linalg.norm(A)))
    if np.any(grad + mu < -1e-9 * scale):
        return None
    return x


def solve_simplex_ls(problem, max_refinements=50, support=None):
    """Minimize ``||A x - b||`` over the probability simplex.

    The first penalized NNLS solve fixes the support; an equality
    constrained solve on that support usually lands on the exact optimum.
    When it does not, multiplier corrections on the penalized problem
    take over.

    Parameters
    ----------
    problem : SimplexLsProblem
    max_refinements : int
        Cap on multiplier corrections after the first penalized solve.
    support : array_like of bool, optional
        Guess of the optimal support, used to warm-start the NNLS solves.

    Returns
    -------
    x : ndarray
        Non-negative weights summing to one.
    """
    A = problem.coefficient_matrix
    b = problem.target
    weight = problem.penalty_weight

    if A.shape[1] == 1:
        return np.ones(1)

    shift = 0.0
    x = penalized_nnls(A, b, weight, shift, support)
    if x.any():
        polished = _kkt_polish(A, b, x > 0)
        if polished is not None:
            x = polished
    for _ in range(max_refinements):
        violation = x.sum() - 1.0
        if abs(violation) <= SUM_TOLERANCE:
            break
        shift -= violation
        x = penalized_nnls(A, b, weight, shift, x > 0)

    total = x.sum()
    if total <= 0:
        # Only reachable with a degenerate A; any vertex is then optimal.
        x = np.zeros(A.shape[1])
        x[0] = 1.0
        return x
    x = x / total
    x[x < CLAMP] = 0.0
    return x / x.sum()


def simplex_ls_batch(A, targets, x0=None, max_iter=None, penalty_weight=None):
    """Solve ``min ||A x_i - b_i||`` over the simplex for every row ``b_i``.

    All problems share ``A``, so the work is done on the Gram matrix
    ``A^T A`` with a primal active-set iteration vectorized across rows.
    Each row keeps a feasible iterate and a working support; equality
    constrained steps on the support are taken for all unfinished rows at
    once. Rows still unfinished at the cap are handed to
    :func:`solve_simplex_ls`.

    Parameters
    ----------
    A : ndarray, shape (m, k)
    targets : ndarray, shape (n, m)
    x0 : ndarray, shape (n, k), optional
        Feasible starting weights (e.g. the previous iterate). Defaults to
        uniform weights.
    max_iter : int, optional
        Default ``10 * k + 20``.
    penalty_weight : float, optional
        Forwarded to the fallback kernel.

    Returns
    -------
    ndarray, shape (n, k)
    """
    A = np.asarray(A, dtype=float)
    B = np.atleast_2d(np.asarray(targets, dtype=float))
    m, k = A.shape
    n = B.shape[0]
    if B.shape[1] != m:
        raise ValueError(f"targets have {B.shape[1]} columns, expected {m}")
    if not (np.all(np.isfinite(A)) and np.all(np.isfinite(B))):
        raise InputError("non-finite entries in simplex least-squares problem")
    if k == 1:
        return np.ones((n, 1))
    if max_iter is None:
        max_iter = 10 * k + 20

    G = A.T @ A
    C = B @ A
    scale = max(1.0, np.abs(G).max(), np.abs(C).max())
    dual_tol = 1e-10 * scale

    if x0 is None:
        X = np.full((n, k), 1.0 / k)
    else:
        X = np.array(x0, dtype=float)
        X = np.maximum(X, 0.0)
        sums = X.sum(axis=1, keepdims=True)
        bad = sums[:, 0] <= 0
        X[bad] = 1.0 / k
        sums[bad] = 1.0
        X /= sums
    W = X > 0
    done = np.zeros(n, dtype=bool)
    eye = np.eye(k, dtype=bool)

    for _ in range(max_iter):
        rows = np.flatnonzero(~done)
        if rows.size == 0:
            break
        w = W[rows]
        kkt = np.zeros((rows.size, k + 1, k + 1))
        both = w[:, :, None] & w[:, None, :]
        kkt[:, :k, :k] = np.where(both, G, 0.0) + (~w)[:, :, None] * eye
        kkt[:, :k, k] = w
        kkt[:, k, :k] = w
        rhs = np.zeros((rows.size, k + 1))
        rhs[:, :k] = np.where(w, C[rows], 0.0)
        rhs[:, k] = 1.0
        sol = np.einsum("rij,rj->ri", np.linalg.pinv(kkt), rhs)
        Y = np.where(w, sol[:, :k], 0.0)
        lam = sol[:, k]

        feasible = np.all(Y >= -CLAMP, axis=1)

        # Rows whose support solution is feasible: move there, then price
        # the variables held at zero.
        fr = rows[feasible]
        if fr.size:
            Yf = np.maximum(Y[feasible], 0.0)
            X[fr] = Yf
            nu = Yf @ G - C[fr] + lam[feasible, None]
            nu = np.where(W[fr], np.inf, nu)
            entering = np.argmin(nu, axis=1)
            worst = nu[np.arange(fr.size), entering]
            add = worst < -dual_tol
            W[fr[add], entering[add]] = True
            done[fr[~add]] = True

        # Infeasible rows: step toward the support solution until the first
        # weight hits zero and drop it from the support.
        ir = rows[~feasible]
        if ir.size:
            Xi = X[ir]
            Yi = Y[~feasible]
            blocking = W[ir] & (Yi < -CLAMP)
            with np.errstate(divide="ignore", invalid="ignore"):
                ratios = np.where(blocking, Xi / (Xi - Yi), np.inf)
            step = np.clip(ratios.min(axis=1), 0.0, 1.0)
            Xi = Xi + step[:, None] * (Yi - Xi)
            drop = blocking & (ratios <= step[:, None] + 1e-15)
            drop |= Xi <= CLAMP
            Wi = W[ir] & ~drop
            empty = ~Wi.any(axis=1)
            if empty.any():
                # Cannot happen for exact arithmetic; keep the largest weight.
                Wi[empty, np.argmax(Xi[empty], axis=1)] = True
            Xi = np.where(Wi, np.maximum(Xi, 0.0), 0.0)
            Xi /= Xi.sum(axis=1, keepdims=True)
            X[ir] = Xi
            W[ir] = Wi

    for i in np.flatnonzero(~done):
        X[i] = solve_simplex_ls(SimplexLsProblem(A, B[i], penalty_weight))

    X[X < CLAMP] = 0.0
    return X / X.sum(axis=1, keepdims=True)
