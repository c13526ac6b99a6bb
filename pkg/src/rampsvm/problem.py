"""Dataset model and the derived matrices used by certification and training.

From a labeled dataset we assemble A (row i is y_i * x_i), the label vector
y, and B = [A y].  When B has full column rank we also carry its generalized
inverse Bdag = (B^T B)^{-1} B^T, the matrix H obtained from Bdag by zeroing
its last row, and lambda_h, the largest eigenvalue of H^T H.  lambda_h bounds
the prox steps for which the stationarity certificate is a necessary
condition at global minimizers, so it is surfaced in reports.

Rank-deficient B gets explicit None markers instead of an SVD pseudo-inverse:
the certification theory assumes full column rank, and silently working
outside that hypothesis would be misleading.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg

__all__ = [
    "Dataset",
    "ProblemData",
    "build_problem",
    "lambda_H",
    "largest_eigenvalue",
    "spd_solver",
    "solve_spd",
]

# Relative threshold on Cholesky diagonals below which B counts as
# rank-deficient.
_RANK_RTOL = 1e-10


@dataclass(frozen=True)
class Dataset:
    """Immutable labeled dataset: X is (m, n) features, y is (m,) labels.

    Labels must be exactly +1 or -1; anything else is rejected rather than
    remapped so that mislabeled inputs fail loudly.
    """

    X: np.ndarray
    y: np.ndarray

    def __post_init__(self) -> None:
        X = np.array(self.X, dtype=float)
        y = np.array(self.y, dtype=float)
        if X.ndim != 2:
            raise ValueError(f"X must be 2-d (m, n), got shape {X.shape}")
        if X.shape[0] < 1:
            raise ValueError("dataset needs at least one sample")
        if y.shape != (X.shape[0],):
            raise ValueError(
                f"y has shape {y.shape}, expected ({X.shape[0]},)"
            )
        if not np.all(np.isfinite(X)):
            raise ValueError("features must be finite")
        if not np.all(np.abs(y) == 1.0):
            bad = y[np.abs(y) != 1.0]
            raise ValueError(f"labels must be exactly +1 or -1, got {bad[0]}")
        X.setflags(write=False)
        y.setflags(write=False)
        object.__setattr__(self, "X", X)
        object.__setattr__(self, "y", y)

    @property
    def m(self) -> int:
        return self.X.shape[0]

    @property
    def n(self) -> int:
        return self.X.shape[1]


@dataclass(frozen=True)
class ProblemData:
    """Derived matrices for one dataset.

    Bdag, H, lambda_h are None when B is rank-deficient (including the
    unavoidable m < n+1 case).
    """

    dataset: Dataset
    A: np.ndarray
    y: np.ndarray
    B: np.ndarray
    full_column_rank: bool
    Bdag: np.ndarray | None
    H: np.ndarray | None
    lambda_h: float | None

    @property
    def m(self) -> int:
        return self.dataset.m

    @property
    def n(self) -> int:
        return self.dataset.n


def build_problem(dataset: Dataset) -> ProblemData:
    """Assemble A, y, B and, if B has full column rank, Bdag, H, lambda_h."""
    X, y = dataset.X, dataset.y
    m, n = dataset.m, dataset.n
    A = y[:, None] * X
    B = np.hstack((A, y[:, None]))
    for arr in (A, B):
        arr.setflags(write=False)

    Bdag = H = lam = None
    full_rank = False
    if m >= n + 1:
        G = B.T @ B
        try:
            cf = scipy.linalg.cho_factor(G, lower=True)
        except (scipy.linalg.LinAlgError, ValueError):
            cf = None
        if cf is not None:
            d = np.abs(np.diag(cf[0]))
            if d.min() >= _RANK_RTOL * d.max():
                full_rank = True
                Bdag = scipy.linalg.cho_solve(cf, B.T)
                H = Bdag.copy()
                H[-1, :] = 0.0
                Bdag.setflags(write=False)
                H.setflags(write=False)
                lam = largest_eigenvalue(H.T @ H)
    return ProblemData(
        dataset=dataset,
        A=A,
        y=y,
        B=B,
        full_column_rank=full_rank,
        Bdag=Bdag,
        H=H,
        lambda_h=lam,
    )


def lambda_H(problem: ProblemData) -> float:
    """Largest eigenvalue of H^T H; raises when B is rank-deficient."""
    if problem.lambda_h is None:
        raise ValueError("lambda_H undefined: B is not full column rank")
    return problem.lambda_h


def largest_eigenvalue(
    M, tol: float = 1e-10, max_iter: int = 10000, seed: int = 0
) -> float:
    """Largest eigenvalue of a symmetric PSD matrix by power iteration.

    Starts from the normalized all-ones vector and stops when the Rayleigh
    quotient is stable to relative tolerance ``tol``.  The all-ones start
    can sit inside a minor eigenspace (or the kernel), where the iteration
    stagnates at a non-maximal eigenvalue; a second run from a fixed-seed
    random vector guards against that, and the larger estimate wins.
    """
    M = np.asarray(M, dtype=float)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {M.shape}")
    k = M.shape[0]

    def run(v: np.ndarray) -> float:
        nrm = np.linalg.norm(v)
        if nrm == 0.0:
            return 0.0
        v = v / nrm
        lam = float(v @ (M @ v))
        for _ in range(max_iter):
            Mv = M @ v
            nrm = np.linalg.norm(Mv)
            if nrm == 0.0:
                # v is in the kernel; stagnation, nothing more to learn here
                return 0.0
            v = Mv / nrm
            new = float(v @ (M @ v))
            if abs(new - lam) <= tol * max(1.0, abs(new)):
                return new
            lam = new
        return lam

    est = run(np.ones(k))
    rng = np.random.default_rng(seed)
    probe = run(rng.standard_normal(k))
    return max(est, probe)


def spd_solver(M):
    """Factor a symmetric positive-definite M once; return a solve closure.

    The closure applies one step of iterative refinement, which keeps the
    residual near machine precision for the mildly conditioned systems we
    build.  Factorization failure (non-SPD input) propagates as LinAlgError.
    """
    M = np.asarray(M, dtype=float)
    try:
        cf = scipy.linalg.cho_factor(M, lower=True)
    except ValueError as exc:
        raise np.linalg.LinAlgError(f"SPD factorization failed: {exc}") from exc

    def solve(rhs: np.ndarray) -> np.ndarray:
        x = scipy.linalg.cho_solve(cf, rhs)
        x += scipy.linalg.cho_solve(cf, rhs - M @ x)
        return x

    return solve


def solve_spd(M, rhs) -> np.ndarray:
    """Solve Mx = rhs for symmetric positive-definite M.

    Guarantees the residual bound ||Mx - rhs||_inf <= 1e-10 * (1 + ||rhs||_inf)
    and raises LinAlgError when the factorization or the bound fails.
    """
    M = np.asarray(M, dtype=float)
    rhs = np.asarray(rhs, dtype=float)
    x = spd_solver(M)(rhs)
    resid = float(np.max(np.abs(M @ x - rhs)))
    bound = 1e-10 * (1.0 + float(np.max(np.abs(rhs))))
    if not math.isfinite(resid) or resid > bound:
        raise np.linalg.LinAlgError(
            f"solve residual {resid:.3e} exceeds bound {bound:.3e}"
        )
    return x
