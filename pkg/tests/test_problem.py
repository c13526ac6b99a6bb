"""Problem assembly: A, B, the generalized inverse, lambda_H, solvers."""

import numpy as np
import pytest
from scipy.linalg import LinAlgError

from rampsvm import (
    Dataset,
    build_problem,
    counterexample_dataset,
    lambda_H,
    largest_eigenvalue,
    solve_spd,
    spd_solver,
)


def _random_full_rank(rng, m, n):
    while True:
        X = rng.uniform(-2.0, 2.0, size=(m, n))
        y = rng.choice([-1.0, 1.0], size=m)
        prob = build_problem(Dataset(X=X, y=y))
        if prob.full_column_rank:
            return prob


def test_assembly_shapes_and_rows():
    rng = np.random.default_rng(0)
    X = rng.standard_normal((5, 2))
    y = np.array([1.0, -1.0, 1.0, 1.0, -1.0])
    prob = build_problem(Dataset(X=X, y=y))
    assert prob.A.shape == (5, 2) and prob.B.shape == (5, 3)
    for i in range(5):
        assert np.allclose(prob.A[i], y[i] * X[i])
        assert prob.B[i, 2] == y[i]


def test_generalized_inverse_properties():
    rng = np.random.default_rng(1)
    for m in (3, 5, 8):
        prob = _random_full_rank(rng, m, 2)
        eye = prob.Bdag @ prob.B
        assert np.allclose(eye, np.eye(3), atol=1e-10)
        assert np.allclose(prob.B @ prob.Bdag @ prob.B, prob.B, atol=1e-9)
        # H is the generalized inverse with the bias row removed.
        assert np.allclose(prob.H[:2], prob.Bdag[:2])
        assert np.all(prob.H[2] == 0.0)


def test_lambda_h_against_dense_eigensolver():
    rng = np.random.default_rng(2)
    for m in (3, 4, 6, 9):
        prob = _random_full_rank(rng, m, 2)
        dense = float(np.linalg.eigvalsh(prob.H.T @ prob.H)[-1])
        assert lambda_H(prob) == pytest.approx(dense, rel=1e-8)


def test_lambda_h_counterexample_value():
    prob = build_problem(counterexample_dataset())
    dense = float(np.linalg.eigvalsh(prob.H.T @ prob.H)[-1])
    assert lambda_H(prob) == pytest.approx(dense, rel=1e-10)
    assert lambda_H(prob) == pytest.approx(0.25, abs=1e-6)


def test_rank_deficient_paths():
    # Fewer samples than n+1 can never give full column rank.
    short = build_problem(
        Dataset(X=np.array([[1.0, 2.0]]), y=np.array([1.0]))
    )
    assert not short.full_column_rank
    assert short.Bdag is None and short.H is None
    with pytest.raises(ValueError):
        lambda_H(short)
    # Duplicated sample rows collapse the rank as well.
    X = np.array([[1.0, 0.0], [1.0, 0.0], [1.0, 0.0]])
    y = np.array([1.0, 1.0, 1.0])
    dup = build_problem(Dataset(X=X, y=y))
    assert not dup.full_column_rank


def test_largest_eigenvalue_known_spectra():
    assert largest_eigenvalue(np.diag([0.5, 3.0, 2.0])) == pytest.approx(3.0)
    # Rotate a known spectrum so the top eigenvector is not an axis.
    theta = 0.7
    Q = np.array(
        [[np.cos(theta), -np.sin(theta)], [np.sin(theta), np.cos(theta)]]
    )
    M = Q @ np.diag([5.0, 1.0]) @ Q.T
    assert largest_eigenvalue(M) == pytest.approx(5.0, rel=1e-9)


def test_largest_eigenvalue_survives_orthogonal_start():
    # The all-ones start vector is an eigenvector of the SMALLER eigenvalue
    # here; the seeded random restart must still find the top one.
    M = np.array([[2.0, -1.0], [-1.0, 2.0]])
    assert largest_eigenvalue(M) == pytest.approx(3.0, rel=1e-8)


def test_largest_eigenvalue_deterministic():
    rng = np.random.default_rng(3)
    G = rng.standard_normal((6, 6))
    M = G @ G.T
    assert largest_eigenvalue(M) == largest_eigenvalue(M)


def test_spd_solver_accuracy():
    rng = np.random.default_rng(4)
    G = rng.standard_normal((7, 7))
    M = G @ G.T + 7 * np.eye(7)
    solve = spd_solver(M)
    for _ in range(3):
        rhs = rng.standard_normal(7)
        x = solve(rhs)
        assert np.max(np.abs(M @ x - rhs)) <= 1e-10 * (1.0 + np.max(np.abs(rhs)))
    assert np.allclose(solve_spd(M, rhs), x)


def test_spd_solver_rejects_indefinite():
    M = np.array([[1.0, 0.0], [0.0, -1.0]])
    with pytest.raises(LinAlgError):
        spd_solver(M)


def test_dataset_validation():
    with pytest.raises(ValueError):
        Dataset(X=np.zeros((2, 2)), y=np.array([1.0, 0.5]))
    with pytest.raises(ValueError):
        Dataset(X=np.zeros((2, 2)), y=np.array([1.0]))
    with pytest.raises(ValueError):
        Dataset(X=np.array([[np.nan, 0.0]]), y=np.array([1.0]))
    with pytest.raises(ValueError):
        Dataset(X=np.zeros(3), y=np.array([1.0, 1.0, -1.0]))


def test_dataset_immutable():
    ds = Dataset(X=np.eye(2), y=np.array([1.0, -1.0]))
    with pytest.raises(ValueError):
        ds.X[0, 0] = 5.0
    with pytest.raises(ValueError):
        ds.y[0] = -1.0
    prob = build_problem(ds)
    with pytest.raises(ValueError):
        prob.A[0, 0] = 9.0
