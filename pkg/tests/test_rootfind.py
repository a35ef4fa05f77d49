import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from homothetic.errors import EvaluationFailure, MaxIterations, NoSignChange, SingularJacobian
from homothetic.rootfind import NewtonConfig, fd_jacobian, newton_solve, scalar_root


@settings(max_examples=40, deadline=None)
@given(st.lists(st.floats(-2, 2), min_size=4, max_size=4), st.lists(st.floats(-5, 5), min_size=2, max_size=2))
def test_linear_systems_converge_in_two_iterations(entries, rhs):
    A = np.array(entries).reshape(2, 2) + 3 * np.eye(2)
    b = np.array(rhs)
    rep = newton_solve(lambda x: A @ x - b, np.zeros(2))
    assert rep.converged and rep.iterations <= 2
    assert np.allclose(rep.solution, np.linalg.solve(A, b), atol=1e-9)


def test_nonlinear_system():
    F = lambda z: np.array([z[0] ** 2 + z[1] ** 2 - 4, z[0] - z[1]])
    rep = newton_solve(F, [1.0, 0.5])
    assert np.allclose(rep.solution, [np.sqrt(2), np.sqrt(2)], atol=1e-12)
    assert rep.residual_norm <= 1e-11


def test_perturbed_seed_same_solution():
    F = lambda z: np.array([np.sin(z[0]) - 0.3, z[1] ** 3 + z[1] - 2])
    cfg = NewtonConfig(tol_residual=1e-14)
    a = newton_solve(F, [0.3, 1.0], cfg).solution
    b = newton_solve(F, [0.35, 0.9], cfg).solution
    assert np.max(np.abs(a - b)) < 1e-13


def test_singular_jacobian():
    with pytest.raises(SingularJacobian):
        newton_solve(lambda z: np.array([z[0] ** 2 + 1, z[0] * z[1]]), [0.0, 0.0])


def test_evaluation_failure():
    def F(z):
        raise ValueError("boom")
    with pytest.raises(EvaluationFailure):
        newton_solve(F, [1.0])
    with pytest.raises(EvaluationFailure):
        newton_solve(lambda z: np.array([np.nan]), [1.0])


def test_no_root_exhausts():
    with pytest.raises(MaxIterations):
        newton_solve(lambda z: np.array([z[0] ** 2 + 1.0]), [1.0], NewtonConfig(max_iter=10))


def test_fd_jacobian_second_order():
    F = lambda z: np.array([z[0] ** 2 * z[1], z[1] ** 3 - z[0]])
    x = np.array([0.7, -1.3])
    exact = np.array([[2 * x[0] * x[1], x[0] ** 2], [-1.0, 3 * x[1] ** 2]])
    errs = [np.max(np.abs(fd_jacobian(F, x, h) - exact)) for h in (1e-2, 5e-3)]
    # central differences of a cubic: error scales like h^2
    assert errs[0] < 1e-3
    assert 3.0 < errs[0] / errs[1] < 5.0


@pytest.mark.parametrize("bracket", [None, (0.0, 5.0)])
def test_scalar_root(bracket):
    r = scalar_root(lambda x: x * x - 4, 1.5, bracket)
    assert abs(r - 2) < 1e-12


def test_scalar_root_no_sign_change():
    with pytest.raises(NoSignChange):
        scalar_root(lambda x: x * x + 1, 0.5, (0.0, 1.0))


def test_scalar_root_bisection_fallback():
    # flat then steep: plain secant from the seed overshoots the bracket
    f = lambda x: np.tanh(50 * (x - 0.731))
    r = scalar_root(f, 0.05, (0.0, 1.0))
    assert abs(r - 0.731) < 1e-12
