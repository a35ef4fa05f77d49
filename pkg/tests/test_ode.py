import numpy as np
import pytest
from numba import njit

from homothetic import cdf, elastic, ideal
from homothetic.errors import Ambiguous, NonFiniteState, NoSignChange, StepLimitExceeded
from homothetic.ode import IntegratorConfig, integrate, locate_event


def oscillator(s, y, prm):
    w = prm[0]
    return np.array([y[1], -w * w * y[0]])


oscillator_jit = njit(oscillator)


@pytest.mark.parametrize("rhs", [oscillator, oscillator_jit])
def test_harmonic_oscillator(rhs):
    traj = integrate(rhs, [1.0, 0.0], (0.0, 10.0), [2.0])
    s = np.linspace(0, 10, 301)
    exact = np.column_stack([np.cos(2 * s), -2 * np.sin(2 * s)])
    assert np.max(np.abs(traj(s) - exact)) < 1e-9


def test_python_and_jitted_rhs_agree():
    a = integrate(oscillator, [1.0, 0.0], (0.0, 3.0), [1.5])
    b = integrate(oscillator_jit, [1.0, 0.0], (0.0, 3.0), [1.5])
    assert np.allclose(a.nodes, b.nodes, rtol=0, atol=1e-14)
    assert np.allclose(a.end_state, b.end_state, rtol=0, atol=1e-13)


def test_dense_output_exact_at_nodes_and_bounded():
    traj = integrate(oscillator_jit, [1.0, 0.0], (0.0, 2.0), [1.0])
    assert np.all(np.diff(traj.nodes) > 0)
    assert np.max(np.abs(traj(traj.nodes) - traj.states)) < 1e-15
    with pytest.raises(ValueError):
        traj(2.5)
    with pytest.raises(ValueError):
        traj(-0.1)
    assert traj.states.flags.writeable is False


def test_zero_length_span_is_one_node():
    traj = integrate(cdf.cdf_rhs, cdf.Y0, (0.0, 0.0), [0.0, 0.0])
    assert traj.nodes.size == 1
    assert np.array_equal(traj(0.0), cdf.Y0)


def test_cdf_base_semicircle():
    end = integrate(cdf.cdf_rhs, cdf.Y0, (0.0, np.pi), [0.0, 0.0]).end_state
    assert np.allclose(end, [-1, 0, np.pi, 1, 0, 0], atol=1e-11)


def test_ef_base_half_period():
    L0 = elastic.ef_base_constants().L0
    end = integrate(elastic.ef_rhs, elastic.Y0, (0.0, L0), [0.0, 0.0]).end_state
    assert abs(end[2]) < 1e-10
    assert abs(end[3] + 1) < 1e-10
    assert abs(end[4]) < 1e-10


def test_ideal_base_circle_keeps_q_zero():
    traj = ideal.ideal_trajectory(ideal.IdealParams(0.0, 0.0, 0.0), np.pi)
    S = traj(np.linspace(0, np.pi, 50))
    assert np.max(np.abs(S[:, 3] - 1)) < 1e-12
    assert np.max(np.abs(S[:, 5:])) == 0.0


def test_step_limit():
    with pytest.raises(StepLimitExceeded):
        integrate(oscillator_jit, [1.0, 0.0], (0.0, 100.0), [5.0], IntegratorConfig(max_steps=10))


def test_non_finite_initial_state():
    with pytest.raises(NonFiniteState):
        integrate(oscillator_jit, [np.nan, 0.0], (0.0, 1.0), [1.0])


def test_blow_up_reports_non_finite():
    blow = njit(lambda s, y, p: np.array([1.0 / (1.0 - s)]) if s < 1 else np.array([np.nan]))
    with pytest.raises((NonFiniteState, StepLimitExceeded)):
        integrate(blow, [0.0], (0.0, 2.0), [0.0], IntegratorConfig(max_steps=5000))


def test_refinement_self_consistency():
    prm = np.array([-0.05, 0.1])
    cfg = IntegratorConfig(rel_tol=1e-10, abs_tol=1e-10)
    a = integrate(elastic.ef_rhs, elastic.Y0, (0.0, 5.0), prm, cfg).end_state
    b = integrate(elastic.ef_rhs, elastic.Y0, (0.0, 5.0), prm, cfg.halved()).end_state
    assert np.max(np.abs(a - b)) < 1e-8


def test_semigroup_restart_from_interior_node():
    prm = np.array([-0.1, 0.2])
    traj = integrate(cdf.cdf_rhs, cdf.Y0, (0.0, 6.0), prm)
    i = traj.nodes.size // 2
    tail = integrate(cdf.cdf_rhs, traj.states[i], (traj.nodes[i], 6.0), prm)
    assert np.max(np.abs(tail.end_state - traj.end_state)) < 1e-10


def test_event_on_base_circle():
    traj = integrate(cdf.cdf_rhs, cdf.Y0, (0.0, 4.0), [0.0, 0.0])
    s = locate_event(traj, lambda s, S: -np.sin(S[2]), (2.5, 3.5))
    assert abs(s - np.pi) < 1e-13


def test_event_at_base_elastic_period():
    L0 = elastic.ef_base_constants().L0
    traj = integrate(elastic.ef_rhs, elastic.Y0, (0.0, L0 + 0.5), [0.0, 0.0])
    s = locate_event(traj, lambda s, S: elastic.b1_value(S, 0.0), (L0 - 0.5, L0 + 0.5))
    assert abs(s - L0) < 1e-10


def test_event_errors():
    traj = integrate(cdf.cdf_rhs, cdf.Y0, (0.0, 7.0), [0.0, 0.0])
    with pytest.raises(NoSignChange):
        locate_event(traj, lambda s, S: 2.0 + S[0], (0.0, 7.0))
    with pytest.raises(Ambiguous):
        locate_event(traj, lambda s, S: np.sin(S[2]), (1.0, 6.9))


def test_config_validation():
    with pytest.raises(ValueError):
        IntegratorConfig(rel_tol=0.0)
    with pytest.raises(ValueError):
        IntegratorConfig(max_steps=0)
    assert IntegratorConfig().halved().rel_tol == 5e-13
