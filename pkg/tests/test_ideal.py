import numpy as np
import pytest

from homothetic import ideal
from homothetic.errors import CurvatureVanished
from homothetic.glue import seam_scan, to_centred
from homothetic.ideal import ALPHA_SWITCH, IdealParams, ideal_endpoint, ideal_fundamental_arc, jets_from_state


def test_base_endpoint():
    # Phi at alpha = 0 is the symmetric quotient with step ALPHA_SWITCH, hence the looser bound
    assert np.max(np.abs(ideal_endpoint(IdealParams(0.0, 0.0, 0.0), np.pi))) < 1e-10


@pytest.mark.parametrize("eps,L", [(0.1, 2.0), (-0.15, 3.5)])
def test_phi_on_circle_family(eps, L):
    phi, U, _ = ideal_endpoint(IdealParams(0.0, eps, 0.0), L)
    assert phi == pytest.approx(-(np.sin(L) + eps * L), abs=1e-8)
    assert abs(U) < 1e-14


@pytest.mark.parametrize("L", [np.pi / 2, 2.0])
def test_linearised_b_variation(L):
    b = 1e-4
    S = ideal.ideal_trajectory(IdealParams(0.0, 0.0, b), L).end_state
    M, _, q = jets_from_state(S)
    assert M / b == pytest.approx(-np.sin(L), abs=1e-3)
    assert S[4] / b == pytest.approx(np.sin(L), abs=1e-3)
    assert q / b == pytest.approx(np.cos(L), abs=1e-3)


def test_phi_switch_continuity():
    eps, b, L = 0.1, -0.25, 3.4
    lo = ideal_endpoint(IdealParams(0.99 * ALPHA_SWITCH, eps, b), L)[0]
    hi = ideal_endpoint(IdealParams(1.01 * ALPHA_SWITCH, eps, b), L)[0]
    assert abs(lo - hi) <= 10 * ALPHA_SWITCH


def test_curvature_floor():
    with pytest.raises(CurvatureVanished):
        ideal.ideal_trajectory(IdealParams(0.0, 0.0, -2.0), np.pi)


def test_first_order_arc():
    h = 1e-3
    arc, mirror = ideal_fundamental_arc(h), ideal_fundamental_arc(-h)
    # central differences cancel the even terms; the cubic ones are large
    assert (arc.b - mirror.b) / (2 * h) == pytest.approx(-8 / 3, abs=2e-3)
    assert (arc.L - mirror.L) / (2 * h) == pytest.approx(8 * np.pi / 3, abs=2e-3)
    res = arc.endpoint_residuals()
    assert max(abs(res["Phi"]), abs(res["U"]), abs(res["B"])) < 1e-11


def test_base_arc():
    arc = ideal_fundamental_arc(0.0)
    assert max(abs(arc.alpha), abs(arc.b)) < 1e-12
    assert arc.L == pytest.approx(np.pi, abs=1e-12)


def test_seam_scan_clean(ideal_2627):
    assert seam_scan(to_centred(ideal_2627[1])) == []


def test_large_q_asymptotics():
    ratios = [ideal.ideal_solve_epsilon(q - 1, q)[0] / np.sqrt(3 / (4 * q)) for q in (40, 64)]
    assert abs(ratios[1] - 1) < abs(ratios[0] - 1)


def test_jets_consistent_with_state(ideal_2627):
    arc = ideal_2627[1]
    s = np.linspace(0.2, arc.L - 0.2, 50)
    _, _, _, J = arc.jets(s)
    h = 1e-4
    _, _, _, Jp = arc.jets(s + h)
    _, _, _, Jm = arc.jets(s - h)
    # each jet column is the derivative of the previous one
    for j in range(4):
        assert np.max(np.abs((Jp[:, j] - Jm[:, j]) / (2 * h) - J[:, j + 1])) < 1e-6
