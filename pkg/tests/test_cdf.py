import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from homothetic import cdf
from homothetic.cdf import CdfParams, cdf_endpoint, cdf_fundamental_arc, cdf_trajectory
from homothetic.glue import seam_scan, to_centred


def test_base_endpoint():
    phi, B = cdf_endpoint(CdfParams(0.0, 0.0), np.pi)
    assert abs(phi) < 1e-12 and abs(B) < 1e-12
    phi, B = cdf_endpoint(CdfParams(0.0, 0.0), np.pi / 2)
    assert phi == pytest.approx(-1.0, abs=1e-12) and B == pytest.approx(-1.0, abs=1e-12)


@pytest.mark.parametrize("eps,L", [(0.1, 2.0), (-0.2, 3.5), (0.3, 5.0)])
def test_phi_on_circle_family(eps, L):
    phi, _ = cdf_endpoint(CdfParams(0.0, eps), L)
    assert phi == pytest.approx(-np.sin(L) - eps * L, abs=1e-11)


@settings(max_examples=25, deadline=None)
@given(st.floats(-0.3, 0.3), st.floats(-0.25, 0.25), st.floats(0.5, 6.5))
def test_v_equals_minus_alpha_phi(alpha, eps, L):
    end = cdf_trajectory(CdfParams(alpha, eps), L).end_state
    assert abs(end[4] + alpha * end[5]) <= 1e-10


def test_first_order_arc():
    arc = cdf_fundamental_arc(0.01)
    assert arc.alpha == pytest.approx(-0.02, abs=1e-3)
    assert arc.L == pytest.approx(np.pi * 1.02, abs=2e-3)
    # second-order Taylor polynomial (cubic terms ~5e-5) with alpha''(0) = 16, L''(0) = 7 pi
    assert arc.alpha == pytest.approx(-0.02 + 8e-4, abs=1e-4)
    assert arc.L == pytest.approx(np.pi * (1 + 0.02 + 3.5e-4), abs=1e-4)
    res = arc.endpoint_residuals()
    assert max(abs(res["Phi"]), abs(res["B"])) < 1e-11
    assert abs(res["v"]) <= abs(arc.alpha) * 1e-11


def test_base_arc():
    arc = cdf_fundamental_arc(0.0)
    assert abs(arc.alpha) < 1e-12 and arc.L == pytest.approx(np.pi, abs=1e-12)
    assert arc.Theta == pytest.approx(np.pi, abs=1e-12)


def test_shrinker_sign():
    arc = cdf_fundamental_arc(0.1)
    assert arc.homothety_coefficient < 0 < arc.sigma


def test_wide_angles_locked():
    with pytest.raises(ValueError):
        cdf.cdf_solve_epsilon(2, 5)
    with pytest.raises(ValueError):
        cdf.cdf_solve_epsilon(3, 3)


def test_seam_scan_clean(cdf_34):
    assert seam_scan(to_centred(cdf_34[1])) == []


def test_large_q_asymptotics():
    ratios = [cdf.cdf_solve_epsilon(q - 1, q)[0] / np.sqrt(1 / q) for q in (16, 64)]
    assert abs(ratios[1] - 1) < abs(ratios[0] - 1)
    assert abs(ratios[1] - 1) < 0.3
