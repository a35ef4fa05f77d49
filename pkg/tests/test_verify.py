import math

import pytest

from homothetic import verify
from homothetic.errors import UnknownCheck


def test_unknown_check():
    with pytest.raises(UnknownCheck):
        verify.run_check("bogus")
    with pytest.raises(UnknownCheck):
        verify.run_all(["ef_energy", "bogus"])


def test_report_semantics():
    r = verify._report("x", [1.0, 1e-12], [1.0 + 1e-6, 0.0], 1e-5)
    assert r.passed
    assert r.deviation[1] == 1e-12
    r = verify._report("x", [2.0], [1.0], 0.5)
    assert not r.passed
    r = verify._report("x", [float("nan")], [0.0], 1.0)
    assert not r.passed


def test_stencils_exact_on_polynomials():
    h = 0.1
    f = lambda e: 3 * e ** 4 - 2 * e ** 3 + e - 1
    vals = {j: f(j * h) for j in (-2, -1, 0, 1, 2)}
    assert verify.stencil_first(vals, h) == pytest.approx(1.0, abs=1e-12)
    assert verify.stencil_second(vals, h) == pytest.approx(0.0, abs=1e-10)
    assert verify.richardson_central(math.sin, 0.3, 1e-2) == pytest.approx(math.cos(0.3), abs=1e-10)


def test_catalogue_names():
    expected = {"ef_energy", "ef_force", "ef_b1s", "ef_alpha_prime", "ef_thetabar_prime", "ef_sigma_positive",
                "ef_reflection", "cdf_jacobian", "cdf_eps_row", "cdf_first_order", "cdf_second_order",
                "cdf_faa", "cdf_theta_expansion", "ideal_Q_identity", "ideal_jacobian", "ideal_first_order",
                "ideal_theta_expansion"}
    expected |= {f"{k}_{f}" for k in ("profile_residual", "seam_smoothness") for f in ("ef", "cdf", "ideal")}
    assert set(verify.CATALOGUE) == expected


@pytest.mark.parametrize("cid", ["ef_energy", "ef_force", "ef_b1s", "ef_reflection", "cdf_eps_row",
                                 "ideal_Q_identity"])
def test_fast_checks_pass(cid):
    rep = verify.run_check(cid)
    assert rep.passed, rep
    assert rep.runtime >= 0


def test_cdf_jacobian_example():
    rep = verify.run_check("cdf_jacobian")
    assert rep.computed[:4] == pytest.approx([math.pi / 2, 1.0, math.pi, 1.0], rel=1e-5)
    assert rep.passed
