"""
Catalogue of checks against closed-form constants, expansions and identities.

Each check returns a CheckReport.  Deviations are relative to the reference
value, except for components whose reference is exactly zero, where the
absolute deviation is used.  Reference constants are closed-form expressions
evaluated at run time.
"""

from __future__ import annotations

import math
import time
from dataclasses import asdict, dataclass, field

import numpy as np

from . import cdf, elastic, ideal
from .errors import UnknownCheck
from .glue import double_and_close, profile_residual, to_centred
from .ode import integrate

PI = math.pi
H_BRANCH = 1e-3  # step of the branch stencils in epsilon
H_FD = 1e-3  # coarse step of Richardson pairs


@dataclass
class CheckReport:
    check_id: str
    computed: list
    reference: list
    tolerance: float | list
    passed: bool
    runtime: float = 0.0
    deviation: list = field(default_factory=list)
    note: str = ""

    def to_dict(self) -> dict:
        return asdict(self)


def _report(check_id, computed, reference, tolerance, note="") -> CheckReport:
    c = np.atleast_1d(np.asarray(computed, dtype=float))
    r = np.atleast_1d(np.asarray(reference, dtype=float))
    tol = np.broadcast_to(np.asarray(tolerance, dtype=float), c.shape)
    dev = np.where(r == 0.0, np.abs(c - r), np.abs(c - r) / np.where(r == 0.0, 1.0, np.abs(r)))
    passed = bool(np.all(np.isfinite(c)) and np.all(dev <= tol))
    tol_out = float(tol[0]) if np.all(tol == tol[0]) else tol.tolist()
    return CheckReport(check_id, c.tolist(), r.tolist(), tol_out, passed, deviation=dev.tolist(), note=note)


def richardson_central(f, x0: float, h: float = H_FD):
    """First derivative by central differences at h and h/2, extrapolated."""
    d = lambda hh: (np.asarray(f(x0 + hh)) - np.asarray(f(x0 - hh))) / (2 * hh)
    return (4 * d(h / 2) - d(h)) / 3


def richardson_second(f, x0: float, h: float = H_FD):
    f0 = np.asarray(f(x0))
    d = lambda hh: (np.asarray(f(x0 + hh)) - 2 * f0 + np.asarray(f(x0 - hh))) / hh ** 2
    return (4 * d(h / 2) - d(h)) / 3


def stencil_first(vals: dict, h: float):
    """Fourth-order central first derivative from values at -2h, -h, h, 2h."""
    return (-vals[2] + 8 * vals[1] - 8 * vals[-1] + vals[-2]) / (12 * h)


def stencil_second(vals: dict, h: float):
    return (-vals[2] + 16 * vals[1] - 30 * vals[0] + 16 * vals[-1] - vals[-2]) / (12 * h * h)


# ---------------------------------------------------------------- elastic


def _ef_base_traj():
    base = elastic.ef_base_constants()
    return elastic.ef_trajectory(elastic.ElasticParams(0.0, 0.0), base.L0), base


def check_ef_energy() -> CheckReport:
    traj, base = _ef_base_traj()
    S = traj(np.linspace(0, base.L0, 4001))
    k, v = S[:, 3], S[:, 4]
    return _report("ef_energy", [np.max(np.abs(v * v - (1 - k ** 4) / 4))], [0.0], 1e-10,
                   "max |v^2 - (1 - k^4)/4| on the base arc")


def check_ef_force() -> CheckReport:
    traj, base = _ef_base_traj()
    S = traj(np.linspace(0, base.L0, 4001))
    th, k, v = S[:, 2], S[:, 3], S[:, 4]
    T = np.column_stack([-np.sin(th), np.cos(th)])
    N = np.column_stack([-np.cos(th), -np.sin(th)])
    F = 0.5 * (k * k)[:, None] * T + v[:, None] * N
    worst = F[np.argmax(np.abs(F - [0.0, 0.5]).max(axis=1))]
    return _report("ef_force", worst, [0.0, 0.5], 1e-10, "worst sample of k^2/2 T + k_s N")


def check_ef_b1s() -> CheckReport:
    traj, base = _ef_base_traj()
    ext = elastic.ef_trajectory(elastic.ElasticParams(0.0, 0.0), base.L0 + 0.01)
    f = lambda s: elastic.b1_value(ext(s), 0.0)
    return _report("ef_b1s", [richardson_central(f, base.L0)], [1.0], 1e-6)


def _ef_branch_values(h=H_BRANCH) -> dict:
    return {j: elastic.ef_fundamental_arc(j * h) for j in (-2, -1, 0, 1, 2)}


def check_ef_alpha_prime() -> CheckReport:
    base = elastic.ef_base_constants()
    arcs = _ef_branch_values()
    d = stencil_first({j: a.alpha for j, a in arcs.items()}, H_BRANCH)
    ref = -base.y0_L0 / (2 * base.int_cos2)
    return _report("ef_alpha_prime", [d], [ref], 1e-4, "reference -y0(L0) / (2 int cos^2) by quadrature")


def check_ef_thetabar_prime() -> CheckReport:
    base = elastic.ef_base_constants()
    arcs = _ef_branch_values()
    d = stencil_first({j: a.seam_angle for j, a in arcs.items()}, H_BRANCH)
    return _report("ef_thetabar_prime", [d], [base.y0_L0], 1e-4)


def check_ef_sigma_positive() -> CheckReport:
    base = elastic.ef_base_constants()
    e = 0.05
    sig = [elastic.ef_fundamental_arc(e).sigma, elastic.ef_fundamental_arc(-e).sigma]
    ref = -base.alpha_prime0 * e * e
    return _report("ef_sigma_positive", sig, [ref, ref], 0.5,
                   "sigma(+-0.05) within 50% of the positive leading term -alpha'(0) eps^2")


def check_ef_reflection() -> CheckReport:
    arc = elastic.ef_fundamental_arc(0.05)
    a, e = arc.alpha, arc.epsilon
    flip = np.array([-1.0, 1.0, -1.0, -1.0, -1.0])
    y0 = flip * elastic.Y0  # reflected initial state, k(0) = -1
    mirror = integrate(elastic.ef_rhs, y0, (0.0, arc.L), [-a, -e])
    s = np.linspace(0, arc.L, 2001)
    diff = np.max(np.abs(mirror(s) - arc.trajectory(s) * flip))
    b_arc = np.array(elastic.ef_endpoint(arc.params, arc.L))
    Sm = mirror(arc.L)
    b_mirror = np.array([elastic.b1_value(Sm, -e), Sm[4]])
    return _report("ef_reflection", [diff, np.max(np.abs(b_mirror + b_arc))], [0.0, 0.0], 1e-9,
                   "(-x, y, -theta, -k, -v) of the (alpha, eps) arc vs the (-alpha, -eps) solution")


# ---------------------------------------------------------------- cdf


def _cdf_F(alpha, eps, L):
    return np.array(cdf.cdf_endpoint(cdf.CdfParams(alpha, eps), L))


def check_cdf_jacobian() -> CheckReport:
    cols = [richardson_central(lambda a: _cdf_F(a, 0.0, PI), 0.0),
            richardson_central(lambda L: _cdf_F(0.0, 0.0, L), PI)]
    J = np.column_stack(cols)
    ref = np.array([[PI / 2, 1.0], [PI, 1.0]])
    return _report("cdf_jacobian", list(J.ravel()) + [np.linalg.det(J)],
                   list(ref.ravel()) + [-PI / 2], 1e-5, "entries row-major, then determinant")


def check_cdf_eps_row() -> CheckReport:
    d = richardson_central(lambda e: _cdf_F(0.0, e, PI), 0.0)
    return _report("cdf_eps_row", d, [-PI, 0.0], 1e-6)


def _cdf_branch_values(h=H_BRANCH) -> dict:
    return {j: cdf.cdf_fundamental_arc(j * h) for j in (-2, -1, 0, 1, 2)}


def check_cdf_first_order() -> CheckReport:
    arcs = _cdf_branch_values()
    da = stencil_first({j: a.alpha for j, a in arcs.items()}, H_BRANCH)
    dL = stencil_first({j: a.L for j, a in arcs.items()}, H_BRANCH)
    return _report("cdf_first_order", [da, dL], [-2.0, 2 * PI], 1e-4)


def check_cdf_second_order() -> CheckReport:
    arcs = _cdf_branch_values()
    da = stencil_second({j: a.alpha for j, a in arcs.items()}, H_BRANCH)
    dL = stencil_second({j: a.L for j, a in arcs.items()}, H_BRANCH)
    return _report("cdf_second_order", [da, dL], [16.0, 7 * PI], 1e-3)


def check_cdf_faa() -> CheckReport:
    d = richardson_second(lambda a: _cdf_F(a, 0.0, PI), 0.0, h=1e-2)
    ref = [PI * (2 * PI ** 2 - 39) / 12, PI * (2 * PI ** 2 - 27) / 12]
    return _report("cdf_faa", d, ref, 1e-3, "second alpha-derivatives of (Phi, B) at the base")


def _theta_fit(solve, eps_values):
    eps = np.asarray(eps_values)
    theta = np.array([solve(e).Theta for e in eps])
    # the O(eps^3) remainder is large on this window, so model it explicitly
    A = np.column_stack([eps ** 2, eps ** 3, eps ** 4])
    coef, *_ = np.linalg.lstsq(A, theta - PI, rcond=None)
    return coef


FIT_EPS = (0.01, 0.02, 0.03, 0.04, 0.05)


def check_cdf_theta_expansion() -> CheckReport:
    c2, *_ = _theta_fit(cdf.cdf_fundamental_arc, FIT_EPS)
    return _report("cdf_theta_expansion", [c2, 2 * c2], [-PI, -2 * PI], 0.02,
                   "least squares Theta - pi = c2 eps^2 + c3 eps^3 + c4 eps^4 on eps = 0.01..0.05; Theta''(0) = 2 c2")


# ---------------------------------------------------------------- ideal


def check_ideal_Q_identity() -> CheckReport:
    prm = ideal.IdealParams(0.05, 0.1, -0.2)
    traj = ideal.ideal_trajectory(prm, PI)
    h = 1e-4
    s = np.linspace(0.2, PI - 0.2, 201)
    M, N, q = ideal.jets_from_state(traj(s))
    _, Np, qp = ideal.jets_from_state(traj(s + h))
    _, Nm, qm = ideal.jets_from_state(traj(s - h))
    k = traj(s)[:, 3]
    err_q = np.max(np.abs((qp - qm) / (2 * h) - M))
    err_N = np.max(np.abs((Np - Nm) / (2 * h) - k * M))
    return _report("ideal_Q_identity", [err_q, err_N], [0.0, 0.0], 1e-6,
                   "max |d/ds k_ss - M| and |d/ds N - k M| by central differences")


def ideal_base_jacobian() -> np.ndarray:
    F = lambda z: ideal.ideal_map(z, 0.0)
    z0 = np.array([0.0, 0.0, PI])
    cols = []
    for j in range(3):
        e = np.zeros(3)
        e[j] = 1.0
        cols.append(richardson_central(lambda t: F(z0 + t * e), 0.0))
    return np.column_stack(cols)


def check_ideal_jacobian() -> CheckReport:
    J = ideal_base_jacobian()
    entries = [J[0, 1], J[0, 2], J[1, 0], J[1, 1], J[1, 2], J[2, 0], J[2, 1], J[2, 2]]
    ref = [5 * PI / 8, 1.0, PI / 2, 0.0, 0.0, -PI / 2, PI, 1.0]
    # cofactor expansion along the second row; Phi_alpha never enters
    det = -J[1, 0] * (J[0, 1] * J[2, 2] - J[0, 2] * J[2, 1]) \
        + J[1, 1] * (J[0, 0] * J[2, 2] - J[0, 2] * J[2, 0]) \
        - J[1, 2] * (J[0, 0] * J[2, 1] - J[0, 1] * J[2, 0])
    det_small = -J[1, 0] * (J[0, 1] * J[2, 2] - J[0, 2] * J[2, 1])
    return _report("ideal_jacobian", entries + [det], ref + [-3 * PI ** 2 / 16], 1e-5,
                   f"entries (Phi_b, Phi_L, U_a, U_b, U_L, B_a, B_b, B_L), then det; "
                   f"Phi_alpha = {J[0, 0]:.10g} (no reference); second-row expansion "
                   f"-U_a * minor = {det_small:.10g}")


def _ideal_branch_values(h=H_BRANCH) -> dict:
    return {j: ideal.ideal_fundamental_arc(j * h) for j in (-2, -1, 0, 1, 2)}


def check_ideal_first_order() -> CheckReport:
    arcs = _ideal_branch_values()
    d = [stencil_first({j: getattr(a, name) for j, a in arcs.items()}, H_BRANCH)
         for name in ("alpha", "b", "L")]
    return _report("ideal_first_order", d, [0.0, -8 / 3, 8 * PI / 3], 1e-4)


def check_ideal_theta_expansion() -> CheckReport:
    c2, *_ = _theta_fit(ideal.ideal_fundamental_arc, FIT_EPS)
    h = H_BRANCH
    d1 = (ideal.ideal_fundamental_arc(h).Theta - ideal.ideal_fundamental_arc(-h).Theta) / (2 * h)
    return _report("ideal_theta_expansion", [c2, d1], [-4 * PI / 3, 0.0], [0.02, 1e-4],
                   "quadratic coefficient by least squares (eps^2..eps^4) on eps = 0.01..0.05, Theta'(0) by central difference")


# ---------------------------------------------------------------- profiles

PROFILE_TARGETS = {"ef": (elastic.ef_solve_epsilon, 1, 7),
                   "cdf": (cdf.cdf_solve_epsilon, 3, 4),
                   "ideal": (ideal.ideal_solve_epsilon, 26, 27)}


def build_profile(flow: str, p: int, q: int, strict: bool = False):
    solve = PROFILE_TARGETS[flow][0]
    _, arc = solve(p, q)
    return double_and_close(to_centred(arc), p, q, strict=strict)


def _profile_residual_check(flow):
    _, p, q = PROFILE_TARGETS[flow]
    prof = build_profile(flow, p, q)
    r = profile_residual(prof)
    return _report(f"profile_residual_{flow}", [np.max(np.abs(r[1:-1]))], [0.0], 1e-8,
                   f"({p},{q}) profile, homothety coefficient {prof.homothety_coefficient:.6g}")


def _seam_check(flow):
    _, p, q = PROFILE_TARGETS[flow]
    prof = build_profile(flow, p, q)
    return _report(f"seam_smoothness_{flow}", [prof.max_seam_jump], [0.0], 1e-8,
                   f"({p},{q}) profile, jets through order {prof.jet_order - 1}; "
                   f"per-jet max {prof.seam_jumps.max(axis=0).tolist()}")


CATALOGUE = {
    "ef_energy": check_ef_energy,
    "ef_force": check_ef_force,
    "ef_b1s": check_ef_b1s,
    "ef_alpha_prime": check_ef_alpha_prime,
    "ef_thetabar_prime": check_ef_thetabar_prime,
    "ef_sigma_positive": check_ef_sigma_positive,
    "ef_reflection": check_ef_reflection,
    "cdf_jacobian": check_cdf_jacobian,
    "cdf_eps_row": check_cdf_eps_row,
    "cdf_first_order": check_cdf_first_order,
    "cdf_second_order": check_cdf_second_order,
    "cdf_faa": check_cdf_faa,
    "cdf_theta_expansion": check_cdf_theta_expansion,
    "ideal_Q_identity": check_ideal_Q_identity,
    "ideal_jacobian": check_ideal_jacobian,
    "ideal_first_order": check_ideal_first_order,
    "ideal_theta_expansion": check_ideal_theta_expansion,
}
for _flow in ("ef", "cdf", "ideal"):
    CATALOGUE[f"profile_residual_{_flow}"] = (lambda f=_flow: _profile_residual_check(f))
    CATALOGUE[f"seam_smoothness_{_flow}"] = (lambda f=_flow: _seam_check(f))


def run_check(check_id: str) -> CheckReport:
    fn = CATALOGUE.get(check_id)
    if fn is None:
        raise UnknownCheck(f"unknown check '{check_id}'; known: {', '.join(CATALOGUE)}")
    t0 = time.perf_counter()
    rep = fn()
    rep.runtime = time.perf_counter() - t0
    return rep


def run_all(only=None) -> list[CheckReport]:
    ids = list(CATALOGUE) if not only else list(only)
    for cid in ids:
        if cid not in CATALOGUE:
            raise UnknownCheck(f"unknown check '{cid}'")
    return [run_check(cid) for cid in ids]
