"""
Epicyclic arcs for the ideal flow.

State (x, y, theta, k, p, Qr, Qi) with p = k_s and Q = Qr + i Qi carrying the
higher jets through M + iN = Q e^{i theta}: k_ss = (N + p^2/2)/k and
k_sss = M.  Started at (1, 0, 0, 1, 0, 0, b).

Phi is the reduced functional (G(alpha) - G(0))/alpha with G = p(L) + M(L).
To keep that quotient smooth in the parameters, the two copies of the system
(at alpha and at 0, or at +h and -h) are integrated side by side as one
system, so they share every step and their truncation errors cancel in the
difference.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numba import njit

from .branch import Branch, check_target
from .errors import BranchLost, CurvatureVanished, DegenerateCircle, NonFiniteState, RootFindError
from .ode import DEFAULT_CONFIG, IntegratorConfig, Trajectory, integrate
from .rootfind import NewtonConfig, newton_solve

K_FLOOR = 1e-3
ALPHA_SWITCH = 1e-6
NEIGHBOURHOOD = 0.6
DEGENERATE_TOL = 1e-8
DEGENERATE_EPS = 1e-4


@njit(cache=True)
def ideal_rhs(s, S, prm):
    """Copies of the 7-dim system; prm = (eps, k_floor, alpha_1, ..., alpha_m)."""
    eps, kfloor = prm[0], prm[1]
    m = prm.size - 2
    out = np.empty(7 * m)
    for c in range(m):
        alpha = prm[2 + c]
        o = 7 * c
        x, y, th, k, p, qr, qi = S[o], S[o + 1], S[o + 2], S[o + 3], S[o + 4], S[o + 5], S[o + 6]
        if abs(k) < kfloor:
            for j in range(7 * m):
                out[j] = np.nan
            return out
        cs, sn = np.cos(th), np.sin(th)
        f = cs + eps * (x * cs + y * sn)
        N = qr * sn + qi * cs
        out[o] = -sn
        out[o + 1] = cs
        out[o + 2] = k
        out[o + 3] = p
        out[o + 4] = (N + 0.5 * p * p) / k
        out[o + 5] = -alpha * f * cs
        out[o + 6] = alpha * f * sn
    return out


def initial_state(b: float, copies: int = 1) -> np.ndarray:
    return np.tile([1.0, 0.0, 0.0, 1.0, 0.0, 0.0, b], copies)


def jets_from_state(S: np.ndarray):
    """(M, N, k_ss) from states of shape (..., 7)."""
    th, k, p, qr, qi = S[..., 2], S[..., 3], S[..., 4], S[..., 5], S[..., 6]
    M = qr * np.cos(th) - qi * np.sin(th)
    N = qr * np.sin(th) + qi * np.cos(th)
    return M, N, (N + 0.5 * p * p) / k


def seam_value(S, eps: float) -> float:
    x, y, th = S[..., 0], S[..., 1], S[..., 2]
    return -np.sin(th) + eps * (y * np.cos(th) - x * np.sin(th))


@dataclass(frozen=True)
class IdealParams:
    alpha: float
    epsilon: float
    b: float

    def __post_init__(self):
        if not all(np.isfinite([self.alpha, self.epsilon, self.b])):
            raise ValueError("parameters must be finite")


def _run(alphas, eps: float, b: float, L: float, config: IntegratorConfig, k_floor: float) -> Trajectory:
    prm = np.concatenate([[eps, k_floor], np.asarray(alphas, dtype=float)])
    try:
        return integrate(ideal_rhs, initial_state(b, len(alphas)), (0.0, L), prm, config)
    except NonFiniteState as exc:
        raise CurvatureVanished(f"|k| < {k_floor} before s={L} (eps={eps}, b={b}): {exc}") from exc


def ideal_trajectory(params: IdealParams, L: float, config: IntegratorConfig = DEFAULT_CONFIG,
                     k_floor: float = K_FLOOR) -> Trajectory:
    return _run([params.alpha], params.epsilon, params.b, L, config, k_floor)


def _G(S7) -> float:
    M, _, _ = jets_from_state(S7)
    return float(S7[4] + M)


def ideal_endpoint(params: IdealParams, L: float, config: IntegratorConfig = DEFAULT_CONFIG,
                   k_floor: float = K_FLOOR, alpha_switch: float = ALPHA_SWITCH):
    """(Phi, U, B) at arc length L."""
    a, eps, b = params.alpha, params.epsilon, params.b
    if abs(a) >= alpha_switch:
        end = _run([a, 0.0], eps, b, L, config, k_floor).end_state
        main = end[:7]
        phi = (_G(end[:7]) - _G(end[7:])) / a
    else:
        h = alpha_switch
        end = _run([a, h, -h], eps, b, L, config, k_floor).end_state
        main = end[:7]
        phi = (_G(end[7:14]) - _G(end[14:])) / (2 * h)
    M, _, _ = jets_from_state(main)
    return float(phi), float(M), float(seam_value(main, eps))


def ideal_map(z, epsilon: float, config: IntegratorConfig = DEFAULT_CONFIG) -> np.ndarray:
    """F(alpha, b, L) = (Phi, U, B) at fixed epsilon."""
    if not z[2] > 0:
        raise BranchLost("arc length must be positive")
    return np.array(ideal_endpoint(IdealParams(z[0], epsilon, z[1]), z[2], config))


def ideal_first_order_seed(epsilon: float) -> np.ndarray:
    return np.array([0.0, -8.0 * epsilon / 3.0, np.pi + 8.0 * np.pi * epsilon / 3.0])


@dataclass(frozen=True, eq=False)
class IdealArc:
    params: IdealParams
    L: float
    trajectory: Trajectory
    Theta: float
    sigma: float  # eps * alpha, see homothety_coefficient

    flow = "ideal"
    label = "expander"
    jet_order = 4

    @property
    def alpha(self) -> float:
        return self.params.alpha

    @property
    def epsilon(self) -> float:
        return self.params.epsilon

    @property
    def b(self) -> float:
        return self.params.b

    @property
    def terminal_angle(self) -> float:
        return self.Theta

    @property
    def homothety_coefficient(self) -> float:
        # -F[k] = -s <gamma - c, N> with s = eps * alpha; s > 0 expands
        return self.epsilon * self.alpha

    def endpoint_residuals(self) -> dict:
        S = self.trajectory(self.L)
        M, _, _ = jets_from_state(S)
        return {"Phi": float(ideal_endpoint(self.params, self.L)[0]), "U": float(M),
                "B": float(seam_value(S, self.epsilon)), "V": float(S[4])}

    def jets(self, s):
        """(x, y, theta, [k, k_s, k_ss, k_sss, k_ssss]) at arc lengths ``s``."""
        S = self.trajectory(np.asarray(s, dtype=float))
        x, y, th, k, p = S[:, 0], S[:, 1], S[:, 2], S[:, 3], S[:, 4]
        M, N, kss = jets_from_state(S)
        f = np.cos(th) + self.epsilon * (x * np.cos(th) + y * np.sin(th))
        k4 = -self.alpha * f - k * N
        return x, y, th, np.column_stack([k, p, kss, M, k4])


def ideal_fundamental_arc(epsilon: float, guess=None, config: IntegratorConfig = DEFAULT_CONFIG,
                          newton: NewtonConfig = NewtonConfig()) -> IdealArc:
    """Joint Newton solve of (Phi, U, B) = 0 in (alpha, b, L)."""
    x0 = ideal_first_order_seed(epsilon) if guess is None else np.asarray(guess, dtype=float)
    try:
        rep = newton_solve(lambda z: ideal_map(z, epsilon, config), x0, newton)
    except RootFindError as exc:
        raise BranchLost(f"ideal solve failed at eps={epsilon}: {exc}") from exc
    alpha, b, L = rep.solution
    if abs(epsilon) > DEGENERATE_EPS and abs(alpha) < DEGENERATE_TOL and abs(b) < DEGENERATE_TOL:
        raise DegenerateCircle(f"converged to the circle (alpha={alpha:.1e}, b={b:.1e}) at eps={epsilon}")
    params = IdealParams(alpha, epsilon, b)
    traj = ideal_trajectory(params, L, config)
    return IdealArc(params, float(L), traj, float(traj.end_state[2]), epsilon * alpha)


_BRANCHES: dict = {}


def ideal_branch(config: IntegratorConfig = DEFAULT_CONFIG) -> Branch:
    br = _BRANCHES.get(config)
    if br is None:
        br = Branch(
            solve=lambda e, z: ideal_fundamental_arc(e, z, config),
            unknowns=lambda arc: np.array([arc.alpha, arc.b, arc.L]),
            angle=lambda arc: arc.Theta,
            seed=ideal_first_order_seed,
            size=lambda arc: abs(arc.alpha) + abs(arc.epsilon),
            bound=NEIGHBOURHOOD,
        )
        _BRANCHES[config] = br
    return br


def ideal_seed_epsilon(p: int, q: int) -> float:
    return float(np.sqrt(3 * (np.pi - p * np.pi / q) / (4 * np.pi)))


def ideal_solve_epsilon(p: int, q: int, config: IntegratorConfig = DEFAULT_CONFIG, angle_tol: float = 1e-10,
                        seed_eps: float | None = None) -> tuple[float, IdealArc]:
    """Smallest eps > 0 on the branch with terminal angle p*pi/q."""
    check_target(p, q)
    if not p < q:
        raise ValueError("terminal angle p*pi/q must be below pi")
    br = ideal_branch(config)
    seed = seed_eps if seed_eps is not None else ideal_seed_epsilon(p, q)
    return br.target(p * np.pi / q, seed, angle_tol)
