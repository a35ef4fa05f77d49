"""
Epicyclic arcs for curve diffusion flow.

State (x, y, theta, k, v, phi) started at (1, 0, 0, 1, 0, 0) with v = k_s and
phi accumulating -(cos(theta) + eps (x cos(theta) + y sin(theta))), so that
v(L) = -alpha * phi(L).  The arc conditions are Phi = phi(L) = 0 and B = 0,
solved jointly for (alpha, L).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numba import njit

from .branch import Branch, check_target
from .errors import BranchLost, DegenerateCircle, RootFindError
from .ode import DEFAULT_CONFIG, IntegratorConfig, Trajectory, integrate
from .rootfind import NewtonConfig, newton_solve

Y0 = np.array([1.0, 0.0, 0.0, 1.0, 0.0, 0.0])
NEIGHBOURHOOD = 0.6
DEGENERATE_ALPHA = 1e-8
DEGENERATE_EPS = 1e-4


@njit(cache=True)
def cdf_rhs(s, S, prm):
    alpha, eps = prm[0], prm[1]
    x, y, th, k, v = S[0], S[1], S[2], S[3], S[4]
    c, sn = np.cos(th), np.sin(th)
    f = c + eps * (x * c + y * sn)
    out = np.empty(6)
    out[0] = -sn
    out[1] = c
    out[2] = k
    out[3] = v
    out[4] = alpha * f
    out[5] = -f
    return out


def seam_value(S, eps: float) -> float:
    x, y, th = S[0], S[1], S[2]
    return -np.sin(th) + eps * (y * np.cos(th) - x * np.sin(th))


@dataclass(frozen=True)
class CdfParams:
    alpha: float
    epsilon: float

    def __post_init__(self):
        if not (np.isfinite(self.alpha) and np.isfinite(self.epsilon)):
            raise ValueError("parameters must be finite")

    @property
    def array(self) -> np.ndarray:
        return np.array([self.alpha, self.epsilon])


@dataclass(frozen=True, eq=False)
class CdfArc:
    params: CdfParams
    L: float
    trajectory: Trajectory
    Theta: float
    sigma: float  # profile coefficient -eps * alpha

    flow = "cdf"
    label = "shrinker"
    jet_order = 2

    @property
    def alpha(self) -> float:
        return self.params.alpha

    @property
    def epsilon(self) -> float:
        return self.params.epsilon

    @property
    def b(self):
        return None

    @property
    def terminal_angle(self) -> float:
        return self.Theta

    @property
    def homothety_coefficient(self) -> float:
        # k_ss = -s <gamma - c, N> with s = eps * alpha; s < 0 shrinks
        return self.epsilon * self.alpha

    def endpoint_residuals(self) -> dict:
        S = self.trajectory(self.L)
        return {"Phi": float(S[5]), "B": float(seam_value(S, self.epsilon)), "v": float(S[4])}

    def jets(self, s):
        """(x, y, theta, [k, k_s, k_ss]) at arc lengths ``s``."""
        S = self.trajectory(np.asarray(s, dtype=float))
        x, y, th = S[:, 0], S[:, 1], S[:, 2]
        f = np.cos(th) + self.epsilon * (x * np.cos(th) + y * np.sin(th))
        return x, y, th, np.column_stack([S[:, 3], S[:, 4], self.alpha * f])


def cdf_trajectory(params: CdfParams, L: float, config: IntegratorConfig = DEFAULT_CONFIG) -> Trajectory:
    return integrate(cdf_rhs, Y0, (0.0, L), params.array, config)


def cdf_endpoint(params: CdfParams, L: float, config: IntegratorConfig = DEFAULT_CONFIG):
    """(Phi, B) at arc length L."""
    S = cdf_trajectory(params, L, config).end_state
    return float(S[5]), float(seam_value(S, params.epsilon))


def cdf_map(z, epsilon: float, config: IntegratorConfig = DEFAULT_CONFIG) -> np.ndarray:
    """F(alpha, L) = (Phi, B) at fixed epsilon."""
    if not z[1] > 0:
        raise BranchLost("arc length must be positive")
    return np.array(cdf_endpoint(CdfParams(z[0], epsilon), z[1], config))


def cdf_first_order_seed(epsilon: float) -> np.ndarray:
    return np.array([-2.0 * epsilon, np.pi + 2.0 * np.pi * epsilon])


def cdf_fundamental_arc(epsilon: float, guess=None, config: IntegratorConfig = DEFAULT_CONFIG,
                        newton: NewtonConfig = NewtonConfig()) -> CdfArc:
    """Joint Newton solve of (Phi, B) = 0 in (alpha, L)."""
    x0 = cdf_first_order_seed(epsilon) if guess is None else np.asarray(guess, dtype=float)
    try:
        rep = newton_solve(lambda z: cdf_map(z, epsilon, config), x0, newton)
    except RootFindError as exc:
        raise BranchLost(f"CDF solve failed at eps={epsilon}: {exc}") from exc
    alpha, L = rep.solution
    if abs(alpha) < DEGENERATE_ALPHA and abs(epsilon) > DEGENERATE_EPS:
        raise DegenerateCircle(f"converged to alpha={alpha:.2e} at eps={epsilon}")
    params = CdfParams(alpha, epsilon)
    traj = cdf_trajectory(params, L, config)
    return CdfArc(params, float(L), traj, float(traj.end_state[2]), -epsilon * alpha)


_BRANCHES: dict = {}


def cdf_branch(config: IntegratorConfig = DEFAULT_CONFIG) -> Branch:
    br = _BRANCHES.get(config)
    if br is None:
        br = Branch(
            solve=lambda e, z: cdf_fundamental_arc(e, z, config),
            unknowns=lambda arc: np.array([arc.alpha, arc.L]),
            angle=lambda arc: arc.Theta,
            seed=cdf_first_order_seed,
            size=lambda arc: abs(arc.alpha) + abs(arc.epsilon),
            bound=NEIGHBOURHOOD,
        )
        _BRANCHES[config] = br
    return br


def cdf_seed_epsilon(p: int, q: int) -> float:
    return float(np.sqrt((np.pi - p * np.pi / q) / np.pi))


def cdf_solve_epsilon(p: int, q: int, config: IntegratorConfig = DEFAULT_CONFIG, angle_tol: float = 1e-10,
                      seed_eps: float | None = None, unlock_wide_angles: bool = False) -> tuple[float, CdfArc]:
    """Smallest eps > 0 on the branch with terminal angle p*pi/q."""
    check_target(p, q)
    if not p < q:
        raise ValueError("terminal angle p*pi/q must be below pi")
    if not unlock_wide_angles and not 2 * p > q:
        raise ValueError(f"p/q={p}/{q} outside (1/2, 1); pass unlock_wide_angles to allow it")
    br = cdf_branch(config)
    seed = seed_eps if seed_eps is not None else cdf_seed_epsilon(p, q)
    return br.target(p * np.pi / q, seed, angle_tol)

