"""
Jellyfish arcs for the free elastic flow.

State (x, y, theta, k, v) with v = k_s, started at (0, 0, 0, 1, 0).  The
homothety centre is c = (-1/eps, 0).  An arc ends where the tangent is
orthogonal to the radius from c (b1 = 0) and k_s vanishes (b2 = v = 0).
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from numba import njit
from scipy.integrate import quad

from .branch import Branch, check_target
from .errors import (Ambiguous, BranchLost, HomotheticError, NoSignChange, QuadratureFailure,
                     RootFindError)
from .ode import DEFAULT_CONFIG, IntegratorConfig, Trajectory, integrate, locate_event
from .rootfind import scalar_root

NEIGHBOURHOOD = 0.6
Y0 = np.array([0.0, 0.0, 0.0, 1.0, 0.0])


@njit(cache=True)
def ef_rhs(s, S, prm):
    alpha, eps = prm[0], prm[1]
    x, y, th, k, v = S[0], S[1], S[2], S[3], S[4]
    c, sn = np.cos(th), np.sin(th)
    out = np.empty(5)
    out[0] = -sn
    out[1] = c
    out[2] = k
    out[3] = v
    out[4] = -0.5 * k ** 3 - alpha * c - alpha * eps * (x * c + y * sn)
    return out


def b1_value(S, eps: float) -> float:
    x, y, th = S[0], S[1], S[2]
    return -np.sin(th) + eps * (y * np.cos(th) - x * np.sin(th))


@dataclass(frozen=True)
class ElasticParams:
    alpha: float
    epsilon: float

    def __post_init__(self):
        if not (np.isfinite(self.alpha) and np.isfinite(self.epsilon)):
            raise ValueError("parameters must be finite")
        if abs(self.alpha) + abs(self.epsilon) > NEIGHBOURHOOD:
            raise ValueError(f"|alpha|+|eps| exceeds the neighbourhood bound {NEIGHBOURHOOD}")

    @property
    def array(self) -> np.ndarray:
        return np.array([self.alpha, self.epsilon])


@dataclass(frozen=True, eq=False)
class ElasticArc:
    params: ElasticParams
    L: float
    trajectory: Trajectory
    seam_angle: float  # theta(L)
    sigma: float  # -eps * alpha

    flow = "elastic"
    label = "expander"
    jet_order = 2  # k and k_s must match across seams

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
        return self.seam_angle

    @property
    def homothety_coefficient(self) -> float:
        return self.sigma

    def endpoint_residuals(self) -> dict:
        S = self.trajectory(self.L)
        return {"b1": float(b1_value(S, self.epsilon)), "v": float(S[4])}

    def jets(self, s) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
        """(x, y, theta, [k, k_s, k_ss]) at arc lengths ``s``."""
        S = self.trajectory(np.asarray(s, dtype=float))
        prm = self.params.array
        kss = np.array([ef_rhs(0.0, row, prm)[4] for row in S])
        return S[:, 0], S[:, 1], S[:, 2], np.column_stack([S[:, 3], S[:, 4], kss])


@dataclass(frozen=True)
class ElasticBaseConstants:
    L0: float
    y0_L0: float
    int_cos2: float
    alpha_prime0: float


@lru_cache(maxsize=8)
def ef_base_constants(quadrature_tol: float = 1e-12) -> ElasticBaseConstants:
    """Base half-period constants by quadrature.

    With kappa = sin(phi) the integrals of 2 kappa^n / sqrt(1 - kappa^4)
    become integrals of 2 sin(phi)^n / sqrt(1 + sin(phi)^2), which are
    smooth on [-pi/2, pi/2].
    """
    if not quadrature_tol > 0:
        raise ValueError("quadrature_tol must be positive")

    def moment(n):
        val, err = quad(lambda ph: 2 * np.sin(ph) ** n / np.sqrt(1 + np.sin(ph) ** 2),
                        -np.pi / 2, np.pi / 2, epsabs=quadrature_tol, epsrel=quadrature_tol, limit=200)
        if not np.isfinite(val) or err > 10 * quadrature_tol * max(1.0, abs(val)):
            raise QuadratureFailure(f"moment {n}: estimate {val} with error {err}")
        return val

    L0, y0, c2 = moment(0), moment(2), moment(4)
    return ElasticBaseConstants(L0, y0, c2, -y0 / (2 * c2))


def ef_trajectory(params: ElasticParams, s_end: float, config: IntegratorConfig = DEFAULT_CONFIG) -> Trajectory:
    return integrate(ef_rhs, Y0, (0.0, s_end), params.array, config)


def ef_endpoint(params: ElasticParams, L: float, config: IntegratorConfig = DEFAULT_CONFIG):
    """(b1, b2) at arc length L."""
    S = ef_trajectory(params, L, config).end_state
    return float(b1_value(S, params.epsilon)), float(S[4])


def ef_arc_length(params: ElasticParams, L_guess: float, config: IntegratorConfig = DEFAULT_CONFIG,
                  half_width: float = 0.5) -> tuple[float, Trajectory]:
    """L with b1(L) = 0 near ``L_guess`` and a trajectory reaching it."""
    eps = params.epsilon
    event = lambda s, S: b1_value(S, eps)
    w = half_width
    for _ in range(6):
        traj = ef_trajectory(params, L_guess + w, config)
        try:
            L = locate_event(traj, event, (max(L_guess - w, 0.5), L_guess + w))
            return L, traj
        except NoSignChange:
            w *= 1.6
        except Ambiguous:
            w /= 2
    raise BranchLost(f"no seam crossing near L={L_guess} for {params}")


def ef_fundamental_arc(epsilon: float, guess=None, config: IntegratorConfig = DEFAULT_CONFIG,
                       tol_residual: float = 1e-12) -> ElasticArc:
    """Nested solve: L(alpha) from b1 = 0, then alpha from v(L(alpha)) = 0."""
    base = ef_base_constants()
    if guess is None:
        guess = (base.alpha_prime0 * epsilon, base.L0)
    a0, L_guess = float(guess[0]), float(guess[1])
    state = {"L": L_guess}

    def g(alpha):
        try:
            L, traj = ef_arc_length(ElasticParams(alpha, epsilon), state["L"], config)
        except (HomotheticError, ValueError) as exc:
            raise BranchLost(str(exc)) from exc
        state["L"] = L
        return float(traj(L)[4])

    try:
        alpha = scalar_root(g, a0, tol_residual=tol_residual, step=1e-4, max_iter=50)
    except RootFindError as exc:
        raise BranchLost(f"outer solve failed at eps={epsilon}: {exc}") from exc
    params = ElasticParams(alpha, epsilon)
    L, _ = ef_arc_length(params, state["L"], config)
    traj = ef_trajectory(params, L, config)
    end = traj.end_state
    if abs(b1_value(end, epsilon)) > 1e-10 or abs(end[4]) > 1e-10:
        raise BranchLost(f"endpoint residuals too large at eps={epsilon}")
    return ElasticArc(params, L, traj, float(end[2]), -epsilon * alpha)


def _size(arc) -> float:
    return abs(arc.alpha) + abs(arc.epsilon)


_BRANCHES: dict = {}


def ef_branch(config: IntegratorConfig = DEFAULT_CONFIG) -> Branch:
    br = _BRANCHES.get(config)
    if br is None:
        base = ef_base_constants()
        br = Branch(
            solve=lambda e, z: ef_fundamental_arc(e, z, config),
            unknowns=lambda arc: np.array([arc.alpha, arc.L]),
            angle=lambda arc: arc.seam_angle,
            seed=lambda e: np.array([base.alpha_prime0 * e, base.L0]),
            size=_size,
            bound=NEIGHBOURHOOD,
        )
        _BRANCHES[config] = br
    return br


def ef_seed_epsilon(p: int, q: int) -> float:
    return (p * np.pi / q) / ef_base_constants().y0_L0


def ef_solve_epsilon(p: int, q: int, config: IntegratorConfig = DEFAULT_CONFIG,
                     angle_tol: float = 1e-10, seed_eps: float | None = None) -> tuple[float, ElasticArc]:
    """Smallest eps > 0 on the branch with seam angle p*pi/q."""
    check_target(p, q)
    if not p < q:
        raise ValueError("seam angle p*pi/q must be below pi")
    br = ef_branch(config)
    return br.target(p * np.pi / q, seed_eps if seed_eps is not None else ef_seed_epsilon(p, q), angle_tol)
