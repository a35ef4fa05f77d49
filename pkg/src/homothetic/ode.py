"""
Adaptive Dormand-Prince 5(4) integration with quartic dense output and
event location.

Right-hand sides have the signature ``rhs(s, y, params) -> dy`` with ``y`` and
``params`` float64 arrays.  When ``rhs`` is a numba ``@njit`` function the
stepping loop runs compiled; any other callable runs through the same code
in plain Python (useful for tests and ad hoc systems, but slow).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numba import njit
from numba.extending import is_jitted
from scipy.optimize import brentq

from .errors import Ambiguous, NonFiniteState, NoSignChange, StepLimitExceeded

# Butcher tableau (Dormand & Prince 1980)
_C = np.array([0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0])
_A = np.array([
    [0.0, 0.0, 0.0, 0.0, 0.0],
    [1 / 5, 0.0, 0.0, 0.0, 0.0],
    [3 / 40, 9 / 40, 0.0, 0.0, 0.0],
    [44 / 45, -56 / 15, 32 / 9, 0.0, 0.0],
    [19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729, 0.0],
    [9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656],
])
_B = np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84])
# fifth-order minus embedded fourth-order weights, 7 stages (FSAL)
_E = np.array([-71 / 57600, 0.0, 71 / 16695, -71 / 1920, 17253 / 339200, -22 / 525, 1 / 40])
# dense output: y(t0 + x h) = y0 + h * K^T @ (P @ [x, x^2, x^3, x^4])
_P = np.array([
    [1.0, -8048581381 / 2820520608, 8663915743 / 2820520608, -12715105075 / 11282082432],
    [0.0, 0.0, 0.0, 0.0],
    [0.0, 131558114200 / 32700410799, -68118460800 / 10900136933, 87487479700 / 32700410799],
    [0.0, -1754552775 / 470086768, 14199869525 / 1410260304, -10690763975 / 1880347072],
    [0.0, 127303824393 / 49829197408, -318862633887 / 49829197408, 701980252875 / 199316789632],
    [0.0, -282668133 / 205662961, 2019193451 / 616988883, -1453857185 / 822651844],
    [0.0, 40617522 / 29380423, -110615467 / 29380423, 69997945 / 29380423],
])

OK, STEP_LIMIT, NON_FINITE, STEP_UNDERFLOW = 0, 1, 2, 3


@dataclass(frozen=True)
class IntegratorConfig:
    rel_tol: float = 1e-12
    abs_tol: float = 1e-12
    initial_step: float = 0.0  # 0 selects the step automatically
    max_step: float = np.inf
    max_steps: int = 200_000

    def __post_init__(self):
        if not (self.rel_tol > 0 and self.abs_tol > 0):
            raise ValueError("tolerances must be positive")
        if self.max_steps < 1:
            raise ValueError("max_steps must be >= 1")
        if self.initial_step < 0 or not self.max_step > 0:
            raise ValueError("step sizes must be positive")

    def halved(self) -> "IntegratorConfig":
        return IntegratorConfig(self.rel_tol / 2, self.abs_tol / 2, self.initial_step,
                                self.max_step, self.max_steps)


DEFAULT_CONFIG = IntegratorConfig()


@njit(cache=True)
def _all_finite(a):
    for v in a.ravel():
        if not np.isfinite(v):
            return False
    return True


@njit(cache=True)
def _err_norm(err, y, y_new, rtol, atol):
    acc = 0.0
    for i in range(y.size):
        sc = atol + rtol * max(abs(y[i]), abs(y_new[i]))
        acc += (err[i] / sc) ** 2
    return np.sqrt(acc / y.size)


def _dp54(rhs, y0, s0, s1, params, rtol, atol, h0, hmax, max_steps):
    """Integrate from s0 to s1 > s0.  Returns (status, nodes, states, stages, count)."""
    n = y0.size
    cap = 64
    ts = np.empty(cap)
    ys = np.empty((cap, n))
    ks = np.empty((cap, 7, n))
    ts[0] = s0
    ys[0] = y0
    m = 1
    if s1 == s0:
        return OK, ts[:1].copy(), ys[:1].copy(), ks[:0].copy(), 1

    f0 = rhs(s0, y0, params)
    if not _all_finite(f0):
        return NON_FINITE, ts[:1].copy(), ys[:1].copy(), ks[:0].copy(), 1
    span = s1 - s0
    if h0 > 0.0:
        h = h0
    else:
        # Hairer, Norsett & Wanner starting step
        d0 = _err_norm(y0, y0, y0, rtol, atol)
        d1 = _err_norm(f0, y0, y0, rtol, atol)
        hh = 1e-6 if (d0 < 1e-5 or d1 < 1e-5) else 0.01 * d0 / d1
        hh = min(hh, span)
        f1 = rhs(s0 + hh, y0 + hh * f0, params)
        d2 = _err_norm(f1 - f0, y0, y0, rtol, atol) / hh
        if max(d1, d2) <= 1e-15:
            h1 = max(1e-6, hh * 1e-3)
        else:
            h1 = (0.01 / max(d1, d2)) ** 0.2
        h = min(100 * hh, h1)
    h = min(h, hmax, span)

    s = s0
    y = y0.copy()
    f = f0
    K = np.empty((7, n))
    steps = 0
    while s < s1:
        if steps >= max_steps:
            return STEP_LIMIT, ts[:m].copy(), ys[:m].copy(), ks[:m - 1].copy(), m
        last = False
        if s + h >= s1 or s + 1.0001 * h >= s1:
            h = s1 - s
            last = True
        K[0] = f
        for i in range(1, 6):
            dy = np.zeros(n)
            for j in range(i):
                dy += _A[i, j] * K[j]
            K[i] = rhs(s + _C[i] * h, y + h * dy, params)
        dy = np.zeros(n)
        for j in range(6):
            dy += _B[j] * K[j]
        y_new = y + h * dy
        s_new = s1 if last else s + h
        f_new = rhs(s_new, y_new, params)
        K[6] = f_new
        steps += 1
        if not (_all_finite(y_new) and _all_finite(f_new)):
            if h < 1e-14 * max(1.0, abs(s)):
                return NON_FINITE, ts[:m].copy(), ys[:m].copy(), ks[:m - 1].copy(), m
            h *= 0.25
            continue
        err = np.zeros(n)
        for j in range(7):
            err += _E[j] * K[j]
        err *= h
        en = _err_norm(err, y, y_new, rtol, atol)
        if en <= 1.0:
            if m == cap:
                cap *= 2
                ts2 = np.empty(cap)
                ys2 = np.empty((cap, n))
                ks2 = np.empty((cap, 7, n))
                ts2[:m] = ts[:m]
                ys2[:m] = ys[:m]
                ks2[:m - 1] = ks[:m - 1]
                ts, ys, ks = ts2, ys2, ks2
            ks[m - 1] = K
            ts[m] = s_new
            ys[m] = y_new
            m += 1
            s, y, f = s_new, y_new, f_new
            fac = 10.0 if en == 0.0 else min(10.0, 0.9 * en ** -0.2)
            h = min(h * fac, hmax)
        else:
            if h < 1e-14 * max(1.0, abs(s)):
                return STEP_UNDERFLOW, ts[:m].copy(), ys[:m].copy(), ks[:m - 1].copy(), m
            h *= max(0.2, 0.9 * en ** -0.2)
    return OK, ts[:m].copy(), ys[:m].copy(), ks[:m - 1].copy(), m


# not cached: the disk cache is keyed on the rhs function type and breaks across processes
_dp54_jit = njit(_dp54)


@dataclass(frozen=True, eq=False)
class Trajectory:
    """Dense-output solution on [s_start, s_end].

    ``stages[i]`` holds the seven Runge-Kutta stages of the step
    ``nodes[i] -> nodes[i+1]``.
    """

    nodes: np.ndarray
    states: np.ndarray
    stages: np.ndarray

    def __post_init__(self):
        for a in (self.nodes, self.states, self.stages):
            a.setflags(write=False)

    @property
    def s_start(self) -> float:
        return float(self.nodes[0])

    @property
    def s_end(self) -> float:
        return float(self.nodes[-1])

    @property
    def dim(self) -> int:
        return self.states.shape[1]

    @property
    def end_state(self) -> np.ndarray:
        return self.states[-1]

    @property
    def derivatives(self) -> np.ndarray:
        """rhs values at the nodes (first stage of each step, FSAL at the end)."""
        if len(self.stages) == 0:
            return np.full_like(self.states, np.nan)
        return np.vstack([self.stages[:, 0, :], self.stages[-1:, 6, :]])

    def __call__(self, s):
        s_arr = np.asarray(s, dtype=float)
        scalar = s_arr.ndim == 0
        s_arr = np.atleast_1d(s_arr)
        lo, hi = self.nodes[0], self.nodes[-1]
        tol = 1e-12 * max(1.0, abs(hi))
        if np.any(s_arr < lo - tol) or np.any(s_arr > hi + tol):
            raise ValueError(f"evaluation outside [{lo}, {hi}]")
        if len(self.nodes) == 1:
            out = np.repeat(self.states[:1], len(s_arr), axis=0)
            return out[0] if scalar else out
        s_arr = np.clip(s_arr, lo, hi)
        idx = np.clip(np.searchsorted(self.nodes, s_arr, side="right") - 1, 0, len(self.nodes) - 2)
        h = self.nodes[idx + 1] - self.nodes[idx]
        x = (s_arr - self.nodes[idx]) / h
        powers = np.stack([x, x * x, x ** 3, x ** 4], axis=1)  # (m, 4)
        weights = powers @ _P.T  # (m, 7)
        incr = np.einsum("mj,mjn->mn", weights, self.stages[idx])
        out = self.states[idx] + h[:, None] * incr
        # exact at nodes
        at_node = x == 0.0
        out[at_node] = self.states[idx[at_node]]
        return out[0] if scalar else out


def integrate(rhs, y0, s_span, params=(), config: IntegratorConfig = DEFAULT_CONFIG) -> Trajectory:
    """Integrate ``y' = rhs(s, y, params)`` over ``s_span`` with dense output."""
    s0, s1 = float(s_span[0]), float(s_span[1])
    if s1 < s0:
        raise ValueError("s_span must be increasing")
    y0 = np.ascontiguousarray(y0, dtype=float)
    params = np.ascontiguousarray(params, dtype=float)
    if not np.all(np.isfinite(y0)):
        raise NonFiniteState("non-finite initial state")
    kernel = _dp54_jit if is_jitted(rhs) else _dp54
    hmax = config.max_step if np.isfinite(config.max_step) else 1e300
    status, ts, ys, ks, _ = kernel(rhs, y0, s0, s1, params, config.rel_tol, config.abs_tol,
                                   config.initial_step, hmax, config.max_steps)
    if status == STEP_LIMIT:
        raise StepLimitExceeded(f"max_steps={config.max_steps} reached at s={ts[-1]:.6g}")
    if status in (NON_FINITE, STEP_UNDERFLOW):
        raise NonFiniteState(f"integration broke down at s={ts[-1]:.6g}")
    return Trajectory(ts, ys, ks)


def locate_event(traj: Trajectory, f, bracket, abs_tol: float = 1e-13, samples: int = 64) -> float:
    """Zero of ``f(s, state)`` along ``traj`` inside ``bracket``.

    The bracket is swept on ``samples`` dense points first; more than one sign
    change raises Ambiguous, none raises NoSignChange.
    """
    a, b = max(float(bracket[0]), traj.s_start), min(float(bracket[1]), traj.s_end)
    if not a < b:
        raise NoSignChange(f"empty bracket [{bracket[0]}, {bracket[1]}]")
    grid = np.linspace(a, b, samples + 1)
    states = traj(grid)
    vals = np.array([f(si, yi) for si, yi in zip(grid, states)])
    near = np.abs(vals) <= abs_tol
    sg = np.where(near, 0.0, np.sign(vals))
    flips = np.flatnonzero(sg[:-1] * sg[1:] < 0)
    # each run of near-zero samples counts as one root
    runs = np.flatnonzero(near & ~np.concatenate([[False], near[:-1]]))
    n_roots = len(flips) + len(runs)
    if n_roots == 0:
        raise NoSignChange(f"no sign change of event function in [{a}, {b}]")
    if n_roots > 1:
        raise Ambiguous(f"{n_roots} sign changes in [{a}, {b}]")
    if len(runs):
        j = runs[0]
        k = j
        while k + 1 < len(near) and near[k + 1]:
            k += 1
        return float(grid[j + np.argmin(np.abs(vals[j:k + 1]))])
    i = flips[0]
    g = lambda s: f(s, traj(s))
    root = brentq(g, grid[i], grid[i + 1], xtol=1e-15, rtol=4 * np.finfo(float).eps, maxiter=200)
    if abs(g(root)) > abs_tol:
        raise NoSignChange(f"event residual {abs(g(root)):.2e} above {abs_tol:.0e} at s={root}")
    return float(root)
