"""Damped Newton for small dense systems and a safeguarded scalar secant."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (EvaluationFailure, HomotheticError, MaxIterations, NoConvergence,
                     NoSignChange, SingularJacobian)

COND_LIMIT = 1e12


@dataclass(frozen=True)
class NewtonConfig:
    fd_step: float = 1e-6
    tol_residual: float = 1e-11
    tol_step: float = 1e-14
    max_iter: int = 30
    damping: float = 0.5
    max_backtracks: int = 20

    def __post_init__(self):
        if not (self.fd_step > 0 and self.tol_residual > 0 and self.tol_step > 0):
            raise ValueError("fd_step and tolerances must be positive")
        if self.max_iter < 1:
            raise ValueError("max_iter must be >= 1")
        if not 0 < self.damping < 1:
            raise ValueError("damping must lie in (0, 1)")


@dataclass(frozen=True)
class SolveReport:
    solution: np.ndarray
    residual_norm: float
    iterations: int
    converged: bool
    residual: np.ndarray | None = None
    jacobian: np.ndarray | None = None


def _evaluate(F, x) -> np.ndarray:
    try:
        r = np.asarray(F(x), dtype=float)
    except HomotheticError as exc:
        raise EvaluationFailure(f"F failed at x={x}: {exc}") from exc
    except (ArithmeticError, ValueError) as exc:
        raise EvaluationFailure(f"F failed at x={x}: {exc}") from exc
    if not np.all(np.isfinite(r)):
        raise EvaluationFailure(f"F returned non-finite values at x={x}")
    return r


def fd_jacobian(F, x, fd_step: float = 1e-6) -> np.ndarray:
    """Central-difference Jacobian, step ``fd_step * max(1, |x_j|)`` per column."""
    x = np.asarray(x, dtype=float)
    cols = []
    for j in range(x.size):
        h = fd_step * max(1.0, abs(x[j]))
        xp, xm = x.copy(), x.copy()
        xp[j] += h
        xm[j] -= h
        cols.append((_evaluate(F, xp) - _evaluate(F, xm)) / (2 * h))
    return np.column_stack(cols)


def newton_solve(F, x0, config: NewtonConfig = NewtonConfig()) -> SolveReport:
    """Solve F(x) = 0 by Newton's method with a backtracking line search.

    Steps are accepted only if they lower the sup-norm of the residual.
    """
    x = np.array(x0, dtype=float, ndmin=1)
    r = _evaluate(F, x)
    if r.shape != x.shape:
        raise ValueError(f"F maps R^{x.size} to R^{r.size}")
    norm = float(np.max(np.abs(r)))
    J = None
    for it in range(config.max_iter + 1):
        if norm <= config.tol_residual:
            return SolveReport(x, norm, it, True, r, J)
        if it == config.max_iter:
            break
        J = fd_jacobian(F, x, config.fd_step)
        if not np.all(np.isfinite(J)) or np.linalg.cond(J) > COND_LIMIT:
            raise SingularJacobian(f"Jacobian condition number exceeds {COND_LIMIT:.0e} at x={x}")
        dx = np.linalg.solve(J, -r)
        lam = 1.0
        for _ in range(config.max_backtracks + 1):
            xt = x + lam * dx
            try:
                rt = _evaluate(F, xt)
            except EvaluationFailure:
                rt = None
            if rt is not None:
                nt = float(np.max(np.abs(rt)))
                if nt < norm:
                    break
            lam *= config.damping
        else:
            raise MaxIterations(f"line search stalled at x={x}, residual {norm:.3e}")
        x, r, norm = xt, rt, nt
        if np.max(np.abs(lam * dx)) <= config.tol_step * max(1.0, float(np.max(np.abs(x)))):
            if norm <= config.tol_residual:
                return SolveReport(x, norm, it + 1, True, r, J)
            raise MaxIterations(f"step stagnated at residual {norm:.3e} > {config.tol_residual:.0e}")
    raise MaxIterations(f"no convergence in {config.max_iter} iterations (residual {norm:.3e})")


def scalar_root(f, seed: float, bracket_hint=None, tol_residual: float = 1e-12,
                tol_x: float = 1e-15, max_iter: int = 100, step: float = 1e-4) -> float:
    """Root of a scalar function by the secant method.

    With ``bracket_hint`` every secant iterate that leaves the current bracket
    is replaced by the midpoint, so convergence is guaranteed.
    """
    def ev(x):
        v = float(f(x))
        if not np.isfinite(v):
            raise EvaluationFailure(f"non-finite value at x={x}")
        return v

    if bracket_hint is not None:
        a, b = float(bracket_hint[0]), float(bracket_hint[1])
        if a > b:
            a, b = b, a
        fa, fb = ev(a), ev(b)
        if fa == 0.0:
            return a
        if fb == 0.0:
            return b
        if np.sign(fa) == np.sign(fb):
            raise NoSignChange(f"f has the same sign at {a} and {b}")
        x = min(max(float(seed), a), b)
        fx = ev(x)
        # the previous iterate starts as the bracket end of opposite sign
        xp, fp = (a, fa) if np.sign(fa) != np.sign(fx) else (b, fb)
        widths = [b - a]
        for _ in range(max_iter):
            if abs(fx) <= tol_residual:
                return x
            mid = 0.5 * (a + b)
            cand = x - fx * (x - xp) / (fx - fp) if fx != fp else mid
            # bisect when the secant leaves the bracket or the bracket shrinks too slowly
            if not a < cand < b or (len(widths) > 2 and widths[-1] > 0.5 * widths[-3]):
                cand = mid
            fc = ev(cand)
            if np.sign(fc) == np.sign(fa):
                a, fa = cand, fc
            else:
                b, fb = cand, fc
            xp, fp, x, fx = x, fx, cand, fc
            widths.append(b - a)
            if b - a <= tol_x * max(1.0, abs(a)):
                return min(((a, fa), (b, fb), (x, fx)), key=lambda t: abs(t[1]))[0]
        raise NoConvergence(f"scalar_root: {max_iter} iterations, |f|={abs(fx):.3e}")

    x0 = float(seed)
    x1 = x0 + step * max(1.0, abs(x0))
    f0, f1 = ev(x0), ev(x1)
    for _ in range(max_iter):
        if abs(f1) <= tol_residual:
            return x1
        if f1 == f0:
            raise NoConvergence("secant slope vanished")
        x0, f0, x1 = x1, f1, x1 - f1 * (x1 - x0) / (f1 - f0)
        f1 = ev(x1)
        if abs(x1 - x0) <= tol_x * max(1.0, abs(x1)) and abs(f1) <= 100 * tol_residual:
            return x1
    raise NoConvergence(f"scalar_root: {max_iter} iterations, |f|={abs(f1):.3e}")
