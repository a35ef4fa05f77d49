"""
Natural-parameter continuation in epsilon and angle targeting.

A branch starts at the base arc (epsilon = 0) and is extended in steps of at
most ``max_step``.  Each new point is seeded by linear extrapolation of the
unknowns from the last two solved points, and the step is halved whenever
the corrector fails.  Solved points are kept, so several targets on the same
branch share the marching work.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Callable

import numpy as np

from .errors import BranchLost, HomotheticError, RootFindError, TargetUnreachable
from .rootfind import scalar_root


@dataclass
class BranchPoint:
    epsilon: float
    unknowns: np.ndarray
    angle: float
    arc: Any


@dataclass
class Branch:
    """Solved points along one branch, ordered by epsilon.

    ``solve(eps, guess)`` returns an arc or raises BranchLost;
    ``unknowns(arc)`` and ``angle(arc)`` read the Newton unknowns and the
    terminal angle; ``seed(eps)`` gives first-order unknowns near epsilon = 0;
    ``size(arc)`` is compared with ``bound`` to stop marching.
    """

    solve: Callable[[float, np.ndarray], Any]
    unknowns: Callable[[Any], np.ndarray]
    angle: Callable[[Any], float]
    seed: Callable[[float], np.ndarray]
    size: Callable[[Any], float]
    bound: float = 0.6
    max_step: float = 0.01
    min_step: float = 1e-5
    eps_max: float = 0.6
    points: list[BranchPoint] = field(default_factory=list)
    exhausted: str | None = None

    def __post_init__(self):
        if not self.points:
            arc = self.solve(0.0, self.seed(0.0))
            self.points.append(BranchPoint(0.0, self.unknowns(arc), self.angle(arc), arc))
        self._step = self.max_step
        self._streak = 0

    def guess(self, eps: float) -> np.ndarray:
        pts = self.points
        if len(pts) == 1:
            return self.seed(eps)
        # extrapolate/interpolate from the two nearest solved points below eps
        i = max(1, min(len(pts) - 1, int(np.searchsorted([p.epsilon for p in pts], eps))))
        a, b = pts[i - 1], pts[i]
        t = (eps - a.epsilon) / (b.epsilon - a.epsilon)
        return a.unknowns + t * (b.unknowns - a.unknowns)

    def extend(self) -> BranchPoint:
        """Solve one more point beyond the last, halving the step on failure."""
        if self.exhausted:
            raise TargetUnreachable(self.exhausted)
        last = self.points[-1]
        while True:
            eps = last.epsilon + self._step
            if eps > self.eps_max:
                self.exhausted = f"branch stopped at epsilon={last.epsilon:.6g} (eps_max={self.eps_max})"
                raise TargetUnreachable(self.exhausted)
            try:
                arc = self.solve(eps, self.guess(eps))
            except (BranchLost, RootFindError, HomotheticError) as exc:
                self._step /= 2
                self._streak = 0
                if self._step < self.min_step:
                    self.exhausted = (f"branch lost after epsilon={last.epsilon:.6g} "
                                      f"(angle {last.angle:.10g}): {exc}")
                    raise TargetUnreachable(self.exhausted) from exc
                continue
            if self.size(arc) > self.bound:
                self.exhausted = (f"branch left the neighbourhood |alpha|+|eps| <= {self.bound} "
                                  f"at epsilon={eps:.6g}")
                raise TargetUnreachable(self.exhausted)
            pt = BranchPoint(eps, self.unknowns(arc), self.angle(arc), arc)
            self.points.append(pt)
            self._streak += 1
            if self._streak >= 2 and self._step < self.max_step:
                self._step = min(2 * self._step, self.max_step)
                self._streak = 0
            return pt

    def first_crossing(self, target: float) -> tuple[BranchPoint, BranchPoint]:
        """Consecutive points whose angles straddle ``target``, marching as needed."""
        i = 0
        while True:
            while i + 1 >= len(self.points):
                self.extend()
            a, b = self.points[i], self.points[i + 1]
            da, db = a.angle - target, b.angle - target
            if da == 0.0 or da * db < 0 or db == 0.0:
                return a, b
            i += 1

    def target(self, target: float, seed_eps: float | None = None,
               angle_tol: float = 1e-10) -> tuple[float, Any]:
        """First epsilon > 0 along the branch with angle(arc) = target."""
        a, b = self.first_crossing(target)
        for p in (a, b):
            if abs(p.angle - target) <= angle_tol and p.epsilon > 0:
                return p.epsilon, p.arc
        cache: dict[float, Any] = {}

        def f(eps):
            arc = self.solve(eps, a.unknowns + (eps - a.epsilon) / (b.epsilon - a.epsilon)
                             * (b.unknowns - a.unknowns))
            cache[eps] = arc
            return self.angle(arc) - target

        seed = seed_eps if seed_eps is not None else a.epsilon + (b.epsilon - a.epsilon) * (
            (a.angle - target) / (a.angle - b.angle))
        try:
            eps = scalar_root(f, seed, (a.epsilon, b.epsilon), tol_residual=angle_tol)
        except RootFindError as exc:
            raise TargetUnreachable(f"angle targeting failed in [{a.epsilon}, {b.epsilon}]: {exc}") from exc
        arc = cache.get(eps)
        if arc is None:
            f(eps)
            arc = cache[eps]
        return eps, arc

    @property
    def reached(self) -> dict:
        eps = [p.epsilon for p in self.points]
        ang = [p.angle for p in self.points]
        return {"epsilon_max": max(eps), "angle_min": min(ang), "angle_max": max(ang),
                "points": len(eps), "stopped": self.exhausted}


def check_target(p: int, q: int) -> None:
    if not (isinstance(p, (int, np.integer)) and isinstance(q, (int, np.integer))):
        raise ValueError("p and q must be integers")
    if p < 1 or q < 1:
        raise ValueError("p and q must be positive")
    if math.gcd(int(p), int(q)) != 1:
        raise ValueError(f"p={p} and q={q} are not coprime")
