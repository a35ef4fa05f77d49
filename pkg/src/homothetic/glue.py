"""
Reflection doubling and dihedral closure of fundamental arcs.

Everything here works in the frame centred at the homothety centre
c = (-1/eps, 0), so reflections and rotations act about the origin.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.spatial import cKDTree

from .errors import ClosureFailure, EpsilonZero, SeamViolation

SAMPLES_PER_ARC = 2048
JET_NAMES = ("k", "k_s", "k_ss", "k_sss", "k_ssss")


@dataclass(frozen=True)
class SeamLine:
    point: np.ndarray
    direction: np.ndarray

    def __post_init__(self):
        if abs(np.hypot(*self.direction) - 1.0) > 1e-12:
            raise ValueError("seam direction must be a unit vector")

    @classmethod
    def through_origin(cls, angle: float) -> "SeamLine":
        return cls(np.zeros(2), np.array([math.cos(angle), math.sin(angle)]))

    @property
    def angle(self) -> float:
        return math.atan2(self.direction[1], self.direction[0])

    def reflection(self) -> np.ndarray:
        c, s = math.cos(2 * self.angle), math.sin(2 * self.angle)
        return np.array([[c, s], [s, -c]])


def rotation(angle: float) -> np.ndarray:
    c, s = math.cos(angle), math.sin(angle)
    return np.array([[c, -s], [s, c]])


@dataclass(frozen=True, eq=False)
class PlanarCurve:
    """Uniformly sampled arc in the centred frame.

    ``jets`` columns follow JET_NAMES; the first ``jet_order`` must match
    across seams, the last one is the highest derivative entering the profile
    equation.
    """

    s: np.ndarray
    pos: np.ndarray  # (n, 2)
    theta: np.ndarray
    jets: np.ndarray  # (n, m)
    flow: str
    epsilon: float
    alpha: float
    b: float | None
    L: float
    sigma: float
    homothety_coefficient: float
    jet_order: int

    @property
    def tangent(self) -> np.ndarray:
        return np.column_stack([-np.sin(self.theta), np.cos(self.theta)])

    @property
    def normal(self) -> np.ndarray:
        return np.column_stack([-np.cos(self.theta), -np.sin(self.theta)])

    def radial_seam(self) -> np.ndarray:
        """<position, T> in the centred frame; zero where the tangent is orthogonal to the radius."""
        return np.einsum("ij,ij->i", self.pos, self.tangent)


def to_centred(arc, samples: int = SAMPLES_PER_ARC) -> PlanarCurve:
    """Sample ``arc`` at ``samples`` uniform intervals and shift by -c."""
    eps = arc.epsilon
    if eps == 0:
        raise EpsilonZero("the homothety centre is at infinity for eps = 0")
    s = np.linspace(0.0, arc.L, samples + 1)
    x, y, th, jets = arc.jets(s)
    pos = np.column_stack([x + 1.0 / eps, y])
    return PlanarCurve(s, pos, th, jets, arc.flow, eps, arc.alpha, arc.b, arc.L, arc.sigma,
                       arc.homothety_coefficient, arc.jet_order)


@dataclass(frozen=True, eq=False)
class ClosedProfile:
    flow_kind: str
    p: int
    q: int
    epsilon: float
    alpha: float
    b: float | None
    L: float
    sigma: float
    homothety_coefficient: float
    s: np.ndarray
    pos: np.ndarray
    theta: np.ndarray
    jets: np.ndarray
    jet_order: int
    turning_number: int
    closure_residual: float
    max_seam_jump: float
    seam_jumps: np.ndarray  # (2q, jet_order)
    arc_samples: int
    terminal_angle_error: float
    seam_precondition: dict = field(default_factory=dict)

    @property
    def symmetry_order(self) -> int:
        return self.q

    @property
    def total_turning(self) -> float:
        """theta(end) - theta(start) of the glued tangent angle."""
        return float(self.theta[-1] - self.theta[0])

    @property
    def diameter(self) -> float:
        return 2.0 * float(np.max(np.hypot(self.pos[:, 0], self.pos[:, 1])))

    @property
    def normal(self) -> np.ndarray:
        return np.column_stack([-np.cos(self.theta), -np.sin(self.theta)])


def seam_precondition(curve: PlanarCurve, p: int, q: int) -> dict:
    """Endpoint residuals that the gluing relies on."""
    pos_L, th_L = curve.pos[-1], curve.theta[-1]
    T_L = np.array([-math.sin(th_L), math.cos(th_L)])
    radial = float(np.dot(pos_L, T_L) / np.hypot(*pos_L))
    jets_L = curve.jets[-1]
    # odd derivatives must vanish at both ends for the reflection to be smooth
    odd = [float(jets_L[j]) for j in range(1, curve.jet_order, 2)]
    odd0 = [float(curve.jets[0, j]) for j in range(1, curve.jet_order, 2)]
    return {"radial": radial, "odd_jets_L": odd, "odd_jets_0": odd0,
            "angle_error": float(th_L - p * math.pi / q),
            "start_on_axis": float(curve.pos[0, 1])}


def double_and_close(curve: PlanarCurve, p: int, q: int, angle_tol: float = 1e-8, seam_tol: float = 1e-8,
                     closure_tol: float = 1e-8, strict: bool = True) -> ClosedProfile:
    """Reflect across the terminal seam line, then rotate q copies by 2 p pi / q.

    With ``strict`` the seam conditions are enforced before gluing
    (SeamViolation) and closure after (ClosureFailure); otherwise the
    diagnostics are only recorded.
    """
    if p < 1 or q < 1 or math.gcd(p, q) != 1:
        raise ValueError(f"invalid (p, q) = ({p}, {q})")
    pre = seam_precondition(curve, p, q)
    if strict:
        bad = []
        if abs(pre["radial"]) > seam_tol:
            bad.append(f"radial residual {pre['radial']:.2e}")
        for name, vals in (("s=L", pre["odd_jets_L"]), ("s=0", pre["odd_jets_0"])):
            for j, v in zip(range(1, curve.jet_order, 2), vals):
                if abs(v) > seam_tol:
                    bad.append(f"{JET_NAMES[j]}({name}) = {v:.3e}")
        if abs(pre["angle_error"]) > angle_tol:
            bad.append(f"terminal angle off p*pi/q by {pre['angle_error']:.2e}")
        if bad:
            raise SeamViolation("; ".join(bad))

    n = len(curve.s) - 1
    L = curve.L
    g = doubled_arc(curve)
    g_s, g_pos, g_th, g_jets = g.s, g.pos, g.theta, g.jets
    parity = _parity(curve.jets.shape[1])

    step = 2 * p * math.pi / q
    pieces_pos, pieces_th, pieces_s, pieces_jets = [], [], [], []
    for j in range(q):
        Rj = rotation(j * step)
        body = slice(0, None) if j == q - 1 else slice(0, -1)
        pieces_pos.append(g_pos[body] @ Rj.T)
        pieces_th.append(g_th[body] + j * step)
        pieces_s.append(g_s[body] + j * 2 * L)
        pieces_jets.append(g_jets[body])
    pos = np.vstack(pieces_pos)
    th = np.concatenate(pieces_th)
    s = np.concatenate(pieces_s)
    jets = np.vstack(pieces_jets)

    # seam jumps: left/right limits at s = L and s = 2L of every copy
    m = curve.jet_order
    jumps = []
    left_L, right_L = curve.jets[-1, :m], (curve.jets[-1] * parity)[:m]
    left_2L, right_2L = (curve.jets[0] * parity)[:m], curve.jets[0, :m]
    for _ in range(q):
        jumps.append(np.abs(left_L - right_L))
        jumps.append(np.abs(left_2L - right_2L))
    jumps = np.array(jumps)

    diam = 2.0 * float(np.max(np.hypot(pos[:, 0], pos[:, 1])))
    closure = float(np.hypot(*(pos[-1] - pos[0])))
    turning = turning_number(pos)
    if strict and closure > closure_tol * diam:
        raise ClosureFailure(f"closure gap {closure:.3e} exceeds {closure_tol:.0e} x diameter")
    return ClosedProfile(curve.flow, p, q, curve.epsilon, curve.alpha, curve.b, L, curve.sigma,
                         curve.homothety_coefficient, s, pos, th, jets, m, turning, closure,
                         float(jumps.max()), jumps, n, pre["angle_error"], pre)


def rotation_power_error(p: int, q: int) -> float:
    """sup-norm of rho^q - I for rho the rotation by 2 p pi / q."""
    R = rotation(2 * p * math.pi / q)
    return float(np.max(np.abs(np.linalg.matrix_power(R, q) - np.eye(2))))


def turning_number(pos: np.ndarray) -> int:
    """Rotation index of the closed polygon through ``pos`` (first = last point)."""
    return int(round(total_turning(pos) / (2 * math.pi)))


def total_turning(pos: np.ndarray) -> float:
    d = np.diff(pos, axis=0)
    ang = np.arctan2(d[:, 1], d[:, 0])
    # close the loop with the first chord
    ang = np.append(ang, ang[0])
    return float(np.sum(np.angle(np.exp(1j * np.diff(ang)))))


def seam_scan(curve: PlanarCurve) -> list[float]:
    """Interior zeros of the radial seam function (and of k_s for elastic arcs)."""
    zeros = _interior_zeros(curve.s, curve.radial_seam())
    if curve.flow == "elastic":
        zeros += _interior_zeros(curve.s, curve.jets[:, 1])
    return sorted(zeros)


def _interior_zeros(s: np.ndarray, f: np.ndarray) -> list[float]:
    # endpoint values are exact or round-off zeros by construction and are skipped
    si, fi = s[1:-1], f[1:-1]
    out = []
    for i in np.flatnonzero(fi == 0.0):
        out.append(float(si[i]))
    for i in np.flatnonzero(fi[:-1] * fi[1:] < 0):
        # linear refinement between samples
        out.append(float(si[i] - fi[i] * (si[i + 1] - si[i]) / (fi[i + 1] - fi[i])))
    return out


def concatenate_curves(a: PlanarCurve, b: PlanarCurve) -> PlanarCurve:
    """Join two sampled arcs end to start (test helper for the seam scan)."""
    s = np.concatenate([a.s, b.s[1:] + a.s[-1] - b.s[0]])
    return PlanarCurve(s, np.vstack([a.pos, b.pos[1:]]), np.concatenate([a.theta, b.theta[1:]]),
                       np.vstack([a.jets, b.jets[1:]]), a.flow, a.epsilon, a.alpha, a.b, s[-1] - s[0],
                       a.sigma, a.homothety_coefficient, a.jet_order)


def _parity(m: int) -> np.ndarray:
    # reflection with reversed arc length flips the sign of odd derivatives of k
    return np.array([(-1.0) ** j for j in range(m)])


def terminal_seam_angle(curve: PlanarCurve) -> float:
    """Angle of the terminal seam line, taken modulo pi closest to theta(L)."""
    phi = math.atan2(curve.pos[-1, 1], curve.pos[-1, 0])
    return phi + math.pi * round((curve.theta[-1] - phi) / math.pi)


def doubled_arc(curve: PlanarCurve) -> PlanarCurve:
    """The reflected doubling Gamma of one arc, as a single PlanarCurve."""
    n = len(curve.s) - 1
    phi = terminal_seam_angle(curve)
    R1 = SeamLine.through_origin(phi).reflection()
    rev = slice(n - 1, None, -1)
    parity = _parity(curve.jets.shape[1])
    return PlanarCurve(np.concatenate([curve.s, 2 * curve.L - curve.s[rev]]),
                       np.vstack([curve.pos, curve.pos[rev] @ R1.T]),
                       np.concatenate([curve.theta, 2 * phi - curve.theta[rev]]),
                       np.vstack([curve.jets, curve.jets[rev] * parity]), curve.flow, curve.epsilon,
                       curve.alpha, curve.b, 2 * curve.L, curve.sigma, curve.homothety_coefficient,
                       curve.jet_order)


def profile_residual(profile: ClosedProfile) -> np.ndarray:
    """Residual of the homothetic profile equation at every sample of the closed curve.

    elastic: k_ss + k^3/2 + s <X, N>;  cdf: k_ss + s <X, N>;
    ideal: -(k_ssss + k^2 k_ss - k k_s^2 / 2) + s <X, N>, with s the homothety
    coefficient and X the centred position.
    """
    sg = profile.homothety_coefficient
    XN = np.einsum("ij,ij->i", profile.pos, profile.normal)
    J = profile.jets
    k, ks, kss = J[:, 0], J[:, 1], J[:, 2]
    if profile.flow_kind == "elastic":
        return kss + 0.5 * k ** 3 + sg * XN
    if profile.flow_kind == "cdf":
        return kss + sg * XN
    k4 = J[:, 4]
    return -(k4 + k * k * kss - 0.5 * k * ks * ks) + sg * XN


def reflect_profile_error(profile: ClosedProfile) -> float:
    """Nearest-neighbour distance after reflecting the profile across the x-axis, over the diameter."""
    tree = cKDTree(profile.pos)
    mirrored = profile.pos * np.array([1.0, -1.0])
    d, _ = tree.query(mirrored)
    return float(d.max() / profile.diameter)


def structural_report(curve: PlanarCurve, profile: ClosedProfile, tol: float = 1e-8) -> dict:
    """Closure, turning, seam, scan and residual diagnostics with pass flags."""
    res = profile_residual(profile)
    interior = np.abs(res[1:-1])
    scan = seam_scan(curve)
    out = {
        "closure_relative": profile.closure_residual / profile.diameter,
        "turning_number": profile.turning_number,
        "max_seam_jump": profile.max_seam_jump,
        "interior_seams": scan,
        "max_profile_residual": float(interior.max()),
    }
    flags = {
        "closure": out["closure_relative"] <= tol,
        "turning": profile.turning_number == profile.p,
        "seams": profile.max_seam_jump <= tol,
        "scan": not scan,
        "residual": out["max_profile_residual"] <= tol,
    }
    if curve.flow == "elastic":
        v = curve.jets[1:-1, 1]
        out["max_interior_k_s"] = float(v.max())
        flags["k_s_negative"] = bool(np.all(v < 0))
    out["flags"] = flags
    out["passed"] = all(flags.values())
    return out
