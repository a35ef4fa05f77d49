"""Export of manifests, curve files, vector graphics and verification reports."""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path

import numpy as np

from .glue import ClosedProfile

FLOAT_FMT = "%.17g"
CURVE_COLUMNS = {
    "elastic": ("s", "x", "y", "theta", "k", "k_s"),
    "cdf": ("s", "x", "y", "theta", "k", "k_s"),
    "ideal": ("s", "x", "y", "theta", "k", "k_s", "k_ss", "k_sss"),
}
ARC_COLOURS = ("#1f5fa8", "#c8452b")


def _emit(obj, indent: int = 0) -> str:
    """JSON text with every float written to 17 significant digits."""
    pad, inner = "  " * indent, "  " * (indent + 1)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{inner}{json.dumps(str(k))}: {_emit(v, indent + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + pad + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        if all(not isinstance(v, (dict, list, tuple)) for v in obj):
            return "[" + ", ".join(_emit(v) for v in obj) + "]"
        return "[\n" + ",\n".join(inner + _emit(v, indent + 1) for v in obj) + "\n" + pad + "]"
    if isinstance(obj, (bool, np.bool_)):
        return "true" if obj else "false"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if not math.isfinite(x):
            # JSON has no literal for these
            return json.dumps(str(x))
        return FLOAT_FMT % x
    if obj is None:
        return "null"
    return json.dumps(str(obj))


def dumps(obj) -> str:
    return _emit(obj) + "\n"


@dataclass
class RunManifest:
    flow_kind: str
    p: int
    q: int
    epsilon: float
    alpha: float
    b: float | None
    L: float
    sigma: float
    homothety_coefficient: float
    label: str
    theta_terminal: float
    seam_residuals: dict
    closure_residual: float
    turning_number: int
    integrator: dict
    version: str
    timestamp: str
    reached: dict = field(default_factory=dict)
    structure: dict = field(default_factory=dict)
    notes: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "RunManifest":
        names = {f.name for f in fields(cls)}
        return cls(**{k: v for k, v in d.items() if k in names})

    def save(self, path) -> None:
        Path(path).write_text(dumps(self.to_dict()))

    @classmethod
    def load(cls, path) -> "RunManifest":
        return cls.from_dict(json.loads(Path(path).read_text()))


def curve_table(profile: ClosedProfile) -> tuple[tuple[str, ...], np.ndarray]:
    cols = CURVE_COLUMNS[profile.flow_kind]
    njet = len(cols) - 4
    data = np.column_stack([profile.s, profile.pos, profile.theta, profile.jets[:, :njet]])
    return cols, data


def write_curve(profile: ClosedProfile, path) -> None:
    cols, data = curve_table(profile)
    np.savetxt(path, data, fmt=FLOAT_FMT, delimiter=",", header=",".join(cols), comments="")


def read_curve(path) -> tuple[list[str], np.ndarray]:
    with open(path) as fh:
        header = fh.readline().strip().split(",")
    return header, np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)


def write_svg(profile: ClosedProfile, path, size: int = 800, margin: int = 20) -> None:
    """Closed curve in the centred frame; fundamental arcs alternate in colour."""
    pos = profile.pos
    r = float(np.max(np.abs(pos))) or 1.0
    scale = (size / 2 - margin) / r
    px = size / 2 + scale * pos[:, 0]
    py = size / 2 - scale * pos[:, 1]
    n = profile.arc_samples
    lines = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" '
             f'viewBox="0 0 {size} {size}">',
             f'<rect width="{size}" height="{size}" fill="white"/>']
    for j in range(2 * profile.q):
        seg = slice(j * n, (j + 1) * n + 1)
        pts = " ".join(f"{a:.3f},{b:.3f}" for a, b in zip(px[seg], py[seg]))
        lines.append(f'<polyline fill="none" stroke="{ARC_COLOURS[j % 2]}" stroke-width="1.5" '
                     f'points="{pts}"/>')
    lines.append(f'<circle cx="{size / 2}" cy="{size / 2}" r="2" fill="black"/>')
    lines.append("</svg>")
    Path(path).write_text("\n".join(lines) + "\n")


def write_report(reports, path, version: str) -> dict:
    doc = {"version": version, "passed": all(r.passed for r in reports),
           "checks": [r.to_dict() for r in reports]}
    Path(path).write_text(dumps(doc))
    return doc
