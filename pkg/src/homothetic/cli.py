"""Command-line front end: solve one target, run the verify catalogue, or sweep symmetry orders."""

from __future__ import annotations

import argparse
import math
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path

from . import __version__, cdf, elastic, ideal, verify
from .errors import HomotheticError, UnknownCheck, UsageError
from .glue import SAMPLES_PER_ARC, double_and_close, structural_report, to_centred
from .io import RunManifest, dumps, write_curve, write_report, write_svg
from .ode import IntegratorConfig

FLOWS = ("ef", "cdf", "ideal")

IDEAL_NOTES = [
    "labelled expander as stated for the ideal family; the computed homothety coefficient "
    "eps*alpha is negative, which is the shrinking direction",
    "the arc conditions fix Phi, U and B but not k_s(L); the k_s seam jump equals 2|k_s(L)|",
]


@dataclass(frozen=True)
class SolveOptions:
    rel_tol: float = 1e-12
    abs_tol: float = 1e-12
    angle_tol: float = 1e-10
    samples: int = SAMPLES_PER_ARC
    unlock_wide_angles: bool = False
    seed_eps: float | None = None
    allow_seam_defects: bool = False

    @property
    def config(self) -> IntegratorConfig:
        return IntegratorConfig(rel_tol=self.rel_tol, abs_tol=self.abs_tol)


def validate_target(flow: str, p, q) -> None:
    if flow not in FLOWS:
        raise UsageError(f"unknown flow '{flow}'")
    if p is None or q is None:
        raise UsageError("--p and --q are required")
    if p < 1 or q < 1:
        raise UsageError(f"p and q must be positive integers, got p={p}, q={q}")
    if math.gcd(p, q) != 1:
        raise UsageError(f"p={p} and q={q} are not coprime")
    if not p < q:
        raise UsageError(f"the terminal angle p*pi/q must be below pi, got {p}/{q}")


def _solve_arc(flow: str, p: int, q: int, opt: SolveOptions):
    cfg = opt.config
    if flow == "ef":
        eps, arc = elastic.ef_solve_epsilon(p, q, cfg, opt.angle_tol, opt.seed_eps)
        return eps, arc, elastic.ef_branch(cfg)
    if flow == "cdf":
        try:
            eps, arc = cdf.cdf_solve_epsilon(p, q, cfg, opt.angle_tol, opt.seed_eps, opt.unlock_wide_angles)
        except ValueError as exc:
            raise UsageError(str(exc)) from exc
        return eps, arc, cdf.cdf_branch(cfg)
    eps, arc = ideal.ideal_solve_epsilon(p, q, cfg, opt.angle_tol, opt.seed_eps)
    return eps, arc, ideal.ideal_branch(cfg)


def solve_target(flow: str, p: int, q: int, opt: SolveOptions = SolveOptions()):
    """Solve, glue and diagnose one target; returns (manifest, profile)."""
    validate_target(flow, p, q)
    eps, arc, branch = _solve_arc(flow, p, q, opt)
    curve = to_centred(arc, opt.samples)
    profile = double_and_close(curve, p, q, angle_tol=max(opt.angle_tol, 1e-8),
                               strict=not opt.allow_seam_defects)
    structure = structural_report(curve, profile)
    seams = {"endpoint": arc.endpoint_residuals(), "max_jump": profile.max_seam_jump,
             "jumps_by_order": profile.seam_jumps.max(axis=0).tolist(),
             "precondition": profile.seam_precondition}
    notes = list(IDEAL_NOTES) if flow == "ideal" else []
    if flow == "cdf":
        notes.append("sigma is the profile coefficient -eps*alpha; the homothety coefficient eps*alpha "
                     "is negative, so the profile shrinks")
    manifest = RunManifest(
        flow_kind=flow, p=p, q=q, epsilon=eps, alpha=arc.alpha, b=arc.b, L=arc.L, sigma=arc.sigma,
        homothety_coefficient=arc.homothety_coefficient, label=arc.label,
        theta_terminal=arc.terminal_angle, seam_residuals=seams,
        closure_residual=profile.closure_residual, turning_number=profile.turning_number,
        integrator={"rel_tol": opt.rel_tol, "abs_tol": opt.abs_tol, "angle_tol": opt.angle_tol,
                    "samples_per_arc": opt.samples, "method": "Dormand-Prince 5(4)"},
        version=__version__, timestamp=datetime.now(timezone.utc).isoformat(timespec="seconds"),
        reached=branch.reached, structure=structure, notes=notes)
    return manifest, profile


def write_outputs(manifest: RunManifest, profile, out: Path) -> None:
    out.mkdir(parents=True, exist_ok=True)
    write_curve(profile, out / "curve.csv")
    write_svg(profile, out / "curve.svg")
    manifest.save(out / "manifest.json")


def _options(args) -> SolveOptions:
    if args.tol_rel <= 0 or args.tol_abs <= 0 or args.angle_tol <= 0:
        raise UsageError("tolerances must be positive")
    if args.samples < 16:
        raise UsageError("--samples must be at least 16")
    return SolveOptions(args.tol_rel, args.tol_abs, args.angle_tol, args.samples,
                        args.unlock_wide_angles, args.seed_eps, args.allow_seam_defects)


def run_solve(args) -> int:
    opt = _options(args)
    validate_target(args.flow, args.p, args.q)
    manifest, profile = solve_target(args.flow, args.p, args.q, opt)
    write_outputs(manifest, profile, Path(args.out))
    print(f"{args.flow} {args.p}/{args.q}: epsilon = {manifest.epsilon:.11g}, "
          f"turning number {manifest.turning_number}, max seam jump {profile.max_seam_jump:.2e}")
    return 0


def run_verify(args) -> int:
    only = args.only.split(",") if args.only else None
    reports = verify.run_all(only)
    for r in reports:
        dev = max(r.deviation) if r.deviation else float("nan")
        print(f"{'PASS' if r.passed else 'FAIL'}  {r.check_id:<26} max deviation {dev:.3e}  ({r.runtime:.1f}s)")
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    doc = write_report(reports, out / "report.json", __version__)
    return 0 if doc["passed"] else 1


def _sweep_one(job):
    flow, p, q, opt, out = job
    try:
        manifest, profile = solve_target(flow, p, q, opt)
    except HomotheticError as exc:
        return {"p": p, "q": q, "reached": False, "error": f"{type(exc).__name__}: {exc}"}
    write_outputs(manifest, profile, Path(out) / f"{flow}_{p}_{q}")
    return {"p": p, "q": q, "reached": True, "epsilon": manifest.epsilon,
            "structure_passed": manifest.structure["passed"], "flags": manifest.structure["flags"]}


def sweep_targets(flow: str, q_min: int, q_max: int) -> list[tuple[int, int]]:
    return [(1 if flow == "ef" else q - 1, q) for q in range(q_min, q_max + 1)]


def run_sweep(args) -> int:
    opt = _options(args)
    if args.flow not in FLOWS:
        raise UsageError(f"unknown flow '{args.flow}'")
    if not 2 <= args.q_min <= args.q_max:
        raise UsageError("need 2 <= --q-min <= --q-max")
    jobs = [(args.flow, p, q, opt, args.out) for p, q in sweep_targets(args.flow, args.q_min, args.q_max)]
    if args.jobs > 1:
        with ProcessPoolExecutor(args.jobs) as pool:
            rows = list(pool.map(_sweep_one, jobs))
    else:
        rows = [_sweep_one(j) for j in jobs]
    for r in rows:
        status = "ok" if r["reached"] and r["structure_passed"] else "FAIL"
        detail = f"epsilon = {r['epsilon']:.11g}" if r["reached"] else r["error"]
        print(f"{status:<4} {r['p']}/{r['q']}  {detail}")
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    passed = all(r["reached"] and r["structure_passed"] for r in rows)
    (out / "sweep.json").write_text(dumps({"flow": args.flow, "passed": passed, "targets": rows}))
    return 0 if passed else 1


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="homothetic", description=__doc__)
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def solver_flags(sp):
        sp.add_argument("--flow", required=True, choices=FLOWS)
        sp.add_argument("--out", default="run")
        sp.add_argument("--tol-rel", type=float, default=1e-12)
        sp.add_argument("--tol-abs", type=float, default=1e-12)
        sp.add_argument("--angle-tol", type=float, default=1e-10)
        sp.add_argument("--samples", type=int, default=SAMPLES_PER_ARC, help="samples per fundamental arc")
        sp.add_argument("--unlock-wide-angles", action="store_true",
                        help="allow CDF targets with p/q outside (1/2, 1)")
        sp.add_argument("--allow-seam-defects", action="store_true",
                        help="export even if the seam conditions fail; defects are recorded in the manifest")

    sp = sub.add_parser("solve", help="solve one (p, q) target and export the closed profile")
    solver_flags(sp)
    sp.add_argument("--p", type=int, required=True)
    sp.add_argument("--q", type=int, required=True)
    sp.add_argument("--seed-eps", type=float, default=None, help="override the continuation seed")
    sp.set_defaults(func=run_solve)

    sp = sub.add_parser("verify", help="run the verification catalogue")
    sp.add_argument("--only", default=None, help="comma-separated check ids")
    sp.add_argument("--out", default="run")
    sp.set_defaults(func=run_verify)

    sp = sub.add_parser("sweep", help="solve (q-1, q) (or (1, q) for ef) over a range of q")
    solver_flags(sp)
    sp.add_argument("--q-min", type=int, default=5)
    sp.add_argument("--q-max", type=int, default=64)
    sp.add_argument("--jobs", type=int, default=1)
    sp.set_defaults(func=run_sweep, seed_eps=None)
    return parser


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        return args.func(args)
    except (UsageError, UnknownCheck) as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 2
    except HomotheticError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
