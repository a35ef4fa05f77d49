"""Closed homothetic curves for the free elastic, curve diffusion and ideal flows."""

__version__ = "0.1.0"

from .cdf import CdfArc, CdfParams, cdf_endpoint, cdf_fundamental_arc, cdf_solve_epsilon
from .elastic import ElasticArc, ElasticParams, ef_base_constants, ef_endpoint, ef_fundamental_arc, ef_solve_epsilon
from .errors import HomotheticError
from .glue import ClosedProfile, double_and_close, profile_residual, seam_scan, structural_report, to_centred
from .ideal import IdealArc, IdealParams, ideal_endpoint, ideal_fundamental_arc, ideal_solve_epsilon
from .ode import IntegratorConfig, Trajectory, integrate, locate_event
from .rootfind import NewtonConfig, newton_solve, scalar_root
from .verify import CheckReport, run_check

__all__ = [
    "CdfArc", "CdfParams", "CheckReport", "ClosedProfile", "ElasticArc", "ElasticParams", "HomotheticError",
    "IdealArc", "IdealParams", "IntegratorConfig", "NewtonConfig", "Trajectory", "cdf_endpoint",
    "cdf_fundamental_arc", "cdf_solve_epsilon", "double_and_close", "ef_base_constants", "ef_endpoint",
    "ef_fundamental_arc", "ef_solve_epsilon", "ideal_endpoint", "ideal_fundamental_arc", "ideal_solve_epsilon",
    "integrate", "locate_event", "newton_solve", "profile_residual", "run_check", "scalar_root", "seam_scan",
    "structural_report", "to_centred",
]
