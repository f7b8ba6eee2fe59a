"""uctrl: simulator and verification lab for quantum oracle algorithms with
postselection."""

from .linalg import RegisterLayout, haar_unitaries, haar_unitary
from .model import (
    OracleAlgorithm,
    Task,
    check_clean,
    check_exact,
    check_neutralises,
    conjugation_task,
    cum_task,
    eps_distance_estimate,
    inverse_task,
    pure_deviation,
    transpose_task,
)
from .constructions import (
    composed_root_cU,
    conjugation,
    dong_cUd,
    inverse,
    kitaev_cswap,
    neutraliser_parallel,
    power_cUm,
    spin_echo_cUd,
    transpose_via_teleport,
)
from .topology import bu_map_g, bu_scan, central_loop, dichotomy_probe, sphere_grid, winding

__version__ = "0.1.0"

__all__ = [
    "RegisterLayout", "haar_unitary", "haar_unitaries",
    "OracleAlgorithm", "Task", "check_clean", "check_exact", "check_neutralises",
    "cum_task", "conjugation_task", "inverse_task", "transpose_task",
    "eps_distance_estimate", "pure_deviation",
    "composed_root_cU", "conjugation", "dong_cUd", "inverse", "kitaev_cswap",
    "neutraliser_parallel", "power_cUm", "spin_echo_cUd", "transpose_via_teleport",
    "bu_map_g", "bu_scan", "central_loop", "dichotomy_probe", "sphere_grid", "winding",
]
