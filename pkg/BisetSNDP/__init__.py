"""
BisetSNDP - node-weighted survivable network design on planar graphs by
primal-dual covering of biset functions, with brute-force audits.
"""

from .graph import Instance, NodeWeightedGraph, ProblemKind, load, preprocess, save
from .sndp import SolveReport, solve, solve_ec_sndp, solve_elem_sndp, solve_vc012

__version__ = "0.1.0"

__all__ = [
    "Instance",
    "NodeWeightedGraph",
    "ProblemKind",
    "SolveReport",
    "load",
    "preprocess",
    "save",
    "solve",
    "solve_ec_sndp",
    "solve_elem_sndp",
    "solve_vc012",
]
