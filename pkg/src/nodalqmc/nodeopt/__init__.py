"""Variational optimisation, the He benchmark and node-parameter scans."""

from .nodescan import ScanResult, be_node_guide_factory, scan_node_parameter
from .ritz import RitzResult, he_triplet_benchmark, ritz_energy
from .variational import OptimizationResult, ParameterSpace, linear_method, optimize_variational, reweighted_energy
