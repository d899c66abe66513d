"""Variational and fixed-node diffusion Monte Carlo with blocking statistics."""

from .dmc import DEFAULT_TAUS, DMCParams, DMCResult, LadderResult, PopulationError, Walker, dmc_fixed_node, dmc_ladder
from .stats import BlockingResult, EnergyEstimate, blocking_error, format_energy, timestep_extrapolate
from .vmc import SamplingError, VMCParams, VMCResult, vmc_run
