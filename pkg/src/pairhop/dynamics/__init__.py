"""Time evolution: closed, no-jump, quantum trajectories, master equation and references."""

from __future__ import annotations

from .analytic import TwoLevelCurves, hopping_rate, oscillation_period, projected_two_level
from .closed import evolve_closed, evolve_nonhermitian, propagator
from .lindblad import liouvillian, lindblad_evolve
from .mcwf import mcwf_ensemble, mcwf_trajectory, no_jump_generator
from .pulse import PulseResult, default_pulse_end, pulse_experiment
from .results import EnsembleResult, EvolutionSpec, LindbladResult, TrajectoryResult

__all__ = [
    "EnsembleResult",
    "EvolutionSpec",
    "LindbladResult",
    "PulseResult",
    "TrajectoryResult",
    "TwoLevelCurves",
    "default_pulse_end",
    "evolve_closed",
    "evolve_nonhermitian",
    "hopping_rate",
    "lindblad_evolve",
    "liouvillian",
    "mcwf_ensemble",
    "mcwf_trajectory",
    "no_jump_generator",
    "oscillation_period",
    "projected_two_level",
    "propagator",
    "pulse_experiment",
]
