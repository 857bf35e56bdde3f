"""Gaussian pulse into the left cavity, closed dynamics, right-cavity photon statistics."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal

import numpy as np

from ..errors import PhysicsError
from ..fock import DensityMatrix, fock_state, parity, partial_trace
from ..model import (
    MODE_C,
    MODE_LABELS,
    PulseParams,
    SystemParams,
    build_drive,
    build_full_hamiltonian,
    effective_coupling,
)
from .closed import evolve_closed
from .results import EvolutionSpec, TrajectoryResult


@dataclass(frozen=True)
class PulseResult:
    """Final reduced states of every mode plus the recorded run."""

    params: SystemParams
    pulse: PulseParams
    trajectory: TrajectoryResult
    reduced: dict[str, DensityMatrix]

    def populations(self, mode: str = "c") -> np.ndarray:
        return self.reduced[mode].populations()

    @property
    def odd_c(self) -> np.ndarray:
        return self.populations("c")[1::2]

    @property
    def even_c(self) -> np.ndarray:
        return self.populations("c")[0::2]


def default_pulse_end(params: SystemParams, pulse: PulseParams) -> float:
    """Pulse tail (8 widths) plus the time for one complete pair transfer, ``pi/(4 g~)``."""
    end = pulse.center + 8.0 * pulse.width
    if params.is_resonant and params.g > 0:
        end += math.pi / (4.0 * effective_coupling(params))
    return end


def pulse_max_step(params: SystemParams, pulse: PulseParams) -> float:
    fastest = max(params.omega_a, params.omega_b, params.omega_c, pulse.carrier)
    return min(0.01 / fastest, pulse.width / 100.0)


def pulse_experiment(
    params: SystemParams,
    pulse: PulseParams | None = None,
    times: np.ndarray | None = None,
    form: Literal["rotating", "real"] = "rotating",
) -> PulseResult:
    """Drive the left cavity from the vacuum and return the final reduced states.

    Records ``<n_a>, <n_b>, <n_c>`` and the right-cavity parity along the way.

    Raises:
        PhysicsError: If any loss rate is nonzero (the experiment is closed).
    """
    if any(params.gammas):
        raise PhysicsError("the pulse experiment is closed: all loss rates must vanish")
    pulse = pulse or PulseParams.defaults_for(params)
    if times is None:
        times = np.linspace(0.0, default_pulse_end(params, pulse), 401)
    space = params.space
    spec = EvolutionSpec(
        generator=build_full_hamiltonian(params),
        times=times,
        initial=fock_state(space, (0, 0, 0)),
        drive=build_drive(pulse, space, form=form),
        max_step=pulse_max_step(params, pulse),
        observables={"parity_c": parity(space, MODE_C)},
    )
    run = evolve_closed(spec)
    reduced = {MODE_LABELS[m]: partial_trace(run.final_state, m) for m in range(3)}
    return PulseResult(params, pulse, run, reduced)
