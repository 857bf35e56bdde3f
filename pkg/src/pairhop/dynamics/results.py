"""Inputs and outputs shared by the evolution routines."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from ..fock import DensityMatrix, HilbertSpace, Operator, StateVector
from ..model import Drive, JumpChannel

INITIAL_NORM_TOL = 1e-10


@dataclass(frozen=True)
class EvolutionSpec:
    """Everything a single run needs.

    Args:
        generator: Static Hamiltonian (Hermitian).
        times: Output grid, strictly increasing; the first entry is the
            initial time.
        initial: Normalized initial state.
        jump_channels: Loss channels; empty for closed dynamics.
        seed: Seed of the trajectory's random stream.
        drive: Optional time-dependent drive added to ``generator``.
        max_step: Largest internal step. For trajectories this is the
            jump-time resolution; output intervals are split evenly so that no
            substep exceeds it.
        observables: Extra operators whose expectations are recorded.
    """

    generator: Operator
    times: np.ndarray
    initial: StateVector
    jump_channels: Sequence[JumpChannel] = ()
    seed: int = 0
    drive: Drive | None = None
    max_step: float | None = None
    observables: Mapping[str, Operator] = field(default_factory=dict)

    def __post_init__(self) -> None:
        times = np.asarray(self.times, dtype=float).reshape(-1)
        if times.size < 1:
            raise ValueError("empty time grid")
        if np.any(np.diff(times) <= 0):
            raise ValueError("time grid must be strictly increasing")
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "jump_channels", tuple(self.jump_channels))
        space = self.generator.space
        if self.initial.space != space:
            raise ValueError("initial state and generator live on different spaces")
        if abs(self.initial.norm() - 1.0) > INITIAL_NORM_TOL:
            raise ValueError(f"initial state is not normalized (norm {self.initial.norm():.12g})")
        for ch in self.jump_channels:
            if ch.operator.space != space:
                raise ValueError("jump operator lives on a different space")
        if self.drive is not None and self.drive.lowering.space != space:
            raise ValueError("drive lives on a different space")
        for name, op in self.observables.items():
            if op.space != space:
                raise ValueError(f"observable {name!r} lives on a different space")
        if self.max_step is not None and not self.max_step > 0:
            raise ValueError("max_step must be positive")

    @property
    def space(self) -> HilbertSpace:
        return self.generator.space


@dataclass(frozen=True)
class TrajectoryResult:
    """One realization (or the deterministic closed run).

    ``expectations[k, m]`` is ``<n_m>`` at ``times[k]``; ``norms[k]`` is the norm
    of the recorded state. ``jump_events`` holds ``(time, channel index)``.
    """

    times: np.ndarray
    expectations: np.ndarray
    norms: np.ndarray
    jump_events: tuple[tuple[float, int], ...]
    seed: int | None
    final_state: StateVector
    post_jump_states: tuple[StateVector, ...] = ()
    extra: Mapping[str, np.ndarray] = field(default_factory=dict)

    def mode(self, m: int) -> np.ndarray:
        return self.expectations[:, m]

    @property
    def na(self) -> np.ndarray:
        return self.expectations[:, 0]

    @property
    def nb(self) -> np.ndarray:
        return self.expectations[:, 1]

    @property
    def nc(self) -> np.ndarray:
        return self.expectations[:, 2]


@dataclass(frozen=True)
class EnsembleResult:
    """Trajectory averages with standard errors of the mean."""

    times: np.ndarray
    mean: np.ndarray
    se: np.ndarray
    n_traj: int
    master_seed: int
    seeds: tuple[int, ...]
    n_jumps: tuple[int, ...] = ()
    extra_mean: Mapping[str, np.ndarray] = field(default_factory=dict)
    extra_se: Mapping[str, np.ndarray] = field(default_factory=dict)


@dataclass(frozen=True)
class LindbladResult:
    """Density-matrix trajectory of the master equation."""

    space: HilbertSpace
    times: np.ndarray
    states: np.ndarray
    min_eigenvalue: float = 0.0

    def __len__(self) -> int:
        return self.times.size

    def __getitem__(self, k: int) -> DensityMatrix:
        return DensityMatrix(self.space, self.states[k])

    def expect(self, op: Operator) -> np.ndarray:
        tr = np.einsum("tii->t", self.states)
        return np.einsum("ij,tji->t", op.matrix, self.states) / tr

    def number_expectations(self) -> np.ndarray:
        occ = self.space.occupation_table().astype(float)
        pops = np.real(np.einsum("tii->ti", self.states))
        return (pops @ occ) / pops.sum(axis=1, keepdims=True)

    def traces(self) -> np.ndarray:
        return np.real(np.einsum("tii->t", self.states))
