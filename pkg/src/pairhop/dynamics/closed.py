"""Closed and no-jump (non-Hermitian) evolution of pure states."""

from __future__ import annotations

import math
from typing import Mapping

import numpy as np
import scipy.linalg

from ..errors import ToleranceError
from ..fock import HilbertSpace, Operator, StateVector
from .results import EvolutionSpec, TrajectoryResult

NORM_TOL = 1e-8
_CHUNK = 2048


def propagator(generator: Operator, dt: float) -> np.ndarray:
    """``exp(-i G dt)``; spectral for Hermitian ``G``, scaling-and-squaring otherwise."""
    if generator.hermitian:
        evals, evecs = np.linalg.eigh(generator.matrix)
        return (evecs * np.exp(-1j * evals * dt)) @ evecs.conj().T
    return scipy.linalg.expm(-1j * dt * generator.matrix)


class Recorder:
    """Collects renormalized number expectations and extra observables."""

    def __init__(self, space: HilbertSpace, n_times: int, observables: Mapping[str, Operator]):
        self.occ = space.occupation_table().astype(float)
        self.expectations = np.empty((n_times, space.n_modes))
        self.norms = np.empty(n_times)
        self.obs = {name: op.matrix for name, op in observables.items()}
        self.extra = {name: np.empty(n_times) for name in observables}

    def record(self, k: int, psi: np.ndarray) -> None:
        probs = psi.real**2 + psi.imag**2
        norm2 = probs.sum()
        self.norms[k] = math.sqrt(norm2)
        self.expectations[k] = (probs @ self.occ) / norm2
        for name, m in self.obs.items():
            self.extra[name][k] = np.vdot(psi, m @ psi).real / norm2

    def record_block(self, k0: int, states: np.ndarray) -> None:
        probs = states.real**2 + states.imag**2
        norm2 = probs.sum(axis=1)
        k1 = k0 + states.shape[0]
        self.norms[k0:k1] = np.sqrt(norm2)
        self.expectations[k0:k1] = (probs @ self.occ) / norm2[:, None]
        for name, m in self.obs.items():
            vals = np.einsum("ti,ti->t", states.conj(), states @ m.T).real
            self.extra[name][k0:k1] = vals / norm2


def _check_norm(norms: np.ndarray, what: str) -> None:
    drift = float(np.max(np.abs(norms - 1.0)))
    if drift > NORM_TOL:
        raise ToleranceError(f"{what}: norm drift {drift:.3g} exceeds {NORM_TOL:g}; reduce the step size")


def _default_max_step(spec: EvolutionSpec) -> float:
    pulse = spec.drive.pulse
    return min(0.01 / max(pulse.carrier, 1e-300), pulse.width / 100.0)


def evolve_closed(spec: EvolutionSpec) -> TrajectoryResult:
    """Schrödinger evolution under a Hermitian generator plus an optional drive.

    Static problems are propagated exactly through the spectral decomposition.
    With a drive, the state is carried in the interaction picture of the
    static part and the drive is integrated with fixed-step classical RK4;
    stretches where the pulse envelope is below ``1e-18`` of its peak are
    propagated exactly.

    Raises:
        ValueError: If the generator is not Hermitian or jump channels are given.
        ToleranceError: If the norm drifts by more than ``1e-8``.
    """
    if not spec.generator.hermitian:
        raise ValueError("closed evolution needs a Hermitian generator")
    if any(ch.rate > 0 for ch in spec.jump_channels):
        raise ValueError("closed evolution does not take jump channels")
    times = spec.times
    rec = Recorder(spec.space, times.size, spec.observables)
    evals, evecs = np.linalg.eigh(spec.generator.matrix)
    coeffs = evecs.conj().T @ spec.initial.amplitudes
    t_ref = times[0]

    if spec.drive is None:
        for k0 in range(0, times.size, _CHUNK):
            s = times[k0:k0 + _CHUNK] - t_ref
            block = (np.exp(-1j * np.outer(s, evals)) * coeffs) @ evecs.T
            rec.record_block(k0, block)
        final = evecs @ (np.exp(-1j * evals * (times[-1] - t_ref)) * coeffs)
    else:
        final = _evolve_driven(spec, evals, evecs, coeffs, rec)

    _check_norm(rec.norms, "closed evolution")
    return TrajectoryResult(
        times=times,
        expectations=rec.expectations,
        norms=rec.norms,
        jump_events=(),
        seed=None,
        final_state=StateVector(spec.space, final),
        extra=rec.extra,
    )


def _evolve_driven(spec, evals, evecs, coeffs, rec) -> np.ndarray:
    drive = spec.drive
    max_step = spec.max_step or _default_max_step(spec)
    ops = [evecs.conj().T @ op.matrix @ evecs for op in drive.operators]
    lo, hi = drive.support()
    times = spec.times
    t_ref = times[0]

    def rhs(t: float, c: np.ndarray) -> np.ndarray:
        p = np.exp(1j * evals * (t - t_ref))
        x = c * p.conj()
        f0, f1 = drive.coefficients(t)
        return -1j * p * (f0 * (ops[0] @ x) + f1 * (ops[1] @ x))

    c = coeffs.copy()

    def lab(t: float) -> np.ndarray:
        return evecs @ (np.exp(-1j * evals * (t - t_ref)) * c)

    rec.record(0, lab(times[0]))
    for k in range(1, times.size):
        a, b = max(times[k - 1], lo), min(times[k], hi)
        if b > a:
            n = max(1, math.ceil((b - a) / max_step - 1e-9))
            h = (b - a) / n
            t = a
            for _ in range(n):
                k1 = rhs(t, c)
                k2 = rhs(t + 0.5 * h, c + 0.5 * h * k1)
                k3 = rhs(t + 0.5 * h, c + 0.5 * h * k2)
                k4 = rhs(t + h, c + h * k3)
                c = c + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
                t += h
        rec.record(k, lab(times[k]))
    return lab(times[-1])


def evolve_nonhermitian(
    generator: Operator,
    times: np.ndarray,
    initial: StateVector,
    observables: Mapping[str, Operator] | None = None,
) -> TrajectoryResult:
    """No-jump evolution ``exp(-i G t)`` without renormalization.

    ``norms`` holds the decaying norm; expectations are still renormalized.
    """
    times = np.asarray(times, dtype=float)
    if times.size < 1 or np.any(np.diff(times) <= 0):
        raise ValueError("time grid must be non-empty and strictly increasing")
    if initial.space != generator.space:
        raise ValueError("initial state and generator live on different spaces")
    rec = Recorder(generator.space, times.size, observables or {})
    cache: dict[float, np.ndarray] = {}
    psi = initial.amplitudes.copy()
    rec.record(0, psi)
    for k in range(1, times.size):
        dt = times[k] - times[k - 1]
        key = round(dt, 12)
        if key not in cache:
            cache[key] = propagator(generator, dt)
        psi = cache[key] @ psi
        rec.record(k, psi)
    return TrajectoryResult(
        times=times,
        expectations=rec.expectations,
        norms=rec.norms,
        jump_events=(),
        seed=None,
        final_state=StateVector(generator.space, psi),
        extra=rec.extra,
    )
