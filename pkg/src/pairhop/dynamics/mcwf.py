"""Monte Carlo wave-function trajectories and their ensemble averages.

Each substep of length ``dt`` does the following, starting from a normalized
``psi``:

1. jump probabilities ``dp_m = dt * gamma_m <psi|L_m^dag L_m|psi>``;
2. one uniform ``eps`` in ``[0, 1)``;
3. if ``sum(dp) > eps`` a second uniform picks channel ``m`` with weight
   ``dp_m / sum(dp)`` (channels in their listed order), ``psi -> L_m psi`` is
   renormalized and the event is stamped at the start of the substep;
4. ``psi -> exp(-i H_nh dt) psi`` with the no-jump generator
   ``H_nh = H - (i/2) sum_m gamma_m L_m^dag L_m``;
5. ``psi`` is renormalized.

Propagating the substep after a jump keeps the jumped branch on schedule.
Skipping it would shift that branch by ``dt`` in time, which scrambles the
phases of fast dressing components when ``dt`` is comparable to ``1/omega``.

The no-jump propagator is an exact matrix exponential computed once per
distinct substep length, so ``dt`` only sets the time resolution of jumps.
"""

from __future__ import annotations

import math
from dataclasses import replace
from typing import Sequence

import numpy as np

from ..errors import ToleranceError
from ..fock import Operator, StateVector
from ..rng import make_generator, trajectory_seed
from .closed import Recorder, propagator
from .results import EnsembleResult, EvolutionSpec, TrajectoryResult

MAX_JUMP_PROBABILITY = 0.1
RENORM_TOL = 1e-10


def no_jump_generator(spec: EvolutionSpec) -> Operator:
    active = [ch for ch in spec.jump_channels if ch.rate > 0]
    if not active:
        return spec.generator
    decay = sum(ch.rate * (ch.operator.dag() @ ch.operator).matrix for ch in active)
    return Operator(spec.space, spec.generator.matrix - 0.5j * decay)


def _substeps(times: np.ndarray, max_step: float | None) -> list[int]:
    if max_step is None:
        return [1] * (times.size - 1)
    return [max(1, math.ceil(dt / max_step - 1e-9)) for dt in np.diff(times)]


class _JumpRates:
    """``gamma_m <psi|L_m^dag L_m|psi>`` for a normalized ``psi``."""

    def __init__(self, spec: EvolutionSpec):
        mats = [ch.rate * (ch.operator.dag() @ ch.operator).matrix for ch in spec.jump_channels]
        self.ops = [ch.operator.matrix for ch in spec.jump_channels]
        self.n = len(mats)
        diag = all(np.count_nonzero(m - np.diag(np.diag(m))) == 0 for m in mats)
        self.diag = np.array([np.real(np.diag(m)) for m in mats]) if diag and mats else None
        self.mats = mats

    def __call__(self, psi: np.ndarray) -> np.ndarray:
        if self.n == 0:
            return np.zeros(0)
        if self.diag is not None:
            return self.diag @ (psi.real**2 + psi.imag**2)
        return np.array([np.vdot(psi, m @ psi).real for m in self.mats])


def mcwf_trajectory(
    spec: EvolutionSpec,
    forced_jumps: Sequence[tuple[float, int]] = (),
) -> TrajectoryResult:
    """Run one quantum trajectory.

    Args:
        spec: Static Hamiltonian, output grid, initial state, loss channels
            and seed. ``spec.max_step`` (the jump-time resolution) splits each
            output interval into equal substeps.
        forced_jumps: ``(time, channel)`` pairs. The first substep starting at
            or after ``time`` applies that channel instead of the random
            decision; its uniform is still consumed so the stream stays aligned.
            ``post_jump_states`` holds the renormalized state right after each
            jump, before the remainder of the substep is propagated.

    Raises:
        ValueError: If a drive is attached or a forced jump annihilates the state.
        ToleranceError: If the summed jump probability of a substep reaches 0.1.
    """
    if spec.drive is not None:
        raise ValueError("trajectories support static Hamiltonians only")
    times = spec.times
    subs = _substeps(times, spec.max_step)
    rng = make_generator(spec.seed)
    eps = rng.random(sum(subs))
    rates = _JumpRates(spec)
    forced = sorted((float(t), int(m)) for t, m in forced_jumps)
    for _, m in forced:
        if not 0 <= m < rates.n:
            raise ValueError(f"forced jump channel {m} out of range")

    h_nh = no_jump_generator(spec)
    cache: dict[float, np.ndarray] = {}
    rec = Recorder(spec.space, times.size, spec.observables)
    psi = spec.initial.amplitudes / spec.initial.norm()
    rec.record(0, psi)
    events: list[tuple[float, int]] = []
    post_jump: list[StateVector] = []
    draw = 0

    for k in range(1, times.size):
        n = subs[k - 1]
        dt = (times[k] - times[k - 1]) / n
        key = round(dt, 12)
        u = cache.get(key)
        if u is None:
            u = cache[key] = propagator(h_nh, dt)
        t = times[k - 1]
        for i in range(n):
            t_next = times[k] if i == n - 1 else t + dt
            dp = dt * rates(psi)
            total = float(dp.sum())
            if total >= MAX_JUMP_PROBABILITY:
                need = dt * MAX_JUMP_PROBABILITY / total
                raise ToleranceError(
                    f"jump probability {total:.3g} per step >= {MAX_JUMP_PROBABILITY}; "
                    f"use max_step < {need:.3g}"
                )
            e = eps[draw]
            draw += 1
            channel = None
            if forced and t >= forced[0][0] - 1e-9 * max(1.0, abs(t)):
                channel = forced.pop(0)[1]
            elif total > e:
                threshold = rng.random() * total
                channel = int(np.searchsorted(np.cumsum(dp), threshold, side="right"))
                channel = min(channel, rates.n - 1)
            if channel is not None:
                # the jump happens at the start of the substep; the rest of it is then propagated
                psi = rates.ops[channel] @ psi
                if not np.any(psi):
                    raise ValueError(f"jump on channel {channel} at t={t:g} annihilates the state")
                psi = psi / np.linalg.norm(psi)
                events.append((float(t), channel))
                post_jump.append(StateVector(spec.space, psi))
            psi = u @ psi
            psi = psi / np.linalg.norm(psi)
            t = t_next
        rec.record(k, psi)

    if np.max(np.abs(rec.norms - 1.0)) > RENORM_TOL:
        raise ToleranceError("trajectory state lost normalization")
    return TrajectoryResult(
        times=times,
        expectations=rec.expectations,
        norms=rec.norms,
        jump_events=tuple(events),
        seed=spec.seed,
        final_state=StateVector(spec.space, psi),
        post_jump_states=tuple(post_jump),
        extra=rec.extra,
    )


def mcwf_ensemble(
    spec: EvolutionSpec,
    n_traj: int,
    master_seed: int | None = None,
) -> EnsembleResult:
    """Average ``n_traj`` independent trajectories.

    Trajectory ``i`` runs with ``trajectory_seed(master_seed, i)`` and the sums
    are accumulated in index order, so the result does not depend on how the
    trajectories are scheduled. ``master_seed`` defaults to ``spec.seed``.
    """
    if n_traj < 1:
        raise ValueError("n_traj must be at least 1")
    master = spec.seed if master_seed is None else int(master_seed)
    seeds = tuple(trajectory_seed(master, i) for i in range(n_traj))
    s1 = s2 = None
    x1: dict[str, np.ndarray] = {}
    x2: dict[str, np.ndarray] = {}
    n_jumps = []
    for seed in seeds:
        tr = mcwf_trajectory(replace(spec, seed=seed))
        n_jumps.append(len(tr.jump_events))
        if s1 is None:
            s1 = np.zeros_like(tr.expectations)
            s2 = np.zeros_like(tr.expectations)
            x1 = {k: np.zeros_like(v) for k, v in tr.extra.items()}
            x2 = {k: np.zeros_like(v) for k, v in tr.extra.items()}
        s1 += tr.expectations
        s2 += tr.expectations**2
        for k, v in tr.extra.items():
            x1[k] += v
            x2[k] += v**2

    def stats(a: np.ndarray, b: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        mean = a / n_traj
        if n_traj == 1:
            return mean, np.zeros_like(mean)
        var = np.maximum(b - n_traj * mean**2, 0.0) / (n_traj - 1)
        return mean, np.sqrt(var / n_traj)

    mean, se = stats(s1, s2)
    extra = {k: stats(x1[k], x2[k]) for k in x1}
    return EnsembleResult(
        times=spec.times,
        mean=mean,
        se=se,
        n_traj=n_traj,
        master_seed=master,
        seeds=seeds,
        n_jumps=tuple(n_jumps),
        extra_mean={k: v[0] for k, v in extra.items()},
        extra_se={k: v[1] for k, v in extra.items()},
    )
