"""Dense Lindblad master equation, used as the reference for trajectory averages."""

from __future__ import annotations

from typing import Sequence

import numpy as np
import scipy.linalg

from ..errors import ToleranceError
from ..fock import DensityMatrix, Operator, StateVector
from ..model import JumpChannel
from .results import LindbladResult

MAX_DIM = 64
TRACE_TOL = 1e-8
POSITIVITY_TOL = 1e-6


def liouvillian(hamiltonian: Operator, jump_channels: Sequence[JumpChannel]) -> np.ndarray:
    """Superoperator acting on row-major vectorized density matrices.

    Uses ``vec(A rho B) = (A kron B^T) vec(rho)``.
    """
    h = hamiltonian.matrix
    eye = np.eye(h.shape[0])
    out = -1j * (np.kron(h, eye) - np.kron(eye, h.T))
    for ch in jump_channels:
        if ch.rate == 0:
            continue
        l = ch.operator.matrix
        ldl = l.conj().T @ l
        out += ch.rate * (np.kron(l, l.conj()) - 0.5 * np.kron(ldl, eye) - 0.5 * np.kron(eye, ldl.T))
    return out


def lindblad_evolve(
    hamiltonian: Operator,
    jump_channels: Sequence[JumpChannel],
    rho0: DensityMatrix | StateVector,
    times: np.ndarray,
    max_dim: int = MAX_DIM,
) -> LindbladResult:
    """Integrate ``d rho/dt = -i[H, rho] + sum_m gamma_m D[L_m] rho`` on ``times``.

    Each output interval is bridged by the exact exponential of the
    Liouvillian, so the result carries no time-step error.

    Raises:
        ValueError: If the Hilbert dimension exceeds ``max_dim``.
        ToleranceError: If the trace drifts by more than ``1e-8`` or an
            eigenvalue drops below ``-1e-6``.
    """
    space = hamiltonian.space
    d = space.dim
    if d > max_dim:
        raise ValueError(f"dimension {d} too large for the dense master-equation oracle (max {max_dim})")
    if isinstance(rho0, StateVector):
        rho0 = rho0.projector()
    if rho0.space != space:
        raise ValueError("initial state and Hamiltonian live on different spaces")
    times = np.asarray(times, dtype=float)
    if times.size < 1 or np.any(np.diff(times) <= 0):
        raise ValueError("time grid must be non-empty and strictly increasing")

    lv = liouvillian(hamiltonian, jump_channels)
    cache: dict[float, np.ndarray] = {}
    states = np.empty((times.size, d, d), dtype=complex)
    r = rho0.matrix.reshape(-1).copy()
    states[0] = rho0.matrix
    for k in range(1, times.size):
        dt = times[k] - times[k - 1]
        key = round(dt, 12)
        if key not in cache:
            cache[key] = scipy.linalg.expm(lv * dt)
        r = cache[key] @ r
        states[k] = r.reshape(d, d)

    traces = np.real(np.einsum("tii->t", states))
    drift = float(np.max(np.abs(traces - traces[0])))
    if drift > TRACE_TOL:
        raise ToleranceError(f"master equation trace drift {drift:.3g}")
    herm = 0.5 * (states + np.conj(np.swapaxes(states, 1, 2)))
    min_eig = float(np.linalg.eigvalsh(herm).min())
    if min_eig < -POSITIVITY_TOL:
        raise ToleranceError(f"density matrix lost positivity (eigenvalue {min_eig:.3g})")
    return LindbladResult(space, times, states, min_eigenvalue=min_eig)
