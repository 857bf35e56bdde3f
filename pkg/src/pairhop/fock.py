"""Truncated multimode Fock-space algebra.

Basis states ``|n_1, ..., n_M>`` are indexed row-major with the first mode
slowest, i.e. ``idx = sum_m n_m * prod_{m' > m} N_{m'}``. For the
optomechanical model the mode order is always ``(a, b, c)``: left cavity,
mirror, right cavity.

Everything here is dense; the intended dimensions are a few hundred at most.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from numbers import Number
from typing import Iterable, Sequence

import numpy as np

__all__ = [
    "HilbertSpace",
    "Operator",
    "StateVector",
    "DensityMatrix",
    "destroy",
    "create",
    "number",
    "parity",
    "identity",
    "embed",
    "fock_state",
    "commutator",
    "anticommutator",
    "expectation",
    "partial_trace",
]

HERMITIAN_RTOL = 1e-12


def _frozen(array: np.ndarray) -> np.ndarray:
    array.setflags(write=False)
    return array


@dataclass(frozen=True)
class HilbertSpace:
    """Tensor product of truncated bosonic modes.

    Args:
        cutoffs: Fock dimension of every mode, ``(N_a, N_b, N_c)`` for the
            three-mode model. A cutoff ``N`` keeps occupations ``0..N-1``.
    """

    cutoffs: tuple[int, ...]

    def __post_init__(self) -> None:
        cutoffs = tuple(int(n) for n in self.cutoffs)
        if not cutoffs:
            raise ValueError("a Hilbert space needs at least one mode")
        if any(n < 1 for n in cutoffs):
            raise ValueError(f"cutoffs must be positive, got {cutoffs}")
        object.__setattr__(self, "cutoffs", cutoffs)

    @property
    def n_modes(self) -> int:
        return len(self.cutoffs)

    @cached_property
    def dim(self) -> int:
        return int(np.prod(self.cutoffs))

    @cached_property
    def _strides(self) -> tuple[int, ...]:
        strides = []
        acc = 1
        for n in reversed(self.cutoffs):
            strides.append(acc)
            acc *= n
        return tuple(reversed(strides))

    def check_mode(self, mode: int) -> int:
        if not 0 <= mode < self.n_modes:
            raise IndexError(f"mode {mode} out of range for {self.n_modes} modes")
        return mode

    def index(self, occupations: Sequence[int]) -> int:
        """Row-major basis index of an occupation tuple."""
        occ = tuple(int(n) for n in occupations)
        if len(occ) != self.n_modes:
            raise ValueError(f"expected {self.n_modes} occupations, got {len(occ)}")
        for n, cut in zip(occ, self.cutoffs):
            if not 0 <= n < cut:
                raise ValueError(f"occupation {occ} exceeds cutoffs {self.cutoffs}")
        return sum(n * s for n, s in zip(occ, self._strides))

    def occupations(self, index: int) -> tuple[int, ...]:
        """Inverse of :meth:`index`."""
        if not 0 <= index < self.dim:
            raise IndexError(f"basis index {index} out of range for dim {self.dim}")
        return tuple(int(n) for n in np.unravel_index(index, self.cutoffs))

    def occupation_table(self) -> np.ndarray:
        """``(dim, n_modes)`` integer array of the occupations of every basis state."""
        grids = np.indices(self.cutoffs).reshape(self.n_modes, -1)
        return grids.T.copy()

    def interior(self, margins: Sequence[int]) -> np.ndarray:
        """Indices of states with ``n_m <= N_m - 1 - margins[m]`` in every mode.

        An operator product that raises mode ``m`` at most ``margins[m]`` times
        never touches the truncation edge from these states, so truncated and
        untruncated algebra agree there.
        """
        if len(margins) != self.n_modes:
            raise ValueError(f"need {self.n_modes} margins, got {len(margins)}")
        occ = self.occupation_table()
        limit = np.asarray(self.cutoffs) - 1 - np.asarray(margins)
        return np.flatnonzero(np.all(occ <= limit, axis=1))


@dataclass(frozen=True, eq=False)
class Operator:
    """Dense operator on a :class:`HilbertSpace`.

    ``hermitian`` is a promise checked on construction: the matrix must equal
    its adjoint to ``1e-12`` relative to its largest entry.
    """

    space: HilbertSpace
    matrix: np.ndarray
    hermitian: bool = False

    def __post_init__(self) -> None:
        m = np.array(self.matrix, dtype=complex)
        d = self.space.dim
        if m.shape != (d, d):
            raise ValueError(f"operator shape {m.shape} does not match space dim {d}")
        if self.hermitian:
            scale = np.abs(m).max(initial=0.0)
            if np.abs(m - m.conj().T).max(initial=0.0) > HERMITIAN_RTOL * scale:
                raise ValueError("matrix flagged hermitian is not self-adjoint")
        object.__setattr__(self, "matrix", _frozen(m))

    def _check(self, other: Operator) -> None:
        if other.space != self.space:
            raise ValueError(f"space mismatch: {self.space.cutoffs} vs {other.space.cutoffs}")

    def dag(self) -> Operator:
        return Operator(self.space, self.matrix.conj().T, self.hermitian)

    def __add__(self, other: Operator) -> Operator:
        self._check(other)
        return Operator(self.space, self.matrix + other.matrix, self.hermitian and other.hermitian)

    def __sub__(self, other: Operator) -> Operator:
        self._check(other)
        return Operator(self.space, self.matrix - other.matrix, self.hermitian and other.hermitian)

    def __neg__(self) -> Operator:
        return Operator(self.space, -self.matrix, self.hermitian)

    def __mul__(self, scalar: Number) -> Operator:
        if isinstance(scalar, (Operator, StateVector)):
            return NotImplemented
        s = complex(scalar)
        return Operator(self.space, s * self.matrix, self.hermitian and s.imag == 0.0)

    __rmul__ = __mul__

    def __truediv__(self, scalar: Number) -> Operator:
        return self * (1.0 / complex(scalar))

    def __matmul__(self, other):
        if isinstance(other, Operator):
            self._check(other)
            return Operator(self.space, self.matrix @ other.matrix)
        if isinstance(other, StateVector):
            if other.space != self.space:
                raise ValueError("operator and state live on different spaces")
            return StateVector(self.space, self.matrix @ other.amplitudes)
        return NotImplemented

    def __pow__(self, n: int) -> Operator:
        if n < 0:
            raise ValueError("negative operator powers are not supported")
        return Operator(self.space, np.linalg.matrix_power(self.matrix, n), self.hermitian)

    def norm(self) -> float:
        """Spectral norm."""
        return float(np.linalg.norm(self.matrix, 2))

    def element(self, bra: Sequence[int], ket: Sequence[int]) -> complex:
        """Matrix element ``<bra|O|ket>`` between two Fock basis states."""
        return complex(self.matrix[self.space.index(bra), self.space.index(ket)])

    def hermitian_residual(self) -> float:
        return float(np.abs(self.matrix - self.matrix.conj().T).max(initial=0.0))


@dataclass(frozen=True, eq=False)
class StateVector:
    """Pure state (not necessarily normalized) on a :class:`HilbertSpace`."""

    space: HilbertSpace
    amplitudes: np.ndarray

    def __post_init__(self) -> None:
        v = np.array(self.amplitudes, dtype=complex).reshape(-1)
        if v.shape != (self.space.dim,):
            raise ValueError(f"state length {v.size} does not match space dim {self.space.dim}")
        if not np.all(np.isfinite(v)):
            raise ValueError("state has non-finite amplitudes")
        object.__setattr__(self, "amplitudes", _frozen(v))

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def normalized(self) -> StateVector:
        n = self.norm()
        if n == 0.0:
            raise ValueError("cannot normalize the zero vector")
        return StateVector(self.space, self.amplitudes / n)

    def __add__(self, other: StateVector) -> StateVector:
        if other.space != self.space:
            raise ValueError("states live on different spaces")
        return StateVector(self.space, self.amplitudes + other.amplitudes)

    def __sub__(self, other: StateVector) -> StateVector:
        return self + (-1.0) * other

    def __mul__(self, scalar: Number) -> StateVector:
        return StateVector(self.space, complex(scalar) * self.amplitudes)

    __rmul__ = __mul__

    def __truediv__(self, scalar: Number) -> StateVector:
        return self * (1.0 / complex(scalar))

    def overlap(self, other: StateVector) -> complex:
        """``<self|other>``."""
        return complex(np.vdot(self.amplitudes, other.amplitudes))

    def fidelity(self, other: StateVector) -> float:
        """``|<self|other>|^2`` for the normalized versions of both states."""
        a, b = self.normalized(), other.normalized()
        return abs(a.overlap(b)) ** 2

    def projector(self) -> DensityMatrix:
        psi = self.normalized().amplitudes
        return DensityMatrix(self.space, np.outer(psi, psi.conj()))


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """Mixed state on a :class:`HilbertSpace`."""

    space: HilbertSpace
    matrix: np.ndarray

    def __post_init__(self) -> None:
        m = np.array(self.matrix, dtype=complex)
        d = self.space.dim
        if m.shape != (d, d):
            raise ValueError(f"density matrix shape {m.shape} does not match dim {d}")
        object.__setattr__(self, "matrix", _frozen(m))

    def trace(self) -> complex:
        return complex(np.trace(self.matrix))

    def purity(self) -> float:
        m = self.matrix
        return float(np.real(np.trace(m @ m)) / abs(np.trace(m)) ** 2)

    def populations(self) -> np.ndarray:
        return np.real(np.diag(self.matrix)).copy()

    def eigenvalues(self) -> np.ndarray:
        h = 0.5 * (self.matrix + self.matrix.conj().T)
        return np.linalg.eigvalsh(h)


def _single_mode_destroy(n: int) -> np.ndarray:
    return np.diag(np.sqrt(np.arange(1, n, dtype=float)), 1).astype(complex)


def embed(space: HilbertSpace, mode: int, single: np.ndarray) -> np.ndarray:
    """Kronecker-embed a single-mode matrix, identity on every other mode."""
    space.check_mode(mode)
    n = space.cutoffs[mode]
    single = np.asarray(single, dtype=complex)
    if single.shape != (n, n):
        raise ValueError(f"single-mode matrix must be {n}x{n}, got {single.shape}")
    left = int(np.prod(space.cutoffs[:mode]))
    right = int(np.prod(space.cutoffs[mode + 1:]))
    return np.kron(np.kron(np.eye(left), single), np.eye(right))


def destroy(space: HilbertSpace, mode: int) -> Operator:
    """Truncated annihilation operator of ``mode``: ``a|n> = sqrt(n)|n-1>``."""
    space.check_mode(mode)
    return Operator(space, embed(space, mode, _single_mode_destroy(space.cutoffs[mode])))


def create(space: HilbertSpace, mode: int) -> Operator:
    return destroy(space, mode).dag()


def number(space: HilbertSpace, mode: int) -> Operator:
    space.check_mode(mode)
    n = np.diag(np.arange(space.cutoffs[mode], dtype=float))
    return Operator(space, embed(space, mode, n), hermitian=True)


def parity(space: HilbertSpace, mode: int) -> Operator:
    """Photon-number parity ``(-1)^n`` of one mode."""
    space.check_mode(mode)
    p = np.diag((-1.0) ** np.arange(space.cutoffs[mode]))
    return Operator(space, embed(space, mode, p), hermitian=True)


def identity(space: HilbertSpace) -> Operator:
    return Operator(space, np.eye(space.dim), hermitian=True)


def fock_state(space: HilbertSpace, occupations: Sequence[int]) -> StateVector:
    v = np.zeros(space.dim, dtype=complex)
    v[space.index(occupations)] = 1.0
    return StateVector(space, v)


def commutator(a: Operator, b: Operator) -> Operator:
    return a @ b - b @ a


def anticommutator(a: Operator, b: Operator) -> Operator:
    return a @ b + b @ a


def expectation(op: Operator, state: StateVector | DensityMatrix) -> complex:
    """Expectation value, renormalized by the state norm (or trace).

    For a pure state this is ``<psi|O|psi> / <psi|psi>``, which is the natural
    convention for wave functions propagated by a non-Hermitian generator.
    """
    if op.space != state.space:
        raise ValueError("operator and state live on different spaces")
    if isinstance(state, DensityMatrix):
        return complex(np.trace(op.matrix @ state.matrix) / np.trace(state.matrix))
    psi = state.amplitudes
    norm2 = np.vdot(psi, psi).real
    if norm2 == 0.0:
        raise ValueError("expectation value of the zero vector")
    return complex(np.vdot(psi, op.matrix @ psi) / norm2)


def partial_trace(state: StateVector | DensityMatrix, keep_mode: int | Iterable[int]) -> DensityMatrix:
    """Reduced density matrix on the kept mode(s).

    Pure states are normalized first; density matrices keep their trace.
    """
    space = state.space
    keep = [keep_mode] if isinstance(keep_mode, (int, np.integer)) else list(keep_mode)
    if not keep:
        raise ValueError("keep at least one mode")
    for m in keep:
        space.check_mode(m)
    keep = sorted(set(keep))
    dims = space.cutoffs
    m_count = space.n_modes
    letters = "abcdefghijklmnopqrstuvwxyz"
    row = list(letters[:m_count])
    col = list(letters[m_count:2 * m_count])
    for m in range(m_count):
        if m not in keep:
            col[m] = row[m]
    out = "".join(row[m] for m in keep) + "".join(col[m] for m in keep)
    kept_dims = tuple(dims[m] for m in keep)
    kept_dim = int(np.prod(kept_dims))

    if isinstance(state, StateVector):
        psi = state.normalized().amplitudes.reshape(dims)
        spec = "".join(row) + "," + "".join(col) + "->" + out
        reduced = np.einsum(spec, psi, psi.conj())
    else:
        rho = state.matrix.reshape(dims + dims)
        spec = "".join(row) + "".join(col) + "->" + out
        reduced = np.einsum(spec, rho)
    return DensityMatrix(HilbertSpace(kept_dims), reduced.reshape(kept_dim, kept_dim))
