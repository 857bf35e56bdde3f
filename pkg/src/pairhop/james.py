"""Second-order effective Hamiltonians from a harmonic decomposition.

The interaction-picture Hamiltonian is written as a sum of harmonics

    H_I(t) = sum_k [h_k exp(+i w_k t) + h_k^dag exp(-i w_k t)],   w_k > 0,

where each ``h_k`` *raises* the bare energy by ``w_k``. The time-averaged
second-order generator is

    H2 = sum_{j,k} (1 / w_k) [h_j h_k^dag - h_j^dag h_k],

restricted to pairs whose net frequency ``w_j - w_k`` vanishes (rotating-wave
approximation). For pairwise distinct frequencies only the diagonal pairs
survive and ``H2 = sum_k [h_k, h_k^dag] / w_k``.

A two-level check of the sign: ``H_0 = w|1><1|`` and coupling ``v(|0><1| + h.c.)``
give ``h = v|1><0|`` and ``H2 = (v**2 / w)(|1><1| - |0><0|)``, the familiar
level repulsion.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .fock import Operator

__all__ = ["HarmonicTerm", "second_order_effective", "default_freq_tol"]

# gaps below this (relative to the largest frequency) count as exact float ties
_FLOAT_TIE = 64 * np.finfo(float).eps


@dataclass(frozen=True)
class HarmonicTerm:
    """One raising component ``h`` of the interaction Hamiltonian with frequency ``omega``."""

    h: Operator
    omega: float

    def __post_init__(self) -> None:
        if not self.omega > 0.0:
            raise ValueError(f"harmonic frequencies must be positive, got {self.omega}")


def default_freq_tol(terms: Sequence[HarmonicTerm]) -> float:
    return 1e-9 * max(t.omega for t in terms)


def _check_rwa_tolerance(omegas: np.ndarray, freq_tol: float) -> None:
    scale = omegas.max()
    gaps = np.abs(omegas[:, None] - omegas[None, :])
    real_gaps = gaps[gaps > _FLOAT_TIE * scale]
    if real_gaps.size and freq_tol >= real_gaps.min():
        raise ValueError(
            f"freq_tol={freq_tol:g} reaches the smallest nonzero frequency gap "
            f"{real_gaps.min():g}; the rotating-wave selection is ambiguous"
        )


def second_order_effective(
    terms: Sequence[HarmonicTerm],
    freq_tol: float | None = None,
) -> Operator:
    """Static second-order effective Hamiltonian of a list of harmonics.

    Args:
        terms: Raising components and their (positive) frequencies.
        freq_tol: Two frequencies closer than this are treated as equal. The
            default is ``1e-9 * max(omega)``.

    Returns:
        The Hermitian operator ``H2``. Cross terms between distinct harmonics
        of equal frequency are included.

    Raises:
        ValueError: On an empty term list, mismatched spaces, a negative
            tolerance, or a tolerance that swallows a genuine frequency gap.
    """
    if not terms:
        raise ValueError("need at least one harmonic term")
    space = terms[0].h.space
    for term in terms[1:]:
        if term.h.space != space:
            raise ValueError("harmonic terms act on different spaces")
    omegas = np.array([t.omega for t in terms], dtype=float)
    if freq_tol is None:
        freq_tol = default_freq_tol(terms)
    if freq_tol < 0:
        raise ValueError("freq_tol must be non-negative")
    _check_rwa_tolerance(omegas, freq_tol)

    hs = [t.h.matrix for t in terms]
    hds = [h.conj().T for h in hs]
    out = np.zeros((space.dim, space.dim), dtype=complex)
    for j, (hj, hjd) in enumerate(zip(hs, hds)):
        for k, (hk, hkd) in enumerate(zip(hs, hds)):
            if abs(omegas[j] - omegas[k]) > freq_tol:
                continue
            out += (hj @ hkd - hjd @ hk) / omegas[k]
    # tolerance-matched pairs with slightly different 1/w_k break exact self-adjointness
    out = 0.5 * (out + out.conj().T)
    return Operator(space, out, hermitian=True)
