"""Level scans and the photon-pair avoided crossing.

The cavity ratio ``r = w_a / w_c`` is swept with ``w_b``, ``w_c`` and ``g``
held fixed. The pair of eigenstates that carries the states ``|2,0,0>`` and
``|0,0,2>`` repels near ``r = 1``; the size of that gap measures the
photon-pair exchange strength.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import PhysicsError
from .fock import Operator
from .model import SystemParams, build_full_hamiltonian

__all__ = [
    "SpectrumScan",
    "CrossingReport",
    "eigendecompose_hermitian",
    "pair_weights",
    "tracked_pair",
    "scan_levels",
    "find_avoided_crossing",
    "golden_section_minimize",
    "PAIR_STATES",
]

PAIR_STATES = ((2, 0, 0), (0, 0, 2))
DEGENERACY_RTOL = 1e-10


def eigendecompose_hermitian(op: Operator) -> tuple[np.ndarray, np.ndarray]:
    """Ascending eigenvalues and orthonormal eigenvectors (as columns).

    Raises:
        ValueError: If ``op`` is not flagged Hermitian.
    """
    if not op.hermitian:
        raise ValueError("eigendecompose_hermitian needs an operator flagged hermitian")
    return np.linalg.eigh(op.matrix)


def _symmetrize_degenerate(evals: np.ndarray, evecs: np.ndarray, targets: np.ndarray) -> np.ndarray:
    """Rotate every degenerate eigenspace so it starts with projections of ``targets``.

    Makes the eigenvectors at exact degeneracies (e.g. ``g = 0`` and ``r = 1``)
    deterministic: the pair combinations come first, the complement follows.
    """
    evecs = evecs.copy()
    scale = max(1.0, float(np.abs(evals).max()))
    start = 0
    n = evals.size
    while start < n:
        stop = start + 1
        while stop < n and evals[stop] - evals[start] <= DEGENERACY_RTOL * scale:
            stop += 1
        if stop - start > 1:
            block = evecs[:, start:stop]
            proj = block @ (block.conj().T @ targets)
            basis = []
            for v in proj.T:
                for u in basis:
                    v = v - u * np.vdot(u, v)
                nv = np.linalg.norm(v)
                if nv > 1e-8:
                    basis.append(v / nv)
            if basis:
                fixed = np.column_stack(basis)
                rest = block - fixed @ (fixed.conj().T @ block)
                q, r = np.linalg.qr(rest)
                keep = np.abs(np.diag(r)) > 1e-8
                extra = q[:, keep][:, : block.shape[1] - fixed.shape[1]]
                evecs[:, start:stop] = np.column_stack([fixed, extra])
        start = stop
    return evecs


def pair_weights(params: SystemParams, evecs: np.ndarray) -> np.ndarray:
    """``(2, n)`` array of ``|<2,0,0|v>|^2`` and ``|<0,0,2|v>|^2`` for every eigenvector."""
    space = params.space
    rows = [space.index(s) for s in PAIR_STATES]
    return np.abs(evecs[rows, :]) ** 2


def _pair_targets(params: SystemParams) -> np.ndarray:
    space = params.space
    i, j = (space.index(s) for s in PAIR_STATES)
    t = np.zeros((space.dim, 2), dtype=complex)
    t[i, 0] = t[j, 0] = 1.0 / math.sqrt(2.0)
    t[i, 1], t[j, 1] = 1.0 / math.sqrt(2.0), -1.0 / math.sqrt(2.0)
    return t


def _diagonalize(params: SystemParams) -> tuple[np.ndarray, np.ndarray]:
    evals, evecs = eigendecompose_hermitian(build_full_hamiltonian(params))
    return evals, _symmetrize_degenerate(evals, evecs, _pair_targets(params))


def tracked_pair(params: SystemParams, evecs: np.ndarray) -> tuple[int, int]:
    """Indices (ascending) of the two eigenvectors with the largest pair weight."""
    combined = pair_weights(params, evecs).sum(axis=0)
    top = np.argsort(combined, kind="stable")[-2:]
    return tuple(sorted(int(k) for k in top))


@dataclass(frozen=True)
class SpectrumScan:
    """Lowest levels along a sweep of ``omega_a / omega_c``.

    ``tracked_overlaps[p, k, s]`` is the weight of tracked level ``k`` on
    ``PAIR_STATES[s]`` at grid point ``p``; ``tracked_energies[p, k]`` and
    ``gap`` follow the same two levels across the scan.
    """

    parameter: str
    grid: np.ndarray
    levels: np.ndarray
    tracked_energies: np.ndarray
    tracked_overlaps: np.ndarray

    @property
    def gap(self) -> np.ndarray:
        return np.abs(self.tracked_energies[:, 1] - self.tracked_energies[:, 0])

    @property
    def n_levels(self) -> int:
        return self.levels.shape[1]


@dataclass(frozen=True)
class CrossingReport:
    """Minimum of the pair gap.

    ``hybrid_weights[k, s]`` is the weight of gap eigenvector ``k`` (lower
    energy first) on ``PAIR_STATES[s]``.
    """

    location: float
    gap: float
    energies: tuple[float, float]
    hybrid_weights: np.ndarray
    evaluations: int

    @property
    def combined_weights(self) -> np.ndarray:
        return self.hybrid_weights.sum(axis=1)


def scan_levels(
    params: SystemParams,
    ratio_range: Sequence[float] = (0.95, 1.05),
    n_points: int = 201,
    n_levels: int = 12,
) -> SpectrumScan:
    """Diagonalize the full Hamiltonian on a uniform grid of cavity ratios.

    The pair is identified at the first grid point by its weight on
    ``|2,0,0>`` and ``|0,0,2>`` and then followed by maximal overlap with the
    previous point, so sorted-index permutations at crossings do not confuse it.
    """
    lo, hi = (float(x) for x in ratio_range)
    if not lo < hi:
        raise ValueError(f"empty ratio range [{lo}, {hi}]")
    if n_points < 2:
        raise ValueError("need at least two scan points")
    dim = params.space.dim
    if not 1 <= n_levels <= dim:
        raise ValueError(f"n_levels must be in [1, {dim}]")
    grid = np.linspace(lo, hi, n_points)
    points = [params.with_ratio(r) for r in grid]

    levels = np.empty((n_points, n_levels))
    tracked_e = np.empty((n_points, 2))
    tracked_w = np.empty((n_points, 2, 2))
    prev = None
    for p, point in enumerate(points):
        evals, evecs = _diagonalize(point)
        levels[p] = evals[:n_levels]
        if prev is None:
            idx = list(tracked_pair(point, evecs))
        else:
            overlap = np.abs(prev.conj().T @ evecs) ** 2
            idx = []
            for row in overlap:
                row = row.copy()
                row[idx] = -1.0
                idx.append(int(np.argmax(row)))
        prev = evecs[:, idx]
        tracked_e[p] = evals[idx]
        tracked_w[p] = pair_weights(point, evecs[:, idx]).T
    return SpectrumScan("omega_a/omega_c", grid, levels, tracked_e, tracked_w)


def golden_section_minimize(f, lo: float, hi: float, xtol: float) -> tuple[float, int]:
    """Golden-section search for the minimum of a unimodal ``f`` on ``[lo, hi]``.

    Returns the midpoint of the final bracket (width below ``xtol``) and the
    number of function evaluations.
    """
    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    c = b - invphi * (b - a)
    d = a + invphi * (b - a)
    fc, fd = f(c), f(d)
    calls = 2
    while b - a >= xtol:
        if fc <= fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = f(d)
        calls += 1
    return 0.5 * (a + b), calls


def _pair_at(params: SystemParams) -> tuple[np.ndarray, np.ndarray]:
    evals, evecs = _diagonalize(params)
    i, j = tracked_pair(params, evecs)
    weights = pair_weights(params, evecs[:, [i, j]]).T
    if np.any(weights.sum(axis=1) < 0.5):
        raise PhysicsError(
            f"no hybridized pair at ratio {params.ratio:.9g}: combined weights "
            f"{weights.sum(axis=1).round(3).tolist()} < 0.5"
        )
    return evals[[i, j]], weights


def find_avoided_crossing(
    params: SystemParams,
    bracket: Sequence[float] = (0.99, 1.01),
    xtol: float = 1e-6,
) -> CrossingReport:
    """Locate the minimum gap between the ``|2,0,0>``/``|0,0,2>`` pair.

    Raises:
        PhysicsError: If the pair loses its weight on the two basis states
            (combined weight below one half), which means the bracket is wrong
            or the coupling is too strong for a two-state picture.
    """
    lo, hi = (float(x) for x in bracket)
    if not lo < hi:
        raise ValueError(f"empty bracket [{lo}, {hi}]")

    def gap(r: float) -> float:
        e, _ = _pair_at(params.with_ratio(r))
        return float(e[1] - e[0])

    location, calls = golden_section_minimize(gap, lo, hi, xtol)
    energies, weights = _pair_at(params.with_ratio(location))
    return CrossingReport(
        location=location,
        gap=float(energies[1] - energies[0]),
        energies=(float(energies[0]), float(energies[1])),
        hybrid_weights=weights,
        evaluations=calls + 1,
    )
