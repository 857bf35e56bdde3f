"""Hamiltonians of two cavities separated by a vibrating two-sided mirror.

Modes are ordered ``(a, b, c)``: left cavity, mirror phonon, right cavity.
The full model is

    H = w_a a^dag a + w_b b^dag b + w_c c^dag c
        + (g/2) [(c + c^dag)^2 - (w_a/w_c)^2 (a + a^dag)^2] (b + b^dag)

with the ground state stable as long as ``g * w_a < w_c**2``. At the cavity
resonance ``w_a == w_c`` a second-order treatment produces a Kerr-shifted
diagonal part plus a photon-pair exchange ``a^2 c^dag^2 + h.c.``.

All frequencies share one arbitrary unit; presets use ``omega_b = 1``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Literal

import numpy as np

from .errors import InstabilityError, PhysicsError, ResonanceError
from .fock import HilbertSpace, Operator, anticommutator, destroy, number
from .james import HarmonicTerm

__all__ = [
    "MODE_A",
    "MODE_B",
    "MODE_C",
    "MODE_LABELS",
    "SystemParams",
    "PulseParams",
    "JumpChannel",
    "Drive",
    "build_full_hamiltonian",
    "build_effective_hamiltonian",
    "build_hop_hamiltonian",
    "effective_coupling",
    "hop_matrix_element",
    "build_nonhermitian",
    "jump_channels",
    "interaction_picture_terms",
    "build_drive",
    "bare_hamiltonian",
]

MODE_A, MODE_B, MODE_C = 0, 1, 2
MODE_LABELS = ("a", "b", "c")

RESONANCE_RTOL = 1e-9
MIN_CUTOFFS = (3, 2, 3)

EffectiveForm = Literal["printed", "james"]


@dataclass(frozen=True)
class SystemParams:
    """Physical parameters of the three-mode model.

    ``g`` is an input in its own right; it relates to the mirror zero-point
    amplitude through ``g = w_c**2 x_zpf / pi`` but ``x_zpf`` is never used.
    """

    omega_a: float
    omega_b: float
    omega_c: float
    g: float
    gamma_a: float = 0.0
    gamma_b: float = 0.0
    gamma_c: float = 0.0
    cutoffs: tuple[int, int, int] = (7, 5, 7)

    def __post_init__(self) -> None:
        object.__setattr__(self, "cutoffs", tuple(int(n) for n in self.cutoffs))
        if len(self.cutoffs) != 3:
            raise ValueError(f"need three cutoffs (a, b, c), got {self.cutoffs}")
        for name in ("omega_a", "omega_b", "omega_c"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                raise PhysicsError(f"{name} must be a positive frequency, got {value}")
        if not (math.isfinite(self.g) and self.g >= 0):
            raise PhysicsError(f"g must be non-negative, got {self.g}")
        for name in ("gamma_a", "gamma_b", "gamma_c"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value >= 0):
                raise PhysicsError(f"{name} must be non-negative, got {value}")
        if self.g * self.omega_a >= self.omega_c**2:
            raise InstabilityError(
                f"unstable: g*omega_a = {self.g * self.omega_a:g} >= omega_c^2 = {self.omega_c**2:g}"
            )

    @property
    def space(self) -> HilbertSpace:
        return HilbertSpace(self.cutoffs)

    @property
    def gammas(self) -> tuple[float, float, float]:
        return (self.gamma_a, self.gamma_b, self.gamma_c)

    @property
    def ratio(self) -> float:
        return self.omega_a / self.omega_c

    @property
    def is_resonant(self) -> bool:
        return abs(self.omega_a - self.omega_c) <= RESONANCE_RTOL * self.omega_c

    def with_ratio(self, ratio: float) -> SystemParams:
        """Copy with ``omega_a = ratio * omega_c``; everything else fixed."""
        return replace(self, omega_a=ratio * self.omega_c)

    def with_cutoffs(self, cutoffs) -> SystemParams:
        return replace(self, cutoffs=tuple(cutoffs))


@dataclass(frozen=True)
class PulseParams:
    """Gaussian coherent pulse ``A exp(-(t - t0)^2 / 2 tau^2)`` at carrier ``carrier``."""

    carrier: float
    amplitude: float = 0.1
    center: float = 40.0
    width: float = 10.0

    def __post_init__(self) -> None:
        if not self.width > 0:
            raise PhysicsError(f"pulse width must be positive, got {self.width}")
        if not self.amplitude >= 0:
            raise PhysicsError(f"pulse amplitude must be non-negative, got {self.amplitude}")

    @classmethod
    def defaults_for(cls, params: SystemParams, **overrides) -> PulseParams:
        """Default pulse, resonant with the left cavity, scaled to ``omega_b``."""
        wb = params.omega_b
        base = {"carrier": params.omega_a, "amplitude": 0.1 * wb, "center": 40.0 / wb, "width": 10.0 / wb}
        return cls(**{**base, **overrides})


@dataclass(frozen=True)
class JumpChannel:
    operator: Operator
    rate: float
    label: str = ""

    def __post_init__(self) -> None:
        if self.rate < 0:
            raise ValueError(f"jump rate must be non-negative, got {self.rate}")


@dataclass(frozen=True)
class Drive:
    """Time-dependent drive ``sum_k coefficient_k(t) * operator_k``.

    ``form="rotating"`` is ``A f(t) (a e^{i w t} + a^dag e^{-i w t})``;
    ``form="real"`` is ``2 A f(t) cos(w t) (a + a^dag)``, which reduces to the
    rotating form after dropping counter-rotating terms.
    """

    pulse: PulseParams
    lowering: Operator
    form: Literal["rotating", "real"] = "rotating"

    def __post_init__(self) -> None:
        if self.form not in ("rotating", "real"):
            raise ValueError(f"unknown drive form {self.form!r}")

    @property
    def operators(self) -> tuple[Operator, Operator]:
        return (self.lowering, self.lowering.dag())

    def envelope(self, t: float) -> float:
        p = self.pulse
        return p.amplitude * math.exp(-((t - p.center) ** 2) / (2.0 * p.width**2))

    def coefficients(self, t: float) -> tuple[complex, complex]:
        f = self.envelope(t)
        w = self.pulse.carrier
        if self.form == "rotating":
            phase = complex(math.cos(w * t), math.sin(w * t))
            return (f * phase, f * phase.conjugate())
        amp = 2.0 * f * math.cos(w * t)
        return (complex(amp), complex(amp))

    def support(self, floor: float = 1e-18) -> tuple[float, float]:
        """Time window outside which the envelope is below ``floor * amplitude``."""
        p = self.pulse
        half = p.width * math.sqrt(2.0 * math.log(1.0 / floor))
        return (p.center - half, p.center + half)

    def __call__(self, t: float) -> Operator:
        c0, c1 = self.coefficients(t)
        m = c0 * self.lowering.matrix + c1 * self.lowering.matrix.conj().T
        return Operator(self.lowering.space, 0.5 * (m + m.conj().T), hermitian=True)


def _check_cutoffs(params: SystemParams) -> None:
    for label, n, lo in zip(MODE_LABELS, params.cutoffs, MIN_CUTOFFS):
        if n < lo:
            raise PhysicsError(f"cutoff for mode {label} must be >= {lo}, got {n}")


def _require_resonance(params: SystemParams) -> None:
    if not params.is_resonant:
        raise ResonanceError(
            f"resonance required: omega_a = {params.omega_a:g} != omega_c = {params.omega_c:g}"
        )


def _nonzero(value: float, scale: float, what: str) -> float:
    if abs(value) <= 1e-12 * scale:
        raise PhysicsError(f"vanishing denominator {what}")
    return value


def build_full_hamiltonian(params: SystemParams) -> Operator:
    """Full radiation-pressure Hamiltonian on the truncated three-mode space."""
    _check_cutoffs(params)
    space = params.space
    a, b, c = (destroy(space, m).matrix for m in (MODE_A, MODE_B, MODE_C))
    xa, xb, xc = (m + m.conj().T for m in (a, b, c))
    h = (
        params.omega_a * (a.conj().T @ a)
        + params.omega_b * (b.conj().T @ b)
        + params.omega_c * (c.conj().T @ c)
        + 0.5 * params.g * (xc @ xc - params.ratio**2 * (xa @ xa)) @ xb
    )
    return Operator(space, 0.5 * (h + h.conj().T), hermitian=True)


def effective_coupling(params: SystemParams) -> float:
    """Effective pair coupling ``g~ = g^2 w_b / (2 (4 w_a^2 - w_b^2))``."""
    wa, wb = params.omega_a, params.omega_b
    den = _nonzero(4.0 * wa**2 - wb**2, wa**2, "4*omega_a^2 - omega_b^2")
    return params.g**2 * wb / (2.0 * den)


def hop_matrix_element(params: SystemParams) -> float:
    """``<0,0,2| H_hop |2,0,0>``, which equals ``-2 g~``."""
    return -2.0 * effective_coupling(params)


def build_hop_hamiltonian(params: SystemParams) -> Operator:
    """Pair-exchange part ``-g~ (a^2 c^dag^2 + a^dag^2 c^2)`` of the effective Hamiltonian."""
    space = params.space
    a = destroy(space, MODE_A).matrix
    c = destroy(space, MODE_C).matrix
    pair = a @ a @ c.conj().T @ c.conj().T
    m = -effective_coupling(params) * (pair + pair.conj().T)
    return Operator(space, m, hermitian=True)


def build_effective_hamiltonian(params: SystemParams, form: EffectiveForm = "printed") -> Operator:
    """Second-order effective Hamiltonian at the cavity resonance.

    Args:
        params: System parameters; ``omega_a`` must equal ``omega_c``.
        form: ``"printed"`` uses the closed-form coefficients as printed in the literature.
            ``"james"`` uses the closed form that the second-order engine
            returns for the three resonant harmonics. The two share the bare
            terms, the Kerr and cross-Kerr terms and the pair-exchange term;
            they differ in the linear photon shift, the phonon-photon shift
            and the constant.

    Raises:
        ResonanceError: If ``omega_a != omega_c``.
        PhysicsError: If ``omega_b == 2 omega_a`` (vanishing denominators).
    """
    _require_resonance(params)
    if form not in ("printed", "james"):
        raise ValueError(f"unknown effective-Hamiltonian form {form!r}")
    w, wb, g2 = params.omega_a, params.omega_b, params.g**2
    d4 = _nonzero(4.0 * w**2 - wb**2, w**2, "4*omega_a^2 - omega_b^2")
    dm = _nonzero(2.0 * w - wb, w, "2*omega_a - omega_b")
    d8 = 2.0 * d4

    space = params.space
    na, nb, nc = (number(space, m).matrix for m in (MODE_A, MODE_B, MODE_C))
    one = np.eye(space.dim)
    n_ph = na + nc

    kerr = g2 * (3.0 * wb**2 - 8.0 * w**2) / (d8 * wb)
    cross = 2.0 * g2 / wb
    if form == "printed":
        linear = g2 * (4.0 * w + wb) / d8
        phonon = 4.0 * g2 * w / d4
        constant = g2 / dm
    else:
        linear = -g2 * (4.0 * w - wb) / d8
        phonon = -4.0 * g2 * w / d4
        constant = -g2 / (2.0 * w + wb)

    shift = (
        (w + linear) * n_ph
        + kerr * (na @ na + nc @ nc)
        + (wb * one + phonon * (n_ph + one)) @ nb
        + cross * (na @ nc)
        + constant * one
    )
    h = shift + build_hop_hamiltonian(params).matrix
    return Operator(space, h, hermitian=True)


def build_nonhermitian(params: SystemParams, hamiltonian: Operator) -> Operator:
    """No-jump generator ``H - (i/2) sum_m gamma_m n_m``."""
    if hamiltonian.space != params.space:
        raise ValueError("Hamiltonian does not live on the parameter space")
    if not any(params.gammas):
        return hamiltonian
    space = params.space
    decay = sum(g * number(space, m).matrix for m, g in enumerate(params.gammas))
    return Operator(space, hamiltonian.matrix - 0.5j * decay)


def jump_channels(params: SystemParams) -> list[JumpChannel]:
    """Photon/phonon loss channels in the fixed order (a, b, c)."""
    space = params.space
    return [
        JumpChannel(destroy(space, m), rate, MODE_LABELS[m])
        for m, rate in enumerate(params.gammas)
    ]


def interaction_picture_terms(params: SystemParams) -> list[HarmonicTerm]:
    """The three resonant raising harmonics of the interaction at ``w_a == w_c``.

    ``h1 = (g/2)(c^dag^2 - a^dag^2) b^dag`` at ``2 w_a + w_b``,
    ``h2 = (g/2)(c^dag^2 - a^dag^2) b`` at ``2 w_a - w_b`` and
    ``h3 = (g/2)({c, c^dag} - {a, a^dag}) b^dag`` at ``w_b``.
    """
    _require_resonance(params)
    space = params.space
    a, b, c = (destroy(space, m) for m in (MODE_A, MODE_B, MODE_C))
    ad, bd, cd = a.dag(), b.dag(), c.dag()
    half_g = 0.5 * params.g
    pair = cd @ cd - ad @ ad
    h1 = half_g * (pair @ bd)
    h2 = half_g * (pair @ b)
    h3 = half_g * ((anticommutator(c, cd) - anticommutator(a, ad)) @ bd)
    w, wb = params.omega_a, params.omega_b
    if 2.0 * w <= wb:
        raise PhysicsError("need 2*omega_a > omega_b for positive harmonic frequencies")
    return [
        HarmonicTerm(h1, 2.0 * w + wb),
        HarmonicTerm(h2, 2.0 * w - wb),
        HarmonicTerm(h3, wb),
    ]


def build_drive(
    pulse: PulseParams,
    space: HilbertSpace,
    mode: int = MODE_A,
    form: Literal["rotating", "real"] = "rotating",
) -> Drive:
    """Gaussian coherent drive on ``mode`` (the left cavity by default)."""
    return Drive(pulse, destroy(space, mode), form)


def bare_hamiltonian(params: SystemParams) -> Operator:
    space = params.space
    return (
        params.omega_a * number(space, MODE_A)
        + params.omega_b * number(space, MODE_B)
        + params.omega_c * number(space, MODE_C)
    )
