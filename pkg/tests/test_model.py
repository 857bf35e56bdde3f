from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pairhop.errors import InstabilityError, PhysicsError, ResonanceError
from pairhop.fock import commutator, destroy, number, parity
from pairhop.model import (
    Drive,
    PulseParams,
    SystemParams,
    bare_hamiltonian,
    build_drive,
    build_effective_hamiltonian,
    build_full_hamiltonian,
    build_hop_hamiltonian,
    build_nonhermitian,
    effective_coupling,
    hop_matrix_element,
    interaction_picture_terms,
    jump_channels,
)


def test_params_validation():
    with pytest.raises(InstabilityError):
        SystemParams(1.0, 1.0, 1.0, 1.0)
    with pytest.raises(PhysicsError):
        SystemParams(-1.0, 1.0, 1.0, 0.1)
    with pytest.raises(PhysicsError):
        SystemParams(1.0, 1.0, 1.0, -0.1)
    with pytest.raises(PhysicsError):
        SystemParams(1.0, 1.0, 1.0, 0.1, gamma_b=-1e-3)
    with pytest.raises(PhysicsError):
        build_full_hamiltonian(SystemParams(1.0, 1.0, 1.0, 0.1, cutoffs=(2, 2, 3)))


def test_full_hamiltonian_uncoupled_is_diagonal():
    p = SystemParams(1.3, 1.0, 1.1, 0.0, cutoffs=(3, 2, 3))
    h = build_full_hamiltonian(p)
    occ = p.space.occupation_table()
    expected = occ @ np.array([1.3, 1.0, 1.1])
    np.testing.assert_allclose(h.matrix, np.diag(expected), atol=1e-14)


def test_full_hamiltonian_elements(closed_params):
    h = build_full_hamiltonian(closed_params)
    assert h.hermitian
    assert h.element((2, 0, 0), (0, 0, 2)) == 0
    assert h.element((2, 0, 0), (2, 1, 0)) == pytest.approx(-2 * closed_params.g)


def test_full_hamiltonian_parities(closed_params):
    p = closed_params.with_ratio(1.02)
    h = build_full_hamiltonian(p)
    for mode in (0, 2):
        assert commutator(h, parity(p.space, mode)).norm() <= 1e-12 * h.norm()


def test_effective_coupling_values():
    p = SystemParams(4 / 3, 1.0, 4 / 3, 0.06)
    assert effective_coupling(p) == pytest.approx(2.9454545e-4, abs=1e-10)
    assert hop_matrix_element(p) == pytest.approx(-2 * effective_coupling(p))
    assert effective_coupling(SystemParams(4 / 3, 1.0, 4 / 3, 0.0)) == 0.0
    assert effective_coupling(SystemParams(4 / 3, 1.0, 4 / 3, 0.12)) == pytest.approx(4 * effective_coupling(p))
    with pytest.raises(PhysicsError):
        effective_coupling(SystemParams(0.5, 1.0, 0.5, 0.01))


@given(st.floats(0.1, 10.0))
def test_effective_coupling_unit_scaling(s):
    p = SystemParams(4 / 3, 1.0, 4 / 3, 0.06)
    q = SystemParams(s * 4 / 3, s, s * 4 / 3, s * 0.06)
    assert effective_coupling(q) == pytest.approx(s * effective_coupling(p), rel=1e-12)


def test_hop_element(closed_params):
    h = build_hop_hamiltonian(closed_params)
    assert h.element((0, 0, 2), (2, 0, 0)) == pytest.approx(hop_matrix_element(closed_params))


@pytest.mark.parametrize("form", ["printed", "james"])
def test_effective_hamiltonian_structure(closed_params, form):
    p = closed_params
    h = build_effective_hamiltonian(p, form)
    space = p.space
    n_ph = number(space, 0) + number(space, 2)
    assert commutator(n_ph, h).norm() < 1e-12
    assert commutator(number(space, 1), h).norm() < 1e-12
    assert h.element((0, 0, 2), (2, 0, 0)) == pytest.approx(-2 * effective_coupling(p))
    assert h.element((2, 0, 0), (2, 0, 0)) == pytest.approx(h.element((0, 0, 2), (0, 0, 2)))
    shift = h - build_hop_hamiltonian(p)
    assert commutator(number(space, 0), shift).norm() < 1e-12


def test_effective_vacuum_energy(closed_params):
    p = closed_params
    g2, w, wb = p.g**2, p.omega_a, p.omega_b
    printed = build_effective_hamiltonian(p, "printed").element((0, 0, 0), (0, 0, 0))
    assert printed == pytest.approx(g2 / (2 * w - wb))
    engine = build_effective_hamiltonian(p, "james").element((0, 0, 0), (0, 0, 0))
    assert engine == pytest.approx(-g2 / (2 * w + wb))


def test_effective_vacuum_matches_full_ground_state(closed_params):
    ground = np.linalg.eigvalsh(build_full_hamiltonian(closed_params).matrix)[0]
    engine = build_effective_hamiltonian(closed_params, "james").element((0, 0, 0), (0, 0, 0)).real
    assert abs(ground - engine) < 5 * closed_params.g**3


def test_effective_requires_resonance(closed_params):
    with pytest.raises(ResonanceError):
        build_effective_hamiltonian(closed_params.with_ratio(1.01))
    with pytest.raises(ResonanceError):
        interaction_picture_terms(closed_params.with_ratio(1.01))
    with pytest.raises(ValueError):
        build_effective_hamiltonian(closed_params, "other")


def test_nonhermitian(fig3_params, closed_params):
    h = build_full_hamiltonian(fig3_params)
    nh = build_nonhermitian(fig3_params, h)
    anti = (nh.matrix - nh.matrix.conj().T) / 2
    occ = fig3_params.space.occupation_table()
    np.testing.assert_allclose(np.diag(anti), -0.5j * occ @ np.array(fig3_params.gammas), atol=1e-18)
    assert np.count_nonzero(anti - np.diag(np.diag(anti))) == 0
    i = fig3_params.space.index((2, 0, 0))
    assert anti[i, i] == pytest.approx(-1e-4j)
    closed_h = build_full_hamiltonian(closed_params)
    assert build_nonhermitian(closed_params, closed_h) is closed_h
    with pytest.raises(ValueError):
        build_nonhermitian(fig3_params, build_full_hamiltonian(fig3_params.with_cutoffs((3, 2, 3))))


def test_jump_channels_order(fig3_params):
    chans = jump_channels(fig3_params)
    assert [c.label for c in chans] == ["a", "b", "c"]
    for m, ch in enumerate(chans):
        np.testing.assert_array_equal(ch.operator.matrix, destroy(fig3_params.space, m).matrix)
        assert ch.rate == 1e-4


def test_interaction_terms(closed_params):
    p = closed_params
    terms = interaction_picture_terms(p)
    assert [t.omega for t in terms] == pytest.approx([11 / 3, 5 / 3, 1.0])
    space = p.space
    a, b, c = (destroy(space, m) for m in range(3))
    h3 = terms[2].h.matrix
    expected = (p.g / 2) * ((2 * number(space, 2) - 2 * number(space, 0)) @ b.dag()).matrix
    idx = space.interior((1, 1, 1))
    np.testing.assert_allclose(h3[np.ix_(idx, idx)], expected[np.ix_(idx, idx)], atol=1e-14)
    # h2 lowers the phonon number by one
    h2 = terms[1].h
    assert h2.element((0, 0, 2), (0, 1, 0)) == pytest.approx(p.g / 2 * math.sqrt(2))
    assert h2.element((0, 1, 2), (0, 0, 0)) == 0


def test_bare_hamiltonian(closed_params):
    bare = bare_hamiltonian(closed_params)
    assert bare.element((1, 2, 1), (1, 2, 1)) == pytest.approx(2 * 4 / 3 + 2)


def test_drive_properties(closed_params):
    space = closed_params.space
    pulse = PulseParams.defaults_for(closed_params)
    assert (pulse.amplitude, pulse.center, pulse.width, pulse.carrier) == (0.1, 40.0, 10.0, 4 / 3)
    drive = build_drive(pulse, space)
    h0 = drive(pulse.center)
    assert h0.hermitian
    expected = pulse.amplitude * np.exp(-1j * pulse.carrier * pulse.center)
    assert h0.element((1, 0, 0), (0, 0, 0)) == pytest.approx(expected)
    far = drive(pulse.center + 8.5 * pulse.width)
    assert far.norm() < pulse.amplitude * 1e-13
    assert commutator(h0, parity(space, 2)).norm() < 1e-14
    lo, hi = drive.support()
    assert drive.envelope(hi) <= 1.0001e-18 * pulse.amplitude


def test_drive_forms_agree_after_rwa(closed_params):
    space = closed_params.space
    pulse = PulseParams.defaults_for(closed_params)
    rot = build_drive(pulse, space, form="rotating")
    real = build_drive(pulse, space, form="real")
    t = 43.0
    diff = real(t).matrix - rot(t).matrix
    # the difference is the counter-rotating part a e^{-iwt} + h.c.
    a = destroy(space, 0).matrix
    f = rot.envelope(t)
    w = pulse.carrier
    counter = f * (a * np.exp(-1j * w * t) + a.conj().T * np.exp(1j * w * t))
    np.testing.assert_allclose(diff, counter, atol=1e-15)
    with pytest.raises(ValueError):
        Drive(pulse, destroy(space, 0), form="square")


@settings(max_examples=20, deadline=None)
@given(st.floats(0.05, 0.2), st.floats(0.9, 1.1))
def test_full_hamiltonian_hermitian(g, ratio):
    p = SystemParams(ratio * 4 / 3, 1.0, 4 / 3, g, cutoffs=(4, 3, 4))
    h = build_full_hamiltonian(p)
    assert h.hermitian_residual() <= 1e-12 * h.norm()


def test_pulse_params_validation():
    with pytest.raises(PhysicsError):
        PulseParams(1.0, width=0.0)
    with pytest.raises(PhysicsError):
        PulseParams(1.0, amplitude=-0.1)
