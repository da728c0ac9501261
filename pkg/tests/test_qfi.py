import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from cvmetro import closed_forms as cf
from cvmetro import fock
from cvmetro.errors import DomainError, NonConverged, NotPure
from cvmetro.gaussian import descriptor_of, thermal_channel_path
from cvmetro.qfi import (ChannelEvolution, DisplacementEvolution, Generator, SymplecticEvolution,
                         displacement_qfi_matrix, gaussian_rotation_qfi, pure_displacement_bound, qfi_gaussian,
                         qfi_noisy, qfi_noisy_channel, qfi_pure, qfi_spectral, rotation_bound, sld_operator)
from cvmetro.states import StateSpec, parse_state

import oracles

PURE = ["coherent:a=1-0.5i", "fock:n=3", "sup:m=1,n=3,gamma=0.4", "cat:a=1.5i,gamma=0.5", "compass:a=1.4",
        "gaussian:r=0.5,gamma=0.7,a=0.3"]


@pytest.mark.parametrize("text", PURE)
@pytest.mark.parametrize("G", [Generator.displacement(0.0), Generator.displacement(1.1), Generator.rotation()],
                         ids=["p", "phi=1.1", "rot"])
def test_spectral_equals_four_variance_for_pure_states(text, G):
    state = fock.build_state(parse_state(text), 80)
    assert qfi_spectral(state, G).value == pytest.approx(qfi_pure(state, G).value, rel=1e-9, abs=1e-9)


@pytest.mark.parametrize("alpha,r,gamma,n_t", [(0, 0.4, 0.3, 0.2), (0.5 + 0.3j, 0.2, 1.5, 0.5), (1j, 0, 0, 1.0)])
@pytest.mark.parametrize("task", ["displacement", "rotation"])
def test_mixed_spectral_against_oracle(alpha, r, gamma, n_t, task):
    spec = StateSpec.gaussian(alpha, r, gamma, n_t)
    state = fock.build_state(spec, 80)
    phi = 0.6
    G = Generator.displacement(phi) if task == "displacement" else Generator.rotation()
    dim = 110
    rho = oracles.embed(oracles.gaussian_rho(alpha, r, gamma, n_t, 80), dim)
    want = oracles.qfi_from_generator(rho, oracles.generator(task, phi, dim))
    assert qfi_spectral(state, G).value == pytest.approx(want, rel=1e-8)


@settings(max_examples=25, deadline=None)
@given(st.floats(0, 1), st.floats(0, 2 * math.pi), st.floats(0, 1), st.floats(-1, 1), st.floats(-1, 1),
       st.floats(0, math.pi))
def test_gaussian_closed_forms_match_spectral(r, gamma, n_t, re, im, phi):
    spec = StateSpec.gaussian(complex(re, im), r, gamma, n_t)
    state = fock.build_state(spec, fock.minimal_cutoff(spec, start=80))
    desc = descriptor_of(spec)
    disp = qfi_gaussian(desc, DisplacementEvolution(phi)).value
    assert disp == pytest.approx(qfi_spectral(state, Generator.displacement(phi)).value, rel=1e-7)
    rot = qfi_spectral(state, Generator.rotation()).value
    assert qfi_gaussian(desc, SymplecticEvolution()).value == pytest.approx(rot, rel=1e-7, abs=1e-9)
    assert gaussian_rotation_qfi(complex(re, im), r, gamma, n_t) == pytest.approx(rot, rel=1e-7, abs=1e-9)


def test_channel_path_without_noise_is_unitary():
    desc = descriptor_of(parse_state("gaussian:r=0.7,gamma=0.2,nt=0.3,a=0.4-0.1i"))
    path = thermal_channel_path("displacement", 0.0, 0.0, phi=0.9)
    assert qfi_gaussian(desc, ChannelEvolution(path)).value == pytest.approx(
        qfi_gaussian(desc, DisplacementEvolution(0.9)).value, rel=1e-12)
    path = thermal_channel_path("rotation", 0.0, 0.0)
    assert qfi_gaussian(desc, ChannelEvolution(path)).value == pytest.approx(
        qfi_gaussian(desc, SymplecticEvolution()).value, rel=1e-12)


def test_displacement_matrix_reproduces_every_direction():
    state = fock.build_state(parse_state("sup:m=0,n=2,gamma=0.8"), 40)
    F = displacement_qfi_matrix(state)
    for phi in np.linspace(0, math.pi, 7):
        u = np.array([math.sin(phi), math.cos(phi)])
        assert u @ F @ u == pytest.approx(qfi_spectral(state, Generator.displacement(phi)).value, rel=1e-10)


@pytest.mark.parametrize("nbar", [0.0, 0.5, 2.0, 10.0])
def test_squeezed_vacuum_saturates_bounds(nbar):
    spec = StateSpec.gaussian_from_nbar(nbar)
    desc = descriptor_of(spec)
    assert qfi_gaussian(desc, DisplacementEvolution(0.0)).value == pytest.approx(pure_displacement_bound(nbar))
    assert qfi_gaussian(desc, SymplecticEvolution()).value == pytest.approx(rotation_bound(nbar), abs=1e-9)


@pytest.mark.parametrize("text", ["fock:n=2", "sup:m=0,n=3,gamma=1", "cat:a=1,gamma=0.3"])
def test_sld_reproduces_derivative_and_qfi(text):
    state = fock.build_state(parse_state(text), 40)
    G = Generator.displacement(0.4)
    L = sld_operator(state, G).matrix
    rho = state.embed(L.shape[0]).density_matrix()
    Gm = G.matrix(L.shape[0])
    drho = -1j * (Gm @ rho - rho @ Gm)
    np.testing.assert_allclose(0.5 * (L @ rho + rho @ L), drho, atol=1e-9)
    assert np.trace(rho @ L @ L).real == pytest.approx(qfi_spectral(state, G).value, rel=1e-9)


def test_pure_formula_needs_pure_state():
    state = fock.build_state(parse_state("gaussian:nt=0.3"), 40)
    with pytest.raises(NotPure):
        qfi_pure(state, Generator.rotation())


def test_recheck_flags_unconverged_state():
    state = fock.build_state(StateSpec.coherent(4.0), 20, strict=False)
    with pytest.raises(NonConverged):
        qfi_spectral(state, Generator.rotation())


def test_generator_validation():
    with pytest.raises(DomainError):
        Generator("squeeze")
    with pytest.raises(DomainError):
        Generator.displacement(math.nan)
    with pytest.raises(DomainError):
        Generator.rotation().u


@settings(max_examples=60, deadline=None)
@given(st.floats(0, 5), st.floats(0, 3), st.floats(0, 4), st.sampled_from(["displacement", "rotation"]))
def test_noisy_closed_form_against_channel(nbar, nb, kt, task):
    closed = qfi_noisy(task, nbar, nb, kt).value
    channel = qfi_noisy_channel(task, nbar, nb, kt).value
    assert closed == pytest.approx(channel, rel=1e-9, abs=1e-12)


def test_noisy_long_time_limit():
    # after complete thermalisation the displacement QFI is that of the bath state
    assert qfi_noisy("displacement", 3.0, 0.5, 60.0).value == pytest.approx(1 / (0.5 + 0.5))
    assert qfi_noisy("rotation", 3.0, 0.5, 60.0).value == pytest.approx(0.0, abs=1e-20)


@pytest.mark.parametrize("args", [(-1, 0, 0), (1, -0.1, 0), (1, 0, math.nan)])
def test_noisy_domain(args):
    with pytest.raises(DomainError):
        qfi_noisy("displacement", *args)


@pytest.mark.parametrize("m,n,gamma", [(0, 1, 0.3), (2, 3, 1.2), (1, 3, 0.4), (0, 4, 2.0)])
def test_superposition_closed_form(m, n, gamma):
    state = fock.build_state(StateSpec.fock_superposition(m, n, gamma), 20)
    for phi in (0.0, 0.5, 2.0):
        want = cf.qfi_superposition(m, n, gamma, phi)
        assert qfi_spectral(state, Generator.displacement(phi)).value == pytest.approx(want, rel=1e-10)
