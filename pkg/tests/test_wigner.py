import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from cvmetro import fock, wigner
from cvmetro.errors import DomainError, NonConverged
from cvmetro.qfi import Generator, qfi_displacement_extremal, qfi_spectral
from cvmetro.states import StateSpec, parse_state
from cvmetro.wigner import GridSpec, ParityTask

import oracles

CLOSED = ["coherent:a=0.9-0.4i", "gaussian:r=0.6,gamma=1.0,nt=0.3,a=0.2+0.5i", "fock:n=5",
          "sup:m=0,n=1,gamma=0.3", "sup:m=2,n=5,gamma=1.7", "cat:a=1.8,gamma=0", "cat:a=1+1i,gamma=2.2"]


def _points(rng, n=60, span=3.5):
    return rng.uniform(-span, span, n), rng.uniform(-span, span, n)


@pytest.mark.parametrize("text", CLOSED)
def test_analytic_against_kernel(text, rng):
    spec = parse_state(text)
    xs, ps = _points(rng)
    state = fock.build_state(spec, 80)
    np.testing.assert_allclose(wigner.wigner_analytic(spec, xs, ps), wigner.wigner_numeric(state, xs, ps),
                               atol=1e-10)


@pytest.mark.parametrize("x,p", [(0.0, 0.0), (0.7, -1.2), (-2.0, 1.5)])
def test_numeric_against_displaced_parity(x, p):
    state = fock.build_state(parse_state("cat:a=1.5i,gamma=0.9"), 60)
    want = oracles.wigner(state.density_matrix(), x, p)
    assert wigner.wigner_numeric(state, x, p) == pytest.approx(want, abs=1e-10)
    assert wigner.wigner_displaced_parity(state, x, p) == pytest.approx(want, abs=1e-10)


@pytest.mark.parametrize("text", CLOSED)
def test_analytic_gradient_against_differences(text, rng):
    spec = parse_state(text)
    xs, ps = _points(rng, 20, 2.5)
    Wx, Wp = wigner.wigner_gradient_analytic(spec, xs, ps)
    h = 1e-5
    fx = (wigner.wigner_analytic(spec, xs + h, ps) - wigner.wigner_analytic(spec, xs - h, ps)) / (2 * h)
    fp = (wigner.wigner_analytic(spec, xs, ps + h) - wigner.wigner_analytic(spec, xs, ps - h)) / (2 * h)
    np.testing.assert_allclose(Wx, fx, atol=1e-8)
    np.testing.assert_allclose(Wp, fp, atol=1e-8)


@pytest.mark.parametrize("text", ["sup:m=1,n=3,gamma=0.5", "compass:a=1.3"])
def test_finite_difference_and_commutator_derivatives_agree(text, rng):
    state = fock.build_state(parse_state(text), 60)
    xs, ps = _points(rng, 30, 2.5)
    fd = wigner.wigner_fields(state, xs, ps, derivative="fd")
    comm = wigner.wigner_fields(state, xs, ps, derivative="commutator")
    for a, b in zip(fd, comm):
        np.testing.assert_allclose(a, b, atol=1e-9)
    with pytest.raises(DomainError):
        wigner.wigner_fields(state, xs, ps, derivative="spline")


@settings(max_examples=40, deadline=None)
@given(st.floats(-4, 4), st.floats(-4, 4))
def test_wigner_bounded_by_one_over_pi(x, p):
    for text in ("fock:n=3", "cat:a=1.2i,gamma=1", "gaussian:r=0.9,gamma=0.4"):
        assert abs(wigner.wigner_analytic(parse_state(text), x, p)) <= 1 / math.pi + 1e-12


def test_fock_wigner_is_radial(rng):
    spec = StateSpec.fock(1)
    rad = rng.uniform(0, 3, 20)
    ang = rng.uniform(0, 2 * math.pi, 20)
    a = wigner.wigner_analytic(spec, rad * np.cos(ang), rad * np.sin(ang))
    b = wigner.wigner_analytic(spec, rad, np.zeros_like(rad))
    np.testing.assert_allclose(a, b, atol=1e-15)


def test_unconverged_state_is_refused():
    state = fock.build_state(StateSpec.coherent(5.0), 20, strict=False)
    with pytest.raises(NonConverged):
        wigner.wigner_numeric(state, 0.0, 0.0)


@pytest.mark.parametrize("text", ["0:1:3,0:1:3", "-4:4:11,-2:2:5"])
def test_grid_parse(text):
    g = GridSpec.parse(text)
    assert g.xs[0] == float(text.split(":")[0])


@pytest.mark.parametrize("text", ["0:1:3", "0:1:1,0:1:3", "1:0:3,0:1:3", "a:b:c,0:1:2", "0:inf:3,0:1:3"])
def test_grid_parse_rejects(text):
    with pytest.raises(DomainError):
        GridSpec.parse(text)


def test_parity_task_validation():
    assert ParityTask("rot").task == "rotation"
    with pytest.raises(DomainError):
        ParityTask("squeeze")
    with pytest.raises(DomainError):
        ParityTask(eps=-1)


SMALL = GridSpec(-3, 3, 61, -3, 3, 61)


@pytest.mark.parametrize("text", CLOSED + ["compass:a=1.2"])
def test_parity_denominator_nonnegative(text):
    spec = parse_state(text)
    res = wigner.sensitivity_map(spec, ParityTask("displacement", 0.4), SMALL)
    assert res.meta["min_denominator"] >= -1e-9
    assert np.all(np.isfinite(res.values))


@pytest.mark.parametrize("text", ["fock:n=1", "sup:m=0,n=2,gamma=0", "cat:a=1.5,gamma=0", "compass:a=1.2"])
@pytest.mark.parametrize("task", ["displacement", "rotation"])
def test_parity_map_respects_qfi(text, task):
    spec = parse_state(text)
    state = fock.build_state(spec, 80)
    if task == "displacement":
        res = wigner.sensitivity_map(spec, ParityTask(task), SMALL, optimize_phi=True)
        bound = qfi_displacement_extremal(state).max
    else:
        res = wigner.sensitivity_map(spec, ParityTask(task), SMALL)
        bound = qfi_spectral(state, Generator.rotation()).value
    assert res.argmax[2] <= bound * (1 + 1e-8)


def test_parity_map_of_first_fock_state_nearly_saturates():
    res = wigner.sensitivity_map(StateSpec.fock(1), ParityTask(), GridSpec(-2, 2, 201, -2, 2, 201),
                                 optimize_phi=True)
    assert 0.99 * 6 <= res.argmax[2] <= 6


def test_parity_map_of_0_2_superposition_reaches_its_own_qfi():
    spec = StateSpec.fock_superposition(0, 2, 0.0)
    res = wigner.sensitivity_map(spec, ParityTask(), GridSpec(-4, 4, 301, -4, 4, 301), optimize_phi=True)
    qfi = qfi_displacement_extremal(fock.build_state(spec, 20)).max
    assert qfi == pytest.approx(2 * (3 + math.sqrt(2)))
    assert 0.99 * qfi <= res.argmax[2] <= qfi


def test_noise_floor_lowers_every_cell():
    spec = parse_state("cat:a=1.5i,gamma=0.4")
    clean = wigner.sensitivity_map(spec, ParityTask("displacement", 0.2), SMALL)
    noisy = wigner.sensitivity_map(spec, ParityTask("displacement", 0.2, eps=1e-2), SMALL)
    assert np.all(noisy.values <= clean.values + 1e-12)
    assert not noisy.indeterminate.any()


def test_rotation_map_of_vacuum_vanishes():
    res = wigner.sensitivity_map(StateSpec.vacuum(), ParityTask("rotation"), SMALL)
    assert np.max(res.values) == pytest.approx(0.0, abs=1e-20)
    # the origin has pi W = 1 and no slope: 0/0
    assert res.indeterminate[30, 30]


def test_analytic_and_numeric_maps_agree():
    spec = parse_state("sup:m=1,n=2,gamma=0.6")
    a = wigner.sensitivity_map(spec, ParityTask("displacement", 1.0), SMALL)
    b = wigner.sensitivity_map(fock.build_state(spec, 30), ParityTask("displacement", 1.0), SMALL,
                               derivative="commutator")
    mask = ~(a.indeterminate | b.indeterminate)
    np.testing.assert_allclose(a.values[mask], b.values[mask], rtol=1e-6, atol=1e-8)


def test_single_point_sensitivity_matches_map():
    spec = parse_state("cat:a=1.2,gamma=0.5")
    task = ParityTask("rotation")
    res = wigner.sensitivity_map(spec, task, SMALL)
    i, j = 40, 17
    point = wigner.parity_sensitivity(spec, task, SMALL.xs[i], SMALL.ps[j])
    assert point.value == pytest.approx(res.values[i, j], rel=1e-12)


def test_worker_split_is_deterministic():
    spec = StateSpec.compass(1.2)
    a = wigner.sensitivity_map(spec, ParityTask(), SMALL, workers=1)
    b = wigner.sensitivity_map(spec, ParityTask(), SMALL, workers=3)
    np.testing.assert_array_equal(a.values, b.values)
