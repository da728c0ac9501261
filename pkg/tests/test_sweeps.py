import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from cvmetro import sweeps
from cvmetro.errors import DomainError


@pytest.mark.parametrize("text,expected", [("0:1:3", [0, 0.5, 1]), ("2", [2.0]), ("1:1:1", [1.0])])
def test_parse_range(text, expected):
    np.testing.assert_allclose(sweeps.parse_range(text), expected)


@pytest.mark.parametrize("text", ["0:1", "0:1:0", "a:b:2", "-1:1:3", "0:inf:2", ""])
def test_parse_range_rejects(text):
    with pytest.raises(DomainError):
        sweeps.parse_range(text)


@pytest.mark.parametrize("text", ["", "1,x", "1,-2", "nan"])
def test_parse_list_rejects(text):
    with pytest.raises(DomainError):
        sweeps.parse_list(text)


@pytest.mark.parametrize("alias,task", [("disp", "displacement"), ("ROT", "rotation"), (" rotation ", "rotation")])
def test_task_aliases(alias, task):
    assert sweeps.normalize_task(alias) == task


@pytest.mark.parametrize("task", ["displacement", "rotation"])
def test_sweep_cross_checks(task):
    res = sweeps.run_sweep(task, np.linspace(0, 4, 5), np.array([0.0, 1.0]), np.linspace(0, 2, 6))
    assert res.passed and res.monotone and res.zero_loss_exact
    assert {p.series for p in res.points} == {"grid", "cut"}
    assert len([p for p in res.points if p.series == "grid"]) == 5 * 2 * 6
    for p in res.points:
        if p.kt == 0:
            assert p.closed == p.noiseless


def test_scaling_exponent_of_displacement():
    # at fixed loss the displacement QFI saturates, so the log-log slope tends to zero,
    # while without loss it grows linearly in nbar
    nbar = np.geomspace(1, 1e4, 9)
    res = sweeps.run_sweep("displacement", nbar, np.array([0.0]), np.array([0.0, 0.5]))
    slope = sweeps.scaling_exponent(res.points, 0.0)
    assert slope is not None and slope < 0.05


@given(st.floats(0, 10), st.floats(0, 2))
def test_single_point(nbar, nb):
    res = sweeps.run_sweep("rotation", np.array([nbar]), np.array([nb]), np.array([0.3]))
    assert all(p.passed for p in res.points)
    assert all(math.isfinite(p.closed) for p in res.points)
