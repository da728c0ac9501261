import os
import subprocess
import sys

import numpy as np
import pytest

from cvmetro import _kernel, _wigner_py, fock
from cvmetro.states import parse_state

needs_compiled = pytest.mark.skipif(_kernel.BACKEND != "cython", reason="compiled kernel not built")

STATES = ["fock:n=3", "cat:a=2i,gamma=0", "compass:a=2", "gaussian:r=0.6,gamma=0.3,nt=0.4,a=0.5",
          "sup:m=0,n=7,gamma=1"]


@needs_compiled
@pytest.mark.parametrize("text", STATES)
def test_backends_agree_on_a_grid(text):
    rho = fock.build_state(parse_state(text), 80).density_matrix()
    axis = np.linspace(-4, 4, 41)
    a = _kernel.wigner_grid(rho, axis, axis, backend="cython")
    b = _kernel.wigner_grid(rho, axis, axis, backend="python")
    assert a.shape == (41, 41)
    # the recurrence cancels badly far from the origin; inside r < 3 the
    # two orderings agree far more tightly
    np.testing.assert_allclose(a, b, atol=1e-9)
    X, P = np.meshgrid(axis, axis, indexing="ij")
    inner = X ** 2 + P ** 2 < 9
    np.testing.assert_allclose(a[inner], b[inner], atol=1e-10)


@needs_compiled
@pytest.mark.parametrize("n_pts", [1, 63, 64, 65, 200])
def test_block_edges(n_pts, rng):
    rho = fock.build_state(parse_state("sup:m=1,n=4,gamma=0.2"), 12).density_matrix()
    xs, ps = rng.uniform(-3, 3, n_pts), rng.uniform(-3, 3, n_pts)
    np.testing.assert_allclose(_kernel.wigner_points(rho, xs, ps, backend="cython"),
                               _kernel.wigner_points(rho, xs, ps, backend="python"), atol=1e-12)


@pytest.mark.parametrize("backend", [None, "python"])
def test_single_level_and_empty_input(backend):
    rho = np.ones((1, 1), complex)
    out = _kernel.wigner_points(rho, [0.0, 1.0], [0.0, 0.0], backend=backend)
    np.testing.assert_allclose(out, [1 / np.pi, np.exp(-1) / np.pi])
    assert _kernel.wigner_points(rho, [], [], backend=backend).shape == (0,)


def test_mismatched_points():
    with pytest.raises(ValueError):
        _kernel.wigner_points(np.eye(2), [0.0, 1.0], [0.0])


def test_unknown_backend():
    with pytest.raises(ValueError):
        _kernel.wigner_grid(np.eye(2), [0.0], [0.0], backend="fortran")


def test_python_module_is_always_importable():
    rho = np.diag([0.0, 1.0]).astype(complex)
    # W of |1> at the origin is -1/pi
    assert _wigner_py.wigner_points(rho, np.zeros(1), np.zeros(1))[0] == pytest.approx(-1 / np.pi)


def test_environment_forces_pure_python():
    env = dict(os.environ, CVMETRO_PURE_PYTHON="1")
    out = subprocess.run([sys.executable, "-c", "from cvmetro import _kernel; print(_kernel.BACKEND)"],
                         env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "python"
    if _kernel.BACKEND == "python":
        return
    forced = subprocess.run([sys.executable, "-c",
                             "from cvmetro import _kernel; _kernel.wigner_grid([[1]], [0.], [0.], backend='cython')"],
                            env=env, capture_output=True, text=True)
    assert forced.returncode != 0
    assert "RuntimeError: compiled Wigner kernel is not available" in forced.stderr


@needs_compiled
def test_benchmark_script_runs(capsys):
    import importlib.util
    from pathlib import Path
    path = Path(__file__).resolve().parents[1] / "benchmarks" / "bench_wigner.py"
    spec = importlib.util.spec_from_file_location("bench_wigner", path)
    bench = importlib.util.module_from_spec(spec)
    spec.loader.exec_module(bench)
    assert bench.main(["--cutoff", "64", "--sizes", "11", "--repeat", "1"]) == 0
    out = capsys.readouterr().out
    assert "speed-up" in out and len(out.splitlines()) == 1 + len(bench.CASES)
