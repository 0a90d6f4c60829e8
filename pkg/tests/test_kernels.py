import os
import subprocess
import sys

import numpy as np
import pytest

from dirac_tsfp import GridSpec, PotentialTable, build_free_modes, build_stepper
from dirac_tsfp.kernels import BACKEND, FREE, POTENTIAL, available_backends

backends = available_backends()


def _random_stages(rng, M, n_stages=5):
    # alternate free and potential stages with symmetric unitary 2x2 blocks
    g = GridSpec(0.0, 1.0, M)
    modes = build_free_modes(g)
    pot = PotentialTable(g, rng.normal(size=M), rng.normal(size=M), 0.7)
    kinds, tables = [], []
    for k in range(n_stages):
        dt = rng.uniform(-0.3, 0.3)
        if k % 2 == 0:
            U = modes.propagator(dt)
            kinds.append(FREE)
            tables.append(np.stack([U[:, 0, 0], U[:, 0, 1], U[:, 1, 1]]))
        else:
            p, q = pot.matrix_entries(dt)
            kinds.append(POTENTIAL)
            tables.append(np.stack([p, q, p]))
    return np.array(kinds, dtype=np.int64), np.ascontiguousarray(np.stack(tables))


def test_python_backend_always_available():
    assert "python" in backends
    assert BACKEND in backends


@pytest.mark.skipif("cython" not in backends, reason="compiled extension not built")
@pytest.mark.parametrize("M", [8, 64, 128, 12])
@pytest.mark.parametrize("n_steps", [0, 1, 9])
def test_backends_agree(rng, M, n_steps):
    kinds, tables = _random_stages(rng, M)
    u = rng.normal(size=(2, M)) + 1j * rng.normal(size=(2, M))
    ref = backends["python"](u.copy(), kinds, tables, n_steps)
    out = backends["cython"](u.copy(), kinds, tables, n_steps)
    np.testing.assert_allclose(out, ref, rtol=0, atol=1e-12 * np.abs(u).max())


@pytest.mark.parametrize("name", sorted(backends))
def test_backend_leaves_input_untouched(rng, name):
    kinds, tables = _random_stages(rng, 16)
    u = rng.normal(size=(2, 16)) + 0j
    keep = u.copy()
    backends[name](u, kinds, tables, 3)
    np.testing.assert_array_equal(u, keep)


@pytest.mark.parametrize("name", sorted(backends))
def test_backend_free_stage_on_dc_mode(name):
    # a constant field only sees the l = 0 block
    M = 16
    kinds = np.array([FREE], dtype=np.int64)
    tables = np.zeros((1, 3, M), dtype=np.complex128)
    tables[0, 0, 0], tables[0, 1, 0], tables[0, 2, 0] = 0.6, 0.8j, 0.6
    u = np.ones((2, M), dtype=np.complex128) * np.array([[1.0], [2.0]])
    out = backends[name](u, kinds, tables, 1)
    np.testing.assert_allclose(out[0], 0.6 + 1.6j, atol=1e-15)
    np.testing.assert_allclose(out[1], 0.8j + 1.2, atol=1e-15)


def test_fallback_can_be_forced():
    env = dict(os.environ, DIRAC_TSFP_BACKEND="python")
    code = "import dirac_tsfp; print(dirac_tsfp.BACKEND)"
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "python"


def test_stepper_result_independent_of_backend(monkeypatch):
    from dirac_tsfp import kernels
    from dirac_tsfp.presets import BUMP

    g = BUMP.grid(64)
    s = build_stepper("fourth", build_free_modes(g), BUMP.potentials(g, 0.5), 0.01)
    u = BUMP.initial(g).values
    results = {}
    for name, fn in backends.items():
        monkeypatch.setattr(kernels, "run_stages", fn)
        results[name] = s.advance(u, 50)
    for name, r in results.items():
        np.testing.assert_allclose(r, results["python"], rtol=0, atol=1e-11)
