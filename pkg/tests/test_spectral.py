import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import random_field
from dirac_tsfp import (
    GridSpec,
    SpectralField,
    SpinorField,
    l2_norm,
    project,
    sobolev_norm,
    to_physical,
    to_spectral,
)
from dirac_tsfp.errors import GridMismatchError
from dirac_tsfp.spectral import interpolate, resample
from oracles import naive_dft


def test_grid_basics():
    g = GridSpec(0.0, 1.0, 8)
    assert g.h == 0.125
    assert g.x[0] == 0.0 and len(g.x) == 8
    assert g.h * g.M == pytest.approx(g.b - g.a, rel=1e-15)
    assert list(g.mode_range()) == [-4, -3, -2, -1, 0, 1, 2, 3]
    assert g.mu[g.slot(1)] == pytest.approx(2 * math.pi)


@pytest.mark.parametrize("M", [0, 2, 7, 9, -4])
def test_grid_rejects_bad_sizes(M):
    with pytest.raises(ValueError):
        GridSpec(0.0, 1.0, M)


def test_grid_rejects_empty_domain():
    with pytest.raises(ValueError):
        GridSpec(1.0, 1.0, 8)


def test_constant_field_is_dc_mode(unit_grid):
    f = SpinorField.from_functions(unit_grid, lambda x: 2.5 + 0 * x, lambda x: 0 * x)
    c = to_spectral(f)
    assert c.coeff(0) == pytest.approx([2.5, 0])
    others = np.delete(c.coeffs, unit_grid.slot(0), axis=1)
    assert np.abs(others).max() < 1e-15


def test_single_mode_orthogonality():
    g = GridSpec(-1.0, 2.0, 16)
    mu1 = g.mu[g.slot(1)]
    f = SpinorField.from_functions(g, lambda x: np.exp(1j * mu1 * (x - g.a)), lambda x: 0 * x)
    c = to_spectral(f)
    expected = np.zeros((2, 16), complex)
    expected[0, g.slot(1)] = 1.0
    np.testing.assert_allclose(c.coeffs, expected, atol=1e-14)


def test_to_spectral_matches_naive_dft(rng, unit_grid):
    f = random_field(rng, unit_grid)
    np.testing.assert_allclose(to_spectral(f).coeffs, naive_dft(f.values), rtol=0, atol=1e-13)


def test_zero_coefficients_give_zero_field(unit_grid):
    assert np.all(to_physical(SpectralField(unit_grid, np.zeros((2, 8)))).values == 0)


def test_nyquist_mode_alternates():
    g = GridSpec(0.0, 1.0, 8)
    f = to_physical(SpectralField.from_modes(g, {-4: (1.0, 0.0)}))
    np.testing.assert_allclose(f.values[0], [(-1) ** j for j in range(8)], atol=1e-14)
    np.testing.assert_allclose(f.values[1], 0, atol=0)


@pytest.mark.parametrize("M", [4, 8, 16, 64, 256])
def test_roundtrip(rng, M):
    g = GridSpec(0.0, 2.0, M)
    f = random_field(rng, g)
    back = to_physical(to_spectral(f))
    assert np.linalg.norm(back.values - f.values) <= 1e-13 * np.linalg.norm(f.values)


def test_l2_norm_examples(rng, unit_grid):
    assert l2_norm(SpinorField.zeros(unit_grid)) == 0.0
    ones = SpinorField.from_functions(unit_grid, lambda x: 1 + 0 * x, lambda x: 0 * x)
    assert l2_norm(ones) == pytest.approx(1.0, rel=1e-15)
    f = random_field(rng, unit_grid)
    coeff_norm = np.sqrt(np.sum(np.abs(to_spectral(f).coeffs) ** 2))
    assert l2_norm(f) == pytest.approx(math.sqrt(unit_grid.length) * coeff_norm, rel=1e-13)


def test_sobolev_norm_examples(rng):
    g = GridSpec(0.0, 1.0, 16)
    single = SpectralField.from_modes(g, {1: (1.0, 0.0)})
    assert sobolev_norm(single, 1) == pytest.approx(math.sqrt(1 + 4 * math.pi**2), rel=1e-14)
    assert sobolev_norm(SpectralField(g, np.zeros((2, 16))), 3) == 0.0
    wide = GridSpec(0.0, 3.0, 16)
    f = random_field(rng, wide)
    assert math.sqrt(wide.length) * sobolev_norm(to_spectral(f), 0) == pytest.approx(l2_norm(f), rel=1e-13)
    with pytest.raises(ValueError):
        sobolev_norm(single, -1)


def test_sobolev_norm_increases_with_m(rng):
    g = GridSpec(0.0, 1.0, 32)
    c = to_spectral(random_field(rng, g))
    norms = [sobolev_norm(c, m) for m in range(4)]
    assert norms == sorted(norms)


def test_project_examples(rng):
    g = GridSpec(0.0, 1.0, 16)
    c = to_spectral(random_field(rng, g))
    np.testing.assert_array_equal(project(c, 16).coeffs, c.coeffs)
    top = SpectralField.from_modes(g, {7: (1.0, 2.0)})
    assert np.all(project(top, 8).coeffs == 0)
    assert sobolev_norm(project(c, 6), 0) <= sobolev_norm(c, 0)


@pytest.mark.parametrize("M0", [3, 18, 0, 5])
def test_project_rejects_bad_cutoff(M0):
    g = GridSpec(0.0, 1.0, 16)
    with pytest.raises(ValueError):
        project(SpectralField(g, np.zeros((2, 16))), M0)


def test_interpolation_is_exact_on_resolved_modes(rng):
    coarse = GridSpec(0.0, 1.0, 8)
    fine = GridSpec(0.0, 1.0, 32)
    c = SpectralField(coarse, to_spectral(random_field(rng, coarse)).coeffs)
    up = resample(c, fine)
    for l in coarse.mode_range():
        np.testing.assert_array_equal(up.coeff(l), c.coeff(l))
    down = resample(up, coarse)
    np.testing.assert_array_equal(down.coeffs, c.coeffs)
    # the fine samples of a band-limited field are the interpolant at the fine nodes
    f = to_physical(c)
    mu = coarse.mu
    direct = np.einsum("cl,lj->cj", c.coeffs, np.exp(1j * np.outer(mu, fine.x - fine.a)))
    np.testing.assert_allclose(interpolate(f, fine).values, direct, atol=1e-13)


def test_resample_rejects_other_domain():
    c = SpectralField(GridSpec(0.0, 1.0, 8), np.zeros((2, 8)))
    with pytest.raises(GridMismatchError):
        resample(c, GridSpec(0.0, 2.0, 16))


def test_fields_are_immutable(rng, unit_grid):
    f = random_field(rng, unit_grid)
    with pytest.raises(ValueError):
        f.values[0, 0] = 1.0
    with pytest.raises(ValueError):
        to_spectral(f).coeffs[0, 0] = 1.0


def test_field_arithmetic_checks_grids(rng, unit_grid):
    f = random_field(rng, unit_grid)
    other = random_field(rng, GridSpec(0.0, 1.0, 16))
    with pytest.raises(GridMismatchError):
        f - other


seeds = st.integers(0, 2**32 - 1)
sizes = st.sampled_from([4, 8, 64, 256])


@settings(max_examples=40, deadline=None)
@given(seed=seeds, M=sizes)
def test_property_roundtrip_and_parseval(seed, M):
    rng = np.random.default_rng(seed)
    g = GridSpec(-0.5, 1.5, M)
    f = random_field(rng, g)
    c = to_spectral(f)
    back = to_physical(c)
    assert np.linalg.norm(back.values - f.values) <= 1e-13 * np.linalg.norm(f.values)
    parseval = g.length * np.sum(np.abs(c.coeffs) ** 2)
    assert l2_norm(f) ** 2 == pytest.approx(parseval, rel=1e-12)


@settings(max_examples=30, deadline=None)
@given(seed=seeds, M=sizes, alpha=st.complex_numbers(max_magnitude=10), beta=st.complex_numbers(max_magnitude=10))
def test_property_linearity(seed, M, alpha, beta):
    rng = np.random.default_rng(seed)
    g = GridSpec(0.0, 1.0, M)
    f, h = random_field(rng, g), random_field(rng, g)
    lhs = to_spectral(alpha * f + beta * h).coeffs
    rhs = alpha * to_spectral(f).coeffs + beta * to_spectral(h).coeffs
    scale = max(1.0, abs(alpha) + abs(beta)) * max(np.abs(f.values).max(), np.abs(h.values).max())
    assert np.abs(lhs - rhs).max() <= 1e-13 * scale


@settings(max_examples=30, deadline=None)
@given(seed=seeds, M=sizes, data=st.data())
def test_property_projection_idempotent_and_contracting(seed, M, data):
    M0 = data.draw(st.sampled_from([m for m in range(2, M + 1, 2)]))
    rng = np.random.default_rng(seed)
    c = to_spectral(random_field(rng, GridSpec(0.0, 1.0, M)))
    once = project(c, M0)
    np.testing.assert_array_equal(project(once, M0).coeffs, once.coeffs)
    assert sobolev_norm(once, 0) <= sobolev_norm(c, 0) * (1 + 1e-15)
