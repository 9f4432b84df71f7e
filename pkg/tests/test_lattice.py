import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from symplecta.core import check_domination, classify, purify, relative_frobenius, scaled_product
from symplecta.errors import DominationFails, EmptyRegion, NonPositivePotential, PotentialUndefined
from symplecta.lattice import (
    CauchyData,
    build_lattice,
    cauchy_form,
    default_cutoff,
    energy_estimate_constants,
    energy_gram,
    evolution_matrix,
    evolution_matrix_inverse,
    evolve,
    light_cone_leakage,
    multiplier_bound,
    periodic_spectrum,
    cutoff_continuity_report,
    region_basis,
    scaled_energy_closed_form,
    sobolev_gram,
    ultrastatic_vacuum_gram,
)


@pytest.fixture(scope="module")
def ring():
    return build_lattice(32, 0.3)


def test_constants_are_unit_eigenvectors(ring):
    assert np.allclose(ring.A @ np.ones(ring.N), np.ones(ring.N))
    assert np.allclose(ring.Delta.sum(axis=1), 0.0)


def test_spectrum_matches_closed_form():
    model = build_lattice(8, 1.0)
    assert np.allclose(np.sort(model.spectral.eigvals), np.sort(periodic_spectrum(8, 1.0)))
    assert model.spectral.eigvals[0] >= 1.0 - 1e-12


def test_potential_guards():
    with pytest.raises(NonPositivePotential):
        build_lattice(16, 0.5, 0.0)
    with pytest.raises(ValueError):
        build_lattice(4, 0.5)
    with pytest.raises(ValueError):
        build_lattice(16, -1.0)


def test_per_site_potential_sets_lower_bound():
    r = 1.0 + np.linspace(0, 2, 16)
    model = build_lattice(16, 0.5, r)
    assert model.spectral.eigvals[0] >= r.min() - 1e-12


# -- Sobolev scale --------------------------------------------------------


def test_sobolev_gram_orders(ring):
    assert np.allclose(sobolev_gram(ring, 0).Gram, ring.h * np.eye(ring.N))
    lam, Q = ring.spectral.eigvals, ring.spectral.eigvecs
    k = 5
    e = Q[:, k]
    assert e @ sobolev_gram(ring, 2).Gram @ e == pytest.approx(ring.h * lam[k] ** 2)
    prod = sobolev_gram(ring, 0.7).Gram @ sobolev_gram(ring, -0.7).Gram
    assert np.allclose(prod, ring.h**2 * np.eye(ring.N), atol=1e-11)


# -- forms and products ---------------------------------------------------


def test_cauchy_form_pairings(ring):
    form = cauchy_form(ring)
    N = ring.N
    e = np.eye(2 * N)
    assert form(e[3], e[N + 3]) == pytest.approx(ring.h)
    x = np.random.default_rng(0).standard_normal(2 * N)
    assert abs(form(x, x)) < 1e-14
    assert form(e[1], e[4]) == 0.0


def test_energy_product_blocks(ring):
    E = energy_gram(ring)
    ok, margin = check_domination(E.G, E.form)
    assert ok and margin >= 0
    lam, Q = ring.spectral.eigvals, ring.spectral.eigvecs
    x = np.concatenate([Q[:, 4], np.zeros(ring.N)])
    assert E(x, x) == pytest.approx(ring.h * lam[4])
    Ainv = np.linalg.inv(ring.A)
    N = ring.N
    expected = 0.5 * np.block([[np.zeros((N, N)), Ainv], [-np.eye(N), np.zeros((N, N))]])
    assert np.allclose(E.polarizator.R, expected, atol=1e-12)
    half_root = 0.5 * ring.spectral.power(-0.5)
    assert np.allclose(E.polarizator.absR, np.block([[half_root, 0 * Ainv], [0 * Ainv, half_root]]), atol=1e-12)
    # the lowest mode has lambda = 1, so ||R|| = 1/2 rather than 1
    assert E.polarizator.norm == pytest.approx(0.5, abs=1e-12)


def test_energy_product_requires_spectral_gap():
    with pytest.raises(DominationFails):
        energy_gram(build_lattice(16, 0.5, 0.5))


def test_vacuum_is_pure_and_matches_mode_formula(ring):
    vac = ultrastatic_vacuum_gram(ring)
    assert classify(vac).is_pure
    R = vac.polarizator.R
    assert np.allclose(R @ R, -np.eye(2 * ring.N), atol=1e-10)
    lam, Q = ring.spectral.eigvals, ring.spectral.eigvecs
    a, b, k = 0.7, -1.3, 6
    x = np.concatenate([a * Q[:, k], b * Q[:, k]])
    expected = 0.5 * ring.h * (np.sqrt(lam[k]) * a**2 + b**2 / np.sqrt(lam[k]))
    assert vac(x, x) == pytest.approx(expected, rel=1e-12)


@pytest.mark.parametrize("N", [16, 48])
def test_purified_energy_is_the_vacuum(N):
    model = build_lattice(N, 5.0 / N)
    assert relative_frobenius(purify(energy_gram(model)).G, ultrastatic_vacuum_gram(model).G) < 1e-9


@pytest.mark.parametrize("s", [0.0, 0.5, 1.0, 1.5, 2.0])
def test_scaled_energy_closed_form(ring, s):
    assert relative_frobenius(scaled_product(energy_gram(ring), s), scaled_energy_closed_form(ring, s)) < 1e-9


# -- evolution ------------------------------------------------------------


def test_zero_time_is_identity(ring):
    assert np.allclose(evolution_matrix(ring, 1.0, 1.0), np.eye(2 * ring.N))


def test_mode_oscillates_with_its_frequency(ring):
    lam, Q = ring.spectral.eigvals, ring.spectral.eigvecs
    k, t = 3, 0.83
    out = evolve(ring, 0.0, t, CauchyData(Q[:, k], np.zeros(ring.N)))
    assert np.allclose(out.u0, np.cos(t * np.sqrt(lam[k])) * Q[:, k], atol=1e-12)
    zero = evolve(ring, 0.0, t, CauchyData(np.zeros(ring.N), np.zeros(ring.N)))
    assert not zero.vector.any()


def test_mode_block_is_a_rescaled_rotation(ring):
    lam, Q = ring.spectral.eigvals, ring.spectral.eigvecs
    k, t = 7, 1.1
    w = np.sqrt(lam[k])
    T = evolution_matrix(ring, 0.0, t)
    P = np.zeros((2 * ring.N, 2))
    P[: ring.N, 0] = Q[:, k]
    P[ring.N :, 1] = Q[:, k]
    block = P.T @ T @ P
    D = np.diag([np.sqrt(w), 1 / np.sqrt(w)])
    rot = D @ block @ np.linalg.inv(D)
    assert np.allclose(rot @ rot.T, np.eye(2), atol=1e-12)
    assert np.linalg.det(rot) == pytest.approx(1.0)


def test_evolve_agrees_with_matrix(ring):
    x = np.random.default_rng(1).standard_normal(2 * ring.N)
    T = evolution_matrix(ring, 0.0, 2.0)
    assert np.allclose(evolve(ring, 0.0, 2.0, CauchyData.from_vector(x)).vector, T @ x, atol=1e-10)


@settings(max_examples=15, deadline=None)
@given(t=st.floats(0.0, 5.0), seed=st.integers(0, 1000))
def test_evolution_is_symplectic_and_conserves_energy(t, seed):
    model = build_lattice(24, 0.4)
    T = evolution_matrix(model, 0.0, t)
    J = cauchy_form(model).J
    assert np.abs(T.T @ J @ T - J).max() <= 1e-10 * np.abs(J).max()
    E = energy_gram(model)
    x = np.random.default_rng(seed).standard_normal(2 * model.N)
    assert abs(E(T @ x, T @ x) - E(x, x)) <= 1e-10 * E(x, x)


def test_piecewise_evolution_composes():
    model = build_lattice(24, 0.4, [(0.0, 1.0), (1.0, 4.0)])
    T = evolution_matrix(model, 0.0, 2.0)
    J = cauchy_form(model).J
    assert np.abs(T.T @ J @ T - J).max() <= 1e-10 * np.abs(J).max()
    split = evolution_matrix(model, 0.5, 2.0) @ evolution_matrix(model, 0.0, 0.5)
    assert np.allclose(T, split, atol=1e-10)
    assert np.allclose(evolution_matrix_inverse(T, model) @ T, np.eye(48), atol=1e-10)
    assert not model.time_independent
    with pytest.raises(PotentialUndefined):
        evolution_matrix(model, -1.0, 0.5)


# -- energy estimates and the cutoff experiment --------------------------


def test_energy_constants_constant_potential(ring):
    c1, c2 = energy_estimate_constants(ring, 0.0, 1.3, range(5))
    assert c1 == pytest.approx(1.0, abs=1e-10) and c2 == pytest.approx(1.0, abs=1e-10)
    with pytest.raises(EmptyRegion):
        energy_estimate_constants(ring, 0.0, 1.0, [])


def test_energy_constants_potential_step():
    model = build_lattice(32, 0.3, [(0.0, 1.0), (0.5, 4.0)])
    c1, c2 = energy_estimate_constants(model, 0.0, 1.5, range(8))
    assert 0.25 - 1e-12 <= c1 <= c2 <= 4.0 + 1e-12
    same = energy_estimate_constants(model, 0.7, 0.7, range(8))
    assert same == pytest.approx((1.0, 1.0))


def test_cutoff_experiment_constant_potential():
    model = build_lattice(32, 0.3)
    rep = cutoff_continuity_report(model, 0.0, 1.0, region=range(8))
    assert rep.passed
    assert max(rep.region_norms + rep.full_norms) <= 1 + 1e-9
    # the cutoff itself costs energy, so only the interpolated bound applies to chi T chi
    assert all(m <= b * (1 + 1e-9) for m, b in zip(rep.cutoff_norms_V, rep.bounds_V))
    assert rep.s_grid == [2.0, 1.5, 1.0, 0.5, 0.0]
    k = rep.hadamard_index
    assert rep.tau_grid[k] == 0.5
    assert rep.bounds_V[k] == pytest.approx(np.sqrt(rep.v * rep.w))
    assert rep.bounds_V[-1] == pytest.approx(rep.v)


def test_cutoff_experiment_piecewise_potential():
    model = build_lattice(32, 0.3, [(0.0, 1.0), (0.5, 16.0), (1.0, 1.0)])
    rep = cutoff_continuity_report(model, 0.0, 1.5, region=range(8))
    assert rep.identity_ok and rep.bounds_ok
    assert rep.max_violation <= 1e-8


def test_multiplier_bound_examples(ring):
    assert multiplier_bound(ring, np.ones(ring.N), 1.3) == pytest.approx(1.0)
    chi = default_cutoff(ring, range(4))
    assert multiplier_bound(ring, chi, 0.0) == pytest.approx(np.abs(chi).max())
    c0, c2 = multiplier_bound(ring, chi, 0.0), multiplier_bound(ring, chi, 2.0)
    for m in (0.25, 0.5, 1.0, 1.5):
        assert multiplier_bound(ring, chi, m) <= c2 ** (m / 2) * c0 ** (1 - m / 2) * (1 + 1e-9)


def test_cutoff_profile(ring):
    chi = default_cutoff(ring, [10, 11, 12])
    assert chi[10:13].tolist() == [1.0, 1.0, 1.0]
    assert chi.min() == 0.0 and chi.max() == 1.0


def test_region_basis_shape(ring):
    E = region_basis(ring, [2, 0, 2])
    assert E.shape == (2 * ring.N, 4)
    assert E.sum() == 4


def test_light_cone_leakage_is_small_outside_the_cone():
    model = build_lattice(128, 0.1)
    x = model.x
    bump = np.exp(-(((x - x[64]) / 0.3) ** 2))
    rep = light_cone_leakage(model, CauchyData(bump, np.zeros(128)), [64], 2.0, slack=0.5)
    assert 0.0 <= rep.outside_fraction < 0.2
