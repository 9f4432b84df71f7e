import math

import numpy as np
import pytest

from symplecta.core import check_domination, classify, purify, relative_frobenius
from symplecta.errors import BumpLeavesDomain, GridTooCoarse
from symplecta.gallery import (
    bump,
    build_chirp_scenario,
    build_swap_scenario,
    chirp_growth_curve,
    loglog_slope,
    mode_eigenvalues,
    translate,
    translate_norms,
    swap_witness,
)
from symplecta.report import chirp_grid


@pytest.fixture(scope="module")
def chirp():
    return build_chirp_scenario(128, 8.0)


@pytest.fixture(scope="module")
def swap():
    return build_swap_scenario(128, 8.0)


# -- chirp ----------------------------------------------------------------


def test_chirp_is_symplectic(chirp):
    assert chirp.symplectic_residual() <= 1e-10
    assert chirp.form.dim == 256


def test_chirp_preserves_l2_and_form(chirp):
    rng = np.random.default_rng(0)
    for _ in range(5):
        phi, psi = rng.standard_normal((2, 2 * chirp.N))
        T = chirp.T
        assert chirp.mu_other(T @ phi) == pytest.approx(chirp.mu_other(phi), rel=1e-12)
        assert chirp.sigma(T @ phi, T @ psi) == pytest.approx(chirp.sigma(phi, psi), rel=1e-12, abs=1e-12)


def test_chirp_purifies_to_l2(chirp):
    G = chirp.product("mu")
    assert classify(G).tag == "primary-not-pure"
    assert relative_frobenius(purify(G).G, chirp.G_other.toarray()) < 1e-9
    # |R| is the inverse of A on each real component
    Ainv = np.linalg.inv(chirp.A.toarray())
    absR = G.polarizator.absR
    assert np.allclose(absR[: chirp.N, : chirp.N], Ainv, atol=1e-10)


def test_chirp_grid_guards():
    with pytest.raises(GridTooCoarse):
        build_chirp_scenario(32, 8.0)
    with pytest.raises(GridTooCoarse):
        build_chirp_scenario(64, 20.0)
    with pytest.raises(ValueError):
        build_chirp_scenario(128, 4.0)


def test_bump_profile():
    x = np.linspace(-2, 2, 9)
    b = bump(x, 1.0)
    assert b[4] == 1.0
    assert np.all(b[np.abs(x) >= 1.0] == 0.0)


def test_translate_guards(chirp):
    with pytest.raises(BumpLeavesDomain):
        translate(chirp, 1.0, 5.0)
    assert translate(chirp, 1.0, 0.0)[chirp.N :].sum() == 0.0


def test_phase_resolution_guard(chirp):
    with pytest.raises(GridTooCoarse):
        translate_norms(chirp, 1.0, 4.0)


def test_growth_base_case_and_invariance():
    N, L = chirp_grid(2.0, range(0, 13))
    sc = build_chirp_scenario(N, L)
    rows = [translate_norms(sc, 2.0, n) for n in range(0, 13)]
    assert 0 < rows[0].ratio < 10
    mu0 = rows[0].mu
    assert max(abs(r.mu - mu0) for r in rows) <= 1e-10 * mu0
    assert max(abs(r.purified_T - r.purified) for r in rows) <= 1e-12 * rows[0].purified
    assert all(b.ratio > a.ratio for a, b in zip(rows[1:], rows[2:]))


def test_growth_slope_near_two():
    translates = range(4, 25)
    N, L = chirp_grid(2.0, translates)
    curve = chirp_growth_curve(build_chirp_scenario(N, L), 2.0, translates)
    assert abs(loglog_slope(curve) - 2.0) <= 0.2


def test_chirp_grid_resolves_every_translate():
    N, L = chirp_grid(2.0, range(4, 25))
    h = 2 * L / (N + 1)
    assert 2 * (24 + 2) * h <= math.pi / 4
    assert (N + 1) / (2 * L) == int((N + 1) / (2 * L))


def test_loglog_slope_needs_points():
    assert loglog_slope([(1, 2.0), (2, 8.0)]) == pytest.approx(2.0)
    with pytest.raises(ValueError):
        loglog_slope([(0, 1.0), (1, 1.0)])


# -- swap -----------------------------------------------------------------


def test_swap_square_is_minus_identity(swap):
    assert np.abs(swap.T @ swap.T + np.eye(2 * swap.N)).max() <= 1e-10
    assert swap.symplectic_residual() <= 1e-10


def test_swap_is_mu_isometry(swap):
    rng = np.random.default_rng(3)
    for _ in range(100):
        phi = rng.standard_normal(2 * swap.N)
        assert swap.mu(swap.T @ phi) == pytest.approx(swap.mu(phi), rel=1e-10)


def test_pure_product_is_dominated(swap):
    ok, margin = check_domination(swap.G_other.toarray(), swap.form)
    assert ok and abs(margin) < 1e-12
    assert classify(swap.product("other")).is_pure
    ok_mu, _ = check_domination(swap.G_mu.toarray(), swap.form)
    assert ok_mu


def test_witness_ratios_are_eigenvalues(swap):
    lam = mode_eigenvalues(swap)
    wit = swap_witness(swap)
    assert [k for k, _ in wit] == list(range(swap.N))
    assert max(abs(r / lam[k] - 1) for k, r in wit) <= 1e-8
    assert wit[0][1] >= 1.0


def test_witness_grows_with_resolution(swap):
    small = max(r for _, r in swap_witness(swap))
    big = max(r for _, r in swap_witness(build_swap_scenario(256, 8.0)))
    assert big / small >= 3.0


def test_swap_guards():
    with pytest.raises(GridTooCoarse):
        build_swap_scenario(16, 8.0)
