import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from symplecta.core import DominatingProduct, canonical_form, purify, random_instance
from symplecta.errors import EmptyRegion, FullRegion, NotPure, StepOutOfRange
from symplecta.lattice import build_lattice, ultrastatic_vacuum_gram
from symplecta.quasifree import (
    QuasifreeState,
    arcs,
    intersection_dim,
    local_probe,
    mu_orthonormalize,
    mu_principal_angles,
    one_particle,
    recover_mu,
    recover_sigma,
    same_subspace,
    symplectic_complement,
    weyl_product_value,
    weyl_value,
)

J2 = canonical_form(1)
HALF = QuasifreeState(DominatingProduct(0.5 * np.eye(2), J2))


def test_weyl_value_examples():
    assert weyl_value(HALF, [0, 0]) == 1.0
    assert weyl_value(HALF, [1, 0]) == pytest.approx(np.exp(-0.25))
    phi = np.array([0.3, -0.8])
    vals = [weyl_value(HALF, t * phi) for t in (0.5, 1.0, 2.0)]
    assert vals[0] > vals[1] > vals[2]


def test_weyl_product_value_examples():
    phi, psi = np.array([1.0, 0.2]), np.array([-0.4, 0.9])
    assert weyl_product_value(HALF, phi, psi, 0.0, 0.7) == pytest.approx(weyl_value(HALF, 0.7 * psi))
    same = weyl_product_value(HALF, phi, phi, 0.4, 0.9)
    assert same.imag == pytest.approx(0.0, abs=1e-15)
    assert abs(weyl_product_value(HALF, phi, psi, 1.3, -2.0)) <= 1.0


def test_recover_mu_examples():
    e1, e2 = np.eye(2)
    assert recover_mu(HALF, e1, e1, 1e-3) == pytest.approx(0.5, abs=1e-6)
    # mu-orthogonal pair with zero symplectic pairing
    G = QuasifreeState(DominatingProduct(np.eye(4), canonical_form(2)))
    a, b = np.eye(4)[0], np.eye(4)[1]
    assert abs(recover_mu(G, a, b)) < 1e-6
    assert recover_sigma(HALF, e1, e2) == pytest.approx(1.0, abs=1e-6)


def test_recover_mu_step_range():
    e1 = np.eye(2)[0]
    with pytest.raises(StepOutOfRange):
        recover_mu(HALF, e1, e1, 1e-6)
    with pytest.raises(StepOutOfRange):
        recover_sigma(HALF, e1, e1, 0.1)


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 10**6), n=st.integers(1, 5), mix=st.floats(0.0, 1.5))
def test_weyl_round_trip(seed, n, mix):
    G = random_instance(seed, n, mix=mix)
    st_ = QuasifreeState(G)
    rng = np.random.default_rng(seed)
    phi, psi = rng.standard_normal((2, 2 * n))
    phi /= np.linalg.norm(phi)
    psi /= np.linalg.norm(psi)
    assert recover_mu(st_, phi, psi) == pytest.approx(G(phi, psi), abs=1e-6)
    assert recover_sigma(st_, phi, psi) == pytest.approx(G.form(phi, psi), abs=1e-6)


# -- one-particle structure ----------------------------------------------


def test_one_particle_for_half_identity():
    op = one_particle(HALF)
    assert np.allclose(op.Jc, -J2.J)
    e1, e2 = np.eye(2)
    assert op.inner(e1, e1) == pytest.approx(0.5)
    assert op.inner(e1, e2) == pytest.approx(0.5j)


def test_one_particle_needs_pure_state():
    with pytest.raises(NotPure):
        one_particle(QuasifreeState(DominatingProduct(np.diag([2.0, 0.5]), J2)))


@settings(max_examples=25, deadline=None)
@given(seed=st.integers(0, 10**6), n=st.integers(1, 6))
def test_one_particle_structure_identities(seed, n):
    G = purify(random_instance(seed, n, mix=0.8))
    op = one_particle(QuasifreeState(G))
    I = np.eye(2 * n)
    Jc = op.Jc
    assert np.abs(Jc @ Jc + I).max() <= 1e-10
    assert np.abs(Jc.T @ G.G @ Jc - G.G).max() <= 1e-10 * np.abs(G.G).max()
    assert np.abs(Jc.T @ G.form.J @ Jc - G.form.J).max() <= 1e-10
    gram = np.array([[op.inner(x, y) for y in I] for x in I])
    assert np.abs(gram - (G.G + 0.5j * G.form.J)).max() <= 1e-10
    x, y = np.random.default_rng(seed).standard_normal((2, 2 * n))
    assert op.inner(x, op.mul_i(y)) == pytest.approx(1j * op.inner(x, y), abs=1e-9)
    assert op.inner(op.mul_i(x), y) == pytest.approx(-1j * op.inner(x, y), abs=1e-9)
    assert op.inner(x, x).real == pytest.approx(G(x, x)) and op.inner(x, x).real > 0


# -- complements and angles ----------------------------------------------


def test_complement_extremes():
    op = one_particle(HALF)
    assert symplectic_complement(op, np.eye(2)).shape[1] == 0
    assert symplectic_complement(op, []).shape[1] == 2
    line = symplectic_complement(op, [np.array([1.0, 0.0])])
    assert line.shape[1] == 1
    assert abs(line[1, 0]) < 1e-15


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 10**6), n=st.integers(1, 6), data=st.data())
def test_complement_dimension_and_involution(seed, n, data):
    G = purify(random_instance(seed, n, mix=0.5))
    op = one_particle(QuasifreeState(G))
    k = data.draw(st.integers(1, 2 * n))
    B = np.random.default_rng(seed).standard_normal((2 * n, k))
    C = symplectic_complement(op, B)
    assert C.shape[1] + k == 2 * n
    if C.size:
        assert np.abs(B.T @ G.form.J @ C).max() <= 1e-9
    assert np.allclose(C.T @ G.G @ C, np.eye(C.shape[1]), atol=1e-10)
    assert same_subspace(symplectic_complement(op, C), B, G.G)


def test_principal_angles_known_case():
    G = np.eye(3)
    a = np.array([[1.0], [0.0], [0.0]])
    b = np.array([[1.0], [1.0], [0.0]])
    assert mu_principal_angles(a, b, G) == pytest.approx([np.pi / 4])
    assert intersection_dim(a, np.hstack([a, b]), G) == 1
    assert mu_principal_angles(a, np.zeros((3, 0)), G).size == 0


def test_mu_orthonormalize_drops_dependent_columns():
    G = np.diag([1.0, 4.0, 9.0])
    B = np.array([[1.0, 2.0], [1.0, 2.0], [0.0, 0.0]])
    Q = mu_orthonormalize(B, G)
    assert Q.shape[1] == 1
    assert (Q.T @ G @ Q).item() == pytest.approx(1.0)


# -- local probes ---------------------------------------------------------


@pytest.fixture(scope="module")
def vacuum_ring():
    model = build_lattice(16, 10 / 16)
    st_ = QuasifreeState(ultrastatic_vacuum_gram(model))
    return model, st_, one_particle(st_)


def test_half_circle_probe(vacuum_ring):
    model, st_, op = vacuum_ring
    rep = local_probe(model, st_, range(8), op)
    assert rep.intersection_rank == 0
    assert rep.dims == (16, 16)
    assert rep.region == tuple(range(8))
    assert 0 < rep.min_principal_angle <= np.pi / 2
    assert rep.duality_gap >= 0


def test_probe_region_guards(vacuum_ring):
    model, st_, op = vacuum_ring
    with pytest.raises(FullRegion):
        local_probe(model, st_, range(16), op)
    with pytest.raises(EmptyRegion):
        local_probe(model, st_, [], op)


def test_arcs_enumeration():
    a = arcs(8)
    assert len(a) == 8 * 7
    assert (7, 0) not in a and (0, 7) in a
    assert all(len(set(x)) == len(x) for x in a)
