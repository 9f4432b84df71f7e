"""Quasifree states, one-particle structures and local subspace probes.

A dominating product ``mu`` defines the Gaussian state ``W(phi) -> exp(-mu(phi,phi)/2)``
on the Weyl algebra with ``W(phi) W(psi) = exp(-i sigma(phi,psi)/2) W(phi + psi)``.
Only these one-particle quantities are modelled; the algebra itself is not.

Convention for the one-particle structure of a pure product: complex
multiplication is ``i.x := Jc x`` with ``Jc = -R_mu`` and the inner product
``<x, y> = mu(x, y) + (i/2) sigma(x, y)`` is antilinear in its first slot, so
``<x, Jc y> = i <x, y>`` and ``<Jc x, y> = -i <x, y>``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Iterable

import numpy as np
import scipy.linalg as sla

from .core import DominatingProduct, SymplecticForm, classify
from .errors import FullRegion, NotPure, StepOutOfRange
from .lattice import LatticeModel, _region_sites, region_basis

STEP_RANGE = (1e-5, 1e-2)


@dataclass(frozen=True, eq=False)
class QuasifreeState:
    G: DominatingProduct

    @property
    def form(self) -> SymplecticForm:
        return self.G.form

    @property
    def dim(self) -> int:
        return self.G.dim


def weyl_value(state: QuasifreeState, phi) -> float:
    phi = np.asarray(phi, dtype=float)
    return float(np.exp(-0.5 * state.G(phi, phi)))


def weyl_product_value(state: QuasifreeState, phi, psi, t: float, tau: float) -> complex:
    """``omega(W(t phi) W(tau psi))``."""
    phi = np.asarray(phi, dtype=float)
    psi = np.asarray(psi, dtype=float)
    z = t * phi + tau * psi
    phase = np.exp(-0.5j * t * tau * state.form(phi, psi))
    return complex(phase * np.exp(-0.5 * state.G(z, z)))


def mixed_derivative(state: QuasifreeState, phi, psi, step: float) -> complex:
    """``d/dt d/dtau omega(W(t phi) W(tau psi))`` at the origin.

    Central four-point mixed difference at ``step`` and ``step/2``, combined by
    one Richardson step so the truncation error is ``O(step^4)``.
    """

    def central(e):
        f = lambda a, b: weyl_product_value(state, phi, psi, a, b)
        return (f(e, e) - f(e, -e) - f(-e, e) + f(-e, -e)) / (4 * e * e)

    return (4 * central(step / 2) - central(step)) / 3


def recover_mu(state: QuasifreeState, phi, psi, step: float = 1e-3) -> float:
    """``mu(phi, psi)`` from the state's Weyl values.

    The mixed derivative equals ``-mu(phi, psi) - (i/2) sigma(phi, psi)``, hence
    ``mu`` is minus its real part.
    """
    if not STEP_RANGE[0] <= step <= STEP_RANGE[1]:
        raise StepOutOfRange(f"step {step} outside [{STEP_RANGE[0]}, {STEP_RANGE[1]}]")
    return -mixed_derivative(state, phi, psi, step).real


def recover_sigma(state: QuasifreeState, phi, psi, step: float = 1e-3) -> float:
    if not STEP_RANGE[0] <= step <= STEP_RANGE[1]:
        raise StepOutOfRange(f"step {step} outside [{STEP_RANGE[0]}, {STEP_RANGE[1]}]")
    return -2.0 * mixed_derivative(state, phi, psi, step).imag


@dataclass(frozen=True, eq=False)
class OneParticleStructure:
    Jc: np.ndarray
    metric: np.ndarray
    form: SymplecticForm

    def inner(self, x, y) -> complex:
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        return complex(x @ self.metric @ y, 0.5 * self.form(x, y))

    def mul_i(self, x) -> np.ndarray:
        return self.Jc @ np.asarray(x, dtype=float)

    @cached_property
    def cholesky(self) -> np.ndarray:
        return np.linalg.cholesky(self.metric)

    def gram(self) -> np.ndarray:
        """Complex matrix of ``<e_j, e_k>`` on the standard basis."""
        return self.metric + 0.5j * self.form.J


def one_particle(state: QuasifreeState) -> OneParticleStructure:
    cls = classify(state.G)
    if not cls.is_pure:
        raise NotPure(f"state is {cls.tag} (involution defect {cls.involution_defect:.3e})")
    return OneParticleStructure(-np.array(state.G.polarizator.R), np.array(state.G.G), state.form)


def _as_columns(basis, dim: int) -> np.ndarray:
    if isinstance(basis, np.ndarray) and basis.ndim == 2:
        B = basis.astype(float)
    else:
        vecs = [np.asarray(v, dtype=float) for v in basis]
        B = np.column_stack(vecs) if vecs else np.zeros((dim, 0))
    if B.shape[0] != dim:
        raise ValueError(f"basis vectors must have length {dim}")
    return B


def mu_orthonormalize(B: np.ndarray, G: np.ndarray, rank_tol: float = 1e-10,
                      L: np.ndarray | None = None) -> np.ndarray:
    """mu-orthonormal basis of ``span(B)`` (columns)."""
    if B.shape[1] == 0:
        return B
    L = np.linalg.cholesky(G) if L is None else L
    Q, R, _ = sla.qr(L.T @ B, mode="economic", pivoting=True)
    diag = np.abs(np.diag(R))
    rank = int(np.sum(diag > rank_tol * diag[0])) if diag.size and diag[0] > 0 else 0
    return sla.solve_triangular(L.T, Q[:, :rank], lower=False)


def symplectic_complement(structure: OneParticleStructure, basis) -> np.ndarray:
    """mu-orthonormal basis of ``{chi : sigma(chi, phi) = 0 for all phi in span(basis)}``.

    Since ``Im<chi, phi> = sigma(chi, phi) / 2`` this is the complement taken
    with respect to the imaginary part of the one-particle inner product.
    """
    J = structure.form.J
    dim = J.shape[0]
    B = _as_columns(basis, dim)
    if B.shape[1] == 0:
        K = np.eye(dim)
    else:
        # chi^T J B = 0  <=>  chi orthogonal to span(J B)
        Q, R, _ = sla.qr(J @ B, pivoting=True)
        diag = np.abs(np.diag(R))
        rank = int(np.sum(diag > 1e-10 * diag[0])) if diag.size and diag[0] > 0 else 0
        K = Q[:, rank:]
    return mu_orthonormalize(K, structure.metric, L=structure.cholesky)


def _frame(B: np.ndarray, L: np.ndarray) -> np.ndarray:
    return np.linalg.qr(L.T @ B)[0]


def _frame_angles(Q1: np.ndarray, Q2: np.ndarray) -> np.ndarray:
    if Q1.shape[1] < Q2.shape[1]:
        Q1, Q2 = Q2, Q1
    cross = Q1.T @ Q2
    cos = np.clip(np.linalg.svd(cross, compute_uv=False), -1.0, 1.0)
    angles = np.arccos(cos)
    mask = cos**2 > 0.5
    if mask.any():
        sin = np.clip(np.linalg.svd(Q2 - Q1 @ cross, compute_uv=False), -1.0, 1.0)
        angles = np.where(mask, np.arcsin(np.sort(sin)), angles)
    return np.sort(angles)


def mu_principal_angles(B1: np.ndarray, B2: np.ndarray, G: np.ndarray,
                        L: np.ndarray | None = None) -> np.ndarray:
    """Principal angles (ascending) between two column spans in the mu-metric.

    Both bases must have full column rank.  Small angles come from sines,
    large ones from cosines, as in the usual Bjorck-Golub scheme.
    """
    if B1.shape[1] == 0 or B2.shape[1] == 0:
        return np.zeros(0)
    L = np.linalg.cholesky(G) if L is None else L
    return _frame_angles(_frame(B1, L), _frame(B2, L))


def intersection_dim(B1: np.ndarray, B2: np.ndarray, G: np.ndarray, angle_tol: float = 1e-6,
                     L: np.ndarray | None = None) -> int:
    return int(np.sum(mu_principal_angles(B1, B2, G, L) < angle_tol))


def same_subspace(B1: np.ndarray, B2: np.ndarray, G: np.ndarray, angle_tol: float = 1e-8) -> bool:
    r1 = np.linalg.matrix_rank(B1) if B1.size else 0
    r2 = np.linalg.matrix_rank(B2) if B2.size else 0
    if r1 != r2:
        return False
    if r1 == 0:
        return True
    return bool(mu_principal_angles(B1, B2, G).max() < angle_tol)


@dataclass(frozen=True)
class LocalProbeReport:
    region: tuple
    dims: tuple  # (dim F, dim F^v)
    intersection_rank: int
    min_principal_angle: float
    duality_gap: float


def local_probe(model: LatticeModel, state: QuasifreeState, region: Iterable[int],
                structure: OneParticleStructure | None = None,
                angle_tol: float = 1e-6) -> LocalProbeReport:
    """Finite-dimensional shadows of the factor and duality criteria for a site region.

    ``F`` is the Cauchy data supported in ``region``.  Reported are
    ``dim(F cap F^v)``, the smallest mu-principal angle between ``F`` and the
    data space of the complementary region, and ``duality_gap``, the sine of
    the largest principal angle between ``F^v`` and that complementary space.
    """
    sites = _region_sites(model, region)
    if sites.size >= model.N:
        raise FullRegion("region covers every site; its complement is empty")
    if structure is None:
        structure = one_particle(state)
    L = structure.cholesky
    F = region_basis(model, sites)
    Fv = symplectic_complement(structure, F)
    rest = np.setdiff1d(np.arange(model.N), sites)
    D = region_basis(model, rest)
    QF, QD = _frame(F, L), _frame(D, L)
    # Fv is already mu-orthonormal, so L^T Fv is an orthonormal frame
    QFv = L.T @ Fv
    meet = int(np.sum(_frame_angles(QF, QFv) < angle_tol)) if QFv.shape[1] else 0
    angles = _frame_angles(QF, QD)
    gap = float(np.sin(_frame_angles(QFv, QD).max())) if QFv.shape[1] == QD.shape[1] else 1.0
    return LocalProbeReport(tuple(int(s) for s in sites), (F.shape[1], Fv.shape[1]), meet,
                            float(angles.min()), gap)


def arcs(N: int) -> list[tuple[int, ...]]:
    """Every proper contiguous arc on the N-site circle."""
    out = []
    for length in range(1, N):
        for start in range(N):
            out.append(tuple(sorted((start + k) % N for k in range(length))))
    return out
