"""Symplectic forms, dominating scalar products and their polarizators.

Everything lives on ``R^{2n}``.  A symplectic form is an antisymmetric,
nondegenerate matrix ``J`` with ``sigma(x, y) = x^T J y``; a scalar product
is a symmetric positive definite Gram matrix ``G`` with ``mu(x, y) = x^T G y``.

``G`` dominates ``J`` when ``|sigma(x, y)|^2 <= 4 mu(x, x) mu(y, y)``.  The
polarizator ``R = 1/2 G^{-1} J`` is then a mu-antisymmetric contraction.
All spectral work on ``R`` is done in the mu-orthonormal frame obtained from
the Cholesky factor ``G = L L^T``, where ``R_hat = L^T R L^{-T}`` is an
ordinary skew-symmetric matrix.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass
from functools import cached_property
from typing import Optional

import numpy as np
import scipy.linalg as sla

from .errors import (
    Degenerate,
    DimensionMismatch,
    DominationFails,
    NegativeExponent,
    NonPrimaryInput,
    NotAntisymmetric,
    NotPositiveDefinite,
    NumericalFailure,
    OddDimension,
    SingularResult,
)

__all__ = [
    "Tolerances",
    "DEFAULT_TOL",
    "SymplecticForm",
    "DominatingProduct",
    "Polarizator",
    "StateClass",
    "canonical_form",
    "validate_symplectic",
    "dominating_product",
    "check_domination",
    "polarizator",
    "scaled_product",
    "abs_power_geig",
    "purify",
    "classify",
    "saturation_defect",
    "random_symplectic",
    "random_instance",
    "engineered_instance",
    "relative_frobenius",
]


@dataclass(frozen=True)
class Tolerances:
    degeneracy: float = 1e-10  # relative to the largest singular value of J
    domination: float = 1e-9
    classification: float = 1e-8
    metric: float = 1e-10
    verification: float = 1e-9

    def replace(self, **changes) -> "Tolerances":
        return dataclasses.replace(self, **changes)

    def as_dict(self) -> dict:
        return dataclasses.asdict(self)


DEFAULT_TOL = Tolerances()


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=float, copy=True)
    a.setflags(write=False)
    return a


def relative_frobenius(a: np.ndarray, b: np.ndarray) -> float:
    """||a - b||_F / ||b||_F (absolute if b vanishes)."""
    nb = np.linalg.norm(b)
    d = np.linalg.norm(np.asarray(a) - np.asarray(b))
    return float(d / nb) if nb > 0 else float(d)


@dataclass(frozen=True, eq=False)
class SymplecticForm:
    J: np.ndarray

    @property
    def dim(self) -> int:
        return self.J.shape[0]

    def __call__(self, x, y) -> float:
        return float(np.asarray(x) @ self.J @ np.asarray(y))

    @cached_property
    def inverse(self) -> np.ndarray:
        return np.linalg.inv(self.J)


def canonical_form(n: int, scale: float = 1.0) -> SymplecticForm:
    """``scale * [[0, I_n], [-I_n, 0]]``."""
    eye = np.eye(n)
    zero = np.zeros((n, n))
    return validate_symplectic(scale * np.block([[zero, eye], [-eye, zero]]))


def validate_symplectic(J, tol: Tolerances = DEFAULT_TOL) -> SymplecticForm:
    J = np.asarray(J, dtype=float)
    if J.ndim != 2 or J.shape[0] != J.shape[1]:
        raise DimensionMismatch(f"symplectic matrix must be square, got shape {J.shape}")
    if J.shape[0] < 2 or J.shape[0] % 2:
        raise OddDimension(f"dimension must be even and >= 2, got {J.shape[0]}")
    if np.any(J + J.T != 0):
        raise NotAntisymmetric("J + J^T is not exactly zero")
    sv = np.linalg.svd(J, compute_uv=False)
    if sv[0] == 0 or sv[-1] < tol.degeneracy * sv[0]:
        raise Degenerate(f"smallest singular value {sv[-1]:.3e} below threshold")
    return SymplecticForm(_frozen(J))


def _check_spd(G: np.ndarray, dim: Optional[int] = None) -> np.ndarray:
    G = np.asarray(G, dtype=float)
    if G.ndim != 2 or G.shape[0] != G.shape[1]:
        raise DimensionMismatch(f"Gram matrix must be square, got shape {G.shape}")
    if dim is not None and G.shape[0] != dim:
        raise DimensionMismatch(f"Gram matrix has dimension {G.shape[0]}, form has {dim}")
    scale = np.abs(G).max()
    if scale == 0 or np.abs(G - G.T).max() > 1e-12 * scale:
        raise NotPositiveDefinite("Gram matrix is zero or not symmetric")
    try:
        np.linalg.cholesky(G)
    except np.linalg.LinAlgError as exc:
        raise NotPositiveDefinite("Gram matrix is not positive definite") from exc
    return G


def _frame_skew(G: np.ndarray, J: np.ndarray):
    """Cholesky factor of G and the skew matrix 1/2 L^{-1} J L^{-T}."""
    L = np.linalg.cholesky(G)
    Li_J = sla.solve_triangular(L, J, lower=True)
    R_hat = 0.5 * sla.solve_triangular(L, Li_J.T, lower=True).T
    R_hat = 0.5 * (R_hat - R_hat.T)
    return L, R_hat


@dataclass(frozen=True, eq=False)
class Polarizator:
    """Polarizator of a dominating product together with its mu-polar factors.

    ``frame`` holds the orthogonal Schur basis ``Z`` of ``R_hat`` and
    ``moduli[i]`` is the |R|-eigenvalue attached to the i-th Schur column, so
    that ``|R_hat|^s = Z diag(moduli^s) Z^T``.
    """

    R: np.ndarray
    U: np.ndarray
    absR: np.ndarray
    spectrum: np.ndarray
    cholesky: np.ndarray
    R_hat: np.ndarray
    frame: np.ndarray
    moduli: np.ndarray

    @property
    def norm(self) -> float:
        return float(self.spectrum[0])

    @property
    def smallest(self) -> float:
        return float(self.spectrum[-1])

    def frame_power(self, s: float, threshold: float = DEFAULT_TOL.classification) -> np.ndarray:
        """``|R_hat|^s`` in the mu-orthonormal frame."""
        if s < 0:
            raise NegativeExponent(f"exponent must be >= 0, got {s}")
        if s == 0:
            return np.eye(len(self.moduli))
        if self.smallest <= threshold:
            raise SingularResult(
                f"|R| has eigenvalue {self.smallest:.3e} <= {threshold:.1e}; "
                "fractional power undefined for a non-primary product"
            )
        Z = self.frame
        P = (Z * self.moduli**s) @ Z.T
        return 0.5 * (P + P.T)

    def power(self, s: float, threshold: float = DEFAULT_TOL.classification) -> np.ndarray:
        """``|R|^s`` in the original coordinates."""
        L = self.cholesky
        P = self.frame_power(s, threshold)
        # L^{-T} P L^T
        return sla.solve_triangular(L.T, P @ L.T, lower=False)


def _schur_polar(R_hat: np.ndarray, tol: Tolerances):
    n = R_hat.shape[0]
    try:
        T, Z = sla.schur(R_hat, output="real")
    except (np.linalg.LinAlgError, ValueError) as exc:
        raise NumericalFailure("real Schur decomposition did not converge") from exc
    moduli = np.zeros(n)
    U_blk = np.zeros((n, n))
    i = 0
    while i < n:
        if i + 1 < n and T[i + 1, i] != 0.0:
            b, c = T[i, i + 1], T[i + 1, i]
            moduli[i] = moduli[i + 1] = np.sqrt(abs(b * c))
            sgn = 1.0 if b > 0 else -1.0
            U_blk[i, i + 1] = sgn
            U_blk[i + 1, i] = -sgn
            i += 2
        else:
            # real eigenvalue of a skew matrix: a kernel direction
            moduli[i] = abs(T[i, i])
            i += 1
    return Z, moduli, U_blk


@dataclass(frozen=True, eq=False)
class DominatingProduct:
    G: np.ndarray
    form: SymplecticForm
    tol: Tolerances = DEFAULT_TOL

    @property
    def dim(self) -> int:
        return self.G.shape[0]

    def __call__(self, x, y) -> float:
        return float(np.asarray(x) @ self.G @ np.asarray(y))

    @cached_property
    def polarizator(self) -> Polarizator:
        L, R_hat = _frame_skew(self.G, self.form.J)
        Z, moduli, U_blk = _schur_polar(R_hat, self.tol)
        absR_hat = (Z * moduli) @ Z.T
        absR_hat = 0.5 * (absR_hat + absR_hat.T)
        U_hat = Z @ U_blk @ Z.T

        def back(X):
            return sla.solve_triangular(L.T, X @ L.T, lower=False)

        R = 0.5 * np.linalg.solve(self.G, self.form.J)
        return Polarizator(
            R=_frozen(R),
            U=_frozen(back(U_hat)),
            absR=_frozen(back(absR_hat)),
            spectrum=_frozen(np.sort(moduli)[::-1]),
            cholesky=_frozen(L),
            R_hat=_frozen(R_hat),
            frame=_frozen(Z),
            moduli=_frozen(moduli),
        )


def dominating_product(G, form: SymplecticForm, tol: Tolerances = DEFAULT_TOL) -> DominatingProduct:
    """Validate ``G`` against ``form`` and wrap it; raises if domination fails."""
    ok, margin = check_domination(G, form, tol)
    if not ok:
        raise DominationFails(f"||R||_mu exceeds 1 by {-margin:.3e}")
    return DominatingProduct(_frozen(0.5 * (np.asarray(G) + np.asarray(G).T)), form, tol)


def check_domination(G, form: SymplecticForm, tol: Tolerances = DEFAULT_TOL) -> tuple[bool, float]:
    """Decide ``|sigma(x,y)|^2 <= 4 mu(x,x) mu(y,y)`` via ``||R||_mu <= 1``.

    Returns ``(dominates, margin)`` with ``margin = 1 - ||R||_mu``.
    """
    G = _check_spd(G, form.dim)
    _, R_hat = _frame_skew(0.5 * (G + G.T), form.J)
    norm = float(np.linalg.norm(R_hat, 2))
    margin = 1.0 - norm
    return margin >= -tol.domination, margin


def polarizator(product: DominatingProduct) -> Polarizator:
    return product.polarizator


def scaled_product(product: DominatingProduct, s: float) -> np.ndarray:
    """Gram matrix of ``mu_s(x, y) = mu(x, |R|^s y)``; ``s = 0`` returns ``G``."""
    if s < 0:
        raise NegativeExponent(f"exponent must be >= 0, got {s}")
    if s == 0:
        return np.array(product.G)
    pol = product.polarizator
    P = pol.frame_power(s, product.tol.classification)
    L = pol.cholesky
    Gs = L @ P @ L.T
    return 0.5 * (Gs + Gs.T)


def abs_power_geig(G, J, s: float) -> np.ndarray:
    """``|R|^s`` from the symmetric-definite problem ``1/4 J^T G^{-1} J v = nu G v``.

    Independent of the Cholesky/Schur route: the eigenvalues ``nu`` are the
    squares of the |R|-eigenvalues and ``V^T G V = I``.
    """
    G = np.asarray(G, dtype=float)
    J = np.asarray(J, dtype=float)
    K = 0.25 * J.T @ np.linalg.solve(G, J)
    K = 0.5 * (K + K.T)
    nu, V = sla.eigh(K, G)
    nu = np.clip(nu, 0.0, None)
    return (V * nu ** (s / 2)) @ V.T @ G


def purify(product: DominatingProduct) -> DominatingProduct:
    """The purification ``mu(x, |R| y)``; requires a primary product."""
    pol = product.polarizator
    if pol.smallest <= product.tol.classification:
        raise NonPrimaryInput(f"smallest |R| eigenvalue {pol.smallest:.3e} is below tolerance")
    return DominatingProduct(_frozen(scaled_product(product, 1.0)), product.form, product.tol)


@dataclass(frozen=True)
class StateClass:
    tag: str  # "pure" | "primary-not-pure" | "non-primary"
    smallest_abs: float
    involution_defect: float

    @property
    def is_pure(self) -> bool:
        return self.tag == "pure"

    @property
    def is_primary(self) -> bool:
        return self.tag != "non-primary"


def classify(product: DominatingProduct) -> StateClass:
    pol = product.polarizator
    n = product.dim
    defect = float(np.linalg.norm(pol.R_hat @ pol.R_hat + np.eye(n), 2))
    tol = product.tol.classification
    if defect <= tol:
        tag = "pure"
    elif pol.smallest > tol:
        tag = "primary-not-pure"
    else:
        tag = "non-primary"
    return StateClass(tag, pol.smallest, defect)


def saturation_defect(product: DominatingProduct, sample_count: int, seed: int = 0) -> float:
    """Largest ``mu(phi,phi) - sup_psi |sigma(phi,psi)|^2 / (4 mu(psi,psi))``.

    The supremum over psi is the exact value ``1/4 phi^T J G^{-1} J^T phi``.
    The sampled phi are the standard basis vectors first, then seeded random
    unit vectors.
    """
    if sample_count < 1:
        raise ValueError("sample_count must be >= 1")
    n = product.dim
    G, J = product.G, product.form.J
    D = G - 0.25 * J @ np.linalg.solve(G, J.T)
    k_basis = min(sample_count, n)
    phis = [np.eye(n)[:, :k_basis]]
    if sample_count > n:
        rng = np.random.default_rng(seed)
        extra = rng.standard_normal((n, sample_count - n))
        phis.append(extra / np.linalg.norm(extra, axis=0))
    Phi = np.hstack(phis)
    return float(np.max(np.einsum("ij,ik,kj->j", Phi, D, Phi)))


def random_symplectic(rng: np.random.Generator, n: int, squeeze: float = 2.0) -> np.ndarray:
    """Random symplectic matrix for the canonical form, ``O1 D O2``.

    ``O1, O2`` are orthogonal symplectic (real images of Haar-ish unitaries)
    and ``D = diag(d, 1/d)`` with ``log d`` uniform in ``[-log squeeze, log squeeze]``,
    so the condition number is at most ``squeeze**2``.
    """
    if squeeze < 1:
        raise ValueError("squeeze must be >= 1")

    def orth_symplectic():
        Z = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
        Q, Rq = np.linalg.qr(Z)
        Q = Q * (np.diag(Rq) / np.abs(np.diag(Rq)))
        X, Y = Q.real, Q.imag
        return np.block([[X, -Y], [Y, X]])

    logs = rng.uniform(-np.log(squeeze), np.log(squeeze), size=n)
    D = np.diag(np.concatenate([np.exp(logs), np.exp(-logs)]))
    return orth_symplectic() @ D @ orth_symplectic()


def random_instance(seed: int, n: int, squeeze: float = 2.0, mix: float = 0.0) -> DominatingProduct:
    """``G = 1/2 S^T S + mix * P`` on the canonical ``2n``-dimensional form.

    ``1/2 S^T S`` is the transport of the pure product ``1/2 I`` by a random
    symplectic ``S``; adding the positive semidefinite ``P`` keeps domination.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if mix < 0:
        raise ValueError("mix must be >= 0")
    rng = np.random.default_rng(seed)
    S = random_symplectic(rng, n, squeeze)
    B = rng.standard_normal((2 * n, 2 * n))
    G = 0.5 * S.T @ S + mix * (B @ B.T) / (2 * n)
    return DominatingProduct(_frozen(0.5 * (G + G.T)), canonical_form(n))


def engineered_instance(seed: int, n: int, c: float, squeeze: float = 2.0) -> DominatingProduct:
    """Product with ``|R| = c I``: ``G = S^T S / (2c)`` for random symplectic ``S``."""
    if not 0 < c <= 1:
        raise ValueError("c must lie in (0, 1]")
    rng = np.random.default_rng(seed)
    S = random_symplectic(rng, n, squeeze)
    G = S.T @ S / (2 * c)
    return DominatingProduct(_frozen(0.5 * (G + G.T)), canonical_form(n))
