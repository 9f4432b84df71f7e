"""Discretized counterexamples to relative continuity outside the mu_s family.

Complex functions on a Dirichlet grid over ``[-L, L]`` are stored as real
vectors ``(Re phi, Im phi)`` in ``R^{2N}``.  With ``<phi, psi> = h sum conj(phi) psi``
the symplectic form ``2 Im<phi, psi>`` is ``2h [[0, I], [-I, 0]]``.

* Chirp scenario: ``mu = Re<A phi, psi>`` with ``A = -d^2/dx^2 + 1``, its
  purification ``Re<phi, psi>``, and ``T = exp(-i x^2)``.  T is unitary, so it
  preserves the purified product, but ``mu(T phi_n, T phi_n)`` grows like
  ``n^2`` along translates ``phi_n``.
* Swap scenario: ``mu = <phi0, A psi0> + <phi1, psi1>``, the pure product
  ``mu' = Re<phi, psi>``, and ``T(phi0 + i phi1) = A^{-1/2} phi1 - i A^{1/2} phi0``.
  T is a mu-isometry with ``T^2 = -1``, yet its mu'-distortion on the A-eigenmode
  ``e_k`` is ``lambda_k``.

Matrices are kept sparse where possible so the chirp scenario can use fine
grids; dense forms are built lazily for the small-grid core checks.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Optional, Sequence

import numpy as np
import scipy.sparse as sp

from .core import DominatingProduct, SymplecticForm, validate_symplectic
from .errors import BumpLeavesDomain, GridTooCoarse

MIN_POINTS = 64
MAX_DENSE_POINTS = 2048
PHASE_LIMIT = np.pi / 4  # max phase increment 2|x|h per grid step at a bump


def _dense(M) -> np.ndarray:
    return M.toarray() if sp.issparse(M) else np.asarray(M)


def dirichlet_operator(N: int, h: float) -> sp.csr_matrix:
    """``-d^2/dx^2 + 1`` with zero boundary values outside the grid."""
    main = np.full(N, 2.0 / h**2 + 1.0)
    off = np.full(N - 1, -1.0 / h**2)
    return sp.diags([off, main, off], [-1, 0, 1], format="csr")


@dataclass(frozen=True, eq=False)
class GalleryScenario:
    name: str
    x: np.ndarray
    h: float
    L: float
    A: object  # sparse N x N
    J: object  # sparse 2N x 2N
    G_mu: object
    G_other: object  # purified product (chirp) or mu' (swap)
    T: object
    _cache: dict = field(default_factory=dict, repr=False)

    @property
    def N(self) -> int:
        return self.x.size

    @cached_property
    def form(self) -> SymplecticForm:
        return validate_symplectic(_dense(self.J))

    def product(self, which: str = "mu") -> DominatingProduct:
        G = self.G_mu if which == "mu" else self.G_other
        return DominatingProduct(_dense(G), self.form)

    def mu(self, phi, psi=None) -> float:
        psi = phi if psi is None else psi
        return float(phi @ (self.G_mu @ psi))

    def mu_other(self, phi, psi=None) -> float:
        psi = phi if psi is None else psi
        return float(phi @ (self.G_other @ psi))

    def sigma(self, phi, psi) -> float:
        return float(phi @ (self.J @ psi))

    def symplectic_residual(self) -> float:
        T, J = self.T, self.J
        D = T.T @ J @ T - J
        return float(abs(D).max() / abs(J).max()) if sp.issparse(D) else float(np.abs(D).max() / abs(J).max())


def _grid(N: int, L: float):
    if N < MIN_POINTS:
        raise GridTooCoarse(f"need at least {MIN_POINTS} grid points, got {N}")
    h = 2.0 * L / (N + 1)
    x = -L + h * np.arange(1, N + 1)
    return x, h


def _complex_form(N: int, h: float):
    I = sp.identity(N, format="csr")
    return (2.0 * h) * sp.bmat([[None, I], [-I, None]], format="csr")


def build_chirp_scenario(N: int, L: float) -> GalleryScenario:
    """Chirp scenario: ``(T phi)(x) = exp(-i x^2) phi(x)``.

    Requires the phase step ``2 L h`` at the domain edge to stay below pi.
    Choosing ``N + 1 = 2 L m`` with integer ``m`` makes integer translations
    exact grid shifts.
    """
    if L < 8:
        raise ValueError("L must be >= 8")
    x, h = _grid(N, L)
    if 2.0 * L * h > np.pi:
        raise GridTooCoarse(f"phase exp(-i x^2) aliases at the edge: 2Lh = {2 * L * h:.3f} > pi")
    A = dirichlet_operator(N, h)
    G_mu = h * sp.block_diag([A, A], format="csr")
    G_tilde = h * sp.identity(2 * N, format="csr")
    c, s = np.cos(x**2), np.sin(x**2)
    C, S = sp.diags(c), sp.diags(s)
    # (c - i s)(phi0 + i phi1) = (c phi0 + s phi1) + i (c phi1 - s phi0)
    T = sp.bmat([[C, S], [-S, C]], format="csr")
    return GalleryScenario("chirp", x, h, L, A, _complex_form(N, h), G_mu, G_tilde, T)


def bump(x, width: float = 1.0) -> np.ndarray:
    """``(1 - (x/w)^2)^4`` on ``|x| <= w``, zero elsewhere."""
    u = np.clip(1.0 - (np.asarray(x) / width) ** 2, 0.0, None)
    return u**4


def translate(scenario: GalleryScenario, bump_width: float, n: float) -> np.ndarray:
    """Real-valued translate ``phi(x - n)`` as a ``2N`` vector."""
    margin = 3.0 * bump_width
    if abs(n) + bump_width > scenario.L - margin:
        raise BumpLeavesDomain(
            f"translate n={n} with width {bump_width} leaves [-L + 3w, L - 3w] (L={scenario.L})"
        )
    return np.concatenate([bump(scenario.x - n, bump_width), np.zeros(scenario.N)])


def _check_phase(scenario: GalleryScenario, bump_width: float, n: float) -> None:
    step = 2.0 * (abs(n) + bump_width) * scenario.h
    if step > PHASE_LIMIT:
        raise GridTooCoarse(f"phase step {step:.3f} at translate n={n} exceeds pi/4")


@dataclass(frozen=True)
class TranslateNorms:
    n: float
    mu: float
    mu_T: float
    purified: float
    purified_T: float

    @property
    def ratio(self) -> float:
        return self.mu_T / self.mu


def translate_norms(scenario: GalleryScenario, bump_width: float, n: float) -> TranslateNorms:
    phi = translate(scenario, bump_width, n)
    _check_phase(scenario, bump_width, n)
    Tphi = scenario.T @ phi
    return TranslateNorms(float(n), scenario.mu(phi), scenario.mu(Tphi),
                          scenario.mu_other(phi), scenario.mu_other(Tphi))


def chirp_growth_curve(scenario: GalleryScenario, bump_width: float,
                     n_range: Sequence[int]) -> list[tuple[int, float]]:
    """``(n, mu(T phi_n, T phi_n) / mu(phi_n, phi_n))`` for each translate."""
    return [(int(n), translate_norms(scenario, bump_width, n).ratio) for n in n_range]


def loglog_slope(curve: Sequence[tuple[float, float]]) -> float:
    """Least-squares slope of ``log ratio`` against ``log n`` (n > 0 only)."""
    pts = np.array([(n, r) for n, r in curve if n > 0], dtype=float)
    if len(pts) < 2:
        raise ValueError("need at least two points with n > 0")
    return float(np.polyfit(np.log(pts[:, 0]), np.log(pts[:, 1]), 1)[0])


def build_swap_scenario(N: int, L: float) -> GalleryScenario:
    """Swap scenario: ``T(phi0 + i phi1) = A^{-1/2} phi1 - i A^{1/2} phi0``."""
    x, h = _grid(N, L)
    if N > MAX_DENSE_POINTS:
        raise ValueError(f"N is capped at {MAX_DENSE_POINTS} for dense A^(1/2)")
    A = dirichlet_operator(N, h)
    lam, Q = np.linalg.eigh(A.toarray())
    root = (Q * np.sqrt(lam)) @ Q.T
    inv_root = (Q / np.sqrt(lam)) @ Q.T
    Z = np.zeros((N, N))
    T = np.block([[Z, inv_root], [-root, Z]])
    G_mu = h * sp.block_diag([A, sp.identity(N)], format="csr")
    G_prime = h * sp.identity(2 * N, format="csr")
    sc = GalleryScenario("swap", x, h, L, A, _complex_form(N, h), G_mu, G_prime, T)
    sc._cache["eig"] = (lam, Q)
    return sc


def swap_witness(scenario: GalleryScenario,
                              modes: Optional[Sequence[int]] = None) -> list[tuple[int, float]]:
    """``(k, mu'(T phi, T phi) / mu'(phi, phi))`` for ``phi = e_k`` (real part).

    Here ``mu'(T phi, T phi) = <phi1, A^{-1} phi1> + <phi0, A phi0>``, so the
    real-part eigenmode gives exactly ``lambda_k``.
    """
    lam, Q = scenario._cache["eig"]
    N = scenario.N
    ks = range(N) if modes is None else modes
    out = []
    for k in ks:
        phi = np.concatenate([Q[:, k], np.zeros(N)])
        Tphi = scenario.T @ phi
        out.append((int(k), scenario.mu_other(Tphi) / scenario.mu_other(phi)))
    return out


def mode_eigenvalues(scenario: GalleryScenario) -> np.ndarray:
    return scenario._cache["eig"][0]
