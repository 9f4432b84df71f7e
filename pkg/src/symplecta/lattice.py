"""Klein-Gordon field on a 1-D periodic lattice.

Cauchy data ``(u0, u1)`` live on ``N`` sites with spacing ``h``.  The
quadrature mass matrix is ``M = h I``; the spatial operator is
``A = -Delta + r`` with the periodic second-difference Laplacian.  The
potential may be piecewise constant in time: a list of ``(t_start, r)``
pieces, the first of which also fixes the reference operator ``A`` used for
Sobolev scales, the energy product and the ultrastatic vacuum.

Evolution uses exact spectral propagators on each constant piece, so no
integrator error enters the norm measurements.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

import numpy as np
import scipy.linalg as sla

from .continuity import gram_norm, relative_bounds
from .core import (
    DEFAULT_TOL,
    DominatingProduct,
    SymplecticForm,
    Tolerances,
    relative_frobenius,
    scaled_product,
    validate_symplectic,
)
from .errors import (
    DimensionMismatch,
    DominationFails,
    EmptyRegion,
    NonPositivePotential,
    PotentialUndefined,
)

MAX_SITES = 2048


@dataclass(frozen=True)
class Piece:
    t_start: float
    r: np.ndarray


@dataclass(frozen=True, eq=False)
class Spectral:
    eigvals: np.ndarray
    eigvecs: np.ndarray

    def func(self, f) -> np.ndarray:
        Q = self.eigvecs
        return (Q * f(self.eigvals)) @ Q.T

    def power(self, m: float) -> np.ndarray:
        return self.func(lambda lam: lam**m)


def periodic_laplacian(N: int, h: float) -> np.ndarray:
    D = -2.0 * np.eye(N) + np.eye(N, k=1) + np.eye(N, k=-1)
    D[0, -1] += 1.0
    D[-1, 0] += 1.0
    return D / h**2


def _spectral(A: np.ndarray) -> Spectral:
    lam, Q = np.linalg.eigh(A)
    return Spectral(lam, Q)


@dataclass(frozen=True, eq=False)
class LatticeModel:
    N: int
    h: float
    pieces: tuple
    Delta: np.ndarray
    _spectra: dict = field(default_factory=dict, repr=False, compare=False)

    @property
    def r(self) -> np.ndarray:
        return self.pieces[0].r

    @property
    def M(self) -> np.ndarray:
        return self.h * np.eye(self.N)

    @property
    def x(self) -> np.ndarray:
        return self.h * np.arange(self.N)

    @property
    def length(self) -> float:
        return self.h * self.N

    @property
    def A(self) -> np.ndarray:
        return self.operator(0)

    def operator(self, piece: int) -> np.ndarray:
        return -self.Delta + np.diag(self.pieces[piece].r)

    def spectral_of(self, piece: int) -> Spectral:
        if piece not in self._spectra:
            self._spectra[piece] = _spectral(self.operator(piece))
        return self._spectra[piece]

    @property
    def spectral(self) -> Spectral:
        return self.spectral_of(0)

    @property
    def time_independent(self) -> bool:
        return all(np.array_equal(p.r, self.pieces[0].r) for p in self.pieces)


@dataclass
class CauchyData:
    u0: np.ndarray
    u1: np.ndarray

    def __post_init__(self):
        self.u0 = np.asarray(self.u0, dtype=float)
        self.u1 = np.asarray(self.u1, dtype=float)
        if self.u0.shape != self.u1.shape or self.u0.ndim != 1:
            raise DimensionMismatch("u0 and u1 must be vectors of equal length")
        if not (np.all(np.isfinite(self.u0)) and np.all(np.isfinite(self.u1))):
            raise ValueError("Cauchy data must be finite")

    @property
    def vector(self) -> np.ndarray:
        return np.concatenate([self.u0, self.u1])

    @classmethod
    def from_vector(cls, x) -> "CauchyData":
        x = np.asarray(x, dtype=float)
        n = x.size // 2
        return cls(x[:n], x[n:])


@dataclass(frozen=True)
class SobolevGram:
    m: float
    Gram: np.ndarray


def _as_site_vector(r, N: int) -> np.ndarray:
    r = np.asarray(r, dtype=float)
    if r.ndim == 0:
        return np.full(N, float(r))
    if r.shape != (N,):
        raise DimensionMismatch(f"potential must have {N} entries, got shape {r.shape}")
    return r.copy()


def build_lattice(N: int, h: float, r=1.0, r_min: float = 1e-6) -> LatticeModel:
    """Periodic lattice model.

    ``r`` is a scalar, a per-site vector, or a sequence of ``(t_start, r)``
    pieces for a piecewise-constant time-dependent potential.  A static
    potential is valid for all times.
    """
    if N < 8:
        raise ValueError("N must be >= 8")
    if N > MAX_SITES:
        raise ValueError(f"N is capped at {MAX_SITES}")
    if not h > 0:
        raise ValueError("h must be positive")
    if isinstance(r, (list, tuple)) and r and isinstance(r[0], (list, tuple)):
        raw = sorted(((float(t), v) for t, v in r), key=lambda p: p[0])
    else:
        raw = [(-np.inf, r)]
    pieces = []
    for t, v in raw:
        vec = _as_site_vector(v, N)
        if vec.min() < r_min:
            raise NonPositivePotential(f"potential minimum {vec.min():g} below r_min={r_min:g}")
        vec.setflags(write=False)
        pieces.append(Piece(t, vec))
    Delta = periodic_laplacian(N, h)
    Delta.setflags(write=False)
    return LatticeModel(N, float(h), tuple(pieces), Delta)


def periodic_spectrum(N: int, h: float, r: float = 1.0) -> np.ndarray:
    """Closed form ``r + (4/h^2) sin^2(pi k / N)``, ``k = 0..N-1``."""
    k = np.arange(N)
    return r + 4.0 / h**2 * np.sin(np.pi * k / N) ** 2


def sobolev_gram(model: LatticeModel, m: float) -> SobolevGram:
    if m == 0:
        return SobolevGram(0.0, model.M)
    return SobolevGram(float(m), model.h * model.spectral.power(m))


def cauchy_form(model: LatticeModel) -> SymplecticForm:
    """``delta((u0,u1),(v0,v1)) = h sum(u0 v1 - v0 u1)``."""
    Z = np.zeros((model.N, model.N))
    return validate_symplectic(np.block([[Z, model.M], [-model.M, Z]]))


def _blockdiag(a, b) -> np.ndarray:
    return sla.block_diag(a, b)


def energy_gram(model: LatticeModel, tol: Tolerances = DEFAULT_TOL) -> DominatingProduct:
    """``mu^E = <u0, A v0> + <u1, v1>`` on the reference piece."""
    lam0 = float(model.spectral.eigvals[0])
    if lam0 < 1.0 - tol.domination:
        # ||R||_mu = 1 / (2 sqrt(lam0)), so the margin below is reported with the error
        margin = 1.0 - 0.5 / np.sqrt(lam0) if lam0 > 0 else -np.inf
        raise DominationFails(
            f"lowest eigenvalue of A is {lam0:.6g} < 1 (domination margin {margin:.3g})"
        )
    G = _blockdiag(model.h * model.A, model.M)
    return DominatingProduct(0.5 * (G + G.T), cauchy_form(model), tol)


def ultrastatic_vacuum_gram(model: LatticeModel, tol: Tolerances = DEFAULT_TOL) -> DominatingProduct:
    """``1/2 (<u0, A^{1/2} v0> + <u1, A^{-1/2} v1>)`` on the reference piece."""
    sp = model.spectral
    G = 0.5 * model.h * _blockdiag(sp.power(0.5), sp.power(-0.5))
    return DominatingProduct(0.5 * (G + G.T), cauchy_form(model), tol)


def scaled_energy_closed_form(model: LatticeModel, s: float) -> np.ndarray:
    """``(mu^E)_s = 2^{-s} blockdiag(M A^{1-s/2}, M A^{-s/2})``."""
    sp = model.spectral
    return 2.0**-s * model.h * _blockdiag(sp.power(1 - s / 2), sp.power(-s / 2))


def _segments(model: LatticeModel, t0: float, t1: float):
    if t1 < t0:
        raise ValueError("t1 must be >= t0")
    starts = [p.t_start for p in model.pieces]
    if t0 < starts[0]:
        raise PotentialUndefined(f"potential undefined before t={starts[0]}")
    out = []
    for i, p in enumerate(model.pieces):
        lo = p.t_start
        hi = starts[i + 1] if i + 1 < len(starts) else np.inf
        a, b = max(lo, t0), min(hi, t1)
        if b > a:
            out.append((i, b - a))
    return out


def piece_propagator(sp: Spectral, tau: float) -> np.ndarray:
    w = np.sqrt(sp.eigvals)
    Q = sp.eigvecs
    c = np.cos(tau * w)
    sn = np.sin(tau * w)
    C = (Q * c) @ Q.T
    return np.block([[C, (Q * (sn / w)) @ Q.T], [(Q * (-w * sn)) @ Q.T, C]])


def evolution_matrix(model: LatticeModel, t0: float, t1: float) -> np.ndarray:
    """Cauchy-data evolution ``(u0, u1)(t0) -> (u0, u1)(t1)`` as a ``2N x 2N`` matrix."""
    T = np.eye(2 * model.N)
    for i, tau in _segments(model, t0, t1):
        T = piece_propagator(model.spectral_of(i), tau) @ T
    return T


def evolve(model: LatticeModel, t0: float, t1: float, data: CauchyData) -> CauchyData:
    if data.u0.shape != (model.N,):
        raise DimensionMismatch(f"data must have {model.N} sites")
    u0, u1 = data.u0.copy(), data.u1.copy()
    for i, tau in _segments(model, t0, t1):
        sp = model.spectral_of(i)
        Q = sp.eigvecs
        w = np.sqrt(sp.eigvals)
        a, b = Q.T @ u0, Q.T @ u1
        c, sn = np.cos(tau * w), np.sin(tau * w)
        u0, u1 = Q @ (c * a + sn / w * b), Q @ (-w * sn * a + c * b)
    return CauchyData(u0, u1)


def _region_sites(model: LatticeModel, region: Iterable[int]) -> np.ndarray:
    sites = np.unique(np.asarray(list(region), dtype=int))
    if sites.size == 0:
        raise EmptyRegion("region has no sites")
    if sites.min() < 0 or sites.max() >= model.N:
        raise ValueError("region sites out of range")
    return sites


def region_basis(model: LatticeModel, region: Iterable[int]) -> np.ndarray:
    """Columns spanning Cauchy data with both components supported in ``region``."""
    sites = _region_sites(model, region)
    E = np.zeros((2 * model.N, 2 * sites.size))
    k = np.arange(sites.size)
    E[sites, k] = 1.0
    E[model.N + sites, sites.size + k] = 1.0
    return E


def _compressed_extremes(T: np.ndarray, G: np.ndarray, E: np.ndarray) -> tuple[float, float]:
    TE = T @ E
    num = TE.T @ G @ TE
    den = E.T @ G @ E
    lam = sla.eigvalsh(0.5 * (num + num.T), 0.5 * (den + den.T))
    return float(lam[0]), float(lam[-1])


def energy_estimate_constants(model: LatticeModel, t0: float, t1: float,
                              region: Iterable[int]) -> tuple[float, float]:
    """Exact ``c1, c2`` with ``c1 E(x) <= E(Tx) <= c2 E(x)`` for data in ``region``."""
    E = region_basis(model, region)
    G = energy_gram(model).G
    return _compressed_extremes(evolution_matrix(model, t0, t1), G, E)


def circular_distance(model: LatticeModel, region: Iterable[int]) -> np.ndarray:
    """Distance, in sites, from each site to the nearest site of ``region``."""
    sites = _region_sites(model, region)
    idx = np.arange(model.N)
    d = np.abs(idx[:, None] - sites[None, :])
    return np.min(np.minimum(d, model.N - d), axis=1)


def default_cutoff(model: LatticeModel, region: Iterable[int], fraction: float = 0.1) -> np.ndarray:
    """Raised-cosine plateau: 1 on ``region``, falling to 0 over ``fraction`` of the lattice."""
    d = circular_distance(model, region).astype(float)
    width = max(1.0, round(fraction * model.N))
    chi = np.where(d < width, 0.5 * (1 + np.cos(np.pi * d / width)), 0.0)
    chi[d == 0] = 1.0
    return chi


def multiplier_bound(model: LatticeModel, chi, m: float) -> float:
    """Norm of multiplication by ``chi`` on ``H_m``: ``||A^{m/2} chi A^{-m/2}||``."""
    chi = _as_site_vector(chi, model.N)
    sp = model.spectral
    op = sp.power(m / 2) @ (chi[:, None] * sp.power(-m / 2))
    return float(np.linalg.norm(op, 2))


@dataclass
class CutoffContinuityReport:
    tau_grid: list
    s_grid: list
    v: float
    w: float
    identity_residuals: list
    cutoff_norms_V: list
    cutoff_norms_W: list
    bounds_V: list
    bounds_W: list
    region_norms: list
    full_norms: list
    constant_potential: bool
    hadamard_index: Optional[int]
    max_violation: float
    tol: float
    identity_tol: float = 1e-9

    @property
    def identity_ok(self) -> bool:
        return max(self.identity_residuals) <= self.identity_tol

    @property
    def bounds_ok(self) -> bool:
        return self.max_violation <= self.tol

    @property
    def isometry_ok(self) -> bool:
        if not self.constant_potential:
            return True
        return max(self.region_norms + self.full_norms) <= 1 + DEFAULT_TOL.verification

    @property
    def passed(self) -> bool:
        return self.identity_ok and self.bounds_ok and self.isometry_ok


def cutoff_continuity_report(model: LatticeModel, t0: float, t1: float,
                  tau_grid: Sequence[float] = (0.0, 0.25, 0.5, 0.75, 1.0),
                  region: Iterable[int] = (), chi=None, tol: float = 1e-8) -> CutoffContinuityReport:
    """Continuity of cutoff evolutions in ``H_tau + H_{tau-1}``, ``tau = 1 - s/2``.

    The pair ``V = chi T chi``, ``W = chi T^{-1} chi`` is symplectically adjoint
    (multiplication by ``chi`` is delta-symmetric).  Its energy norms give
    ``v, w``; each ``mu_s`` norm is compared with ``w^{s/2} v^{1-s/2}``.  Also
    measured: the norm of ``T`` restricted to data supported in ``region``, and
    of ``T`` itself, which are exactly 1 for a constant potential.
    """
    region = list(region)
    sites = _region_sites(model, region)
    if any(t < 0 or t > 1 for t in tau_grid):
        raise ValueError("tau_grid must lie in [0, 1]")
    if chi is None:
        chi = default_cutoff(model, sites)
    chi = _as_site_vector(chi, model.N)
    prod = energy_gram(model)
    T = evolution_matrix(model, t0, t1)
    Tinv = evolution_matrix_inverse(T, model)
    X = np.concatenate([chi, chi])
    V = X[:, None] * T * X[None, :]
    W = X[:, None] * Tinv * X[None, :]
    v = gram_norm(V, prod.G)
    w = gram_norm(W, prod.G)
    E = region_basis(model, sites)
    s_grid = [2.0 * (1.0 - t) for t in tau_grid]
    rep = CutoffContinuityReport(list(tau_grid), s_grid, v, w, [], [], [], [], [], [], [],
                       model.time_independent, None, 0.0, tol)
    for k, (tau, s) in enumerate(zip(tau_grid, s_grid)):
        Gs = scaled_product(prod, s)
        rep.identity_residuals.append(relative_frobenius(Gs, scaled_energy_closed_form(model, s)))
        mv, mw = gram_norm(V, Gs), gram_norm(W, Gs)
        bv, bw = relative_bounds(v, w, s)
        rep.cutoff_norms_V.append(mv)
        rep.cutoff_norms_W.append(mw)
        rep.bounds_V.append(bv)
        rep.bounds_W.append(bw)
        rep.max_violation = max(rep.max_violation, (mv - bv) / bv, (mw - bw) / bw)
        _, top = _compressed_extremes(T, Gs, E)
        rep.region_norms.append(float(np.sqrt(top)))
        rep.full_norms.append(gram_norm(T, Gs))
        if tau == 0.5:
            rep.hadamard_index = k
    return rep


def evolution_matrix_inverse(T: np.ndarray, model: LatticeModel) -> np.ndarray:
    """``T^{-1} = J^{-1} T^T J`` for a symplectic ``T`` (exact up to rounding)."""
    J = cauchy_form(model).J
    return np.linalg.solve(J, T.T @ J)


def energy_density(model: LatticeModel, data: CauchyData) -> np.ndarray:
    """Positive per-site energy; sums to ``mu^E(x, x)`` for the reference potential."""
    du = (np.roll(data.u0, -1) - data.u0) / model.h
    return model.h * (data.u1**2 + model.r * data.u0**2 + du**2)


@dataclass
class LeakageReport:
    t: float
    radius: float
    outside_fraction: float


def light_cone_leakage(model: LatticeModel, data: CauchyData, region: Iterable[int],
                       t: float, slack: float = 0.1) -> LeakageReport:
    """Fraction of energy beyond ``(1 + slack) t`` from ``region`` after evolving by ``t``."""
    dist = circular_distance(model, region) * model.h
    t0 = max(0.0, model.pieces[0].t_start)
    out = evolve(model, t0, t0 + t, data)
    e = energy_density(model, out)
    radius = (1 + slack) * t
    frac = float(e[dist > radius].sum() / e.sum()) if e.sum() > 0 else 0.0
    return LeakageReport(float(t), float(radius), frac)
