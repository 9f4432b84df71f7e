"""Symplectically adjoint pairs and the relative mu - mu_s continuity bounds.

For a pair ``(V, W)`` with ``sigma(Vx, y) = sigma(x, Wy)`` that is bounded by
``v`` and ``w`` in the mu-norm, the bounds checked here are

    ||V||_s <= w^{s/2} v^{1 - s/2},    ||W||_s <= v^{s/2} w^{1 - s/2},

for ``0 <= s <= 2``, where ``||.||_s`` is the norm of ``mu_s``.  The
interpolation inequality ``||X^t Q Y^t|| <= ||XQY||^t ||Q||^{1-t}`` that drives
the proof is exercised separately by :func:`check_interpolation`.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
import scipy.linalg as sla

from .core import DEFAULT_TOL, DominatingProduct, SymplecticForm, scaled_product
from .errors import DimensionMismatch, InvalidPair, SingularOperator

DEFAULT_S_GRID = (0.0, 0.25, 0.5, 0.75, 1.0, 1.25, 1.5, 1.75, 2.0)
DEFAULT_TAU_GRID = (0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9)


@dataclass(frozen=True, eq=False)
class AdjointPair:
    V: np.ndarray
    W: np.ndarray
    form: SymplecticForm


def adjoint_of(V, form: SymplecticForm) -> np.ndarray:
    """``W = J^{-1} V^T J``, the symplectic adjoint of ``V``."""
    V = np.asarray(V, dtype=float)
    if V.shape != form.J.shape:
        raise DimensionMismatch(f"V has shape {V.shape}, form has dimension {form.dim}")
    return np.linalg.solve(form.J, V.T @ form.J)


def adjointness_residual(V, W, form: SymplecticForm) -> float:
    J = form.J
    lhs = np.asarray(V).T @ J
    scale = max(np.linalg.norm(lhs), np.linalg.norm(J @ W), 1e-300)
    return float(np.linalg.norm(lhs - J @ np.asarray(W)) / scale)


def make_pair(V, W, form: SymplecticForm, tol: float = 1e-12) -> AdjointPair:
    V = np.asarray(V, dtype=float)
    W = np.asarray(W, dtype=float)
    if V.shape != form.J.shape or W.shape != form.J.shape:
        raise DimensionMismatch("V, W must match the form dimension")
    res = adjointness_residual(V, W, form)
    if res > tol:
        raise InvalidPair(f"V^T J - J W relative residual {res:.3e} exceeds {tol:.1e}")
    return AdjointPair(V, W, form)


def gram_norm(V, Gs) -> float:
    """Operator norm of ``V`` on ``(R^d, x^T Gs y)``: ``||L^T V L^{-T}||_2``."""
    L = np.linalg.cholesky(Gs)
    M = sla.solve_triangular(L, (L.T @ V).T, lower=True).T
    return float(np.linalg.norm(M, 2))


def mu_s_norm(V, product: DominatingProduct, s: float) -> float:
    return gram_norm(np.asarray(V, dtype=float), scaled_product(product, s))


@dataclass
class ContinuityReport:
    s_grid: list
    v: float
    w: float
    norms_V: list
    norms_W: list
    bounds_V: list
    bounds_W: list
    max_violation: float
    tol: float

    @property
    def passed(self) -> bool:
        return self.max_violation <= self.tol


def relative_bounds(v: float, w: float, s: float) -> tuple[float, float]:
    return w ** (s / 2) * v ** (1 - s / 2), v ** (s / 2) * w ** (1 - s / 2)


def verify_relative_continuity(
    pair: AdjointPair,
    product: DominatingProduct,
    s_grid: Sequence[float] = DEFAULT_S_GRID,
    tol: float = DEFAULT_TOL.verification,
    pair_tol: float = 1e-12,
) -> ContinuityReport:
    """Measure ``||V||_s, ||W||_s`` on the grid and compare with the interpolated bounds.

    Violations are relative to the bound: ``(measured - bound) / bound``.
    """
    if any(s < 0 or s > 2 for s in s_grid):
        raise ValueError("s_grid must lie in [0, 2]")
    res = adjointness_residual(pair.V, pair.W, pair.form)
    if res > pair_tol:
        raise InvalidPair(f"adjointness residual {res:.3e} exceeds {pair_tol:.1e}")
    v = mu_s_norm(pair.V, product, 0.0)
    w = mu_s_norm(pair.W, product, 0.0)
    nV, nW, bV, bW = [], [], [], []
    worst = 0.0
    for s in s_grid:
        Gs = scaled_product(product, s)
        mv, mw = gram_norm(pair.V, Gs), gram_norm(pair.W, Gs)
        bv, bw = relative_bounds(v, w, s)
        nV.append(mv)
        nW.append(mw)
        bV.append(bv)
        bW.append(bw)
        worst = max(worst, (mv - bv) / bv, (mw - bw) / bw)
    return ContinuityReport(list(s_grid), v, w, nV, nW, bV, bW, worst, tol)


def psd_power(X, t: float, threshold: float = 1e-12) -> np.ndarray:
    """``X^t`` for symmetric positive definite ``X`` via ``eigh``."""
    X = np.asarray(X, dtype=float)
    lam, Q = np.linalg.eigh(0.5 * (X + X.T))
    if lam[0] <= threshold * max(lam[-1], 1.0):
        raise SingularOperator(f"operator not injective: smallest eigenvalue {lam[0]:.3e}")
    return (Q * lam**t) @ Q.T


@dataclass
class InterpolationReport:
    tau_grid: list
    T_norm: float
    Q_norm: float
    measured: list
    bounds: list
    max_violation: float
    tol: float = DEFAULT_TOL.verification

    @property
    def passed(self) -> bool:
        return self.max_violation <= self.tol


def check_interpolation(X, Y, Q, tau_grid: Sequence[float] = DEFAULT_TAU_GRID,
                        tol: float = DEFAULT_TOL.verification) -> InterpolationReport:
    X = np.asarray(X, dtype=float)
    Y = np.asarray(Y, dtype=float)
    Q = np.asarray(Q, dtype=float)
    if Q.shape != (X.shape[0], Y.shape[0]):
        raise DimensionMismatch(f"Q must be {X.shape[0]}x{Y.shape[0]}, got {Q.shape}")
    if any(t < 0 or t > 1 for t in tau_grid):
        raise ValueError("tau_grid must lie in [0, 1]")
    lamX, QX = np.linalg.eigh(0.5 * (X + X.T))
    lamY, QY = np.linalg.eigh(0.5 * (Y + Y.T))
    for lam, name in ((lamX, "X"), (lamY, "Y")):
        if lam[0] <= 1e-12 * max(lam[-1], 1.0):
            raise SingularOperator(f"{name} is not injective (smallest eigenvalue {lam[0]:.3e})")
    t_norm = float(np.linalg.norm(X @ Q @ Y, 2))
    q_norm = float(np.linalg.norm(Q, 2))
    # work in the eigenbases: X^t Q Y^t = QX diag(lamX^t) (QX^T Q QY) diag(lamY^t) QY^T
    Qe = QX.T @ Q @ QY
    measured, bounds = [], []
    worst = 0.0
    for t in tau_grid:
        m = float(np.linalg.norm((lamX[:, None] ** t) * Qe * (lamY[None, :] ** t), 2))
        b = t_norm**t * q_norm ** (1 - t)
        measured.append(m)
        bounds.append(b)
        worst = max(worst, (m - b) / b)
    return InterpolationReport(list(tau_grid), t_norm, q_norm, measured, bounds, worst, tol)


def random_interpolation_triple(seed: int, max_dim: int = 60):
    """Random injective non-negative ``X`` (f x f), ``Y`` (h x h) and ``Q`` (f x h)."""
    rng = np.random.default_rng(seed)
    f = int(rng.integers(1, max_dim + 1))
    h = int(rng.integers(1, max_dim + 1))

    def spd(k):
        B = rng.standard_normal((k, k))
        spread = 10.0 ** rng.uniform(-2, 2, size=k)
        O, _ = np.linalg.qr(B)
        return (O * spread) @ O.T

    return spd(f), spd(h), rng.standard_normal((f, h))


@dataclass
class LadderReport:
    dims: list
    T_norms: list
    Q_norms: list
    worst_ratio: list = field(default_factory=list)  # max over tau of measured / bound, per dim

    @property
    def stable(self) -> bool:
        return max(self.worst_ratio) <= 1 + DEFAULT_TOL.verification


def truncation_ladder(dims: Sequence[int] = (10, 20, 50, 100, 200),
                      tau_grid: Sequence[float] = DEFAULT_TAU_GRID) -> LadderReport:
    """Interpolation bound under growing truncations of an unbounded pair.

    ``X = diag(1..d)`` and ``Y = diag(1/(1..d))`` have norms growing with d,
    while the tridiagonal ``Q`` keeps ``XQY`` uniformly bounded; the bound must
    hold at every truncation with constants that stay put.
    """
    rep = LadderReport([], [], [])
    for d in dims:
        k = np.arange(1, d + 1, dtype=float)
        Q = np.eye(d) * 0.5 + np.eye(d, k=1) * 0.3 + np.eye(d, k=-1) * 0.2
        r = check_interpolation(np.diag(k), np.diag(1 / k), Q, tau_grid)
        rep.dims.append(int(d))
        rep.T_norms.append(r.T_norm)
        rep.Q_norms.append(r.Q_norm)
        rep.worst_ratio.append(max(m / b for m, b in zip(r.measured, r.bounds)))
    return rep
