"""Monotone operators: the random affine VI test family and the LASSO gradient."""
from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionMismatch, NoConvergence
from .feasible_sets import Polyhedron

log = logging.getLogger(__name__)


def _frozen(a):
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class AffineOperator:
    """F(x) = Mbar @ x + xi."""

    Mbar: np.ndarray
    xi: np.ndarray

    def __post_init__(self):
        M = _frozen(np.atleast_2d(self.Mbar))
        xi = _frozen(np.ravel(self.xi))
        if M.shape[0] != M.shape[1] or xi.size != M.shape[0]:
            raise DimensionMismatch(f"Mbar {M.shape} and xi ({xi.size},) are incompatible")
        object.__setattr__(self, "Mbar", M)
        object.__setattr__(self, "xi", xi)

    @property
    def dim(self):
        return self.xi.size

    @property
    def linear_part(self):
        return self.Mbar

    def __call__(self, x):
        return apply_affine(self, x)


def apply_affine(op, x):
    x = np.asarray(x, dtype=float)
    if x.shape != (op.dim,):
        raise DimensionMismatch(f"expected vector of length {op.dim}, got shape {x.shape}")
    return op.Mbar @ x + op.xi


@dataclass(frozen=True)
class LassoGradient:
    """F(beta) = H^T (H beta - y), evaluated through cached H^T H and H^T y.

    With ``cache=False`` the two products are recomputed per call, which keeps
    memory at O(N m) for wide hidden layers.
    """

    H: np.ndarray
    y: np.ndarray
    cache: bool = True
    HtH: np.ndarray = field(init=False, repr=False, compare=False)
    Hty: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        H = _frozen(np.atleast_2d(self.H))
        y = _frozen(np.ravel(self.y))
        if H.shape[0] != y.size:
            raise DimensionMismatch(f"H has {H.shape[0]} rows but y has {y.size} entries")
        object.__setattr__(self, "H", H)
        object.__setattr__(self, "y", y)
        object.__setattr__(self, "HtH", _frozen(H.T @ H) if self.cache else None)
        object.__setattr__(self, "Hty", _frozen(H.T @ y))

    @property
    def dim(self):
        return self.H.shape[1]

    @property
    def linear_part(self):
        return self.HtH if self.cache else self.H.T @ self.H

    def __call__(self, beta):
        return apply_lasso_gradient(self, beta)


def apply_lasso_gradient(op, beta):
    beta = np.asarray(beta, dtype=float)
    if beta.shape != (op.dim,):
        raise DimensionMismatch(f"expected vector of length {op.dim}, got shape {beta.shape}")
    if op.HtH is not None:
        return op.HtH @ beta - op.Hty
    return op.H.T @ (op.H @ beta) - op.Hty


def make_random_vi(N, L_rows, xi_mode="zero", seed=0, diag_shift=0.0):
    """Random affine VI ``F(x) = (R R^T + S + D) x + xi`` on ``{x : A x <= b}``.

    R, T, A ~ U(-1, 1); S = T - T^T; diag(D) ~ U(0.1, 1.1) + diag_shift;
    b ~ U(0, 1) so the origin is feasible.
    """
    if N < 1 or L_rows < 1:
        raise ValueError("N and L_rows must be at least 1")
    rng = np.random.default_rng(seed)
    R = rng.uniform(-1.0, 1.0, (N, N))
    T = rng.uniform(-1.0, 1.0, (N, N))
    S = T - T.T
    D = np.diag(rng.uniform(0.1, 1.1, N) + diag_shift)
    A = rng.uniform(-1.0, 1.0, (L_rows, N))
    b = rng.uniform(0.0, 1.0, L_rows)
    mode = str(xi_mode).lower()
    if mode == "zero":
        xi = np.zeros(N)
    elif mode == "random":
        xi = rng.uniform(-1.0, 1.0, N)
    else:
        raise ValueError(f"unknown xi_mode {xi_mode!r}")
    return AffineOperator(R @ R.T + S + D, xi), Polyhedron(A, b)


def power_iteration(G, tol=1e-8, max_iter=1000, seed=0):
    """Largest eigenvalue of a symmetric PSD matrix. Returns (value, converged)."""
    rng = np.random.default_rng(seed)
    v = rng.standard_normal(G.shape[0])
    v /= np.linalg.norm(v)
    est = 0.0
    for _ in range(max_iter):
        w = G @ v
        nw = np.linalg.norm(w)
        if nw == 0.0:
            return 0.0, True
        new = float(v @ w)
        v = w / nw
        if abs(new - est) <= tol * abs(new):
            return new, True
        est = new
    return est, False


def lipschitz_estimate(op, tol=1e-8, max_iter=1000, return_flag=False):
    """Spectral norm of the operator's linear part by power iteration on M^T M."""
    M = np.asarray(op.linear_part, dtype=float)
    val, ok = power_iteration(M.T @ M, tol=tol, max_iter=max_iter)
    L = float(np.sqrt(max(val, 0.0)))
    if not ok:
        log.warning("power iteration hit %d iterations; best estimate %.6g", max_iter, L)
        if return_flag:
            return L, False
        raise NoConvergence(f"power iteration did not converge (best estimate {L})")
    return (L, True) if return_flag else L


def monotonicity_probe(op, n_samples=100, seed=0, scale=1.0):
    """Smallest sampled ``<F(x)-F(y), x-y> / ||x-y||^2``."""
    if n_samples < 1:
        raise ValueError("n_samples must be >= 1")
    rng = np.random.default_rng(seed)
    worst = np.inf
    for _ in range(n_samples):
        x = rng.normal(scale=scale, size=op.dim)
        y = rng.normal(scale=scale, size=op.dim)
        d = x - y
        worst = min(worst, float((op(x) - op(y)) @ d) / float(d @ d))
    return worst
