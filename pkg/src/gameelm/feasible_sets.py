"""Feasible sets and the projection-like maps used inside the extragradient loop.

Every set exposes ``project(x, stepsize=None)``. Plain sets ignore the stepsize;
:class:`ShrinkProx` uses it to scale the soft-threshold level, which is what lets
the L1-regularised ELM problem run through the same solver loop.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionMismatch, NoConvergence, ZeroNormal


def project_halfspace(x, a, beta):
    """Project ``x`` onto ``{z : <a, z> <= beta}``."""
    x = np.asarray(x, dtype=float)
    a = np.asarray(a, dtype=float)
    nn = float(a @ a)
    if nn == 0.0:
        raise ZeroNormal("half-space normal has zero norm")
    v = float(a @ x)
    if v <= beta:
        return x.copy()
    return x - ((v - beta) / nn) * a


def project_l1_ball(x, r=1.0):
    """Exact Euclidean projection onto ``{y : ||y||_1 <= r}`` by sorting."""
    x = np.asarray(x, dtype=float)
    if r <= 0:
        raise ValueError("radius must be positive")
    ax = np.abs(x)
    if ax.sum() <= r:
        return x.copy()
    u = np.sort(ax)[::-1]
    css = np.cumsum(u)
    k = np.arange(1, u.size + 1)
    rho = np.nonzero(u - (css - r) / k > 0)[0][-1]
    theta = (css[rho] - r) / (rho + 1.0)
    return np.sign(x) * np.maximum(ax - theta, 0.0)


def shrink(s, rho):
    """Componentwise soft threshold ``sign(s) * max(|s| - rho, 0)``."""
    if rho < 0:
        raise ValueError("shrink threshold must be nonnegative")
    s = np.asarray(s, dtype=float)
    return np.sign(s) * np.maximum(np.abs(s) - rho, 0.0)


def _dykstra(x, A, b, row_norms, tol, max_sweeps):
    y = x.copy()
    incr = np.zeros((A.shape[0], x.size))
    for _ in range(max_sweeps):
        y_prev = y
        moved = 0.0
        for i in range(A.shape[0]):
            z = y + incr[i]
            v = A[i] @ z
            y = z - ((v - b[i]) / row_norms[i]) * A[i] if v > b[i] else z
            new_incr = z - y
            moved += float(np.sum((new_incr - incr[i]) ** 2))
            incr[i] = new_incr
        if np.linalg.norm(y - y_prev) < tol and np.sqrt(moved) < tol:
            return y
    raise NoConvergence(f"Dykstra projection did not settle in {max_sweeps} sweeps")


def project_polyhedron(x, P, tol=1e-10, max_sweeps=5000):
    """Project onto ``{z : A z <= b}`` with Dykstra's cyclic corrections."""
    return P.project(x, tol=tol, max_sweeps=max_sweeps)


@dataclass(frozen=True)
class Polyhedron:
    A: np.ndarray
    b: np.ndarray
    origin_feasible: bool = True
    tol: float = 1e-10
    max_sweeps: int = 5000
    _row_norms: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        A = np.atleast_2d(np.asarray(self.A, dtype=float))
        b = np.asarray(self.b, dtype=float).ravel()
        if A.shape[0] != b.size:
            raise DimensionMismatch(f"A has {A.shape[0]} rows but b has {b.size} entries")
        norms = np.einsum("ij,ij->i", A, A)
        if np.any(norms == 0):
            raise ZeroNormal("polyhedron has a zero row in A")
        if self.origin_feasible and np.any(b < 0):
            raise ValueError("origin_feasible set but b has negative entries")
        A.setflags(write=False)
        b.setflags(write=False)
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "_row_norms", norms)

    @property
    def dim(self):
        return self.A.shape[1]

    def contains(self, x, tol=0.0):
        return bool(np.all(self.A @ x <= self.b + tol))

    def project(self, x, stepsize=None, tol=None, max_sweeps=None):
        x = np.asarray(x, dtype=float)
        if x.size != self.dim:
            raise DimensionMismatch(f"point has length {x.size}, set lives in R^{self.dim}")
        if self.contains(x):
            return x.copy()
        return _dykstra(x, self.A, self.b, self._row_norms,
                        self.tol if tol is None else tol,
                        self.max_sweeps if max_sweeps is None else max_sweeps)

    def sample(self, rng, n, scale=1.0):
        """Points of the set: random draws pulled inside by projection."""
        pts = rng.normal(scale=scale, size=(n, self.dim))
        return np.array([self.project(p) for p in pts])


@dataclass(frozen=True)
class HalfSpace:
    a: np.ndarray
    beta: float

    def __post_init__(self):
        a = np.asarray(self.a, dtype=float)
        if not np.any(a):
            raise ZeroNormal("half-space normal has zero norm")
        object.__setattr__(self, "a", a)

    @property
    def dim(self):
        return self.a.size

    def contains(self, x, tol=0.0):
        return float(self.a @ x) <= self.beta + tol

    def project(self, x, stepsize=None):
        return project_halfspace(x, self.a, self.beta)


@dataclass(frozen=True)
class L1Ball:
    radius: float = 1.0

    def __post_init__(self):
        if not self.radius > 0:
            raise ValueError("L1 ball radius must be positive")

    def contains(self, x, tol=0.0):
        return float(np.abs(x).sum()) <= self.radius + tol

    def project(self, x, stepsize=None):
        return project_l1_ball(x, self.radius)


@dataclass(frozen=True)
class WholeSpace:
    def contains(self, x, tol=0.0):
        return True

    def project(self, x, stepsize=None):
        return np.array(x, dtype=float)


@dataclass(frozen=True)
class ShrinkProx:
    """Soft threshold at level ``weight * stepsize``; prox of ``weight * ||.||_1``."""

    weight: float

    def __post_init__(self):
        if self.weight < 0:
            raise ValueError("shrink weight must be nonnegative")

    def contains(self, x, tol=0.0):
        return True

    def project(self, x, stepsize=1.0):
        return shrink(x, self.weight * (1.0 if stepsize is None else stepsize))
