"""Self-adaptive inertial extragradient solver for monotone variational inequalities.

One iteration, with ``d = s_n - s_{n-1}``::

    a = s_n + alpha * d
    b = s_n + beta * d
    c = P_K(b - lam * F(b))
    s_{n+1} = (1 - rho) * a + rho * (c - lam * (F(c) - F(b)))

followed by the stepsize update ``lam <- min(mu ||b-c|| / ||F(b)-F(c)||, lam + zeta_n)``.
Setting (rho, alpha, beta) to the presets in :data:`VARIANTS` gives the reduced
methods (double-inertial, inertial-relaxed, relaxed, plain Tseng extragradient).
"""
from __future__ import annotations

import csv
import enum
import logging
import time
from dataclasses import dataclass, field, replace
from typing import Callable

import numpy as np

from .errors import DimensionMismatch, NonFiniteIterate, UnknownVariant

log = logging.getLogger(__name__)

# ||F(b) - F(c)|| at or below this (relative to max(1, ||F(b)||)) counts as F(b) == F(c)
EXACT_TOL = 1e-14


def default_zeta(n):
    return 1.0 / (10.0 * n + 9.0)


class Termination(str, enum.Enum):
    CONVERGED = "Converged"
    MAX_ITERATIONS = "MaxIterations"
    DIVERGED = "Diverged"
    EARLY_EXACT = "EarlyExact"


@dataclass(frozen=True)
class SolverConfig:
    rho: float = 0.6
    alpha: float = 0.5
    beta: float = 0.2
    mu: float = 0.4
    lambda0: float = 0.01
    zeta: Callable[[int], float] = default_zeta
    tol: float = 1e-6
    max_iter: int = 10000
    divergence_bound: float = 1e12
    name: str = "custom"

    def __post_init__(self):
        if not 0.0 < self.rho <= 1.0:
            raise ValueError(f"rho must lie in (0, 1], got {self.rho}")
        # beta <= alpha is only a convergence-theory condition; the IREM preset breaks it
        if not (0.0 <= self.alpha < 1.0 and 0.0 <= self.beta < 1.0):
            raise ValueError(f"alpha and beta must lie in [0, 1), got alpha={self.alpha}, beta={self.beta}")
        if not 0.0 < self.mu < 1.0:
            raise ValueError(f"mu must lie in (0, 1), got {self.mu}")
        if not self.lambda0 > 0.0:
            raise ValueError("lambda0 must be positive")
        if not self.tol > 0.0:
            raise ValueError("tol must be positive")
        if self.max_iter < 1:
            raise ValueError("max_iter must be >= 1")
        if not self.divergence_bound > 0.0:
            raise ValueError("divergence_bound must be positive")

    def zeta_at(self, n):
        z = float(self.zeta(n))
        if not z > 0.0:
            raise ValueError(f"zeta({n}) = {z} is not strictly positive")
        return z

    def theory_bounds_met(self):
        """Whether (rho, alpha, beta) sit inside the linear-rate parameter region.

        Only the mu-independent part is checked: rho <= 1/2 and
        beta <= alpha <= min((1 - 2 rho)/(1 - rho), rho/(1 - rho)).
        """
        if self.rho > 0.5 or self.beta > self.alpha:
            return False
        cap = min((1 - 2 * self.rho) / (1 - self.rho), self.rho / (1 - self.rho))
        return self.alpha <= cap

    def with_(self, **kw):
        return replace(self, **kw)


VARIANTS = {
    "GAME": (0.6, 0.5, 0.2),
    "DIEM": (1.0, 0.5, 0.2),
    "IREM": (0.6, 0.0, 0.2),
    "REM": (0.6, 0.0, 0.0),
    "EM": (1.0, 0.0, 0.0),
}


def variant_preset(name, **overrides):
    try:
        rho, alpha, beta = VARIANTS[str(name).upper()]
    except KeyError:
        raise UnknownVariant(f"unknown variant {name!r}; choose from {sorted(VARIANTS)}") from None
    kw = dict(rho=rho, alpha=alpha, beta=beta, mu=0.4, lambda0=0.01,
              zeta=default_zeta, name=str(name).upper())
    kw.update(overrides)
    return SolverConfig(**kw)


@dataclass
class IterateState:
    s_curr: np.ndarray
    s_prev: np.ndarray
    lam: float
    n: int = 1

    def __post_init__(self):
        self.s_curr = np.asarray(self.s_curr, dtype=float)
        self.s_prev = np.asarray(self.s_prev, dtype=float)
        if self.s_curr.shape != self.s_prev.shape:
            raise DimensionMismatch("s_curr and s_prev differ in shape")
        if not self.lam > 0.0:
            raise ValueError("stepsize must be positive")


@dataclass
class SolveResult:
    solution: np.ndarray
    iterations: int
    residuals: list = field(default_factory=list)
    stepsizes: list = field(default_factory=list)
    elapsed: float = 0.0
    termination: Termination = Termination.MAX_ITERATIONS

    @property
    def converged(self):
        return self.termination in (Termination.CONVERGED, Termination.EARLY_EXACT)

    @property
    def final_residual(self):
        return self.residuals[-1] if self.residuals else float("nan")

    def write_trace(self, path):
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["iter", "residual", "lambda"])
            for i, (r, lam) in enumerate(zip(self.residuals, self.stepsizes), start=1):
                w.writerow([i, repr(float(r)), repr(float(lam))])


def update_stepsize(lambda_n, b, c, Fb, Fc, mu, zeta_n):
    dF = float(np.linalg.norm(Fb - Fc))
    grown = lambda_n + zeta_n
    if dF > EXACT_TOL * max(1.0, float(np.linalg.norm(Fb))):
        return min(mu * float(np.linalg.norm(b - c)) / dF, grown)
    return grown


def _step(state, F, K, cfg):
    s, sp, lam = state.s_curr, state.s_prev, state.lam
    d = s - sp
    a = s + cfg.alpha * d
    b = s + cfg.beta * d
    Fb = F(b)
    c = K.project(b - lam * Fb, lam)
    Fc = F(c)
    s_next = (1.0 - cfg.rho) * a + cfg.rho * (c - lam * (Fc - Fb))
    lam_next = update_stepsize(lam, b, c, Fb, Fc, cfg.mu, cfg.zeta_at(state.n))
    if not (np.all(np.isfinite(s_next)) and np.isfinite(lam_next)):
        raise NonFiniteIterate(f"non-finite iterate at n={state.n}")
    residual = float(np.linalg.norm(b - c))
    return IterateState(s_next, s, lam_next, state.n + 1), residual, b


def game_iteration(state, F, K, cfg):
    """Advance one iteration; returns ``(new_state, ||b_n - c_n||)``."""
    dim = getattr(F, "dim", None)
    if dim is not None and state.s_curr.shape != (dim,):
        raise DimensionMismatch(f"state has shape {state.s_curr.shape}, operator expects ({dim},)")
    new_state, residual, _ = _step(state, F, K, cfg)
    return new_state, residual


def solve(F, K, x0, x_minus1=None, cfg=None):
    cfg = cfg or variant_preset("GAME")
    if not cfg.theory_bounds_met():
        log.warning("parameters (rho=%g, alpha=%g, beta=%g) lie outside the linear-rate region",
                    cfg.rho, cfg.alpha, cfg.beta)
    x0 = np.array(x0, dtype=float)
    if not np.all(np.isfinite(x0)):
        raise ValueError("x0 must be finite")
    xm1 = x0.copy() if x_minus1 is None else np.array(x_minus1, dtype=float)
    dim = getattr(F, "dim", None)
    if dim is not None and x0.shape != (dim,):
        raise DimensionMismatch(f"x0 has shape {x0.shape}, operator expects ({dim},)")

    state = IterateState(x0, xm1, cfg.lambda0, 1)
    residuals, stepsizes = [], []
    solution = x0
    termination = Termination.MAX_ITERATIONS
    t0 = time.perf_counter()
    while state.n <= cfg.max_iter:
        lam = state.lam
        try:
            with np.errstate(over="ignore", invalid="ignore"):
                new_state, residual, b = _step(state, F, K, cfg)
        except NonFiniteIterate:
            termination = Termination.DIVERGED
            break
        residuals.append(residual)
        stepsizes.append(lam)
        state = new_state
        solution = state.s_curr
        if residual == 0.0:
            solution = b
            termination = Termination.EARLY_EXACT
            break
        if residual < cfg.tol:
            termination = Termination.CONVERGED
            break
        if np.linalg.norm(state.s_curr) > cfg.divergence_bound:
            termination = Termination.DIVERGED
            break
    return SolveResult(
        solution=np.array(solution),
        iterations=len(residuals),
        residuals=residuals,
        stepsizes=stepsizes,
        elapsed=time.perf_counter() - t0,
        termination=termination,
    )
