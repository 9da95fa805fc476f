"""Constant-step FISTA for the L1-regularised least-squares objective."""
from __future__ import annotations

import csv
import time
from dataclasses import dataclass, field

import numpy as np

from .errors import NonFiniteIterate
from .feasible_sets import shrink
from .operators import LassoGradient, lipschitz_estimate


def lasso_objective(H, y, beta, lambda_reg):
    """``||y - H beta||^2 + lambda_reg * ||beta||_1``; the objective every trainer minimises."""
    r = np.asarray(y) - np.asarray(H) @ beta
    return float(r @ r + lambda_reg * np.abs(beta).sum())


@dataclass
class FistaTrace:
    objectives: list = field(default_factory=list)
    iterations: int = 0
    elapsed: float = 0.0
    converged: bool = False
    final_step: float = float("nan")

    def write_csv(self, path):
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["iter", "objective"])
            for i, f in enumerate(self.objectives, start=1):
                w.writerow([i, repr(float(f))])


def fista(H, y, lambda_reg, tol=1e-6, max_iter=10000, beta0=None, lipschitz=None):
    """Beck-Teboulle FISTA with step 1/L, L = ||H^T H||, no restarts.

    Runs on the gradient ``H^T (H beta - y)``, so the soft-threshold level is
    ``lambda_reg / (2 L)``. Stops when ``||beta_k - beta_{k-1}|| < tol``.
    """
    if lambda_reg < 0:
        raise ValueError("lambda_reg must be nonnegative")
    if max_iter < 1:
        raise ValueError("max_iter must be >= 1")
    grad = LassoGradient(H, y)
    L = lipschitz if lipschitz is not None else lipschitz_estimate(grad, return_flag=True)[0]
    if L == 0.0:
        L = 1.0
    x = np.zeros(grad.dim) if beta0 is None else np.array(beta0, dtype=float)
    z = x.copy()
    t = 1.0
    thresh = lambda_reg / (2.0 * L)
    trace = FistaTrace()
    t0 = time.perf_counter()
    for k in range(1, max_iter + 1):
        x_new = shrink(z - grad(z) / L, thresh)
        if not np.all(np.isfinite(x_new)):
            raise NonFiniteIterate(f"FISTA produced a non-finite iterate at k={k}")
        t_new = 0.5 * (1.0 + np.sqrt(1.0 + 4.0 * t * t))
        z = x_new + ((t - 1.0) / t_new) * (x_new - x)
        step = float(np.linalg.norm(x_new - x))
        x, t = x_new, t_new
        trace.objectives.append(lasso_objective(grad.H, grad.y, x, lambda_reg))
        trace.final_step = step
        if step < tol:
            trace.converged = True
            break
    trace.iterations = len(trace.objectives)
    trace.elapsed = time.perf_counter() - t0
    return x, trace
