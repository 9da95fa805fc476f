"""Single-hidden-layer extreme learning machine with L1-regularised output weights.

The hidden layer is random and frozen; only the output weights are trained, by
running the extragradient solver on ``F(beta) = H^T (H beta - y)`` with the
projection step replaced either by soft thresholding or by projection onto the
unit L1 ball.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from .data_io import Scaler
from .errors import DimensionMismatch, SingularSystem
from .feasible_sets import L1Ball, ShrinkProx
from .operators import LassoGradient
from .vi_core import SolverConfig, solve, variant_preset


class ConstraintMode(str, enum.Enum):
    SHRINK = "shrink"
    L1_BALL = "l1ball"


def sigmoid(z):
    # split by sign so exp never overflows
    out = np.empty_like(z, dtype=float)
    pos = z >= 0
    with np.errstate(under="ignore"):
        out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
        ez = np.exp(z[~pos])
        out[~pos] = ez / (1.0 + ez)
    return out


def init_hidden_layer(D, m, seed=0, orthogonal=False):
    """Input weights W ~ U(-1, 1) of shape (D, m) and biases b ~ U(0, 1).

    ``orthogonal=True`` orthonormalises the columns of W when m <= D.
    """
    if D < 1 or m < 1:
        raise ValueError("D and m must be at least 1")
    rng = np.random.default_rng(seed)
    W = rng.uniform(-1.0, 1.0, (D, m))
    b = rng.uniform(0.0, 1.0, m)
    if orthogonal and m <= D:
        W, _ = np.linalg.qr(W)
    return W, b


def hidden_output(X, W, b):
    X = np.atleast_2d(np.asarray(X, dtype=float))
    if X.shape[1] != W.shape[0] or W.shape[1] != np.size(b):
        raise DimensionMismatch(f"X {X.shape}, W {W.shape}, b ({np.size(b)},) do not line up")
    return sigmoid(X @ W + b)


@dataclass
class TrainerConfig:
    m: int = 100
    lambda_reg: float = 1e-3
    solver: SolverConfig | str = "GAME"
    constraint_mode: ConstraintMode = ConstraintMode.SHRINK
    seed: int = 0
    orthogonal: bool = False

    def __post_init__(self):
        if self.m < 1:
            raise ValueError("m must be >= 1")
        if self.lambda_reg < 0:
            raise ValueError("lambda_reg must be nonnegative")
        self.constraint_mode = ConstraintMode(self.constraint_mode)

    def solver_config(self):
        return variant_preset(self.solver) if isinstance(self.solver, str) else self.solver


def train(H, y, cfg=None, beta0=None):
    """Fit output weights; returns ``(beta, SolveResult)``.

    In shrink mode the minimised objective is ``||y - H beta||^2 + lambda_reg ||beta||_1``.
    Because the operator carries no factor 2, the threshold per step is
    ``(lambda_reg / 2) * lambda_n``. The returned weights are one final
    forward-backward step from the last iterate, so they are exactly sparse and
    feasible; they sit within the final residual of that iterate.
    """
    cfg = cfg or TrainerConfig()
    H = np.atleast_2d(np.asarray(H, dtype=float))
    y = np.asarray(y, dtype=float).ravel()
    if H.shape[0] != y.size:
        raise DimensionMismatch(f"H has {H.shape[0]} rows, y has {y.size}")
    F = LassoGradient(H, y)
    if cfg.constraint_mode is ConstraintMode.SHRINK:
        K = ShrinkProx(cfg.lambda_reg / 2.0)
    else:
        K = L1Ball(1.0)
    x0 = np.zeros(H.shape[1]) if beta0 is None else np.asarray(beta0, dtype=float)
    res = solve(F, K, x0, cfg=cfg.solver_config())
    beta = res.solution
    if np.all(np.isfinite(beta)) and res.stepsizes:
        lam = res.stepsizes[-1]
        beta = K.project(beta - lam * F(beta), lam)
    return beta, res


@dataclass
class ElmModel:
    W: np.ndarray
    b: np.ndarray
    beta: np.ndarray
    activation: str = "sigmoid"
    scaler: Scaler | None = None
    info: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        m = self.W.shape[1]
        if np.size(self.b) != m or np.size(self.beta) != m:
            raise DimensionMismatch("W columns, b and beta must all have length m")

    @property
    def m(self):
        return self.W.shape[1]

    def hidden(self, X):
        if self.scaler is not None:
            X = self.scaler.transform_features(X)
        return hidden_output(X, self.W, self.b)

    def predict(self, X):
        return predict(self, X)


def predict(model, X):
    """``h(x) @ beta``, mapped back to target units when the model carries a scaler."""
    X = np.atleast_2d(np.asarray(X, dtype=float))
    if X.shape[1] != model.W.shape[0]:
        raise DimensionMismatch(f"model expects {model.W.shape[0]} features, got {X.shape[1]}")
    out = model.hidden(X) @ model.beta
    if model.scaler is not None:
        out = model.scaler.inverse_targets(out)
    return out


def fit(X, y, cfg=None, scaler=None):
    """Build the hidden layer, train, and wrap the result in an :class:`ElmModel`.

    With a scaler, ``X`` and ``y`` are raw values and are scaled before training.
    """
    cfg = cfg or TrainerConfig()
    X = np.atleast_2d(np.asarray(X, dtype=float))
    y = np.asarray(y, dtype=float).ravel()
    if scaler is not None:
        X, y = scaler.transform_features(X), scaler.transform_targets(y)
    W, b = init_hidden_layer(X.shape[1], cfg.m, cfg.seed, cfg.orthogonal)
    beta, res = train(hidden_output(X, W, b), y, cfg)
    return ElmModel(W, b, beta, scaler=scaler, info={"result": res})


def least_squares_weights(H, y, ridge_eps=1e-10):
    """Solve ``(H^T H + eps I) beta = H^T y``."""
    H = np.atleast_2d(np.asarray(H, dtype=float))
    y = np.asarray(y, dtype=float).ravel()
    if H.size == 0:
        raise ValueError("H is empty")
    G = H.T @ H + ridge_eps * np.eye(H.shape[1])
    rhs = H.T @ y
    try:
        beta = np.linalg.solve(G, rhs)
    except np.linalg.LinAlgError as exc:
        raise SingularSystem(str(exc)) from exc
    if not np.all(np.isfinite(beta)):
        raise SingularSystem("guarded normal equations produced non-finite weights")
    return beta


def save_model(model, path):
    """Flat text file: header line with ``D m has_scaler``, then W rows, b, beta and scaler rows."""
    D, m = model.W.shape
    fmt = lambda v: ",".join(format(float(t), ".17g") for t in np.ravel(v))
    lines = [f"elm,{model.activation},{D},{m},{int(model.scaler is not None)}"]
    lines += [fmt(row) for row in model.W]
    lines += [fmt(model.b), fmt(model.beta)]
    if model.scaler is not None:
        sc = model.scaler
        lines += [fmt(sc.feature_min), fmt(sc.feature_max), fmt([sc.target_min, sc.target_max])]
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def load_model(path):
    with open(path) as fh:
        lines = [ln.strip() for ln in fh if ln.strip()]
    tag, activation, D, m, has_scaler = lines[0].split(",")
    if tag != "elm":
        raise ValueError(f"{path} is not a saved ELM model")
    D, m = int(D), int(m)
    rows = [np.array([float(t) for t in ln.split(",")]) for ln in lines[1:]]
    W = np.vstack(rows[:D])
    b, beta = rows[D], rows[D + 1]
    scaler = None
    if int(has_scaler):
        fmin, fmax, tgt = rows[D + 2:D + 5]
        scaler = Scaler(fmin, fmax, float(tgt[0]), float(tgt[1]))
    return ElmModel(W, b, beta, activation=activation, scaler=scaler)
