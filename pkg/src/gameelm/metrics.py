"""Regression metrics and k-fold splitting."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConstantTarget, DimensionMismatch, InvalidK

SST_FLOOR = 1e-15


@dataclass(frozen=True)
class MetricsReport:
    rmse: float
    mae: float
    sse_sst: float | None
    ssr_sst: float | None
    n: int

    FIELDS = ("rmse", "mae", "sse_sst", "ssr_sst", "n")

    def as_row(self):
        return ["" if v is None else repr(v) for v in (self.rmse, self.mae, self.sse_sst, self.ssr_sst)] + [str(self.n)]


def evaluate(y, yhat, strict=False):
    """RMSE, MAE, SSE/SST and SSR/SST of predictions ``yhat`` against actuals ``y``.

    Both ratios are normalised by the spread of the actual values around their
    mean. When that spread vanishes the ratios come back as ``None``, or
    :class:`ConstantTarget` is raised with ``strict=True``.
    """
    y = np.asarray(y, dtype=float).ravel()
    yhat = np.asarray(yhat, dtype=float).ravel()
    if y.shape != yhat.shape:
        raise DimensionMismatch(f"{y.size} actual values vs {yhat.size} predictions")
    if y.size < 2:
        raise ValueError("need at least two samples")
    err = yhat - y
    rmse = float(np.sqrt(np.mean(err ** 2)))
    mae = float(np.mean(np.abs(err)))
    ybar = y.mean()
    sst = float(np.sum((y - ybar) ** 2))
    if sst <= SST_FLOOR:
        if strict:
            raise ConstantTarget("actual values are constant; SSE/SST and SSR/SST undefined")
        return MetricsReport(rmse, mae, None, None, y.size)
    sse = float(np.sum(err ** 2))
    ssr = float(np.sum((yhat - ybar) ** 2))
    return MetricsReport(rmse, mae, sse / sst, ssr / sst, y.size)


def kfold_split(n, k=5, seed=0):
    """Seeded shuffled k-fold partition; the first ``n % k`` folds get one extra index."""
    if not 2 <= k <= n:
        raise InvalidK(f"need 2 <= k <= n, got k={k}, n={n}")
    perm = np.random.default_rng(seed).permutation(n)
    sizes = np.full(k, n // k)
    sizes[: n % k] += 1
    folds, start = [], 0
    for size in sizes:
        test = np.sort(perm[start:start + size])
        train = np.sort(np.concatenate([perm[:start], perm[start + size:]]))
        folds.append((train, test))
        start += size
    return folds
