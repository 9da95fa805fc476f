"""CSV loading, min-max scaling and train/test splitting."""
from __future__ import annotations

import csv
import math
import os
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import ColumnMismatch, InvalidFraction, NoNumericRows, UnknownColumn

# Expected layouts for the benchmark datasets. Files are not bundled; download
# them yourself and point `elmbench --datasets` at the CSVs. Target is the last
# column unless noted.
DATASETS = {
    "boston_housing": dict(filename="boston_housing.csv", rows=506, target="MEDV",
                           source="Kaggle, Boston Housing (14 columns)"),
    "autompg": dict(filename="autompg.csv", rows=398, target="mpg",
                    source="Kaggle, Auto MPG; drop the car-name column, target mpg"),
    "bodyfat": dict(filename="bodyfat.csv", rows=252, target="BodyFat",
                    source="Kaggle, Body Fat Prediction (15 columns)"),
    "bike_sharing": dict(filename="bike_sharing_day.csv", rows=731, target="cnt",
                         source="UCI Bike Sharing, day.csv minus date/instant columns"),
    "diabetes": dict(filename="diabetes.csv", rows=768, target="Outcome",
                     source="Kaggle, Pima Indians Diabetes; 0/1 target used as real-valued"),
}


@dataclass
class Dataset:
    features: np.ndarray
    targets: np.ndarray
    feature_names: list
    source: str = ""
    target_name: str = "y"
    dropped_count: int = 0

    def __post_init__(self):
        self.features = np.atleast_2d(np.asarray(self.features, dtype=float))
        self.targets = np.asarray(self.targets, dtype=float).ravel()
        if self.features.shape[0] != self.targets.size:
            raise ColumnMismatch("features and targets disagree on row count")

    @property
    def n(self):
        return self.targets.size

    @property
    def d(self):
        return self.features.shape[1]

    def subset(self, idx):
        return replace(self, features=self.features[idx], targets=self.targets[idx], dropped_count=0)

    def to_csv(self, path):
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(list(self.feature_names) + [self.target_name])
            for row, t in zip(self.features, self.targets):
                w.writerow([repr(float(v)) for v in row] + [repr(float(t))])


def _parse_row(cells):
    try:
        vals = [float(c) for c in cells]
    except ValueError:
        return None
    return vals if all(math.isfinite(v) for v in vals) else None


def load_csv(path, target_column=None, has_header=True):
    """Read a numeric CSV; rows that are short, non-numeric or non-finite are dropped.

    ``target_column`` may be a header name or an integer index (negative allowed);
    the default is the last column.
    """
    if not os.path.exists(path):
        raise FileNotFoundError(path)
    with open(path, newline="") as fh:
        rows = [r for r in csv.reader(fh) if r and any(c.strip() for c in r)]
    if has_header and rows:
        header, rows = [c.strip() for c in rows[0]], rows[1:]
    else:
        width = max((len(r) for r in rows), default=0)
        header = [f"x{i}" for i in range(width)]
    width = len(header)

    if target_column is None:
        t_idx = width - 1
    elif isinstance(target_column, int) or str(target_column).lstrip("-").isdigit():
        t_idx = int(target_column)
        if not -width <= t_idx < width:
            raise UnknownColumn(f"column index {t_idx} out of range for {width} columns")
        t_idx %= width
    else:
        if target_column not in header:
            raise UnknownColumn(f"no column named {target_column!r} in {path}")
        t_idx = header.index(target_column)

    good, dropped = [], 0
    for r in rows:
        vals = _parse_row(r) if len(r) == width else None
        if vals is None:
            dropped += 1
        else:
            good.append(vals)
    if not good:
        raise NoNumericRows(f"{path} has no fully numeric rows")
    data = np.array(good)
    keep = [i for i in range(width) if i != t_idx]
    if not keep:
        raise ColumnMismatch("need at least one feature column besides the target")
    return Dataset(data[:, keep], data[:, t_idx], [header[i] for i in keep],
                   source=str(path), target_name=header[t_idx], dropped_count=dropped)


@dataclass(frozen=True)
class Scaler:
    feature_min: np.ndarray
    feature_max: np.ndarray
    target_min: float
    target_max: float

    @staticmethod
    def _apply(v, lo, hi):
        span = hi - lo
        safe = np.where(span > 0, span, 1.0)
        return np.where(span > 0, (v - lo) / safe, 0.0)

    def transform_features(self, X):
        X = np.atleast_2d(np.asarray(X, dtype=float))
        if X.shape[1] != self.feature_min.size:
            raise ColumnMismatch(f"expected {self.feature_min.size} feature columns, got {X.shape[1]}")
        return self._apply(X, self.feature_min, self.feature_max)

    def transform_targets(self, y):
        return self._apply(np.asarray(y, dtype=float), self.target_min, self.target_max)

    def inverse_features(self, Xs):
        return np.asarray(Xs) * (self.feature_max - self.feature_min) + self.feature_min

    def inverse_targets(self, ys):
        return np.asarray(ys) * (self.target_max - self.target_min) + self.target_min

    def transform(self, ds):
        return replace(ds, features=self.transform_features(ds.features),
                       targets=self.transform_targets(ds.targets))


def fit_scaler(ds):
    if ds.n == 0:
        raise ValueError("cannot fit a scaler on an empty dataset")
    return Scaler(ds.features.min(axis=0), ds.features.max(axis=0),
                  float(ds.targets.min()), float(ds.targets.max()))


def fit_transform_minmax(train, test):
    """Fit per-column [0, 1] scaling on ``train`` and apply it to both sets.

    Constant training columns map to 0; test values are not clipped.
    """
    if test.d != train.d:
        raise ColumnMismatch(f"train has {train.d} feature columns, test has {test.d}")
    sc = fit_scaler(train)
    return sc.transform(train), sc.transform(test), sc


def train_test_split(ds, test_fraction=0.2, seed=0):
    """Seeded shuffle, then ``ceil(N * test_fraction)`` rows go to test."""
    if not 0.0 < test_fraction < 1.0:
        raise InvalidFraction(f"test_fraction must lie in (0, 1), got {test_fraction}")
    # round() strips binary noise such as 0.2 * 505 = 101.00000000000001
    n_test = math.ceil(round(ds.n * test_fraction, 9))
    perm = np.random.default_rng(seed).permutation(ds.n)
    return ds.subset(np.sort(perm[n_test:])), ds.subset(np.sort(perm[:n_test]))


def make_sinc_dataset(n=500, noise=0.05, seed=0, low=-10.0, high=10.0):
    """1-D regression fixture y = sin(x)/x + Gaussian noise."""
    rng = np.random.default_rng(seed)
    x = rng.uniform(low, high, n)
    y = np.sinc(x / np.pi) + noise * rng.standard_normal(n)
    return Dataset(x[:, None], y, ["x"], source=f"synthetic:sinc(n={n},seed={seed})")
