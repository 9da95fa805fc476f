"""Benchmark harness: ``gameelm vibench`` and ``gameelm elmbench``.

Config files are INI-style (flat ``key = value`` lines under section headers)::

    [bench]
    variants = GAME, DIEM, IREM, REM, EM
    seeds = 0, 1, 2
    output_dir = results

    [vibench]
    sizes = 10x5, 20x10, 30x15, 50x20

    [elmbench]
    datasets = data/boston_housing.csv:MEDV, sinc
    m = 100
    lambda_reg = 1e-3
    folds = 5

Command-line flags override the file; ``GAMEELM_OUTPUT_DIR`` and ``GAMEELM_SEED``
override both.
"""
from __future__ import annotations

import argparse
import configparser
import csv
import logging
import os
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .baselines import fista
from .data_io import fit_scaler, load_csv, make_sinc_dataset
from .elm import TrainerConfig, hidden_output, init_hidden_layer, train
from .errors import ConfigError, GameElmError
from .metrics import evaluate, kfold_split
from .operators import make_random_vi
from .vi_core import VARIANTS, solve, variant_preset

log = logging.getLogger(__name__)

ALL_VARIANTS = tuple(VARIANTS) + ("FISTA",)
BENCH_SIZES = ((10, 5), (20, 10), (30, 15), (50, 20))
REPORT_HEADER = ["variant", "instance", "seed", "iterations", "time_s", "final_residual",
                 "rmse", "mae", "sse_sst", "ssr_sst"]
STATUS_HEADER = ["variant", "instance", "seed", "termination", "solution_norm", "message"]


@dataclass
class BenchConfig:
    mode: str
    variants: list
    seeds: list
    output_dir: Path = Path("results")
    sizes: list = field(default_factory=lambda: list(BENCH_SIZES))
    datasets: list = field(default_factory=list)
    start: str = "random"
    m: int = 100
    lambda_reg: float = 1e-3
    tol: float = 1e-6
    max_iter: int = 10000
    folds: int = 5
    timing: bool = True
    write_traces: bool = True

    def __post_init__(self):
        if self.mode not in ("vibench", "elmbench"):
            raise ConfigError(f"unknown mode {self.mode!r}")
        self.variants = [v.upper() for v in self.variants]
        if not self.variants:
            raise ConfigError("no variants requested")
        bad = [v for v in self.variants if v not in ALL_VARIANTS]
        if bad:
            raise ConfigError(f"unknown variants {bad}; choose from {list(ALL_VARIANTS)}")
        if self.mode == "vibench" and "FISTA" in self.variants:
            raise ConfigError("FISTA only applies to elmbench")
        if not self.seeds:
            raise ConfigError("no seeds given")
        if self.mode == "vibench" and not self.sizes:
            raise ConfigError("no problem sizes given")
        if self.mode == "elmbench" and not self.datasets:
            raise ConfigError("no datasets given")
        if self.start not in ("random", "solution"):
            raise ConfigError("start must be 'random' or 'solution'")
        self.output_dir = Path(self.output_dir)


@dataclass
class BenchRow:
    variant: str
    instance: str
    seed: int
    iterations: float
    time_s: float
    final_residual: float
    termination: str
    solution_norm: float = float("nan")
    metrics: dict | None = None
    message: str = ""


@dataclass
class BenchReport:
    rows: list = field(default_factory=list)
    errors: list = field(default_factory=list)

    def row(self, variant, instance, seed):
        for r in self.rows:
            if (r.variant, r.instance, r.seed) == (variant, instance, seed):
                return r
        raise KeyError((variant, instance, seed))

    def aggregate(self):
        """Mean iterations, time and metrics per (variant, instance)."""
        groups = {}
        for r in self.rows:
            groups.setdefault((r.variant, r.instance), []).append(r)
        out = {}
        for key, rs in groups.items():
            agg = {"runs": len(rs),
                   "iterations": float(np.mean([r.iterations for r in rs])),
                   "time_s": float(np.mean([r.time_s for r in rs]))}
            for name in ("rmse", "mae", "sse_sst", "ssr_sst"):
                vals = [r.metrics[name] for r in rs if r.metrics and r.metrics.get(name) is not None]
                agg[name] = float(np.mean(vals)) if vals else None
            out[key] = agg
        return out

    def write(self, out_dir, timing=True):
        out_dir = Path(out_dir)
        out_dir.mkdir(parents=True, exist_ok=True)
        num = lambda v: "" if v is None else repr(float(v))
        with open(out_dir / "report.csv", "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(REPORT_HEADER)
            for r in self.rows:
                m = r.metrics or {}
                w.writerow([r.variant, r.instance, r.seed, num(r.iterations),
                            f"{r.time_s:.5f}" if timing else "", num(r.final_residual),
                            num(m.get("rmse")), num(m.get("mae")),
                            num(m.get("sse_sst")), num(m.get("ssr_sst"))])
        with open(out_dir / "status.csv", "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(STATUS_HEADER)
            for r in self.rows:
                w.writerow([r.variant, r.instance, r.seed, r.termination, num(r.solution_norm), r.message])
            for e in self.errors:
                w.writerow(["", e["instance"], "", "Error", "", e["message"]])
        with open(out_dir / "summary.csv", "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["variant", "instance", "runs", "mean_iterations", "mean_time_s",
                        "rmse", "mae", "sse_sst", "ssr_sst"])
            for (variant, inst), a in self.aggregate().items():
                w.writerow([variant, inst, a["runs"], num(a["iterations"]),
                            f"{a['time_s']:.5f}" if timing else "",
                            num(a["rmse"]), num(a["mae"]), num(a["sse_sst"]), num(a["ssr_sst"])])


def vi_start_point(N, seed):
    return np.random.default_rng([seed, N]).standard_normal(N)


def run_vi_benchmark(cfg):
    """Random affine VI instances (xi = 0) solved by every requested variant from one shared start."""
    if cfg.mode != "vibench":
        raise ConfigError("run_vi_benchmark needs mode 'vibench'")
    report = BenchReport()
    if cfg.write_traces:
        cfg.output_dir.mkdir(parents=True, exist_ok=True)
    for N, L_rows in cfg.sizes:
        inst = f"N{N}_L{L_rows}"
        for seed in cfg.seeds:
            F, K = make_random_vi(N, L_rows, "zero", seed)
            x0 = vi_start_point(N, seed) if cfg.start == "random" else np.zeros(N)
            for variant in cfg.variants:
                sc = variant_preset(variant, tol=cfg.tol, max_iter=cfg.max_iter)
                try:
                    res = solve(F, K, x0, cfg=sc)
                except GameElmError as exc:
                    report.rows.append(BenchRow(variant, inst, seed, 0, 0.0, float("nan"),
                                                "Error", message=str(exc)))
                    continue
                report.rows.append(BenchRow(variant, inst, seed, res.iterations, res.elapsed,
                                            res.final_residual, res.termination.value,
                                            float(np.linalg.norm(res.solution))))
                if cfg.write_traces:
                    res.write_trace(cfg.output_dir / f"trace_{variant}_{inst}_{seed}.csv")
    return report


def _load_dataset(spec):
    if spec == "sinc" or spec.startswith("sinc:"):
        n = int(spec.split(":")[1]) if ":" in spec else 500
        return make_sinc_dataset(n=n, seed=0), "sinc"
    path, _, target = spec.partition(":") if not os.path.exists(spec) else (spec, "", "")
    ds = load_csv(path, target_column=target or None)
    if ds.dropped_count:
        log.info("%s: dropped %d malformed rows", path, ds.dropped_count)
    return ds, Path(path).stem


def _fold_run(variant, Htr, ytr, cfg, sc_cache):
    if variant == "FISTA":
        beta, tr = fista(Htr, ytr, cfg.lambda_reg, tol=cfg.tol, max_iter=cfg.max_iter)
        term = "Converged" if tr.converged else "MaxIterations"
        return beta, tr.iterations, tr.elapsed, tr.final_step, term
    tcfg = TrainerConfig(m=Htr.shape[1], lambda_reg=cfg.lambda_reg, solver=sc_cache[variant])
    beta, res = train(Htr, ytr, tcfg)
    return beta, res.iterations, res.elapsed, res.final_residual, res.termination.value


def run_elm_benchmark(cfg):
    """k-fold CV per dataset and seed; metrics are on min-max scaled targets, averaged over folds."""
    if cfg.mode != "elmbench":
        raise ConfigError("run_elm_benchmark needs mode 'elmbench'")
    report = BenchReport()
    sc_cache = {v: variant_preset(v, tol=cfg.tol, max_iter=cfg.max_iter)
                for v in cfg.variants if v != "FISTA"}
    for spec in cfg.datasets:
        try:
            ds, inst = _load_dataset(spec)
        except (OSError, GameElmError, ValueError) as exc:
            log.error("dataset %s skipped: %s", spec, exc)
            report.errors.append({"instance": spec, "message": f"{type(exc).__name__}: {exc}"})
            continue
        for seed in cfg.seeds:
            W, b = init_hidden_layer(ds.d, cfg.m, seed)
            folds = kfold_split(ds.n, cfg.folds, seed)
            per = {v: [] for v in cfg.variants}
            for tr_idx, te_idx in folds:
                scaler = fit_scaler(ds.subset(tr_idx))
                Xtr = scaler.transform_features(ds.features[tr_idx])
                Xte = scaler.transform_features(ds.features[te_idx])
                ytr = scaler.transform_targets(ds.targets[tr_idx])
                yte = scaler.transform_targets(ds.targets[te_idx])
                Htr, Hte = hidden_output(Xtr, W, b), hidden_output(Xte, W, b)
                for variant in cfg.variants:
                    beta, it, el, resid, term = _fold_run(variant, Htr, ytr, cfg, sc_cache)
                    per[variant].append((it, el, resid, term, evaluate(yte, Hte @ beta), beta))
            for variant, runs in per.items():
                mets = {}
                for name in ("rmse", "mae", "sse_sst", "ssr_sst"):
                    vals = [getattr(r[4], name) for r in runs if getattr(r[4], name) is not None]
                    mets[name] = float(np.mean(vals)) if vals else None
                terms = sorted({r[3] for r in runs})
                report.rows.append(BenchRow(
                    variant, inst, seed,
                    iterations=float(np.mean([r[0] for r in runs])),
                    time_s=float(np.mean([r[1] for r in runs])),
                    final_residual=float(np.mean([r[2] for r in runs])),
                    termination="/".join(terms),
                    solution_norm=float(np.mean([np.linalg.norm(r[5]) for r in runs])),
                    metrics=mets))
    return report


def _split_list(text):
    return [t.strip() for t in str(text).replace(";", ",").split(",") if t.strip()]


def parse_sizes(text):
    out = []
    for tok in _split_list(text):
        try:
            n, l = tok.lower().split("x")
            out.append((int(n), int(l)))
        except ValueError:
            raise ConfigError(f"bad size {tok!r}; expected NxL such as 10x5") from None
        if min(out[-1]) < 1:
            raise ConfigError(f"bad size {tok!r}; N and L must be positive")
    return out


def parse_seeds(text):
    try:
        return [int(t) for t in _split_list(text)]
    except ValueError:
        raise ConfigError(f"bad seed list {text!r}") from None


def build_config(mode, args, environ=None):
    environ = os.environ if environ is None else environ
    values = {}
    if args.config:
        cp = configparser.ConfigParser()
        if not cp.read(args.config):
            raise ConfigError(f"cannot read config file {args.config}")
        for section in ("bench", mode):
            if cp.has_section(section):
                values.update(cp[section])
    for key in ("sizes", "variants", "seeds", "out", "datasets", "m", "lambda_reg",
                "tol", "max_iter", "folds", "start"):
        v = getattr(args, key, None)
        if v is not None:
            values["output_dir" if key == "out" else key] = v
    if environ.get("GAMEELM_OUTPUT_DIR"):
        values["output_dir"] = environ["GAMEELM_OUTPUT_DIR"]
    if environ.get("GAMEELM_SEED"):
        values["seeds"] = environ["GAMEELM_SEED"]

    kw = dict(mode=mode,
              variants=_split_list(values.get("variants", ",".join(VARIANTS))),
              seeds=parse_seeds(values.get("seeds", "0")),
              output_dir=values.get("output_dir", "results"),
              timing=not args.no_timing)
    if "sizes" in values:
        kw["sizes"] = parse_sizes(values["sizes"])
    if "datasets" in values:
        kw["datasets"] = _split_list(values["datasets"])
    for key, typ in (("m", int), ("lambda_reg", float), ("tol", float), ("max_iter", int), ("folds", int)):
        if key in values:
            try:
                kw[key] = typ(values[key])
            except ValueError:
                raise ConfigError(f"bad value for {key}: {values[key]!r}") from None
    if "start" in values:
        kw["start"] = values["start"]
    return BenchConfig(**kw)


def _print_summary(report, timing, stream=sys.stdout):
    print(f"{'variant':<7} {'instance':<22} {'runs':>4} {'mean iter':>10} {'mean time':>10} {'rmse':>8}",
          file=stream)
    for (variant, inst), a in report.aggregate().items():
        t = f"{a['time_s']:.5f}" if timing else "-"
        r = f"{a['rmse']:.4f}" if a["rmse"] is not None else "-"
        print(f"{variant:<7} {inst:<22} {a['runs']:>4} {a['iterations']:>10.1f} {t:>10} {r:>8}", file=stream)
    for e in report.errors:
        print(f"error: {e['instance']}: {e['message']}", file=stream)


def make_parser():
    p = argparse.ArgumentParser(prog="gameelm", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)
    for name, helptext in (("vibench", "random affine VI benchmark"),
                           ("elmbench", "ELM training benchmark with k-fold CV")):
        sp = sub.add_parser(name, help=helptext)
        sp.add_argument("--config", help="INI-style config file")
        sp.add_argument("--variants", help=f"comma list from {','.join(ALL_VARIANTS)}")
        sp.add_argument("--seeds", help="comma list of integer seeds")
        sp.add_argument("--out", help="output directory")
        sp.add_argument("--no-timing", action="store_true", help="leave time columns empty")
        sp.add_argument("--tol", type=float)
        sp.add_argument("--max-iter", dest="max_iter", type=int)
        sp.add_argument("-v", "--verbose", action="store_true")
        if name == "vibench":
            sp.add_argument("--sizes", help="comma list of NxL, e.g. 10x5,20x10")
            sp.add_argument("--start", choices=("random", "solution"))
        else:
            sp.add_argument("--datasets", help="comma list of path.csv[:target] or 'sinc[:n]'")
            sp.add_argument("--m", type=int, help="hidden nodes")
            sp.add_argument("--lambda-reg", dest="lambda_reg", type=float)
            sp.add_argument("--folds", type=int)
    return p


def main(argv=None):
    args = make_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.ERROR,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = build_config(args.command, args)
    except ConfigError as exc:
        print(f"gameelm: config error: {exc}", file=sys.stderr)
        return 2
    run = run_vi_benchmark if cfg.mode == "vibench" else run_elm_benchmark
    report = run(cfg)
    report.write(cfg.output_dir, timing=cfg.timing)
    _print_summary(report, cfg.timing)
    print(f"wrote {cfg.output_dir / 'report.csv'}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
