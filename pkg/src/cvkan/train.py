"""Experiment configs, k-fold cross-validation, and result aggregation.

Everything downstream of a seed is deterministic: dataset generation, fold
partition, per-fold model seeds, and batch shuffling all derive from
``ExperimentConfig.seed``, so one config reproduces one RunSummary.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field

import numpy as np

from . import autodiff as ad
from . import losses
from .data import (Dataset, gen_circuit, gen_holography, gen_knot_surrogate,
                   gen_symbolic, load_knots, recombine, to_split_real)
from .errors import ConfigError, GradientError, TrainingDiverged
from .layers import GridSpec
from .model import (FastKanModel, ModelConfig, commit_stats, make_model,
                    param_count)
from .optim import Adam, AdamConfig

# dataset id -> (task, default sample count); None = use the whole file
DATASETS = {
    "f1": ("regression", 5000),
    "f2": ("regression", 5000),
    "f3": ("regression", 5000),
    "f4": ("regression", 5000),
    "holography": ("regression", 100_000),
    "circuit": ("regression", 100_000),
    "knots": ("classification", None),
    "knots_surrogate": ("classification", 20_000),
}


@dataclass(frozen=True)
class ExperimentConfig:
    dataset: str
    widths: tuple
    model_type: str = "cvkan"
    grid: GridSpec = field(default_factory=GridSpec)
    norm_variant: str = "auto"
    csilu_variant: str = "complex"
    output_domain: str = "auto"
    samples: int | None = None
    epochs: int = 1000
    folds: int = 5
    seed: int = 0
    lr: float = 1e-3
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    batch_size: int = 256
    knots_csv: str | None = None
    feature_indices: tuple | None = None

    def __post_init__(self):
        object.__setattr__(self, "widths", tuple(int(w) for w in self.widths))
        if self.dataset not in DATASETS:
            raise ConfigError(f"unknown dataset {self.dataset!r}")
        if len(self.widths) < 2:
            raise ConfigError("widths needs at least input and output")
        if self.folds < 2:
            raise ConfigError(f"folds must be at least 2, got {self.folds}")
        if self.epochs < 1:
            raise ConfigError(f"epochs must be at least 1, got {self.epochs}")
        if self.batch_size < 2:
            raise ConfigError("batch size must be at least 2 (train-mode statistics)")
        if self.feature_indices is not None:
            object.__setattr__(self, "feature_indices", tuple(int(i) for i in self.feature_indices))

    @property
    def task(self):
        return DATASETS[self.dataset][0]

    def resolved_norm(self) -> str:
        if self.norm_variant != "auto":
            return self.norm_variant
        if self.model_type == "fastkan":
            return "bn_real"
        return "bn_v" if self.task == "classification" else "bn_c"

    def resolved_output_domain(self) -> str:
        if self.output_domain != "auto":
            return self.output_domain
        if self.model_type == "fastkan" or self.task == "classification":
            return "real"
        return "complex"

    def model_config(self) -> ModelConfig:
        return ModelConfig(
            widths=self.widths,
            grid=self.grid,
            csilu_variant=self.csilu_variant,
            norm_variant=self.resolved_norm(),
            output_domain=self.resolved_output_domain(),
            model_type=self.model_type,
        )

    def adam_config(self) -> AdamConfig:
        return AdamConfig(self.lr, self.beta1, self.beta2, self.eps)

    def to_dict(self) -> dict:
        g = self.grid
        return {
            "dataset": self.dataset,
            "model": self.model_type,
            "widths": list(self.widths),
            "grid": {"lo": g.lo, "hi": g.hi, "points": g.points, "bandwidth": g.bandwidth},
            "norm": self.norm_variant,
            "csilu": self.csilu_variant,
            "output_domain": self.output_domain,
            "samples": self.samples,
            "epochs": self.epochs,
            "folds": self.folds,
            "seed": self.seed,
            "lr": self.lr,
            "betas": [self.beta1, self.beta2],
            "eps": self.eps,
            "batch_size": self.batch_size,
            "knots_csv": self.knots_csv,
            "feature_indices": None if self.feature_indices is None else list(self.feature_indices),
        }


_GRID_KEYS = {"lo", "hi", "points", "bandwidth"}
_TOP_KEYS = {
    "dataset", "model", "widths", "grid", "norm", "csilu", "output_domain",
    "samples", "epochs", "folds", "seed", "lr", "betas", "eps", "batch_size",
    "knots_csv", "feature_indices",
}


def config_from_dict(doc: dict) -> ExperimentConfig:
    """Strict parse: unknown keys anywhere are rejected."""
    if not isinstance(doc, dict):
        raise ConfigError("experiment config must be a JSON object")
    unknown = set(doc) - _TOP_KEYS
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    for key in ("dataset", "widths"):
        if key not in doc:
            raise ConfigError(f"config is missing required key {key!r}")
    grid_doc = doc.get("grid", {})
    if not isinstance(grid_doc, dict):
        raise ConfigError("grid must be an object")
    bad = set(grid_doc) - _GRID_KEYS
    if bad:
        raise ConfigError(f"unknown grid keys: {sorted(bad)}")
    grid = GridSpec(
        lo=float(grid_doc.get("lo", -2.0)),
        hi=float(grid_doc.get("hi", 2.0)),
        points=int(grid_doc.get("points", 8)),
        bandwidth=float(grid_doc.get("bandwidth", 1.0)),
    )
    betas = doc.get("betas", [0.9, 0.999])
    if not (isinstance(betas, (list, tuple)) and len(betas) == 2):
        raise ConfigError("betas must be a two-element list")
    try:
        return ExperimentConfig(
            dataset=doc["dataset"],
            widths=tuple(doc["widths"]),
            model_type=doc.get("model", "cvkan"),
            grid=grid,
            norm_variant=doc.get("norm", "auto"),
            csilu_variant=doc.get("csilu", "complex"),
            output_domain=doc.get("output_domain", "auto"),
            samples=doc.get("samples"),
            epochs=int(doc.get("epochs", 1000)),
            folds=int(doc.get("folds", 5)),
            seed=int(doc.get("seed", 0)),
            lr=float(doc.get("lr", 1e-3)),
            beta1=float(betas[0]),
            beta2=float(betas[1]),
            eps=float(doc.get("eps", 1e-8)),
            batch_size=int(doc.get("batch_size", 256)),
            knots_csv=doc.get("knots_csv"),
            feature_indices=doc.get("feature_indices"),
        )
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"malformed config value: {exc}") from None


def load_config(path) -> ExperimentConfig:
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: {exc}") from None
    return config_from_dict(doc)


def resolve_dataset(cfg: ExperimentConfig) -> Dataset:
    task, default_n = DATASETS[cfg.dataset]
    n = cfg.samples if cfg.samples is not None else default_n
    if cfg.dataset in ("f1", "f2", "f3", "f4"):
        ds = gen_symbolic(cfg.dataset, n, cfg.seed, cfg.grid)
    elif cfg.dataset == "holography":
        ds = gen_holography(n, cfg.seed, cfg.grid)
    elif cfg.dataset == "circuit":
        ds = gen_circuit(n, cfg.seed, cfg.grid)
    elif cfg.dataset == "knots_surrogate":
        ds = gen_knot_surrogate(n, cfg.seed, cfg.grid)
    else:
        if not cfg.knots_csv:
            raise ConfigError("dataset 'knots' requires knots_csv")
        ds = load_knots(cfg.knots_csv, cfg.grid)
        if n is not None and n < ds.n:
            idx = np.random.default_rng(cfg.seed).choice(ds.n, n, replace=False)
            ds = ds.select(np.sort(idx))
    if cfg.feature_indices is not None:
        ds = ds.select_features(cfg.feature_indices)
    return ds


def _check_widths(cfg: ExperimentConfig, ds: Dataset) -> None:
    d_in = ds.features.cols
    if ds.task == "classification":
        d_out = ds.n_classes
    else:
        d_out = ds.targets.cols
    if cfg.widths[0] != d_in:
        raise ConfigError(f"widths[0]={cfg.widths[0]} but dataset has {d_in} features")
    if cfg.widths[-1] != d_out:
        raise ConfigError(f"widths[-1]={cfg.widths[-1]} but dataset needs {d_out} outputs")


@dataclass
class FoldResult:
    fold: int
    seed: int
    initial: dict
    final: dict
    diverged: bool = False
    note: str = ""

    def to_dict(self):
        return {
            "fold": self.fold, "seed": self.seed, "initial": self.initial,
            "final": self.final, "diverged": self.diverged, "note": self.note,
        }


@dataclass
class RunSummary:
    config: ExperimentConfig
    params: int
    folds: list

    def metrics(self):
        return sorted({k for f in self.folds for k in f.final})

    def summary(self) -> dict:
        out = {}
        for key in self.metrics():
            vals = np.array([f.final.get(key, np.nan) for f in self.folds])
            out[key] = {
                "mean": float(np.mean(vals)),
                "std": float(np.std(vals, ddof=1)) if len(vals) > 1 else 0.0,
                "folds": [float(v) for v in vals],
            }
        return out

    def to_dict(self) -> dict:
        return {
            "dataset": self.config.dataset,
            "model": self.config.model_type,
            "size": size_string(self.config.widths),
            "params": self.params,
            "seed": self.config.seed,
            "summary": self.summary(),
            "folds": [f.to_dict() for f in self.folds],
            "config": self.config.to_dict(),
        }


def size_string(widths) -> str:
    return "x".join(str(w) for w in widths)


def _fold_partition(n: int, folds: int, seed: int):
    perm = np.random.default_rng(seed).permutation(n)
    return np.array_split(perm, folds)


def _fold_seeds(seed: int, folds: int):
    return [int(s.generate_state(1)[0]) for s in np.random.SeedSequence(seed).spawn(folds)]


def evaluate(model, ds: Dataset, split_map=None) -> dict:
    """Eval-mode metrics; split-real predictions are recombined first."""
    if isinstance(model, FastKanModel):
        pred = model.predict(ds.features.re)
    else:
        pred = model.predict(ds.features)
    if ds.task == "classification":
        return {
            "ce": losses.cross_entropy(pred, ds.labels),
            "acc": losses.accuracy(pred, ds.labels),
        }
    target = ds.targets.data
    if split_map is not None:
        pred = recombine(pred, split_map["targets"])
        target = recombine(ds.targets.re, split_map["targets"])
    return {"mse": losses.mse(pred, target), "mae": losses.mae(pred, target)}


def train_fold(cfg: ExperimentConfig, ds: Dataset, train_idx, test_idx,
               fold: int, seed: int, split_map=None) -> FoldResult:
    return _train_fold_impl(cfg, ds, train_idx, test_idx, fold, seed, split_map)[0]


def _train_fold_impl(cfg: ExperimentConfig, ds: Dataset, train_idx, test_idx,
                     fold: int, seed: int, split_map=None):
    mcfg = cfg.model_config()
    model = make_model(mcfg, seed)
    adam = Adam(model.layout.size, cfg.adam_config())
    dtr, dte = ds.select(train_idx), ds.select(test_idx)
    initial = evaluate(model, dte, split_map)

    xr, xi = dtr.features.re, dtr.features.im
    if ds.task == "classification":
        labels = dtr.labels
        tr = ti = None
    else:
        labels = None
        tr, ti = dtr.targets.re, dtr.targets.im
    is_fast = isinstance(model, FastKanModel)
    rng = np.random.default_rng(seed)
    n = len(train_idx)
    try:
        for _ in range(cfg.epochs):
            perm = rng.permutation(n)
            for lo in range(0, n, cfg.batch_size):
                idx = perm[lo:lo + cfg.batch_size]
                if len(idx) < 2:
                    continue  # train-mode statistics need >= 2 samples
                sink = []
                if is_fast:
                    bx = np.ascontiguousarray(xr[idx])

                    def loss_fn(pv, bx=bx, idx=idx):
                        y = model.forward_graph(pv, bx, train=True, sink=sink)
                        if labels is not None:
                            return losses.ce_graph(y, labels[idx])
                        return losses.mse_graph(y, None, tr[idx], None)
                else:
                    bxr = np.ascontiguousarray(xr[idx])
                    bxi = np.ascontiguousarray(xi[idx])

                    def loss_fn(pv, bxr=bxr, bxi=bxi, idx=idx):
                        yr, yi = model.forward_graph(pv, bxr, bxi, train=True, sink=sink)
                        if labels is not None:
                            return losses.ce_graph(yr, labels[idx])
                        return losses.mse_graph(yr, yi, tr[idx], None if yi is None else ti[idx])
                _, grads = ad.value_and_grad(loss_fn, model.params)
                model.params = adam.step(model.params, grads)
                commit_stats(sink)
    except (TrainingDiverged, GradientError) as exc:
        nan = {k: float("nan") for k in initial}
        return FoldResult(fold, seed, initial, nan, diverged=True, note=str(exc)), model
    return FoldResult(fold, seed, initial, evaluate(model, dte, split_map)), model


def run_cv(cfg: ExperimentConfig, keep_fold0_model: bool = False):
    """Deterministic k-fold cross-validation.

    Returns the RunSummary, or (RunSummary, fold0_model) when
    ``keep_fold0_model`` is set (for serialization and visualization).
    """
    ds = resolve_dataset(cfg)
    split_map = None
    if cfg.model_type == "fastkan":
        ds, split_map = to_split_real(ds)
    _check_widths(cfg, ds)
    chunks = _fold_partition(ds.n, cfg.folds, cfg.seed)
    seeds = _fold_seeds(cfg.seed, cfg.folds)
    results = []
    fold0_model = None
    for k in range(cfg.folds):
        test_idx = chunks[k]
        train_idx = np.concatenate([chunks[j] for j in range(cfg.folds) if j != k])
        result, model = _train_fold_impl(cfg, ds, train_idx, test_idx, k, seeds[k], split_map)
        if k == 0:
            fold0_model = model
        results.append(result)
    summary = RunSummary(cfg, param_count(cfg.model_config()), results)
    if keep_fold0_model:
        return summary, fold0_model
    return summary


def write_fold_csv(path, summaries) -> None:
    """Flat per-fold metrics table across one or more runs."""
    columns = ["dataset", "model", "size", "fold", "mse", "mae", "ce", "acc", "params", "seed"]
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(columns)
        for s in summaries:
            for f in s.folds:
                writer.writerow([
                    s.config.dataset, s.config.model_type, size_string(s.config.widths),
                    f.fold,
                    _fmt(f.final.get("mse")), _fmt(f.final.get("mae")),
                    _fmt(f.final.get("ce")), _fmt(f.final.get("acc")),
                    s.params, f.seed,
                ])


def _fmt(v):
    return "" if v is None else repr(float(v))


def write_summary_json(path, summary: RunSummary) -> None:
    with open(path, "w") as fh:
        json.dump(summary.to_dict(), fh, indent=2, sort_keys=True)
        fh.write("\n")
