"""Command-line entry point: train, eval, params, export-viz, suite."""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys

from . import __version__
from .errors import ConfigError, CvkanError, SchemaError
from .explain import (export_viz, load_model, ranked_features, relevance,
                      save_model)
from .model import CvkanModel, param_count
from .train import (ExperimentConfig, config_from_dict, evaluate, load_config,
                    resolve_dataset, run_cv, size_string, to_split_real,
                    write_fold_csv, write_summary_json)

OUTPUT_DIR_ENV = "CVKAN_OUTPUT_DIR"


def _out_dir(args) -> str:
    path = args.out or os.environ.get(OUTPUT_DIR_ENV) or "."
    os.makedirs(path, exist_ok=True)
    return path


def _apply_overrides(cfg: ExperimentConfig, args) -> ExperimentConfig:
    doc = cfg.to_dict()
    if getattr(args, "seed", None) is not None:
        doc["seed"] = args.seed
    if getattr(args, "epochs", None) is not None:
        doc["epochs"] = args.epochs
    if getattr(args, "batch_size", None) is not None:
        doc["batch_size"] = args.batch_size
    if getattr(args, "samples", None) is not None:
        doc["samples"] = args.samples
    if getattr(args, "knots_csv", None) is not None:
        doc["knots_csv"] = args.knots_csv
    return config_from_dict(doc)


def _config_hash(cfg: ExperimentConfig) -> str:
    blob = json.dumps(cfg.to_dict(), sort_keys=True).encode()
    return hashlib.sha256(blob).hexdigest()


def _write_manifest(out_dir, stem, cfg, artifacts) -> None:
    manifest = {
        "config_hash": _config_hash(cfg),
        "seed": cfg.seed,
        "version": __version__,
        "artifacts": sorted(artifacts),
    }
    with open(os.path.join(out_dir, f"{stem}_manifest.json"), "w") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _stem(cfg: ExperimentConfig) -> str:
    return f"{cfg.dataset}_{cfg.model_type}_{size_string(cfg.widths)}"


def _print_summary(summary) -> None:
    parts = [
        f"dataset={summary.config.dataset}",
        f"model={summary.config.model_type}",
        f"size={size_string(summary.config.widths)}",
        f"params={summary.params}",
    ]
    for name, stat in summary.summary().items():
        parts.append(f"{name}={stat['mean']:.6g}±{stat['std']:.6g}")
    if any(f.diverged for f in summary.folds):
        bad = [f.fold for f in summary.folds if f.diverged]
        parts.append(f"diverged_folds={bad}")
    print(" ".join(parts))


def cmd_train(args) -> int:
    cfg = _apply_overrides(load_config(args.config), args)
    out_dir = _out_dir(args)
    summary, model = run_cv(cfg, keep_fold0_model=True)
    stem = _stem(cfg)
    summary_path = os.path.join(out_dir, f"{stem}_summary.json")
    csv_path = os.path.join(out_dir, f"{stem}_folds.csv")
    model_path = os.path.join(out_dir, f"{stem}_fold0.json")
    write_summary_json(summary_path, summary)
    write_fold_csv(csv_path, [summary])
    save_model(model, model_path)
    _write_manifest(out_dir, stem, cfg,
                    [os.path.basename(p) for p in (summary_path, csv_path, model_path)])
    _print_summary(summary)
    return 0


def cmd_eval(args) -> int:
    cfg = _apply_overrides(load_config(args.config), args)
    model = load_model(args.model)
    ds = resolve_dataset(cfg)
    split_map = None
    if model.config.model_type == "fastkan":
        ds, split_map = to_split_real(ds)
    metrics = evaluate(model, ds, split_map)
    print(json.dumps({"dataset": cfg.dataset, "n": ds.n, "metrics": metrics}, sort_keys=True))
    return 0


def cmd_params(args) -> int:
    cfg = load_config(args.config)
    print(param_count(cfg.model_config()))
    return 0


def cmd_export_viz(args) -> int:
    model = load_model(args.model)
    if not isinstance(model, CvkanModel):
        raise ConfigError("export-viz requires a cvkan model")
    cfg = _apply_overrides(load_config(args.config), args)
    ds = resolve_dataset(cfg)
    report = relevance(model, ds.features, dataset_id=cfg.dataset)
    out_dir = _out_dir(args)
    path = args.doc or os.path.join(out_dir, f"{_stem(cfg)}_viz.json")
    export_viz(model, report, args.resolution, path, feature_names=ds.feature_names)
    print(path)
    return 0


# ---------------------------------------------------------------------------
# suites: desk-scale sweeps mirroring the experiment tables


SUITES = ("symbolic", "physical", "knots", "ablation")


def _suite_configs(args):
    seed = args.seed if args.seed is not None else 0
    if args.suite == "symbolic":
        cells = [("f1", (1, 1)), ("f1", (1, 2, 1)), ("f2", (1, 1)), ("f2", (1, 2, 1)),
                 ("f3", (2, 2, 1)), ("f3", (2, 4, 2, 1)), ("f4", (2, 2, 1)), ("f4", (2, 4, 2, 1))]
        for dataset, widths in cells:
            yield config_from_dict({
                "dataset": dataset, "widths": list(widths),
                "samples": args.samples or 5000, "epochs": args.epochs or 200,
                "folds": args.folds, "seed": seed,
            })
    elif args.suite == "physical":
        cells = [
            ("holography", (3, 1)), ("holography", (3, 1, 1)), ("holography", (3, 3, 1)),
            ("holography", (3, 10, 1)), ("holography", (3, 10, 3, 1)),
            ("holography", (3, 10, 5, 3, 1)),
            ("circuit", (6, 1)), ("circuit", (6, 1, 1)), ("circuit", (6, 3, 1)),
            ("circuit", (6, 10, 1)), ("circuit", (6, 10, 3, 1)), ("circuit", (6, 10, 5, 3, 1)),
        ]
        for dataset, widths in cells:
            yield config_from_dict({
                "dataset": dataset, "widths": list(widths),
                "samples": args.samples or 20000, "epochs": args.epochs or 50,
                "folds": args.folds, "seed": seed,
            })
    elif args.suite == "ablation":
        dataset = "knots" if args.knots_csv else "knots_surrogate"
        for norm in ("bn_c", "bn_v", "bn_r2", "none"):
            for csilu in ("complex", "real"):
                yield config_from_dict({
                    "dataset": dataset, "widths": [15, 1, 14],
                    "norm": norm, "csilu": csilu,
                    "samples": args.samples or 20000, "epochs": args.epochs or 40,
                    "folds": args.folds, "seed": seed, "knots_csv": args.knots_csv,
                })
    else:
        raise ConfigError(f"unknown suite {args.suite!r}")


def _run_cell(cfg):
    try:
        return run_cv(cfg), None
    except CvkanError as exc:
        return None, f"{type(exc).__name__}: {exc}"


def cmd_suite(args) -> int:
    if args.suite not in SUITES:
        raise ConfigError(f"unknown suite {args.suite!r} (choose from {SUITES})")
    out_dir = _out_dir(args)
    summaries = []
    lines = ["| dataset | model | size | params | metrics |", "|---|---|---|---|---|"]
    if args.suite == "knots":
        summaries, lines = _knots_suite(args, lines)
    else:
        for cfg in _suite_configs(args):
            summary, err = _run_cell(cfg)
            if err is not None:
                print(f"cell {cfg.dataset} {size_string(cfg.widths)} failed: {err}", file=sys.stderr)
                lines.append(f"| {cfg.dataset} | {cfg.model_type} | {size_string(cfg.widths)} | - | FAILED: {err} |")
                continue
            summaries.append(summary)
            _print_summary(summary)
            lines.append(_table_row(summary))
    csv_path = os.path.join(out_dir, f"suite_{args.suite}_folds.csv")
    md_path = os.path.join(out_dir, f"suite_{args.suite}.md")
    write_fold_csv(csv_path, summaries)
    with open(md_path, "w") as fh:
        fh.write("\n".join(lines) + "\n")
    print(f"wrote {csv_path} and {md_path}")
    return 0


def _table_row(summary) -> str:
    stats = "; ".join(
        f"{name}={s['mean']:.4g}±{s['std']:.4g}" for name, s in summary.summary().items()
    )
    return (f"| {summary.config.dataset} | {summary.config.model_type} "
            f"| {size_string(summary.config.widths)} | {summary.params} | {stats} |")


def _knots_suite(args, lines):
    """Full model plus the keep/drop top-k retraining study."""
    dataset_id = "knots" if args.knots_csv else "knots_surrogate"
    base = config_from_dict({
        "dataset": dataset_id, "widths": [15, 1, 14],
        "samples": args.samples or 20000, "epochs": args.epochs or 40,
        "folds": args.folds, "seed": args.seed if args.seed is not None else 0,
        "knots_csv": args.knots_csv,
    })
    summaries = []
    summary, model = run_cv(base, keep_fold0_model=True)
    summaries.append(summary)
    _print_summary(summary)
    lines.append(_table_row(summary))
    ds = resolve_dataset(base)
    report = relevance(model, ds.features, dataset_id=dataset_id)
    order = [e["index"] for e in ranked_features(report, ds.feature_names)]
    for mode, k in (("keep-top-k", 7), ("keep-top-k", 3), ("drop-top-k", 7), ("drop-top-k", 3)):
        chosen = sorted(order[:k]) if mode == "keep-top-k" else sorted(order[k:])
        doc = base.to_dict()
        doc["feature_indices"] = chosen
        doc["widths"] = [len(chosen)] + list(base.widths[1:])
        cfg = config_from_dict(doc)
        cell, err = _run_cell(cfg)
        label = f"{dataset_id}[{mode} k={k}]"
        if err is not None:
            print(f"cell {label} failed: {err}", file=sys.stderr)
            lines.append(f"| {label} | cvkan | - | - | FAILED: {err} |")
            continue
        summaries.append(cell)
        _print_summary(cell)
        lines.append(_table_row(cell).replace(f"| {dataset_id} |", f"| {label} |", 1))
    return summaries, lines


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="cvkan", description="Complex-valued KAN toolkit")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, config_required=True):
        p.add_argument("--config", required=config_required, help="experiment config JSON")
        p.add_argument("--out", help=f"output directory (default ${OUTPUT_DIR_ENV} or .)")
        p.add_argument("--seed", type=int)
        p.add_argument("--epochs", type=int)
        p.add_argument("--batch-size", type=int, dest="batch_size")
        p.add_argument("--samples", type=int)
        p.add_argument("--knots-csv", dest="knots_csv")

    p_train = sub.add_parser("train", help="run k-fold cross-validation")
    common(p_train)
    p_train.set_defaults(func=cmd_train)

    p_eval = sub.add_parser("eval", help="evaluate a saved model on a dataset")
    common(p_eval)
    p_eval.add_argument("--model", required=True, help="model JSON file")
    p_eval.set_defaults(func=cmd_eval)

    p_params = sub.add_parser("params", help="print the exact parameter count")
    p_params.add_argument("--config", required=True)
    p_params.set_defaults(func=cmd_params)

    p_viz = sub.add_parser("export-viz", help="export a viewer document")
    common(p_viz)
    p_viz.add_argument("--model", required=True)
    p_viz.add_argument("--resolution", type=int, default=64)
    p_viz.add_argument("--doc", help="output document path")
    p_viz.set_defaults(func=cmd_export_viz)

    p_suite = sub.add_parser("suite", help="run an experiment sweep")
    p_suite.add_argument("suite", choices=SUITES)
    p_suite.add_argument("--out")
    p_suite.add_argument("--seed", type=int)
    p_suite.add_argument("--epochs", type=int)
    p_suite.add_argument("--samples", type=int)
    p_suite.add_argument("--folds", type=int, default=5)
    p_suite.add_argument("--knots-csv", dest="knots_csv")
    p_suite.set_defaults(func=cmd_suite)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, SchemaError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except CvkanError as exc:
        print(f"runtime failure: {exc}", file=sys.stderr)
        return 3
    except OSError as exc:
        print(f"i/o failure: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
