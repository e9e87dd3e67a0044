"""Relevance scores, edge-surface sampling, pruning, and JSON serialization.

Relevance follows a backward recursion over edge-output variability: output
vertices score 1; each edge receives its head vertex's score weighted by
the edge's share of the summed complex standard deviations into that head;
each tail vertex collects its outgoing edge scores.  Incoming edge scores
therefore sum to the head's score exactly (asserted).
"""

from __future__ import annotations

import json
import warnings
from dataclasses import dataclass

import numpy as np

from .complexval import ComplexBatch
from .data import Dataset
from .errors import ConfigError, DataError, SchemaError
from .kernels import rbf2d_basis
from .layers import GridSpec
from .model import CvkanModel, FastKanModel, ModelConfig, _silu

SCHEMA_VERSION = 1


def complex_std(values) -> float:
    """Sample standard deviation of a complex distribution (n-1)."""
    arr = np.asarray(values, dtype=np.complex128).reshape(-1)
    if arr.size < 2:
        raise DataError(f"complex std needs at least 2 values, got {arr.size}")
    d = arr - arr.mean()
    return float(np.sqrt(np.sum(d.real ** 2 + d.imag ** 2) / (arr.size - 1)))


def _column_stds(block: np.ndarray) -> np.ndarray:
    """complex_std along axis 0, vectorized over remaining axes."""
    d = block - block.mean(axis=0)
    return np.sqrt(np.sum(d.real ** 2 + d.imag ** 2, axis=0) / (block.shape[0] - 1))


@dataclass
class RelevanceReport:
    edges: dict          # (l, q, p) -> score
    vertices: dict       # (l, i) -> score
    edge_sigma: dict     # (l, q, p) -> raw complex std
    vertex_sigma: dict   # (l, i) -> raw complex std
    dataset_id: str = ""
    sample_count: int = 0

    def input_scores(self) -> np.ndarray:
        d = max(i for (l, i) in self.vertices if l == 0) + 1
        return np.array([self.vertices[(0, i)] for i in range(d)])


def relevance(model: CvkanModel, features: ComplexBatch, dataset_id: str = "") -> RelevanceReport:
    if features.rows < 2:
        raise DataError("relevance needs at least 2 samples")
    edge_out, vertex_vals = model.forward_detail(features)
    widths = model.config.widths
    n_layers = len(widths) - 1

    edge_sigma = {}
    vertex_sigma = {}
    for l in range(n_layers):
        s = _column_stds(edge_out[l])  # (p, q)
        for p in range(widths[l]):
            for q in range(widths[l + 1]):
                edge_sigma[(l, q, p)] = float(s[p, q])
    for l, vals in enumerate(vertex_vals):
        s = _column_stds(vals)
        for i in range(vals.shape[1]):
            vertex_sigma[(l, i)] = float(s[i])

    vertices = {(n_layers, q): 1.0 for q in range(widths[-1])}
    edges = {}
    for l in range(n_layers - 1, -1, -1):
        p_count, q_count = widths[l], widths[l + 1]
        for i in range(p_count):
            vertices[(l, i)] = 0.0
        for q in range(q_count):
            head = vertices[(l + 1, q)]
            total = sum(edge_sigma[(l, q, p)] for p in range(p_count))
            for p in range(p_count):
                if total == 0.0:
                    warnings.warn(f"zero total sigma into vertex ({l + 1}, {q}); uniform split")
                    score = head / p_count
                else:
                    score = head * edge_sigma[(l, q, p)] / total
                edges[(l, q, p)] = score
                vertices[(l, p)] += score
        for q in range(q_count):
            incoming = sum(edges[(l, q, p)] for p in range(p_count))
            assert abs(incoming - vertices[(l + 1, q)]) <= 1e-9 * max(1.0, vertices[(l + 1, q)]), \
                "relevance conservation violated"
    return RelevanceReport(edges, vertices, edge_sigma, vertex_sigma,
                           dataset_id, features.rows)


def sample_edge_surface(model: CvkanModel, l: int, q: int, p: int, resolution: int = 64):
    """Magnitude and phase of one edge function on an R x R lattice.

    Lattice spans the grid square exactly; arrays are row-major over
    (re-index, im-index).  Phase lies in (-pi, pi].
    """
    if resolution < 2:
        raise ConfigError(f"surface resolution must be at least 2, got {resolution}")
    cfg = model.config
    widths = cfg.widths
    if not (0 <= l < len(widths) - 1 and 0 <= q < widths[l + 1] and 0 <= p < widths[l]):
        raise ConfigError(f"edge index ({l}, {q}, {p}) out of range for widths {widths}")
    spec = cfg.grid
    axis = np.linspace(spec.lo, spec.hi, resolution)
    xr = np.repeat(axis, resolution)[:, None]
    xi = np.tile(axis, resolution)[:, None]
    g2 = spec.points ** 2
    k = rbf2d_basis(np.ascontiguousarray(xr), np.ascontiguousarray(xi),
                    model.axis, model.axis, model.inv_bw2)

    read = model.layout.read
    complex_out = l < len(widths) - 2 or cfg.output_domain == "complex"
    w_re = read(model.params, f"layer{l}.w_re").reshape(widths[l], g2, widths[l + 1])[p, :, q]
    a = read(model.params, f"layer{l}.res_a")[p, q]
    b = read(model.params, f"layer{l}.res_b")[p, q]
    beta_r = read(model.params, f"layer{l}.beta_re")[p, q]
    sr = _silu(xr[:, 0])
    si = _silu(xi[:, 0])
    fr = k @ w_re
    if complex_out:
        w_im = read(model.params, f"layer{l}.w_im").reshape(widths[l], g2, widths[l + 1])[p, :, q]
        fi = k @ w_im
        if cfg.csilu_variant == "complex":
            fr = fr + a * sr - b * si
            fi = fi + a * si + b * sr
        else:
            fr = fr + a * sr
            fi = fi + b * si
        fr = fr + beta_r
        fi = fi + read(model.params, f"layer{l}.beta_im")[p, q]
    else:
        if cfg.csilu_variant == "complex":
            fr = fr + a * sr - b * si
        else:
            fr = fr + a * sr + b * si
        fr = fr + beta_r
        fi = np.zeros_like(fr)
    magnitude = np.hypot(fr, fi).reshape(resolution, resolution)
    phase = np.arctan2(fi, fr).reshape(resolution, resolution)
    phase[phase == -np.pi] = np.pi
    return magnitude, phase


def prune_features(dataset: Dataset, report: RelevanceReport, mode: str, k: int) -> Dataset:
    """Restrict to (or exclude) the k most relevant input features."""
    if mode not in ("keep-top-k", "drop-top-k"):
        raise ConfigError(f"unknown prune mode {mode!r}")
    scores = report.input_scores()
    if k > len(scores):
        raise ConfigError(f"k={k} exceeds feature count {len(scores)}")
    order = sorted(range(len(scores)), key=lambda i: (-scores[i], i))
    top = set(order[:k])
    if mode == "keep-top-k":
        chosen = sorted(top)
    else:
        chosen = sorted(set(range(len(scores))) - top)
    return dataset.select_features(chosen)


def ranked_features(report: RelevanceReport, names=None):
    """Input features sorted by relevance descending (stable on ties)."""
    scores = report.input_scores()
    order = sorted(range(len(scores)), key=lambda i: (-scores[i], i))
    return [
        {
            "index": i,
            "name": names[i] if names else f"feature{i}",
            "score": float(scores[i]),
        }
        for i in order
    ]


# ---------------------------------------------------------------------------
# serialization


def _grid_dict(spec: GridSpec) -> dict:
    return {"lo": spec.lo, "hi": spec.hi, "points": spec.points, "bandwidth": spec.bandwidth}


def _grid_from(doc: dict) -> GridSpec:
    return GridSpec(doc["lo"], doc["hi"], int(doc["points"]), doc["bandwidth"])


def model_to_dict(model) -> dict:
    cfg = model.config
    norm_state = [
        None if layer is None else {"variant": layer.variant, "running": layer.state_dict()}
        for layer in model.norms
    ]
    return {
        "version": SCHEMA_VERSION,
        "kind": "cvkan-model",
        "model_type": cfg.model_type,
        "widths": list(cfg.widths),
        "grid": _grid_dict(cfg.grid),
        "csilu_variant": cfg.csilu_variant,
        "norm_variant": cfg.norm_variant,
        "output_domain": cfg.output_domain,
        "parameters": [float(v) for v in model.params],
        "layout": model.layout.descriptor(),
        "norm_state": norm_state,
    }


def save_model(model, path) -> None:
    with open(path, "w") as fh:
        json.dump(model_to_dict(model), fh, sort_keys=True)
        fh.write("\n")


def model_from_dict(doc: dict):
    if not isinstance(doc, dict) or doc.get("kind") != "cvkan-model":
        raise SchemaError("not a model document")
    if doc.get("version") != SCHEMA_VERSION:
        raise SchemaError(f"unsupported model schema version {doc.get('version')!r}")
    cfg = ModelConfig(
        widths=tuple(doc["widths"]),
        grid=_grid_from(doc["grid"]),
        csilu_variant=doc["csilu_variant"],
        norm_variant=doc["norm_variant"],
        output_domain=doc["output_domain"],
        model_type=doc["model_type"],
    )
    params = np.asarray(doc["parameters"], dtype=np.float64)
    cls = FastKanModel if cfg.model_type == "fastkan" else CvkanModel
    model = cls(cfg, params)
    state = doc.get("norm_state")
    if state is not None:
        if len(state) != len(model.norms):
            raise SchemaError("norm_state length does not match architecture")
        for layer, entry in zip(model.norms, state):
            if (layer is None) != (entry is None):
                raise SchemaError("norm_state entry does not match architecture")
            if layer is not None:
                layer.load_state_dict(entry["running"])
    return model


def load_model(path):
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except FileNotFoundError:
        raise SchemaError(f"model file not found: {path}") from None
    except json.JSONDecodeError as exc:
        raise SchemaError(f"model file is not valid JSON: {exc}") from None
    return model_from_dict(doc)


def viz_document(model: CvkanModel, report: RelevanceReport,
                 resolution: int = 64, feature_names=None) -> dict:
    cfg = model.config
    edges = [
        {"l": l, "q": q, "p": p, "score": report.edges[(l, q, p)],
         "sigma": report.edge_sigma[(l, q, p)]}
        for (l, q, p) in sorted(report.edges)
    ]
    vertices = [
        {"l": l, "i": i, "score": report.vertices[(l, i)]}
        for (l, i) in sorted(report.vertices)
    ]
    surfaces = []
    for (l, q, p) in sorted(report.edges):
        magnitude, phase = sample_edge_surface(model, l, q, p, resolution)
        surfaces.append({
            "l": l, "q": q, "p": p, "resolution": resolution,
            "magnitude": [float(v) for v in magnitude.reshape(-1)],
            "phase": [float(v) for v in phase.reshape(-1)],
        })
    if feature_names is None:
        feature_names = [f"feature{i}" for i in range(cfg.widths[0])]
    return {
        "version": SCHEMA_VERSION,
        "kind": "vizdocument",
        "widths": list(cfg.widths),
        "output_domain": cfg.output_domain,
        "grid": _grid_dict(cfg.grid),
        "norm_variant": cfg.norm_variant,
        "csilu_variant": cfg.csilu_variant,
        "parameters": [float(v) for v in model.params],
        "layout": model.layout.descriptor(),
        "relevance": {"edges": edges, "vertices": vertices},
        "surfaces": surfaces,
        "feature_names": list(feature_names),
    }


def export_viz(model: CvkanModel, report: RelevanceReport, resolution, path,
               feature_names=None) -> dict:
    """Write the viewer document; bytes are deterministic given inputs."""
    doc = viz_document(model, report, resolution, feature_names)
    with open(path, "w") as fh:
        json.dump(doc, fh, sort_keys=True)
        fh.write("\n")
    return doc
