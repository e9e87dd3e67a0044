"""Model assembly: CVKAN and the FastKAN baseline over flat parameter vectors.

All trainable scalars of a model live in one float64 vector whose segments
are described by a ParamLayout.  Forward passes are built from autodiff
primitives so that one reverse sweep yields exact gradients; a separate
numpy-only detailed forward records per-edge outputs for relevance scoring.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import autodiff as ad
from .complexval import ComplexBatch
from .errors import ConfigError, ShapeError
from .kernels import rbf2d_basis
from .layers import GridSpec
from .norms import AFFINE_FIELDS, NormLayer, identity_affine, norm_param_count

CVKAN_NORMS = ("bn_c", "bn_v", "bn_r2", "none")
FASTKAN_NORMS = ("bn_real", "none")


@dataclass(frozen=True)
class ModelConfig:
    widths: tuple
    grid: GridSpec = field(default_factory=GridSpec)
    csilu_variant: str = "complex"
    norm_variant: str = "bn_c"
    output_domain: str = "complex"
    model_type: str = "cvkan"

    def __post_init__(self):
        object.__setattr__(self, "widths", tuple(int(w) for w in self.widths))
        if len(self.widths) < 2:
            raise ConfigError(f"widths needs at least input and output, got {self.widths}")
        if any(w < 1 for w in self.widths):
            raise ConfigError(f"widths must be positive, got {self.widths}")
        if self.model_type == "cvkan":
            if self.csilu_variant not in ("complex", "real"):
                raise ConfigError(f"unknown csilu variant {self.csilu_variant!r}")
            if self.norm_variant not in CVKAN_NORMS:
                raise ConfigError(
                    f"cvkan norm variant must be one of {CVKAN_NORMS}, got {self.norm_variant!r}"
                )
            if self.output_domain not in ("complex", "real"):
                raise ConfigError(f"unknown output domain {self.output_domain!r}")
        elif self.model_type == "fastkan":
            if self.norm_variant not in FASTKAN_NORMS:
                raise ConfigError(
                    f"fastkan norm variant must be one of {FASTKAN_NORMS}, got {self.norm_variant!r}"
                )
            if self.output_domain != "real":
                raise ConfigError("fastkan is a real-valued model; output_domain must be 'real'")
        else:
            raise ConfigError(f"unknown model type {self.model_type!r}")

    @property
    def n_layers(self):
        return len(self.widths) - 1


class ParamLayout:
    """Named contiguous segments of the flat parameter vector."""

    def __init__(self):
        self._spans = {}
        self._order = []
        self.size = 0

    def add(self, name: str, shape: tuple):
        if name in self._spans:
            raise ConfigError(f"duplicate layout entry {name!r}")
        n = int(np.prod(shape)) if shape else 1
        self._spans[name] = (self.size, self.size + n, tuple(shape))
        self._order.append(name)
        self.size += n

    def span(self, name: str):
        return self._spans[name]

    def names(self):
        return list(self._order)

    def __contains__(self, name):
        return name in self._spans

    def take(self, pvar, name):
        """Slice a named segment out of the parameter Var, reshaped."""
        start, stop, shape = self._spans[name]
        seg = ad.segment(pvar, start, stop)
        return ad.reshape(seg, shape) if len(shape) > 1 else seg

    def read(self, params: np.ndarray, name: str) -> np.ndarray:
        start, stop, shape = self._spans[name]
        return params[start:stop].reshape(shape)

    def write(self, params: np.ndarray, name: str, value) -> None:
        start, stop, shape = self._spans[name]
        params[start:stop] = np.asarray(value, dtype=np.float64).reshape(-1)

    def descriptor(self):
        return [
            {"name": n, "start": s[0], "stop": s[1], "shape": list(s[2])}
            for n, s in ((name, self._spans[name]) for name in self._order)
        ]


def build_layout(config: ModelConfig) -> ParamLayout:
    layout = ParamLayout()
    g = config.grid.points
    last = config.n_layers - 1
    for l in range(config.n_layers):
        p, q = config.widths[l], config.widths[l + 1]
        if config.model_type == "fastkan":
            layout.add(f"layer{l}.w", (p * g, q))
            layout.add(f"layer{l}.silu_w", (p, q))
            layout.add(f"layer{l}.bias", (q,))
        else:
            complex_out = l < last or config.output_domain == "complex"
            layout.add(f"layer{l}.w_re", (p * g * g, q))
            if complex_out:
                layout.add(f"layer{l}.w_im", (p * g * g, q))
            layout.add(f"layer{l}.res_a", (p, q))
            layout.add(f"layer{l}.res_b", (p, q))
            layout.add(f"layer{l}.beta_re", (p, q))
            if complex_out:
                layout.add(f"layer{l}.beta_im", (p, q))
        if l < last:
            for fname in AFFINE_FIELDS[config.norm_variant]:
                layout.add(f"norm{l}.{fname}", (q,))
    return layout


def param_count(config: ModelConfig) -> int:
    """Exact number of trainable real scalars."""
    return build_layout(config).size


def init_params(config: ModelConfig, seed: int) -> np.ndarray:
    """Flat parameter vector: RBF weights ~ N(0, 1/G), residuals at identity.

    The RBF weight scale 1/G keeps layer outputs near unit variance for
    normalized inputs; residual weights start at 1 (w_c = 1, w1 = w2 = 1)
    so a fresh model behaves like a perturbed SiLU network.
    """
    rng = np.random.default_rng(seed)
    layout = build_layout(config)
    params = np.zeros(layout.size)
    g = config.grid.points
    for name in layout.names():
        start, stop, shape = layout.span(name)
        kind = name.split(".", 1)[1]
        if kind in ("w", "w_re", "w_im"):
            params[start:stop] = rng.normal(0.0, 1.0 / g, stop - start)
        elif kind in ("silu_w", "res_a"):
            params[start:stop] = 1.0
        elif kind == "res_b":
            params[start:stop] = 1.0 if config.csilu_variant == "real" else 0.0
        elif kind.startswith(("beta", "bias")):
            params[start:stop] = 0.0
        else:  # normalization affine
            params[start:stop] = identity_affine(kind, stop - start)
    return params


def _make_norms(config: ModelConfig):
    if config.norm_variant == "none":
        return [None] * (config.n_layers - 1)
    return [
        NormLayer(config.norm_variant, config.widths[l + 1])
        for l in range(config.n_layers - 1)
    ]


class CvkanModel:
    """Complex-valued KAN: grid RBF edges with CSiLU residuals.

    Holds the config, the flat parameter vector, and the normalization
    running statistics.  Forward passes accept either a Var wrapping the
    parameter vector (training) or the raw array (inference).
    """

    def __init__(self, config: ModelConfig, params: np.ndarray, norms=None):
        if config.model_type != "cvkan":
            raise ConfigError("CvkanModel requires model_type 'cvkan'")
        self.config = config
        self.layout = build_layout(config)
        params = np.asarray(params, dtype=np.float64)
        if params.shape != (self.layout.size,):
            raise ShapeError(
                f"parameter vector has shape {params.shape}, expected ({self.layout.size},)"
            )
        self.params = params
        self.norms = _make_norms(config) if norms is None else norms
        # kernels take the 1-D axis; grid point (u, v) = axis[u] + i axis[v]
        self.axis = config.grid.axis()
        self.inv_bw2 = config.grid.inv_bw2

    @classmethod
    def init(cls, config: ModelConfig, seed: int) -> "CvkanModel":
        return cls(config, init_params(config, seed))

    # ---- forward -----------------------------------------------------

    def _affine(self, pvar, l):
        return {
            fname: self.layout.take(pvar, f"norm{l}.{fname}")
            for fname in AFFINE_FIELDS[self.config.norm_variant]
        }

    def forward_graph(self, pvar, xr, xi, train=False, sink=None):
        """Full network forward; returns (yr, yi), yi None for real output."""
        cfg = self.config
        last = cfg.n_layers - 1
        for l in range(cfg.n_layers):
            complex_out = l < last or cfg.output_domain == "complex"
            take = self.layout.take
            k = ad.complex_rbf_basis(xr, xi, self.axis, self.axis, self.inv_bw2)
            zr = ad.matmul(k, take(pvar, f"layer{l}.w_re"))
            sr = ad.silu(xr)
            si = ad.silu(xi)
            res_a = take(pvar, f"layer{l}.res_a")
            res_b = take(pvar, f"layer{l}.res_b")
            beta_r = ad.sum_(take(pvar, f"layer{l}.beta_re"), axis=0)
            if complex_out:
                zi = ad.matmul(k, take(pvar, f"layer{l}.w_im"))
                if cfg.csilu_variant == "complex":
                    zr = zr + ad.matmul(sr, res_a) - ad.matmul(si, res_b)
                    zi = zi + ad.matmul(si, res_a) + ad.matmul(sr, res_b)
                else:
                    zr = zr + ad.matmul(sr, res_a)
                    zi = zi + ad.matmul(si, res_b)
                zr = zr + beta_r
                zi = zi + ad.sum_(take(pvar, f"layer{l}.beta_im"), axis=0)
            else:
                if cfg.csilu_variant == "complex":
                    zr = zr + ad.matmul(sr, res_a) - ad.matmul(si, res_b)
                else:
                    zr = zr + ad.matmul(sr, res_a) + ad.matmul(si, res_b)
                zr = zr + beta_r
                return zr, None
            if l < last and self.norms[l] is not None:
                xr, xi = self.norms[l].forward(zr, zi, self._affine(pvar, l), train, sink)
            else:
                xr, xi = zr, zi
        return xr, xi

    def predict(self, features: ComplexBatch):
        """Eval-mode forward on raw arrays; complex (n, k) or real logits."""
        yr, yi = self.forward_graph(self.params, features.re, features.im, train=False)
        yr = ad._val(yr)
        if yi is None:
            return yr
        return yr + 1j * ad._val(yi)

    # ---- detailed numpy forward for relevance ------------------------

    def forward_detail(self, features: ComplexBatch):
        """Record per-edge outputs and vertex values layer by layer.

        Returns (edge_outputs, vertex_values): edge_outputs[l] is a complex
        (n, p, q) array of every edge's output; vertex_values[l] is the
        complex (n, width_l) array at each vertex (inputs included,
        normalization applied between layers as in eval mode).
        """
        cfg = self.config
        g = cfg.grid.points
        last = cfg.n_layers - 1
        xr, xi = features.re.copy(), features.im.copy()
        vertex_values = [xr + 1j * xi]
        edge_outputs = []
        for l in range(cfg.n_layers):
            p, q = cfg.widths[l], cfg.widths[l + 1]
            complex_out = l < last or cfg.output_domain == "complex"
            read = self.layout.read
            k = rbf2d_basis(
                np.ascontiguousarray(xr), np.ascontiguousarray(xi),
                self.axis, self.axis, self.inv_bw2,
            ).reshape(-1, p, g * g)
            w_re = read(self.params, f"layer{l}.w_re").reshape(p, g * g, q)
            phi_r = np.einsum("npg,pgq->npq", k, w_re)
            sr = _silu(xr)[:, :, None]
            si = _silu(xi)[:, :, None]
            a = read(self.params, f"layer{l}.res_a")[None]
            b = read(self.params, f"layer{l}.res_b")[None]
            beta_r = read(self.params, f"layer{l}.beta_re")[None]
            if complex_out:
                w_im = read(self.params, f"layer{l}.w_im").reshape(p, g * g, q)
                phi_i = np.einsum("npg,pgq->npq", k, w_im)
                if cfg.csilu_variant == "complex":
                    phi_r = phi_r + sr * a - si * b
                    phi_i = phi_i + si * a + sr * b
                else:
                    phi_r = phi_r + sr * a
                    phi_i = phi_i + si * b
                phi_r = phi_r + beta_r
                phi_i = phi_i + read(self.params, f"layer{l}.beta_im")[None]
            else:
                if cfg.csilu_variant == "complex":
                    phi_r = phi_r + sr * a - si * b
                else:
                    phi_r = phi_r + sr * a + si * b
                phi_r = phi_r + beta_r
                phi_i = np.zeros_like(phi_r)
            edge_outputs.append(phi_r + 1j * phi_i)
            zr = phi_r.sum(axis=1)
            zi = phi_i.sum(axis=1)
            vertex_values.append(zr + 1j * zi)
            if l < last:
                if self.norms[l] is not None:
                    affine = {
                        fname: read(self.params, f"norm{l}.{fname}")
                        for fname in AFFINE_FIELDS[cfg.norm_variant]
                    }
                    out = self.norms[l].forward(zr, zi, affine, train=False)
                    xr, xi = ad._val(out[0]), ad._val(out[1])
                else:
                    xr, xi = zr, zi
        return edge_outputs, vertex_values


class FastKanModel:
    """Real-valued RBF KAN baseline (split-real inputs/outputs)."""

    def __init__(self, config: ModelConfig, params: np.ndarray, norms=None):
        if config.model_type != "fastkan":
            raise ConfigError("FastKanModel requires model_type 'fastkan'")
        self.config = config
        self.layout = build_layout(config)
        params = np.asarray(params, dtype=np.float64)
        if params.shape != (self.layout.size,):
            raise ShapeError(
                f"parameter vector has shape {params.shape}, expected ({self.layout.size},)"
            )
        self.params = params
        self.norms = _make_norms(config) if norms is None else norms
        self.grid1d = config.grid.axis()
        self.inv_bw2 = config.grid.inv_bw2

    @classmethod
    def init(cls, config: ModelConfig, seed: int) -> "FastKanModel":
        return cls(config, init_params(config, seed))

    def forward_graph(self, pvar, x, train=False, sink=None):
        cfg = self.config
        last = cfg.n_layers - 1
        take = self.layout.take
        for l in range(cfg.n_layers):
            k = ad.real_rbf_basis(x, self.grid1d, self.inv_bw2)
            z = ad.matmul(k, take(pvar, f"layer{l}.w"))
            z = z + ad.matmul(ad.silu(x), take(pvar, f"layer{l}.silu_w"))
            z = z + take(pvar, f"layer{l}.bias")
            if l < last and self.norms[l] is not None:
                affine = {
                    fname: take(pvar, f"norm{l}.{fname}")
                    for fname in AFFINE_FIELDS[cfg.norm_variant]
                }
                x = self.norms[l].forward_real(z, affine, train, sink)
            else:
                x = z
        return x

    def predict(self, features: np.ndarray) -> np.ndarray:
        return ad._val(self.forward_graph(self.params, np.asarray(features, dtype=np.float64)))


def _silu(x):
    s = np.empty_like(x)
    pos = x >= 0
    s[pos] = 1.0 / (1.0 + np.exp(-x[pos]))
    e = np.exp(x[~pos])
    s[~pos] = e / (1.0 + e)
    return x * s


def make_model(config: ModelConfig, seed: int):
    if config.model_type == "fastkan":
        return FastKanModel.init(config, seed)
    return CvkanModel.init(config, seed)


def commit_stats(sink) -> None:
    """Apply queued running-statistic updates after a successful step."""
    for layer, stats in sink:
        layer.commit(stats)
