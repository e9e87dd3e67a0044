"""Complex batch-normalization variants plus the plain real BatchNorm.

Four variants act per feature column:

    bn_c    whiten the 2-D (Re, Im) distribution with the analytic inverse
            square root of the 2x2 covariance, then apply a learnable
            symmetric 2x2 matrix and a complex shift (5 parameters)
    bn_v    center and divide by the complex standard deviation, scale by a
            real gamma, shift by a complex beta (3 parameters)
    bn_r2   two independent real BatchNorms on the channels (4 parameters)
    bn_real ordinary real BatchNorm (2 parameters)

Batch statistics use the population convention (divide by n).  Training
mode computes statistics from the batch and queues an EMA update of the
running statistics (committed by the caller after a successful step);
eval mode normalizes with the running statistics only.
"""

from __future__ import annotations

import numpy as np

from . import autodiff as ad
from .errors import BatchStatsError, ConfigError

VARIANTS = ("bn_c", "bn_v", "bn_r2", "bn_real", "none")

AFFINE_FIELDS = {
    "bn_c": ("g11", "g12", "g22", "beta_re", "beta_im"),
    "bn_v": ("gamma", "beta_re", "beta_im"),
    "bn_r2": ("gamma_re", "beta_re", "gamma_im", "beta_im"),
    "bn_real": ("gamma", "beta"),
    "none": (),
}

_IDENTITY_VALUE = {
    "g11": 1.0,
    "g12": 0.0,
    "g22": 1.0,
    "gamma": 1.0,
    "gamma_re": 1.0,
    "gamma_im": 1.0,
    "beta": 0.0,
    "beta_re": 0.0,
    "beta_im": 0.0,
}


def norm_param_count(variant: str) -> int:
    """Trainable real scalars per normalized feature."""
    if variant not in VARIANTS:
        raise ConfigError(f"unknown normalization variant {variant!r}")
    return len(AFFINE_FIELDS[variant])


def identity_affine(field: str, features: int) -> np.ndarray:
    return np.full(features, _IDENTITY_VALUE[field])


def _inv_sqrt_2x2(a, b, c):
    """Entries of M^(-1/2) for the symmetric 2x2 matrix [[a, b], [b, c]].

    Requires a*c > b^2 (guaranteed here because an epsilon is added to the
    diagonal of a covariance matrix).  Works elementwise over feature
    vectors, on Vars or plain arrays.
    """
    s = ad.sqrt(a * c - b * b) if isinstance(a, ad.Var) or isinstance(b, ad.Var) else np.sqrt(a * c - b * b)
    t = ad.sqrt(a + c + 2.0 * s) if isinstance(s, ad.Var) else np.sqrt(a + c + 2.0 * s)
    d = s * t
    return (c + s) / d, (0.0 - b) / d, (a + s) / d


class NormLayer:
    """Per-feature normalization with running statistics.

    The learnable affine parameters live in the model's flat parameter
    vector and are passed in per call; this object owns only the running
    statistics (mutable state, single writer during training).
    """

    def __init__(self, variant: str, features: int, momentum: float = 0.1, eps: float = 1e-5):
        if variant not in VARIANTS:
            raise ConfigError(f"unknown normalization variant {variant!r}")
        if not 0.0 < momentum < 1.0:
            raise ConfigError(f"momentum must lie in (0, 1), got {momentum}")
        if not eps > 0.0:
            raise ConfigError(f"epsilon must be positive, got {eps}")
        self.variant = variant
        self.features = features
        self.momentum = momentum
        self.eps = eps
        f = features
        if variant == "bn_c":
            self.running = {
                "mean_re": np.zeros(f), "mean_im": np.zeros(f),
                "cov_rr": np.ones(f), "cov_ri": np.zeros(f), "cov_ii": np.ones(f),
            }
        elif variant == "bn_v":
            self.running = {"mean_re": np.zeros(f), "mean_im": np.zeros(f), "var": np.ones(f)}
        elif variant == "bn_r2":
            self.running = {
                "mean_re": np.zeros(f), "var_re": np.ones(f),
                "mean_im": np.zeros(f), "var_im": np.ones(f),
            }
        elif variant == "bn_real":
            self.running = {"mean": np.zeros(f), "var": np.ones(f)}
        else:
            self.running = {}

    def _require_batch(self, n, train):
        if train and n < 2:
            raise BatchStatsError(
                f"{self.variant} needs a batch of at least 2 samples in train mode, got {n}"
            )

    def forward(self, xr, xi, affine, train, sink=None):
        """Normalize a complex column block (xr, xi); returns (yr, yi).

        ``affine`` maps field name -> Var/array of shape (features,).
        In train mode batch statistics are used and, when ``sink`` is
        given, the EMA update is appended as ``(self, stats_dict)``.
        """
        if self.variant == "none":
            return xr, xi
        if self.variant == "bn_real":
            raise ConfigError("bn_real normalizes a real block; use forward_real")
        n = ad._val(xr).shape[0]
        self._require_batch(n, train)

        if train:
            m_re = ad.mean(xr, axis=0)
            m_im = ad.mean(xi, axis=0)
        else:
            m_re = self.running["mean_re"]
            m_im = self.running["mean_im"]
        cr = xr - m_re
        ci = xi - m_im

        if self.variant == "bn_v":
            if train:
                var = ad.mean(ad.square(cr) + ad.square(ci), axis=0)
                if sink is not None:
                    sink.append((self, {
                        "mean_re": m_re.value, "mean_im": m_im.value, "var": var.value,
                    }))
            else:
                var = self.running["var"]
            denom = ad.sqrt(var + self.eps) if isinstance(var, ad.Var) else np.sqrt(var + self.eps)
            yr = (cr / denom) * affine["gamma"] + affine["beta_re"]
            yi = (ci / denom) * affine["gamma"] + affine["beta_im"]
            return yr, yi

        if self.variant == "bn_r2":
            if train:
                v_re = ad.mean(ad.square(cr), axis=0)
                v_im = ad.mean(ad.square(ci), axis=0)
                if sink is not None:
                    sink.append((self, {
                        "mean_re": m_re.value, "var_re": v_re.value,
                        "mean_im": m_im.value, "var_im": v_im.value,
                    }))
                d_re = ad.sqrt(v_re + self.eps)
                d_im = ad.sqrt(v_im + self.eps)
            else:
                d_re = np.sqrt(self.running["var_re"] + self.eps)
                d_im = np.sqrt(self.running["var_im"] + self.eps)
            yr = (cr / d_re) * affine["gamma_re"] + affine["beta_re"]
            yi = (ci / d_im) * affine["gamma_im"] + affine["beta_im"]
            return yr, yi

        # bn_c: full 2x2 whitening
        if train:
            a = ad.mean(ad.square(cr), axis=0)
            c = ad.mean(ad.square(ci), axis=0)
            b = ad.mean(cr * ci, axis=0)
            if sink is not None:
                sink.append((self, {
                    "mean_re": m_re.value, "mean_im": m_im.value,
                    "cov_rr": a.value, "cov_ri": b.value, "cov_ii": c.value,
                }))
        else:
            a = self.running["cov_rr"]
            b = self.running["cov_ri"]
            c = self.running["cov_ii"]
        i11, i12, i22 = _inv_sqrt_2x2(a + self.eps, b, c + self.eps)
        wr = cr * i11 + ci * i12
        wi = cr * i12 + ci * i22
        yr = wr * affine["g11"] + wi * affine["g12"] + affine["beta_re"]
        yi = wr * affine["g12"] + wi * affine["g22"] + affine["beta_im"]
        return yr, yi

    def forward_real(self, x, affine, train, sink=None):
        """Plain real BatchNorm on one real block (bn_real only)."""
        if self.variant != "bn_real":
            raise ConfigError("forward_real is only valid for bn_real layers")
        n = ad._val(x).shape[0]
        self._require_batch(n, train)
        if train:
            m = ad.mean(x, axis=0)
            centered = x - m
            var = ad.mean(ad.square(centered), axis=0)
            if sink is not None:
                sink.append((self, {"mean": m.value, "var": var.value}))
            denom = ad.sqrt(var + self.eps)
        else:
            centered = x - self.running["mean"]
            var = self.running["var"]
            denom = np.sqrt(var + self.eps)
        return (centered / denom) * affine["gamma"] + affine["beta"]

    def commit(self, stats: dict):
        """EMA update of the running statistics with this layer's momentum."""
        m = self.momentum
        for key, value in stats.items():
            self.running[key] = (1.0 - m) * self.running[key] + m * value

    def state_dict(self):
        return {k: v.tolist() for k, v in self.running.items()}

    def load_state_dict(self, state):
        for k in self.running:
            arr = np.asarray(state[k], dtype=np.float64)
            if arr.shape != self.running[k].shape:
                raise ConfigError(f"running stat {k} has shape {arr.shape}, expected {self.running[k].shape}")
            self.running[k] = arr
