"""Losses and metrics for complex regression and real classification.

Complex MSE/MAE are defined through the residual modulus: MSE is the mean
of |pred - target|^2 (equal to the sum of squared channel errors, which
keeps split-real baselines comparable), MAE the mean of |pred - target|.

Graph builders (suffix ``_graph``) compose autodiff primitives for
training; the plain functions are numpy metrics for evaluation.
"""

from __future__ import annotations

import numpy as np

from . import autodiff as ad
from .errors import ShapeError


def _check_shapes(a, b, what):
    if np.shape(a) != np.shape(b):
        raise ShapeError(f"{what}: shape {np.shape(a)} vs {np.shape(b)}")


def mse_graph(yr, yi, tr, ti):
    """Mean |pred - target|^2 over samples and outputs (complex)."""
    dr = yr - tr
    if yi is None:
        return ad.mean(ad.square(dr))
    di = yi - ti
    return ad.mean(ad.square(dr) + ad.square(di))


def mae_graph(yr, yi, tr, ti):
    dr = yr - tr
    if yi is None:
        return ad.mean(ad.sqrt(ad.square(dr)))
    di = yi - ti
    return ad.mean(ad.sqrt(ad.square(dr) + ad.square(di)))


def ce_graph(logits, labels):
    return ad.softmax_cross_entropy(logits, labels)


def mse(pred, target) -> float:
    pred, target = np.asarray(pred), np.asarray(target)
    _check_shapes(pred, target, "mse")
    d = pred - target
    return float(np.mean(np.abs(d) ** 2))


def mae(pred, target) -> float:
    pred, target = np.asarray(pred), np.asarray(target)
    _check_shapes(pred, target, "mae")
    return float(np.mean(np.abs(pred - target)))


def cross_entropy(logits, labels) -> float:
    logits = np.asarray(logits, dtype=np.float64)
    labels = np.asarray(labels)
    n, c = logits.shape
    if labels.shape != (n,):
        raise ShapeError(f"labels shape {labels.shape} does not match batch size {n}")
    if labels.min() < 0 or labels.max() >= c:
        raise ShapeError(f"labels must lie in [0, {c})")
    m = logits.max(axis=1)
    z = np.exp(logits - m[:, None]).sum(axis=1)
    return float(np.mean(np.log(z) + m - logits[np.arange(n), labels]))


def accuracy(logits, labels) -> float:
    logits = np.asarray(logits)
    labels = np.asarray(labels)
    if logits.shape[0] != labels.shape[0]:
        raise ShapeError("logits and labels disagree on batch size")
    return float(np.mean(logits.argmax(axis=1) == labels))
