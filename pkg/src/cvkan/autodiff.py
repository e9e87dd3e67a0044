"""Reverse-mode differentiation over float64 numpy arrays.

Complex quantities are differentiated as real/imaginary channel pairs, so
every tracked value here is a real array.  A :class:`Var` wraps one array
together with the record of the operation that produced it; the DAG of
Var nodes reachable from a loss value is the gradient tape.  Calling
:func:`value_and_grad` replays that tape backwards and returns exact
partial derivatives with respect to a flat parameter vector.

Reductions accumulate in a fixed sequential order, so a given sequence of
operations is bitwise deterministic on a single thread.

Losses must be *pure* functions of the parameter vector: when a non-finite
loss or gradient shows up, the loss is re-evaluated with per-operation
finiteness checks enabled to name the offending operation in the raised
:class:`~cvkan.errors.GradientError`.
"""

from __future__ import annotations

import numpy as np

from . import kernels
from .errors import GradientError, ShapeError

_CHECK_FINITE = False


class Var:
    """One node of the gradient tape: a value plus its provenance."""

    __slots__ = ("value", "parents", "op")

    def __init__(self, value, parents=(), op="input"):
        self.value = np.asarray(value, dtype=np.float64)
        self.parents = parents
        self.op = op
        if _CHECK_FINITE and not np.all(np.isfinite(self.value)):
            raise GradientError(op, "forward pass")

    @property
    def shape(self):
        return self.value.shape

    def __add__(self, other):
        return add(self, other)

    __radd__ = __add__

    def __sub__(self, other):
        return sub(self, other)

    def __rsub__(self, other):
        return sub(other, self)

    def __mul__(self, other):
        return mul(self, other)

    __rmul__ = __mul__

    def __truediv__(self, other):
        return div(self, other)

    def __rtruediv__(self, other):
        return div(other, self)

    def __neg__(self):
        return neg(self)

    def __repr__(self):
        return f"Var(op={self.op!r}, shape={self.value.shape})"


def _val(x):
    return x.value if isinstance(x, Var) else np.asarray(x, dtype=np.float64)


def _parents(*pairs):
    return tuple((o, f) for o, f in pairs if isinstance(o, Var))


def _unbroadcast(g, shape):
    """Sum a broadcasted gradient back down to ``shape``."""
    if g.shape == shape:
        return g
    extra = g.ndim - len(shape)
    if extra > 0:
        g = g.sum(axis=tuple(range(extra)))
    axes = tuple(i for i, (gs, ss) in enumerate(zip(g.shape, shape)) if ss == 1 and gs != 1)
    if axes:
        g = g.sum(axis=axes, keepdims=True)
    return g.reshape(shape)


# ---------------------------------------------------------------------------
# primitives


def add(a, b):
    av, bv = _val(a), _val(b)
    return Var(
        av + bv,
        _parents((a, lambda g: _unbroadcast(g, av.shape)), (b, lambda g: _unbroadcast(g, bv.shape))),
        "add",
    )


def sub(a, b):
    av, bv = _val(a), _val(b)
    return Var(
        av - bv,
        _parents((a, lambda g: _unbroadcast(g, av.shape)), (b, lambda g: _unbroadcast(-g, bv.shape))),
        "sub",
    )


def mul(a, b):
    av, bv = _val(a), _val(b)
    return Var(
        av * bv,
        _parents(
            (a, lambda g: _unbroadcast(g * bv, av.shape)),
            (b, lambda g: _unbroadcast(g * av, bv.shape)),
        ),
        "mul",
    )


def div(a, b):
    av, bv = _val(a), _val(b)
    return Var(
        av / bv,
        _parents(
            (a, lambda g: _unbroadcast(g / bv, av.shape)),
            (b, lambda g: _unbroadcast(-g * av / (bv * bv), bv.shape)),
        ),
        "div",
    )


def neg(a):
    return Var(-_val(a), _parents((a, lambda g: -g)), "neg")


def exp(a):
    out = np.exp(_val(a))
    return Var(out, _parents((a, lambda g: g * out)), "exp")


def sqrt(a):
    out = np.sqrt(_val(a))
    return Var(out, _parents((a, lambda g: g * 0.5 / out)), "sqrt")


def square(a):
    av = _val(a)
    return Var(av * av, _parents((a, lambda g: g * 2.0 * av)), "square")


def silu(a):
    """x * sigmoid(x), computed without overflow for large |x|."""
    av = _val(a)
    s = np.empty_like(av)
    pos = av >= 0
    s[pos] = 1.0 / (1.0 + np.exp(-av[pos]))
    e = np.exp(av[~pos])
    s[~pos] = e / (1.0 + e)
    return Var(av * s, _parents((a, lambda g: g * s * (1.0 + av * (1.0 - s)))), "silu")


def sum_(a, axis=None):
    av = _val(a)
    out = av.sum(axis=axis)

    def vjp(g):
        if axis is None:
            return np.full(av.shape, g)
        return np.broadcast_to(np.expand_dims(g, axis), av.shape).copy()

    return Var(out, _parents((a, vjp)), "sum")


def mean(a, axis=None):
    av = _val(a)
    out = av.mean(axis=axis)
    count = av.size if axis is None else av.shape[axis]

    def vjp(g):
        if axis is None:
            return np.full(av.shape, g / count)
        return np.broadcast_to(np.expand_dims(g / count, axis), av.shape).copy()

    return Var(out, _parents((a, vjp)), "mean")


def matmul(a, b):
    av, bv = _val(a), _val(b)
    if av.ndim != 2 or bv.ndim != 2:
        raise ShapeError(f"matmul expects 2-D operands, got {av.shape} @ {bv.shape}")
    return Var(
        av @ bv,
        _parents((a, lambda g: g @ bv.T), (b, lambda g: av.T @ g)),
        "matmul",
    )


def reshape(a, shape):
    av = _val(a)
    return Var(av.reshape(shape), _parents((a, lambda g: g.reshape(av.shape))), "reshape")


def segment(a, start, stop):
    """Contiguous slice of a flat vector (parameter unpacking)."""
    av = _val(a)

    def vjp(g):
        out = np.zeros_like(av)
        out[start:stop] = g
        return out

    return Var(av[start:stop], _parents((a, vjp)), "segment")


def softmax_cross_entropy(logits, labels):
    """Mean softmax cross-entropy of real logits against integer labels."""
    lv = _val(logits)
    labels = np.asarray(labels)
    n, c = lv.shape
    if labels.shape != (n,):
        raise ShapeError(f"labels shape {labels.shape} does not match batch size {n}")
    if labels.min() < 0 or labels.max() >= c:
        raise ShapeError(f"labels must lie in [0, {c})")
    m = lv.max(axis=1, keepdims=True)
    ex = np.exp(lv - m)
    z = ex.sum(axis=1)
    loss = np.mean(np.log(z) + m[:, 0] - lv[np.arange(n), labels])

    def vjp(g):
        p = ex / z[:, None]
        p[np.arange(n), labels] -= 1.0
        return p * (g / n)

    return Var(loss, _parents((logits, vjp)), "softmax_cross_entropy")


def complex_rbf_basis(x_re, x_im, gre, gim, inv_bw2):
    """Gaussian responses on the G x G complex grid, flattened to (n, p*G*G).

    Hot kernel: forward and backward run on the selected backend
    (numba or numpy, see :mod:`cvkan.kernels`).
    """
    xr, xi = _val(x_re), _val(x_im)
    k = kernels.rbf2d_basis(xr, xi, gre, gim, inv_bw2)
    memo = {}

    def both(g):
        if memo.get("g") is not g:
            memo["g"] = g
            memo["dx"] = kernels.rbf2d_basis_bwd(
                np.ascontiguousarray(g), k, xr, xi, gre, gim, inv_bw2
            )
        return memo["dx"]

    return Var(
        k,
        _parents((x_re, lambda g: both(g)[0]), (x_im, lambda g: both(g)[1])),
        "complex_rbf_basis",
    )


def real_rbf_basis(x, grid, inv_bw2):
    """Gaussian responses on the 1-D grid, flattened to (n, p*G)."""
    xv = _val(x)
    k = kernels.rbf1d_basis(xv, grid, inv_bw2)
    return Var(
        k,
        _parents(
            (x, lambda g: kernels.rbf1d_basis_bwd(np.ascontiguousarray(g), k, xv, grid, inv_bw2))
        ),
        "real_rbf_basis",
    )


# ---------------------------------------------------------------------------
# backward pass


def _topo(root):
    order = []
    seen = set()
    stack = [(root, False)]
    while stack:
        node, done = stack.pop()
        if done:
            order.append(node)
            continue
        if id(node) in seen:
            continue
        seen.add(id(node))
        stack.append((node, True))
        for parent, _ in node.parents:
            if id(parent) not in seen:
                stack.append((parent, False))
    return order


def _backward(root, wrt, check=False):
    grads = {id(root): np.ones_like(root.value)}
    for node in reversed(_topo(root)):
        g = grads.get(id(node))
        if g is None:
            continue
        for parent, vjp in node.parents:
            pg = vjp(g)
            if check and not np.all(np.isfinite(pg)):
                raise GradientError(node.op, "backward pass")
            acc = grads.get(id(parent))
            grads[id(parent)] = pg if acc is None else acc + pg
    out = grads.get(id(wrt))
    if out is None:
        out = np.zeros_like(wrt.value)
    return out


def value_and_grad(loss_fn, params):
    """Evaluate ``loss_fn`` at ``params`` and differentiate it.

    ``loss_fn`` maps a Var holding the flat float64 parameter vector to a
    scalar Var, using only operations from this module.  Returns
    ``(loss, gradient)`` with the gradient shaped like ``params``.
    """
    params = np.asarray(params, dtype=np.float64)
    root = Var(params, op="params")
    out = loss_fn(root)
    if not isinstance(out, Var):
        raise TypeError("loss_fn must return a Var")
    if out.value.size != 1:
        raise ShapeError(f"loss must be a scalar, got shape {out.value.shape}")
    g = _backward(out, root)
    val = float(out.value)
    if not (np.isfinite(val) and np.all(np.isfinite(g))):
        _locate_nonfinite(loss_fn, params)
        raise GradientError("<unidentified>", "re-run did not reproduce the failure")
    return val, g


def grad(loss_fn, params):
    """Gradient of a scalar loss with respect to a flat parameter vector."""
    return value_and_grad(loss_fn, params)[1]


def _locate_nonfinite(loss_fn, params):
    global _CHECK_FINITE
    _CHECK_FINITE = True
    try:
        root = Var(params, op="params")
        out = loss_fn(root)
        _backward(out, root, check=True)
    finally:
        _CHECK_FINITE = False
