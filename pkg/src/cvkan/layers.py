"""Grids, radial basis functions, residual activations and edge functions.

An edge function maps one complex input to one complex (or real) output:
a weighted sum of Gaussian bumps centered on a G x G grid in the complex
plane, plus a SiLU-based residual activation.  This module holds the
single-edge reference implementations; the batched training path lives in
:mod:`cvkan.model` on top of the kernel backends.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError, ShapeError


@dataclass(frozen=True)
class GridSpec:
    """Uniform G x G grid over [lo, hi]^2 with an RBF width divisor."""

    lo: float = -2.0
    hi: float = 2.0
    points: int = 8
    bandwidth: float = 1.0

    def __post_init__(self):
        if self.points < 2:
            raise ConfigError(f"grid needs at least 2 points per axis, got {self.points}")
        if not self.lo < self.hi:
            raise ConfigError(f"grid range is empty: [{self.lo}, {self.hi}]")
        if not self.bandwidth > 0:
            raise ConfigError(f"bandwidth must be positive, got {self.bandwidth}")

    @property
    def spacing(self) -> float:
        return (self.hi - self.lo) / (self.points - 1)

    def axis(self) -> np.ndarray:
        """Grid coordinates along one axis; endpoints land exactly on lo/hi."""
        out = self.lo + self.spacing * np.arange(self.points, dtype=np.float64)
        out[-1] = self.hi
        return out

    @property
    def inv_bw2(self) -> float:
        return 1.0 / (self.bandwidth * self.bandwidth)


def make_grid(spec: GridSpec) -> np.ndarray:
    """All G*G complex grid points, row-major: index u*G + v holds
    axis[u] + 1j*axis[v] (u = real index, v = imaginary index)."""
    ax = spec.axis()
    return (ax[:, None] + 1j * ax[None, :]).reshape(-1)


def rbf_real(x, g, bandwidth: float = 1.0):
    """exp(-((x - g)/bandwidth)^2), vectorized over x."""
    d = (np.asarray(x, dtype=np.float64) - g) / bandwidth
    return np.exp(-d * d)


def rbf_complex(x, g, bandwidth: float = 1.0):
    """exp(-|x - g|^2 / bandwidth^2): radial in the complex plane."""
    d = np.asarray(x, dtype=np.complex128) - g
    return np.exp(-(d.real * d.real + d.imag * d.imag) / (bandwidth * bandwidth))


def silu(x):
    """x * sigmoid(x), overflow-safe for large negative x."""
    x = np.asarray(x, dtype=np.float64)
    s = np.empty_like(x)
    pos = x >= 0
    s[pos] = 1.0 / (1.0 + np.exp(-x[pos]))
    e = np.exp(x[~pos])
    s[~pos] = e / (1.0 + e)
    return x * s


@dataclass
class CsiluParams:
    """Residual activation parameters: always 4 real degrees of freedom.

    variant "complex": output = w_c * (SiLU(Re x) + i SiLU(Im x)) + beta
    variant "real":    output = w1 * SiLU(Re x) + i w2 * SiLU(Im x) + beta
    """

    variant: str = "complex"
    w_c: complex = 1.0 + 0.0j
    w1: float = 1.0
    w2: float = 1.0
    beta: complex = 0.0 + 0.0j

    def __post_init__(self):
        if self.variant not in ("complex", "real"):
            raise ConfigError(f"unknown csilu variant {self.variant!r}")


def csilu(x, p: CsiluParams):
    """Complex residual activation; vectorized over x."""
    x = np.asarray(x, dtype=np.complex128)
    core = silu(x.real) + 1j * silu(x.imag)
    if p.variant == "complex":
        return p.w_c * core + p.beta
    return p.w1 * core.real + 1j * p.w2 * core.imag + p.beta


@dataclass
class EdgeFunction:
    """One learnable map from the complex plane to C (or to R).

    ``weights[u, v]`` multiplies the RBF at grid point axis[u] + i*axis[v].
    When ``output_domain`` is "real" the imaginary weight channel is
    identically zero and the residual contributes Re(w_c * CSiLU(x)) plus a
    real bias (3 residual parameters instead of 4).
    """

    grid: GridSpec
    weights: np.ndarray
    csilu: CsiluParams = field(default_factory=CsiluParams)
    output_domain: str = "complex"

    def __post_init__(self):
        g = self.grid.points
        self.weights = np.asarray(self.weights, dtype=np.complex128)
        if self.weights.shape != (g, g):
            raise ShapeError(f"weights must be ({g}, {g}), got {self.weights.shape}")
        if self.output_domain not in ("complex", "real"):
            raise ConfigError(f"unknown output domain {self.output_domain!r}")
        if self.output_domain == "real" and np.any(self.weights.imag != 0.0):
            raise ConfigError("real-output edges must have purely real weights")

    def rbf_sum(self, x):
        """The grid part only: sum_{u,v} w_{u,v} * rbf_complex(x - g_{u,v})."""
        x = np.asarray(x, dtype=np.complex128)
        d = x[..., None] - make_grid(self.grid)
        k = np.exp(-(d.real * d.real + d.imag * d.imag) * self.grid.inv_bw2)
        return k @ self.weights.reshape(-1)

    def __call__(self, x):
        return edge_forward(x, self)


def edge_forward(x, e: EdgeFunction):
    """Evaluate one edge function; inputs outside the grid square simply ride
    the decaying RBF tails (no clamping)."""
    x = np.asarray(x, dtype=np.complex128)
    phi = e.rbf_sum(x)
    if e.output_domain == "complex":
        return phi + csilu(x, e.csilu)
    sr, si = silu(x.real), silu(x.imag)
    p = e.csilu
    if p.variant == "complex":
        resid = p.w_c.real * sr - p.w_c.imag * si  # Re(w_c * CSiLU(x))
    else:
        resid = p.w1 * sr + p.w2 * si
    return phi.real + resid + p.beta.real


def real_edge_forward(x, weights, grid: GridSpec, silu_weight: float):
    """FastKAN-style real edge: weighted 1-D RBF sum plus a SiLU residual."""
    x = np.asarray(x, dtype=np.float64)
    weights = np.asarray(weights, dtype=np.float64)
    if weights.shape != (grid.points,):
        raise ShapeError(f"need {grid.points} weights, got shape {weights.shape}")
    d = (x[..., None] - grid.axis()) / grid.bandwidth
    return np.exp(-d * d) @ weights + silu_weight * silu(x)


def layer_forward(x, edges):
    """Reference node summation: output q = sum_p edge_forward(x[:, p]).

    ``edges`` is a (q, p) nested sequence of EdgeFunction.  Slow path used
    for oracle checks and tiny models; training uses the fused kernels.
    """
    x = np.asarray(x, dtype=np.complex128)
    if x.ndim != 2:
        raise ShapeError(f"expected a batch of rows, got shape {x.shape}")
    q = len(edges)
    p = len(edges[0])
    if x.shape[1] != p:
        raise ShapeError(f"input width {x.shape[1]} does not match edge bank width {p}")
    domain = edges[0][0].output_domain
    dtype = np.complex128 if domain == "complex" else np.float64
    out = np.zeros((x.shape[0], q), dtype=dtype)
    for j in range(q):
        if len(edges[j]) != p:
            raise ShapeError("ragged edge bank")
        for i in range(p):
            out[:, j] += edge_forward(x[:, i], edges[j][i])
    return out


@dataclass
class RealWeightBank:
    """A C -> R map built from one real weight channel of a complex edge."""

    grid: GridSpec
    weights: np.ndarray  # (G, G) float64

    def __call__(self, x):
        x = np.asarray(x, dtype=np.complex128)
        d = x[..., None] - make_grid(self.grid)
        k = np.exp(-(d.real * d.real + d.imag * d.imag) * self.grid.inv_bw2)
        return k @ self.weights.reshape(-1).astype(np.float64)


def split_real_equivalence(e: EdgeFunction):
    """Decompose a complex-weight edge into the two real-weight C -> R banks
    whose recombination f_re(x) + i f_im(x) equals the edge's RBF sum."""
    if e.output_domain != "complex":
        raise ConfigError("split_real_equivalence needs a complex-output edge")
    return (
        RealWeightBank(e.grid, e.weights.real.copy()),
        RealWeightBank(e.grid, e.weights.imag.copy()),
    )
