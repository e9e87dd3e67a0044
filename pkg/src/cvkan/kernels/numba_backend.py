"""Numba-jitted twins of the numpy RBF basis kernels.

Loops accumulate in a fixed sequential order so results are deterministic
for a given input; fastmath stays off to keep parity with the numpy path.
"""

import numpy as np
from numba import njit

NAME = "numba"


@njit(cache=True)
def rbf2d_basis(xr, xi, gre, gim, inv_bw2):
    n, p = xr.shape
    g = gre.shape[0]
    out = np.empty((n, p * g * g))
    for s in range(n):
        for j in range(p):
            a = xr[s, j]
            b = xi[s, j]
            base = j * g * g
            for u in range(g):
                du = a - gre[u]
                eu = du * du
                row = base + u * g
                for v in range(g):
                    dv = b - gim[v]
                    out[s, row + v] = np.exp(-(eu + dv * dv) * inv_bw2)
    return out


@njit(cache=True)
def rbf2d_basis_bwd(dk, k, xr, xi, gre, gim, inv_bw2):
    n, p = xr.shape
    g = gre.shape[0]
    dxr = np.empty((n, p))
    dxi = np.empty((n, p))
    c = -2.0 * inv_bw2
    for s in range(n):
        for j in range(p):
            a = xr[s, j]
            b = xi[s, j]
            base = j * g * g
            sr = 0.0
            si = 0.0
            for u in range(g):
                du = a - gre[u]
                row = base + u * g
                for v in range(g):
                    w = dk[s, row + v] * k[s, row + v]
                    sr += w * du
                    si += w * (b - gim[v])
            dxr[s, j] = c * sr
            dxi[s, j] = c * si
    return dxr, dxi


@njit(cache=True)
def rbf1d_basis(x, grid, inv_bw2):
    n, p = x.shape
    g = grid.shape[0]
    out = np.empty((n, p * g))
    for s in range(n):
        for j in range(p):
            a = x[s, j]
            base = j * g
            for u in range(g):
                d = a - grid[u]
                out[s, base + u] = np.exp(-d * d * inv_bw2)
    return out


@njit(cache=True)
def rbf1d_basis_bwd(dk, k, x, grid, inv_bw2):
    n, p = x.shape
    g = grid.shape[0]
    dx = np.empty((n, p))
    c = -2.0 * inv_bw2
    for s in range(n):
        for j in range(p):
            a = x[s, j]
            base = j * g
            acc = 0.0
            for u in range(g):
                acc += dk[s, base + u] * k[s, base + u] * (a - grid[u])
            dx[s, j] = c * acc
    return dx
