"""Pure-numpy implementations of the hot RBF basis kernels.

Each function has a numba twin in ``numba_backend``; the two must agree to
floating-point roundoff.  Shapes:

    xr, xi : (n, p)  real/imaginary input channels
    gre, gim : (G,)  grid coordinates per axis
    2-D basis : (n, p*G*G), flattened row-major over (u, v) = (re, im) index
    1-D basis : (n, p*G)
"""

import numpy as np

NAME = "numpy"


def rbf2d_basis(xr, xi, gre, gim, inv_bw2):
    dr = xr[:, :, None] - gre[None, None, :]
    di = xi[:, :, None] - gim[None, None, :]
    k = np.exp(-(dr[:, :, :, None] ** 2 + di[:, :, None, :] ** 2) * inv_bw2)
    n, p = xr.shape
    return k.reshape(n, p * gre.size * gim.size)


def rbf2d_basis_bwd(dk, k, xr, xi, gre, gim, inv_bw2):
    n, p = xr.shape
    g = gre.size
    w = (dk * k).reshape(n, p, g, g)
    dr = xr[:, :, None] - gre[None, None, :]
    di = xi[:, :, None] - gim[None, None, :]
    dxr = -2.0 * inv_bw2 * np.einsum("npuv,npu->np", w, dr)
    dxi = -2.0 * inv_bw2 * np.einsum("npuv,npv->np", w, di)
    return dxr, dxi


def rbf1d_basis(x, grid, inv_bw2):
    d = x[:, :, None] - grid[None, None, :]
    k = np.exp(-(d ** 2) * inv_bw2)
    n, p = x.shape
    return k.reshape(n, p * grid.size)


def rbf1d_basis_bwd(dk, k, x, grid, inv_bw2):
    n, p = x.shape
    w = (dk * k).reshape(n, p, grid.size)
    d = x[:, :, None] - grid[None, None, :]
    return -2.0 * inv_bw2 * np.einsum("npg,npg->np", w, d)
