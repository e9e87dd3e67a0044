"""Kernel backends: numpy reference vs numba-jitted twins.

The contract is simple — identical inputs produce (near-)identical outputs —
so most of this file is agreement checks against a naive triple-loop oracle
and between the two backends.
"""

import numpy as np
import pytest

from cvkan.errors import ConfigError
from cvkan.kernels import numpy_backend, select_backend

RNG = np.random.default_rng(1234)


def _naive_rbf2d(xr, xi, gre, gim, inv_bw2):
    n, p = xr.shape
    g = gre.size
    out = np.zeros((n, p * g * g))
    for s in range(n):
        for j in range(p):
            for u in range(g):
                for v in range(g):
                    d2 = (xr[s, j] - gre[u]) ** 2 + (xi[s, j] - gim[v]) ** 2
                    out[s, j * g * g + u * g + v] = np.exp(-d2 * inv_bw2)
    return out


def _random_inputs(n=5, p=3, g=4):
    xr = RNG.normal(size=(n, p))
    xi = RNG.normal(size=(n, p))
    axis = np.linspace(-2.0, 2.0, g)
    return xr, xi, axis


def test_rbf2d_matches_naive_loop():
    xr, xi, axis = _random_inputs()
    got = numpy_backend.rbf2d_basis(xr, xi, axis, axis, 1.0)
    want = _naive_rbf2d(xr, xi, axis, axis, 1.0)
    assert got.shape == want.shape
    np.testing.assert_allclose(got, want, rtol=0, atol=1e-15)


def test_rbf2d_flattening_is_row_major_over_re_then_im():
    # one sample, one feature sitting exactly on grid node (u=1, v=2)
    axis = np.linspace(-2.0, 2.0, 4)
    xr = np.array([[axis[1]]])
    xi = np.array([[axis[2]]])
    k = numpy_backend.rbf2d_basis(xr, xi, axis, axis, 1.0)
    assert k[0, 1 * 4 + 2] == 1.0
    assert k[0].max() == 1.0


def test_rbf1d_matches_direct_formula():
    x = RNG.normal(size=(6, 2))
    grid = np.linspace(-1.0, 1.0, 5)
    k = numpy_backend.rbf1d_basis(x, grid, 2.0)
    for s in range(6):
        for j in range(2):
            for u in range(5):
                want = np.exp(-2.0 * (x[s, j] - grid[u]) ** 2)
                assert abs(k[s, j * 5 + u] - want) < 1e-15


def test_backward_matches_finite_differences():
    xr, xi, axis = _random_inputs(n=3, p=2, g=4)
    inv_bw2 = 0.7
    dk = RNG.normal(size=(3, 2 * 4 * 4))

    def scalar(xr_, xi_):
        return float(np.sum(dk * numpy_backend.rbf2d_basis(xr_, xi_, axis, axis, inv_bw2)))

    k = numpy_backend.rbf2d_basis(xr, xi, axis, axis, inv_bw2)
    dxr, dxi = numpy_backend.rbf2d_basis_bwd(dk, k, xr, xi, axis, axis, inv_bw2)
    h = 1e-6
    for s in range(3):
        for j in range(2):
            up = xr.copy()
            dn = xr.copy()
            up[s, j] += h
            dn[s, j] -= h
            fd = (scalar(up, xi) - scalar(dn, xi)) / (2 * h)
            assert abs(dxr[s, j] - fd) < 1e-6
            up = xi.copy()
            dn = xi.copy()
            up[s, j] += h
            dn[s, j] -= h
            fd = (scalar(xr, up) - scalar(xr, dn)) / (2 * h)
            assert abs(dxi[s, j] - fd) < 1e-6


def test_rbf1d_backward_matches_finite_differences():
    x = RNG.normal(size=(4, 2))
    grid = np.linspace(-2.0, 2.0, 6)
    dk = RNG.normal(size=(4, 12))
    k = numpy_backend.rbf1d_basis(x, grid, 1.0)
    dx = numpy_backend.rbf1d_basis_bwd(dk, k, x, grid, 1.0)
    h = 1e-6
    for s in range(4):
        for j in range(2):
            up = x.copy()
            dn = x.copy()
            up[s, j] += h
            dn[s, j] -= h
            fd = (
                np.sum(dk * numpy_backend.rbf1d_basis(up, grid, 1.0))
                - np.sum(dk * numpy_backend.rbf1d_basis(dn, grid, 1.0))
            ) / (2 * h)
            assert abs(dx[s, j] - fd) < 1e-6


def test_backends_agree():
    numba_backend = pytest.importorskip("cvkan.kernels.numba_backend")
    xr, xi, axis = _random_inputs(n=8, p=3, g=6)
    inv_bw2 = 1.3
    k_np = numpy_backend.rbf2d_basis(xr, xi, axis, axis, inv_bw2)
    k_nb = numba_backend.rbf2d_basis(xr, xi, axis, axis, inv_bw2)
    np.testing.assert_allclose(k_np, k_nb, rtol=0, atol=5e-16)

    dk = RNG.normal(size=k_np.shape)
    b_np = numpy_backend.rbf2d_basis_bwd(dk, k_np, xr, xi, axis, axis, inv_bw2)
    b_nb = numba_backend.rbf2d_basis_bwd(dk, k_nb, xr, xi, axis, axis, inv_bw2)
    np.testing.assert_allclose(b_np[0], b_nb[0], rtol=0, atol=1e-12)
    np.testing.assert_allclose(b_np[1], b_nb[1], rtol=0, atol=1e-12)

    x = RNG.normal(size=(8, 3))
    k1_np = numpy_backend.rbf1d_basis(x, axis, inv_bw2)
    k1_nb = numba_backend.rbf1d_basis(x, axis, inv_bw2)
    np.testing.assert_allclose(k1_np, k1_nb, rtol=0, atol=5e-16)
    dk1 = RNG.normal(size=k1_np.shape)
    np.testing.assert_allclose(
        numpy_backend.rbf1d_basis_bwd(dk1, k1_np, x, axis, inv_bw2),
        numba_backend.rbf1d_basis_bwd(dk1, k1_nb, x, axis, inv_bw2),
        rtol=0,
        atol=1e-12,
    )


def test_select_backend():
    assert select_backend("numpy").NAME == "numpy"
    assert select_backend("auto").NAME in ("numpy", "numba")
    with pytest.raises(ConfigError):
        select_backend("cuda")
