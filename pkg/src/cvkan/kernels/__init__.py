"""Backend selection for the hot RBF basis kernels.

The environment variable ``CVKAN_KERNELS`` picks the implementation:

    auto   (default) numba when importable, else numpy
    numba  require the jitted kernels, fail loudly if numba is missing
    numpy  force the pure-numpy fallback

Both backends expose the same four functions and agree to roundoff;
``benchmarks/bench_kernels.py`` compares their throughput.
"""

import os

from ..errors import ConfigError
from . import numpy_backend


def _load_numba_backend():
    from . import numba_backend

    return numba_backend


def select_backend(choice: str | None = None):
    """Return the kernel module for ``choice`` (or the env default)."""
    if choice is None:
        choice = os.environ.get("CVKAN_KERNELS", "auto")
    choice = choice.strip().lower() or "auto"
    if choice == "numpy":
        return numpy_backend
    if choice == "numba":
        return _load_numba_backend()
    if choice == "auto":
        try:
            return _load_numba_backend()
        except ImportError:
            return numpy_backend
    raise ConfigError(f"unknown kernel backend {choice!r} (expected auto|numba|numpy)")


_active = select_backend()

backend_name = _active.NAME
rbf2d_basis = _active.rbf2d_basis
rbf2d_basis_bwd = _active.rbf2d_basis_bwd
rbf1d_basis = _active.rbf1d_basis
rbf1d_basis_bwd = _active.rbf1d_basis_bwd
