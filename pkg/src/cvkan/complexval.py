"""Complex values and batched complex feature matrices.

Complex scalars are plain Python ``complex`` / numpy ``complex128`` values.
Batches are stored as dense row-major ``complex128`` arrays of shape
(rows, cols); all downstream numerics operate on the real/imaginary
channel pair, so :class:`ComplexBatch` exposes both views.
"""

from __future__ import annotations

import numpy as np

from .errors import ShapeError

ComplexScalar = complex


def cadd(a: complex, b: complex) -> complex:
    """Exact IEEE double-precision complex addition."""
    return complex(a) + complex(b)


def cmul(a: complex, b: complex) -> complex:
    """Exact IEEE double-precision complex multiplication."""
    return complex(a) * complex(b)


def cabs2(a: complex) -> float:
    """Squared modulus re^2 + im^2 (no square root)."""
    a = complex(a)
    return a.real * a.real + a.imag * a.imag


class ComplexBatch:
    """A (rows x cols) matrix of finite complex values.

    ``rows`` indexes samples and ``cols`` indexes features.  Construction
    validates shape and finiteness; instances are treated as immutable by
    every consumer in this package.
    """

    __slots__ = ("data",)

    def __init__(self, values, *, check_finite: bool = True):
        arr = np.ascontiguousarray(values, dtype=np.complex128)
        if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
            raise ShapeError(
                f"ComplexBatch requires a 2-D array with rows, cols >= 1, got shape {arr.shape}"
            )
        if check_finite and not np.all(np.isfinite(arr.view(np.float64))):
            raise ShapeError("ComplexBatch entries must all be finite")
        self.data = arr

    @classmethod
    def from_channels(cls, re, im) -> "ComplexBatch":
        re = np.asarray(re, dtype=np.float64)
        im = np.asarray(im, dtype=np.float64)
        if re.shape != im.shape:
            raise ShapeError(f"channel shapes differ: {re.shape} vs {im.shape}")
        return cls(re + 1j * im)

    @property
    def rows(self) -> int:
        return self.data.shape[0]

    @property
    def cols(self) -> int:
        return self.data.shape[1]

    @property
    def re(self) -> np.ndarray:
        return np.ascontiguousarray(self.data.real)

    @property
    def im(self) -> np.ndarray:
        return np.ascontiguousarray(self.data.imag)

    def column(self, j: int) -> np.ndarray:
        return self.data[:, j]

    def select(self, indices) -> "ComplexBatch":
        """Row subset (used for fold splits and mini-batches)."""
        return ComplexBatch(self.data[np.asarray(indices)], check_finite=False)

    def select_cols(self, indices) -> "ComplexBatch":
        return ComplexBatch(self.data[:, np.asarray(indices)], check_finite=False)

    def __len__(self) -> int:
        return self.rows

    def __repr__(self) -> str:
        return f"ComplexBatch(rows={self.rows}, cols={self.cols})"
