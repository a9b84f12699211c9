"""Orthonormal generalized Gell-Mann frame for su(d), d arbitrary.

Order: for each pair ``j < l`` (row-major) the symmetric element
``i(E_jl + E_lj)/sqrt2`` then the antisymmetric ``(E_jl - E_lj)/sqrt2``;
afterwards the ``d - 1`` diagonal elements
``i * diag(1, .., 1, -l, 0, ..) / sqrt(l(l+1))`` for ``l = 1..d-1``.
"""
from __future__ import annotations

from functools import lru_cache

import numpy as np


def su_dim(d: int) -> int:
    return d * d - 1


@lru_cache(maxsize=None)
def _indices(d: int):
    j, l = np.triu_indices(d, k=1)
    return j, l


def basis(d: int) -> np.ndarray:
    """Stack of shape ``(d^2 - 1, d, d)``."""
    out = np.zeros((su_dim(d), d, d), dtype=complex)
    j, l = _indices(d)
    p = np.arange(j.size)
    s = 1 / np.sqrt(2)
    out[2 * p, j, l] = 1j * s
    out[2 * p, l, j] = 1j * s
    out[2 * p + 1, j, l] = s
    out[2 * p + 1, l, j] = -s
    base = 2 * j.size
    for m in range(1, d):
        diag = np.zeros(d)
        diag[:m] = 1.0
        diag[m] = -m
        out[base + m - 1] = 1j * np.diag(diag) / np.sqrt(m * (m + 1))
    return out


@lru_cache(maxsize=None)
def _diag_matrix(d: int) -> np.ndarray:
    m = np.zeros((d - 1, d))
    for k in range(1, d):
        m[k - 1, :k] = 1.0
        m[k - 1, k] = -k
        m[k - 1] /= np.sqrt(k * (k + 1))
    m.setflags(write=False)
    return m


def vectorize(b: np.ndarray) -> np.ndarray:
    """Coordinates ``Re tr(g^dagger b)`` of skew-Hermitian ``b`` (batched)."""
    b = np.asarray(b)
    d = b.shape[-1]
    j, l = _indices(d)
    upper, lower = b[..., j, l], b[..., l, j]
    s = 1 / np.sqrt(2)
    pairs = np.empty(b.shape[:-2] + (2 * j.size,))
    pairs[..., 0::2] = (upper + lower).imag * s
    pairs[..., 1::2] = (upper - lower).real * s
    diag = np.diagonal(b, axis1=-2, axis2=-1).imag @ _diag_matrix(d).T
    return np.concatenate([pairs, diag], axis=-1)


def unvectorize(coords: np.ndarray, d: int) -> np.ndarray:
    coords = np.asarray(coords, dtype=float)
    if coords.shape[-1] != su_dim(d):
        raise ValueError(f"expected {su_dim(d)} coordinates, got {coords.shape[-1]}")
    j, l = _indices(d)
    s = 1 / np.sqrt(2)
    sym, anti = coords[..., 0:2 * j.size:2], coords[..., 1:2 * j.size:2]
    out = np.zeros(coords.shape[:-1] + (d, d), dtype=complex)
    out[..., j, l] = s * (1j * sym + anti)
    out[..., l, j] = s * (1j * sym - anti)
    diag = coords[..., 2 * j.size:] @ _diag_matrix(d)
    idx = np.arange(d)
    out[..., idx, idx] = 1j * diag
    return out
