"""Pauli strings and the normalized Pauli coordinate frame of su(2^n).

Conventions
-----------
* Qubit 0 is the leftmost tensor factor, i.e. the most significant bit of a
  computational basis index. The same holds for the ``x``/``z`` bit masks, so
  ``popcount(index & z)`` gives the Z parity of basis state ``index``.
* A string with masks ``(x, z)`` and quarter-phase ``phase`` is
  ``i**phase * prod_q i**(x_q z_q) X_q**x_q Z_q**z_q``; ``x = z = 1`` on a qubit
  is therefore Y.
* Coordinates of a traceless skew-Hermitian ``a`` are
  ``c_P = Re tr((iP/sqrt(2^n))^dagger a)`` for the ``4^n - 1`` non-identity
  strings, ordered by the integer ``(x << n) | z``.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Mapping

import numpy as np
import scipy.linalg

_LETTERS = {(0, 0): "I", (1, 0): "X", (1, 1): "Y", (0, 1): "Z"}
_BITS = {v: k for k, v in _LETTERS.items()}
_SIGN_PREFIX = {0: "", 1: "+i", 2: "-", 3: "-i"}
_LABEL_RE = re.compile(r"^\s*([+-]?)(i?)([IXYZ]+)\s*$")


class DimensionError(ValueError):
    """Operands live in spaces of different dimension."""


def _popcount(v) -> np.ndarray | int:
    if isinstance(v, (int, np.integer)):
        return int(v).bit_count()
    v = np.asarray(v, dtype=np.int64)
    out = np.zeros_like(v)
    while np.any(v):
        out += v & 1
        v = v >> 1
    return out


@dataclass(frozen=True, order=True)
class PauliString:
    """An n-qubit Pauli operator ``i**phase * P`` in binary symplectic form."""

    n: int
    x: int
    z: int
    phase: int = 0

    def __post_init__(self):
        if self.n < 0:
            raise ValueError("qubit count must be nonnegative")
        limit = 1 << self.n
        if not (0 <= self.x < limit and 0 <= self.z < limit):
            raise ValueError(f"masks out of range for n={self.n}")
        object.__setattr__(self, "phase", self.phase % 4)

    @classmethod
    def from_label(cls, label: str) -> PauliString:
        """Parse ``"XIZY"``, ``"-XX"``, ``"+iZ"`` or ``"-iYY"``."""
        m = _LABEL_RE.match(label)
        if not m:
            raise ValueError(f"bad Pauli label {label!r}")
        sign, imag, body = m.groups()
        phase = (2 if sign == "-" else 0) + (1 if imag else 0)
        n = len(body)
        x = z = 0
        for q, ch in enumerate(body):
            bx, bz = _BITS[ch]
            shift = n - 1 - q
            x |= bx << shift
            z |= bz << shift
        return cls(n, x, z, phase)

    @classmethod
    def single(cls, n: int, qubit: int, letter: str) -> PauliString:
        return cls.from_label("".join(letter if q == qubit else "I" for q in range(n)))

    @classmethod
    def from_index(cls, n: int, index: int) -> PauliString:
        """Inverse of :attr:`index` (frame position, identity excluded)."""
        full = index + 1
        return cls(n, full >> n, full & ((1 << n) - 1))

    @property
    def body(self) -> str:
        return "".join(
            _LETTERS[((self.x >> (self.n - 1 - q)) & 1, (self.z >> (self.n - 1 - q)) & 1)]
            for q in range(self.n)
        )

    @property
    def label(self) -> str:
        return _SIGN_PREFIX[self.phase] + self.body

    @property
    def index(self) -> int:
        """Position in the coordinate frame; -1 for the identity."""
        return ((self.x << self.n) | self.z) - 1

    @property
    def is_identity(self) -> bool:
        return self.x == 0 and self.z == 0

    @property
    def weight(self) -> int:
        return _popcount(self.x | self.z)

    def unsigned(self) -> PauliString:
        return PauliString(self.n, self.x, self.z, 0)

    def commutes(self, other: PauliString) -> bool:
        _check_n(self, other)
        return (_popcount(self.x & other.z) + _popcount(self.z & other.x)) % 2 == 0

    def __mul__(self, other: PauliString) -> PauliString:
        _check_n(self, other)
        x3, z3 = self.x ^ other.x, self.z ^ other.z
        e = (
            self.phase
            + other.phase
            + _popcount(self.x & self.z)
            + _popcount(other.x & other.z)
            + 2 * _popcount(self.z & other.x)
            - _popcount(x3 & z3)
        )
        return PauliString(self.n, x3, z3, e % 4)

    def to_dense(self) -> np.ndarray:
        return pauli_to_dense(self)

    def __str__(self) -> str:
        return self.label


def _check_n(a: PauliString, b: PauliString) -> None:
    if a.n != b.n:
        raise DimensionError(f"qubit counts differ: {a.n} vs {b.n}")


def pauli_to_dense(p: PauliString) -> np.ndarray:
    """Dense ``2^n x 2^n`` matrix of ``p``."""
    dim = 1 << p.n
    cols = np.arange(dim)
    rows = cols ^ p.x
    signs = 1 - 2 * (_popcount(cols & p.z) % 2)
    out = np.zeros((dim, dim), dtype=complex)
    out[rows, cols] = (1j ** ((p.phase + _popcount(p.x & p.z)) % 4)) * signs
    return out


def num_qubits(a: np.ndarray) -> int:
    dim = a.shape[-1]
    n = dim.bit_length() - 1
    if a.shape[-2] != dim or (1 << n) != dim:
        raise DimensionError(f"expected a 2^n x 2^n matrix, got shape {a.shape}")
    return n


def frame_size(n: int) -> int:
    return 4**n - 1


def all_pauli_strings(n: int) -> list[PauliString]:
    """Non-identity strings in frame order."""
    return [PauliString.from_index(n, j) for j in range(frame_size(n))]


@lru_cache(maxsize=None)
def _tables(n: int):
    dim = 1 << n
    idx = np.arange(dim)
    hadamard = scipy.linalg.hadamard(dim).astype(float) if dim > 1 else np.ones((1, 1))
    partner = idx[None, :] ^ idx[:, None]  # partner[x, c] = c ^ x
    phase = (1j) ** (_popcount(idx[:, None] & idx[None, :]) % 4)  # i^{|x&z|}
    for arr in (hadamard, partner, phase):
        arr.setflags(write=False)
    return hadamard, partner, phase


def vectorize(a: np.ndarray) -> np.ndarray:
    """Real coordinates of traceless skew-Hermitian ``a`` (batched over leading axes).

    Uses a Walsh-Hadamard transform per X-mask, so the cost is
    ``O(4^n * 2^n)`` per matrix instead of ``O(8^n)``.
    """
    a = np.asarray(a)
    n = num_qubits(a)
    dim = 1 << n
    hadamard, partner, phase = _tables(n)
    cols = np.arange(dim)
    gathered = a[..., cols[None, :], partner]  # [.., x, c] = a[c, c ^ x]
    traces = phase * (gathered @ hadamard)  # tr(P_{x,z} a)
    coords = traces.imag.reshape(a.shape[:-2] + (dim * dim,)) / np.sqrt(dim)
    return coords[..., 1:]


def unvectorize(coords: np.ndarray, n: int) -> np.ndarray:
    """Inverse of :func:`vectorize`; batched over leading axes."""
    coords = np.asarray(coords, dtype=float)
    dim = 1 << n
    if coords.shape[-1] != frame_size(n):
        raise DimensionError(f"expected {frame_size(n)} coordinates, got {coords.shape[-1]}")
    hadamard, partner, phase = _tables(n)
    full = np.zeros(coords.shape[:-1] + (dim * dim,))
    full[..., 1:] = coords
    beta = 1j * phase * full.reshape(coords.shape[:-1] + (dim, dim)) / np.sqrt(dim)
    values = beta @ hadamard  # [.., x, c] = a[c ^ x, c]
    out = np.zeros(coords.shape[:-1] + (dim, dim), dtype=complex)
    cols = np.broadcast_to(np.arange(dim)[None, :], (dim, dim))
    out[..., partner, cols] = values
    return out


def hs_inner(a: np.ndarray, b: np.ndarray) -> float:
    """``Re tr(a^dagger b)``."""
    if a.shape != b.shape:
        raise DimensionError(f"shapes differ: {a.shape} vs {b.shape}")
    return float(np.real(np.vdot(a, b)))


def hs_norm(a: np.ndarray) -> float:
    return float(np.linalg.norm(a))


def bracket(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    if a.shape != b.shape:
        raise DimensionError(f"shapes differ: {a.shape} vs {b.shape}")
    return a @ b - b @ a


def is_skew_hermitian(a: np.ndarray, traceless: bool = True, tol: float = 1e-12) -> bool:
    scale = max(1.0, float(np.max(np.abs(a), initial=0.0)))
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        return False
    if np.max(np.abs(a + a.conj().T), initial=0.0) > tol * scale:
        return False
    return not traceless or abs(np.trace(a)) <= tol * scale * a.shape[0]


def check_skew_hermitian(a: np.ndarray, name: str = "operator", traceless: bool = True) -> np.ndarray:
    a = np.asarray(a, dtype=complex)
    if not is_skew_hermitian(a, traceless=traceless):
        kind = "traceless skew-Hermitian" if traceless else "skew-Hermitian"
        raise ValueError(f"{name} is not {kind}")
    return a


def pauli_coefficients(a: np.ndarray) -> np.ndarray:
    """Real ``a_P`` with ``a = sum_P a_P * iP`` (frame order)."""
    n = num_qubits(np.asarray(a))
    return vectorize(a) / np.sqrt(2.0**n)


def to_pauli_terms(a: np.ndarray, cutoff: float = 1e-8) -> dict[PauliString, float]:
    """Sparse map ``P -> a_P`` for the terms of ``a = sum a_P iP`` above ``cutoff``."""
    n = num_qubits(np.asarray(a))
    coeffs = pauli_coefficients(a)
    return {
        PauliString.from_index(n, int(j)): float(coeffs[j])
        for j in np.flatnonzero(np.abs(coeffs) > cutoff)
    }


def from_pauli_terms(terms: Mapping[PauliString | str, float] | Iterable, n: int | None = None) -> np.ndarray:
    """Dense ``sum_P a_P * iP``; a ``-`` label prefix folds into the coefficient."""
    items = terms.items() if isinstance(terms, Mapping) else terms
    parsed = []
    for p, c in items:
        p = PauliString.from_label(p) if isinstance(p, str) else p
        if p.phase % 2:
            raise ValueError(f"imaginary phase on {p.label} would break skew-Hermiticity")
        parsed.append((p.unsigned(), -c if p.phase == 2 else c))
    if n is None:
        if not parsed:
            raise ValueError("cannot infer qubit count from an empty sum")
        n = parsed[0][0].n
    out = np.zeros((1 << n, 1 << n), dtype=complex)
    for p, c in parsed:
        if p.n != n:
            raise DimensionError(f"term {p.label} has {p.n} qubits, expected {n}")
        out += 1j * c * pauli_to_dense(p)
    return out
