"""Subalgebras of su(2^n): orthonormal bases, Lie closure, HS projection."""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

from .pauli import (
    DimensionError,
    PauliString,
    frame_size,
    num_qubits,
    unvectorize,
    vectorize,
)

PAULI_FRAME = "pauli-frame"
DENSE_FRAME = "dense-frame"

NEW_DIRECTION_TOL = 1e-9


@dataclass(frozen=True)
class ConnectivityGraph:
    """Undirected hardware graph on physical qubits ``0..n-1``."""

    n: int
    edges: frozenset = field(default_factory=frozenset)

    def __post_init__(self):
        clean = set()
        for e in self.edges:
            i, j = (int(v) for v in e)
            if i == j:
                raise ValueError(f"self-loop on vertex {i}")
            if not (0 <= i < self.n and 0 <= j < self.n):
                raise ValueError(f"edge ({i}, {j}) out of range for n={self.n}")
            clean.add((min(i, j), max(i, j)))
        object.__setattr__(self, "edges", frozenset(clean))

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[Sequence[int]]) -> ConnectivityGraph:
        return cls(n, frozenset(tuple(e) for e in edges))

    def sorted_edges(self) -> list[tuple[int, int]]:
        return sorted(self.edges)

    def relabel(self, perm: Sequence[int]) -> ConnectivityGraph:
        """Graph with vertex ``v`` renamed to ``perm[v]``."""
        return ConnectivityGraph(self.n, frozenset((perm[i], perm[j]) for i, j in self.edges))


class OrthonormalBasis:
    """HS-orthonormal family in su(2^n), stored as rows of Pauli-frame coordinates.

    ``paulis`` is set only for Pauli-frame bases, where row ``r`` is the unit
    vector of ``i * paulis[r] / sqrt(2^n)``.
    """

    def __init__(self, n: int, coords: np.ndarray, frame_tag: str = DENSE_FRAME,
                 paulis: Sequence[PauliString] | None = None):
        coords = np.asarray(coords, dtype=float).reshape(-1, frame_size(n))
        self.n = n
        self.coords = coords
        self.frame_tag = frame_tag
        self.paulis = tuple(paulis) if paulis is not None else None
        self.coords.setflags(write=False)

    @classmethod
    def from_paulis(cls, paulis: Iterable[PauliString], n: int) -> OrthonormalBasis:
        ps = sorted({p.unsigned() for p in paulis if not p.is_identity}, key=lambda p: p.index)
        coords = np.zeros((len(ps), frame_size(n)))
        coords[np.arange(len(ps)), [p.index for p in ps]] = 1.0
        return cls(n, coords, PAULI_FRAME, ps)

    @classmethod
    def empty(cls, n: int) -> OrthonormalBasis:
        return cls(n, np.zeros((0, frame_size(n))), PAULI_FRAME, ())

    @classmethod
    def full(cls, n: int) -> OrthonormalBasis:
        from .pauli import all_pauli_strings

        return cls.from_paulis(all_pauli_strings(n), n)

    def __len__(self) -> int:
        return self.coords.shape[0]

    @property
    def dim(self) -> int:
        return len(self)

    @property
    def matrix_dim(self) -> int:
        return 1 << self.n

    @cached_property
    def elements(self) -> np.ndarray:
        """Dense stack of shape ``(len, 2^n, 2^n)``."""
        return unvectorize(self.coords, self.n)

    @cached_property
    def projector(self) -> np.ndarray:
        return self.coords.T @ self.coords

    def project_coords(self, c: np.ndarray) -> np.ndarray:
        return (c @ self.coords.T) @ self.coords

    def __repr__(self) -> str:
        return f"OrthonormalBasis(n={self.n}, dim={self.dim}, frame={self.frame_tag})"


def orthonormalize(n: int, vectors: np.ndarray, tol: float = NEW_DIRECTION_TOL) -> OrthonormalBasis:
    """Orthonormal basis of the row span of ``vectors`` (Pauli coordinates).

    Rank is decided relative to the largest singular value.
    """
    vectors = np.asarray(vectors, dtype=float).reshape(-1, frame_size(n))
    if vectors.shape[0] == 0:
        return OrthonormalBasis.empty(n)
    u, s, vt = np.linalg.svd(vectors, full_matrices=False)
    cutoff = max(tol * (s[0] if s.size else 0.0), 1e-12)
    return OrthonormalBasis(n, vt[s > cutoff], DENSE_FRAME)


def join(a: OrthonormalBasis, b: OrthonormalBasis) -> OrthonormalBasis:
    """Basis of ``span(a) + span(b)``."""
    if a.n != b.n:
        raise DimensionError("bases act on different qubit counts")
    if a.paulis is not None and b.paulis is not None:
        return OrthonormalBasis.from_paulis(a.paulis + b.paulis, a.n)
    return orthonormalize(a.n, np.vstack([a.coords, b.coords]))


def graph_generators(g: ConnectivityGraph) -> list[PauliString]:
    """Same-letter two-qubit strings ``XX, YY, ZZ`` on every edge, edges in sorted order."""
    out = []
    for i, j in g.sorted_edges():
        for letter in "XYZ":
            out.append(PauliString.from_label(
                "".join(letter if q in (i, j) else "I" for q in range(g.n))))
    return out


def _as_pauli(gen, n: int | None) -> tuple[PauliString | None, np.ndarray | None]:
    if isinstance(gen, PauliString):
        return gen.unsigned(), None
    gen = np.asarray(gen, dtype=complex)
    c = vectorize(gen)
    big = np.abs(c)
    peak = big.max(initial=0.0)
    if peak <= 1e-12:
        return None, None
    nz = np.flatnonzero(big > 1e-12 * max(1.0, peak))
    if nz.size == 1:
        return PauliString.from_index(num_qubits(gen), int(nz[0])), None
    return None, c


def _pauli_closure(seeds: list[PauliString], n: int) -> list[PauliString]:
    # Brackets of i-Pauli strings are 0 or a real multiple of another i-Pauli,
    # so closing the set of strings under anticommuting products suffices.
    xs: list[int] = []
    zs: list[int] = []
    seen: set[tuple[int, int]] = set()
    queue = []
    for p in seeds:
        key = (p.x, p.z)
        if key not in seen:
            seen.add(key)
            queue.append(key)
    head = 0
    while head < len(queue):
        x, z = queue[head]
        head += 1
        if xs:
            ax, az = np.asarray(xs, dtype=np.int64), np.asarray(zs, dtype=np.int64)
            sym = _parity(ax & z) ^ _parity(az & x)
            for j in np.flatnonzero(sym):
                key = (int(ax[j]) ^ x, int(az[j]) ^ z)
                if key not in seen:
                    seen.add(key)
                    queue.append(key)
        xs.append(x)
        zs.append(z)
    return [PauliString(n, x, z) for x, z in queue]


def _parity(v: np.ndarray) -> np.ndarray:
    v = v.copy()
    out = np.zeros_like(v)
    while np.any(v):
        out ^= v & 1
        v >>= 1
    return out


def _dense_closure(seeds: list[np.ndarray], n: int) -> OrthonormalBasis:
    q: list[np.ndarray] = []

    def add(c: np.ndarray) -> bool:
        norm0 = np.linalg.norm(c)
        if norm0 <= 1e-12:
            return False
        r = c.copy()
        for _ in range(2):  # re-orthogonalize once for stability
            for b in q:
                r -= (b @ r) * b
        nr = np.linalg.norm(r)
        if nr <= NEW_DIRECTION_TOL * max(1.0, norm0):
            return False
        q.append(r / nr)
        return True

    for c in seeds:
        add(c)
    head = 0
    mats: list[np.ndarray] = []
    while head < len(q):
        a = unvectorize(q[head], n)
        for b in mats:
            add(vectorize(a @ b - b @ a))
        mats.append(a)
        head += 1
    return OrthonormalBasis(n, np.array(q).reshape(-1, frame_size(n)), DENSE_FRAME)


def lie_closure(generators: Sequence, n: int | None = None) -> OrthonormalBasis:
    """Orthonormal basis of the smallest Lie subalgebra containing ``generators``.

    Generators may be :class:`PauliString` (read as ``i*P``) or dense traceless
    skew-Hermitian matrices. When every generator is a real multiple of a
    single ``i*P`` the closure runs symbolically over strings; otherwise it
    falls back to dense Gram-Schmidt on brackets.
    """
    paulis: list[PauliString] = []
    dense: list[np.ndarray] = []
    for g in generators:
        if n is None:
            n = g.n if isinstance(g, PauliString) else num_qubits(np.asarray(g))
        p, c = _as_pauli(g, n)
        if p is not None:
            if p.n != n:
                raise DimensionError(f"generator {p.label} is not on {n} qubits")
            if not p.is_identity:
                paulis.append(p)
        elif c is not None:
            if c.size != frame_size(n):
                raise DimensionError("generator dimension mismatch")
            dense.append(c)
    if n is None:
        raise ValueError("cannot infer qubit count from an empty generator list")
    if not dense:
        return OrthonormalBasis.from_paulis(_pauli_closure(paulis, n), n)
    seeds = [np.eye(1, frame_size(n), p.index).ravel() for p in paulis] + dense
    return _dense_closure(seeds, n)


def project(a: np.ndarray, basis: OrthonormalBasis) -> np.ndarray:
    """HS-orthogonal projection of ``a`` onto ``span(basis)``."""
    if num_qubits(np.asarray(a)) != basis.n:
        raise DimensionError(f"operator is not on {basis.n} qubits")
    if basis.dim == 0:
        return np.zeros_like(a, dtype=complex)
    return unvectorize(basis.project_coords(vectorize(a)), basis.n)


def is_closed(basis: OrthonormalBasis, tol: float = 1e-9) -> bool:
    """Every pairwise bracket stays in the span, to ``tol`` in HS norm."""
    els = basis.elements
    for i, j in itertools.combinations(range(len(els)), 2):
        c = vectorize(els[i] @ els[j] - els[j] @ els[i])
        if np.linalg.norm(c - basis.project_coords(c)) > tol:
            return False
    return True
