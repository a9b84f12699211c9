"""Code-attached constructions: the K permutation, naive encodings,
stabilizer/logical subalgebras, traceless logarithms and the built-in
[[4,2,2]] encoder."""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Sequence

import numpy as np
import scipy.linalg

from . import gellmann
from .lie import DENSE_FRAME, OrthonormalBasis
from .pauli import DimensionError, PauliString, num_qubits, pauli_to_dense, vectorize

UNITARY_TOL = 1e-10
DET_TOL = 1e-8


def build_k(n: int, k: int) -> np.ndarray:
    """Permutation ``k_map`` with ``K e_a = e_{k_map[a]}``.

    Direct-sum index ``psi < 2^k`` goes to ``psi * 2^(n-k)`` (``|psi>|0..0>``);
    index ``2^k + m`` goes to ``|i_m>|j_m>`` with ``i_m = m // (2^(n-k) - 1)``
    and ``j_m = m % (2^(n-k) - 1) + 1``.
    """
    if not (0 <= k < n):
        raise ValueError(f"need 0 <= k < n, got n={n}, k={k}")
    anc = 1 << (n - k)
    out = np.empty(1 << n, dtype=np.int64)
    psi = np.arange(1 << k)
    out[psi] = psi * anc
    m = np.arange((1 << n) - (1 << k))
    out[(1 << k) + m] = (m // (anc - 1)) * anc + m % (anc - 1) + 1
    return out


def k_matrix(k_map: np.ndarray) -> np.ndarray:
    dim = len(k_map)
    out = np.zeros((dim, dim))
    out[k_map, np.arange(dim)] = 1.0
    return out


def _conjugate_perm(block: np.ndarray, k_map: np.ndarray) -> np.ndarray:
    # K X K^dagger for a permutation K: entry (a, b) moves to (k_map[a], k_map[b])
    out = np.zeros(block.shape, dtype=complex)
    out[..., k_map[:, None], k_map[None, :]] = block
    return out


def _unconjugate_perm(mat: np.ndarray, k_map: np.ndarray) -> np.ndarray:
    return mat[..., k_map[:, None], k_map[None, :]]


def direct_sum(top: np.ndarray | None, bottom: np.ndarray | None, n: int, k: int) -> np.ndarray:
    """``top (+) bottom`` of sizes ``2^k`` and ``2^n - 2^k``; ``None`` means zero."""
    dim, dl = 1 << n, 1 << k
    lead = (top if top is not None else bottom).shape[:-2]
    out = np.zeros(lead + (dim, dim), dtype=complex)
    if top is not None:
        out[..., :dl, :dl] = top
    if bottom is not None:
        out[..., dl:, dl:] = bottom
    return out


@dataclass(frozen=True, eq=False)
class CodeSpec:
    """An ``[[n, k, d]]`` code given by its encoding unitary ``C``.

    ``d`` is carried as metadata only.
    """

    n: int
    k: int
    encoder: np.ndarray
    d: int | None = None
    k_map: np.ndarray = field(default=None)
    name: str | None = None

    def __post_init__(self):
        enc = np.asarray(self.encoder, dtype=complex)
        dim = 1 << self.n
        if enc.shape != (dim, dim):
            raise DimensionError(f"encoder must be {dim}x{dim}, got {enc.shape}")
        if np.max(np.abs(enc @ enc.conj().T - np.eye(dim))) > UNITARY_TOL:
            raise ValueError("encoder is not unitary")
        det = np.linalg.det(enc)
        if abs(det - 1) > DET_TOL:
            raise ValueError(f"encoder determinant is {det:.6g}, expected 1")
        kmap = build_k(self.n, self.k) if self.k_map is None else np.asarray(self.k_map, dtype=np.int64)
        if sorted(kmap.tolist()) != list(range(dim)):
            raise ValueError("k_map is not a permutation")
        enc.setflags(write=False)
        kmap.setflags(write=False)
        object.__setattr__(self, "encoder", enc)
        object.__setattr__(self, "k_map", kmap)

    @classmethod
    def from_unitary(cls, u: np.ndarray, k: int, d: int | None = None, name: str | None = None) -> CodeSpec:
        """Accept any unitary; the global phase is fixed so that ``det = 1``."""
        u = np.asarray(u, dtype=complex)
        n = num_qubits(u)
        det = np.linalg.det(u)
        if abs(abs(det) - 1) > 1e-8:
            raise ValueError("encoder is not unitary")
        return cls(n, k, u / np.exp(1j * np.angle(det) / u.shape[0]), d, None, name)

    @property
    def dim(self) -> int:
        return 1 << self.n

    @property
    def logical_dim(self) -> int:
        return 1 << self.k

    @property
    def gauge_dim(self) -> int:
        """Size ``2^n - 2^k`` of the complement block."""
        return self.dim - self.logical_dim

    def conjugate(self, a: np.ndarray) -> np.ndarray:
        c = self.encoder
        return c @ a @ c.conj().T

    def unconjugate(self, a: np.ndarray) -> np.ndarray:
        c = self.encoder
        return c.conj().T @ a @ c

    @cached_property
    def encoded_states(self) -> np.ndarray:
        """Columns ``C K (e_psi (+) 0)`` for ``psi < 2^k``."""
        return self.encoder[:, self.k_map[: self.logical_dim]]

    @cached_property
    def stabilizer_basis(self) -> OrthonormalBasis:
        return stabilizer_basis(self)

    @cached_property
    def logical_basis(self) -> OrthonormalBasis:
        return logical_basis(self)


def embed_logical(h: np.ndarray, n: int, k_map: np.ndarray) -> np.ndarray:
    """``K (h (+) 0) K^dagger``."""
    h = np.asarray(h, dtype=complex)
    k = num_qubits(h)
    if len(k_map) != 1 << n or k >= n:
        raise DimensionError(f"logical operator on {k} qubits does not fit n={n}")
    return _conjugate_perm(direct_sum(h, None, n, k), np.asarray(k_map))


def embed_gauge(v: np.ndarray, n: int, k: int, k_map: np.ndarray) -> np.ndarray:
    """``K (0 (+) v) K^dagger`` for ``v`` of size ``2^n - 2^k``."""
    v = np.asarray(v, dtype=complex)
    if v.shape[-1] != (1 << n) - (1 << k):
        raise DimensionError(f"gauge block must be {(1 << n) - (1 << k)} wide")
    return _conjugate_perm(direct_sum(None, v, n, k), np.asarray(k_map))


def extract_blocks(a: np.ndarray, code: CodeSpec) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Blocks ``(logical, gauge, off_diagonal)`` of ``K^dagger a K``."""
    m = _unconjugate_perm(np.asarray(a), code.k_map)
    dl = code.logical_dim
    return m[..., :dl, :dl], m[..., dl:, dl:], m[..., :dl, dl:]


def naive_encoding(code: CodeSpec, h: np.ndarray) -> np.ndarray:
    """``C K (h (+) 0) K^dagger C^dagger``."""
    h = np.asarray(h, dtype=complex)
    if h.shape != (code.logical_dim, code.logical_dim):
        raise DimensionError(f"logical Hamiltonian must be {code.logical_dim}x{code.logical_dim}")
    return code.conjugate(embed_logical(h, code.n, code.k_map))


def _encoded_frame(code: CodeSpec, blocks: np.ndarray, logical: bool) -> OrthonormalBasis:
    if blocks.shape[0] == 0:
        return OrthonormalBasis.empty(code.n)
    if logical:
        embedded = _conjugate_perm(direct_sum(blocks, None, code.n, code.k), code.k_map)
    else:
        embedded = _conjugate_perm(direct_sum(None, blocks, code.n, code.k), code.k_map)
    c = code.encoder
    coords = vectorize(c @ embedded @ c.conj().T)
    return OrthonormalBasis(code.n, coords, DENSE_FRAME)


def stabilizer_basis(code: CodeSpec) -> OrthonormalBasis:
    """Basis of ``C K (0 (+) su(2^n - 2^k)) K^dagger C^dagger``, in Gell-Mann order."""
    return _encoded_frame(code, gellmann.basis(code.gauge_dim), logical=False)


def logical_basis(code: CodeSpec) -> OrthonormalBasis:
    """Basis of ``C K (su(2^k) (+) 0) K^dagger C^dagger``, in Gell-Mann order."""
    return _encoded_frame(code, gellmann.basis(code.logical_dim), logical=True)


def _snap_phases(phases: np.ndarray) -> np.ndarray:
    # principal branch (-pi, pi]; -pi (up to roundoff) is sent to +pi
    return np.where(phases <= -np.pi + 1e-12, np.pi, phases)


def traceless_log(u: np.ndarray) -> np.ndarray:
    """Traceless skew-Hermitian ``H`` with ``exp(H)`` equal to ``u`` up to phase.

    ``u`` is first divided by the principal ``d``-th root of ``det(u)``, then
    the principal logarithm is taken through a complex Schur form.
    """
    u = np.asarray(u, dtype=complex)
    d = u.shape[0]
    if u.shape != (d, d) or np.max(np.abs(u @ u.conj().T - np.eye(d))) > UNITARY_TOL:
        raise ValueError("traceless_log needs a unitary matrix")
    det = np.linalg.det(u)
    v = u / np.exp(1j * np.angle(det) / d)
    t, z = scipy.linalg.schur(v, output="complex")
    phases = _snap_phases(np.angle(np.diag(t)))
    log = (z * (1j * phases)) @ z.conj().T
    log = 0.5 * (log - log.conj().T)
    return log - np.trace(log) / d * np.eye(d)


def _paulis_dense(*labels: str) -> list[np.ndarray]:
    return [pauli_to_dense(PauliString.from_label(s)) for s in labels]


def _named_gates() -> dict[str, np.ndarray]:
    s2 = 1 / np.sqrt(2)
    cnot = np.eye(4, dtype=complex)
    cnot[2:, 2:] = [[0, 1], [1, 0]]
    cnot_rev = np.eye(4, dtype=complex)
    cnot_rev[[1, 3]] = cnot_rev[[3, 1]]
    swap = np.eye(4, dtype=complex)[[0, 2, 1, 3]]
    iswap = swap.copy()
    iswap[1, 2] = iswap[2, 1] = 1j
    x, y, z = _paulis_dense("X", "Y", "Z")
    return {
        "I": np.eye(2, dtype=complex),
        "X": x, "Y": y, "Z": z,
        "H": s2 * np.array([[1, 1], [1, -1]], dtype=complex),
        "S": np.diag([1, 1j]),
        "T": np.diag([1, np.exp(1j * np.pi / 4)]),
        "CNOT": cnot,
        "CX": cnot,
        "CNOT10": cnot_rev,
        "CZ": np.diag([1, 1, 1, -1]).astype(complex),
        "SWAP": swap,
        "ISWAP": iswap,
    }


GATES = _named_gates()


def named_gate(name: str) -> np.ndarray:
    try:
        return GATES[name.upper()].copy()
    except KeyError:
        raise ValueError(f"unknown gate {name!r}; known: {', '.join(sorted(GATES))}") from None


# Nonzero entries (row, col, value) of the [[4,2,2]] encoder in the
# computational basis; s = 1/sqrt(2).
_C422_ENTRIES = [
    (0, 0, "s"), (0, 2, "s"),
    (1, 5, "-is"), (1, 7, "is"),
    (2, 13, "is"), (2, 15, "is"),
    (3, 8, "-s"), (3, 10, "s"),
    (4, 1, "-is"), (4, 3, "is"),
    (5, 4, "s"), (5, 6, "s"),
    (6, 12, "-s"), (6, 14, "s"),
    (7, 9, "is"), (7, 11, "is"),
    (8, 9, "-is"), (8, 11, "is"),
    (9, 12, "s"), (9, 14, "s"),
    (10, 4, "-s"), (10, 6, "s"),
    (11, 1, "is"), (11, 3, "is"),
    (12, 8, "s"), (12, 10, "s"),
    (13, 13, "-is"), (13, 15, "is"),
    (14, 5, "is"), (14, 7, "is"),
    (15, 0, "-s"), (15, 2, "s"),
]
_ENTRY_VALUE = {"s": 1, "-s": -1, "is": 1j, "-is": -1j}

# Rows: images of X_1..X_4 then Z_1..Z_4 under conjugation by C, as (a | b).
F_C_422 = np.array([
    [1, 1, 0, 0, 0, 0, 0, 0],
    [0, 1, 0, 1, 0, 0, 0, 0],
    [0, 0, 0, 0, 1, 1, 0, 1],
    [1, 0, 1, 1, 1, 1, 1, 1],
    [0, 0, 0, 0, 1, 0, 1, 0],
    [0, 0, 0, 0, 0, 0, 1, 1],
    [1, 1, 1, 1, 0, 0, 0, 0],
    [0, 0, 0, 0, 1, 1, 1, 1],
], dtype=np.int64)


def encoder_422() -> np.ndarray:
    c = np.zeros((16, 16), dtype=complex)
    for r, col, v in _C422_ENTRIES:
        c[r, col] = _ENTRY_VALUE[v] / np.sqrt(2)
    return c


BUILTIN_CODES = {"[[4,2,2]]": (4, 2, 2, encoder_422, F_C_422)}


def builtin_code(name: str) -> CodeSpec:
    key = name.replace(" ", "")
    if key not in BUILTIN_CODES:
        raise ValueError(f"unknown built-in code {name!r}; known: {', '.join(BUILTIN_CODES)}")
    n, k, d, make, _ = BUILTIN_CODES[key]
    return CodeSpec(n, k, make(), d=d, name=key)


def builtin_symplectic(name: str) -> np.ndarray:
    return BUILTIN_CODES[name.replace(" ", "")][4].copy()


def symplectic_row_to_pauli(row: Sequence[int], n: int) -> PauliString:
    """``(a | b) -> prod i^{a_q b_q} X^{a_q} Z^{b_q}`` with qubit 1 leftmost."""
    row = [int(v) & 1 for v in row]
    if len(row) != 2 * n:
        raise DimensionError(f"symplectic row must have {2 * n} entries")
    x = z = 0
    for q in range(n):
        x |= row[q] << (n - 1 - q)
        z |= row[n + q] << (n - 1 - q)
    return PauliString(n, x, z)


@dataclass(frozen=True)
class RowCheck:
    row: int
    source: str
    expected: str
    passed: bool
    sign: int  # +1, -1, or 0 when not proportional


@dataclass(frozen=True)
class EncoderReport:
    rows: tuple[RowCheck, ...]

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.rows)


def validate_encoder(code: CodeSpec, f_rows: np.ndarray, tol: float = 1e-9) -> EncoderReport:
    """Check ``C P C^dagger = +-Q`` for each single-qubit ``P = X_q`` / ``Z_q``
    against the Pauli ``Q`` read off the corresponding symplectic row."""
    f_rows = np.asarray(f_rows)
    n = code.n
    if f_rows.shape != (2 * n, 2 * n):
        raise DimensionError(f"expected a {2 * n}x{2 * n} symplectic matrix")
    checks = []
    for r in range(2 * n):
        src = PauliString.single(n, r % n, "X" if r < n else "Z")
        expected = symplectic_row_to_pauli(f_rows[r], n)
        image = code.conjugate(pauli_to_dense(src))
        overlap = np.vdot(pauli_to_dense(expected), image) / code.dim
        ok = abs(abs(overlap) - 1) <= tol and abs(overlap.imag) <= tol
        sign = int(np.sign(overlap.real)) if ok else 0
        checks.append(RowCheck(r, src.label, expected.label, bool(ok), sign))
    return EncoderReport(tuple(checks))
