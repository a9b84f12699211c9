"""Least-squares choice of stabilizer correction.

Every solver minimizes a 2-norm of an affine function of the gauge block
``u in su(2^n - 2^k)`` (Gell-Mann coordinates), where the physical
Hamiltonian is ``start + C K (0 (+) u) K^dagger C^dagger`` and ``start``
defaults to the naive encoding of the logical target.
"""
from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Mapping, NamedTuple

import numpy as np
import scipy.linalg

from . import gellmann
from .code_space import CodeSpec, embed_gauge, extract_blocks, naive_encoding
from .lie import ConnectivityGraph, OrthonormalBasis, join
from .pauli import (
    DimensionError,
    PauliString,
    all_pauli_strings,
    frame_size,
    hs_norm,
    num_qubits,
    pauli_to_dense,
    to_pauli_terms,
    unvectorize,
    vectorize,
)

MODES = ("plain", "fast", "weighted", "regularized")
ACCESSIBLE_RTOL = 1e-8
TERM_CUTOFF = 1e-8
ABS_SINGULAR_FLOOR = 1e-12
# principal cosines this close to 1 are re-resolved through explicit residuals
_NEAR_ONE = 1e-6


@dataclass(frozen=True)
class AdmmSettings:
    rho: float = 1.0
    abs_tol: float = 1e-8
    rel_tol: float = 1e-6
    max_iter: int = 10_000


@dataclass(eq=False)
class CompilationProblem:
    code: CodeSpec
    h_logical: np.ndarray
    accessible: OrthonormalBasis
    mode: str = "plain"
    lam: float = 0.0
    weights: Mapping[PauliString, float] | None = None
    default_weight: float = 1.0
    svd_tol: float = 1e-10
    graph: ConnectivityGraph | None = None
    start: np.ndarray | None = None
    admm: AdmmSettings = field(default_factory=AdmmSettings)

    def __post_init__(self):
        self.h_logical = np.asarray(self.h_logical, dtype=complex)
        if self.h_logical.shape != (self.code.logical_dim,) * 2:
            raise DimensionError(
                f"logical Hamiltonian must be {self.code.logical_dim}x{self.code.logical_dim}")
        if self.accessible.n != self.code.n:
            raise DimensionError("accessible algebra and code act on different qubit counts")
        if self.mode not in MODES:
            raise ValueError(f"unknown mode {self.mode!r}; expected one of {MODES}")
        if not self.lam >= 0:
            raise ValueError("lambda must be nonnegative")
        if self.weights is not None and any(w < 0 for w in self.weights.values()):
            raise ValueError("weights must be nonnegative")
        if self.default_weight < 0:
            raise ValueError("default weight must be nonnegative")
        if self.start is not None and np.shape(self.start) != (self.code.dim,) * 2:
            raise DimensionError(f"start Hamiltonian must be {self.code.dim}x{self.code.dim}")

    @property
    def naive(self) -> np.ndarray:
        return naive_encoding(self.code, self.h_logical)

    @property
    def start_hamiltonian(self) -> np.ndarray:
        return self.naive if self.start is None else np.asarray(self.start, dtype=complex)

    def weight_vector(self) -> np.ndarray:
        w = np.full(frame_size(self.code.n), float(self.default_weight))
        for p, val in (self.weights or {}).items():
            p = PauliString.from_label(p) if isinstance(p, str) else p
            if p.n != self.code.n or p.is_identity:
                raise ValueError(f"weight given for invalid Pauli {p.label}")
            w[p.index] = val
        return w


@dataclass(eq=False)
class CompilationResult:
    mode: str
    h_stabilizer: np.ndarray
    h_correction: np.ndarray
    h_total: np.ndarray
    residual: float
    accessibility_residual: float
    accessible: bool
    pauli_terms: dict[PauliString, float]
    solve_time: float
    info: dict = field(default_factory=dict)

    @property
    def term_count(self) -> int:
        return len(self.pauli_terms)


# -- linear maps -------------------------------------------------------------

def pinv(m: np.ndarray, rel_tol: float = 1e-10) -> np.ndarray:
    """SVD pseudoinverse; singular values ``<= rel_tol * sigma_max`` count as zero."""
    m = np.asarray(m, dtype=float)
    if not np.all(np.isfinite(m)):
        raise ValueError("pinv input has non-finite entries")
    if m.size == 0:
        return np.zeros(m.shape[::-1])
    u, s, vt = np.linalg.svd(m, full_matrices=False)
    keep = s > _cutoff(s[0] if s.size else 0.0, rel_tol)
    return (vt[keep].T / s[keep]) @ u[:, keep].T


def _cutoff(sigma_max: float, rel_tol: float) -> float:
    return max(rel_tol * sigma_max, ABS_SINGULAR_FLOOR)


def conjugation_matrix(code: CodeSpec) -> np.ndarray:
    """``G_C``: Pauli-frame matrix of ``v -> C v C^dagger`` (orthogonal)."""
    n = code.n
    frame = np.stack([1j * pauli_to_dense(p) for p in all_pauli_strings(n)]) / np.sqrt(code.dim)
    c = code.encoder
    return vectorize(c @ frame @ c.conj().T).T


def build_m(code: CodeSpec, accessible: OrthonormalBasis) -> np.ndarray:
    """Matrix of ``v -> proj_H(C v C^dagger) - C v C^dagger``."""
    if accessible.n != code.n:
        raise DimensionError("accessible algebra and code act on different qubit counts")
    g = conjugation_matrix(code)
    q = accessible.coords
    return q.T @ (q @ g) - g


def build_a(n: int, k: int, k_map: np.ndarray) -> np.ndarray:
    """Matrix of ``v -> K (0 (+) v) K^dagger`` from Gell-Mann to Pauli coordinates."""
    d = (1 << n) - (1 << k)
    if d <= 1:
        return np.zeros((frame_size(n), 0))
    return vectorize(embed_gauge(gellmann.basis(d), n, k, k_map)).T


def accessibility_residual(h: np.ndarray, basis: OrthonormalBasis) -> float:
    """``||h - proj(h)||_HS``."""
    if num_qubits(np.asarray(h)) != basis.n:
        raise DimensionError(f"operator is not on {basis.n} qubits")
    c = vectorize(h)
    return float(np.linalg.norm(c - basis.project_coords(c)))


def accessible_threshold(h: np.ndarray) -> float:
    return ACCESSIBLE_RTOL * max(1.0, hs_norm(h))


class Correctibility(NamedTuple):
    accessible: bool
    residual: float
    joint_dim: int


def is_correctibly_accessible(h_encoded: np.ndarray, code: CodeSpec,
                              accessible: OrthonormalBasis) -> Correctibility:
    """Membership of ``h_encoded`` in ``H + su(C_perp)``."""
    if np.shape(h_encoded) != (code.dim, code.dim):
        raise DimensionError(f"encoded Hamiltonian must be {code.dim}x{code.dim}")
    joint = join(accessible, code.stabilizer_basis)
    r = accessibility_residual(h_encoded, joint)
    return Correctibility(bool(r <= accessible_threshold(h_encoded)), r, joint.dim)


def random_stabilizer(code: CodeSpec, seed: int) -> np.ndarray:
    """Unit-HS-norm Gaussian combination of stabilizer basis elements."""
    basis = code.stabilizer_basis
    rng = np.random.default_rng(seed)
    coeffs = rng.standard_normal(basis.dim)
    out = unvectorize(coeffs @ basis.coords, code.n)
    return out / hs_norm(out)


# -- solvers -----------------------------------------------------------------

def _finish(p: CompilationProblem, mode: str, u: np.ndarray, residual: float,
            t0: float, **info) -> CompilationResult:
    if not np.all(np.isfinite(u)):
        raise FloatingPointError("non-finite stabilizer coordinates")
    code = p.code
    start = p.start_hamiltonian
    if code.gauge_dim > 1:
        h_stab = gellmann.unvectorize(u, code.gauge_dim)
    else:
        h_stab = np.zeros((code.gauge_dim, code.gauge_dim), dtype=complex)
    h_corr = code.conjugate(embed_gauge(h_stab, code.n, code.k, code.k_map))
    h_total = start + h_corr
    acc_res = accessibility_residual(h_total, p.accessible)
    return CompilationResult(
        mode=mode,
        h_stabilizer=h_stab,
        h_correction=h_corr,
        h_total=h_total,
        residual=float(residual),
        accessibility_residual=acc_res,
        accessible=bool(acc_res <= accessible_threshold(h_total)),
        pauli_terms=to_pauli_terms(h_total, TERM_CUTOFF),
        solve_time=time.perf_counter() - t0,
        info=info,
    )


def _start_pre_encoder(p: CompilationProblem) -> np.ndarray:
    """Coordinates of ``C^dagger start C``; for the naive start this is ``K(h (+) 0)K^dagger``."""
    return vectorize(p.code.unconjugate(p.start_hamiltonian))


def solve_plain(p: CompilationProblem) -> CompilationResult:
    """``u = -(M A)^+ M x0`` with an explicit SVD of ``M A``."""
    t0 = time.perf_counter()
    code = p.code
    m = build_m(code, p.accessible)
    ma = m @ build_a(code.n, code.k, code.k_map)
    b = -m @ _start_pre_encoder(p)
    u = pinv(ma, p.svd_tol) @ b
    residual = np.linalg.norm(ma @ u - b)
    return _finish(p, "plain", u, residual, t0)


def solve_fast(p: CompilationProblem) -> CompilationResult:
    """Same minimizer as :func:`solve_plain` without forming ``M`` or ``G_C``.

    Only the ``dim H`` basis elements of the accessible algebra are pulled back
    by ``C^dagger``. The gauge block of each pull-back gives the overlap
    matrix ``S`` between ``C^dagger H C`` and the image of ``A``; its singular
    values are the cosines of the principal angles between the two spaces.
    Directions with cosine 1 span the nullspace of ``M A`` (elements of
    ``C^dagger H C`` that are already pure gauge), directions with cosine 0
    are mapped by ``M`` to ``-C v C^dagger``, and intermediate angles are
    solved in closed form mode by mode.
    """
    t0 = time.perf_counter()
    code = p.code
    d = code.gauge_dim
    s_dim = gellmann.su_dim(d) if d > 1 else 0
    h = p.accessible
    start = p.start_hamiltonian
    y0 = vectorize(start)

    _, gauge0, _ = extract_blocks(code.unconjugate(start), code)
    t = gellmann.vectorize(gauge0) if s_dim else np.zeros(0)

    if h.dim == 0 or s_dim == 0:
        u = -t
        return _finish(p, "fast", u, _fast_residual(p, u, y0), t0, null_dim=0)

    pulled = code.unconjugate(h.elements)  # basis of C^dagger H C
    _, gauge_blocks, _ = extract_blocks(pulled, code)
    s = gellmann.vectorize(gauge_blocks)  # (dim H, s_dim) = W^T D
    c = h.coords @ y0 - s @ t

    uu, sig, vt = np.linalg.svd(s, full_matrices=False)
    dd = uu.T @ c
    sig = np.clip(sig, 0.0, 1.0)
    near = (1.0 - sig) < _NEAR_ONE
    far = ~near

    u = -t
    u = u - vt.T @ (vt @ u)  # drop the span of V, handled below
    z = sig[far] * dd[far] / (1.0 - sig[far] ** 2)
    u = u + vt[far].T @ (z - vt[far] @ t)

    null_dim = 0
    if np.any(near):
        # sin of nearly-zero angles is recovered from explicit residual vectors
        vn = vt[near]
        img = vectorize(code.conjugate(embed_gauge(gellmann.unvectorize(vn, d), code.n, code.k, code.k_map)))
        resid = img - h.project_coords(img)  # rows: (I - P) D v
        y_perp = y0 - h.project_coords(y0)
        ur, sr, vrt = np.linalg.svd(resid.T, full_matrices=False)
        # largest singular value of M A, for the same relative cutoff as pinv
        scale = max(
            np.max(np.sqrt(1.0 - sig[far] ** 2), initial=0.0),
            np.max(sr, initial=0.0),
            1.0 if s_dim > sig.size else 0.0,
        )
        keep = sr > _cutoff(scale, p.svd_tol)
        null_dim = int(np.count_nonzero(~keep))
        w = -(vrt[keep].T / sr[keep]) @ (ur[:, keep].T @ y_perp)
        u = u + vn.T @ w

    return _finish(p, "fast", u, _fast_residual(p, u, y0), t0, null_dim=null_dim)


def _fast_residual(p: CompilationProblem, u: np.ndarray, y0: np.ndarray) -> float:
    code = p.code
    y = y0
    if u.size:
        block = gellmann.unvectorize(u, code.gauge_dim)
        y = y0 + vectorize(code.conjugate(embed_gauge(block, code.n, code.k, code.k_map)))
    return float(np.linalg.norm(y - p.accessible.project_coords(y)))


def _gauge_image(code: CodeSpec) -> np.ndarray:
    """``D = G_C A``: columns are the stabilizer basis in Pauli coordinates."""
    return code.stabilizer_basis.coords.T


def solve_weighted(p: CompilationProblem) -> CompilationResult:
    """Minimize ``||J(h_total)||`` with ``J`` diagonal in the Pauli basis."""
    t0 = time.perf_counter()
    w = p.weight_vector()
    if np.any(w < 0):
        raise ValueError("weights must be nonnegative")
    d = _gauge_image(p.code)
    y0 = vectorize(p.start_hamiltonian)
    wd = w[:, None] * d
    b = -w * y0
    u = pinv(wd, p.svd_tol) @ b
    residual = np.linalg.norm(wd @ u - b)
    return _finish(p, "weighted", u, residual, t0)


@dataclass
class AdmmOutcome:
    x: np.ndarray
    iterations: int
    converged: bool
    primal_residual: float
    dual_residual: float


def admm_l1_ls(q: np.ndarray, r: np.ndarray, e: np.ndarray, e0: np.ndarray, lam: float,
               settings: AdmmSettings = AdmmSettings(), x0: np.ndarray | None = None) -> AdmmOutcome:
    """ADMM for ``min_x ||q x - r||^2 + lam * ||e x + e0||_1``.

    Splits ``z = e x + e0``; ``z`` is updated by soft thresholding.
    """
    rho = settings.rho
    nvar = q.shape[1]
    gram = 2.0 * q.T @ q + rho * e.T @ e
    try:
        factor = scipy.linalg.cho_factor(gram)
        solve = lambda rhs: scipy.linalg.cho_solve(factor, rhs)  # noqa: E731
    except np.linalg.LinAlgError:
        gram_pinv = pinv(gram)
        solve = lambda rhs: gram_pinv @ rhs  # noqa: E731
    qtr2 = 2.0 * q.T @ r
    x = np.zeros(nvar) if x0 is None else np.array(x0, dtype=float)
    z = e @ x + e0
    w = np.zeros_like(z)
    kappa = lam / rho
    rp = sd = np.inf
    for it in range(1, settings.max_iter + 1):
        x = solve(qtr2 - rho * e.T @ (e0 - z + w))
        ex = e @ x + e0
        z_old = z
        v = ex + w
        z = np.sign(v) * np.maximum(np.abs(v) - kappa, 0.0)
        w = w + ex - z
        rp = np.linalg.norm(ex - z)
        sd = rho * np.linalg.norm(e.T @ (z - z_old))
        eps_pri = np.sqrt(z.size) * settings.abs_tol + settings.rel_tol * max(np.linalg.norm(ex), np.linalg.norm(z))
        eps_dual = np.sqrt(nvar) * settings.abs_tol + settings.rel_tol * rho * np.linalg.norm(e.T @ w)
        if rp <= eps_pri and sd <= eps_dual:
            return AdmmOutcome(x, it, True, float(rp), float(sd))
    return AdmmOutcome(x, settings.max_iter, False, float(rp), float(sd))


def solve_regularized(p: CompilationProblem) -> CompilationResult:
    """Accessibility residual squared plus ``lam * ||Pauli coefficients of h_total||_1``."""
    t0 = time.perf_counter()
    code = p.code
    d = _gauge_image(code)
    y0 = vectorize(p.start_hamiltonian)
    hq = p.accessible.coords
    q = d - hq.T @ (hq @ d)  # (I - P) D
    r = -(y0 - hq.T @ (hq @ y0))
    # a_P = c_P / sqrt(2^n), so the l1 weight on Pauli-frame coordinates is rescaled
    lam_frame = p.lam / np.sqrt(code.dim)
    warm = pinv(q, p.svd_tol) @ r
    out = admm_l1_ls(q, r, d, y0, lam_frame, p.admm, x0=warm)
    u = out.x
    residual = np.linalg.norm(q @ u - r)
    l1 = float(np.sum(np.abs(d @ u + y0))) / np.sqrt(code.dim)
    return _finish(
        p, "regularized", u, residual, t0,
        objective=float(residual**2 + p.lam * l1), l1=l1,
        iterations=out.iterations, converged=out.converged,
        primal_residual=out.primal_residual, dual_residual=out.dual_residual,
    )


def assess(p: CompilationProblem) -> CompilationResult:
    """Score the start Hamiltonian as is, with no further correction."""
    t0 = time.perf_counter()
    u = np.zeros(gellmann.su_dim(p.code.gauge_dim) if p.code.gauge_dim > 1 else 0)
    res = accessibility_residual(p.start_hamiltonian, p.accessible)
    return _finish(p, "as-is", u, res, t0)


_SOLVERS = {
    "plain": solve_plain,
    "fast": solve_fast,
    "weighted": solve_weighted,
    "regularized": solve_regularized,
}


def solve(p: CompilationProblem) -> CompilationResult:
    return _SOLVERS[p.mode](p)
