"""Numerical verification: exponentials, codespace action, the exp error bound."""
from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np

from .code_space import CodeSpec
from .lie import OrthonormalBasis, project
from .pauli import DimensionError


def expm_skew(h: np.ndarray) -> np.ndarray:
    """``exp(h)`` for skew-Hermitian ``h`` through the eigenbasis of ``-ih``."""
    h = np.asarray(h, dtype=complex)
    scale = max(1.0, float(np.max(np.abs(h), initial=0.0)))
    if h.ndim != 2 or h.shape[0] != h.shape[1] or np.max(np.abs(h + h.conj().T)) > 1e-10 * scale:
        raise ValueError("expm_skew needs a skew-Hermitian matrix")
    herm = -0.5j * (h - h.conj().T)
    w, v = np.linalg.eigh(herm)
    return (v * np.exp(1j * w)) @ v.conj().T


def phase_free_distance(u: np.ndarray, v: np.ndarray) -> float:
    """``1 - |tr(u^dagger v)| / dim``; zero iff ``u`` and ``v`` agree up to phase."""
    if u.shape != v.shape:
        raise DimensionError("unitaries differ in shape")
    return float(max(0.0, 1.0 - abs(np.vdot(u, v)) / u.shape[0]))


def codespace_action_error(code: CodeSpec, h_total: np.ndarray, h_logical: np.ndarray) -> float:
    """Largest ``||exp(h_total) C K(psi+0) - C K((exp(h_logical) psi)+0)||`` over basis ``psi``."""
    if h_total.shape != (code.dim, code.dim):
        raise DimensionError(f"physical Hamiltonian must be {code.dim}x{code.dim}")
    if h_logical.shape != (code.logical_dim, code.logical_dim):
        raise DimensionError(f"logical Hamiltonian must be {code.logical_dim}x{code.logical_dim}")
    enc = code.encoded_states
    lhs = expm_skew(h_total) @ enc
    rhs = enc @ expm_skew(h_logical)
    return float(np.max(np.linalg.norm(lhs - rhs, axis=0)))


def spectral_norm(a: np.ndarray) -> float:
    return float(np.linalg.norm(a, 2)) if a.size else 0.0


@dataclass(frozen=True)
class ErrorBound:
    lhs: float
    rhs: float
    satisfied: bool
    norm_ordered: bool  # ||v|| <= ||h||, as holds when v is a projection of h


def unitary_error_bound(h: np.ndarray, v: np.ndarray) -> ErrorBound:
    """Spectral-norm check of ``||e^h - e^v|| <= ||h - v|| e^{||h||}``."""
    if h.shape != v.shape:
        raise DimensionError("operands differ in shape")
    lhs = spectral_norm(expm_skew(h) - expm_skew(v))
    nh = spectral_norm(h)
    rhs = spectral_norm(h - v) * np.exp(nh)
    return ErrorBound(lhs, float(rhs), bool(lhs <= rhs + 1e-9), bool(spectral_norm(v) <= nh + 1e-12))


@dataclass(frozen=True)
class VerificationReport:
    codespace_error: float
    phase_free_distance: float  # exp(h_total) vs exp(proj_H h_total)
    bound_lhs: float
    bound_value: float
    bound_satisfied: bool

    def to_dict(self) -> dict:
        return asdict(self)


def verify(code: CodeSpec, h_total: np.ndarray, h_logical: np.ndarray,
           accessible: OrthonormalBasis) -> VerificationReport:
    v = project(h_total, accessible)
    bound = unitary_error_bound(h_total, v)
    return VerificationReport(
        codespace_error=codespace_action_error(code, h_total, h_logical),
        phase_free_distance=phase_free_distance(expm_skew(h_total), expm_skew(v)),
        bound_lhs=bound.lhs,
        bound_value=bound.rhs,
        bound_satisfied=bound.satisfied,
    )
