"""Re-solve a problem under relabelings of the physical qubits."""
from __future__ import annotations

import itertools
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import replace
from typing import Sequence

import numpy as np

from .compiler import CompilationProblem, solve
from .lie import OrthonormalBasis, graph_generators, lie_closure
from .pauli import PauliString, vectorize

EXHAUSTIVE_MAX_N = 8
THREADS_ENV = "STABCOMPILE_THREADS"


def _permute_pauli(p: PauliString, perm: Sequence[int]) -> PauliString:
    body = ["I"] * p.n
    for q, letter in enumerate(p.body):
        body[perm[q]] = letter
    return PauliString.from_label("".join(body))


def qubit_permutation_matrix(perm: Sequence[int]) -> np.ndarray:
    """Unitary sending qubit ``q`` to position ``perm[q]`` (qubit 0 most significant)."""
    n = len(perm)
    dim = 1 << n
    out = np.zeros((dim, dim))
    for b in range(dim):
        bits = [(b >> (n - 1 - q)) & 1 for q in range(n)]
        target = 0
        for q in range(n):
            target |= bits[q] << (n - 1 - perm[q])
        out[target, b] = 1.0
    return out


def relabel_accessible(p: CompilationProblem, perm: Sequence[int]) -> OrthonormalBasis:
    """Accessible algebra after renaming physical qubit ``q`` to ``perm[q]``."""
    n = p.code.n
    if p.graph is not None:
        gens = graph_generators(p.graph.relabel(perm))
        return lie_closure(gens, n) if gens else OrthonormalBasis.empty(n)
    basis = p.accessible
    if basis.paulis is not None:
        return OrthonormalBasis.from_paulis([_permute_pauli(q, perm) for q in basis.paulis], n)
    u = qubit_permutation_matrix(perm)
    moved = u @ basis.elements @ u.T
    return OrthonormalBasis(n, vectorize(moved), basis.frame_tag)


def candidate_permutations(n: int, max_perms: int, seed: int = 0) -> list[tuple[int, ...]]:
    """All permutations when ``n <= 8`` and they fit the cap, else a seeded sample.

    The identity is always included.
    """
    if max_perms < 1:
        raise ValueError("max_perms must be positive")
    ident = tuple(range(n))
    if n <= EXHAUSTIVE_MAX_N and math.factorial(n) <= max_perms:
        return list(itertools.permutations(range(n)))
    rng = np.random.default_rng(seed)
    chosen = {ident}
    target = min(max_perms, math.factorial(n))
    while len(chosen) < target:
        chosen.add(tuple(int(v) for v in rng.permutation(n)))
    return sorted(chosen)


def _threads() -> int:
    try:
        return max(1, int(os.environ.get(THREADS_ENV, "1")))
    except ValueError:
        return 1


def permutation_sweep(p: CompilationProblem, max_perms: int = 40320, seed: int = 0
                      ) -> list[tuple[tuple[int, ...], float]]:
    """``(permutation, residual)`` pairs sorted by residual, ties broken lexicographically."""
    perms = candidate_permutations(p.code.n, max_perms, seed)

    def run(perm):
        q = replace(p, accessible=relabel_accessible(p, perm),
                    graph=p.graph.relabel(perm) if p.graph is not None else None)
        return solve(q).residual

    workers = _threads()
    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            residuals = list(pool.map(run, perms))
    else:
        residuals = [run(perm) for perm in perms]
    # residuals equal to 12 digits count as ties
    return sorted(zip(perms, residuals), key=lambda pr: (round(pr[1], 12), pr[0]))
