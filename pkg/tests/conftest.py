import numpy as np
import pytest
from scipy.stats import unitary_group

from stabcompile.code_space import CodeSpec, builtin_code, named_gate, traceless_log
from stabcompile.compiler import CompilationProblem
from stabcompile.lie import ConnectivityGraph, graph_generators, lie_closure

TOY_EDGES = [(1, 3)]  # qubits 2 and 4 in 1-based labels
GRID_EDGES = [(0, 2), (1, 3), (0, 1), (2, 3)]


def random_skew(dim, rng, traceless=True):
    a = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    h = a - a.conj().T
    if traceless:
        h -= np.trace(h) / dim * np.eye(dim)
    return h


def random_unitary(dim, rng):
    return unitary_group.rvs(dim, random_state=int(rng.integers(1 << 31)))


def random_code(n, k, rng):
    return CodeSpec.from_unitary(random_unitary(1 << n, rng), k)


def dense_expm(h):
    import scipy.linalg

    return scipy.linalg.expm(h)


def graph_problem(edges, mode="plain", **kw):
    code = builtin_code("[[4,2,2]]")
    g = ConnectivityGraph.from_edges(4, edges)
    basis = lie_closure(graph_generators(g), 4)
    return CompilationProblem(code, traceless_log(named_gate("CNOT")), basis, mode=mode, graph=g, **kw)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture(scope="session")
def code422():
    return builtin_code("[[4,2,2]]")


@pytest.fixture(scope="session")
def h_cnot():
    return traceless_log(named_gate("CNOT"))


@pytest.fixture
def toy_problem():
    return graph_problem(TOY_EDGES)


@pytest.fixture
def grid_problem():
    return graph_problem(GRID_EDGES)
