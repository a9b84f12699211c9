import numpy as np
import pytest

from stabcompile.lie import (
    PAULI_FRAME,
    ConnectivityGraph,
    OrthonormalBasis,
    graph_generators,
    is_closed,
    join,
    lie_closure,
    orthonormalize,
    project,
)
from stabcompile.pauli import PauliString, hs_inner, unvectorize, vectorize

from conftest import GRID_EDGES, random_skew


def dense_closure_dim(mats, tol=1e-9):
    """Oracle: iterate all brackets until the flattened span stops growing."""
    span = [m.ravel() for m in mats]

    def rank(vs):
        return np.linalg.matrix_rank(np.array(vs), tol=tol) if vs else 0

    current = list(mats)
    r = rank(span)
    while True:
        new = [a @ b - b @ a for a in current for b in current]
        cand = span + [m.ravel() for m in new]
        r2 = rank(cand)
        if r2 == r:
            return r
        # keep an independent subset
        basis, kept = [], []
        for v, m in zip(cand, current + new):
            if rank(basis + [v]) > len(basis):
                basis.append(v)
                kept.append(m)
        span, current, r = basis, kept, r2


def ip(label):
    return 1j * PauliString.from_label(label).to_dense()


def test_graph_validation():
    with pytest.raises(ValueError):
        ConnectivityGraph.from_edges(3, [(0, 0)])
    with pytest.raises(ValueError):
        ConnectivityGraph.from_edges(3, [(0, 3)])
    g = ConnectivityGraph.from_edges(3, [(2, 0), (0, 2)])
    assert g.sorted_edges() == [(0, 2)]


def test_graph_generators_examples():
    toy = graph_generators(ConnectivityGraph.from_edges(4, [(1, 3)]))
    assert [p.label for p in toy] == ["IXIX", "IYIY", "IZIZ"]
    assert len(graph_generators(ConnectivityGraph.from_edges(4, GRID_EDGES))) == 12
    assert graph_generators(ConnectivityGraph(4)) == []


def test_toy_closure_matches_dense_oracle():
    labels = ["IXIX", "IYIY", "IZIZ"]
    b = lie_closure([PauliString.from_label(s) for s in labels], 4)
    assert b.dim == 3 == dense_closure_dim([ip(s) for s in labels])
    assert b.frame_tag == PAULI_FRAME


def test_small_closures():
    assert lie_closure([PauliString.from_label("XZ")], 2).dim == 1
    b = lie_closure([PauliString.from_label("X"), PauliString.from_label("Y")], 1)
    assert b.dim == 3 == dense_closure_dim([ip("X"), ip("Y")])
    assert lie_closure([], 3).dim == 0


@pytest.mark.parametrize("labels", [
    ["XXI", "IZZ"],
    ["XYI", "IYX", "ZIZ"],
    ["XX", "ZI"],
    ["XIII", "ZZII", "IZZI", "IIZZ"],
])
def test_pauli_closure_matches_dense_oracle(labels):
    n = len(labels[0])
    b = lie_closure([PauliString.from_label(s) for s in labels], n)
    assert b.dim == dense_closure_dim([ip(s) for s in labels])
    assert is_closed(b)


def test_dense_generators_fall_back(rng):
    g1 = ip("XI") + 0.5 * ip("ZZ")
    g2 = ip("IY")
    b = lie_closure([g1, g2])
    assert b.frame_tag != PAULI_FRAME
    assert b.dim == dense_closure_dim([g1, g2])
    assert is_closed(b)
    assert np.allclose(b.coords @ b.coords.T, np.eye(b.dim), atol=1e-10)


def test_zero_generators_dropped():
    b = lie_closure([np.zeros((4, 4)), PauliString.from_label("XX")])
    assert b.dim == 1


def test_grid_closure_is_closed_and_pauli_scaled():
    g = ConnectivityGraph.from_edges(4, GRID_EDGES)
    b = lie_closure(graph_generators(g), 4)
    assert b.frame_tag == PAULI_FRAME
    assert is_closed(b)
    assert np.all(np.count_nonzero(b.coords, axis=1) == 1)


def test_project_examples(rng):
    a = random_skew(4, rng)
    assert np.allclose(project(a, OrthonormalBasis.full(2)), a)
    x_only = OrthonormalBasis.from_paulis([PauliString.from_label("X")], 1)
    assert np.allclose(project(ip("Z"), x_only), 0)
    b = orthonormalize(3, rng.standard_normal((10, 63)))
    for _ in range(10):
        h = random_skew(8, rng)
        p = project(h, b)
        assert np.allclose(project(p, b), p)  # idempotent
        r = h - p
        for el in b.elements:
            assert abs(hs_inner(el, r)) <= 1e-10


def test_join_contains_both(rng):
    a = orthonormalize(2, rng.standard_normal((3, 15)))
    c = OrthonormalBasis.from_paulis([PauliString.from_label("XX")], 2)
    j = join(a, c)
    assert j.dim == 4
    for el in list(a.elements) + list(c.elements):
        assert np.allclose(project(el, j), el)


def test_orthonormal_elements(rng):
    b = orthonormalize(2, rng.standard_normal((6, 15)))
    gram = np.array([[hs_inner(x, y) for y in b.elements] for x in b.elements])
    assert np.allclose(gram, np.eye(6), atol=1e-10)
    assert np.allclose(vectorize(b.elements), b.coords)
    assert np.allclose(unvectorize(b.coords, 2), b.elements)
