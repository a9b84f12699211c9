from dataclasses import replace

import numpy as np
import pytest
import scipy.linalg

from stabcompile import gellmann
from stabcompile.code_space import build_k, naive_encoding
from stabcompile.compiler import (
    AdmmSettings,
    CompilationProblem,
    accessibility_residual,
    admm_l1_ls,
    build_a,
    build_m,
    is_correctibly_accessible,
    pinv,
    random_stabilizer,
    solve,
    solve_fast,
    solve_plain,
    solve_regularized,
    solve_weighted,
)
from stabcompile.lie import OrthonormalBasis, join, lie_closure, orthonormalize, project
from stabcompile.pauli import (
    PauliString,
    all_pauli_strings,
    hs_norm,
    pauli_coefficients,
    unvectorize,
    vectorize,
)
from stabcompile.verify import codespace_action_error, expm_skew

from conftest import random_code, random_skew


def gauge_matrix(code):
    """Oracle for D: stabilizer elements built by explicit C K (0 (+) g) K^dagger C^dagger."""
    kk = np.zeros((code.dim, code.dim))
    kk[code.k_map, np.arange(code.dim)] = 1
    cols = []
    for g in gellmann.basis(code.gauge_dim):
        block = np.zeros((code.dim, code.dim), dtype=complex)
        block[code.logical_dim:, code.logical_dim:] = g
        cols.append(vectorize(code.encoder @ kk @ block @ kk.T @ code.encoder.conj().T))
    return np.array(cols).T


def oracle_residual(p, weights=None):
    """min_u ||W (I - P)(y0 + D u)|| (or ||W (y0 + D u)|| when weights given) via lstsq."""
    d = gauge_matrix(p.code)
    y0 = vectorize(p.start_hamiltonian)
    if weights is None:
        q = p.accessible.coords
        proj = np.eye(len(y0)) - q.T @ q
        a, b = proj @ d, -proj @ y0
    else:
        a, b = weights[:, None] * d, -weights * y0
    # explicit cutoffs: LAPACK's default keeps roundoff-level singular values
    u = scipy.linalg.pinv(a, atol=1e-12, rtol=1e-10) @ b
    return np.linalg.norm(a @ u - b)


def random_instance(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(2, 4))
    k = int(rng.integers(1, n))
    code = random_code(n, k, rng)
    h = random_skew(2**k, rng)
    ps = all_pauli_strings(n)
    gens = [ps[j] for j in rng.choice(len(ps), size=int(rng.integers(1, 4)), replace=False)]
    basis = lie_closure(gens, n)
    start = None
    if seed % 2:
        start = naive_encoding(code, h) + random_stabilizer(code, seed)
    if seed % 4 == 3:
        extra = code.stabilizer_basis.coords[: int(rng.integers(1, 6))]
        basis = join(basis, OrthonormalBasis(n, extra))
    return CompilationProblem(code, h, basis, start=start)


# -- linear maps ---------------------------------------------------------------

def test_build_m_examples(rng):
    code = random_code(2, 1, rng)
    basis = lie_closure([PauliString.from_label("XX"), PauliString.from_label("ZI")], 2)
    m = build_m(code, basis)
    assert m.shape == (15, 15)
    # C v C^dagger in H -> 0
    v_in = code.unconjugate(basis.elements[0])
    assert np.allclose(m @ vectorize(v_in), 0, atol=1e-12)
    # C v C^dagger orthogonal to H -> -C v C^dagger
    w = random_skew(4, rng)
    w_perp = w - project(w, basis)
    v_perp = code.unconjugate(w_perp)
    assert np.allclose(m @ vectorize(v_perp), -vectorize(w_perp), atol=1e-12)
    # random v against the direct formula
    v = random_skew(4, rng)
    cv = code.conjugate(v)
    assert np.allclose(m @ vectorize(v), vectorize(project(cv, basis) - cv), atol=1e-10)


def test_build_a_examples(rng):
    km = build_k(2, 1)
    a = build_a(2, 1, km)
    assert a.shape == (15, 3)
    v = gellmann.vectorize(1j * np.diag([1.0, -1.0]))
    assert np.allclose(unvectorize(a @ v, 2), np.diag([0, 1j, 0, -1j]))
    assert np.allclose(a @ np.zeros(3), 0)
    # isometric, and block extraction is a left inverse
    for n, k in [(3, 1), (3, 2)]:
        km = build_k(n, k)
        a = build_a(n, k, km)
        assert np.allclose(a.T @ a, np.eye(a.shape[1]), atol=1e-12)
        d = 2**n - 2**k
        c = rng.standard_normal(d * d - 1)
        img = unvectorize(a @ c, n)
        back = img[np.ix_(km, km)][2**k:, 2**k:]
        assert np.allclose(gellmann.vectorize(back), c)
        # orthogonal to embedded logical directions
        lg = np.zeros((2**n, 2**n), dtype=complex)
        lg[np.ix_(km[: 2**k], km[: 2**k])] = random_skew(2**k, rng)
        assert np.allclose(vectorize(lg) @ a, 0, atol=1e-12)


def test_pinv_examples():
    assert np.allclose(pinv(np.eye(4)), np.eye(4))
    assert np.allclose(pinv(np.diag([2.0, 0.0])), np.diag([0.5, 0.0]))


@pytest.mark.parametrize("shape,rank", [((30, 20), 20), ((200, 150), 150), ((200, 150), 60), ((40, 70), 25)])
def test_pinv_penrose(shape, rank):
    rng = np.random.default_rng(shape[0] + rank)
    a = rng.standard_normal((shape[0], rank)) @ rng.standard_normal((rank, shape[1]))
    ap = pinv(a)
    assert np.allclose(a @ ap @ a, a, atol=1e-8)
    assert np.allclose(ap @ a @ ap, ap, atol=1e-8)
    assert np.allclose((a @ ap).T, a @ ap, atol=1e-8)
    assert np.allclose((ap @ a).T, ap @ a, atol=1e-8)
    assert np.allclose(ap, np.linalg.pinv(a, rcond=1e-10), atol=1e-8)


def test_pinv_rejects_nonfinite():
    with pytest.raises(ValueError):
        pinv(np.array([[np.nan, 1.0]]))


# -- residual and correctibility ----------------------------------------------

def test_accessibility_residual_examples(rng):
    x_frame = OrthonormalBasis.from_paulis([PauliString.from_label("X")], 1)
    iz = 1j * np.diag([1.0, -1.0])
    assert accessibility_residual(iz, x_frame) == pytest.approx(np.sqrt(2))
    assert accessibility_residual(1j * PauliString.from_label("X").to_dense(), x_frame) == pytest.approx(0)
    b = orthonormalize(3, rng.standard_normal((12, 63)))
    for _ in range(20):
        h = random_skew(8, rng)
        r = accessibility_residual(h, b)
        assert r**2 + hs_norm(project(h, b)) ** 2 == pytest.approx(hs_norm(h) ** 2, abs=1e-9)


def test_residual_monotone_under_enlargement(rng):
    for _ in range(20):
        b_small = orthonormalize(2, rng.standard_normal((4, 15)))
        b_big = join(b_small, orthonormalize(2, rng.standard_normal((3, 15))))
        h = random_skew(4, rng)
        assert accessibility_residual(h, b_big) <= accessibility_residual(h, b_small) + 1e-10


def test_correctibility(toy_problem, rng):
    p = toy_problem
    el = p.accessible.elements[1]
    assert is_correctibly_accessible(el, p.code, p.accessible).accessible
    res = is_correctibly_accessible(p.naive, p.code, p.accessible)
    assert res.accessible and res.joint_dim > p.accessible.dim
    joint = join(p.accessible, p.code.stabilizer_basis)
    h = random_skew(16, rng)
    h_perp = h - project(h, joint)
    assert not is_correctibly_accessible(h_perp, p.code, p.accessible).accessible


def test_random_stabilizer(code422):
    a, b = random_stabilizer(code422, 7), random_stabilizer(code422, 7)
    assert np.array_equal(a, b)
    assert hs_norm(a) == pytest.approx(1.0)
    assert accessibility_residual(a, code422.stabilizer_basis) <= 1e-10
    assert not np.allclose(a, random_stabilizer(code422, 8))


# -- solvers -------------------------------------------------------------------

@pytest.mark.parametrize("solver", [solve_plain, solve_fast, solve_weighted, solve_regularized])
def test_zero_logical_gives_zero(solver, code422):
    basis = lie_closure([PauliString.from_label("XXII")], 4)
    p = CompilationProblem(code422, np.zeros((4, 4)), basis)
    r = solver(p)
    assert np.abs(r.h_correction).max() <= 1e-10
    assert r.residual <= 1e-10


def test_plain_toy_and_grid(toy_problem, grid_problem, h_cnot):
    r = solve_plain(toy_problem)
    assert r.accessible and r.accessibility_residual <= 1e-8
    assert codespace_action_error(toy_problem.code, r.h_total, h_cnot) <= 1e-8
    g = solve_plain(grid_problem)
    assert g.residual <= 1e-8 and np.abs(g.h_correction).max() <= 1e-12


@pytest.mark.parametrize("seed", range(12))
def test_plain_matches_lstsq_oracle(seed):
    p = random_instance(seed)
    r = solve_plain(p)
    assert r.residual == pytest.approx(oracle_residual(p), abs=1e-9)
    assert r.accessibility_residual == pytest.approx(r.residual, abs=1e-9)


def test_plain_is_minimizer(toy_problem):
    p = replace(toy_problem, start=toy_problem.naive + random_stabilizer(toy_problem.code, 3))
    p.accessible = lie_closure([PauliString.from_label("XXII"), PauliString.from_label("IZZI")], 4)
    r = solve_plain(p)
    rng = np.random.default_rng(0)
    stab = p.code.stabilizer_basis
    for _ in range(100):
        delta = unvectorize(1e-3 * rng.standard_normal(stab.dim) @ stab.coords, 4)
        assert accessibility_residual(r.h_total + delta, p.accessible) >= r.residual - 1e-9


@pytest.mark.parametrize("seed", range(20))
def test_fast_matches_plain(seed):
    p = random_instance(seed)
    a, b = solve_plain(p), solve_fast(p)
    assert abs(a.residual - b.residual) <= 1e-8
    assert abs(b.residual - b.accessibility_residual) <= 1e-8
    # both are minimum-norm over the gauge, so they coincide
    assert np.allclose(a.h_total, b.h_total, atol=1e-7)


@pytest.mark.parametrize("seed", range(6))
def test_result_invariants_all_modes(seed):
    p = random_instance(seed)
    h = p.h_logical
    for mode in ("plain", "fast", "weighted", "regularized"):
        q = replace(p, mode=mode, lam=0.05)
        r = solve(q)
        assert np.allclose(r.h_total - r.h_correction, p.start_hamiltonian, atol=1e-10)
        corr = r.h_correction
        assert accessibility_residual(corr, p.code.stabilizer_basis) <= 1e-9
        enc = p.code.encoded_states
        assert np.abs(expm_skew(corr) @ enc - enc).max() <= 1e-9
        assert codespace_action_error(p.code, r.h_total, h) <= 1e-8
        assert r.term_count == int(np.count_nonzero(np.abs(pauli_coefficients(r.h_total)) > 1e-8))


def test_weighted_special_cases(toy_problem):
    p = toy_problem
    zero = replace(p, mode="weighted", default_weight=0.0)
    r = solve_weighted(zero)
    assert r.residual == 0 and np.allclose(r.h_correction, 0)
    # weight 1 off the algebra, 0 on it, reproduces the plain residual
    on = {q: 0.0 for q in p.accessible.paulis}
    r = solve_weighted(replace(p, mode="weighted", weights=on))
    assert r.residual == pytest.approx(solve_plain(p).residual, abs=1e-10)
    # unit weights with trivial algebra: minimum-norm physical Hamiltonian
    triv = replace(p, mode="weighted", accessible=OrthonormalBasis.empty(4))
    r = solve_weighted(triv)
    assert r.residual == pytest.approx(hs_norm(r.h_total), abs=1e-10)
    assert r.residual <= hs_norm(p.naive) + 1e-12


def test_weighted_matches_normal_equations(rng):
    code = random_code(2, 1, rng)
    h = random_skew(2, rng)
    basis = lie_closure([PauliString.from_label("XY")], 2)
    ps = all_pauli_strings(2)
    wdict = {q: float(w) for q, w in zip(ps, rng.uniform(0, 3, len(ps)))}
    p = CompilationProblem(code, h, basis, mode="weighted", weights=wdict)
    w = np.array([wdict[q] for q in ps])
    # normal equations: D^T W^2 D u = -D^T W^2 y0
    d = gauge_matrix(code)
    y0 = vectorize(p.naive)
    u = np.linalg.solve(d.T @ (w[:, None] ** 2 * d), -d.T @ (w**2 * y0))
    expect = np.linalg.norm(w * (y0 + d @ u))
    r = solve_weighted(p)
    assert r.residual == pytest.approx(expect, abs=1e-8)
    assert r.residual == pytest.approx(oracle_residual(p, w), abs=1e-8)
    with pytest.raises(ValueError):
        CompilationProblem(code, h, basis, weights={ps[0]: -1.0})


def test_problem_validation(code422):
    basis = OrthonormalBasis.empty(4)
    with pytest.raises(ValueError):
        CompilationProblem(code422, np.zeros((4, 4)), basis, lam=-1)
    with pytest.raises(ValueError):
        CompilationProblem(code422, np.zeros((2, 2)), basis)
    with pytest.raises(ValueError):
        CompilationProblem(code422, np.zeros((4, 4)), OrthonormalBasis.empty(3))
    with pytest.raises(ValueError):
        CompilationProblem(code422, np.zeros((4, 4)), basis, mode="magic")


# -- regularized ---------------------------------------------------------------

def grid_objective(q, r, e, e0, lam, lo=-3.0, hi=3.0, step=0.01):
    g = np.arange(lo, hi + step / 2, step)
    x1, x2 = np.meshgrid(g, g, indexing="ij")
    pts = np.stack([x1.ravel(), x2.ravel()], axis=1)
    ls = np.sum((pts @ q.T - r) ** 2, axis=1)
    l1 = np.sum(np.abs(pts @ e.T + e0), axis=1)
    obj = ls + lam * l1
    j = int(np.argmin(obj))
    return obj[j], pts[j]


@pytest.mark.parametrize("seed", range(4))
def test_admm_matches_grid(seed):
    rng = np.random.default_rng(seed)
    q = rng.standard_normal((5, 2))
    r = rng.standard_normal(5)
    e = rng.standard_normal((4, 2))
    e0 = rng.standard_normal(4)
    lam = 0.5
    out = admm_l1_ls(q, r, e, e0, lam)
    assert out.converged and np.all(np.abs(out.x) <= 3)
    val = np.sum((q @ out.x - r) ** 2) + lam * np.sum(np.abs(e @ out.x + e0))
    coarse, x_best = grid_objective(q, r, e, e0, lam)
    assert val <= coarse + 1e-9
    assert coarse - val <= 1e-3


def test_regularized_lambda_zero_matches_plain(toy_problem):
    p = replace(toy_problem, mode="regularized", lam=0.0)
    p.start = p.naive + random_stabilizer(p.code, 1)
    p.accessible = lie_closure([PauliString.from_label("XXII"), PauliString.from_label("IYYI")], 4)
    plain = solve_plain(p)
    reg = solve_regularized(p)
    assert reg.info["objective"] <= plain.residual**2 + 1e-6
    assert abs(reg.info["objective"] - plain.residual**2) <= 1e-6


def test_regularized_l1_monotone(toy_problem):
    l1 = []
    for lam in (0.0, 0.1, 0.5, 1.0, 5.0):
        r = solve_regularized(replace(toy_problem, mode="regularized", lam=lam))
        assert r.info["converged"]
        l1.append(r.info["l1"])
    assert all(b <= a + 1e-6 for a, b in zip(l1, l1[1:]))


def test_regularized_l1_path_moves():
    rng = np.random.default_rng(3)
    code = random_code(3, 1, rng)
    basis = lie_closure([PauliString.from_label("XXI"), PauliString.from_label("IZZ")], 3)
    p = CompilationProblem(code, random_skew(2, rng), basis, mode="regularized")
    runs = [solve_regularized(replace(p, lam=lam)) for lam in (0.0, 0.5, 5.0)]
    l1 = [r.info["l1"] for r in runs]
    res = [r.residual for r in runs]
    assert l1[0] > l1[1] > l1[2]
    assert res[0] <= res[1] <= res[2]


def test_admm_reports_nonconvergence():
    q = np.eye(2)
    out = admm_l1_ls(q, np.ones(2), np.eye(2), np.zeros(2), 1.0, AdmmSettings(max_iter=1))
    assert out.iterations == 1 and not out.converged
