import numpy as np
import pytest

from ultraharm import kernels
from ultraharm.dual import dual, sparse
from ultraharm.group import GroupDescriptor, all_coords, multiply_arrays, ranks_of

BACKENDS = kernels.available_backends()
CASES = [
    GroupDescriptor("heisenberg", 3, 1, 2),
    GroupDescriptor("heisenberg", 3, 2, 1),
    GroupDescriptor("engel4", 5, 4, 1),
    GroupDescriptor("engel4", 3, 4, 2),
    GroupDescriptor("g52", 3, 5, 2),
    GroupDescriptor("abelian", 3, 2, 2),
]


def sample(g, k=40, seed=0):
    irreps = dual(g).irreps
    rng = np.random.default_rng(seed)
    return [irreps[i] for i in rng.choice(len(irreps), size=min(k, len(irreps)), replace=False)]


def test_python_backend_always_available():
    assert "python" in BACKENDS
    assert kernels.backend() in BACKENDS
    with pytest.raises(ValueError):
        kernels.set_backend("fortran")


@pytest.mark.parametrize("g", CASES, ids=lambda g: f"{g.name}-N{g.level}")
def test_sparse_table_matches_dual_sparse(g):
    X = all_coords(g)[::13]
    for pi in sample(g):
        rows, ph = sparse(pi, X)
        for which in BACKENDS:
            r2, p2 = kernels.sparse_table(pi, X, which=which)
            assert np.array_equal(r2, rows)
            q = g.p ** pi.level
            assert np.array_equal(p2 % q, ph % q)


@pytest.mark.parametrize("g", CASES, ids=lambda g: f"{g.name}-N{g.level}")
def test_backends_agree(g):
    X = all_coords(g)
    rng = np.random.default_rng(1)
    f = rng.standard_normal(len(X)) + 1j * rng.standard_normal(len(X))
    for pi in sample(g, 12):
        sigma = rng.standard_normal((pi.dim, pi.dim)) + 1j * rng.standard_normal((pi.dim, pi.dim))
        ref_f = kernels.forward_irrep(pi, X, f, which="python")
        ref_i = kernels.inverse_irrep(pi, X, sigma, which="python")
        ref_e = kernels.eigen_one_counts(pi, X, which="python")
        for which in BACKENDS:
            assert np.max(np.abs(kernels.forward_irrep(pi, X, f, which=which) - ref_f)) < 1e-9
            assert np.max(np.abs(kernels.inverse_irrep(pi, X, sigma, which=which) - ref_i)) < 1e-9
            assert np.array_equal(kernels.eigen_one_counts(pi, X, which=which), ref_e)


def test_eigen_one_counts_against_dense_eigenvalues():
    from ultraharm.dual import matrices

    g = GroupDescriptor("heisenberg", 3, 1, 2)
    X = all_coords(g)[::29]
    for pi in sample(g, 10, seed=2):
        U = matrices(pi, X)
        ev = np.linalg.eigvals(U)
        want = np.sum(np.abs(ev - 1) < 1e-8, axis=1)
        for which in BACKENDS:
            assert np.array_equal(kernels.eigen_one_counts(pi, X, which=which), want)


@pytest.mark.parametrize("g", CASES[:3], ids=lambda g: f"{g.name}-N{g.level}")
def test_homomorphism_residual_detects_errors(g):
    X = all_coords(g)
    rng = np.random.default_rng(3)
    a, b = rng.integers(0, len(X), size=(2, 300))
    prod = ranks_of(g, multiply_arrays(g, X[a], X[b]))
    tables = kernels.PairTables(sample(g, 30), X)
    for which in BACKENDS:
        assert kernels.homomorphism_residual(tables, a, b[:, None], prod[:, None], which=which) < 1e-12
    # using the wrong product rank must show up as a residual
    wrong = ranks_of(g, multiply_arrays(g, X[b], X[a]))
    bad = np.where(wrong != prod, wrong, (prod + 1) % len(X))
    res = {w: kernels.homomorphism_residual(tables, a, b[:, None], bad[:, None], which=w) for w in BACKENDS}
    assert all(r > 1e-3 for r in res.values())
    assert max(res.values()) - min(res.values()) < 1e-12
