import itertools
import re

import numpy as np
import pytest

from ultraharm.dual import (
    DualError,
    characters,
    counting_report,
    dual,
    export_tree,
    heisenberg_character_closed_form,
    intertwiner,
    irrep_from_id,
    matrices,
    sparse,
    tensor_decompose,
    tensor_decompose_heisenberg,
    tensor_decompose_oracle,
    tree_parent,
    trivial,
)
from ultraharm.group import GroupDescriptor, all_coords, multiply_arrays

H1 = GroupDescriptor("heisenberg", 3, 1, 1)
H1_2 = GroupDescriptor("heisenberg", 3, 1, 2)
GROUPS = [
    GroupDescriptor("abelian", 3, 2, 1),
    H1,
    GroupDescriptor("heisenberg", 3, 2, 1),
    GroupDescriptor("engel4", 3, 4, 1),
    GroupDescriptor("g52", 3, 5, 1),
]


def test_heisenberg_level_one_dual():
    D = dual(H1, 1)
    assert len(D) == 11
    assert sorted(D.dims.tolist()) == [1] * 9 + [3, 3]
    assert [len(D.sphere(k)) for k in (0, 1)] == [1, 10]
    assert len(dual(GroupDescriptor("abelian", 3, 1, 2), 2)) == 9


@pytest.mark.parametrize("g", GROUPS, ids=lambda g: g.name)
def test_character_orthonormality(g):
    """Schur orthogonality on the whole finite quotient: an independent irreducibility check."""
    X = all_coords(g)
    irreps = dual(g, 1).irreps
    chi = np.stack([characters(pi, X) for pi in irreps])
    gram = chi @ chi.conj().T / len(X)
    assert np.allclose(gram, np.eye(len(irreps)), atol=1e-10)
    assert sum(pi.dim**2 for pi in irreps) == g.order


@pytest.mark.parametrize("g", GROUPS, ids=lambda g: g.name)
def test_dense_homomorphism(g):
    X = all_coords(g)
    rng = np.random.default_rng(3)
    i, j = rng.integers(0, len(X), size=(2, 150))
    xy = multiply_arrays(g, X[i], X[j])
    for pi in dual(g, 1).irreps:
        A, B, C = matrices(pi, X[i]), matrices(pi, X[j]), matrices(pi, xy)
        assert np.max(np.abs(A @ B - C)) < 1e-12
        assert np.allclose(A @ np.conj(np.swapaxes(A, 1, 2)), np.eye(pi.dim))


def test_sparse_form_matches_dense():
    X = all_coords(H1_2)[::7]
    for pi in dual(H1_2, 2).irreps[::9]:
        rows, ph = sparse(pi, X)
        dense = matrices(pi, X)
        nz = np.count_nonzero(np.abs(dense) > 1e-12, axis=1)
        assert np.all(nz == 1)
        cols = np.broadcast_to(np.arange(pi.dim), rows.shape)
        assert np.all(np.abs(dense[np.arange(len(X))[:, None], rows, cols]) == pytest.approx(1.0))


def test_heisenberg_character_closed_form():
    X = all_coords(H1_2)
    for pi in dual(H1_2, 2).irreps[::5]:
        assert np.max(np.abs(heisenberg_character_closed_form(pi, X) - characters(pi, X))) < 1e-12


@pytest.mark.parametrize("g", [GroupDescriptor(k, 3, 1, 2) for k in ("abelian", "heisenberg", "engel4", "g52")],
                         ids=lambda g: g.kind)
def test_counting_identities(g):
    for n in range(3):
        rep = counting_report(g, n)
        assert rep["passed"]
        assert rep["balls"][-1][1] == g.p ** (g.dim * n)


def test_tensor_closed_form_against_oracle():
    irreps = dual(H1, 1).irreps
    for eta, xi in itertools.product(irreps, irreps):
        closed = tensor_decompose_heisenberg(eta, xi)
        assert closed.as_dict() == tensor_decompose_oracle(eta, xi).as_dict()
        assert closed.dim == eta.dim * xi.dim


def test_tensor_of_two_infinite_dimensional_type_irreps():
    # two 3-dimensional irreps with opposite central characters give the 9 characters
    big = [pi for pi in dual(H1, 1).irreps if pi.dim == 3]
    a, b = big
    dec = tensor_decompose(a, b)
    assert sorted(k for _, k in dec.components) == [1] * 9
    assert all(pi.dim == 1 for pi, _ in dec.components)
    # equal central characters add: one 3-dimensional irrep with multiplicity 3
    dec = tensor_decompose(a, a)
    assert [(pi.dim, k) for pi, k in dec.components] == [(3, 3)]


def test_intertwiner_block_diagonalizes():
    irreps = dual(H1, 1).irreps
    X = all_coords(H1)
    rng = np.random.default_rng(5)
    for eta, xi in [(irreps[-1], irreps[-2]), (irreps[-1], irreps[-1]), (irreps[3], irreps[-1])]:
        T = intertwiner(eta, xi)
        assert np.allclose(T.U.conj().T @ T.U, np.eye(T.U.shape[0]), atol=1e-10)
        for x in X[rng.integers(0, len(X), 5)]:
            big = np.kron(matrices(eta, x[None])[0], matrices(xi, x[None])[0])
            blocks = [matrices(tau, x[None])[0] for tau, _ in T.decomposition.layout()]
            assert np.max(np.abs(T.assemble(blocks) - big)) < 1e-10


def test_irrep_ids_round_trip():
    for pi in dual(H1_2, 2).irreps[::11]:
        assert irrep_from_id(H1_2, pi.id) == pi
    with pytest.raises(DualError):
        irrep_from_id(H1_2, "engel4:1:1/3,0,0,0")
    with pytest.raises(DualError):
        irrep_from_id(H1_2, "heisenberg:1:nonsense")


def test_tree_structure():
    doc = export_tree(H1_2, 2, "json")
    assert len(doc["nodes"]) == len(dual(H1_2, 2))
    # every non-root node has exactly one parent of smaller level
    assert len(doc["edges"]) == len(doc["nodes"]) - 1
    levels = {n["id"]: n["level"] for n in doc["nodes"]}
    assert all(levels[e["source"]] < levels[e["target"]] for e in doc["edges"])
    assert tree_parent(trivial(H1)) is None


def test_dot_export_is_a_digraph():
    text = export_tree(H1, 1, "dot")
    lines = text.strip().splitlines()
    assert lines[0] == "digraph dual {" and lines[-1] == "}"
    node = re.compile(r'^  "[^"]+" \[label="[^"]*"\];$')
    edge = re.compile(r'^  "[^"]+" -> "[^"]+";$')
    assert all(node.match(ln) or edge.match(ln) for ln in lines[1:-1])
    assert sum(bool(edge.match(ln)) for ln in lines) == 10
    with pytest.raises(DualError):
        export_tree(H1, 1, "svg")
