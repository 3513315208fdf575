import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from ultraharm.group import (
    GroupDescriptor,
    GroupElement,
    GroupError,
    all_coords,
    coset_index,
    group_norm,
    identity,
    inverse,
    inverse_arrays,
    level_of_coords,
    multiply,
    multiply_arrays,
    rank,
    ranks_of,
    sub_norm,
    unrank,
    vilenkin_norm,
)

SMALL = [
    GroupDescriptor("abelian", 2, 2, 2),
    GroupDescriptor("heisenberg", 3, 1, 1),
    GroupDescriptor("heisenberg", 3, 1, 2),
    GroupDescriptor("engel4", 3, 4, 1),
    GroupDescriptor("g52", 3, 5, 1),
]


def heis_matrix(x, q):
    """Upper unitriangular 3x3 integer matrix realizing H_1."""
    a, b, c = x
    return np.array([[1, a, c], [0, 1, b], [0, 0, 1]], dtype=object) % q


def test_descriptor_dimensions():
    assert GroupDescriptor("heisenberg", 3, 2, 1).dim == 5
    assert GroupDescriptor("engel4", 5).d == 4
    assert GroupDescriptor("g52", 5).dim == 5
    assert GroupDescriptor("heisenberg", 3, 1, 3).order == 3**9
    with pytest.raises(GroupError):
        GroupDescriptor("heisenberg", 2)
    with pytest.raises(GroupError):
        GroupDescriptor("lie", 3)
    with pytest.raises(GroupError):
        GroupDescriptor("abelian", 3, 1, 0)


def test_heisenberg_law_matches_matrix_product():
    g = GroupDescriptor("heisenberg", 3, 1, 2)
    q = g.modulus
    X = all_coords(g)
    rng = np.random.default_rng(0)
    for i, j in rng.integers(0, len(X), size=(200, 2)):
        x, y = X[i], X[j]
        z = multiply(g, GroupElement(g, tuple(x)), GroupElement(g, tuple(y)))
        M = heis_matrix(x, q).dot(heis_matrix(y, q)) % q
        assert z.coords == (M[0, 1], M[1, 2], M[0, 2])


@pytest.mark.parametrize("g", SMALL, ids=lambda g: g.name)
def test_group_axioms_exhaustive(g):
    X = all_coords(g)
    n = len(X)
    table = ranks_of(g, multiply_arrays(g, X[:, None, :], X[None, :, :]))
    # every row and column is a permutation (Latin square)
    assert np.all(np.sort(table, axis=1) == np.arange(n))
    assert np.all(np.sort(table, axis=0) == np.arange(n)[:, None])
    assert np.array_equal(table[0], np.arange(n))
    inv = ranks_of(g, inverse_arrays(g, X))
    assert np.all(table[np.arange(n), inv] == 0)
    idx = np.random.default_rng(1).integers(0, n, size=(300, 3))
    a, b, c = idx.T
    assert np.array_equal(table[table[a, b], c], table[a, table[b, c]])


@pytest.mark.parametrize("g", SMALL, ids=lambda g: g.name)
def test_rank_round_trip_and_cosets(g):
    for r in range(0, g.order, max(1, g.order // 50)):
        assert rank(g, unrank(g, r)) == r
    X = all_coords(g)
    assert np.array_equal(ranks_of(g, X), np.arange(g.order))
    # the G_1-coset of x is its residue modulo p^dim
    k = coset_index(g, 1)
    assert np.array_equal(k, np.arange(g.order) % g.p**g.dim)
    assert np.all(level_of_coords(g, X[k == 0]) >= 1)


@settings(max_examples=50, deadline=None)
@given(st.data())
def test_elementwise_and_vectorized_laws_agree(data):
    g = data.draw(st.sampled_from(SMALL))
    coords = st.tuples(*[st.integers(0, g.modulus - 1)] * g.dim)
    x = GroupElement(g, data.draw(coords))
    y = GroupElement(g, data.draw(coords))
    xy = multiply(g, x, y)
    assert xy.coords == tuple(multiply_arrays(g, np.array(x.coords), np.array(y.coords)))
    assert multiply(g, x, inverse(g, x)) == identity(g)
    # the norm is ultrametric and inversion invariant
    assert group_norm(g, xy) <= max(group_norm(g, x), group_norm(g, y))
    assert group_norm(g, inverse(g, x)) == group_norm(g, x)


def test_norms():
    g = GroupDescriptor("heisenberg", 3, 1, 3)
    x = GroupElement(g, (9, 3, 1))
    assert group_norm(g, x) == 1.0
    assert sub_norm(g, x) == pytest.approx(1 / 3)
    assert vilenkin_norm(g, GroupElement(g, (9, 0, 0))) == pytest.approx(3.0**-6)
    assert group_norm(g, identity(g)) == 0.0


def test_parse_and_json():
    g = GroupDescriptor("heisenberg", 3, 1, 2)
    x = GroupElement.parse(g, ["12", "00", "21"])
    assert x.coords == (7, 0, 5)
    assert x.to_json() == ["12", "00", "21"]
    assert GroupDescriptor.from_json(g.to_json()) == g
    with pytest.raises(GroupError):
        GroupElement(g, (1, 2))
