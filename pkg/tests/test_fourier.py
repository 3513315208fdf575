import json

import numpy as np
import pytest

from ultraharm.dual import dual, matrices
from ultraharm.fourier import (
    CoverageError,
    FourierError,
    GridFunction,
    Symbol,
    apply_multiplier,
    coset_average,
    convolve,
    forward,
    indicator_symbol,
    inverse,
    normalized_indicator,
    plancherel,
)
from ultraharm.group import GroupDescriptor, all_coords

GROUPS = [
    GroupDescriptor("heisenberg", 3, 1, 2),
    GroupDescriptor("engel4", 3, 4, 1),
    GroupDescriptor("g52", 3, 5, 1),
    GroupDescriptor("abelian", 5, 2, 1),
    GroupDescriptor("heisenberg", 5, 1, 1),
]


def dense_forward(f: GridFunction):
    """Matrix-by-matrix transform straight from the definition."""
    X = all_coords(f.group)
    out = {}
    for pi in dual(f.group).irreps:
        U = matrices(pi, X)
        out[pi.id] = np.einsum("x,xji->ij", f.values, U.conj()) / len(X)
    return out


@pytest.mark.parametrize("g", GROUPS, ids=lambda g: f"{g.name}-N{g.level}")
def test_forward_matches_definition(g):
    f = GridFunction.random(g, np.random.default_rng(0))
    fhat = forward(f)
    oracle = dense_forward(f)
    assert set(oracle) == {pi.id for pi in fhat.irreps}
    assert max(np.max(np.abs(fhat[k] - v)) for k, v in oracle.items()) < 1e-12


@pytest.mark.parametrize("g", GROUPS, ids=lambda g: f"{g.name}-N{g.level}")
def test_plancherel_and_inversion(g):
    rng = np.random.default_rng(1)
    for _ in range(5):
        f = GridFunction.random(g, rng)
        fhat = forward(f)
        assert plancherel(f, fhat).gap < 1e-12
        assert np.max(np.abs(inverse(fhat).values - f.values)) < 1e-12


def test_convolution_theorem():
    g = GroupDescriptor("heisenberg", 3, 1, 2)
    rng = np.random.default_rng(2)
    f, h = GridFunction.random(g, rng), GridFunction.random(g, rng)
    direct = convolve(f, h)
    via = convolve(f, h, method="fourier")
    assert np.max(np.abs(direct.values - via.values)) < 1e-12
    # nonabelian: the order matters
    assert np.max(np.abs(convolve(h, f).values - direct.values)) > 1e-3


def test_indicator_transform_and_coset_average():
    g = GroupDescriptor("heisenberg", 3, 1, 2)
    f = GridFunction.random(g, np.random.default_rng(3))
    eps = normalized_indicator(g, 1)
    assert eps.integral() == pytest.approx(1.0)
    assert forward(eps).max_difference(indicator_symbol(g, 1, 2)) < 1e-12
    avg = coset_average(f, 1)
    assert np.max(np.abs(convolve(f, eps).values - avg.values)) < 1e-12
    assert np.max(np.abs(apply_multiplier(indicator_symbol(g, 1, 2), f).values - avg.values)) < 1e-12


def test_identity_multiplier_and_left_invariance():
    g = GroupDescriptor("engel4", 3, 4, 1)
    rng = np.random.default_rng(4)
    f = GridFunction.random(g, rng)
    assert np.max(np.abs(apply_multiplier(Symbol.identity(g, 1), f).values - f.values)) < 1e-12
    sym = Symbol.build(g, 1, lambda pi: rng.standard_normal((pi.dim, pi.dim)))
    y = all_coords(g)[17]
    left = apply_multiplier(sym, f.translate_left(y))
    assert np.max(np.abs(left.values - apply_multiplier(sym, f).translate_left(y).values)) < 1e-12


def test_coverage_error_for_short_symbols():
    g = GroupDescriptor("heisenberg", 3, 1, 2)
    f = GridFunction.random(g, np.random.default_rng(5))
    with pytest.raises(CoverageError):
        apply_multiplier(Symbol.identity(g, 1), f)


def test_json_round_trip(tmp_path):
    g = GroupDescriptor("heisenberg", 3, 1, 1)
    f = GridFunction.random(g, np.random.default_rng(6))
    doc = json.loads(json.dumps(f.to_json()))
    assert np.array_equal(GridFunction.from_json(doc).values, f.values)
    sym = forward(f)
    back = Symbol.from_json(json.loads(json.dumps(sym.to_json())))
    assert back.max_difference(sym) == 0.0
    with pytest.raises(FourierError):
        GridFunction.from_json({"group": {"kind": "heisenberg"}})
    with pytest.raises(FourierError):
        GridFunction(g, np.zeros(5))
