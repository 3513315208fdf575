import math

import numpy as np
import pytest

from ultraharm import analysis
from ultraharm.analysis import (
    AnalysisError,
    WeightSpec,
    cell_weights,
    condition_h_report,
    cz_decompose,
    i_alpha,
    i_alpha_partial,
    lower_bound_report,
    martingale_differences,
    mikhlin_report,
    mu_alpha,
    mu_alpha_ball_closed_form,
    mu_alpha_properties,
    norm_equiv_check,
    rademacher_symbol,
    sobolev_norm,
    spherical_parts,
    square_function,
    tail_bound,
    weighted_norm,
)
from ultraharm.dual import dual, irrep_from_id, matrices
from ultraharm.fourier import GridFunction, Symbol, apply_multiplier
from ultraharm.group import GroupDescriptor, GroupElement, all_coords
from ultraharm.operators import vt_symbol

H1 = GroupDescriptor("heisenberg", 3, 1, 1)
H1_2 = GroupDescriptor("heisenberg", 3, 1, 2)


def identity_cell_series(p, dim, alpha, N, terms=400):
    """Average of ||x||^alpha over G_N, summed shell by shell."""
    return sum((1 - p**-dim) * p ** (-(k - N) * dim) * p ** (-k * alpha) for k in range(N, N + terms))


@pytest.mark.parametrize("alpha", [-1.5, -0.5, 0.5, 2.0])
def test_cell_weights(alpha):
    cw = cell_weights(H1_2, WeightSpec(alpha))
    assert cw[0] == pytest.approx(identity_cell_series(3, 3, alpha, 2))
    # off the identity cell the weight is constant on cells: ||x||^alpha exactly
    assert cw[1] == pytest.approx(1.0)
    assert cw[27] == pytest.approx(3.0**-alpha)
    # the total mass is the integral of ||x||^alpha over G
    assert mu_alpha(H1_2, np.ones(H1_2.order, bool), alpha) == pytest.approx(identity_cell_series(3, 3, alpha, 0))
    with pytest.raises(AnalysisError):
        cell_weights(H1_2, WeightSpec(-3.0))


def test_sub_weights_use_the_first_layer():
    cw = cell_weights(H1_2, WeightSpec(1.0, "sub"))
    X = all_coords(H1_2)
    central = np.flatnonzero((X[:, 0] == 0) & (X[:, 1] == 0) & (X[:, 2] != 0))
    assert np.allclose(cw[central], cw[0])


def test_mu_alpha_measure():
    for alpha in (-1.0, 0.5, 2.0):
        for k in range(3):
            mask = np.arange(H1_2.order) % H1_2.quotient_order(k) == 0
            assert mu_alpha(H1_2, mask, alpha) == pytest.approx(mu_alpha_ball_closed_form(H1_2, k, alpha))
    rep = mu_alpha_properties(H1_2, 0.5)
    lo, hi = rep.ball_bounds
    assert lo == pytest.approx(hi)  # mu(G_k) / |G_k|^(1 + alpha/dim) does not depend on k
    assert rep.doubling == pytest.approx(46.77, abs=0.01)
    assert all(r == pytest.approx(rep.shell_ratio[0]) for r in rep.shell_ratio)


def test_weighted_norm_alpha_zero_is_plain_norm():
    f = GridFunction.random(H1_2, np.random.default_rng(0))
    for r in (1, 1.5, 2, 4):
        assert weighted_norm(f, r, 0.0) == pytest.approx(f.norm(r))
    with pytest.raises(AnalysisError):
        weighted_norm(f, 0.5)


def abelian_i_alpha_unit(p, alpha, n_max):
    """Truncated I_alpha at a unit of Z_p, from Ramanujan sums of primitive roots."""
    total = 0.0
    for n in range(1, n_max + 1):
        ramanujan = -1 if n == 1 else 0
        total += p ** (-n * (alpha + 1)) * 2 * ((p**n - p ** (n - 1)) - ramanujan)
    return total


def test_i_alpha_on_abelian_group_is_homogeneous():
    g = GroupDescriptor("abelian", 3, 1, 3)
    for alpha in (0.5, 1.0, 2.0):
        X = all_coords(g)[1:]
        I = i_alpha_partial(g, X, alpha, 6)
        unit = abelian_i_alpha_unit(3, alpha, 6)
        assert I[0] == pytest.approx(unit)
        rep = i_alpha(GroupElement(g, (9,)), alpha, 6)
        # I(p^2 u) = p^(-2 alpha) I(u) up to the truncation tail
        assert abs(rep.partial_sum - 3 ** (-2 * alpha) * unit) <= rep.tail_bound
        assert rep.norm == pytest.approx(1 / 9)


def test_i_alpha_heisenberg_regression():
    s = analysis.i_alpha_scan(GroupDescriptor("heisenberg", 3, 1, 3), 1.0, 3)
    assert s.ratio_min == pytest.approx(0.88066, abs=1e-5)
    assert s.ratio_max == pytest.approx(0.97577, abs=1e-5)
    assert s.tail_observed <= s.tail_bound
    assert s.tail_bound == pytest.approx(2 * s.tail_bound_two)
    with pytest.raises(AnalysisError):
        tail_bound(3, 3, 0.0, 2)


def test_i_alpha_characters_match_dense_route():
    """The batched character sums agree with traces of the dense matrices."""
    X = all_coords(H1_2)[::5]
    alpha = 0.7
    want = np.zeros(len(X))
    for pi in dual(H1_2, 2).irreps:
        if pi.is_trivial:
            continue
        U = matrices(pi, X)
        hs = np.sum(np.abs(U - np.eye(pi.dim)) ** 2, axis=(1, 2))
        want += pi.dim * pi.dual_norm ** (-(alpha + 3)) * hs
    assert np.max(np.abs(i_alpha_partial(H1_2, X, alpha, 2) - want)) < 1e-12


@pytest.mark.parametrize("p", [3, 5])
def test_lower_bound_level_one(p):
    for kind in ("heisenberg", "g52"):
        rep = lower_bound_report(GroupDescriptor(kind, p, 1, 1), 1)
        assert rep.passed
        assert rep.global_c == pytest.approx(1 - 1 / p)
    # B_4 already fails at level 1: a diagonal pi(x) != I with two eigenvalues 1
    g = GroupDescriptor("engel4", p, 4, 1)
    rep = lower_bound_report(g, 1)
    assert not rep.passed
    pi = irrep_from_id(g, rep.violations[0][0])
    U = matrices(pi, np.array([rep.violations[0][1]]))[0]
    assert not np.allclose(U, np.eye(pi.dim))
    assert int(np.sum(np.abs(np.linalg.eigvals(U) - 1) < 1e-9)) == rep.violations[0][2] >= 2


def test_lower_bound_counterexample_at_level_two():
    """pi(x) != I with three eigenvalues equal to 1 on H_1(Z_3) modulo G_2."""
    pi = irrep_from_id(H1_2, "heisenberg:2:0/1,0/1,1/9")
    U = matrices(pi, np.array([[0, 3, 0]]))[0]
    assert not np.allclose(U, np.eye(pi.dim))
    ev = np.linalg.eigvals(U)
    assert int(np.sum(np.abs(ev - 1) < 1e-9)) == 3
    rep = lower_bound_report(H1_2, 2)
    assert not rep.passed
    assert (pi.id, (0, 3, 0), 3) in rep.violations


def test_norm_equivalence_routes():
    f = GridFunction.random(H1, np.random.default_rng(1))
    r = norm_equiv_check(f, 1.0, 2)
    assert r.rhs == pytest.approx(r.rhs_physical, rel=1e-12)
    assert 0 < r.ratio < np.inf
    with pytest.raises(AnalysisError):
        norm_equiv_check(f, 0.0, 1)


def test_sobolev_norms():
    f = GridFunction.random(H1_2, np.random.default_rng(2))
    assert sobolev_norm(f, 0.0) == pytest.approx(f.norm(2))
    assert sobolev_norm(GridFunction.constant(H1_2, 3.0), 1.0, homogeneous=True) == pytest.approx(0.0, abs=1e-9)
    # on L^2 the norm is the Plancherel sum weighted by ||pi||^(2 beta dim)
    parts = spherical_parts(f)
    want = math.sqrt(sum(27.0 ** (2 * 0.5 * n) * np.mean(np.abs(q.values) ** 2) for n, q in enumerate(parts)))
    assert sobolev_norm(f, 0.5) == pytest.approx(want)


def test_littlewood_paley_routes():
    f = GridFunction.random(H1_2, np.random.default_rng(3))
    parts = spherical_parts(f)
    diffs = martingale_differences(f)
    assert np.allclose(sum(q.values for q in parts), f.values)
    for a, b in zip(parts, diffs):
        assert np.max(np.abs(a.values - b.values)) < 1e-12
    assert square_function(f).norm(2) == pytest.approx(f.norm(2), abs=1e-12)
    signs = [1, -1, 1]
    out = apply_multiplier(rademacher_symbol(H1_2, 2, signs), f)
    assert np.allclose(out.values, sum(s * q.values for s, q in zip(signs, parts)))


def test_cz_decomposition_properties():
    rng = np.random.default_rng(4)
    for alpha in (0.0, -1.0):
        for _ in range(5):
            phi = GridFunction(H1_2, rng.standard_normal(H1_2.order) * (rng.random(H1_2.order) < 0.2) * 10)
            gamma = weighted_norm(phi, 1, alpha) * rng.uniform(0.5, 3)
            res = cz_decompose(phi, gamma, alpha)
            ex = res.exact
            assert ex["decomposition"] < 1e-12
            assert ex["overlap"] == 0 and ex["support"] == 0
            assert ex["mean_zero"] < 1e-12
            assert ex["measure_slack"] <= 1e-12
    with pytest.raises(AnalysisError):
        cz_decompose(phi, 1.0, 0.5)


def test_cz_with_large_height_has_no_pieces():
    phi = GridFunction.random(H1_2, np.random.default_rng(5))
    res = cz_decompose(phi, 1e6 * phi.norm(1))
    assert res.pieces == []
    assert np.array_equal(res.phi0.values, phi.values)


def test_condition_h_zero_for_radial_symbols_and_fit_for_random():
    assert condition_h_report(vt_symbol(H1_2, 1.0, 2), 1.5).max_measured < 1e-12
    rep = condition_h_report(rademacher_symbol(H1_2, 2, [1, -1, -1]), 2.0)
    assert rep.passed and rep.fitted_eps is None
    rng = np.random.default_rng(6)
    sym = Symbol.build(H1_2, 2, lambda pi: rng.standard_normal((pi.dim, pi.dim)) + 0j)
    rep = condition_h_report(sym, 1.5)
    assert rep.max_measured > 0
    assert np.isfinite(rep.fitted_B) and np.isfinite(rep.fitted_eps)
    for _, _, _, measured, bound in rep.table:
        assert measured <= bound * (1 + 1e-9)


def test_mikhlin_constants_of_radial_symbol_vanish():
    sym = vt_symbol(H1_2, 1.0, 2)
    for variant in analysis.MIKHLIN_VARIANTS:
        rep = mikhlin_report(sym, 1.0, variant)
        assert rep.passed
        assert rep.constant < 1e-9
    with pytest.raises(AnalysisError):
        mikhlin_report(sym, 1.0, "l3")
