"""Verification suites: seeded, self-contained checks with tabular output.

Every suite takes a :class:`SuiteConfig` and returns a :class:`SuiteResult`
holding the pass flag, a JSON-ready summary and one row per table entry.
The CLI ``verify`` command is a thin wrapper around :func:`run_suite`.
"""

from __future__ import annotations

import itertools
import time
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import analysis, kernels
from .dual import (
    characters,
    counting_report,
    dual,
    matrices,
    tensor_decompose_heisenberg,
    tensor_decompose_oracle,
)
from .fourier import GridFunction, Symbol, apply_multiplier, forward, inverse, plancherel
from .group import GroupDescriptor, all_coords, multiply_arrays, ranks_of
from .operators import (
    delta,
    dual_vectors,
    kernel_dimension,
    product_rule_residual,
    rt_delta_symbol,
    script_l_symbol,
    singular_values,
    sub_laplacian_symbol,
    vt_apply_direct,
    vt_symbol,
)
from .padic import jordan_check, max_level, phase_bound_scan


@dataclass
class SuiteConfig:
    group: GroupDescriptor
    seed: int = 0
    alpha: float | None = None
    options: dict = field(default_factory=dict)

    def rng(self, stream: int = 0) -> np.random.Generator:
        return np.random.default_rng([self.seed, stream])

    def alphas(self, default: tuple[float, ...]) -> tuple[float, ...]:
        return default if self.alpha is None else (self.alpha,)

    def opt(self, key: str, default):
        return type(default)(self.options.get(key, default)) if default is not None else self.options.get(key)


@dataclass
class SuiteResult:
    name: str
    passed: bool
    summary: dict
    rows: list[dict]
    seconds: float = 0.0


SUITES: dict[str, Callable[[SuiteConfig], SuiteResult]] = {}


def suite(name: str):
    def register(fn):
        SUITES[name] = fn
        return fn

    return register


def run_suite(name: str, cfg: SuiteConfig) -> SuiteResult:
    if name not in SUITES:
        raise KeyError(f"unknown suite {name!r}; choose from {', '.join(sorted(SUITES))}")
    t0 = time.perf_counter()
    res = SUITES[name](cfg)
    res.seconds = time.perf_counter() - t0
    return res


def _random_symbol(g: GroupDescriptor, n: int, rng: np.random.Generator) -> Symbol:
    return Symbol.build(
        g, n, lambda pi: rng.standard_normal((pi.dim, pi.dim)) + 1j * rng.standard_normal((pi.dim, pi.dim))
    )


# ---------------------------------------------------------------------------
# representations and transforms


def _unitarity_residual(irreps, X: np.ndarray) -> float:
    worst = 0.0
    for pi in irreps:
        U = matrices(pi, X)
        eye = np.eye(pi.dim)
        worst = max(worst, float(np.max(np.abs(U @ np.conj(np.swapaxes(U, 1, 2)) - eye))))
    return worst


def homomorphism_check(g: GroupDescriptor, n: int, rng: np.random.Generator, pairs: int = 1000,
                       max_irreps: int | None = None, unitarity_points: int = 200) -> dict:
    """Homomorphism and unitarity residuals of every irrep of level <= n on G/G_n.

    Level 1 is checked on every pair of grid points; higher levels on
    ``pairs`` random pairs.  With ``max_irreps`` the irreps of level n are
    subsampled (lower levels are always complete).
    """
    gn = g.at_level(n)
    irreps = list(dual(g, n).irreps)
    sampled = False
    if max_irreps is not None and len(irreps) > max_irreps:
        low = [pi for pi in irreps if pi.level < n]
        top = [pi for pi in irreps if pi.level == n]
        pick = rng.choice(len(top), size=max(max_irreps - len(low), 1), replace=False)
        irreps = low + [top[i] for i in sorted(pick)]
        sampled = True
    if n == 1:
        X = all_coords(gn)
        M = len(X)
        tables = kernels.PairTables(irreps, X)
        hom, B = 0.0, max(1, 200_000 // M)
        grid = np.arange(M)
        for s in range(0, M, B):
            xs = grid[s : s + B]
            prod = ranks_of(gn, multiply_arrays(gn, X[xs][:, None, :], X[None, :, :]))
            hom = max(hom, kernels.homomorphism_residual(tables, xs, np.broadcast_to(grid, prod.shape), prod))
        npairs = M * M
        upts = X if M <= unitarity_points else X[rng.choice(M, unitarity_points, replace=False)]
    else:
        xs = rng.integers(0, gn.modulus, size=(pairs, gn.dim))
        ys = rng.integers(0, gn.modulus, size=(pairs, gn.dim))
        X = np.concatenate([xs, ys, multiply_arrays(gn, xs, ys)])
        hom = 0.0
        for s in range(0, len(irreps), 2000):
            tables = kernels.PairTables(irreps[s : s + 2000], X)
            idx = np.arange(pairs)
            hom = max(hom, kernels.homomorphism_residual(tables, idx, (pairs + idx)[:, None], (2 * pairs + idx)[:, None]))
        npairs = pairs
        upts = xs[:unitarity_points]
    # exact unitarity of the monomial form: every pi(x) permutes the basis
    perm_ok = True
    for pi in irreps[:: max(1, len(irreps) // 200)]:
        rows, _ = kernels.sparse_table(pi, upts)
        perm_ok &= bool(np.all(np.sort(rows, axis=1) == np.arange(pi.dim)))
    uni = _unitarity_residual(irreps[:: max(1, len(irreps) // 200)], upts)
    return {
        "group": gn.name, "level": n, "irreps": len(irreps), "sampled": sampled, "pairs": npairs,
        "homomorphism": hom, "unitarity": uni, "permutation": perm_ok,
    }


@suite("homomorphism")
def homomorphism_suite(cfg: SuiteConfig) -> SuiteResult:
    rng = cfg.rng()
    rows = []
    for n in range(1, cfg.group.level + 1):
        rows.append(homomorphism_check(
            cfg.group, n, rng, pairs=cfg.opt("pairs", 1000), max_irreps=cfg.opt("max_irreps", 0) or None
        ))
    worst = max(max(r["homomorphism"], r["unitarity"]) for r in rows)
    ok = worst < 1e-9 and all(r["permutation"] for r in rows)
    return SuiteResult("homomorphism", ok, {"max_residual": worst, "tolerance": 1e-9}, rows)


@suite("plancherel")
def plancherel_suite(cfg: SuiteConfig) -> SuiteResult:
    rng = cfg.rng()
    g = cfg.group
    rows = []
    for i in range(cfg.opt("count", 100)):
        f = GridFunction.random(g, rng)
        fhat = forward(f)
        rep = plancherel(f, fhat)
        back = inverse(fhat, g.level)
        rows.append({"index": i, "plancherel": rep.gap, "inversion": float(np.max(np.abs(back.values - f.values)))})
    worst = max(max(r["plancherel"], r["inversion"]) for r in rows)
    return SuiteResult("plancherel", worst < 1e-9, {"max_residual": worst, "functions": len(rows)}, rows)


@suite("counting")
def counting_suite(cfg: SuiteConfig) -> SuiteResult:
    rows = []
    ok = True
    for n in range(cfg.group.level + 1):
        rep = counting_report(cfg.group, n)
        ok &= rep["passed"]
        for k, got, want in rep["balls"]:
            rows.append({"n": n, "kind": "ball", "k": k, "sum_d2": got, "expected": want})
        for k, got, want in rep["spheres"]:
            rows.append({"n": n, "kind": "sphere", "k": k, "sum_d2": got, "expected": want})
    return SuiteResult("counting", ok, {"irreps": len(dual(cfg.group, cfg.group.level))}, rows)


def _tensor_pairs(g: GroupDescriptor, rng: np.random.Generator, samples: int):
    low = [pi for pi in dual(g, 1).irreps]
    pairs = list(itertools.product(low, low))
    if g.level >= 2:
        top = dual(g, 2).irreps
        for _ in range(samples):
            pairs.append((top[rng.integers(len(top))], top[rng.integers(len(top))]))
    return pairs


@suite("tensor")
def tensor_suite(cfg: SuiteConfig) -> SuiteResult:
    g = cfg.group
    rng = cfg.rng()
    X = all_coords(g)
    rows, mismatches, worst = [], 0, 0.0
    for eta, xi in _tensor_pairs(g, rng, cfg.opt("samples", 100)):
        oracle = tensor_decompose_oracle(eta, xi)
        closed = tensor_decompose_heisenberg(eta, xi) if g.kind == "heisenberg" else oracle
        same = closed.as_dict() == oracle.as_dict()
        mismatches += not same
        chi = characters(eta, X) * characters(xi, X)
        rebuilt = sum(m * characters(tau, X) for tau, m in oracle.components)
        res = float(np.max(np.abs(chi - rebuilt)))
        worst = max(worst, res)
        rows.append({"eta": eta.id, "xi": xi.id, "closed_equals_oracle": same, "character_residual": res})
    ok = mismatches == 0 and worst < 1e-9
    summary = {"pairs": len(rows), "mismatches": mismatches, "character_residual": worst,
               "closed_form": g.kind == "heisenberg"}
    return SuiteResult("tensor", ok, summary, rows)


# ---------------------------------------------------------------------------
# operators


@suite("vt-locality")
def vt_locality_suite(cfg: SuiteConfig) -> SuiteResult:
    """Difference operators of the VT symbol vanish below the sphere of xi; symbol and integral agree."""
    g = cfg.group
    n = g.level
    rng = cfg.rng()
    irreps = dual(g, n).irreps
    rows = []
    loc_worst, route_worst = 0.0, 0.0
    for alpha in cfg.alphas((0.5, 1.0, 2.0)):
        sym = vt_symbol(g, alpha, n)
        d_worst = 0.0
        for xi in irreps:
            for eta in irreps:
                if eta.level < xi.level:
                    d_worst = max(d_worst, delta(eta, sym, xi).hs_norm)
        r_worst = 0.0
        for eta in dual_vectors(g, max(n - 1, 0)):
            if all(s.is_zero for s in eta):
                continue
            rsym = rt_delta_symbol(eta, sym)
            L = max_level(eta)
            for xi in irreps:
                if xi.level > L:
                    r_worst = max(r_worst, float(np.linalg.norm(rsym[xi])))
        f = GridFunction.random(g, rng)
        route = float(np.max(np.abs(apply_multiplier(sym, f).values - vt_apply_direct(g, alpha, f).values)))
        loc_worst = max(loc_worst, d_worst, r_worst)
        route_worst = max(route_worst, route)
        rows.append({"alpha": alpha, "delta": d_worst, "rt_delta": r_worst, "symbol_vs_integral": route})
    ok = loc_worst < 1e-12 and route_worst < 1e-9
    return SuiteResult("vt-locality", ok, {"max_deviation": loc_worst, "symbol_vs_integral": route_worst}, rows)


@suite("product-rule")
def product_rule_suite(cfg: SuiteConfig) -> SuiteResult:
    g = cfg.group
    rng = cfg.rng()
    irreps = dual(g, 1).irreps
    rows, worst = [], 0.0
    for trial in range(cfg.opt("trials", 3)):
        sym = _random_symbol(g, g.level, rng)
        fhat = forward(GridFunction.random(g, rng))
        for eta in irreps:
            for xi in irreps:
                r = product_rule_residual(sym, fhat, eta, xi)
                worst = max(worst, r)
                rows.append({"trial": trial, "eta": eta.id, "xi": xi.id, "residual": r})
    return SuiteResult("product-rule", worst < 1e-9, {"max_residual": worst, "pairs": len(rows)}, rows)


@suite("sub-laplacian")
def sub_laplacian_suite(cfg: SuiteConfig) -> SuiteResult:
    """Two routes to the sub-Laplacian symbol, its kernel and the invertibility of the full operator."""
    g = cfg.group
    n = g.level
    rows = []
    route, smin, kernel_ok = 0.0, np.inf, True
    for alpha in cfg.alphas((0.5, 1.0, 2.0)):
        a = sub_laplacian_symbol(g, alpha, n, method="fourier")
        b = sub_laplacian_symbol(g, alpha, n, method="integral")
        L = script_l_symbol(g, alpha, n)
        for pi in dual(g, n).irreps:
            if pi.is_trivial:
                continue
            diff = float(np.max(np.abs(a[pi] - b[pi])))
            central = not pi.params[-1].is_zero
            kd = kernel_dimension(a[pi])
            s = float(singular_values(L, pi).min())
            route, smin = max(route, diff), min(smin, s)
            if central:
                kernel_ok &= kd == 1
            rows.append({"alpha": alpha, "xi": pi.id, "routes": diff, "kernel_dim": kd, "central": central,
                         "script_l_min_sv": s})
    ok = route < 1e-9 and kernel_ok and smin > 1e-9
    summary = {"routes": route, "kernel_dim_one": kernel_ok, "script_l_min_sv": smin}
    return SuiteResult("sub-laplacian", ok, summary, rows)


# ---------------------------------------------------------------------------
# analysis


@suite("lower-bound")
def lower_bound_suite(cfg: SuiteConfig) -> SuiteResult:
    g = cfg.group
    rows, ok, cs = [], True, []
    for n in range(1, g.level + 1):
        rep = analysis.lower_bound_report(g, n)
        ok &= rep.passed
        cs.append(rep.global_c)
        for ident, x, count in rep.violations:
            rows.append({"level": n, "irrep": ident, "x": list(x), "eigen_one": count})
        for dim, stated, count in rep.stated_constant_gap:
            rows.append({"level": n, "dim": dim, "stated_constant": stated, "max_non_one": count,
                         "stated_constant_exceeds": stated > count})
    summary = {"empirical_C": min(cs), "violations": sum(1 for r in rows if "irrep" in r)}
    return SuiteResult("lower-bound", ok, summary, rows)


@suite("i-alpha")
def i_alpha_suite(cfg: SuiteConfig) -> SuiteResult:
    g = cfg.group
    n_max = cfg.opt("n_max", 3)
    rows, ok = [], True
    for alpha in cfg.alphas((0.5, 1.0, 2.0)):
        s = analysis.i_alpha_scan(g, alpha, n_max)
        ok &= s.passed
        rows.append({"alpha": alpha, "n_max": n_max, "ratio_min": s.ratio_min, "ratio_max": s.ratio_max,
                     "tail_observed": s.tail_observed, "tail_bound": s.tail_bound,
                     "tail_bound_2d": s.tail_bound_two, "witness_min": s.witnesses["min"],
                     "witness_max": s.witnesses["max"]})
    return SuiteResult("i-alpha", ok, {"alphas": [r["alpha"] for r in rows]}, rows)


@suite("norm-equiv")
def norm_equiv_suite(cfg: SuiteConfig) -> SuiteResult:
    g = cfg.group
    rng = cfg.rng()
    n_max = cfg.opt("n_max", 2)
    rows, ok = [], True
    for alpha in cfg.alphas((1.0,)):
        for i in range(cfg.opt("count", 3)):
            r = analysis.norm_equiv_check(GridFunction.random(g, rng), alpha, n_max)
            routes = abs(r.rhs - r.rhs_physical) / max(r.rhs, 1e-300)
            ok &= routes < 1e-9 and 0 < r.ratio < np.inf
            rows.append({"alpha": alpha, "index": i, "lhs": r.lhs, "rhs": r.rhs, "rhs_group_side": r.rhs_physical,
                         "route_gap": routes, "ratio": r.ratio, "tail_bound": r.tail_bound})
    ratios = [r["ratio"] for r in rows]
    return SuiteResult("norm-equiv", ok, {"ratio_min": min(ratios), "ratio_max": max(ratios)}, rows)


@suite("lp")
def lp_suite(cfg: SuiteConfig) -> SuiteResult:
    g = cfg.group
    rng = cfg.rng()
    count = cfg.opt("count", 100)
    funcs = [GridFunction.random(g, rng) for _ in range(count)]
    squares = [analysis.square_function(f) for f in funcs]
    l2 = max(abs(S.norm(2) - f.norm(2)) for f, S in zip(funcs, squares))
    rows, ok = [], l2 < 1e-9
    for r in (1.5, 4.0):
        for alpha in cfg.alphas((0.0, 1.0)):
            q = [analysis.weighted_norm(S, r, alpha) / analysis.weighted_norm(f, r, alpha) for f, S in zip(funcs, squares)]
            lo, hi = float(min(q)), float(max(q))
            ok &= 0 < lo <= hi < np.inf
            rows.append({"r": r, "alpha": alpha, "ratio_min": lo, "ratio_max": hi})
    return SuiteResult("lp", ok, {"l2_gap": l2, "functions": count}, rows)


@suite("cz")
def cz_suite(cfg: SuiteConfig) -> SuiteResult:
    g = cfg.group
    rng = cfg.rng()
    alpha = 0.0 if cfg.alpha is None else cfg.alpha
    rows, worst = [], 0.0
    for i in range(cfg.opt("count", 50)):
        phi = GridFunction.random(g, rng)
        phi = GridFunction(g, phi.values * (rng.random(g.order) < 0.3) * rng.exponential(3.0, g.order))
        gamma = float(rng.uniform(0.5, 4.0)) * analysis.weighted_norm(phi, 1, alpha)
        res = analysis.cz_decompose(phi, gamma, alpha)
        ex = res.exact
        worst = max(worst, ex["decomposition"], ex["overlap"], ex["support"], ex["mean_zero"], max(ex["measure_slack"], 0.0))
        rows.append({"index": i, "gamma": gamma, "pieces": len(res.pieces), **ex, **res.constants})
    summary = {"max_exact_residual": worst, "alpha": alpha,
               "l1_sum_max": max(r["l1_sum"] for r in rows), "phi0_sup_max": max(r["phi0_sup"] for r in rows)}
    return SuiteResult("cz", worst < 1e-12, summary, rows)


def _h_row(name: str, rep) -> list[dict]:
    return [{"symbol": name, "k": k, "l": l, "n": n, "measured": m, "bound": b} for k, l, n, m, b in rep.table]


@suite("h-condition")
def h_condition_suite(cfg: SuiteConfig) -> SuiteResult:
    """Tables vanish for the VT and the Littlewood-Paley symbols; random symbols give finite fits."""
    g = cfg.group
    n = g.level
    rng = cfg.rng()
    t = cfg.opt("t", 1.5)
    rows, summary, ok = [], {}, True
    signs = rng.choice([-1, 1], size=n + 1)
    named = [("vt", vt_symbol(g, 1.0 if cfg.alpha is None else cfg.alpha, n)),
             ("rademacher", analysis.rademacher_symbol(g, n, signs))]
    for name, sym in named:
        rep = analysis.condition_h_report(sym, t)
        zero = rep.max_measured < 1e-12
        ok &= zero
        summary[name] = {"max_measured": rep.max_measured, "zero": zero}
        rows += _h_row(name, rep)
    rep = analysis.condition_h_report(_random_symbol(g, n, rng), t)
    finite = bool(np.isfinite(rep.fitted_B)) and (rep.fitted_eps is None or np.isfinite(rep.fitted_eps))
    ok &= finite
    summary["random"] = {"B": rep.fitted_B, "eps": rep.fitted_eps, "finite": finite}
    rows += _h_row("random", rep)
    return SuiteResult("h-condition", ok, summary, rows)


@suite("mikhlin")
def mikhlin_suite(cfg: SuiteConfig) -> SuiteResult:
    g = cfg.group
    n = g.level
    alpha = 1.0 if cfg.alpha is None else cfg.alpha
    sym = cfg.options.get("symbol") or vt_symbol(g, alpha, n)
    rows, ok = [], True
    for v in analysis.MIKHLIN_VARIANTS:
        rep = analysis.mikhlin_report(sym, alpha, v)
        ok &= rep.passed
        rows.append({"variant": v, "beta": rep.beta, "decay": rep.decay, "constant": rep.constant,
                     "eta": rep.witness[0] if rep.witness else "", "xi": rep.witness[1] if rep.witness else ""})
    samples = analysis.multiplier_norm_samples(sym, g, 2.0, alpha, cfg.opt("samples", 5), cfg.rng())
    return SuiteResult("mikhlin", ok, {"operator_norm_samples": samples}, rows)


@suite("phase-bound")
def phase_bound_suite(cfg: SuiteConfig) -> SuiteResult:
    p = cfg.group.p
    m = cfg.opt("max_level", 6)
    scan = phase_bound_scan(p, m)
    rows = []
    ok = scan["passed"]
    for k in range(1, m + 1):
        j = jordan_check(p, k)
        ok &= j["passed"]
        rows.append({"m": k, "checked": j["checked"], "min_gap": j["min_gap"]})
    return SuiteResult("phase-bound", ok, {"checked": scan["checked"], "min_ratio": scan["min_ratio"]}, rows)


VERIFY_SUITES = ("plancherel", "homomorphism", "tensor", "vt-locality", "lower-bound", "i-alpha", "norm-equiv",
                 "lp", "cz", "h-condition", "mikhlin", "product-rule", "phase-bound")
