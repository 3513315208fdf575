"""Weighted norms and the verifiers behind the multiplier theorems.

Weights are written in the ``||.||_p`` scale: w(x) = ||x||_p^alpha, so the
Haar-finite range is alpha > -dim.  On the grid G/G_N each cell carries the
exact average of the weight over the cell; for the identity cell this is the
geometric series

    |G_N|^-1 int_{G_N} ||x||^alpha dx = (1 - p^-dim) p^{-N alpha} / (1 - p^-(alpha + dim)).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import kernels
from .dual import Irrep, characters, dual, tensor_sparse
from .fourier import (
    GridFunction,
    Symbol,
    coset_average,
    forward,
    indicator_symbol,
    inverse,
)
from .group import GroupDescriptor, GroupElement, all_coords, inverse_arrays, level_of_coords, multiply_arrays, ranks_of
from .operators import delta


class AnalysisError(ValueError):
    """Invalid exponents, thresholds or inputs."""


# ---------------------------------------------------------------------------
# weights and measures


@dataclass(frozen=True)
class WeightSpec:
    """w(x) = ||x||_p^alpha (``full``) or ||(x_1..x_kappa)||_p^alpha (``sub``)."""

    alpha: float
    kind: str = "full"
    kappa: int | None = None

    def effective_dim(self, g: GroupDescriptor) -> int:
        if self.kind == "full":
            return g.dim
        if self.kind == "sub":
            return g.kappa if self.kappa is None else self.kappa
        raise AnalysisError(f"unknown weight kind {self.kind!r}")

    def validate(self, g: GroupDescriptor) -> None:
        k = self.effective_dim(g)
        if not self.alpha > -k:
            raise AnalysisError(f"alpha = {self.alpha} must exceed -{k} for a finite measure")


def cell_weights(g: GroupDescriptor, w: WeightSpec) -> np.ndarray:
    """Exact average of the weight over every cell of G/G_N (rank order)."""
    w.validate(g)
    p, N, a = g.p, g.level, w.alpha
    k = w.effective_dim(g)
    lev = level_of_coords(g, all_coords(g), None if w.kind == "full" else k)
    base = np.power(float(p), -a * lev.astype(np.float64))
    centre = (1.0 - p ** (-k)) * p ** (-N * a) / (1.0 - p ** (-(a + k)))
    return np.where(lev >= N, centre, base)


def weighted_norm(f: GridFunction, r: float, w: WeightSpec | float = 0.0) -> float:
    """(int |f|^r w dx)^(1/r) with exact cell weights."""
    if r < 1:
        raise AnalysisError(f"r must be >= 1, got {r}")
    w = WeightSpec(w) if not isinstance(w, WeightSpec) else w
    cw = cell_weights(f.group, w)
    return float(np.mean(np.abs(f.values) ** r * cw) ** (1.0 / r))


def mu_alpha(g: GroupDescriptor, mask: np.ndarray, w: WeightSpec | float) -> float:
    """mu_alpha of a union of cells given as a boolean mask over ranks."""
    w = WeightSpec(w) if not isinstance(w, WeightSpec) else w
    return float(np.sum(cell_weights(g, w)[np.asarray(mask, dtype=bool)]) / g.order)


def mu_alpha_ball_closed_form(g: GroupDescriptor, k: int, alpha: float) -> float:
    """mu_alpha(G_k) = (1 - p^-dim) p^{-k(alpha + dim)} / (1 - p^-(alpha + dim))."""
    p, d = g.p, g.dim
    return (1.0 - p ** (-d)) * p ** (-k * (alpha + d)) / (1.0 - p ** (-(alpha + d)))


@dataclass
class MuAlphaReport:
    alpha: float
    ball_ratios: list[float]  # mu(G_k) / |G_k|^(alpha/dim + 1)
    doubling: float  # max over x, k of mu(x G_k) / mu(x G_{k+1})
    shell_ratio: list[float]  # mu(G_k) / mu(G_k minus G_{k+1})

    @property
    def ball_bounds(self) -> tuple[float, float]:
        return min(self.ball_ratios), max(self.ball_ratios)


def mu_alpha_properties(g: GroupDescriptor, alpha: float) -> MuAlphaReport:
    """Measured constants of the measure mu_alpha on the grid."""
    w = WeightSpec(alpha)
    cw = cell_weights(g, w)
    M, N, p, d = g.order, g.level, g.p, g.dim
    ranks = np.arange(M)
    mu = lambda mask: float(cw[mask].sum() / M)  # noqa: E731
    balls, shells = [], []
    for k in range(N + 1):
        in_k = ranks % g.quotient_order(k) == 0
        balls.append(mu(in_k) / float(p) ** (-k * d * (alpha / d + 1)))
        if k < N:
            in_k1 = ranks % g.quotient_order(k + 1) == 0
            shells.append(mu(in_k) / mu(in_k & ~in_k1))
    doubling = 0.0
    for k in range(N):
        q0, q1 = g.quotient_order(k), g.quotient_order(k + 1)
        s0 = np.bincount(ranks % q0, weights=cw, minlength=q0)
        s1 = np.bincount(ranks % q1, weights=cw, minlength=q1)
        doubling = max(doubling, float(np.max(s0[np.arange(q1) % q0] / s1)))
    return MuAlphaReport(alpha, balls, doubling, shells)


# ---------------------------------------------------------------------------
# I_alpha and the lower bound property


def tail_bound(p: int, dim: int, alpha: float, n_max: int, factor: float = 4.0) -> float:
    """Bound on sum_{||eta|| > p^n_max} d_eta ||eta||^-(alpha+dim) ||eta(x) - I||^2.

    Uses ||eta(x) - I||_HS^2 <= factor * d_eta (factor 4 is the sharp unitary bound).
    """
    if alpha <= 0:
        raise AnalysisError("the tail bound needs alpha > 0")
    return factor * (1.0 - p ** (-dim)) * p ** (-(n_max + 1) * alpha) / (1.0 - p ** (-alpha))


def _weighted_real_characters(g: GroupDescriptor, irreps: Sequence[Irrep], X: np.ndarray,
                              weights: np.ndarray) -> np.ndarray:
    """sum_pi w_pi Re chi_pi(x) for every row x of X.

    On H_d the irreps of one level and one central order share the support
    of the closed-form character, so each such family is a single matrix product.
    """
    out = np.zeros(len(X))
    if g.kind != "heisenberg":
        for pi, w in zip(irreps, weights):
            out += w * characters(pi, X).real
        return out
    families: dict[tuple[int, int], list[int]] = {}
    for i, pi in enumerate(irreps):
        families.setdefault((pi.level, pi.m), []).append(i)
    for (L, m), idx in families.items():
        q = g.p**L
        support = np.all(X[:, : 2 * g.d] % g.p**m == 0, axis=1)
        Xs = X[support] % q
        A = np.array([irreps[i].numerators for i in idx], dtype=np.int64)
        w = np.array([weights[i] * irreps[i].dim for i in idx])
        for s in range(0, len(idx), 256):
            ph = (Xs @ A[s : s + 256].T) % q
            out[support] += np.cos(2 * np.pi * ph / q) @ w[s : s + 256]
    return out


def i_alpha_levels(g: GroupDescriptor, X: np.ndarray, alpha: float, n_max: int) -> np.ndarray:
    """Row n holds the sphere-n part of I_alpha: sum over ||eta|| = p^n of d_eta ||eta||^-(alpha+dim) ||eta(x) - I||_HS^2.

    Uses ||eta(x) - I||_HS^2 = 2 (d_eta - Re chi_eta(x)).
    """
    X = np.atleast_2d(np.asarray(X, dtype=np.int64))
    out = np.zeros((n_max + 1, len(X)))
    irreps = dual(g, n_max).irreps
    for n in range(1, n_max + 1):
        sph = [pi for pi in irreps if pi.level == n]
        w = np.array([pi.dim * pi.dual_norm ** (-(alpha + g.dim)) for pi in sph])
        const = float(np.sum(w * np.array([pi.dim for pi in sph])))
        out[n] = 2.0 * (const - _weighted_real_characters(g, sph, X, w))
    return out


def i_alpha_partial(g: GroupDescriptor, X: np.ndarray, alpha: float, n_max: int) -> np.ndarray:
    """I_alpha truncated to ||eta|| <= p^n_max, for every row x of X."""
    return i_alpha_levels(g, X, alpha, n_max).sum(axis=0)


@dataclass
class IAlphaReport:
    x: tuple[int, ...]
    alpha: float
    n_max: int
    partial_sum: float
    tail_bound: float
    tail_bound_two: float
    norm: float
    ratio_to_norm: float


def i_alpha(x: GroupElement, alpha: float, n_max: int) -> IAlphaReport:
    """Truncated I_alpha(x) with its analytic tail bound and the ratio to ||x||^alpha."""
    if x.is_identity:
        raise AnalysisError("I_alpha is compared with ||x||^alpha only for x != e")
    if alpha <= 0:
        raise AnalysisError("alpha must be > 0")
    g = x.group
    from .group import group_norm

    s = float(i_alpha_partial(g, np.array([x.coords]), alpha, n_max)[0])
    nx = group_norm(g, x)
    return IAlphaReport(
        tuple(int(c) for c in x.coords), alpha, n_max, s,
        tail_bound(g.p, g.dim, alpha, n_max), tail_bound(g.p, g.dim, alpha, n_max, 2.0),
        nx, s / nx**alpha,
    )


@dataclass
class IAlphaScan:
    alpha: float
    n_max: int
    ratio_min: float
    ratio_max: float
    tail_observed: float
    tail_bound: float
    tail_bound_two: float
    witnesses: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return 0 < self.ratio_min <= self.ratio_max < np.inf and self.tail_observed <= self.tail_bound


def i_alpha_scan(g: GroupDescriptor, alpha: float, n_max: int, n_check: int | None = None) -> IAlphaScan:
    """Ratio I_alpha(x)/||x||^alpha over every x != e of G/G_N.

    The observed tail is I at level n_check minus I at level n_max; it must
    stay below the analytic bound for the tail beyond n_max.
    """
    n_check = n_max + 1 if n_check is None else n_check
    X = all_coords(g)[1:]
    lev = level_of_coords(g, X)
    norms = np.power(float(g.p), -lev.astype(float))
    levels = i_alpha_levels(g, X, alpha, n_check)
    I1 = levels[: n_max + 1].sum(axis=0)
    I2 = levels.sum(axis=0)
    ratio = I2 / norms**alpha
    tail = float(np.max(I2 - I1))
    imin, imax = int(np.argmin(ratio)), int(np.argmax(ratio))
    return IAlphaScan(
        alpha, n_check, float(ratio.min()), float(ratio.max()), tail,
        tail_bound(g.p, g.dim, alpha, n_max), tail_bound(g.p, g.dim, alpha, n_max, 2.0),
        {"min": X[imin].tolist(), "max": X[imax].tolist()},
    )


@dataclass
class LowerBoundReport:
    group: str
    level: int
    global_c: float
    min_ratio: dict[str, float]
    violations: list[tuple[str, tuple[int, ...], int]]
    stated_constant_gap: list[tuple[int, float, int]]

    @property
    def passed(self) -> bool:
        return not self.violations


def lower_bound_report(g: GroupDescriptor, n: int, max_violations: int = 50) -> LowerBoundReport:
    """Eigenvalue scan of pi(x) for every nontrivial irrep of level <= n and x in G/G_n.

    The structural claim is: if pi(x) != I then at most one eigenvalue equals 1.
    """
    gn = g.at_level(n)
    X = all_coords(gn)
    global_c = 1.0
    min_ratio: dict[str, float] = {}
    violations: list[tuple[str, tuple[int, ...], int]] = []
    dims = set()
    for pi in dual(g, n).irreps:
        if pi.is_trivial:
            continue
        ones = kernels.eigen_one_counts(pi, X)
        active = ones < pi.dim  # pi(x) != I
        if not np.any(active):
            continue
        dims.add(pi.dim)
        r = float(np.min(pi.dim - ones[active])) / pi.dim
        min_ratio[pi.id] = r
        global_c = min(global_c, r)
        bad = np.flatnonzero(active & (ones > 1))
        for i in bad[: max(0, max_violations - len(violations))]:
            violations.append((pi.id, tuple(int(c) for c in X[i]), int(ones[i])))
        if len(bad) and len(violations) >= max_violations:
            violations.append((pi.id, (), -1))  # marker: more violations were truncated
            break
    gap = [(dm, (1.0 - g.p ** (-g.dim)) * dm, dm - 1) for dm in sorted(dims)]
    return LowerBoundReport(gn.name, n, global_c, min_ratio, violations, gap)


# ---------------------------------------------------------------------------
# norm equivalence and Sobolev norms


@dataclass
class NormEquivReport:
    alpha: float
    n_max: int
    lhs: float
    rhs: float
    rhs_physical: float
    tail_bound: float
    ratio: float


def _kron_transform(f: np.ndarray, eta: Irrep, xi: Irrep, X: np.ndarray) -> np.ndarray:
    rows, vals = tensor_sparse(eta, xi, X)
    D = eta.dim * xi.dim
    w = np.conj(vals) * f[:, None]
    idx = (np.arange(D)[None, :] * D + rows).ravel()
    out = np.bincount(idx, weights=w.real.ravel(), minlength=D * D) + 1j * np.bincount(
        idx, weights=w.imag.ravel(), minlength=D * D
    )
    return out.reshape(D, D) / len(X)


def norm_equiv_check(f: GridFunction, alpha: float, n_max: int) -> NormEquivReport:
    """||f||^2_{L^2_alpha} against sum_xi sum_eta d_xi d_eta ||eta||^-(alpha+dim) ||Delta_eta f^(xi)||^2.

    Delta_eta f^(xi) is evaluated in the Kronecker basis of eta (x) xi, which
    leaves the Hilbert-Schmidt norm unchanged.  ``rhs_physical`` is the same
    truncated sum computed on the group side as int |f|^2 I_alpha.
    """
    if alpha <= 0:
        raise AnalysisError("alpha must be > 0")
    g = f.group
    K = max(g.level, n_max)
    gK = g.at_level(K)
    XK = all_coords(gK)
    fK = f.values[np.arange(gK.order) % g.order]  # lift: constant on G_N cells
    fhat = forward(GridFunction(gK, fK))
    rhs = 0.0
    etas = [e for e in dual(g, n_max).irreps if not e.is_trivial]
    for xi in fhat.irreps:
        for eta in etas:
            diff = _kron_transform(fK, eta, xi, XK) - np.kron(np.eye(eta.dim), fhat[xi])
            rhs += xi.dim * eta.dim * eta.dual_norm ** (-(alpha + g.dim)) * float(np.sum(np.abs(diff) ** 2))
    lhs = weighted_norm(f, 2, alpha) ** 2
    phys = float(np.mean(np.abs(fK) ** 2 * i_alpha_partial(g, XK, alpha, n_max)))
    tb = float(np.mean(np.abs(f.values) ** 2)) * tail_bound(g.p, g.dim, alpha, n_max)
    return NormEquivReport(alpha, n_max, lhs, rhs, phys, tb, lhs / rhs if rhs else np.inf)


def bracket(pi: Irrep) -> float:
    """<pi> = |G/G_n| = ||pi||^dim (1 on the trivial irrep)."""
    return pi.dual_norm ** pi.group.dim


def sobolev_symbol(g: GroupDescriptor, beta: float, n: int, homogeneous: bool = False) -> Symbol:
    return Symbol.build(
        g, n, lambda pi: (0.0 if (homogeneous and pi.is_trivial) else bracket(pi) ** beta) * np.eye(pi.dim)
    )


def sobolev_norm(f: GridFunction, beta: float, r: float = 2.0, homogeneous: bool = False) -> float:
    """||F^-1[<pi>^beta f^]||_{L^r}."""
    if not r > 1:
        raise AnalysisError("r must lie in (1, inf)")
    from .fourier import apply_multiplier

    return apply_multiplier(sobolev_symbol(f.group, beta, f.level, homogeneous), f).norm(r)


# ---------------------------------------------------------------------------
# Littlewood-Paley


def spherical_parts(f: GridFunction) -> list[GridFunction]:
    """f_n = sum over ||pi|| = p^n of d_pi Tr[pi(x) f^(pi)], for n = 0..N."""
    fhat = forward(f)
    parts = []
    for n in range(f.level + 1):
        ent = {pi.id: (fhat[pi] if pi.level == n else np.zeros_like(fhat[pi])) for pi in fhat.irreps}
        parts.append(inverse(Symbol(f.group, f.level, ent), f.level))
    return parts


def square_function(f: GridFunction) -> GridFunction:
    parts = spherical_parts(f)
    return GridFunction(f.group, np.sqrt(sum(np.abs(q.values) ** 2 for q in parts)))


def martingale_differences(f: GridFunction) -> list[GridFunction]:
    """E_n f - E_{n-1} f, computed from coset averages only."""
    avgs = [coset_average(f, n) for n in range(f.level + 1)]
    return [avgs[0]] + [avgs[n] - avgs[n - 1] for n in range(1, f.level + 1)]


def rademacher_symbol(g: GroupDescriptor, n: int, signs: Sequence[int]) -> Symbol:
    """s(pi) = signs[level of pi] I."""
    if len(signs) < n + 1:
        raise AnalysisError("one sign per sphere is needed")
    return Symbol.radial(g, n, lambda k: float(signs[k]))


@dataclass
class LPReport:
    r: float
    alpha: float
    ratio_min: float
    ratio_max: float
    l2_gap: float


def lp_ratios(g: GroupDescriptor, r: float, alpha: float, count: int, rng: np.random.Generator) -> LPReport:
    ratios, gap = [], 0.0
    for _ in range(count):
        f = GridFunction.random(g, rng)
        S = square_function(f)
        gap = max(gap, abs(S.norm(2) - f.norm(2)))
        ratios.append(weighted_norm(S, r, alpha) / weighted_norm(f, r, alpha))
    return LPReport(r, alpha, float(min(ratios)), float(max(ratios)), gap)


# ---------------------------------------------------------------------------
# Calderon-Zygmund decomposition


@dataclass
class CZPiece:
    function: GridFunction
    coset: tuple[int, int]  # (representative rank, level m): the coset g G_m


@dataclass
class CZResult:
    phi0: GridFunction
    pieces: list[CZPiece]
    gamma: float
    alpha: float
    constants: dict[str, float]
    exact: dict[str, float]


def cz_decompose(phi: GridFunction, gamma: float, alpha: float = 0.0) -> CZResult:
    """Stopping-time decomposition of phi at height gamma with respect to mu_alpha.

    Maximal cosets I of the filtration whose mu_alpha-average of |phi|
    exceeds gamma become pieces phi_j = (phi - avg_I phi) 1_I (Haar average),
    and phi_0 keeps phi off the pieces and the averages on them.
    """
    if not gamma > 0:
        raise AnalysisError("gamma must be > 0")
    g = phi.group
    if not (-g.dim < alpha <= 0):
        raise AnalysisError(f"alpha must lie in (-{g.dim}, 0]")
    cw = cell_weights(g, WeightSpec(alpha))
    M = g.order
    ranks = np.arange(M)
    a = np.abs(phi.values)
    covered = np.zeros(M, dtype=bool)
    cosets: list[tuple[int, int]] = []
    for k in range(g.level + 1):
        q = g.quotient_order(k)
        lab = ranks % q
        num = np.bincount(lab, weights=a * cw, minlength=q)
        den = np.bincount(lab, weights=cw, minlength=q)
        hit = np.bincount(lab, weights=covered.astype(float), minlength=q) > 0
        sel = np.flatnonzero((num > gamma * den) & ~hit)
        for c in sel:
            cosets.append((int(c), k))
        covered |= np.isin(lab, sel)
    phi0 = phi.values.copy()
    pieces = []
    for c, k in cosets:
        mask = ranks % g.quotient_order(k) == c
        avg = phi.values[mask].mean()
        pj = np.where(mask, phi.values - avg, 0)
        phi0[mask] = avg
        pieces.append(CZPiece(GridFunction(g, pj), (c, k)))
    phi0f = GridFunction(g, phi0)
    l1 = weighted_norm(phi, 1, alpha)
    total = phi0f.values + sum((pc.function.values for pc in pieces), np.zeros(M, dtype=complex))
    masks = [ranks % g.quotient_order(k) == c for c, k in cosets]
    overlap = int(np.max(np.sum(masks, axis=0))) if masks else 0
    mu_sum = sum(float(cw[m].sum() / M) for m in masks)
    exact = {
        "decomposition": float(np.max(np.abs(total - phi.values))),
        "overlap": float(max(overlap - 1, 0)),
        "support": max((float(np.max(np.abs(pc.function.values[~m]), initial=0.0)) for pc, m in zip(pieces, masks)), default=0.0),
        "mean_zero": max((abs(pc.function.integral()) for pc in pieces), default=0.0),
        "measure_slack": mu_sum - l1 / gamma,  # (vi) with constant 1: must be <= 0
    }
    norms = weighted_norm(phi0f, 1, alpha) + sum(weighted_norm(pc.function, 1, alpha) for pc in pieces)
    piece_avg = max(
        (float(np.sum(np.abs(pc.function.values[m]) * cw[m]) / np.sum(cw[m])) / gamma for pc, m in zip(pieces, masks)),
        default=0.0,
    )
    constants = {
        "l1_sum": norms / l1 if l1 else 0.0,
        "phi0_sup": float(np.max(np.abs(phi0))) / gamma,
        "piece_average": piece_avg,
        "measure": mu_sum * gamma / l1 if l1 else 0.0,
    }
    return CZResult(phi0f, pieces, gamma, alpha, constants, exact)


# ---------------------------------------------------------------------------
# condition H(t)


@dataclass
class ConditionHReport:
    t: float
    K: int
    table: list[tuple[int, int, int, float, float]]  # (k, l, n, measured, bound with fitted B, eps)
    corollary: list[tuple[int, int, float]]  # (k, l, sup_y int_{G minus G_l} |diff|)
    fitted_B: float
    fitted_eps: float | None
    passed: bool

    @property
    def max_measured(self) -> float:
        return max((row[3] for row in self.table), default=0.0)


def condition_h_report(sym: Symbol, t: float, K: int | None = None, zero_tol: float = 1e-12) -> ConditionHReport:
    """Measure the kernel-difference integrals of condition H(t) on G/G_K."""
    if t < 1:
        raise AnalysisError("t must be >= 1")
    K = sym.level if K is None else K
    sym.require(K)
    g = sym.group.at_level(max(K, 1))
    p, dim, M = g.p, g.dim, g.order
    X = all_coords(g)
    lev = level_of_coords(g, X)
    inv_t_prime = 0.0 if t == 1 else 1.0 - 1.0 / t
    raw: list[tuple[int, int, int, float]] = []
    corollary = []
    for k in range(K + 1):
        rk = inverse(sym.restrict(K) @ indicator_symbol(g, k, K), g.level).values
        for l in range(1, g.level + 1):
            ys = np.flatnonzero(np.arange(M) % g.quotient_order(l) == 0)
            best = np.zeros(l)
            cor = 0.0
            for yi in ys:
                yinv = inverse_arrays(g, X[yi])
                diff = np.abs(rk[ranks_of(g, multiply_arrays(g, X, yinv[None, :]))] - rk)
                for n in range(l):
                    best[n] = max(best[n], float(np.sum(diff[lev == n] ** t) / M) ** (1.0 / t))
                cor = max(cor, float(np.sum(diff[lev < l]) / M))
            corollary.append((k, l, cor))
            for n in range(l):
                raw.append((k, l, n, best[n]))
    logp = dim * np.log(p)
    rows = [r for r in raw if r[3] > zero_tol]
    if not rows:
        table = [(k, l, n, m, 0.0) for k, l, n, m in raw]
        return ConditionHReport(t, K, table, corollary, 0.0, None, True)
    A = np.array([[1.0, (n - l) * logp] for _, l, n, _ in rows])
    b = np.array([np.log(m) - inv_t_prime * n * logp for _, _, n, m in rows])
    sol, *_ = np.linalg.lstsq(A, b, rcond=None)
    eps = float(sol[1])
    shape = lambda l, n: float(np.exp(((n - l) * eps + inv_t_prime * n) * logp))  # noqa: E731
    B = max(m / shape(l, n) for _, l, n, m in rows)
    table = [(k, l, n, m, B * shape(l, n)) for k, l, n, m in raw]
    return ConditionHReport(t, K, table, corollary, float(B), eps, eps > 0 and np.isfinite(B))


# ---------------------------------------------------------------------------
# Mikhlin-type hypotheses


MIKHLIN_VARIANTS = ("l2", "lr", "lr-weighted", "sub-l2", "sub-lr", "sub-lr-weighted")


def mikhlin_exponents(variant: str, dim: int, kappa: int, alpha0: float, t: float = 1.5) -> tuple[float, float]:
    """(beta, decay) of the hypothesis ||Delta^beta_eta s(xi)||_op <= C ||xi||^-decay."""
    table = {
        "l2": ((alpha0 + dim) / 2, (alpha0 + dim) / 2),
        "lr": (alpha0 + dim / 2, alpha0 + dim / 2),
        "lr-weighted": (alpha0 + dim / 2, alpha0 + dim * (1.5 - 1.0 / t)),
        "sub-l2": ((alpha0 + kappa) / 2, (alpha0 + kappa) / 2),
        "sub-lr": (alpha0 + kappa / 2, alpha0 + dim / 2),
        "sub-lr-weighted": (alpha0 + dim / 2, alpha0 + dim / 2 + kappa * (1.0 / t + 0.5)),
    }
    if variant not in table:
        raise AnalysisError(f"unknown variant {variant!r}; choose from {', '.join(MIKHLIN_VARIANTS)}")
    return table[variant]


def _horizontal(eta: Irrep) -> bool:
    g = eta.group
    return eta.m == 0 and all(s.is_zero for s in eta.params[g.kappa :])


@dataclass
class MikhlinReport:
    variant: str
    beta: float
    decay: float
    constant: float
    witness: tuple[str, str] | None
    rows: list[tuple[str, str, float]]

    @property
    def passed(self) -> bool:
        return bool(np.isfinite(self.constant))


def mikhlin_report(sym: Symbol, alpha0: float, variant: str = "l2", t: float = 1.5, n: int | None = None) -> MikhlinReport:
    """max over ||eta|| < ||xi|| of ||Delta^beta_eta s(xi)||_op ||xi||^decay."""
    g = sym.group
    n = sym.level if n is None else n
    sym.require(n)
    beta, decay = mikhlin_exponents(variant, g.dim, g.kappa, alpha0, t)
    irreps = dual(g, n).irreps
    sub = variant.startswith("sub")
    best, wit, rows = 0.0, None, []
    for xi in irreps:
        for eta in irreps:
            if eta.level >= xi.level or (sub and not _horizontal(eta)):
                continue
            val = delta(eta, sym, xi, beta).op_norm * xi.dual_norm**decay
            rows.append((eta.id, xi.id, val))
            if val > best:
                best, wit = val, (eta.id, xi.id)
    return MikhlinReport(variant, beta, decay, best, wit, rows)


def multiplier_norm_samples(sym: Symbol, g: GroupDescriptor, r: float, alpha: float, count: int, rng) -> list[float]:
    """||T_s f||_{L^r_alpha} / ||f||_{L^r_alpha} over random f: evidence, not a bound."""
    from .fourier import apply_multiplier

    out = []
    for _ in range(count):
        f = GridFunction.random(g, rng)
        out.append(weighted_norm(apply_multiplier(sym, f), r, alpha) / weighted_norm(f, r, alpha))
    return out
