"""Symbols of Vladimirov-type operators and the difference-operator calculus.

Operators shipped here:

* ``vt``: the Vladimirov-Taibleson operator with zero-order term, whose symbol
  is the radial matrix p^{n alpha} I on the sphere of radius p^n and
  c_0 = (1 - p^-dim) / (1 - p^-(alpha + dim)) on the trivial irrep.
* ``vt-raw``: the hypersingular integral alone (symbol p^{n alpha} - c_0).
* ``sub-laplacian``: the Heisenberg sub-Laplacian, integrating over the
  horizontal directions exp(t_1 X_1 + t_2 X_2) = (t_1, t_2, t_1 . t_2 / 2).
* ``dir-x3``: the Vladimirov derivative along the centre.
* ``script-l``: sub-Laplacian plus centre derivative.

Every named operator has a closed form and an integral form; the test suite
checks that they agree.
"""

from __future__ import annotations

import itertools
import json
import math
import re
from dataclasses import dataclass
from typing import Callable, Mapping, Sequence

import numpy as np

from .dual import Irrep, intertwiner, matrices
from .fourier import CoverageError, FourierError, GridFunction, Symbol, coset_average, forward, inverse
from .group import GroupDescriptor, all_coords, inverse_arrays, level_of_coords, multiply_arrays, ranks_of
from .kernels import forward_irrep
from .padic import DualScalar, max_level, root_table


class OperatorError(ValueError):
    """Unsupported group or malformed operator request."""


class PoleError(OperatorError):
    """The normalizing constant of an operator is infinite or degenerate."""


# ---------------------------------------------------------------------------
# constants


def _check_alpha(alpha: float, dim: int) -> None:
    if not math.isfinite(alpha):
        raise PoleError(f"alpha must be finite, got {alpha}")
    if abs(alpha) < 1e-14:
        raise PoleError("alpha = 0 is a pole of the normalizing constant")
    if abs(alpha + dim) < 1e-14:
        raise PoleError(f"alpha = -{dim} is a pole of the normalizing constant")


def zero_order_constant(p: int, dim: int, alpha: float) -> float:
    """c_0 = (1 - p^-dim) / (1 - p^-(alpha + dim))."""
    _check_alpha(alpha, dim)
    return (1.0 - p ** (-dim)) / (1.0 - p ** (-(alpha + dim)))


def integral_constant(p: int, dim: int, alpha: float) -> float:
    """K = (1 - p^alpha) / (1 - p^-(alpha + dim)), the prefactor of the integral."""
    _check_alpha(alpha, dim)
    return (1.0 - p**alpha) / (1.0 - p ** (-(alpha + dim)))


def abelian_eigenvalue(p: int, dim: int, alpha: float, level: int) -> float:
    """Eigenvalue of the bare hypersingular integral on Z_p^dim at a character of the given level."""
    if level == 0:
        return 0.0
    return float(p) ** (alpha * level) - zero_order_constant(p, dim, alpha)


# ---------------------------------------------------------------------------
# Vladimirov-Taibleson operator


def vt_profile(g: GroupDescriptor, alpha: float) -> Callable[[int], float]:
    c0 = zero_order_constant(g.p, g.dim, alpha)
    return lambda n: c0 if n == 0 else float(g.p) ** (alpha * n)


def vt_symbol(g: GroupDescriptor, alpha: float, n: int) -> Symbol:
    return Symbol.radial(g, n, vt_profile(g, alpha))


def vt_raw_symbol(g: GroupDescriptor, alpha: float, n: int) -> Symbol:
    c0 = zero_order_constant(g.p, g.dim, alpha)
    return Symbol.radial(g, n, lambda k: 0.0 if k == 0 else float(g.p) ** (alpha * k) - c0)


def _vt_integral_literal(g: GroupDescriptor, alpha: float, f: GridFunction) -> np.ndarray:
    """K |G/G_N|^-1 sum_{y != e} (f(x y^-1) - f(x)) ||y||^-(alpha+dim), summed point by point."""
    X = all_coords(g)
    K = integral_constant(g.p, g.dim, alpha)
    levels = level_of_coords(g, X)
    Yinv = inverse_arrays(g, X)
    out = np.zeros(g.order, dtype=np.complex128)
    for i in range(1, g.order):
        w = float(g.p) ** (levels[i] * (alpha + g.dim))
        idx = ranks_of(g, multiply_arrays(g, X, Yinv[i][None, :]))
        out += w * (f.values[idx] - f.values)
    return K * out / g.order


def _vt_integral_shells(g: GroupDescriptor, alpha: float, f: GridFunction) -> np.ndarray:
    """The same integral grouped by shells G_k minus G_{k+1}, using coset averages."""
    p, dim, N = g.p, g.dim, g.level
    K = integral_constant(p, dim, alpha)
    out = np.zeros(g.order, dtype=np.complex128)
    averages = [coset_average(f, k).values for k in range(N)] + [f.values]
    for k in range(N):
        inner = p ** (-k * dim) * averages[k] - p ** (-(k + 1) * dim) * averages[k + 1]
        inner = inner - (p ** (-k * dim) - p ** (-(k + 1) * dim)) * f.values
        out += float(p) ** (k * (alpha + dim)) * inner
    return K * out


def vt_apply_direct(
    g: GroupDescriptor, alpha: float, f: GridFunction, method: str = "auto", zero_order: bool = True
) -> GridFunction:
    """Apply the operator through its hypersingular integral rather than its symbol.

    ``method`` is ``literal`` (double sum over the grid), ``shells`` (coset
    averages per shell) or ``auto`` (literal for small grids).
    """
    if f.group != g:
        g = f.group
    if method == "auto":
        method = "literal" if g.order <= 2187 else "shells"
    if method == "literal":
        vals = _vt_integral_literal(g, alpha, f)
    elif method == "shells":
        vals = _vt_integral_shells(g, alpha, f)
    else:
        raise OperatorError(f"unknown method {method!r}")
    if zero_order:
        vals = vals + zero_order_constant(g.p, g.dim, alpha) * f.values
    return GridFunction(g, vals)


# ---------------------------------------------------------------------------
# Heisenberg operators


def _require_heisenberg(g: GroupDescriptor) -> None:
    if g.kind != "heisenberg":
        raise OperatorError(f"this operator is defined on H_d only, not on {g.name}")


def _levels_of(nums: np.ndarray, L: int, p: int) -> np.ndarray:
    """Level of each class a / p^L (0 for the zero class)."""
    a = np.asarray(nums, dtype=np.int64) % p**L
    out = np.full(a.shape, L, dtype=np.int64)
    for j in range(1, L + 1):
        out = np.where(a % p**j == 0, L - j, out)
    return out


def _lambda(p: int, kappa: int, alpha: float, levels: np.ndarray) -> np.ndarray:
    """||zeta||^alpha - c_0(kappa) with the value 0 at zeta = 0 (levels: max level per row)."""
    c0 = zero_order_constant(p, kappa, alpha)
    return np.where(levels == 0, 0.0, np.power(float(p), alpha * levels) - c0)


def _sub_block_integral(pi: Irrep, alpha: float) -> np.ndarray:
    g = pi.group
    p, d, L = g.p, g.d, pi.level
    if L == 0:
        return np.zeros((1, 1), dtype=np.complex128)
    q = p**L
    kappa = 2 * d
    K = integral_constant(p, kappa, alpha)
    T = np.array(list(itertools.product(range(q), repeat=kappa)), dtype=np.int64)
    t1, t2 = T[:, :d], T[:, d:]
    inv2 = (q + 1) // 2
    t3 = (np.sum(t1 * t2, axis=1) % q) * inv2 % q
    Y = np.concatenate([t1, t2, t3[:, None]], axis=1)
    lev = level_of_coords(g.at_level(L), T)  # valuation of (t_1, t_2), L for t = 0
    w = np.where(lev >= L, 0.0, np.power(float(p), lev * (alpha + kappa)))
    mats = matrices(pi, Y)
    acc = np.einsum("m,mij->ij", w, mats) - w.sum() * np.eye(pi.dim)
    return K * acc / q**kappa


def _sub_block_fourier(pi: Irrep, alpha: float) -> np.ndarray:
    g = pi.group
    p, d, L, m = g.p, g.d, pi.level, pi.m
    if L == 0:
        return np.zeros((1, 1), dtype=np.complex128)
    kappa = 2 * d
    q, qm = p**L, p**m
    a = np.array(pi.numerators, dtype=np.int64)
    a1, a2, a3 = a[:d], a[d : 2 * d], a[2 * d]
    # basis flat index c = sum_i h_i q_m^i
    H = np.array([[(c // qm**i) % qm for i in range(d)] for c in range(qm**d)], dtype=np.int64)
    inv2 = (q + 1) // 2
    step = p ** (L - m)  # tau = j / p^m written over p^L
    taus = H  # numerators of tau over p^m run over the same index set as h
    D = len(H)
    out = np.zeros((D, D), dtype=np.complex128)
    roots_m = root_table(p, m)
    for r in range(D):
        for c in range(D):
            h, hp = H[r], H[c]
            z1 = (a1[None, :] + taus * step) % q
            z2 = np.broadcast_to((a2 + a3 * ((h + hp) % q) % q * inv2) % q, z1.shape)
            lev = np.maximum(_levels_of(z1, L, p).max(axis=1), _levels_of(z2, L, p).max(axis=1))
            lam = _lambda(p, kappa, alpha, lev)
            ph = (-(taus @ (hp - h))) % qm
            out[r, c] = np.sum(roots_m[ph] * lam) / qm**d
    return out


def sub_laplacian_symbol(g: GroupDescriptor, alpha: float, n: int, method: str = "fourier") -> Symbol:
    """Symbol of the sub-Laplacian on H_d.

    ``integral`` applies the defining integral to the matrix coefficients at
    the identity; ``fourier`` expands the coefficient indicator in characters
    and uses the abelian eigenvalues on Z_p^{2d}.
    """
    _require_heisenberg(g)
    _check_alpha(alpha, 2 * g.d)
    block = {"integral": _sub_block_integral, "fourier": _sub_block_fourier}.get(method)
    if block is None:
        raise OperatorError(f"unknown method {method!r}")
    return Symbol.build(g, n, lambda pi: block(pi, alpha))


def dir_x3_symbol(g: GroupDescriptor, alpha: float, n: int, method: str = "closed") -> Symbol:
    """Symbol of the Vladimirov derivative along the centre x_3."""
    _require_heisenberg(g)
    _check_alpha(alpha, 1)
    p = g.p

    def closed(pi: Irrep) -> np.ndarray:
        return abelian_eigenvalue(p, 1, alpha, pi.params[-1].level) * np.eye(pi.dim)

    def integral(pi: Irrep) -> np.ndarray:
        s = pi.params[-1]
        m = s.level
        if m == 0:
            return np.zeros((pi.dim, pi.dim))
        q = p**m
        t = np.arange(1, q)
        lev = np.array([_valuation(int(v), p) for v in t])
        w = np.power(float(p), lev * (alpha + 1))
        chars = root_table(p, m)[(s.num * t) % q]
        val = integral_constant(p, 1, alpha) * np.sum((chars - 1) * w) / q
        return val * np.eye(pi.dim)

    fn = {"closed": closed, "integral": integral}.get(method)
    if fn is None:
        raise OperatorError(f"unknown method {method!r}")
    return Symbol.build(g, n, fn)


def _valuation(v: int, p: int) -> int:
    k = 0
    while v % p == 0:
        v //= p
        k += 1
    return k


def script_l_symbol(g: GroupDescriptor, alpha: float, n: int) -> Symbol:
    """Sub-Laplacian plus centre derivative."""
    return sub_laplacian_symbol(g, alpha, n) + dir_x3_symbol(g, alpha, n)


def singular_values(sym: Symbol, pi: Irrep) -> np.ndarray:
    return np.linalg.svd(sym[pi], compute_uv=False)


def kernel_dimension(mat: np.ndarray, rel_tol: float = 1e-9) -> int:
    """Number of singular values below rel_tol times the largest (all, if the matrix is zero)."""
    s = np.linalg.svd(mat, compute_uv=False)
    if s.max() == 0:
        return len(s)
    return int(np.sum(s < rel_tol * s.max()))


# ---------------------------------------------------------------------------
# radial functional calculus


@dataclass(frozen=True)
class RadialProfile:
    """phi on the dual norms p^0, p^1, ..., p^n."""

    p: int
    values: tuple[complex, ...]

    @property
    def max_level(self) -> int:
        return len(self.values) - 1

    def __call__(self, level: int) -> complex:
        if not 0 <= level < len(self.values):
            raise CoverageError(f"profile has no value at norm {self.p}^{level}")
        return self.values[level]

    @classmethod
    def from_function(cls, p: int, n: int, fn: Callable[[float], complex]) -> "RadialProfile":
        return cls(p, tuple(complex(fn(float(p) ** k)) for k in range(n + 1)))

    @classmethod
    def from_json(cls, doc: Mapping, p: int) -> "RadialProfile":
        vals: dict[int, complex] = {}
        for key, v in doc.items():
            k = _parse_norm_key(str(key), p)
            try:
                re_, im_ = (v, 0.0) if isinstance(v, (int, float)) else v
                vals[k] = complex(float(re_), float(im_))
            except (TypeError, ValueError) as exc:
                raise OperatorError(f"bad profile value for {key!r}") from exc
        if not vals:
            raise OperatorError("empty radial profile")
        top = max(vals)
        missing = [k for k in range(top + 1) if k not in vals]
        if missing:
            raise CoverageError(f"profile is missing the norm {p}^{missing[0]}")
        return cls(p, tuple(vals[k] for k in range(top + 1)))

    @classmethod
    def load(cls, path: str, p: int) -> "RadialProfile":
        with open(path) as fh:
            return cls.from_json(json.load(fh), p)

    def to_json(self) -> dict:
        return {f"{self.p}^{k}": [v.real, v.imag] for k, v in enumerate(self.values)}


def _parse_norm_key(key: str, p: int) -> int:
    m = re.fullmatch(r"\s*(\d+)\s*\^\s*(\d+)\s*", key)
    if m:
        if int(m.group(1)) != p:
            raise OperatorError(f"profile key {key!r} uses the wrong prime")
        return int(m.group(2))
    try:
        v = int(key)
    except ValueError:
        raise OperatorError(f"profile key {key!r} is not of the form p^n") from None
    k = 0
    while v > 1 and v % p == 0:
        v //= p
        k += 1
    if v != 1:
        raise OperatorError(f"profile key {key!r} is not a power of {p}")
    return k


def radial_calculus(profile: RadialProfile | Callable[[int], complex], g: GroupDescriptor, n: int) -> Symbol:
    """s(pi) = phi(||pi||) I."""
    return Symbol.radial(g, n, profile)


def functional_calculus(G: Callable[[float], complex], g: GroupDescriptor, alpha: float, n: int) -> Symbol:
    """G applied to the VT operator: s(pi) = G(vt eigenvalue) I."""
    prof = vt_profile(g, alpha)
    return Symbol.radial(g, n, lambda k: G(prof(k)))


# ---------------------------------------------------------------------------
# difference operators


@dataclass(frozen=True)
class DiffResult:
    block_matrix: np.ndarray
    hs_norm: float
    op_norm: float


def symbol_on_tensor(sym: Symbol, eta: Irrep, xi: Irrep) -> np.ndarray:
    """s(eta (x) xi), assembled from the components in the standard tensor basis."""
    tw = intertwiner(eta, xi)
    blocks = []
    for tau, _copy in tw.decomposition.layout():
        if tau not in sym:
            raise CoverageError(f"symbol has no entry for the component {tau.id}")
        blocks.append(sym[tau])
    return tw.assemble(blocks)


def _diff_matrix(sym: Symbol, eta: Irrep, xi: Irrep) -> np.ndarray:
    return symbol_on_tensor(sym, eta, xi) - np.kron(np.eye(eta.dim), sym[xi])


def delta(eta: Irrep, sym: Symbol, xi: Irrep, beta: float = 0.0) -> DiffResult:
    """Delta^beta_eta s(xi) = ||eta||^-beta (s(eta (x) xi) - s(I (x) xi))."""
    if beta < 0:
        raise OperatorError("beta must be >= 0")
    D = _diff_matrix(sym, eta, xi)
    U = intertwiner(eta, xi).U
    scale = eta.dual_norm ** (-beta)
    block = U.conj().T @ D @ U
    return DiffResult(block * scale, float(np.linalg.norm(D)) * scale, float(np.linalg.norm(D, 2)) * scale)


def product_rule_residual(sym: Symbol, fhat: Symbol, eta: Irrep, xi: Irrep) -> float:
    """HS norm of Delta(s f^) - [Delta s . f^(eta(x)xi) + s(I(x)xi) . Delta f^]."""
    prod = sym @ fhat
    lhs = _diff_matrix(prod, eta, xi)
    rhs = _diff_matrix(sym, eta, xi) @ symbol_on_tensor(fhat, eta, xi) + np.kron(np.eye(eta.dim), sym[xi]) @ _diff_matrix(
        fhat, eta, xi
    )
    return float(np.linalg.norm(lhs - rhs))


def _eta_vector(g: GroupDescriptor, eta: Sequence[DualScalar]) -> list[DualScalar]:
    eta = list(eta)
    if len(eta) > g.dim:
        raise OperatorError(f"eta has {len(eta)} components; the group has dimension {g.dim}")
    if any(not s.is_zero for s in eta[g.kappa :]):
        raise OperatorError(f"eta must vanish beyond the first {g.kappa} (abelianization) coordinates")
    return eta


def _q_function(g: GroupDescriptor, eta: Sequence[DualScalar], beta: float, N: int) -> np.ndarray:
    L = max_level(eta)
    if L > N:
        raise FourierError(f"eta has level {L}, above the grid level {N}")
    gN = g.at_level(N)
    if L == 0:
        return np.zeros(gN.order, dtype=np.complex128)
    a = np.array([s.at_level(L) for s in eta], dtype=np.int64)
    X = all_coords(gN)[:, : len(a)] % g.p**L
    chi = root_table(g.p, L)[(X @ a) % g.p**L]
    return (chi - 1.0) / float(g.p) ** (L * beta)


def rt_delta_symbol(eta: Sequence[DualScalar], sym: Symbol, beta: float = 0.0, N: int | None = None) -> Symbol:
    """The RT difference applied to every irrep of the symbol's level, via the kernel on the grid."""
    g = sym.group
    eta = _eta_vector(g, eta)
    N = max(sym.level, 1) if N is None else N
    kernel = inverse(sym, N)
    q = _q_function(g, eta, beta, N)
    return forward(GridFunction(kernel.group, kernel.values * q), sym.level)


def rt_delta(eta: Sequence[DualScalar], sym: Symbol, beta: float, xi: Irrep, N: int | None = None) -> DiffResult:
    """||eta||^-beta F[(e(eta.x) - 1) F^-1 s](xi)."""
    g = sym.group
    eta = _eta_vector(g, eta)
    N = max(sym.level, xi.level, 1) if N is None else N
    if xi.level > N:
        raise FourierError(f"xi has level {xi.level}, above the grid level {N}")
    kernel = inverse(sym, N)
    q = _q_function(g, eta, beta, N)
    X = all_coords(kernel.group)
    mat = forward_irrep(xi, X, kernel.values * q) / len(X)
    return DiffResult(mat, float(np.linalg.norm(mat)), float(np.linalg.norm(mat, 2)))


def dual_vectors(g: GroupDescriptor, n: int, kappa: int | None = None) -> list[tuple[DualScalar, ...]]:
    """All eta in the first kappa coordinates with level <= n (zero included)."""
    kappa = g.kappa if kappa is None else kappa
    from .padic import canonical_dual

    vals = [canonical_dual(a, n, g.p) for a in range(g.p**n)]
    return list(itertools.product(vals, repeat=kappa))


# ---------------------------------------------------------------------------
# lookup by name


OPERATOR_NAMES = ("vt", "vt-raw", "sub-laplacian", "dir-x3", "script-l")


def operator_symbol(name: str, g: GroupDescriptor, alpha: float, n: int) -> Symbol:
    """Symbol by CLI name; ``radial:<file>`` loads a profile."""
    if name.startswith("radial:"):
        prof = RadialProfile.load(name.split(":", 1)[1], g.p)
        return radial_calculus(prof, g, n)
    table = {
        "vt": vt_symbol,
        "vt-raw": vt_raw_symbol,
        "sub-laplacian": sub_laplacian_symbol,
        "dir-x3": dir_x3_symbol,
        "script-l": script_l_symbol,
    }
    if name not in table:
        raise OperatorError(f"unknown operator {name!r}; choose from {', '.join(OPERATOR_NAMES)} or radial:<file>")
    return table[name](g, alpha, n)
