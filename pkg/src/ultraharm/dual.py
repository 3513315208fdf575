"""The unitary dual: parametrized irreducible representations and their calculus.

Every shipped irrep is monomial in its standard basis.  For the nonabelian
families the basis is indexed by h in (Z/p^m)^b and the column h' of pi(x) has
a single nonzero entry, in row h = h' - x_1, equal to exp(2 pi i phi(x, h)):

* Heisenberg H_d:  phi = xi_1.x_1 + xi_2.x_2 + xi_3 (x_3 + x_2.h)
* Engel B_4:       phi = xi_1 x_1 + xi_2 x_2 + xi_3 (x_3 + h x_2)
                         + xi_4 (x_4 + h x_3 + h^2 x_2 / 2)
* G_{5,2}:         phi = xi.x + (xi_4 x_2 + xi_5 x_3) h

These come from the induced action (pi(x) f)(u) = e(...) f(u + x_1), so the
phase is read at the row index.  Homomorphism, unitarity and Schur
orthogonality are checked in the test suite.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import cached_property, lru_cache
from typing import Iterable, Sequence

import numpy as np

from .group import GroupDescriptor, GroupElement, GroupError, all_coords
from .padic import DualScalar, PadicError, canonical_dual, root_table


class DualError(ValueError):
    """Raised for invalid irreps, unsupported groups or non-integral decompositions."""


def family(g: GroupDescriptor) -> GroupDescriptor:
    """The level-free identity of a group (descriptor normalized to level 1)."""
    return g.at_level(1)


@dataclass(frozen=True)
class Irrep:
    """A parametrized irreducible unitary representation.

    ``params`` are the canonical dual parameters (one DualScalar per
    coordinate), ``m`` is the level of the basis index set and ``level`` the
    smallest n with pi trivial on G_n.
    """

    group: GroupDescriptor
    params: tuple[DualScalar, ...]
    m: int

    @property
    def level(self) -> int:
        return max([self.m] + [s.level for s in self.params])

    @property
    def basis_rank(self) -> int:
        """Number of Z/p^m factors of the basis index set."""
        if self.group.kind == "abelian" or self.m == 0:
            return 0
        return self.group.d if self.group.kind == "heisenberg" else 1

    @property
    def dim(self) -> int:
        return self.group.p ** (self.m * self.basis_rank)

    @property
    def dual_norm(self) -> float:
        return float(self.group.p) ** self.level

    @property
    def is_trivial(self) -> bool:
        return self.level == 0

    @cached_property
    def id(self) -> str:
        return f"{self.group.kind}:{self.level}:" + ",".join(str(s) for s in self.params)

    @cached_property
    def numerators(self) -> np.ndarray:
        """Parameters written over the common denominator p^level."""
        L = self.level
        return np.array([s.at_level(L) for s in self.params], dtype=np.int64)

    def __repr__(self) -> str:
        return f"Irrep({self.id}, dim={self.dim})"

    def __hash__(self) -> int:
        return hash((self.group, self.id))

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Irrep) and other.group == self.group and other.id == self.id

    def sort_key(self):
        return (self.level, self.dim, tuple(int(a) for a in self.numerators_at(self.level)))

    def numerators_at(self, L: int) -> tuple[int, ...]:
        return tuple(s.at_level(L) for s in self.params)


# ---------------------------------------------------------------------------
# sparse evaluation


KIND_CODES = {"abelian": 0, "heisenberg": 1, "engel4": 2, "g52": 3}


def _basis_vectors(irrep: Irrep) -> np.ndarray:
    """Index vectors h for every basis position, shape (dim, basis_rank)."""
    b, q = irrep.basis_rank, irrep.group.p**irrep.m
    c = np.arange(irrep.dim, dtype=np.int64)
    out = np.zeros((irrep.dim, b), dtype=np.int64)
    for i in range(b):
        out[:, i] = c % q
        c //= q
    return out


def _basis_flat(irrep: Irrep, vecs: np.ndarray) -> np.ndarray:
    q = irrep.group.p**irrep.m
    out = np.zeros(vecs.shape[:-1], dtype=np.int64)
    for i in range(vecs.shape[-1] - 1, -1, -1):
        out = out * q + vecs[..., i]
    return out


def sparse(irrep: Irrep, X: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Monomial structure of pi(x) for a batch of coordinates.

    Returns ``(rows, phases)`` of shape (M, dim): column h' of pi(x_i) has its
    nonzero in row ``rows[i, h']`` with value exp(2 pi i phases[i, h'] / p^level).
    """
    g = irrep.group
    X = np.atleast_2d(np.asarray(X, dtype=np.int64))
    if X.shape[-1] != g.dim:
        raise GroupError(f"expected coordinates of length {g.dim}")
    p, L, m = g.p, irrep.level, irrep.m
    qL, qm = p**L, p**m
    a = irrep.numerators
    x = X % qL if L > 0 else np.zeros_like(X)
    M = X.shape[0]
    if g.kind == "abelian" or m == 0:
        phase = (x @ a) % qL if L > 0 else np.zeros(M, dtype=np.int64)
        return np.zeros((M, 1), dtype=np.int64), phase.reshape(M, 1)
    hp = _basis_vectors(irrep)  # (D, b)
    if g.kind == "heisenberg":
        d = g.d
        x1, x2, x3 = x[:, :d], x[:, d : 2 * d], x[:, 2 * d]
        h = (hp[None, :, :] - x1[:, None, :]) % qm  # (M, D, d)
        rows = _basis_flat(irrep, h)
        base = (x[:, : 2 * d] @ a[: 2 * d] + a[2 * d] * x3) % qL
        twist = np.einsum("mi,mdi->md", x2, h) % qL
        phase = (base[:, None] + a[2 * d] * twist) % qL
        return rows, phase
    h = (hp[None, :, 0] - x[:, 0:1]) % qm  # (M, D)
    rows = h
    if g.kind == "engel4":
        x1, x2, x3, x4 = (x[:, j : j + 1] for j in range(4))
        inv2 = (qL + 1) // 2
        t3 = (x3 + h * x2) % qL
        t4 = (x4 + h * x3 + (h * h % qL) * x2 % qL * inv2) % qL
        phase = (a[0] * x1 + a[1] * x2 + a[2] * t3 + a[3] * t4) % qL
        return rows, phase
    # g52
    base = (x @ a) % qL
    twist = (a[3] * x[:, 1:2] + a[4] * x[:, 2:3]) % qL
    phase = (base[:, None] + twist * h) % qL
    return rows, phase


def values(irrep: Irrep, phases: np.ndarray) -> np.ndarray:
    return root_table(irrep.group.p, irrep.level)[phases]


def _coords(irrep: Irrep, x) -> np.ndarray:
    if isinstance(x, GroupElement):
        if x.group.kind != irrep.group.kind or x.group.p != irrep.group.p or x.group.d != irrep.group.d:
            raise DualError("element and irrep belong to different groups")
        if x.group.level < irrep.level:
            raise PadicError(
                f"element precision {x.group.level} is below the irrep level {irrep.level}"
            )
        return np.array([x.coords], dtype=np.int64)
    return np.atleast_2d(np.asarray(x, dtype=np.int64))


def matrices(irrep: Irrep, X) -> np.ndarray:
    """Dense matrices pi(x) for a batch of coordinates, shape (M, dim, dim)."""
    X = _coords(irrep, X)
    rows, ph = sparse(irrep, X)
    M, D = rows.shape
    out = np.zeros((M, D, D), dtype=np.complex128)
    mi = np.repeat(np.arange(M), D)
    ci = np.tile(np.arange(D), M)
    out[mi, rows.ravel(), ci] = values(irrep, ph).ravel()
    return out


def matrix(irrep: Irrep, x) -> np.ndarray:
    return matrices(irrep, x)[0]


def coefficient(irrep: Irrep, x, h: int, hp: int) -> complex:
    """The matrix entry pi(x)_{h h'}."""
    if not (0 <= h < irrep.dim and 0 <= hp < irrep.dim):
        raise DualError(f"index out of range for dimension {irrep.dim}")
    rows, ph = sparse(irrep, _coords(irrep, x))
    if rows[0, hp] != h:
        return 0j
    return complex(values(irrep, ph[0, hp]))


def characters(irrep: Irrep, X) -> np.ndarray:
    """chi(x) = Tr pi(x) for a batch of coordinates."""
    X = _coords(irrep, X)
    rows, ph = sparse(irrep, X)
    diag = rows == np.arange(rows.shape[1])[None, :]
    return np.where(diag, values(irrep, ph), 0).sum(axis=1)


def character(irrep: Irrep, x) -> complex:
    return complex(characters(irrep, x)[0])


def heisenberg_character_closed_form(irrep: Irrep, X) -> np.ndarray:
    """Kirillov-Howe character |xi_3|^d e(xi.x) 1[x_1, x_2 in p^m Z_p^d]."""
    g = irrep.group
    if g.kind != "heisenberg":
        raise DualError("closed-form character is implemented for H_d only")
    X = _coords(irrep, X)
    d, qm, L = g.d, g.p**irrep.m, irrep.level
    support = np.all(X[:, : 2 * d] % qm == 0, axis=1)
    ph = (X % g.p**L) @ irrep.numerators % g.p**L if L > 0 else np.zeros(len(X), dtype=np.int64)
    return np.where(support, irrep.dim * root_table(g.p, L)[ph], 0)


# ---------------------------------------------------------------------------
# canonical parameters


def _free(p: int, n: int) -> list[DualScalar]:
    return [canonical_dual(a, n, p) for a in range(p**n)]


def _mod(p: int, n: int, m: int) -> list[DualScalar]:
    """Canonical representatives of (level <= n) modulo (level <= m)."""
    if m >= n:
        return [DualScalar.zero(p)]
    return [canonical_dual(a, n, p) for a in range(p ** (n - m))]


def _exact(p: int, m: int) -> list[DualScalar]:
    if m == 0:
        return [DualScalar.zero(p)]
    return [canonical_dual(a, m, p) for a in range(1, p**m) if a % p]


def _below(p: int, m: int) -> list[DualScalar]:
    """All classes of level < m."""
    if m == 0:
        return []
    return [canonical_dual(a, m - 1, p) for a in range(p ** (m - 1))]


def _upto(p: int, m: int) -> list[DualScalar]:
    return [canonical_dual(a, m, p) for a in range(p**m)]


def make_irrep(g: GroupDescriptor, params: Sequence[DualScalar]) -> Irrep:
    """Build the canonical irrep equivalent to the one with the given parameters."""
    g = family(g)
    params = tuple(params)
    if len(params) != g.dim:
        raise DualError(f"expected {g.dim} parameters, got {len(params)}")
    p = g.p
    for s in params:
        if s.p != p:
            raise DualError("parameter over the wrong prime")
    z = DualScalar.zero(p)
    k = g.kind
    if k == "abelian":
        return Irrep(g, params, 0)
    if k == "heisenberg":
        d = g.d
        m = params[2 * d].level
        head = tuple(s.reduce_mod(m) for s in params[: 2 * d])
        return Irrep(g, head + (params[2 * d],), m)
    if k == "engel4":
        x1, x2, x3, x4 = params
        if x3.is_zero and x4.is_zero:
            return Irrep(g, params, 0)
        if not x4.is_zero and x4.level >= x3.level:
            kk = x4.level
            for c in range(p**kk):
                if (x3 + x4.scale(c)).is_zero:
                    x2n = x2 + x3.scale(c) + x4.scale(c * c * ((p**kk + 1) // 2))
                    return Irrep(g, (x1.reduce_mod(kk), x2n, z, x4), kk)
            raise DualError("no translation kills xi_3")  # unreachable
        m = x3.level
        inv2 = (p ** max(m, x4.level, 1) + 1) // 2
        for c in range(p**m):
            x2n = x2 + x3.scale(c) + x4.scale(c * c * inv2)
            if x2n.reduce_mod(m) == x2n:
                return Irrep(g, (x1.reduce_mod(m), x2n, x3 + x4.scale(c), x4), m)
        raise DualError("no translation reaches the canonical xi_2")  # unreachable
    # g52
    x1, x2, x3, x4, x5 = params
    if x4.is_zero and x5.is_zero:
        return Irrep(g, params, 0)
    if x4.level > x5.level:
        m = x4.level
        for c in range(p**m):
            x2n = x2 + x4.scale(c)
            if x2n.reduce_mod(m) == x2n:
                return Irrep(g, (x1.reduce_mod(m), x2n, x3 + x5.scale(c), x4, x5), m)
    else:
        m = x5.level
        for c in range(p**m):
            x3n = x3 + x5.scale(c)
            if x3n.reduce_mod(m) == x3n:
                return Irrep(g, (x1.reduce_mod(m), x2 + x4.scale(c), x3n, x4, x5), m)
    raise DualError("no translation reaches the canonical representative")  # unreachable


def _enumerate(g: GroupDescriptor, n: int) -> list[Irrep]:
    p, k, z = g.p, g.kind, DualScalar.zero(g.p)
    out: list[Irrep] = []
    if k == "abelian":
        for ps in itertools.product(_free(p, n), repeat=g.d):
            out.append(Irrep(g, tuple(ps), 0))
    elif k == "heisenberg":
        d = g.d
        for m in range(n + 1):
            for x3 in _exact(p, m):
                for head in itertools.product(_mod(p, n, m), repeat=2 * d):
                    out.append(Irrep(g, tuple(head) + (x3,), m))
    elif k == "engel4":
        for x1, x2 in itertools.product(_free(p, n), repeat=2):
            out.append(Irrep(g, (x1, x2, z, z), 0))
        for m in range(1, n + 1):
            for x3 in _exact(p, m):
                for x4 in _below(p, m):
                    for x1, x2 in itertools.product(_mod(p, n, m), repeat=2):
                        out.append(Irrep(g, (x1, x2, x3, x4), m))
            for x4 in _exact(p, m):
                for x1 in _mod(p, n, m):
                    for x2 in _free(p, n):
                        out.append(Irrep(g, (x1, x2, z, x4), m))
    elif k == "g52":
        for x1, x2, x3 in itertools.product(_free(p, n), repeat=3):
            out.append(Irrep(g, (x1, x2, x3, z, z), 0))
        for m in range(1, n + 1):
            for x4 in _exact(p, m):
                for x5 in _below(p, m):
                    for x1, x2 in itertools.product(_mod(p, n, m), repeat=2):
                        for x3 in _free(p, n):
                            out.append(Irrep(g, (x1, x2, x3, x4, x5), m))
            for x5 in _exact(p, m):
                for x4 in _upto(p, m):
                    for x1, x3 in itertools.product(_mod(p, n, m), repeat=2):
                        for x2 in _free(p, n):
                            out.append(Irrep(g, (x1, x2, x3, x4, x5), m))
    else:  # pragma: no cover - descriptor validation rejects this
        raise DualError(f"unsupported group kind {k!r}")
    out.sort(key=Irrep.sort_key)
    return out


@dataclass(frozen=True)
class Dual:
    """All irreps trivial on G_n (the ball of radius p^n), grouped by sphere."""

    group: GroupDescriptor
    level: int
    irreps: tuple[Irrep, ...]
    index: dict = field(compare=False, hash=False, repr=False)

    def __len__(self) -> int:
        return len(self.irreps)

    def __iter__(self):
        return iter(self.irreps)

    def __getitem__(self, key: str) -> Irrep:
        return self.irreps[self.index[key]]

    def __contains__(self, key) -> bool:
        return (key.id if isinstance(key, Irrep) else key) in self.index

    def sphere(self, n: int) -> list[Irrep]:
        return [pi for pi in self.irreps if pi.level == n]

    @property
    def dims(self) -> np.ndarray:
        return np.array([pi.dim for pi in self.irreps], dtype=np.int64)


@lru_cache(maxsize=32)
def _dual(g: GroupDescriptor, n: int) -> Dual:
    irreps = tuple(_enumerate(g, n))
    return Dual(g, n, irreps, {pi.id: i for i, pi in enumerate(irreps)})


def dual(g: GroupDescriptor, n: int | None = None) -> Dual:
    n = g.level if n is None else n
    if n < 0:
        raise DualError("level must be >= 0")
    return _dual(family(g), n)


def enumerate_irreps(g: GroupDescriptor, n: int) -> list[Irrep]:
    if n > g.level:
        raise DualError(f"dual level {n} exceeds the descriptor level {g.level}")
    return list(dual(g, n).irreps)


def sphere(g: GroupDescriptor, n: int) -> list[Irrep]:
    return dual(g, n).sphere(n)


def dual_norm_of(irrep: Irrep) -> float:
    return irrep.dual_norm


def trivial(g: GroupDescriptor) -> Irrep:
    return dual(g, 0).irreps[0]


def irrep_from_id(g: GroupDescriptor, ident: str) -> Irrep:
    try:
        kind, level, params = ident.split(":", 2)
        ps = [DualScalar.parse(t, g.p) for t in params.split(",")]
    except (ValueError, PadicError) as exc:
        raise DualError(f"bad irrep id {ident!r}") from exc
    if kind != g.kind:
        raise DualError(f"irrep id {ident!r} does not belong to {g.kind}")
    pi = make_irrep(g, ps)
    if pi.id != ident:
        raise DualError(f"{ident!r} is not canonical; canonical form is {pi.id!r}")
    return pi


def counting_report(g: GroupDescriptor, n: int) -> dict:
    """Exact dimension counting on balls and spheres of the dual."""
    D = dual(g, n)
    balls, spheres = [], []
    for k in range(n + 1):
        ball = sum(pi.dim**2 for pi in D if pi.level <= k)
        sph = sum(pi.dim**2 for pi in D if pi.level == k)
        balls.append((k, ball, g.quotient_order(k)))
        expected = g.quotient_order(k) - (g.quotient_order(k - 1) if k else 0)
        spheres.append((k, sph, expected))
    ok = all(a == b for _, a, b in balls) and all(a == b for _, a, b in spheres)
    return {"balls": balls, "spheres": spheres, "passed": ok, "irreps": len(D)}


# ---------------------------------------------------------------------------
# tensor products


@dataclass(frozen=True)
class RepDecomposition:
    components: tuple[tuple[Irrep, int], ...]

    @property
    def dim(self) -> int:
        return sum(pi.dim * k for pi, k in self.components)

    def as_dict(self) -> dict[str, int]:
        return {pi.id: k for pi, k in self.components}

    def layout(self) -> list[tuple[Irrep, int]]:
        """Blocks in canonical order: (dual norm, id, copy index)."""
        return [(pi, c) for pi, k in self.components for c in range(k)]


def _sorted_decomposition(items: dict[Irrep, int]) -> RepDecomposition:
    comps = sorted(items.items(), key=lambda t: (t[0].level, t[0].id))
    return RepDecomposition(tuple((pi, k) for pi, k in comps if k))


def _same_family(eta: Irrep, xi: Irrep) -> GroupDescriptor:
    if eta.group != xi.group:
        raise DualError("cannot tensor irreps of different groups")
    return eta.group


@lru_cache(maxsize=4)
def _character_table(gn: GroupDescriptor, n: int, max_entries: int = 20_000_000) -> np.ndarray | None:
    """Characters of every irrep of level <= n on G/G_n, or None when the table would be too large."""
    irreps = dual(gn, n).irreps
    if len(irreps) * gn.order > max_entries:
        return None
    X = all_coords(gn)
    return np.stack([characters(tau, X) for tau in irreps])


def tensor_decompose_oracle(eta: Irrep, xi: Irrep, tol: float = 1e-6) -> RepDecomposition:
    """Decompose eta (x) xi by character inner products over G/G_n."""
    g = _same_family(eta, xi)
    n = max(eta.level, xi.level)
    gn = g.at_level(max(n, 1))
    X = all_coords(gn)
    target = characters(eta, X) * characters(xi, X)
    irreps = dual(g, n).irreps
    table = _character_table(gn, n)
    if table is not None:
        ips = table.conj() @ target / len(X)
    out: dict[Irrep, int] = {}
    total = 0
    for i, tau in enumerate(irreps):
        ip = ips[i] if table is not None else np.vdot(characters(tau, X), target) / len(X)
        k = int(round(ip.real))
        if abs(ip - k) > tol:
            raise DualError(f"non-integral multiplicity {ip} for {tau.id}")
        if k:
            out[tau] = k
            total += k * tau.dim
            if total == eta.dim * xi.dim:
                break
    if total != eta.dim * xi.dim:
        raise DualError("character decomposition does not account for the full dimension")
    return _sorted_decomposition(out)


def tensor_decompose_heisenberg(eta: Irrep, xi: Irrep) -> RepDecomposition:
    """Closed-form decomposition of eta (x) xi on H_d."""
    g = _same_family(eta, xi)
    if g.kind != "heisenberg":
        raise DualError("the closed form applies to H_d only")
    p, d = g.p, g.d
    zeta = [a + b for a, b in zip(eta.params, xi.params)]
    N = max(eta.m, xi.m)
    M = zeta[2 * d].level
    if M == N:
        mult = (eta.dim * xi.dim) // (p ** (M * d))
        return _sorted_decomposition({make_irrep(g, zeta): mult})
    out: dict[Irrep, int] = {}
    shifts = _mod(p, N, M)
    for gam in itertools.product(shifts, repeat=2 * d):
        ps = [z + s for z, s in zip(zeta[: 2 * d], gam)] + [zeta[2 * d]]
        pi = make_irrep(g, ps)
        out[pi] = out.get(pi, 0) + p ** (M * d)
    return _sorted_decomposition(out)


def tensor_decompose(eta: Irrep, xi: Irrep) -> RepDecomposition:
    g = _same_family(eta, xi)
    if eta.is_trivial:
        return RepDecomposition(((xi, 1),))
    if xi.is_trivial:
        return RepDecomposition(((eta, 1),))
    if g.kind == "heisenberg":
        return tensor_decompose_heisenberg(eta, xi)
    if g.kind == "abelian":
        return RepDecomposition(((make_irrep(g, [a + b for a, b in zip(eta.params, xi.params)]), 1),))
    return tensor_decompose_oracle(eta, xi)


def tensor_sparse(eta: Irrep, xi: Irrep, X: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Monomial structure of kron(eta(x), xi(x)) as (rows, complex values)."""
    r1, p1 = sparse(eta, X)
    r2, p2 = sparse(xi, X)
    D2 = xi.dim
    rows = (r1[:, :, None] * D2 + r2[:, None, :]).reshape(len(X), -1)
    vals = (values(eta, p1)[:, :, None] * values(xi, p2)[:, None, :]).reshape(len(X), -1)
    return rows, vals


@dataclass(frozen=True)
class Intertwiner:
    """Unitary U with U* (eta (x) xi)(x) U = direct sum of the components."""

    eta: Irrep
    xi: Irrep
    decomposition: RepDecomposition
    U: np.ndarray

    def assemble(self, blocks: Sequence[np.ndarray]) -> np.ndarray:
        """U (block diagonal of ``blocks`` in layout order) U*."""
        D = self.U.shape[0]
        B = np.zeros((D, D), dtype=np.complex128)
        o = 0
        for b in blocks:
            k = b.shape[0]
            B[o : o + k, o : o + k] = b
            o += k
        return self.U @ B @ self.U.conj().T


@lru_cache(maxsize=4096)
def intertwiner(eta: Irrep, xi: Irrep) -> Intertwiner:
    """Numerically computed intertwiner built from isotypic projectors."""
    g = _same_family(eta, xi)
    dec = tensor_decompose(eta, xi)
    n = max(eta.level, xi.level, 1)
    X = all_coords(g.at_level(n))
    Mx = len(X)
    D = eta.dim * xi.dim
    rows, vals = tensor_sparse(eta, xi, X)
    cols = np.broadcast_to(np.arange(D), rows.shape)
    columns = []
    for tau, k in dec.components:
        trow, tph = sparse(tau, X)
        j = trow[:, 0]  # row of the nonzero in column 0 of tau(x)
        w = np.conj(values(tau, tph[:, 0])) * (tau.dim / Mx)
        flat = (j[:, None] * D + rows) * D + cols
        weights = (w[:, None] * vals).ravel()
        size = tau.dim * D * D
        P = (
            np.bincount(flat.ravel(), weights=weights.real, minlength=size)
            + 1j * np.bincount(flat.ravel(), weights=weights.imag, minlength=size)
        ).reshape(tau.dim, D, D)
        evals, evecs = np.linalg.eigh(P[0])
        V = evecs[:, evals > 0.5]
        if V.shape[1] != k:
            raise DualError(f"isotypic projector rank {V.shape[1]} differs from multiplicity {k}")
        for c in range(k):
            for jj in range(tau.dim):
                columns.append(P[jj] @ V[:, c])
    U = np.stack(columns, axis=1)
    # replace U by its unitary polar factor: removes accumulated round-off
    # while keeping the block structure to first order
    W, _, Vh = np.linalg.svd(U)
    return Intertwiner(eta, xi, dec, W @ Vh)


# ---------------------------------------------------------------------------
# tree export


def tree_parent(irrep: Irrep) -> Irrep | None:
    """Parent in the dual tree: the canonical irrep of P_{n-1}(xi)."""
    if irrep.is_trivial:
        return None
    n = irrep.level
    return make_irrep(irrep.group, [s.truncate(n - 1) for s in irrep.params])


def export_tree(g: GroupDescriptor, n: int, fmt: str = "json"):
    """Dual tree up to level n as a JSON-ready dict or a DOT string."""
    if n < 1:
        raise DualError("tree export needs n >= 1")
    D = dual(g, n)
    nodes = [
        {"id": pi.id, "params": [str(s) for s in pi.params], "dim": pi.dim, "norm": pi.dual_norm, "level": pi.level}
        for pi in D
    ]
    edges = []
    for pi in D:
        par = tree_parent(pi)
        if par is not None:
            edges.append({"source": par.id, "target": pi.id})
    if fmt == "json":
        return {"group": family(g).to_json() | {"level": n}, "nodes": nodes, "edges": edges}
    if fmt == "dot":
        lines = ["digraph dual {"]
        for node in nodes:
            label = "(" + ",".join(node["params"]) + f") | {node['dim']} | {node['norm']:g}"
            lines.append(f'  "{node["id"]}" [label="{label}"];')
        for e in edges:
            lines.append(f'  "{e["source"]}" -> "{e["target"]}";')
        lines.append("}")
        return "\n".join(lines) + "\n"
    raise DualError(f"unknown tree format {fmt!r}")


def all_irreps(irreps: Iterable[Irrep]) -> list[Irrep]:
    return sorted(set(irreps), key=Irrep.sort_key)
