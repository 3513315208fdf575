"""The group Fourier transform on G/G_N and Fourier multipliers.

Conventions (Haar measure normalized to total mass one):

    f^(pi)    = |G/G_N|^-1 sum_x f(x) pi(x)^*
    f(x)      = sum_pi d_pi Tr[pi(x) f^(pi)]
    (f*g)(x)  = |G/G_N|^-1 sum_y f(y) g(y^-1 x),   (f*g)^ = g^ f^
    T_s f     = F^-1[s(pi) f^(pi)]

Transforms run block by block over the dual; every block only touches the
single nonzero entry per column of pi(x), so the cost is |G/G_N| * sum d_pi.
"""

from __future__ import annotations

import json
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Iterable, Mapping

import numpy as np

from . import kernels
from .dual import Irrep, dual, family, irrep_from_id
from .group import GroupDescriptor, GroupElement, all_coords, inverse_arrays, multiply_arrays, ranks_of


class FourierError(ValueError):
    """Level mismatches and malformed inputs."""


class CoverageError(FourierError):
    """A symbol is missing irreps that an operation needs."""


def _default_workers() -> int:
    env = os.environ.get("ULTRAHARM_WORKERS")
    if env:
        return max(1, int(env))
    return 1 if kernels.backend() == "python" else min(4, os.cpu_count() or 1)


def _map(fn: Callable, items: list, workers: int | None):
    workers = _default_workers() if workers is None else workers
    if workers <= 1 or len(items) < 8:
        return [fn(it) for it in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


# ---------------------------------------------------------------------------
# data types


def _group_doc(g: GroupDescriptor) -> dict:
    return {"kind": g.kind, "p": g.p, "d": g.d}


def _group_from_doc(doc: Mapping, level: int) -> GroupDescriptor:
    return GroupDescriptor(str(doc["kind"]), int(doc["p"]), int(doc.get("d", 1)), level)


@dataclass
class GridFunction:
    """A function on G/G_N, stored densely in rank order."""

    group: GroupDescriptor
    values: np.ndarray

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=np.complex128).reshape(-1)
        if self.values.shape[0] != self.group.order:
            raise FourierError(
                f"expected {self.group.order} values for {self.group.name} at level {self.group.level}, "
                f"got {self.values.shape[0]}"
            )

    @property
    def level(self) -> int:
        return self.group.level

    @classmethod
    def from_callable(cls, g: GroupDescriptor, fn: Callable[[np.ndarray], np.ndarray]) -> "GridFunction":
        """Evaluate a vectorized function of the coordinate array (shape (M, dim))."""
        return cls(g, fn(all_coords(g)))

    @classmethod
    def constant(cls, g: GroupDescriptor, c: complex = 1.0) -> "GridFunction":
        return cls(g, np.full(g.order, c, dtype=np.complex128))

    @classmethod
    def random(cls, g: GroupDescriptor, rng: np.random.Generator, real: bool = False) -> "GridFunction":
        v = rng.standard_normal(g.order)
        if not real:
            v = v + 1j * rng.standard_normal(g.order)
        return cls(g, v)

    def _check(self, other: "GridFunction") -> None:
        if self.group != other.group:
            raise FourierError("grid functions live on different groups or levels")

    def __add__(self, other: "GridFunction") -> "GridFunction":
        self._check(other)
        return GridFunction(self.group, self.values + other.values)

    def __sub__(self, other: "GridFunction") -> "GridFunction":
        self._check(other)
        return GridFunction(self.group, self.values - other.values)

    def __mul__(self, other) -> "GridFunction":
        if isinstance(other, GridFunction):
            self._check(other)
            return GridFunction(self.group, self.values * other.values)
        return GridFunction(self.group, self.values * other)

    __rmul__ = __mul__

    def integral(self) -> complex:
        return complex(self.values.mean())

    def norm(self, r: float = 2.0) -> float:
        return float(np.mean(np.abs(self.values) ** r) ** (1.0 / r))

    def translate_left(self, y: GroupElement | np.ndarray) -> "GridFunction":
        """x -> f(y x)."""
        yc = np.asarray(y.coords if isinstance(y, GroupElement) else y, dtype=np.int64)
        idx = ranks_of(self.group, multiply_arrays(self.group, yc[None, :], all_coords(self.group)))
        return GridFunction(self.group, self.values[idx])

    def translate_right(self, y: GroupElement | np.ndarray) -> "GridFunction":
        """x -> f(x y)."""
        yc = np.asarray(y.coords if isinstance(y, GroupElement) else y, dtype=np.int64)
        idx = ranks_of(self.group, multiply_arrays(self.group, all_coords(self.group), yc[None, :]))
        return GridFunction(self.group, self.values[idx])

    def to_json(self) -> dict:
        return {
            "group": _group_doc(self.group),
            "level": self.level,
            "values": [[float(v.real), float(v.imag)] for v in self.values],
        }

    @classmethod
    def from_json(cls, doc: Mapping) -> "GridFunction":
        try:
            g = _group_from_doc(doc["group"], int(doc["level"]))
            vals = np.array([complex(re, im) for re, im in doc["values"]], dtype=np.complex128)
        except (KeyError, TypeError, ValueError) as exc:
            raise FourierError(f"malformed grid function document: {exc}") from exc
        return cls(g, vals)


@dataclass
class Symbol:
    """Matrix-valued function on the dual ball of radius p^level."""

    group: GroupDescriptor
    level: int
    entries: dict[str, np.ndarray] = field(default_factory=dict)

    def __post_init__(self):
        self.group = family(self.group)
        D = dual(self.group, self.level)
        for key, mat in list(self.entries.items()):
            if key not in D:
                raise FourierError(f"irrep {key!r} is not in the dual ball of level {self.level}")
            mat = np.asarray(mat, dtype=np.complex128)
            dim = D[key].dim
            if mat.shape != (dim, dim):
                raise FourierError(f"entry {key!r} has shape {mat.shape}, expected {(dim, dim)}")
            self.entries[key] = mat

    @property
    def irreps(self) -> tuple[Irrep, ...]:
        return dual(self.group, self.level).irreps

    def __getitem__(self, pi: Irrep | str) -> np.ndarray:
        key = pi.id if isinstance(pi, Irrep) else pi
        try:
            return self.entries[key]
        except KeyError:
            raise CoverageError(f"symbol has no entry for {key}") from None

    def __contains__(self, pi: Irrep | str) -> bool:
        return (pi.id if isinstance(pi, Irrep) else pi) in self.entries

    def covers(self, n: int) -> bool:
        return n <= self.level and all(pi.id in self.entries for pi in dual(self.group, n))

    def require(self, n: int) -> None:
        if n > self.level:
            raise CoverageError(f"symbol of level {self.level} cannot serve level {n}")
        missing = [pi.id for pi in dual(self.group, n) if pi.id not in self.entries]
        if missing:
            raise CoverageError(f"symbol is missing {len(missing)} irreps, e.g. {missing[0]}")

    @classmethod
    def build(cls, g: GroupDescriptor, n: int, fn: Callable[[Irrep], np.ndarray]) -> "Symbol":
        return cls(g, n, {pi.id: np.asarray(fn(pi), dtype=np.complex128) for pi in dual(g, n)})

    @classmethod
    def identity(cls, g: GroupDescriptor, n: int) -> "Symbol":
        return cls.build(g, n, lambda pi: np.eye(pi.dim))

    @classmethod
    def radial(cls, g: GroupDescriptor, n: int, phi: Callable[[int], complex]) -> "Symbol":
        """s(pi) = phi(level of pi) I."""
        return cls.build(g, n, lambda pi: phi(pi.level) * np.eye(pi.dim))

    def restrict(self, n: int) -> "Symbol":
        self.require(n)
        return Symbol(self.group, n, {pi.id: self.entries[pi.id] for pi in dual(self.group, n)})

    def map(self, fn: Callable[[Irrep, np.ndarray], np.ndarray]) -> "Symbol":
        return Symbol(self.group, self.level, {pi.id: fn(pi, self[pi]) for pi in self.irreps if pi.id in self.entries})

    def __matmul__(self, other: "Symbol") -> "Symbol":
        n = min(self.level, other.level)
        return Symbol(self.group, n, {pi.id: self[pi] @ other[pi] for pi in dual(self.group, n)})

    def __add__(self, other: "Symbol") -> "Symbol":
        n = min(self.level, other.level)
        return Symbol(self.group, n, {pi.id: self[pi] + other[pi] for pi in dual(self.group, n)})

    def __sub__(self, other: "Symbol") -> "Symbol":
        n = min(self.level, other.level)
        return Symbol(self.group, n, {pi.id: self[pi] - other[pi] for pi in dual(self.group, n)})

    def scale(self, c: complex) -> "Symbol":
        return self.map(lambda pi, m: c * m)

    def max_difference(self, other: "Symbol") -> float:
        n = min(self.level, other.level)
        return max(float(np.abs(self[pi] - other[pi]).max()) for pi in dual(self.group, n))

    def to_json(self) -> dict:
        return {
            "group": _group_doc(self.group),
            "level": self.level,
            "entries": {
                pi.id: [[[float(v.real), float(v.imag)] for v in row] for row in self.entries[pi.id]]
                for pi in self.irreps
                if pi.id in self.entries
            },
        }

    @classmethod
    def from_json(cls, doc: Mapping) -> "Symbol":
        try:
            n = int(doc["level"])
            g = _group_from_doc(doc["group"], max(n, 1))
            entries = {}
            for key, rows in doc["entries"].items():
                pi = irrep_from_id(g, key)
                entries[pi.id] = np.array([[complex(re, im) for re, im in row] for row in rows], dtype=np.complex128)
        except (KeyError, TypeError, ValueError) as exc:
            raise FourierError(f"malformed symbol document: {exc}") from exc
        return cls(g, n, entries)


def save_json(obj, path: str) -> None:
    with open(path, "w") as fh:
        json.dump(obj.to_json(), fh)


def load_grid_function(path: str) -> GridFunction:
    with open(path) as fh:
        return GridFunction.from_json(json.load(fh))


def load_symbol(path: str) -> Symbol:
    with open(path) as fh:
        return Symbol.from_json(json.load(fh))


# ---------------------------------------------------------------------------
# transforms


def forward(f: GridFunction, n: int | None = None, workers: int | None = None) -> Symbol:
    """f^(pi) for every pi in the dual ball of radius p^n (default n = f.level)."""
    n = f.level if n is None else n
    if n > f.level:
        raise FourierError(f"dual level {n} exceeds the grid level {f.level}")
    if n < 0:
        raise FourierError("dual level must be >= 0")
    g = f.group
    X = all_coords(g)
    M = len(X)
    irreps = list(dual(g, n).irreps)
    # an irrep of level L is constant on G_L-cosets, and ranks below |G/G_L|
    # are coset representatives: sum f over each coset first
    sums = {}
    for L in {pi.level for pi in irreps}:
        q = g.quotient_order(L)
        sums[L] = np.bincount(np.arange(M) % q, weights=f.values.real, minlength=q) + 1j * np.bincount(
            np.arange(M) % q, weights=f.values.imag, minlength=q
        )
    blocks = _map(
        lambda pi: kernels.forward_irrep(pi, X[: len(sums[pi.level])], sums[pi.level]) / M, irreps, workers
    )
    return Symbol(g, n, {pi.id: b for pi, b in zip(irreps, blocks)})


def inverse(sym: Symbol, N: int | None = None, workers: int | None = None) -> GridFunction:
    """sum_pi d_pi Tr[pi(x) s(pi)] on G/G_N (default N = max(symbol level, 1))."""
    N = max(sym.level, 1) if N is None else N
    if sym.level > N:
        raise FourierError(f"symbol level {sym.level} exceeds the grid level {N}")
    sym.require(sym.level)
    g = sym.group.at_level(N)
    X = all_coords(g)
    irreps = [pi for pi in sym.irreps if np.any(sym[pi])]
    # evaluate each irrep on G_L-coset representatives only, then repeat
    parts = _map(
        lambda pi: pi.dim * kernels.inverse_irrep(pi, X[: g.quotient_order(pi.level)], sym[pi]), irreps, workers
    )
    by_level: dict[int, np.ndarray] = {}
    for pi, part in zip(irreps, parts):
        if pi.level in by_level:
            by_level[pi.level] += part
        else:
            by_level[pi.level] = part.copy()
    out = np.zeros(len(X), dtype=np.complex128)
    for part in by_level.values():
        out += np.tile(part, len(X) // len(part))
    return GridFunction(g, out)


@dataclass(frozen=True)
class PlancherelReport:
    lhs: float
    rhs: float
    gap: float

    @property
    def passed(self) -> bool:
        return self.gap < 1e-9 * max(1.0, self.lhs)


def plancherel(f: GridFunction, fhat: Symbol | None = None) -> PlancherelReport:
    fhat = forward(f) if fhat is None else fhat
    lhs = float(np.mean(np.abs(f.values) ** 2))
    rhs = float(sum(pi.dim * np.sum(np.abs(fhat[pi]) ** 2) for pi in fhat.irreps))
    return PlancherelReport(lhs, rhs, abs(lhs - rhs))


def convolve(f: GridFunction, g: GridFunction, method: str = "direct") -> GridFunction:
    """(f*g)(x) = int f(y) g(y^-1 x) dy."""
    f._check(g)
    if method == "fourier":
        fh, gh = forward(f), forward(g)
        return inverse(gh @ fh, f.level)
    if method != "direct":
        raise FourierError(f"unknown convolution method {method!r}")
    G = f.group
    X = all_coords(G)
    out = np.zeros(G.order, dtype=np.complex128)
    inv = inverse_arrays(G, X)
    for i in np.flatnonzero(f.values):
        idx = ranks_of(G, multiply_arrays(G, inv[i][None, :], X))
        out += f.values[i] * g.values[idx]
    return GridFunction(G, out / G.order)


def apply_multiplier(sym: Symbol, f: GridFunction, workers: int | None = None) -> GridFunction:
    """T_s f = F^-1[s f^]."""
    sym.require(f.level)
    fh = forward(f, workers=workers)
    prod = Symbol(f.group, f.level, {pi.id: sym[pi] @ fh[pi] for pi in fh.irreps})
    return inverse(prod, f.level, workers=workers)


# ---------------------------------------------------------------------------
# normalized indicators


def normalized_indicator(g: GroupDescriptor, k: int) -> GridFunction:
    """eps_k = |G_k|^-1 1_{G_k}, the approximate identity at scale k."""
    if not 0 <= k <= g.level:
        raise FourierError(f"indicator level {k} outside [0, {g.level}]")
    ranks = np.arange(g.order)
    vals = np.where(ranks % g.quotient_order(k) == 0, float(g.quotient_order(k)), 0.0)
    return GridFunction(g, vals)


def indicator_symbol(g: GroupDescriptor, k: int, n: int) -> Symbol:
    """eps_k^(pi) = 1[pi trivial on G_k] I."""
    return Symbol.radial(g, n, lambda lev: 1.0 if lev <= k else 0.0)


def coset_average(f: GridFunction, k: int) -> GridFunction:
    """E_k f: average of f over each G_k-coset."""
    q = f.group.quotient_order(k)
    idx = np.arange(f.group.order) % q
    sums = np.bincount(idx, weights=f.values.real, minlength=q) + 1j * np.bincount(idx, weights=f.values.imag, minlength=q)
    return GridFunction(f.group, (sums / (f.group.order // q))[idx])


def character_function(g: GroupDescriptor, eta: Iterable) -> GridFunction:
    """x -> exp(2 pi i {eta . x}) for a vector of DualScalars (zero padded to dim)."""
    from .padic import max_level, root_table

    eta = list(eta)
    if len(eta) > g.dim:
        raise FourierError("too many character parameters")
    L = max_level(eta) if eta else 0
    if L > g.level:
        raise FourierError(f"character level {L} exceeds the grid level {g.level}")
    if L == 0:
        return GridFunction.constant(g)
    a = np.array([s.at_level(L) for s in eta], dtype=np.int64)
    X = all_coords(g)[:, : len(eta)] % g.p**L
    return GridFunction(g, root_table(g.p, L)[(X @ a) % g.p**L])
