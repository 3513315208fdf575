"""Compact Vilenkin groups realized by polynomial coordinate laws.

Four families are shipped: the abelian group Z_p^d, the Heisenberg group
H_d(Z_p), the Engel group B_4 and the five-dimensional group G_{5,2}.  All
computation happens on the finite quotient G/G_N, where G_N consists of the
elements whose coordinates are divisible by p^N.

Elements are ranked in a level-major mixed-radix order: digit k of coordinate j
carries weight p^(k*dim + j).  With this order the coset x*G_n is exactly the
residue class of rank(x) modulo p^(n*dim), so averages over G_n-cosets are
reshapes.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property, lru_cache
from typing import Iterator, Sequence

import numpy as np

from .padic import PadicError, PadicInt, require_prime, valuation

KINDS = ("abelian", "heisenberg", "engel4", "g52")


class GroupError(ValueError):
    """Raised for invalid descriptors or elements from different groups."""


@dataclass(frozen=True)
class GroupDescriptor:
    """Which group, over which prime, at which truncation level."""

    kind: str
    p: int
    d: int = 1
    level: int = 1

    def __post_init__(self):
        if self.kind not in KINDS:
            raise GroupError(f"unknown group kind {self.kind!r}; expected one of {KINDS}")
        try:
            require_prime(self.p)
        except PadicError as exc:
            raise GroupError(str(exc)) from exc
        if self.kind in ("heisenberg", "engel4", "g52") and self.p == 2:
            raise GroupError(f"{self.kind} needs an odd prime")
        if self.kind == "engel4":
            object.__setattr__(self, "d", 4)
        elif self.kind == "g52":
            object.__setattr__(self, "d", 5)
        if self.d < 1:
            raise GroupError("d must be >= 1")
        if self.level < 1:
            raise GroupError("level must be >= 1")

    @property
    def dim(self) -> int:
        if self.kind == "abelian":
            return self.d
        if self.kind == "heisenberg":
            return 2 * self.d + 1
        return self.d

    @property
    def kappa(self) -> int:
        """Dimension of the generating layer g/[g, g]."""
        return {"abelian": self.d, "heisenberg": 2 * self.d, "engel4": 2, "g52": 3}[self.kind]

    @property
    def modulus(self) -> int:
        return self.p**self.level

    @property
    def order(self) -> int:
        """|G/G_N|."""
        return self.p ** (self.dim * self.level)

    def quotient_order(self, n: int) -> int:
        return self.p ** (self.dim * n)

    def at_level(self, level: int) -> "GroupDescriptor":
        return GroupDescriptor(self.kind, self.p, self.d, level)

    @property
    def name(self) -> str:
        return {
            "abelian": f"Z_{self.p}^{self.d}",
            "heisenberg": f"H_{self.d}(Z_{self.p})",
            "engel4": f"B_4(Z_{self.p})",
            "g52": f"G_5,2(Z_{self.p})",
        }[self.kind]

    def to_json(self) -> dict:
        return {"kind": self.kind, "p": self.p, "d": self.d, "level": self.level}

    @classmethod
    def from_json(cls, doc: dict) -> "GroupDescriptor":
        return cls(doc["kind"], int(doc["p"]), int(doc.get("d", 1)), int(doc["level"]))

    @cached_property
    def inv2(self) -> int:
        return (self.modulus + 1) // 2


@dataclass(frozen=True)
class HaarWeight:
    level: int
    dim: int
    p: int

    @property
    def cell_measure(self):
        from fractions import Fraction

        return Fraction(1, self.p ** (self.dim * self.level))


@dataclass(frozen=True)
class GroupElement:
    """A point of G/G_N given by its coordinates reduced modulo p^N."""

    group: GroupDescriptor
    coords: tuple[int, ...]

    def __post_init__(self):
        if len(self.coords) != self.group.dim:
            raise GroupError(f"expected {self.group.dim} coordinates, got {len(self.coords)}")
        q = self.group.modulus
        object.__setattr__(self, "coords", tuple(int(c) % q for c in self.coords))

    @classmethod
    def from_padic(cls, group: GroupDescriptor, coords: Sequence[PadicInt]) -> "GroupElement":
        for c in coords:
            if c.p != group.p or c.precision != group.level:
                raise GroupError("coordinate precision must equal the descriptor level")
        return cls(group, tuple(c.value for c in coords))

    @classmethod
    def parse(cls, group: GroupDescriptor, digit_strings: Sequence[str]) -> "GroupElement":
        return cls.from_padic(group, [PadicInt.parse(s, group.p) for s in digit_strings])

    def padic(self) -> tuple[PadicInt, ...]:
        return tuple(PadicInt(self.group.p, c, self.group.level) for c in self.coords)

    def to_json(self) -> list[str]:
        return [c.to_string() for c in self.padic()]

    @property
    def is_identity(self) -> bool:
        return not any(self.coords)


def identity(g: GroupDescriptor) -> GroupElement:
    return GroupElement(g, (0,) * g.dim)


def _check(g: GroupDescriptor, *xs: GroupElement) -> None:
    for x in xs:
        if x.group != g:
            raise GroupError("element belongs to a different group or level")


def multiply_coords(g: GroupDescriptor, x, y):
    """Group law on coordinate arrays (last axis = coordinate), reduced mod p^N.

    Works on Python ints and on numpy integer arrays alike.
    """
    q = g.modulus
    k = g.kind
    if k == "abelian":
        return [(a + b) % q for a, b in zip(x, y)]
    if k == "heisenberg":
        d = g.d
        x1, x2, x3 = x[:d], x[d : 2 * d], x[2 * d]
        y1, y2, y3 = y[:d], y[d : 2 * d], y[2 * d]
        dot = 0
        for a, b in zip(x1, y2):
            dot = (dot + a * b) % q
        return [(a + b) % q for a, b in zip(x1, y1)] + [(a + b) % q for a, b in zip(x2, y2)] + [
            (x3 + y3 + dot) % q
        ]
    if k == "engel4":
        x1, x2, x3, x4 = x
        y1, y2, y3, y4 = y
        half = g.inv2
        z4 = (x4 + y4 + x1 * y3 % q + (x1 * x1 % q) * y2 % q * half) % q
        return [(x1 + y1) % q, (x2 + y2) % q, (x3 + y3 + x1 * y2) % q, z4]
    x1, x2, x3, x4, x5 = x
    y1, y2, y3, y4, y5 = y
    return [
        (x1 + y1) % q,
        (x2 + y2) % q,
        (x3 + y3) % q,
        (x4 + y4 + x1 * y2) % q,
        (x5 + y5 + x1 * y3) % q,
    ]


def inverse_coords(g: GroupDescriptor, x):
    q = g.modulus
    k = g.kind
    if k == "abelian":
        return [(-a) % q for a in x]
    if k == "heisenberg":
        d = g.d
        x1, x2, x3 = x[:d], x[d : 2 * d], x[2 * d]
        dot = 0
        for a, b in zip(x1, x2):
            dot = (dot + a * b) % q
        return [(-a) % q for a in x1] + [(-a) % q for a in x2] + [(-x3 + dot) % q]
    if k == "engel4":
        x1, x2, x3, x4 = x
        half = g.inv2
        # solve x * y = e coordinate by coordinate
        y1, y2 = (-x1) % q, (-x2) % q
        y3 = (-x3 - x1 * y2) % q
        y4 = (-x4 - x1 * y3 % q - (x1 * x1 % q) * y2 % q * half) % q
        return [y1, y2, y3, y4]
    x1, x2, x3, x4, x5 = x
    return [(-x1) % q, (-x2) % q, (-x3) % q, (-x4 + x1 * x2) % q, (-x5 + x1 * x3) % q]


def multiply(g: GroupDescriptor, x: GroupElement, y: GroupElement) -> GroupElement:
    _check(g, x, y)
    return GroupElement(g, tuple(int(c) for c in multiply_coords(g, x.coords, y.coords)))


def inverse(g: GroupDescriptor, x: GroupElement) -> GroupElement:
    _check(g, x)
    return GroupElement(g, tuple(int(c) for c in inverse_coords(g, x.coords)))


def coord_level(g: GroupDescriptor, c: int) -> int:
    """Valuation of a coordinate capped at N (so 0 mod p^N has level N)."""
    return valuation(int(c) % g.modulus, g.p, cap=g.level)


def group_norm(g: GroupDescriptor, x: GroupElement) -> float:
    """max_j |x_j|_p, with the identity mapped to 0."""
    _check(g, x)
    if x.is_identity:
        return 0.0
    v = min(coord_level(g, c) for c in x.coords)
    return float(g.p) ** (-v)


def vilenkin_norm(g: GroupDescriptor, x: GroupElement) -> float:
    """|x|_G = ||x||_p^dim."""
    return group_norm(g, x) ** g.dim


def sub_norm(g: GroupDescriptor, x: GroupElement, kappa: int | None = None) -> float:
    """Norm of the first ``kappa`` coordinates (the generating layer by default)."""
    _check(g, x)
    kappa = g.kappa if kappa is None else kappa
    if not 1 <= kappa <= g.dim:
        raise GroupError(f"kappa must lie in [1, {g.dim}]")
    head = x.coords[:kappa]
    if not any(head):
        return 0.0
    return float(g.p) ** (-min(coord_level(g, c) for c in head))


# ---------------------------------------------------------------------------
# quotient indexing


def rank(g: GroupDescriptor, x: GroupElement) -> int:
    _check(g, x)
    p, dim = g.p, g.dim
    r = 0
    for j, c in enumerate(x.coords):
        for k in range(g.level):
            r += (c // p**k % p) * p ** (k * dim + j)
    return r


def unrank(g: GroupDescriptor, r: int) -> GroupElement:
    if not 0 <= r < g.order:
        raise GroupError(f"rank {r} outside [0, {g.order})")
    p, dim = g.p, g.dim
    coords = [0] * dim
    for k in range(g.level):
        for j in range(dim):
            coords[j] += (r % p) * p**k
            r //= p
    return GroupElement(g, tuple(coords))


def enumerate_quotient(g: GroupDescriptor) -> Iterator[GroupElement]:
    for r in range(g.order):
        yield unrank(g, r)


@lru_cache(maxsize=32)
def all_coords(g: GroupDescriptor) -> np.ndarray:
    """Coordinates of every element of G/G_N in rank order, shape (|G/G_N|, dim)."""
    p, dim, N = g.p, g.dim, g.level
    r = np.arange(g.order, dtype=np.int64)
    out = np.zeros((g.order, dim), dtype=np.int64)
    for k in range(N):
        for j in range(dim):
            out[:, j] += (r % p) * p**k
            r //= p
    out.setflags(write=False)
    return out


def ranks_of(g: GroupDescriptor, coords: np.ndarray) -> np.ndarray:
    """Vectorized rank for an integer array of shape (..., dim)."""
    p, dim, N = g.p, g.dim, g.level
    c = np.asarray(coords, dtype=np.int64) % g.modulus
    r = np.zeros(c.shape[:-1], dtype=np.int64)
    for j in range(dim):
        cj = c[..., j]
        for k in range(N):
            r += (cj % p) * p ** (k * dim + j)
            cj = cj // p
    return r


def multiply_arrays(g: GroupDescriptor, x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Vectorized group law on arrays of shape (..., dim); broadcasting applies."""
    x = np.asarray(x, dtype=np.int64)
    y = np.asarray(y, dtype=np.int64)
    xs = [x[..., j] for j in range(g.dim)]
    ys = [y[..., j] for j in range(g.dim)]
    return np.stack(np.broadcast_arrays(*multiply_coords(g, xs, ys)), axis=-1)


def inverse_arrays(g: GroupDescriptor, x: np.ndarray) -> np.ndarray:
    x = np.asarray(x, dtype=np.int64)
    return np.stack(np.broadcast_arrays(*inverse_coords(g, [x[..., j] for j in range(g.dim)])), axis=-1)


def level_of_coords(g: GroupDescriptor, coords: np.ndarray, kappa: int | None = None) -> np.ndarray:
    """Largest n <= N with all (first kappa) coordinates divisible by p^n."""
    c = np.asarray(coords, dtype=np.int64) % g.modulus
    if kappa is not None:
        c = c[..., :kappa]
    out = np.full(c.shape[:-1], g.level, dtype=np.int64)
    for n in range(g.level - 1, -1, -1):
        divisible = np.all(c % g.p ** (n + 1) == 0, axis=-1)
        out = np.where(divisible, out, n)
    return out


def shell_index(g: GroupDescriptor) -> np.ndarray:
    """For every rank, the k with x in G_k minus G_{k+1} (N for the identity cell)."""
    return level_of_coords(g, all_coords(g))


def coset_index(g: GroupDescriptor, n: int) -> np.ndarray:
    """Index of the G_n-coset of each rank (values in [0, |G/G_n|))."""
    return np.arange(g.order, dtype=np.int64) % g.quotient_order(n)


def haar(g: GroupDescriptor) -> HaarWeight:
    return HaarWeight(g.level, g.dim, g.p)


def heisenberg(p: int, d: int = 1, level: int = 1) -> GroupDescriptor:
    return GroupDescriptor("heisenberg", p, d, level)


def engel(p: int, level: int = 1) -> GroupDescriptor:
    return GroupDescriptor("engel4", p, 4, level)


def g52(p: int, level: int = 1) -> GroupDescriptor:
    return GroupDescriptor("g52", p, 5, level)


def abelian(p: int, d: int = 1, level: int = 1) -> GroupDescriptor:
    return GroupDescriptor("abelian", p, d, level)
