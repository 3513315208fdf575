"""Exact scalar layer: truncated p-adic integers, classes in Q_p/Z_p and roots of unity.

Every phase in the package is carried as an integer numerator modulo a power of
``p`` and only becomes a complex number when a matrix is assembled.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

import numpy as np


class PadicError(ValueError):
    """Raised for invalid p-adic data (non-prime base, bad digits, mixed precision)."""


class PrecisionError(PadicError):
    """Raised when an operand does not carry enough p-adic digits."""


@lru_cache(maxsize=None)
def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    r = int(math.isqrt(n))
    for q in range(3, r + 1, 2):
        if n % q == 0:
            return False
    return True


def require_prime(p: int) -> int:
    if not isinstance(p, (int, np.integer)) or not is_prime(int(p)):
        raise PadicError(f"p must be a prime, got {p!r}")
    return int(p)


def valuation(n: int, p: int, cap: int | None = None) -> int:
    """p-adic valuation of an integer; ``cap`` is returned for zero (or when reached)."""
    if n == 0:
        if cap is None:
            raise PadicError("valuation of 0 needs a cap")
        return cap
    v = 0
    while n % p == 0:
        n //= p
        v += 1
        if cap is not None and v >= cap:
            return cap
    return v


@dataclass(frozen=True)
class PadicInt:
    """An element of Z_p known modulo p^precision."""

    p: int
    value: int
    precision: int

    def __post_init__(self):
        require_prime(self.p)
        if self.precision < 1:
            raise PadicError("precision must be >= 1")
        object.__setattr__(self, "value", int(self.value) % self.p**self.precision)

    @classmethod
    def from_digits(cls, digits: Sequence[int], p: int) -> "PadicInt":
        digits = list(digits)
        if not digits:
            raise PadicError("at least one digit is required")
        for a in digits:
            if not 0 <= a < p:
                raise PadicError(f"digit {a} outside [0, {p})")
        return cls(p, sum(a * p**k for k, a in enumerate(digits)), len(digits))

    @classmethod
    def parse(cls, text: str, p: int) -> "PadicInt":
        """Parse a digit string written least-significant digit first."""
        try:
            digits = [int(ch, 36) for ch in text.strip()]
        except ValueError as exc:
            raise PadicError(f"bad digit string {text!r}") from exc
        return cls.from_digits(digits, p)

    @property
    def digits(self) -> tuple[int, ...]:
        out, v = [], self.value
        for _ in range(self.precision):
            out.append(v % self.p)
            v //= self.p
        return tuple(out)

    def to_string(self) -> str:
        return "".join(np.base_repr(a, 36).lower() for a in self.digits)

    @property
    def valuation(self) -> int:
        """Valuation, capped at the precision for the zero class."""
        return valuation(self.value, self.p, cap=self.precision)

    @property
    def norm(self) -> float:
        """|x|_p, with values divisible by p^precision treated as 0."""
        if self.value == 0:
            return 0.0
        return float(self.p) ** (-self.valuation)

    def _check(self, other: "PadicInt") -> None:
        if not isinstance(other, PadicInt) or other.p != self.p:
            raise PadicError("operands live over different primes")
        if other.precision != self.precision:
            raise PadicError(
                f"mixed precisions {self.precision} and {other.precision} in one computation"
            )

    def __add__(self, other: "PadicInt") -> "PadicInt":
        self._check(other)
        return PadicInt(self.p, self.value + other.value, self.precision)

    def __sub__(self, other: "PadicInt") -> "PadicInt":
        self._check(other)
        return PadicInt(self.p, self.value - other.value, self.precision)

    def __mul__(self, other: "PadicInt") -> "PadicInt":
        self._check(other)
        return PadicInt(self.p, self.value * other.value, self.precision)

    def __neg__(self) -> "PadicInt":
        return PadicInt(self.p, -self.value, self.precision)


@dataclass(frozen=True, order=True)
class DualScalar:
    """The class num/p^level in Q_p/Z_p, always stored in reduced form."""

    p: int
    num: int
    level: int

    def __post_init__(self):
        require_prime(self.p)
        if self.level < 0 or self.num < 0:
            raise PadicError("num and level must be nonnegative")
        if self.num >= self.p**self.level:
            raise PadicError("num must be < p^level; use canonical_dual to reduce")
        if self.num == 0 and self.level != 0:
            raise PadicError("the zero class has level 0")
        if self.num != 0 and self.num % self.p == 0:
            raise PadicError("num must be prime to p; use canonical_dual to reduce")

    @classmethod
    def zero(cls, p: int) -> "DualScalar":
        return cls(p, 0, 0)

    @classmethod
    def parse(cls, text: str, p: int) -> "DualScalar":
        """Parse ``"num/den"`` where ``den`` is a power of p (``"0"`` is accepted)."""
        text = text.strip()
        if "/" not in text:
            num, den = int(text), 1
        else:
            a, b = text.split("/", 1)
            num, den = int(a), int(b)
        level = 0
        while den % p == 0:
            den //= p
            level += 1
        if den != 1:
            raise PadicError(f"denominator of {text!r} is not a power of {p}")
        return canonical_dual(num, level, p)

    def __str__(self) -> str:
        return f"{self.num}/{self.p ** self.level}"

    @property
    def is_zero(self) -> bool:
        return self.num == 0

    @property
    def valuation(self) -> float:
        return math.inf if self.num == 0 else -self.level

    @property
    def norm(self) -> float:
        return dual_norm(self)

    def at_level(self, level: int) -> int:
        """Numerator over p^level (requires level >= self.level)."""
        if level < self.level:
            raise PrecisionError(f"cannot write {self} over p^{level}")
        return self.num * self.p ** (level - self.level)

    def __add__(self, other: "DualScalar") -> "DualScalar":
        if other.p != self.p:
            raise PadicError("operands live over different primes")
        L = max(self.level, other.level)
        return canonical_dual(self.at_level(L) + other.at_level(L), L, self.p)

    def __neg__(self) -> "DualScalar":
        return canonical_dual(-self.num, self.level, self.p)

    def __sub__(self, other: "DualScalar") -> "DualScalar":
        return self + (-other)

    def scale(self, k: int) -> "DualScalar":
        """Multiply the class by a p-adic integer given as an ordinary integer."""
        return canonical_dual(self.num * k, self.level, self.p)

    def truncate(self, level: int) -> "DualScalar":
        """Keep the digits at levels <= ``level`` (the partial sum P_level)."""
        if self.level <= level:
            return self
        q = self.p ** (self.level - level)
        return canonical_dual(self.num - self.num % q, self.level, self.p)

    def reduce_mod(self, m: int) -> "DualScalar":
        """Canonical representative of the class modulo p^{-m}Z_p/Z_p.

        Keeps only the digits strictly above level ``m``.
        """
        if self.level <= m:
            return DualScalar.zero(self.p)
        return canonical_dual(self.num % self.p ** (self.level - m), self.level, self.p)


def canonical_dual(num: int, level: int, p: int) -> DualScalar:
    """Reduce num/p^level to its canonical representative in Q_p/Z_p."""
    p = require_prime(p)
    if level < 0:
        raise PadicError("level must be >= 0")
    num = int(num) % p**level if level > 0 else 0
    while level > 0 and num % p == 0:
        num //= p
        level -= 1
    if num == 0:
        level = 0
    return DualScalar(p, num, level)


def dual_norm(xi: DualScalar) -> float:
    """p^level for nonzero classes and 1 for the zero class."""
    return float(xi.p) ** xi.level


def max_level(xs: Sequence[DualScalar]) -> int:
    return max((x.level for x in xs), default=0)


@dataclass(frozen=True)
class RootOfUnity:
    """The root of unity exp(2 pi i num / p^order_level), held exactly."""

    p: int
    num: int
    order_level: int

    def __post_init__(self):
        object.__setattr__(self, "num", int(self.num) % self.p**self.order_level)

    @property
    def is_trivial(self) -> bool:
        return self.num == 0

    @property
    def order(self) -> int:
        """Multiplicative order p^m of the root (1 for the trivial root)."""
        return self.p ** canonical_dual(self.num, self.order_level, self.p).level

    def __mul__(self, other: "RootOfUnity") -> "RootOfUnity":
        L = max(self.order_level, other.order_level)
        a = self.num * self.p ** (L - self.order_level)
        b = other.num * other.p ** (L - other.order_level)
        return RootOfUnity(self.p, a + b, L)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, RootOfUnity) or other.p != self.p:
            return NotImplemented
        return canonical_dual(self.num, self.order_level, self.p) == canonical_dual(
            other.num, other.order_level, other.p
        )

    def __hash__(self) -> int:
        return hash(canonical_dual(self.num, self.order_level, self.p))

    def __complex__(self) -> complex:
        return cmath.exp(2j * math.pi * self.num / self.p**self.order_level)


def pairing(xi: Sequence[DualScalar], x: Sequence[PadicInt]) -> RootOfUnity:
    """The exact phase exp(2 pi i {xi . x}_p)."""
    if len(xi) != len(x):
        raise PadicError("dimension mismatch in pairing")
    if not xi:
        raise PadicError("empty pairing")
    p = xi[0].p
    m = max_level(xi)
    total = 0
    for s, t in zip(xi, x):
        if s.p != p or t.p != p:
            raise PadicError("operands live over different primes")
        if t.precision < m:
            raise PrecisionError(f"x carries {t.precision} digits but the pairing needs {m}")
        total += s.at_level(m) * (t.value % p**m)
    return RootOfUnity(p, total, m)


@lru_cache(maxsize=64)
def root_table(p: int, level: int) -> np.ndarray:
    """exp(2 pi i k / p^level) for k in [0, p^level)."""
    q = p**level
    k = np.arange(q, dtype=np.float64)
    table = np.exp(2j * np.pi * k / q)
    table.setflags(write=False)
    return table


@dataclass(frozen=True)
class PhaseBoundReport:
    lhs: float
    rhs: float
    passed: bool


def phase_lower_bound_check(xi: Sequence[DualScalar], x: Sequence[PadicInt]) -> PhaseBoundReport:
    """Check |e^{2 pi i {xi.x}} - 1| >= 4/p^m for the nontrivial pairing of order p^m."""
    root = pairing(xi, x)
    if root.is_trivial:
        raise PadicError("the pairing is trivial; the bound needs xi.x outside Z_p")
    lhs = abs(complex(root) - 1.0)
    rhs = 4.0 / root.order
    return PhaseBoundReport(lhs, rhs, lhs >= rhs)


def phase_bound_scan(p: int, max_level_: int) -> dict:
    """Exhaustive check of the abelian phase bound over every root of order <= p^max_level."""
    worst = math.inf
    checked = 0
    for m in range(1, max_level_ + 1):
        q = p**m
        for k in range(1, q):
            if k % p == 0:
                continue
            rep = phase_lower_bound_check(
                [DualScalar(p, k, m)], [PadicInt(p, 1, m)]
            )
            worst = min(worst, rep.lhs / rep.rhs)
            checked += 1
    return {"checked": checked, "min_ratio": worst, "passed": worst >= 1.0}


def jordan_check(p: int, m: int) -> dict:
    """Check |e^{2 pi i k/p^m} - 1| >= 4 min(k, p^m - k)/p^m for all 1 <= k < p^m."""
    q = p**m
    k = np.arange(1, q)
    lhs = 2.0 * np.sin(np.pi * k / q)
    rhs = 4.0 * np.minimum(k, q - k) / q
    gap = lhs - rhs
    return {"checked": int(k.size), "min_gap": float(gap.min()), "passed": bool(np.all(gap >= -1e-15))}
