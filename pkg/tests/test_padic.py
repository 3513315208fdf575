import cmath
import math
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from ultraharm.padic import (
    DualScalar,
    PadicError,
    PadicInt,
    PrecisionError,
    canonical_dual,
    is_prime,
    jordan_check,
    pairing,
    phase_bound_scan,
    phase_lower_bound_check,
    root_table,
    valuation,
)

primes = st.sampled_from([2, 3, 5, 7])


def frac_class(x: DualScalar) -> Fraction:
    return Fraction(x.num, x.p**x.level)


def test_is_prime_matches_trial_division():
    naive = [n for n in range(60) if n > 1 and all(n % k for k in range(2, n))]
    assert [n for n in range(60) if is_prime(n)] == naive


def test_valuation_basics():
    assert valuation(54, 3) == 3
    assert valuation(7, 3) == 0
    assert valuation(0, 5, cap=4) == 4
    with pytest.raises(PadicError):
        valuation(0, 5)


@given(primes, st.integers(1, 6), st.data())
def test_digits_round_trip(p, prec, data):
    digits = data.draw(st.lists(st.integers(0, p - 1), min_size=prec, max_size=prec))
    x = PadicInt.from_digits(digits, p)
    assert list(x.digits) == digits
    assert PadicInt.parse(x.to_string(), p) == x


@given(primes, st.integers(1, 5), st.integers(-10**6, 10**6), st.integers(-10**6, 10**6))
def test_ring_operations_agree_with_integers(p, prec, a, b):
    q = p**prec
    x, y = PadicInt(p, a, prec), PadicInt(p, b, prec)
    assert (x + y).value == (a + b) % q
    assert (x - y).value == (a - b) % q
    assert (x * y).value == (a * b) % q
    assert (-x).value == (-a) % q


def test_norm_and_zero_class():
    assert PadicInt(3, 18, 4).norm == pytest.approx(1 / 9)
    assert PadicInt(3, 81, 4).norm == 0.0
    assert PadicInt(3, 0, 4).valuation == 4


def test_mixed_precision_is_rejected():
    with pytest.raises(PadicError):
        PadicInt(3, 1, 2) + PadicInt(3, 1, 3)
    with pytest.raises(PadicError):
        PadicInt(3, 1, 2) * PadicInt(5, 1, 2)


def test_bad_inputs():
    with pytest.raises(PadicError):
        PadicInt(4, 1, 2)
    with pytest.raises(PadicError):
        PadicInt.from_digits([3], 3)
    with pytest.raises(PadicError):
        DualScalar(3, 3, 1)
    with pytest.raises(PadicError):
        DualScalar.parse("1/6", 3)


@given(primes, st.integers(-500, 500), st.integers(0, 4))
def test_canonical_dual_is_the_fractional_part(p, num, level):
    x = canonical_dual(num, level, p)
    assert frac_class(x) == Fraction(num, p**level) % 1
    assert x.num == 0 or x.num % p != 0


@given(primes, st.integers(0, 200), st.integers(0, 3), st.integers(0, 200), st.integers(0, 3))
def test_dual_addition_is_addition_mod_one(p, a, la, b, lb):
    x, y = canonical_dual(a, la, p), canonical_dual(b, lb, p)
    assert frac_class(x + y) == (frac_class(x) + frac_class(y)) % 1
    assert frac_class(x - y) == (frac_class(x) - frac_class(y)) % 1
    assert frac_class(x.scale(7)) == (7 * frac_class(x)) % 1


def test_dual_parse_and_norm():
    x = DualScalar.parse("4/9", 3)
    assert (x.num, x.level) == (4, 2)
    assert x.norm == 9.0
    assert DualScalar.parse("9/9", 3).is_zero
    assert DualScalar.zero(3).norm == 1.0
    assert str(x) == "4/9"


def test_truncate_and_reduce_mod():
    x = DualScalar.parse("22/27", 3)  # digits 1, 1, 2 above the point
    assert frac_class(x.truncate(2)) == Fraction(21, 27)
    assert frac_class(x.reduce_mod(1)) == Fraction(22 % 9, 27)
    assert x.reduce_mod(3).is_zero
    with pytest.raises(PrecisionError):
        x.at_level(2)


def test_pairing_exact_phase():
    xi = [DualScalar.parse("1/9", 3), DualScalar.parse("2/3", 3)]
    x = [PadicInt(3, 4, 2), PadicInt(3, 5, 2)]
    root = pairing(xi, x)
    want = (Fraction(1, 9) * 4 + Fraction(2, 3) * 5) % 1
    assert complex(root) == pytest.approx(cmath.exp(2j * math.pi * float(want)))
    assert root.order == want.denominator
    with pytest.raises(PrecisionError):
        pairing(xi, [PadicInt(3, 4, 1), PadicInt(3, 5, 1)])


def test_root_table_is_read_only():
    t = root_table(5, 2)
    assert t.shape == (25,)
    assert t[5] == pytest.approx(cmath.exp(2j * math.pi / 5))
    with pytest.raises(ValueError):
        t[0] = 0


def test_phase_bound_exhaustive_small():
    scan = phase_bound_scan(3, 6)
    assert scan["checked"] == 3**6 - 1
    assert scan["passed"]
    # for each m the closest root to 1 is k = 1, and the ratio is smallest at m = 1
    want = min(2 * math.sin(math.pi / 3**m) * 3**m / 4 for m in range(1, 7))
    assert scan["min_ratio"] == pytest.approx(want)
    assert want == pytest.approx(3 * math.sqrt(3) / 4)
    for m in range(1, 7):
        assert jordan_check(3, m)["passed"]


def test_phase_bound_trivial_pairing_rejected():
    with pytest.raises(PadicError):
        phase_lower_bound_check([DualScalar.parse("1/3", 3)], [PadicInt(3, 3, 1)])
