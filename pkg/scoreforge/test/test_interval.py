import math
import pickle
import random
from fractions import Fraction

import pytest

from scoreforge.exceptions import EmptyDomainError
from scoreforge.interval import (
    EMPTY,
    WHOLE_LINE,
    Interval,
    IntervalSet,
    WholeLine,
    add,
    contains_integer_in,
    div,
    intersect,
    mul,
    sqrt,
    sub,
)


def iv(lo: object, hi: object) -> Interval:
    return Interval(Fraction(str(lo)), Fraction(str(hi)))


def test_interval_rejects_reversed_endpoints() -> None:
    with pytest.raises(ValueError):
        Interval(Fraction(2), Fraction(1))


def test_arithmetic_is_exact() -> None:
    assert add(iv(1, 2), iv(3, 4)) == iv(4, 6)
    assert sub(iv(1, 2), iv(3, 4)) == iv(-3, -1)
    assert mul(iv(-1, 2), iv(3, 4)) == iv(-4, 8)
    assert iv("0.1", "0.2") * 3 == iv("0.3", "0.6")
    assert 1 - iv("0.25", "0.5") == iv("0.5", "0.75")
    assert iv(1, 2) * -1 == iv(-2, -1)


def test_division_by_interval_containing_zero_is_whole_line() -> None:
    assert div(iv(1, 2), iv(-1, 1)) is WHOLE_LINE
    assert div(iv(1, 2), iv(0, 1)) is WHOLE_LINE
    assert div(iv(1, 2), iv(2, 4)) == IntervalSet([iv("0.25", 1)])


def test_whole_line_absorbs_and_survives_pickling() -> None:
    assert iv(1, 2) + WHOLE_LINE is WHOLE_LINE
    assert WHOLE_LINE * 3 is WHOLE_LINE
    assert WholeLine() is WHOLE_LINE
    assert pickle.loads(pickle.dumps(WHOLE_LINE)) is WHOLE_LINE


def test_square_straddling_zero() -> None:
    assert iv(-2, 1).square() == iv(0, 4)
    assert iv(-3, -2).square() == iv(4, 9)


def test_sqrt_encloses_and_is_exact_on_perfect_squares() -> None:
    assert sqrt(iv(4, 9)) == iv(2, 3)
    assert sqrt(iv("0.25", "0.25")) == iv("0.5", "0.5")
    root = sqrt(Fraction(2))
    assert root.lo < Fraction(math.sqrt(2)) < root.hi
    assert root.lo * root.lo < 2 < root.hi * root.hi
    assert root.width < Fraction(1, 10**9)


def test_sqrt_clamps_negative_part_and_rejects_negative_interval() -> None:
    assert sqrt(iv(-1, 4)) == iv(0, 2)
    with pytest.raises(EmptyDomainError):
        sqrt(iv(-2, -1))


def test_interval_set_merges_overlaps() -> None:
    merged = IntervalSet([iv(3, 4), iv(0, 1), iv(1, 2)])
    assert merged.intervals == (iv(0, 2), iv(3, 4))
    assert len(merged) == 2
    assert merged.contains(Fraction(7, 2))
    assert not merged.contains(Fraction(5, 2))
    assert not EMPTY


def test_intersect() -> None:
    a = IntervalSet([iv(0, 2), iv(5, 8)])
    b = IntervalSet([iv(1, 6)])
    assert intersect(a, b) == IntervalSet([iv(1, 2), iv(5, 6)])
    assert intersect(a, EMPTY) == EMPTY


@pytest.mark.parametrize(
    ("interval", "lo", "hi", "expected"),
    [
        (iv("71.86", "72.08"), 0, 200, 72),
        (iv("71.86", "72.08"), 0, 70, None),
        (iv("283.38", "283.44"), 0, 300, None),
        (iv(-5, "0.5"), 0, 10, 0),
    ],
)
def test_contains_integer_in(interval: Interval, lo: int, hi: int, expected: object) -> None:
    assert contains_integer_in(IntervalSet([interval]), lo, hi) == expected


def test_integers_lists_every_integer_in_range() -> None:
    candidates = IntervalSet([iv("0.5", "3.2"), iv(7, 7)])
    assert list(candidates.integers(0, 10)) == [1, 2, 3, 7]
    assert list(candidates.integers(2, 6)) == [2, 3]


def random_rational(rng: random.Random) -> Fraction:
    return Fraction(rng.randint(-200, 200), rng.randint(1, 30))


def random_interval(rng: random.Random) -> Interval:
    a, b = random_rational(rng), random_rational(rng)
    return Interval(min(a, b), max(a, b))


def points_of(interval: Interval) -> list[Fraction]:
    return [interval.lo + (interval.hi - interval.lo) * Fraction(k, 8) for k in range(9)]


def random_set(rng: random.Random) -> IntervalSet:
    return IntervalSet(random_interval(rng) for _ in range(rng.randint(0, 4)))


@pytest.mark.parametrize("seed", range(5))
def test_arithmetic_encloses_every_pointwise_result(seed: int) -> None:
    rng = random.Random(seed)
    for _ in range(100):
        a, b = random_interval(rng), random_interval(rng)
        quotient = div(a, b)
        for x in points_of(a):
            for y in points_of(b):
                assert add(a, b).contains(x + y)
                assert sub(a, b).contains(x - y)
                assert mul(a, b).contains(x * y)
                if b.contains_zero():
                    assert quotient is WHOLE_LINE
                else:
                    assert isinstance(quotient, IntervalSet)
                    assert quotient.contains(x / y)


@pytest.mark.parametrize("seed", range(5))
def test_sqrt_encloses_every_pointwise_root(seed: int) -> None:
    rng = random.Random(seed)
    for _ in range(100):
        a = random_interval(rng)
        if a.hi < 0:
            with pytest.raises(EmptyDomainError):
                sqrt(a)
            continue
        root = sqrt(a)
        assert root.lo >= 0
        for x in points_of(a):
            if x >= 0:
                assert root.lo * root.lo <= x <= root.hi * root.hi


@pytest.mark.parametrize("seed", range(5))
def test_intersect_is_commutative_associative_and_idempotent(seed: int) -> None:
    rng = random.Random(seed)
    for _ in range(100):
        a, b, c = random_set(rng), random_set(rng), random_set(rng)
        assert intersect(a, b) == intersect(b, a)
        assert intersect(intersect(a, b), c) == intersect(a, intersect(b, c))
        assert intersect(a, a) == a


@pytest.mark.parametrize("seed", range(5))
def test_intersect_agrees_with_membership(seed: int) -> None:
    rng = random.Random(seed)
    for _ in range(100):
        a, b = random_set(rng), random_set(rng)
        both = intersect(a, b)
        samples = [x for piece in (*a.intervals, *b.intervals) for x in points_of(piece)]
        samples += [random_rational(rng) for _ in range(20)]
        for x in samples:
            assert both.contains(x) == (a.contains(x) and b.contains(x))
