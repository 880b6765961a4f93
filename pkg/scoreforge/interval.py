"""Closed-interval arithmetic over exact rationals.

Interval endpoints are :class:`fractions.Fraction`, so addition, subtraction, multiplication and
division are exact. Square roots are the only operation computed in floating point; their endpoints
are widened outward by a relative slack of 2**-40 before being converted back to rationals, so the
result always encloses the true root.

Division by an interval that contains zero yields :data:`WHOLE_LINE`, an absorbing value meaning
"no information": callers clip it to the bounded range of the unknown they are solving for.

Operators accept ``int`` and ``Fraction`` operands on either side, so the score formulas can be
written once and evaluated on plain rationals or on intervals.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator, Optional, Union

from typing_extensions import override

from scoreforge.exceptions import EmptyDomainError

SQRT_SLACK = Fraction(1, 2**40)

Scalar = Union[int, Fraction]


class WholeLine:
    """The unbounded interval (-inf, +inf); absorbs every arithmetic operation."""

    _instance: Optional[WholeLine] = None

    def __new__(cls) -> WholeLine:
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __add__(self, other: object) -> WholeLine:
        return self

    __radd__ = __add__
    __sub__ = __add__
    __rsub__ = __add__
    __mul__ = __add__
    __rmul__ = __add__
    __truediv__ = __add__
    __rtruediv__ = __add__

    def __neg__(self) -> WholeLine:
        return self

    def __reduce__(self) -> str:
        return "WHOLE_LINE"

    @override
    def __repr__(self) -> str:
        return "WholeLine"


WHOLE_LINE = WholeLine()


def _as_interval(value: object) -> Optional[Interval]:
    if isinstance(value, Interval):
        return value
    if isinstance(value, (int, Fraction)) and not isinstance(value, bool):
        return Interval(Fraction(value), Fraction(value))
    return None


@dataclass(frozen=True)
class Interval:
    """A closed interval [lo, hi] with rational endpoints."""

    lo: Fraction
    hi: Fraction

    def __post_init__(self) -> None:
        if not isinstance(self.lo, Fraction):
            object.__setattr__(self, "lo", Fraction(self.lo))
        if not isinstance(self.hi, Fraction):
            object.__setattr__(self, "hi", Fraction(self.hi))
        if self.lo > self.hi:
            raise ValueError(f"empty interval: lo={self.lo} > hi={self.hi}")

    @classmethod
    def point(cls, value: Scalar) -> Interval:
        return cls(Fraction(value), Fraction(value))

    @classmethod
    def around(cls, center: Scalar, radius: Scalar) -> Interval:
        """[center - radius, center + radius]"""
        if radius < 0:
            raise ValueError(f"negative radius {radius}")
        return cls(Fraction(center) - radius, Fraction(center) + radius)

    @property
    def is_point(self) -> bool:
        return self.lo == self.hi

    @property
    def width(self) -> Fraction:
        return self.hi - self.lo

    def contains(self, value: Scalar) -> bool:
        return self.lo <= value <= self.hi

    def contains_zero(self) -> bool:
        return self.lo <= 0 <= self.hi

    def overlaps(self, other: Interval) -> bool:
        return self.lo <= other.hi and other.lo <= self.hi

    def clip(self, lo: Optional[Scalar] = None, hi: Optional[Scalar] = None) -> Optional[Interval]:
        """Intersect with [lo, hi] (None meaning unbounded); None when the result is empty."""
        new_lo = self.lo if lo is None else max(self.lo, Fraction(lo))
        new_hi = self.hi if hi is None else min(self.hi, Fraction(hi))
        if new_lo > new_hi:
            return None
        return Interval(new_lo, new_hi)

    def square(self) -> Interval:
        """{x*x : x in self}, tighter than self * self when the interval straddles zero."""
        a, b = self.lo * self.lo, self.hi * self.hi
        if self.contains_zero():
            return Interval(Fraction(0), max(a, b))
        return Interval(min(a, b), max(a, b))

    def __add__(self, other: object) -> Union[Interval, WholeLine]:
        if isinstance(other, WholeLine):
            return WHOLE_LINE
        rhs = _as_interval(other)
        if rhs is None:
            return NotImplemented
        return Interval(self.lo + rhs.lo, self.hi + rhs.hi)

    __radd__ = __add__

    def __neg__(self) -> Interval:
        return Interval(-self.hi, -self.lo)

    def __sub__(self, other: object) -> Union[Interval, WholeLine]:
        if isinstance(other, WholeLine):
            return WHOLE_LINE
        rhs = _as_interval(other)
        if rhs is None:
            return NotImplemented
        return Interval(self.lo - rhs.hi, self.hi - rhs.lo)

    def __rsub__(self, other: object) -> Union[Interval, WholeLine]:
        lhs = _as_interval(other)
        if lhs is None:
            return NotImplemented
        return Interval(lhs.lo - self.hi, lhs.hi - self.lo)

    def __mul__(self, other: object) -> Union[Interval, WholeLine]:
        if isinstance(other, WholeLine):
            return WHOLE_LINE
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            if other >= 0:
                return Interval(self.lo * other, self.hi * other)
            return Interval(self.hi * other, self.lo * other)
        if not isinstance(other, Interval):
            return NotImplemented
        products = (self.lo * other.lo, self.lo * other.hi, self.hi * other.lo, self.hi * other.hi)
        return Interval(min(products), max(products))

    __rmul__ = __mul__

    def reciprocal(self) -> Union[Interval, WholeLine]:
        if self.contains_zero():
            return WHOLE_LINE
        return Interval(1 / self.hi, 1 / self.lo)

    def __truediv__(self, other: object) -> Union[Interval, WholeLine]:
        if isinstance(other, WholeLine):
            return WHOLE_LINE
        rhs = _as_interval(other)
        if rhs is None:
            return NotImplemented
        return self * rhs.reciprocal()

    def __rtruediv__(self, other: object) -> Union[Interval, WholeLine]:
        lhs = _as_interval(other)
        if lhs is None:
            return NotImplemented
        return lhs * self.reciprocal()

    @override
    def __repr__(self) -> str:
        return f"[{self.lo}, {self.hi}]"


Value = Union[Interval, WholeLine]


class IntervalSet:
    """A finite union of closed intervals, kept sorted, pairwise disjoint and non-adjacent."""

    __slots__ = ("_intervals",)

    _intervals: tuple[Interval, ...]

    def __init__(self, intervals: Iterable[Interval] = ()):
        merged: list[Interval] = []
        for interval in sorted(intervals, key=lambda i: (i.lo, i.hi)):
            if merged and interval.lo <= merged[-1].hi:
                if interval.hi > merged[-1].hi:
                    merged[-1] = Interval(merged[-1].lo, interval.hi)
            else:
                merged.append(interval)
        self._intervals = tuple(merged)

    @property
    def intervals(self) -> tuple[Interval, ...]:
        return self._intervals

    def is_empty(self) -> bool:
        return not self._intervals

    def __iter__(self) -> Iterator[Interval]:
        return iter(self._intervals)

    def __len__(self) -> int:
        return len(self._intervals)

    def __bool__(self) -> bool:
        return bool(self._intervals)

    @override
    def __eq__(self, other: object) -> bool:
        if not isinstance(other, IntervalSet):
            return NotImplemented
        return self._intervals == other._intervals

    @override
    def __hash__(self) -> int:
        return hash(self._intervals)

    def contains(self, value: Scalar) -> bool:
        return any(interval.contains(value) for interval in self._intervals)

    def integers(self, lo: int, hi: int) -> Iterator[int]:
        """Ascending integers z with lo <= z <= hi that lie in the set."""
        for interval in self._intervals:
            start = max(lo, math.ceil(interval.lo))
            stop = min(hi, math.floor(interval.hi))
            yield from range(start, stop + 1)

    @override
    def __repr__(self) -> str:
        return "{" + ", ".join(repr(i) for i in self._intervals) + "}"


EMPTY = IntervalSet()


def add(a: Interval, b: Interval) -> Interval:
    return Interval(a.lo + b.lo, a.hi + b.hi)


def sub(a: Interval, b: Interval) -> Interval:
    return Interval(a.lo - b.hi, a.hi - b.lo)


def mul(a: Interval, b: Interval) -> Interval:
    result = a * b
    assert isinstance(result, Interval)
    return result


def div(a: Interval, b: Interval) -> Union[IntervalSet, WholeLine]:
    """Exact quotient, or WHOLE_LINE when the divisor contains zero."""
    result = a / b
    if isinstance(result, WholeLine):
        return WHOLE_LINE
    return IntervalSet([result])


def _exact_root(value: Fraction) -> Optional[Fraction]:
    num_root, den_root = math.isqrt(value.numerator), math.isqrt(value.denominator)
    if num_root * num_root == value.numerator and den_root * den_root == value.denominator:
        return Fraction(num_root, den_root)
    return None


def _root_below(value: Fraction) -> Fraction:
    if value == 0:
        return Fraction(0)
    exact = _exact_root(value)
    if exact is not None:
        return exact
    return Fraction(math.sqrt(float(value))) * (1 - SQRT_SLACK)


def _root_above(value: Fraction) -> Fraction:
    exact = _exact_root(value)
    if exact is not None:
        return exact
    return Fraction(math.sqrt(float(value))) * (1 + SQRT_SLACK)


def sqrt(a: Union[Interval, Scalar]) -> Interval:
    """An interval enclosing {sqrt(x) : x in a, x >= 0}.

    Raises:
        EmptyDomainError: if the interval lies entirely below zero.
    """
    interval = _as_interval(a)
    if interval is None:
        raise TypeError(f"cannot take the square root of {a!r}")
    if interval.hi < 0:
        raise EmptyDomainError(
            message=f"square root of the negative interval {interval}",
            details={"lo": str(interval.lo), "hi": str(interval.hi)},
        )
    lo = max(interval.lo, Fraction(0))
    return Interval(_root_below(lo), _root_above(interval.hi))


def intersect(a: IntervalSet, b: IntervalSet) -> IntervalSet:
    result: list[Interval] = []
    left, right = a.intervals, b.intervals
    i = j = 0
    while i < len(left) and j < len(right):
        lo = max(left[i].lo, right[j].lo)
        hi = min(left[i].hi, right[j].hi)
        if lo <= hi:
            result.append(Interval(lo, hi))
        if left[i].hi < right[j].hi:
            i += 1
        else:
            j += 1
    return IntervalSet(result)


def contains_integer_in(a: IntervalSet, lo: int, hi: int) -> Optional[int]:
    """The smallest integer z in [lo, hi] that lies in ``a``, or None."""
    if lo > hi:
        raise ValueError(f"empty integer range [{lo}, {hi}]")
    return next(a.integers(lo, hi), None)
