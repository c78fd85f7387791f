"""Exact rational scalars plus explicit infinity markers.

Every coordinate in this package is a ``fractions.Fraction``; the two
singletons below let boxes have unbounded sides (half-space clips) without
ever touching floating point.  Rationals serialize as ``"p/q"`` in lowest
terms with a positive denominator, infinities as ``"inf"`` / ``"-inf"``.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd, lcm
from typing import Union

from .errors import PreconditionError


class _Infinity:
    """Signed infinity, totally ordered against rationals and itself."""

    __slots__ = ("_sign",)

    def __init__(self, sign: int) -> None:
        self._sign = sign

    @property
    def sign(self) -> int:
        return self._sign

    def __lt__(self, other: object) -> bool:
        if isinstance(other, _Infinity):
            return self._sign < other._sign
        if isinstance(other, (Fraction, int)):
            return self._sign < 0
        return NotImplemented

    def __le__(self, other: object) -> bool:
        if isinstance(other, _Infinity):
            return self._sign <= other._sign
        if isinstance(other, (Fraction, int)):
            return self._sign < 0
        return NotImplemented

    def __gt__(self, other: object) -> bool:
        if isinstance(other, _Infinity):
            return self._sign > other._sign
        if isinstance(other, (Fraction, int)):
            return self._sign > 0
        return NotImplemented

    def __ge__(self, other: object) -> bool:
        if isinstance(other, _Infinity):
            return self._sign >= other._sign
        if isinstance(other, (Fraction, int)):
            return self._sign > 0
        return NotImplemented

    def __eq__(self, other: object) -> bool:
        return self is other

    def __hash__(self) -> int:
        return hash(("_Infinity", self._sign))

    def __neg__(self) -> "_Infinity":
        return NEG_INF if self is POS_INF else POS_INF

    # Shifting an unbounded side by a finite amount leaves it unbounded.
    def __add__(self, other: object) -> "_Infinity":
        if isinstance(other, (Fraction, int)):
            return self
        return NotImplemented

    __radd__ = __add__

    def __sub__(self, other: object) -> "_Infinity":
        if isinstance(other, (Fraction, int)):
            return self
        return NotImplemented

    def __repr__(self) -> str:
        return "POS_INF" if self._sign > 0 else "NEG_INF"


POS_INF = _Infinity(1)
NEG_INF = _Infinity(-1)

Coord = Union[Fraction, _Infinity]


def is_finite(value: Coord) -> bool:
    return not isinstance(value, _Infinity)


def as_fraction(value: object) -> Fraction:
    """Coerce ints and Fractions; reject floats loudly (exact package)."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    raise PreconditionError(f"expected an exact rational, got {type(value).__name__}: {value!r}")


def format_fraction(value: Fraction) -> str:
    return f"{value.numerator}/{value.denominator}"


def parse_fraction(text: str) -> Fraction:
    """Parse ``"p/q"`` (or a bare integer / exact decimal string)."""
    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError) as exc:
        raise PreconditionError(f"not a rational: {text!r}") from exc


def coord_to_json(value: Coord) -> str:
    if value is POS_INF:
        return "inf"
    if value is NEG_INF:
        return "-inf"
    return format_fraction(value)  # type: ignore[arg-type]


def coord_from_json(text: str) -> Coord:
    if text == "inf":
        return POS_INF
    if text == "-inf":
        return NEG_INF
    return parse_fraction(text)


def fraction_gcd(values: "list[Fraction] | tuple[Fraction, ...]") -> Fraction:
    """Positive generator of the group generated by the given rationals.

    gcd(p1/q1, p2/q2) = gcd(p1, p2) / lcm(q1, q2); every value is an exact
    integer multiple of the result.
    """
    if not values:
        raise PreconditionError("gcd of an empty collection")
    num = 0
    den = 1
    for v in values:
        num = gcd(num, abs(v.numerator))
        den = lcm(den, v.denominator)
    if num == 0:
        raise PreconditionError("gcd of all-zero values")
    return Fraction(num, den)


def pow2(k: int) -> Fraction:
    """2**k as an exact rational, for any integer k."""
    if k >= 0:
        return Fraction(1 << k)
    return Fraction(1, 1 << (-k))


def floor_log2(value: Fraction) -> int:
    """Largest k with 2**k <= value (value must be positive)."""
    if value <= 0:
        raise PreconditionError(f"floor_log2 needs a positive value, got {value}")
    k = value.numerator.bit_length() - value.denominator.bit_length()
    while pow2(k) > value:
        k -= 1
    while pow2(k + 1) <= value:
        k += 1
    return k
