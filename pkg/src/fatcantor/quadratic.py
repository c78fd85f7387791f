"""Exact arithmetic in the quadratic extension Q[sqrt(n)].

Cube diameters live here: an axis cube of side s in dimension d has
Euclidean diameter s*sqrt(d), so with the ambient dimension fixed all
diameter comparisons and gauge evaluations stay exact.  Values are
``a + b*sqrt(n)`` with rational a, b.  The ring is closed under the
arithmetic we need because sqrt(n)**2 = n, and the total order is decided
by two integer comparisons (compare a**2 against b**2 * n with the sign
cases spelled out), never by floating point.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import total_ordering
from math import isqrt

from .errors import PreconditionError
from .rationals import as_fraction


def _normalize(a: Fraction, b: Fraction, n: int) -> tuple[Fraction, Fraction, int]:
    # Perfect-square radicands collapse to rationals; rationals are tagged
    # with n = 1 so that structural equality is semantic equality.
    r = isqrt(n)
    if r * r == n:
        return a + b * r, Fraction(0), 1
    if b == 0:
        return a, Fraction(0), 1
    return a, b, n


@total_ordering
@dataclass(frozen=True)
class ExtendedRational:
    """a + b*sqrt(n), exact.  n is a positive integer.

    Instances are normalized (perfect squares folded into ``a``, pure
    rationals tagged ``n = 1``), so ``==`` coincides with equality of the
    real numbers represented.
    """

    a: Fraction
    b: Fraction
    n: int

    def __post_init__(self) -> None:
        if not isinstance(self.n, int) or self.n < 1:
            raise PreconditionError(f"radicand must be a positive integer, got {self.n!r}")
        a = as_fraction(self.a)
        b = as_fraction(self.b)
        a, b, n = _normalize(a, b, self.n)
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "n", n)

    @staticmethod
    def from_rational(value: Fraction | int) -> "ExtendedRational":
        return ExtendedRational(as_fraction(value), Fraction(0), 1)

    @staticmethod
    def sqrt(n: int) -> "ExtendedRational":
        """sqrt(n) itself."""
        return ExtendedRational(Fraction(0), Fraction(1), n)

    @staticmethod
    def sqrt_fraction(q: "Fraction | int") -> "ExtendedRational":
        """sqrt of a nonnegative rational: sqrt(p/q) = sqrt(p*q) / q."""
        q = as_fraction(q)
        if q < 0:
            raise PreconditionError(f"square root of a negative rational: {q}")
        if q == 0:
            return ExtendedRational.from_rational(0)
        return ExtendedRational(
            Fraction(0), Fraction(1, q.denominator), q.numerator * q.denominator
        )

    @property
    def is_rational(self) -> bool:
        return self.b == 0

    def as_rational(self) -> Fraction:
        if not self.is_rational:
            raise PreconditionError(f"{self} is irrational")
        return self.a

    def _coerced(self, other: object) -> "ExtendedRational | None":
        if isinstance(other, ExtendedRational):
            if other.n == self.n or other.b == 0 or self.b == 0:
                return other
            return None
        if isinstance(other, (Fraction, int)):
            return ExtendedRational.from_rational(other)
        return None

    def _common_n(self, other: "ExtendedRational") -> int:
        if self.b == 0:
            return other.n
        return self.n

    def sign(self) -> int:
        a, b, n = self.a, self.b, self.n
        if b == 0:
            return -1 if a < 0 else (0 if a == 0 else 1)
        if a == 0:
            return -1 if b < 0 else 1
        if a > 0 and b > 0:
            return 1
        if a < 0 and b < 0:
            return -1
        # Opposite signs: |a| vs |b|*sqrt(n) decides, via squares.
        lhs = a * a
        rhs = b * b * n
        if lhs == rhs:
            return 0
        dominant_rational = lhs > rhs
        sign_a = 1 if a > 0 else -1
        return sign_a if dominant_rational else -sign_a

    def __add__(self, other: object) -> "ExtendedRational":
        o = self._coerced(other)
        if o is None:
            return NotImplemented
        if self.b != 0 and o.b != 0 and self.n != o.n:
            return NotImplemented
        return ExtendedRational(self.a + o.a, self.b + o.b, self._common_n(o))

    __radd__ = __add__

    def __neg__(self) -> "ExtendedRational":
        return ExtendedRational(-self.a, -self.b, self.n)

    def __sub__(self, other: object) -> "ExtendedRational":
        o = self._coerced(other)
        if o is None:
            return NotImplemented
        return self.__add__(-o)

    def __rsub__(self, other: object) -> "ExtendedRational":
        o = self._coerced(other)
        if o is None:
            return NotImplemented
        return o.__sub__(self)

    def __mul__(self, other: object) -> "ExtendedRational":
        o = self._coerced(other)
        if o is None:
            return NotImplemented
        if self.b != 0 and o.b != 0 and self.n != o.n:
            return NotImplemented
        n = self._common_n(o)
        return ExtendedRational(
            self.a * o.a + self.b * o.b * n,
            self.a * o.b + self.b * o.a,
            n,
        )

    __rmul__ = __mul__

    def __pow__(self, exponent: int) -> "ExtendedRational":
        if not isinstance(exponent, int) or exponent < 0:
            raise PreconditionError(f"exponent must be a nonnegative integer, got {exponent!r}")
        result = ExtendedRational.from_rational(1)
        base = self
        e = exponent
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def divide_by_rational(self, q: Fraction | int) -> "ExtendedRational":
        q = as_fraction(q)
        if q == 0:
            raise ZeroDivisionError("division by zero")
        return ExtendedRational(self.a / q, self.b / q, self.n)

    def divide_by_sqrt(self) -> "ExtendedRational":
        """self / sqrt(n): (a + b*sqrt(n)) / sqrt(n) = b + (a/n)*sqrt(n)."""
        return ExtendedRational(self.b, self.a / self.n, self.n if self.n > 1 else 1)

    def __eq__(self, other: object) -> bool:
        o = self._coerced(other)
        if o is None:
            return NotImplemented
        return (self.a, self.b) == (o.a, o.b) and (self.b == 0 or self.n == o.n)

    def __lt__(self, other: object) -> bool:
        o = self._coerced(other)
        if o is None:
            return NotImplemented
        if self.b != 0 and o.b != 0 and self.n != o.n:
            raise PreconditionError(f"cannot order values from Q[sqrt {self.n}] and Q[sqrt {o.n}]")
        return (self - o).sign() < 0

    def __hash__(self) -> int:
        if self.b == 0:
            return hash(self.a)
        return hash((self.a, self.b, self.n))

    def __repr__(self) -> str:
        if self.b == 0:
            return f"ExtendedRational({self.a})"
        return f"ExtendedRational({self.a} + {self.b}*sqrt({self.n}))"

    def __str__(self) -> str:
        if self.b == 0:
            return str(self.a)
        return f"{self.a} + {self.b}*sqrt({self.n})"
