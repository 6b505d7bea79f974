"""The two computable principal ideal domains supported by the engine.

Elements of the integers are plain ``int``.  Elements of the integers
localized at a prime ``p`` are ``int`` or ``fractions.Fraction`` with a
denominator coprime to ``p``; both compare and hash consistently, so code
that only does ring arithmetic never needs to care which one it holds.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Union

Scalar = Union[int, Fraction]

INTEGERS_KIND = "Integers"
LOCALIZED_KIND = "LocalizedIntegers"


class RingError(ValueError):
    """A value does not belong to the ambient ring."""


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


@dataclass(frozen=True)
class RingSpec:
    kind: str = INTEGERS_KIND
    prime: Optional[int] = None

    def __post_init__(self):
        if self.kind == INTEGERS_KIND:
            if self.prime is not None:
                raise RingError("the integers take no prime")
        elif self.kind == LOCALIZED_KIND:
            if not isinstance(self.prime, int) or not _is_prime(self.prime):
                raise RingError(f"localization needs a prime, got {self.prime!r}")
        else:
            raise RingError(f"unknown ring kind {self.kind!r}")

    @property
    def localized(self) -> bool:
        return self.kind == LOCALIZED_KIND

    def __str__(self):
        return "Z" if not self.localized else f"Z_({self.prime})"

    # -- membership and coercion ------------------------------------------

    def coerce(self, x) -> Scalar:
        """Return ``x`` as a ring element, raising RingError if it is not one."""
        if isinstance(x, bool):
            raise RingError(f"not a ring element: {x!r}")
        if isinstance(x, int):
            return x
        if isinstance(x, Fraction):
            if x.denominator == 1:
                return x.numerator
            if self.localized and x.denominator % self.prime != 0:
                return x
            raise RingError(f"{x} is not an element of {self}")
        if isinstance(x, str):
            return self.coerce(parse_scalar(x))
        raise RingError(f"not a ring element: {x!r}")

    def contains(self, x) -> bool:
        try:
            self.coerce(x)
        except RingError:
            return False
        return True

    # -- valuation and units ----------------------------------------------

    def valuation(self, a: Scalar) -> int:
        """p-adic valuation of a nonzero element (localized rings only)."""
        n = a.numerator if isinstance(a, Fraction) else a
        if n == 0:
            raise ZeroDivisionError("valuation of zero")
        p = self.prime
        v = 0
        while n % p == 0:
            n //= p
            v += 1
        return v

    def is_unit(self, a: Scalar) -> bool:
        if a == 0:
            return False
        if not self.localized:
            return a in (1, -1)
        return self.valuation(a) == 0

    def inverse(self, u: Scalar) -> Scalar:
        if not self.is_unit(u):
            raise RingError(f"{u} is not a unit of {self}")
        if not self.localized:
            return u
        return self.coerce(Fraction(1) / Fraction(u))

    def size(self, a: Scalar) -> int:
        """Euclidean size of a nonzero element."""
        if not self.localized:
            return abs(a)
        return self.valuation(a)

    def divides(self, a: Scalar, b: Scalar) -> bool:
        if a == 0:
            return b == 0
        return self.divmod(b, a)[1] == 0

    def divmod(self, a: Scalar, b: Scalar) -> tuple[Scalar, Scalar]:
        """Euclidean division: a = q*b + r with r == 0 or size(r) < size(b)."""
        if b == 0:
            raise ZeroDivisionError("division by zero")
        if not self.localized:
            q = a // b
            return q, a - q * b
        if a == 0:
            return 0, 0
        if self.valuation(a) >= self.valuation(b):
            return self.coerce(Fraction(a) / Fraction(b)), 0
        return 0, a

    def exact_div(self, a: Scalar, b: Scalar) -> Scalar:
        q, r = self.divmod(a, b)
        if r != 0:
            raise RingError(f"{b} does not divide {a} in {self}")
        return q

    def normal_unit(self, a: Scalar) -> Scalar:
        """The unit u with a*u in normal form (positive, or a power of p)."""
        if a == 0:
            return 1
        if not self.localized:
            return 1 if a > 0 else -1
        pv = self.prime ** self.valuation(a)
        return self.coerce(Fraction(pv) / Fraction(a))

    def normalize(self, a: Scalar) -> Scalar:
        return a * self.normal_unit(a)

    def residue(self, x: Scalar, pivot: Scalar) -> tuple[Scalar, Scalar]:
        """Reduce ``x`` against a normalized ``pivot``: x = q*pivot + r.

        ``r`` lies in the fixed residue system {0, ..., m-1}, where m is the
        pivot itself over the integers and p**v(pivot) over the localization.
        """
        if not self.localized:
            q = x // pivot
            return q, x - q * pivot
        m = pivot.numerator if isinstance(pivot, Fraction) else pivot
        if m == 1:
            return x, 0
        if isinstance(x, Fraction):
            r = x.numerator * pow(x.denominator, -1, m) % m
        else:
            r = x % m
        return self.coerce(Fraction(x - r) / m), r


INTEGERS = RingSpec(INTEGERS_KIND)


def localized(p: int) -> RingSpec:
    return RingSpec(LOCALIZED_KIND, p)


def parse_scalar(text: str) -> Scalar:
    """Parse ``"12"``, ``"-3"`` or ``"num/den"`` exactly."""
    s = text.strip()
    if "/" in s:
        num, den = s.split("/", 1)
        try:
            value = Fraction(int(num), int(den))
        except (ValueError, ZeroDivisionError) as exc:
            raise RingError(f"bad scalar {text!r}") from exc
        return value.numerator if value.denominator == 1 else value
    try:
        return int(s)
    except ValueError as exc:
        raise RingError(f"bad scalar {text!r}") from exc


def format_scalar(x: Scalar) -> str:
    if isinstance(x, Fraction) and x.denominator != 1:
        return f"{x.numerator}/{x.denominator}"
    return str(int(x))
