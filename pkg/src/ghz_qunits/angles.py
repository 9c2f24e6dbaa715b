"""Exact phases as rational fractions of a full turn.

A :class:`Turn` ``num/den`` stands for the angle ``2*pi*num/den`` reduced
modulo ``2*pi``.  All phase-shifter settings are kept in this form; floats
only appear when a turn is evaluated with :func:`turn_to_complex`.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction

MAX_DENOMINATOR = 2**31
ABS_TOL = 1e-12


@dataclass(frozen=True, order=True)
class Turn:
    """Angle ``num/den`` of a full circle, stored in canonical form.

    Construct through :func:`turn_from_fraction` (or ``Turn(num, den)``,
    which normalizes the same way).
    """

    num: int
    den: int = 1

    def __post_init__(self):
        num, den = int(self.num), int(self.den)
        if den == 0:
            raise ZeroDivisionError("Turn denominator must be nonzero")
        if den < 0:
            num, den = -num, -den
        g = math.gcd(num, den)
        num, den = num // g, den // g
        if den > MAX_DENOMINATOR:
            raise OverflowError(f"Turn denominator {den} exceeds cap 2**31")
        object.__setattr__(self, "num", num % den)
        object.__setattr__(self, "den", den)

    @classmethod
    def parse(cls, text: str) -> Turn:
        """Parse ``"p/q"`` or ``"p"`` (integer turns) into a Turn."""
        s = str(text).strip()
        if "/" in s:
            p, _, q = s.partition("/")
            try:
                num, den = int(p), int(q)
            except ValueError:
                raise ValueError(f"malformed turn fraction {text!r}") from None
        else:
            try:
                num, den = int(s), 1
            except ValueError:
                raise ValueError(f"malformed turn fraction {text!r}") from None
        if den <= 0:
            raise ValueError(f"turn denominator must be positive in {text!r}")
        return cls(num, den)

    @property
    def fraction(self) -> Fraction:
        return Fraction(self.num, self.den)

    @property
    def radians(self) -> float:
        return 2 * math.pi * self.num / self.den

    def __add__(self, other: Turn) -> Turn:
        if not isinstance(other, Turn):
            return NotImplemented
        return turn_add(self, other)

    def __neg__(self) -> Turn:
        return turn_scale(self, -1)

    def __sub__(self, other: Turn) -> Turn:
        if not isinstance(other, Turn):
            return NotImplemented
        return turn_add(self, -other)

    def __mul__(self, k: int) -> Turn:
        if not isinstance(k, int):
            return NotImplemented
        return turn_scale(self, k)

    __rmul__ = __mul__

    def __str__(self) -> str:
        return f"{self.num}/{self.den}"


ZERO = Turn(0, 1)


def turn_from_fraction(num: int, den: int) -> Turn:
    if den == 0:
        raise ValueError("den must be >= 1")
    if den < 0:
        raise ValueError("den must be positive")
    return Turn(num, den)


def turn_add(a: Turn, b: Turn) -> Turn:
    # Lowest common denominator keeps the intermediate small before the cap check.
    lcm = a.den // math.gcd(a.den, b.den) * b.den
    return Turn(a.num * (lcm // a.den) + b.num * (lcm // b.den), lcm)


def turn_scale(a: Turn, k: int) -> Turn:
    return Turn(a.num * k, a.den)


def turn_to_complex(a: Turn) -> complex:
    """``exp(2*pi*i*a)``.

    Quarter turns are returned exactly so that e.g. ``1/4`` maps to ``1j``
    rather than ``6e-17 + 1j``.
    """
    if 4 % a.den == 0:
        return (1, 1j, -1, -1j)[a.num * (4 // a.den)]
    return cmath.exp(2j * math.pi * a.num / a.den)


def root_exponent(a: Turn, n: int) -> int | None:
    """Return ``e`` with ``a == e/n`` exactly, or None if ``a`` is no n-th root.

    >>> root_exponent(Turn(1, 3), 3)
    1
    >>> root_exponent(Turn(1, 2), 3) is None
    True
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if n % a.den:
        return None
    return a.num * (n // a.den)


def root_of_unity(e: int, n: int) -> complex:
    """``gamma_n ** e`` with ``gamma_n = exp(2*pi*i/n)``."""
    return turn_to_complex(Turn(e, n))


def close(z: complex, w: complex, tol: float = ABS_TOL) -> bool:
    """Componentwise absolute comparison."""
    return abs(z.real - w.real) <= tol and abs(z.imag - w.imag) <= tol


@dataclass(frozen=True, order=True)
class BellValue:
    """The Bell number ``gamma_order ** exponent``.

    Detector ``k`` (1-based) of an N-port multiport is assigned
    ``BellValue(k - 1, N)``; products of outcomes add exponents mod N.
    """

    exponent: int
    order: int

    def __post_init__(self):
        if self.order < 1:
            raise ValueError("order must be >= 1")
        object.__setattr__(self, "exponent", int(self.exponent) % self.order)

    @property
    def value(self) -> complex:
        return root_of_unity(self.exponent, self.order)

    @property
    def turn(self) -> Turn:
        return Turn(self.exponent, self.order)

    def __mul__(self, other: BellValue) -> BellValue:
        if not isinstance(other, BellValue) or other.order != self.order:
            return NotImplemented
        return BellValue(self.exponent + other.exponent, self.order)
