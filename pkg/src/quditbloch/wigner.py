"""Wigner 3jm and 6j symbols evaluated with exact integer arithmetic.

Every argument is handled internally as twice its value, so half-integers
never touch binary floating point.  The Racah sums are accumulated as exact
rationals and the result is only converted to ``float`` at the very end,
which keeps full double precision for large angular momenta.
"""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from numbers import Number

__all__ = ["HalfInteger", "triangle_ok", "three_jm", "six_j"]


@dataclass(frozen=True, order=True)
class HalfInteger:
    """A non-negative-or-signed half-integer stored as ``twice_value``."""

    twice_value: int

    @classmethod
    def parse(cls, value) -> "HalfInteger":
        """Build from ``"3/2"``, ``"1"``, ``1.5``, ``Fraction(3, 2)`` or another HalfInteger."""
        if isinstance(value, HalfInteger):
            return value
        if isinstance(value, str):
            text = value.strip()
            try:
                frac = Fraction(text)
            except (ValueError, ZeroDivisionError):
                raise ValueError(f"not a half-integer: {value!r}") from None
        elif isinstance(value, (int, Fraction)):
            frac = Fraction(value)
        elif isinstance(value, Number):
            frac = Fraction(float(value))
        else:
            raise TypeError(f"cannot interpret {value!r} as a half-integer")
        twice = 2 * frac
        if twice.denominator != 1:
            raise ValueError(f"not a half-integer: {value!r}")
        return cls(int(twice))

    @property
    def value(self) -> Fraction:
        return Fraction(self.twice_value, 2)

    @property
    def is_integer(self) -> bool:
        return self.twice_value % 2 == 0

    def __float__(self) -> float:
        return self.twice_value / 2

    def __str__(self) -> str:
        if self.twice_value % 2 == 0:
            return str(self.twice_value // 2)
        return f"{self.twice_value}/2"


def _twice(x) -> int:
    if isinstance(x, HalfInteger):
        return x.twice_value
    if isinstance(x, int):
        return 2 * x
    return HalfInteger.parse(x).twice_value


class _FactorialTable:
    """Lazily grown table of exact factorials, safe for concurrent readers."""

    def __init__(self) -> None:
        self._values = [1]
        self._lock = threading.Lock()

    def __call__(self, n: int) -> int:
        values = self._values
        if n < len(values):
            return values[n]
        with self._lock:
            values = self._values
            while len(values) <= n:
                values.append(values[-1] * len(values))
            return values[n]


_factorial = _FactorialTable()


def _fact2(twice: int) -> int:
    # factorial of an integer given as twice its value
    return _factorial(twice // 2)


def _triangle_twice(a: int, b: int, c: int) -> bool:
    return abs(a - b) <= c <= a + b and (a + b + c) % 2 == 0


def triangle_ok(a, b, c) -> bool:
    """True iff ``|a-b| <= c <= a+b`` and ``a+b+c`` is an integer."""
    return _triangle_twice(_twice(a), _twice(b), _twice(c))


def _delta_squared(a: int, b: int, c: int) -> Fraction:
    # triangle coefficient squared, arguments doubled
    return Fraction(
        _fact2(a + b - c) * _fact2(a - b + c) * _fact2(-a + b + c),
        _fact2(a + b + c + 2),
    )


def _signed_sqrt(coeff: Fraction, radicand: Fraction) -> float:
    if coeff == 0 or radicand == 0:
        return 0.0
    return float(coeff) * math.sqrt(radicand)


@lru_cache(maxsize=None)
def _three_jm_twice(j1, j2, j3, m1, m2, m3) -> float:
    for j, m in ((j1, m1), (j2, m2), (j3, m3)):
        if (j - m) % 2:
            raise ValueError("j - m must be an integer for every column")
    if m1 + m2 + m3 != 0 or not _triangle_twice(j1, j2, j3):
        return 0.0
    if abs(m1) > j1 or abs(m2) > j2 or abs(m3) > j3:
        return 0.0

    radicand = _delta_squared(j1, j2, j3) * (
        _fact2(j1 + m1) * _fact2(j1 - m1)
        * _fact2(j2 + m2) * _fact2(j2 - m2)
        * _fact2(j3 + m3) * _fact2(j3 - m3)
    )
    # summation bounds, all in doubled units
    t_min = max(0, j2 - j3 - m1, j1 - j3 + m2)
    t_max = min(j1 + j2 - j3, j1 - m1, j2 + m2)
    total = Fraction(0)
    for t in range(t_min, t_max + 1, 2):
        denom = (
            _fact2(t)
            * _fact2(j3 - j2 + t + m1)
            * _fact2(j3 - j1 + t - m2)
            * _fact2(j1 + j2 - j3 - t)
            * _fact2(j1 - t - m1)
            * _fact2(j2 - t + m2)
        )
        term = Fraction(1, denom)
        total += -term if (t // 2) % 2 else term
    phase = (j1 - j2 - m3) // 2
    if phase % 2:
        total = -total
    return _signed_sqrt(total, radicand)


def three_jm(j1, j2, j3, m1, m2, m3) -> float:
    """Wigner 3jm symbol ``(j1 j2 j3; m1 m2 m3)``.

    Arguments may be ints, half-integer strings/Fractions/floats or
    :class:`HalfInteger`.  Selection-rule zeros (including ``|m| > j``) are
    returned as exact ``0.0``; a half-integer mismatch between ``j`` and ``m``
    raises ``ValueError``.
    """
    return _three_jm_twice(
        _twice(j1), _twice(j2), _twice(j3), _twice(m1), _twice(m2), _twice(m3)
    )


@lru_cache(maxsize=None)
def _six_j_twice(a, b, c, d, e, f) -> float:
    triads = ((a, b, c), (a, e, f), (d, b, f), (d, e, c))
    if not all(_triangle_twice(*t) for t in triads):
        return 0.0
    radicand = Fraction(1)
    for t in triads:
        radicand *= _delta_squared(*t)
    t_min = max(a + b + c, a + e + f, d + b + f, d + e + c)
    t_max = min(a + b + d + e, a + c + d + f, b + c + e + f)
    total = Fraction(0)
    for t in range(t_min, t_max + 1, 2):
        num = _fact2(t + 2)
        denom = (
            _fact2(t - a - b - c)
            * _fact2(t - a - e - f)
            * _fact2(t - d - b - f)
            * _fact2(t - d - e - c)
            * _fact2(a + b + d + e - t)
            * _fact2(a + c + d + f - t)
            * _fact2(b + c + e + f - t)
        )
        term = Fraction(num, denom)
        total += -term if (t // 2) % 2 else term
    return _signed_sqrt(total, radicand)


def six_j(j1, j2, j3, j4, j5, j6) -> float:
    """Wigner 6j symbol ``{j1 j2 j3; j4 j5 j6}`` (zero unless all four triads couple)."""
    return _six_j_twice(
        _twice(j1), _twice(j2), _twice(j3), _twice(j4), _twice(j5), _twice(j6)
    )
