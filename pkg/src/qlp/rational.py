"""Exact rational parsing and formatting.

Every probability in the package is a :class:`fractions.Fraction`.  Decimal
literals such as ``"0.19"`` are parsed exactly (to ``19/100``), never through
binary floating point.
"""

from __future__ import annotations

from fractions import Fraction
from numbers import Rational

__all__ = ["Fraction", "to_fraction", "fmt", "fmt_decimal", "fmt_both"]


def to_fraction(value) -> Fraction:
    """Coerce ``value`` to an exact :class:`Fraction`.

    Accepts ints, rationals (including ``gmpy2.mpq``) and strings of the forms
    ``"3"``, ``"-1/2"``, ``"0.19"``.  Floats are rejected because the point of
    the package is to never round.
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, Rational):
        return Fraction(int(value.numerator), int(value.denominator))
    if isinstance(value, str):
        text = value.strip()
        if not text:
            raise ValueError("empty rational literal")
        try:
            return Fraction(text)
        except (ValueError, ZeroDivisionError) as exc:
            raise ValueError(f"not a rational literal: {value!r}") from exc
    if isinstance(value, float):
        raise TypeError(f"refusing to convert float {value!r}; pass a string such as '0.3'")
    raise TypeError(f"cannot interpret {value!r} as a rational")


def fmt(q: Fraction) -> str:
    """``p/q`` form used in JSON (integers print without a denominator)."""
    q = to_fraction(q)
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"


def fmt_decimal(q: Fraction) -> str | None:
    """Exact decimal expansion, or ``None`` if it does not terminate."""
    q = to_fraction(q)
    den = q.denominator
    twos = fives = 0
    while den % 2 == 0:
        den //= 2
        twos += 1
    while den % 5 == 0:
        den //= 5
        fives += 1
    if den != 1:
        return None
    digits = max(twos, fives)
    if digits == 0:
        return str(q.numerator)
    scaled = abs(q.numerator) * 10**digits // q.denominator
    sign = "-" if q < 0 else ""
    whole, frac = divmod(scaled, 10**digits)
    return f"{sign}{whole}.{frac:0{digits}d}"


def fmt_both(q: Fraction) -> str:
    """Text-report form: ``3/10 (0.3)``; repeating decimals show ``p/q`` only."""
    frac = fmt(q)
    dec = fmt_decimal(q)
    if dec is None or dec == frac:
        return frac
    return f"{frac} ({dec})"
