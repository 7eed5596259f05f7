"""Scalar carriers: exact rationals or doubles, plus the helpers that treat both."""

from __future__ import annotations

import math
from fractions import Fraction
from numbers import Rational
from typing import Iterable, Union

Scalar = Union[Fraction, float]

EXACT = "exact"
FLOAT = "float"
MODES = (EXACT, FLOAT)


def is_exact(x) -> bool:
    return isinstance(x, Rational) and not isinstance(x, bool)


def infer_mode(values: Iterable) -> str:
    """``exact`` iff every value is a rational number."""
    return EXACT if all(is_exact(v) for v in values) else FLOAT


def check_mode(mode: str) -> str:
    if mode not in MODES:
        raise ValueError(f"unknown mode {mode!r}; expected one of {MODES}")
    return mode


def to_scalar(x, mode: str) -> Scalar:
    """Coerce ``x`` (int, Fraction, float or numeric string) into the carrier of ``mode``.

    Strings are parsed exactly in exact mode, so ``"0.1"`` becomes ``1/10``.
    """
    check_mode(mode)
    if mode == EXACT:
        if isinstance(x, str):
            return Fraction(x.strip())
        if isinstance(x, float):
            if not math.isfinite(x):
                raise ValueError(f"non-finite value {x!r} in exact mode")
            return Fraction(x)
        return Fraction(x)
    if isinstance(x, str):
        s = x.strip()
        return float(Fraction(s)) if "/" in s else float(s)
    return float(x)


def coerce_all(values: Iterable, mode: str) -> tuple:
    return tuple(to_scalar(v, mode) for v in values)


def format_scalar(x: Scalar) -> str:
    """Rationals as ``p/q`` (integers as ``p``), floats with 17 significant digits."""
    if is_exact(x):
        return str(Fraction(x))
    return format(float(x), ".17g")


def parse_scalar(value, mode: str) -> Scalar:
    if isinstance(value, bool) or value is None:
        raise ValueError(f"not a scalar: {value!r}")
    return to_scalar(value, mode)


def log_abs(x: Scalar) -> float:
    """Natural log of ``|x|``; exact for huge or tiny rationals where float() would under/overflow."""
    if x == 0:
        raise ValueError("log of zero")
    if is_exact(x):
        x = Fraction(x)
        return math.log(abs(x.numerator)) - math.log(x.denominator)
    return math.log(abs(x))


def sqrt_exact(x: Fraction) -> Fraction | None:
    """Square root of a non-negative rational if it is rational, else None."""
    x = Fraction(x)
    if x < 0:
        raise ValueError("square root of a negative number")
    p, q = x.numerator, x.denominator
    rp, rq = math.isqrt(p), math.isqrt(q)
    if rp * rp == p and rq * rq == q:
        return Fraction(rp, rq)
    return None


def sqrt_upper(x: Fraction, digits: int = 12) -> Fraction:
    """Exact square root when rational, otherwise the smallest ``s/10**digits`` with ``s**2 >= x*10**(2*digits)``."""
    exact = sqrt_exact(x)
    if exact is not None:
        return exact
    x = Fraction(x)
    scale = 10 ** digits
    m = -((-x.numerator * scale * scale) // x.denominator)  # ceil
    s = math.isqrt(m)
    if s * s < m:
        s += 1
    return Fraction(s, scale)


def sqrt_scalar(x: Scalar) -> Scalar:
    """Square root in the carrier of ``x``; exact rationals without a rational root fall back to float."""
    if is_exact(x):
        exact = sqrt_exact(x)
        if exact is not None:
            return exact
        return math.sqrt(float(x))
    return math.sqrt(x)


def dist2(a, b) -> Scalar:
    return sum((x - y) * (x - y) for x, y in zip(a, b))
