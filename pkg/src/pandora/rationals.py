"""Exact rational plumbing: coercion, formatting, and the +inf sentinel.

All probabilities, values, costs and utilities in this package are
`fractions.Fraction`.  The single exception is the hardness lab, which works
in floats at n = 10^5 with a documented tolerance.  Thresholds additionally
admit `math.inf` ("never halt"), which is why a couple of helpers here speak
of *extended* rationals.
"""
from __future__ import annotations

import math
from fractions import Fraction
from typing import Union

INF = math.inf

#: A Fraction, or +/-inf (only thresholds ever carry the infinities).
Extended = Union[Fraction, float]


def rat(x: object) -> Fraction:
    """Coerce ints, "p/q" strings and Fractions to Fraction.

    Floats are rejected on purpose: a silent float slipping in is the usual
    way exact pipelines stop being exact.
    """
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int) and not isinstance(x, bool):
        return Fraction(x)
    if isinstance(x, str):
        try:
            return Fraction(x)
        except (ValueError, ZeroDivisionError) as exc:
            raise ValueError(f"not a rational literal: {x!r} ({exc})") from None
    raise TypeError(f"expected an exact rational, got {type(x).__name__}: {x!r}")


def fmt(x: Extended) -> str:
    """Canonical string form: "3", "-1/2", "inf"."""
    if x == INF:
        return "inf"
    if x == -INF:
        return "-inf"
    return str(rat(x))


def parse_extended(s: str) -> Extended:
    if s in ("inf", "+inf"):
        return INF
    if s == "-inf":
        return -INF
    return rat(s)


def is_finite(x: Extended) -> bool:
    return not (x == INF or x == -INF)
