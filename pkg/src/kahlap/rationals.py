"""Exact rational coefficient type.

All series coefficients in this package are arbitrary-precision rationals.
gmpy2's mpq is used when available (it is several times faster than
fractions.Fraction on the dense convolutions in :mod:`kahlap.jets`); the
stdlib Fraction is a drop-in fallback.
"""

from __future__ import annotations

try:
    from gmpy2 import mpq as _mpq

    def rat(p, q=1):
        """Exact rational p/q."""
        if isinstance(p, str):
            return rat_from_str(p) / _mpq(q)
        return _mpq(p, q)

    RatType = type(_mpq(0))
except ImportError:  # pragma: no cover - exercised only without gmpy2
    from fractions import Fraction as _Fraction

    def rat(p, q=1):
        """Exact rational p/q."""
        return _Fraction(p, q)

    RatType = _Fraction

ZERO = rat(0)
ONE = rat(1)


def rat_from_str(text: str):
    """Parse "p/q" or "p" into an exact rational."""
    text = text.strip()
    if "/" in text:
        num, den = text.split("/", 1)
        return rat(int(num), int(den))
    return rat(int(text))


def rat_str(x) -> str:
    """Canonical lossless "p/q" form (always includes the denominator)."""
    x = rat(x)
    return f"{x.numerator}/{x.denominator}"


def rat_pretty(x) -> str:
    """Human form: integers without denominator, otherwise "p/q"."""
    x = rat(x)
    if x.denominator == 1:
        return str(x.numerator)
    return f"{x.numerator}/{x.denominator}"
