"""Small exact-arithmetic helpers shared by the modules."""

from __future__ import annotations

import math
from decimal import Decimal, localcontext
from fractions import Fraction

_PREC = 60


def as_fraction(x) -> Fraction:
    """Coerce ints, Fractions and strings like ``"3/2"`` or ``"0.3"``."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, float):
        raise TypeError("floats are not accepted; pass a Fraction or a 'p/q' string")
    return Fraction(x)


def fmt_rational(x: Fraction) -> str:
    x = Fraction(x)
    return f"{x.numerator}/{x.denominator}"


def ceil_log2(x: Fraction) -> int:
    """Smallest integer k with 2**k >= x, for x > 0."""
    x = Fraction(x)
    if x <= 0:
        raise ValueError("ceil_log2 needs a positive argument")
    k = x.numerator.bit_length() - x.denominator.bit_length()
    while Fraction(2) ** k < x:
        k += 1
    while Fraction(2) ** (k - 1) >= x:
        k -= 1
    return k


def _log2_decimal(x: Fraction) -> Decimal:
    with localcontext() as ctx:
        ctx.prec = _PREC
        return (Decimal(x.numerator).ln() - Decimal(x.denominator).ln()) / Decimal(2).ln()


def duplication_factor(n_weight: Fraction, eps: Fraction) -> int:
    """ceil(64 * log2(nW) / eps^2), at least 1."""
    n_weight = Fraction(n_weight)
    if n_weight <= 1:
        return 1
    with localcontext() as ctx:
        ctx.prec = _PREC
        val = Decimal(64) * _log2_decimal(n_weight) * Decimal(eps.denominator) ** 2 / Decimal(eps.numerator) ** 2
        return max(1, int(val.to_integral_value(rounding="ROUND_CEILING")))


def sqrt_upper(x: Fraction) -> Fraction:
    """A rational r with sqrt(x) <= r, tight to about 1e-40 relative."""
    x = Fraction(x)
    if x <= 0:
        return Fraction(0)
    num, den = x.numerator, x.denominator
    # isqrt on a scaled integer keeps everything exact
    scale = 10 ** 40
    s = math.isqrt(num * scale * scale // den)
    r = Fraction(s + 1, scale)
    assert r * r >= x
    return r


def subgraph_ratio(eta: Fraction, rho_est: Fraction, n_weight: Fraction) -> Fraction:
    """Upper bound on sqrt(2 * eta * log2(nW) / rho_est)."""
    if n_weight <= 1:
        return sqrt_upper(Fraction(0))
    with localcontext() as ctx:
        ctx.prec = _PREC
        lg = _log2_decimal(Fraction(n_weight))
        # round the logarithm up before the exact square root
        lg_up = Fraction(lg) + Fraction(1, 10 ** 45)
    return sqrt_upper(2 * Fraction(eta) * lg_up / Fraction(rho_est))
