"""Worst-case ratio bounds, compared exactly even when irrational."""

from __future__ import annotations

import math
from dataclasses import dataclass
from decimal import Decimal, localcontext
from fractions import Fraction

from ..mechanisms import MechanismId


@dataclass(frozen=True)
class QuadraticSurd:
    """The real number ``rational + coeff * sqrt(radicand)``."""

    rational: Fraction
    coeff: Fraction
    radicand: int

    def __float__(self) -> float:
        with localcontext() as ctx:
            ctx.prec = 40
            root = Decimal(self.radicand).sqrt()
            val = (Decimal(self.rational.numerator) / Decimal(self.rational.denominator)
                   + Decimal(self.coeff.numerator) / Decimal(self.coeff.denominator) * root)
        return float(val)

    def ge(self, x: Fraction) -> bool:
        """Exact test ``x <= self``."""
        lhs = Fraction(x) - self.rational
        if self.coeff >= 0:
            return lhs <= 0 or lhs * lhs <= self.coeff * self.coeff * self.radicand
        lhs = -lhs
        return lhs >= 0 and lhs * lhs >= self.coeff * self.coeff * self.radicand


MIDM_MAX_BOUND = QuadraticSurd(Fraction(29, 54), Fraction(20, 54), 10)


@dataclass(frozen=True)
class Bound:
    label: str
    value: "Fraction | QuadraticSurd"
    note: str | None = None

    def holds(self, ratio) -> bool:
        if ratio == math.inf:
            return False
        if isinstance(self.value, QuadraticSurd):
            return self.value.ge(ratio)
        return ratio <= self.value

    def __float__(self) -> float:
        return float(self.value)


UPPER_BOUNDS: dict[tuple[MechanismId, str], Bound] = {
    (MechanismId.ResM, "social"): Bound("1", Fraction(1)),
    (MechanismId.MedM, "social"): Bound("2", Fraction(2)),
    (MechanismId.LeftM, "max"): Bound("3", Fraction(3)),
    (MechanismId.LofM, "max"): Bound("17/8", Fraction(17, 8)),
    (MechanismId.MidM, "max"): Bound(
        "(29+20*sqrt(10))/54", MIDM_MAX_BOUND,
        note="closed form evaluates to 1.70825...; the decimal 1.774 quoted alongside "
             "it elsewhere does not match the closed form",
    ),
}


def upper_bound(mech, objective: str) -> Bound | None:
    try:
        mech = MechanismId.parse(mech)
    except ValueError:
        return None
    return UPPER_BOUNDS.get((mech, objective))


def rational_sqrt(n: int, max_error: Fraction = Fraction(1, 10**9)) -> Fraction:
    """A best rational approximation of sqrt(n) with certified error below ``max_error``."""
    max_error = Fraction(max_error)
    den = 10
    while True:
        digits = 2 * len(str(den)) + 4
        fine = Fraction(math.isqrt(n * 10 ** (2 * digits)), 10 ** digits)
        s = fine.limit_denominator(den)
        # |s - sqrt n| = |s^2 - n| / (s + sqrt n) < |s^2 - n| / s
        if s > 0 and abs(s * s - n) / s < max_error:
            return s
        den *= 10
