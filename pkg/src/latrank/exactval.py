"""Exact positive reals of the form q * prod(p_i ** e_i).

Squared norms, squared heights and analytic scale factors in this package are
all rationals times rational powers of small integers (discriminants, prime
norms).  Keeping them in that shape allows exact comparisons: raising both
sides of an inequality to the lcm of the exponent denominators turns it into
a comparison of plain rationals.
"""

from __future__ import annotations

import math
from fractions import Fraction


def _factor(n: int) -> dict[int, int]:
    """Trial-division factorization. Bases here are tiny (discriminants, primes)."""
    out: dict[int, int] = {}
    n = abs(n)
    d = 2
    while d * d <= n:
        while n % d == 0:
            out[d] = out.get(d, 0) + 1
            n //= d
        d += 1 if d == 2 else 2
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


class PowerProduct:
    """Immutable exact value q * prod(p ** e) with q rational > 0, p prime, e rational.

    Exponents are normalized to lie in (0, 1); integer parts are folded into q.
    """

    __slots__ = ("coeff", "exps")

    def __init__(self, coeff=1, exps=()):
        coeff = Fraction(coeff)
        if coeff <= 0:
            raise ValueError("PowerProduct values are positive")
        acc: dict[int, Fraction] = {}
        for base, e in exps:
            e = Fraction(e)
            if base <= 0:
                raise ValueError("bases must be positive integers")
            if e == 0 or base == 1:
                continue
            for p, mult in _factor(base).items():
                acc[p] = acc.get(p, 0) + e * mult
        cleaned = []
        for p in sorted(acc):
            e = acc[p]
            whole, frac_part = divmod(e, 1)
            if whole:
                coeff *= Fraction(p) ** int(whole)
            if frac_part:
                cleaned.append((p, frac_part))
        object.__setattr__(self, "coeff", coeff)
        object.__setattr__(self, "exps", tuple(cleaned))

    def __setattr__(self, *a):
        raise AttributeError("PowerProduct is immutable")

    @classmethod
    def of(cls, base: int, exp) -> "PowerProduct":
        return cls(1, ((base, Fraction(exp)),))

    def is_rational(self) -> bool:
        return not self.exps

    def as_fraction(self) -> Fraction:
        if self.exps:
            raise ValueError(f"{self!r} is irrational")
        return self.coeff

    def __mul__(self, other) -> "PowerProduct":
        if isinstance(other, PowerProduct):
            return PowerProduct(self.coeff * other.coeff, self.exps + other.exps)
        return PowerProduct(self.coeff * Fraction(other), self.exps)

    __rmul__ = __mul__

    def __truediv__(self, other) -> "PowerProduct":
        if isinstance(other, PowerProduct):
            return self * other ** -1
        return PowerProduct(self.coeff / Fraction(other), self.exps)

    def __rtruediv__(self, other) -> "PowerProduct":
        return PowerProduct(Fraction(other), ()) / self

    def __pow__(self, e) -> "PowerProduct":
        e = Fraction(e)
        cnum, cden = self.coeff.numerator, self.coeff.denominator
        return PowerProduct(
            1,
            ((cnum, e), (cden, -e)) + tuple((p, pe * e) for p, pe in self.exps),
        )

    def sqrt(self) -> "PowerProduct":
        return self ** Fraction(1, 2)

    def __float__(self) -> float:
        v = float(self.coeff)
        for p, e in self.exps:
            v *= math.pow(p, float(e))
        return v

    def _cmp_key_against(self, other: "PowerProduct"):
        """Return (a, b) rationals with self <= other iff a <= b, exactly."""
        ratio = self / other
        denoms = [e.denominator for _, e in ratio.exps]
        lcm = 1
        for d in denoms:
            lcm = lcm * d // math.gcd(lcm, d)
        powed = ratio ** lcm
        return powed.as_fraction(), Fraction(1)

    @staticmethod
    def coerce(value) -> "PowerProduct":
        if isinstance(value, PowerProduct):
            return value
        return PowerProduct(Fraction(value), ())

    def __le__(self, other) -> bool:
        a, b = self._cmp_key_against(PowerProduct.coerce(other))
        return a <= b

    def __lt__(self, other) -> bool:
        a, b = self._cmp_key_against(PowerProduct.coerce(other))
        return a < b

    def __ge__(self, other) -> bool:
        return not self < other

    def __gt__(self, other) -> bool:
        return not self <= other

    def __eq__(self, other) -> bool:
        if not isinstance(other, (PowerProduct, int, Fraction)):
            return NotImplemented
        other = PowerProduct.coerce(other)
        return self.coeff == other.coeff and self.exps == other.exps

    def __hash__(self):
        return hash((self.coeff, self.exps))

    def __repr__(self):
        if not self.exps:
            return f"PowerProduct({self.coeff})"
        parts = " * ".join(f"{p}^({e})" for p, e in self.exps)
        return f"PowerProduct({self.coeff} * {parts})"


ONE = PowerProduct(1)
