"""Minkowski's question mark function and the laws built from it.

At a rational ``x = [0; k_1, ..., k_m]`` the value is the finite alternating
sum ``2 * sum_n (-1)**(n+1) * 2**-(k_1 + ... + k_n)``, an exact dyadic. The
Stern-Brocot bisection in :func:`qmark_oracle` computes the same values by a
completely separate route and is what the tests trust.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational
from typing import Sequence

import numpy as np

from .cfrac import ExtendedRational, as_ext, partial_quotients
from .errors import DomainError

__all__ = [
    "DyadicRational",
    "ValueBracket",
    "HOLDER_EXPONENT",
    "qmark",
    "qmark_float",
    "qmark_oracle",
    "qmark_inverse",
    "qmark_bracket",
    "chi_half",
    "chi_half_series",
    "lambda_survival",
    "lambda_cdf",
    "kernel_pushforward_cdf",
    "holder_modulus",
    "fibonacci_holder_ratios",
]

GOLDEN = (1 + math.sqrt(5)) / 2
HOLDER_EXPONENT = math.log(2) / (2 * math.log(GOLDEN))


class DyadicRational:
    """Exact ``num / 2**exp``, reduced so that num is odd whenever exp > 0."""

    __slots__ = ("num", "exp")

    def __init__(self, num: int, exp: int = 0):
        if exp < 0:
            num, exp = num << -exp, 0
        if num == 0:
            exp = 0
        elif exp:
            tz = (num & -num).bit_length() - 1
            if tz:
                s = min(tz, exp)
                num >>= s
                exp -= s
        self.num = num
        self.exp = exp

    @classmethod
    def from_fraction(cls, f) -> "DyadicRational":
        f = Fraction(f)
        den = f.denominator
        if den & (den - 1):
            raise DomainError(f"{f} is not a dyadic rational")
        return cls(f.numerator, den.bit_length() - 1)

    def to_fraction(self) -> Fraction:
        return Fraction(self.num, 1 << self.exp)

    def __float__(self) -> float:
        return float(self.to_fraction())

    def scale(self, k: int) -> "DyadicRational":
        """Multiply by 2**k."""
        return DyadicRational(self.num, self.exp - k)

    def _align(self, other):
        if isinstance(other, int):
            other = DyadicRational(other)
        if not isinstance(other, DyadicRational):
            return None
        e = max(self.exp, other.exp)
        return self.num << (e - self.exp), other.num << (e - other.exp), e

    def __add__(self, other):
        al = self._align(other)
        if al is None:
            return NotImplemented
        return DyadicRational(al[0] + al[1], al[2])

    __radd__ = __add__

    def __sub__(self, other):
        al = self._align(other)
        if al is None:
            return NotImplemented
        return DyadicRational(al[0] - al[1], al[2])

    def __rsub__(self, other):
        al = self._align(other)
        if al is None:
            return NotImplemented
        return DyadicRational(al[1] - al[0], al[2])

    def __neg__(self):
        return DyadicRational(-self.num, self.exp)

    def __mul__(self, other):
        if isinstance(other, int):
            other = DyadicRational(other)
        if not isinstance(other, DyadicRational):
            return NotImplemented
        return DyadicRational(self.num * other.num, self.exp + other.exp)

    __rmul__ = __mul__

    def _cmp_value(self, other):
        if isinstance(other, DyadicRational):
            return self.to_fraction(), other.to_fraction()
        if isinstance(other, ExtendedRational):
            return self.to_fraction(), other.to_fraction()
        if isinstance(other, (int, Rational)):
            return self.to_fraction(), Fraction(other)
        return None

    def __eq__(self, other):
        if isinstance(other, DyadicRational):
            return self.num == other.num and self.exp == other.exp
        pair = self._cmp_value(other)
        if pair is None:
            return NotImplemented
        return pair[0] == pair[1]

    def __hash__(self):
        return hash(self.to_fraction())

    def __lt__(self, other):
        a, b = self._cmp_value(other)
        return a < b

    def __le__(self, other):
        a, b = self._cmp_value(other)
        return a <= b

    def __gt__(self, other):
        a, b = self._cmp_value(other)
        return a > b

    def __ge__(self, other):
        a, b = self._cmp_value(other)
        return a >= b

    def __str__(self) -> str:
        if self.exp == 0:
            return str(self.num)
        return f"{self.num}/2^{self.exp}"

    def __repr__(self) -> str:
        return f"DyadicRational({self.num}, {self.exp})"


@dataclass(frozen=True)
class ValueBracket:
    lo: DyadicRational
    hi: DyadicRational

    @property
    def width(self) -> DyadicRational:
        return self.hi - self.lo

    def __contains__(self, v) -> bool:
        return self.lo <= v <= self.hi


def _unit_pair(x) -> tuple:
    x = as_ext(x)
    if x.den == 0 or x.num < 0 or x.num > x.den:
        raise DomainError(f"expected a rational in [0, 1], got {x}")
    return x.num, x.den


def _qmark_quotients(ks: Sequence[int]) -> DyadicRational:
    # 2 * sum (-1)^(n+1) 2^-(k_1+..+k_n), summed over a common denominator
    total = sum(ks)
    acc = 0
    s = 0
    sign = 1
    for k in ks:
        s += k
        acc += sign << (total - s)
        sign = -sign
    return DyadicRational(acc, total - 1)


def qmark(x) -> DyadicRational:
    """?(x) for rational x in [0, 1], exactly."""
    p, q = _unit_pair(x)
    if p == 0:
        return DyadicRational(0)
    if p == q:
        return DyadicRational(1)
    return _qmark_quotients(partial_quotients(p, q)[1:])


def qmark_float(x: float) -> float:
    """?(x) for a float in [0, 1]; the series is cut once terms drop below 2**-1100."""
    if not 0.0 <= x <= 1.0:
        raise DomainError(f"expected x in [0, 1], got {x}")
    if x == 0.0:
        return 0.0
    f = Fraction(x)
    p, q = f.numerator, f.denominator
    out = 0.0
    s = 0
    sign = 2.0
    while p:
        k, r = divmod(q, p)
        s += k
        if s > 1100:
            break
        out += math.ldexp(sign, -s)
        sign = -sign
        p, q = r, p
    return out


def qmark_oracle(x) -> Fraction:
    """?(x) by bisecting the Stern-Brocot tree: a mediant gets the mean of its parents' values."""
    x = as_ext(x)
    p, q = _unit_pair(x)
    lp, lq, lv = 0, 1, Fraction(0)
    rp, rq, rv = 1, 1, Fraction(1)
    if p == 0:
        return lv
    if p == q:
        return rv
    while True:
        mp, mq = lp + rp, lq + rq
        mv = (lv + rv) / 2
        # compare p/q with mp/mq
        c = p * mq - mp * q
        if c == 0:
            return mv
        if c < 0:
            rp, rq, rv = mp, mq, mv
        else:
            lp, lq, lv = mp, mq, mv


def qmark_inverse(d) -> ExtendedRational:
    """The rational x in [0, 1] with ?(x) = d, for dyadic d.

    Uses ?(x/(1+x)) = ?(x)/2 and ?(1/(1+x)) = 1 - ?(x)/2: each maximal run of
    halvings becomes one Moebius factor, so the loop runs once per binary
    run of d rather than once per bit.
    """
    if not isinstance(d, DyadicRational):
        d = DyadicRational.from_fraction(d)
    if d.num < 0 or d > 1:
        raise DomainError(f"expected a dyadic in [0, 1], got {d}")
    # accumulated map x = T(y), stored as a 2x2 integer matrix
    a, b, c, e = 1, 0, 0, 1
    num, exp = d.num, d.exp
    while True:
        if num == 0:
            y = (0, 1)
            break
        if exp == 0:
            y = (1, 1)
            break
        if exp == 1:
            y = (1, 2)
            break
        half = 1 << (exp - 1)
        if num < half:
            # j halvings: d = ?(y) / 2**j with ?(y) >= 1/2 ... y/(1 + j y)
            j = exp - num.bit_length()
            a, b, c, e = a + b * j, b, c + e * j, e
            exp -= j
        else:
            # d = 1 - ?(y)/2  =>  x = 1/(1 + y)
            a, b, c, e = b, a + b, e, c + e
            num = (1 << exp) - num
            exp -= 1
            # num is odd so the new value stays reduced
    p, q = y
    return ExtendedRational(a * p + b * q, c * p + e * q)


def qmark_bracket(prefix: Sequence[int]) -> ValueBracket:
    """Range of ? over all x in (0, 1) whose expansion starts with ``prefix``."""
    ks = [int(k) for k in prefix]
    if not ks or any(k < 1 for k in ks):
        raise DomainError("prefix must be a non-empty sequence of positive integers")
    # x ranges over A_{k_1..k_n}([0, 1]); its endpoints are [k_1..k_n] and [k_1..k_n + 1]
    v1 = _qmark_quotients(ks)
    v2 = _qmark_quotients(ks[:-1] + [ks[-1] + 1])
    lo, hi = (v1, v2) if v1 <= v2 else (v2, v1)
    return ValueBracket(lo, hi)


def chi_half(y) -> DyadicRational:
    """Denjoy-Minkowski survival function of parameter 1/2 at rational y >= 0.

    ``1 - ?(y)/2`` below 1 and ``?(1/y)/2`` above; at 0 the left limit 1.
    """
    y = as_ext(y)
    if y.den == 0:
        return DyadicRational(0)
    if y.num < 0:
        raise DomainError(f"chi_half needs y >= 0, got {y}")
    if y.num <= y.den:
        return 1 - qmark(y).scale(-1)
    return qmark(y.reciprocal()).scale(-1)


def chi_half_series(y) -> DyadicRational:
    """The alternating series over ``[k_0; k_1, ...]`` summed over the finite expansion."""
    y = as_ext(y)
    if y.den == 0 or y.num <= 0:
        raise DomainError("chi_half_series needs 0 < y < ∞")
    ks = partial_quotients(y.num, y.den)
    total = sum(ks)
    acc, s, sign = 0, 0, 1
    for k in ks:
        s += k
        acc += sign << (total - s)
        sign = -sign
    return DyadicRational(acc, total)


def lambda_survival(x) -> DyadicRational:
    """Pr(X > x) under the stationary law of the boundary walk."""
    x = as_ext(x)
    if x.den == 0:
        return DyadicRational(0)
    if x.num >= 0:
        return chi_half(x).scale(-1)
    return 1 - chi_half(-x).scale(-1)


def lambda_cdf(x) -> DyadicRational:
    return 1 - lambda_survival(x)


def kernel_pushforward_cdf(w) -> Fraction:
    """Pr(H_I(W) < w) for W ~ ? and I ~ rho, expressed exactly through ?.

    Equal to ?(w) on (0, 1) because ? is stationary for the interval chain.
    """
    w = as_ext(w)
    p, q = _unit_pair(w)
    if p == 0:
        return Fraction(0)
    if p == q:
        return Fraction(1)
    Q = lambda a, b: qmark(ExtendedRational(a, b)).to_fraction()  # noqa: E731
    # H_0 = id
    f0 = Q(p, q)
    # H_1(W) = 1/(1+W) < w  <=>  W > (1-w)/w
    f1 = 1 - Q(q - p, p) if 2 * p > q else Fraction(0)
    # H_2(W) = 1 - W < w  <=>  W > 1 - w
    f2 = 1 - Q(q - p, q)
    # H_3(W) < w  <=>  W < w/(1+w) or W > 1/(1+w)
    f3 = Q(p, p + q) + 1 - Q(q, p + q)
    # H_4(W) = W/(1+W) < w  <=>  W < w/(1-w)
    f4 = Q(p, q - p) if 2 * p < q else Fraction(1)
    return Fraction(1, 9) * f0 + Fraction(2, 9) * (f1 + f2 + f3 + f4)


def holder_modulus(samples: int, scale, seed: int = 0, alpha: float = HOLDER_EXPONENT) -> float:
    """Empirical sup of |?(x) - ?(x')| / |x - x'|**alpha over random pairs with |x - x'| <= scale.

    Points are drawn as rationals with denominator 2**40 so that ? is
    evaluated exactly before the ratio is taken in floating point.
    """
    if samples < 1:
        raise DomainError("samples must be positive")
    scale = Fraction(scale)
    if scale <= 0:
        raise DomainError("scale must be positive")
    rng = np.random.default_rng(seed)
    den = 1 << 40
    span = max(1, int(scale * den))
    xs = rng.integers(0, den - span, size=samples, endpoint=True)
    gaps = rng.integers(1, span, size=samples, endpoint=True)
    best = 0.0
    for x, g in zip(xs.tolist(), gaps.tolist()):
        lo = qmark(ExtendedRational(x, den))
        hi = qmark(ExtendedRational(x + g, den))
        ratio = float(hi - lo) / (g / den) ** alpha
        best = max(best, ratio)
    return best


def fibonacci_holder_ratios(n: int, alpha: float = HOLDER_EXPONENT) -> list:
    """Ratios |?(x) - ?(x')| / |x - x'|**alpha at consecutive convergents F_k/F_{k+1} of φ - 1."""
    fib = [1, 1]
    while len(fib) < n + 3:
        fib.append(fib[-1] + fib[-2])
    out = []
    for k in range(1, n + 1):
        x = ExtendedRational(fib[k], fib[k + 1])
        x2 = ExtendedRational(fib[k + 1], fib[k + 2])
        dq = abs(float(qmark(x2) - qmark(x)))
        dx = abs(float(x2 - x))
        out.append(dq / dx**alpha)
    return out
