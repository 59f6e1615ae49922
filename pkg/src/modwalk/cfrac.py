"""Exact extended rationals and finite continued fractions.

``ExtendedRational`` is the single exact scalar used across the package: a
reduced fraction ``num/den`` with ``den >= 0``, where ``1/0`` is the point at
infinity. Unimodular Moebius maps send coprime pairs to coprime pairs, so the
walk code can work on raw ``(num, den)`` tuples and skip the gcd entirely.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational
from typing import Iterable, Sequence, Union

from .errors import DegenerateInputError, DomainError

__all__ = [
    "ExtendedRational",
    "INF",
    "ContinuedFraction",
    "as_ext",
    "expand",
    "expand_unit",
    "evaluate",
    "apply_A",
    "convergents",
    "shift_decrement",
    "reciprocal_cf",
    "partial_quotients",
]


class ExtendedRational:
    """A point of the extended rational line Q ∪ {∞}. Treat as immutable."""

    __slots__ = ("num", "den")

    def __init__(self, num: int, den: int = 1):
        num, den = int(num), int(den)
        if den == 0:
            if num == 0:
                raise DomainError("0/0 is not an extended rational")
            num = 1
        else:
            if den < 0:
                num, den = -num, -den
            g = math.gcd(num, den)
            if g != 1:
                num //= g
                den //= g
        self.num = num
        self.den = den

    @classmethod
    def _raw(cls, num: int, den: int) -> "ExtendedRational":
        # caller guarantees gcd(num, den) == 1; only the sign is fixed here
        if den < 0 or (den == 0 and num < 0):
            num, den = -num, -den
        self = object.__new__(cls)
        self.num = num
        self.den = den
        return self

    def __reduce__(self):
        return (ExtendedRational, (self.num, self.den))

    @classmethod
    def parse(cls, text: str) -> "ExtendedRational":
        """Parse ``"p/q"``, an integer string, or ``"inf"``."""
        s = text.strip()
        if s.lower() in ("inf", "+inf", "-inf", "infinity", "∞"):
            return INF
        try:
            if "/" in s:
                p, q = s.split("/")
                p, q = int(p), int(q)
            else:
                p, q = int(s), 1
        except ValueError:
            raise DomainError(f"malformed rational {text!r}") from None
        if q == 0:
            if p == 0:
                raise DomainError(f"malformed rational {text!r}")
            return INF
        return cls(p, q)

    # -- queries -----------------------------------------------------------

    @property
    def is_infinite(self) -> bool:
        return self.den == 0

    def to_fraction(self) -> Fraction:
        if self.den == 0:
            raise DomainError("∞ has no Fraction value")
        return Fraction(self.num, self.den)

    def __float__(self) -> float:
        if self.den == 0:
            return math.inf
        return self.num / self.den

    def __floor__(self) -> int:
        if self.den == 0:
            raise DomainError("floor of ∞")
        return self.num // self.den

    # -- arithmetic --------------------------------------------------------

    def __neg__(self) -> "ExtendedRational":
        if self.den == 0:
            return self
        return ExtendedRational._raw(-self.num, self.den)

    def __abs__(self) -> "ExtendedRational":
        if self.num >= 0:
            return self
        return ExtendedRational._raw(-self.num, self.den)

    def reciprocal(self) -> "ExtendedRational":
        """1/x with 1/0 = ∞ and 1/∞ = 0."""
        if self.num == 0:
            return INF
        return ExtendedRational._raw(self.den, self.num)

    def _finite_binop(self, other, op):
        o = as_ext(other)
        if self.den == 0 or o.den == 0:
            raise DomainError("arithmetic with ∞ is undefined")
        r = op(Fraction(self.num, self.den), Fraction(o.num, o.den))
        return ExtendedRational._raw(r.numerator, r.denominator)

    def __add__(self, other):
        return self._finite_binop(other, lambda a, b: a + b)

    __radd__ = __add__

    def __sub__(self, other):
        return self._finite_binop(other, lambda a, b: a - b)

    def __rsub__(self, other):
        return self._finite_binop(other, lambda a, b: b - a)

    def __mul__(self, other):
        return self._finite_binop(other, lambda a, b: a * b)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = as_ext(other)
        if o.num == 0:
            raise ZeroDivisionError("division by zero")
        return self._finite_binop(o, lambda a, b: a / b)

    def __rtruediv__(self, other):
        return as_ext(other).__truediv__(self)

    # -- comparison (∞ is the largest element) -----------------------------

    def _key_cmp(self, other) -> int:
        o = as_ext(other)
        if self.den == 0 or o.den == 0:
            return (self.den == 0) - (o.den == 0)
        lhs, rhs = self.num * o.den, o.num * self.den
        return (lhs > rhs) - (lhs < rhs)

    def __eq__(self, other):
        try:
            o = as_ext(other)
        except (TypeError, DomainError):
            return NotImplemented
        return self.num == o.num and self.den == o.den

    def __hash__(self):
        if self.den == 0:
            return hash(math.inf)
        return hash(Fraction(self.num, self.den))

    def __lt__(self, other):
        return self._key_cmp(other) < 0

    def __le__(self, other):
        return self._key_cmp(other) <= 0

    def __gt__(self, other):
        return self._key_cmp(other) > 0

    def __ge__(self, other):
        return self._key_cmp(other) >= 0

    def __str__(self) -> str:
        if self.den == 0:
            return "inf"
        if self.den == 1:
            return str(self.num)
        return f"{self.num}/{self.den}"

    def __repr__(self) -> str:
        return f"ExtendedRational({self})"


INF = ExtendedRational._raw(1, 0)

RationalLike = Union[ExtendedRational, Rational, int, str]


def as_ext(x: RationalLike) -> ExtendedRational:
    """Coerce ints, Fractions and ``"p/q"`` strings to ``ExtendedRational``."""
    if isinstance(x, ExtendedRational):
        return x
    if isinstance(x, bool):
        raise TypeError("bool is not a rational")
    if isinstance(x, int):
        return ExtendedRational._raw(x, 1)
    if isinstance(x, Rational):
        return ExtendedRational._raw(int(x.numerator), int(x.denominator))
    if isinstance(x, str):
        return ExtendedRational.parse(x)
    if isinstance(x, float):
        if math.isinf(x):
            return INF
        f = Fraction(x)
        return ExtendedRational._raw(f.numerator, f.denominator)
    raise TypeError(f"cannot interpret {x!r} as an extended rational")


@dataclass(frozen=True)
class ContinuedFraction:
    """``head + 1/(tail[0] + 1/(tail[1] + ...))`` with a finite tail.

    Canonical form: ``head >= 0``, tail entries ``>= 1`` and the last tail
    entry ``>= 2``. The one allowed exception is ``[0; 1]``, the unit-interval
    expansion of 1.
    """

    head: int
    tail: tuple = ()

    def __post_init__(self):
        tail = tuple(int(k) for k in self.tail)
        object.__setattr__(self, "tail", tail)
        if self.head < 0:
            raise DomainError("head must be non-negative")
        if any(k < 1 for k in tail):
            raise DomainError("tail entries must be positive")

    @property
    def is_canonical(self) -> bool:
        if not self.tail:
            return True
        if self.tail[-1] >= 2:
            return True
        return self.head == 0 and self.tail == (1,)

    @property
    def value(self) -> ExtendedRational:
        return evaluate(self)

    def to_list(self) -> list:
        return [self.head, *self.tail]

    def to_json(self) -> str:
        return json.dumps(self.to_list())

    @classmethod
    def from_list(cls, items: Sequence[int]) -> "ContinuedFraction":
        items = list(items)
        if not items:
            raise DomainError("empty continued fraction")
        return cls(int(items[0]), tuple(items[1:]))

    @classmethod
    def from_json(cls, text: str) -> "ContinuedFraction":
        return cls.from_list(json.loads(text))

    def __str__(self) -> str:
        return f"[{self.head}; {', '.join(map(str, self.tail))}]"


def partial_quotients(p: int, q: int) -> list:
    """Euclidean partial quotients of p/q (p >= 0, q > 0), head included."""
    out = []
    while q:
        k, r = divmod(p, q)
        out.append(k)
        p, q = q, r
    return out


def expand(x: RationalLike) -> ContinuedFraction:
    """Canonical finite expansion of a positive finite rational."""
    x = as_ext(x)
    if x.den == 0 or x.num <= 0:
        raise DomainError(f"expand needs 0 < x < ∞, got {x}")
    ks = partial_quotients(x.num, x.den)
    return ContinuedFraction(ks[0], tuple(ks[1:]))


def expand_unit(x: RationalLike) -> ContinuedFraction:
    """Expansion ``[0; k_1, ..., k_m]`` of x in [0, 1]; 1 gives ``[0; 1]``, 0 gives ``[0;]``."""
    x = as_ext(x)
    if x.den == 0 or x.num < 0 or x.num > x.den:
        raise DomainError(f"expand_unit needs 0 <= x <= 1, got {x}")
    if x.num == x.den:
        return ContinuedFraction(0, (1,))
    ks = partial_quotients(x.num, x.den)
    return ContinuedFraction(0, tuple(ks[1:]))


def apply_A(k: int, w: RationalLike) -> ExtendedRational:
    """The contraction w ↦ 1/(k + w)."""
    if k < 1:
        raise DomainError("k must be a positive integer")
    w = as_ext(w)
    return ExtendedRational._raw(w.den, k * w.den + w.num)


def evaluate(cf: ContinuedFraction, w: RationalLike = 0) -> ExtendedRational:
    """Exact value of ``head + A_{k_1} ∘ ... ∘ A_{k_m}(w)``."""
    w = as_ext(w)
    if w.den == 0 or w.num < 0 or w.num > w.den:
        raise DomainError("tail parameter w must lie in [0, 1]")
    p, q = w.num, w.den
    for k in reversed(cf.tail):
        p, q = q, k * q + p
    return ExtendedRational._raw(cf.head * q + p, q)


def convergents(cf: ContinuedFraction) -> tuple:
    """Values of the successive truncations ``[k_0; k_1..k_n]``.

    The bare head is skipped when it is 0 and a tail exists, so an expansion
    of a point of (0, 1) starts at ``1/k_1``.
    """
    out = []
    p0, q0 = 1, 0
    p1, q1 = cf.head, 1
    if cf.head != 0 or not cf.tail:
        out.append(ExtendedRational._raw(p1, q1))
    for k in cf.tail:
        p0, q0, p1, q1 = p1, q1, k * p1 + p0, k * q1 + q0
        out.append(ExtendedRational._raw(p1, q1))
    return tuple(out)


def _canonical(head: int, tail: Iterable[int]) -> ContinuedFraction:
    tail = list(tail)
    if tail and tail[-1] == 1 and not (head == 0 and len(tail) == 1):
        tail.pop()
        if tail:
            tail[-1] += 1
        else:
            head += 1
    if head == 0 and tail == [1]:
        # a value of exactly 1 reached by shifting: report it as [1;]
        return ContinuedFraction(1, ())
    return ContinuedFraction(head, tuple(tail))


def shift_decrement(cf: ContinuedFraction) -> ContinuedFraction:
    """Expansion of the tent image min(w/(1-w), (1-w)/w) of w = [0; k_1, k_2, ...].

    ``k_1 > 1`` gives ``[0; k_1 - 1, k_2, ...]``; ``k_1 = 1`` gives ``[0; k_2, ...]``.
    """
    if cf.head != 0 or not cf.tail:
        raise DegenerateInputError("shift_decrement needs a value in (0, 1]")
    k1, rest = cf.tail[0], cf.tail[1:]
    if k1 > 1:
        return _canonical(0, (k1 - 1, *rest))
    if not rest:
        raise DegenerateInputError("value 1 shifts to the endpoint 0")
    return _canonical(0, rest)


def reciprocal_cf(cf: ContinuedFraction) -> ContinuedFraction:
    """``1/[k_0; k_1, ...] = [0; k_0, k_1, ...]`` for ``k_0 >= 1``."""
    if cf.head < 1:
        raise DomainError("reciprocal_cf needs head >= 1; expand the exact reciprocal instead")
    return ContinuedFraction(0, (cf.head, *cf.tail))
