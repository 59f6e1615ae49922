"""PSL(2, Z): canonical matrices and their Moebius actions on ∂H and H.

A matrix and its negative are the same element; the stored representative
has ``c > 0``, or ``c == 0`` and ``d > 0``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Union

from .cfrac import ExtendedRational, as_ext
from .errors import DomainError

__all__ = [
    "ProjectiveMatrix",
    "UpperHalfPoint",
    "IDENTITY",
    "GENERATORS",
    "generator",
    "generator_index",
    "multiply",
    "inverse",
    "is_unit_neighbor",
    "mobius_real",
    "mobius_complex",
    "canonical_tuple",
]


def canonical_tuple(a: int, b: int, c: int, d: int) -> tuple:
    if c < 0 or (c == 0 and d < 0):
        return (-a, -b, -c, -d)
    return (a, b, c, d)


def _mul(m: tuple, n: tuple) -> tuple:
    a, b, c, d = m
    e, f, g, h = n
    return canonical_tuple(a * e + b * g, a * f + b * h, c * e + d * g, c * f + d * h)


@dataclass(frozen=True)
class ProjectiveMatrix:
    """Element ±[[a, b], [c, d]] of PSL(2, Z), stored in canonical sign form."""

    a: int
    b: int
    c: int
    d: int

    def __post_init__(self):
        a, b, c, d = (int(v) for v in (self.a, self.b, self.c, self.d))
        if a * d - b * c != 1:
            raise DomainError(f"determinant of {(a, b, c, d)} is not 1")
        a, b, c, d = canonical_tuple(a, b, c, d)
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "c", c)
        object.__setattr__(self, "d", d)

    @classmethod
    def _from_tuple(cls, t: tuple) -> "ProjectiveMatrix":
        # t is already canonical with determinant 1
        m = object.__new__(cls)
        object.__setattr__(m, "a", t[0])
        object.__setattr__(m, "b", t[1])
        object.__setattr__(m, "c", t[2])
        object.__setattr__(m, "d", t[3])
        return m

    @property
    def entries(self) -> tuple:
        return (self.a, self.b, self.c, self.d)

    def __matmul__(self, other: "ProjectiveMatrix") -> "ProjectiveMatrix":
        return multiply(self, other)

    def __call__(self, x):
        if isinstance(x, UpperHalfPoint):
            return mobius_complex(self, x)
        return mobius_real(self, x)

    def to_json(self) -> str:
        return json.dumps([str(v) for v in self.entries])

    @classmethod
    def from_json(cls, text: str) -> "ProjectiveMatrix":
        vals = json.loads(text)
        if len(vals) != 4:
            raise DomainError("matrix JSON must hold four entries")
        return cls(*(int(v) for v in vals))

    def label(self) -> str:
        return ",".join(str(v) for v in self.entries)

    def __str__(self) -> str:
        return f"[[{self.a}, {self.b}], [{self.c}, {self.d}]]"


IDENTITY = ProjectiveMatrix(1, 0, 0, 1)

# E_0 .. E_8, the nine unit neighbours of the identity
_GENERATOR_ENTRIES = (
    (0, -1, 1, 0),
    (1, 1, 0, 1),
    (1, -1, 0, 1),
    (1, -1, 1, 0),
    (-1, -1, 1, 0),
    (1, 0, 1, 1),
    (1, 0, -1, 1),
    (0, -1, 1, 1),
    (0, -1, 1, -1),
)
GENERATORS = tuple(ProjectiveMatrix(*e) for e in _GENERATOR_ENTRIES)
GENERATOR_TUPLES = tuple(g.entries for g in GENERATORS)
_INDEX_OF = {g: i for i, g in enumerate(GENERATORS)}


def generator(i: int) -> ProjectiveMatrix:
    if not 0 <= i <= 8:
        raise DomainError(f"generator index {i} outside 0..8")
    return GENERATORS[i]


def generator_index(m: ProjectiveMatrix):
    """Index i with m == E_i, or None."""
    return _INDEX_OF.get(m)


def multiply(m: ProjectiveMatrix, n: ProjectiveMatrix) -> ProjectiveMatrix:
    return ProjectiveMatrix._from_tuple(_mul(m.entries, n.entries))


def inverse(m: ProjectiveMatrix) -> ProjectiveMatrix:
    return ProjectiveMatrix._from_tuple(canonical_tuple(m.d, -m.b, -m.c, m.a))


def is_unit_neighbor(m: ProjectiveMatrix) -> bool:
    """True iff tr(M M^T) <= 3 and M is not the identity."""
    return m.a * m.a + m.b * m.b + m.c * m.c + m.d * m.d <= 3 and m != IDENTITY


def _act(t: tuple, p: int, q: int) -> tuple:
    a, b, c, d = t
    return a * p + b * q, c * p + d * q


def mobius_real(m: ProjectiveMatrix, x) -> ExtendedRational:
    """h_M(x) on Q ∪ {∞}; exact, poles map to ∞."""
    x = as_ext(x)
    p, q = _act(m.entries, x.num, x.den)
    return ExtendedRational._raw(p, q)


@dataclass(frozen=True)
class UpperHalfPoint:
    """Point re + i·im of H. Coordinates are Fractions (exact) or floats."""

    re: Union[Fraction, float]
    im: Union[Fraction, float]

    def __post_init__(self):
        re, im = self.re, self.im
        if isinstance(re, int):
            re = Fraction(re)
        if isinstance(im, int):
            im = Fraction(im)
        if not im > 0:
            raise DomainError(f"imaginary part must be positive, got {im}")
        object.__setattr__(self, "re", re)
        object.__setattr__(self, "im", im)

    @property
    def is_exact(self) -> bool:
        return isinstance(self.re, Fraction) and isinstance(self.im, Fraction)

    @classmethod
    def from_complex(cls, z: complex) -> "UpperHalfPoint":
        return cls(float(z.real), float(z.imag))

    def __complex__(self) -> complex:
        return complex(float(self.re), float(self.im))

    def abs2(self):
        return self.re * self.re + self.im * self.im

    def __str__(self) -> str:
        return f"{self.re} {self.im}"


def mobius_complex(m: ProjectiveMatrix, z: UpperHalfPoint) -> UpperHalfPoint:
    """h_M(z) for z in H; exact on rational coordinates."""
    a, b, c, d = m.entries
    x, y = z.re, z.im
    cx_d = c * x + d
    cy = c * y
    den = cx_d * cx_d + cy * cy
    re = ((a * x + b) * cx_d + a * cy * y) / den
    im = y / den
    return UpperHalfPoint(re, im)
