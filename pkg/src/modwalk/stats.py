"""Exact small-n laws, empirical distributions, KS distances and Fourier estimates."""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Optional

import numpy as np
from scipy.stats import chi2_contingency

from .cfrac import ExtendedRational, as_ext
from .chains import _C, _H, _h
from .errors import DomainError, ResourceLimitError
from .minkowski import chi_half, lambda_cdf, qmark, qmark_float

__all__ = [
    "FiniteDistribution",
    "EmpiricalDistribution",
    "KSResult",
    "GeometricCheck",
    "exact_distribution_W",
    "exact_distribution_X",
    "ks_distance",
    "reference_cdf",
    "fourier_coefficient",
    "fourier_coefficients",
    "geometric_pmf_check",
    "split_integer_part",
    "MAX_W_STEPS",
    "MAX_X_STEPS",
]

MAX_W_STEPS = 12
MAX_X_STEPS = 7
_RHO_NUM = (1, 2, 2, 2, 2)


@dataclass(frozen=True)
class FiniteDistribution:
    """Exact law with finitely many atoms; support sorted, weights sum to 1."""

    support: tuple  # ((ExtendedRational, Fraction), ...)

    @classmethod
    def from_weights(cls, weights: dict) -> "FiniteDistribution":
        items = []
        for v, w in weights.items():
            w = Fraction(w)
            if w < 0:
                raise DomainError("negative weight")
            if w:
                items.append((as_ext(v), w))
        items.sort(key=lambda t: t[0])
        if sum(w for _, w in items) != 1:
            raise DomainError("weights must sum to 1")
        return cls(tuple(items))

    def as_dict(self) -> dict:
        return dict(self.support)

    def pushforward(self, f: Callable) -> "FiniteDistribution":
        acc: dict = {}
        for v, w in self.support:
            fv = as_ext(f(v))
            acc[fv] = acc.get(fv, 0) + w
        return FiniteDistribution.from_weights(acc)

    def cdf_below(self, x) -> Fraction:
        """Pr(V < x)."""
        x = as_ext(x)
        return sum((w for v, w in self.support if v < x), Fraction(0))

    def __len__(self) -> int:
        return len(self.support)

    def __str__(self) -> str:
        return "{" + ", ".join(f"{v}: {w}" for v, w in self.support) + "}"


def exact_distribution_W(w0, n: int) -> FiniteDistribution:
    """Law of W_n started at w0, by enumeration of the rho-weighted interval maps."""
    w0 = as_ext(w0)
    if w0.den == 0 or not 0 <= w0.num <= w0.den:
        raise DomainError("w0 must lie in [0, 1]")
    if n < 0:
        raise DomainError("n must be non-negative")
    if n > MAX_W_STEPS:
        raise ResourceLimitError(f"n = {n} exceeds the enumeration limit {MAX_W_STEPS}")
    # integer weights over the common denominator 9**n; dedup by exact value
    layer = {(w0.num, w0.den): 1}
    for _ in range(n):
        nxt: dict = {}
        for (p, q), wt in layer.items():
            for i, r in enumerate(_RHO_NUM):
                key = _H(i, p, q)
                nxt[key] = nxt.get(key, 0) + wt * r
        layer = nxt
    den = 9**n
    return FiniteDistribution.from_weights(
        {ExtendedRational._raw(p, q): Fraction(wt, den) for (p, q), wt in layer.items()}
    )


def exact_distribution_X(x0, n: int) -> FiniteDistribution:
    """Law of X_n started at x0, over all 9**n equally likely generator words."""
    x0 = as_ext(x0)
    if n < 0:
        raise DomainError("n must be non-negative")
    if n > MAX_X_STEPS:
        raise ResourceLimitError(f"n = {n} exceeds the enumeration limit {MAX_X_STEPS}")
    layer = {(x0.num, x0.den): 1}
    for _ in range(n):
        nxt: dict = {}
        for (p, q), wt in layer.items():
            for i in range(9):
                key = _h(i, p, q)
                nxt[key] = nxt.get(key, 0) + wt
        layer = nxt
    den = 9**n
    return FiniteDistribution.from_weights(
        {ExtendedRational._raw(p, q): Fraction(wt, den) for (p, q), wt in layer.items()}
    )


def project_distribution(dist: FiniteDistribution) -> FiniteDistribution:
    """Push a law on the extended line through C(x) = min(|x|, 1/|x|)."""
    return dist.pushforward(lambda v: ExtendedRational._raw(*_C(v.num, v.den)))


__all__.append("project_distribution")


class EmpiricalDistribution:
    """Sorted samples, exact (ExtendedRational) or float."""

    def __init__(self, samples: Iterable):
        vals = list(samples)
        if not vals:
            raise DomainError("an empirical distribution needs at least one sample")
        self.exact = not isinstance(vals[0], (float, np.floating))
        if self.exact:
            vals = [as_ext(v) for v in vals]
        else:
            vals = [float(v) for v in vals]
        vals.sort()
        self.samples = vals

    @property
    def count(self) -> int:
        return len(self.samples)

    def __len__(self) -> int:
        return len(self.samples)

    def ecdf(self, x) -> float:
        """Pr(sample <= x)."""
        import bisect

        return bisect.bisect_right(self.samples, x if not self.exact else as_ext(x)) / self.count

    def as_array(self) -> np.ndarray:
        return np.array([float(v) for v in self.samples])


@dataclass(frozen=True)
class KSResult:
    statistic: float
    count: int
    reference: str
    exact_statistic: Optional[Fraction] = None


def _chi_float(y: float) -> float:
    if math.isinf(y):
        return 0.0
    if y <= 1.0:
        return 1.0 - qmark_float(y) / 2.0
    return qmark_float(1.0 / y) / 2.0


def _qmark_cdf_exact(v):
    if v.den == 0 or v.num < 0 or v.num > v.den:
        raise DomainError(f"? is a CDF on [0, 1]; sample {v} is outside")
    return qmark(v).to_fraction()


def _qmark_cdf_float(v):
    if not 0.0 <= v <= 1.0:
        raise DomainError(f"? is a CDF on [0, 1]; sample {v} is outside")
    return qmark_float(v)


def _chi_cdf_exact(v):
    if v.den != 0 and v.num < 0:
        raise DomainError(f"chi_1/2 is a survival function on [0, ∞); sample {v} is negative")
    return 1 - chi_half(v).to_fraction()


def _chi_cdf_float(v):
    if v < 0:
        raise DomainError(f"chi_1/2 is a survival function on [0, ∞); sample {v} is negative")
    return 1.0 - _chi_float(v)


def _lambda_cdf_float(v):
    if math.isinf(v):
        return 1.0
    if v >= 0:
        return 1.0 - _chi_float(v) / 2.0
    return _chi_float(-v) / 2.0


_REFERENCES = {
    "qmark": (_qmark_cdf_exact, _qmark_cdf_float),
    "chi-half-survival": (_chi_cdf_exact, _chi_cdf_float),
    "lambda": (lambda v: lambda_cdf(v).to_fraction(), _lambda_cdf_float),
}


def reference_cdf(name: str, exact: bool = True) -> Callable:
    try:
        pair = _REFERENCES[name]
    except KeyError:
        raise DomainError(f"unknown reference {name!r}; choose from {sorted(_REFERENCES)}") from None
    return pair[0] if exact else pair[1]


def ks_distance(emp: EmpiricalDistribution, ref: str = "qmark") -> KSResult:
    """sup |ECDF - F| over the sample points, checking both sides of each jump.

    F is continuous, so the sup is attained at a sample value v from either
    the left limit (count below v) or the right (count up to v). Exact samples
    give an exact statistic.
    """
    F = reference_cdf(ref, emp.exact)
    n = emp.count
    counts = Counter(emp.samples)
    below = 0
    if emp.exact:
        best = Fraction(0)
        for v in sorted(counts):
            fv = F(v)
            upto = below + counts[v]
            best = max(best, Fraction(upto, n) - fv, fv - Fraction(below, n))
            below = upto
        return KSResult(float(best), n, ref, best)
    best = 0.0
    for v in sorted(counts):
        fv = F(v)
        upto = below + counts[v]
        best = max(best, upto / n - fv, fv - below / n)
        below = upto
    return KSResult(best, n, ref)


def _as_float_array(samples) -> np.ndarray:
    if isinstance(samples, EmpiricalDistribution):
        return samples.as_array()
    return np.asarray([float(v) for v in samples], dtype=float)


def fourier_coefficient(n: int, samples) -> complex:
    """(1/N) sum_j exp(2 pi i n x_j)."""
    if n == 0:
        return complex(1.0, 0.0)
    x = _as_float_array(samples)
    return complex(np.mean(np.exp(2j * np.pi * n * x)))


def fourier_coefficients(n_max: int, samples, chunk: int = 1 << 16) -> np.ndarray:
    """Coefficients for n = 0..n_max; entry 0 is exactly 1."""
    x = _as_float_array(samples)
    acc = np.zeros(n_max + 1, dtype=complex)
    ns = np.arange(1, n_max + 1)
    for lo in range(0, x.size, chunk):
        part = x[lo : lo + chunk]
        acc[1:] += np.exp(2j * np.pi * np.outer(ns, part)).sum(axis=1)
    acc[1:] /= x.size
    acc[0] = 1.0
    return acc


def split_integer_part(values) -> tuple:
    """(floor(y) + 1, y - floor(y)) for each sample y >= 0."""
    ks, fracs = [], []
    for y in values:
        if isinstance(y, float):
            f = math.floor(y)
            ks.append(f + 1)
            fracs.append(y - f)
        else:
            y = as_ext(y)
            f = y.num // y.den
            ks.append(f + 1)
            fracs.append(ExtendedRational._raw(y.num - f * y.den, y.den))
    return ks, fracs


@dataclass
class GeometricCheck:
    pmf: dict
    deviations: dict  # n -> |pmf(n) - 2**-n| for n = 1..n_max
    chi2: float = math.nan
    p_value: float = math.nan
    dof: int = 0

    def max_deviation(self, upto: int) -> float:
        return max(self.deviations[n] for n in range(1, upto + 1))


# ?-quartiles of the fractional part: ?(1/3) = 1/4, ?(1/2) = 1/2, ?(2/3) = 3/4
_QUARTILE_CUTS = (Fraction(1, 3), Fraction(1, 2), Fraction(2, 3))


def _quartile(f) -> int:
    if isinstance(f, float):
        return sum(f >= float(c) for c in _QUARTILE_CUTS)
    return sum(f >= c for c in _QUARTILE_CUTS)


def geometric_pmf_check(ks, fractional=None, n_max: int = 8, k_groups: int = 4) -> GeometricCheck:
    """Empirical pmf of K against 2**-n, plus a chi-square independence test
    between K (grouped as 1, 2, ..., k_groups - 1, >= k_groups) and the
    ?-quartile of the fractional part, when that is given.
    """
    ks = [int(k) for k in ks]
    if not ks:
        raise DomainError("no samples")
    n = len(ks)
    counts = Counter(ks)
    pmf = {k: counts[k] / n for k in sorted(counts)}
    devs = {m: abs(pmf.get(m, 0.0) - 2.0**-m) for m in range(1, n_max + 1)}
    out = GeometricCheck(pmf, devs)
    if fractional is None:
        return out
    table = np.zeros((k_groups, 4), dtype=np.int64)
    for k, f in zip(ks, fractional):
        table[min(k, k_groups) - 1, _quartile(f)] += 1
    table = table[table.sum(axis=1) > 0][:, table.sum(axis=0) > 0]
    if table.shape[0] < 2 or table.shape[1] < 2:
        return out
    res = chi2_contingency(table, correction=False)
    out.chi2, out.p_value, out.dof = float(res[0]), float(res[1]), int(res[2])
    return out
