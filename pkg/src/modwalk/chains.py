"""Seeded simulation of the walks driven by i.i.d. uniform generators E_0..E_8.

Boundary chains (X, Y, W, U) default to exact arithmetic on coprime integer
pairs; the interior chains (Z, V) default to floating point. Each trajectory
``j`` draws from its own stream keyed by ``(seed, j)``.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from . import _rng
from .cfrac import ExtendedRational, as_ext
from .errors import DomainError
from .psl2z import GENERATOR_TUPLES, UpperHalfPoint

__all__ = [
    "WalkConfig",
    "WalkResult",
    "StationarySample",
    "CLASS_OF_GENERATOR",
    "NEGATION_PAIR",
    "INVERSION_PAIR",
    "RIGHT_INVERSION_PAIR",
    "RHO",
    "interval_map",
    "classify_generator",
    "project_C",
    "lift",
    "gamma_relabel",
    "coupled_step",
    "walk_X",
    "walk_Y",
    "walk_Z",
    "walk_V",
    "walk_W",
    "walk_U",
    "walk_coupled",
    "simulate",
    "simulate_X",
    "simulate_Y",
    "simulate_Z",
    "simulate_V",
    "simulate_W",
    "simulate_U",
    "simulate_coupled",
    "sample_stationary_W",
    "sample_stationary_Y",
    "sample_stationary_X",
]

# I = class(i): 0->0, 1..4 -> themselves, and 7->1, 8->2, 6->3, 5->4
CLASS_OF_GENERATOR = (0, 1, 2, 3, 4, 4, 3, 1, 2)
RHO = (Fraction(1, 9), Fraction(2, 9), Fraction(2, 9), Fraction(2, 9), Fraction(2, 9))

# h_i(-x) = -h_{NEGATION_PAIR[i]}(x)
NEGATION_PAIR = (0, 2, 1, 4, 3, 6, 5, 8, 7)
# h_i(-1/x) = -1/h_{INVERSION_PAIR[i]}(x)
INVERSION_PAIR = (0, 6, 5, 7, 8, 2, 1, 3, 4)
# h_i(-1/x) = h_{RIGHT_INVERSION_PAIR[i]}(x), i.e. E_i E_0 = E_j (undefined for i = 0)
RIGHT_INVERSION_PAIR = (None, 3, 4, 1, 2, 8, 7, 6, 5)

# Relabelings for x = g(C(x)); keyed by which g in Gamma carries C(x) to x.
_RELABEL = {
    "id": tuple(range(9)),
    "neg": NEGATION_PAIR,
    "neginv": INVERSION_PAIR,
    "inv": tuple(INVERSION_PAIR[NEGATION_PAIR[i]] for i in range(9)),
}
_COUPLED_CLASS = {k: tuple(CLASS_OF_GENERATOR[t[i]] for i in range(9)) for k, t in _RELABEL.items()}

POLE_TOLERANCE = 1e-12


# -- raw pair kernels ------------------------------------------------------


def _h(i: int, p: int, q: int) -> tuple:
    a, b, c, d = GENERATOR_TUPLES[i]
    p, q = a * p + b * q, c * p + d * q
    if q < 0 or (q == 0 and p < 0):
        return -p, -q
    return p, q


def _H(i: int, p: int, q: int) -> tuple:
    if i == 0:
        return p, q
    if i == 1:
        return q, p + q
    if i == 2:
        return q - p, q
    if i == 3:
        return (p, q - p) if 2 * p <= q else (q - p, p)
    if i == 4:
        return p, p + q
    raise DomainError(f"interval map index {i} outside 0..4")


def _C(p: int, q: int) -> tuple:
    if p < 0:
        p = -p
    return (p, q) if p <= q else (q, p)


def _gamma_kind(p: int, q: int) -> str:
    if q == 0:
        return "inv"
    if p >= 0:
        return "id" if p <= q else "inv"
    return "neg" if -p <= q else "neginv"


def _unit(w) -> ExtendedRational:
    w = as_ext(w)
    if w.den == 0 or w.num < 0 or w.num > w.den:
        raise DomainError(f"expected a value in [0, 1], got {w}")
    return w


# -- single-step maps ------------------------------------------------------


def interval_map(i: int, w) -> ExtendedRational:
    """H_i(w): identity, 1/(1+w), 1-w, the tent min(w/(1-w), (1-w)/w), w/(1+w)."""
    w = _unit(w)
    return ExtendedRational._raw(*_H(i, w.num, w.den))


def classify_generator(i: int) -> int:
    if not 0 <= i <= 8:
        raise DomainError(f"generator index {i} outside 0..8")
    return CLASS_OF_GENERATOR[i]


def project_C(x) -> ExtendedRational:
    """min(|x|, 1/|x|), with C(0) = C(∞) = 0."""
    x = as_ext(x)
    return ExtendedRational._raw(*_C(x.num, x.den))


def lift(w, signs: tuple) -> ExtendedRational:
    """s2 * w**s1 for signs (s1, s2). w = 0 lifts to 0 or ∞."""
    w = _unit(w)
    s1, s2 = signs
    if s1 not in (1, -1) or s2 not in (1, -1):
        raise DomainError("signs must be ±1")
    x = w if s1 == 1 else w.reciprocal()
    return x if s2 == 1 else -x


def gamma_relabel(x, i: int) -> int:
    """Index j with C(h_i(x)) = C(h_j(C(x))).

    Writes x = g(C(x)) for g in {id, -x, -1/x, 1/x} and applies the
    equivariance pairings of g; j is a permutation of i for fixed x.
    """
    x = as_ext(x)
    return _RELABEL[_gamma_kind(x.num, x.den)][i]


def coupled_step(x, w, i: int) -> tuple:
    """One step of X together with its projection W = C(X).

    Returns ``(h_i(x), H_I(w))`` where I is the class of the Gamma-relabeled
    generator; C of the first entry equals the second exactly.
    """
    x = as_ext(x)
    w = _unit(w)
    if project_C(x) != w:
        raise DomainError(f"coupled_step needs w = C(x); C({x}) = {project_C(x)} != {w}")
    klass = _COUPLED_CLASS[_gamma_kind(x.num, x.den)][i]
    return (
        ExtendedRational._raw(*_h(i, x.num, x.den)),
        ExtendedRational._raw(*_H(klass, w.num, w.den)),
    )


# -- deterministic walks from explicit draws ------------------------------


def _wrap(pairs) -> list:
    return [ExtendedRational._raw(p, q) for p, q in pairs]


def walk_X(x0, word: Sequence[int], path: bool = True) -> list:
    """X_k = h_{M_k}(X_{k-1}) for the generator indices in ``word``."""
    x0 = as_ext(x0)
    p, q = x0.num, x0.den
    out = [(p, q)]
    for i in word:
        p, q = _h(i, p, q)
        out.append((p, q))
    return _wrap(out if path else out[-1:])


def walk_Y(x0, word: Sequence[int], path: bool = True) -> list:
    """Y_k = h_{M_1 ... M_k}(x0) by accumulating the product one factor per step."""
    x0 = as_ext(x0)
    p0, q0 = x0.num, x0.den
    a, b, c, d = 1, 0, 0, 1
    out = [(p0, q0)]
    for i in word:
        e, f, g, h = GENERATOR_TUPLES[i]
        a, b, c, d = a * e + b * g, a * f + b * h, c * e + d * g, c * f + d * h
        p, q = a * p0 + b * q0, c * p0 + d * q0
        if q < 0 or (q == 0 and p < 0):
            p, q = -p, -q
        out.append((p, q))
    return _wrap(out if path else out[-1:])


def walk_W(w0, indices: Sequence[int], path: bool = True) -> list:
    """W_k = H_{I_k}(W_{k-1})."""
    w0 = _unit(w0)
    p, q = w0.num, w0.den
    out = [(p, q)]
    for i in indices:
        p, q = _H(i, p, q)
        out.append((p, q))
    return _wrap(out if path else out[-1:])


def walk_U(u0, quotients: Sequence[int], path: bool = True) -> list:
    """U_k = 1/(K_k + U_{k-1})."""
    u0 = _unit(u0)
    p, q = u0.num, u0.den
    out = [(p, q)]
    for k in quotients:
        if k < 1:
            raise DomainError("quotients must be positive")
        p, q = q, k * q + p
        out.append((p, q))
    return _wrap(out if path else out[-1:])


def walk_coupled(x0, word: Sequence[int]) -> tuple:
    """X and the W chain driven through the relabeled classes of the same word."""
    x0 = as_ext(x0)
    p, q = x0.num, x0.den
    wp, wq = _C(p, q)
    xs, ws = [(p, q)], [(wp, wq)]
    for i in word:
        klass = _COUPLED_CLASS[_gamma_kind(p, q)][i]
        p, q = _h(i, p, q)
        wp, wq = _H(klass, wp, wq)
        xs.append((p, q))
        ws.append((wp, wq))
    return _wrap(xs), _wrap(ws)


def walk_Z(z0: UpperHalfPoint, word: Sequence[int]) -> list:
    """Z_k = h_{M_k}(Z_{k-1}) in exact rational coordinates."""
    out = [z0]
    x, y = Fraction(z0.re), Fraction(z0.im)
    for i in word:
        x, y = _mobius_xy(GENERATOR_TUPLES[i], x, y)
        out.append(UpperHalfPoint(x, y))
    return out


def walk_V(z0: UpperHalfPoint, word: Sequence[int]) -> list:
    """V_k = h_{M_1 ... M_k}(z0) in exact rational coordinates."""
    out = [z0]
    x0, y0 = Fraction(z0.re), Fraction(z0.im)
    m = (1, 0, 0, 1)
    for i in word:
        e, f, g, h = GENERATOR_TUPLES[i]
        a, b, c, d = m
        m = (a * e + b * g, a * f + b * h, c * e + d * g, c * f + d * h)
        out.append(UpperHalfPoint(*_mobius_xy(m, x0, y0)))
    return out


def _mobius_xy(m: tuple, x, y) -> tuple:
    a, b, c, d = m
    cx_d = c * x + d
    cy = c * y
    den = cx_d * cx_d + cy * cy
    return ((a * x + b) * cx_d + a * cy * y) / den, y / den


# -- floating point walks --------------------------------------------------


class _PoleHit(Exception):
    pass


def _walk_X_float(x0: float, word) -> list:
    x = x0
    out = [x]
    for i in word:
        a, b, c, d = GENERATOR_TUPLES[i]
        if math.isinf(x):
            x = math.inf if c == 0 else a / c
        else:
            den = c * x + d
            if abs(den) < POLE_TOLERANCE:
                raise _PoleHit
            x = (a * x + b) / den
        out.append(x)
    return out


def _walk_Y_float(x0: float, word) -> list:
    a, b, c, d = 1.0, 0.0, 0.0, 1.0
    out = [x0]
    for i in word:
        e, f, g, h = GENERATOR_TUPLES[i]
        a, b, c, d = a * e + b * g, a * f + b * h, c * e + d * g, c * f + d * h
        s = max(abs(a), abs(b), abs(c), abs(d))
        a, b, c, d = a / s, b / s, c / s, d / s
        if math.isinf(x0):
            if abs(c) < POLE_TOLERANCE:
                raise _PoleHit
            out.append(a / c)
        else:
            den = c * x0 + d
            if abs(den) < POLE_TOLERANCE:
                raise _PoleHit
            out.append((a * x0 + b) / den)
    return out


def _walk_Z_float(z0: complex, word) -> tuple:
    # det = 1 exactly, so Im(h(z)) = y / |cz + d|^2 avoids the cancellation of complex division
    x, y = z0.real, z0.imag
    out = [z0]
    frozen = None
    for k, i in enumerate(word, start=1):
        if frozen is None:
            a, b, c, d = GENERATOR_TUPLES[i]
            cx_d = c * x + d
            cy = c * y
            den = cx_d * cx_d + cy * cy
            ny = y / den
            if not (ny > 0 and math.isfinite(den)):
                frozen = k
            else:
                x, y = ((a * x + b) * cx_d + a * cy * y) / den, ny
        out.append(complex(x, y))
    return out, frozen


def _walk_V_float(z0: complex, word) -> tuple:
    # the product is kept normalized; log_scale records the dropped factor so
    # that Im(V) = y * exp(-2 log_scale) / |cz + d|^2 underflows only for real
    x0, y0 = z0.real, z0.imag
    a, b, c, d = 1.0, 0.0, 0.0, 1.0
    log_scale = 0.0
    z = z0
    out = [z]
    frozen = None
    for k, i in enumerate(word, start=1):
        if frozen is None:
            e, f, g, h = GENERATOR_TUPLES[i]
            a, b, c, d = a * e + b * g, a * f + b * h, c * e + d * g, c * f + d * h
            s = max(abs(a), abs(b), abs(c), abs(d))
            a, b, c, d = a / s, b / s, c / s, d / s
            log_scale += math.log(s)
            cx_d = c * x0 + d
            cy = c * y0
            den = cx_d * cx_d + cy * cy
            ny = y0 * math.exp(-2.0 * log_scale) / den
            if not ny > 0:
                frozen = k
            else:
                z = complex(((a * x0 + b) * cx_d + a * cy * y0) / den, ny)
        out.append(z)
    return out, frozen


def _walk_W_float(w0: float, indices) -> list:
    w = w0
    out = [w]
    for i in indices:
        if i == 1:
            w = 1.0 / (1.0 + w)
        elif i == 2:
            w = 1.0 - w
        elif i == 3:
            w = w / (1.0 - w) if w <= 0.5 else (1.0 - w) / w
        elif i == 4:
            w = w / (1.0 + w)
        out.append(w)
    return out


def _walk_U_float(u0: float, quotients) -> list:
    u = u0
    out = [u]
    for k in quotients:
        u = 1.0 / (k + u)
        out.append(u)
    return out


# -- seeded simulation -----------------------------------------------------


@dataclass(frozen=True)
class WalkConfig:
    seed: int
    steps: int
    trajectories: int = 1
    mode: Optional[str] = None  # "exact" | "float"; None picks the chain default

    def __post_init__(self):
        if not 0 <= int(self.seed) < 2**64:
            raise DomainError("seed must be a 64-bit unsigned integer")
        if self.steps < 0:
            raise DomainError("steps must be non-negative")
        if self.trajectories < 1:
            raise DomainError("trajectories must be positive")
        if self.mode not in (None, "exact", "float"):
            raise DomainError(f"unknown mode {self.mode!r}")

    def resolved_mode(self, default: str) -> str:
        return self.mode or default


@dataclass
class WalkResult:
    chain: str
    mode: str
    trajectories: list
    flags: dict = field(default_factory=dict)

    def final(self) -> list:
        return [t[-1] for t in self.trajectories]


_DEFAULT_MODE = {"X": "exact", "Y": "exact", "W": "exact", "U": "exact", "Z": "float", "V": "float"}


def _one_trajectory(chain: str, start, seed: int, steps: int, mode: str, j: int, path: bool = True) -> tuple:
    """Returns (values, flag-or-None) for trajectory j; values is [final] unless path."""
    if chain in ("X", "Y", "Z", "V"):
        word = _rng.generator_word(_rng.stream(seed, _rng.WORDS, j), steps)
    if chain == "X" or chain == "Y":
        exact_walk = walk_X if chain == "X" else walk_Y
        if mode == "exact":
            return exact_walk(start, word, path), None
        float_walk = _walk_X_float if chain == "X" else _walk_Y_float
        try:
            vals = float_walk(float(start), word)
        except _PoleHit:
            return exact_walk(as_ext(start), word, path), "pole: switched to exact"
        return (vals if path else vals[-1:]), None
    if chain == "Z" or chain == "V":
        if mode == "exact":
            walk = walk_Z if chain == "Z" else walk_V
            vals = walk(start, word)
            return (vals if path else vals[-1:]), None
        walk = _walk_Z_float if chain == "Z" else _walk_V_float
        vals, frozen = walk(complex(start), word)
        if not path:
            vals = vals[-1:]
        pts = [UpperHalfPoint(z.real, z.imag) for z in vals]
        flag = None if frozen is None else f"im underflow at step {frozen}: frozen as converged"
        return pts, flag
    if chain == "W":
        word = _rng.generator_word(_rng.stream(seed, _rng.INTERVAL_INDICES, j), steps)
        indices = [CLASS_OF_GENERATOR[i] for i in word]
        if mode == "exact":
            return walk_W(start, indices, path), None
        vals = _walk_W_float(float(start), indices)
        return (vals if path else vals[-1:]), None
    if chain == "U":
        ks = _rng.geometric_half(_rng.stream(seed, _rng.QUOTIENTS, j), steps).tolist()
        if mode == "exact":
            return walk_U(start, ks, path), None
        vals = _walk_U_float(float(start), ks)
        return (vals if path else vals[-1:]), None
    raise DomainError(f"unknown chain {chain!r}")


def _batch(args) -> list:
    chain, start, seed, steps, mode, path, lo, hi = args
    return [_one_trajectory(chain, start, seed, steps, mode, j, path) for j in range(lo, hi)]


def default_workers() -> int:
    env = os.environ.get("MODWALK_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            raise DomainError("MODWALK_THREADS must be an integer") from None
    return os.cpu_count() or 1


def _run_batches(chain, start, cfg: WalkConfig, mode, workers: int, path: bool) -> list:
    n = cfg.trajectories
    if workers <= 1 or n < 2 * workers:
        return _batch((chain, start, cfg.seed, cfg.steps, mode, path, 0, n))
    size = -(-n // (4 * workers))
    jobs = [(chain, start, cfg.seed, cfg.steps, mode, path, lo, min(n, lo + size)) for lo in range(0, n, size)]
    out = []
    with ProcessPoolExecutor(max_workers=workers) as ex:
        # map preserves job order, so results stay sorted by trajectory index
        for part in ex.map(_batch, jobs):
            out.extend(part)
    return out


def _normalize_start(chain: str, start, mode: str):
    if chain in ("Z", "V"):
        if not isinstance(start, UpperHalfPoint):
            raise DomainError(f"chain {chain} needs an UpperHalfPoint start")
        if mode == "exact" and not start.is_exact:
            raise DomainError("exact mode needs rational coordinates")
        return start
    if chain in ("W", "U"):
        return _unit(start) if mode == "exact" or not isinstance(start, float) else start
    if mode == "exact" or not isinstance(start, float):
        return as_ext(start)
    return start


def simulate(chain: str, start, cfg: WalkConfig, workers: int = 1, path: bool = True) -> WalkResult:
    """Run ``cfg.trajectories`` independent trajectories of one chain.

    With ``path=False`` each trajectory keeps only its final state.
    """
    if chain not in _DEFAULT_MODE:
        raise DomainError(f"unknown chain {chain!r}")
    mode = cfg.resolved_mode(_DEFAULT_MODE[chain])
    start = _normalize_start(chain, start, mode)
    rows = _run_batches(chain, start, cfg, mode, workers, path)
    flags = {j: flag for j, (_, flag) in enumerate(rows) if flag}
    return WalkResult(chain, mode, [vals for vals, _ in rows], flags)


def simulate_X(x0, cfg: WalkConfig, workers: int = 1, path: bool = True) -> WalkResult:
    return simulate("X", x0, cfg, workers, path)


def simulate_Y(x0, cfg: WalkConfig, workers: int = 1, path: bool = True) -> WalkResult:
    return simulate("Y", x0, cfg, workers, path)


def simulate_Z(z0: UpperHalfPoint, cfg: WalkConfig, workers: int = 1, path: bool = True) -> WalkResult:
    return simulate("Z", z0, cfg, workers, path)


def simulate_V(z0: UpperHalfPoint, cfg: WalkConfig, workers: int = 1, path: bool = True) -> WalkResult:
    return simulate("V", z0, cfg, workers, path)


def simulate_W(w0, cfg: WalkConfig, workers: int = 1, path: bool = True) -> WalkResult:
    return simulate("W", w0, cfg, workers, path)


def simulate_U(u0, cfg: WalkConfig, workers: int = 1, path: bool = True) -> WalkResult:
    return simulate("U", u0, cfg, workers, path)


def simulate_coupled(x0, cfg: WalkConfig) -> tuple:
    """Exact X paths and their coupled W paths, sharing the X word streams."""
    xs, ws = [], []
    for j in range(cfg.trajectories):
        word = _rng.generator_word(_rng.stream(cfg.seed, _rng.WORDS, j), cfg.steps)
        x, w = walk_coupled(x0, word)
        xs.append(x)
        ws.append(w)
    return xs, ws


# -- stationary samplers ---------------------------------------------------


@dataclass
class StationarySample:
    values: list
    depth: int
    truncation_bound: float  # max over samples of 2 * 2**-(sum of used quotients)


def _quotient_blocks(seed: int, n: int, width: int):
    for b, lo in enumerate(range(0, n, _rng.BLOCK)):
        size = min(_rng.BLOCK, n - lo)
        rng = _rng.stream(seed, _rng.STATIONARY, b)
        yield b, _rng.geometric_half(rng, (size, width))


def _cf_values(ks: np.ndarray, mode: str) -> list:
    """[0; k_1, ..., k_m] for each row of ks."""
    if mode == "float":
        w = np.zeros(ks.shape[0])
        for col in range(ks.shape[1] - 1, -1, -1):
            w = 1.0 / (ks[:, col] + w)
        return w.tolist()
    out = []
    for row in ks.tolist():
        p, q = 0, 1
        for k in reversed(row):
            p, q = q, k * q + p
        out.append(ExtendedRational._raw(p, q))
    return out


def sample_stationary_W(cfg: WalkConfig, depth: int = 64) -> StationarySample:
    """``cfg.trajectories`` draws of [0; K_1, ..., K_depth] with i.i.d. Pr(K = n) = 2**-n."""
    if depth < 1:
        raise DomainError("depth must be at least 1")
    mode = cfg.resolved_mode("exact")
    values, min_sum = [], None
    for _, ks in _quotient_blocks(cfg.seed, cfg.trajectories, depth):
        values.extend(_cf_values(ks, mode))
        s = int(ks.sum(axis=1).min())
        min_sum = s if min_sum is None else min(min_sum, s)
    return StationarySample(values, depth, math.ldexp(2.0, -min_sum))


def sample_stationary_Y(cfg: WalkConfig, depth: int = 64) -> StationarySample:
    """Draws of [K_0 - 1; K_1, ..., K_depth]: survival function chi_1/2."""
    if depth < 1:
        raise DomainError("depth must be at least 1")
    mode = cfg.resolved_mode("exact")
    values, min_sum = [], None
    for _, ks in _quotient_blocks(cfg.seed, cfg.trajectories, depth + 1):
        heads = (ks[:, 0] - 1).tolist()
        fracs = _cf_values(ks[:, 1:], mode)
        if mode == "float":
            values.extend(h + f for h, f in zip(heads, fracs))
        else:
            values.extend(ExtendedRational._raw(h * f.den + f.num, f.den) for h, f in zip(heads, fracs))
        s = int(ks[:, 1:].sum(axis=1).min())
        min_sum = s if min_sum is None else min(min_sum, s)
    return StationarySample(values, depth, math.ldexp(2.0, -min_sum))


def sample_stationary_X(cfg: WalkConfig, depth: int = 64) -> StationarySample:
    """Stationary W draws lifted to the line as S_2 * W**S_1."""
    ws = sample_stationary_W(cfg, depth)
    n = cfg.trajectories
    values = []
    for b, lo in enumerate(range(0, n, _rng.BLOCK)):
        size = min(_rng.BLOCK, n - lo)
        rng = _rng.stream(cfg.seed, _rng.SIGNS, b)
        s1 = _rng.fair_signs(rng, size).tolist()
        s2 = _rng.fair_signs(rng, size).tolist()
        for w, a, b2 in zip(ws.values[lo : lo + size], s1, s2):
            if isinstance(w, float):
                x = w if a == 1 else 1.0 / w
                values.append(x if b2 == 1 else -x)
            else:
                values.append(lift(w, (a, b2)))
    return StationarySample(values, depth, ws.truncation_bound)
