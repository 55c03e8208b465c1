"""Finite-support sequences of pseudo-normed blocks and their dyadic norms.

A sequence f = (f_0, ..., f_K) with blocks in a base space E carries the
two-parameter family of norms

    ||f||_{s,q}   = ( sum_k (2^{k s} ||f_k||_E)^q )^(1/q)   for q in [1, inf),
    ||f||_{s,inf} = sup_k 2^{k s} ||f_k||_E,

together with the truncation operators S_n (keep blocks 0..n, zero the rest)
and the elementary inequalities built on them: the smoothing gain
||S_n f||_{r',q} <= 2^{n(r'-r)} ||f||_{r,q}, a sharpened weighted truncation
sum with the explicit constant 1/(1 - 2^{r-r'}), Young's convolution
inequality for sequences on Z, and a two-sided bound obtained by splitting a
sequence at a level N.

Sequences are always finitely supported.  Where a formula sums over all
truncation levels n in N, the summand is eventually constant or exactly
geometric, so the infinite part is added in closed form rather than
truncated.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .pseudonorm import (
    OVERFLOW,
    PseudoNormedSpace,
    eval_pseudo_norm,
    is_overflow,
    scalar_abs_space,
)

__all__ = [
    "ScaleIndex",
    "as_scale_index",
    "DyadicSequence",
    "dyadic_norm",
    "truncate",
    "tail_norm",
    "smoothing_gain",
    "YoungConvolution",
    "young_convolve",
    "weighted_smoothing_sum",
    "truncation_power_sum",
    "InterpolationBound",
    "interpolation_bound",
    "interpolation_theta",
    "random_sequence",
    "sequence_report",
]


@dataclass(frozen=True)
class ScaleIndex:
    """Smoothness order s and summability q in [1, inf].

    Infinite q is the ordinary float ``inf``; all norm code branches on it
    explicitly, it is never fed through a power.
    """

    s: float
    q: float

    def __post_init__(self):
        if not self.q >= 1.0:
            raise ValueError(f"summability q must be >= 1, got {self.q}")


def as_scale_index(idx) -> ScaleIndex:
    if isinstance(idx, ScaleIndex):
        return idx
    s, q = idx
    return ScaleIndex(float(s), float(q))


def _elements_equal(a, b) -> bool:
    eq = a == b
    return bool(np.all(eq))


@dataclass(frozen=True, eq=False)
class DyadicSequence:
    """Finite-support sequence of base-space elements.

    ``entries`` holds blocks f_0 .. f_K; indices beyond K are the base
    space's zero element.  Sequences are immutable; arithmetic returns new
    sequences and pads the shorter operand with zeros.
    """

    base: PseudoNormedSpace
    entries: tuple

    def __post_init__(self):
        object.__setattr__(self, "entries", tuple(self.entries))

    @property
    def support(self) -> int:
        """Number of stored blocks (K + 1 for last stored index K)."""
        return len(self.entries)

    @property
    def last_index(self) -> int:
        return len(self.entries) - 1

    @cached_property
    def block_norms(self) -> np.ndarray:
        norms = np.empty(len(self.entries), dtype=float)
        for k, entry in enumerate(self.entries):
            value = eval_pseudo_norm(self.base, entry)
            if is_overflow(value):
                raise ValueError(f"block {k} has non-finite pseudo-norm")
            norms[k] = value
        return norms

    def __len__(self) -> int:
        return len(self.entries)

    def __getitem__(self, k):
        if k < 0:
            raise IndexError("block index must be >= 0")
        if k < len(self.entries):
            return self.entries[k]
        return self.base.zero()

    def _check_base(self, other: "DyadicSequence"):
        if self.base.label != other.base.label:
            raise ValueError(
                f"base space mismatch: {self.base.label!r} vs {other.base.label!r}"
            )

    def __eq__(self, other) -> bool:
        if not isinstance(other, DyadicSequence):
            return NotImplemented
        if self.base.label != other.base.label:
            return False
        n = max(len(self), len(other))
        return all(_elements_equal(self[k], other[k]) for k in range(n))

    def __add__(self, other: "DyadicSequence") -> "DyadicSequence":
        self._check_base(other)
        n = max(len(self), len(other))
        return DyadicSequence(self.base, tuple(self[k] + other[k] for k in range(n)))

    def __sub__(self, other: "DyadicSequence") -> "DyadicSequence":
        self._check_base(other)
        n = max(len(self), len(other))
        return DyadicSequence(self.base, tuple(self[k] - other[k] for k in range(n)))

    def __mul__(self, c) -> "DyadicSequence":
        return DyadicSequence(self.base, tuple(entry * c for entry in self.entries))

    __rmul__ = __mul__


def _weighted_block_norms(f: DyadicSequence, s: float) -> np.ndarray:
    """2^{k s} ||f_k||_E for k = 0..K, with zero blocks kept at exactly 0."""
    norms = f.block_norms
    if norms.size == 0:
        return norms
    with np.errstate(over="ignore"):  # overflow becomes the OVERFLOW outcome
        weights = np.exp2(s * np.arange(norms.size, dtype=float))
        return np.where(norms == 0.0, 0.0, weights * norms)


def _lq_combine(values: np.ndarray, q: float):
    """l^q norm of a nonnegative vector; OVERFLOW when out of float range."""
    if values.size == 0:
        return 0.0
    if not np.all(np.isfinite(values)):
        return OVERFLOW
    if math.isinf(q):
        return float(values.max())
    with np.errstate(over="ignore"):
        total = float(np.sum(values**q))
    if not math.isfinite(total):
        return OVERFLOW
    return total ** (1.0 / q)


def dyadic_norm(f: DyadicSequence, idx) -> float:
    """The weighted-block norm ||f||_{s,q}; zero exactly on the zero sequence."""
    idx = as_scale_index(idx)
    return _lq_combine(_weighted_block_norms(f, idx.s), idx.q)


def truncate(f: DyadicSequence, n: int) -> DyadicSequence:
    """S_n f: keep blocks 0..n, zero everything above.

    A projection (idempotent) and a contraction for every dyadic norm.
    """
    if n < 0:
        raise ValueError("truncation level must be >= 0")
    if n >= f.last_index:
        return f
    return DyadicSequence(f.base, f.entries[: n + 1])


def tail_norm(f: DyadicSequence, idx, n: int) -> float:
    """||f - S_n f||_{s,q}: the norm of blocks above level n."""
    if n < 0:
        raise ValueError("truncation level must be >= 0")
    idx = as_scale_index(idx)
    weighted = _weighted_block_norms(f, idx.s)
    return _lq_combine(weighted[n + 1 :], idx.q)


def smoothing_gain(f: DyadicSequence, r: float, rp: float, q: float, n: int):
    """Value and bound for the truncation smoothing estimate.

    Returns ``(||S_n f||_{r',q}, 2^{n (r'-r)} ||f||_{r,q})`` for r <= r'.
    The value never exceeds the bound.
    """
    if not r <= rp:
        raise ValueError(f"need r <= r', got r={r}, r'={rp}")
    value = dyadic_norm(truncate(f, n), (rp, q))
    base = dyadic_norm(f, (r, q))
    if is_overflow(value) or is_overflow(base):
        return OVERFLOW, OVERFLOW
    return value, 2.0 ** (n * (rp - r)) * base


@dataclass(frozen=True)
class YoungConvolution:
    """Convolution of two finitely supported sequences on Z with its l^q bound."""

    start: int
    values: np.ndarray
    norm: float
    bound: float


def _seq_lq(values: np.ndarray, q: float) -> float:
    if values.size == 0:
        return 0.0
    if math.isinf(q):
        return float(np.abs(values).max())
    return float(np.sum(np.abs(values) ** q) ** (1.0 / q))


def young_convolve(u, v, q: float, u_start: int = 0, v_start: int = 0):
    """Convolve u and v over Z and certify ||u*v||_q <= ||u||_1 ||v||_q.

    ``u`` and ``v`` are the finitely supported values starting at indices
    ``u_start`` and ``v_start``.
    """
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    if u.size == 0 or v.size == 0:
        return YoungConvolution(u_start + v_start, np.zeros(0), 0.0, 0.0)
    conv = np.convolve(u, v)
    bound = _seq_lq(u, 1.0) * _seq_lq(v, q)
    return YoungConvolution(u_start + v_start, conv, _seq_lq(conv, q), bound)


def weighted_smoothing_sum(f: DyadicSequence, r: float, rp: float, q: float):
    """Value and bound of the weighted sum over all truncation levels.

    Value is ``( sum_n ( 2^{-n(r'-r)} ||S_n f||_{r',1} )^q )^{1/q}`` (the sup
    over n when q = inf); bound is ``||f||_{r,q} / (1 - 2^{r-r'})``.  Terms
    with n beyond the support are geometric and summed in closed form, so
    the value is exact up to rounding.  Requires r < r'.
    """
    if not r < rp:
        raise ValueError(f"need r < r', got r={r}, r'={rp}")
    base = dyadic_norm(f, (r, q))
    if is_overflow(base):
        return OVERFLOW, OVERFLOW
    bound = base / (1.0 - 2.0 ** (r - rp))
    inner = _weighted_block_norms(f, rp)
    if inner.size == 0:
        return 0.0, 0.0
    partial = np.cumsum(inner)  # ||S_n f||_{r',1} for n = 0..K
    n = np.arange(inner.size, dtype=float)
    terms = np.exp2(-(rp - r) * n) * partial
    if not np.all(np.isfinite(terms)):
        return OVERFLOW, OVERFLOW
    if math.isinf(q):
        # beyond the support the weight shrinks while the partial sum is
        # constant, so the sup is attained at some n <= K
        return float(terms.max()), bound
    ratio = 2.0 ** (-q * (rp - r))
    head = float(np.sum(terms**q))
    geometric_tail = float(terms[-1] ** q) * ratio / (1.0 - ratio)
    return (head + geometric_tail) ** (1.0 / q), bound


def truncation_power_sum(f: DyadicSequence, r: float, rp: float, q: float):
    """q-th power form of the weighted truncation sum, with its closed bound.

    Returns ``(sum_n 2^{-q n (r'-r)} ||S_n f||_{r',q}^q, K ||f||_{r,q}^q)``
    with ``K = 1/(1 - 2^{-q(r'-r)})``.  Swapping the order of summation
    shows the two sides are equal for every finitely supported sequence, so
    the bound is attained; it is still returned as a pair for reporting.
    Requires finite q and r < r'.
    """
    if math.isinf(q):
        raise ValueError("power sum requires finite q")
    if not r < rp:
        raise ValueError(f"need r < r', got r={r}, r'={rp}")
    ratio = 2.0 ** (-q * (rp - r))
    constant = 1.0 / (1.0 - ratio)
    base = dyadic_norm(f, (r, q))
    if is_overflow(base):
        return OVERFLOW, OVERFLOW
    bound = constant * base**q
    inner = _weighted_block_norms(f, rp)
    if inner.size == 0:
        return 0.0, 0.0
    partial_q = np.cumsum(inner**q)  # ||S_n f||_{r',q}^q for n = 0..K
    n = np.arange(inner.size, dtype=float)
    terms = np.exp2(-q * (rp - r) * n) * partial_q
    if not np.all(np.isfinite(terms)):
        return OVERFLOW, OVERFLOW
    head = float(np.sum(terms))
    geometric_tail = float(terms[-1]) * ratio / (1.0 - ratio)
    return head + geometric_tail, bound


@dataclass(frozen=True)
class InterpolationBound:
    """actual <= low + high split of a dyadic norm at an intermediate order."""

    actual: float
    low: float
    high: float


def interpolation_bound(
    f: DyadicSequence, s0: float, s: float, s1: float, q: float, n_split: int
) -> InterpolationBound:
    """Two-sided bound for ||f||_{s,q} from the s0 and s1 sup norms.

    Splitting f = S_N f + (I - S_N) f at N = ``n_split`` gives

        ||S_N f||_{s,q}      <= ( sum_{n<=N} 2^{n q (s-s0)} )^{1/q} ||f||_{s0,inf}
        ||(I - S_N) f||_{s,q} <= ( sum_{n>N} 2^{n q (s-s1)} )^{1/q} ||f||_{s1,inf}

    with both geometric sums evaluated in closed form (for q = inf the
    prefactors collapse to 2^{N(s-s0)} and 2^{(N+1)(s-s1)}).  Requires
    s0 < s < s1.
    """
    if not (s0 < s < s1):
        raise ValueError(f"need s0 < s < s1, got {s0}, {s}, {s1}")
    if n_split < 0:
        raise ValueError("split level must be >= 0")
    actual = dyadic_norm(f, (s, q))
    m0 = dyadic_norm(f, (s0, math.inf))
    m1 = dyadic_norm(f, (s1, math.inf))
    if any(is_overflow(v) for v in (actual, m0, m1)):
        raise ValueError("norms overflow at the requested orders")
    if math.isinf(q):
        low_factor = 2.0 ** (n_split * (s - s0))
        high_factor = 2.0 ** ((n_split + 1) * (s - s1))
    else:
        x = 2.0 ** (q * (s - s0))  # > 1
        low_factor = ((x ** (n_split + 1) - 1.0) / (x - 1.0)) ** (1.0 / q)
        y = 2.0 ** (q * (s - s1))  # < 1
        high_factor = (y ** (n_split + 1) / (1.0 - y)) ** (1.0 / q)
    return InterpolationBound(actual, low_factor * m0, high_factor * m1)


def interpolation_theta(s0: float, s: float, s1: float) -> float:
    """Interpolation weight (s1 - s)/(s1 - s0) for the order triple."""
    if not (s0 < s < s1):
        raise ValueError(f"need s0 < s < s1, got {s0}, {s}, {s1}")
    return (s1 - s) / (s1 - s0)


def random_sequence(
    rng: np.random.Generator,
    base: PseudoNormedSpace | None = None,
    max_support: int = 32,
    log2_range=(-20.0, 20.0),
) -> DyadicSequence:
    """Random scalar sequence for property sweeps.

    Support length is uniform in [1, max_support]; entry magnitudes are
    log-uniform in 2^[log2_range], stressing both decaying and growing
    weight regimes; signs are random.
    """
    if base is None:
        base = scalar_abs_space()
    size = int(rng.integers(1, max_support + 1))
    mags = np.exp2(rng.uniform(log2_range[0], log2_range[1], size))
    signs = rng.choice([-1.0, 1.0], size)
    return DyadicSequence(base, tuple(float(v) for v in signs * mags))


def sequence_report(f: DyadicSequence) -> dict:
    """Per-block norms plus the base-space label, for serialized reports."""
    return {
        "base": f.base.label,
        "block_norms": [float(v) for v in f.block_norms],
    }
