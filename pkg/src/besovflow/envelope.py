"""Frequency envelopes: slowly varying majorants of dyadic block norms.

For a sequence f and orders s < s1 the envelope is

    gamma_n = 2^{-n(s1-s)} ||S_n f||_{s1,1}
            = 2^{-n(s1-s)} sum_{k<=n} 2^{k s1} ||f_k||_E.

It dominates the weighted block norms (2^{k s} ||f_k|| <= gamma_k), varies
slowly in one direction (gamma_n <= 2^{s1-s} gamma_{n+1}), and its l^q norm
is equivalent to ||f||_{s,q} with explicit constants.  Past the support the
envelope obeys the exact recursion gamma_{n+1} = 2^{-(s1-s)} gamma_n, which
is what every l^q tail below sums in closed form.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .dyadic import DyadicSequence, dyadic_norm

__all__ = [
    "FrequencyEnvelope",
    "compute_envelope",
    "gamma_lq_norm",
    "envelope_equivalence",
    "c_sequence",
    "c_tail_lq",
    "envelope_report_rows",
]

GUARD = 8  # envelope entries kept past the support


@dataclass(frozen=True)
class FrequencyEnvelope:
    """Envelope values gamma_0..gamma_{K+guard} for a source sequence."""

    gamma: np.ndarray = field(repr=False)
    s: float
    s1: float
    source: DyadicSequence = field(repr=False)

    @property
    def decay_ratio(self) -> float:
        """Exact per-step decay factor 2^{-(s1-s)} past the support."""
        return 2.0 ** (-(self.s1 - self.s))

    @property
    def support(self) -> int:
        return self.source.support


def compute_envelope(
    f: DyadicSequence, s: float, s1: float, guard: int = GUARD
) -> FrequencyEnvelope:
    """Envelope of f for the order pair s < s1.

    Values are stored for n = 0..support+guard-1; entries past the support
    are produced by the exact geometric recursion.
    """
    if not s < s1:
        raise ValueError(f"need s < s1, got s={s}, s1={s1}")
    norms = f.block_norms
    k = norms.size
    ratio = 2.0 ** (-(s1 - s))
    gamma = np.zeros(max(k, 1) + guard)
    if k > 0:
        weighted = np.where(
            norms == 0.0, 0.0, np.exp2(s1 * np.arange(k, dtype=float)) * norms
        )
        partial = np.cumsum(weighted)
        n = np.arange(k, dtype=float)
        gamma[:k] = np.exp2(-(s1 - s) * n) * partial
        for n in range(k, gamma.size):
            gamma[n] = gamma[n - 1] * ratio
    gamma.setflags(write=False)
    return FrequencyEnvelope(gamma=gamma, s=s, s1=s1, source=f)


def gamma_lq_norm(env: FrequencyEnvelope, q: float) -> float:
    """l^q norm of the full envelope, geometric tail included.

    Past the support the envelope is exactly geometric with ratio
    2^{-(s1-s)} < 1, so for finite q the tail sum is added in closed form;
    for q = inf the sup is attained at or before the last support index.
    """
    k = env.support
    if k == 0:
        return 0.0
    head = env.gamma[:k]
    last = float(head[-1])
    if math.isinf(q):
        return float(head.max())
    rho = env.decay_ratio**q
    return float((np.sum(head**q) + last**q * rho / (1.0 - rho)) ** (1.0 / q))


def envelope_equivalence(f: DyadicSequence, s: float, q: float, s1: float):
    """The sandwich (1 - 2^{s-s1}) ||gamma||_q <= ||f||_{s,q} <= ||gamma||_q.

    Returns the triple (lower, mid, upper).
    """
    env = compute_envelope(f, s, s1)
    gnorm = gamma_lq_norm(env, q)
    lower = (1.0 - 2.0 ** (s - s1)) * gnorm
    mid = dyadic_norm(f, (s, q))
    return lower, mid, gnorm


def c_sequence(env: FrequencyEnvelope) -> np.ndarray:
    """Adjacent sums c_n = gamma_n + gamma_{n+1} over the stored range."""
    return env.gamma[:-1] + env.gamma[1:]


def c_tail_lq(env: FrequencyEnvelope, n: int, q: float) -> float:
    """( sum_{p >= n} c_p^q )^{1/q} with the exact geometric tail.

    For p at or past the last support index K the envelope recursion gives
    c_p = c_K rho^{p-K} with rho = 2^{-(s1-s)}, so the infinite part is a
    closed-form geometric sum (for q = inf, a sup attained on the head).
    """
    if n < 0:
        raise ValueError("tail start must be >= 0")
    k = env.support
    if k == 0:
        return 0.0
    last = k - 1  # last support index
    gamma = env.gamma
    rho = env.decay_ratio
    c_last = float(gamma[last] * (1.0 + rho))
    if n >= last:
        # entirely inside the geometric regime: c_p = c_last * rho^(p-last)
        first = c_last * rho ** (n - last)
        if math.isinf(q):
            return first
        return float(first * (1.0 / (1.0 - rho**q)) ** (1.0 / q))
    head = gamma[n:last] + gamma[n + 1 : last + 1]
    if math.isinf(q):
        return float(max(head.max(), c_last))
    tail = c_last**q / (1.0 - rho**q)
    return float((np.sum(head**q) + tail) ** (1.0 / q))


def envelope_report_rows(env: FrequencyEnvelope) -> list:
    """Rows (n, gamma_n, c_n, 2^{n s} ||f_n||) for the envelope report."""
    norms = env.source.block_norms
    c = c_sequence(env)
    rows = []
    for n in range(c.size):
        if n < norms.size and norms[n] != 0.0:
            weighted = float(2.0 ** (n * env.s) * norms[n])
        else:
            weighted = 0.0
        rows.append((n, float(env.gamma[n]), float(c[n]), weighted))
    return rows
