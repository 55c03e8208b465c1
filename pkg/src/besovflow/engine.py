"""Forward verification of continuity bounds for maps on sequence spaces.

Given a map Phi defined on a ball of a dyadic sequence space, the engine

  1. estimates the two hypothesis constants empirically: a weak-Lipschitz
     constant C0 (low-order norm of differences) and a tame constant C1
     (high-order norm on truncated, hence smooth, inputs),
  2. checks the derived blockwise decay profile: the blocks of
     Phi(S_{n+1} f) - Phi(S_n f) decay exponentially away from n,
  3. checks the telescoped convergence bound
     ||Phi(f) - Phi(S_n f)||_{s,q} <= A C ( sum_{p>=n} c_p^q )^{1/q}
     with A = 2/(1 - 2^-kappa), kappa = min(s1-s, s-s0), and c the adjacent
     sums of the frequency envelope of f,
  4. probes continuity directly on a ladder of perturbation scales.

The constants are empirical maxima over finite sample sets, so they are
estimates, not certificates; reports carry an ``estimated`` flag, and bound
checks are meant to run with the constants inflated by a safety factor
(1.1 by default via :meth:`HypothesisReport.inflated`).
"""
from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .dyadic import DyadicSequence, dyadic_norm, truncate
from .envelope import c_tail_lq, compute_envelope

__all__ = [
    "BallViolationError",
    "FlowMapAdapter",
    "HypothesisReport",
    "estimate_constants",
    "HighLowRow",
    "high_low_rows",
    "DecayRow",
    "block_decay_profile",
    "ConvergenceRow",
    "ConvergenceReport",
    "convergence_bound",
    "convergence_report",
    "ContinuityRow",
    "ContinuityReport",
    "continuity_probe",
]

ZERO_DENOMINATOR = 1e-14  # pairs closer than this are excluded from ratios
CONTINUITY_FLOOR = 1e-9


class BallViolationError(ValueError):
    """Input lies outside the ball on which the map is defined."""


def _sequence_key(f: DyadicSequence) -> bytes:
    h = hashlib.blake2b(digest_size=16)
    h.update(f.base.label.encode())
    for entry in f.entries:
        if hasattr(entry, "values"):
            h.update(np.asarray(entry.values).tobytes())
        else:
            h.update(np.float64(entry).tobytes())
        h.update(b"|")
    return h.digest()


@dataclass
class FlowMapAdapter:
    """A map on dyadic sequences, defined on a norm ball, with its scale.

    ``phi`` maps a sequence over the input base space to a sequence over the
    output base space and must be pure.  Calls check the ball precondition
    ||f||_{s,q} < radius.  Results are memoized on the block data by
    default, since verification sweeps revisit the same truncations.
    """

    phi: Callable[[DyadicSequence], DyadicSequence]
    radius: float
    s0: float
    s: float
    s1: float
    q: float
    memoize: bool = True
    _cache: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        if not (self.s0 < self.s < self.s1):
            raise ValueError(
                f"need s0 < s < s1, got {self.s0}, {self.s}, {self.s1}"
            )
        if not self.radius > 0:
            raise ValueError("ball radius must be positive")
        if not self.q >= 1:
            raise ValueError("summability q must be >= 1")

    @property
    def kappa(self) -> float:
        return min(self.s1 - self.s, self.s - self.s0)

    def check_ball(self, f: DyadicSequence) -> float:
        norm = dyadic_norm(f, (self.s, self.q))
        if not norm < self.radius:
            raise BallViolationError(
                f"||f||_(s={self.s},q={self.q}) = {norm} is not below "
                f"the ball radius {self.radius}"
            )
        return norm

    def __call__(self, f: DyadicSequence) -> DyadicSequence:
        self.check_ball(f)
        if not self.memoize:
            return self.phi(f)
        key = _sequence_key(f)
        if key not in self._cache:
            self._cache[key] = self.phi(f)
        return self._cache[key]


@dataclass(frozen=True)
class HypothesisReport:
    """Empirically estimated hypothesis constants and their combinations.

    C0_hat and C1_hat are maxima of sampled ratios, so they lower-bound the
    true constants; ``inflation`` records any safety factor applied before
    bound checks.  kappa = min(s1-s, s-s0) and
    C = max(C0_hat, (1 + 2^{s1-s}) C1_hat).
    """

    C0_hat: float
    C1_hat: float
    kappa: float
    C: float
    samples_used: int
    smooth_only: bool = False
    inflation: float = 1.0
    s0: float = 0.0
    s: float = 0.0
    s1: float = 0.0

    @staticmethod
    def from_constants(
        c0: float,
        c1: float,
        s0: float,
        s: float,
        s1: float,
        samples_used: int,
        smooth_only: bool = False,
        inflation: float = 1.0,
    ) -> "HypothesisReport":
        return HypothesisReport(
            C0_hat=c0,
            C1_hat=c1,
            kappa=min(s1 - s, s - s0),
            C=max(c0, (1.0 + 2.0 ** (s1 - s)) * c1),
            samples_used=samples_used,
            smooth_only=smooth_only,
            inflation=inflation,
            s0=s0,
            s=s,
            s1=s1,
        )

    def inflated(self, factor: float = 1.1) -> "HypothesisReport":
        """Scale both constants by a safety factor before bound checks."""
        return HypothesisReport.from_constants(
            self.C0_hat * factor,
            self.C1_hat * factor,
            self.s0,
            self.s,
            self.s1,
            self.samples_used,
            self.smooth_only,
            self.inflation * factor,
        )

    def to_dict(self) -> dict:
        return {
            "C0_hat": self.C0_hat,
            "C1_hat": self.C1_hat,
            "kappa": self.kappa,
            "C": self.C,
            "samples_used": self.samples_used,
            "smooth_only": self.smooth_only,
            "inflation": self.inflation,
            "estimated": True,
        }


def _truncation_family(f: DyadicSequence) -> list:
    return [truncate(f, n) for n in range(f.support)]


def estimate_constants(
    adapter: FlowMapAdapter,
    samples: Sequence[tuple],
    smooth_only: bool = False,
) -> HypothesisReport:
    """Estimate the weak-Lipschitz and tame constants from sample pairs.

    C0_hat is the largest ratio
    ||Phi(v) - Phi(w)||_{s0,inf} / ||v - w||_{s0,1} over the pairs (pairs
    with near-zero denominator are skipped).  C1_hat is the largest ratio
    ||Phi(v)||_{s1,inf} / ||v||_{s1,1} over all truncations of the sampled
    elements, the smooth class on which a tame estimate is assumed.  With
    ``smooth_only`` the Lipschitz ratios too are taken only over matched
    truncations of each pair, the weaker hypothesis that suffices when the
    map is already known to be continuous at the low order.
    """
    samples = list(samples)
    if not samples:
        raise ValueError("at least one sample pair is required")
    for v, w in samples:
        adapter.check_ball(v)
        adapter.check_ball(w)

    if smooth_only:
        pairs = []
        for v, w in samples:
            for n in range(max(v.support, w.support)):
                pairs.append((truncate(v, n), truncate(w, n)))
    else:
        pairs = samples

    c0 = 0.0
    for v, w in pairs:
        denom = dyadic_norm(v - w, (adapter.s0, 1.0))
        if denom < ZERO_DENOMINATOR:
            continue
        num = dyadic_norm(adapter(v) - adapter(w), (adapter.s0, math.inf))
        c0 = max(c0, num / denom)

    c1 = 0.0
    seen = set()
    for v, w in samples:
        for element in (v, w):
            for smooth in _truncation_family(element):
                key = _sequence_key(smooth)
                if key in seen:
                    continue
                seen.add(key)
                denom = dyadic_norm(smooth, (adapter.s1, 1.0))
                if denom < ZERO_DENOMINATOR:
                    continue
                num = dyadic_norm(adapter(smooth), (adapter.s1, math.inf))
                c1 = max(c1, num / denom)

    return HypothesisReport.from_constants(
        c0, c1, adapter.s0, adapter.s, adapter.s1,
        samples_used=len(samples), smooth_only=smooth_only,
    )


@dataclass(frozen=True)
class HighLowRow:
    """Per-level check of the two hypothesis bounds and truncation identities.

    ``high``: ||Phi(S_n f)||_{s1,inf} against C1_hat 2^{n(s1-s)} gamma_n.
    ``low``:  ||Phi(S_{n+1}f) - Phi(S_n f)||_{s0,inf} against
              C0_hat 2^{-n(s-s0)} gamma_{n+1}.
    ``sn_s1_norm`` equals ``sn_s1_envelope`` identically (that is how the
    envelope is defined) and ``diff_s0_norm <= diff_s0_bound``.
    """

    n: int
    high_lhs: float
    high_rhs: float
    low_lhs: float
    low_rhs: float
    sn_s1_norm: float
    sn_s1_envelope: float
    diff_s0_norm: float
    diff_s0_bound: float


def high_low_rows(
    adapter: FlowMapAdapter,
    f: DyadicSequence,
    report: HypothesisReport,
    n_max: int,
) -> list:
    adapter.check_ball(f)
    env = compute_envelope(f, adapter.s, adapter.s1)
    if n_max + 1 >= env.gamma.size:
        raise ValueError("n_max exceeds the envelope's stored range")
    rows = []
    for n in range(n_max + 1):
        sn = truncate(f, n)
        sn1 = truncate(f, n + 1)
        gamma_n = float(env.gamma[n])
        gamma_n1 = float(env.gamma[n + 1])
        high_lhs = dyadic_norm(adapter(sn), (adapter.s1, math.inf))
        high_rhs = report.C1_hat * 2.0 ** (n * (adapter.s1 - adapter.s)) * gamma_n
        low_lhs = dyadic_norm(
            adapter(sn1) - adapter(sn), (adapter.s0, math.inf)
        )
        low_rhs = report.C0_hat * 2.0 ** (-n * (adapter.s - adapter.s0)) * gamma_n1
        rows.append(
            HighLowRow(
                n=n,
                high_lhs=high_lhs,
                high_rhs=high_rhs,
                low_lhs=low_lhs,
                low_rhs=low_rhs,
                sn_s1_norm=dyadic_norm(sn, (adapter.s1, 1.0)),
                sn_s1_envelope=2.0 ** (n * (adapter.s1 - adapter.s)) * gamma_n,
                diff_s0_norm=dyadic_norm(sn1 - sn, (adapter.s0, 1.0)),
                diff_s0_bound=2.0 ** (-n * (adapter.s - adapter.s0)) * gamma_n1,
            )
        )
    return rows


@dataclass(frozen=True)
class DecayRow:
    """One (n, m) entry of the blockwise exponential-decay profile."""

    n: int
    m: int
    lhs: float
    rhs: float

    @property
    def ratio(self) -> float:
        return self.lhs / self.rhs if self.rhs > 0 else 0.0


def block_decay_profile(
    adapter: FlowMapAdapter,
    f: DyadicSequence,
    report: HypothesisReport,
    n_max: int,
) -> list:
    """Blockwise decay of the truncation increments of Phi.

    Row (n, m) compares

        lhs = 2^{m s} ||(Phi(S_{n+1} f) - Phi(S_n f))_m||_F
        rhs = C 2^{-kappa |m - n|} (gamma_n + gamma_{n+1})

    for all m up to the output support.  With honest constants every row
    has lhs <= rhs.
    """
    adapter.check_ball(f)
    env = compute_envelope(f, adapter.s, adapter.s1)
    if n_max + 1 >= env.gamma.size:
        raise ValueError("n_max exceeds the envelope's stored range")
    rows = []
    for n in range(n_max + 1):
        diff = adapter(truncate(f, n + 1)) - adapter(truncate(f, n))
        block = diff.block_norms
        c_n = float(env.gamma[n] + env.gamma[n + 1])
        for m in range(block.size):
            lhs = 2.0 ** (m * adapter.s) * float(block[m])
            rhs = report.C * 2.0 ** (-report.kappa * abs(m - n)) * c_n
            rows.append(DecayRow(n=n, m=m, lhs=lhs, rhs=rhs))
    return rows


@dataclass(frozen=True)
class ConvergenceRow:
    n: int
    actual: float
    bound: float


@dataclass(frozen=True)
class ConvergenceReport:
    """Rows of ||Phi(f) - Phi(S_n f)||_{s,q} against the telescoped bound."""

    rows: tuple
    A: float
    C: float
    kappa: float

    def to_dict(self) -> dict:
        return {
            "A": self.A,
            "C": self.C,
            "kappa": self.kappa,
            "estimated": True,
            "rows": [
                {"n": r.n, "actual": r.actual, "bound": r.bound} for r in self.rows
            ],
        }


def convergence_bound(
    adapter: FlowMapAdapter,
    f: DyadicSequence,
    report: HypothesisReport,
    n: int,
) -> ConvergenceRow:
    """One telescoped convergence row at truncation level n.

    actual = ||Phi(f) - Phi(S_n f)||_{s,q};
    bound  = A C ( sum_{p>=n} c_p^q )^{1/q} with A = 2/(1 - 2^-kappa).
    """
    adapter.check_ball(f)
    env = compute_envelope(f, adapter.s, adapter.s1)
    a = 2.0 / (1.0 - 2.0 ** (-report.kappa))
    actual = dyadic_norm(adapter(f) - adapter(truncate(f, n)), (adapter.s, adapter.q))
    bound = a * report.C * c_tail_lq(env, n, adapter.q)
    return ConvergenceRow(n=n, actual=actual, bound=bound)


def convergence_report(
    adapter: FlowMapAdapter,
    f: DyadicSequence,
    report: HypothesisReport,
    n_values: Sequence[int],
) -> ConvergenceReport:
    rows = tuple(convergence_bound(adapter, f, report, n) for n in n_values)
    return ConvergenceReport(
        rows=rows,
        A=2.0 / (1.0 - 2.0 ** (-report.kappa)),
        C=report.C,
        kappa=report.kappa,
    )


@dataclass(frozen=True)
class ContinuityRow:
    scale: float
    direction: int
    input_distance: float
    output_distance: float


@dataclass(frozen=True)
class ContinuityReport:
    rows: tuple
    trend_ok: bool
    floor: float = CONTINUITY_FLOOR

    def to_dict(self) -> dict:
        return {
            "trend_ok": self.trend_ok,
            "floor": self.floor,
            "rows": [
                {
                    "scale": r.scale,
                    "direction": r.direction,
                    "input_distance": r.input_distance,
                    "output_distance": r.output_distance,
                }
                for r in self.rows
            ],
        }


def continuity_probe(
    adapter: FlowMapAdapter,
    f: DyadicSequence,
    perturbation_scales: Sequence[float],
    directions: Sequence[DyadicSequence] | None = None,
) -> ContinuityReport:
    """Drive perturbations of f through Phi and record the distance pairs.

    For every scale eps and unit-normalized direction g the probe evaluates
    ||(f + eps g) - f||_{s,q} against ||Phi(f + eps g) - Phi(f)||_{s,q}.
    Continuity gives no rate, so the verdict compares batch extremes: the
    largest output distance at the smallest scale must lie below the
    smallest output distance at the largest scale (or both below the
    absolute floor).  All perturbed inputs must stay inside the ball.
    """
    adapter.check_ball(f)
    if directions is None:
        norm = dyadic_norm(f, (adapter.s, adapter.q))
        if norm == 0.0:
            raise ValueError("cannot build a default direction from the zero point")
        directions = [f * (1.0 / norm)]
    scales = sorted(set(float(s) for s in perturbation_scales), reverse=True)
    base_image = adapter(f)
    rows = []
    for eps in scales:
        for d_index, g in enumerate(directions):
            perturbed = f + g * eps
            rows.append(
                ContinuityRow(
                    scale=eps,
                    direction=d_index,
                    input_distance=dyadic_norm(
                        perturbed - f, (adapter.s, adapter.q)
                    ),
                    output_distance=dyadic_norm(
                        adapter(perturbed) - base_image, (adapter.s, adapter.q)
                    ),
                )
            )
    trend_ok = True
    if len(scales) >= 2:
        largest = [r.output_distance for r in rows if r.scale == scales[0]]
        smallest = [r.output_distance for r in rows if r.scale == scales[-1]]
        trend_ok = max(smallest) < min(largest) or (
            max(smallest) <= CONTINUITY_FLOOR and max(largest) <= CONTINUITY_FLOOR
        )
    return ContinuityReport(rows=tuple(rows), trend_ok=trend_ok)
