import math

import numpy as np
import pytest

from besovflow.dyadic import DyadicSequence, random_sequence
from besovflow.envelope import (
    c_sequence,
    c_tail_lq,
    compute_envelope,
    envelope_equivalence,
    envelope_report_rows,
    gamma_lq_norm,
)
from besovflow.pseudonorm import scalar_abs_space

INF = math.inf


def scalar_seq(*values):
    return DyadicSequence(scalar_abs_space(), tuple(float(v) for v in values))


def brute_gamma(values, s, s1, n):
    """Independent oracle: 2^{-n(s1-s)} sum_{k<=n} 2^{k s1} |f_k|."""
    total = sum(2.0 ** (k * s1) * abs(v) for k, v in enumerate(values) if k <= n)
    return 2.0 ** (-n * (s1 - s)) * total


class TestComputeEnvelope:
    def test_single_block_closed_form(self):
        env = compute_envelope(scalar_seq(1.0), 1.0, 2.0)
        for n in range(env.gamma.size):
            assert env.gamma[n] == pytest.approx(2.0**-n, rel=1e-15)

    def test_zero_sequence(self):
        env = compute_envelope(scalar_seq(), 0.0, 1.0)
        assert np.all(env.gamma == 0.0)
        env = compute_envelope(scalar_seq(0, 0, 0), 0.0, 1.0)
        assert np.all(env.gamma == 0.0)

    def test_geometric_sum_oracle(self):
        # blocks 4^-k for k = 0..5 at orders (s, s1) = (1, 2):
        # gamma_n = 2^-n (n+1) on the support
        values = [4.0**-k for k in range(6)]
        f = scalar_seq(*values)
        env = compute_envelope(f, 1.0, 2.0)
        for n in range(6):
            oracle = brute_gamma(values, 1.0, 2.0, n)
            assert oracle == pytest.approx(2.0**-n * (n + 1), rel=1e-12)
            assert env.gamma[n] == pytest.approx(oracle, rel=1e-12)

    def test_order_precondition(self):
        with pytest.raises(ValueError):
            compute_envelope(scalar_seq(1), 2.0, 1.0)

    def test_exact_decay_past_support(self, rng):
        for _ in range(100):
            f = random_sequence(rng)
            s = float(rng.uniform(-2, 2))
            s1 = s + float(rng.uniform(0.1, 2))
            env = compute_envelope(f, s, s1)
            ratio = env.decay_ratio
            for n in range(f.support, env.gamma.size - 1):
                assert env.gamma[n + 1] == env.gamma[n] * ratio

    def test_dominates_weighted_blocks(self, rng):
        for _ in range(200):
            f = random_sequence(rng)
            s = float(rng.uniform(-2, 2))
            s1 = s + float(rng.uniform(0.1, 2))
            env = compute_envelope(f, s, s1)
            weighted = np.exp2(s * np.arange(f.support)) * f.block_norms
            assert np.all(weighted <= env.gamma[: f.support] * (1 + 1e-12))

    def test_one_sided_slow_variation(self, rng):
        for _ in range(200):
            f = random_sequence(rng)
            s = float(rng.uniform(-2, 2))
            s1 = s + float(rng.uniform(0.1, 2))
            env = compute_envelope(f, s, s1)
            growth = 2.0 ** (s1 - s)
            gamma = env.gamma
            assert np.all(gamma[:-1] <= growth * gamma[1:] * (1 + 1e-12))


class TestEnvelopeEquivalence:
    def test_zero_sequence(self):
        assert envelope_equivalence(scalar_seq(), 0.0, 2.0, 1.0) == (0.0, 0.0, 0.0)

    def test_single_block_sup_case(self):
        lower, mid, upper = envelope_equivalence(scalar_seq(1.0), 1.0, INF, 2.0)
        assert lower == pytest.approx(0.5, rel=1e-15)
        assert mid == 1.0
        assert upper == pytest.approx(1.0, rel=1e-15)

    def test_ordering_on_random(self, rng):
        for _ in range(1000):
            f = random_sequence(rng)
            s = float(rng.uniform(-2, 2))
            s1 = s + float(rng.uniform(0.1, 2))
            q = float(rng.choice([1.0, 2.0, INF]))
            lower, mid, upper = envelope_equivalence(f, s, q, s1)
            assert lower <= mid * (1 + 1e-9)
            assert mid <= upper * (1 + 1e-9)

    def test_gamma_norm_tail_is_closed_form(self):
        # single block: gamma_n = 2^-n, so ||gamma||_1 = 2 and ||gamma||_2
        # = sqrt(4/3) once the whole geometric tail is included
        env = compute_envelope(scalar_seq(1.0), 1.0, 2.0)
        assert gamma_lq_norm(env, 1.0) == pytest.approx(2.0, rel=1e-12)
        assert gamma_lq_norm(env, 2.0) == pytest.approx(math.sqrt(4.0 / 3.0), rel=1e-12)
        assert gamma_lq_norm(env, INF) == 1.0


class TestCSequence:
    def test_zero(self):
        env = compute_envelope(scalar_seq(), 0.0, 1.0)
        assert np.all(c_sequence(env) == 0.0)

    def test_geometric_envelope(self):
        env = compute_envelope(scalar_seq(1.0), 1.0, 2.0)
        c = c_sequence(env)
        for n in range(c.size):
            assert c[n] == pytest.approx(3.0 * 2.0 ** (-n - 1), rel=1e-14)

    def test_matches_elementwise_sum(self, rng):
        for _ in range(100):
            f = random_sequence(rng)
            env = compute_envelope(f, 0.0, 1.0)
            c = c_sequence(env)
            assert np.allclose(c, env.gamma[:-1] + env.gamma[1:], rtol=0, atol=0)

    def test_tail_closed_form_matches_brute_force(self, rng):
        for _ in range(100):
            f = random_sequence(rng, max_support=8)
            s = float(rng.uniform(-1, 1))
            s1 = s + float(rng.uniform(0.2, 1.5))
            q = float(rng.choice([1.0, 2.0, INF]))
            n = int(rng.integers(0, f.support + 3))
            env = compute_envelope(f, s, s1)
            # brute force: extend the recursion far enough that the rest is
            # negligible, then sum directly
            gamma = list(env.gamma)
            while len(gamma) < n + 600:
                gamma.append(gamma[-1] * env.decay_ratio)
            c = [gamma[p] + gamma[p + 1] for p in range(len(gamma) - 1)]
            if math.isinf(q):
                oracle = max(c[n:])
            else:
                oracle = sum(v**q for v in c[n:]) ** (1.0 / q)
            assert c_tail_lq(env, n, q) == pytest.approx(oracle, rel=1e-9)


class TestEnvelopeReport:
    def test_rows_shape_and_content(self):
        f = scalar_seq(1.0, 0.5)
        env = compute_envelope(f, 1.0, 2.0)
        rows = envelope_report_rows(env)
        assert rows[0][0] == 0
        n, gamma_n, c_n, weighted = rows[0]
        assert gamma_n == env.gamma[0]
        assert c_n == env.gamma[0] + env.gamma[1]
        assert weighted == 1.0  # 2^{0*s} * |f_0|
        # beyond the support the weighted block norm is zero
        assert rows[-1][3] == 0.0
