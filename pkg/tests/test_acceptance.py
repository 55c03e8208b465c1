"""Acceptance suite: one test per criterion, one printed PASS line each.

Run with ``pytest tests/test_acceptance.py -v -s`` to see the per-criterion
lines.  Every tolerance is pinned here; nothing is deferred to later
calibration.
"""
import json
import math
import os

import numpy as np
import pytest

from besovflow.cli import EXIT_OK, main as cli_main
from besovflow.dyadic import (
    dyadic_norm,
    random_sequence,
    smoothing_gain,
    truncate,
    weighted_smoothing_sum,
)
from besovflow.engine import (
    block_decay_profile,
    continuity_probe,
    convergence_report,
    estimate_constants,
    high_low_rows,
)
from besovflow.envelope import compute_envelope, envelope_equivalence
from besovflow.flows import (
    FlowConfig,
    burgers_flow,
    burgers_spectral_reference,
    chemin_lerner_norm,
    flow_as_sequence_map,
    lmu_time_sobolev_norm,
    make_flow,
    sinusoid_datum,
    time_continuity_modulus,
)
from besovflow.littlewood_paley import (
    almost_orthogonality,
    apply_block,
    bessel_potential,
    build_filters,
    decompose,
    grid_l2_norm,
    partition_of_unity,
    random_grid_function,
    reconstruct,
)

INF = math.inf
GRID = 256


def report(ok: bool, label: str, detail: str):
    print(f"{'PASS' if ok else 'FAIL'}  {label}: {detail}")
    assert ok, f"{label}: {detail}"


@pytest.fixture(scope="module")
def bank():
    return build_filters(GRID)


@pytest.fixture(scope="module")
def transport_setup(bank):
    rng = np.random.default_rng(616)
    data = [random_grid_function(rng, GRID, max_mode=24, decay=2.5) for _ in range(4)]
    family = [decompose(u, bank) for u in data]
    radius = 2.0 * max(dyadic_norm(f, (2.0, 2.0)) for f in family)
    cfg = FlowConfig(
        grid_size=GRID, T=1.0, time_steps=64, flow_kind="transport",
        transport_speed=1.0, ball_radius=radius, s0=0.0, s=2.0, s1=3.0,
        q=2.0, mu=INF,
    )
    adapter = flow_as_sequence_map(make_flow(cfg), cfg, bank)
    probe = family[0]
    pairs = [(family[i], family[j]) for i in range(len(family)) for j in range(i)]
    pairs += [
        (truncate(probe, n + 1), truncate(probe, n))
        for n in range(probe.support - 1)
    ]
    constants = estimate_constants(adapter, pairs).inflated(1.1)
    return {"adapter": adapter, "probe": probe, "constants": constants, "cfg": cfg}


@pytest.fixture(scope="module")
def burgers_setup(bank):
    data = [
        sinusoid_datum(GRID, a, b)
        for a, b in [(0.1, 0.05), (0.08, -0.04), (-0.06, 0.05), (0.12, 0.0)]
    ]
    family = [decompose(u, bank) for u in data]
    radius = 2.0 * max(dyadic_norm(f, (2.0, 2.0)) for f in family)
    cfg = FlowConfig(
        grid_size=GRID, T=0.5, time_steps=64, flow_kind="burgers",
        ball_radius=radius, s0=0.0, s=2.0, s1=3.0, q=2.0, mu=INF,
    )
    adapter = flow_as_sequence_map(make_flow(cfg), cfg, bank)
    probe = family[0]
    pairs = [(family[i], family[j]) for i in range(len(family)) for j in range(i)]
    pairs += [
        (truncate(probe, n + 1), truncate(probe, n))
        for n in range(probe.support - 1)
    ]
    constants = estimate_constants(adapter, pairs).inflated(1.1)
    trajectory = burgers_flow(data[0], cfg)
    return {
        "adapter": adapter, "probe": probe, "family": family,
        "constants": constants, "cfg": cfg, "trajectory": trajectory,
        "datum": data[0],
    }


def test_criterion_01_filter_axioms(bank):
    partition_dev = float(np.abs(partition_of_unity(bank) - 1.0).max())
    ao = almost_orthogonality(bank)
    ok = (
        partition_dev <= 1e-12
        and ao.min() >= 1.0 / 3.0 - 1e-12
        and ao.max() <= 1.0 + 1e-12
    )
    report(
        ok,
        "criterion 1 (filter axioms)",
        f"partition dev {partition_dev:.2e}, ao in [{ao.min():.12f}, {ao.max():.12f}]",
    )


def test_criterion_02_exact_inversion(bank):
    rng = np.random.default_rng(101)
    worst = 0.0
    for _ in range(1000):
        u = random_grid_function(rng, GRID, decay=float(rng.uniform(0.0, 2.0)))
        rebuilt = reconstruct(decompose(u, bank), bank)
        worst = max(
            worst,
            float(np.abs(rebuilt.values - u.values).max())
            / float(np.abs(u.values).max()),
        )
    report(
        worst <= 1e-10,
        "criterion 2 (exact inversion)",
        f"worst relative error {worst:.2e} over 1000 functions",
    )


def test_criterion_03_sobolev_equivalence(bank):
    rng = np.random.default_rng(202)
    worst_low, worst_high = math.inf, 0.0
    ok = True
    for _ in range(200):
        u = random_grid_function(rng, GRID, decay=float(rng.uniform(0.0, 1.5)))
        for s in (-1.0, 0.0, 1.0, 2.0):
            shifted = bessel_potential(u, s)
            blockwise = sum(
                grid_l2_norm(apply_block(shifted, j, bank)) ** 2
                for j in range(bank.j_max + 1)
            )
            squared = grid_l2_norm(shifted) ** 2
            ok = ok and blockwise <= squared * (1 + 1e-9)
            ok = ok and squared <= 3.0 * blockwise * (1 + 1e-9)
            worst_low = min(worst_low, blockwise / squared)
            worst_high = max(worst_high, squared / blockwise)
    report(
        ok,
        "criterion 3 (dyadic Sobolev equivalence)",
        f"block-sum/norm ratios within [{worst_low:.4f}, {worst_high:.4f}] of [1/3, 1]",
    )


def test_criterion_04_smoothing_bounds():
    rng = np.random.default_rng(303)
    ok = True
    worst_gain, worst_weighted = 0.0, 0.0
    for _ in range(1000):
        f = random_sequence(rng)
        r = float(rng.uniform(-2.0, 2.0))
        rp = r + float(rng.uniform(0.05, 2.0))
        q = float(rng.choice([1.0, 2.0, INF]))
        n = int(rng.integers(0, f.support + 4))
        value, bound = smoothing_gain(f, r, rp, q, n)
        if bound > 0:
            worst_gain = max(worst_gain, value / bound)
        ok = ok and value <= bound * (1 + 1e-9)
        value, bound = weighted_smoothing_sum(f, r, rp, q)
        if bound > 0:
            worst_weighted = max(worst_weighted, value / bound)
        ok = ok and value <= bound * (1 + 1e-9)
    report(
        ok,
        "criterion 4 (smoothing bounds)",
        f"worst value/bound: gain {worst_gain:.6f}, weighted sum {worst_weighted:.6f}",
    )


def test_criterion_05_envelope_equivalence():
    rng = np.random.default_rng(404)
    ok = True
    for _ in range(1000):
        f = random_sequence(rng)
        s = float(rng.uniform(-2.0, 2.0))
        s1 = s + float(rng.uniform(0.1, 2.0))
        q = float(rng.choice([1.0, 2.0, INF]))
        lower, mid, upper = envelope_equivalence(f, s, q, s1)
        ok = ok and lower <= mid * (1 + 1e-9) and mid <= upper * (1 + 1e-9)
        env = compute_envelope(f, s, s1)
        growth = 2.0 ** (s1 - s)
        gamma = env.gamma
        ok = ok and bool(np.all(gamma[:-1] <= growth * gamma[1:] * (1 + 1e-9)))
    report(
        ok,
        "criterion 5 (envelope equivalence)",
        "sandwich and one-sided slow variation hold on 1000 sequences",
    )


def test_criterion_06_transport_engine(transport_setup):
    adapter = transport_setup["adapter"]
    probe = transport_setup["probe"]
    constants = transport_setup["constants"]
    n_top = probe.support - 1

    ok = constants.kappa == 1.0
    hl = high_low_rows(adapter, probe, constants, n_max=n_top)
    high_ok = all(r.high_lhs <= r.high_rhs * (1 + 1e-9) for r in hl)
    low_ok = all(r.low_lhs <= r.low_rhs * (1 + 1e-9) for r in hl)
    identity_ok = all(
        abs(r.sn_s1_norm - r.sn_s1_envelope) <= 1e-9 * max(1.0, r.sn_s1_norm)
        and r.diff_s0_norm <= r.diff_s0_bound * (1 + 1e-9)
        for r in hl
    )
    decay = block_decay_profile(adapter, probe, constants, n_max=n_top)
    decay_ok = all(r.lhs <= r.rhs * (1 + 1e-9) for r in decay)
    conv = convergence_report(adapter, probe, constants, range(probe.support + 1))
    conv_ok = all(r.actual <= r.bound * (1 + 1e-9) for r in conv.rows)
    ok = ok and high_ok and low_ok and identity_ok and decay_ok and conv_ok
    ok = ok and conv.A == pytest.approx(4.0, rel=1e-15)
    report(
        ok,
        "criterion 6 (transport engine rows)",
        f"high/low {high_ok}/{low_ok}, identities {identity_ok}, "
        f"decay rows {len(decay)} ok={decay_ok}, telescoped ok={conv_ok}, A={conv.A}",
    )


def test_criterion_07_burgers_continuity(burgers_setup):
    adapter = burgers_setup["adapter"]
    probe = burgers_setup["probe"]
    family = burgers_setup["family"]
    constants = burgers_setup["constants"]

    conv = convergence_report(adapter, probe, constants, range(probe.support + 1))
    conv_ok = all(r.actual <= r.bound * (1 + 1e-9) for r in conv.rows)
    vanishes = conv.rows[-1].actual <= 1e-12

    delta = family[1] - probe
    direction = delta * (1.0 / dyadic_norm(delta, (2.0, 2.0)))
    probe_report = continuity_probe(
        adapter, probe, [1e-1, 1e-2, 1e-3], directions=[direction]
    )
    outputs = [row.output_distance for row in probe_report.rows]
    strictly_decreasing = outputs[0] > outputs[1] > outputs[2]
    ok = conv_ok and vanishes and strictly_decreasing and probe_report.trend_ok
    report(
        ok,
        "criterion 7 (Burgers convergence and continuity)",
        f"rows ok={conv_ok}, limit {conv.rows[-1].actual:.1e}, "
        f"probe distances {[f'{o:.3e}' for o in outputs]}",
    )


def test_criterion_08_chemin_lerner(burgers_setup, bank):
    traj = burgers_setup["trajectory"]
    y_norm = chemin_lerner_norm(traj, 2.0, bank)
    tc = time_continuity_modulus(traj, 2.0, bank)
    tails = tc.tails
    finite = math.isfinite(y_norm) and y_norm > 0.0
    monotone = bool(np.all(np.diff(tails) <= 1e-15))
    vanishes = tails[bank.j_max] <= 1e-12 * tails[0]
    sup_hs = lmu_time_sobolev_norm(traj, 2.0)
    minkowski = sup_hs <= math.sqrt(3.0) * y_norm * (1 + 1e-9)
    ok = finite and monotone and vanishes and minkowski
    report(
        ok,
        "criterion 8 (Chemin-Lerner conclusion)",
        f"Y-norm {y_norm:.4f}, tail[{bank.j_max}]/tail[0] "
        f"{tails[bank.j_max] / tails[0]:.1e}, sup_t H2 {sup_hs:.4f} "
        f"<= sqrt(3)*Y {math.sqrt(3.0) * y_norm:.4f}",
    )


def test_criterion_09_oracle_cross_check(burgers_setup):
    cfg = burgers_setup["cfg"]
    datum = sinusoid_datum(GRID, 0.1)
    traj = burgers_flow(datum, cfg)
    reference = burgers_spectral_reference(datum, traj.times, steps_per_interval=32)
    worst = max(
        float(np.abs(a.values - b.values).max())
        for a, b in zip(traj.states, reference.states)
    )
    report(
        worst <= 1e-6,
        "criterion 9 (solver cross-check)",
        f"characteristics vs pseudospectral RK4 max error {worst:.2e}",
    )


def test_criterion_10_cli_determinism(tmp_path):
    def emit(config, out):
        path = tmp_path / "config.json"
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(config, fh)
        assert cli_main(["--config", str(path), "--out", str(out), "--quiet"]) == EXIT_OK

    def snapshot(directory):
        out = {}
        for name in sorted(os.listdir(directory)):
            full = os.path.join(directory, name)
            if os.path.isfile(full):
                with open(full, "rb") as fh:
                    out[name] = fh.read()
        return out

    verify_cfg = {"schema_version": 1, "command": "verify", "seed": 12, "trials": 50}
    flow_cfg = {
        "schema_version": 1, "command": "flow", "seed": 12, "grid_size": 32,
        "scale": {"s0": 0.0, "s": 2.0, "s1": 3.0, "q": 2.0},
        "flow": {"kind": "burgers", "T": 0.4, "time_steps": 16, "mu": "inf"},
    }
    identical = True
    for config in (verify_cfg, flow_cfg):
        emit(config, tmp_path / "run_a")
        emit(config, tmp_path / "run_b")
        identical = identical and snapshot(tmp_path / "run_a") == snapshot(
            tmp_path / "run_b"
        )
    report(
        identical,
        "criterion 10 (deterministic reports)",
        "verify and flow reruns with a fixed seed are byte-identical",
    )
