"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Expensive Monte Carlo artifacts (the four scheme-I waterfall curves, the two
scheme-II runs) are computed once per session and shared. Criteria 2a and 2b
assert the stated delta windows verbatim; see the assertion messages for the
measured values if they fail.
"""
import itertools
import math
import time
from pathlib import Path

import numpy as np
import pytest

from risdcsk.analytic import (average_ber, ber_b_conditional,
                              ber_c_conditional, mixture_from_profile,
                              overall_ber_scheme_I, theory_curve)
from risdcsk.channel import (ChannelProfile, ChannelRealization, propagate,
                             sample_aggregate, sample_cascaded)
from risdcsk.chaos import fm_modulate, generate_chaos
from risdcsk.cli import build_spec, crossing_db, load_config, main
from risdcsk.framing import SchemeConfig, SourcePayload, build_frame
from risdcsk.harness import (metric_moment_model, metric_samples, run_sweep,
                             sweep_relay)
from risdcsk.receiver import demodulate_frame

CONFIG_DIR = Path(__file__).resolve().parent.parent / "configs"
SD = ChannelProfile(gains=(2 / 3, 1 / 3), delays=(0, 3), role="sd")
SR = ChannelProfile(gains=(1 / 2, 1 / 3, 1 / 6), delays=(0, 2, 4), role="sr")
RD = ChannelProfile(gains=(4 / 7, 3 / 7), delays=(0, 1), role="rd")

GAP_LEVELS = (1e-1, 3e-2, 1e-2, 3e-3, 1e-3, 3e-4, 1e-4)


def report(criterion: str, ok: bool, detail: str) -> None:
    print(f"ACCEPTANCE {criterion}: {'PASS' if ok else 'FAIL'} — {detail}")


def fine_grid(lo: float, hi: float, step: float = 0.1) -> list:
    n = int(round((hi - lo) / step))
    return [lo + i * step for i in range(n + 1)]


def load_spec(name: str):
    return build_spec(load_config(CONFIG_DIR / name))


@pytest.fixture(scope="session")
def fig2_results():
    """Simulated + fine analytic overall-BER curves for the four combos."""
    out = {}
    for M, N in [(4, 128), (16, 128), (4, 32), (16, 32)]:
        spec = load_spec(f"fig2_m{M}_n{N}.yaml")
        t0 = time.time()
        sim, _ = run_sweep(spec)
        elapsed = time.time() - t0
        fg = fine_grid(min(spec.grid_db) - 1.0, max(spec.grid_db) + 0.5)
        theo = theory_curve(spec.cfg, fg, sd=spec.sd, tol=1e-9)
        out[(M, N)] = dict(
            spec=spec, elapsed=elapsed,
            sim_grid=[p.ebn0_db for p in sim],
            sim_overall=[p.ber_overall for p in sim],
            fine_grid=fg,
            th_overall=[p.P_overall for p in theo],
        )
    return out


@pytest.fixture(scope="session")
def fig4_results():
    """Scheme II source/relay curves at N = 128 and N = 64."""
    out = {}
    for N in (128, 64):
        spec = load_spec(f"fig4_n{N}.yaml")
        sim, _ = run_sweep(spec)
        fg = fine_grid(min(spec.grid_db) - 1.0, max(spec.grid_db) + 0.5)
        theo = theory_curve(spec.cfg, fg, sr=spec.sr, rd=spec.rd, tol=1e-9)
        out[N] = dict(
            spec=spec,
            sim_grid=[p.ebn0_db for p in sim],
            sim_b=[p.ber_b for p in sim],
            sim_c=[p.ber_c for p in sim],
            fine_grid=fg,
            th_b=[p.P_b for p in theo],
            th_c=[p.P_c for p in theo],
        )
    return out


def horizontal_gaps(sim_grid, sim_bers, th_grid, th_bers, levels=GAP_LEVELS):
    """(level, sim_crossing, theory_crossing) for every requested BER level."""
    rows = []
    for level in levels:
        xs = crossing_db(sim_grid, sim_bers, level)
        xt = crossing_db(th_grid, th_bers, level)
        rows.append((level, xs, xt))
    return rows


def test_criterion_1_theory_sim_agreement(fig2_results):
    """Scheme I waterfalls: sim and theory within 1 dB over [1e-4, 1e-1]."""
    worst = 0.0
    details = []
    for (M, N), r in fig2_results.items():
        assert r["elapsed"] < 600, f"curve (M={M}, N={N}) took {r['elapsed']:.0f}s"
        for level, xs, xt in horizontal_gaps(r["sim_grid"], r["sim_overall"],
                                             r["fine_grid"], r["th_overall"]):
            assert math.isfinite(xs), \
                f"(M={M}, N={N}): simulated curve never crosses BER {level:g}"
            assert math.isfinite(xt), \
                f"(M={M}, N={N}): analytic curve never crosses BER {level:g}"
            gap = abs(xs - xt)
            worst = max(worst, gap)
            details.append(f"M{M}/N{N}@{level:.0e}:{gap:.2f}")
    ok = worst <= 1.0
    report("1 (theory-sim agreement)", ok,
           f"max horizontal gap {worst:.3f} dB over {len(details)} level checks")
    assert worst <= 1.0, f"gaps: {details}"


def _analytic_crossing(r, level=1e-4):
    return crossing_db(r["fine_grid"], r["th_overall"], level)


def _sim_crossing(r, level=1e-4):
    return crossing_db(r["sim_grid"], r["sim_overall"], level)


def test_criterion_2a_m_gap_analytic(fig2_results):
    """M=4 vs M=16 gap at N=128, BER 1e-4, on analytic curves: 2.5 +/- 0.75 dB."""
    gap = _analytic_crossing(fig2_results[(16, 128)]) - _analytic_crossing(
        fig2_results[(4, 128)])
    ok = 1.75 <= gap <= 3.25
    report("2a (M-order gap)", ok, f"analytic gap {gap:.3f} dB, window [1.75, 3.25]")
    assert ok, (
        f"analytic M=4 vs M=16 gap at BER 1e-4 is {gap:.3f} dB, outside 2.5 +/- 0.75 dB. "
        "The model itself produces this value (simulation concurs, see the 2-sim "
        "companion test); the stated window excludes it.")


def test_criterion_2b_n_gap_analytic(fig2_results):
    """N=32 vs N=128 gap at M=16, BER 1e-4, on analytic curves: 5 +/- 1 dB."""
    gap = _analytic_crossing(fig2_results[(16, 32)]) - _analytic_crossing(
        fig2_results[(16, 128)])
    ok = 4.0 <= gap <= 6.0
    report("2b (element-count gap)", ok, f"analytic gap {gap:.3f} dB, window [4, 6]")
    assert ok, (
        f"analytic N=32 vs N=128 gap at BER 1e-4 is {gap:.3f} dB, outside 5 +/- 1 dB. "
        "The element count enters the average SNR of every path as a pure factor, so the "
        "analytic gap is forced to 10*log10(128/32) = 6.021 dB at every BER level, "
        "which the stated window excludes by 0.02 dB.")


def test_criterion_2_sim_confirms_analytic_gaps(fig2_results):
    """Simulated gaps agree with the analytic gaps within CI resolution."""
    tol = 0.6  # dB; each crossing carries ~0.2-0.3 dB of CI-induced slack
    m_sim = _sim_crossing(fig2_results[(16, 128)]) - _sim_crossing(
        fig2_results[(4, 128)])
    m_th = _analytic_crossing(fig2_results[(16, 128)]) - _analytic_crossing(
        fig2_results[(4, 128)])
    n_sim = _sim_crossing(fig2_results[(16, 32)]) - _sim_crossing(
        fig2_results[(16, 128)])
    n_th = _analytic_crossing(fig2_results[(16, 32)]) - _analytic_crossing(
        fig2_results[(16, 128)])
    ok = abs(m_sim - m_th) <= tol and abs(n_sim - n_th) <= tol
    report("2-sim (gap confirmation)", ok,
           f"M-gap sim {m_sim:.3f} vs analytic {m_th:.3f}; "
           f"N-gap sim {n_sim:.3f} vs analytic {n_th:.3f} (tol {tol} dB)")
    assert abs(m_sim - m_th) <= tol
    assert abs(n_sim - n_th) <= tol


def _overall_theory_sf(M, n, sf, N, grid_db):
    """Analytic overall BER with beta = SF / (2(n+1)), fractional allowed."""
    beta = sf / (2 * (n + 1))
    bits = 1 + n * math.log2(M)
    out = []
    for db in grid_db:
        mix = mixture_from_profile(SD, N, 16.0 ** -2.0, bits * 10 ** (db / 10))
        pb = average_ber(lambda r: ber_b_conditional(r, beta, n), mix, tol=1e-10)
        pc = average_ber(lambda r: ber_c_conditional(r, beta, n, M), mix, tol=1e-10)
        out.append(overall_ber_scheme_I(pb, pc, M, n))
    return out


def test_criterion_3_symbol_count_and_sf_trends():
    """More PSK symbols per frame help; doubling SF hurts (analytic)."""
    grid = list(np.arange(10.0, 32.0, 1.0))
    curves = {(sf, n): _overall_theory_sf(4, n, sf, 128, grid)
              for sf in (300, 600) for n in (1, 2, 3, 4)}
    for n1, n2 in itertools.combinations((1, 2, 3, 4), 2):
        for i, x in enumerate(grid):
            p1, p2 = curves[(300, n1)][i], curves[(300, n2)][i]
            if p1 <= 1e-2 and p1 > 1e-10:
                assert p2 < p1, (
                    f"n={n2} not better than n={n1} at {x} dB: {p2} vs {p1}")
    for n in (1, 2, 3, 4):
        for i, x in enumerate(grid):
            p300, p600 = curves[(300, n)][i], curves[(600, n)][i]
            if p300 > 1e-10:
                assert p600 > p300, (
                    f"SF=600 not worse than SF=300 at n={n}, {x} dB")
    report("3 (n and SF trends)", True,
           "n=1..4 strictly ordered below BER 1e-2; SF=600 strictly worse")


def test_criterion_4_scheme_ii_source_relay(fig4_results):
    """Source beats relay by 3.5 +/- 1 dB at 1e-4; sim within 1.5 dB of theory."""
    r = fig4_results[128]
    x_src = crossing_db(r["fine_grid"], r["th_b"], 1e-4)
    x_rel = crossing_db(r["fine_grid"], r["th_c"], 1e-4)
    gap = x_rel - x_src
    ok_gap = 2.5 <= gap <= 4.5
    worst = 0.0
    for label, sim_bers, th_bers in (("source", r["sim_b"], r["th_b"]),
                                     ("relay", r["sim_c"], r["th_c"])):
        for level, xs, xt in horizontal_gaps(r["sim_grid"], sim_bers,
                                             r["fine_grid"], th_bers):
            assert math.isfinite(xs) and math.isfinite(xt), \
                f"N=128 {label}: BER {level:g} not crossed inside the grid"
            worst = max(worst, abs(xs - xt))
    ok_agree = worst <= 1.5

    # N = 64: the per-element product channel is farther from Gaussian, so
    # the CLT gap may widen; measure and report it.
    r64 = fig4_results[64]
    worst64 = 0.0
    for sim_bers, th_bers in ((r64["sim_b"], r64["th_b"]),
                              (r64["sim_c"], r64["th_c"])):
        for level, xs, xt in horizontal_gaps(r64["sim_grid"], sim_bers,
                                             r64["fine_grid"], th_bers):
            if math.isfinite(xs) and math.isfinite(xt):
                worst64 = max(worst64, abs(xs - xt))
    ok = ok_gap and ok_agree
    report("4 (relay scheme)", ok,
           f"source-relay analytic gap {gap:.3f} dB (window [2.5, 4.5]); "
           f"N=128 theory-sim gap {worst:.3f} dB (<= 1.5); "
           f"N=64 theory-sim gap {worst64:.3f} dB (reported)")
    assert ok_gap, f"source-relay gap {gap:.3f} dB outside 3.5 +/- 1 dB"
    assert ok_agree, f"N=128 theory-sim gap {worst:.3f} dB exceeds 1.5 dB"


def test_criterion_5_relay_placement():
    """BER vs relay placement peaks at the midpoint and falls toward the ends."""
    spec = load_spec("fig5_mu_sweep.yaml")
    rows = sweep_relay(spec)
    mus = [row[0] for row in rows]
    th_b = [row[2][0].P_b for row in rows]
    th_c = [row[2][0].P_c for row in rows]
    sim_b = [row[1][0] for row in rows]
    mid = mus.index(0.5)
    for series, label in ((th_b, "source"), (th_c, "relay")):
        for i in range(mid):
            assert series[i] < series[i + 1], \
                f"{label}: theory BER not increasing toward mu=0.5 at mu={mus[i]}"
        for i in range(mid, len(mus) - 1):
            assert series[i] > series[i + 1], \
                f"{label}: theory BER not decreasing past mu=0.5 at mu={mus[i]}"
    # simulation confirms the direction with separated confidence intervals
    for end in (0, len(mus) - 1):
        for attr in ("ber_b", "ber_c"):
            p_mid = getattr(sim_b[mid], attr)
            p_end = getattr(sim_b[end], attr)
            ci_mid = sim_b[mid].ci95_b if attr == "ber_b" else sim_b[mid].ci95_c
            ci_end = sim_b[end].ci95_b if attr == "ber_b" else sim_b[end].ci95_c
            assert p_mid - ci_mid > p_end + ci_end, \
                f"simulated {attr} at mu=0.5 not above mu={mus[end]} with CI margin"
    report("5 (relay placement)", True,
           f"theory strictly peaked at mu=0.5 (source {th_b[mid]:.3g} vs "
           f"ends {th_b[0]:.3g}/{th_b[-1]:.3g}); simulation concurs with CI margin")


def test_criterion_6_moment_audit():
    """Metric mean/variance match the moment model within 3 SE, 1e5 frames."""
    worst = 0.0
    single_sd = ChannelProfile(gains=(1.0,), delays=(0,), role="sd")
    single_sr = ChannelProfile(gains=(1.0,), delays=(0,), role="sr")
    single_rd = ChannelProfile(gains=(1.0,), delays=(0,), role="rd")
    for scheme in ("I", "II"):
        if scheme == "I":
            cfg = SchemeConfig(scheme="I", M=4, n=2, beta=50, N=16, D_sd=16.0)
        else:
            cfg = SchemeConfig(scheme="II", M=4, n=2, beta=80, N=16,
                               D_sr=6.0, D_rd=10.0)
        for rep in range(10):
            rng = np.random.default_rng(5000 + rep)
            if scheme == "I":
                ch = sample_aggregate(single_sd, cfg.N, rng)
            else:
                ch = sample_cascaded(single_sr, single_rd, cfg.N, rng)
            a = metric_samples(cfg, ch.coeffs, ch.delays, 10.0, 100_000,
                               seed=900 + rep)
            mean_th, var_th = metric_moment_model(cfg, ch.coeffs, 10.0)
            se_mean = a.std(ddof=1) / math.sqrt(a.size)
            z_mean = (a.mean() - mean_th) / se_mean
            v = a.var(ddof=1)
            m4 = np.mean((a - a.mean()) ** 4)
            se_var = math.sqrt((m4 - v * v) / a.size)
            z_var = (v - var_th) / se_var
            worst = max(worst, abs(z_mean), abs(z_var))
            assert abs(z_mean) < 3, \
                f"scheme {scheme} rep {rep}: mean z-score {z_mean:.2f}"
            assert abs(z_var) < 3, \
                f"scheme {scheme} rep {rep}: variance z-score {z_var:.2f}"
    report("6 (moment audit)", True,
           f"20 fixed-realization audits, worst |z| = {worst:.2f} (< 3)")


def test_criterion_7_pdf_normalization_and_quadrature():
    """Mixture densities integrate to 1; quadrature matches brute force."""
    from scipy.integrate import quad
    worst_norm = 0.0
    for profile, f in [(SD, 16.0 ** -2.0), ((SR, RD), 60.0 ** -2.0)]:
        for N in (32, 64, 128):
            for es_over_n0 in (5.0, 50.0, 500.0, 5000.0):
                mix = mixture_from_profile(profile, N, f, es_over_n0)
                total, _ = quad(mix.pdf, 0, np.inf, epsabs=1e-12,
                                epsrel=1e-10, limit=200)
                worst_norm = max(worst_norm, abs(total - 1.0))
                assert abs(total - 1.0) < 1e-8
    worst_rel = 0.0
    for r_ave in (0.5, 5.0, 50.0):
        mix = mixture_from_profile(
            ChannelProfile(gains=(1.0,), delays=(0,), role="sd"),
            1, 1.0, r_ave)
        for cond in (lambda r: ber_b_conditional(r, 50, 2),
                     lambda r: ber_c_conditional(r, 50, 2, 4)):
            val = average_ber(cond, mix, tol=1e-8)
            r = np.linspace(1e-9, 50.0 * r_ave, 1_000_001)
            brute = np.trapezoid(cond(r) * mix.pdf(r), r)
            rel = abs(val - brute) / brute
            worst_rel = max(worst_rel, rel)
            assert rel < 1e-6
    report("7 (pdf and quadrature oracle)", True,
           f"worst |integral - 1| = {worst_norm:.2e}; "
           f"worst quad-vs-trapezoid rel err = {worst_rel:.2e}")


def test_criterion_8_noiseless_loopback():
    """Exhaustive payload recovery, no noise, any single-path channel."""
    rng = np.random.default_rng(2718)
    checked = 0
    for scheme in ("I", "II"):
        for M in (2, 4):
            w = int(math.log2(M))
            for n in (0, 1, 2):
                if scheme == "I":
                    cfg = SchemeConfig(scheme="I", M=M, n=n, beta=16, N=4,
                                       D_sd=16.0)
                else:
                    cfg = SchemeConfig(scheme="II", M=M, n=n, beta=16, N=4,
                                       D_sr=6.0, D_rd=10.0)
                k = fm_modulate(generate_chaos(31, cfg.beta), cfg.chip_energy)
                groups = list(itertools.product([0, 1], repeat=w))
                for b in (0, 1):
                    for combo in itertools.product(groups, repeat=n):
                        coeff = rng.standard_normal() + 1j * rng.standard_normal()
                        ch = ChannelRealization(coeffs=np.array([coeff]),
                                                delays=np.array([0]),
                                                scheme=scheme)
                        fr = build_frame(cfg, SourcePayload(b=b, c=combo), k)
                        z = propagate(fr, ch, cfg.distance_factor, 0.0, None)
                        out = demodulate_frame(z, cfg)
                        assert out.b_est == b and out.c_est == combo, \
                            f"loopback failed: scheme {scheme} M={M} n={n} b={b} c={combo}"
                        checked += 1
    report("8 (noiseless loopback)", True,
           f"{checked} payload/channel combinations recovered exactly")


def test_criterion_9_determinism(tmp_path):
    """Identical run spec gives bit-identical CSV, serial or parallel."""
    cfg = CONFIG_DIR / "fig2_m4_n128.yaml"
    outs = [tmp_path / f"det{i}.csv" for i in range(3)]
    args = ["simulate", str(cfg), "--max-frames", "12000", "--min-errors", "60"]
    main(args + ["--output", str(outs[0])])
    main(args + ["--output", str(outs[1])])
    main(args + ["--output", str(outs[2]), "--workers", "3"])
    a, b, c = (p.read_bytes() for p in outs)
    assert a == b, "two serial runs differ"
    assert a == c, "serial and parallel runs differ"
    report("9 (determinism)", True,
           "serial x2 and 3-worker runs produced bit-identical CSVs")


def test_fm_dcsk_baseline_direction():
    """Scheme I (M=2, n=1, N=32) beats the classical n=0/N=1 baseline at 1e-4."""
    grid_i = fine_grid(20.0, 50.0, 0.25)
    cfg_i = SchemeConfig(scheme="I", M=2, n=1, beta=90, N=32, D_sd=16.0)
    cross_i = crossing_db(
        grid_i, [p.P_overall for p in theory_curve(cfg_i, grid_i, sd=SD)], 1e-4)
    grid_b = fine_grid(35.0, 62.0, 0.25)
    cfg_b = SchemeConfig(scheme="I", M=2, n=0, beta=180, N=1, D_sd=16.0)
    cross_b = crossing_db(
        grid_b, [p.P_overall for p in theory_curve(cfg_b, grid_b, sd=SD)], 1e-4)
    ok = math.isfinite(cross_i) and math.isfinite(cross_b) and cross_i < cross_b
    report("baseline (scheme I vs plain FM-DCSK)", ok,
           f"1e-4 crossings: scheme I {cross_i:.2f} dB vs baseline {cross_b:.2f} dB")
    assert ok
