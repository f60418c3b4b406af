import numpy as np
import pytest
from scipy import stats

from risdcsk.channel import (ChannelProfile, propagate,
                             sample_aggregate, sample_aggregate_batch,
                             sample_cascaded, sample_cascaded_batch)
from risdcsk.framing import SchemeConfig, SourcePayload, build_frame
from risdcsk.chaos import fm_modulate, generate_chaos

SD = ChannelProfile(gains=(2 / 3, 1 / 3), delays=(0, 3), role="sd")
SR = ChannelProfile(gains=(1 / 2, 1 / 3, 1 / 6), delays=(0, 2, 4), role="sr")
RD = ChannelProfile(gains=(4 / 7, 3 / 7), delays=(0, 1), role="rd")


def test_profile_validation():
    with pytest.raises(ValueError):
        ChannelProfile(gains=(0.5, 0.5), delays=(0, 1), role="sd")  # equal gains
    with pytest.raises(ValueError):
        ChannelProfile(gains=(0.7, 0.3), delays=(1, 2), role="sd")  # first delay != 0
    with pytest.raises(ValueError):
        ChannelProfile(gains=(0.7, 0.3), delays=(0, 0), role="sd")  # not increasing
    with pytest.raises(ValueError):
        ChannelProfile(gains=(0.7, 0.2), delays=(0, 1), role="sd")  # sum != 1
    with pytest.raises(ValueError):
        ChannelProfile(gains=(0.7, 0.3), delays=(0, 1), role="xx")


def test_delay_span_guard():
    SD.check_delay_span(300)
    with pytest.raises(ValueError):
        SD.check_delay_span(20)


def test_aggregate_moments():
    rng = np.random.default_rng(5)
    one = ChannelProfile(gains=(1.0,), delays=(0,), role="sd")
    c = sample_aggregate_batch(one, 1, rng, 100_000)
    assert np.mean(np.abs(c) ** 2) == pytest.approx(1.0, rel=0.02)
    c = sample_aggregate_batch(SD, 128, rng, 100_000)
    assert np.mean(np.abs(c[:, 0]) ** 2) == pytest.approx(128 * 2 / 3, rel=0.02)
    assert np.mean(np.abs(c[:, 1]) ** 2) == pytest.approx(128 / 3, rel=0.02)
    # zero mean within 3 sigma / sqrt(n)
    se = np.sqrt(128 * 2 / 3 / 2 / 100_000)
    assert abs(np.mean(c[:, 0].real)) < 3 * se
    assert abs(np.mean(c[:, 0].imag)) < 3 * se


def test_aggregate_matches_elementwise_sum():
    # N-element aggregate draw vs explicit sum of N unit draws: same law
    rng = np.random.default_rng(17)
    N, n_draw = 16, 10_000
    agg = sample_aggregate_batch(
        ChannelProfile(gains=(1.0,), delays=(0,), role="sd"), N, rng, n_draw)[:, 0]
    per_el = (rng.standard_normal((n_draw, N)) + 1j * rng.standard_normal((n_draw, N)))
    summed = per_el.sum(axis=1) / np.sqrt(2.0)
    ks = stats.ks_2samp(np.abs(agg), np.abs(summed))
    assert ks.pvalue > 0.01


def test_cascaded_shapes_and_moments():
    rng = np.random.default_rng(11)
    real = sample_cascaded(SR, RD, 4, rng)
    assert real.coeffs.shape == (6,)
    assert np.array_equal(real.delays, [0, 1, 2, 3, 4, 5])
    one_sr = ChannelProfile(gains=(1.0,), delays=(0,), role="sr")
    one_rd = ChannelProfile(gains=(1.0,), delays=(0,), role="rd")
    c = sample_cascaded_batch(one_sr, one_rd, 1, rng, 100_000)
    assert np.mean(np.abs(c) ** 2) == pytest.approx(1.0, rel=0.02)


def test_cascaded_clt_convergence():
    rng = np.random.default_rng(23)
    one_sr = ChannelProfile(gains=(1.0,), delays=(0,), role="sr")
    one_rd = ChannelProfile(gains=(1.0,), delays=(0,), role="rd")
    c = sample_cascaded_batch(one_sr, one_rd, 128, rng, 4000)[:, 0]
    z = c.real / c.real.std()
    assert stats.normaltest(z).pvalue > 0.01


def test_cascaded_pairs_share_element_draws():
    # coefficients that share a source path must be correlated
    rng = np.random.default_rng(31)
    c = sample_cascaded_batch(SR, RD, 8, rng, 20_000)
    # pairs (sr0,rd0) and (sr0,rd1) share the sr0 element draws
    rho = np.corrcoef(np.abs(c[:, 0]) ** 2, np.abs(c[:, 1]) ** 2)[0, 1]
    assert rho > 0.05
    # pairs (sr0,rd0) and (sr1,rd1) share nothing
    rho_ind = np.corrcoef(np.abs(c[:, 0]) ** 2, np.abs(c[:, 3]) ** 2)[0, 1]
    assert abs(rho_ind) < 0.05


def frame_for(cfg, b=1, seed=3):
    k = fm_modulate(generate_chaos(seed, cfg.beta), cfg.chip_energy)
    return build_frame(cfg, SourcePayload(b=b, c=()), k)


def test_propagate_identity_channel():
    cfg = SchemeConfig(scheme="I", M=2, n=0, beta=16, N=1, D_sd=1.0)
    fr = frame_for(cfg)
    from risdcsk.channel import ChannelRealization
    ch = ChannelRealization(coeffs=np.array([1.0 + 0j]), delays=np.array([0]), scheme="I")
    z = propagate(fr, ch, distance_factor=1.0, N0=0.0, rng=None)
    assert np.allclose(z, fr.samples)


def test_propagate_two_path_hand_superposition():
    from risdcsk.channel import ChannelRealization
    frame = np.arange(1, 11, dtype=complex)  # length-10 test vector
    c1, c2 = 0.8 - 0.2j, 0.3 + 0.5j
    ch = ChannelRealization(coeffs=np.array([c1, c2]), delays=np.array([0, 3]), scheme="I")
    z = propagate(frame, ch, distance_factor=0.25, N0=0.0, rng=None)
    expect = np.zeros(10, dtype=complex)
    expect += c1 * frame
    expect[3:] += c2 * frame[:7]
    expect *= 0.5
    assert np.allclose(z, expect)


def test_propagate_noise_only_variance():
    from risdcsk.channel import ChannelRealization
    rng = np.random.default_rng(2)
    ch = ChannelRealization(coeffs=np.array([1.0 + 0j]), delays=np.array([0]), scheme="I")
    z = propagate(np.zeros(100_000, dtype=complex), ch, 1.0, N0=2.0, rng=rng)
    assert np.mean(np.abs(z) ** 2) == pytest.approx(2.0, rel=0.02)


def test_propagate_linear_in_frame():
    from risdcsk.channel import ChannelRealization
    rng = np.random.default_rng(4)
    frame = rng.standard_normal(40) + 1j * rng.standard_normal(40)
    ch = ChannelRealization(coeffs=np.array([0.5 + 1j, -0.2j]),
                            delays=np.array([0, 2]), scheme="I")
    z1 = propagate(frame, ch, 0.7, N0=0.0, rng=None)
    z2 = propagate(3.0 * frame, ch, 0.7, N0=0.0, rng=None)
    assert np.allclose(z2, 3.0 * z1)


def test_propagate_energy_accounting():
    cfg = SchemeConfig(scheme="I", M=2, n=0, beta=64, N=1, D_sd=2.0)
    fr = frame_for(cfg)
    from risdcsk.channel import ChannelRealization
    ch = ChannelRealization(coeffs=np.array([1.0 + 0j]), delays=np.array([0]), scheme="I")
    z = propagate(fr, ch, cfg.distance_factor, N0=0.0, rng=None)
    assert np.sum(np.abs(z) ** 2) == pytest.approx(cfg.distance_factor * cfg.Es, rel=1e-9)
