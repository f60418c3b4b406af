"""Monte Carlo BER estimation with reproducible counter-based randomness.

Frames are simulated in fixed-size blocks; every block draws all of its
randomness from a Philox stream keyed by (master seed, Eb/N0 value, block
index), so results are a pure function of the run specification and do not
depend on execution order or worker count. Counters from concurrent workers
merge by summation.
"""
from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from . import analytic
from .chaos import DEFAULT_MOD_INDEX, fm_modulate_batch, generate_chaos_batch
from .channel import (ChannelProfile, cascaded_delays, delay_superposition,
                      sample_aggregate_batch, sample_cascaded_batch)
from .framing import SchemeConfig

BLOCK_FRAMES = 1024
_WILSON_Z = 1.959963984540054  # two-sided 95%


@dataclass(frozen=True)
class RunSpec:
    """Everything a Monte Carlo sweep needs to be reproducible."""

    cfg: SchemeConfig
    grid_db: tuple
    seed: int
    sd: ChannelProfile | None = None
    sr: ChannelProfile | None = None
    rd: ChannelProfile | None = None
    min_errors: int = 200
    max_frames: int = 10_000_000
    mu_grid: tuple | None = None

    def __post_init__(self):
        object.__setattr__(self, "grid_db", tuple(float(x) for x in self.grid_db))
        if self.mu_grid is not None:
            object.__setattr__(self, "mu_grid", tuple(float(x) for x in self.mu_grid))
        grid = np.asarray(self.grid_db)
        if grid.size and np.any(np.diff(grid) <= 0):
            raise ValueError("Eb/N0 grid must be strictly increasing")
        if self.min_errors < 50:
            raise ValueError(f"min_errors must be >= 50, got {self.min_errors}")
        if self.max_frames < 1:
            raise ValueError("max_frames must be positive")
        if self.cfg.scheme == "I":
            if self.sd is None:
                raise ValueError("scheme I requires an sd profile")
            self.sd.check_delay_span(self.cfg.SF)
        else:
            if self.sr is None or self.rd is None:
                raise ValueError("scheme II requires sr and rd profiles")
            self.sr.check_delay_span(self.cfg.SF)
            self.rd.check_delay_span(self.cfg.SF)
            if max(self.sr.delays) + max(self.rd.delays) > self.cfg.SF / 10:
                raise ValueError("cascaded delay span exceeds SF/10")
        if self.mu_grid is not None:
            if self.cfg.scheme != "II":
                raise ValueError("relay-placement sweeps require scheme II")
            if any(not 0.0 < m < 1.0 for m in self.mu_grid):
                raise ValueError("mu_sr values must lie strictly inside (0, 1)")


@dataclass(frozen=True)
class BerPoint:
    """Per-point error counters and the rates derived from them."""

    ebn0_db: float
    errors_b: int
    bits_b: int
    errors_c: int
    bits_c: int
    frames: int
    low_confidence: bool

    @property
    def ber_b(self) -> float:
        return self.errors_b / self.bits_b if self.bits_b else math.nan

    @property
    def ber_c(self) -> float:
        return self.errors_c / self.bits_c if self.bits_c else math.nan

    @property
    def ber_overall(self) -> float:
        return (self.errors_b + self.errors_c) / (self.bits_b + self.bits_c)

    @property
    def ci95_b(self) -> float:
        return wilson_halfwidth(self.errors_b, self.bits_b)

    @property
    def ci95_c(self) -> float:
        return wilson_halfwidth(self.errors_c, self.bits_c)


def wilson_halfwidth(errors: int, trials: int, z: float = _WILSON_Z) -> float:
    """Half-width of the Wilson score interval for a binomial proportion."""
    if trials <= 0:
        return math.nan
    p = errors / trials
    denom = 1.0 + z * z / trials
    return (z / denom) * math.sqrt(p * (1.0 - p) / trials + z * z / (4.0 * trials * trials))


def _block_stream(seed: int, ebn0_db: float, block_idx: int) -> np.random.Generator:
    """Philox stream for one block, keyed by value rather than position."""
    key = np.random.SeedSequence(seed).generate_state(2, dtype=np.uint64)
    ebn0_bits = np.float64(ebn0_db).view(np.uint64)
    counter = np.array([0, block_idx, ebn0_bits, 0], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key, counter=counter))


def _simulate_block(spec: RunSpec, n0: float, rng, n_frames: int) -> tuple:
    """Run n_frames end-to-end frames; returns (bit errors b, bit errors c).

    Draw order is fixed: payload bits, chaos initial conditions, channel,
    noise. Changing it would change every result for a given seed.
    """
    cfg = spec.cfg
    n, beta, M = cfg.n, cfg.beta, cfg.M
    w = cfg.bits_per_psk_symbol
    half = (n + 1) * beta

    b = rng.integers(0, 2, size=n_frames)
    c_bits = (rng.integers(0, 2, size=(n_frames, n, w), dtype=np.int64)
              if n > 0 else None)

    x = generate_chaos_batch(rng, n_frames, beta)
    k = fm_modulate_batch(x, cfg.chip_energy, DEFAULT_MOD_INDEX)

    factors = np.ones((n_frames, n + 1), dtype=np.complex128)
    if n > 0:
        s_tx = _gray_decode_batch(c_bits)
        factors[:, 1:] = np.exp(2j * np.pi * s_tx / M)
    first_half = (factors[:, :, None] * k[:, None, :]).reshape(n_frames, half)
    d = (2 * b - 1)[:, None]
    frames = np.concatenate((first_half, d * first_half), axis=1)

    if cfg.scheme == "I":
        coeffs = sample_aggregate_batch(spec.sd, cfg.N, rng, n_frames)
        delays = np.asarray(spec.sd.delays, dtype=int)
    else:
        coeffs = sample_cascaded_batch(spec.sr, spec.rd, cfg.N, rng, n_frames)
        delays = cascaded_delays(spec.sr, spec.rd)

    z = delay_superposition(frames, coeffs, delays)
    z *= math.sqrt(cfg.distance_factor)
    if n0 > 0:
        noise = rng.standard_normal((n_frames, cfg.SF, 2))
        z += math.sqrt(n0 / 2.0) * (noise[..., 0] + 1j * noise[..., 1])

    a_d = np.einsum("ij,ij->i", z[:, :half], np.conj(z[:, half:])).real
    b_est = (a_d >= 0).astype(np.int64)
    err_b = int(np.count_nonzero(b_est != b))

    err_c = 0
    for slot in range(1, n + 1):
        a_s = (np.einsum("ij,ij->i", np.conj(z[:, :beta]),
                         z[:, slot * beta:(slot + 1) * beta])
               + np.einsum("ij,ij->i", np.conj(z[:, half:half + beta]),
                           z[:, half + slot * beta:half + (slot + 1) * beta]))
        s_est = np.mod(np.round(np.angle(a_s) * M / (2.0 * np.pi)).astype(np.int64), M)
        bits_est = _gray_encode_batch(s_est, M)
        err_c += int(np.count_nonzero(bits_est != c_bits[:, slot - 1, :]))
    return err_b, err_c


def _gray_decode_batch(bits: np.ndarray) -> np.ndarray:
    """(..., w) Gray-coded bits, MSB first -> symbol indices (...)."""
    w = bits.shape[-1]
    binary = np.zeros(bits.shape[:-1], dtype=np.int64)
    prev = np.zeros(bits.shape[:-1], dtype=np.int64)
    for i in range(w):
        prev = prev ^ bits[..., i]
        binary = (binary << 1) | prev
    return binary


def _gray_encode_batch(symbols: np.ndarray, M: int) -> np.ndarray:
    """Symbol indices (...) -> (... , log2 M) Gray-coded bits, MSB first."""
    w = int(math.log2(M))
    g = symbols ^ (symbols >> 1)
    shifts = np.arange(w - 1, -1, -1)
    return (g[..., None] >> shifts) & 1


def metric_samples(cfg: SchemeConfig, coeffs, delays, ebn0_db: float,
                   n_frames: int, seed: int, antipodal_bit: int = 1) -> np.ndarray:
    """Antipodal decision metric over frames at one fixed channel realization.

    The channel stays frozen while chaos, PSK bits, and noise are redrawn
    per frame; used to audit the Gaussian moment model of the metric.
    """
    rng = np.random.default_rng(seed)
    n0 = cfg.noise_psd(ebn0_db)
    n, beta, M = cfg.n, cfg.beta, cfg.M
    half = (n + 1) * beta
    coeffs = np.asarray(coeffs)
    d = 2 * antipodal_bit - 1
    out = np.empty(n_frames)
    done = 0
    while done < n_frames:
        B = min(BLOCK_FRAMES, n_frames - done)
        x = generate_chaos_batch(rng, B, beta)
        k = fm_modulate_batch(x, cfg.chip_energy, DEFAULT_MOD_INDEX)
        factors = np.ones((B, n + 1), dtype=np.complex128)
        if n > 0:
            s = rng.integers(0, M, size=(B, n))
            factors[:, 1:] = np.exp(2j * np.pi * s / M)
        first = (factors[:, :, None] * k[:, None, :]).reshape(B, half)
        frames = np.concatenate((first, d * first), axis=1)
        z = delay_superposition(frames, np.broadcast_to(coeffs, (B, coeffs.size)), delays)
        z *= math.sqrt(cfg.distance_factor)
        if n0 > 0:
            noise = rng.standard_normal((B, cfg.SF, 2))
            z += math.sqrt(n0 / 2.0) * (noise[..., 0] + 1j * noise[..., 1])
        out[done:done + B] = np.einsum(
            "ij,ij->i", z[:, :half], np.conj(z[:, half:])).real
        done += B
    return out


def metric_moment_model(cfg: SchemeConfig, coeffs, ebn0_db: float) -> tuple:
    """Model mean and variance of the antipodal metric at a fixed realization.

    mean = pathloss * sum|coeff|^2 * Es / 2 and variance adds the
    signal-noise and noise-noise contributions; exact for a single path,
    a large-beta approximation under multipath.
    """
    n0 = cfg.noise_psd(ebn0_db)
    s = float(np.sum(np.abs(np.asarray(coeffs)) ** 2)) * cfg.distance_factor
    mean = s * cfg.Es / 2.0
    var = (s * cfg.Es * n0 + cfg.beta * n0 * n0 * (cfg.n + 1)) / 2.0
    return mean, var


def run_point(spec: RunSpec, ebn0_db: float) -> BerPoint:
    """Accumulate frames at one Eb/N0 until both bit classes hit min_errors.

    Stops early at max_frames and flags the point low-confidence. Block
    randomness is keyed by (seed, Eb/N0, block index), so the result is
    identical no matter where the point sits in a grid.
    """
    cfg = spec.cfg
    n0 = cfg.noise_psd(ebn0_db)
    err_b = err_c = frames = 0
    block_idx = 0
    while frames < spec.max_frames:
        n_frames = min(BLOCK_FRAMES, spec.max_frames - frames)
        rng = _block_stream(spec.seed, ebn0_db, block_idx)
        eb, ec = _simulate_block(spec, n0, rng, n_frames)
        err_b += eb
        err_c += ec
        frames += n_frames
        block_idx += 1
        done_b = err_b >= spec.min_errors
        done_c = cfg.bits_c == 0 or err_c >= spec.min_errors
        if done_b and done_c:
            break
    done_b = err_b >= spec.min_errors
    done_c = cfg.bits_c == 0 or err_c >= spec.min_errors
    return BerPoint(ebn0_db=float(ebn0_db), errors_b=err_b, bits_b=frames,
                    errors_c=err_c, bits_c=frames * cfg.bits_c, frames=frames,
                    low_confidence=not (done_b and done_c))


def _theory_for_grid(spec: RunSpec, tol: float) -> list:
    out = []
    for x in spec.grid_db:
        if np.isfinite(x):
            out.append(analytic.theory_point(
                spec.cfg, x, sd=spec.sd, sr=spec.sr, rd=spec.rd, tol=tol))
        else:
            out.append(None)
    return out


def run_sweep(spec: RunSpec, workers: int = 1,
              theory_tol: float = analytic.DEFAULT_TOL) -> tuple:
    """Simulate every grid point and evaluate the matching theory curve.

    Returns (sim_points, theory_points) ordered like the grid. Points are
    independent; workers > 1 distributes them over processes without
    changing any result.
    """
    if workers > 1 and len(spec.grid_db) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            sim = list(pool.map(run_point, [spec] * len(spec.grid_db), spec.grid_db))
    else:
        sim = [run_point(spec, x) for x in spec.grid_db]
    return sim, _theory_for_grid(spec, theory_tol)


def sweep_relay(spec: RunSpec, workers: int = 1,
                theory_tol: float = analytic.DEFAULT_TOL) -> list:
    """Relay-placement sweep: vary mu_sr = D_sr / (D_sr + D_rd) at fixed total.

    Returns [(mu, sim_points, theory_points), ...] over spec.mu_grid, with
    the total source-relay-destination distance taken from the base config.
    """
    if spec.mu_grid is None:
        raise ValueError("spec.mu_grid is required for a relay-placement sweep")
    total = spec.cfg.D_sr + spec.cfg.D_rd
    out = []
    for mu in spec.mu_grid:
        cfg_mu = replace(spec.cfg, D_sr=mu * total, D_rd=(1.0 - mu) * total)
        spec_mu = replace(spec, cfg=cfg_mu, mu_grid=None)
        sim, theo = run_sweep(spec_mu, workers=workers, theory_tol=theory_tol)
        out.append((mu, sim, theo))
    return out
