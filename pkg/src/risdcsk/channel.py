"""Multipath Rayleigh channel sampling and baseband propagation.

Scheme I aggregates the N element coefficients per path into a single
complex Gaussian (exact: a sum of independent complex Gaussians is complex
Gaussian). Scheme II keeps per-element draws and forms the cascaded
source-element-destination products, which are *not* Gaussian at finite N;
the analytic model's CLT approximation is deliberately not reused here.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .framing import TxFrame

_ROLES = ("sd", "sr", "rd")


@dataclass(frozen=True)
class ChannelProfile:
    """Normalized power-delay profile: per-path average gains and chip delays."""

    gains: tuple
    delays: tuple
    role: str

    def __post_init__(self):
        if self.role not in _ROLES:
            raise ValueError(f"role must be one of {_ROLES}, got {self.role!r}")
        g = np.asarray(self.gains, dtype=float)
        d = np.asarray(self.delays)
        if g.ndim != 1 or g.size == 0 or g.size != d.size:
            raise ValueError("gains and delays must be equal-length, non-empty")
        if np.any(g <= 0):
            raise ValueError(f"average gains must be positive, got {self.gains}")
        if not np.isclose(g.sum(), 1.0, rtol=0.0, atol=1e-9):
            raise ValueError(f"average gains must sum to 1, got sum {g.sum()!r}")
        gs = np.sort(g)
        if gs.size > 1 and np.min(np.diff(gs) / gs[1:]) <= 1e-9:
            raise ValueError(
                f"average gains must be pairwise distinct (got {self.gains}); "
                "perturb coincident gains by ~1e-6")
        if np.any(d != d.astype(int)) or d[0] != 0 or np.any(np.diff(d) <= 0):
            raise ValueError(
                f"delays must be strictly increasing integers starting at 0, got {self.delays}")

    @property
    def n_paths(self) -> int:
        return len(self.gains)

    def check_delay_span(self, sf: int) -> None:
        """Delays must stay well below the frame length (<= SF/10)."""
        if max(self.delays) > sf / 10:
            raise ValueError(
                f"max delay {max(self.delays)} exceeds SF/10 = {sf / 10} "
                f"for role {self.role!r}")


@dataclass(frozen=True)
class ChannelRealization:
    """One frame's fading state: per-path complex coefficients and delays."""

    coeffs: np.ndarray
    delays: np.ndarray
    scheme: str


def sample_aggregate(profile: ChannelProfile, N: int, rng) -> ChannelRealization:
    """Draw the element-aggregated per-path coefficients for scheme I.

    Each coefficient is CN(0, N * gain): the distribution of a sum of N
    independent CN(0, gain) element coefficients, sampled exactly.
    """
    if profile.role != "sd":
        raise ValueError(f"scheme I aggregation expects an sd profile, got {profile.role!r}")
    rng = np.random.default_rng(rng)
    coeffs = sample_aggregate_batch(profile, N, rng, 1)[0]
    return ChannelRealization(coeffs=coeffs,
                              delays=np.asarray(profile.delays, dtype=int),
                              scheme="I")


def sample_aggregate_batch(profile: ChannelProfile, N: int, rng,
                           count: int) -> np.ndarray:
    """Vectorized sample_aggregate: returns (count, n_paths) coefficients."""
    rng = np.random.default_rng(rng)
    scale = np.sqrt(N * np.asarray(profile.gains) / 2.0)
    raw = rng.standard_normal((count, profile.n_paths, 2))
    return scale * (raw[..., 0] + 1j * raw[..., 1])


def sample_cascaded(sr: ChannelProfile, rd: ChannelProfile, N: int,
                    rng) -> ChannelRealization:
    """Draw the cascaded coefficients for scheme II.

    For each (source-path, destination-path) pair the coefficient is the sum
    over elements of the per-element product; the same per-element draws are
    shared by every pair they participate in. Cascaded delays add; duplicate
    delay values are kept as separate paths.
    """
    if sr.role != "sr" or rd.role != "rd":
        raise ValueError(f"expected (sr, rd) profiles, got ({sr.role!r}, {rd.role!r})")
    rng = np.random.default_rng(rng)
    coeffs = sample_cascaded_batch(sr, rd, N, rng, 1)[0]
    return ChannelRealization(coeffs=coeffs,
                              delays=cascaded_delays(sr, rd),
                              scheme="II")


def sample_cascaded_batch(sr: ChannelProfile, rd: ChannelProfile, N: int,
                          rng, count: int) -> np.ndarray:
    """Vectorized sample_cascaded: (count, L_sr * L_rd) coefficients.

    Pair order is row-major over (source path, destination path), matching
    cascaded_delays.
    """
    rng = np.random.default_rng(rng)
    sr_scale = np.sqrt(np.asarray(sr.gains) / 2.0)
    rd_scale = np.sqrt(np.asarray(rd.gains) / 2.0)
    raw_sr = rng.standard_normal((count, N, sr.n_paths, 2))
    raw_rd = rng.standard_normal((count, N, rd.n_paths, 2))
    a_sr = sr_scale * (raw_sr[..., 0] + 1j * raw_sr[..., 1])
    a_rd = rd_scale * (raw_rd[..., 0] + 1j * raw_rd[..., 1])
    prod = np.einsum("cnl,cnm->clm", a_sr, a_rd)
    return prod.reshape(count, sr.n_paths * rd.n_paths)


def cascaded_delays(sr: ChannelProfile, rd: ChannelProfile) -> np.ndarray:
    """Pairwise delay sums, row-major over (source path, destination path)."""
    d_sr = np.asarray(sr.delays, dtype=int)
    d_rd = np.asarray(rd.delays, dtype=int)
    return (d_sr[:, None] + d_rd[None, :]).reshape(-1)


def propagate(frame, ch: ChannelRealization, distance_factor: float,
              N0: float, rng) -> np.ndarray:
    """Pass a frame through the sampled channel and add receiver noise.

    Z_i = sqrt(distance_factor) * sum_p coeff_p * frame[i - delay_p] + w_i,
    with indices before the frame start contributing zero (frames are
    processed independently, no inter-frame memory) and w_i iid
    circularly-symmetric complex Gaussian with variance N0.
    """
    samples = frame.samples if isinstance(frame, TxFrame) else np.asarray(frame)
    z = delay_superposition(samples[None, :], ch.coeffs[None, :], ch.delays)[0]
    z *= np.sqrt(distance_factor)
    if N0 > 0:
        rng = np.random.default_rng(rng)
        w = rng.standard_normal((samples.size, 2))
        z += np.sqrt(N0 / 2.0) * (w[:, 0] + 1j * w[:, 1])
    return z


def delay_superposition(frames: np.ndarray, coeffs: np.ndarray,
                        delays: np.ndarray) -> np.ndarray:
    """Sum per-path delayed copies: frames (B, SF), coeffs (B, L), delays (L,)."""
    out = np.zeros(frames.shape, dtype=np.complex128)
    sf = frames.shape[1]
    for p, d in enumerate(np.asarray(delays, dtype=int)):
        if d == 0:
            out += coeffs[:, p, None] * frames
        elif d < sf:
            out[:, d:] += coeffs[:, p, None] * frames[:, : sf - d]
    return out
