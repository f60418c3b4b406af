"""Bit-to-symbol mapping and transmit-frame assembly for both schemes.

A frame carries one antipodal symbol d (the sign of the second half) and n
Gray-coded M-PSK phases applied per segment by the reflecting surface. Both
schemes share the frame layout

    [k, e^{j phi_1} k, ..., e^{j phi_n} k,  d k, d e^{j phi_1} k, ...]

of length SF = 2(n+1)beta; in scheme I all bits originate at the source,
in scheme II the antipodal bit belongs to the source and the PSK bits to
the relay.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .chaos import FmChaoticSignal


def _is_power_of_two(m: int) -> bool:
    return m >= 1 and (m & (m - 1)) == 0


@dataclass(frozen=True)
class SchemeConfig:
    """Static parameters of one transmission scheme.

    scheme 'I' uses the surface as part of the transmitter (direct link,
    distance D_sd); scheme 'II' uses it as a passive relay (D_sr, D_rd).
    Energy is normalized so that the average transmitted energy per
    information bit is Eb; the per-symbol energy Es spreads uniformly over
    the 2(n+1) segments of the frame.
    """

    scheme: str
    M: int
    n: int
    beta: int
    N: int
    eps: float = 2.0
    D_sd: float | None = None
    D_sr: float | None = None
    D_rd: float | None = None
    Eb: float = 1.0

    def __post_init__(self):
        if self.scheme not in ("I", "II"):
            raise ValueError(f"scheme must be 'I' or 'II', got {self.scheme!r}")
        if not _is_power_of_two(self.M) or self.M < 2:
            raise ValueError(f"M must be a power of two >= 2, got {self.M}")
        if self.n < 0:
            raise ValueError(f"n must be >= 0, got {self.n}")
        if self.beta < 1:
            raise ValueError(f"beta must be >= 1, got {self.beta}")
        if self.N < 1:
            raise ValueError(f"N must be >= 1, got {self.N}")
        if self.eps <= 0:
            raise ValueError(f"eps must be positive, got {self.eps}")
        if self.Eb <= 0:
            raise ValueError(f"Eb must be positive, got {self.Eb}")
        if self.scheme == "I":
            if self.D_sd is None or self.D_sd <= 0:
                raise ValueError("scheme I requires a positive D_sd")
        else:
            if self.D_sr is None or self.D_sr <= 0 or self.D_rd is None or self.D_rd <= 0:
                raise ValueError("scheme II requires positive D_sr and D_rd")

    @property
    def bits_per_psk_symbol(self) -> int:
        return int(np.log2(self.M))

    @property
    def bits_b(self) -> int:
        """Antipodal-class bits per frame (always 1)."""
        return 1

    @property
    def bits_c(self) -> int:
        """PSK-class bits per frame: n log2(M)."""
        return self.n * self.bits_per_psk_symbol

    @property
    def bits_total(self) -> int:
        return self.bits_b + self.bits_c

    @property
    def SF(self) -> int:
        return 2 * (self.n + 1) * self.beta

    @property
    def Es(self) -> float:
        """Energy per transmitted frame: every frame carries bits_total bits."""
        return self.bits_total * self.Eb

    @property
    def chip_energy(self) -> float:
        return self.Es / (2 * (self.n + 1) * self.beta)

    @property
    def distance_factor(self) -> float:
        """Path-loss power factor: D_sd^-eps or D_sr^-eps * D_rd^-eps."""
        if self.scheme == "I":
            return self.D_sd ** (-self.eps)
        return (self.D_sr * self.D_rd) ** (-self.eps)

    def noise_psd(self, ebn0_db: float) -> float:
        """N0 for a given Eb/N0 in dB; +inf maps to the noiseless N0 = 0."""
        if np.isinf(ebn0_db) and ebn0_db > 0:
            return 0.0
        return self.Eb / (10.0 ** (ebn0_db / 10.0))


@dataclass(frozen=True)
class SourcePayload:
    """One frame's information bits: antipodal bit b plus n PSK bit-groups.

    In scheme II, b is the source's bit and the groups belong to the relay;
    the structure is identical.
    """

    b: int
    c: tuple = field(default_factory=tuple)

    def __post_init__(self):
        if self.b not in (0, 1):
            raise ValueError(f"b must be 0 or 1, got {self.b}")


@dataclass(frozen=True)
class TxFrame:
    """Per-element reflected frame (identical across the N elements)."""

    samples: np.ndarray
    d: int
    phases: np.ndarray


def bit_to_antipodal(b: int) -> int:
    """Map a bit to the antipodal symbol d = 2b - 1."""
    if b not in (0, 1):
        raise ValueError(f"bit must be 0 or 1, got {b}")
    return 2 * b - 1


def gray_decode_bits(group) -> int:
    """Gray-coded bit group (MSB first) -> symbol index."""
    s = 0
    prev = 0
    for g in group:
        prev ^= int(g)
        s = (s << 1) | prev
    return s


def gray_encode_symbol(s: int, M: int) -> tuple:
    """Symbol index -> Gray-coded bit group of length log2(M), MSB first."""
    if not _is_power_of_two(M) or M < 2:
        raise ValueError(f"M must be a power of two >= 2, got {M}")
    if not 0 <= s < M:
        raise ValueError(f"symbol index {s} out of range for M={M}")
    g = s ^ (s >> 1)
    width = int(np.log2(M))
    return tuple((g >> (width - 1 - i)) & 1 for i in range(width))


def bits_to_psk_phase(group, M: int) -> float:
    """Gray-decode a bit group to its M-PSK phase in (0, 2pi].

    Symbol index s maps to 2 pi s / M; the reference symbol s = 0 is
    reported as 2 pi (identical signal point, 2 pi == 0 in all arithmetic).
    """
    if not _is_power_of_two(M) or M < 2:
        raise ValueError(f"M must be a power of two >= 2, got {M}")
    width = int(np.log2(M))
    if len(group) != width:
        raise ValueError(f"expected {width} bits for M={M}, got {len(group)}")
    s = gray_decode_bits(group)
    if s == 0:
        return 2.0 * np.pi
    return 2.0 * np.pi * s / M


def random_payload(cfg: SchemeConfig, rng) -> SourcePayload:
    """Draw a uniformly random payload for the given configuration."""
    rng = np.random.default_rng(rng)
    b = int(rng.integers(0, 2))
    w = cfg.bits_per_psk_symbol
    c = tuple(tuple(int(x) for x in rng.integers(0, 2, size=w))
              for _ in range(cfg.n))
    return SourcePayload(b=b, c=c)


def build_frame(cfg: SchemeConfig, payload: SourcePayload,
                k: FmChaoticSignal) -> TxFrame:
    """Assemble the length-SF per-element reflected frame.

    Layout: reference half [k, e^{j phi_1} k, ..., e^{j phi_n} k] followed
    by d times the same half; the reference segment uses phase 0.
    """
    if k.beta != cfg.beta:
        raise ValueError(f"chip count {k.beta} != beta {cfg.beta}")
    if not np.isclose(k.chip_energy, cfg.chip_energy, rtol=1e-9, atol=0.0):
        raise ValueError(
            f"chip_energy {k.chip_energy} != Es/(2(n+1)beta) = {cfg.chip_energy}")
    if len(payload.c) != cfg.n:
        raise ValueError(f"payload has {len(payload.c)} PSK groups, expected {cfg.n}")
    phases = np.array([bits_to_psk_phase(g, cfg.M) for g in payload.c])
    d = bit_to_antipodal(payload.b)
    # mod folds the 2pi reference phase to exactly 0 so the factor is exactly 1
    factors = np.concatenate(([1.0 + 0.0j], np.exp(1j * np.mod(phases, 2.0 * np.pi))))
    first_half = (factors[:, None] * k.chips[None, :]).reshape(-1)
    samples = np.concatenate((first_half, d * first_half))
    return TxFrame(samples=samples, d=d, phases=phases)
