"""Non-coherent detection: correlation metrics and bit decisions.

The receiver never estimates the channel or compensates delays; it
correlates raw frame segments. The antipodal metric correlates the two
frame halves; each PSK metric correlates a data segment against the
reference segment in both halves, so its argument estimates the applied
phase while any global channel phase cancels.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .framing import SchemeConfig, gray_encode_symbol


@dataclass(frozen=True)
class DecisionMetrics:
    A_d: float
    A_s: np.ndarray


@dataclass(frozen=True)
class DecodedPayload:
    b_est: int
    c_est: tuple


def metric_antipodal(Z: np.ndarray, n: int, beta: int) -> float:
    """Correlation of the two frame halves; sign carries the antipodal bit."""
    half = (n + 1) * beta
    Z = np.asarray(Z)
    if Z.shape[-1] != 2 * half:
        raise ValueError(f"frame length {Z.shape[-1]} != 2(n+1)beta = {2 * half}")
    return float(np.real(np.sum(Z[:half] * np.conj(Z[half:]))))


def metric_psk(Z: np.ndarray, slot: int, n: int, beta: int) -> complex:
    """Segment correlation for PSK slot `slot` (1..n); both halves contribute."""
    if not 1 <= slot <= n:
        raise ValueError(f"slot must be in 1..{n}, got {slot}")
    Z = np.asarray(Z)
    half = (n + 1) * beta
    if Z.shape[-1] != 2 * half:
        raise ValueError(f"frame length {Z.shape[-1]} != 2(n+1)beta = {2 * half}")
    ref1 = Z[:beta]
    dat1 = Z[slot * beta: (slot + 1) * beta]
    ref2 = Z[half: half + beta]
    dat2 = Z[half + slot * beta: half + (slot + 1) * beta]
    return complex(np.sum(np.conj(ref1) * dat1) + np.sum(np.conj(ref2) * dat2))


def compute_metrics(Z: np.ndarray, n: int, beta: int) -> DecisionMetrics:
    """All decision metrics of one received frame."""
    a_d = metric_antipodal(Z, n, beta)
    a_s = np.array([metric_psk(Z, slot, n, beta) for slot in range(1, n + 1)])
    return DecisionMetrics(A_d=a_d, A_s=a_s)


def nearest_psk_symbol(angle: float, M: int) -> int:
    """Constellation index whose phase 2 pi s / M is circularly closest.

    Ties break toward the smaller symbol index.
    """
    s = np.arange(M)
    diff = angle - 2.0 * np.pi * s / M
    dist = np.abs(np.angle(np.exp(1j * diff)))
    return int(np.argmin(dist))


def decide(metrics: DecisionMetrics, M: int) -> DecodedPayload:
    """Threshold the antipodal metric and demodulate each PSK metric.

    A_d == 0 decodes to bit 1 (the >= branch of the sign rule).
    """
    b_est = 1 if metrics.A_d >= 0 else 0
    c_est = tuple(
        gray_encode_symbol(nearest_psk_symbol(float(np.angle(a)), M), M)
        for a in metrics.A_s)
    return DecodedPayload(b_est=b_est, c_est=c_est)


def demodulate_frame(Z: np.ndarray, cfg: SchemeConfig) -> DecodedPayload:
    """Convenience path: metrics plus decisions in one call."""
    return decide(compute_metrics(Z, cfg.n, cfg.beta), cfg.M)
