"""Chaotic sequence generation and constant-envelope FM chip synthesis.

The spreading waveform is a logistic-map sequence on [-1, 1] turned into
complex baseband chips of identical modulus by frequency modulation
(cumulative-phase realization). Constant per-chip energy is the property
everything downstream relies on.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

DEFAULT_MOD_INDEX = 0.5

# Fixed points of x -> 1 - 2x^2 on [-1, 1]; initial conditions this close
# to one of them would produce a (numerically) constant sequence.
_FIXED_POINTS = (-1.0, 0.5)
_FIXED_POINT_GUARD = 1e-6


@dataclass(frozen=True)
class ChaosSequence:
    """A length-beta logistic-map trajectory, every sample in [-1, 1]."""

    samples: np.ndarray

    @property
    def beta(self) -> int:
        return self.samples.shape[-1]


@dataclass(frozen=True)
class FmChaoticSignal:
    """Constant-envelope complex chips; |chip|^2 == chip_energy for all chips."""

    chips: np.ndarray
    chip_energy: float

    @property
    def beta(self) -> int:
        return self.chips.shape[-1]


def logistic_next(x: float) -> float:
    """One step of the logistic map x -> 1 - 2x^2 on [-1, 1]."""
    if abs(x) > 1.0:
        raise ValueError(f"logistic map input must lie in [-1, 1], got {x}")
    return 1.0 - 2.0 * x * x


def generate_chaos_batch(rng, count: int, beta: int) -> np.ndarray:
    """Iterate the logistic map for `count` independent trajectories.

    Initial conditions are drawn uniformly from (-1, 1), rejecting draws
    within 1e-6 of a fixed point of the map. Returns shape (count, beta).
    """
    if beta < 1:
        raise ValueError(f"beta must be >= 1, got {beta}")
    rng = np.random.default_rng(rng)
    x0 = rng.uniform(-1.0, 1.0, size=count)
    bad = _near_fixed_point(x0)
    while np.any(bad):
        x0[bad] = rng.uniform(-1.0, 1.0, size=int(bad.sum()))
        bad = _near_fixed_point(x0)
    out = np.empty((count, beta))
    out[:, 0] = x0
    for t in range(1, beta):
        x0 = 1.0 - 2.0 * x0 * x0
        out[:, t] = x0
    return out


def generate_chaos(seed, beta: int) -> ChaosSequence:
    """Deterministic length-beta chaotic sequence for a given seed/rng."""
    samples = generate_chaos_batch(seed, 1, beta)[0]
    return ChaosSequence(samples=samples)


def fm_modulate_batch(x: np.ndarray, chip_energy: float,
                      mod_index: float = DEFAULT_MOD_INDEX) -> np.ndarray:
    """FM-modulate trajectories (..., beta) into constant-envelope chips.

    chip_i = sqrt(E_c) * exp(j 2 pi h * sum_{m<=i} x_m); the modulus is
    sqrt(E_c) by construction regardless of the trajectory.
    """
    if chip_energy <= 0:
        raise ValueError(f"chip_energy must be positive, got {chip_energy}")
    if mod_index <= 0:
        raise ValueError(f"mod_index must be positive, got {mod_index}")
    phase = 2.0 * np.pi * mod_index * np.cumsum(x, axis=-1)
    return np.sqrt(chip_energy) * np.exp(1j * phase)


def fm_modulate(x: ChaosSequence, chip_energy: float,
                mod_index: float = DEFAULT_MOD_INDEX) -> FmChaoticSignal:
    """Convert a chaotic sequence into constant-envelope complex chips."""
    chips = fm_modulate_batch(x.samples, chip_energy, mod_index)
    return FmChaoticSignal(chips=chips, chip_energy=float(chip_energy))


def _near_fixed_point(x: np.ndarray) -> np.ndarray:
    bad = np.zeros(x.shape, dtype=bool)
    for fp in _FIXED_POINTS:
        bad |= np.abs(x - fp) < _FIXED_POINT_GUARD
    return bad
