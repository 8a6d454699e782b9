"""Simulated sub-Nyquist measurement front end.

A bank of K mixing branches observes the selected bands through a fixed
K x N coefficient matrix; per frequency bin the measurement is the mixed
band content plus optional additive white Gaussian noise.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np


@dataclass(frozen=True)
class SensingMatrix:
    """Master K x N matrix of real branch mixing coefficients."""

    entries: np.ndarray

    def __post_init__(self):
        entries = np.asarray(self.entries, dtype=float)
        if entries.ndim != 2:
            raise ValueError("sensing matrix must be two-dimensional")
        object.__setattr__(self, "entries", entries)

    @property
    def k_branches(self) -> int:
        return self.entries.shape[0]

    @property
    def n_bands(self) -> int:
        return self.entries.shape[1]


@dataclass
class MeasurementBatch:
    """Sub-Nyquist samples for one slot: one column per frequency bin."""

    samples: np.ndarray       # (k_branches, bins) complex
    selected: np.ndarray      # band indices measured, in selection order
    noise_power: float


def _full_column_rank(a: np.ndarray) -> bool:
    return np.linalg.matrix_rank(a) == min(a.shape)


def draw_sensing_matrix(k_branches: int, n_bands: int, rng: np.random.Generator,
                        subset_checks: int = 8) -> SensingMatrix:
    """Draw i.i.d. standard Gaussian mixing coefficients.

    Full row rank is verified numerically, along with a random sample of
    K-column sub-matrices (Gaussian draws satisfy both almost surely). A
    rank-deficient draw is redrawn once before giving up.
    """
    if not 1 <= k_branches <= n_bands:
        raise ValueError("k_branches must satisfy 1 <= k_branches <= n_bands")
    for _ in range(2):
        entries = rng.standard_normal((k_branches, n_bands))
        if np.linalg.matrix_rank(entries) < k_branches:
            continue
        ok = True
        for _ in range(subset_checks):
            cols = rng.choice(n_bands, size=k_branches, replace=False)
            if not _full_column_rank(entries[:, cols]):
                ok = False
                break
        if ok:
            return SensingMatrix(entries=entries)
    raise np.linalg.LinAlgError("sensing matrix rank-deficient after redraw")


def select_submatrix(matrix: SensingMatrix | np.ndarray,
                     selected: Sequence[int]) -> np.ndarray:
    """Columns of the master matrix at the selected bands, order preserved."""
    entries = matrix.entries if isinstance(matrix, SensingMatrix) else np.asarray(matrix)
    idx = np.asarray(selected, dtype=int)
    if idx.ndim != 1 or idx.size == 0:
        raise ValueError("selected must be a nonempty index vector")
    if np.unique(idx).size != idx.size:
        raise ValueError("selected band indices must be distinct")
    if np.any((idx < 0) | (idx >= entries.shape[1])):
        raise ValueError("selected band index out of range")
    return entries[:, idx]


def noise_power_for_snr(snr_db: float | None, signal_power: float = 1.0) -> float:
    """Per-bin noise power giving the requested per-busy-band SNR (None = noiseless)."""
    if snr_db is None or np.isinf(snr_db):
        return 0.0
    return signal_power * 10.0 ** (-snr_db / 10.0)


def measure(a_sub: np.ndarray, band_rows: np.ndarray, snr_db: float | None,
            rng: np.random.Generator, selected: Sequence[int] | None = None,
            signal_power: float = 1.0) -> MeasurementBatch:
    """Mix the selected band spectra through the branch coefficients.

    Per bin f the measurement is a_sub @ band_rows[:, f] plus complex AWGN
    whose per-bin power makes the busy-band SNR equal snr_db. Passing
    snr_db=None (or +inf) produces a noiseless measurement.
    """
    a_sub = np.asarray(a_sub, dtype=float)
    band_rows = np.asarray(band_rows)
    if a_sub.ndim != 2 or band_rows.ndim != 2:
        raise ValueError("a_sub and band_rows must be two-dimensional")
    if a_sub.shape[1] != band_rows.shape[0]:
        raise ValueError("a_sub column count must equal the number of selected bands")
    samples = a_sub @ band_rows
    noise_power = noise_power_for_snr(snr_db, signal_power)
    if noise_power > 0.0:
        k, bins = samples.shape
        noise = (rng.standard_normal((k, bins))
                 + 1j * rng.standard_normal((k, bins))) * np.sqrt(noise_power / 2.0)
        samples = samples + noise
    if selected is None:
        selected = np.arange(band_rows.shape[0])
    return MeasurementBatch(samples=samples,
                            selected=np.asarray(selected, dtype=int),
                            noise_power=noise_power)
