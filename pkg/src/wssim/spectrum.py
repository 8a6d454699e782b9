"""Ground-truth spectrum environment.

Each frequency band is an independent two-state Markov chain (0 = vacant,
1 = busy). Busy bands carry a flat complex-Gaussian spectrum on a discrete
grid of frequency bins; vacant bands are identically zero.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

# Stationary vacancy profiles of the two benchmark environments.
CASE_STATIONARY = {
    "case1": (0.60, 0.65, 0.70, 0.75, 0.80, 0.85, 0.90, 0.95),
    "case2": (0.45, 0.50, 0.55, 0.60, 0.65, 0.70, 0.80, 0.90),
}


@dataclass(frozen=True)
class BandStatistics:
    """Per-band transition probabilities of the vacant/busy chain.

    p01[n] is the probability that band n turns busy given it was vacant,
    p10[n] the probability that it turns vacant given it was busy. The
    degenerate chain p01 = p10 = 0 is rejected because its stationary
    vacancy is undefined.
    """

    p01: np.ndarray
    p10: np.ndarray

    def __post_init__(self):
        p01 = np.atleast_1d(np.asarray(self.p01, dtype=float))
        p10 = np.atleast_1d(np.asarray(self.p10, dtype=float))
        if p01.ndim != 1 or p01.shape != p10.shape or p01.size == 0:
            raise ValueError("p01 and p10 must be equal-length nonempty vectors")
        for name, vec in (("p01", p01), ("p10", p10)):
            if np.any((vec < 0.0) | (vec > 1.0)):
                raise ValueError(f"{name} entries must lie in [0, 1]")
        if np.any(p01 + p10 <= 0.0):
            raise ValueError("degenerate chain: p01 + p10 must be positive for every band")
        object.__setattr__(self, "p01", p01)
        object.__setattr__(self, "p10", p10)

    @property
    def n_bands(self) -> int:
        return self.p01.size

    @classmethod
    def from_stationary(cls, p0, mixing: float = 0.5) -> "BandStatistics":
        """Build transition pairs with a prescribed stationary vacancy vector.

        Uses p10 = mixing * p0 and p01 = mixing * (1 - p0), which leaves the
        stationary vacancy equal to p0 for any mixing speed in (0, 1].
        """
        p0 = np.atleast_1d(np.asarray(p0, dtype=float))
        if np.any((p0 < 0.0) | (p0 > 1.0)):
            raise ValueError("stationary vacancy entries must lie in [0, 1]")
        if not 0.0 < mixing <= 1.0:
            raise ValueError("mixing must lie in (0, 1]")
        return cls(p01=mixing * (1.0 - p0), p10=mixing * p0)


@dataclass
class OccupancyState:
    """Busy/vacant statuses of all bands at one time slot."""

    statuses: np.ndarray  # int8 vector, 0 = vacant, 1 = busy
    slot_index: int = 0

    def __post_init__(self):
        statuses = np.atleast_1d(np.asarray(self.statuses))
        if not np.all((statuses == 0) | (statuses == 1)):
            raise ValueError("statuses must be 0/1")
        self.statuses = statuses.astype(np.int8)

    @property
    def n_bands(self) -> int:
        return self.statuses.size


@dataclass
class BandSpectra:
    """Frequency-domain content of all bands over one time slot.

    grid has one row per band and one column per frequency bin. Rows of
    vacant bands are exactly zero; rows of busy bands average exactly the
    configured signal power per bin.
    """

    grid: np.ndarray
    band_power: np.ndarray


def stationary_vacancy(stats: BandStatistics) -> np.ndarray:
    """Stationary probability that each band is vacant: p10 / (p10 + p01)."""
    return stats.p10 / (stats.p10 + stats.p01)


def init_occupancy(stats: BandStatistics, rng: np.random.Generator) -> OccupancyState:
    """Draw slot-0 statuses independently from each band's stationary law."""
    vacant_prob = stationary_vacancy(stats)
    statuses = (rng.random(stats.n_bands) >= vacant_prob).astype(np.int8)
    return OccupancyState(statuses=statuses, slot_index=0)


def step_occupancy(state: OccupancyState, stats: BandStatistics,
                   rng: np.random.Generator) -> OccupancyState:
    """Advance every band by one Markov transition."""
    if state.n_bands != stats.n_bands:
        raise ValueError("occupancy state length does not match band statistics")
    u = rng.random(stats.n_bands)
    busy_next = np.where(state.statuses == 0, u < stats.p01, u >= stats.p10)
    return OccupancyState(statuses=busy_next.astype(np.int8),
                          slot_index=state.slot_index + 1)


def simulate_occupancy(stats: BandStatistics, horizon: int,
                       rng: np.random.Generator) -> np.ndarray:
    """Full status trajectory, shape (horizon, n_bands), slot 0 stationary.

    Draw-for-draw equivalent to init_occupancy followed by repeated
    step_occupancy, with the per-step bookkeeping inlined.
    """
    out = np.empty((horizon, stats.n_bands), dtype=np.int8)
    if horizon == 0:
        return out
    out[0] = init_occupancy(stats, rng).statuses
    n, p01, p10 = stats.n_bands, stats.p01, stats.p10
    current = out[0]
    for t in range(1, horizon):
        u = rng.random(n)
        out[t] = np.where(current == 0, u < p01, u >= p10)
        current = out[t]
    return out


def synthesize_band_spectra(state: OccupancyState, bins_per_band: int,
                            signal_power: float,
                            rng: np.random.Generator) -> BandSpectra:
    """Fill busy bands with flat-spectrum circular complex Gaussian content.

    Each busy row is rescaled so its mean per-bin power equals signal_power
    exactly; vacant rows stay zero, so the support of the grid equals the
    busy set of the generating state.
    """
    if bins_per_band < 1:
        raise ValueError("bins_per_band must be at least 1")
    if signal_power <= 0.0:
        raise ValueError("signal_power must be positive")
    n = state.n_bands
    grid = np.zeros((n, bins_per_band), dtype=np.complex128)
    busy = np.flatnonzero(state.statuses)
    if busy.size:
        raw = (rng.standard_normal((busy.size, bins_per_band))
               + 1j * rng.standard_normal((busy.size, bins_per_band)))
        mean_power = np.mean(np.abs(raw) ** 2, axis=1)
        grid[busy] = raw * np.sqrt(signal_power / mean_power)[:, None]
    band_power = np.mean(np.abs(grid) ** 2, axis=1)
    return BandSpectra(grid=grid, band_power=band_power)
