"""Experiment orchestration: seeded replications, metrics, and file output.

Within one replication every requested policy sees the same occupancy
trajectory and the same sensing matrix (common random numbers), so policy
comparisons are paired. Replication results merge by replication index,
which keeps the aggregate independent of execution order.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .config import ExperimentConfig, dump_config
from .learning import OracleEnvironment, PolicyConfig, run_policy
from .recovery import RecoveryConfig, SenseResult, signal_sense
from .sensing import (SensingMatrix, draw_sensing_matrix, measure,
                      noise_power_for_snr, select_submatrix)
from .spectrum import (BandStatistics, OccupancyState, simulate_occupancy,
                       synthesize_band_spectra)

SIGNAL_POWER = 1.0


@dataclass
class MetricSeries:
    """Aggregated per-slot metrics of one experiment."""

    policies: tuple[str, ...]
    mean_throughput: dict[str, np.ndarray]   # per-slot mean over replications
    mean_regret: dict[str, np.ndarray]       # cumulative gap to IMP (empty without IMP)
    rep_totals: dict[str, np.ndarray]        # total throughput per replication
    config: ExperimentConfig


class SignalEnvironment:
    """Sensing backend running the full measurement and recovery chain."""

    def __init__(self, trajectory: np.ndarray, matrix: SensingMatrix,
                 config: ExperimentConfig, rng: np.random.Generator):
        self.trajectory = np.asarray(trajectory, dtype=np.int8)
        self.matrix = matrix
        self.config = config
        self.rng = rng
        self.noise_power = noise_power_for_snr(config.snr_db, SIGNAL_POWER)

    def sense(self, selected, slot, prior_vacancy=None) -> SenseResult:
        cfg = self.config
        state = OccupancyState(statuses=self.trajectory[slot], slot_index=slot)
        spectra = synthesize_band_spectra(state, cfg.bins_per_band,
                                          SIGNAL_POWER, self.rng)
        a_sub = select_submatrix(self.matrix, selected)
        batch = measure(a_sub, spectra.grid[selected], cfg.snr_db, self.rng,
                        selected=selected, signal_power=SIGNAL_POWER)
        if prior_vacancy is None:
            prior_activity = 0.5
        else:
            prior_activity = 1.0 - np.asarray(prior_vacancy)[selected]
        recovery_cfg = RecoveryConfig(prior_activity=prior_activity,
                                      signal_variance=SIGNAL_POWER,
                                      noise_variance=self.noise_power,
                                      search_breadth=cfg.search_breadth,
                                      energy_fa_rate=cfg.energy_fa_rate,
                                      residual_threshold=cfg.residual_threshold)
        return signal_sense(batch, a_sub, recovery_cfg, cfg.k_branches)


def _policy_config(cfg: ExperimentConfig, mode: str) -> PolicyConfig:
    return PolicyConfig(n_bands=cfg.n_bands, k_branches=cfg.k_branches,
                        horizon=cfg.horizon,
                        exploration_coefficient=cfg.exploration_coefficient,
                        mu=cfg.mu, delta=cfg.delta, mode=mode)


def run_replication(config: ExperimentConfig, rep_index: int,
                    stats: BandStatistics | None = None) -> dict[str, np.ndarray]:
    """Per-slot throughput of every policy for one replication.

    Seeding depends only on (config.seed, rep_index), so replications can
    run in any order and still merge identically.
    """
    if not 0 <= rep_index < config.replications:
        raise ValueError("rep_index out of range")
    if stats is None:
        stats = config.band_statistics()
    rep_seed = np.random.SeedSequence(config.seed).spawn(config.replications)[rep_index]
    streams = rep_seed.spawn(2 + 2 * len(config.policies))
    trajectory = simulate_occupancy(stats, config.horizon,
                                    np.random.default_rng(streams[0]))
    matrix = draw_sensing_matrix(config.k_branches, config.n_bands,
                                 np.random.default_rng(streams[1]))
    series = {}
    for i, policy in enumerate(config.policies):
        policy_rng = np.random.default_rng(streams[2 + 2 * i])
        if config.rs_mode == "signal":
            env = SignalEnvironment(trajectory, matrix, config,
                                    np.random.default_rng(streams[3 + 2 * i]))
        else:
            env = OracleEnvironment(trajectory, config.k_branches)
        outcomes = run_policy(_policy_config(config, policy), env, policy_rng,
                              true_stats=stats)
        series[policy] = np.fromiter((o.throughput for o in outcomes),
                                     dtype=float, count=config.horizon)
    return series


def compute_regret(policy_series: np.ndarray, imp_series: np.ndarray) -> np.ndarray:
    """Cumulative throughput gap of a policy against the IMP baseline."""
    policy_series = np.asarray(policy_series, dtype=float)
    imp_series = np.asarray(imp_series, dtype=float)
    if policy_series.shape != imp_series.shape:
        raise ValueError("series must have equal length")
    return np.cumsum(imp_series - policy_series)


def run_experiment(config: ExperimentConfig) -> MetricSeries:
    """Run all replications and aggregate per-slot means and regrets."""
    config.validate()
    stats = config.band_statistics()
    stacked = {p: np.empty((config.replications, config.horizon))
               for p in config.policies}
    for r in range(config.replications):
        series = run_replication(config, r, stats=stats)
        for policy, values in series.items():
            stacked[policy][r] = values
    mean_throughput = {p: stacked[p].mean(axis=0) for p in config.policies}
    rep_totals = {p: stacked[p].sum(axis=1) for p in config.policies}
    mean_regret = {}
    if "IMP" in config.policies:
        imp = mean_throughput["IMP"]
        mean_regret = {p: compute_regret(mean_throughput[p], imp)
                       for p in config.policies}
    return MetricSeries(policies=config.policies,
                        mean_throughput=mean_throughput,
                        mean_regret=mean_regret,
                        rep_totals=rep_totals,
                        config=config)


def manifest_path_for(csv_path: str | Path) -> Path:
    return Path(csv_path).with_suffix(".manifest.cfg")


def emit_results(series: MetricSeries, csv_path: str | Path) -> tuple[Path, Path]:
    """Write the per-slot CSV and the resolved-config manifest.

    The CSV carries one row per slot with the mean throughput and (when IMP
    was run) mean cumulative regret of every policy, at full float
    precision. Re-running from the manifest reproduces the CSV byte for
    byte.
    """
    csv_path = Path(csv_path)
    csv_path.parent.mkdir(parents=True, exist_ok=True)
    columns = ["slot"]
    series_by_column = []
    for policy in series.policies:
        columns.append(f"{policy.lower()}_mean_throughput")
        series_by_column.append(series.mean_throughput[policy])
        if series.mean_regret:
            columns.append(f"{policy.lower()}_mean_regret")
            series_by_column.append(series.mean_regret[policy])
    for values in series_by_column:
        if not np.all(np.isfinite(values)):
            raise ValueError("refusing to emit non-finite metric values")
    try:
        with open(csv_path, "w", encoding="utf-8", newline="") as f:
            f.write(",".join(columns) + "\n")
            for slot in range(series.config.horizon):
                row = [str(slot)] + [repr(float(col[slot]))
                                     for col in series_by_column]
                f.write(",".join(row) + "\n")
    except OSError as exc:
        raise OSError(f"failed to write results to {csv_path}: {exc}") from exc
    manifest = manifest_path_for(csv_path)
    dump_config(series.config.resolved(), manifest)
    return csv_path, manifest
