"""Online band-selection policies.

Time is organised in blocks of 2 * ceil(N / K) slots. A block either
explores (every band group is sensed for two consecutive slots, yielding
one transition observation per band) or exploits (the currently most
promising bands are sensed each slot). Three policies share the loop:

* LDM  - learns transition statistics, always senses K bands.
* OLDM - like LDM, but once every band has enough observations the set
         size is re-optimised from the estimated vacancy probabilities at
         each exploitation block.
* IMP  - ideal myopic baseline with the true statistics and the known
         optimal set size from the first slot.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Protocol

import numpy as np

from .recovery import SenseResult, oracle_sense
from .sizing import exploration_threshold, optimize_size
from .spectrum import BandStatistics, stationary_vacancy

POLICY_MODES = ("LDM", "OLDM", "IMP")

EXPLORE = "explore"
EXPLOIT = "exploit"


@dataclass
class PolicyConfig:
    """Run-time parameters of one policy run."""

    n_bands: int
    k_branches: int
    horizon: int
    exploration_coefficient: float = 10.0
    mu: float = 0.5
    delta: float = 0.1
    mode: str = "OLDM"

    def validate(self):
        if self.n_bands < 1:
            raise ValueError("n_bands must be at least 1")
        if not 1 <= self.k_branches <= self.n_bands:
            raise ValueError("k_branches must satisfy 1 <= k_branches <= n_bands")
        if self.horizon < 0:
            raise ValueError("horizon must be nonnegative")
        if self.exploration_coefficient <= 0.0:
            raise ValueError("exploration_coefficient must be positive")
        if not 0.0 < self.mu < 1.0:
            raise ValueError("mu must lie in (0, 1)")
        if not 0.0 < self.delta < 1.0:
            raise ValueError("delta must lie in (0, 1)")
        if self.mode not in POLICY_MODES:
            raise ValueError(f"mode must be one of {POLICY_MODES}")


@dataclass
class BeliefState:
    """Learner state: immediate vacancy beliefs and transition statistics.

    counts[n, u, v] is the number of observed u -> v transitions of band n,
    Laplace-initialised to 1 so the first estimates are 0.5. p01_hat and
    p10_hat cache the row-normalised off-diagonal estimates.
    """

    omega: np.ndarray        # P(band vacant now), length n_bands
    counts: np.ndarray       # (n_bands, 2, 2) int
    p01_hat: np.ndarray
    p10_hat: np.ndarray
    obs_count: np.ndarray    # transition observations per band
    slot_index: int = 0

    @classmethod
    def fresh(cls, n_bands: int) -> "BeliefState":
        return cls(omega=np.full(n_bands, 0.5),
                   counts=np.ones((n_bands, 2, 2), dtype=np.int64),
                   p01_hat=np.full(n_bands, 0.5),
                   p10_hat=np.full(n_bands, 0.5),
                   obs_count=np.zeros(n_bands, dtype=np.int64),
                   slot_index=0)

    @property
    def n_bands(self) -> int:
        return self.omega.size

    @property
    def p_hat(self) -> np.ndarray:
        """Estimated transition matrices, shape (n_bands, 2, 2)."""
        out = np.empty((self.n_bands, 2, 2))
        out[:, 0, 1] = self.p01_hat
        out[:, 0, 0] = 1.0 - self.p01_hat
        out[:, 1, 0] = self.p10_hat
        out[:, 1, 1] = 1.0 - self.p10_hat
        return out

    def vacancy_estimates(self) -> np.ndarray:
        """Estimated stationary vacancy per band from the cached estimates."""
        return self.p10_hat / (self.p10_hat + self.p01_hat)


@dataclass
class SlotOutcome:
    """Record of one sensing slot."""

    selected: np.ndarray
    statuses: np.ndarray
    xi: int
    throughput: int
    phase: str


class Environment(Protocol):
    def sense(self, selected: np.ndarray, slot: int,
              prior_vacancy: np.ndarray | None = None) -> SenseResult: ...


class OracleEnvironment:
    """Sensing backend that reads statuses straight off a precomputed trajectory."""

    def __init__(self, trajectory: np.ndarray, k_branches: int):
        self.trajectory = np.asarray(trajectory, dtype=np.int8)
        self.k_branches = k_branches

    def sense(self, selected, slot, prior_vacancy=None) -> SenseResult:
        return oracle_sense(self.trajectory[slot, selected], self.k_branches)


def epsilon(block_index: int, exploration_coefficient: float) -> float:
    """Exploration probability of a block: min(1, L / b)."""
    if block_index < 1:
        raise ValueError("block_index must be at least 1")
    return min(1.0, exploration_coefficient / block_index)


def explore_schedule(group: int, n_bands: int, k_branches: int) -> np.ndarray:
    """Bands of the given exploration group: the contiguous slice of size K
    starting at group * K, truncated at the last band."""
    n_groups = -(-n_bands // k_branches)
    if not 0 <= group < n_groups:
        raise ValueError(f"group must lie in [0, {n_groups})")
    return np.arange(group * k_branches,
                     min((group + 1) * k_branches, n_bands))


def estimate_transition(counts: np.ndarray) -> np.ndarray:
    """Row-normalised transition estimates from one band's 2x2 counts.

    The off-diagonal estimate is C_uv / (C_uv + C_uu) and each row sums
    to one. With the Laplace initialisation every denominator is >= 2.
    """
    counts = np.asarray(counts, dtype=float)
    if counts.shape != (2, 2):
        raise ValueError("counts must be a 2x2 matrix")
    p01 = counts[0, 1] / (counts[0, 1] + counts[0, 0])
    p10 = counts[1, 0] / (counts[1, 0] + counts[1, 1])
    return np.array([[1.0 - p01, p01], [p10, 1.0 - p10]])


def update_counts(belief: BeliefState, selected: np.ndarray,
                  statuses_prev: np.ndarray,
                  statuses_now: np.ndarray) -> BeliefState:
    """Credit one observed transition per selected band.

    Both status vectors must come from successful senses of the same band
    set in consecutive slots.
    """
    selected = np.asarray(selected)
    prev = np.asarray(statuses_prev)
    now = np.asarray(statuses_now)
    if not (selected.size == prev.size == now.size):
        raise ValueError("selected and status vectors must have equal length")
    counts = belief.counts
    for band, u, v in zip(selected.tolist(), prev.tolist(), now.tolist()):
        counts[band, u, v] += 1
    belief.obs_count[selected] += 1
    return belief


def refresh_estimates(belief: BeliefState, bands: np.ndarray) -> None:
    """Recompute the cached transition estimates of the given bands."""
    c = belief.counts[bands]
    belief.p01_hat[bands] = c[:, 0, 1] / (c[:, 0, 1] + c[:, 0, 0])
    belief.p10_hat[bands] = c[:, 1, 0] / (c[:, 1, 0] + c[:, 1, 1])


def propagate_belief(belief: BeliefState, outcome: SlotOutcome) -> np.ndarray:
    """Advance the vacancy beliefs by one slot.

    Bands sensed in a successful slot jump to the estimated transition
    probability out of their observed state; every other band (and every
    band of a failed slot) follows the one-step prediction
    (1 - omega) * p10 + omega * p00.
    """
    p10 = belief.p10_hat
    p01 = belief.p01_hat
    omega = belief.omega
    # (1 - omega) * p10 + omega * (1 - p01), rearranged to save temporaries.
    new_omega = omega + p10 - omega * (p10 + p01)
    if outcome.xi == 0:
        sel = outcome.selected
        busy = outcome.statuses == 1
        new_omega[sel] = np.where(busy, p10[sel], 1.0 - p01[sel])
    belief.omega = new_omega
    belief.slot_index += 1
    return new_omega


def exploit_select(belief: BeliefState, set_size: int, k_branches: int) -> np.ndarray:
    """The set_size bands with the largest vacancy belief, ties to the
    lowest band index; returned in ascending band order."""
    if not k_branches <= set_size <= belief.n_bands:
        raise ValueError("set_size must satisfy k_branches <= set_size <= n_bands")
    order = (-belief.omega).argsort(kind="stable")
    top = order[:set_size]
    top.sort()
    return top


def run_policy(cfg: PolicyConfig, env: Environment, rng: np.random.Generator,
               true_stats: BandStatistics | None = None,
               belief: BeliefState | None = None) -> list[SlotOutcome]:
    """Run one policy over the configured horizon.

    The environment supplies per-slot sensing of whichever band set the
    policy requests. IMP needs true_stats for its exact beliefs and fixed
    optimal set size; LDM and OLDM learn from scratch. A caller-supplied
    belief is updated in place, which also exposes the final learner state.
    """
    cfg.validate()
    n, k = cfg.n_bands, cfg.k_branches
    n_groups = -(-n // k)
    block_len = 2 * n_groups
    n_blocks = -(-cfg.horizon // block_len) if cfg.horizon else 0
    is_imp = cfg.mode == "IMP"

    if belief is None:
        belief = BeliefState.fresh(n)
    elif belief.n_bands != n:
        raise ValueError("belief length must equal n_bands")
    if is_imp:
        if true_stats is None:
            raise ValueError("IMP requires true band statistics")
        if true_stats.n_bands != n:
            raise ValueError("true_stats length must equal n_bands")
        belief.p01_hat = true_stats.p01.copy()
        belief.p10_hat = true_stats.p10.copy()
        belief.omega = stationary_vacancy(true_stats)
        fixed_size = optimize_size(belief.omega, k).size
    else:
        fixed_size = k
    unlock_obs = (exploration_threshold(n, k, cfg.mu, cfg.delta).observations
                  if cfg.mode == "OLDM" else None)

    group_sets = [explore_schedule(g, n, k) for g in range(n_groups)]
    outcomes: list[SlotOutcome] = []
    t = 0
    # Last exploitation outcome, kept across consecutive exploitation blocks
    # and cleared by exploration so no pair straddles a phase change.
    prev: SlotOutcome | None = None

    def sense_and_record(selected, phase):
        nonlocal t
        result = env.sense(selected, t, belief.omega)
        vacant = selected.size - int(result.statuses.sum())
        throughput = vacant if result.xi == 0 else 0
        outcome = SlotOutcome(selected=selected, statuses=result.statuses,
                              xi=result.xi, throughput=throughput, phase=phase)
        outcomes.append(outcome)
        t += 1
        return outcome

    for b in range(1, n_blocks + 1):
        if t >= cfg.horizon:
            break
        explore = (not is_imp) and rng.random() < epsilon(b, cfg.exploration_coefficient)
        if explore:
            prev = None
            for sel in group_sets:
                if t >= cfg.horizon:
                    break
                first = sense_and_record(sel, EXPLORE)
                propagate_belief(belief, first)
                if t >= cfg.horizon:
                    break
                second = sense_and_record(sel, EXPLORE)
                if first.xi == 0 and second.xi == 0:
                    update_counts(belief, sel, first.statuses, second.statuses)
                    refresh_estimates(belief, sel)
                propagate_belief(belief, second)
        else:
            if is_imp:
                set_size = fixed_size
            elif cfg.mode == "OLDM" and int(belief.obs_count.min()) >= unlock_obs:
                set_size = optimize_size(belief.vacancy_estimates(), k).size
            else:
                set_size = k
            for _ in range(block_len):
                if t >= cfg.horizon:
                    break
                sel = exploit_select(belief, set_size, k)
                outcome = sense_and_record(sel, EXPLOIT)
                # Transition evidence is credited only from same-set pairs of
                # sets no larger than the branch count: success is then
                # unconditional, whereas for larger sets conditioning on a
                # successful reconstruction censors high busy counts and
                # biases the vacancy estimates upward.
                if (not is_imp and prev is not None
                        and sel.size <= k
                        and prev.xi == 0 and outcome.xi == 0
                        and prev.selected.size == sel.size
                        and bool((prev.selected == sel).all())):
                    update_counts(belief, sel, prev.statuses, outcome.statuses)
                    refresh_estimates(belief, sel)
                propagate_belief(belief, outcome)
                prev = outcome
    return outcomes
