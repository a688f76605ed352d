"""Adaptive operator selection: credit assignment and selection policies.

A Controller keeps per-arm statistics (quality, play count, selection
probability) and updates them from scalar rewards.  Four selection policies
are supported:

* ``pm``       probability matching over a floor p_min
* ``ap``       pursuit of the current best arm toward a ceiling p_max
* ``egreedy``  epsilon-uniform exploration around the argmax arm
* ``ucb``      quality plus an exploration bonus E * sqrt(ln t) / n

and two credit assigners: ``avg`` (arithmetic mean of all rewards seen) and
``erwa`` (exponential recency-weighted average, Q += alpha * (r - Q)).

Rewards arrive either immediately (``mutation`` cadence) or buffered and
applied as a batch (``generation`` cadence, via flush_generation).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

POLICIES = ("pm", "ap", "egreedy", "ucb")
CREDITS = ("avg", "erwa")
REWARDS = ("raw", "relative")
CADENCES = ("generation", "mutation")

# per-policy learning-rate defaults from the hyperparameter sweep
DEFAULT_ALPHA = {"pm": 0.8, "ucb": 0.8, "ap": 0.2, "egreedy": 0.4}


class ConfigError(ValueError):
    """A controller configuration field is out of range or unknown."""


class CadenceError(RuntimeError):
    """A cadence-specific operation was called under the other cadence."""


@dataclass(frozen=True)
class AosConfig:
    policy: str = "pm"
    credit: str = "avg"
    reward: str = "raw"
    cadence: str = "generation"
    alpha: float | None = None   # None: resolved from DEFAULT_ALPHA[policy]
    p_min: float | None = None   # None: 1 / (2 * n_arms)
    p_max: float | None = None   # None: 1 - (n_arms - 1) * p_min
    beta: float = 0.8
    epsilon: float = 0.2
    explore: float = 10.0

    def resolved(self, n_arms: int) -> "AosConfig":
        """Validate and fill in arm-count-dependent defaults."""
        if n_arms < 1:
            raise ConfigError(f"n_arms must be >= 1, got {n_arms}")
        if self.policy not in POLICIES:
            raise ConfigError(f"unknown policy {self.policy!r}")
        if self.credit not in CREDITS:
            raise ConfigError(f"unknown credit {self.credit!r}")
        if self.reward not in REWARDS:
            raise ConfigError(f"unknown reward {self.reward!r}")
        if self.cadence not in CADENCES:
            raise ConfigError(f"unknown cadence {self.cadence!r}")
        alpha = DEFAULT_ALPHA[self.policy] if self.alpha is None else self.alpha
        if not 0.0 < alpha <= 1.0:
            raise ConfigError(f"alpha must be in (0, 1], got {alpha}")
        p_min = 1.0 / (2 * n_arms) if self.p_min is None else self.p_min
        if not 0.0 <= p_min * n_arms <= 1.0:
            raise ConfigError(f"p_min {p_min} infeasible for {n_arms} arms")
        p_max = 1.0 - (n_arms - 1) * p_min if self.p_max is None else self.p_max
        if not p_min <= p_max <= 1.0:
            raise ConfigError(f"p_max {p_max} must lie in [p_min, 1]")
        if not 0.0 <= self.beta <= 1.0:
            raise ConfigError(f"beta must be in [0, 1], got {self.beta}")
        if not 0.0 <= self.epsilon <= 1.0:
            raise ConfigError(f"epsilon must be in [0, 1], got {self.epsilon}")
        if self.explore < 0.0:
            raise ConfigError(f"explore must be >= 0, got {self.explore}")
        return AosConfig(self.policy, self.credit, self.reward, self.cadence,
                         alpha, p_min, p_max, self.beta, self.epsilon,
                         self.explore)


def compute_reward(raw_fitness: float, parent_fitness: float | None,
                   reward_type: str) -> float:
    """Scalar reward for one credit event.

    ``raw`` passes the fitness through; ``relative`` divides by the parent's
    fitness, falling back to the raw value when the parent scored zero or is
    unknown.  Rewards are clamped below at zero and uncapped above.
    """
    raw_fitness = max(0.0, raw_fitness)
    if reward_type == "raw":
        return raw_fitness
    if reward_type == "relative":
        if parent_fitness:
            return raw_fitness / parent_fitness
        return raw_fitness
    raise ConfigError(f"unknown reward {reward_type!r}")


@dataclass
class ArmStats:
    quality: float = 1.0          # optimistic start
    plays: int = 0                # rewards credited, not selections
    probability: float = 0.0
    reward_history: list = field(default_factory=list)


class Controller:
    """Per-arm statistics plus one selection policy.

    select_arm never mutates state; plays advance when rewards are credited.
    Under generation cadence credits accumulate in a pending buffer and take
    effect, in arrival order, at flush_generation.
    """

    def __init__(self, config: AosConfig, n_arms: int):
        self.config = config.resolved(n_arms)
        self.n_arms = n_arms
        self.arms = [ArmStats(probability=1.0 / n_arms) for _ in range(n_arms)]
        self._pending: list[tuple[int, float]] = []

    # ------------------------------------------------------------ state

    @property
    def p_min(self) -> float:
        return self.config.p_min

    @property
    def p_max(self) -> float:
        return self.config.p_max

    @property
    def qualities(self) -> list[float]:
        return [a.quality for a in self.arms]

    @property
    def plays(self) -> list[int]:
        return [a.plays for a in self.arms]

    @property
    def probabilities(self) -> list[float]:
        return [a.probability for a in self.arms]

    @property
    def reward_histories(self) -> list[list[float]]:
        return [a.reward_history for a in self.arms]

    def snapshot(self) -> list[dict]:
        return [{"arm": i, "quality": a.quality, "plays": a.plays,
                 "probability": a.probability}
                for i, a in enumerate(self.arms)]

    # ----------------------------------------------------------- credit

    def credit(self, arm: int, reward: float) -> None:
        if not 0 <= arm < self.n_arms:
            raise IndexError(f"arm {arm} out of range 0..{self.n_arms - 1}")
        reward = max(0.0, reward)
        if self.config.cadence == "generation":
            self._pending.append((arm, reward))
            return
        self._apply(arm, reward)
        self.recompute_probabilities()

    def flush_generation(self) -> None:
        if self.config.cadence != "generation":
            raise CadenceError("flush_generation is only valid under "
                               "generation cadence")
        for arm, reward in self._pending:
            self._apply(arm, reward)
        self._pending.clear()
        self.recompute_probabilities()

    def _apply(self, arm: int, reward: float) -> None:
        stats = self.arms[arm]
        stats.reward_history.append(reward)
        stats.plays += 1
        if self.config.credit == "avg":
            stats.quality = math.fsum(stats.reward_history) / stats.plays
        else:  # erwa
            stats.quality += self.config.alpha * (reward - stats.quality)

    # ----------------------------------------------------- probabilities

    def recompute_probabilities(self) -> None:
        if self.config.policy == "pm":
            total = math.fsum(a.quality for a in self.arms)
            if total <= 0.0:
                for a in self.arms:
                    a.probability = 1.0 / self.n_arms
                return
            span = 1.0 - self.n_arms * self.config.p_min
            for a in self.arms:
                a.probability = self.config.p_min + span * (a.quality / total)
        elif self.config.policy == "ap":
            best = self._argmax_quality()
            beta = self.config.beta
            for i, a in enumerate(self.arms):
                target = self.config.p_max if i == best else self.config.p_min
                a.probability += beta * (target - a.probability)
        # egreedy and ucb keep no probability table: no-op

    def _argmax_quality(self) -> int:
        best, best_q = 0, self.arms[0].quality
        for i in range(1, self.n_arms):
            if self.arms[i].quality > best_q:
                best, best_q = i, self.arms[i].quality
        return best

    # -------------------------------------------------------- selection

    def select_arm(self, rng) -> int:
        policy = self.config.policy
        if policy in ("pm", "ap"):
            u = rng.random()
            acc = 0.0
            for i, a in enumerate(self.arms):
                acc += a.probability
                if u < acc:
                    return i
            return self.n_arms - 1
        if policy == "egreedy":
            if rng.random() < self.config.epsilon:
                return rng.randrange(self.n_arms)
            return self._argmax_quality()
        # ucb: play every arm once, then maximise quality + bonus
        for i, a in enumerate(self.arms):
            if a.plays == 0:
                return i
        total = sum(a.plays for a in self.arms)
        log_total = math.log(total)
        best, best_score = 0, -math.inf
        for i, a in enumerate(self.arms):
            score = a.quality + self.config.explore * math.sqrt(log_total) / a.plays
            if score > best_score:
                best, best_score = i, score
        return best
