"""Behaviour policies: epsilon-greedy baseline and the RS2 satisficing policy."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from rs2bench.numkit import ForwardTrace
from rs2bench.satisficing.core import (
    EPS_RATIO,
    AspirationController,
    ReliabilityEstimator,
    rs2_values,
    satisficed,
    select_action,
    srs_values,
)


@dataclass
class EpsilonSchedule:
    start: float = 1.0
    end: float = 0.01
    total_episodes: int = 1
    mode: str = "exponential"  # or "constant"

    def __post_init__(self):
        if self.mode not in ("exponential", "constant"):
            raise ValueError(f"unknown epsilon mode {self.mode!r}")

    def __call__(self, episode: int) -> float:
        if self.mode == "constant":
            return self.start
        frac = min(max(episode / max(self.total_episodes, 1), 0.0), 1.0)
        return self.start * (self.end / self.start) ** frac


class EpsilonGreedy:
    def __init__(self, n_actions: int, schedule: EpsilonSchedule):
        self.n_actions = n_actions
        self.schedule = schedule
        self.epsilon = schedule(0)
        self.last_beta: float | None = None

    def begin_episode(self, episode: int) -> None:
        self.epsilon = self.schedule(episode)

    def behave(self, trace: ForwardTrace, rng: np.random.Generator) -> int:
        if rng.random() < self.epsilon:
            return int(rng.integers(self.n_actions))
        return int(np.argmax(trace.output))

    def end_episode(self, episode_return: float) -> None:
        pass

    def record_evaluation(self, returns) -> None:
        pass


class RS2Policy:
    """Satisficing behaviour policy driven by the Q-net's output and last hidden layer.

    ``decay_mode`` selects whether the reliability accumulators forget once per
    selection ("step") or once per episode ("episode"). ``sat_temperature`` is
    the softmax temperature of the satisficed branch (defaults to ``temperature``).
    """

    def __init__(
        self,
        estimator: ReliabilityEstimator,
        controller: AspirationController,
        temperature: float = 1.0,
        decay_mode: str = "step",
        eps_ratio: float = EPS_RATIO,
        vg_source: str = "behavior",
        sat_temperature: float | None = None,
    ):
        if decay_mode not in ("step", "episode"):
            raise ValueError(f"unknown decay mode {decay_mode!r}")
        if vg_source not in ("behavior", "greedy"):
            raise ValueError(f"unknown V_G source {vg_source!r}")
        self.estimator = estimator
        self.controller = controller
        self.temperature = temperature
        self.sat_temperature = temperature if sat_temperature is None else sat_temperature
        self.decay_mode = decay_mode
        self.eps_ratio = eps_ratio
        self.vg_source = vg_source
        self.last_beta: float | None = None
        self.last_satisficed = False

    def begin_episode(self, episode: int) -> None:
        pass

    def record_evaluation(self, returns) -> None:
        if self.vg_source == "greedy":
            for r in returns:
                self.controller.record(r)

    def scores(self, q, z) -> tuple[np.ndarray, np.ndarray]:
        """(action scores, similarity matrix) for one decision."""
        w = self.estimator.similarity(z)
        rho = self.estimator.reliability(z, w)
        aleph_s, beta = self.controller.aspiration(q)
        self.last_beta = beta
        self.last_satisficed = satisficed(q, aleph_s)
        if self.last_satisficed:
            return rs2_values(q, rho, aleph_s), w
        return srs_values(q, rho, aleph_s, self.eps_ratio), w

    def behave(self, trace: ForwardTrace, rng: np.random.Generator) -> int:
        z = trace.last_hidden
        values, w = self.scores(trace.output, z)
        temperature = self.sat_temperature if self.last_satisficed else self.temperature
        action = select_action(values, rng, temperature)
        self.estimator.update(z, action, w=w, decay=self.decay_mode == "step")
        return action

    def end_episode(self, episode_return: float) -> None:
        if self.vg_source == "behavior":
            self.controller.record(episode_return)
        if self.decay_mode == "episode":
            self.estimator.decay()


def behave(policy, observation, trace: ForwardTrace, rng: np.random.Generator) -> int:
    """Functional entry point; ``observation`` is already encoded in ``trace``."""
    return policy.behave(trace, rng)
