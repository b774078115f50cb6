"""DQN learner: replay buffer, online/target networks, TD(0) regression."""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from rs2bench.numkit import AdamState, Mlp, adam_step, mlp_backward, predict


@dataclass
class Transition:
    observation: np.ndarray
    action: int
    reward: float
    next_observation: np.ndarray
    done: bool
    intrinsic: float = 0.0


class Batch(NamedTuple):
    observations: np.ndarray
    actions: np.ndarray
    rewards: np.ndarray
    intrinsic: np.ndarray
    next_observations: np.ndarray
    dones: np.ndarray


class ReplayBuffer:
    """Fixed-capacity FIFO ring of transitions backed by flat arrays."""

    def __init__(self, capacity: int, obs_dim: int):
        if capacity < 1:
            raise ValueError("capacity must be >= 1")
        self.capacity = capacity
        self.obs = np.zeros((capacity, obs_dim))
        self.next_obs = np.zeros((capacity, obs_dim))
        self.actions = np.zeros(capacity, dtype=np.int64)
        self.rewards = np.zeros(capacity)
        self.intrinsic = np.zeros(capacity)
        self.dones = np.zeros(capacity)
        self.cursor = 0
        self.size = 0

    def __len__(self) -> int:
        return self.size

    def store(self, t: Transition) -> None:
        i = self.cursor
        self.obs[i] = t.observation
        self.next_obs[i] = t.next_observation
        self.actions[i] = t.action
        self.rewards[i] = t.reward
        self.intrinsic[i] = t.intrinsic
        self.dones[i] = float(t.done)
        self.cursor = (i + 1) % self.capacity
        self.size = min(self.size + 1, self.capacity)

    def get(self, i: int) -> Transition:
        """i-th oldest stored transition."""
        if not 0 <= i < self.size:
            raise IndexError(i)
        j = (self.cursor - self.size + i) % self.capacity
        return Transition(
            self.obs[j].copy(),
            int(self.actions[j]),
            float(self.rewards[j]),
            self.next_obs[j].copy(),
            bool(self.dones[j]),
            float(self.intrinsic[j]),
        )

    def sample(self, rng: np.random.Generator, batch_size: int) -> Batch:
        idx = rng.integers(0, self.size, size=batch_size)
        return Batch(
            self.obs[idx],
            self.actions[idx],
            self.rewards[idx],
            self.intrinsic[idx],
            self.next_obs[idx],
            self.dones[idx],
        )


def store(buffer: ReplayBuffer, transition: Transition) -> None:
    buffer.store(transition)


class DqnLearner:
    def __init__(
        self,
        online: Mlp,
        gamma: float = 0.99,
        batch_size: int = 64,
        lr: float = 1e-3,
        intrinsic_coef: float = 0.0,
    ):
        self.online = online
        self.target = online.copy()
        self.gamma = gamma
        self.batch_size = batch_size
        self.intrinsic_coef = intrinsic_coef
        self.adam = AdamState.for_net(online, lr=lr)

    def td_targets(self, batch: Batch) -> np.ndarray:
        """y = r + c * r_int + gamma * max_a Q_target(s', a) * (1 - done)."""
        bootstrap = predict(self.target, batch.next_observations).max(axis=1)
        return (
            batch.rewards
            + self.intrinsic_coef * batch.intrinsic
            + self.gamma * bootstrap * (1.0 - batch.dones)
        )

    def update(self, buffer: ReplayBuffer, rng: np.random.Generator, batch: Batch | None = None):
        """One Adam step on a sampled batch. Returns the loss, or None if the buffer is underfull."""
        if batch is None:
            if len(buffer) < self.batch_size:
                return None
            batch = buffer.sample(rng, self.batch_size)
        targets = self.td_targets(batch)
        grads, loss = mlp_backward(self.online, batch.observations, batch.actions, targets)
        adam_step(self.adam, self.online, grads)
        return loss

    def sync_target(self) -> None:
        self.target.load_from(self.online)


def greedy_action(net: Mlp, observation) -> int:
    # np.argmax returns the first maximum, i.e. the lowest action index on ties
    return int(np.argmax(predict(net, observation)))


def greedy_episode_return(learner: DqnLearner, env, rng: np.random.Generator) -> float:
    """Undiscounted extrinsic return of one episode under argmax Q_online."""
    obs = env.reset(rng)
    total = 0.0
    while True:
        res = env.step(greedy_action(learner.online, obs))
        total += res.reward
        obs = res.observation
        if res.done:
            return total
