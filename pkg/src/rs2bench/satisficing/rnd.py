"""Random network distillation: novelty as a predictor's error on a frozen random net."""

from __future__ import annotations

import math

import numpy as np

from rs2bench.numkit import AdamState, adam_step, mlp_backward_full, mlp_init, predict


class RunningStd:
    """Welford accumulator over a stream of scalars."""

    def __init__(self):
        self.count = 0
        self.mean = 0.0
        self.m2 = 0.0

    def update(self, values) -> None:
        for x in np.atleast_1d(values):
            self.count += 1
            d = float(x) - self.mean
            self.mean += d / self.count
            self.m2 += d * (float(x) - self.mean)

    @property
    def std(self) -> float:
        return math.sqrt(self.m2 / self.count) if self.count > 1 else 0.0


class RndModule:
    def __init__(self, layer_dims, rng: np.random.Generator, coef: float = 1.0, lr: float = 1e-3):
        self.target = mlp_init(layer_dims, rng)
        self.predictor = mlp_init(layer_dims, rng)
        self.adam = AdamState.for_net(self.predictor, lr=lr)
        self.coef = coef
        self.stats = RunningStd()

    def raw_error(self, observations) -> np.ndarray:
        """Squared Euclidean distance between predictor and target outputs."""
        diff = predict(self.predictor, observations) - predict(self.target, observations)
        return np.sum(diff * diff, axis=-1)

    def intrinsic(self, observations, update_stats: bool = True):
        err = self.raw_error(observations)
        if update_stats:
            self.stats.update(err)
        std = self.stats.std
        return err / std if std > 0 else err

    def train(self, observations) -> float:
        observations = np.atleast_2d(observations)
        grads, loss = mlp_backward_full(
            self.predictor, observations, predict(self.target, observations)
        )
        adam_step(self.adam, self.predictor, grads)
        return loss


def rnd_intrinsic(rnd: RndModule, observation) -> float:
    return float(rnd.intrinsic(observation))


def rnd_train(rnd: RndModule, observations) -> float:
    if np.asarray(observations).size == 0:
        raise ValueError("empty batch")
    return rnd.train(observations)
