"""Training loop for one (config, seed) pair, and the multi-seed driver."""

from __future__ import annotations

import logging
import math
from collections import deque
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterator

import numpy as np

from rs2bench.agent import DqnLearner, ReplayBuffer, Transition, greedy_episode_return
from rs2bench.envs import CartPole, Pyramid
from rs2bench.harness.config import RunConfig
from rs2bench.harness.metrics import (
    EpisodeMetrics,
    aggregate,
    classify_terminal,
    write_aggregate_csv,
    write_csv,
)
from rs2bench.numkit import mlp_forward, mlp_init
from rs2bench.satisficing import (
    AspirationController,
    EpsilonGreedy,
    EpsilonSchedule,
    ReliabilityEstimator,
    RndModule,
    RS2Policy,
)

log = logging.getLogger(__name__)


@dataclass
class RunResult:
    seed: int
    metrics: list[EpisodeMetrics] = field(default_factory=list)
    stopped_early: bool = False


class Run:
    """All mutable state of a single training run."""

    def __init__(self, cfg: RunConfig, seed: int):
        self.cfg = cfg
        self.seed = seed
        streams = np.random.SeedSequence(seed).spawn(8)
        (
            env_rng,
            net_rng,
            est_rng,
            rnd_rng,
            self.act_rng,
            self.sample_rng,
            self.reset_rng,
            self.eval_rng,
        ) = (np.random.default_rng(s) for s in streams)

        if cfg.task == "cartpole":
            self.env = CartPole()
            n_actions, obs_dim = CartPole.n_actions, CartPole.obs_dim
            self.goal = None
        else:
            self.goal = cfg.goal_coords()
            self.env = Pyramid(
                self.goal, env_rng, depth=cfg.pyramid_depth, h=cfg.pyramid_h, obs_dim=cfg.obs_dim
            )
            n_actions, obs_dim = self.env.n_actions, cfg.obs_dim

        online = mlp_init([obs_dim, *cfg.hidden, n_actions], net_rng)
        self.learner = DqnLearner(
            online,
            gamma=cfg.discount,
            batch_size=cfg.batch_size,
            lr=cfg.lr,
            intrinsic_coef=cfg.rnd_coef if cfg.uses_rnd else 0.0,
        )
        self.buffer = ReplayBuffer(cfg.buffer_capacity, obs_dim)
        self.rnd = None
        if cfg.uses_rnd:
            dims = [obs_dim] + [cfg.rnd_hidden] * (cfg.rnd_layers - 1) + [cfg.rnd_out]
            self.rnd = RndModule(dims, rnd_rng, coef=cfg.rnd_coef, lr=cfg.rnd_lr)

        if cfg.uses_rs2:
            estimator = ReliabilityEstimator(
                n_actions,
                cfg.hidden[-1],
                est_rng,
                k=cfg.centroids,
                forgetting=cfg.forgetting,
                eps=cfg.eps_div,
                initial_mass=cfg.initial_mass,
            )
            self.policy = RS2Policy(
                estimator,
                AspirationController(cfg.aleph_g, cfg.vg_window),
                temperature=cfg.temperature,
                sat_temperature=cfg.sat_temperature,
                decay_mode=cfg.decay_mode,
                eps_ratio=cfg.eps_ratio,
                vg_source=cfg.vg_source,
            )
        else:
            schedule = EpsilonSchedule(cfg.eps_start, cfg.eps_end, cfg.episodes, cfg.eps_mode)
            self.policy = EpsilonGreedy(n_actions, schedule)
        self.env_steps = 0

    def train_episode(self, episode: int) -> EpisodeMetrics:
        cfg, env, learner = self.cfg, self.env, self.learner
        self.policy.begin_episode(episode)
        obs = env.reset(self.reset_rng)
        total = 0.0
        beta_sum, beta_n = 0.0, 0
        while True:
            trace = mlp_forward(learner.online, obs)
            action = self.policy.behave(trace, self.act_rng)
            if self.policy.last_beta is not None:
                beta_sum += self.policy.last_beta
                beta_n += 1
            res = env.step(action)
            r_int = float(self.rnd.intrinsic(res.observation)) if self.rnd else 0.0
            terminal = res.done and not (cfg.bootstrap_truncated and res.truncated)
            self.buffer.store(Transition(obs, action, res.reward, res.observation, terminal, r_int))
            for _ in range(cfg.updates_per_step):
                if len(self.buffer) < cfg.batch_size:
                    break
                batch = self.buffer.sample(self.sample_rng, cfg.batch_size)
                learner.update(self.buffer, self.sample_rng, batch=batch)
                if self.rnd is not None:
                    self.rnd.train(batch.next_observations)
            self.env_steps += 1
            if self.env_steps % cfg.target_sync == 0:
                learner.sync_target()
            total += res.reward
            obs = res.observation
            if res.done:
                break
        self.policy.end_episode(total)
        group = None
        if self.goal is not None:
            group = classify_terminal(self.goal, env.terminal, cfg.neighbor_radius)
        return EpisodeMetrics(
            episode=episode,
            behavior_return=total,
            beta=beta_sum / beta_n if beta_n else None,
            group=group,
        )

    def evaluate(self) -> float:
        returns = [
            greedy_episode_return(self.learner, self.env, self.eval_rng)
            for _ in range(self.cfg.eval_episodes)
        ]
        self.policy.record_evaluation(returns)
        return float(np.mean(returns))


def iter_run(cfg: RunConfig, seed: int) -> Iterator[EpisodeMetrics]:
    """Yield one EpisodeMetrics per training episode. Deterministic per (cfg, seed)."""
    run = Run(cfg, seed)
    for episode in range(cfg.episodes):
        m = run.train_episode(episode)
        if cfg.eval_interval and cfg.eval_episodes and (episode + 1) % cfg.eval_interval == 0:
            m.eval_return = run.evaluate()
        yield m


def run_one(cfg: RunConfig, seed: int) -> RunResult:
    """Run to completion, or until the rolling greedy average meets ``stop_threshold``."""
    result = RunResult(seed)
    span = max(1, math.ceil(cfg.eval_window / max(cfg.eval_episodes, 1)))
    recent: deque[float] = deque(maxlen=span)
    for m in iter_run(cfg, seed):
        result.metrics.append(m)
        if m.eval_return is None:
            continue
        recent.append(m.eval_return)
        if (
            cfg.stop_threshold is not None
            and len(recent) == span
            and float(np.mean(recent)) >= cfg.stop_threshold
        ):
            result.stopped_early = True
            break
    return result


def _run_seed(args):
    cfg, seed = args
    return run_one(cfg, seed)


def run_all(cfg: RunConfig) -> list[RunResult]:
    """Run every seed, sequentially or in a process pool when ``cfg.jobs > 1``."""
    jobs = [(cfg, s) for s in cfg.seeds]
    if cfg.jobs > 1 and len(jobs) > 1:
        from multiprocessing import Pool

        with Pool(min(cfg.jobs, len(jobs))) as pool:
            results = pool.map(_run_seed, jobs)
    else:
        results = []
        for job in jobs:
            log.info("seed %d: %s on %s", job[1], cfg.method, cfg.task)
            results.append(_run_seed(job))

    if cfg.out is not None:
        out = Path(cfg.out)
        out.mkdir(parents=True, exist_ok=True)
        (out / "config.txt").write_text(cfg.to_text())
        for r in results:
            write_csv(r.metrics, out / f"seed_{r.seed}.csv")
        lengths = {len(r.metrics) for r in results}
        if len(lengths) == 1:
            write_aggregate_csv(aggregate([r.metrics for r in results], cfg.bin_size), out / "aggregate.csv")
        else:
            log.warning("runs stopped at different episodes; aggregate.csv not written")
    return results
