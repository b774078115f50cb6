"""CartPole and Pyramid environments, plus the exact random-reach oracle."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np


class EnvError(RuntimeError):
    pass


@dataclass
class StepResult:
    observation: np.ndarray
    reward: float
    done: bool
    # episode ended by the step limit rather than by failure
    truncated: bool = False


# ---------------------------------------------------------------------------
# CartPole (classic Gym CartPole-v0 dynamics, Euler integration)
# ---------------------------------------------------------------------------

GRAVITY = 9.8
MASS_CART = 1.0
MASS_POLE = 0.1
TOTAL_MASS = MASS_CART + MASS_POLE
HALF_LENGTH = 0.5
POLE_MASS_LENGTH = MASS_POLE * HALF_LENGTH
FORCE_MAG = 10.0
TAU = 0.02
X_THRESHOLD = 2.4
THETA_THRESHOLD = 12 * 2 * math.pi / 360
MAX_STEPS = 200


def cartpole_dynamics(state, force: float) -> np.ndarray:
    """One Euler step of the cart-pole ODE under a horizontal ``force``."""
    x, x_dot, theta, theta_dot = (float(v) for v in state)
    cos, sin = math.cos(theta), math.sin(theta)
    temp = (force + POLE_MASS_LENGTH * theta_dot * theta_dot * sin) / TOTAL_MASS
    theta_acc = (GRAVITY * sin - cos * temp) / (
        HALF_LENGTH * (4.0 / 3.0 - MASS_POLE * cos * cos / TOTAL_MASS)
    )
    x_acc = temp - POLE_MASS_LENGTH * theta_acc * cos / TOTAL_MASS
    return np.array(
        [
            x + TAU * x_dot,
            x_dot + TAU * x_acc,
            theta + TAU * theta_dot,
            theta_dot + TAU * theta_acc,
        ]
    )


def cartpole_failed(state) -> bool:
    return abs(state[0]) > X_THRESHOLD or abs(state[2]) > THETA_THRESHOLD


def cartpole_reset(rng: np.random.Generator) -> np.ndarray:
    return rng.uniform(-0.05, 0.05, size=4)


class CartPole:
    """Two actions: 0 pushes left, 1 pushes right. Reward 1 on every step."""

    n_actions = 2
    obs_dim = 4

    def __init__(self, max_steps: int = MAX_STEPS):
        self.max_steps = max_steps
        self.state: np.ndarray | None = None
        self.steps = 0
        self.done = True

    def reset(self, rng: np.random.Generator) -> np.ndarray:
        self.state = cartpole_reset(rng)
        self.steps = 0
        self.done = False
        return self.state.copy()

    def step(self, action: int) -> StepResult:
        if self.done or self.state is None:
            raise EnvError("step() called on a terminated CartPole episode")
        if action not in (0, 1):
            raise EnvError(f"invalid CartPole action {action!r}")
        force = FORCE_MAG if action == 1 else -FORCE_MAG
        self.state = cartpole_dynamics(self.state, force)
        self.steps += 1
        failed = cartpole_failed(self.state)
        self.done = failed or self.steps >= self.max_steps
        return StepResult(self.state.copy(), 1.0, self.done, truncated=self.done and not failed)


# ---------------------------------------------------------------------------
# Pyramid task
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PyramidState:
    depth: int
    coords: tuple[int, ...]


def pyramid_actions(h: int) -> list[tuple[int, ...]]:
    """Action index -> binary increment vector. Index bit i drives coordinate i."""
    return [tuple((a >> i) & 1 for i in range(h)) for a in range(2**h)]


class PyramidEncoding:
    """Fixed random feature vector per discrete state, drawn once per simulation."""

    def __init__(self, depth: int, h: int, dim: int, rng: np.random.Generator):
        self.dim = dim
        self.table: dict[PyramidState, np.ndarray] = {}
        # Enumerate in a fixed order so the draw is a pure function of the rng state.
        for d in range(depth + 1):
            for coords in itertools.product(range(d + 1), repeat=h):
                self.table[PyramidState(d, coords)] = rng.standard_normal(dim)

    def __call__(self, state: PyramidState) -> np.ndarray:
        return self.table[state]


def pyramid_observe(state: PyramidState, encoding: PyramidEncoding) -> np.ndarray:
    return encoding(state)


class Pyramid:
    """Tree navigation over an h-dimensional coordinate hyperplane.

    Episodes start at one of the 2**h depth-1 states and end on reaching
    ``depth``; the only reward is 1 for arriving at ``goal``.
    """

    def __init__(
        self,
        goal: tuple[int, ...],
        rng: np.random.Generator,
        depth: int = 6,
        h: int = 2,
        obs_dim: int = 32,
    ):
        goal = tuple(int(g) for g in goal)
        if len(goal) != h or any(not 0 <= g <= depth for g in goal):
            raise EnvError(f"goal {goal} is not a terminal state of a depth-{depth} pyramid")
        self.depth = depth
        self.h = h
        self.goal = goal
        self.actions = pyramid_actions(h)
        self.n_actions = len(self.actions)
        self.obs_dim = obs_dim
        self.encoding = PyramidEncoding(depth, h, obs_dim, rng)
        self.state: PyramidState | None = None

    def reset(self, rng: np.random.Generator) -> np.ndarray:
        self.state = pyramid_reset(rng, self.h)
        return self.encoding(self.state)

    def step(self, action: int) -> StepResult:
        if self.state is None:
            raise EnvError("step() before reset()")
        self.state, reward, done = pyramid_step(self.state, action, self.goal, self.depth)
        return StepResult(self.encoding(self.state), reward, done)

    @property
    def terminal(self) -> tuple[int, ...] | None:
        if self.state is not None and self.state.depth == self.depth:
            return self.state.coords
        return None


def pyramid_reset(rng: np.random.Generator, h: int = 2) -> PyramidState:
    return PyramidState(1, tuple(int(c) for c in rng.integers(0, 2, size=h)))


def pyramid_step(
    state: PyramidState, action, goal: tuple[int, ...], depth: int = 6
) -> tuple[PyramidState, float, bool]:
    """Advance one level. ``action`` is an index or an explicit increment vector."""
    if state.depth >= depth:
        raise EnvError(f"step() at terminal depth {state.depth}")
    h = len(state.coords)
    if isinstance(action, (int, np.integer)):
        if not 0 <= action < 2**h:
            raise EnvError(f"invalid Pyramid action {action}")
        inc = tuple((int(action) >> i) & 1 for i in range(h))
    else:
        inc = tuple(int(v) for v in action)
        if len(inc) != h or any(v not in (0, 1) for v in inc):
            raise EnvError(f"invalid Pyramid increment {action!r}")
    nxt = PyramidState(state.depth + 1, tuple(c + i for c, i in zip(state.coords, inc)))
    done = nxt.depth == depth
    reward = 1.0 if done and nxt.coords == tuple(goal) else 0.0
    return nxt, reward, done


def pyramid_reach_probability(goal, depth: int = 6) -> Fraction:
    """Exact probability that a uniform-random agent ends at ``goal``.

    Averaged over the equally likely depth-1 starts; each coordinate receives an
    independent Binomial(depth - 1, 1/2) displacement.
    """
    goal = tuple(int(g) for g in goal)
    h = len(goal)
    n = depth - 1
    total = Fraction(0)
    for start in itertools.product((0, 1), repeat=h):
        p = Fraction(1)
        for g, s in zip(goal, start):
            k = g - s
            p *= Fraction(math.comb(n, k), 2**n) if 0 <= k <= n else 0
        total += p
    return total / 2**h


def reach_table(depth: int = 6, h: int = 2) -> dict[tuple[int, ...], Fraction]:
    return {
        coords: pyramid_reach_probability(coords, depth)
        for coords in itertools.product(range(depth + 1), repeat=h)
    }


def reachable_from_all(depth: int = 6, h: int = 2) -> set[tuple[int, ...]]:
    """Terminal states reachable from every depth-1 start."""
    n = depth - 1
    out = set()
    for coords in itertools.product(range(depth + 1), repeat=h):
        if all(
            all(0 <= c - s <= n for c, s in zip(coords, start))
            for start in itertools.product((0, 1), repeat=h)
        ):
            out.add(coords)
    return out


GOALS = {"easy": (3, 3), "hard": (1, 5)}
