import itertools
import math
from fractions import Fraction

import numpy as np
import pytest

from rs2bench.envs import (
    GOALS,
    CartPole,
    EnvError,
    Pyramid,
    PyramidEncoding,
    PyramidState,
    cartpole_dynamics,
    cartpole_reset,
    pyramid_observe,
    pyramid_reach_probability,
    pyramid_reset,
    pyramid_step,
    reach_table,
    reachable_from_all,
)


def enumerate_terminals(depth=6, h=2):
    """Every (start, action sequence) pair, weighted uniformly. Independent of the binomial form."""
    counts = {}
    starts = list(itertools.product((0, 1), repeat=h))
    for start in starts:
        for seq in itertools.product(range(2**h), repeat=depth - 1):
            s = PyramidState(1, start)
            for a in seq:
                s, _, _ = pyramid_step(s, a, goal=(0,) * h, depth=depth)
            counts[s.coords] = counts.get(s.coords, 0) + 1
    total = len(starts) * (2**h) ** (depth - 1)
    return {k: Fraction(v, total) for k, v in counts.items()}


@pytest.fixture(scope="module")
def enumerated():
    return enumerate_terminals()


# --- CartPole ---------------------------------------------------------------


def test_cartpole_reset_bounds():
    rng = np.random.default_rng(0)
    states = np.array([cartpole_reset(rng) for _ in range(10_000)])
    assert states.min() >= -0.05 and states.max() <= 0.05


def test_cartpole_reset_deterministic_and_nonterminal():
    a = CartPole().reset(np.random.default_rng(5))
    b = CartPole().reset(np.random.default_rng(5))
    assert np.array_equal(a, b)
    env = CartPole()
    env.reset(np.random.default_rng(5))
    assert not env.step(0).done


def test_cartpole_push_right_from_rest():
    # hand evaluation: temp = 10/1.1, theta_acc = -temp / (0.5 * (4/3 - 0.1/1.1)),
    # x_acc = temp - 0.05 * theta_acc / 1.1
    temp = 10 / 1.1
    theta_acc = -temp / (0.5 * (4 / 3 - 0.1 / 1.1))
    x_acc = temp - 0.05 * theta_acc / 1.1
    nxt = cartpole_dynamics([0, 0, 0, 0], 10.0)
    np.testing.assert_allclose(nxt, [0, 0.02 * x_acc, 0, 0.02 * theta_acc], atol=1e-15)
    np.testing.assert_allclose(nxt, [0, 0.19512, 0, -0.29268], atol=1e-5)


def test_cartpole_push_left_mirrors_right():
    right = cartpole_dynamics([0, 0, 0, 0], 10.0)
    left = cartpole_dynamics([0, 0, 0, 0], -10.0)
    assert np.array_equal(left, -right)


def test_cartpole_time_limit():
    env = CartPole()
    obs = env.reset(np.random.default_rng(0))
    total = 0.0
    for t in range(200):
        # PD controller on the pole with a weak cart-centering term
        u = obs[2] + 0.3 * obs[3] + 0.01 * obs[0] + 0.05 * obs[1]
        res = env.step(1 if u > 0 else 0)
        total += res.reward
        obs = res.observation
        if res.done:
            break
    assert t == 199
    assert res.done and res.truncated
    assert total == 200
    with pytest.raises(EnvError):
        env.step(0)


def test_cartpole_gravity_destabilises():
    for theta in (0.01, -0.03, 0.1):
        s = np.array([0.0, 0.0, theta, 0.0])
        prev = abs(theta)
        for _ in range(10):
            s = cartpole_dynamics(s, 0.0)
            assert abs(s[2]) >= prev
            prev = abs(s[2])


def test_cartpole_always_terminates():
    rng = np.random.default_rng(3)
    env = CartPole()
    for _ in range(50):
        env.reset(rng)
        for steps in range(1, 1000):
            if env.step(int(rng.integers(2))).done:
                break
        assert steps <= 200


# --- Pyramid ----------------------------------------------------------------


def test_pyramid_reset_is_uniform_depth_one():
    rng = np.random.default_rng(0)
    n = 10_000
    counts = {}
    for _ in range(n):
        s = pyramid_reset(rng)
        assert s.depth == 1
        counts[s.coords] = counts.get(s.coords, 0) + 1
    assert set(counts) == {(0, 0), (0, 1), (1, 0), (1, 1)}
    chi2 = sum((c - n / 4) ** 2 / (n / 4) for c in counts.values())
    assert chi2 < 16.27  # 3 dof, p = 0.001


def test_pyramid_reset_reproducible():
    a = [pyramid_reset(np.random.default_rng(9)) for _ in range(3)]
    b = [pyramid_reset(np.random.default_rng(9)) for _ in range(3)]
    assert a == b


def test_pyramid_step_increments():
    s, r, done = pyramid_step(PyramidState(1, (0, 0)), (1, 1), goal=(3, 3))
    assert s == PyramidState(2, (1, 1)) and r == 0 and not done
    s2, _, _ = pyramid_step(PyramidState(1, (0, 0)), 3, goal=(3, 3))
    assert s2 == s


@pytest.mark.parametrize("start", [(0, 0), (0, 1), (1, 0), (1, 1)])
def test_pyramid_identity_path(start):
    s = PyramidState(1, start)
    for _ in range(5):
        s, r, done = pyramid_step(s, (0, 0), goal=start)
    assert s == PyramidState(6, start) and done and r == 1.0


def test_pyramid_reward_only_at_goal():
    goal = (2, 3)
    for coords in itertools.product(range(7), repeat=2):
        prev = PyramidState(5, (min(coords[0], 5), min(coords[1], 5)))
        inc = (coords[0] - prev.coords[0], coords[1] - prev.coords[1])
        s, r, done = pyramid_step(prev, inc, goal=goal)
        assert done
        assert r == (1.0 if coords == goal else 0.0)


def test_pyramid_step_errors():
    with pytest.raises(EnvError):
        pyramid_step(PyramidState(6, (0, 0)), 0, goal=(0, 0))
    with pytest.raises(EnvError):
        pyramid_step(PyramidState(1, (0, 0)), 4, goal=(0, 0))
    with pytest.raises(EnvError):
        pyramid_step(PyramidState(1, (0, 0)), (2, 0), goal=(0, 0))


def test_pyramid_encoding():
    enc = PyramidEncoding(6, 2, 32, np.random.default_rng(0))
    s = PyramidState(3, (1, 2))
    assert np.array_equal(pyramid_observe(s, enc), pyramid_observe(s, enc))
    assert pyramid_observe(s, enc).shape == (32,)
    vecs = np.array(list(enc.table.values()))
    assert len(enc.table) == sum((1 + d) ** 2 for d in range(7))
    assert len(np.unique(vecs, axis=0)) == len(vecs)
    other = PyramidEncoding(6, 2, 32, np.random.default_rng(1))
    assert not np.array_equal(other(s), enc(s))


def test_pyramid_env_episode_length():
    rng = np.random.default_rng(0)
    env = Pyramid(GOALS["easy"], rng)
    for _ in range(20):
        env.reset(rng)
        steps = 0
        while True:
            steps += 1
            if env.step(int(rng.integers(4))).done:
                break
        assert steps == 5
        assert env.terminal is not None


def test_reach_probability_worked_values():
    assert pyramid_reach_probability((3, 3)) == Fraction(10, 32) ** 2
    assert float(pyramid_reach_probability((3, 3))) == 0.09765625
    assert float(pyramid_reach_probability((0, 0))) == 0.000244140625
    assert pyramid_reach_probability((1, 5)) == Fraction(36, 4096)


def test_reach_probabilities_sum_to_one():
    table = reach_table()
    assert len(table) == 49
    assert sum(table.values()) == 1


def test_reach_probability_matches_enumeration(enumerated):
    table = reach_table()
    for coords, p in table.items():
        assert enumerated.get(coords, Fraction(0)) == p


def test_reachable_from_all_is_inner_block(enumerated):
    expected = {(x, y) for x in range(1, 6) for y in range(1, 6)}
    assert reachable_from_all() == expected
    # cross-check via per-start enumeration
    per_start = []
    for start in itertools.product((0, 1), repeat=2):
        reach = set()
        for seq in itertools.product(range(4), repeat=5):
            s = PyramidState(1, start)
            for a in seq:
                s, _, _ = pyramid_step(s, a, goal=(0, 0))
            reach.add(s.coords)
        per_start.append(reach)
    assert set.intersection(*per_start) == expected


def test_goal_choices_rank_easy_above_hard():
    table = reach_table()
    inner = reachable_from_all()
    easy, hard = GOALS["easy"], GOALS["hard"]
    assert easy in inner and hard in inner
    assert table[easy] == max(table[c] for c in inner)
    assert table[hard] == min(table[c] for c in inner)
    assert math.isclose(float(table[hard]), 36 / 4096)
