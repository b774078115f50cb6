"""Satisficing action values, reliability estimation and aspiration control."""

from __future__ import annotations

from collections import deque

import numpy as np

EPS_DIV = 1e-6
# Floor on rho_hat in the SRS scale ratio. Kept far below EPS_DIV: an action
# whose rho_hat falls under the floor can score below zero by up to rho(a).
EPS_RATIO = 1e-12


def softmax(x) -> np.ndarray:
    x = np.asarray(x, dtype=np.float64)
    e = np.exp(x - x.max())
    return e / e.sum()


def rs_values(counts, means, aleph) -> np.ndarray:
    """Bandit-form RS value: (n(a) / N) * (E(a) - aleph)."""
    counts = np.asarray(counts, dtype=np.float64)
    means = np.asarray(means, dtype=np.float64)
    total = counts.sum()
    if total <= 0:
        raise ValueError("rs_values needs at least one recorded selection")
    return counts / total * (means - aleph)


class ReliabilityEstimator:
    """Similarity-weighted, decaying action-selection counts in latent space.

    Each action owns ``k`` centroids. A latent vector z is compared to every
    centroid; the summed inverse distances scale the decayed count of each
    action and a softmax over the result gives the reliability vector.
    """

    def __init__(
        self,
        n_actions: int,
        dim: int,
        rng: np.random.Generator,
        k: int = 3,
        forgetting: float = 0.9,
        eps: float = EPS_DIV,
        initial_mass: float = 1.0,
    ):
        c = rng.standard_normal((n_actions, k, dim))
        c /= np.linalg.norm(c, axis=-1, keepdims=True)
        self.centroids = c
        self.counts = np.zeros(n_actions)
        self.mass = np.full((n_actions, k), float(initial_mass))
        self.k = k
        self.forgetting = forgetting
        self.eps = eps

    @property
    def n_actions(self) -> int:
        return self.centroids.shape[0]

    def similarity(self, z) -> np.ndarray:
        """w(a, k) = 1 / (||z - c(a, k)|| + eps), shape (n_actions, k)."""
        d = np.linalg.norm(self.centroids - np.asarray(z, dtype=np.float64), axis=-1)
        return 1.0 / (d + self.eps)

    def adjusted_counts(self, z, w=None) -> np.ndarray:
        if w is None:
            w = self.similarity(z)
        return self.counts / self.k * w.sum(axis=1)

    def reliability(self, z, w=None) -> np.ndarray:
        return softmax(self.adjusted_counts(z, w))

    def update(self, z, action: int, w=None, decay: bool = True) -> None:
        """Count the selection, pull the action's centroids toward z, then decay."""
        if not 0 <= action < self.n_actions:
            raise IndexError(f"action {action} out of range")
        z = np.asarray(z, dtype=np.float64)
        if w is None:
            w = self.similarity(z)
        self.counts[action] += 1.0
        wa = w[action][:, None]
        ma = self.mass[action][:, None]
        self.centroids[action] = (ma * self.centroids[action] + wa * z) / (ma + wa)
        self.mass[action] += w[action]
        if decay:
            self.decay()

    def decay(self) -> None:
        self.counts *= self.forgetting
        self.mass *= self.forgetting


def aspiration_beta(aleph_g: float, v_g: float) -> float:
    if aleph_g == 0:
        raise ZeroDivisionError("global aspiration must be non-zero")
    return min(max((aleph_g - v_g) / aleph_g, 0.0), 1.0)


def aspiration(aleph_g: float, v_g: float, q_values) -> tuple[float, float]:
    """Per-state aspiration and the exploration weight beta.

    aleph(s) = beta * aleph_g + (1 - beta) * max_a Q(s, a)
    """
    beta = aspiration_beta(aleph_g, v_g)
    return beta * aleph_g + (1.0 - beta) * float(np.max(q_values)), beta


class AspirationController:
    """Tracks V_G, the mean of the last ``window`` episode returns (0 when empty)."""

    def __init__(self, aleph_g: float, window: int = 100):
        if aleph_g == 0:
            raise ZeroDivisionError("global aspiration must be non-zero")
        if window <= 0:
            raise ValueError("window must be positive")
        self.aleph_g = float(aleph_g)
        self.window = window
        self.returns: deque[float] = deque(maxlen=window)
        self._v_g = 0.0

    @property
    def v_g(self) -> float:
        return self._v_g

    def record(self, episode_return: float) -> None:
        self.returns.append(float(episode_return))
        self._v_g = sum(self.returns) / len(self.returns)

    def beta(self) -> float:
        return aspiration_beta(self.aleph_g, self.v_g)

    def aspiration(self, q_values) -> tuple[float, float]:
        return aspiration(self.aleph_g, self.v_g, q_values)


def satisficed(q_values, aleph_s: float) -> bool:
    return bool(np.max(q_values) >= aleph_s)


def rs2_values(q_values, rho, aleph_s: float) -> np.ndarray:
    return np.asarray(rho) * (np.asarray(q_values, dtype=np.float64) - aleph_s)


def srs_values(q_values, rho, aleph_s: float, eps: float = EPS_RATIO) -> np.ndarray:
    """Stochastic RS scores for a state where no action meets the aspiration.

    The shortfall reciprocals 1/delta(a) normalise into a target distribution
    rho_hat; each action scores b * rho_hat(a) - rho(a), where b is the
    smallest scale at which b * rho_hat dominates rho.
    """
    rho = np.asarray(rho, dtype=np.float64)
    delta = aleph_s - np.asarray(q_values, dtype=np.float64)
    if np.any(delta <= 0):
        raise ValueError(f"srs_values needs every Q below the aspiration, got delta={delta}")
    inv = 1.0 / delta
    rho_hat = inv / inv.sum()
    # eps floors rho_hat instead of being added to it, so the b-attaining
    # action scores exactly zero whenever rho_hat >= eps
    b = np.max(rho / np.maximum(rho_hat, eps))
    return b * rho_hat - rho


def srs_target(q_values, aleph_s: float) -> np.ndarray:
    """rho_hat alone, for inspection and tests."""
    inv = 1.0 / (aleph_s - np.asarray(q_values, dtype=np.float64))
    return inv / inv.sum()


def select_action(values, rng: np.random.Generator, temperature: float = 1.0) -> int:
    """Sample from softmax(values / temperature)."""
    p = softmax(np.asarray(values, dtype=np.float64) / temperature)
    cdf = np.cumsum(p)
    idx = int(np.searchsorted(cdf, rng.random() * cdf[-1], side="right"))
    return min(idx, len(p) - 1)
