"""Satisficing exploration (RS2) for DQN, with epsilon-greedy and RND baselines."""

__version__ = "0.1.0"
