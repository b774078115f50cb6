from rs2bench.harness.config import ConfigError, RunConfig, parse_config
from rs2bench.harness.metrics import (
    EpisodeMetrics,
    aggregate,
    classify_terminal,
    first_episode_reaching,
    greedy_window_average,
    read_csv,
    visitation_bins,
    write_csv,
)
from rs2bench.harness.runner import RunResult, iter_run, run_all, run_one

__all__ = [
    "ConfigError",
    "EpisodeMetrics",
    "RunConfig",
    "RunResult",
    "aggregate",
    "classify_terminal",
    "first_episode_reaching",
    "greedy_window_average",
    "iter_run",
    "parse_config",
    "read_csv",
    "run_all",
    "run_one",
    "visitation_bins",
    "write_csv",
]
