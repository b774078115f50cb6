"""Per-episode metrics, terminal-state grouping, aggregation and CSV I/O."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

GROUPS = ("reward", "neighbor", "distant")
COLUMNS = (
    "episode",
    "behavior_return",
    "eval_return",
    "beta",
    "visits_reward",
    "visits_neighbor",
    "visits_distant",
)


@dataclass
class EpisodeMetrics:
    episode: int
    behavior_return: float
    eval_return: float | None = None
    beta: float | None = None
    group: str | None = None  # terminal-state group, pyramid only

    def visits(self) -> tuple[int, int, int]:
        return tuple(int(self.group == g) for g in GROUPS)  # type: ignore[return-value]


def classify_terminal(goal, terminal, radius: int = 2) -> str:
    """reward if equal, neighbor within Chebyshev ``radius``, distant otherwise."""
    dist = max(abs(int(g) - int(t)) for g, t in zip(goal, terminal))
    if dist == 0:
        return "reward"
    return "neighbor" if dist <= radius else "distant"


@dataclass
class VisitationBin:
    start: int
    episodes: int
    reward: int
    neighbor: int
    distant: int


def visitation_bins(metrics: list[EpisodeMetrics], bin_size: int = 1000) -> list[VisitationBin]:
    bins = []
    for lo in range(0, len(metrics), bin_size):
        chunk = metrics[lo : lo + bin_size]
        counts = np.sum([m.visits() for m in chunk], axis=0)
        bins.append(VisitationBin(chunk[0].episode, len(chunk), *(int(c) for c in counts)))
    return bins


def greedy_window_average(
    metrics: list[EpisodeMetrics], eval_episodes: int, window: int = 100
) -> list[tuple[int, float]]:
    """Rolling mean of the last ``window`` greedy episodes, at each evaluation.

    Each evaluation averages ``eval_episodes`` greedy episodes, so the window
    spans ceil(window / eval_episodes) evaluations. Evaluations before the
    window fills are skipped.
    """
    span = max(1, math.ceil(window / max(eval_episodes, 1)))
    evals = [(m.episode, m.eval_return) for m in metrics if m.eval_return is not None]
    out = []
    for i in range(span - 1, len(evals)):
        out.append((evals[i][0], float(np.mean([r for _, r in evals[i - span + 1 : i + 1]]))))
    return out


def first_episode_reaching(averages: list[tuple[int, float]], threshold: float) -> int | None:
    """Training episodes completed when the rolling average first meets ``threshold``."""
    for episode, avg in averages:
        if avg >= threshold:
            return episode + 1
    return None


def _bin_series(metrics: list[EpisodeMetrics], bin_size: int) -> dict[str, np.ndarray]:
    n_bins = math.ceil(len(metrics) / bin_size)
    out = {c: np.full(n_bins, np.nan) for c in COLUMNS}
    for b in range(n_bins):
        chunk = metrics[b * bin_size : (b + 1) * bin_size]
        out["episode"][b] = chunk[0].episode
        out["behavior_return"][b] = np.mean([m.behavior_return for m in chunk])
        evals = [m.eval_return for m in chunk if m.eval_return is not None]
        if evals:
            out["eval_return"][b] = np.mean(evals)
        betas = [m.beta for m in chunk if m.beta is not None]
        if betas:
            out["beta"][b] = np.mean(betas)
        visits = np.sum([m.visits() for m in chunk], axis=0)
        for g, v in zip(GROUPS, visits):
            out[f"visits_{g}"][b] = v
    return out


def aggregate(runs: list[list[EpisodeMetrics]], bin_size: int = 1) -> list[dict]:
    """Pointwise mean and population std across runs, after per-run binning.

    Within a bin returns/beta are averaged and visit counts summed.
    """
    if not runs:
        raise ValueError("aggregate needs at least one run")
    lengths = {len(r) for r in runs}
    if len(lengths) != 1:
        raise ValueError(f"runs have misaligned lengths: {sorted(lengths)}")
    series = [_bin_series(r, bin_size) for r in runs]
    n_bins = len(series[0]["episode"])
    rows = []
    for b in range(n_bins):
        row = {"episode": int(series[0]["episode"][b])}
        for col in COLUMNS[1:]:
            vals = np.array([s[col][b] for s in series])
            vals = vals[~np.isnan(vals)]
            row[f"{col}_mean"] = float(np.mean(vals)) if vals.size else None
            row[f"{col}_std"] = float(np.std(vals)) if vals.size else None
        rows.append(row)
    return rows


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return repr(float(v))


def write_csv(metrics: list[EpisodeMetrics], path) -> Path:
    path = Path(path)
    with path.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(COLUMNS)
        for m in metrics:
            w.writerow(
                [_fmt(m.episode), _fmt(m.behavior_return), _fmt(m.eval_return), _fmt(m.beta)]
                + [str(v) for v in m.visits()]
            )
    return path


def read_csv(path) -> list[EpisodeMetrics]:
    out = []
    with Path(path).open(newline="") as fh:
        reader = csv.DictReader(fh)
        for row in reader:
            group = None
            for g in GROUPS:
                if row[f"visits_{g}"] == "1":
                    group = g
            out.append(
                EpisodeMetrics(
                    episode=int(row["episode"]),
                    behavior_return=float(row["behavior_return"]),
                    eval_return=float(row["eval_return"]) if row["eval_return"] else None,
                    beta=float(row["beta"]) if row["beta"] else None,
                    group=group,
                )
            )
    return out


def write_aggregate_csv(rows: list[dict], path) -> Path:
    path = Path(path)
    header = ["episode"] + [f"{c}_{s}" for c in COLUMNS[1:] for s in ("mean", "std")]
    with path.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([_fmt(row[h]) for h in header])
    return path
