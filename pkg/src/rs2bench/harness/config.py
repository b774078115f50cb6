"""Run configuration: flat ``key = value`` files overridden by CLI flags."""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field
from pathlib import Path

TASKS = ("cartpole", "pyramid")
METHODS = ("dqn", "dqn-rnd", "rs2", "rs2-rnd")


class ConfigError(ValueError):
    pass


# Values that differ between the two tasks; anything left as None in a
# RunConfig is filled from here by ``resolve``.
TASK_DEFAULTS = {
    "cartpole": dict(
        aleph_g=195.0,
        eps_start=1.0,
        eps_end=0.01,
        eps_mode="exponential",
        discount=0.99,
        buffer_capacity=10_000,
        hidden=(128, 128),
        rnd_layers=3,
        eval_interval=10,
        eval_episodes=10,
        bin_size=10,
        temperature=0.02,
    ),
    "pyramid": dict(
        aleph_g=1.0,
        eps_start=0.1,
        eps_end=0.1,
        eps_mode="constant",
        discount=1.0,
        buffer_capacity=100_000,
        hidden=(512,),
        rnd_layers=2,
        eval_interval=100,
        eval_episodes=100,
        bin_size=1000,
        temperature=1.0,
    ),
}


@dataclass
class RunConfig:
    task: str | None = None
    method: str = "rs2"
    episodes: int = 500
    seeds: tuple[int, ...] = (0,)
    out: str | None = None
    jobs: int = 1

    # pyramid task
    goal: str | None = None  # "easy", "hard" or explicit "x,y"
    pyramid_depth: int = 6
    pyramid_h: int = 2
    obs_dim: int = 32

    # DQN
    hidden: tuple[int, ...] | None = None
    discount: float | None = None
    buffer_capacity: int | None = None
    batch_size: int = 64
    target_sync: int = 200
    updates_per_step: int = 1
    bootstrap_truncated: bool = False
    lr: float = 2.5e-4

    # epsilon-greedy
    eps_start: float | None = None
    eps_end: float | None = None
    eps_mode: str | None = None

    # RS2
    aleph_g: float | None = None
    vg_window: int = 100
    vg_source: str = "behavior"  # or "greedy"
    centroids: int = 3
    forgetting: float = 0.9
    decay_mode: str = "step"
    temperature: float | None = None
    sat_temperature: float | None = None  # satisficed branch; None = temperature
    eps_div: float = 1e-6
    eps_ratio: float = 1e-12
    initial_mass: float = 1.0

    # RND
    rnd_coef: float = 1.0
    rnd_hidden: int = 512
    rnd_out: int = 16
    rnd_layers: int | None = None
    rnd_lr: float = 1e-3

    # evaluation / logging
    eval_interval: int | None = None
    eval_episodes: int | None = None
    eval_window: int = 100
    neighbor_radius: int = 2
    bin_size: int | None = None
    stop_threshold: float | None = None

    extra: dict = field(default_factory=dict, repr=False)

    def resolve(self) -> "RunConfig":
        """Fill task defaults and validate; returns a new config."""
        if self.task is None:
            raise ConfigError("missing required key: task")
        if self.task not in TASKS:
            raise ConfigError(f"unknown task {self.task!r}; expected one of {TASKS}")
        if self.method not in METHODS:
            raise ConfigError(f"unknown method {self.method!r}; expected one of {METHODS}")
        values = dataclasses.asdict(self)
        for key, default in TASK_DEFAULTS[self.task].items():
            if values[key] is None:
                values[key] = default
        if self.task == "pyramid" and values["goal"] is None:
            values["goal"] = "easy"
        if self.task == "cartpole" and values["goal"] is not None:
            raise ConfigError("goal placement only applies to the pyramid task")
        cfg = RunConfig(**values)
        if cfg.episodes <= 0:
            raise ConfigError("episodes must be positive")
        if not cfg.seeds:
            raise ConfigError("seeds must be non-empty")
        if cfg.aleph_g == 0:
            raise ConfigError("aleph_g must be non-zero")
        if cfg.eps_mode not in ("exponential", "constant"):
            raise ConfigError(f"unknown eps_mode {cfg.eps_mode!r}")
        if cfg.decay_mode not in ("step", "episode"):
            raise ConfigError(f"unknown decay_mode {cfg.decay_mode!r}")
        if cfg.vg_source not in ("behavior", "greedy"):
            raise ConfigError(f"unknown vg_source {cfg.vg_source!r}")
        if cfg.rnd_layers < 2:
            raise ConfigError("rnd_layers must be >= 2")
        if cfg.eval_interval < 0 or cfg.eval_episodes < 0:
            raise ConfigError("eval_interval and eval_episodes must be >= 0")
        if cfg.task == "pyramid":
            cfg.goal_coords()  # validates
        return cfg

    @property
    def uses_rnd(self) -> bool:
        return self.method.endswith("-rnd")

    @property
    def uses_rs2(self) -> bool:
        return self.method.startswith("rs2")

    def goal_coords(self) -> tuple[int, ...]:
        from rs2bench.envs import GOALS

        if self.goal in GOALS:
            coords = GOALS[self.goal]
        else:
            try:
                coords = tuple(int(v) for v in str(self.goal).split(","))
            except ValueError:
                raise ConfigError(f"bad goal {self.goal!r}; use easy, hard or x,y") from None
        if len(coords) != self.pyramid_h or any(
            not 0 <= c <= self.pyramid_depth for c in coords
        ):
            raise ConfigError(f"goal {coords} is not a terminal pyramid state")
        return coords

    def to_text(self) -> str:
        lines = []
        for f in dataclasses.fields(self):
            if f.name == "extra":
                continue
            v = getattr(self, f.name)
            if v is None:
                continue
            if isinstance(v, tuple):
                v = ",".join(str(x) for x in v)
            lines.append(f"{f.name} = {v}")
        return "\n".join(lines) + "\n"


def _parse_int_tuple(text: str) -> tuple[int, ...]:
    return tuple(int(v) for v in str(text).replace(" ", "").split(",") if v)


def _parse_bool(text: str) -> bool:
    t = str(text).strip().lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off"):
        return False
    raise ValueError(text)


def _converter(name: str):
    if name in ("seeds", "hidden"):
        return _parse_int_tuple
    if name in ("task", "method", "out", "goal", "eps_mode", "decay_mode", "vg_source"):
        return str
    if name == "bootstrap_truncated":
        return _parse_bool
    default = {f.name: f for f in dataclasses.fields(RunConfig)}[name].type
    if "int" in default and "float" not in default:
        return int
    return float


_KEYS = {f.name for f in dataclasses.fields(RunConfig)} - {"extra"}


def parse_text(text: str) -> dict:
    """Parse ``key = value`` lines; ``#`` starts a comment."""
    values = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected key = value, got {raw!r}")
        key, value = (s.strip() for s in line.split("=", 1))
        values[key.replace("-", "_")] = value
    return values


def parse_config(path: str | Path | None = None, overrides: dict | None = None) -> RunConfig:
    """Build a validated RunConfig from an optional file plus overrides (overrides win)."""
    raw: dict = {}
    if path is not None:
        raw.update(parse_text(Path(path).read_text()))
    for key, value in (overrides or {}).items():
        if value is not None:
            raw[key.replace("-", "_")] = value
    unknown = sorted(set(raw) - _KEYS)
    if unknown:
        raise ConfigError(f"unknown config keys: {', '.join(unknown)}")
    kwargs = {}
    for key, value in raw.items():
        if isinstance(value, str):
            if value.lower() in ("none", ""):
                continue
            try:
                value = _converter(key)(value)
            except ValueError as exc:
                raise ConfigError(f"bad value for {key}: {value!r}") from exc
        elif isinstance(value, list):
            value = tuple(value)
        kwargs[key] = value
    return RunConfig(**kwargs).resolve()
