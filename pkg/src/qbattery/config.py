"""Scenario configuration: a flat ``key = value`` file, overridable from the command line.

Recognized keys (``#`` starts a comment; values as on the command line)::

    dim = 11                 # battery levels (per mode for double-mode runs; default 3 there)
    omega = 1.0              # battery frequency (first mode)
    omega2 = 1.2             # second mode frequency (double-mode)
    g = 1.0
    delta = 0.0              # omega - nu
    init = ground            # ground | trunc2:r0 | trunc3:r0,r1 | thermal:beta
    theta = 1.5707963267948966
    phi = 0.0
    cycles = 100
    tgrid = 0:2pi:401        # lo:hi:n, numbers may carry a pi suffix
    beta_grid = 0.5,1,1.5,1.65,1.7,2,3,5,10,50
    r0_grid = 0.5:1:11
    alpha_grid = 0:pi:37
    gamma = 0.0              # fixed measurement phase for landscapes
    alpha_points = 181       # qubit optimizer grid
    gamma_points = 72
    starts = 64              # qudit optimizer random starts
    gapless_threshold = 1e-3
    seed = 0
    workers = 1
    out = -                  # '-' writes to stdout
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass, field

import numpy as np

from .model import battery_init, build_multimode, build_single_mode, truncated_populations

SINGLE_MODE_DIM = 11
DOUBLE_MODE_DIM = 3


class ConfigError(ValueError):
    pass


def parse_number(text: str) -> float:
    """Float, optionally written as a multiple of pi: ``2pi``, ``0.5pi``, ``pi``, ``pi/4``."""
    s = text.strip().lower().replace("*", "")
    try:
        if "pi" in s:
            head, _, tail = s.partition("pi")
            coef = 1.0 if head in ("", "+") else (-1.0 if head == "-" else float(head))
            div = float(tail[1:]) if tail.startswith("/") else (1.0 if tail == "" else None)
            if div is None:
                raise ValueError
            return coef * math.pi / div
        return float(s)
    except ValueError:
        raise ConfigError(f"not a number: {text!r}") from None


def parse_grid(text: str) -> tuple[float, ...]:
    """``lo:hi:n`` (inclusive, n points) or a comma-separated list."""
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise ConfigError(f"grid must be lo:hi:n, got {text!r}")
        lo, hi = parse_number(parts[0]), parse_number(parts[1])
        try:
            n = int(parts[2])
        except ValueError:
            raise ConfigError(f"grid point count must be an integer, got {parts[2]!r}") from None
        if n < 1:
            raise ConfigError("grid needs at least one point")
        return tuple(float(x) for x in np.linspace(lo, hi, n))
    vals = tuple(parse_number(x) for x in text.split(",") if x.strip())
    if not vals:
        raise ConfigError("empty grid")
    return vals


def parse_init(text: str) -> tuple[str, tuple[float, ...]]:
    kind, _, rest = text.strip().partition(":")
    args = tuple(parse_number(x) for x in rest.split(",")) if rest else ()
    need = {"ground": 0, "trunc2": 1, "trunc3": 2, "thermal": 1}
    if kind not in need:
        raise ConfigError(f"unknown init {kind!r}; use ground | trunc2:r0 | trunc3:r0,r1 | thermal:beta")
    if len(args) != need[kind]:
        raise ConfigError(f"init {kind} takes {need[kind]} parameter(s), got {len(args)}")
    return kind, args


@dataclass
class ScenarioConfig:
    dim: int | None = None
    omega: float = 1.0
    omega2: float = 1.2
    g: float = 1.0
    delta: float = 0.0
    init: str = "ground"
    theta: float = math.pi / 2
    phi: float = 0.0
    cycles: int = 100
    tgrid: tuple[float, ...] = field(default_factory=lambda: parse_grid("0:2pi:401"))
    beta_grid: tuple[float, ...] = (0.5, 1.0, 1.5, 1.65, 1.7, 2.0, 3.0, 5.0, 10.0, 50.0)
    r0_grid: tuple[float, ...] = field(default_factory=lambda: parse_grid("0.5:1:11"))
    alpha_grid: tuple[float, ...] = field(default_factory=lambda: parse_grid("0:pi:37"))
    gamma: float = 0.0
    alpha_points: int = 181
    gamma_points: int = 72
    starts: int = 64
    gapless_threshold: float = 1e-3
    seed: int = 0
    workers: int = 1
    out: str = "-"

    def battery_dim(self, modes: int = 1) -> int:
        if self.dim is not None:
            return self.dim
        return SINGLE_MODE_DIM if modes == 1 else DOUBLE_MODE_DIM

    def opt_kwargs(self) -> dict:
        return {"alpha_points": self.alpha_points, "gamma_points": self.gamma_points,
                "starts": self.starts, "seed": self.seed}

    def single_mode(self):
        return build_single_mode(self.battery_dim(1), self.omega, g=self.g, delta=self.delta)

    def double_mode(self):
        return build_multimode([self.battery_dim(2)] * 2, [self.omega, self.omega2], g=self.g)

    def battery_state(self, d_b: int, omega: float | None = None) -> np.ndarray:
        kind, args = parse_init(self.init)
        omega = self.omega if omega is None else omega
        if kind == "ground":
            return battery_init("ground", d_b).rho
        if kind == "thermal":
            return battery_init("thermal", d_b, beta=args[0], omega=omega).rho
        pops = truncated_populations(*args) if kind == "trunc3" else truncated_populations(args[0])
        return battery_init("truncated", d_b, populations=pops).rho

    def validate(self) -> "ScenarioConfig":
        """Build the models and initial states once so bad physics fails at load time."""
        try:
            if self.dim is not None and self.dim < 2:
                raise ConfigError("dim must be >= 2")
            if self.cycles < 1 or self.workers < 1 or self.alpha_points < 2 or self.gamma_points < 1 or self.starts < 0:
                raise ConfigError("cycles, workers and optimizer sizes must be positive")
            if not 0.0 <= self.theta <= math.pi or not 0.0 <= self.phi < 2 * math.pi:
                raise ConfigError("theta must lie in [0, pi] and phi in [0, 2 pi)")
            if not self.gapless_threshold >= 0:
                raise ConfigError("gapless threshold must be nonnegative")
            self.single_mode()
            self.battery_state(self.battery_dim(1))
            self.double_mode()
        except ConfigError:
            raise
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
        return self


_INT_KEYS = {"dim", "cycles", "alpha_points", "gamma_points", "starts", "seed", "workers"}
_GRID_KEYS = {"tgrid", "beta_grid", "r0_grid", "alpha_grid"}
_STR_KEYS = {"init", "out"}


def coerce(key: str, value: str):
    key = key.replace("-", "_")
    if key not in {f.name for f in dataclasses.fields(ScenarioConfig)}:
        raise ConfigError(f"unknown config key {key!r}")
    if key in _STR_KEYS:
        if key == "init":
            parse_init(value)
        return value.strip()
    if key in _GRID_KEYS:
        return parse_grid(value)
    if key in _INT_KEYS:
        try:
            return int(value)
        except ValueError:
            raise ConfigError(f"{key} must be an integer, got {value!r}") from None
    return parse_number(value)


def read_config_file(path: str) -> dict:
    try:
        with open(path, encoding="utf-8") as fh:
            lines = fh.readlines()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc.strerror}") from None
    out = {}
    for lineno, raw in enumerate(lines, 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise ConfigError(f"{path}:{lineno}: expected key = value")
        key = key.strip().replace("-", "_")
        try:
            out[key] = coerce(key, value.strip())
        except ConfigError as exc:
            raise ConfigError(f"{path}:{lineno}: {exc}") from None
    return out


def load_config(path: str | None = None, overrides: dict | None = None) -> ScenarioConfig:
    """File values first, then ``overrides`` (already-typed values, ``None`` means unset)."""
    values = read_config_file(path) if path else {}
    values.update({k: v for k, v in (overrides or {}).items() if v is not None})
    return ScenarioConfig(**values).validate()
