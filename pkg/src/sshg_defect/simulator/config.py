"""Plain-text ``key = value`` configuration for simulation runs."""
from __future__ import annotations

import math
from dataclasses import dataclass, field, fields


class ConfigError(ValueError):
    pass


IC_KINDS = {
    "zero": {},
    "gaussian": {"amplitude": 0.0, "width": 1.0, "center": -10.0, "velocity": 0.0},
    "packet": {"k": 2.0, "amplitude": 1e-3, "width": 5.0, "center": -20.0},
    "constant": {"amplitude": 0.0},
}


@dataclass
class InitialCondition:
    kind: str = "zero"
    params: dict = field(default_factory=dict)

    def get(self, key: str) -> float:
        return self.params.get(key, IC_KINDS[self.kind][key])


@dataclass
class SimConfig:
    L: float = 40.0
    dx: float = 0.01
    dt: float = 0.004
    m: float = 1.0
    sigma1: float = 1.5
    sigma2: float = 0.7
    t_end: float = 1.0
    ic: InitialCondition = field(default_factory=InitialCondition)
    output_every: int = 100
    sector: str = "phi"
    boundary: str = "defect"
    constraint_damping: float = 10.0

    @property
    def n_half(self) -> int:
        """Number of grid intervals on each half-line."""
        return int(round(self.L / self.dx))

    def validate(self) -> None:
        for name in ("L", "dx", "dt", "m", "sigma1", "sigma2"):
            v = getattr(self, name)
            if not (v > 0 and math.isfinite(v)):
                raise ConfigError(f"{name} must be a positive finite number, got {v}")
        if self.t_end < 0:
            raise ConfigError("t_end must be non-negative")
        if self.dt > 0.5 * self.dx:
            raise ConfigError(f"CFL guard violated: dt={self.dt} > dx/2={0.5 * self.dx}")
        if abs(self.n_half * self.dx - self.L) > 1e-9 * self.L:
            raise ConfigError("L must be an integer multiple of dx so x=0 is a grid node")
        if self.n_half < 3:
            raise ConfigError("each half-line needs at least three intervals")
        if self.constraint_damping < 0 or self.constraint_damping * self.dt > 0.5:
            raise ConfigError("constraint_damping must lie in [0, 0.5/dt]")
        if self.output_every < 1:
            raise ConfigError("output_every must be >= 1")
        if self.sector not in ("phi", "varphi", "both"):
            raise ConfigError(f"sector must be phi, varphi or both, got {self.sector!r}")
        if self.boundary not in ("defect", "periodic"):
            raise ConfigError(f"boundary must be defect or periodic, got {self.boundary!r}")
        if self.ic.kind in ("gaussian", "packet") and self.ic.get("center") >= 0:
            raise ConfigError("initial data must be centred on the left half-line (center < 0)")
        if self.ic.kind == "packet" and self.ic.get("k") <= 0:
            raise ConfigError("packet wavenumber k must be positive")


_FLOAT_KEYS = {"L", "dx", "dt", "m", "sigma1", "sigma2", "t_end", "constraint_damping"}
_ALIASES = {"σ₁": "sigma1", "σ₂": "sigma2", "s1": "sigma1", "s2": "sigma2"}


def parse_ic(text: str, lineno: int = 0) -> InitialCondition:
    """``kind key=value ...``, e.g. ``packet k=2 amplitude=1e-3 width=5 center=-20``."""
    parts = text.split()
    if not parts:
        raise ConfigError(f"line {lineno}: empty initial-condition spec")
    kind, rest = parts[0], parts[1:]
    if kind not in IC_KINDS:
        raise ConfigError(f"line {lineno}: unknown initial condition {kind!r}")
    params = {}
    for item in rest:
        if "=" not in item:
            raise ConfigError(f"line {lineno}: expected key=value in ic spec, got {item!r}")
        k, v = item.split("=", 1)
        if k not in IC_KINDS[kind]:
            raise ConfigError(f"line {lineno}: unknown {kind} parameter {k!r}")
        try:
            params[k] = float(v)
        except ValueError:
            raise ConfigError(f"line {lineno}: {k} must be a number, got {v!r}") from None
    return InitialCondition(kind, params)


def parse_config(text: str) -> SimConfig:
    cfg = SimConfig()
    known = {f.name for f in fields(SimConfig)}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected key = value, got {raw.strip()!r}")
        key, value = (s.strip() for s in line.split("=", 1))
        key = _ALIASES.get(key, key)
        if key not in known:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        if key == "ic":
            cfg.ic = parse_ic(value, lineno)
            continue
        try:
            if key in _FLOAT_KEYS:
                setattr(cfg, key, float(value))
            elif key == "output_every":
                setattr(cfg, key, int(value))
            else:
                setattr(cfg, key, value)
        except ValueError:
            raise ConfigError(f"line {lineno}: bad value for {key}: {value!r}") from None
    cfg.validate()
    return cfg


def load_config(path) -> SimConfig:
    with open(path, encoding="utf-8") as fh:
        return parse_config(fh.read())
