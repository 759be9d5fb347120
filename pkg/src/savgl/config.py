"""Run configuration and initial conditions.

A run is described by one JSON object; unknown keys anywhere are rejected::

    {
      "model":  {"kind": "ac", "epsilon": 0.1, "c0": 1.0, "ctilde0": 0.0},
      "grid":   {"n": 64, "length": 6.283185307179586},
      "scheme": {"family": "sav", "alpha0": 0.3333, "beta0": 0.0, "beta2": 0.6667},
      "time":   {"tau": 1.0, "steps": 200},
      "ic":     {"kind": "random", "seed": 7, "amplitude": 0.05, "offset": 0.0},
      "dealias": true,
      "psi_estimate": 2.7,
      "output": {"directory": "run", "snapshot_every": 0, "energy_every": 1,
                 "binary": false}
    }

Only ``model.kind``, ``model.epsilon``, ``grid.n``, ``scheme``'s three
coefficients (or ``scheme.preset``) and ``time`` are required.

Random initial data use numpy's PCG64 generator (``default_rng(seed)``):
``u = offset + amplitude * (2 rand - 1)``.
"""
from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field
from typing import Optional

import numpy as np

from .exceptions import ConfigError
from .gltd import GLTDParams, derive, resolve
from .models import ModelKind, build_model
from .spectral import SpectralGrid
from .steppers import Family

IC_KINDS = ("random", "product_sine", "polycrystal", "constant")

POLYCRYSTAL_RECTANGLES = (
    ((130.0, 170.0), (130.0, 170.0)),
    ((230.0, 270.0), (130.0, 170.0)),
    ((180.0, 220.0), (230.0, 270.0)),
)
POLYCRYSTAL_THETA = 0.66


@dataclass
class ModelSection:
    kind: str
    epsilon: float
    c0: Optional[float] = None
    ctilde0: float = 0.0


@dataclass
class GridSection:
    n: int
    length: float = 2.0 * math.pi


@dataclass
class SchemeSection:
    family: str = "sav"
    alpha0: Optional[float] = None
    beta0: Optional[float] = None
    beta2: Optional[float] = None
    preset: Optional[str] = None


@dataclass
class TimeSection:
    tau: float
    steps: int


@dataclass
class IcSpec:
    kind: str = "random"
    seed: int = 0
    amplitude: float = 0.05
    offset: float = 0.0
    theta: float = POLYCRYSTAL_THETA
    rectangles: Optional[list] = None


@dataclass
class OutputSection:
    directory: str = "run"
    snapshot_every: int = 0
    energy_every: int = 1
    binary: bool = False


@dataclass
class RunConfig:
    model: ModelSection
    grid: GridSection
    scheme: SchemeSection
    time: TimeSection
    ic: IcSpec = field(default_factory=IcSpec)
    dealias: bool = True
    psi_estimate: Optional[float] = None
    output: OutputSection = field(default_factory=OutputSection)

    def params(self):
        s = self.scheme
        if s.preset is not None:
            return resolve(s.preset)
        return derive(s.alpha0, s.beta0, s.beta2)

    @property
    def family(self):
        return Family.parse(self.scheme.family)

    def build_grid(self):
        return SpectralGrid(self.grid.n, self.grid.length)

    def build_model(self, grid=None):
        m = self.model
        return build_model(m.kind, m.epsilon, grid or self.build_grid(), m.c0,
                           m.ctilde0, self.dealias)

    def to_dict(self):
        return asdict(self)


_SECTIONS = {
    "model": ModelSection,
    "grid": GridSection,
    "scheme": SchemeSection,
    "time": TimeSection,
    "ic": IcSpec,
    "output": OutputSection,
}


def _section(cls, name, raw):
    if not isinstance(raw, dict):
        raise ConfigError(f"section {name!r} must be an object")
    known = set(cls.__dataclass_fields__)
    extra = sorted(set(raw) - known)
    if extra:
        raise ConfigError(f"unknown key(s) in {name!r}: {', '.join(extra)}")
    try:
        return cls(**raw)
    except TypeError as exc:
        raise ConfigError(f"section {name!r}: {exc}") from None


def _number(value, what, integer=False):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{what} must be a number, got {value!r}")
    if integer and (not float(value).is_integer()):
        raise ConfigError(f"{what} must be an integer, got {value!r}")
    if not math.isfinite(value):
        raise ConfigError(f"{what} must be finite")
    return int(value) if integer else float(value)


def config_from_dict(raw):
    """Validate a parsed JSON object and return a :class:`RunConfig`."""
    if not isinstance(raw, dict):
        raise ConfigError("config must be a JSON object")
    top = set(RunConfig.__dataclass_fields__)
    extra = sorted(set(raw) - top)
    if extra:
        raise ConfigError(f"unknown top-level key(s): {', '.join(extra)}")
    for req in ("model", "grid", "scheme", "time"):
        if req not in raw:
            raise ConfigError(f"missing section {req!r}")
    parts = {k: _section(cls, k, raw[k]) for k, cls in _SECTIONS.items() if k in raw}
    cfg = RunConfig(dealias=raw.get("dealias", True), psi_estimate=raw.get("psi_estimate"), **parts)
    validate(cfg)
    return cfg


def validate(cfg):
    m, g, s, t, ic, out = cfg.model, cfg.grid, cfg.scheme, cfg.time, cfg.ic, cfg.output
    ModelKind.parse(m.kind)
    m.epsilon = _number(m.epsilon, "model.epsilon")
    if m.c0 is not None:
        m.c0 = _number(m.c0, "model.c0")
    m.ctilde0 = _number(m.ctilde0, "model.ctilde0")
    g.n = _number(g.n, "grid.n", integer=True)
    if g.n < 8 or g.n % 2:
        raise ConfigError(f"grid.n must be even and >= 8, got {g.n}")
    g.length = _number(g.length, "grid.length")
    if g.length <= 0.0:
        raise ConfigError("grid.length must be positive")
    Family.parse(s.family)
    coeffs = (s.alpha0, s.beta0, s.beta2)
    if s.preset is None:
        if any(c is None for c in coeffs):
            raise ConfigError("scheme needs alpha0, beta0, beta2 or a preset")
        s.alpha0, s.beta0, s.beta2 = (_number(c, f"scheme.{k}")
                                      for c, k in zip(coeffs, ("alpha0", "beta0", "beta2")))
    elif any(c is not None for c in coeffs):
        raise ConfigError("give either scheme.preset or the three coefficients, not both")
    t.tau = _number(t.tau, "time.tau")
    t.steps = _number(t.steps, "time.steps", integer=True)
    if t.tau <= 0.0:
        raise ConfigError("time.tau must be positive")
    if t.steps < 1:
        raise ConfigError("time.steps must be >= 1")
    if ic.kind not in IC_KINDS:
        raise ConfigError(f"ic.kind must be one of {IC_KINDS}, got {ic.kind!r}")
    ic.seed = _number(ic.seed, "ic.seed", integer=True)
    ic.amplitude = _number(ic.amplitude, "ic.amplitude")
    ic.offset = _number(ic.offset, "ic.offset")
    ic.theta = _number(ic.theta, "ic.theta")
    if ic.rectangles is not None:
        _check_rectangles(ic.rectangles, g.length)
    elif ic.kind == "polycrystal":
        _check_rectangles(POLYCRYSTAL_RECTANGLES, g.length)
    if not isinstance(cfg.dealias, bool):
        raise ConfigError("dealias must be true or false")
    if cfg.psi_estimate is not None:
        cfg.psi_estimate = _number(cfg.psi_estimate, "psi_estimate")
        if cfg.psi_estimate < 0.0:
            raise ConfigError("psi_estimate must be non-negative")
    out.snapshot_every = _number(out.snapshot_every, "output.snapshot_every", integer=True)
    out.energy_every = _number(out.energy_every, "output.energy_every", integer=True)
    if out.snapshot_every < 0 or out.energy_every < 1:
        raise ConfigError("output.snapshot_every must be >= 0 and energy_every >= 1")
    if not isinstance(out.binary, bool):
        raise ConfigError("output.binary must be true or false")
    # surfaces DegenerateParams, BadEpsilon and BadShift early
    cfg.params()
    cfg.build_model()
    return cfg


def _check_rectangles(rects, length):
    if len(rects) != 3:
        raise ConfigError("polycrystal needs exactly three rectangles")
    for (x0, x1), (y0, y1) in rects:
        if not (0.0 <= x0 < x1 <= length and 0.0 <= y0 < y1 <= length):
            raise ConfigError(f"rectangle {[[x0, x1], [y0, y1]]} is not inside [0, {length}]^2")


def load_config(path):
    with open(path) as fh:
        try:
            raw = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path}: invalid JSON ({exc})") from None
    return config_from_dict(raw)


# -- initial conditions --------------------------------------------------------

def _polycrystal(x, y, ic, rects):
    phi0, amp, th = ic.offset, ic.amplitude, ic.theta
    u = np.full(x.shape, phi0)
    r6, r2, r3 = math.sqrt(6.0), math.sqrt(2.0), math.sqrt(3.0)
    grains = (
        lambda x, y: np.cos(r6 * th / 6 * (y - x)) * np.cos(r2 * th / 2 * (x + y))
        - 0.5 * np.cos(r6 * th / 3 * (y - x)),
        lambda x, y: np.cos(r6 * th / 6 * (x + y)) * np.cos(r2 * th / 2 * (y - x))
        - 0.5 * np.cos(r6 * th / 3 * (x + y)),
        lambda x, y: np.cos(th / r3 * x) * np.cos(th * y) - 0.5 * np.cos(2 * th / r3 * x),
    )
    for ((x0, x1), (y0, y1)), f in zip(rects, grains):
        inside = (x >= x0) & (x <= x1) & (y >= y0) & (y <= y1)
        u[inside] = phi0 + amp * f(x[inside], y[inside])
    return u


def initial_condition(ic, grid):
    """Sample the initial field on ``grid``.

    ``product_sine`` is ``offset + amplitude sin(2 pi x/L) sin(2 pi y/L)``;
    ``polycrystal`` uses ``offset`` as the liquid density and ``amplitude`` as
    the grain amplitude (0.285 and 0.446 in the classic setup).
    """
    x, y = grid.points()
    if ic.kind == "random":
        rng = np.random.default_rng(ic.seed)
        return ic.offset + ic.amplitude * (2.0 * rng.random(grid.shape) - 1.0)
    if ic.kind == "product_sine":
        w = grid.factor
        return ic.offset + ic.amplitude * np.sin(w * x) * np.sin(w * y)
    if ic.kind == "constant":
        return np.full(grid.shape, float(ic.offset))
    if ic.kind == "polycrystal":
        rects = ic.rectangles if ic.rectangles is not None else POLYCRYSTAL_RECTANGLES
        return _polycrystal(x, y, ic, rects)
    raise ConfigError(f"unknown ic.kind {ic.kind!r}")
