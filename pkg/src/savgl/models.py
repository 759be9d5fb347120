"""Gradient-flow models ``u_t = G mu``, ``mu = L u + V(u)``, ``V = dE1/du``.

Each model supplies the diagonal symbols of the positive operator ``L`` and
the non-positive operator ``G`` together with the nonlinear energy ``E1``.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from . import spectral
from .exceptions import BadEpsilon, BadShift, ConfigError, NonpositiveRadicand
from .spectral import SpectralGrid


class ModelKind(enum.Enum):
    ALLEN_CAHN = "ac"
    CAHN_HILLIARD = "ch"
    PFC = "pfc"

    @classmethod
    def parse(cls, value):
        if isinstance(value, cls):
            return value
        key = str(value).strip().lower().replace("-", "_")
        aliases = {
            "ac": cls.ALLEN_CAHN, "allen_cahn": cls.ALLEN_CAHN, "allencahn": cls.ALLEN_CAHN,
            "ch": cls.CAHN_HILLIARD, "cahn_hilliard": cls.CAHN_HILLIARD,
            "cahnhilliard": cls.CAHN_HILLIARD,
            "pfc": cls.PFC, "phase_field_crystal": cls.PFC,
        }
        try:
            return aliases[key]
        except KeyError:
            raise ConfigError(f"unknown model kind {value!r}") from None


def default_c0(kind, grid):
    """SAV shift: 1 for the double-well models, ``100 |Omega|`` for PFC."""
    return 100.0 * grid.area if kind is ModelKind.PFC else 1.0


@dataclass(frozen=True)
class ModelSpec:
    kind: ModelKind
    epsilon: float
    grid: SpectralGrid
    c0: float
    ctilde0: float = 0.0
    dealias: bool = True
    l_symbol: np.ndarray = field(init=False, repr=False, compare=False)
    g_symbol: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        lap = self.grid.laplacian()
        if self.kind is ModelKind.PFC:
            l_sym, g_sym = lap * lap, lap
        elif self.kind is ModelKind.CAHN_HILLIARD:
            l_sym, g_sym = -self.epsilon ** 2 * lap, lap
        else:
            l_sym, g_sym = -self.epsilon ** 2 * lap, -np.ones(self.grid.shape)
        l_sym.setflags(write=False)
        g_sym.setflags(write=False)
        object.__setattr__(self, "l_symbol", l_sym)
        object.__setattr__(self, "g_symbol", g_sym)

    @property
    def conserves_mass(self):
        return self.kind is not ModelKind.ALLEN_CAHN


def build_model(kind, epsilon, grid, c0=None, ctilde0=0.0, dealias=True):
    """Construct a model on ``grid``.

    Parameters
    ----------
    kind : ModelKind or str
        ``"ac"``, ``"ch"`` or ``"pfc"``.
    epsilon : float
        Interface width (``0 < eps < 1``) or the PFC undercooling (``> 0``).
    c0 : float, optional
        SAV shift, must be positive; defaults to :func:`default_c0`.
    ctilde0 : float
        Shift of the original energy used by G-SAV.
    """
    kind = ModelKind.parse(kind)
    epsilon = float(epsilon)
    if not math.isfinite(epsilon) or epsilon <= 0.0:
        raise BadEpsilon(f"epsilon must be positive, got {epsilon}")
    if kind is not ModelKind.PFC and epsilon >= 1.0:
        raise BadEpsilon(f"epsilon must lie in (0, 1) for {kind.value}, got {epsilon}")
    if c0 is None:
        c0 = default_c0(kind, grid)
    c0 = float(c0)
    if not (c0 > 0.0 and math.isfinite(c0)):
        raise BadShift(f"c0 must be positive, got {c0}")
    ctilde0 = float(ctilde0)
    if not math.isfinite(ctilde0):
        raise BadShift(f"ctilde0 must be finite, got {ctilde0}")
    return ModelSpec(kind, epsilon, grid, c0, ctilde0, bool(dealias))


def inner(m, f, g):
    return m.grid.inner(f, g)


def apply_l(m, u):
    return spectral.apply_real(m.l_symbol, u)


def apply_g(m, u):
    return spectral.apply_real(m.g_symbol, u)


def quadratic_energy(m, u, v=None):
    """``(L u, v) / 2`` (``v`` defaults to ``u``)."""
    return 0.5 * inner(m, apply_l(m, u), u if v is None else v)


def e1(m, u):
    """Nonlinear energy by collocation quadrature."""
    u = np.asarray(u, dtype=float)
    if m.kind is ModelKind.PFC:
        # int |grad u|^2 = (-Lap u, u)
        grad_sq = -inner(m, spectral.apply_real(m.grid.laplacian(), u), u)
        local = 0.25 * u ** 4 + 0.5 * (1.0 - m.epsilon) * u ** 2
        return m.grid.cell_area * float(np.sum(local)) - grad_sq
    return m.grid.cell_area * float(np.sum(0.25 * (u * u - 1.0) ** 2))


def original_energy(m, u):
    return quadratic_energy(m, u) + e1(m, u)


def shifted_energy(m, u):
    return original_energy(m, u) + m.ctilde0


def variational_derivative_e1(m, u):
    """``V(u)``: ``u^3 - u`` or ``u^3 + (1-eps) u + 2 Lap u`` (PFC)."""
    u = np.asarray(u, dtype=float)
    cubed = spectral.cube(u, m.dealias)
    if m.kind is ModelKind.PFC:
        return cubed + (1.0 - m.epsilon) * u + 2.0 * spectral.apply_real(m.grid.laplacian(), u)
    return cubed - u


def chemical_potential(m, u):
    return apply_l(m, u) + variational_derivative_e1(m, u)


def sav_radicand(m, u):
    return e1(m, u) + m.c0


def w_of(m, u, step=None):
    """Return ``(V(u)/sqrt(E1(u)+C0), sqrt(E1(u)+C0))``."""
    rad = sav_radicand(m, u)
    if not rad > 0.0:
        raise NonpositiveRadicand(f"E1(u) + C0 = {rad:.6g} is not positive; raise c0", step)
    root = math.sqrt(rad)
    return variational_derivative_e1(m, u) / root, root


def psi_monitor(u):
    """``(3/N^2) sum u^2``, the size of the explicit cubic linearization."""
    u = np.asarray(u)
    return 3.0 * float(np.mean(u * u))


def pfc_energy_lower_bound(m):
    """``E(u) >= -eps^2 |Omega| / 4`` for PFC (complete the squares)."""
    return -0.25 * m.epsilon ** 2 * m.grid.area


@dataclass(frozen=True)
class EnergyRecord:
    """One row of the energy history."""

    step: int
    time: float
    original_energy: float
    modified_energy: float
    sav_value: float
    psi: float
    psi_bar: float
    mass: float

    FIELDS = ("step", "time", "original_energy", "modified_energy", "sav_value",
              "psi", "psi_bar", "mass")

    def as_row(self):
        return [getattr(self, k) for k in self.FIELDS]

    def is_finite(self):
        return all(math.isfinite(v) for v in self.as_row())
