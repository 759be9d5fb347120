"""SAV-GL and G-SAV-GL time steppers.

Both families advance ``(u^{n-1}, u^n)`` to ``(u^n, u^{n+1})`` with one
diagonal operator ``A = I - tau beta2 G L`` in Fourier space:

* SAV: ``u^{n+1} = p + z^{n+kappa} q`` where ``p, q`` are two solves with
  ``A`` and the scalar ``z^{n+kappa}`` follows from a closed linear relation.
* G-SAV: one solve with the nonlinearity fully explicit, then a closed-form
  update of the energy variable ``R``.

Two-step methods are started with one step of the ``(0, 0, 1)`` method.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np

from . import models
from .exceptions import (
    DiscriminantNegative,
    GridMismatch,
    NonpositiveShiftedEnergy,
    PreconditionViolated,
    SingularSolve,
    SolutionBlowup,
    ValidationError,
)
from .gltd import BACKWARD_EULER, GLTDParams, SchemeCase, classify
from .identities import energy_weights
from .models import EnergyRecord

DENOMINATOR_TOL = 1e-12


class Family(enum.Enum):
    SAV = "sav"
    GSAV = "gsav"

    @classmethod
    def parse(cls, value):
        if isinstance(value, cls):
            return value
        key = str(value).strip().lower().replace("-", "").replace("_", "")
        if key == "sav":
            return cls.SAV
        if key == "gsav":
            return cls.GSAV
        raise ValidationError(f"unknown scheme family {value!r}")


@dataclass(frozen=True)
class StepperState:
    """Two consecutive fields and the scalar history.

    ``z_prev, z_curr`` are used by the SAV family and ``r_curr`` by G-SAV.
    ``psi_bar`` and ``eta`` cache the ratio diagnostics of the step that
    produced this state (1 before any step).
    """

    u_prev: np.ndarray
    u_curr: np.ndarray
    tau: float
    params: GLTDParams
    model: models.ModelSpec
    family: Family = Family.SAV
    z_prev: float = float("nan")
    z_curr: float = float("nan")
    r_curr: float = float("nan")
    step_index: int = 0
    psi_bar: float = 1.0
    eta: float = 1.0
    u_prev_hat: Optional[np.ndarray] = field(default=None, repr=False)
    u_curr_hat: Optional[np.ndarray] = field(default=None, repr=False)

    def __post_init__(self):
        # the stepper advances Fourier coefficients; physical fields are derived
        if self.u_prev_hat is None:
            object.__setattr__(self, "u_prev_hat", np.fft.fft2(self.u_prev))
        if self.u_curr_hat is None:
            object.__setattr__(self, "u_curr_hat", np.fft.fft2(self.u_curr))

    @property
    def time(self):
        return self.step_index * self.tau

    @property
    def sav_value(self):
        return self.z_curr if self.family is Family.SAV else self.r_curr


@dataclass(frozen=True)
class StepOutput:
    next_state: StepperState
    record: EnergyRecord
    mu_norm: float
    z_kappa: float = float("nan")
    u_bar: Optional[np.ndarray] = None


# -- helpers -----------------------------------------------------------------

def _operator(model, params, tau):
    """Per-mode symbol of ``A = I - tau beta2 G L`` (>= 1 for beta2 > 0)."""
    return 1.0 - tau * params.beta2 * model.g_symbol * model.l_symbol


def _history(params, f_curr, f_prev):
    return (1.0 + params.alpha0) * f_curr - params.alpha0 * f_prev


def _explicit_rhs_hat(model, params, tau, s):
    """Coefficients of ``(1+a0) u^n - a0 u^{n-1} + tau G L (b1 u^n + b0 u^{n-1})``."""
    hist = _history(params, s.u_curr_hat, s.u_prev_hat)
    mix = params.beta1 * s.u_curr_hat + params.beta0 * s.u_prev_hat
    return hist + tau * model.g_symbol * model.l_symbol * mix


def _real(u_hat):
    return np.fft.ifft2(u_hat).real


def _validate(model, params, ic, tau):
    ic = np.asarray(ic, dtype=float)
    if ic.shape != model.grid.shape:
        raise GridMismatch(f"initial field has shape {ic.shape}, grid is {model.grid.shape}")
    if not np.all(np.isfinite(ic)):
        raise ValidationError("initial field contains non-finite values")
    if not (tau > 0.0 and math.isfinite(tau)):
        raise ValidationError(f"tau must be positive, got {tau}")
    if not isinstance(params, GLTDParams):
        raise ValidationError("params must be a GLTDParams instance")
    return ic


def _check_finite(u, step):
    if not np.all(np.isfinite(u)):
        raise SolutionBlowup(
            "solution is no longer finite; the explicit nonlinearity is unstable at this tau", step)


def _check_shifted(model, u, step):
    with np.errstate(over="ignore", invalid="ignore"):
        val = models.shifted_energy(model, u)
    if not math.isfinite(val):
        raise SolutionBlowup("energy of the solution overflowed; the explicit nonlinearity "
                             "is unstable at this tau", step)
    if not val > 0.0:
        raise NonpositiveShiftedEnergy(
            f"shifted energy E(u) + ctilde0 = {val:.6g} is not positive; raise ctilde0", step)
    return val


# -- state construction --------------------------------------------------------

def zero_state(model, params, ic, tau, family=Family.SAV):
    """State at ``t = 0`` with the history filled by the initial field."""
    family = Family.parse(family)
    ic = _validate(model, params, ic, float(tau))
    if family is Family.SAV:
        _, z0 = models.w_of(model, ic, step=0)
        return StepperState(ic, ic, float(tau), params, model, family, z_prev=z0, z_curr=z0)
    r0 = _check_shifted(model, ic, 0)
    return StepperState(ic, ic, float(tau), params, model, family, r_curr=r0)


def needs_startup(params):
    return classify(params) is not SchemeCase.ONE_STEP


def init_state(model, params, ic, tau, family=Family.SAV):
    """Ready-to-step state.

    One-step methods start from ``u_prev = u_curr = ic``.  Two-step methods
    take one ``(0, 0, 1)`` step first and return the state at step 1.
    """
    s0 = zero_state(model, params, ic, tau, family)
    if not needs_startup(params):
        return s0
    return startup_step(s0).next_state


def startup_step(s0):
    out = step(replace(s0, params=BACKWARD_EULER))
    nxt = replace(out.next_state, params=s0.params)
    return replace(out, next_state=nxt, record=diagnostics(nxt))


# -- steps --------------------------------------------------------------------

def sav_step(s):
    """Advance a SAV-family state by one step."""
    if s.family is not Family.SAV:
        raise ValidationError("sav_step needs a SAV-family state")
    m, p, tau = s.model, s.params, s.tau
    n1 = s.step_index + 1
    inv = 1.0 / (1.0 - p.alpha0)

    u_bar = (1.0 + p.kappa) * s.u_curr - p.kappa * s.u_prev
    w, root_bar = models.w_of(m, u_bar, step=n1)

    a_sym = _operator(m, p, tau)
    p_hat = _explicit_rhs_hat(m, p, tau, s) / a_sym
    q_hat = tau * (1.0 - p.alpha0) * m.g_symbol * np.fft.fft2(w) / a_sym
    pv, qv = _real(p_hat), _real(q_hat)

    gamma = 0.5 * p.beta2 * inv
    hist_u = _history(p, s.u_curr, s.u_prev)
    hist_z = _history(p, s.z_curr, s.z_prev)
    s_expl = (p.beta2 * inv * (hist_z - 0.5 * m.grid.inner(w, hist_u))
              + inv * (p.beta1 * s.z_curr + p.beta0 * s.z_prev))
    wq = m.grid.inner(w, qv)
    denom = 1.0 - gamma * wq
    if not denom >= 1.0 - DENOMINATOR_TOL:
        raise SingularSolve(f"scalar recovery denominator {denom:.6g} < 1", n1)
    z_kappa = (s_expl + gamma * m.grid.inner(w, pv)) / denom

    u_next_hat = p_hat + z_kappa * q_hat
    u_next = _real(u_next_hat)
    _check_finite(u_next, n1)
    z_next = hist_z + 0.5 * m.grid.inner(w, u_next - hist_u)

    u_kappa = inv * (p.beta2 * u_next + p.beta1 * s.u_curr + p.beta0 * s.u_prev)
    mu = models.apply_l(m, u_kappa) + z_kappa * w

    nxt = replace(s, u_prev=s.u_curr, u_curr=u_next, z_prev=s.z_curr, z_curr=z_next,
                  u_prev_hat=s.u_curr_hat, u_curr_hat=u_next_hat,
                  step_index=n1, psi_bar=z_kappa / root_bar)
    return StepOutput(nxt, diagnostics(nxt), math.sqrt(max(m.grid.inner(mu, mu), 0.0)),
                      z_kappa=z_kappa, u_bar=u_bar)


def r_update(r_curr, tau, dissipation, shifted):
    """``R^{n+1} = R^n / (1 - tau (mu, G mu) / E~(u^{n+1}))``."""
    return r_curr / (1.0 - tau * dissipation / shifted)


def gsav_step(s):
    """Advance a G-SAV-family state by one step."""
    if s.family is not Family.GSAV:
        raise ValidationError("gsav_step needs a G-SAV-family state")
    m, p, tau = s.model, s.params, s.tau
    n1 = s.step_index + 1

    u_bar = (1.0 + p.kappa) * s.u_curr - p.kappa * s.u_prev
    with np.errstate(over="ignore", invalid="ignore"):
        v_bar = models.variational_derivative_e1(m, u_bar)
    with np.errstate(over="ignore", invalid="ignore"):
        rhs = (_explicit_rhs_hat(m, p, tau, s)
               + tau * (1.0 - p.alpha0) * m.g_symbol * np.fft.fft2(v_bar))
        u_next_hat = rhs / _operator(m, p, tau)
        u_next = _real(u_next_hat)
    _check_finite(u_next, n1)

    shifted = _check_shifted(m, u_next, n1)
    with np.errstate(over="ignore", invalid="ignore"):
        mu = models.chemical_potential(m, u_next)
        dissipation = m.grid.inner(mu, models.apply_g(m, mu))
    if not math.isfinite(dissipation):
        raise SolutionBlowup("dissipation overflowed; the explicit nonlinearity is unstable "
                             "at this tau", n1)
    r_next = r_update(s.r_curr, tau, dissipation, shifted)
    nxt = replace(s, u_prev=s.u_curr, u_curr=u_next, r_curr=r_next,
                  u_prev_hat=s.u_curr_hat, u_curr_hat=u_next_hat,
                  step_index=n1, eta=r_next / shifted)
    return StepOutput(nxt, diagnostics(nxt), math.sqrt(max(m.grid.inner(mu, mu), 0.0)),
                      u_bar=u_bar)


def step(s):
    return sav_step(s) if s.family is Family.SAV else gsav_step(s)


# -- energies -----------------------------------------------------------------

def _weights(params):
    try:
        return energy_weights(params)
    except (PreconditionViolated, DiscriminantNegative):
        return None


def admits_modified_energy(params):
    """True iff the SAV scheme with ``params`` has a quadratic modified energy."""
    return _weights(params) is not None


def has_modified_energy(s):
    return s.family is Family.GSAV or admits_modified_energy(s.params)


def modified_energy(s):
    """Quadratic modified energy decreased unconditionally by the scheme.

    G-SAV returns ``R^n``.  For SAV the functional reads

        w11 [ (Lu^n,u^n)/2 + (z^n)^2 ] + w00 [ (Lu^{n-1},u^{n-1})/2 + (z^{n-1})^2 ]
            + w10 [ (Lu^n,u^{n-1})/2 + z^n z^{n-1} ]

    with weights from :func:`savgl.identities.energy_weights`.  Returns nan
    when the parameters admit no such identity.
    """
    if s.family is Family.GSAV:
        return s.r_curr
    wts = _weights(s.params)
    if wts is None:
        return float("nan")
    m = s.model
    lu1 = models.apply_l(m, s.u_curr)
    x11 = 0.5 * m.grid.inner(lu1, s.u_curr) + s.z_curr ** 2
    x10 = 0.5 * m.grid.inner(lu1, s.u_prev) + s.z_curr * s.z_prev
    if wts.w00 == 0.0:
        x00 = 0.0
    else:
        x00 = models.quadratic_energy(m, s.u_prev) + s.z_prev ** 2
    return wts.w11 * x11 + wts.w00 * x00 + wts.w10 * x10


def mass(s):
    """Mean of ``u^n``, read from its zero Fourier mode."""
    return float(s.u_curr_hat[0, 0].real) / s.u_curr_hat.size


def diagnostics(s):
    ratio = s.psi_bar if s.family is Family.SAV else s.eta
    return EnergyRecord(
        step=s.step_index,
        time=s.time,
        original_energy=models.original_energy(s.model, s.u_curr),
        modified_energy=modified_energy(s),
        sav_value=s.sav_value,
        psi=models.psi_monitor(s.u_curr),
        psi_bar=ratio,
        mass=mass(s),
    )


def run(model, params, ic, tau, steps, family=Family.SAV):
    """Yield ``(state, record)`` for steps ``0..steps``, startup included."""
    s = zero_state(model, params, ic, tau, family)
    yield s, diagnostics(s)
    if steps <= 0:
        return
    out = startup_step(s) if needs_startup(params) else step(s)
    s = out.next_state
    yield s, out.record
    for _ in range(steps - 1):
        out = step(s)
        s = out.next_state
        yield s, out.record


def integrate(model, params, ic, tau, steps, family=Family.SAV):
    """Run ``steps`` steps and return the final state and all records."""
    records = []
    s = None
    for s, rec in run(model, params, ic, tau, steps, family):
        records.append(rec)
    return s, records
