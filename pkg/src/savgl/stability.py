"""Stability of the semi-implicit GLTD on ``u' = xi u + zeta u``.

``xi`` is treated implicitly and ``zeta`` by the explicit extrapolation.
With ``xb = tau xi`` and ``zb = tau zeta`` the characteristic polynomial is

    Q(x) = (1 - b2 xb) x^2 - (1 + a0 + b1 xb + (1 - a0 + b2 - b0) zb) x
           + (a0 - b0 xb + (b2 - b0) zb)

and its roots lie in the closed unit disk iff four linear inequalities in
``(xb, zb)`` hold.  Because they are affine in ``tau`` along a ray, the
stable stepsizes form an interval ``(0, tau_max]``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .exceptions import DegenerateLeadingCoefficient, UnsupportedCase
from .gltd import CASE_TOL, SchemeCase, _quadratic_roots, classify
from .models import ModelKind

TAU_CAP = 1.0e6
BISECT_RTOL = 1.0e-6
INEQ_TOL = 1.0e-12


@dataclass(frozen=True)
class StepsizeReport:
    """Largest stable stepsize for one test point or a whole model.

    ``tau_max`` is ``inf`` when unbounded.  ``limiting_value`` is the
    denominator of the binding closed-form bound (e.g. ``max(xi - 3 zeta)``
    for the ``(0, 0, 1)`` method).
    """

    tau_max: float
    argmax_mode: Optional[tuple] = None
    limiting_expression: str = ""
    limiting_value: float = float("nan")
    binding_modes: tuple = field(default=(), compare=False)

    @property
    def unbounded(self):
        return math.isinf(self.tau_max)

    def describe(self):
        if self.unbounded:
            return f"tau_max=Unbounded ({self.limiting_expression})"
        txt = f"tau_max={self.tau_max:.6g} ({self.limiting_expression}"
        if math.isfinite(self.limiting_value):
            txt += f", limiting value {self.limiting_value:.6g}"
        if self.argmax_mode is not None:
            txt += f", mode {self.argmax_mode}"
        return txt + ")"


def semi_implicit_coefficients(p, xi_bar, zeta_bar):
    xi_bar = np.asarray(xi_bar, dtype=float)
    zeta_bar = np.asarray(zeta_bar, dtype=float)
    lead = 1.0 - p.beta2 * xi_bar
    mid = -(1.0 + p.alpha0 + p.beta1 * xi_bar
            + (1.0 - p.alpha0 + p.beta2 - p.beta0) * zeta_bar)
    const = p.alpha0 - p.beta0 * xi_bar + (p.beta2 - p.beta0) * zeta_bar
    return lead, mid, const


def semi_implicit_roots(p, xi_bar, zeta_bar):
    lead, mid, const = semi_implicit_coefficients(p, xi_bar, zeta_bar)
    if np.any(lead == 0.0):
        raise DegenerateLeadingCoefficient("1 - beta2 * xi_bar vanishes")
    r1, r2 = _quadratic_roots(lead, mid, const)
    if r1.ndim == 0:
        return complex(r1), complex(r2)
    return r1, r2


def max_root_modulus(p, xi_bar, zeta_bar):
    r1, r2 = semi_implicit_roots(p, xi_bar, zeta_bar)
    return np.maximum(np.abs(r1), np.abs(r2))


def _affine_parts(p):
    """Rows ``(c, dx, dz)`` with inequality ``c + dx xb + dz zb >= 0``."""
    a0, b0, b1, b2 = p.alpha0, p.beta0, p.beta1, p.beta2
    return np.array([
        [1.0 + a0, -(b0 + b2), b2 - b0],
        [1.0 - a0, b0 - b2, -(b2 - b0)],
        [2.0 * (1.0 + a0), b1 - b0 - b2, 1.0 - a0 + 2.0 * b2 - 2.0 * b0],
        [0.0, -(b1 + b0 + b2), -(1.0 - a0)],
    ])


def stability_margins(p, xi_bar, zeta_bar):
    """Values of the four inequalities; the point is stable iff all are >= 0."""
    xb = np.asarray(xi_bar, dtype=float)
    zb = np.asarray(zeta_bar, dtype=float)
    rows = _affine_parts(p)
    return np.stack([r[0] + r[1] * xb + r[2] * zb for r in rows])


def is_stable_point(p, xi_bar, zeta_bar, tol=INEQ_TOL):
    """True iff all four stability inequalities hold (boundary included).

    Works elementwise on arrays.
    """
    xb = np.asarray(xi_bar, dtype=float)
    zb = np.asarray(zeta_bar, dtype=float)
    scale = 1.0 + np.abs(xb) + np.abs(zb)
    ok = np.all(stability_margins(p, xb, zb) >= -tol * scale, axis=0)
    return bool(ok) if ok.ndim == 0 else ok


def max_stepsize_closed_form(p, xi, zeta):
    """Closed-form stepsize bound for one-step and second-order methods.

    Raises
    ------
    UnsupportedCase
        for first-order two-step methods, for ``beta2 < 1/2`` in the
        one-step case and for ``2 beta0 + alpha0 < 0``; use
        :func:`numeric_max_stepsize` instead.
    """
    case = classify(p)
    if case is SchemeCase.ONE_STEP and p.beta2 >= 0.5:
        b2 = p.beta2
        slope = (2.0 * b2 - 1.0) / (2.0 * b2 + 1.0)
        den = (2.0 * b2 - 1.0) * xi - (2.0 * b2 + 1.0) * zeta
        if zeta >= slope * xi or den <= 0.0:
            return StepsizeReport(math.inf, None, "zeta >= (2b2-1)/(2b2+1) xi")
        return StepsizeReport(2.0 / den, None, "2/((2b2-1) xi - (2b2+1) zeta)", den)
    if case is SchemeCase.TWO_STEP_SECOND_ORDER and -1.0 <= p.alpha0 < 1.0:
        g = 2.0 * p.beta0 + p.alpha0
        if g < -CASE_TOL:
            raise UnsupportedCase("closed form needs 2 beta0 + alpha0 >= 0")
        if abs(g) <= CASE_TOL:
            if zeta >= 0.0:
                return StepsizeReport(math.inf, None, "zeta >= 0")
            return StepsizeReport(-(1.0 + p.alpha0) / zeta, None, "-(1+a0)/zeta", -zeta)
        den = g * xi - zeta
        if zeta >= g * xi or den <= 0.0:
            return StepsizeReport(math.inf, None, "zeta >= (2b0+a0) xi")
        return StepsizeReport((1.0 + p.alpha0) / den, None, "(1+a0)/((2b0+a0) xi - zeta)", den)
    raise UnsupportedCase(f"no closed-form stepsize bound for {p.triple}")


def _bisect(p, xi, zeta, cap=TAU_CAP, rtol=BISECT_RTOL):
    """Vectorized bisection for the stable stepsize interval along rays."""
    xi = np.atleast_1d(np.asarray(xi, dtype=float))
    zeta = np.atleast_1d(np.asarray(zeta, dtype=float))
    out = np.full(xi.shape, math.inf)
    capped = is_stable_point(p, cap * xi, cap * zeta)
    todo = ~np.asarray(capped)
    lo = np.zeros(xi.shape)
    hi = np.full(xi.shape, cap)
    for _ in range(400):
        active = todo & (hi - lo > rtol * hi)
        if not active.any():
            break
        mid = 0.5 * (lo + hi)
        st = is_stable_point(p, mid * xi, mid * zeta)
        lo = np.where(active & st, mid, lo)
        hi = np.where(active & ~st, mid, hi)
    out[todo] = lo[todo]
    return out


def numeric_max_stepsize(p, xi, zeta):
    """Largest stable ``tau`` in ``(0, 1e6]`` by bisection; Unbounded if stable at the cap.

    Returns ``tau_max = 0`` when no positive stepsize is stable, which
    happens when ``xi + zeta > 0`` (the test equation itself grows).
    """
    tau = float(_bisect(p, xi, zeta)[0])
    if math.isinf(tau):
        return StepsizeReport(tau, None, "stable at cap")
    return StepsizeReport(tau, None, "bisection")


# -- model-specific estimates -------------------------------------------------

def model_test_points(kind, grid, epsilon, psi, convention="index"):
    """Per-mode ``(xi, zeta)`` for the linearized semi-implicit model.

    The cubic is linearized as ``3 u^2 ~ psi`` and the SAV ratio is taken as 1.

    Parameters
    ----------
    convention : {"index", "symbol"}
        PFC only.  ``"index"`` uses ``a = (2 pi/L)(k^2+l^2)``,
        ``xi = -a^3`` and ``zeta = -a (psi + (1-eps)/2 - 2a)``, reproducing the
        reference estimates; ``"symbol"`` uses the true operator symbols with
        ``s = (2 pi/L)^2 (k^2+l^2)``: ``xi = -s^3``,
        ``zeta = -s (psi + 1 - eps - 2 s)``.
    """
    kind = ModelKind.parse(kind)
    k2 = grid.k_squared().astype(float)
    s = grid.factor ** 2 * k2
    if kind is ModelKind.ALLEN_CAHN:
        xi = -epsilon ** 2 * s
        zeta = np.full_like(xi, 1.0 - psi)
    elif kind is ModelKind.CAHN_HILLIARD:
        xi = -epsilon ** 2 * s * s
        zeta = -s * (psi - 1.0)
    elif convention == "index":
        a = grid.factor * k2
        xi = -a ** 3
        zeta = -a * (psi + 0.5 * (1.0 - epsilon) - 2.0 * a)
    elif convention == "symbol":
        xi = -s ** 3
        zeta = -s * (psi + 1.0 - epsilon - 2.0 * s)
    else:
        raise ValueError(f"unknown convention {convention!r}")
    return xi, zeta


def _closed_form_vectorized(p, xi, zeta):
    case = classify(p)
    if case is SchemeCase.ONE_STEP and p.beta2 >= 0.5:
        b2 = p.beta2
        den = (2.0 * b2 - 1.0) * xi - (2.0 * b2 + 1.0) * zeta
        cond = (zeta < (2.0 * b2 - 1.0) / (2.0 * b2 + 1.0) * xi) & (den > 0.0)
        tag = "2/((2b2-1) xi - (2b2+1) zeta)"
        num = 2.0
    elif (case is SchemeCase.TWO_STEP_SECOND_ORDER and -1.0 <= p.alpha0 < 1.0
          and 2.0 * p.beta0 + p.alpha0 >= -CASE_TOL):
        g = 2.0 * p.beta0 + p.alpha0
        if abs(g) <= CASE_TOL:
            den = -zeta
            cond = zeta < 0.0
            tag = "-(1+a0)/zeta"
        else:
            den = g * xi - zeta
            cond = (zeta < g * xi) & (den > 0.0)
            tag = "(1+a0)/((2b0+a0) xi - zeta)"
        num = 1.0 + p.alpha0
    else:
        return None
    with np.errstate(divide="ignore", invalid="ignore"):
        tau = np.where(cond, num / np.where(cond, den, 1.0), math.inf)
    return tau, np.where(cond, den, np.nan), tag


def canonical_mode(k, l):
    return tuple(sorted((abs(int(k)), abs(int(l)))))


def estimate_for_model(model, p, psi_estimate, convention="index"):
    """Sufficient stepsize bound for a model, minimized over all retained modes.

    The binding mode is reported as ``(|k|, |l|)`` sorted ascending; the
    whole symmetry orbit is in ``binding_modes``.
    """
    if psi_estimate < 0.0:
        raise ValueError("psi_estimate must be non-negative")
    return estimate_on_grid(model.kind, model.grid, model.epsilon, p, psi_estimate, convention)


def per_mode_bounds(p, xi, zeta):
    """Per-mode ``(tau_max, limiting_value, tag)`` arrays.

    Closed forms are used where available, bisection otherwise.  Modes with
    ``xi + zeta > 0`` follow a growing linear dynamics and are excluded
    (reported unbounded), as are the unconditional sectors.
    """
    xi = np.asarray(xi, dtype=float)
    zeta = np.asarray(zeta, dtype=float)
    closed = _closed_form_vectorized(p, xi, zeta)
    if closed is None:
        tau = _bisect(p, xi.ravel(), zeta.ravel()).reshape(xi.shape)
        den, tag = np.full(xi.shape, np.nan), "bisection"
    else:
        tau, den, tag = closed
    growing = xi + zeta > 0.0
    return np.where(growing, math.inf, tau), np.where(growing, np.nan, den), tag


def estimate_on_grid(kind, grid, epsilon, p, psi_estimate, convention="index"):
    xi, zeta = model_test_points(kind, grid, epsilon, psi_estimate, convention)
    tau, den, tag = per_mode_bounds(p, xi, zeta)
    tmin = float(np.min(tau))
    if math.isinf(tmin):
        return StepsizeReport(math.inf, None, "all modes unconditionally stable")
    hits = np.argwhere(tau <= tmin * (1.0 + 1e-12))
    ks = grid.k
    orbit = tuple(sorted({(int(ks[i]), int(ks[j])) for i, j in hits}))
    i, j = hits[0]
    return StepsizeReport(tmin, canonical_mode(ks[i], ks[j]), tag, float(den[i, j]), orbit)
