"""Three-parameter general linear time discretizations (GLTD).

A GLTD approximates, at the off-step time ``t_n + kappa * tau``,

    d chi/dt  ~ [chi^{n+1} - (1+a0) chi^n + a0 chi^{n-1}] / (tau (1-a0))
    chi       ~ [b2 chi^{n+1} + b1 chi^n + b0 chi^{n-1}] / (1-a0)
    chi_bar   = (1+kappa) chi^n - kappa chi^{n-1}       (explicit extrapolation)

with ``b1 = 1 - a0 - b0 - b2`` and ``kappa = (b2 - b0)/(1 - a0)``.  Everything
here is a pure function of the triple ``(alpha0, beta0, beta2)``.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from .exceptions import DegenerateLeadingCoefficient, DegenerateParams

# absolute tolerance for the floating-point equalities used in classification
CASE_TOL = 1e-12


class SchemeCase(enum.Enum):
    ONE_STEP = "OneStep"
    TWO_STEP_SECOND_ORDER = "TwoStepSecondOrder"
    TWO_STEP_FIRST_ORDER = "TwoStepFirstOrder"

    @property
    def roman(self):
        return {"OneStep": "i", "TwoStepSecondOrder": "ii", "TwoStepFirstOrder": "iii"}[self.value]


class AlgebraicStability(enum.Enum):
    YES = "Yes"
    NO = "No"
    UNDETERMINED = "Undetermined"


@dataclass(frozen=True)
class GLTDParams:
    """Immutable ``(alpha0, beta0, beta2)`` triple with its derived values.

    Build instances through :func:`derive`, which validates the triple.
    """

    alpha0: float
    beta0: float
    beta2: float
    beta1: float = field(init=False)
    kappa: float = field(init=False)

    def __post_init__(self):
        if self.alpha0 == 1.0 or self.beta2 == 0.0:
            raise DegenerateParams(
                f"alpha0 must differ from 1 and beta2 from 0, got "
                f"alpha0={self.alpha0!r}, beta2={self.beta2!r}"
            )
        object.__setattr__(self, "beta1", 1.0 - self.alpha0 - self.beta0 - self.beta2)
        object.__setattr__(self, "kappa", (self.beta2 - self.beta0) / (1.0 - self.alpha0))

    @property
    def triple(self):
        return (self.alpha0, self.beta0, self.beta2)

    @property
    def case(self):
        return classify(self)


def derive(alpha0, beta0, beta2):
    """Return the validated parameter set; raises DegenerateParams."""
    return GLTDParams(float(alpha0), float(beta0), float(beta2))


# Parameter sets used throughout the numerical experiments (M(1)..M(4)).
PRESETS = {
    "M1": derive(0.0, 0.0, 1.0),
    "M2": derive(-1.0 / 3.0, 5.0 / 12.0, 3.0 / 4.0),
    "M3": derive(1.0 / 3.0, 0.0, 2.0 / 3.0),
    "M4": derive(1.0 / 3.0, -1.0 / 6.0, 1.0 / 2.0),
}

# backward-Euler-type one-step member, used for startup
BACKWARD_EULER = PRESETS["M1"]


def second_order_defect(p):
    """``beta2 - ((1 + alpha0)/2 + beta0)``; zero on the second-order family."""
    return p.beta2 - (0.5 * (1.0 + p.alpha0) + p.beta0)


def classify(p):
    if abs(p.alpha0) <= CASE_TOL and abs(p.beta0) <= CASE_TOL:
        return SchemeCase.ONE_STEP
    if abs(second_order_defect(p)) <= CASE_TOL:
        return SchemeCase.TWO_STEP_SECOND_ORDER
    return SchemeCase.TWO_STEP_FIRST_ORDER


def a_stability(p):
    """True iff the four inequalities of the sufficient A-stability condition hold:

        -1 <= alpha0 < 1,  beta2 > 0,  |beta0| <= beta2,  1 - alpha0 - 2 beta0 - 2 beta2 <= 0

    In the one-step case this is ``beta2 >= 1/2``.  Note that for two-step
    first-order triples with ``beta2 < (1+alpha0)/2 + beta0`` these
    inequalities do not guarantee bounded roots for complex arguments; use
    :func:`verify_a_stability_numerically` to confirm.
    """
    a0, b0, b2 = p.triple
    return bool(
        -1.0 <= a0 < 1.0
        and b2 > 0.0
        and abs(b0) <= b2 + CASE_TOL
        and 1.0 - a0 - 2.0 * b0 - 2.0 * b2 <= CASE_TOL
    )


def algebraic_stability(p):
    case = classify(p)
    if case is SchemeCase.ONE_STEP:
        if p.beta2 >= 0.5 - CASE_TOL:
            return AlgebraicStability.YES
        return AlgebraicStability.UNDETERMINED
    if case is SchemeCase.TWO_STEP_SECOND_ORDER and -1.0 <= p.alpha0 < 1.0:
        g = 2.0 * p.beta0 + p.alpha0
        if abs(g) <= CASE_TOL:
            return AlgebraicStability.NO
        if g > 0.0:
            return AlgebraicStability.YES
    # first-order two-step methods are not decided in general
    return AlgebraicStability.UNDETERMINED


def _quadratic_roots(a, b, c):
    """Roots of a x^2 + b x + c, elementwise, without cancellation."""
    a, b, c = np.broadcast_arrays(*(np.asarray(v, dtype=complex) for v in (a, b, c)))
    sq = np.sqrt(b * b - 4.0 * a * c)
    # pick the sign that avoids subtracting nearly equal numbers
    sgn = np.where((np.conj(b) * sq).real >= 0.0, 1.0, -1.0)
    q = -0.5 * (b + sgn * sq)
    with np.errstate(divide="ignore", invalid="ignore"):
        r1 = q / a
        r2 = np.where(q != 0.0, c / np.where(q != 0.0, q, 1.0), 0.0)
    return r1, r2


def characteristic_coefficients(p, xi_bar):
    """Coefficients (times ``1 - alpha0``) of rho(x) - xi_bar sigma(x)."""
    xi_bar = np.asarray(xi_bar, dtype=complex)
    lead = 1.0 - p.beta2 * xi_bar
    mid = -(1.0 + p.alpha0 + p.beta1 * xi_bar)
    const = p.alpha0 - p.beta0 * xi_bar
    return lead, mid, const


def characteristic_roots(p, xi_bar):
    """Both roots of the characteristic polynomial of the fully implicit GLTD
    applied to ``u' = xi u`` with ``xi_bar = xi * tau``.

    Accepts scalars or arrays; a scalar input returns a pair of complex numbers.
    """
    lead, mid, const = characteristic_coefficients(p, xi_bar)
    if np.any(lead == 0.0):
        raise DegenerateLeadingCoefficient("1 - beta2 * xi_bar vanishes")
    r1, r2 = _quadratic_roots(lead, mid, const)
    if r1.ndim == 0:
        return complex(r1), complex(r2)
    return r1, r2


def sample_left_half_plane(re_range=(-100.0, 0.0), im_range=(-100.0, 100.0), n_re=101, n_im=101):
    re = np.linspace(re_range[0], re_range[1], n_re)
    im = np.linspace(im_range[0], im_range[1], n_im)
    if re.max() > 0.0:
        raise ValueError("sampling rectangle must lie in Re(xi_bar) <= 0")
    return (re[:, None] + 1j * im[None, :]).ravel()


def verify_a_stability_numerically(p, re_range=(-100.0, 0.0), im_range=(-100.0, 100.0),
                                   n_re=101, n_im=101):
    """Maximum root modulus over a rectangular grid of the closed left half-plane."""
    samples = sample_left_half_plane(re_range, im_range, n_re, n_im)
    r1, r2 = characteristic_roots(p, samples)
    return float(max(np.abs(r1).max(), np.abs(r2).max()))


def double_root_on_unit_circle(p, tol=1e-10):
    """Whether the characteristic polynomial has a repeated root of modulus one
    for some ``xi_bar`` in the closed left half-plane (including infinity).

    Such boundary cases are excluded by the definition of A-stability even
    though the maximum root modulus equals one.
    """
    a0, b0, b1, b2 = p.alpha0, p.beta0, p.beta1, p.beta2
    # discriminant (1+a0+b1 x)^2 - 4 (1-b2 x)(a0-b0 x) as a polynomial in x = xi_bar
    disc = [b1 * b1 - 4.0 * b2 * b0, 2.0 * (1.0 + a0) * b1 + 4.0 * (a0 * b2 + b0), (1.0 + a0) ** 2 - 4.0 * a0]
    candidates = []
    if any(abs(c) > 0.0 for c in disc):
        candidates = [complex(x) for x in np.roots(np.trim_zeros(disc, "f"))]
    for x in candidates:
        if x.real > tol:
            continue
        lead = 1.0 - b2 * x
        if abs(lead) < tol:
            continue
        root = (1.0 + a0 + b1 * x) / (2.0 * lead)
        if abs(abs(root) - 1.0) <= tol:
            return True
    # xi_bar -> infinity: roots of sigma(x) = b2 x^2 + b1 x + b0
    if abs(disc[0]) <= tol and abs(abs(b1 / (2.0 * b2)) - 1.0) <= tol:
        return True
    return False


@dataclass(frozen=True)
class StabilityVerdict:
    a_stable: bool
    algebraically_stable: AlgebraicStability
    boundary_double_root: bool = False


def stability_verdict(p):
    return StabilityVerdict(
        a_stable=a_stability(p),
        algebraically_stable=algebraic_stability(p),
        boundary_double_root=double_root_on_unit_circle(p),
    )


def resolve(spec):
    """Accept a preset name (``"M3"``), a triple, or a GLTDParams."""
    if isinstance(spec, GLTDParams):
        return spec
    if isinstance(spec, str):
        key = spec.upper().replace("SAV-", "").replace("G-", "").replace("(", "").replace(")", "")
        try:
            return PRESETS[key]
        except KeyError:
            raise DegenerateParams(f"unknown parameter preset {spec!r}") from None
    return derive(*spec)
