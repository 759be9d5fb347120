"""Undetermined-coefficient identities behind the modified energies.

For a GLTD with ``D = (1 - alpha0)^2`` we look for reals ``a, b, d, c1, c2, c3``
such that, for all ``(x1, x0, xm) = (chi^{n+1}, chi^n, chi^{n-1})``,

    (x1 - (1+a0) x0 + a0 xm) (b2 x1 + b1 x0 + b0 xm) / D
        = a (x1^2 - x0^2) + b (x0^2 - xm^2) + d (x1 x0 - x0 xm)
          + (c1 x1 + c2 x0 + c3 xm)^2 .

Matching monomials gives six equations.  They force ``c1 + c2 + c3 = 0`` and

    c2^2 = (1+a0)(2 b0 + 2 b2 + a0 - 1) / (2 D)

while ``c1, c3`` are the two roots of ``x^2 + c2 x + (b0 + a0 b2)/(2D)``.
The remaining three unknowns then follow linearly.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .exceptions import DiscriminantNegative, PreconditionViolated
from .gltd import SchemeCase, a_stability, classify


class Sign(enum.Enum):
    PLUS = "Plus"
    MINUS = "Minus"


class RootOrder(enum.Enum):
    A = "RootOrderA"   # c1 = -c2/2 + sqrt(disc)
    B = "RootOrderB"   # c1 = -c2/2 - sqrt(disc)


@dataclass(frozen=True)
class IdentityBranch:
    sign: Sign = Sign.MINUS
    order: RootOrder = RootOrder.A

    def __str__(self):
        return f"({self.sign.value}, {self.order.value})"


CANONICAL = IdentityBranch(Sign.MINUS, RootOrder.A)
ALL_BRANCHES = tuple(IdentityBranch(s, o) for s in Sign for o in RootOrder)


@dataclass(frozen=True)
class IdentityCoefficients:
    a: float
    b: float
    d: float
    c1: float
    c2: float
    c3: float
    branch: IdentityBranch = CANONICAL

    def as_dict(self):
        return {k: getattr(self, k) for k in ("a", "b", "d", "c1", "c2", "c3")}


def _scale(p):
    return (1.0 - p.alpha0) ** 2


def discriminant(p):
    """``c2^2/4 - (beta0 + alpha0 beta2) / (2 (1-alpha0)^2)``.

    Evaluated in the simplified form ``(2 b2 - 2 b0 - a0 - 1) / (8 (1 - a0))``,
    which is algebraically identical and vanishes exactly on the
    second-order family whenever the inputs are exact.
    """
    return (2.0 * p.beta2 - 2.0 * p.beta0 - p.alpha0 - 1.0) / (8.0 * (1.0 - p.alpha0))


def solve_coefficients(p, branch=CANONICAL):
    """Real solution of the six-equation coefficient system on the given branch.

    Raises
    ------
    PreconditionViolated
        if the triple is outside the sufficient A-stability region.
    DiscriminantNegative
        if ``c1, c3`` would be complex.
    """
    if not a_stability(p):
        raise PreconditionViolated(
            f"identity requires -1<=alpha0<1, beta2>0, |beta0|<=beta2, "
            f"1-alpha0-2beta0-2beta2<=0; got {p.triple}"
        )
    a0, b0, b1, b2 = p.alpha0, p.beta0, p.beta1, p.beta2
    D = _scale(p)
    rad = 2.0 * (1.0 + a0) * (2.0 * b0 + 2.0 * b2 + a0 - 1.0)
    c2 = math.sqrt(max(rad, 0.0)) / (2.0 * (1.0 - a0))
    if branch.sign is Sign.MINUS:
        c2 = -c2

    disc = discriminant(p)
    if classify(p) is SchemeCase.TWO_STEP_SECOND_ORDER:
        disc = 0.0
    elif disc < 0.0:
        if disc < -1e-12 / D:
            raise DiscriminantNegative(
                f"discriminant {disc:.6g} < 0: no real identity for {p.triple}"
            )
        disc = 0.0
    root = math.sqrt(disc)
    c1 = -0.5 * c2 + (root if branch.order is RootOrder.A else -root)
    c3 = -c2 - c1

    a = b2 / D - c1 * c1
    b = c3 * c3 - a0 * b0 / D
    d = (b1 - (1.0 + a0) * b2) / D - 2.0 * c1 * c2
    return IdentityCoefficients(a, b, d, c1, c2, c3, branch)


def admissible_branches(p):
    """All branches with real coefficients, with duplicates (collapsed pairs) removed."""
    out = []
    for br in ALL_BRANCHES:
        co = solve_coefficients(p, br)
        key = tuple(round(v, 14) for v in co.as_dict().values())
        if all(key != tuple(round(v, 14) for v in o.as_dict().values()) for o in out):
            out.append(co)
    return out


def _equations(p, co):
    a0, b0, b1, b2 = p.alpha0, p.beta0, p.beta1, p.beta2
    D = _scale(p)
    c1, c2, c3 = co.c1, co.c2, co.c3
    lhs = np.array([
        co.a + c1 * c1,
        co.b - co.a + c2 * c2,
        c3 * c3 - co.b,
        2.0 * c1 * c2 + co.d,
        2.0 * c2 * c3 - co.d,
        2.0 * c1 * c3,
    ])
    rhs = np.array([
        b2,
        -(1.0 + a0) * b1,
        a0 * b0,
        b1 - (1.0 + a0) * b2,
        a0 * b1 - (1.0 + a0) * b0,
        b0 + a0 * b2,
    ]) / D
    return lhs - rhs


def system_residual(p, co):
    """Max absolute residual over the six coefficient equations."""
    return float(np.max(np.abs(_equations(p, co))))


def identity_sides(p, co, chi):
    x1, x0, xm = (float(v) for v in chi)
    D = _scale(p)
    lhs = (x1 - (1.0 + p.alpha0) * x0 + p.alpha0 * xm) * (
        p.beta2 * x1 + p.beta1 * x0 + p.beta0 * xm) / D
    rhs = (co.a * (x1 * x1 - x0 * x0) + co.b * (x0 * x0 - xm * xm)
           + co.d * (x1 * x0 - x0 * xm) + (co.c1 * x1 + co.c2 * x0 + co.c3 * xm) ** 2)
    return lhs, rhs


def identity_residual(p, co, chi):
    """``|LHS - RHS|`` of the identity at ``chi = (chi^{n+1}, chi^n, chi^{n-1})``."""
    lhs, rhs = identity_sides(p, co, chi)
    return abs(lhs - rhs)


def second_order_closed_form(p):
    """Closed-form ``(a, b, d, w)`` for the second-order family, where ``w``
    multiplies ``(x1 - 2 x0 + xm)^2``."""
    a0, b0 = p.alpha0, p.beta0
    D = _scale(p)
    a = (2.0 + a0 - a0 * a0 + 2.0 * b0 * (1.0 - a0)) / (4.0 * D)
    b = (a0 + a0 * a0 + 2.0 * b0 * (1.0 - a0)) / (4.0 * D)
    d = ((a0 - 1.0) * (2.0 * b0 + a0 - 1.0) - (a0 + 1.0)) / (2.0 * D)
    w = (1.0 + a0) * (2.0 * b0 + a0) / (4.0 * D)
    return a, b, d, w


def first_order_closed_form(p):
    """Closed-form ``(a, b, d, c, c_tilde)`` of the displayed first-order
    two-step energy.  The printed ``a, b, d`` coincide with the branch
    ``(Minus, RootOrderB)`` of :func:`solve_coefficients`.
    """
    a0, b0, b2 = p.alpha0, p.beta0, p.beta2
    D = _scale(p)
    rad_c = (2.0 * b2 - 2.0 * b0 - a0 - 1.0) / (8.0 * (1.0 - a0))
    if rad_c < 0.0:
        raise DiscriminantNegative(f"2 beta2 - 2 beta0 - alpha0 - 1 < 0 for {p.triple}")
    c = math.sqrt(rad_c)
    ct = -math.sqrt(2.0 * (1.0 + a0) * (2.0 * b0 + 2.0 * b2 + a0 - 1.0)) / (2.0 * (1.0 - a0))
    a = (1.0 - a0 * a0 + 2.0 * b2 - 2.0 * a0 * b0) / (4.0 * D) - ct * c
    b = (2.0 * b2 + a0 * a0 - 1.0) / (4.0 * D) - ct * c
    d = 0.5 + (a0 * b0 - b2) / D + 2.0 * ct * c
    return a, b, d, c, ct


@dataclass(frozen=True)
class EnergyWeights:
    """Weights of the modified energy

        E = w11 [ (Lu1,u1)/2 + z1^2 ] + w00 [ (Lu0,u0)/2 + z0^2 ] + w10 [ (Lu1,u0)/2 + z1 z0 ]
    """

    w11: float
    w00: float
    w10: float


def energy_weights(p):
    """Weights of the quadratic modified energy decreased by the SAV scheme.

    One-step and second-order two-step methods use ``2 (a, b, d)`` of the
    canonical branch, which reduces to the familiar forms.  First-order
    two-step methods use the displayed functional, i.e. ``(a, b, d)`` of
    the ``(Minus, RootOrderB)`` branch without the factor two.
    """
    case = classify(p)
    if case is SchemeCase.TWO_STEP_FIRST_ORDER:
        co = solve_coefficients(p, IdentityBranch(Sign.MINUS, RootOrder.B))
        return EnergyWeights(co.a, co.b, co.d)
    co = solve_coefficients(p, CANONICAL)
    return EnergyWeights(2.0 * co.a, 2.0 * co.b, 2.0 * co.d)
