"""Perturbative evolution coefficients for the asymmetric nonlinear coupler.

A linear waveguide (mode a) is evanescently coupled to a quadratic waveguide
running second harmonic generation (fundamental b1, second harmonic b2).  To
first order in the nonlinear coupling the field operators evolve as

    a(z)  = f1 a + f2 b1 + f3 b1† b2 + f4 a† b2
    b1(z) = g1 a + g2 b1 + g3 b1† b2 + g4 a† b2
    b2(z) = h1 b2 + h2 b1² + h3 b1 a + h4 a²

This module evaluates the twelve coefficients as closed-form functions of the
coupler constants and the propagation length z.  The closed forms contain the
denominators Δk and 4|k|² − Δk²; evaluation is refused inside narrow guard
bands around their zeros (GuardBandError) instead of guessing the limits.
"""

from __future__ import annotations

import cmath
import math
import warnings
from dataclasses import dataclass

GUARD_BAND_EPS = 1e-9


class GuardBandError(ValueError):
    """delta_k sits too close to a zero of an Eq.-coefficient denominator."""


@dataclass(frozen=True)
class CouplerParams:
    """Physical constants of the coupler.

    k        : complex linear coupling constant (1/length)
    gamma_nl : complex nonlinear coupling constant (1/length)
    delta_k  : real phase mismatch between fundamental and second harmonic
               (1/length)

    The perturbative solution assumes |gamma_nl| << |k|; a violation is
    reported as a warning because the formulas stay well defined.
    """

    k: complex
    gamma_nl: complex
    delta_k: float

    def __post_init__(self):
        if not math.isfinite(self.delta_k):
            raise ValueError("delta_k must be finite")
        if self.gamma_nl != 0 and abs(self.gamma_nl) >= abs(self.k):
            warnings.warn(
                "perturbative regime requires |gamma_nl| < |k|; "
                f"got |gamma_nl|={abs(self.gamma_nl):g}, |k|={abs(self.k):g}",
                stacklevel=2,
            )

    def in_guard_band(self, eps: float = GUARD_BAND_EPS) -> bool:
        """True when delta_k is within eps*|k| of 0 or of 2|k|."""
        ak = abs(self.k)
        return abs(self.delta_k) <= eps * ak or abs(abs(self.delta_k) - 2.0 * ak) <= eps * ak


@dataclass(frozen=True)
class MismatchFactors:
    """The pair 1 ± exp(-i delta_k z) at propagation length z."""

    g_plus: complex
    g_minus: complex
    z: float


@dataclass(frozen=True)
class EvolutionCoefficients:
    """The twelve first-order evolution coefficients at length z."""

    f1: complex
    f2: complex
    f3: complex
    f4: complex
    g1: complex
    g2: complex
    g3: complex
    g4: complex
    h1: complex
    h2: complex
    h3: complex
    h4: complex
    z: float


def one_minus_cexp(theta: float) -> complex:
    """Stable 1 - exp(-i*theta) for real theta.

    Uses 1 - cos(theta) = 2 sin^2(theta/2) so no cancellation occurs for
    |theta| << 1 (the regime delta_k*z ~ 1e-2 of interest here).
    """
    return complex(2.0 * math.sin(0.5 * theta) ** 2, math.sin(theta))


def mismatch_factors(params: CouplerParams, z: float) -> MismatchFactors:
    """Evaluate g_pm = 1 +- exp(-i*delta_k*z).

    g_minus is computed with the stable one-minus-exponential primitive and
    g_plus as 2 - g_minus, so g_plus + g_minus == 2 holds exactly.
    """
    if z < 0:
        raise ValueError("propagation length z must be >= 0")
    g_minus = one_minus_cexp(params.delta_k * z)
    return MismatchFactors(g_plus=2.0 - g_minus, g_minus=g_minus, z=z)


def evolution_coefficients(params: CouplerParams, z: float) -> EvolutionCoefficients:
    """Evaluate the twelve evolution coefficients at length z.

    Pure function of (params, z).  Raises GuardBandError when delta_k falls
    inside a guard band of relative width GUARD_BAND_EPS around 0 or 2|k|,
    where the closed-form denominators delta_k and 4|k|^2 - delta_k^2 are
    numerically unusable.
    """
    if z < 0:
        raise ValueError("propagation length z must be >= 0")
    if abs(params.k) == 0.0:
        raise ValueError("the closed forms need a nonzero linear coupling k")
    if params.in_guard_band():
        raise GuardBandError(
            f"delta_k={params.delta_k:g} is inside a guard band around 0 or "
            f"2|k|={2 * abs(params.k):g} (relative width {GUARD_BAND_EPS:g})"
        )

    k = params.k
    kc = k.conjugate()
    gc = params.gamma_nl.conjugate()
    gnl = params.gamma_nl
    ak = abs(k)
    dk = params.delta_k
    den = 4.0 * ak * ak - dk * dk

    mm = mismatch_factors(params, z)
    g_m, g_p = mm.g_minus, mm.g_plus

    f1 = complex(math.cos(ak * z))
    f2 = -1j * kc / ak * math.sin(ak * z)
    g1 = -f2.conjugate()
    g2 = f1

    f3 = (2.0 * kc * gc / den) * (g_m * f1 + (f2 / kc) * (dk - (2.0 * ak * ak / dk) * g_m))
    f4 = (4.0 * kc * kc * gc / (dk * den)) * g_m * f1 + (2.0 * kc * gc / den) * g_p * f2
    g3 = (2.0 * gc * k / den) * g_p * f2 - (2.0 * gc * (2.0 * ak * ak - dk * dk) * f1 / (dk * den)) * g_m
    g4 = (
        (4.0 * gc * ak * ak / (dk * den)) * f2
        - (2.0 * gc * (2.0 * ak * ak - dk * dk) / (dk * den)) * (g_p - 1.0) * f2
        + (2.0 * kc * gc / den) * g_m * f1
    )

    # The h block uses the conjugated mismatch factors; G+* - 1 = exp(+i dk z).
    g_mc = g_m.conjugate()
    e_p = g_p.conjugate() - 1.0
    s2 = math.sin(2.0 * ak * z)
    c2 = math.cos(2.0 * ak * z)
    bracket = 2.0 * ak * e_p * s2 - 1j * dk * (1.0 - e_p * c2)

    h1 = complex(1.0)
    h2 = gnl * g_mc / (2.0 * dk) - 1j * gnl / (2.0 * den) * bracket
    h3 = (-gnl * ak / (kc * den)) * (1j * dk * e_p * s2 + 2.0 * ak * (1.0 - e_p * c2))
    h4 = -gnl * ak * ak * g_mc / (2.0 * kc * kc * dk) - (1j * gnl * ak * ak / (2.0 * kc * kc * den)) * bracket

    return EvolutionCoefficients(f1, f2, f3, f4, g1, g2, g3, g4, h1, h2, h3, h4, z)
