"""Closed-form nonclassicality witnesses on a three-mode coherent input.

Every witness here is the first-order (in the nonlinear coupling) expectation
over the product coherent input |alpha>|beta>|gamma>, written directly in
terms of the twelve evolution coefficients.  Values are reported signed; a
negative value certifies the corresponding nonclassical feature.

Conventions:
  * amplitude-squared squeezing witnesses come in (Y1, Y2) pairs that are
    exact negatives of each other;
  * the antibunching order n is the moment order, D(n) = <a†ⁿ aⁿ> - <a† a>ⁿ,
    with n = 2 the ordinary antibunching;
  * the two-mode entanglement pair is fixed to (a, b1), the only pair with a
    first-order closed form; the primed witness is the exact negative of the
    unprimed one at every order;
  * the summed-quadrature (EPR-type) inseparability witness is identically 0
    at first order for all three pairs, and is reported as such rather than
    omitted;
  * for tripartite witnesses, `modes` holds the first block of the
    bipartition (the split is modes | complement).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

from .coeffs import EvolutionCoefficients


class InvalidOrder(ValueError):
    """Witness order outside its allowed range."""


@dataclass(frozen=True)
class CoherentInput:
    """Complex amplitudes of the coherent inputs in modes a, b1, b2."""

    alpha: complex
    beta: complex
    gamma_amp: complex

    def __post_init__(self):
        for name in ("alpha", "beta", "gamma_amp"):
            v = complex(getattr(self, name))
            if not (math.isfinite(v.real) and math.isfinite(v.imag)):
                raise ValueError(f"{name} must be finite, got {v!r}")


class WitnessKind(Enum):
    AMP_SQ_SQUEEZING_Y1 = "AmpSqSqueezingY1"
    AMP_SQ_SQUEEZING_Y2 = "AmpSqSqueezingY2"
    HOA = "HOA"
    HZ_I = "HZ_I"
    HZ_II = "HZ_II"
    DUAN = "Duan"
    TRI_E = "Tri_E"
    TRI_EPRIME = "Tri_Eprime"
    FULL_SEP_TEST = "FullSepTest"


@dataclass(frozen=True)
class WitnessValue:
    """A named, ordered witness evaluation.  Negative value = nonclassical."""

    kind: WitnessKind
    modes: tuple[str, ...]
    order: tuple[int, ...]
    value: float

    def __post_init__(self):
        if any(o < 1 for o in self.order):
            raise InvalidOrder(f"order entries must be >= 1, got {self.order}")

    @property
    def nonclassical(self) -> bool:
        return self.value < 0


PAIRS = ("ab1", "ab2", "b1b2")
PAIR_MODES = {"ab1": ("a", "b1"), "ab2": ("a", "b2"), "b1b2": ("b1", "b2")}


def mean_photon_numbers(coeffs: EvolutionCoefficients, inp: CoherentInput) -> tuple[float, float, float]:
    """Coherent-state mean photon numbers <N_a>, <N_b1>, <N_b2> at length z."""
    c = coeffs
    a, b, g = inp.alpha, inp.beta, inp.gamma_amp
    ac, bc, gc = a.conjugate(), b.conjugate(), g.conjugate()

    def quad_form(x1, x2, x3, x4):
        cross = (
            x1.conjugate() * x2 * ac * b
            + x1.conjugate() * x3 * ac * bc * g
            + x1.conjugate() * x4 * ac * ac * g
            + x2.conjugate() * x3 * bc * bc * g
            + x2.conjugate() * x4 * ac * bc * g
        )
        return abs(x1) ** 2 * abs(a) ** 2 + abs(x2) ** 2 * abs(b) ** 2 + 2.0 * cross.real

    n_a = quad_form(c.f1, c.f2, c.f3, c.f4)
    n_b1 = quad_form(c.g1, c.g2, c.g3, c.g4)
    n_b2 = abs(g) ** 2 + 2.0 * (c.h2 * gc * b * b + c.h3 * gc * b * a + c.h4 * gc * a * a).real
    return (n_a, n_b1, n_b2)


def _asq_magnitude(x1, x2, x3, x4, a, b, g) -> float:
    amp = x1 * a + x2 * b
    return 2.0 * ((x1 * x4 + x2 * x3) * g * amp * amp).real


def amp_squared_squeezing(
    coeffs: EvolutionCoefficients, inp: CoherentInput, mode: str
) -> tuple[WitnessValue, WitnessValue]:
    """Amplitude-squared squeezing pair (A1, A2) for one mode.

    A1 and A2 are exact negatives, so one of the two quadratures is squeezed
    whenever the value is nonzero.  The b2 mode carries no first-order
    signature and returns (0, 0).
    """
    c = coeffs
    if mode == "a":
        x = _asq_magnitude(c.f1, c.f2, c.f3, c.f4, inp.alpha, inp.beta, inp.gamma_amp)
    elif mode == "b1":
        x = _asq_magnitude(c.g1, c.g2, c.g3, c.g4, inp.alpha, inp.beta, inp.gamma_amp)
    elif mode == "b2":
        x = 0.0
    else:
        raise ValueError(f"unknown mode {mode!r}")
    return (
        WitnessValue(WitnessKind.AMP_SQ_SQUEEZING_Y1, (mode,), (2,), x),
        WitnessValue(WitnessKind.AMP_SQ_SQUEEZING_Y2, (mode,), (2,), -x),
    )


def hoa(coeffs: EvolutionCoefficients, inp: CoherentInput, mode: str, n: int) -> WitnessValue:
    """Antibunching witness D(n) = <x†ⁿ xⁿ> - <x† x>ⁿ of moment order n >= 2."""
    if n < 2:
        raise InvalidOrder(f"antibunching order must be >= 2, got {n}")
    c = coeffs
    a, b, g = inp.alpha, inp.beta, inp.gamma_amp
    if mode == "a":
        amp = c.f1 * a + c.f2 * b
        mu = c.f1 * c.f4 + c.f2 * c.f3
    elif mode == "b1":
        amp = c.g1 * a + c.g2 * b
        mu = c.g1 * c.g4 + c.g2 * c.g3
    elif mode == "b2":
        return WitnessValue(WitnessKind.HOA, (mode,), (n,), 0.0)
    else:
        raise ValueError(f"unknown mode {mode!r}")
    d = math.comb(n, 2) * abs(amp) ** (2 * n - 4) * 2.0 * (g * mu * amp.conjugate() ** 2).real
    return WitnessValue(WitnessKind.HOA, (mode,), (n,), d)


def _hz11(coeffs: EvolutionCoefficients, inp: CoherentInput) -> float:
    """Lowest-order two-mode witness E^{1,1} for the pair (a, b1)."""
    c = coeffs
    a, b, g = inp.alpha, inp.beta, inp.gamma_amp
    ac, bc, gc = a.conjugate(), b.conjugate(), g.conjugate()
    f1, f2, f3, f4 = c.f1, c.f2, c.f3, c.f4
    g1, g2, g3, g4 = c.g1, c.g2, c.g3, c.g4
    e = (
        (abs(g1) ** 2 * f4.conjugate() * f1 + f3.conjugate() * f1 * g2.conjugate() * g1) * a * a * gc
        + (abs(f1) ** 2 * g1.conjugate() * g4 + f1.conjugate() * f2 * g1.conjugate() * g3) * ac * ac * g
        + (abs(g2) ** 2 * f3.conjugate() * f2 + f4.conjugate() * f2 * g1.conjugate() * g2) * b * b * gc
        + (abs(f2) ** 2 * g2.conjugate() * g3 + f2.conjugate() * f1 * g2.conjugate() * g4) * bc * bc * g
        + (abs(g1) ** 2 - abs(g2) ** 2)
        * (
            (f4.conjugate() * f2 - f3.conjugate() * f1) * a * b * gc
            - (g2.conjugate() * g4 - g1.conjugate() * g3) * ac * bc * g
        )
    )
    return e.real


def hz_pair(
    coeffs: EvolutionCoefficients, inp: CoherentInput, m: int, n: int
) -> tuple[WitnessValue, WitnessValue]:
    """Order-(m, n) two-mode entanglement pair (E, E') for modes (a, b1).

    E^{m,n} scales the lowest-order witness by m n |A|^{2m-2} |B|^{2n-2}
    with A, B the zeroth-order output amplitudes; E' = -E exactly.
    """
    if m < 1 or n < 1:
        raise InvalidOrder(f"entanglement orders must be >= 1, got ({m}, {n})")
    c = coeffs
    amp_a = c.f1 * inp.alpha + c.f2 * inp.beta
    amp_b = c.g1 * inp.alpha + c.g2 * inp.beta
    e = m * n * abs(amp_a) ** (2 * m - 2) * abs(amp_b) ** (2 * n - 2) * _hz11(coeffs, inp)
    modes = ("a", "b1")
    return (
        WitnessValue(WitnessKind.HZ_I, modes, (m, n), e),
        WitnessValue(WitnessKind.HZ_II, modes, (m, n), -e),
    )


def duan_pair(coeffs: EvolutionCoefficients, inp: CoherentInput, pair: str) -> WitnessValue:
    """Summed-quadrature inseparability witness; identically 0 at first order.

    The zero is the solution's prediction for all three pairs and is reported
    explicitly so sweep outputs document the null result.
    """
    if pair not in PAIR_MODES:
        raise ValueError(f"unknown pair {pair!r}, expected one of {PAIRS}")
    return WitnessValue(WitnessKind.DUAN, PAIR_MODES[pair], (), 0.0)


def tripartite(coeffs: EvolutionCoefficients, inp: CoherentInput) -> list[WitnessValue]:
    """Three-mode entanglement witnesses at order (1,1,1).

    The a|b1b2 and ab2|b1 splits inherit |gamma|^2 E^{1,1}; the ab1|b2 split
    carries no first-order signature; the product-of-means separability test
    is the exact negative of the a|b1b2 witness.
    """
    e11 = _hz11(coeffs, inp)
    w = abs(inp.gamma_amp) ** 2 * e11
    order = (1, 1, 1)
    all_modes = ("a", "b1", "b2")
    return [
        WitnessValue(WitnessKind.TRI_E, ("a",), order, w),
        WitnessValue(WitnessKind.TRI_EPRIME, ("a",), order, -w),
        WitnessValue(WitnessKind.TRI_E, ("a", "b2"), order, w),
        WitnessValue(WitnessKind.TRI_EPRIME, ("a", "b2"), order, -w),
        WitnessValue(WitnessKind.TRI_E, ("a", "b1"), order, 0.0),
        WitnessValue(WitnessKind.TRI_EPRIME, ("a", "b1"), order, 0.0),
        WitnessValue(WitnessKind.FULL_SEP_TEST, all_modes, order, -w),
    ]
