"""Exact truncated-Fock-space oracle for the nonlinear coupler.

Three bosonic modes (a, b1, b2) are stored as a dense complex array indexed
by (n_a, n_b1, n_b2), C order, so n_b2 varies fastest.  The spatial generator

    G(z) = -k a b1† - k* a† b1 - Γ b1² b2† e^{+i Δk z} - Γ* b1†² b2 e^{-i Δk z}

is applied matrix-free through the ladder rules; amplitudes pushed past a
cutoff are dropped (absorbing boundary).  States evolve along z by classical
fixed-step RK4 on i dψ/dz = -G(z) ψ, with the explicit z dependence of G
honoured at the substep abscissae.  The sign convention is anchored by the
Γ = 0 limit, which must reproduce the beam-splitter coefficients
f1 = cos|k|z, f2 = -i (k*/|k|) sin|k|z of the perturbative solution.

Normally-ordered moments are evaluated as inner products between two
annihilation-string images of the state, so no creation operator is ever
applied and the truncation box is never left.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Iterable

import numpy as np

from .analytic import CoherentInput
from .coeffs import CouplerParams

MODES = ("a", "b1", "b2")
DIM_CEILING = 2_000_000
MAX_WORD_LEN = 8
DEFICIT_LIMIT = 1e-6
STEP_CHANGE_LIMIT = 1e-6
KDZ_PER_STEP = 1e-2


class CutoffTooTight(ValueError):
    """Truncation would discard more initial-state mass than allowed."""


class StepTooCoarse(RuntimeError):
    """Doubling the RK4 step count still changes amplitudes noticeably."""


class WordTooLong(ValueError):
    """Operator word exceeds the supported length."""


@dataclass(frozen=True)
class FockCutoffs:
    """Inclusive per-mode maximum photon numbers."""

    n_a_max: int
    n_b1_max: int
    n_b2_max: int

    def __post_init__(self):
        for name in ("n_a_max", "n_b1_max", "n_b2_max"):
            v = getattr(self, name)
            if not isinstance(v, (int, np.integer)) or v < 0:
                raise ValueError(f"{name} must be a non-negative integer, got {v!r}")
        if self.dim > DIM_CEILING:
            raise ValueError(f"truncated dimension {self.dim} exceeds ceiling {DIM_CEILING}")

    @property
    def shape(self) -> tuple[int, int, int]:
        return (self.n_a_max + 1, self.n_b1_max + 1, self.n_b2_max + 1)

    @property
    def dim(self) -> int:
        return (self.n_a_max + 1) * (self.n_b1_max + 1) * (self.n_b2_max + 1)

    def bumped(self, extra: int = 2) -> "FockCutoffs":
        """Cutoffs enlarged by `extra` in every mode (convergence checks)."""
        return FockCutoffs(self.n_a_max + extra, self.n_b1_max + extra, self.n_b2_max + extra)


@dataclass(frozen=True)
class OperatorWord:
    """A normally-ordered product of ladder operators.

    Letters are (mode, dagger) pairs; within each mode every daggered letter
    must precede every undaggered one.  Operators of different modes commute,
    so a word is fully described by its per-mode dagger/lowering counts.
    """

    letters: tuple[tuple[str, bool], ...]

    def __post_init__(self):
        if len(self.letters) > MAX_WORD_LEN:
            raise WordTooLong(f"word of length {len(self.letters)} exceeds {MAX_WORD_LEN}")
        seen_lowering = {m: False for m in MODES}
        for letter in self.letters:
            mode, dagger = letter
            if mode not in MODES or not isinstance(dagger, bool):
                raise ValueError(f"invalid letter {letter!r}")
            if dagger and seen_lowering[mode]:
                raise ValueError(f"word {self.letters!r} is not normally ordered in mode {mode}")
            if not dagger:
                seen_lowering[mode] = True

    @classmethod
    def from_counts(cls, a=(0, 0), b1=(0, 0), b2=(0, 0)) -> "OperatorWord":
        """Build a word from per-mode (dagger, lowering) exponent pairs."""
        letters = []
        for mode, (ndag, nlow) in zip(MODES, (a, b1, b2)):
            letters += [(mode, True)] * ndag + [(mode, False)] * nlow
        return cls(tuple(letters))

    def counts(self) -> dict[str, tuple[int, int]]:
        out = {m: [0, 0] for m in MODES}
        for mode, dagger in self.letters:
            out[mode][0 if dagger else 1] += 1
        return {m: (c[0], c[1]) for m, c in out.items()}

    def adjoint(self) -> "OperatorWord":
        c = self.counts()
        return OperatorWord.from_counts(*((c[m][1], c[m][0]) for m in MODES))


@dataclass(frozen=True)
class StateVector:
    """Truncated three-mode state.

    truncation_deficit is the probability mass of the untruncated target
    state outside the cutoffs, recorded at construction.  norm_drift holds
    the absolute deviation of the norm from 1 measured before the most
    recent renormalization; step_error the step-halving estimate when a
    convergence check was requested.
    """

    cutoffs: FockCutoffs
    amplitudes: np.ndarray
    truncation_deficit: float
    norm_drift: float = 0.0
    step_error: float | None = None

    def __post_init__(self):
        if self.amplitudes.shape != self.cutoffs.shape:
            raise ValueError(
                f"amplitude shape {self.amplitudes.shape} does not match cutoffs {self.cutoffs.shape}"
            )
        if self.truncation_deficit < 0:
            raise ValueError("truncation_deficit must be >= 0")

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))


def _coherent_column(alpha: complex, n_max: int) -> tuple[np.ndarray, float]:
    """Truncated coherent amplitudes alpha^n/sqrt(n!) and the Poisson mass kept."""
    col = np.empty(n_max + 1, dtype=complex)
    col[0] = 1.0
    for n in range(1, n_max + 1):
        col[n] = col[n - 1] * alpha / math.sqrt(n)
    weight = math.exp(-abs(alpha) ** 2)
    kept = weight * float(np.sum(np.abs(col) ** 2))
    return col * math.sqrt(weight), min(kept, 1.0)


def coherent_product_state(inp: CoherentInput, cutoffs: FockCutoffs) -> StateVector:
    """Truncated |alpha>|beta>|gamma> product state, renormalized.

    Raises CutoffTooTight when the truncated-away probability mass exceeds
    DEFICIT_LIMIT (the cutoffs are unusable for these amplitudes).
    """
    col_a, kept_a = _coherent_column(inp.alpha, cutoffs.n_a_max)
    col_b1, kept_b1 = _coherent_column(inp.beta, cutoffs.n_b1_max)
    col_b2, kept_b2 = _coherent_column(inp.gamma_amp, cutoffs.n_b2_max)
    deficit = max(1.0 - kept_a * kept_b1 * kept_b2, 0.0)
    if deficit > DEFICIT_LIMIT:
        raise CutoffTooTight(
            f"truncation deficit {deficit:.3e} exceeds {DEFICIT_LIMIT:g} for cutoffs "
            f"({cutoffs.n_a_max},{cutoffs.n_b1_max},{cutoffs.n_b2_max})"
        )
    amps = np.einsum("i,j,k->ijk", col_a, col_b1, col_b2)
    amps /= np.linalg.norm(amps)
    return StateVector(cutoffs=cutoffs, amplitudes=amps, truncation_deficit=deficit)


class _GeneratorKernel:
    """Precomputed ladder factors for matrix-free application of G(z)."""

    def __init__(self, cutoffs: FockCutoffs, params: CouplerParams):
        na, nb1, nb2 = cutoffs.shape
        sa = np.sqrt(np.arange(na))
        sb1 = np.sqrt(np.arange(nb1))
        sb2 = np.sqrt(np.arange(nb2))
        # exchange factor sqrt(na+1)*sqrt(nb1) on the (a -> b1) target block
        self.pk = sa[1:, None] * sb1[None, 1:]
        # SHG factor sqrt((nb1+1)(nb1+2))*sqrt(nb2) on the (b1^2 -> b2) target block
        j = np.arange(max(nb1 - 2, 0))
        t2 = np.sqrt((j + 1.0) * (j + 2.0))
        self.pg = t2[:, None] * sb2[None, 1:]
        self.k = params.k
        self.gnl = params.gamma_nl
        self.dk = params.delta_k

    def apply(self, psi: np.ndarray, z: float, out: np.ndarray) -> np.ndarray:
        """out <- G(z) psi (amplitudes beyond the cutoffs are dropped)."""
        k, gnl = self.k, self.gnl
        phase = np.exp(1j * self.dk * z)
        out[:] = 0.0
        if self.pk.size:
            out[:-1, 1:, :] += (-k) * self.pk[:, :, None] * psi[1:, :-1, :]
            out[1:, :-1, :] += (-k.conjugate()) * self.pk[:, :, None] * psi[:-1, 1:, :]
        if self.pg.size:
            out[:, :-2, 1:] += (-gnl * phase) * self.pg[None, :, :] * psi[:, 2:, :-1]
            out[:, 2:, :-1] += (-gnl.conjugate() * phase.conjugate()) * self.pg[None, :, :] * psi[:, :-2, 1:]
        return out


def generator_action(state: StateVector, params: CouplerParams, z: float) -> StateVector:
    """Apply G(z) to the state once; the result is a raw vector, not renormalized."""
    kernel = _GeneratorKernel(state.cutoffs, params)
    out = kernel.apply(state.amplitudes, z, np.empty_like(state.amplitudes))
    return replace(state, amplitudes=out)


def default_step_count(params: CouplerParams, z_span: float) -> int:
    """Steps so that |k| * dz <= KDZ_PER_STEP (the fast oscillation scale)."""
    return max(1, math.ceil(abs(params.k) * abs(z_span) / KDZ_PER_STEP))


def _rk4(amps: np.ndarray, kernel: _GeneratorKernel, z0: float, z1: float, steps: int) -> np.ndarray:
    """Integrate d psi/dz = i G(z) psi from z0 to z1 with `steps` RK4 steps."""
    psi = amps.copy()
    h = (z1 - z0) / steps
    buf = np.empty_like(psi)
    for i in range(steps):
        z = z0 + i * h
        k1 = 1j * kernel.apply(psi, z, buf)
        k2 = 1j * kernel.apply(psi + (0.5 * h) * k1, z + 0.5 * h, buf)
        k3 = 1j * kernel.apply(psi + (0.5 * h) * k2, z + 0.5 * h, buf)
        k4 = 1j * kernel.apply(psi + h * k3, z + h, buf)
        psi += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    return psi


def evolve(
    state: StateVector,
    params: CouplerParams,
    z_final: float,
    steps: int | None = None,
    *,
    z_start: float = 0.0,
    check_convergence: bool = False,
    renormalize: bool = True,
) -> StateVector:
    """Propagate the state from z_start to z_final.

    steps defaults to the |k|*dz <= KDZ_PER_STEP rule.  The returned state
    records the pre-renormalization norm drift; with check_convergence the
    integration is repeated at doubled resolution and StepTooCoarse is raised
    if any amplitude changes by more than STEP_CHANGE_LIMIT (the halved-step
    result is kept and the estimate stored in step_error).
    """
    if z_final < z_start:
        raise ValueError("z_final must be >= z_start")
    if steps is None:
        steps = default_step_count(params, z_final - z_start)
    if steps < 1:
        raise ValueError("steps must be >= 1")
    if z_final == z_start:
        return replace(state, norm_drift=0.0, step_error=0.0 if check_convergence else None)

    kernel = _GeneratorKernel(state.cutoffs, params)
    psi = _rk4(state.amplitudes, kernel, z_start, z_final, steps)
    step_error = None
    if check_convergence:
        fine = _rk4(state.amplitudes, kernel, z_start, z_final, 2 * steps)
        step_error = float(np.max(np.abs(fine - psi)))
        if step_error > STEP_CHANGE_LIMIT:
            raise StepTooCoarse(
                f"doubling {steps} steps changes amplitudes by {step_error:.3e} "
                f"(> {STEP_CHANGE_LIMIT:g})"
            )
        psi = fine
    drift = abs(float(np.linalg.norm(psi)) - 1.0)
    if renormalize:
        psi /= np.linalg.norm(psi)
    return replace(state, amplitudes=psi, norm_drift=drift, step_error=step_error)


def _lowered(amps: np.ndarray, axis: int, power: int, roots: np.ndarray) -> np.ndarray:
    """Apply the lowering operator `power` times along one mode axis."""
    psi = amps
    sel = [slice(None)] * 3
    dst = [slice(None)] * 3
    for _ in range(power):
        out = np.zeros_like(psi)
        sel[axis] = slice(1, None)
        dst[axis] = slice(None, -1)
        shape = [1, 1, 1]
        shape[axis] = -1
        out[tuple(dst)] = psi[tuple(sel)] * roots[1:].reshape(shape)
        psi = out
    return psi


def moment(state: StateVector, word: OperatorWord) -> complex:
    """Expectation of a normally-ordered operator word.

    Computed as <D psi, U psi> where D is the annihilation string adjoint to
    the daggered part and U the undaggered part, so only lowering operators
    are ever applied and no amplitude leaves the truncation box.
    """
    counts = word.counts()
    shape = state.cutoffs.shape
    roots = [np.sqrt(np.arange(n)) for n in shape]
    bra = state.amplitudes
    ket = state.amplitudes
    for axis, mode in enumerate(MODES):
        ndag, nlow = counts[mode]
        if ndag:
            bra = _lowered(bra, axis, ndag, roots[axis])
        if nlow:
            ket = _lowered(ket, axis, nlow, roots[axis])
    return complex(np.vdot(bra, ket))


def moments(state: StateVector, words: Iterable[OperatorWord]) -> dict[OperatorWord, complex]:
    return {w: moment(state, w) for w in words}


def overlap(s1: StateVector, s2: StateVector) -> complex:
    """Inner product <s1|s2> (states must share cutoffs)."""
    if s1.cutoffs != s2.cutoffs:
        raise ValueError("states have different cutoffs")
    return complex(np.vdot(s1.amplitudes, s2.amplitudes))
