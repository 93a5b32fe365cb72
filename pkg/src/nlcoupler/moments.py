"""Witness criteria expressed through normally-ordered moments.

Every nonclassicality criterion used in this package reduces to a handful of
normally-ordered expectation values, so any state source able to produce a
MomentTable (the Fock oracle, or the coherent-state factorization used for
validation) can evaluate every witness, including the mode pairs for which
no closed form exists.

The commutator bookkeeping is done once, in the reductions below:

  amplitude-squared squeezing (quadratures built from x^2):
      A1 =  Re<x⁴>/2 + <x†²x²>/2 - (Re<x²>)²
      A2 = -Re<x⁴>/2 + <x†²x²>/2 - (Im<x²>)²
  antibunching:       D(n) = <x†ⁿxⁿ> - <x†x>ⁿ
  two-mode pair:      E  = <x†ᵐxᵐ y†ⁿyⁿ> - |<xᵐ y†ⁿ>|²
                      E' = <x†ᵐxᵐ><y†ⁿyⁿ> - |<xᵐ yⁿ>|²
  summed quadratures: d  = 2<x†x> + 2<y†y> + 4 Re<xy†> - 2|<x>+<y>|²
  tripartite split X|Y:
      E  = <N_a N_b1 N_b2> - |<(prod X)(prod Y)†>|²
      E' = <joint N over X><joint N over Y> - |<a b1 b2>|²
  full separability:  <N_a><N_b1><N_b2> - |<a b1 b2>|²

All reduce to exactly 0 on coherent product states (the classical boundary).
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Literal

from .analytic import PAIR_MODES, CoherentInput, InvalidOrder, WitnessKind, WitnessValue
from .focksim import MODES, OperatorWord, StateVector, moment


class MissingMoment(LookupError):
    """The moment table lacks a required word (and its adjoint)."""


def _word(**counts) -> OperatorWord:
    return OperatorWord.from_counts(**counts)


def _nw(mode: str, p: int = 1) -> OperatorWord:
    """Diagonal word <x†ᵖ xᵖ> for one mode."""
    return _word(**{mode: (p, p)})


@dataclass(frozen=True)
class MomentTable:
    """Map from operator words to expectation values, with provenance.

    Lookups fall back to the adjoint word via hermiticity,
    <W> = conj(<W†>).
    """

    values: dict[OperatorWord, complex]
    provenance: Literal["oracle", "analytic"]

    def get(self, word: OperatorWord) -> complex:
        if word in self.values:
            return self.values[word]
        adj = word.adjoint()
        if adj in self.values:
            return self.values[adj].conjugate()
        raise MissingMoment(f"moment table ({self.provenance}) lacks word {word.letters!r}")

    def check(self, tol: float = 1e-10) -> None:
        """Verify hermiticity of stored pairs and reality of diagonal words."""
        scale = max((abs(v) for v in self.values.values()), default=1.0)
        for w, v in self.values.items():
            adj = w.adjoint()
            if adj in self.values and abs(v - self.values[adj].conjugate()) > tol * max(scale, 1.0):
                raise ValueError(f"hermiticity violated for word {w.letters!r}")
            if w == adj:
                if abs(v.imag) > tol * max(scale, 1.0) or v.real < -tol * max(scale, 1.0):
                    raise ValueError(f"diagonal word {w.letters!r} has non-physical value {v!r}")


def oracle_moment_table(state: StateVector, words: Iterable[OperatorWord]) -> MomentTable:
    return MomentTable({w: moment(state, w) for w in words}, provenance="oracle")


def coherent_moment_table(inp: CoherentInput, words: Iterable[OperatorWord]) -> MomentTable:
    """Exact moments of the (untruncated) coherent product state.

    Normally-ordered words factorize into powers of the amplitudes, which is
    what makes coherent states the classical boundary of every witness here.
    """
    amps = {"a": complex(inp.alpha), "b1": complex(inp.beta), "b2": complex(inp.gamma_amp)}
    values: dict[OperatorWord, complex] = {}
    for w in words:
        v = 1.0 + 0.0j
        for mode, (ndag, nlow) in w.counts().items():
            v *= amps[mode].conjugate() ** ndag * amps[mode] ** nlow
        values[w] = v
    return MomentTable(values, provenance="analytic")


# ---------------------------------------------------------------------------
# witness evaluations


def amp_sq_words(mode: str) -> list[OperatorWord]:
    return [_word(**{mode: (0, 2)}), _word(**{mode: (0, 4)}), _word(**{mode: (2, 2)})]


def amp_sq_from_moments(t: MomentTable, mode: str) -> tuple[WitnessValue, WitnessValue]:
    x2 = t.get(_word(**{mode: (0, 2)}))
    x4 = t.get(_word(**{mode: (0, 4)}))
    x22 = t.get(_word(**{mode: (2, 2)})).real
    a1 = 0.5 * x4.real + 0.5 * x22 - x2.real**2
    a2 = -0.5 * x4.real + 0.5 * x22 - x2.imag**2
    return (
        WitnessValue(WitnessKind.AMP_SQ_SQUEEZING_Y1, (mode,), (2,), a1),
        WitnessValue(WitnessKind.AMP_SQ_SQUEEZING_Y2, (mode,), (2,), a2),
    )


def hoa_words(mode: str, n: int) -> list[OperatorWord]:
    return [_nw(mode, n), _nw(mode)]


def hoa_from_moments(t: MomentTable, mode: str, n: int) -> WitnessValue:
    if n < 2:
        raise InvalidOrder(f"antibunching order must be >= 2, got {n}")
    d = t.get(_nw(mode, n)).real - t.get(_nw(mode)).real ** n
    return WitnessValue(WitnessKind.HOA, (mode,), (n,), d)


def _pair(pair: str) -> tuple[str, str]:
    try:
        return PAIR_MODES[pair]
    except KeyError:
        raise ValueError(f"unknown pair {pair!r}, expected one of {tuple(PAIR_MODES)}") from None


def hz_words(pair: str, m: int, n: int) -> list[OperatorWord]:
    x, y = _pair(pair)
    return [
        _word(**{x: (m, m), y: (n, n)}),
        _word(**{x: (0, m), y: (n, 0)}),
        _nw(x, m),
        _nw(y, n),
        _word(**{x: (0, m), y: (0, n)}),
    ]


def hz_from_moments(t: MomentTable, pair: str, m: int, n: int) -> tuple[WitnessValue, WitnessValue]:
    """Order-(m, n) two-mode entanglement pair (E, E') for any mode pair."""
    if m < 1 or n < 1:
        raise InvalidOrder(f"entanglement orders must be >= 1, got ({m}, {n})")
    x, y = _pair(pair)
    e = t.get(_word(**{x: (m, m), y: (n, n)})).real - abs(t.get(_word(**{x: (0, m), y: (n, 0)}))) ** 2
    ep = t.get(_nw(x, m)).real * t.get(_nw(y, n)).real - abs(t.get(_word(**{x: (0, m), y: (0, n)}))) ** 2
    modes = (x, y)
    return (
        WitnessValue(WitnessKind.HZ_I, modes, (m, n), e),
        WitnessValue(WitnessKind.HZ_II, modes, (m, n), ep),
    )


def duan_words(pair: str) -> list[OperatorWord]:
    x, y = _pair(pair)
    return [
        _nw(x),
        _nw(y),
        _word(**{x: (0, 1), y: (1, 0)}),
        _word(**{x: (0, 1)}),
        _word(**{y: (0, 1)}),
    ]


def duan_from_moments(t: MomentTable, pair: str) -> WitnessValue:
    x, y = _pair(pair)
    xy_dag = t.get(_word(**{x: (0, 1), y: (1, 0)}))
    mx = t.get(_word(**{x: (0, 1)}))
    my = t.get(_word(**{y: (0, 1)}))
    d = (
        2.0 * t.get(_nw(x)).real
        + 2.0 * t.get(_nw(y)).real
        + 4.0 * xy_dag.real
        - 2.0 * abs(mx + my) ** 2
    )
    return WitnessValue(WitnessKind.DUAN, (x, y), (), d)


class TripartiteVerdict(Enum):
    ENTANGLED = "entangled"
    INCONCLUSIVE = "inconclusive"
    NOT_APPLICABLE = "not-applicable"


@dataclass(frozen=True)
class TripartiteResult:
    """Tripartite witness values plus the (sufficiency-only) verdict.

    The criteria are sufficient, never necessary: ENTANGLED means full
    tripartite entanglement is certified (the separability bound is violated
    and one complete set of split criteria fires); INCONCLUSIVE means at
    least one criterion failed to fire, which says nothing about
    separability; NOT_APPLICABLE means every value is exactly zero, so the
    criteria carry no information at all (e.g. a coherent product state).
    """

    values: list[WitnessValue]
    unprimed_all_negative: bool
    primed_all_negative: bool
    full_sep_violated: bool
    verdict: TripartiteVerdict


_TRI_CROSS = {
    ("a",): _word(a=(0, 1), b1=(1, 0), b2=(1, 0)),
    ("a", "b2"): _word(a=(0, 1), b1=(1, 0), b2=(0, 1)),
    ("a", "b1"): _word(a=(0, 1), b1=(0, 1), b2=(1, 0)),
}


def tripartite_words() -> list[OperatorWord]:
    words = [
        _word(a=(1, 1), b1=(1, 1), b2=(1, 1)),
        _word(a=(0, 1), b1=(0, 1), b2=(0, 1)),
        _word(a=(1, 1), b1=(1, 1)),
        _word(a=(1, 1), b2=(1, 1)),
        _word(b1=(1, 1), b2=(1, 1)),
        _nw("a"),
        _nw("b1"),
        _nw("b2"),
    ]
    return words + list(_TRI_CROSS.values())


def tripartite_from_moments(t: MomentTable) -> TripartiteResult:
    """Evaluate all order-(1,1,1) split witnesses and the separability test.

    For each bipartition the `modes` field of the returned values names the
    first block (split = block | complement).
    """
    triple = t.get(_word(a=(1, 1), b1=(1, 1), b2=(1, 1))).real
    abb = abs(t.get(_word(a=(0, 1), b1=(0, 1), b2=(0, 1)))) ** 2
    n = {m: t.get(_nw(m)).real for m in MODES}
    joint = {
        ("a", "b1"): t.get(_word(a=(1, 1), b1=(1, 1))).real,
        ("a", "b2"): t.get(_word(a=(1, 1), b2=(1, 1))).real,
        ("b1", "b2"): t.get(_word(b1=(1, 1), b2=(1, 1))).real,
    }
    order = (1, 1, 1)

    values = []
    # split block | complement; E' multiplies the joint moments of the blocks
    for block, e_prime_product in (
        (("a",), n["a"] * joint[("b1", "b2")]),
        (("a", "b2"), joint[("a", "b2")] * n["b1"]),
        (("a", "b1"), joint[("a", "b1")] * n["b2"]),
    ):
        e = triple - abs(t.get(_TRI_CROSS[block])) ** 2
        values.append(WitnessValue(WitnessKind.TRI_E, block, order, e))
        values.append(WitnessValue(WitnessKind.TRI_EPRIME, block, order, e_prime_product - abb))
    full_sep = n["a"] * n["b1"] * n["b2"] - abb
    values.append(WitnessValue(WitnessKind.FULL_SEP_TEST, ("a", "b1", "b2"), order, full_sep))

    unprimed = all(v.value < 0 for v in values if v.kind is WitnessKind.TRI_E)
    primed = all(v.value < 0 for v in values if v.kind is WitnessKind.TRI_EPRIME)
    violated = full_sep < 0
    if all(v.value == 0.0 for v in values):
        verdict = TripartiteVerdict.NOT_APPLICABLE
    elif violated and (unprimed or primed):
        verdict = TripartiteVerdict.ENTANGLED
    else:
        verdict = TripartiteVerdict.INCONCLUSIVE
    return TripartiteResult(values, unprimed, primed, violated, verdict)
