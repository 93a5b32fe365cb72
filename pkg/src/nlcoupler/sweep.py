"""Interaction-length sweeps with analytic and oracle witness engines.

A sweep walks a grid of interaction lengths (directly in z or in the
rescaled length Gamma*z), evaluates the selected witnesses at every grid
point with the closed-form engine and optionally with the Fock oracle, and
emits deterministic CSV, a plot script, and an analytic-vs-oracle
comparison report.

Config files are UTF-8 lines of `key=value`; `#` starts a comment.  Keys:

    k, gamma_nl, alpha, beta, gamma_amp   complex, written "(re,im)"
    delta_k                               real
    axis                                  GammaZ | Z        (default GammaZ)
    axis_min, axis_max, points            grid              (default 0, 0.1, 200)
    witness                               repeatable selector, e.g.
                                          asq:a  hoa:a:3  hz:ab1:1,1  duan:ab1  tri
    cutoffs                               oracle cutoffs "8,6,4"
    steps                                 oracle RK4 steps per point (default:
                                          |k| dz <= 1e-2 rule)
    oracle                                on | off          (default off)
    profile                               fig2: fill the stimulated-operation
                                          defaults for any omitted physics key

Witness columns are named per selector (asq_a_1, hoa_a_3, hz_ab1_1_1_I, ...);
when the oracle runs, each column is emitted twice with `_analytic` and
`_oracle` suffixes and per-point diagnostics (norm_drift, trunc_deficit) are
appended.  Grid points are independent work items: results are assembled in
grid order, so parallel execution changes no output bytes.
"""

from __future__ import annotations

import math
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import analytic, moments
from .analytic import PAIRS, CoherentInput
from .coeffs import CouplerParams, GuardBandError, evolution_coefficients
from .focksim import (
    MODES,
    CutoffTooTight,
    FockCutoffs,
    StepTooCoarse,
    coherent_product_state,
    default_step_count,
    evolve,
)

DEFAULT_CUTOFFS = FockCutoffs(8, 6, 4)
DEFAULT_AXIS = ("GammaZ", 0.0, 0.1, 200)
MAX_HZ_TOTAL_ORDER = 4  # joint moment word length ceiling
MAX_HOA_ORDER = 4

FIG2_PROFILE = {
    "k": "(0.1,0)",
    "gamma_nl": "(0.001,0)",
    "delta_k": "1e-4",
    "alpha": "(5,0)",
    "beta": "(2,0)",
    "gamma_amp": "(1,0)",
}

_TRI_COLUMNS = (
    "tri_a_b1b2",
    "tri_a_b1b2_p",
    "tri_ab2_b1",
    "tri_ab2_b1_p",
    "tri_ab1_b2",
    "tri_ab1_b2_p",
    "tri_fullsep",
)


class ConfigError(ValueError):
    """Malformed or inconsistent sweep configuration."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


class MissingEngine(ValueError):
    """Rows lack the paired analytic/oracle columns a comparison needs."""


@dataclass(frozen=True)
class WitnessSelector:
    """One witness selection: kind, target mode(s), order indices."""

    kind: str
    target: str
    orders: tuple[int, ...] = ()

    @classmethod
    def parse(cls, token: str, line: int | None = None) -> "WitnessSelector":
        parts = token.strip().split(":")
        kind = parts[0]
        try:
            if kind == "asq" and len(parts) == 2 and parts[1] in MODES:
                return cls("asq", parts[1])
            if kind == "hoa" and len(parts) == 3 and parts[1] in MODES:
                n = int(parts[2])
                if not 2 <= n <= MAX_HOA_ORDER:
                    raise ConfigError(f"hoa order must be in [2, {MAX_HOA_ORDER}], got {n}", line)
                return cls("hoa", parts[1], (n,))
            if kind == "hz" and len(parts) == 3 and parts[1] in PAIRS:
                m, n = (int(x) for x in parts[2].split(","))
                if m < 1 or n < 1 or m + n > MAX_HZ_TOTAL_ORDER:
                    raise ConfigError(
                        f"hz orders need m,n >= 1 and m+n <= {MAX_HZ_TOTAL_ORDER}, got ({m},{n})", line
                    )
                return cls("hz", parts[1], (m, n))
            if kind == "duan" and len(parts) == 2 and parts[1] in PAIRS:
                return cls("duan", parts[1])
            if kind == "tri" and len(parts) == 1:
                return cls("tri", "")
        except ConfigError:
            raise
        except ValueError:
            pass
        raise ConfigError(f"bad witness selector {token!r}", line)

    @property
    def analytic_available(self) -> bool:
        # no closed form exists for the hz pairs other than (a, b1)
        return not (self.kind == "hz" and self.target != "ab1")

    def columns(self) -> tuple[str, ...]:
        if self.kind == "asq":
            return (f"asq_{self.target}_1", f"asq_{self.target}_2")
        if self.kind == "hoa":
            return (f"hoa_{self.target}_{self.orders[0]}",)
        if self.kind == "hz":
            m, n = self.orders
            return (f"hz_{self.target}_{m}_{n}_I", f"hz_{self.target}_{m}_{n}_II")
        if self.kind == "duan":
            return (f"duan_{self.target}",)
        return _TRI_COLUMNS

    def words(self):
        if self.kind == "asq":
            return moments.amp_sq_words(self.target)
        if self.kind == "hoa":
            return moments.hoa_words(self.target, self.orders[0])
        if self.kind == "hz":
            return moments.hz_words(self.target, *self.orders)
        if self.kind == "duan":
            return moments.duan_words(self.target)
        return moments.tripartite_words()

    def eval_analytic(self, coeffs, inp) -> tuple[float, ...]:
        if self.kind == "asq":
            pair = analytic.amp_squared_squeezing(coeffs, inp, self.target)
            return (pair[0].value, pair[1].value)
        if self.kind == "hoa":
            return (analytic.hoa(coeffs, inp, self.target, self.orders[0]).value,)
        if self.kind == "hz":
            pair = analytic.hz_pair(coeffs, inp, *self.orders)
            return (pair[0].value, pair[1].value)
        if self.kind == "duan":
            return (analytic.duan_pair(coeffs, inp, self.target).value,)
        return tuple(v.value for v in analytic.tripartite(coeffs, inp))

    def eval_moments(self, table) -> tuple[float, ...]:
        if self.kind == "asq":
            pair = moments.amp_sq_from_moments(table, self.target)
            return (pair[0].value, pair[1].value)
        if self.kind == "hoa":
            return (moments.hoa_from_moments(table, self.target, self.orders[0]).value,)
        if self.kind == "hz":
            pair = moments.hz_from_moments(table, self.target, *self.orders)
            return (pair[0].value, pair[1].value)
        if self.kind == "duan":
            return (moments.duan_from_moments(table, self.target).value,)
        return tuple(v.value for v in moments.tripartite_from_moments(table).values)


@dataclass(frozen=True)
class OracleOptions:
    enabled: bool = False
    cutoffs: FockCutoffs = DEFAULT_CUTOFFS
    steps: int | None = None


@dataclass(frozen=True)
class SweepConfig:
    params: CouplerParams
    inp: CoherentInput
    witnesses: tuple[WitnessSelector, ...]
    axis: str = DEFAULT_AXIS[0]
    axis_min: float = DEFAULT_AXIS[1]
    axis_max: float = DEFAULT_AXIS[2]
    points: int = DEFAULT_AXIS[3]
    oracle: OracleOptions = OracleOptions()
    out: str | None = None
    plot: str | None = None
    report: str | None = None

    def __post_init__(self):
        if self.axis not in ("GammaZ", "Z"):
            raise ConfigError(f"axis must be GammaZ or Z, got {self.axis!r}")
        if self.points < 2:
            raise ConfigError(f"points must be >= 2, got {self.points}")
        if not self.axis_min < self.axis_max:
            raise ConfigError(f"need axis_min < axis_max, got [{self.axis_min}, {self.axis_max}]")
        if self.axis_min < 0:
            raise ConfigError("axis_min must be >= 0 (propagation length)")
        if not self.witnesses:
            raise ConfigError("no witnesses selected (need at least one witness= line)")

    def z_grid(self) -> np.ndarray:
        vals = np.linspace(self.axis_min, self.axis_max, self.points)
        if self.axis == "GammaZ":
            g = abs(self.params.gamma_nl)
            if g == 0.0:
                raise ConfigError("axis GammaZ needs gamma_nl != 0; use axis=Z")
            return vals / g
        return vals


@dataclass(frozen=True)
class SweepRow:
    z: float
    gamma_z: float
    values: dict[str, float]


def _parse_complex(text: str, key: str, line: int) -> complex:
    s = text.strip()
    try:
        if s.startswith("(") and s.endswith(")"):
            re_s, im_s = s[1:-1].split(",")
            return complex(float(re_s), float(im_s))
        return complex(float(s), 0.0)
    except ValueError:
        raise ConfigError(f"{key}: expected \"(re,im)\" or a real number, got {text!r}", line) from None


def _parse_float(text: str, key: str, line: int) -> float:
    try:
        return float(text)
    except ValueError:
        raise ConfigError(f"{key}: expected a real number, got {text!r}", line) from None


def _parse_int(text: str, key: str, line: int) -> int:
    try:
        return int(text)
    except ValueError:
        raise ConfigError(f"{key}: expected an integer, got {text!r}", line) from None


_COMPLEX_KEYS = ("k", "gamma_nl", "alpha", "beta", "gamma_amp")
_KNOWN_KEYS = set(_COMPLEX_KEYS) | {
    "delta_k",
    "axis",
    "axis_min",
    "axis_max",
    "points",
    "witness",
    "cutoffs",
    "steps",
    "oracle",
    "profile",
    "out",
    "plot",
    "report",
}


def parse_config(text: str) -> SweepConfig:
    """Parse the line-oriented key=value sweep configuration."""
    raw: dict[str, tuple[str, int]] = {}
    selectors: list[WitnessSelector] = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        if "=" not in stripped:
            raise ConfigError(f"expected key=value, got {stripped!r}", lineno)
        key, _, value = stripped.partition("=")
        key, value = key.strip(), value.strip()
        if key not in _KNOWN_KEYS:
            raise ConfigError(f"unknown key {key!r}", lineno)
        if key == "witness":
            selectors.append(WitnessSelector.parse(value, lineno))
            continue
        if key in raw:
            raise ConfigError(f"duplicate key {key!r} (first on line {raw[key][1]})", lineno)
        raw[key] = (value, lineno)

    if raw.get("profile", ("", 0))[0]:
        profile, lineno = raw.pop("profile")
        if profile != "fig2":
            raise ConfigError(f"unknown profile {profile!r}", lineno)
        for key, value in FIG2_PROFILE.items():
            raw.setdefault(key, (value, lineno))

    for key in (*_COMPLEX_KEYS, "delta_k"):
        if key not in raw:
            raise ConfigError(f"missing required key {key!r}")

    cvals = {key: _parse_complex(raw[key][0], key, raw[key][1]) for key in _COMPLEX_KEYS}
    params = CouplerParams(
        k=cvals["k"],
        gamma_nl=cvals["gamma_nl"],
        delta_k=_parse_float(raw["delta_k"][0], "delta_k", raw["delta_k"][1]),
    )
    inp = CoherentInput(cvals["alpha"], cvals["beta"], cvals["gamma_amp"])

    def scalar(key, default, parse):
        if key not in raw:
            return default
        value, lineno = raw[key]
        return parse(value, key, lineno)

    axis = scalar("axis", DEFAULT_AXIS[0], lambda v, k, ln: v)
    axis_min = scalar("axis_min", DEFAULT_AXIS[1], _parse_float)
    axis_max = scalar("axis_max", DEFAULT_AXIS[2], _parse_float)
    points = scalar("points", DEFAULT_AXIS[3], _parse_int)

    cutoffs = DEFAULT_CUTOFFS
    if "cutoffs" in raw:
        value, lineno = raw["cutoffs"]
        try:
            na, nb1, nb2 = (int(x) for x in value.split(","))
            cutoffs = FockCutoffs(na, nb1, nb2)
        except ValueError as e:
            raise ConfigError(f"cutoffs: expected three integers \"na,nb1,nb2\": {e}", lineno) from None
    steps = scalar("steps", None, _parse_int)
    if steps is not None and steps < 1:
        raise ConfigError("steps must be >= 1", raw["steps"][1])
    enabled = False
    if "oracle" in raw:
        value, lineno = raw["oracle"]
        if value not in ("on", "off"):
            raise ConfigError(f"oracle: expected on/off, got {value!r}", lineno)
        enabled = value == "on"

    return SweepConfig(
        params=params,
        inp=inp,
        witnesses=tuple(selectors),
        axis=axis,
        axis_min=axis_min,
        axis_max=axis_max,
        points=points,
        oracle=OracleOptions(enabled=enabled, cutoffs=cutoffs, steps=steps),
        out=raw.get("out", (None, 0))[0],
        plot=raw.get("plot", (None, 0))[0],
        report=raw.get("report", (None, 0))[0],
    )


def validate_engines(config: SweepConfig) -> None:
    """Reject selections that no enabled engine can evaluate."""
    if not config.oracle.enabled:
        for sel in config.witnesses:
            if not sel.analytic_available:
                raise ConfigError(
                    f"witness hz:{sel.target} has no closed form; enable the oracle engine"
                )


def _eval_point(config: SweepConfig, z: float) -> SweepRow:
    gamma_z = abs(config.params.gamma_nl) * z
    with_oracle = config.oracle.enabled
    values: dict[str, float] = {}

    coeffs = evolution_coefficients(config.params, z)
    table = None
    diagnostics = {}
    if with_oracle:
        state0 = coherent_product_state(config.inp, config.oracle.cutoffs)
        steps = config.oracle.steps or default_step_count(config.params, z)
        state = evolve(state0, config.params, z, steps)
        words = set()
        for sel in config.witnesses:
            words.update(sel.words())
        table = moments.oracle_moment_table(state, words)
        diagnostics = {"norm_drift": state.norm_drift, "trunc_deficit": state.truncation_deficit}

    for sel in config.witnesses:
        cols = sel.columns()
        analytic_vals = sel.eval_analytic(coeffs, config.inp) if sel.analytic_available else None
        oracle_vals = sel.eval_moments(table) if with_oracle else None
        for i, col in enumerate(cols):
            if not with_oracle:
                values[col] = analytic_vals[i]
                continue
            if analytic_vals is not None:
                values[f"{col}_analytic"] = analytic_vals[i]
            values[f"{col}_oracle"] = oracle_vals[i]
    values.update(diagnostics)
    return SweepRow(z=z, gamma_z=gamma_z, values=values)


def _eval_point_marked(args):
    config, z = args
    try:
        return _eval_point(config, z)
    except (GuardBandError, CutoffTooTight, StepTooCoarse) as e:
        return (z, f"{type(e).__name__}: {e}")


def run_sweep(config: SweepConfig, parallel: int = 1, fail_fast: bool = False) -> list[SweepRow]:
    """Evaluate all selected witnesses on the interaction-length grid.

    Rows come back in grid order regardless of `parallel`.  Numeric guard
    errors at individual points either propagate (fail_fast) or drop the
    point with a warning naming it (skip-and-mark).
    """
    validate_engines(config)
    zs = [float(z) for z in config.z_grid()]
    args = [(config, z) for z in zs]
    if parallel > 1:
        with ProcessPoolExecutor(max_workers=parallel) as pool:
            outcomes = list(pool.map(_eval_point_marked, args, chunksize=max(1, len(zs) // (4 * parallel))))
    else:
        outcomes = [_eval_point_marked(a) for a in args]

    rows: list[SweepRow] = []
    for outcome in outcomes:
        if isinstance(outcome, SweepRow):
            rows.append(outcome)
            continue
        z, message = outcome
        if fail_fast:
            raise SweepPointError(z, message)
        warnings.warn(f"skipping point z={z:g}: {message}", stacklevel=2)
    return rows


class SweepPointError(RuntimeError):
    """A grid point failed under the fail-fast policy."""

    def __init__(self, z: float, message: str):
        self.z = z
        super().__init__(f"point z={z:g}: {message}")


def _columns(rows: list[SweepRow]) -> list[str]:
    cols = list(rows[0].values)
    for row in rows[1:]:
        if list(row.values) != cols:
            raise ValueError("rows have inconsistent column sets")
    return cols


def render_csv(rows: list[SweepRow]) -> str:
    """CSV text with shortest round-trip decimals and LF line endings."""
    if not rows:
        raise ValueError("no rows to write")
    cols = _columns(rows)
    lines = [",".join(["z", "gamma_z", *cols])]
    for row in rows:
        cells = [repr(float(row.z)), repr(float(row.gamma_z))]
        cells += [repr(float(row.values[c])) for c in cols]
        lines.append(",".join(cells))
    return "\n".join(lines) + "\n"


def emit_csv(rows: list[SweepRow], path: str) -> None:
    text = render_csv(rows)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)


_PLOT_TEMPLATE = '''#!/usr/bin/env python3
"""Plot witness curves vs rescaled interaction length (auto-generated)."""
import csv
import sys

import matplotlib.pyplot as plt

path = sys.argv[1] if len(sys.argv) > 1 else {csv_path!r}
with open(path, newline="") as fh:
    reader = csv.DictReader(fh)
    rows = list(reader)

x = [float(r["gamma_z"]) for r in rows]
columns = {columns!r}
fig, ax = plt.subplots(figsize=(7, 4.5))
for name in columns:
    ax.plot(x, [float(r[name]) for r in rows], label=name)
ax.axhline(0.0, color="k", lw=0.8)
ax.set_xlabel("Gamma z")
ax.set_ylabel("witness value")
ax.legend(fontsize=8)
fig.tight_layout()
out = path.rsplit(".", 1)[0] + ".png"
fig.savefig(out, dpi=160)
print("wrote", out)
'''


def emit_plotscript(rows: list[SweepRow], path: str, csv_path: str = "sweep.csv") -> None:
    """Write a standalone script that draws each witness column vs gamma_z."""
    if not rows:
        raise ValueError("no rows to plot")
    cols = [c for c in _columns(rows) if c not in ("norm_drift", "trunc_deficit")]
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(_PLOT_TEMPLATE.format(csv_path=csv_path, columns=cols))


@dataclass(frozen=True)
class ComparisonEntry:
    witness: str
    max_abs_deviation: float
    extremum_value: float
    extremum_gamma_z: float
    deviation_at_extremum: float
    relative_at_extremum_pct: float
    scaling_ratio: float | None = None


@dataclass(frozen=True)
class ComparisonReport:
    entries: dict[str, ComparisonEntry]

    def to_text(self) -> str:
        lines = [
            f"{'witness':24s} {'max|dev|':>12s} {'extremum':>12s} {'at gz':>9s} "
            f"{'dev@ext':>12s} {'rel@ext%':>9s} {'ratio':>7s}"
        ]
        for e in self.entries.values():
            ratio = f"{e.scaling_ratio:7.2f}" if e.scaling_ratio is not None else "      -"
            lines.append(
                f"{e.witness:24s} {e.max_abs_deviation:12.4e} {e.extremum_value:12.4e} "
                f"{e.extremum_gamma_z:9.4f} {e.deviation_at_extremum:12.4e} "
                f"{e.relative_at_extremum_pct:9.3f} {ratio}"
            )
        return "\n".join(lines) + "\n"


def compare_report(rows: list[SweepRow], halved_rows: list[SweepRow] | None = None) -> ComparisonReport:
    """Per-witness deviation summary between the two engines.

    With a second sweep at halved nonlinear coupling, also reports the ratio
    of max deviations (the first-order solution's error should shrink ~4x).
    """
    if not rows:
        raise ValueError("no rows to compare")
    cols = _columns(rows)
    paired = [c[: -len("_analytic")] for c in cols if c.endswith("_analytic") and c[: -len("_analytic")] + "_oracle" in cols]
    if not paired:
        raise MissingEngine("rows carry no paired _analytic/_oracle columns")

    def max_dev(rws, base):
        return max(abs(r.values[base + "_analytic"] - r.values[base + "_oracle"]) for r in rws)

    entries = {}
    for base in paired:
        an = np.array([r.values[base + "_analytic"] for r in rows])
        orc = np.array([r.values[base + "_oracle"] for r in rows])
        dev = np.abs(an - orc)
        i_ext = int(np.argmax(np.abs(an)))
        ext = float(an[i_ext])
        dev_ext = float(dev[i_ext])
        rel = math.inf if ext == 0.0 else 100.0 * dev_ext / abs(ext)
        ratio = None
        if halved_rows is not None:
            half = max_dev(halved_rows, base)
            ratio = float(np.max(dev)) / half if half > 0 else math.inf
        entries[base] = ComparisonEntry(
            witness=base,
            max_abs_deviation=float(np.max(dev)),
            extremum_value=ext,
            extremum_gamma_z=float(rows[i_ext].gamma_z),
            deviation_at_extremum=dev_ext,
            relative_at_extremum_pct=rel,
            scaling_ratio=ratio,
        )
    return ComparisonReport(entries)
