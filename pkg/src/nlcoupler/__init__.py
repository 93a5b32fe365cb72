"""Quantum dynamics and nonclassicality witnesses for a codirectional
asymmetric nonlinear optical coupler (linear waveguide + quadratic waveguide
running second harmonic generation).

Layers:
  coeffs   -- first-order evolution coefficients of the field operators
  analytic -- closed-form witnesses on coherent inputs
  focksim  -- exact truncated-Fock-space oracle (matrix-free RK4)
  moments  -- witnesses as functions of normally-ordered moments
  sweep    -- config parsing, interaction-length sweeps, CSV/report output
"""

from .analytic import (
    PAIR_MODES,
    PAIRS,
    CoherentInput,
    InvalidOrder,
    WitnessKind,
    WitnessValue,
    amp_squared_squeezing,
    duan_pair,
    hoa,
    hz_pair,
    mean_photon_numbers,
    tripartite,
)
from .coeffs import (
    GUARD_BAND_EPS,
    CouplerParams,
    EvolutionCoefficients,
    GuardBandError,
    MismatchFactors,
    evolution_coefficients,
    mismatch_factors,
    one_minus_cexp,
)
from .focksim import (
    CutoffTooTight,
    FockCutoffs,
    OperatorWord,
    StateVector,
    StepTooCoarse,
    WordTooLong,
    coherent_product_state,
    default_step_count,
    evolve,
    generator_action,
    moment,
    overlap,
)
from .moments import (
    MissingMoment,
    MomentTable,
    TripartiteResult,
    TripartiteVerdict,
    amp_sq_from_moments,
    coherent_moment_table,
    duan_from_moments,
    hoa_from_moments,
    hz_from_moments,
    oracle_moment_table,
    tripartite_from_moments,
)
from .sweep import (
    ComparisonEntry,
    ComparisonReport,
    ConfigError,
    MissingEngine,
    OracleOptions,
    SweepConfig,
    SweepPointError,
    SweepRow,
    WitnessSelector,
    compare_report,
    emit_csv,
    emit_plotscript,
    parse_config,
    render_csv,
    run_sweep,
)

__all__ = [name for name in dir() if not name.startswith("_")]

__version__ = "0.1.0"
