"""Stochastic simulator for magic-state production and consumption.

The package answers one question end to end: given a Clifford+T/Rz circuit
and a magic-state production mechanism with F parallel units, how long does
the circuit take and how much space-time volume does it burn once production
aborts, cultivation restarts, synthesis retries, and 50%-failing injections
are all allowed to happen?

Layers, bottom up: rng and angles (keyed randomness, angle arithmetic),
circuit and qasm (DAG representation and the OpenQASM 2.0 subset front end),
production (the three mechanism models behind a common bank interface),
scheduler (the cycle-level simulation core), metrics (cost accounting),
sweep (design-space exploration), cli (file-emitting front end).
"""

from .angles import CLIFFORD_NAMES, angle_key, canonical, clifford_multiple, doubled, is_clifford
from .circuit import (
    CircuitDag,
    CircuitError,
    GateKind,
    GateNode,
    GateTag,
    StaticProfile,
    assign_priorities,
    expand_rz,
    longest_path_priorities,
    static_profile,
)
from .manifest import RunManifest, TOOL_VERSION, sha256_of
from .metrics import (
    CostModel,
    DemandStats,
    cost_model_for,
    demand_stats,
    overhead_ratio,
    q_total,
    space_time_volume,
    structural_predictors,
)
from .production import (
    Buffer,
    CultivationConfig,
    DistillationConfig,
    MechanismConfig,
    ProductionBank,
    RzSynthConfig,
    abort_rate_15to1,
    config_from_json,
    config_to_json,
    derive_config,
    deterministic_state_latency,
    expected_cycles_per_state,
    expected_throughput,
    make_bank,
    mechanism_family,
)
from .qasm import QasmError, lower_gates, load_table, parse_qasm
from .rng import Stream, mix64
from .scheduler import (
    DeadlockError,
    SimConfig,
    SimResult,
    SimulationError,
    SimulationMode,
    insert_fixup,
    sample_injection,
    simulate,
)
from .sweep import (
    SensitivityCell,
    SweepResult,
    SweepRow,
    aggregate_trials,
    f_naive,
    run_trials,
    sensitivity_grid,
    static_cycles,
    sweep_factories,
    unconstrained_units,
    write_sensitivity_csv,
    write_summary_json,
    write_sweep_csv,
)

__version__ = TOOL_VERSION

__all__ = [
    "Buffer",
    "CLIFFORD_NAMES",
    "CircuitDag",
    "CircuitError",
    "CostModel",
    "CultivationConfig",
    "DeadlockError",
    "DemandStats",
    "DistillationConfig",
    "GateKind",
    "GateNode",
    "GateTag",
    "MechanismConfig",
    "ProductionBank",
    "QasmError",
    "RunManifest",
    "RzSynthConfig",
    "SensitivityCell",
    "SimConfig",
    "SimResult",
    "SimulationError",
    "SimulationMode",
    "StaticProfile",
    "Stream",
    "SweepResult",
    "SweepRow",
    "TOOL_VERSION",
    "abort_rate_15to1",
    "aggregate_trials",
    "angle_key",
    "assign_priorities",
    "canonical",
    "clifford_multiple",
    "config_from_json",
    "config_to_json",
    "cost_model_for",
    "demand_stats",
    "derive_config",
    "deterministic_state_latency",
    "doubled",
    "expand_rz",
    "expected_cycles_per_state",
    "expected_throughput",
    "f_naive",
    "insert_fixup",
    "is_clifford",
    "load_table",
    "longest_path_priorities",
    "lower_gates",
    "make_bank",
    "mechanism_family",
    "mix64",
    "overhead_ratio",
    "parse_qasm",
    "q_total",
    "run_trials",
    "sample_injection",
    "sensitivity_grid",
    "sha256_of",
    "simulate",
    "space_time_volume",
    "static_cycles",
    "static_profile",
    "structural_predictors",
    "sweep_factories",
    "unconstrained_units",
    "write_sensitivity_csv",
    "write_summary_json",
    "write_sweep_csv",
]
