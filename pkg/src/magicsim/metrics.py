"""Cost and demand metrics computed from circuits and simulation outputs.

The qubit-cost accounting is deliberately abstract: a CostModel prices
logical circuit qubits and production units in the same "qubit units", with
two presets. logical-tiles counts surface-code tiles (one per logical qubit,
whatever each mechanism's config says per unit). physical counts physical
qubits, pricing a logical patch at 2d^2 with the distance tied to the
mechanism's operating point.
"""

from __future__ import annotations

from dataclasses import dataclass

from .circuit import CircuitDag, StaticProfile
from .production import (
    CultivationConfig,
    DistillationConfig,
    MechanismConfig,
    RzSynthConfig,
)

__all__ = [
    "CostModel",
    "DemandStats",
    "cost_model_for",
    "demand_stats",
    "overhead_ratio",
    "q_total",
    "space_time_volume",
    "structural_predictors",
]

# The 15-to-1 protocol's standard operating point; its footprint is quoted
# as a whole-factory count rather than derived from tile arithmetic.
_DISTILLATION_PATCH_DISTANCE = 7
_DISTILLATION_FACTORY_PHYSICAL = 810


@dataclass(frozen=True, slots=True)
class CostModel:
    unit_mode: str
    cost_per_logical_qubit: int
    cost_per_production_unit: int

    def __post_init__(self) -> None:
        if self.cost_per_logical_qubit <= 0 or self.cost_per_production_unit <= 0:
            raise ValueError("cost model entries must be positive")


def cost_model_for(unit_mode: str, cfg: MechanismConfig) -> CostModel:
    """Resolve one of the two cost presets for a mechanism config."""
    if unit_mode == "logical-tiles":
        if isinstance(cfg, DistillationConfig):
            per_unit = cfg.cost_per_factory
        else:
            per_unit = cfg.cost_per_unit
        return CostModel(unit_mode, 1, per_unit)
    if unit_mode == "physical":
        if isinstance(cfg, DistillationConfig):
            d = _DISTILLATION_PATCH_DISTANCE
            return CostModel(unit_mode, 2 * d * d, _DISTILLATION_FACTORY_PHYSICAL)
        if isinstance(cfg, CultivationConfig):
            patch = 2 * cfg.d2 * cfg.d2
            return CostModel(unit_mode, patch, patch)
        if isinstance(cfg, RzSynthConfig):
            patch = 2 * cfg.d * cfg.d
            return CostModel(unit_mode, patch, patch)
        raise TypeError(f"not a mechanism config: {cfg!r}")
    raise ValueError(f"unit_mode must be 'logical-tiles' or 'physical', not {unit_mode!r}")


def q_total(logical_qubits: int, f_units: int, cm: CostModel) -> int:
    """Total qubit units: the circuit's own qubits plus F production units."""
    if logical_qubits < 0 or f_units < 0:
        raise ValueError("counts must be non-negative")
    return (
        logical_qubits * cm.cost_per_logical_qubit
        + f_units * cm.cost_per_production_unit
    )


def space_time_volume(cycles: int, qubit_units: int) -> int:
    """Exact product of cycle count and qubit cost."""
    if cycles < 0 or qubit_units < 0:
        raise ValueError("cycles and qubit units must be non-negative")
    return cycles * qubit_units


def overhead_ratio(cycles: int, static_cycles: int) -> float:
    """Slowdown relative to the same circuit's resource-unconstrained run."""
    if static_cycles <= 0:
        raise ValueError("static cycle count must be positive")
    return cycles / static_cycles


@dataclass(frozen=True, slots=True)
class DemandStats:
    peak: int
    mean: float
    peak_reduction: float | None

    def as_dict(self) -> dict:
        return {"peak": self.peak, "mean": self.mean, "peak_reduction": self.peak_reduction}


def demand_stats(
    trace: tuple[int, ...] | list[int],
    versus: tuple[int, ...] | list[int] | None = None,
) -> DemandStats:
    """Peak and mean of a per-cycle consumption trace.

    When `versus` (typically the deterministic trace) is given, also report
    the fractional peak reduction (peak_versus - peak) / peak_versus.
    """
    if not trace:
        raise ValueError("demand trace is empty")
    peak = max(trace)
    mean = sum(trace) / len(trace)
    reduction: float | None = None
    if versus is not None:
        if not versus:
            raise ValueError("comparison trace is empty")
        other = max(versus)
        if other == 0:
            if peak != 0:
                raise ValueError("comparison trace has zero peak but trace does not")
            reduction = 0.0
        else:
            reduction = (other - peak) / other
    return DemandStats(peak, mean, reduction)


def structural_predictors(dag: CircuitDag, profile: StaticProfile) -> dict:
    """The two schedule-free predictors of stochastic slowdown."""
    if len(dag) == 0:
        raise ValueError("empty circuit has no structural predictors")
    return {
        "critical_path_ncd": profile.critical_path_ncd,
        "burstiness": {
            "peak_to_mean": profile.burstiness_peak_to_mean,
            "cv": profile.burstiness_cv,
        },
    }
