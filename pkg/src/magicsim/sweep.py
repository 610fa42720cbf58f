"""Unit-count sweeps, naive-provisioning baselines, and sensitivity grids.

A sweep runs the same circuit at every F in a range, `trials` times each,
in the requested mode plus a deterministic Mode A reference run, then locates
three operating points on the aggregated curves:

    F_star     argmin of mean space-time volume on the stochastic curve
    F_plateau  smallest F whose mean cycle count is within (1+eps) of the
               value at the largest swept F
    F_det      the same plateau rule applied to the Mode A curve

Per-F cells are independent. With workers > 1 they fan out across processes
and are joined in submission order, so the worker count never changes a
single output byte.
"""

from __future__ import annotations

import csv
import json
import math
import statistics
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

from .circuit import CircuitDag, StaticProfile, assign_priorities, expand_rz, static_profile
from .production import (
    MechanismConfig,
    RzSynthConfig,
    derive_config,
    deterministic_state_latency,
    expected_cycles_per_state,
    mechanism_family,
)
from .rng import mix64
from .scheduler import (
    SimConfig,
    SimResult,
    SimulationError,
    SimulationMode,
    _parse_expansion,
    simulate,
)

__all__ = [
    "SensitivityCell",
    "SweepResult",
    "SweepRow",
    "aggregate_trials",
    "f_naive",
    "run_trials",
    "sensitivity_grid",
    "static_cycles",
    "sweep_factories",
    "unconstrained_units",
    "write_sensitivity_csv",
    "write_summary_json",
    "write_sweep_csv",
]


def f_naive(gamma: float, t_prod: float) -> int:
    """The textbook provisioning rule: ceil(demand rate x cycles per state)."""
    if gamma < 0:
        raise ValueError("gamma must be non-negative")
    if not math.isfinite(t_prod) or t_prod < 1:
        raise ValueError("t_prod must be finite and at least 1 cycle")
    return math.ceil(gamma * t_prod)


def aggregate_trials(results: list[SimResult]) -> dict:
    """Sample statistics per scalar metric, over one batch of trials.

    stddev is the unbiased (n-1) estimator; a single trial reports 0.0 and
    sets single_sample so downstream consumers know the spread is meaningless.
    """
    if not results:
        raise ValueError("no trials to aggregate")
    n = len(results)
    rows = [r.as_dict() for r in results]
    metrics: dict[str, dict[str, float]] = {}
    for key in rows[0]:
        if key == "trial_seed":
            continue
        values = [row[key] for row in rows]
        metrics[key] = {
            "mean": statistics.fmean(values),
            "stddev": statistics.stdev(values) if n > 1 else 0.0,
            "min": min(values),
            "max": max(values),
        }
    return {"trials": n, "single_sample": n == 1, "metrics": metrics}


def unconstrained_units(profile: StaticProfile, mechanism: MechanismConfig) -> int:
    """An F large enough that production never constrains the schedule.

    Buffered mechanisms need peak per-layer demand times the deterministic
    state latency; the Rz pool can at worst hold one unit per consumer.
    """
    if isinstance(mechanism, RzSynthConfig):
        demand = profile.t_count + profile.rz_count
    else:
        demand = profile.gamma_peak * deterministic_state_latency(mechanism)
    return max(1, demand)


def _prepare(dag: CircuitDag, mechanism: MechanismConfig | None, rz_handling: str) -> CircuitDag:
    """Apply rz expansion once up front so trial configs can all say as-one-state."""
    n = _parse_expansion(rz_handling)
    if n is None:
        work = dag.copy()
        assign_priorities(work)
        return work
    if mechanism is not None and isinstance(mechanism, RzSynthConfig):
        raise ValueError(
            "rz_handling='expand:n' decomposes rotations into T states and "
            "does not combine with the Rz-synthesis mechanism"
        )
    return expand_rz(dag, n)


def static_cycles(
    dag: CircuitDag,
    mechanism: MechanismConfig,
    *,
    rz_handling: str = "as-one-state",
    priority_update: str = "full",
    handoff_cycles: int = 1,
    max_cycles: int = 10**8,
) -> int:
    """Mode A cycle count at an unconstraining F: the overhead-ratio baseline."""
    work = _prepare(dag, mechanism, rz_handling)
    cfg = SimConfig(
        mechanism=mechanism,
        F=unconstrained_units(static_profile(work), mechanism),
        mode=SimulationMode.A,
        priority_update=priority_update,
        handoff_cycles=handoff_cycles,
        max_cycles=max_cycles,
    )
    return simulate(work, cfg).cycles


@dataclass(frozen=True, slots=True)
class SweepRow:
    mechanism: str
    mode: str
    F: int
    trials: int
    mean_C: float
    std_C: float
    mean_V: float
    std_V: float
    mean_peak_demand: float
    mean_fixups: float
    mean_stalls: float


@dataclass(frozen=True)
class SweepResult:
    rows: tuple[SweepRow, ...]
    det_rows: tuple[SweepRow, ...]
    F_star: int
    F_plateau: int
    F_det: int
    F_naive_peak: int
    F_naive_avg: int
    savings: int
    trials: int
    base_seed: int
    epsilon: float

    def summary(self) -> dict:
        return {
            "F_star": self.F_star,
            "F_plateau": self.F_plateau,
            "F_det": self.F_det,
            "F_naive_peak": self.F_naive_peak,
            "F_naive_avg": self.F_naive_avg,
            "savings": self.savings,
        }


@dataclass(frozen=True, slots=True)
class SensitivityCell:
    p: float
    d: int
    F: int
    mean_V: float
    std_V: float


def run_trials(
    dag: CircuitDag,
    mechanism: MechanismConfig,
    mode: SimulationMode | str,
    f_units: int,
    trials: int,
    base_seed: int,
    **sim_kwargs,
) -> list[SimResult]:
    """`trials` independent simulations with seeds keyed by (base, F, index)."""
    if trials < 1:
        raise ValueError("trials must be at least 1")
    mode = SimulationMode.parse(mode) if isinstance(mode, str) else mode
    work = _prepare(dag, mechanism, sim_kwargs.pop("rz_handling", "as-one-state"))
    results = []
    for t in range(trials):
        cfg = SimConfig(
            mechanism=mechanism,
            F=f_units,
            mode=mode,
            trial_seed=mix64(base_seed, f_units, t),
            **sim_kwargs,
        )
        try:
            results.append(simulate(work, cfg))
        except SimulationError as exc:
            raise type(exc)(f"F={f_units}, trial {t}: {exc}") from exc
    return results


def _make_row(family: str, mode: SimulationMode, f_units: int, results: list[SimResult]) -> SweepRow:
    agg = aggregate_trials(results)["metrics"]
    return SweepRow(
        mechanism=family,
        mode=mode.value,
        F=f_units,
        trials=len(results),
        mean_C=agg["cycles"]["mean"],
        std_C=agg["cycles"]["stddev"],
        mean_V=agg["volume"]["mean"],
        std_V=agg["volume"]["stddev"],
        mean_peak_demand=agg["peak_demand"]["mean"],
        mean_fixups=agg["fixup_count"]["mean"],
        mean_stalls=agg["total_stalls"]["mean"],
    )


# Worker-process state for sweep/sensitivity cells. Populated once per worker
# by the pool initializer so the circuit is not re-pickled for every cell.
_CELL_STATE: dict = {}


def _init_cell_worker(dag: CircuitDag, payload: dict) -> None:
    _CELL_STATE["dag"] = dag
    _CELL_STATE["payload"] = payload


def _sweep_cell(dag: CircuitDag, payload: dict, f_units: int) -> tuple[SweepRow, SweepRow]:
    mechanism = payload["mechanism"]
    mode: SimulationMode = payload["mode"]
    family = mechanism_family(mechanism)
    stoch = run_trials(
        dag, mechanism, mode, f_units, payload["trials"], payload["base_seed"],
        **payload["sim_kwargs"],
    )
    row = _make_row(family, mode, f_units, stoch)
    if mode is SimulationMode.A:
        det_row = row
    else:
        det = run_trials(
            dag, mechanism, SimulationMode.A, f_units, 1, payload["base_seed"],
            **payload["sim_kwargs"],
        )
        det_row = _make_row(family, SimulationMode.A, f_units, det)
    return row, det_row


def _sweep_cell_in_worker(f_units: int) -> tuple[SweepRow, SweepRow]:
    return _sweep_cell(_CELL_STATE["dag"], _CELL_STATE["payload"], f_units)


def _sensitivity_cell(dag: CircuitDag, payload: dict, cell: tuple[float, int, int]) -> SensitivityCell:
    p, d, f_units = cell
    mechanism = derive_config(payload["family"], p, d)
    results = run_trials(
        dag, mechanism, payload["mode"], f_units, payload["trials"], payload["base_seed"],
        **payload["sim_kwargs"],
    )
    agg = aggregate_trials(results)["metrics"]["volume"]
    return SensitivityCell(p=p, d=d, F=f_units, mean_V=agg["mean"], std_V=agg["stddev"])


def _sensitivity_cell_in_worker(cell: tuple[float, int, int]) -> SensitivityCell:
    return _sensitivity_cell(_CELL_STATE["dag"], _CELL_STATE["payload"], cell)


def _map_cells(dag: CircuitDag, payload: dict, worker_fn, inline_fn, jobs: list, workers: int | None) -> list:
    """Run cells inline or across processes; join order is submission order."""
    if workers is None or workers <= 1 or len(jobs) <= 1:
        return [inline_fn(dag, payload, job) for job in jobs]
    with ProcessPoolExecutor(
        max_workers=min(workers, len(jobs)),
        initializer=_init_cell_worker,
        initargs=(dag, payload),
    ) as pool:
        return list(pool.map(worker_fn, jobs))


def _check_f_values(f_values) -> list[int]:
    out = list(f_values)
    if not out:
        raise ValueError("F range is empty")
    for f in out:
        if not isinstance(f, int):
            raise ValueError(f"F values must be integers, got {f!r}")
    if any(b <= a for a, b in zip(out, out[1:])):
        raise ValueError("F values must be strictly increasing")
    return out


def _plateau(f_values: list[int], mean_cycles: list[float], eps: float) -> int:
    """Smallest F whose mean C is within (1+eps) of the largest-F value."""
    limit = mean_cycles[-1] * (1.0 + eps)
    for f, c in zip(f_values, mean_cycles):
        if c <= limit:
            return f
    return f_values[-1]


def sweep_factories(
    dag: CircuitDag,
    mechanism: MechanismConfig,
    mode: SimulationMode | str,
    f_range,
    trials: int = 100,
    base_seed: int = 0,
    eps: float = 0.01,
    *,
    rz_handling: str = "as-one-state",
    priority_update: str = "full",
    handoff_cycles: int = 1,
    fixup_duration: int = 1,
    cost_units: str = "logical-tiles",
    max_cycles: int = 10**8,
    validate: bool = False,
    workers: int | None = None,
) -> SweepResult:
    """Sweep the unit count and locate F_star, F_plateau, and F_det."""
    mode = SimulationMode.parse(mode) if isinstance(mode, str) else mode
    f_values = _check_f_values(f_range)
    if trials < 1:
        raise ValueError("trials must be at least 1")
    if eps < 0:
        raise ValueError("eps must be non-negative")

    work = _prepare(dag, mechanism, rz_handling)
    payload = {
        "mechanism": mechanism,
        "mode": mode,
        "trials": trials,
        "base_seed": base_seed,
        "sim_kwargs": {
            "priority_update": priority_update,
            "handoff_cycles": handoff_cycles,
            "fixup_duration": fixup_duration,
            "cost_units": cost_units,
            "max_cycles": max_cycles,
            "validate": validate,
        },
    }
    cells = _map_cells(work, payload, _sweep_cell_in_worker, _sweep_cell, f_values, workers)
    rows = tuple(row for row, _ in cells)
    det_rows = tuple(det for _, det in cells)

    f_star = rows[0].F
    best = rows[0].mean_V
    for row in rows[1:]:
        if row.mean_V < best:
            best = row.mean_V
            f_star = row.F
    f_plateau = _plateau(f_values, [r.mean_C for r in rows], eps)
    f_det = _plateau(f_values, [r.mean_C for r in det_rows], eps)

    profile = static_profile(work)
    per_state = expected_cycles_per_state(mechanism)
    if not math.isfinite(per_state):
        raise ValueError("mechanism has zero expected throughput")
    return SweepResult(
        rows=rows,
        det_rows=det_rows,
        F_star=f_star,
        F_plateau=f_plateau,
        F_det=f_det,
        F_naive_peak=f_naive(profile.gamma_peak, per_state),
        F_naive_avg=f_naive(profile.gamma_avg, per_state),
        savings=f_det - f_star,
        trials=trials,
        base_seed=base_seed,
        epsilon=eps,
    )


def sensitivity_grid(
    dag: CircuitDag,
    family: str,
    per_list,
    distance_list,
    f_list,
    trials: int = 100,
    base_seed: int = 0,
    *,
    mode: SimulationMode | str = SimulationMode.D,
    rz_handling: str = "as-one-state",
    priority_update: str = "full",
    handoff_cycles: int = 1,
    fixup_duration: int = 1,
    cost_units: str = "logical-tiles",
    max_cycles: int = 10**8,
    validate: bool = False,
    workers: int | None = None,
) -> list[SensitivityCell]:
    """Mean volume per (p, d, F) cell, re-deriving the mechanism in each cell."""
    mode = SimulationMode.parse(mode) if isinstance(mode, str) else mode
    ps = [float(p) for p in per_list]
    ds = [int(d) for d in distance_list]
    fs = [int(f) for f in f_list]
    if not ps or not ds or not fs:
        raise ValueError("sensitivity grid axes must be non-empty")
    if trials < 1:
        raise ValueError("trials must be at least 1")
    derive_config(family, ps[0], ds[0])  # fail fast on a bad family name
    if family == "rz" and rz_handling != "as-one-state":
        raise ValueError("rz_handling does not combine with the rz mechanism family")

    work = _prepare(dag, None, rz_handling)
    payload = {
        "family": family,
        "mode": mode,
        "trials": trials,
        "base_seed": base_seed,
        "sim_kwargs": {
            "priority_update": priority_update,
            "handoff_cycles": handoff_cycles,
            "fixup_duration": fixup_duration,
            "cost_units": cost_units,
            "max_cycles": max_cycles,
            "validate": validate,
        },
    }
    jobs = [(p, d, f) for p in ps for d in ds for f in fs]
    return _map_cells(work, payload, _sensitivity_cell_in_worker, _sensitivity_cell, jobs, workers)


_SWEEP_COLUMNS = (
    "mechanism", "mode", "F", "trials",
    "mean_C", "std_C", "mean_V", "std_V",
    "mean_peak_demand", "mean_fixups", "mean_stalls",
)


def write_sweep_csv(result: SweepResult, path) -> None:
    """Stochastic rows first, then the Mode A reference curve (when distinct)."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(_SWEEP_COLUMNS)
        rows = list(result.rows)
        if rows and rows[0].mode != "A":
            rows.extend(result.det_rows)
        for row in rows:
            writer.writerow([
                row.mechanism, row.mode, row.F, row.trials,
                repr(row.mean_C), repr(row.std_C), repr(row.mean_V), repr(row.std_V),
                repr(row.mean_peak_demand), repr(row.mean_fixups), repr(row.mean_stalls),
            ])


def write_summary_json(result: SweepResult, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(result.summary(), fh, indent=2, sort_keys=True)
        fh.write("\n")


def write_sensitivity_csv(cells: list[SensitivityCell], path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(("p", "d", "F", "mean_V", "std_V"))
        for cell in cells:
            writer.writerow([repr(cell.p), cell.d, cell.F, repr(cell.mean_V), repr(cell.std_V)])
