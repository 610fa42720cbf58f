"""Critical-path list scheduling against a stochastic production bank.

One simulation trial walks the circuit DAG cycle by cycle: Clifford-type
nodes start as soon as their dependencies resolve, injection nodes also need
a magic state granted by the bank, and (in the failing modes) a completed
injection flips a fair coin to decide whether a fixup node is spliced into
the DAG behind it. Rz fixups double the angle and can cascade until they hit
a Clifford multiple or a success.

Modes:
    A  production deterministic, injections always succeed (baseline)
    B  production stochastic only
    C  injection failures only (production pinned to deterministic timing)
    D  both error channels

Everything is a pure function of (dag, config): the input DAG is copied, the
trial seed drives keyed rng substreams, and identical configs give bitwise
identical results regardless of how idle stretches are skipped.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass
from enum import Enum

from . import angles
from .circuit import CircuitDag, GateKind, GateTag, assign_priorities, expand_rz
from .metrics import cost_model_for, q_total as q_total_of
from .production import MechanismConfig, RzSynthConfig, make_bank
from .rng import Stream, mix64

__all__ = [
    "DeadlockError",
    "SimConfig",
    "SimResult",
    "SimulationError",
    "SimulationMode",
    "insert_fixup",
    "sample_injection",
    "simulate",
]

_INJECT_TAG = 0x696E6A65  # keys the per-node injection coin streams


class SimulationError(RuntimeError):
    """A trial could not run to completion."""


class DeadlockError(SimulationError):
    """No node can ever make progress (typically starved of magic states)."""


class SimulationMode(Enum):
    A = "A"
    B = "B"
    C = "C"
    D = "D"

    @property
    def production_stochastic(self) -> bool:
        return self in (SimulationMode.B, SimulationMode.D)

    @property
    def injections_fail(self) -> bool:
        return self in (SimulationMode.C, SimulationMode.D)

    @classmethod
    def parse(cls, text: str) -> "SimulationMode":
        try:
            return cls(text.strip().upper())
        except ValueError:
            raise ValueError(f"mode must be one of A, B, C, D, not {text!r}") from None


def sample_injection(kind: GateKind, stream: Stream) -> bool:
    """One injection outcome from the node's dedicated stream; True = success."""
    if not kind.is_injection:
        raise ValueError(f"{kind.label} does not consume a magic state")
    return not stream.chance(0.5)


def _injection_failed(trial_seed: int, node_id: int) -> bool:
    return Stream(mix64(trial_seed, _INJECT_TAG, node_id)).chance(0.5)


def insert_fixup(
    dag: CircuitDag,
    after: int,
    fixup_kind: GateKind,
    duration: int = 1,
    priority_update: str = "full",
) -> int:
    """Splice a fixup node between `after` and all of its successors.

    The fixup's priority is its duration plus the best successor priority.
    With priority_update="full" the change is propagated to ancestors (which
    by this point have all completed, so the propagation is bookkeeping, not
    a scheduling change); "static" leaves ancestors stale, as advertised.
    """
    if duration < 1:
        raise ValueError("a fixup occupies at least one cycle")
    if priority_update not in ("full", "static"):
        raise ValueError(f"unknown priority_update {priority_update!r}")
    nid = dag.splice_after(after, fixup_kind, duration)
    nodes = dag.nodes
    best = 0
    for s in dag.succs[nid]:
        if nodes[s].priority > best:
            best = nodes[s].priority
    nodes[nid].priority = duration + best
    if priority_update == "full":
        stack = [after]
        while stack:
            u = stack.pop()
            top = 0
            for s in dag.succs[u]:
                if nodes[s].priority > top:
                    top = nodes[s].priority
            fresh = nodes[u].duration + top
            if fresh > nodes[u].priority:
                nodes[u].priority = fresh
                stack.extend(dag.preds[u])
    return nid


@dataclass(frozen=True)
class SimConfig:
    """Everything one trial needs beyond the circuit itself.

    rz_handling applies to the T-state mechanisms only: "as-one-state" lets
    each non-Clifford rz consume a single state with the plain S-fixup rule,
    "expand:n" rewrites it into n serial T gates before the run. cost_units
    picks between the logical-tiles and physical qubit-cost presets.
    """

    mechanism: MechanismConfig
    F: int
    mode: SimulationMode = SimulationMode.A
    rz_handling: str = "as-one-state"
    priority_update: str = "full"
    trial_seed: int = 0
    max_cycles: int = 10**8
    handoff_cycles: int = 1
    fixup_duration: int = 1
    cost_units: str = "logical-tiles"
    validate: bool = False
    deep_validate: bool = False

    def __post_init__(self) -> None:
        if isinstance(self.mode, str):
            object.__setattr__(self, "mode", SimulationMode.parse(self.mode))
        if self.F < 0:
            raise ValueError("F must be non-negative")
        if self.max_cycles < 1:
            raise ValueError("max_cycles must be positive")
        if self.fixup_duration < 1:
            raise ValueError("fixup_duration must be at least 1 cycle")
        if self.handoff_cycles < 0:
            raise ValueError("handoff_cycles must be non-negative")
        _parse_expansion(self.rz_handling)
        if self.priority_update not in ("full", "static"):
            raise ValueError(f"unknown priority_update {self.priority_update!r}")


@dataclass(frozen=True)
class SimResult:
    cycles: int
    q_total: int
    volume: int
    demand_trace: tuple[int, ...]
    stall_trace: tuple[int, ...]
    fixup_count: int
    injection_count: int
    abort_count: int
    max_concurrent_rz_units: int
    peak_demand: int
    trial_seed: int

    def as_dict(self) -> dict:
        return {
            "cycles": self.cycles,
            "q_total": self.q_total,
            "volume": self.volume,
            "fixup_count": self.fixup_count,
            "injection_count": self.injection_count,
            "abort_count": self.abort_count,
            "max_concurrent_rz_units": self.max_concurrent_rz_units,
            "peak_demand": self.peak_demand,
            "total_stalls": sum(self.stall_trace),
            "trial_seed": self.trial_seed,
        }


def _parse_expansion(rz_handling: str) -> int | None:
    """None for "as-one-state", the T count for "expand:n"."""
    if rz_handling == "as-one-state":
        return None
    if rz_handling.startswith("expand:"):
        tail = rz_handling.split(":", 1)[1]
        try:
            n = int(tail)
        except ValueError:
            n = 0
        if n >= 1:
            return n
        raise ValueError(f"expand:n needs an integer n >= 1, not {tail!r}")
    raise ValueError(f"rz_handling must be 'as-one-state' or 'expand:n', not {rz_handling!r}")


_T_ANGLE = angles.angle_key(math.pi / 4.0)
_TDG_ANGLE = angles.angle_key(-math.pi / 4.0)


def _injection_angle(kind: GateKind) -> float:
    """Which pool a consumer draws from, under the Rz-synthesis mechanism."""
    if kind.tag is GateTag.T_INJECTION:
        return _TDG_ANGLE if kind.dagger else _T_ANGLE
    return angles.angle_key(kind.angle)


def _fixup_kind(kind: GateKind, rz_mechanism: bool) -> GateKind:
    """The correction a failed injection leaves behind.

    A failed injection applies the adjoint rotation, so the correction is
    the doubled angle; for T states that collapses to the S-family Clifford.
    Under the T-state mechanisms an rz consumer follows the same rule as T.
    """
    if rz_mechanism:
        doubled = angles.doubled(_injection_angle(kind))
        k = angles.clifford_multiple(doubled)
        if k is not None:
            return GateKind.fixup_clifford(angles.CLIFFORD_NAMES[k])
        return GateKind.rz(doubled)
    if kind.tag is GateTag.T_INJECTION and kind.dagger:
        return GateKind.fixup_clifford("sdg")
    return GateKind.fixup_clifford("s")


def simulate(dag: CircuitDag, cfg: SimConfig) -> SimResult:
    """Run one trial; pure in dag (a working copy absorbs the fixups)."""
    rz_mechanism = isinstance(cfg.mechanism, RzSynthConfig)
    expansion = _parse_expansion(cfg.rz_handling)
    if expansion is not None:
        if rz_mechanism:
            raise ValueError(
                "rz_handling='expand:n' decomposes rotations into T states and "
                "does not combine with the Rz-synthesis mechanism"
            )
        work = expand_rz(dag, expansion)
    else:
        work = dag.copy()
        assign_priorities(work)

    mode = cfg.mode
    failing = mode.injections_fail
    trial_seed = cfg.trial_seed
    bank = make_bank(
        cfg.mechanism,
        cfg.F,
        trial_seed,
        deterministic=not mode.production_stochastic,
        handoff_cycles=cfg.handoff_cycles,
        validate=cfg.validate,
    )

    nodes = work.nodes
    succs = work.succs
    duration = [n.duration for n in nodes]
    remaining = [len(p) for p in work.preds]
    is_injection = [n.kind.is_injection for n in nodes]
    angle_of: list[float] = [0.0] * len(nodes)
    if rz_mechanism:
        for i, node in enumerate(nodes):
            if is_injection[i]:
                angle_of[i] = _injection_angle(node.kind)

    total = len(nodes)
    done = 0
    ready_plain: list[int] = []
    ready_inject: list[tuple[int, int]] = []  # (-priority, id)
    in_flight: list[tuple[int, int]] = []  # (end cycle, id)
    first_stall: dict[int, int] = {}
    demand_trace: list[int] = []
    stall_trace: list[int] = []
    injection_count = 0
    fixup_count = 0
    busy_until = [0] * work.qubit_count if cfg.validate else None

    def schedule_ready(v: int, cycle: int, instants: list[int]) -> None:
        if is_injection[v]:
            if rz_mechanism:
                bank.register_demand(angle_of[v], cycle)
            heapq.heappush(ready_inject, (-nodes[v].priority, v))
        elif duration[v] == 0:
            instants.append(v)
        else:
            ready_plain.append(v)

    def settle(cycle: int, finished: list[int]) -> int:
        """End-of-cycle: sample outcomes, splice fixups, release successors.

        Zero-duration nodes released here complete within the same boundary,
        so the worklist loops until the cascade settles. Returns how many
        nodes completed.
        """
        nonlocal total, done, fixup_count
        count = 0
        queue = finished
        while queue:
            batch: list[int] = []
            for u in queue:
                done += 1
                count += 1
                if failing and is_injection[u] and _injection_failed(trial_seed, u):
                    fixup_count += 1
                    kind = _fixup_kind(nodes[u].kind, rz_mechanism)
                    insert_fixup(
                        work, u, kind, cfg.fixup_duration, cfg.priority_update
                    )
                    duration.append(cfg.fixup_duration)
                    remaining.append(1)
                    is_injection.append(kind.is_injection)
                    angle_of.append(
                        _injection_angle(kind) if rz_mechanism and kind.is_injection else 0.0
                    )
                    total += 1
                    if cfg.deep_validate:
                        work.check_acyclic()
                for v in succs[u]:
                    remaining[v] -= 1
                    if remaining[v] == 0:
                        schedule_ready(v, cycle, batch)
            queue = batch
        return count

    def start(v: int, cycle: int) -> None:
        end = cycle + duration[v] - 1
        if busy_until is not None:
            for q in nodes[v].qubits:
                if busy_until[q] >= cycle:
                    raise SimulationError(
                        f"qubit {q} double-booked at cycle {cycle} by node {v}"
                    )
                busy_until[q] = end
        heapq.heappush(in_flight, (end, v))

    def grantable_waiting() -> bool:
        if not ready_inject:
            return False
        if rz_mechanism:
            return any(bank.available(angle_of[v]) > 0 for _, v in ready_inject)
        return bank.available() > 0

    def oldest_stalled() -> str:
        if not ready_inject:
            return "no injection is waiting; the dependency graph is wedged"
        v = min((v for _, v in ready_inject), key=lambda v: (first_stall.get(v, 1 << 62), v))
        since = first_stall.get(v)
        when = f" (stalled since cycle {since})" if since is not None else ""
        return f"node {v} [{nodes[v].kind.label}]{when} cannot obtain a magic state"

    # Sources are ready before the first cycle; zero-duration sources (bare
    # barriers) resolve at the 0 boundary without occupying a cycle.
    instants: list[int] = []
    for v in range(total):
        if remaining[v] == 0:
            schedule_ready(v, 0, instants)
    if instants:
        settle(0, instants)

    cycle = 0
    while done < total:
        cycle += 1
        if cycle > cfg.max_cycles:
            raise SimulationError(
                f"exceeded max_cycles={cfg.max_cycles}; {oldest_stalled()}"
            )
        bank.step(cycle)

        started = len(ready_plain)
        for v in ready_plain:
            start(v, cycle)
        ready_plain.clear()

        granted = 0
        if ready_inject:
            if rz_mechanism:
                stalled_back: list[tuple[int, int]] = []
                while ready_inject:
                    entry = heapq.heappop(ready_inject)
                    v = entry[1]
                    if bank.request(1, angle_of[v], cycle) == 1:
                        start(v, cycle)
                        granted += 1
                        injection_count += 1
                    else:
                        first_stall.setdefault(v, cycle)
                        stalled_back.append(entry)
                for entry in stalled_back:
                    heapq.heappush(ready_inject, entry)
            else:
                avail = bank.available()
                while avail > 0 and ready_inject:
                    _, v = heapq.heappop(ready_inject)
                    bank.request(1, None, cycle)
                    start(v, cycle)
                    granted += 1
                    injection_count += 1
                    avail -= 1
                for _, v in ready_inject:
                    first_stall.setdefault(v, cycle)
        stalled = len(ready_inject)
        demand_trace.append(granted)
        stall_trace.append(stalled)

        finished: list[int] = []
        while in_flight and in_flight[0][0] == cycle:
            finished.append(heapq.heappop(in_flight)[1])
        completed = settle(cycle, finished) if finished else 0

        bank.finish_cycle()

        if started == 0 and granted == 0 and completed == 0 and done < total:
            if grantable_waiting():
                continue  # a state matured at this boundary; next cycle grants
            target = in_flight[0][0] if in_flight else None
            bank_next = bank.next_event(cycle)
            if bank_next is not None and (target is None or bank_next < target):
                target = bank_next
            if target is None:
                raise DeadlockError(
                    f"no progress possible at cycle {cycle}: {oldest_stalled()}"
                )
            if target > cycle + 1:
                skipped = target - cycle - 1
                demand_trace.extend([0] * skipped)
                stall_trace.extend([stalled] * skipped)
                cycle = target - 1

    if cfg.validate:
        work.check_acyclic()
        if in_flight or ready_plain or ready_inject:
            raise SimulationError("simulation ended with work still queued")

    cost = cost_model_for(cfg.cost_units, cfg.mechanism)
    q = q_total_of(work.qubit_count, cfg.F, cost)
    return SimResult(
        cycles=cycle,
        q_total=q,
        volume=q * cycle,
        demand_trace=tuple(demand_trace),
        stall_trace=tuple(stall_trace),
        fixup_count=fixup_count,
        injection_count=injection_count,
        abort_count=bank.abort_count,
        max_concurrent_rz_units=bank.max_busy if rz_mechanism else 0,
        peak_demand=max(demand_trace, default=0),
        trial_seed=trial_seed,
    )
