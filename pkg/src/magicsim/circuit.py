"""Gate-level intermediate representation of a fault-tolerant circuit.

A circuit is a DAG of :class:`GateNode` objects. Edges are dependency pairs
derived from qubit usage: every gate depends on the previous gate touching
each of its qubits, so gates on one qubit form a chain and the DAG is acyclic
by construction. Non-Clifford gates (T/T-dagger and non-Clifford Rz) are the
consumers of magic states; everything else executes unconditionally.

The module also computes the two static views the scheduler and the sweep
layer need: longest-path-to-sink priorities (in cycles, duration weighted)
and the ASAP layering that yields the per-layer magic-state demand profile.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

from . import angles

__all__ = [
    "CircuitDag",
    "CircuitError",
    "GateKind",
    "GateNode",
    "GateTag",
    "StaticProfile",
    "expand_rz",
    "longest_path_priorities",
    "static_profile",
]


class CircuitError(ValueError):
    """Raised on malformed circuit construction or analysis of unusable DAGs."""


class GateTag(Enum):
    CLIFFORD = "clifford"
    T_INJECTION = "t_injection"
    RZ_INJECTION = "rz_injection"
    FIXUP_CLIFFORD = "fixup_clifford"
    MEASURE = "measure"
    BARRIER = "barrier"


@dataclass(frozen=True, slots=True)
class GateKind:
    """What a node does: tag plus the payload that tag needs.

    Use the constructors (:meth:`clifford`, :meth:`t`, :meth:`rz`,
    :meth:`from_rz_angle`, :meth:`fixup_clifford`, :meth:`measure`,
    :meth:`barrier`) rather than building instances directly; they enforce
    that Rz injections are genuinely non-Clifford and that fixups carry a
    correction name.
    """

    tag: GateTag
    name: str = ""
    angle: float = 0.0
    dagger: bool = False

    @classmethod
    def clifford(cls, name: str) -> "GateKind":
        if not name:
            raise CircuitError("Clifford gate needs a name")
        return cls(GateTag.CLIFFORD, name=name)

    @classmethod
    def t(cls, dagger: bool = False) -> "GateKind":
        return cls(GateTag.T_INJECTION, name="tdg" if dagger else "t", dagger=dagger)

    @classmethod
    def rz(cls, theta: float) -> "GateKind":
        """A non-Clifford Rz injection. Raises if the angle is Clifford."""
        theta = angles.canonical(theta)
        if angles.is_clifford(theta):
            raise CircuitError(
                f"rz({theta}) is Clifford-equivalent; use from_rz_angle() to lower it"
            )
        return cls(GateTag.RZ_INJECTION, name="rz", angle=theta)

    @classmethod
    def from_rz_angle(cls, theta: float) -> "GateKind":
        """Lower an arbitrary rotation: Clifford multiples of pi/2 become
        plain Clifford nodes, anything else an Rz injection."""
        k = angles.clifford_multiple(theta)
        if k is not None:
            return cls.clifford(angles.CLIFFORD_NAMES[k])
        return cls.rz(theta)

    @classmethod
    def fixup_clifford(cls, name: str) -> "GateKind":
        if not name:
            raise CircuitError("fixup needs a correction name")
        return cls(GateTag.FIXUP_CLIFFORD, name=name)

    @classmethod
    def measure(cls) -> "GateKind":
        return cls(GateTag.MEASURE, name="measure")

    @classmethod
    def barrier(cls) -> "GateKind":
        return cls(GateTag.BARRIER, name="barrier")

    @property
    def is_injection(self) -> bool:
        """True when executing this gate consumes one magic state."""
        return self.tag in (GateTag.T_INJECTION, GateTag.RZ_INJECTION)

    @property
    def label(self) -> str:
        if self.tag is GateTag.RZ_INJECTION:
            return f"rz({self.angle:.6g})"
        return self.name


@dataclass(slots=True)
class GateNode:
    """One scheduled operation.

    ``priority`` is the longest-path-to-sink length in cycles; it is filled
    in by :func:`longest_path_priorities` (the parser does this for you) and
    updated when fixups are spliced in. ``origin`` is ``"static"`` for parsed
    or hand-built gates and ``"fixup"`` for scheduler-inserted corrections.
    """

    id: int
    kind: GateKind
    qubits: tuple[int, ...]
    duration: int
    priority: int = 0
    origin: str = "static"


def _default_duration(kind: GateKind) -> int:
    return 0 if kind.tag is GateTag.BARRIER else 1


class CircuitDag:
    """Mutable gate DAG with per-qubit last-user dependency edges.

    Nodes are stored densely by id in creation order; ids are stable, which
    keeps parsing pure (same text, same DAG) and makes per-node rng streams
    reproducible. ``succs``/``preds`` are adjacency lists parallel to
    ``nodes``.
    """

    __slots__ = ("qubit_count", "nodes", "succs", "preds", "_last_user")

    def __init__(self, qubit_count: int) -> None:
        if qubit_count < 0:
            raise CircuitError("qubit_count must be non-negative")
        self.qubit_count = qubit_count
        self.nodes: list[GateNode] = []
        self.succs: list[list[int]] = []
        self.preds: list[list[int]] = []
        self._last_user: list[int | None] = [None] * qubit_count

    def __len__(self) -> int:
        return len(self.nodes)

    @property
    def next_id(self) -> int:
        return len(self.nodes)

    # -- construction -----------------------------------------------------

    def add_gate(
        self,
        kind: GateKind,
        qubits: tuple[int, ...] | list[int],
        duration: int | None = None,
    ) -> int:
        """Append a gate, wiring edges from the previous user of each qubit."""
        qubits = tuple(qubits)
        if not qubits:
            raise CircuitError("a gate must touch at least one qubit")
        if len(set(qubits)) != len(qubits):
            raise CircuitError(f"duplicate qubit operand in {kind.label} {qubits}")
        for q in qubits:
            if not 0 <= q < self.qubit_count:
                raise CircuitError(f"qubit index {q} out of range (< {self.qubit_count})")
        if duration is None:
            duration = _default_duration(kind)
        if duration < 0 or (duration == 0 and kind.tag is not GateTag.BARRIER):
            raise CircuitError("only barriers may have zero duration")

        nid = len(self.nodes)
        self.nodes.append(GateNode(nid, kind, qubits, duration))
        self.succs.append([])
        self.preds.append([])
        seen: set[int] = set()
        for q in qubits:
            prev = self._last_user[q]
            if prev is not None and prev not in seen:
                seen.add(prev)
                self.succs[prev].append(nid)
                self.preds[nid].append(prev)
            self._last_user[q] = nid
        return nid

    def splice_after(self, after: int, kind: GateKind, duration: int) -> int:
        """Insert a new node between ``after`` and all of its successors.

        Every outgoing edge of ``after`` is redirected to leave the new node
        instead, and an edge ``after -> new`` is added. This is the graph
        half of fixup insertion; priorities are the scheduler's business.
        """
        if not 0 <= after < len(self.nodes):
            raise CircuitError(f"cannot splice after unknown node {after}")
        host = self.nodes[after]
        nid = len(self.nodes)
        self.nodes.append(GateNode(nid, kind, host.qubits, duration, origin="fixup"))
        moved = self.succs[after]
        for s in moved:
            self.preds[s] = [nid if p == after else p for p in self.preds[s]]
        self.succs.append(moved)
        self.preds.append([after])
        self.succs[after] = [nid]
        for q in host.qubits:
            if self._last_user[q] == after:
                self._last_user[q] = nid
        return nid

    # -- views -------------------------------------------------------------

    def gates(self) -> list[GateNode]:
        return self.nodes

    def edges(self):
        """Iterate (pred, succ) dependency pairs."""
        for u, out in enumerate(self.succs):
            for v in out:
                yield (u, v)

    def copy(self) -> "CircuitDag":
        dup = CircuitDag(self.qubit_count)
        dup.nodes = [
            GateNode(n.id, n.kind, n.qubits, n.duration, n.priority, n.origin)
            for n in self.nodes
        ]
        dup.succs = [list(out) for out in self.succs]
        dup.preds = [list(inn) for inn in self.preds]
        dup._last_user = list(self._last_user)
        return dup

    def signature(self) -> tuple:
        """Structural fingerprint used by purity and determinism tests."""
        return (
            self.qubit_count,
            tuple(
                (n.id, n.kind, n.qubits, n.duration, n.priority, n.origin)
                for n in self.nodes
            ),
            tuple(tuple(out) for out in self.succs),
        )

    def topological_order(self) -> list[int]:
        """Kahn ordering; raises :class:`CircuitError` if a cycle exists."""
        n = len(self.nodes)
        remaining = [len(inn) for inn in self.preds]
        order = [i for i in range(n) if remaining[i] == 0]
        head = 0
        while head < len(order):
            u = order[head]
            head += 1
            for v in self.succs[u]:
                remaining[v] -= 1
                if remaining[v] == 0:
                    order.append(v)
        if len(order) != n:
            raise CircuitError("dependency cycle detected")
        return order

    def check_acyclic(self) -> None:
        self.topological_order()


def longest_path_priorities(dag: CircuitDag) -> dict[int, int]:
    """Duration-weighted longest-path-to-sink length for every node.

    priority(n) = duration(n) + max over successors of priority(successor),
    with sinks at priority(n) = duration(n). Pure: the DAG is not touched.
    """
    order = dag.topological_order()
    prio = [0] * len(dag.nodes)
    succs = dag.succs
    nodes = dag.nodes
    for nid in reversed(order):
        best = 0
        for s in succs[nid]:
            if prio[s] > best:
                best = prio[s]
        prio[nid] = nodes[nid].duration + best
    return dict(enumerate(prio))


def assign_priorities(dag: CircuitDag) -> None:
    """Write longest-path priorities onto the nodes in place."""
    for nid, p in longest_path_priorities(dag).items():
        dag.nodes[nid].priority = p


@dataclass(frozen=True, slots=True)
class StaticProfile:
    """Resource demands of a circuit under idealized (ASAP) execution.

    ``per_layer_demand[k]`` counts the injections whose earliest possible
    start cycle is k when every dependency resolves as fast as durations
    allow. ``depth_cycles`` is the duration-weighted longest path, which for
    unit durations equals the layer count.
    """

    per_layer_demand: tuple[int, ...]
    gamma_peak: int
    gamma_avg: float
    t_count: int
    rz_count: int
    depth_cycles: int
    critical_path_ncd: float
    burstiness_peak_to_mean: float
    burstiness_cv: float

    def as_dict(self) -> dict:
        return {
            "per_layer_demand": list(self.per_layer_demand),
            "gamma_peak": self.gamma_peak,
            "gamma_avg": self.gamma_avg,
            "t_count": self.t_count,
            "rz_count": self.rz_count,
            "depth_cycles": self.depth_cycles,
            "critical_path_ncd": self.critical_path_ncd,
            "burstiness_peak_to_mean": self.burstiness_peak_to_mean,
            "burstiness_cv": self.burstiness_cv,
        }


def _critical_path_ncd(dag: CircuitDag, prio: dict[int, int]) -> float:
    """Non-Clifford fraction along one maximal path, chosen deterministically:
    start at the highest-priority node, always step to the highest-priority
    successor, break ties toward the smaller id."""
    if not dag.nodes:
        return 0.0
    start = min(
        (nid for nid in range(len(dag.nodes))),
        key=lambda nid: (-prio[nid], nid),
    )
    path_len = 0
    non_clifford = 0
    nid = start
    while True:
        path_len += 1
        if dag.nodes[nid].kind.is_injection:
            non_clifford += 1
        succ = dag.succs[nid]
        if not succ:
            break
        nid = min(succ, key=lambda s: (-prio[s], s))
    return non_clifford / path_len


def static_profile(dag: CircuitDag) -> StaticProfile:
    """ASAP layering, demand profile and the structural summary numbers."""
    order = dag.topological_order()
    start = [0] * len(dag.nodes)
    nodes = dag.nodes
    for nid in order:
        best = 0
        for p in dag.preds[nid]:
            end = start[p] + nodes[p].duration
            if end > best:
                best = end
        start[nid] = best
    depth = 0
    for nid in range(len(nodes)):
        end = start[nid] + nodes[nid].duration
        if end > depth:
            depth = end

    demand = [0] * depth
    t_count = 0
    rz_count = 0
    for nid, node in enumerate(nodes):
        if node.kind.tag is GateTag.T_INJECTION:
            t_count += 1
            demand[start[nid]] += 1
        elif node.kind.tag is GateTag.RZ_INJECTION:
            rz_count += 1
            demand[start[nid]] += 1

    gamma_peak = max(demand, default=0)
    layers = len(demand)
    gamma_avg = (t_count + rz_count) / layers if layers else 0.0
    if layers and gamma_avg > 0.0:
        variance = sum((d - gamma_avg) ** 2 for d in demand) / layers
        cv = math.sqrt(variance) / gamma_avg
        peak_to_mean = gamma_peak / gamma_avg
    else:
        cv = 0.0
        peak_to_mean = 0.0

    prio = longest_path_priorities(dag)
    return StaticProfile(
        per_layer_demand=tuple(demand),
        gamma_peak=gamma_peak,
        gamma_avg=gamma_avg,
        t_count=t_count,
        rz_count=rz_count,
        depth_cycles=depth,
        critical_path_ncd=_critical_path_ncd(dag, prio),
        burstiness_peak_to_mean=peak_to_mean,
        burstiness_cv=cv,
    )


def expand_rz(dag: CircuitDag, states_per_rz: int) -> CircuitDag:
    """Rewrite every Rz injection as ``states_per_rz`` serial T injections.

    This implements the pessimistic gate-synthesis accounting where one
    rotation costs a fixed number of T states instead of one ready-made
    Rz state. The input DAG must have been built through ``add_gate`` (the
    parser and the builders here always do), whose per-qubit chaining the
    rebuild reproduces.
    """
    if states_per_rz < 1:
        raise CircuitError("states_per_rz must be >= 1")
    out = CircuitDag(dag.qubit_count)
    for node in dag.nodes:
        if node.kind.tag is GateTag.RZ_INJECTION:
            for _ in range(states_per_rz):
                out.add_gate(GateKind.t(), node.qubits, node.duration)
        else:
            out.add_gate(node.kind, node.qubits, node.duration)
    assign_priorities(out)
    return out
