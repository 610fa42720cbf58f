"""Circuit DAG construction, priorities, splicing and static profiling."""

from __future__ import annotations

import pytest

from magicsim import (
    CircuitDag,
    CircuitError,
    GateKind,
    assign_priorities,
    expand_rz,
    static_profile,
)

from helpers import bursty, serial_t_chain


def test_add_gate_assigns_sequential_ids() -> None:
    dag = CircuitDag(2)
    ids = [dag.add_gate(GateKind.clifford("h"), (q,), 1) for q in (0, 1, 0)]
    assert ids == [0, 1, 2]
    assert len(dag) == 3


def test_add_gate_validates_operands() -> None:
    dag = CircuitDag(2)
    with pytest.raises(CircuitError):
        dag.add_gate(GateKind.t(), (5,), 1)
    with pytest.raises(CircuitError):
        dag.add_gate(GateKind.clifford("cx"), (0, 0), 1)
    with pytest.raises(CircuitError):
        dag.add_gate(GateKind.t(), (0,), 0)


def test_only_barriers_may_have_zero_duration() -> None:
    dag = CircuitDag(2)
    assert dag.add_gate(GateKind.barrier(), (0, 1), 0) == 0
    with pytest.raises(CircuitError):
        dag.add_gate(GateKind.barrier(), (0,), -1)


def test_default_durations_are_one() -> None:
    dag = CircuitDag(1)
    dag.add_gate(GateKind.t(), (0,))
    dag.add_gate(GateKind.rz(0.3), (0,))
    assert [g.duration for g in dag.gates()] == [1, 1]


def test_per_qubit_chaining_and_edge_dedup() -> None:
    dag = CircuitDag(2)
    dag.add_gate(GateKind.clifford("cx"), (0, 1), 1)
    dag.add_gate(GateKind.clifford("cx"), (0, 1), 1)
    # the second cx depends on the first through both qubits, but the edge
    # list must carry the dependency once
    assert list(dag.edges()) == [(0, 1)]


def test_cross_qubit_dependencies_via_two_qubit_gate() -> None:
    dag = CircuitDag(2)
    a = dag.add_gate(GateKind.clifford("h"), (0,), 1)
    b = dag.add_gate(GateKind.clifford("h"), (1,), 1)
    c = dag.add_gate(GateKind.clifford("cx"), (0, 1), 1)
    d = dag.add_gate(GateKind.t(), (0,), 1)
    assert set(dag.edges()) == {(a, c), (b, c), (c, d)}


def test_topological_order_respects_edges() -> None:
    dag = bursty(blocks=2)
    order = dag.topological_order()
    assert sorted(order) == list(range(len(dag)))
    pos = {nid: i for i, nid in enumerate(order)}
    for u, v in dag.edges():
        assert pos[u] < pos[v]


def test_priorities_are_duration_weighted_remaining_path() -> None:
    dag = CircuitDag(1)
    a = dag.add_gate(GateKind.t(), (0,), 2)
    b = dag.add_gate(GateKind.clifford("h"), (0,), 3)
    assign_priorities(dag)
    prio = {g.id: g.priority for g in dag.gates()}
    assert prio[b] == 3
    assert prio[a] == 5


def test_priorities_on_parallel_chains() -> None:
    dag = CircuitDag(2)
    long_head = dag.add_gate(GateKind.t(), (0,), 1)
    dag.add_gate(GateKind.t(), (0,), 1)
    dag.add_gate(GateKind.t(), (0,), 1)
    short_head = dag.add_gate(GateKind.t(), (1,), 1)
    assign_priorities(dag)
    prio = {g.id: g.priority for g in dag.gates()}
    assert prio[long_head] == 3
    assert prio[short_head] == 1


def test_splice_after_redirects_every_successor() -> None:
    dag = CircuitDag(2)
    n0 = dag.add_gate(GateKind.t(), (0,), 1)
    n1 = dag.add_gate(GateKind.clifford("cx"), (0, 1), 1)
    n2 = dag.add_gate(GateKind.clifford("h"), (0,), 1)
    n3 = dag.add_gate(GateKind.clifford("h"), (1,), 1)
    f = dag.splice_after(n0, GateKind.fixup_clifford("s"), 1)
    assert set(dag.edges()) == {(n0, f), (f, n1), (n1, n2), (n1, n3)}
    dag.check_acyclic()


def test_splice_after_terminal_node_creates_single_edge() -> None:
    dag = serial_t_chain(2)
    last = len(dag) - 1
    f = dag.splice_after(last, GateKind.fixup_clifford("sdg"), 1)
    assert (last, f) in set(dag.edges())
    dag.check_acyclic()


def test_splice_after_unknown_node_fails() -> None:
    dag = serial_t_chain(2)
    with pytest.raises(CircuitError):
        dag.splice_after(99, GateKind.fixup_clifford("s"), 1)


def test_copy_is_independent() -> None:
    dag = serial_t_chain(3)
    clone = dag.copy()
    clone.add_gate(GateKind.clifford("h"), (0,), 1)
    assert len(dag) == 3
    assert len(clone) == 4
    assert dag.signature() != clone.signature()


def test_signature_is_stable_and_content_sensitive() -> None:
    assert serial_t_chain(3).signature() == serial_t_chain(3).signature()
    assert serial_t_chain(3).signature() != serial_t_chain(4).signature()


def test_expand_rz_replaces_rotations_with_serial_t_chain() -> None:
    dag = CircuitDag(1)
    dag.add_gate(GateKind.clifford("h"), (0,), 1)
    dag.add_gate(GateKind.rz(0.3), (0,), 1)
    dag.add_gate(GateKind.clifford("h"), (0,), 1)
    out = expand_rz(dag, 4)
    prof = static_profile(out)
    assert prof.rz_count == 0
    assert prof.t_count == 4
    assert len(out) == len(dag) + 3
    # expansion preserves the serial structure: depth grows by n - 1
    assert prof.depth_cycles == static_profile(dag).depth_cycles + 3


def test_expand_rz_requires_positive_count_and_leaves_t_alone() -> None:
    dag = serial_t_chain(2)
    with pytest.raises(CircuitError):
        expand_rz(dag, 0)
    out = expand_rz(dag, 5)
    assert out.signature() == dag.signature()


def test_static_profile_of_bursty_circuit() -> None:
    prof = static_profile(bursty())
    assert prof.gamma_peak == 15
    assert prof.t_count == 90
    assert prof.rz_count == 0
    assert prof.depth_cycles == 66
    assert prof.gamma_avg == pytest.approx(90 / 66)
    assert len(prof.per_layer_demand) == 66
    assert prof.per_layer_demand[0] == 15
    assert prof.per_layer_demand[1] == 0


def test_static_profile_empty_circuit_is_all_zero() -> None:
    prof = static_profile(CircuitDag(3))
    assert prof.gamma_peak == 0
    assert prof.gamma_avg == 0.0
    assert prof.depth_cycles == 0
    assert list(prof.per_layer_demand) == []


def test_static_profile_as_dict_round_trips_fields() -> None:
    prof = static_profile(bursty(blocks=1))
    d = prof.as_dict()
    assert d["t_count"] == prof.t_count
    assert d["gamma_peak"] == prof.gamma_peak
    assert d["burstiness_cv"] == prof.burstiness_cv
