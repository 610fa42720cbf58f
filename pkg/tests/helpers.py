"""Circuit builders shared across test modules."""

from __future__ import annotations

from magicsim import CircuitDag, GateKind, assign_priorities


def serial_t_chain(n: int = 4) -> CircuitDag:
    """n T gates on one qubit, forming a pure dependency chain."""
    dag = CircuitDag(1)
    for _ in range(n):
        dag.add_gate(GateKind.t(), (0,), 1)
    assign_priorities(dag)
    return dag


def bursty(blocks: int = 6, burst: int = 15, quiet: int = 10, qubits: int = 25) -> CircuitDag:
    """Alternating demand bursts and Clifford-only stretches.

    Each block issues ``burst`` parallel T gates on distinct qubits and then
    ``quiet`` layers of Hadamards across every qubit. There are no barriers,
    so qubit chains are free to drift out of phase once states run scarce.
    """
    dag = CircuitDag(qubits)
    for _ in range(blocks):
        for i in range(burst):
            dag.add_gate(GateKind.t(), (i,), 1)
        for _ in range(quiet):
            for q in range(qubits):
                dag.add_gate(GateKind.clifford("h"), (q,), 1)
    assign_priorities(dag)
    return dag


def clifford_only(layers: int = 8, qubits: int = 4) -> CircuitDag:
    dag = CircuitDag(qubits)
    for _ in range(layers):
        for q in range(qubits):
            dag.add_gate(GateKind.clifford("h"), (q,), 1)
    assign_priorities(dag)
    return dag


def bursty_qasm_text(blocks: int = 6, burst: int = 15, quiet: int = 10, qubits: int = 25) -> str:
    """QASM source that lowers to the same circuit as :func:`bursty`."""
    lines = ["OPENQASM 2.0;", 'include "qelib1.inc";', f"qreg q[{qubits}];"]
    for _ in range(blocks):
        for i in range(burst):
            lines.append(f"t q[{i}];")
        for _ in range(quiet):
            lines.append("h q;")
    return "\n".join(lines) + "\n"
