"""OPENQASM 2.0 front end.

Parses the gate subset the simulator cares about and lowers everything to
the injection-level IR in one pass: generic rotations become Rz injections
(or plain Cliffords when the angle is a multiple of pi/2), u1/u2/u3 are
rewritten through rz and h, ccx through the standard seven-T network, swap
through three cx. The decomposition table is data, not code, so callers can
extend or override it with their own JSON.

Deliberately unsupported: classical registers, conditionals, user gate
declarations, opaque gates and reset. Those raise :class:`QasmError` with
the offending line rather than being silently dropped.
"""

from __future__ import annotations

import json
import re

from . import angles
from .circuit import CircuitDag, CircuitError, GateKind, GateTag, assign_priorities

__all__ = [
    "DEFAULT_TABLE",
    "QasmError",
    "load_table",
    "lower_gates",
    "parse_qasm",
]

_MAX_LOWERING_DEPTH = 32

_CLIFFORD_1Q = {"x", "y", "z", "h", "s", "sdg", "id"}
_CLIFFORD_2Q = {"cx", "cz"}

# Decompositions are applied left to right in circuit order. Qubit entries
# index into the instruction's operands; angle expressions may use p0..pN
# for the instruction's parameters.
DEFAULT_TABLE: dict[str, list[dict]] = {
    "u1": [
        {"name": "rz", "qubits": [0], "angle": "p0"},
    ],
    "u2": [
        {"name": "rz", "qubits": [0], "angle": "p1 - pi/2"},
        {"name": "h", "qubits": [0]},
        {"name": "rz", "qubits": [0], "angle": "pi/2"},
        {"name": "h", "qubits": [0]},
        {"name": "rz", "qubits": [0], "angle": "p0 + pi/2"},
    ],
    "u3": [
        {"name": "rz", "qubits": [0], "angle": "p2 - pi/2"},
        {"name": "h", "qubits": [0]},
        {"name": "rz", "qubits": [0], "angle": "p0"},
        {"name": "h", "qubits": [0]},
        {"name": "rz", "qubits": [0], "angle": "p1 + pi/2"},
    ],
    "swap": [
        {"name": "cx", "qubits": [0, 1]},
        {"name": "cx", "qubits": [1, 0]},
        {"name": "cx", "qubits": [0, 1]},
    ],
    "ccx": [
        {"name": "h", "qubits": [2]},
        {"name": "cx", "qubits": [1, 2]},
        {"name": "tdg", "qubits": [2]},
        {"name": "cx", "qubits": [0, 2]},
        {"name": "t", "qubits": [2]},
        {"name": "cx", "qubits": [1, 2]},
        {"name": "tdg", "qubits": [2]},
        {"name": "cx", "qubits": [0, 2]},
        {"name": "t", "qubits": [1]},
        {"name": "t", "qubits": [2]},
        {"name": "h", "qubits": [2]},
        {"name": "cx", "qubits": [0, 1]},
        {"name": "t", "qubits": [0]},
        {"name": "tdg", "qubits": [1]},
        {"name": "cx", "qubits": [0, 1]},
    ],
}


class QasmError(ValueError):
    """Parse or lowering failure, carrying the 1-based source line."""

    def __init__(self, line: int, message: str) -> None:
        super().__init__(f"line {line}: {message}")
        self.line = line


# -- tokenizing ------------------------------------------------------------


def _strip_comments(text: str) -> str:
    """Remove // comments while preserving newlines and string literals."""
    out: list[str] = []
    i = 0
    n = len(text)
    in_string = False
    while i < n:
        ch = text[i]
        if in_string:
            out.append(ch)
            if ch == '"':
                in_string = False
            i += 1
        elif ch == '"':
            in_string = True
            out.append(ch)
            i += 1
        elif ch == "/" and i + 1 < n and text[i + 1] == "/":
            while i < n and text[i] != "\n":
                i += 1
        else:
            out.append(ch)
            i += 1
    return "".join(out)


def _statements(text: str) -> list[tuple[int, str]]:
    """Split on semicolons, tagging each statement with its starting line."""
    stmts: list[tuple[int, str]] = []
    buf: list[str] = []
    line = 1
    start_line = 1
    for ch in _strip_comments(text):
        if ch == "\n":
            line += 1
        if ch == ";":
            body = "".join(buf).strip()
            if body:
                stmts.append((start_line, body))
            buf = []
            start_line = line
        else:
            if not buf and not ch.isspace():
                start_line = line
            if buf or not ch.isspace():
                buf.append(ch)
    tail = "".join(buf).strip()
    if tail:
        stmts.append((start_line, tail))
    return stmts


# -- angle expressions -----------------------------------------------------

_NUMBER_RE = re.compile(r"\d+(?:\.\d*)?(?:[eE][+-]?\d+)?|\.\d+(?:[eE][+-]?\d+)?")
_IDENT_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")


class _ExprParser:
    """Recursive descent over + - * /, parentheses, pi, numbers and p-vars."""

    def __init__(self, text: str, env: dict[str, float], line: int) -> None:
        self.text = text
        self.pos = 0
        self.env = env
        self.line = line

    def fail(self, message: str) -> QasmError:
        return QasmError(self.line, f"{message} in expression {self.text!r}")

    def skip_ws(self) -> None:
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def peek(self) -> str:
        self.skip_ws()
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def parse(self) -> float:
        value = self.expr()
        self.skip_ws()
        if self.pos != len(self.text):
            raise self.fail(f"unexpected {self.text[self.pos]!r}")
        return value

    def expr(self) -> float:
        value = self.term()
        while True:
            op = self.peek()
            if op == "+":
                self.pos += 1
                value += self.term()
            elif op == "-":
                self.pos += 1
                value -= self.term()
            else:
                return value

    def term(self) -> float:
        value = self.factor()
        while True:
            op = self.peek()
            if op == "*":
                self.pos += 1
                value *= self.factor()
            elif op == "/":
                self.pos += 1
                divisor = self.factor()
                if divisor == 0.0:
                    raise self.fail("division by zero")
                value /= divisor
            else:
                return value

    def factor(self) -> float:
        ch = self.peek()
        if ch == "-":
            self.pos += 1
            return -self.factor()
        if ch == "+":
            self.pos += 1
            return self.factor()
        if ch == "(":
            self.pos += 1
            value = self.expr()
            if self.peek() != ")":
                raise self.fail("missing closing parenthesis")
            self.pos += 1
            return value
        m = _NUMBER_RE.match(self.text, self.pos)
        if m:
            self.pos = m.end()
            return float(m.group())
        m = _IDENT_RE.match(self.text, self.pos)
        if m:
            name = m.group()
            self.pos = m.end()
            if name == "pi":
                return angles.TAU / 2.0
            if name in self.env:
                return self.env[name]
            raise self.fail(f"unknown name {name!r}")
        raise self.fail("expected number, pi, parameter or parenthesis")


def _eval_expr(text: str, env: dict[str, float], line: int) -> float:
    if not text.strip():
        raise QasmError(line, "empty expression")
    return _ExprParser(text, env, line).parse()


# -- decomposition table ---------------------------------------------------


def _validate_table(table: dict) -> dict[str, list[dict]]:
    if not isinstance(table, dict):
        raise ValueError("decomposition table must be a JSON object")
    for name, steps in table.items():
        if not isinstance(name, str) or not _IDENT_RE.fullmatch(name):
            raise ValueError(f"bad gate name in table: {name!r}")
        if not isinstance(steps, list) or not steps:
            raise ValueError(f"table entry for {name!r} must be a non-empty list")
        for step in steps:
            if not isinstance(step, dict) or "name" not in step or "qubits" not in step:
                raise ValueError(f"each step for {name!r} needs 'name' and 'qubits'")
            if not isinstance(step["name"], str):
                raise ValueError(f"step name for {name!r} must be a string")
            qubits = step["qubits"]
            if (
                not isinstance(qubits, list)
                or not qubits
                or any(not isinstance(q, int) or q < 0 for q in qubits)
            ):
                raise ValueError(
                    f"step qubits for {name!r} must be non-negative operand indices"
                )
            params = step.get("params")
            if params is not None and not isinstance(params, list):
                raise ValueError(f"step params for {name!r} must be a list")
    return table


def load_table(source: str | dict) -> dict[str, list[dict]]:
    """Merge a user decomposition table (path or parsed dict) over the
    built-in one. User entries win on name collisions."""
    if isinstance(source, str):
        with open(source, "r", encoding="utf-8") as fh:
            user = json.load(fh)
    else:
        user = source
    merged = dict(DEFAULT_TABLE)
    merged.update(_validate_table(user))
    return merged


def _step_params(step: dict, env: dict[str, float], line: int) -> list[float]:
    if "params" in step and step["params"] is not None:
        raw = step["params"]
    elif "angle" in step and step["angle"] is not None:
        raw = [step["angle"]]
    else:
        raw = []
    out: list[float] = []
    for item in raw:
        if isinstance(item, (int, float)) and not isinstance(item, bool):
            out.append(float(item))
        elif isinstance(item, str):
            out.append(_eval_expr(item, env, line))
        else:
            raise QasmError(line, f"bad parameter entry in table step: {item!r}")
    return out


# -- lowering --------------------------------------------------------------


class _Lowerer:
    def __init__(
        self,
        dag: CircuitDag,
        table: dict[str, list[dict]],
        durations: dict[str, int],
    ) -> None:
        self.dag = dag
        self.table = table
        self.durations = durations

    def duration_for(self, key: str, default: int = 1) -> int:
        value = self.durations.get(key, default)
        if not isinstance(value, int) or isinstance(value, bool) or value < 0:
            raise ValueError(f"duration for {key!r} must be a non-negative integer")
        return value

    def add(self, kind: GateKind, qubits: tuple[int, ...]) -> None:
        if kind.tag is GateTag.BARRIER:
            duration = self.duration_for("barrier", 0)
        elif kind.tag is GateTag.MEASURE:
            duration = self.duration_for("measure")
        elif kind.tag is GateTag.RZ_INJECTION:
            duration = self.duration_for("rz")
        else:
            duration = self.duration_for(kind.name)
        self.dag.add_gate(kind, qubits, duration)

    def emit(
        self,
        name: str,
        params: list[float],
        qubits: tuple[int, ...],
        line: int,
        depth: int = 0,
    ) -> None:
        """Recursively rewrite one instruction down to IR nodes."""
        if depth > _MAX_LOWERING_DEPTH:
            raise QasmError(
                line, f"decomposition of {name!r} recurses too deep (table cycle?)"
            )
        try:
            if name in self.table:
                self.emit_table(name, params, qubits, line, depth)
            elif name in _CLIFFORD_1Q:
                self.expect(name, params, qubits, 0, 1, line)
                self.add(GateKind.clifford(name), qubits)
            elif name in _CLIFFORD_2Q:
                self.expect(name, params, qubits, 0, 2, line)
                self.add(GateKind.clifford(name), qubits)
            elif name in ("t", "tdg"):
                self.expect(name, params, qubits, 0, 1, line)
                self.add(GateKind.t(dagger=name == "tdg"), qubits)
            elif name == "rz":
                self.expect(name, params, qubits, 1, 1, line)
                self.add(GateKind.from_rz_angle(params[0]), qubits)
            else:
                raise QasmError(line, f"unknown gate {name!r}")
        except CircuitError as exc:
            raise QasmError(line, str(exc)) from exc

    def emit_table(
        self,
        name: str,
        params: list[float],
        qubits: tuple[int, ...],
        line: int,
        depth: int,
    ) -> None:
        steps = self.table[name]
        arity = 1 + max(q for step in steps for q in step["qubits"])
        wanted = self.param_count(steps)
        if len(params) != wanted:
            raise QasmError(
                line, f"{name} takes {wanted} parameter(s), got {len(params)}"
            )
        if len(qubits) != arity:
            raise QasmError(line, f"{name} takes {arity} qubit(s), got {len(qubits)}")
        env = {f"p{i}": v for i, v in enumerate(params)}
        for step in steps:
            step_qubits = tuple(qubits[i] for i in step["qubits"])
            self.emit(
                step["name"], _step_params(step, env, line), step_qubits, line, depth + 1
            )

    @staticmethod
    def param_count(steps: list[dict]) -> int:
        highest = -1
        for step in steps:
            entries = step.get("params") or (
                [step["angle"]] if step.get("angle") is not None else []
            )
            for item in entries:
                if isinstance(item, str):
                    for m in re.finditer(r"\bp(\d+)\b", item):
                        highest = max(highest, int(m.group(1)))
        return highest + 1

    @staticmethod
    def expect(
        name: str,
        params: list[float],
        qubits: tuple[int, ...],
        n_params: int,
        n_qubits: int,
        line: int,
    ) -> None:
        if len(params) != n_params:
            raise QasmError(
                line, f"{name} takes {n_params} parameter(s), got {len(params)}"
            )
        if len(qubits) != n_qubits:
            raise QasmError(line, f"{name} takes {n_qubits} qubit(s), got {len(qubits)}")


# -- statement parsing -----------------------------------------------------

_QREG_RE = re.compile(r"^qreg\s+([A-Za-z_][A-Za-z0-9_]*)\s*\[\s*(\d+)\s*\]$")
_INCLUDE_RE = re.compile(r'^include\s+"[^"]*"$')
_OPERAND_RE = re.compile(r"^([A-Za-z_][A-Za-z0-9_]*)\s*(?:\[\s*(\d+)\s*\])?$")
_VERSION_RE = re.compile(r"^OPENQASM\s+(\S+)$")

_REJECTED = {
    "creg": "classical registers are not supported",
    "if": "classically conditioned gates are not supported",
    "gate": "user gate declarations are not supported; extend the decomposition table instead",
    "opaque": "opaque gates are not supported",
    "reset": "reset is not supported",
}


def _split_top_level(text: str, line: int) -> tuple[str, list[float], str, int]:
    """Break a gate statement into (name, params, operand text)."""
    m = _IDENT_RE.match(text)
    if not m:
        raise QasmError(line, f"cannot parse statement {text!r}")
    name = m.group()
    rest = text[m.end() :].lstrip()
    params: list[float] = []
    if rest.startswith("("):
        depth = 0
        for i, ch in enumerate(rest):
            if ch == "(":
                depth += 1
            elif ch == ")":
                depth -= 1
                if depth == 0:
                    inner = rest[1:i]
                    rest = rest[i + 1 :].lstrip()
                    if inner.strip():
                        params = [
                            _eval_expr(part, {}, line) for part in inner.split(",")
                        ]
                    break
        else:
            raise QasmError(line, "unbalanced parentheses in parameter list")
    return name, params, rest, line


class _Registers:
    def __init__(self) -> None:
        self.offsets: dict[str, tuple[int, int]] = {}
        self.total = 0

    def declare(self, name: str, size: int, line: int) -> None:
        if name in self.offsets:
            raise QasmError(line, f"register {name!r} already declared")
        if size < 1:
            raise QasmError(line, f"register {name!r} must have positive size")
        self.offsets[name] = (self.total, size)
        self.total += size

    def resolve(self, operand: str, line: int) -> list[int]:
        """One operand to concrete qubit indices (whole register or one bit)."""
        m = _OPERAND_RE.match(operand.strip())
        if not m:
            raise QasmError(line, f"cannot parse operand {operand!r}")
        name, index = m.group(1), m.group(2)
        if name not in self.offsets:
            raise QasmError(line, f"unknown register {name!r}")
        offset, size = self.offsets[name]
        if index is None:
            return list(range(offset, offset + size))
        i = int(index)
        if i >= size:
            raise QasmError(line, f"{name}[{i}] out of range (size {size})")
        return [offset + i]


def parse_qasm(
    text: str,
    table: dict[str, list[dict]] | None = None,
    durations: dict[str, int] | None = None,
) -> CircuitDag:
    """Parse OPENQASM 2.0 source into a fully lowered circuit DAG.

    ``table`` is a decomposition table as produced by :func:`load_table`
    (defaults to the built-in one). ``durations`` overrides per-gate cycle
    counts by base gate name; everything defaults to 1 cycle except
    barriers, which are instantaneous ordering constraints.

    Node priorities are assigned before returning, so the result is ready
    for the scheduler as-is.
    """
    stmts = _statements(text)
    if not stmts:
        raise QasmError(1, "empty program (missing OPENQASM 2.0 header)")

    line, head = stmts[0]
    m = _VERSION_RE.match(head)
    if not m:
        raise QasmError(line, "first statement must be the OPENQASM 2.0 header")
    if m.group(1) != "2.0":
        raise QasmError(line, f"unsupported OPENQASM version {m.group(1)!r}")

    regs = _Registers()
    pending: list[tuple[int, str]] = []
    for line, stmt in stmts[1:]:
        if _INCLUDE_RE.match(stmt):
            continue
        qm = _QREG_RE.match(stmt)
        if qm:
            regs.declare(qm.group(1), int(qm.group(2)), line)
            continue
        keyword = stmt.split(None, 1)[0].split("(", 1)[0]
        if keyword in _REJECTED:
            raise QasmError(line, _REJECTED[keyword])
        if stmt.startswith("}"):
            raise QasmError(line, "user gate declarations are not supported")
        pending.append((line, stmt))

    dag = CircuitDag(regs.total)
    lowerer = _Lowerer(dag, load_table(table or {}), durations or {})

    for line, stmt in pending:
        if stmt.startswith("measure ") or stmt == "measure":
            _parse_measure(stmt, regs, lowerer, line)
            continue
        name, params, operand_text, line = _split_top_level(stmt, line)
        if name == "barrier":
            _parse_barrier(operand_text, regs, lowerer, line)
            continue
        if not operand_text:
            raise QasmError(line, f"{name} needs qubit operands")
        operands = [regs.resolve(part, line) for part in operand_text.split(",")]
        _apply(name, params, operands, lowerer, line)

    assign_priorities(dag)
    return dag


def _apply(
    name: str,
    params: list[float],
    operands: list[list[int]],
    lowerer: _Lowerer,
    line: int,
) -> None:
    if len(operands) == 1 and len(operands[0]) > 1:
        # whole-register shorthand for single-qubit gates
        for q in operands[0]:
            lowerer.emit(name, params, (q,), line)
        return
    for group in operands:
        if len(group) != 1:
            raise QasmError(
                line,
                f"multi-qubit {name} needs indexed operands like q[0], not whole registers",
            )
    lowerer.emit(name, params, tuple(group[0] for group in operands), line)


def _parse_barrier(
    operand_text: str, regs: _Registers, lowerer: _Lowerer, line: int
) -> None:
    """One barrier node spanning every referenced qubit."""
    if not operand_text:
        raise QasmError(line, "barrier needs qubit operands")
    qubits: list[int] = []
    seen: set[int] = set()
    for part in operand_text.split(","):
        for q in regs.resolve(part, line):
            if q not in seen:
                seen.add(q)
                qubits.append(q)
    try:
        lowerer.add(GateKind.barrier(), tuple(qubits))
    except CircuitError as exc:
        raise QasmError(line, str(exc)) from exc


_MEASURE_RE = re.compile(r"^measure\s+(.+?)\s*->\s*(.+)$")


def _parse_measure(stmt: str, regs: _Registers, lowerer: _Lowerer, line: int) -> None:
    m = _MEASURE_RE.match(stmt)
    if not m:
        raise QasmError(line, "measure needs the form 'measure q -> c'")
    qubits = regs.resolve(m.group(1), line)
    # The classical target is validated syntactically and otherwise ignored;
    # nothing downstream consumes measurement outcomes.
    if not _OPERAND_RE.match(m.group(2).strip()):
        raise QasmError(line, f"cannot parse classical target {m.group(2)!r}")
    for q in qubits:
        lowerer.add(GateKind.measure(), (q,))


def lower_gates(
    dag: CircuitDag,
    table: dict[str, list[dict]] | None = None,
    durations: dict[str, int] | None = None,
) -> CircuitDag:
    """Re-expand named Clifford nodes through a decomposition table.

    Useful for hand-built DAGs that contain composite names such as swap.
    Nodes whose name is not in the table are copied unchanged, in id order,
    qubit chaining and priorities rebuilt.
    """
    merged = load_table(table or {})
    out = CircuitDag(dag.qubit_count)
    lowerer = _Lowerer(out, merged, durations or {})
    for node in dag.nodes:
        if node.kind.tag is GateTag.CLIFFORD and node.kind.name in merged:
            lowerer.emit(node.kind.name, [], node.qubits, line=0)
        else:
            out.add_gate(node.kind, node.qubits, node.duration)
    assign_priorities(out)
    return out
