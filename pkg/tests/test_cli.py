"""Command line interface: flags, outputs, manifests and exit codes."""

from __future__ import annotations

import json

import pytest

from magicsim.cli import main
from magicsim.manifest import RunManifest

from helpers import bursty_qasm_text

TINY = """OPENQASM 2.0;
qreg q[2];
t q[0];
t q[1];
h q[0];
"""

RZ_ONLY = """OPENQASM 2.0;
qreg q[1];
rz(pi/8) q[0];
"""


@pytest.fixture()
def tiny_qasm(tmp_path):
    path = tmp_path / "tiny.qasm"
    path.write_text(TINY)
    return path


def _run(*argv) -> int:
    return main([str(a) for a in argv])


# --- analyze ---------------------------------------------------------------


def test_analyze_writes_profile_layers_and_manifest(tmp_path, tiny_qasm) -> None:
    out = tmp_path / "run"
    assert _run("analyze", tiny_qasm, "--out", out, "--no-plot") == 0
    data = json.loads((out / "analyze.json").read_text())
    assert data["qubits"] == 2
    assert data["gates"] == 3
    assert data["t_count"] == 2
    assert data["gamma_peak"] == 2
    assert data["structural_predictors"]["burstiness"]["peak_to_mean"] == 2.0
    lines = (out / "analyze_layers.csv").read_text().splitlines()
    assert lines[0] == "layer,nonclifford_count"
    assert lines[1] == "1,2"
    assert not (out / "analyze.png").exists()
    manifest = RunManifest.read(out / "analyze_manifest.json")
    assert manifest.command == "analyze"
    assert "analyze.json" in manifest.outputs


def test_analyze_renders_a_figure_by_default(tmp_path, tiny_qasm) -> None:
    out = tmp_path / "run"
    assert _run("analyze", tiny_qasm, "--out", out) == 0
    assert (out / "analyze.png").stat().st_size > 0


def test_missing_input_file_exits_2(tmp_path) -> None:
    assert _run("analyze", tmp_path / "nope.qasm", "--out", tmp_path) == 2


def test_malformed_qasm_exits_2(tmp_path) -> None:
    bad = tmp_path / "bad.qasm"
    bad.write_text("OPENQASM 2.0;\nqreg q[1];\ncreg c[1];\n")
    assert _run("analyze", bad, "--out", tmp_path) == 2


# --- simulate ---------------------------------------------------------------


def test_simulate_defaults_to_deterministic_mode(tmp_path, tiny_qasm) -> None:
    out = tmp_path / "run"
    code = _run(
        "simulate", tiny_qasm, "--mechanism", "distillation", "-F", "2",
        "--trials", "3", "--out", out, "--no-plot",
    )
    assert code == 0
    data = json.loads((out / "simulate.json").read_text())
    assert data["mode"] == "A"
    assert data["F"] == 2
    assert data["trials"] == 3
    assert data["metrics"]["cycles"]["stddev"] == 0.0
    assert data["mechanism"]["mechanism"] == "distillation"
    assert data["static_cycles"] > 0
    assert data["mean_overhead_ratio"] >= 1.0


def test_simulate_trace_csv_has_the_contract_header(tmp_path, tiny_qasm) -> None:
    out = tmp_path / "run"
    code = _run(
        "simulate", tiny_qasm, "--mechanism", "distillation", "-F", "1",
        "--trace", "--out", out, "--no-plot",
    )
    assert code == 0
    lines = (out / "simulate_trace.csv").read_text().splitlines()
    assert lines[0] == "cycle,consumed,stalled"
    assert lines[1].startswith("1,")
    data = json.loads((out / "simulate.json").read_text())
    # mode A trials are identical, so the trace spans exactly mean cycles
    assert len(lines) - 1 == int(data["metrics"]["cycles"]["mean"])


def test_simulate_deadlock_exits_1(tmp_path, tiny_qasm) -> None:
    out = tmp_path / "run"
    assert _run(
        "simulate", tiny_qasm, "--mechanism", "distillation", "-F", "0",
        "--out", out, "--no-plot",
    ) == 1


def test_rz_handling_flag_rejected_for_rz_mechanism(tmp_path, tiny_qasm) -> None:
    assert _run(
        "simulate", tiny_qasm, "--mechanism", "rz", "-F", "2",
        "--rz-handling", "as-one-state", "--out", tmp_path, "--no-plot",
    ) == 2


def test_rz_mechanism_runs_rotation_circuits(tmp_path) -> None:
    src = tmp_path / "rz.qasm"
    src.write_text(RZ_ONLY)
    out = tmp_path / "run"
    code = _run(
        "simulate", src, "--mechanism", "rz", "-F", "1", "--mode", "C",
        "--trials", "5", "--seed", "5", "--out", out, "--no-plot",
    )
    assert code == 0
    data = json.loads((out / "simulate.json").read_text())
    assert data["metrics"]["injection_count"]["mean"] >= 1.0


def test_p_phys_flag_rederives_the_mechanism(tmp_path, tiny_qasm) -> None:
    out = tmp_path / "run"
    code = _run(
        "simulate", tiny_qasm, "--mechanism", "distillation", "--p-phys", "1e-3",
        "-F", "2", "--out", out, "--no-plot",
    )
    assert code == 0
    data = json.loads((out / "simulate.json").read_text())
    assert data["mechanism"]["p_phys"] == 1e-3
    assert data["mechanism"]["abort_rate"] == pytest.approx(15e-3 + 105e-6)


# --- config files -----------------------------------------------------------


def test_config_file_supplies_defaults_and_flags_win(tmp_path, tiny_qasm) -> None:
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"mechanism": {"mechanism": "distillation"}, "F": 1, "seed": 9}))
    out = tmp_path / "run"
    code = _run(
        "simulate", tiny_qasm, "--config", cfg, "--seed", "4", "--mode", "D",
        "--out", out, "--no-plot",
    )
    assert code == 0
    data = json.loads((out / "simulate.json").read_text())
    assert data["F"] == 1  # from the config file
    assert data["base_seed"] == 4  # flag beats config


def test_unknown_config_key_exits_2(tmp_path, tiny_qasm) -> None:
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"mechanism": {"mechanism": "distillation"}, "factories": 1}))
    assert _run("simulate", tiny_qasm, "--config", cfg, "--out", tmp_path, "--no-plot") == 2


def test_invalid_config_json_exits_2(tmp_path, tiny_qasm) -> None:
    cfg = tmp_path / "cfg.json"
    cfg.write_text("{not json")
    assert _run("simulate", tiny_qasm, "--config", cfg, "--out", tmp_path, "--no-plot") == 2


def test_mechanism_is_required_without_config(tmp_path, tiny_qasm) -> None:
    assert _run("simulate", tiny_qasm, "-F", "1", "--out", tmp_path, "--no-plot") == 2


# --- sweep -------------------------------------------------------------------


def test_sweep_writes_csv_summary_and_manifest(tmp_path, tiny_qasm) -> None:
    out = tmp_path / "run"
    code = _run(
        "sweep", tiny_qasm, "--mechanism", "distillation", "--f-min", "1",
        "--f-max", "2", "--trials", "2", "--out", out, "--no-plot",
    )
    assert code == 0
    summary = json.loads((out / "sweep_summary.json").read_text())
    assert set(summary) == {"F_star", "F_plateau", "F_det", "F_naive_peak", "F_naive_avg", "savings"}
    lines = (out / "sweep.csv").read_text().splitlines()
    assert len(lines) == 1 + 2 + 2
    manifest = RunManifest.read(out / "sweep_manifest.json")
    assert manifest.parameters["mode"] == "D"  # sweep defaults to both channels
    assert manifest.parameters["f_min"] == 1
    assert "sweep.csv" in manifest.outputs


def test_sweep_rejects_inverted_range(tmp_path, tiny_qasm) -> None:
    assert _run(
        "sweep", tiny_qasm, "--mechanism", "distillation", "--f-min", "3",
        "--f-max", "2", "--trials", "2", "--out", tmp_path, "--no-plot",
    ) == 2


# --- sensitivity -------------------------------------------------------------


def test_sensitivity_grid_csv(tmp_path, tiny_qasm) -> None:
    out = tmp_path / "run"
    code = _run(
        "sensitivity", tiny_qasm, "--mechanism", "distillation",
        "--per-list", "1e-4,1e-3", "--d-list", "7", "--f-list", "1,2",
        "--trials", "2", "--out", out, "--no-plot",
    )
    assert code == 0
    lines = (out / "sensitivity.csv").read_text().splitlines()
    assert lines[0] == "p,d,F,mean_V,std_V"
    assert len(lines) == 1 + 4


def test_sensitivity_rejects_empty_axis(tmp_path, tiny_qasm) -> None:
    assert _run(
        "sensitivity", tiny_qasm, "--mechanism", "distillation",
        "--per-list", "", "--d-list", "7", "--f-list", "1",
        "--out", tmp_path, "--no-plot",
    ) == 2


# --- rerun -------------------------------------------------------------------


def test_rerun_reproduces_outputs_bitwise(tmp_path, tiny_qasm) -> None:
    first = tmp_path / "first"
    code = _run(
        "sweep", tiny_qasm, "--mechanism", "distillation", "--f-min", "1",
        "--f-max", "2", "--trials", "3", "--seed", "7", "--out", first, "--no-plot",
    )
    assert code == 0
    second = tmp_path / "second"
    assert _run("rerun", "--manifest", first / "sweep_manifest.json", "--out", second) == 0
    for name in ("sweep.csv", "sweep_summary.json", "sweep_manifest.json"):
        assert (second / name).read_bytes() == (first / name).read_bytes()


def test_rerun_detects_changed_input(tmp_path, tiny_qasm) -> None:
    first = tmp_path / "first"
    assert _run(
        "simulate", tiny_qasm, "--mechanism", "distillation", "-F", "1",
        "--out", first, "--no-plot",
    ) == 0
    tiny_qasm.write_text(TINY + "h q[1];\n")
    assert _run("rerun", "--manifest", first / "simulate_manifest.json", "--out", tmp_path / "x") == 2


def test_rerun_rejects_tampered_manifest(tmp_path, tiny_qasm) -> None:
    first = tmp_path / "first"
    assert _run(
        "simulate", tiny_qasm, "--mechanism", "distillation", "-F", "1",
        "--out", first, "--no-plot",
    ) == 0
    path = first / "simulate_manifest.json"
    blob = json.loads(path.read_text())
    blob["surprise"] = True
    path.write_text(json.dumps(blob))
    assert _run("rerun", "--manifest", path, "--out", tmp_path / "x") == 2


# --- usage -------------------------------------------------------------------


def test_unknown_flag_exits_2(tmp_path, tiny_qasm) -> None:
    assert _run("simulate", tiny_qasm, "--frobnicate", "--out", tmp_path) == 2


def test_larger_circuit_end_to_end(tmp_path) -> None:
    src = tmp_path / "bursty.qasm"
    src.write_text(bursty_qasm_text(blocks=2))
    out = tmp_path / "run"
    code = _run(
        "simulate", src, "--mechanism", "cultivation", "--mode", "D", "-F", "40",
        "--trials", "3", "--seed", "1", "--out", out, "--no-plot", "--trace",
    )
    assert code == 0
    data = json.loads((out / "simulate.json").read_text())
    assert data["metrics"]["cycles"]["mean"] > 0
    assert data["mechanism"]["mechanism"] == "cultivation"
