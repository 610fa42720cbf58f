"""Command-line front end.

Four analysis commands (analyze, simulate, sweep, sensitivity) plus rerun,
which replays any previous run from its manifest. Flag precedence is
CLI > --config JSON > built-in defaults. Exit codes: 0 success, 1 simulation
failure (deadlock, cycle-limit), 2 input or usage error.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys

from .circuit import static_profile
from .manifest import RunManifest, TOOL_VERSION, sha256_of
from .metrics import structural_predictors
from .production import config_from_json, config_to_json, derive_config
from .qasm import QasmError, parse_qasm
from .scheduler import SimulationError, SimulationMode
from .sweep import (
    aggregate_trials,
    run_trials,
    sensitivity_grid,
    static_cycles,
    sweep_factories,
    write_sensitivity_csv,
    write_summary_json,
    write_sweep_csv,
)

__all__ = ["build_parser", "main"]

# (p_phys, distance) fed to derive_config when only the family name is given.
_FAMILY_DEFAULTS = {
    "distillation": (1e-4, 7),
    "cultivation": (1e-3, 7),
    "rz": (1e-3, 3),
}

_SIM_KNOBS = ("rz_handling", "priority_update", "handoff_cycles",
              "fixup_duration", "cost_units", "max_cycles")

_COMMON_DEFAULTS = {
    "trials": 100,
    "seed": 0,
    "rz_handling": "as-one-state",
    "priority_update": "full",
    "handoff_cycles": 1,
    "fixup_duration": 1,
    "cost_units": "logical-tiles",
    "max_cycles": 10**8,
    "plot": True,
}

_CONFIG_KEYS = {
    "analyze": {"plot"},
    "simulate": {"mechanism", "mode", "F", "trials", "seed", "trace", "plot", *_SIM_KNOBS},
    "sweep": {"mechanism", "mode", "f_min", "f_max", "trials", "seed", "eps", "plot", *_SIM_KNOBS},
    "sensitivity": {"mechanism", "mode", "per_list", "d_list", "f_list",
                    "trials", "seed", "plot", *_SIM_KNOBS},
}


def _sig4(x: float) -> str:
    return f"{x:.4g}"


def _floats_csv(text: str) -> list[float]:
    items = [part.strip() for part in text.split(",") if part.strip()]
    if not items:
        raise ValueError("empty list")
    return [float(part) for part in items]


def _ints_csv(text: str) -> list[int]:
    items = [part.strip() for part in text.split(",") if part.strip()]
    if not items:
        raise ValueError("empty list")
    return [int(part) for part in items]


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="magicsim",
        description="Stochastic magic-state production and consumption simulator",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser) -> None:
        p.add_argument("circuit", help="OpenQASM 2.0 circuit file")
        p.add_argument("--out", default=".", help="output directory (default: current)")
        p.add_argument("--config", help="JSON file supplying defaults for the flags below")
        p.add_argument("--no-plot", action="store_true", help="skip figure rendering")

    def mechanism_flags(p: argparse.ArgumentParser) -> None:
        p.add_argument("--mechanism", choices=("distillation", "cultivation", "rz"))
        p.add_argument("--p-phys", dest="p_phys", type=float,
                       help="physical error rate (resets the mechanism to derived defaults)")
        p.add_argument("--d", type=int,
                       help="code distance knob (resets the mechanism to derived defaults)")

    def sim_flags(p: argparse.ArgumentParser) -> None:
        p.add_argument("--mode", help="error channels: A, B, C, or D")
        p.add_argument("--trials", type=int)
        p.add_argument("--seed", type=int)
        p.add_argument("--rz-handling", dest="rz_handling",
                       help="'as-one-state' or 'expand:n' (T-state mechanisms only)")
        p.add_argument("--priority-update", dest="priority_update", choices=("full", "static"))

    p = sub.add_parser("analyze", help="static demand profile of a circuit")
    common(p)

    p = sub.add_parser("simulate", help="run trials at a fixed unit count")
    common(p)
    mechanism_flags(p)
    sim_flags(p)
    p.add_argument("-F", dest="F", type=int, help="production unit count")
    p.add_argument("--trace", action="store_true", help="also write the per-cycle trace CSV")

    p = sub.add_parser("sweep", help="sweep the unit count and locate F*, plateaus")
    common(p)
    mechanism_flags(p)
    sim_flags(p)
    p.add_argument("--f-min", dest="f_min", type=int)
    p.add_argument("--f-max", dest="f_max", type=int)
    p.add_argument("--eps", type=float, help="plateau threshold (default 0.01)")
    p.add_argument("--workers", type=int, help="parallel worker processes")

    p = sub.add_parser("sensitivity", help="mean volume over a (p, d, F) grid")
    common(p)
    p.add_argument("--mechanism", choices=("distillation", "cultivation", "rz"))
    p.add_argument("--mode", help="error channels: A, B, C, or D")
    p.add_argument("--per-list", dest="per_list", help="comma-separated physical error rates")
    p.add_argument("--d-list", dest="d_list", help="comma-separated code distances")
    p.add_argument("--f-list", dest="f_list", help="comma-separated unit counts")
    p.add_argument("--trials", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--workers", type=int)

    p = sub.add_parser("rerun", help="replay a previous run from its manifest")
    p.add_argument("--manifest", required=True, help="path to a *_manifest.json")
    p.add_argument("--out", help="output directory (default: the manifest's directory)")
    p.add_argument("--workers", type=int)

    return parser


def _load_config(path: str | None) -> dict:
    if path is None:
        return {}
    with open(path, "r", encoding="utf-8") as fh:
        data = json.load(fh)
    if not isinstance(data, dict):
        raise ValueError("config file must hold a JSON object")
    return data


def _check_config_keys(command: str, file_cfg: dict) -> None:
    extra = set(file_cfg) - _CONFIG_KEYS[command]
    if extra:
        raise ValueError(f"unknown config keys for {command}: {sorted(extra)}")


def _picker(args: argparse.Namespace, file_cfg: dict):
    def pick(key: str, default):
        flag = getattr(args, key, None)
        if flag is not None:
            return flag
        if key in file_cfg:
            return file_cfg[key]
        return default

    return pick


def _resolve_mechanism(args: argparse.Namespace, file_cfg: dict) -> dict:
    """Mechanism precedence: --p-phys/--d re-derive, else config file, else
    family defaults. Returns the config_to_json dict stored in params."""
    mech_json = file_cfg.get("mechanism")
    family_flag = getattr(args, "mechanism", None)
    p_flag = getattr(args, "p_phys", None)
    d_flag = getattr(args, "d", None)

    family = family_flag
    if family is None and isinstance(mech_json, dict):
        family = mech_json.get("mechanism")
    if family is None:
        raise ValueError("a mechanism is required: pass --mechanism or a config file")
    if family not in _FAMILY_DEFAULTS:
        raise ValueError(f"unknown mechanism {family!r}")

    if p_flag is not None or d_flag is not None:
        base_p, base_d = _FAMILY_DEFAULTS[family]
        cfg = derive_config(family, p_flag if p_flag is not None else base_p,
                            d_flag if d_flag is not None else base_d)
        return config_to_json(cfg)
    if isinstance(mech_json, dict) and mech_json.get("mechanism") == family:
        return config_to_json(config_from_json(mech_json))
    cfg = derive_config(family, *_FAMILY_DEFAULTS[family])
    return config_to_json(cfg)


def _check_rz_handling(params: dict, args: argparse.Namespace, file_cfg: dict) -> None:
    explicitly = getattr(args, "rz_handling", None) is not None or "rz_handling" in file_cfg
    if explicitly and params["mechanism"]["mechanism"] == "rz":
        raise ValueError("--rz-handling does not apply to --mechanism rz")


def _resolve_sim_knobs(pick, params: dict) -> None:
    for key in _SIM_KNOBS:
        params[key] = pick(key, _COMMON_DEFAULTS[key])


def _sim_kwargs(params: dict) -> dict:
    return {key: params[key] for key in _SIM_KNOBS}


def _write_json(payload: dict, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _parse_circuit(input_path: str):
    with open(input_path, "r", encoding="utf-8") as fh:
        return parse_qasm(fh.read())


# ---------------------------------------------------------------------------
# command bodies, shared by the normal path and rerun


def _run_analyze(input_path: str, params: dict, out_dir: str, workers=None) -> list[str]:
    dag = _parse_circuit(input_path)
    profile = static_profile(dag)

    report = profile.as_dict()
    report["qubits"] = dag.qubit_count
    report["gates"] = len(dag)
    report["structural_predictors"] = (
        structural_predictors(dag, profile) if len(dag) else None
    )

    outputs = ["analyze.json", "analyze_layers.csv"]
    _write_json(report, os.path.join(out_dir, "analyze.json"))
    with open(os.path.join(out_dir, "analyze_layers.csv"), "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(("layer", "nonclifford_count"))
        for k, count in enumerate(profile.per_layer_demand, start=1):
            writer.writerow((k, count))
    if params["plot"]:
        from .plots import plot_profile

        plot_profile(profile, os.path.join(out_dir, "analyze.png"))
        outputs.append("analyze.png")

    print(f"qubits {dag.qubit_count}, gates {len(dag)}, depth {profile.depth_cycles} cycles")
    print(f"t_count {profile.t_count}, rz_count {profile.rz_count}")
    print(f"gamma_peak {profile.gamma_peak}, gamma_avg {_sig4(profile.gamma_avg)}")
    return outputs


def _run_simulate(input_path: str, params: dict, out_dir: str, workers=None) -> list[str]:
    dag = _parse_circuit(input_path)
    mech = config_from_json(params["mechanism"])
    mode = SimulationMode.parse(params["mode"])

    results = run_trials(dag, mech, mode, params["F"], params["trials"], params["seed"],
                         **_sim_kwargs(params))
    agg = aggregate_trials(results)
    baseline = static_cycles(
        dag, mech,
        rz_handling=params["rz_handling"], priority_update=params["priority_update"],
        handoff_cycles=params["handoff_cycles"], max_cycles=params["max_cycles"],
    )
    mean_c = agg["metrics"]["cycles"]["mean"]

    report = {
        "mechanism": params["mechanism"],
        "mode": mode.value,
        "F": params["F"],
        "trials": params["trials"],
        "base_seed": params["seed"],
        "single_sample": agg["single_sample"],
        "metrics": agg["metrics"],
        "static_cycles": baseline,
        "mean_overhead_ratio": mean_c / baseline,
    }
    outputs = ["simulate.json"]
    _write_json(report, os.path.join(out_dir, "simulate.json"))

    first = results[0]
    if params["trace"]:
        with open(os.path.join(out_dir, "simulate_trace.csv"), "w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(("cycle", "consumed", "stalled"))
            for c, (granted, stalled) in enumerate(zip(first.demand_trace, first.stall_trace), start=1):
                writer.writerow((c, granted, stalled))
        outputs.append("simulate_trace.csv")
    if params["plot"]:
        from .plots import plot_trace

        plot_trace(first.demand_trace, first.stall_trace,
                   os.path.join(out_dir, "simulate_trace.png"))
        outputs.append("simulate_trace.png")

    print(f"mode {mode.value}, F={params['F']}, {params['trials']} trial(s)")
    print(f"mean cycles {_sig4(mean_c)} (static baseline {baseline}, "
          f"overhead {_sig4(mean_c / baseline)})")
    print(f"mean volume {_sig4(agg['metrics']['volume']['mean'])}, "
          f"mean fixups {_sig4(agg['metrics']['fixup_count']['mean'])}, "
          f"mean peak demand {_sig4(agg['metrics']['peak_demand']['mean'])}")
    return outputs


def _run_sweep(input_path: str, params: dict, out_dir: str, workers=None) -> list[str]:
    dag = _parse_circuit(input_path)
    mech = config_from_json(params["mechanism"])
    if params["f_min"] > params["f_max"]:
        raise ValueError("--f-min must not exceed --f-max")

    result = sweep_factories(
        dag, mech, SimulationMode.parse(params["mode"]),
        range(params["f_min"], params["f_max"] + 1),
        params["trials"], params["seed"], params["eps"],
        workers=workers, **_sim_kwargs(params),
    )
    outputs = ["sweep.csv", "sweep_summary.json"]
    write_sweep_csv(result, os.path.join(out_dir, "sweep.csv"))
    write_summary_json(result, os.path.join(out_dir, "sweep_summary.json"))
    if params["plot"]:
        from .plots import plot_sweep

        plot_sweep(result, os.path.join(out_dir, "sweep.png"))
        outputs.append("sweep.png")

    for key, value in result.summary().items():
        print(f"{key} = {value}")
    return outputs


def _run_sensitivity(input_path: str, params: dict, out_dir: str, workers=None) -> list[str]:
    dag = _parse_circuit(input_path)
    cells = sensitivity_grid(
        dag, params["mechanism"], params["per_list"], params["d_list"], params["f_list"],
        params["trials"], params["seed"],
        mode=SimulationMode.parse(params["mode"]), workers=workers, **_sim_kwargs(params),
    )
    outputs = ["sensitivity.csv"]
    write_sensitivity_csv(cells, os.path.join(out_dir, "sensitivity.csv"))
    if params["plot"]:
        from .plots import plot_sensitivity

        plot_sensitivity(cells, os.path.join(out_dir, "sensitivity.png"))
        outputs.append("sensitivity.png")

    print(f"{len(cells)} grid cells over p x d x F")
    return outputs


_RUNNERS = {
    "analyze": _run_analyze,
    "simulate": _run_simulate,
    "sweep": _run_sweep,
    "sensitivity": _run_sensitivity,
}


# ---------------------------------------------------------------------------
# flag resolution per command


def _params_analyze(args, file_cfg: dict) -> dict:
    pick = _picker(args, file_cfg)
    plot = False if args.no_plot else pick("plot", True)
    return {"plot": plot}


def _params_simulate(args, file_cfg: dict) -> dict:
    pick = _picker(args, file_cfg)
    params = {
        "mechanism": _resolve_mechanism(args, file_cfg),
        "mode": pick("mode", "A"),
        "F": pick("F", None),
        "trials": pick("trials", _COMMON_DEFAULTS["trials"]),
        "seed": pick("seed", _COMMON_DEFAULTS["seed"]),
        "trace": bool(args.trace) or bool(file_cfg.get("trace", False)),
        "plot": False if args.no_plot else pick("plot", True),
    }
    _resolve_sim_knobs(pick, params)
    if params["F"] is None:
        raise ValueError("a unit count is required: pass -F")
    _check_rz_handling(params, args, file_cfg)
    return params


def _params_sweep(args, file_cfg: dict) -> dict:
    pick = _picker(args, file_cfg)
    params = {
        "mechanism": _resolve_mechanism(args, file_cfg),
        "mode": pick("mode", "D"),
        "f_min": pick("f_min", None),
        "f_max": pick("f_max", None),
        "trials": pick("trials", _COMMON_DEFAULTS["trials"]),
        "seed": pick("seed", _COMMON_DEFAULTS["seed"]),
        "eps": pick("eps", 0.01),
        "plot": False if args.no_plot else pick("plot", True),
    }
    _resolve_sim_knobs(pick, params)
    if params["f_min"] is None or params["f_max"] is None:
        raise ValueError("a unit-count range is required: pass --f-min and --f-max")
    _check_rz_handling(params, args, file_cfg)
    return params


def _params_sensitivity(args, file_cfg: dict) -> dict:
    pick = _picker(args, file_cfg)
    family = getattr(args, "mechanism", None) or file_cfg.get("mechanism")
    if family is None:
        raise ValueError("a mechanism family is required: pass --mechanism")
    if isinstance(family, dict):
        raise ValueError("sensitivity takes a mechanism family name, not a full config")
    per_list = _floats_csv(args.per_list) if args.per_list is not None else file_cfg.get("per_list")
    d_list = _ints_csv(args.d_list) if args.d_list is not None else file_cfg.get("d_list")
    f_list = _ints_csv(args.f_list) if args.f_list is not None else file_cfg.get("f_list")
    if not per_list or not d_list or not f_list:
        raise ValueError("sensitivity needs non-empty --per-list, --d-list, and --f-list")
    params = {
        "mechanism": family,
        "mode": pick("mode", "D"),
        "per_list": [float(p) for p in per_list],
        "d_list": [int(d) for d in d_list],
        "f_list": [int(f) for f in f_list],
        "trials": pick("trials", _COMMON_DEFAULTS["trials"]),
        "seed": pick("seed", _COMMON_DEFAULTS["seed"]),
        "plot": False if args.no_plot else pick("plot", True),
    }
    _resolve_sim_knobs(pick, params)
    return params


_PARAM_BUILDERS = {
    "analyze": _params_analyze,
    "simulate": _params_simulate,
    "sweep": _params_sweep,
    "sensitivity": _params_sensitivity,
}


def _finish(command: str, input_path: str, params: dict, out_dir: str, outputs: list[str]) -> int:
    manifest = RunManifest(
        command=command,
        parameters=params,
        input_path=input_path,
        input_sha256=sha256_of(input_path),
        base_seed=int(params.get("seed", 0)),
        tool_version=TOOL_VERSION,
        outputs=tuple(outputs),
    )
    manifest_path = os.path.join(out_dir, f"{command}_manifest.json")
    manifest.write(manifest_path)
    print(f"outputs in {out_dir}: {', '.join(outputs)} (+ {os.path.basename(manifest_path)})")
    return 0


def _cmd_rerun(args: argparse.Namespace) -> int:
    manifest = RunManifest.read(args.manifest)
    if manifest.command not in _RUNNERS:
        raise ValueError(f"manifest names unknown command {manifest.command!r}")
    manifest.check_input()
    out_dir = args.out or os.path.dirname(os.path.abspath(args.manifest))
    os.makedirs(out_dir, exist_ok=True)
    outputs = _RUNNERS[manifest.command](
        manifest.input_path, manifest.parameters, out_dir, workers=args.workers
    )
    return _finish(manifest.command, manifest.input_path, manifest.parameters,
                   out_dir, outputs)


def _dispatch(args: argparse.Namespace) -> int:
    if args.command == "rerun":
        return _cmd_rerun(args)
    file_cfg = _load_config(args.config)
    _check_config_keys(args.command, file_cfg)
    params = _PARAM_BUILDERS[args.command](args, file_cfg)
    out_dir = args.out or "."
    os.makedirs(out_dir, exist_ok=True)
    input_path = os.path.abspath(args.circuit)
    workers = getattr(args, "workers", None)
    outputs = _RUNNERS[args.command](input_path, params, out_dir, workers=workers)
    return _finish(args.command, input_path, params, out_dir, outputs)


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 2
    try:
        return _dispatch(args)
    except QasmError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (FileNotFoundError, IsADirectoryError, PermissionError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except json.JSONDecodeError as exc:
        print(f"error: invalid JSON: {exc}", file=sys.stderr)
        return 2
    except SimulationError as exc:
        print(f"simulation error: {exc}", file=sys.stderr)
        return 1
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
