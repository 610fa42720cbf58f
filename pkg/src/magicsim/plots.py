"""Figure rendering for the CLI report paths. Matplotlib loads lazily so the
library import stays cheap and headless environments never touch a display."""

from __future__ import annotations

from .circuit import StaticProfile
from .sweep import SensitivityCell, SweepResult


def _pyplot():
    import matplotlib

    matplotlib.use("Agg")
    from matplotlib import pyplot

    return pyplot


def plot_profile(profile: StaticProfile, path) -> None:
    plt = _pyplot()
    fig, ax = plt.subplots(figsize=(8, 3.5))
    demand = profile.per_layer_demand
    if demand:
        ax.bar(range(1, len(demand) + 1), demand, width=1.0, color="#4878d0")
        ax.axhline(profile.gamma_avg, color="#d65f5f", linestyle="--",
                   label=f"average {profile.gamma_avg:.3g}")
        ax.legend(loc="upper right")
    ax.set_xlabel("layer")
    ax.set_ylabel("non-Clifford gates")
    ax.set_title("Static demand profile")
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)


def plot_trace(demand, stalls, path) -> None:
    plt = _pyplot()
    fig, (top, bottom) = plt.subplots(2, 1, figsize=(8, 5), sharex=True)
    cycles = range(1, len(demand) + 1)
    top.plot(cycles, demand, color="#4878d0", linewidth=0.9)
    top.set_ylabel("states granted")
    top.set_title("Consumption and stalls per cycle")
    bottom.plot(cycles, stalls, color="#d65f5f", linewidth=0.9)
    bottom.set_ylabel("stalled injections")
    bottom.set_xlabel("cycle")
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)


def plot_sweep(result: SweepResult, path) -> None:
    plt = _pyplot()
    fig, (left, right) = plt.subplots(1, 2, figsize=(11, 4))

    fs = [row.F for row in result.rows]
    mode = result.rows[0].mode if result.rows else "?"
    left.plot(fs, [row.mean_C for row in result.rows], marker="o", markersize=3,
              color="#4878d0", label=f"mode {mode}")
    if result.det_rows and mode != "A":
        left.plot([r.F for r in result.det_rows], [r.mean_C for r in result.det_rows],
                  marker="s", markersize=3, color="#6acc64", label="mode A")
    left.axvline(result.F_plateau, color="#4878d0", linestyle=":",
                 label=f"plateau {result.F_plateau}")
    left.axvline(result.F_det, color="#6acc64", linestyle="--",
                 label=f"deterministic plateau {result.F_det}")
    left.set_xlabel("production units F")
    left.set_ylabel("mean cycles")
    left.legend(fontsize=8)

    right.plot(fs, [row.mean_V for row in result.rows], marker="o", markersize=3,
               color="#4878d0")
    right.axvline(result.F_star, color="#d65f5f", linestyle="--",
                  label=f"F* = {result.F_star}")
    right.set_xlabel("production units F")
    right.set_ylabel("mean space-time volume")
    right.legend(fontsize=8)

    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)


def plot_sensitivity(cells: list[SensitivityCell], path) -> None:
    plt = _pyplot()
    fig, ax = plt.subplots(figsize=(7, 4.5))
    groups: dict[tuple[int, int], list[SensitivityCell]] = {}
    for cell in cells:
        groups.setdefault((cell.d, cell.F), []).append(cell)
    for (d, f_units), members in sorted(groups.items()):
        members = sorted(members, key=lambda c: c.p)
        ax.errorbar(
            [c.p for c in members],
            [c.mean_V for c in members],
            yerr=[c.std_V for c in members],
            marker="o", markersize=3, capsize=2, label=f"d={d}, F={f_units}",
        )
    ax.set_xscale("log")
    ax.set_xlabel("physical error rate p")
    ax.set_ylabel("mean space-time volume")
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)
