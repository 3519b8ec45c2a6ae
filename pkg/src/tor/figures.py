"""Figure data: one CSV per curve and a single SVG overlay per figure."""

from __future__ import annotations

import math
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from . import panels  # noqa: E402
from .solver import CanonicalProblem, solve  # noqa: E402
from .sweep import SweepSpec, run_sweep  # noqa: E402
from .trajectory import sample_trajectory  # noqa: E402

TITLES = {
    1: "Optimal trajectories, |v0| = 3",
    2: "Optimal trajectories, alpha = 0.75 pi",
    3: "Initial control direction phi(alpha)",
    4: "Final control direction psi(alpha)",
    5: "Optimal time t_f(alpha), alpha in [0, pi]",
    6: "Optimal time t_f(alpha), alpha in [0, pi/2]",
}


def _pi_label(a: float) -> str:
    return f"{a / math.pi:g}pi"


def _save_svg(fig, path: Path) -> None:
    with plt.rc_context({"svg.hashsalt": "tor", "svg.fonttype": "none"}):
        fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)


def _trajectory_figure(fig_id: int, cases, outdir: Path, samples: int) -> int:
    from .cli import write_trajectory_csv

    fig, ax = plt.subplots(figsize=(6, 5))
    for speed, alpha in cases:
        p = CanonicalProblem(speed, alpha)
        sol = solve(p)
        name = f"fig{fig_id}_speed_{speed:g}_alpha_{_pi_label(alpha)}.csv"
        write_trajectory_csv(outdir / name, sol, p, samples)
        xs = np.array([s.x for s in sample_trajectory(sol, p, samples).samples])
        ax.plot(xs[:, 0], xs[:, 1], label=f"|v0|={speed:g}, alpha={_pi_label(alpha)}")
    ax.set_xlabel("x")
    ax.set_ylabel("y")
    ax.set_aspect("equal", adjustable="datalim")
    ax.set_title(TITLES[fig_id])
    ax.legend(fontsize="small")
    _save_svg(fig, outdir / f"fig{fig_id}.svg")
    return 0


def _curve_figure(fig_id: int, speeds, alpha_max: float, column: str, outdir: Path,
                  alpha_grid: int) -> int:
    from .cli import write_sweep_csv

    spec = SweepSpec(tuple(speeds), alpha_grid, alpha_max=alpha_max)
    rows = run_sweep(spec)
    failed = 0
    fig, ax = plt.subplots(figsize=(6, 4.5))
    for speed in speeds:
        chain = [r for r in rows if r.speed == speed]
        failed += write_sweep_csv(outdir / f"fig{fig_id}_speed_{speed:g}.csv", chain)
        ok = [r for r in chain if r.ok]
        ax.plot([r.alpha for r in ok], [r.values()[column] for r in ok], label=f"|v0|={speed:g}")
    ax.set_xlabel("alpha")
    ax.set_ylabel(column)
    ax.set_title(TITLES[fig_id])
    ax.legend(fontsize="small")
    _save_svg(fig, outdir / f"fig{fig_id}.svg")
    return failed


def make_figure(fig_id: int, outdir: Path, samples: int = 256, alpha_grid: int = 65) -> int:
    """Write the CSV files and SVG of one figure; returns the number of failed rows."""
    outdir = Path(outdir)
    if fig_id == 1:
        return _trajectory_figure(1, [(panels.FIG1_SPEED, a) for a in panels.FIG1_ALPHAS],
                                  outdir, samples)
    if fig_id == 2:
        return _trajectory_figure(2, [(s, panels.FIG2_ALPHA) for s in panels.FIG2_SPEEDS],
                                  outdir, samples)
    if fig_id == 3:
        return _curve_figure(3, panels.FIG3_SPEEDS, math.pi, "phi", outdir, alpha_grid)
    if fig_id == 4:
        return _curve_figure(4, panels.FIG4_SPEEDS, math.pi, "psi", outdir, alpha_grid)
    if fig_id == 5:
        return _curve_figure(5, panels.FIG5_SPEEDS, math.pi, "t_f", outdir, alpha_grid)
    if fig_id == 6:
        return _curve_figure(6, panels.FIG6_SPEEDS, math.pi / 2, "t_f", outdir, alpha_grid)
    raise ValueError(f"unknown figure {fig_id}")
