"""Command-line front end.

Subcommands::

    tor solve   --speed 3 --alpha 0.25pi [--traj out.csv --samples 512]
    tor sweep   --speeds 0,0.5,1 --alpha-grid 64 --out sweep.csv
    tor figures --fig 5 --outdir figs
    tor verify  [--quick | --oracle] [--solution solution.json]
    tor oracle  --speed 3 --alpha 0.25pi [--kind grid|direct]

Exit codes: 0 success, 1 invalid arguments, 2 no convergence, 3 sweep rows
failed, 4 verification failure.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import math
import re
import sys
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from .onedim import OneDimSolution
from .oracle import OracleNonConvergence, bang_oracle_1d, direct_oracle, grid_oracle
from .solver import (AdjointSolution, CanonicalProblem, NoConvergence, Solution, SolverConfig,
                     closed_form_state, residuals, solve)
from .sweep import COLUMNS, SweepSpec, run_sweep
from .trajectory import control_angles, sample_trajectory

log = logging.getLogger("tor")

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_NO_CONVERGENCE = 2
EXIT_SWEEP_FAILED = 3
EXIT_VERIFY_FAILED = 4

TRAJECTORY_COLUMNS = ("t", "x", "y", "vx", "vy", "ux", "uy", "speed")
SCHEMA_VERSION = 1


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


# ---------------------------------------------------------------- parsing

_ANGLE = re.compile(r"^\s*([-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?)?\s*(\*?\s*pi)?\s*$")


def parse_angle(text: str) -> float:
    """Radians, or a multiple of pi written with a ``pi`` suffix (``0.25pi``, ``pi``)."""
    m = _ANGLE.match(text)
    if not m or (m.group(1) is None and m.group(2) is None):
        raise argparse.ArgumentTypeError(f"invalid angle {text!r}")
    value = float(m.group(1)) if m.group(1) is not None else 1.0
    return value * math.pi if m.group(2) else value


def parse_speed(text: str) -> float:
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid speed {text!r}") from None
    if not (v >= 0.0 and math.isfinite(v)):
        raise argparse.ArgumentTypeError(f"speed must be finite and >= 0, got {text!r}")
    return v


def parse_speed_list(text: str) -> tuple[float, ...]:
    items = [t for t in text.split(",") if t.strip()]
    if not items:
        raise argparse.ArgumentTypeError("empty speed list")
    return tuple(parse_speed(t) for t in items)


def fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, (int, np.integer)) and not isinstance(x, bool):
        return str(int(x))
    return format(float(x), ".17g")


# --------------------------------------------------------------- solution io

def solution_to_dict(problem: CanonicalProblem, sol: Solution) -> dict:
    phi, psi = control_angles(sol)
    out = {
        "schema": SCHEMA_VERSION,
        "problem": {"speed": problem.speed, "alpha": problem.alpha, "reflected": problem.reflected},
        "t_f": sol.t_f,
        "phi": phi,
        "psi": psi,
    }
    if isinstance(sol, AdjointSolution):
        r1, r2 = residuals(sol.mu, sol.sigma, problem)
        out.update(
            branch="planar",
            mu=sol.mu, sigma=sol.sigma,
            zeta=sol.zeta.tolist(), eta=sol.eta.tolist(),
            xi=sol.xi.tolist(), rho=sol.rho,
            residuals={"r1": r1, "r2": r2, "norm": sol.residual_norm},
            iterations=sol.newton_iters,
            terminal={"position_error": sol.terminal_position_error,
                      "velocity_error": sol.terminal_velocity_error},
        )
    else:
        out.update(
            branch="one_dim",
            mu=sol.lam if sol.t_f > 0 else 0.0, sigma=1.0,
            residuals={"r1": 0.0, "r2": 0.0, "norm": 0.0},
            iterations=0,
            one_dim={"lambda": sol.lam, "eta_sign": sol.eta_sign,
                     "switch_fraction": sol.switch_fraction,
                     "degenerate": sol.degenerate, "v0": sol.v0},
        )
    return out


def solution_from_dict(data: dict) -> tuple[CanonicalProblem, Solution]:
    pr = data["problem"]
    problem = CanonicalProblem(pr["speed"], pr["alpha"], pr.get("reflected", False))
    if data["branch"] == "planar":
        sol = AdjointSolution(
            mu=data["mu"], sigma=data["sigma"], t_f=data["t_f"],
            zeta=np.array(data["zeta"], dtype=float), eta=np.array(data["eta"], dtype=float),
            residual_norm=data["residuals"]["norm"], newton_iters=data["iterations"],
            terminal_position_error=data["terminal"]["position_error"],
            terminal_velocity_error=data["terminal"]["velocity_error"],
        )
    else:
        od = data["one_dim"]
        sol = OneDimSolution(lam=od["lambda"], eta_sign=od["eta_sign"], t_f=data["t_f"],
                             switch_fraction=od["switch_fraction"],
                             degenerate=od["degenerate"], v0=od["v0"])
    return problem, sol


def reverify(problem: CanonicalProblem, sol: Solution) -> dict:
    """Recompute residuals and terminal errors of a stored solution."""
    if isinstance(sol, AdjointSolution):
        r1, r2 = residuals(sol.mu, sol.sigma, problem)
        x, v = closed_form_state(problem, sol.zeta, sol.eta, sol.mu, sol.sigma, sol.t_f, sol.t_f)
    else:
        r1 = r2 = 0.0
        rep = sample_trajectory(sol, problem, 2)
        x, v = rep.samples[-1].x, rep.samples[-1].v
    return {"r1": r1, "r2": r2,
            "position_error": float(np.hypot(*x)),
            "velocity_error": float(np.hypot(*(v - problem.v_f)))}


def write_trajectory_csv(path: Path, sol: Solution, problem: CanonicalProblem, samples: int) -> None:
    rep = sample_trajectory(sol, problem, samples)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(TRAJECTORY_COLUMNS)
        for s in rep.samples:
            w.writerow([fmt(s.t), fmt(s.x[0]), fmt(s.x[1]), fmt(s.v[0]), fmt(s.v[1]),
                        fmt(s.u[0]), fmt(s.u[1]), fmt(s.speed)])


def write_sweep_csv(path: Path, rows, columns: Sequence[str] = COLUMNS) -> int:
    failed = 0
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(list(columns) + ["status"])
        for row in rows:
            vals = row.values()
            failed += not row.ok
            w.writerow([fmt(vals[c]) for c in columns] + ["ok" if row.ok else "failed"])
    return failed


# ---------------------------------------------------------------- commands

def _config(args) -> SolverConfig:
    cfg = SolverConfig()
    if getattr(args, "newton_tol", None) is not None:
        cfg.newton_tol = args.newton_tol
    if getattr(args, "max_iters", None) is not None:
        cfg.max_iters = args.max_iters
    if getattr(args, "mu_max", None) is not None:
        cfg.mu_max = args.mu_max
    return cfg


def cmd_solve(args) -> int:
    problem = CanonicalProblem.from_angle(args.speed, args.alpha)
    try:
        sol = solve(problem, _config(args))
    except NoConvergence as exc:
        log.error("%s (best residual %.3g)", exc, exc.best_residual)
        return EXIT_NO_CONVERGENCE
    data = solution_to_dict(problem, sol)
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(json.dumps(data, indent=2) + "\n")
    if args.traj:
        write_trajectory_csv(Path(args.traj), sol, problem, args.samples)
    print(f"t_f = {fmt(sol.t_f)}  branch = {data['branch']}  -> {out}")
    return EXIT_OK


def cmd_sweep(args) -> int:
    spec = SweepSpec(args.speeds, args.alpha_grid, alpha_max=args.alpha_max)
    columns = tuple(args.columns.split(",")) if args.columns else COLUMNS
    unknown = [c for c in columns if c not in COLUMNS]
    if unknown:
        raise UsageError(f"unknown columns {unknown}")
    rows = run_sweep(spec, _config(args))
    failed = write_sweep_csv(Path(args.out), rows, columns)
    print(f"{len(rows)} rows, {failed} failed -> {args.out}")
    return EXIT_SWEEP_FAILED if failed else EXIT_OK


def cmd_figures(args) -> int:
    from . import figures

    outdir = Path(args.outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    failed = figures.make_figure(args.fig, outdir, samples=args.samples, alpha_grid=args.alpha_grid)
    print(f"figure {args.fig} -> {outdir}")
    return EXIT_SWEEP_FAILED if failed else EXIT_OK


def cmd_verify(args) -> int:
    if args.solution:
        problem, sol = solution_from_dict(json.loads(Path(args.solution).read_text()))
        got = reverify(problem, sol)
        stored = json.loads(Path(args.solution).read_text())["residuals"]
        dr = max(abs(got["r1"] - stored["r1"]), abs(got["r2"] - stored["r2"]))
        ok = (dr <= 1e-12 and got["position_error"] <= 1e-8 and got["velocity_error"] <= 1e-8)
        print(f"[{'PASS' if ok else 'FAIL'}] stored solution: residual drift {dr:.1e}, "
              f"terminal errors {got['position_error']:.1e} / {got['velocity_error']:.1e}")
        return EXIT_OK if ok else EXIT_VERIFY_FAILED

    from .verify import run_all

    checks = run_all(oracle=args.oracle, quick=args.quick,
                     report=lambda c: print(c.line(), flush=True))
    failed = [c for c in checks if not c.passed]
    print(f"{len(checks) - len(failed)}/{len(checks)} passed")
    return EXIT_VERIFY_FAILED if failed else EXIT_OK


def cmd_oracle(args) -> int:
    out: dict = {"speed": args.speed, "alpha": args.alpha, "kind": args.kind}
    try:
        if args.kind == "grid":
            g = grid_oracle(args.speed, args.alpha)
            out.update(mu=g.mu, sigma=g.sigma, t_f=g.t_f, residual_norm=g.residual_norm,
                       resolution=g.resolution)
        elif args.kind == "direct":
            out["t_f"] = direct_oracle(args.speed, args.alpha, segments=args.segments, tol=args.tol)
            out["segments"] = args.segments
        else:
            if math.sin(args.alpha) > 1e-12:
                raise UsageError("the bang-bang oracle needs alpha = 0 or pi")
            v0 = args.speed if math.cos(args.alpha) > 0 else -args.speed
            out["t_f"], out["t_switch"] = bang_oracle_1d(v0)
    except OracleNonConvergence as exc:
        log.error("%s", exc)
        return EXIT_NO_CONVERGENCE
    print(json.dumps(out, indent=2))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="tor", description="Time-optimal return of a force-bounded point mass.")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def solver_flags(sp):
        sp.add_argument("--newton-tol", type=float)
        sp.add_argument("--max-iters", type=int)
        sp.add_argument("--mu-max", type=float)

    sp = sub.add_parser("solve", help="solve one problem")
    sp.add_argument("--speed", type=parse_speed, required=True)
    sp.add_argument("--alpha", type=parse_angle, required=True)
    sp.add_argument("--out", default="solution.json")
    sp.add_argument("--traj", help="also write the sampled trajectory to this CSV")
    sp.add_argument("--samples", type=int, default=256)
    solver_flags(sp)
    sp.set_defaults(func=cmd_solve)

    sp = sub.add_parser("sweep", help="sweep speeds and an alpha grid")
    sp.add_argument("--speeds", type=parse_speed_list, required=True)
    sp.add_argument("--alpha-grid", type=int, default=64)
    sp.add_argument("--alpha-max", type=parse_angle, default=math.pi)
    sp.add_argument("--columns", help="comma-separated subset of " + ",".join(COLUMNS))
    sp.add_argument("--out", default="sweep.csv")
    solver_flags(sp)
    sp.set_defaults(func=cmd_sweep)

    sp = sub.add_parser("figures", help="write figure data (CSV) and an SVG overlay")
    sp.add_argument("--fig", type=int, choices=range(1, 7), required=True)
    sp.add_argument("--outdir", default="figures")
    sp.add_argument("--samples", type=int, default=256)
    sp.add_argument("--alpha-grid", type=int, default=65)
    sp.set_defaults(func=cmd_figures)

    sp = sub.add_parser("verify", help="run the acceptance panels")
    mode = sp.add_mutually_exclusive_group()
    mode.add_argument("--quick", action="store_true", help="skip the oracles and long panels")
    mode.add_argument("--oracle", action="store_true", help="include oracle comparisons")
    sp.add_argument("--solution", help="re-verify a stored solution.json instead")
    sp.set_defaults(func=cmd_verify)

    sp = sub.add_parser("oracle", help="run an independent oracle on one problem")
    sp.add_argument("--speed", type=parse_speed, required=True)
    sp.add_argument("--alpha", type=parse_angle, required=True)
    sp.add_argument("--kind", choices=("grid", "direct", "bang"), default="grid")
    sp.add_argument("--segments", type=int, default=64)
    sp.add_argument("--tol", type=float, default=1e-4)
    sp.set_defaults(func=cmd_oracle)
    return p


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # --help and argument errors; returned so main() composes as a function
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (UsageError, ValueError) as exc:
        print(f"tor: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
