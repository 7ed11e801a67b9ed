"""Command-line surface.

Subcommands: check-assumptions, stationary, simulate, stability,
convergence, lemma31.  Exit status is 0 on success, 1 when a requested
check fails or a run aborts, 2 for usage errors.  Verbosity is controlled
by the SPHEROID_LOG environment variable (debug/info/warning/error).
"""

import argparse
import logging
import os
import sys
from dataclasses import replace

from .analysis import (CONVERGENCE_THRESHOLDS, admissible_init,
                       stability_experiment, standard_convergence_suite)
from .config import (config_hash, default_config, load_config, save_config)
from .errors import SpheroidError
from .evolution import State, simulate
from .grid import Grid
from .nutrient import bounds_report
from .output import (write_convergence_csv, write_profile_csv,
                     write_stability_csv, write_timeseries_csv)
from .rates import check_assumptions
from .snapshot import load_snapshot, save_snapshot
from .stationary import solve_stationary

log = logging.getLogger("spheroid")


def _setup_logging():
    level = os.environ.get("SPHEROID_LOG", "warning").upper()
    logging.basicConfig(level=getattr(logging, level, logging.WARNING),
                        format="%(levelname)s %(name)s: %(message)s")


def _common_flags(parser):
    parser.add_argument("--config", help="configuration file path")
    parser.add_argument("--out", help="output directory (overrides paths.out_dir)")
    parser.add_argument("--seed", type=int, help="seed override (u64)")
    parser.add_argument("--grid-n", type=int, dest="grid_n",
                        help="grid node count override")
    parser.add_argument("--eps", type=float, help="diffusion ratio override")
    parser.add_argument("--delta", type=float, help="perturbation amplitude override")
    parser.add_argument("--tend", type=float, help="horizon override")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="spheroid",
        description="Radially symmetric two-species tumor free-boundary "
                    "simulator and stability toolkit")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check-assumptions",
                       help="verify the rate-model conditions (A1)-(A5)")
    _common_flags(p)
    p.add_argument("--samples", type=int, default=201)

    p = sub.add_parser("lemma31",
                       help="check the analytic envelope bounds on the "
                            "nutrient profile and its sensitivities")
    _common_flags(p)
    p.add_argument("--z-values", default="-1,0,1",
                   help="comma-separated log-radius values")

    p = sub.add_parser("stationary", help="compute the stationary solution")
    _common_flags(p)
    p.add_argument("--tol", type=float, default=1e-6)
    p.add_argument("--no-cross-check", action="store_true")

    p = sub.add_parser("simulate", help="integrate one trajectory")
    _common_flags(p)
    p.add_argument("--resume", help="snapshot to continue from")
    p.add_argument("--shape", default="poly",
                   help="perturbation shape (poly, cosine, random)")

    p = sub.add_parser("stability", help="run the perturbation-decay matrix")
    _common_flags(p)

    p = sub.add_parser("convergence", help="run the refinement-order studies")
    _common_flags(p)
    return parser


def _load(args):
    cfg = load_config(args.config) if args.config else default_config()
    if args.grid_n is not None:
        cfg.grid_n = args.grid_n
    if getattr(args, "eps", None) is not None:
        cfg.solver = replace(cfg.solver, eps=args.eps)
    if getattr(args, "tend", None) is not None:
        cfg.solver = replace(cfg.solver, t_end=args.tend)
    if args.out is not None:
        cfg.out_dir = args.out
    return cfg


def _outdir(cfg):
    os.makedirs(cfg.out_dir, exist_ok=True)
    return cfg.out_dir


def cmd_check_assumptions(args):
    cfg = _load(args)
    report = check_assumptions(cfg.model(), samples=args.samples)
    for line in report.lines():
        print(line)
    return 0 if report.all_passed else 1


def cmd_lemma31(args):
    cfg = _load(args)
    z_values = [float(x) for x in args.z_values.split(",") if x.strip()]
    report = bounds_report(cfg.model(), z_values, Grid(cfg.grid_n))
    for line in report.lines():
        print(line)
    print("all bounds hold" if report.all_passed else "BOUND VIOLATION")
    return 0 if report.all_passed else 1


def cmd_stationary(args):
    cfg = _load(args)
    out = _outdir(cfg)
    solution = solve_stationary(cfg.model(), Grid(cfg.grid_n), tol=args.tol,
                                config=cfg.solver,
                                cross_check=not args.no_cross_check)
    print(f"z* = {solution.z!r}  (R* = {solution.radius!r})")
    print(f"|v(1)| = {solution.v1_residual:.3e}")
    print(f"max interior |-v p' + f| = {solution.transport_residual:.3e}")
    print(f"||c - m(.;z*)|| = {solution.nutrient_gap:.3e}")
    if solution.z_direct is not None:
        print(f"z* (direct construction) = {solution.z_direct!r}  "
              f"gap = {abs(solution.z_direct - solution.z):.3e}")
    save_snapshot(State(t=0.0, z=solution.z, c=solution.c, p=solution.p),
                  os.path.join(out, "stationary.snap"),
                  config_hash=config_hash(cfg))
    write_profile_csv(os.path.join(out, "stationary.csv"), solution)
    save_config(cfg, os.path.join(out, "stationary.config"))
    ok = (solution.v1_residual <= args.tol
          and solution.transport_residual <= 100.0 * args.tol)
    return 0 if ok else 1


def cmd_simulate(args):
    cfg = _load(args)
    out = _outdir(cfg)
    model = cfg.model()
    grid = Grid(cfg.grid_n)
    chash = config_hash(cfg)
    stationary = solve_stationary(model, grid, config=cfg.solver,
                                  cross_check=False)

    resume_path = args.resume or (cfg.resume or None)
    if resume_path:
        init, header = load_snapshot(resume_path, expect_n=grid.n)
        if header["config_hash"] and header["config_hash"] != chash:
            log.warning("resume snapshot was produced under a different "
                        "configuration (hash %s vs %s)",
                        header["config_hash"], chash)
        start_step = header["step"]
        start_out = header["output_index"]
        record_initial = False
        prev_output = init.copy()
        csv_name = "timeseries_resumed.csv"
    else:
        delta = args.delta if args.delta is not None else 0.01
        seed = args.seed if args.seed is not None else 0
        init = admissible_init(stationary, delta, args.shape, seed)
        start_step = 0
        start_out = 0
        record_initial = True
        prev_output = None
        csv_name = "timeseries.csv"

    # a resumed run's first record is the output after the snapshot's
    out_offset = start_out if record_initial else start_out + 1

    def on_output(state, step_index, output_index, record):
        absolute = out_offset + output_index
        if absolute % cfg.snapshot_every == 0:
            save_snapshot(state, os.path.join(out, f"snap_{absolute:06d}.snap"),
                          step=start_step + step_index, output_index=absolute,
                          config_hash=chash)

    try:
        result = simulate(model, init, grid, cfg.solver, stationary,
                          on_output=on_output, record_initial=record_initial,
                          prev_output=prev_output)
    except SpheroidError as exc:
        last = getattr(exc, "last_state", None)
        if last is not None:
            save_snapshot(last, os.path.join(out, "emergency.snap"),
                          config_hash=chash)
            print(f"run aborted: {exc}; last good state saved to emergency.snap",
                  file=sys.stderr)
        else:
            print(f"run aborted: {exc}", file=sys.stderr)
        return 1
    write_timeseries_csv(os.path.join(out, csv_name), result)
    print(f"wrote {csv_name}: {len(result.records)} records, "
          f"final t = {result.final_state.t!r}, R = {result.final_state.radius!r}")
    if result.clip.events:
        print(f"warning: {result.clip.events} clip events beyond tolerance "
              f"(max excess {result.clip.max_excess:.3e})", file=sys.stderr)
    return 0


def cmd_stability(args):
    cfg = _load(args)
    out = _outdir(cfg)
    model = cfg.model()
    grid = Grid(cfg.grid_n)
    exp = cfg.experiment
    eps_list = (args.eps,) if args.eps is not None else exp.eps_list
    delta_list = (args.delta,) if args.delta is not None else exp.delta_list
    seeds = (args.seed,) if args.seed is not None else exp.seeds
    solver = cfg.solver if args.tend is None else replace(cfg.solver, t_end=args.tend)
    report = stability_experiment(model, grid, solver, eps_list, delta_list,
                                  exp.shapes, seeds,
                                  fit_window=exp.fit_window,
                                  fit_floor=exp.fit_floor,
                                  workers=exp.workers)
    path = os.path.join(out, "stability.csv")
    write_stability_csv(path, report)
    n_ok = sum(c.status == "ok" for c in report.cells)
    print(f"wrote stability.csv: {len(report.cells)} cells, {n_ok} ran, "
          f"{sum(c.converged for c in report.cells)} converged")
    print(f"largest eps with observed return to the stationary state: "
          f"{report.largest_decaying_eps}")
    return 0 if report.all_ran else 1


def cmd_convergence(args):
    cfg = _load(args)
    out = _outdir(cfg)
    studies = standard_convergence_suite(cfg.model())
    write_convergence_csv(os.path.join(out, "convergence.csv"), studies)
    ok = True
    for study in studies:
        threshold = CONVERGENCE_THRESHOLDS[study.kind]
        status = "ok" if (study.conclusive and study.observed_order >= threshold) \
            else "BELOW THRESHOLD" if study.conclusive else "inconclusive"
        if status != "ok":
            ok = False
        orders = ", ".join(f"{o:.2f}" for o in study.orders)
        print(f"{study.kind}: orders [{orders}] (threshold {threshold}) {status}")
    return 0 if ok else 1


_HANDLERS = {
    "check-assumptions": cmd_check_assumptions,
    "lemma31": cmd_lemma31,
    "stationary": cmd_stationary,
    "simulate": cmd_simulate,
    "stability": cmd_stability,
    "convergence": cmd_convergence,
}


def cli(argv=None):
    """Run the CLI on ``argv`` (defaults to sys.argv[1:]); returns exit status."""
    _setup_logging()
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return _HANDLERS[args.command](args)
    except SpheroidError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def main():
    sys.exit(cli(sys.argv[1:]))


if __name__ == "__main__":
    main()
