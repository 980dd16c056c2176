"""Command-line interface: gen, solve, sweep, validate, schedule."""

from __future__ import annotations

import argparse
import os
import sys

from . import io
from .config import ConfigFile, NetworkConfig, load_config
from .de import Hyperparams
from .harness import (ALGORITHMS, SCENARIOS, ExperimentSpec, SlotPolicy,
                      make_grouping, multi_slot_schedule, run_algorithm,
                      run_experiment, validate_closed_forms, write_schedule,
                      write_validation)
from .netgen import draw_network


def _load(args) -> ConfigFile:
    if args.config:
        return load_config(args.config)
    return ConfigFile(network=NetworkConfig())


def _hyper_from(cfgfile: ConfigFile, args) -> Hyperparams:
    items = dict(cfgfile.section("optimizer"))
    kwargs = {}
    for key, cast in (("pop_size", int), ("scale_factor", float),
                      ("crossover_rate", float), ("pbest_fraction", float),
                      ("g_max", int), ("stall_window", int), ("strategy", str)):
        if key in items:
            kwargs[key] = cast(items[key])
    if getattr(args, "g_max", None):
        kwargs["g_max"] = args.g_max
    return Hyperparams(**kwargs)


def _parse_values(raw: str, cast):
    return tuple(cast(v) for v in raw.split(",") if v != "")


def cmd_gen(args):
    cfgfile = _load(args)
    topo, real = draw_network(cfgfile.network, args.seed)
    os.makedirs(args.out, exist_ok=True)
    io.dump_topology(topo, args.out)
    io.dump_realization(real, args.out)
    print(f"wrote topology and realization CSVs to {args.out}")
    return 0


def cmd_solve(args):
    cfgfile = _load(args)
    config = cfgfile.network
    hyper = _hyper_from(cfgfile, args)
    algo = (args.algo or "chde").split(",")[0]
    topo, real = draw_network(config, args.seed)
    grp = make_grouping(config, real)
    opt = run_algorithm(algo, config, real, grp, hyper, args.seed)
    os.makedirs(args.out, exist_ok=True)
    io.write_history(opt.history, hyper.pop_size, opt.wall_time,
                     os.path.join(args.out, f"history_{algo}_{args.seed}.csv"))
    io.write_solution(opt.best.result.solution,
                      os.path.join(args.out, f"best_{algo}_{args.seed}.csv"))
    io.write_se_report(opt.best.result.report,
                       os.path.join(args.out, f"se_{algo}_{args.seed}.csv"))
    print(f"{algo}: total SE {opt.best.fitness:.4f} bits/s/Hz "
          f"({opt.generations} generations, {opt.evaluations} evaluations)")
    return 0


_AXIS_CASTS = {"m_aps": int, "k_each": int, "qos": float,
               "duplex_policy": str, "linr_db": float, "none": str}

_SCENARIO_DEFAULTS = {
    # scenario: (axis, values, algorithms, mn_total)
    "SUM_SE_COMPARE": ("m_aps", (10, 30, 60, 80, 120),
                       ("chde", "chga", "chpso", "random"), 240),
    "CONVERGENCE": ("none", (0,), ("chde", "chga", "chpso"), None),
    "RUNTIME": ("m_aps", (10, 30, 60), ("chde",), 240),
    "OPERATOR_ABLATION": ("none", (0,),
                          ("chde", "de_rand_1", "de_rand_2", "de_best_1",
                           "de_best_2"), None),
    "HD_VS_NAFD": ("duplex_policy", ("NAFD", "HD_ONLY"), ("chde",), None),
    "AP_SWEEP": ("m_aps", (10, 30, 60, 80, 120), ("chde",), 240),
    "SE_PER_UE": ("none", (0,), ("chde",), None),
    "QOS_SWEEP": ("qos", (0.0, 0.5, 1.0, 1.5, 2.0, 2.5, 3.0), ("chde",), None),
    "UE_SWEEP": ("k_each", (3, 5, 10), ("chde",), None),
}


def build_spec(cfgfile: ConfigFile, scenario: str, seed: int,
               algorithms=None, hyper=None, n_realizations=None,
               axis=None, values=None) -> ExperimentSpec:
    exp = cfgfile.section("experiment")
    d_axis, d_values, d_algos, mn_total = _SCENARIO_DEFAULTS[scenario]
    axis = axis or exp.get("axis", d_axis)
    if values is None:
        raw = exp.get("values")
        values = (_parse_values(raw, _AXIS_CASTS[axis]) if raw else d_values)
    if n_realizations is None:
        n_realizations = int(exp.get("n_realizations", 1))
    if "mn_total" in exp:
        mn_total = int(exp["mn_total"]) or None
    return ExperimentSpec(
        scenario=scenario, config=cfgfile.network, axis=axis,
        values=tuple(values), n_realizations=n_realizations, seed=seed,
        algorithms=tuple(algorithms or d_algos),
        hyper=hyper or Hyperparams(), mn_total=mn_total,
        processing=exp.get("processing", "PZF").upper())


def cmd_sweep(args):
    cfgfile = _load(args)
    if args.scenario == "MULTI_SLOT":
        return cmd_schedule(args)
    algorithms = _parse_values(args.algo, str) if args.algo else None
    spec = build_spec(cfgfile, args.scenario, args.seed,
                      algorithms=algorithms, hyper=_hyper_from(cfgfile, args),
                      n_realizations=args.n_realizations)
    run_experiment(spec, args.out)
    print(f"{args.scenario}: outputs in {args.out}")
    return 0


def cmd_validate(args):
    cfgfile = _load(args)
    ok, rows = validate_closed_forms(cfgfile.network, args.draws, args.seed,
                                     tolerance=args.tolerance,
                                     n_solutions=args.solutions)
    os.makedirs(args.out, exist_ok=True)
    write_validation(rows, os.path.join(args.out, "validation.csv"))
    worst = max((r[4] for r in rows), default=0.0)
    print(f"validation {'passed' if ok else 'FAILED'}: "
          f"worst relative error {worst:.4f} over {len(rows)} entries")
    return 0 if ok else 1


def cmd_schedule(args):
    cfgfile = _load(args)
    items = cfgfile.section("slots")
    policy = SlotPolicy(
        initial_qos=float(items.get("initial_qos", getattr(args, "qos", 0.5) or 0.5)),
        relax_after=int(items.get("relax_after", 3)),
        relaxed_levels=(_parse_values(items["relaxed_levels"], float)
                        if "relaxed_levels" in items else None))
    rows, slots = multi_slot_schedule(cfgfile.network, policy,
                                      args.slots, args.seed,
                                      hyper=_hyper_from(cfgfile, args))
    os.makedirs(args.out, exist_ok=True)
    write_schedule(rows, os.path.join(args.out, "schedule.csv"))
    served_all = all(r[4] for r in rows if r[0] == slots)
    print(f"schedule: {slots} slots used, "
          f"{'all UEs served' if served_all else 'some UEs unserved'}")
    return 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="nafdplan",
        description="Network-assisted full-duplex cell-free MIMO planner")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", help="sectioned key = value config file")
        p.add_argument("--seed", type=int, default=1)
        p.add_argument("--out", default="out")

    p = sub.add_parser("gen", help="draw a network and dump its statistics")
    common(p)

    p = sub.add_parser("solve", help="optimize one realization")
    common(p)
    p.add_argument("--algo", default="chde",
                   help=f"one of {', '.join(ALGORITHMS)}")
    p.add_argument("--g-max", dest="g_max", type=int)

    p = sub.add_parser("sweep", help="run an experiment scenario")
    common(p)
    p.add_argument("--scenario", required=True, choices=SCENARIOS)
    p.add_argument("--algo", help="comma-separated algorithm list")
    p.add_argument("--n-realizations", dest="n_realizations", type=int)
    p.add_argument("--g-max", dest="g_max", type=int)
    p.add_argument("--slots", type=int, default=30)

    p = sub.add_parser("validate", help="closed form vs Monte Carlo")
    common(p)
    p.add_argument("--draws", type=int, default=20000)
    p.add_argument("--tolerance", type=float, default=0.03)
    p.add_argument("--solutions", type=int, default=20)

    p = sub.add_parser("schedule", help="multi-slot scheduling with relaxation")
    common(p)
    p.add_argument("--slots", type=int, default=30)
    p.add_argument("--qos", type=float)
    p.add_argument("--g-max", dest="g_max", type=int)

    args = parser.parse_args(argv)
    handler = {"gen": cmd_gen, "solve": cmd_solve, "sweep": cmd_sweep,
               "validate": cmd_validate, "schedule": cmd_schedule}[args.command]
    return handler(args)


if __name__ == "__main__":
    sys.exit(main())
