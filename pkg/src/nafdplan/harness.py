"""Experiment engine: sweeps, scheduling, and closed-form validation."""

from __future__ import annotations

import os
from dataclasses import dataclass, field, replace

import numpy as np

from . import io
from .baselines import KIND_GA, KIND_PSO, random_nafd, run_baseline
from .config import NetworkConfig
from .de import (STRATEGY_BEST_1, STRATEGY_BEST_2, STRATEGY_CURRENT_TO_PBEST_1,
                 STRATEGY_RAND_1, STRATEGY_RAND_2, Hyperparams, OptResult,
                 evolve)
from .genotype import decode
from .grouping import (MODE_FZF, MODE_MR, MODE_PZF, Grouping, pzf_grouping,
                       uniform_grouping)
from .montecarlo import empirical_se_many
from .netgen import draw_network

SCENARIOS = ("SUM_SE_COMPARE", "CONVERGENCE", "RUNTIME", "OPERATOR_ABLATION",
             "HD_VS_NAFD", "AP_SWEEP", "SE_PER_UE", "QOS_SWEEP", "MULTI_SLOT",
             "UE_SWEEP")

_DE_STRATEGY_ALGOS = {
    "chde": STRATEGY_CURRENT_TO_PBEST_1,
    "de_rand_1": STRATEGY_RAND_1,
    "de_rand_2": STRATEGY_RAND_2,
    "de_best_1": STRATEGY_BEST_1,
    "de_best_2": STRATEGY_BEST_2,
}

ALGORITHMS = tuple(_DE_STRATEGY_ALGOS) + ("chga", "chpso", "random")


@dataclass
class ExperimentSpec:
    scenario: str
    config: NetworkConfig
    axis: str = "none"
    values: tuple = (0,)
    n_realizations: int = 1
    seed: int = 1
    algorithms: tuple = ("chde",)
    hyper: Hyperparams = field(default_factory=Hyperparams)
    mn_total: int | None = None     # couples N = mn_total / M on AP sweeps
    processing: str = MODE_PZF      # pzf | mr | fzf

    def __post_init__(self):
        if self.scenario not in SCENARIOS:
            raise ValueError(f"unknown scenario '{self.scenario}'")
        if len(self.values) == 0:
            raise ValueError("sweep values must be nonempty")
        if self.n_realizations < 1:
            raise ValueError("n_realizations must be >= 1")
        for algo in self.algorithms:
            if algo not in ALGORITHMS:
                raise ValueError(f"unknown algorithm '{algo}'")


@dataclass
class SlotPolicy:
    """QoS relaxation schedule for the multi-slot scheduler."""

    initial_qos: float = 0.5
    relax_after: int = 3
    relaxed_levels: tuple = None

    def __post_init__(self):
        if self.relaxed_levels is None:
            self.relaxed_levels = (self.initial_qos / 2.0,
                                   self.initial_qos / 4.0, 0.0)
        if self.relax_after < 1:
            raise ValueError("relax_after must be >= 1")
        levels = list(self.relaxed_levels)
        if any(l < 0 for l in levels):
            raise ValueError("relaxed levels must be >= 0")
        if any(b >= a for a, b in zip([self.initial_qos] + levels, levels)):
            raise ValueError("relaxed levels must be strictly decreasing")


def realization_seed(master_seed: int, axis_idx: int, realization: int) -> int:
    """Deterministic per-(sweep point, realization) seed."""
    seq = np.random.SeedSequence([int(master_seed), 104729, axis_idx, realization])
    return int(seq.generate_state(1)[0])


# Axes that leave the drawn network unchanged share realizations across
# sweep values (common random numbers keep the sweep trends clean).
_SHARED_REALIZATION_AXES = {"qos", "duplex_policy", "linr_db", "none"}


def apply_axis(config: NetworkConfig, axis: str, value,
               mn_total: int | None) -> NetworkConfig:
    if axis == "none":
        return config
    if axis == "m_aps":
        updates = {"m_aps": int(value)}
        if mn_total:
            updates["n_antennas"] = max(2, mn_total // int(value))
        return config.with_updates(**updates)
    if axis == "k_each":
        return config.with_updates(k_ul=int(value), k_dl=int(value))
    if axis == "qos":
        return config.with_updates(qos_ul=float(value), qos_dl=float(value))
    if axis == "duplex_policy":
        return config.with_updates(duplex_policy=str(value))
    if axis == "linr_db":
        return config.with_updates(linr_db=float(value))
    raise ValueError(f"unknown sweep axis '{axis}'")


def make_grouping(config: NetworkConfig, real, processing: str = MODE_PZF) -> Grouping:
    if processing == MODE_PZF:
        return pzf_grouping(real, config.upsilon_pct, config.n_antennas)
    if processing in (MODE_MR, MODE_FZF):
        return uniform_grouping(processing, real, config.n_antennas)
    raise ValueError(f"unknown processing mode '{processing}'")


def run_algorithm(name: str, config: NetworkConfig, real, grp: Grouping,
                  hyper: Hyperparams, seed: int,
                  qos_ul=None, qos_dl=None) -> OptResult:
    if name in _DE_STRATEGY_ALGOS:
        h = replace(hyper, strategy=_DE_STRATEGY_ALGOS[name])
        return evolve(config, real, grp, h, seed, qos_ul, qos_dl)
    if name == "chga":
        return run_baseline(KIND_GA, config, real, grp, hyper, seed,
                            qos_ul, qos_dl)
    if name == "chpso":
        return run_baseline(KIND_PSO, config, real, grp, hyper, seed,
                            qos_ul, qos_dl)
    if name == "random":
        return random_nafd(config, real, grp, seed, qos_ul, qos_dl)
    raise ValueError(f"unknown algorithm '{name}'")


def run_experiment(spec: ExperimentSpec, out_dir: str) -> dict:
    """Run a sweep and emit the CSV family under out_dir.

    Infeasible sweep points (e.g. full zero-forcing without enough
    antennas) produce status=infeasible rows instead of aborting the run.
    Timing-bearing files (timings.csv, runtime.csv, history_*) are the only
    outputs that vary between identical reruns.
    """
    results, per_ue, timings = [], [], []
    for ai, value in enumerate(spec.values):
        try:
            cfg = apply_axis(spec.config, spec.axis, value, spec.mn_total)
        except ValueError as exc:
            for algo in spec.algorithms:
                results.append((spec.scenario, spec.axis, value, 0, algo,
                                f"infeasible: {exc}", 0.0, 0, 0, 0, 0))
            continue
        for r in range(spec.n_realizations):
            seed_axis = 0 if spec.axis in _SHARED_REALIZATION_AXES else ai
            seed = realization_seed(spec.seed, seed_axis, r)
            topo, real = draw_network(cfg, seed)
            try:
                grp = make_grouping(cfg, real, spec.processing)
            except ValueError as exc:
                for algo in spec.algorithms:
                    results.append((spec.scenario, spec.axis, value, seed, algo,
                                    f"infeasible: {exc}", 0.0, 0, 0, 0, 0))
                continue
            for algo in spec.algorithms:
                opt = run_algorithm(algo, cfg, real, grp, spec.hyper, seed)
                report = opt.best.result.report
                results.append((spec.scenario, spec.axis, value, seed, algo,
                                "ok", opt.best.fitness,
                                int(report.served_ul.sum()),
                                int(report.served_dl.sum()),
                                opt.generations, opt.evaluations))
                timings.append((spec.scenario, spec.axis, value, seed, algo,
                                opt.wall_time))
                for k, se in enumerate(report.se_dl):
                    per_ue.append((spec.scenario, spec.axis, value, seed, algo,
                                   "DL", k, se, bool(report.served_dl[k]),
                                   cfg.qos_dl))
                for ell, se in enumerate(report.se_ul):
                    per_ue.append((spec.scenario, spec.axis, value, seed, algo,
                                   "UL", ell, se, bool(report.served_ul[ell]),
                                   cfg.qos_ul))
                if spec.scenario == "CONVERGENCE":
                    io.write_history(
                        opt.history, spec.hyper.pop_size, opt.wall_time,
                        os.path.join(out_dir, f"history_{algo}_{seed}.csv"))

    io.write_rows(os.path.join(out_dir, "results.csv"),
                  ["scenario", "axis", "axis_value", "realization_seed",
                   "algorithm", "status", "total_se", "served_ul", "served_dl",
                   "generations", "evaluations"], results)
    io.write_rows(os.path.join(out_dir, "per_ue.csv"),
                  ["scenario", "axis", "axis_value", "realization_seed",
                   "algorithm", "link", "ue_index", "se_bits_per_s_per_hz",
                   "served", "qos"], per_ue)
    io.write_rows(os.path.join(out_dir, "timings.csv"),
                  ["scenario", "axis", "axis_value", "realization_seed",
                   "algorithm", "wall_time_s"], timings)

    summary = _summarize(results)
    io.write_rows(os.path.join(out_dir, "summary.csv"),
                  ["scenario", "axis", "axis_value", "algorithm", "n_runs",
                   "mean_total_se", "std_total_se", "mean_served_ul",
                   "mean_served_dl"], summary)
    runtime = _summarize_timings(timings)
    io.write_rows(os.path.join(out_dir, "runtime.csv"),
                  ["scenario", "axis", "axis_value", "algorithm",
                   "mean_wall_time_s"], runtime)
    if spec.scenario == "CONVERGENCE":
        _write_combined_convergence(spec, out_dir)
    return {"results": results, "per_ue": per_ue, "summary": summary,
            "timings": timings}


def _summarize(results):
    if not results:
        return []
    groups = {}
    for row in results:
        _, _, value, _, algo, status, total, s_ul, s_dl, _, _ = row
        if status != "ok":
            continue
        groups.setdefault((value, algo), []).append((total, s_ul, s_dl))
    out = []
    for (value, algo), entries in groups.items():
        totals = np.array([e[0] for e in entries])
        out.append((results[0][0], results[0][1], value, algo, len(entries),
                    totals.mean(), totals.std(),
                    float(np.mean([e[1] for e in entries])),
                    float(np.mean([e[2] for e in entries]))))
    return out


def _summarize_timings(timings):
    groups = {}
    for _, _, value, _, algo, wall in timings:
        groups.setdefault((value, algo), []).append(wall)
    return [(timings[0][0], timings[0][1], value, algo,
             float(np.mean(walls)))
            for (value, algo), walls in groups.items()] if timings else []


def _write_combined_convergence(spec: ExperimentSpec, out_dir: str):
    """Merge per-run histories into one plottable file."""
    rows = []
    for ai in range(len(spec.values)):
        for r in range(spec.n_realizations):
            seed = realization_seed(spec.seed, ai, r)
            for algo in spec.algorithms:
                path = os.path.join(out_dir, f"history_{algo}_{seed}.csv")
                if not os.path.exists(path):
                    continue
                with open(path, encoding="utf-8") as fh:
                    next(fh)
                    for line in fh:
                        gen, best, _, _ = line.strip().split(",")
                        rows.append((algo, seed, int(gen), best))
    io.write_rows(os.path.join(out_dir, "convergence.csv"),
                  ["algorithm", "seed", "generation", "best_fitness"], rows)


def multi_slot_schedule(config: NetworkConfig, policy: SlotPolicy,
                        n_slots: int, seed: int,
                        hyper: Hyperparams | None = None,
                        processing: str = MODE_PZF):
    """Serve carried-over UEs slot by slot, relaxing QoS after repeat misses.

    Each slot re-draws the network for the still-waiting UEs (large-scale
    conditions evolve between scheduling epochs). Returns the trace rows
    (slot, ue, link, qos_in_effect, served) and the number of slots used.
    """
    if n_slots < 1:
        raise ValueError("n_slots must be >= 1")
    hyper = hyper or Hyperparams()

    state = {
        "UL": {"ids": list(range(config.k_ul)),
               "qos": {u: policy.initial_qos for u in range(config.k_ul)},
               "level": {u: -1 for u in range(config.k_ul)},
               "fails": {u: 0 for u in range(config.k_ul)}},
        "DL": {"ids": list(range(config.k_dl)),
               "qos": {u: policy.initial_qos for u in range(config.k_dl)},
               "level": {u: -1 for u in range(config.k_dl)},
               "fails": {u: 0 for u in range(config.k_dl)}},
    }
    rows = []
    slots_used = 0
    for slot in range(1, n_slots + 1):
        rem_ul = state["UL"]["ids"]
        rem_dl = state["DL"]["ids"]
        if not rem_ul and not rem_dl:
            break
        slots_used = slot
        cfg = config.with_updates(k_ul=len(rem_ul), k_dl=len(rem_dl))
        slot_seed = realization_seed(seed, 0, slot)
        topo, real = draw_network(cfg, slot_seed)
        grp = make_grouping(cfg, real, processing)
        qos_ul = np.array([state["UL"]["qos"][u] for u in rem_ul], float)
        qos_dl = np.array([state["DL"]["qos"][u] for u in rem_dl], float)
        opt = evolve(cfg, real, grp, hyper, slot_seed,
                     qos_ul=qos_ul, qos_dl=qos_dl)
        report = opt.best.result.report

        for link, rem, served in (("UL", rem_ul, report.served_ul),
                                  ("DL", rem_dl, report.served_dl)):
            st = state[link]
            keep = []
            for pos, ue in enumerate(rem):
                was_served = bool(served[pos]) if len(served) else False
                rows.append((slot, ue, link, st["qos"][ue], was_served))
                if was_served:
                    continue
                keep.append(ue)
                st["fails"][ue] += 1
                if (st["fails"][ue] >= policy.relax_after
                        and st["level"][ue] + 1 < len(policy.relaxed_levels)):
                    st["level"][ue] += 1
                    st["qos"][ue] = policy.relaxed_levels[st["level"][ue]]
                    st["fails"][ue] = 0
            st["ids"] = keep
    return rows, slots_used


def write_schedule(rows, path):
    io.write_rows(path, ["slot", "ue", "link", "qos_in_effect", "served"], rows)


def validate_closed_forms(config: NetworkConfig, n_draws: int, seed: int,
                          tolerance: float = 0.03, n_solutions: int = 20,
                          floor: float = 0.01, processing: str = MODE_PZF,
                          batch_size: int = 2000):
    """Closed form vs Monte Carlo on random feasible solutions.

    Returns (ok, rows) where rows follow the validation CSV schema; ok is
    False when any relative error exceeds the tolerance.
    """
    from .closedform import dl_se_per_ue, ul_se_per_ue
    from .genotype import genotype_length

    topo, real = draw_network(config, seed)
    grp = make_grouping(config, real, processing)
    rng = np.random.default_rng(np.random.SeedSequence([seed, 424243]))
    solutions = [decode(rng.random(genotype_length(config)), config, real, grp)
                 for _ in range(n_solutions)]

    mc = empirical_se_many(solutions, real, grp, config, n_draws, rng,
                           batch_size)
    rows, ok = [], True
    for si, (sol, (emp_dl, emp_ul, _)) in enumerate(zip(solutions, mc)):
        cf_dl = dl_se_per_ue(sol, real, grp, config.n_antennas, config.prelog)
        cf_ul = ul_se_per_ue(sol, real, grp, config.n_antennas, config.prelog)
        for link, cf, emp in (("DL", cf_dl, emp_dl), ("UL", cf_ul, emp_ul)):
            for ue in range(len(cf)):
                rel = abs(cf[ue] - emp[ue]) / max(cf[ue], floor)
                if rel > tolerance:
                    ok = False
                rows.append((link, ue, cf[ue], emp[ue], rel, n_draws, si))
    return ok, rows


def write_validation(rows, path):
    io.write_rows(path, ["link", "ue", "closed_form", "empirical", "rel_err",
                         "n_draws", "solution"], rows)
