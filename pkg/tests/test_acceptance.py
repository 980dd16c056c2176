"""Acceptance gate: one test per criterion, each printing a PASS/FAIL line.

Protocols (configurations, seeds, budgets) are frozen module constants; every
run is fully deterministic. Run with `pytest tests/test_acceptance.py -s` to
see the per-criterion lines. The suite takes roughly a quarter hour on a
laptop-class core with the compiled kernels.
"""

import time

import numpy as np
import pytest

from nafdplan.baselines import random_nafd, run_baseline
from nafdplan.closedform import check_constraints, dl_se_per_ue, ul_se_per_ue
from nafdplan.config import NetworkConfig
from nafdplan.de import STRATEGIES, Hyperparams, evolve
from nafdplan.genotype import genotype_length, repair_and_evaluate
from nafdplan.grouping import pzf_grouping, uniform_grouping
from nafdplan.harness import (ExperimentSpec, SlotPolicy, multi_slot_schedule,
                              realization_seed, run_experiment,
                              validate_closed_forms)
from nafdplan.netgen import draw_network

from conftest import random_mixed_setup, random_solution
from reference_forms import fzf_reference, mr_reference


def report(criterion: str, passed: bool, detail: str):
    line = f"ACCEPTANCE {criterion}: {'PASS' if passed else 'FAIL'} — {detail}"
    print(line, flush=True)
    assert passed, line


def assert_monotone_history(history):
    assert np.all(np.diff(history) >= 0), "best-fitness history decreased"


class TestCriterion1OracleEquivalence:
    """Closed forms match the Monte Carlo oracle within 3% (floor 0.01)."""

    @pytest.mark.parametrize("m,n,k", [(5, 4, 2), (10, 4, 3)])
    def test_oracle_equivalence(self, m, n, k):
        cfg = NetworkConfig(m_aps=m, n_antennas=n, k_ul=k, k_dl=k,
                            upsilon_pct=80.0)
        t0 = time.perf_counter()
        ok, rows = validate_closed_forms(cfg, n_draws=20000, seed=101,
                                         tolerance=0.03, n_solutions=20,
                                         floor=0.01)
        elapsed = time.perf_counter() - t0
        worst = max(r[4] for r in rows)
        report(f"1 (oracle, M={m} N={n} Ku=Kd={k})",
               ok and elapsed < 300.0,
               f"worst rel err {worst:.4f} over {len(rows)} UE entries "
               f"at 2e4 draws, {elapsed:.0f}s")


class TestCriterion2SpecialCases:
    """All-weak == MR forms and all-strong == FZF forms to 1e-12 relative."""

    def test_identities(self):
        rng = np.random.default_rng(2025)
        n = 6
        worst = 0.0
        for trial in range(100):
            real, _ = random_mixed_setup(rng, m=3, n=n, ku=2, kd=2)
            for mode, reference in (("MR", mr_reference),
                                    ("FZF", fzf_reference)):
                grp = uniform_grouping(mode, real, n)
                sol = random_solution(rng, 3, n, 2, 2, grp, real)
                dl = dl_se_per_ue(sol, real, grp, n, 0.97)
                ul = ul_se_per_ue(sol, real, grp, n, 0.97)
                ref_dl, ref_ul = reference(sol, real, n, 0.97)
                for got, want in ((dl, ref_dl), (ul, ref_ul)):
                    scale = np.maximum(np.abs(want), 1e-30)
                    worst = max(worst, float(np.max(np.abs(got - want) / scale)))
        report("2 (MR/FZF identities)", worst <= 1e-12,
               f"worst relative gap {worst:.2e} over 100 random inputs x 2 modes")


class TestCriterion3OptimizerSuperiority:
    """CHDE >= 1.30 x Random-NAFD and >= CHGA/CHPSO at equal budgets."""

    def test_superiority(self):
        cfg = NetworkConfig(m_aps=30, n_antennas=8, k_ul=5, k_dl=5,
                            qos_ul=0.2, qos_dl=0.2)
        hyper = Hyperparams(pop_size=50, g_max=300, stall_window=999)
        means = {"chde": [], "chga": [], "chpso": [], "random": []}
        budgets = set()
        for r in range(10):
            seed = realization_seed(1234, 0, r)
            _, real = draw_network(cfg, seed)
            grp = pzf_grouping(real, cfg.upsilon_pct, cfg.n_antennas)
            de = evolve(cfg, real, grp, hyper, seed)
            ga = run_baseline("GA", cfg, real, grp, hyper, seed)
            pso = run_baseline("PSO", cfg, real, grp, hyper, seed)
            rnd = random_nafd(cfg, real, grp, seed)
            for out in (de, ga, pso):
                assert_monotone_history(out.history)
            budgets.update({de.evaluations, ga.evaluations, pso.evaluations})
            means["chde"].append(de.best.fitness)
            means["chga"].append(ga.best.fitness)
            means["chpso"].append(pso.best.fitness)
            means["random"].append(rnd.best.fitness)
        avg = {k: float(np.mean(v)) for k, v in means.items()}
        ratio = avg["chde"] / avg["random"]
        ok = (len(budgets) == 1 and ratio >= 1.30
              and avg["chde"] >= avg["chga"] and avg["chde"] >= avg["chpso"])
        report("3 (optimizer superiority)", ok,
               f"means CHDE {avg['chde']:.2f} GA {avg['chga']:.2f} "
               f"PSO {avg['chpso']:.2f} Random {avg['random']:.2f}; "
               f"CHDE/Random {ratio:.2f} (need >= 1.30), equal budgets "
               f"{budgets}")


class TestCriterion4OperatorAblation:
    """CHDE mean >= each fixed mutation strategy over 12 paired seeds."""

    def test_ablation(self):
        cfg = NetworkConfig(m_aps=30, n_antennas=8, k_ul=3, k_dl=3,
                            qos_ul=0.2, qos_dl=0.2)
        setups = []
        for r in range(12):
            seed = realization_seed(777, 0, r)
            _, real = draw_network(cfg, seed)
            grp = pzf_grouping(real, cfg.upsilon_pct, cfg.n_antennas)
            setups.append((seed, real, grp))
        means = {}
        for strategy in STRATEGIES:
            hyper = Hyperparams(pop_size=50, g_max=250, stall_window=999,
                                strategy=strategy)
            vals = []
            for seed, real, grp in setups:
                out = evolve(cfg, real, grp, hyper, seed)
                assert_monotone_history(out.history)
                vals.append(out.best.fitness)
            means[strategy] = float(np.mean(vals))
        chde = means["CURRENT_TO_PBEST_1"]
        ok = all(chde >= v for v in means.values())
        detail = ", ".join(f"{k.lower()} {v:.2f}" for k, v in means.items())
        report("4 (operator ablation ordering)", ok, detail)


class TestCriterion5FeasibilitySoundness:
    """Every returned solution is feasible and serves only QoS-met UEs."""

    def test_randomized_repairs_and_optimizer_returns(self):
        rng = np.random.default_rng(909)
        checked = 0
        for _ in range(1000):
            m = int(rng.integers(2, 8))
            n = int(rng.integers(2, 7))
            ku = int(rng.integers(1, 4))
            kd = int(rng.integers(1, 4))
            cfg = NetworkConfig(
                m_aps=m, n_antennas=n, k_ul=ku, k_dl=kd,
                upsilon_pct=float(rng.uniform(0, 100)),
                qos_ul=float(rng.uniform(0, 1.5)),
                qos_dl=float(rng.uniform(0, 1.5)),
                duplex_policy="HD_ONLY" if rng.random() < 0.3 else "NAFD")
            _, real = draw_network(cfg, int(rng.integers(1 << 31)))
            grp = pzf_grouping(real, cfg.upsilon_pct, n)
            res = repair_and_evaluate(rng.random(genotype_length(cfg)),
                                      cfg, real, grp)
            assert check_constraints(res.solution, real, grp, cfg) == []
            assert np.all(res.report.se_ul[res.served_ul] >= cfg.qos_ul)
            assert np.all(res.report.se_dl[res.served_dl] >= cfg.qos_dl)
            checked += 1

        algo_checked = 0
        hyper = Hyperparams(pop_size=10, g_max=8, stall_window=99,
                            pbest_fraction=0.2)
        for seed in range(8):
            cfg = NetworkConfig(m_aps=6, n_antennas=4, k_ul=2, k_dl=2,
                                qos_ul=0.4, qos_dl=0.4,
                                duplex_policy="HD_ONLY" if seed % 2 else "NAFD")
            _, real = draw_network(cfg, seed)
            grp = pzf_grouping(real, cfg.upsilon_pct, cfg.n_antennas)
            outs = [evolve(cfg, real, grp, hyper, seed),
                    run_baseline("GA", cfg, real, grp, hyper, seed),
                    run_baseline("PSO", cfg, real, grp, hyper, seed),
                    random_nafd(cfg, real, grp, seed)]
            for out in outs:
                res = out.best.result
                assert check_constraints(res.solution, real, grp, cfg) == []
                assert np.all(res.report.se_ul[res.served_ul] >= cfg.qos_ul)
                assert np.all(res.report.se_dl[res.served_dl] >= cfg.qos_dl)
                algo_checked += 1
        report("5 (feasibility soundness)", checked >= 1000,
               f"{checked} randomized repairs + {algo_checked} optimizer "
               f"returns, all feasible with served SE >= QoS")


class TestCriterion6Convergence:
    """Histories nondecreasing; the final stall window moves < 0.1%."""

    def test_convergence_stability(self):
        cfg = NetworkConfig(m_aps=30, n_antennas=8, k_ul=3, k_dl=3,
                            qos_ul=0.2, qos_dl=0.2)
        hyper = Hyperparams(pop_size=50, g_max=1500, stall_window=50)
        worst_change = 0.0
        gens = []
        for r in range(3):
            seed = realization_seed(31, 0, r)
            _, real = draw_network(cfg, seed)
            grp = pzf_grouping(real, cfg.upsilon_pct, cfg.n_antennas)
            out = evolve(cfg, real, grp, hyper, seed)
            assert_monotone_history(out.history)
            h = out.history
            w = hyper.stall_window
            assert out.generations < hyper.g_max, "run never stabilized"
            change = (h[-1] - h[-1 - w]) / h[-1]
            worst_change = max(worst_change, change)
            gens.append(out.generations)
        report("6 (convergence)", worst_change < 1e-3,
               f"final-window change {worst_change:.2e} (< 0.1%), "
               f"stabilized at generations {gens}")


class TestCriterion7QosSweep:
    """Mean served-UE count is nonincreasing as the threshold rises."""

    def test_monotone_served(self, tmp_path):
        cfg = NetworkConfig(m_aps=20, n_antennas=6, k_ul=5, k_dl=5)
        spec = ExperimentSpec(
            scenario="QOS_SWEEP", config=cfg, axis="qos",
            values=(0.0, 0.5, 1.0, 1.5, 2.0, 2.5, 3.0),
            n_realizations=5, seed=555, algorithms=("chde",),
            hyper=Hyperparams(pop_size=40, g_max=120, stall_window=999))
        out = run_experiment(spec, str(tmp_path))
        served = [(row[2], row[7] + row[8]) for row in out["summary"]]
        served.sort()
        means = [s for _, s in served]
        ok = all(a >= b - 1e-12 for a, b in zip(means, means[1:]))
        report("7 (QoS sweep monotonicity)", ok,
               f"mean served over thresholds {[round(m, 2) for m in means]}")


class TestCriterion8MultiSlot:
    """6-UE deployment served within <= 4 slots on average; relaxation
    guarantees nobody starves within 30 slots."""

    def test_slots_to_serve(self):
        cfg = NetworkConfig(m_aps=20, n_antennas=5, k_ul=3, k_dl=3)
        hyper = Hyperparams(pop_size=40, g_max=60, stall_window=999)
        slot_counts = []
        for seed in range(10):
            rows, slots = multi_slot_schedule(cfg, SlotPolicy(initial_qos=0.5),
                                              30, seed=seed, hyper=hyper)
            final = [r for r in rows if r[0] == slots]
            assert all(r[4] for r in final), "trace ended with unserved UEs"
            slot_counts.append(slots)
        mean_slots = float(np.mean(slot_counts))

        # forced-infeasible threshold: relaxation must still rescue everyone
        policy = SlotPolicy(initial_qos=500.0, relax_after=3,
                            relaxed_levels=(100.0, 1.0, 0.0))
        rows, slots = multi_slot_schedule(cfg, policy, 30, seed=3, hyper=hyper)
        rescued = all(r[4] for r in rows if r[0] == slots) and slots <= 30
        report("8 (multi-slot scheduler)", mean_slots <= 4.0 and rescued,
               f"mean slots {mean_slots:.1f} (<= 4) over 10 seeds; forced "
               f"relaxation served everyone by slot {slots} (<= 30)")


class TestCriterion9DuplexPolicy:
    """NAFD mode selection beats HD-only at 20 dB loop interference."""

    def test_nafd_beats_hd_only(self):
        cfg = NetworkConfig(m_aps=20, n_antennas=5, k_ul=5, k_dl=5,
                            linr_db=20.0, qos_ul=0.2, qos_dl=0.2)
        hyper = Hyperparams(pop_size=50, g_max=400, stall_window=999)
        nafd, hd = [], []
        for r in range(12):
            seed = realization_seed(99, 0, r)
            _, real = draw_network(cfg, seed)
            grp = pzf_grouping(real, cfg.upsilon_pct, cfg.n_antennas)
            nafd.append(evolve(cfg, real, grp, hyper, seed).best.fitness)
            hd_cfg = cfg.with_updates(duplex_policy="HD_ONLY")
            hd.append(evolve(hd_cfg, real, grp, hyper, seed).best.fitness)
        ok = np.mean(nafd) >= np.mean(hd)
        report("9 (NAFD vs HD-only at LINR 20 dB)", ok,
               f"mean total SE NAFD {np.mean(nafd):.2f} vs HD {np.mean(hd):.2f} "
               f"on 12 shared realizations")
