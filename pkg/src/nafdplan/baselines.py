"""Reference optimizers sharing the decode + suspend-service repair pipeline.

All baselines consume exactly pop_size evaluations per generation, matching
the evolutionary search, and honor the same g_max / stall-window
termination, so comparisons run under identical budgets.
"""

from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np

from .config import NetworkConfig
from .de import Hyperparams, Individual, OptResult, stalled
from .genotype import RepairEngine, genotype_length
from .grouping import Grouping
from .netgen import NetworkRealization, child_rng

KIND_GA = "GA"
KIND_PSO = "PSO"


@dataclass
class GAParams:
    tournament_size: int = 2
    crossover_prob: float = 1.0     # uniform crossover applied to every pair
    mutation_sigma: float = 0.1
    mutation_rate: float | None = None  # default 1/len
    elitism: int = 1


@dataclass
class PSOParams:
    inertia: float = 0.729
    cognitive: float = 1.494
    social: float = 1.494


def random_nafd_genotype(config: NetworkConfig, rng: np.random.Generator) -> np.ndarray:
    """Genotype of an unoptimized assignment: random duplex modes, full
    equal-share DL power, full UL power, unit LSFD weights."""
    m, ku, kd = config.m_aps, config.k_ul, config.k_dl
    x = np.ones(genotype_length(config))
    if config.duplex_policy == "NAFD":
        fd = rng.random(m) < 0.5
    else:
        fd = np.zeros(m, dtype=bool)
    dl_if_hd = rng.random(m) < 0.5
    a = fd | dl_if_hd
    b = fd | ~dl_if_hd
    x[:m] = a.astype(float)
    x[m:2 * m] = b.astype(float)
    # remaining segments stay at 1: varsigma = 1, alpha = 1, equal theta
    # shares, full power level
    return x


def random_nafd(config: NetworkConfig, real: NetworkRealization, grp: Grouping,
                seed: int, qos_ul=None, qos_dl=None):
    """One random assignment evaluated through the same repair masking."""
    rng = child_rng(seed, "optimizer")
    genotype = random_nafd_genotype(config, rng)
    result = RepairEngine(config, real, grp, qos_ul, qos_dl).evaluate(genotype)
    best = Individual(genotype=genotype, fitness=result.fitness,
                      served_ul=result.served_ul, served_dl=result.served_dl,
                      result=result)
    return OptResult(best=best, history=[result.fitness], evaluations=1,
                     wall_time=0.0, generations=0)


def run_baseline(kind: str, config: NetworkConfig, real: NetworkRealization,
                 grp: Grouping, hyper: Hyperparams, seed: int,
                 qos_ul=None, qos_dl=None,
                 ga_params: GAParams | None = None,
                 pso_params: PSOParams | None = None) -> OptResult:
    if kind == KIND_GA:
        return _run_ga(config, real, grp, hyper, seed, qos_ul, qos_dl,
                       ga_params or GAParams())
    if kind == KIND_PSO:
        return _run_pso(config, real, grp, hyper, seed, qos_ul, qos_dl,
                        pso_params or PSOParams())
    raise ValueError(f"unknown baseline '{kind}'")


def _finish(population, results, fitnesses, history, evaluations, t0, generation):
    best_idx = int(np.argmax(fitnesses))
    best = Individual(genotype=population[best_idx].copy(),
                      fitness=float(fitnesses[best_idx]),
                      served_ul=results[best_idx].served_ul,
                      served_dl=results[best_idx].served_dl,
                      result=results[best_idx])
    return OptResult(best=best, history=history, evaluations=evaluations,
                     wall_time=time.perf_counter() - t0, generations=generation)


def _run_ga(config, real, grp, hyper, seed, qos_ul, qos_dl, params: GAParams):
    rng = child_rng(seed, "optimizer")
    length = genotype_length(config)
    pop_size = hyper.pop_size
    rate = params.mutation_rate if params.mutation_rate is not None else 1.0 / length
    evaluate = RepairEngine(config, real, grp, qos_ul, qos_dl).evaluate

    def tournament():
        picks = rng.integers(pop_size, size=params.tournament_size)
        return population[picks[np.argmax(fitnesses[picks])]]

    t0 = time.perf_counter()
    population = rng.random((pop_size, length))
    results = [evaluate(g) for g in population]
    fitnesses = np.array([r.fitness for r in results])
    evaluations = pop_size
    history = [float(fitnesses.max())]
    generation = 0

    for generation in range(1, hyper.g_max + 1):
        elite_idx = int(np.argmax(fitnesses))
        elite = (population[elite_idx].copy(), results[elite_idx])
        children = np.empty_like(population)
        for i in range(pop_size):
            p1, p2 = tournament(), tournament()
            if rng.random() < params.crossover_prob:
                child = np.where(rng.random(length) < 0.5, p1, p2)
            else:
                child = p1.copy()
            mutate_mask = rng.random(length) < rate
            child = child + mutate_mask * rng.normal(0.0, params.mutation_sigma, length)
            children[i] = np.clip(child, 0.0, 1.0)
        results = [evaluate(g) for g in children]
        fitnesses = np.array([r.fitness for r in results])
        evaluations += pop_size
        population = children
        if params.elitism > 0 and fitnesses.max() < elite[1].fitness:
            worst = int(np.argmin(fitnesses))
            population[worst] = elite[0]
            results[worst] = elite[1]
            fitnesses[worst] = elite[1].fitness
        history.append(max(float(fitnesses.max()), history[-1]))
        if stalled(history, hyper):
            break

    return _finish(population, results, fitnesses, history, evaluations, t0,
                   generation)


def _run_pso(config, real, grp, hyper, seed, qos_ul, qos_dl, params: PSOParams):
    rng = child_rng(seed, "optimizer")
    length = genotype_length(config)
    pop_size = hyper.pop_size
    evaluate = RepairEngine(config, real, grp, qos_ul, qos_dl).evaluate

    t0 = time.perf_counter()
    position = rng.random((pop_size, length))
    velocity = np.zeros_like(position)
    results = [evaluate(g) for g in position]
    fitnesses = np.array([r.fitness for r in results])
    evaluations = pop_size

    pbest_pos = position.copy()
    pbest_fit = fitnesses.copy()
    pbest_res = list(results)
    gbest_idx = int(np.argmax(fitnesses))
    history = [float(fitnesses[gbest_idx])]
    generation = 0

    for generation in range(1, hyper.g_max + 1):
        gbest = pbest_pos[int(np.argmax(pbest_fit))]
        r1 = rng.random((pop_size, length))
        r2 = rng.random((pop_size, length))
        velocity = (params.inertia * velocity
                    + params.cognitive * r1 * (pbest_pos - position)
                    + params.social * r2 * (gbest[None, :] - position))
        position = np.clip(position + velocity, 0.0, 1.0)
        results = [evaluate(g) for g in position]
        fitnesses = np.array([r.fitness for r in results])
        evaluations += pop_size
        improved = fitnesses > pbest_fit
        pbest_pos[improved] = position[improved]
        pbest_fit[improved] = fitnesses[improved]
        for i in np.flatnonzero(improved):
            pbest_res[i] = results[i]
        history.append(max(float(pbest_fit.max()), history[-1]))
        if stalled(history, hyper):
            break

    return _finish(pbest_pos, pbest_res, pbest_fit, history, evaluations, t0,
                   generation)
