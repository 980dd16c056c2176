"""Constraint-handling differential evolution over the genotype hypercube."""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from .config import NetworkConfig
from .genotype import RepairEngine, RepairResult, genotype_length
from .grouping import Grouping
from .netgen import NetworkRealization, child_rng

STRATEGY_CURRENT_TO_PBEST_1 = "CURRENT_TO_PBEST_1"
STRATEGY_RAND_1 = "RAND_1"
STRATEGY_RAND_2 = "RAND_2"
STRATEGY_BEST_1 = "BEST_1"
STRATEGY_BEST_2 = "BEST_2"

STRATEGIES = (
    STRATEGY_CURRENT_TO_PBEST_1,
    STRATEGY_RAND_1,
    STRATEGY_RAND_2,
    STRATEGY_BEST_1,
    STRATEGY_BEST_2,
)

_N_DIFF_VECTORS = {
    STRATEGY_CURRENT_TO_PBEST_1: 2,
    STRATEGY_RAND_1: 3,
    STRATEGY_RAND_2: 5,
    STRATEGY_BEST_1: 2,
    STRATEGY_BEST_2: 4,
}


@dataclass
class Hyperparams:
    pop_size: int = 50
    scale_factor: float = 0.7
    crossover_rate: float = 0.9
    pbest_fraction: float = 0.1
    g_max: int = 500
    stall_window: int = 50
    stall_rel_tol: float = 1e-3   # "unchanged" = window gain below this
    strategy: str = STRATEGY_CURRENT_TO_PBEST_1

    def __post_init__(self):
        if self.pop_size < 4:
            raise ValueError("pop_size must be >= 4")
        if not 0.0 < self.scale_factor <= 1.0:
            raise ValueError("scale_factor must lie in (0, 1]")
        if not 0.0 <= self.crossover_rate <= 1.0:
            raise ValueError("crossover_rate must lie in [0, 1]")
        if self.pbest_fraction * self.pop_size < 1.0:
            raise ValueError("pbest_fraction * pop_size must be >= 1")
        if self.strategy not in STRATEGIES:
            raise ValueError(f"unknown strategy '{self.strategy}'")
        if self.stall_rel_tol < 0:
            raise ValueError("stall_rel_tol must be nonnegative")


def stalled(history, hyper: Hyperparams) -> bool:
    """True when the best fitness gained less than stall_rel_tol (relative)
    over the last stall_window generations."""
    w = hyper.stall_window
    if len(history) <= w:
        return False
    gain = history[-1] - history[-1 - w]
    return gain < hyper.stall_rel_tol * max(history[-1], 1e-300)


@dataclass
class Individual:
    genotype: np.ndarray
    fitness: float
    served_ul: np.ndarray
    served_dl: np.ndarray
    result: RepairResult


@dataclass
class OptResult:
    best: Individual
    history: list = field(default_factory=list)   # best fitness per generation
    evaluations: int = 0
    wall_time: float = 0.0
    generations: int = 0


def _distinct_indices(rng, pop_size, count, exclude):
    """`count` pairwise-distinct population indices avoiding `exclude`."""
    pool = [j for j in range(pop_size) if j != exclude]
    picks = rng.choice(len(pool), size=count, replace=False)
    return [pool[int(j)] for j in picks]


def mutate(population, fitnesses, i, hyper: Hyperparams,
           rng: np.random.Generator) -> np.ndarray:
    """Mutant vector for slot i with out-of-range genes pulled back halfway
    toward the parent."""
    pop_size = len(population)
    if pop_size < _N_DIFF_VECTORS[hyper.strategy] + 1:
        raise ValueError("population too small for the chosen strategy")
    x_i = population[i]
    f = hyper.scale_factor
    strategy = hyper.strategy

    if strategy == STRATEGY_CURRENT_TO_PBEST_1:
        n_top = max(1, int(np.ceil(hyper.pbest_fraction * pop_size)))
        top = np.argsort(fitnesses)[::-1][:n_top]
        pbest = population[int(rng.choice(top))]
        r1, r2 = _distinct_indices(rng, pop_size, 2, i)
        mutant = x_i + f * (pbest - x_i) + f * (population[r1] - population[r2])
    elif strategy == STRATEGY_RAND_1:
        r1, r2, r3 = _distinct_indices(rng, pop_size, 3, i)
        mutant = population[r1] + f * (population[r2] - population[r3])
    elif strategy == STRATEGY_RAND_2:
        r1, r2, r3, r4, r5 = _distinct_indices(rng, pop_size, 5, i)
        mutant = (population[r1] + f * (population[r2] - population[r3])
                  + f * (population[r4] - population[r5]))
    elif strategy == STRATEGY_BEST_1:
        best = population[int(np.argmax(fitnesses))]
        r1, r2 = _distinct_indices(rng, pop_size, 2, i)
        mutant = best + f * (population[r1] - population[r2])
    else:  # BEST_2
        best = population[int(np.argmax(fitnesses))]
        r1, r2, r3, r4 = _distinct_indices(rng, pop_size, 4, i)
        mutant = (best + f * (population[r1] - population[r2])
                  + f * (population[r3] - population[r4]))

    low = mutant < 0.0
    high = mutant > 1.0
    mutant = np.where(low, 0.5 * x_i, mutant)
    mutant = np.where(high, 0.5 * (1.0 + x_i), mutant)
    return mutant


def crossover(parent: np.ndarray, mutant: np.ndarray, cr: float,
              rng: np.random.Generator) -> np.ndarray:
    """Binomial crossover with one forced mutant gene."""
    if parent.shape != mutant.shape:
        raise ValueError("parent/mutant length mismatch")
    take = rng.random(parent.shape[0]) <= cr
    take[rng.integers(parent.shape[0])] = True
    return np.where(take, mutant, parent)


def evolve(config: NetworkConfig, real: NetworkRealization, grp: Grouping,
           hyper: Hyperparams, seed: int,
           qos_ul=None, qos_dl=None) -> OptResult:
    """Run the evolutionary search; the best-so-far history is nondecreasing.

    Terminates at g_max generations or once the best fitness is unchanged
    over a stall_window span (relative gain below stall_rel_tol).
    """
    rng = child_rng(seed, "optimizer")
    length = genotype_length(config)
    pop_size = hyper.pop_size
    evaluate = RepairEngine(config, real, grp, qos_ul, qos_dl).evaluate

    t0 = time.perf_counter()
    population = rng.random((pop_size, length))
    results = [evaluate(population[i]) for i in range(pop_size)]
    fitnesses = np.array([r.fitness for r in results])
    evaluations = pop_size

    best_idx = int(np.argmax(fitnesses))
    history = [float(fitnesses[best_idx])]
    generation = 0

    for generation in range(1, hyper.g_max + 1):
        offspring = population.copy()
        for i in range(pop_size):
            mutant = mutate(population, fitnesses, i, hyper, rng)
            trial = crossover(population[i], mutant, hyper.crossover_rate, rng)
            trial_result = evaluate(trial)
            evaluations += 1
            if trial_result.fitness >= fitnesses[i]:
                offspring[i] = trial
                results[i] = trial_result
        population = offspring
        fitnesses = np.array([r.fitness for r in results])
        history.append(max(float(fitnesses.max()), history[-1]))
        if stalled(history, hyper):
            break

    best_idx = int(np.argmax(fitnesses))
    best = Individual(genotype=population[best_idx].copy(),
                      fitness=float(fitnesses[best_idx]),
                      served_ul=results[best_idx].served_ul,
                      served_dl=results[best_idx].served_dl,
                      result=results[best_idx])
    return OptResult(best=best, history=history, evaluations=evaluations,
                     wall_time=time.perf_counter() - t0, generations=generation)
