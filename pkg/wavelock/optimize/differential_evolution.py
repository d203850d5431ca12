"""DE/rand/1/bin global search.

Each generation builds one trial per population member (mutation from three
distinct random partners, then binomial crossover) using a single random
generator, evaluates all trials, possibly in parallel, and finally applies
one-to-one selection. Trial construction never depends on evaluation order,
so results are identical for any number of workers.

"""


__all__ = [
    "DEResult",
    "de_mutate",
    "de_crossover",
    "de_select",
    "differential_evolution",
    "reflect_into_box",
]


import collections
import logging

import numpy as np

from ..errors import NumericalFailureError
from ..settings import DEConfig
from ..typing import CostFunctionType
from ..utils import console_out, parallel_map
from .trace import PHASE_DE, OptimizerTrace, TraceRecord


logger = logging.getLogger(__name__)

MIN_POPULATION_SIZE = 4
TRIAL_ERRORS = (np.linalg.LinAlgError, ArithmeticError, ValueError)


de_result_fields = ("best", "best_cost", "population", "costs",
                    "generations", "stagnated", "trace")
DEResult = collections.namedtuple("DEResult", de_result_fields)
DEResult.__doc__ = """Outcome of :func:`differential_evolution`.

Attributes
----------
best : np.ndarray
    Lowest-cost member of the final population.
best_cost : float
population : np.ndarray
    (N_P, D) final population.
costs : np.ndarray
    (N_P, ) costs of the final population; failed evaluations are inf.
generations : int
    Number of generations actually run.
stagnated : bool
    Whether the run stopped early on stagnation.
trace : OptimizerTrace
"""


def reflect_into_box(vector, lower, upper):
    """Reflect out-of-box components back across the violated bound.

    Reflection is periodic so arbitrarily distant components land inside the
    box. Components of zero-width intervals are set to the bound.

    """
    vector = np.asarray(vector, dtype=float)
    lower = np.asarray(lower, dtype=float)
    upper = np.asarray(upper, dtype=float)
    width = upper - lower
    outside = (vector < lower) | (vector > upper)
    if not np.any(outside):
        return vector.copy()
    reflected = vector.copy()
    safe_width = np.where(width > 0, width, 1.0)
    folded = np.mod(vector - lower, 2 * safe_width)
    mirrored = lower + (safe_width - np.abs(safe_width - folded))
    mirrored = np.where(width > 0, mirrored, lower)
    reflected[outside] = mirrored[outside]
    return reflected


def _check_population(population):
    population = np.asarray(population, dtype=float)
    if population.ndim != 2 or population.shape[0] < MIN_POPULATION_SIZE:
        msg = (f"DE/rand/1 needs a population of at least "
               f"{MIN_POPULATION_SIZE} members, got {len(population)}.")
        raise ValueError(msg)
    return population


def de_mutate(population, i, amplification, rng, *, indices=None,
              bounds=None):
    """Mutant theta_r1 + F (theta_r2 - theta_r3).

    Args
    ----
    population : np.ndarray
        (N_P, D) population.
    i : int
        Index of the target member.
    amplification : float
        F.
    rng : np.random.Generator
        Draws r1, r2, r3 mutually distinct and distinct from `i`.
    indices : tuple of int, optional
        Explicit (r1, r2, r3), bypassing the random draw.
    bounds : tuple of np.ndarray, optional
        (lower, upper) box into which the mutant is reflected.

    Raises
    ------
    ValueError
        If the population has fewer than four members or explicit indices are
        not distinct from each other and from `i`.

    """
    population = _check_population(population)
    if indices is None:
        candidates = np.delete(np.arange(population.shape[0]), i)
        indices = rng.choice(candidates, size=3, replace=False)
    elif len(set(indices) | {i}) != 4:
        msg = f"Mutation indices {tuple(indices)} must be distinct from {i}."
        raise ValueError(msg)
    r1, r2, r3 = indices
    mutant = population[r1] + amplification * (population[r2]
                                                - population[r3])
    if bounds is not None:
        mutant = reflect_into_box(mutant, *bounds)
    return mutant


def de_crossover(target, mutant, crossover, rng):
    """Binomial crossover with a forced mutant component.

    Component d comes from the mutant when a uniform draw is at most
    `crossover` or when d is the randomly chosen forced index.

    """
    target = np.asarray(target, dtype=float)
    mutant = np.asarray(mutant, dtype=float)
    if target.shape != mutant.shape:
        msg = "Target and mutant vectors must have the same length."
        raise ValueError(msg)
    forced = rng.integers(target.size)
    take_mutant = rng.random(target.size) <= crossover
    take_mutant[forced] = True
    return np.where(take_mutant, mutant, target)


def _safe_cost(cost_fn, theta):
    try:
        cost = float(cost_fn(theta))
    except TRIAL_ERRORS as error:
        logger.debug("Cost evaluation failed: %s", error)
        return np.inf
    return cost if np.isfinite(cost) else np.inf


def de_select(target, trial, cost_fn, *, target_cost=None, trial_cost=None):
    """One-to-one selection; ties keep the trial.

    A trial whose cost evaluation raises a numerical error or returns a
    non-finite value never survives.

    Returns
    -------
    np.ndarray
        Survivor.
    float
        Cost of the survivor.

    """
    if target_cost is None:
        target_cost = _safe_cost(cost_fn, target)
    if trial_cost is None:
        trial_cost = _safe_cost(cost_fn, trial)
    if np.isfinite(trial_cost) and trial_cost <= target_cost:
        return np.asarray(trial, dtype=float), trial_cost
    return np.asarray(target, dtype=float), target_cost


def _relative_improvement(previous, current):
    if not np.isfinite(previous):
        return np.inf
    return (previous - current) / max(abs(previous), np.finfo(float).tiny)


def differential_evolution(cost_fn: CostFunctionType, lower, upper,
                           config=None, *, number_workers=1, names=(),
                           trace=None, console_out_progress=False):
    """Minimize `cost_fn` over the box [lower, upper].

    Args
    ----
    cost_fn : callable
        Scalar objective of a parameter vector. Must be safe to call from
        several threads when `number_workers` > 1.
    lower, upper : np.ndarray
        Finite box bounds.
    config : DEConfig, optional
    number_workers : int, optional (default 1)
        Worker threads used to evaluate trials.
    names : iterable of str, optional
        Parameter names used for the trace.
    trace : OptimizerTrace, optional
        Trace to append to; a new one is created when omitted.
    console_out_progress : bool, optional (default `False`)

    Returns
    -------
    DEResult

    Raises
    ------
    NumericalFailureError
        If no population member ever had a finite cost.

    """
    config = DEConfig() if config is None else config
    lower = np.asarray(lower, dtype=float)
    upper = np.asarray(upper, dtype=float)
    if lower.shape != upper.shape or np.any(lower > upper):
        msg = "DE bounds must have equal shapes with lower <= upper."
        raise ValueError(msg)
    trace = OptimizerTrace(names) if trace is None else trace
    rng = np.random.default_rng(config.seed)
    number_members = config.population_size
    population = lower + rng.random((number_members, lower.size)) * (
        upper - lower)
    costs = np.array(parallel_map(lambda theta: _safe_cost(cost_fn, theta),
                                  population, number_workers))
    best_index = int(np.argmin(costs))
    trace.append(TraceRecord(PHASE_DE, 0, costs[best_index],
                             theta=population[best_index]))
    if console_out_progress:
        console_out(f"Generation 0: best cost {costs[best_index]:.6e}")

    stagnant = 0
    stagnated = False
    generation = 0
    for generation in range(1, config.max_generations + 1):
        previous_best = costs[best_index]
        trials = np.empty_like(population)
        for i in range(number_members):
            mutant = de_mutate(population, i, config.amplification, rng,
                               bounds=(lower, upper))
            trials[i] = de_crossover(population[i], mutant, config.crossover,
                                     rng)
        trial_costs = parallel_map(lambda theta: _safe_cost(cost_fn, theta),
                                   trials, number_workers)
        for i, trial_cost in enumerate(trial_costs):
            population[i], costs[i] = de_select(
                population[i], trials[i], cost_fn, target_cost=costs[i],
                trial_cost=trial_cost)
        best_index = int(np.argmin(costs))
        trace.append(TraceRecord(PHASE_DE, generation, costs[best_index],
                                 theta=population[best_index]))
        if console_out_progress:
            console_out(f"Generation {generation}: best cost "
                        f"{costs[best_index]:.6e}")
        improvement = _relative_improvement(previous_best, costs[best_index])
        if improvement < config.stagnation_tolerance:
            stagnant += 1
        else:
            stagnant = 0
        if stagnant >= config.stagnation_generations:
            stagnated = True
            logger.info("DE stopped after %d generations without relative "
                        "improvement above %g.", generation,
                        config.stagnation_tolerance)
            break

    if not np.isfinite(costs[best_index]):
        msg = "Every DE population member failed to produce a finite cost."
        raise NumericalFailureError(msg)
    return DEResult(population[best_index].copy(), float(costs[best_index]),
                    population, costs, generation, stagnated, trace)
