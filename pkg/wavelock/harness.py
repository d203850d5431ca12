"""Experiment drivers, Monte-Carlo sweeps and result export.

Attributes
----------
DESK_SCALE : tuple of int
    (n_t, n_f) used by default so experiments finish in minutes.
PAPER_SCALE : tuple of int
    (n_t, n_f) of the full-size experiments.
EXAMPLE1_VARIANTS : dict
    Source positions of the spiral-array experiments.

"""


__all__ = [
    "ExperimentResult",
    "SweepSpec",
    "SweepRow",
    "SweepTable",
    "example1_scenario",
    "example2_scenario",
    "with_scale",
    "localize",
    "run_example1",
    "run_example2",
    "run_sweep",
    "CostSurface",
    "cost_surface",
    "export",
    "import_trace",
]


import collections
import csv
import io
import json
import logging
import time

import numpy as np

from .cost import ParamVector, SteeringModel, residual
from .crlb import CRLBRow, reference_parameters, source_bounds
from .errors import ConfigError, NumericalFailureError
from .optimize import OptimizerTrace, hybrid_minimize
from .optimize.differential_evolution import TRIAL_ERRORS
from .scene import (MultipathChannel, Scenario, SourceSpec, circular_arrays,
                    scenario_hash, spiral_array)
from .settings import DEConfig, Settings
from .synth import synthesize
from .utils import (console_out, format_float, format_time, parallel_map,
                    spawn_seeds)


logger = logging.getLogger(__name__)

DESK_SCALE = (1000, 1100)
PAPER_SCALE = (4000, 4100)
DURATION_PADDING = 100

EXAMPLE1_VARIANTS = {
    "single_at_4_3": ((4.0, 3.0), ),
    "single_at_12_10": ((12.0, 10.0), ),
    "two_sources": ((4.0, 3.0), (12.0, 10.0)),
}
EXAMPLE1_SENSORS = 40
EXAMPLE1_ATTENUATION_ORDER = 2
EXAMPLE1_MAX_GENERATIONS = 5
EXAMPLE2_CENTERS = ((15.0, 5.0), (2.0, 15.0), (5.0, 28.0))
EXAMPLE2_PER_ARRAY = 25
EXAMPLE2_SOURCE = (35.0, 25.0)
EXAMPLE2_ATTENUATION_ORDER = 1
EXAMPLE2_MAX_GENERATIONS = 20
EXAMPLE2_DEFAULT_SYNC_MS = 0.5

METHOD_FULL = "full"
METHOD_DELAY_ONLY = "delay-only"
SWEEP_DURATION = "duration"
SWEEP_SNR = "snr"
SWEEP_SYNC = "sync_std"
SWEEP_VARIABLES = (SWEEP_DURATION, SWEEP_SNR, SWEEP_SYNC)
AGGREGATIONS = ("mean", "median", "rms")
DEFAULT_AGGREGATION = "rms"

RESULT_CSV_HEADER = ("source", "x_true", "y_true", "x_est", "y_est", "error")
SWEEP_CSV_HEADER = ("variable", "value", "method", "trials", "failures",
                    "error", "sqrt_crlb")
SURFACE_CSV_HEADER = ("x", "y", "cost")


experiment_result_fields = ("scenario_hash", "method", "params",
                            "true_positions", "cost", "lma_reason",
                            "de_generations", "lma_iterations", "trace",
                            "wall_time", "seeds")
ExperimentResultBase = collections.namedtuple("ExperimentResultBase",
                                              experiment_result_fields)


class ExperimentResult(ExperimentResultBase):

    """Outcome of one localization run.

    Attributes
    ----------
    scenario_hash : str
        SHA-256 of the canonical Scenario JSON.
    method : str
        `'full'` or `'delay-only'`.
    params : ParamVector
        Final estimate.
    true_positions : np.ndarray
        (N, 2) ground truth.
    cost : float
    lma_reason : str
    de_generations, lma_iterations : int
    trace : OptimizerTrace
    wall_time : float
        Seconds; excluded from the JSON document unless requested.
    seeds : dict
        Noise, DE and source waveform seeds.

    """

    __slots__ = ()

    @property
    def estimated_positions(self):
        return self.params.positions

    @property
    def errors(self):
        """Euclidean localization error of every source (meters)."""
        difference = self.estimated_positions - self.true_positions
        return np.hypot(difference[:, 0], difference[:, 1])

    def to_dict(self, timing=False):
        data = {
            "scenario_hash": self.scenario_hash,
            "method": self.method,
            "names": self.params.layout.names,
            "theta": self.params.to_array().tolist(),
            "estimated_positions": self.estimated_positions.tolist(),
            "true_positions": self.true_positions.tolist(),
            "errors": self.errors.tolist(),
            "cost": self.cost,
            "lma_reason": self.lma_reason,
            "de_generations": self.de_generations,
            "lma_iterations": self.lma_iterations,
            "trace_length": len(self.trace),
            "seeds": self.seeds,
        }
        if timing:
            data["wall_time"] = self.wall_time
        return data

    def to_rows(self):
        rows = [list(RESULT_CSV_HEADER)]
        for n, error in enumerate(self.errors):
            rows.append([str(n)] + [format_float(value) for value in (
                *self.true_positions[n], *self.estimated_positions[n],
                error)])
        return rows


sweep_spec_fields = ("variable", "grid", "trials", "aggregation",
                     "baseline")
SweepSpecBase = collections.namedtuple("SweepSpecBase", sweep_spec_fields)


class SweepSpec(SweepSpecBase):

    """Monte-Carlo sweep definition.

    Attributes
    ----------
    variable : str
        `'duration'` (seconds), `'snr'` (dB) or `'sync_std'` (seconds).
    grid : tuple of float
        Values of the swept variable.
    trials : int
        Noise realizations per grid value.
    aggregation : str
        `'mean'`, `'median'` or `'rms'` over trials.
    baseline : bool
        Also run the delay-only baseline on every realization.

    """

    __slots__ = ()

    def __new__(cls, variable, grid, trials=1, aggregation=DEFAULT_AGGREGATION,
                baseline=True):
        if variable not in SWEEP_VARIABLES:
            msg = (f"Sweep variable must be one of {SWEEP_VARIABLES}, "
                   f"got {variable!r}.")
            raise ConfigError(msg)
        grid = tuple(float(value) for value in grid)
        if not grid:
            msg = "Sweep grid must not be empty."
            raise ConfigError(msg)
        if int(trials) < 1:
            msg = f"Number of trials must be at least one, got {trials}."
            raise ConfigError(msg)
        if aggregation not in AGGREGATIONS:
            msg = (f"Aggregation must be one of {AGGREGATIONS}, got "
                   f"{aggregation!r}.")
            raise ConfigError(msg)
        return super().__new__(cls, variable, grid, int(trials), aggregation,
                               bool(baseline))


sweep_row_fields = ("variable", "value", "method", "trials", "failures",
                    "error", "sqrt_crlb")
SweepRow = collections.namedtuple("SweepRow", sweep_row_fields)


class SweepTable:

    """Rows of a sweep, one per (grid value, method)."""

    def __init__(self, rows=None):
        self.rows = list(rows or [])

    def __len__(self):
        return len(self.rows)

    def __iter__(self):
        return iter(self.rows)

    def method(self, method):
        return [row for row in self.rows if row.method == method]

    def to_rows(self):
        return [list(SWEEP_CSV_HEADER)] + [
            [row.variable, format_float(row.value), row.method,
             str(row.trials), str(row.failures), format_float(row.error),
             format_float(row.sqrt_crlb)]
            for row in self.rows]

    def to_list(self):
        return [dict(row._asdict()) for row in self.rows]


def with_scale(scenario, paper_scale):
    """Scenario with the desk or paper (n_t, n_f) sizes."""
    number_time_samples, number_frequency_bins = (PAPER_SCALE if paper_scale
                                                  else DESK_SCALE)
    signal = scenario.signal.replace(
        number_time_samples=number_time_samples,
        number_frequency_bins=number_frequency_bins)
    return scenario.replace(signal=signal)


def example1_scenario(variant="single_at_12_10", *, paper_scale=False,
                      seed=0):
    """Spiral array of 40 sensors around (4, 4), 500 +/- 100 Hz at 20 dB.

    Raises
    ------
    ConfigError
        If `variant` is unknown.

    """
    if variant not in EXAMPLE1_VARIANTS:
        msg = (f"Unknown example 1 variant {variant!r}; choose from "
               f"{sorted(EXAMPLE1_VARIANTS)}.")
        raise ConfigError(msg)
    sources = [SourceSpec(position, seed=n + 1)
               for n, position in enumerate(EXAMPLE1_VARIANTS[variant])]
    scenario = Scenario(
        array=spiral_array(EXAMPLE1_SENSORS),
        sources=sources,
        noise_seed=seed,
        attenuation_order=EXAMPLE1_ATTENUATION_ORDER,
        de=DEConfig(max_generations=EXAMPLE1_MAX_GENERATIONS, seed=seed),
    )
    return with_scale(scenario, paper_scale)


def example2_scenario(sync_std_ms=EXAMPLE2_DEFAULT_SYNC_MS, multipath=False,
                      *, paper_scale=False, seed=0):
    """Three circular clusters of 25 sensors and one source at (35, 25).

    With `multipath` the data contain the default three-tap channels and one
    (gain, delay) pair per cluster is estimated.

    """
    array = circular_arrays(EXAMPLE2_CENTERS, EXAMPLE2_PER_ARRAY)
    channels = (MultipathChannel.default_profile(array.number_clusters, 1)
                if multipath else MultipathChannel())
    scenario = Scenario(
        array=array,
        sources=[SourceSpec(EXAMPLE2_SOURCE, seed=1)],
        channels=channels,
        noise_seed=seed,
        attenuation_order=EXAMPLE2_ATTENUATION_ORDER,
        multipath_paths=1 if multipath else 0,
        de=DEConfig(max_generations=EXAMPLE2_MAX_GENERATIONS, seed=seed),
    )
    signal = scenario.signal.replace(sync_error_std=sync_std_ms / 1000.0)
    return with_scale(scenario.replace(signal=signal), paper_scale)


def _scenario_data(scenario, data):
    if data is None:
        data, _ = synthesize(scenario)
    if data.number_sensors != scenario.number_sensors:
        msg = (f"Data hold {data.number_sensors} sensors but the scenario "
               f"has {scenario.number_sensors}.")
        raise ConfigError(msg)
    if data.number_frequency_bins != scenario.signal.number_frequency_bins:
        msg = (f"Data use {data.number_frequency_bins} frequency bins but "
               f"the scenario uses "
               f"{scenario.signal.number_frequency_bins}.")
        raise ConfigError(msg)
    return data


def localize(scenario, data=None, *, delay_only=False, settings=None):
    """Run the hybrid optimizer on one data set.

    Args
    ----
    scenario : Scenario
    data : SpectrumData, optional
        Synthesized from the scenario when omitted.
    delay_only : bool, optional (default `False`)
    settings : Settings, optional

    Returns
    -------
    ExperimentResult

    """
    settings = Settings() if settings is None else settings
    start = time.perf_counter()
    data = _scenario_data(scenario, data)
    result = hybrid_minimize(scenario, data, settings=settings,
                             delay_only=delay_only)
    wall_time = time.perf_counter() - start
    if settings.console_out_progress:
        console_out(f"Localization took {format_time(wall_time)}.")
    seeds = {"noise_seed": scenario.noise_seed,
             "de_seed": scenario.de.seed,
             "source_seeds": [source.seed for source in scenario.sources]}
    return ExperimentResult(
        scenario_hash(scenario),
        METHOD_DELAY_ONLY if delay_only else METHOD_FULL,
        result.params,
        scenario.source_positions,
        result.cost,
        result.lma.reason,
        result.de.generations,
        result.lma.iterations,
        result.trace,
        wall_time,
        seeds,
    )


def run_example1(variant="single_at_12_10", *, paper_scale=True, seed=0,
                 settings=None):
    """Spiral-array experiment (paper scale unless told otherwise)."""
    settings = Settings() if settings is None else settings
    if settings.console_out_progress:
        console_out(f"Example 1: {variant}", heading=True)
    scenario = example1_scenario(variant, paper_scale=paper_scale, seed=seed)
    return localize(scenario, settings=settings)


def run_example2(sync_std_ms=EXAMPLE2_DEFAULT_SYNC_MS, multipath=False, *,
                 paper_scale=False, seed=0, settings=None):
    """Clustered sensor network experiment with jitter and multipath."""
    settings = Settings() if settings is None else settings
    if settings.console_out_progress:
        console_out(f"Example 2: sync error {sync_std_ms} ms, multipath "
                    f"{'on' if multipath else 'off'}", heading=True)
    scenario = example2_scenario(sync_std_ms, multipath,
                                 paper_scale=paper_scale, seed=seed)
    return localize(scenario, settings=settings)


def apply_sweep_value(scenario, variable, value):
    """Scenario with the swept variable set to `value`."""
    signal = scenario.signal
    if variable == SWEEP_DURATION:
        number_time_samples = int(round(value * signal.sample_rate))
        signal = signal.replace(
            number_time_samples=number_time_samples,
            number_frequency_bins=number_time_samples + DURATION_PADDING)
    elif variable == SWEEP_SNR:
        signal = signal.replace(snr_db=value)
    else:
        signal = signal.replace(sync_error_std=value)
    return scenario.replace(signal=signal)


def _aggregate(errors, aggregation):
    errors = np.asarray(errors, dtype=float)
    if errors.size == 0:
        return np.nan
    if aggregation == "mean":
        return float(np.mean(errors))
    if aggregation == "median":
        return float(np.median(errors))
    return float(np.sqrt(np.mean(errors ** 2)))


def _position_bound(scenario, settings):
    if scenario.signal.snr_db is None:
        return 0.0
    try:
        bounds = source_bounds(scenario, settings=settings)
    except TRIAL_ERRORS as error:
        logger.warning("CRLB evaluation failed: %s", error)
        return np.nan
    return float(np.mean(np.sqrt(np.sum(bounds.variances, axis=1))))


def run_sweep(spec, scenario, *, settings=None):
    """Monte-Carlo localization error over a grid of one variable.

    Every trial draws a new noise realization and DE seed derived from the
    scenario's noise seed; the full method and (optionally) the delay-only
    baseline see the same data. Trial errors are averaged over sources and
    aggregated over trials. Failed trials are counted, not raised.

    Returns
    -------
    SweepTable

    """
    settings = Settings() if settings is None else settings
    trial_settings = Settings(console_out_progress=False, number_workers=1,
                              band_mask=settings.band_mask,
                              fisher_convention=settings.fisher_convention,
                              record_trace=False)
    methods = (METHOD_FULL, METHOD_DELAY_ONLY) if spec.baseline else (
        METHOD_FULL, )
    seeds = spawn_seeds(scenario.noise_seed, spec.trials)
    table = SweepTable()
    for value in spec.grid:
        point = apply_sweep_value(scenario, spec.variable, value)

        def run_trial(seed, point=point):
            de = DEConfig.from_dict({**point.de.to_dict(), "seed": seed})
            trial = point.replace(noise_seed=seed, de=de)
            data, _ = synthesize(trial)
            errors = {}
            for method in methods:
                try:
                    result = localize(trial, data,
                                      delay_only=method == METHOD_DELAY_ONLY,
                                      settings=trial_settings)
                except TRIAL_ERRORS as error:
                    logger.warning("Sweep trial (%s=%g, seed %d, %s) "
                                   "failed: %s", spec.variable, value, seed,
                                   method, error)
                    errors[method] = None
                else:
                    errors[method] = float(np.mean(result.errors))
            return errors

        outcomes = parallel_map(run_trial, seeds, settings.number_workers)
        bound = _position_bound(point, trial_settings)
        for method in methods:
            errors = [outcome[method] for outcome in outcomes
                      if outcome[method] is not None]
            table.rows.append(SweepRow(
                spec.variable, value, method, spec.trials,
                spec.trials - len(errors),
                _aggregate(errors, spec.aggregation), bound))
        if settings.console_out_progress:
            console_out(f"{spec.variable}={value:g}: " + ", ".join(
                f"{row.method} {row.error:.4g}"
                for row in table.rows[-len(methods):]))
    return table


cost_surface_fields = ("x_grid", "y_grid", "cost", "source",
                       "true_position")
CostSurfaceBase = collections.namedtuple("CostSurfaceBase",
                                         cost_surface_fields)


class CostSurface(CostSurfaceBase):

    """Projection cost over a grid of positions of one source.

    Attributes
    ----------
    x_grid, y_grid : np.ndarray
        Grid coordinates in meters.
    cost : np.ndarray
        (len(y_grid), len(x_grid)) costs. NaN where the model is undefined,
        for example on top of a sensor.
    source : int
        Index of the moved source.
    true_position : np.ndarray

    """

    __slots__ = ()

    @property
    def minimum(self):
        """Grid point (x, y) with the smallest finite cost.

        Raises
        ------
        NumericalFailureError
            If the cost is undefined at every grid point.

        """
        if not np.any(np.isfinite(self.cost)):
            msg = "The cost is undefined at every grid point."
            raise NumericalFailureError(msg)
        row, column = np.unravel_index(np.nanargmin(self.cost),
                                       self.cost.shape)
        return np.array([self.x_grid[column], self.y_grid[row]])

    def to_dict(self):
        return {
            "source": self.source,
            "true_position": self.true_position.tolist(),
            "x_grid": self.x_grid.tolist(),
            "y_grid": self.y_grid.tolist(),
            "cost": [[float(value) if np.isfinite(value) else None
                      for value in row] for row in self.cost],
        }

    def to_rows(self):
        rows = [list(SURFACE_CSV_HEADER)]
        for row, y in enumerate(self.y_grid):
            rows += [[format_float(x), format_float(y),
                      format_float(self.cost[row, column])]
                     for column, x in enumerate(self.x_grid)]
        return rows


def _surface_grid(values, name):
    values = np.asarray(values, dtype=float).ravel()
    if values.size == 0 or not np.all(np.isfinite(values)):
        msg = f"`{name}` must be a non-empty grid of finite values."
        raise ConfigError(msg)
    return values


def cost_surface(scenario, x_grid, y_grid, *, source=0, data=None,
                 settings=None):
    """Projection cost as one source moves over a grid of positions.

    Attenuation coefficients and multipath parameters are held at their
    reference values for the true propagation, and every other source stays
    at its true position, so the surface is the cost under a known
    attenuation model.

    Args
    ----
    scenario : Scenario
    x_grid, y_grid : array_like
        Grid coordinates in meters.
    source : int, optional (default 0)
        Index of the source moved over the grid.
    data : SpectrumData, optional
        Synthesized from the scenario when omitted.
    settings : Settings, optional

    Returns
    -------
    CostSurface

    Raises
    ------
    ConfigError
        If a grid is empty or not finite, or `source` is out of range.

    """
    settings = Settings() if settings is None else settings
    x_grid = _surface_grid(x_grid, "x_grid")
    y_grid = _surface_grid(y_grid, "y_grid")
    if not 0 <= source < scenario.number_sources:
        msg = (f"Source index {source} is out of range for "
               f"{scenario.number_sources} source(s).")
        raise ConfigError(msg)
    start = time.perf_counter()
    data = _scenario_data(scenario, data)
    model = SteeringModel.from_scenario(scenario,
                                        band_mask=settings.band_mask)
    params, _ = reference_parameters(scenario)

    def row_costs(y):
        costs = np.full(x_grid.size, np.nan)
        for column, x in enumerate(x_grid):
            positions = params.positions.copy()
            positions[source] = (x, y)
            theta = ParamVector(positions, params.beta, params.gamma,
                                params.delay, params.layout)
            try:
                _, costs[column] = residual(theta, data, model)
            except TRIAL_ERRORS as error:
                logger.debug("Cost undefined at (%g, %g): %s", x, y, error)
        return costs

    cost = np.array(parallel_map(row_costs, y_grid, settings.number_workers))
    if settings.console_out_progress:
        console_out(f"Cost surface over {cost.size} points took "
                    f"{format_time(time.perf_counter() - start)}.")
    return CostSurface(x_grid, y_grid, cost, int(source),
                       scenario.source_positions[source].copy())


def _infer_format(path, fmt):
    if fmt is None:
        suffix = str(path).rsplit(".", 1)[-1].lower()
        fmt = suffix if suffix in ("csv", "json") else None
    if fmt not in ("csv", "json"):
        msg = (f"Cannot infer the export format of '{path}'; use a `.csv` or "
               f"`.json` suffix or pass `fmt`.")
        raise ConfigError(msg)
    return fmt


def _csv_text(rows):
    buffer = io.StringIO()
    csv.writer(buffer, lineterminator="\n").writerows(rows)
    return buffer.getvalue()


def _crlb_rows(rows):
    return [list(CRLBRow._fields)] + [
        [format_float(row.snr_db), str(row.source), format_float(row.var_x),
         format_float(row.var_y)] for row in rows]


def _trace_dict(trace):
    return {"names": trace.names,
            "records": [{"phase": record.phase,
                         "iter": record.iteration,
                         "cost": record.cost,
                         "damping": record.damping,
                         "accepted": record.accepted,
                         "theta": record.theta.tolist()}
                        for record in trace]}


def export(item, path, fmt=None, *, timing=False):
    """Write a result, trace, sweep table, cost surface or CRLB table.

    Output is byte-stable for identical inputs: CSV floats use 17 significant
    digits and JSON keys are sorted.

    Raises
    ------
    OSError
        With the path in the message, if the file cannot be written.

    """
    fmt = _infer_format(path, fmt)
    if isinstance(item, ExperimentResult):
        data = item.to_dict(timing=timing)
        rows = item.to_rows()
    elif isinstance(item, OptimizerTrace):
        data = _trace_dict(item)
        rows = item.to_rows()
    elif isinstance(item, SweepTable):
        data = item.to_list()
        rows = item.to_rows()
    elif isinstance(item, CostSurface):
        data = item.to_dict()
        rows = item.to_rows()
    elif isinstance(item, (list, tuple)) and all(
            isinstance(row, CRLBRow) for row in item):
        data = [dict(row._asdict()) for row in item]
        rows = _crlb_rows(item)
    else:
        msg = f"Cannot export object of type {type(item).__name__}."
        raise TypeError(msg)
    text = (json.dumps(data, indent=2, sort_keys=True) + "\n"
            if fmt == "json" else _csv_text(rows))
    try:
        with open(path, "w", newline="") as file:
            file.write(text)
    except OSError as error:
        msg = f"Could not export to '{path}': {error.strerror}"
        raise OSError(error.errno, msg) from error


def import_trace(path):
    """Read a trace CSV written by :func:`export`."""
    return OptimizerTrace.from_csv(path)
