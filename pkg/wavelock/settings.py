"""Settings for the Wavelock package.

This module contains the optimizer configurations (:class:`DEConfig`,
:class:`LMAConfig`) and the run-level :class:`Settings`. All attributes are
validated on assignment using :mod:`pyproprop` processed properties.

Attributes
----------
DEFAULT_POSITION_BOUNDS : tuple of float
    DE search interval (meters) applied to every source coordinate.
DEFAULT_BETA_BOUNDS : tuple of float
    DE search interval for the attenuation coefficients.
DEFAULT_GAMMA_BOUNDS : tuple of float
    DE search interval for multipath gains.
DEFAULT_DELAY_BOUNDS : tuple of float
    DE search interval (samples) for multipath delays.

"""


__all__ = ["DEConfig", "LMAConfig", "Settings"]


import numpy as np
from pyproprop import Options, processed_property

from .errors import ConfigError
from .utils import number_workers_from_environment


# Differential evolution
DEFAULT_POPULATION_SIZE = 40
DEFAULT_AMPLIFICATION = 0.8
DEFAULT_CROSSOVER = 1.0
DEFAULT_MAX_GENERATIONS = 5
DEFAULT_DE_SEED = 0
DEFAULT_STAGNATION_GENERATIONS = 5
DEFAULT_STAGNATION_TOLERANCE = 1e-12
DEFAULT_POSITION_BOUNDS = (0.0, 40.0)
DEFAULT_BETA_BOUNDS = (-100.0, 100.0)
DEFAULT_GAMMA_BOUNDS = (0.0, 1.0)
DEFAULT_DELAY_BOUNDS = (0.0, 400.0)

# Levenberg-Marquardt
DEFAULT_INITIAL_DAMPING = 1e-3
DEFAULT_GRADIENT_TOLERANCE = 1e-10
DEFAULT_STEP_TOLERANCE = 1e-10
DEFAULT_MAX_LMA_ITERATIONS = 100
DEFAULT_SCALED_DAMPING = False

# Run level
BAND_ALL = "all"
BAND_SIGNAL = "signal"
BAND_MASK_OPTIONS = (BAND_ALL, BAND_SIGNAL)
BAND_MASKS = Options(BAND_MASK_OPTIONS, default=BAND_ALL)
FISHER_PAPER = "paper"
FISHER_COMPLEX = "complex"
FISHER_CONVENTION_OPTIONS = (FISHER_PAPER, FISHER_COMPLEX)
FISHER_CONVENTIONS = Options(FISHER_CONVENTION_OPTIONS,
                             default=FISHER_PAPER)
DEFAULT_CONSOLE_OUT_PROGRESS = True
DEFAULT_RECORD_TRACE = True


def _parse_interval(interval, name):
    try:
        lower, upper = (float(value) for value in interval)
    except (TypeError, ValueError):
        msg = (f"`{name}` must be a (lower, upper) pair of numbers, got "
               f"{interval!r}.")
        raise ConfigError(msg)
    if not (np.isfinite(lower) and np.isfinite(upper)) or lower > upper:
        msg = (f"`{name}` must be finite with lower <= upper, got "
               f"({lower}, {upper}).")
        raise ConfigError(msg)
    return (lower, upper)


class DEConfig:

    """Configuration of the DE/rand/1/bin global search.

    Attributes
    ----------
    population_size : int
        Number of population members N_P. At least four members are needed so
        that three distinct partners exist for every mutation.
    amplification : float
        Difference vector amplification F in [0, 2].
    crossover : float
        Binomial crossover constant C_R in [0, 1].
    max_generations : int
        Maximum number of generations G_max. Zero skips the global search.
    seed : int
        Seed of the random generator driving initialization, mutation and
        crossover.
    stagnation_generations : int
        Number of consecutive generations with a relative best-cost
        improvement below `stagnation_tolerance` after which DE stops early.
    stagnation_tolerance : float
        Relative improvement regarded as stagnation.
    position_bounds, beta_bounds, gamma_bounds, delay_bounds : tuple
        Per-class search intervals used to build the box for a layout.
    bounds : tuple of arrays or None
        Explicit per-parameter (lower, upper) box overriding the per-class
        intervals. Must match the layout length.

    """

    population_size = processed_property(
        "population_size",
        description="DE population size",
        type=int,
        cast=True,
        min=4,
    )
    amplification = processed_property(
        "amplification",
        description="DE difference vector amplification",
        type=float,
        cast=True,
        min=0.0,
        max=2.0,
    )
    crossover = processed_property(
        "crossover",
        description="DE crossover constant",
        type=float,
        cast=True,
        min=0.0,
        max=1.0,
    )
    max_generations = processed_property(
        "max_generations",
        description="maximum number of DE generations",
        type=int,
        cast=True,
        min=0,
    )
    seed = processed_property(
        "seed",
        description="DE random seed",
        type=int,
        cast=True,
        min=0,
    )
    stagnation_generations = processed_property(
        "stagnation_generations",
        description="generations without improvement before stopping DE",
        type=int,
        cast=True,
        min=1,
    )
    stagnation_tolerance = processed_property(
        "stagnation_tolerance",
        description="relative improvement regarded as DE stagnation",
        type=float,
        cast=True,
        min=0.0,
    )

    def __init__(self,
                 *,
                 population_size=DEFAULT_POPULATION_SIZE,
                 amplification=DEFAULT_AMPLIFICATION,
                 crossover=DEFAULT_CROSSOVER,
                 max_generations=DEFAULT_MAX_GENERATIONS,
                 seed=DEFAULT_DE_SEED,
                 stagnation_generations=DEFAULT_STAGNATION_GENERATIONS,
                 stagnation_tolerance=DEFAULT_STAGNATION_TOLERANCE,
                 position_bounds=DEFAULT_POSITION_BOUNDS,
                 beta_bounds=DEFAULT_BETA_BOUNDS,
                 gamma_bounds=DEFAULT_GAMMA_BOUNDS,
                 delay_bounds=DEFAULT_DELAY_BOUNDS,
                 bounds=None,
                 ):
        self.population_size = population_size
        self.amplification = amplification
        self.crossover = crossover
        self.max_generations = max_generations
        self.seed = seed
        self.stagnation_generations = stagnation_generations
        self.stagnation_tolerance = stagnation_tolerance
        self.position_bounds = position_bounds
        self.beta_bounds = beta_bounds
        self.gamma_bounds = gamma_bounds
        self.delay_bounds = delay_bounds
        self.bounds = bounds

    @property
    def position_bounds(self):
        return self._position_bounds

    @position_bounds.setter
    def position_bounds(self, interval):
        self._position_bounds = _parse_interval(interval, "position_bounds")

    @property
    def beta_bounds(self):
        return self._beta_bounds

    @beta_bounds.setter
    def beta_bounds(self, interval):
        self._beta_bounds = _parse_interval(interval, "beta_bounds")

    @property
    def gamma_bounds(self):
        return self._gamma_bounds

    @gamma_bounds.setter
    def gamma_bounds(self, interval):
        self._gamma_bounds = _parse_interval(interval, "gamma_bounds")

    @property
    def delay_bounds(self):
        return self._delay_bounds

    @delay_bounds.setter
    def delay_bounds(self, interval):
        self._delay_bounds = _parse_interval(interval, "delay_bounds")

    @property
    def bounds(self):
        return self._bounds

    @bounds.setter
    def bounds(self, bounds):
        if bounds is None:
            self._bounds = None
            return
        lower, upper = (np.array(side, dtype=float) for side in bounds)
        if lower.shape != upper.shape or lower.ndim != 1:
            msg = "Explicit DE bounds must be two 1D arrays of equal length."
            raise ConfigError(msg)
        if not (np.all(np.isfinite(lower)) and np.all(np.isfinite(upper))):
            msg = "Explicit DE bounds must be finite."
            raise ConfigError(msg)
        if np.any(lower > upper):
            msg = "Explicit DE bounds must satisfy lower <= upper."
            raise ConfigError(msg)
        self._bounds = (lower, upper)

    def box(self, layout):
        """Return the (lower, upper) search box for a parameter layout.

        Raises
        ------
        ConfigError
            If explicit bounds were supplied whose length does not match the
            layout.

        """
        if self._bounds is not None:
            lower, upper = self._bounds
            if len(lower) != layout.size:
                msg = (f"Explicit DE bounds have length {len(lower)} but the "
                       f"parameter layout has {layout.size} entries.")
                raise ConfigError(msg)
            return lower.copy(), upper.copy()
        lower = np.empty(layout.size)
        upper = np.empty(layout.size)
        classes = (
            (layout.x_slice, self.position_bounds),
            (layout.y_slice, self.position_bounds),
            (layout.beta_slice, self.beta_bounds),
            (layout.gamma_slice, self.gamma_bounds),
            (layout.delay_slice, self.delay_bounds),
        )
        for param_slice, (lo, hi) in classes:
            lower[param_slice] = lo
            upper[param_slice] = hi
        return lower, upper

    def to_dict(self):
        data = {
            "population_size": self.population_size,
            "amplification": self.amplification,
            "crossover": self.crossover,
            "max_generations": self.max_generations,
            "seed": self.seed,
            "stagnation_generations": self.stagnation_generations,
            "stagnation_tolerance": self.stagnation_tolerance,
            "position_bounds": list(self.position_bounds),
            "beta_bounds": list(self.beta_bounds),
            "gamma_bounds": list(self.gamma_bounds),
            "delay_bounds": list(self.delay_bounds),
        }
        if self._bounds is not None:
            data["bounds"] = [side.tolist() for side in self._bounds]
        return data

    @classmethod
    def from_dict(cls, data):
        return cls(**dict(data or {}))

    def __repr__(self):
        cls_name = self.__class__.__name__
        return (f"{cls_name}(population_size={self.population_size}, "
                f"amplification={self.amplification}, "
                f"crossover={self.crossover}, "
                f"max_generations={self.max_generations}, seed={self.seed})")


class LMAConfig:

    """Configuration of the trust-region Levenberg-Marquardt refinement.

    Attributes
    ----------
    initial_damping : float
        Scale tau_0 of the first damping factor,
        lambda_0 = tau_0 * max(diag(J^T J)).
    gradient_tolerance : float
        Stop once the infinity norm of J^T r falls below this value.
    step_tolerance : float
        Stop once ||h|| < step_tolerance * (||theta|| + step_tolerance).
    max_iterations : int
        Maximum number of damped normal-equation solves.
    scaled_damping : bool
        Damp with lambda * diag(J^T J) instead of lambda * I.

    """

    initial_damping = processed_property(
        "initial_damping",
        description="initial LMA damping scale",
        type=float,
        cast=True,
        min=0.0,
        exclusive=True,
    )
    gradient_tolerance = processed_property(
        "gradient_tolerance",
        description="LMA gradient tolerance",
        type=float,
        cast=True,
        min=0.0,
        exclusive=True,
    )
    step_tolerance = processed_property(
        "step_tolerance",
        description="LMA step tolerance",
        type=float,
        cast=True,
        min=0.0,
        exclusive=True,
    )
    max_iterations = processed_property(
        "max_iterations",
        description="maximum number of LMA iterations",
        type=int,
        cast=True,
        min=1,
    )
    scaled_damping = processed_property(
        "scaled_damping",
        description="damp with the diagonal of the Gauss-Newton matrix",
        type=bool,
        cast=True,
    )

    def __init__(self,
                 *,
                 initial_damping=DEFAULT_INITIAL_DAMPING,
                 gradient_tolerance=DEFAULT_GRADIENT_TOLERANCE,
                 step_tolerance=DEFAULT_STEP_TOLERANCE,
                 max_iterations=DEFAULT_MAX_LMA_ITERATIONS,
                 scaled_damping=DEFAULT_SCALED_DAMPING,
                 ):
        self.initial_damping = initial_damping
        self.gradient_tolerance = gradient_tolerance
        self.step_tolerance = step_tolerance
        self.max_iterations = max_iterations
        self.scaled_damping = scaled_damping

    def to_dict(self):
        return {
            "initial_damping": self.initial_damping,
            "gradient_tolerance": self.gradient_tolerance,
            "step_tolerance": self.step_tolerance,
            "max_iterations": self.max_iterations,
            "scaled_damping": self.scaled_damping,
        }

    @classmethod
    def from_dict(cls, data):
        return cls(**dict(data or {}))

    def __repr__(self):
        cls_name = self.__class__.__name__
        return (f"{cls_name}(initial_damping={self.initial_damping}, "
                f"gradient_tolerance={self.gradient_tolerance}, "
                f"step_tolerance={self.step_tolerance}, "
                f"max_iterations={self.max_iterations})")


class Settings:

    """Run-level settings that do not belong to a scenario.

    Attributes
    ----------
    console_out_progress : bool
        Output optimizer progress to the console.
    number_workers : int
        Upper limit on the worker threads used for DE fitness evaluations and
        sweep trials. Defaults to `WAVELOCK_THREADS` when that is set.
    band_mask : str
        Which frequency bins enter the cost and the Fisher matrix: every bin
        0...n_f/2 (`'all'`) or only the bins inside the signal band
        (`'signal'`).
    fisher_convention : str
        `'paper'` scales the Fisher matrix by 1/(n_t sigma^2); `'complex'`
        uses the circular complex Gaussian factor 2/(n_t sigma^2).
    record_trace : bool
        Keep the full per-iteration optimizer trace.

    """

    band_mask = processed_property(
        "band_mask",
        description="frequency bin mask",
        type=str,
        cast=True,
        options=BAND_MASKS,
    )
    fisher_convention = processed_property(
        "fisher_convention",
        description="Fisher matrix scaling convention",
        type=str,
        cast=True,
        options=FISHER_CONVENTIONS,
    )
    number_workers = processed_property(
        "number_workers",
        description="maximum number of worker threads",
        type=int,
        cast=True,
        min=1,
    )
    console_out_progress = processed_property(
        "console_out_progress",
        description="output Wavelock progress to the console",
        type=bool,
        cast=True,
    )
    record_trace = processed_property(
        "record_trace",
        description="record the per-iteration optimizer trace",
        type=bool,
        cast=True,
    )

    def __init__(self,
                 *,
                 console_out_progress=DEFAULT_CONSOLE_OUT_PROGRESS,
                 number_workers=None,
                 band_mask=BAND_MASKS.default,
                 fisher_convention=FISHER_CONVENTIONS.default,
                 record_trace=DEFAULT_RECORD_TRACE,
                 ):
        if number_workers is None:
            number_workers = number_workers_from_environment()
        self.console_out_progress = console_out_progress
        self.number_workers = number_workers
        self.band_mask = band_mask
        self.fisher_convention = fisher_convention
        self.record_trace = record_trace

    def __repr__(self):
        cls_name = self.__class__.__name__
        return (f"{cls_name}(console_out_progress={self.console_out_progress}, "
                f"number_workers={self.number_workers}, "
                f"band_mask={self.band_mask!r}, "
                f"fisher_convention={self.fisher_convention!r})")
