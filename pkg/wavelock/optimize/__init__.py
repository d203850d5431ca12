"""Global search, local refinement and their sequential hybrid."""


from .differential_evolution import (DEResult, de_crossover, de_mutate,
                                     de_select, differential_evolution,
                                     reflect_into_box)
from .hybrid import HybridResult, LocalizationObjective, hybrid_minimize
from .levenberg_marquardt import LMAResult, lma_minimize, lma_step
from .trace import OptimizerTrace, TraceRecord
