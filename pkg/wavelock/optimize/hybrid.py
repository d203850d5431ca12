"""Sequential DE -> LMA hybrid localization.

DE explores the configured box for a fixed number of generations (or until
it stagnates) and its best member initializes the Levenberg-Marquardt
refinement. Both phases are recorded in one trace.

"""


__all__ = ["LocalizationObjective", "HybridResult", "hybrid_minimize"]


import collections

import numpy as np

from ..cost import ParamVector, SteeringModel, project
from ..sensitivity import residual_jacobian
from ..settings import Settings
from ..utils import console_out
from .differential_evolution import differential_evolution
from .levenberg_marquardt import lma_minimize
from .trace import OptimizerTrace


class LocalizationObjective:

    """Cost, real residual and real Jacobian of one data set.

    The factorization of the last residual evaluation is cached so the
    Jacobian at the same parameters reuses it. :meth:`cost` never touches the
    cache and is safe to call from several threads.

    """

    def __init__(self, model, data):
        self.model = model
        self.spectra = model.select(data)
        self._cached_theta = None
        self._cached_projection = None

    @property
    def layout(self):
        return self.model.layout

    def _project(self, theta):
        return project(self.model.build_K_tilde(theta), self.spectra,
                       self.model.bins)

    def cost(self, theta):
        return self._project(theta).cost

    def projection(self, theta):
        theta = np.asarray(theta, dtype=float)
        if (self._cached_theta is None
                or not np.array_equal(theta, self._cached_theta)):
            self._cached_projection = self._project(theta)
            self._cached_theta = theta.copy()
        return self._cached_projection

    def residual(self, theta):
        """[Re Q; Im Q] stacked bin by bin."""
        q = self.projection(theta).residual.ravel()
        return np.concatenate((q.real, q.imag))

    def jacobian(self, theta):
        """Real embedding [Re dQ; Im dQ] of the residual Jacobian."""
        derivative = residual_jacobian(self.model, theta,
                                       self.projection(theta))
        columns = derivative.reshape(derivative.shape[0], -1).T
        return np.concatenate((columns.real, columns.imag))


hybrid_result_fields = ("params", "cost", "de", "lma", "trace")
HybridResult = collections.namedtuple("HybridResult", hybrid_result_fields)
HybridResult.__doc__ = """Outcome of :func:`hybrid_minimize`.

Attributes
----------
params : ParamVector
    Decoded final estimate.
cost : float
de : DEResult
lma : LMAResult
trace : OptimizerTrace
    DE generations followed by LMA iterations.
"""


def hybrid_minimize(scenario, data, de_cfg=None, lma_cfg=None, *,
                    settings=None, delay_only=False, model=None):
    """Localize the sources of `scenario` from `data`.

    Args
    ----
    scenario : Scenario
    data : SpectrumData
    de_cfg : DEConfig, optional
        Defaults to `scenario.de`.
    lma_cfg : LMAConfig, optional
        Defaults to `scenario.lma`.
    settings : Settings, optional
    delay_only : bool, optional (default `False`)
        Fit the time-delay-only baseline model instead of the full model.
    model : SteeringModel, optional
        Overrides the model built from the scenario and settings.

    Returns
    -------
    HybridResult

    """
    settings = Settings() if settings is None else settings
    de_cfg = scenario.de if de_cfg is None else de_cfg
    lma_cfg = scenario.lma if lma_cfg is None else lma_cfg
    if model is None:
        model = SteeringModel.from_scenario(scenario,
                                            band_mask=settings.band_mask,
                                            delay_only=delay_only)
    objective = LocalizationObjective(model, data)
    names = model.layout.names
    trace = OptimizerTrace(names, enabled=settings.record_trace)
    lower, upper = de_cfg.box(model.layout)
    verbose = settings.console_out_progress

    if verbose:
        console_out("Differential evolution", subheading=True)
    de_result = differential_evolution(objective.cost, lower, upper, de_cfg,
                                       number_workers=settings.number_workers,
                                       names=names, trace=trace,
                                       console_out_progress=verbose)
    if verbose:
        console_out("Levenberg-Marquardt refinement", subheading=True)
    lma_result = lma_minimize(de_result.best, objective.residual,
                              objective.jacobian, lma_cfg, names=names,
                              trace=trace, console_out_progress=verbose)
    if verbose:
        console_out(f"Finished: {lma_result.reason}, cost "
                    f"{lma_result.cost:.6e}", trailing_blank_line=True)
    params = ParamVector.from_array(lma_result.theta, model.layout)
    return HybridResult(params, lma_result.cost, de_result, lma_result, trace)
