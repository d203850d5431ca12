"""Trust-region Levenberg-Marquardt for real least-squares residuals.

Minimizes ||r(theta)||^2 by solving the damped normal equations

    (J^T J + lambda D) h = -J^T r,

with D = I (default) or D = diag(J^T J). The damping follows the gain-ratio
update of Madsen, Nielsen and Tingleff: lambda_0 = tau_0 max(diag(J^T J)),
an accepted step (gain ratio > 0) scales lambda by
max(1/3, 1 - (2 rho - 1)^3) and resets nu = 2, a rejected step multiplies
lambda by nu and doubles nu.

"""


__all__ = ["LMAResult", "lma_step", "lma_minimize"]


import collections
import logging

import numpy as np
import scipy.linalg

from ..errors import NumericalFailureError
from ..settings import LMAConfig
from ..typing import ResidualFunctionType
from ..utils import console_out
from .trace import PHASE_LMA, OptimizerTrace, TraceRecord


logger = logging.getLogger(__name__)

MAX_DAMPING = 1e300
INITIAL_NU = 2.0
EVALUATION_ERRORS = (np.linalg.LinAlgError, ArithmeticError, ValueError)

REASON_GRADIENT = "gradient tolerance reached"
REASON_STEP = "step tolerance reached"
REASON_MAX_ITERATIONS = "maximum number of iterations reached"
REASON_DAMPING = "damping factor overflow"


lma_result_fields = ("theta", "cost", "iterations", "accepted_steps",
                     "reason", "trace")
LMAResult = collections.namedtuple("LMAResult", lma_result_fields)
LMAResult.__doc__ = """Outcome of :func:`lma_minimize`.

Attributes
----------
theta : np.ndarray
    Final (and best) iterate.
cost : float
    ||r(theta)||^2.
iterations : int
accepted_steps : int
reason : str
    Why the iteration stopped.
trace : OptimizerTrace
"""


def lma_step(normal_matrix, gradient, damping, scaling=None):
    """Solve (A + lambda D) h = -g for the step h.

    Raises
    ------
    numpy.linalg.LinAlgError
        If the damped matrix is not numerically positive definite.

    """
    scaling = np.ones(len(gradient)) if scaling is None else scaling
    damped = normal_matrix + damping * np.diag(scaling)
    return scipy.linalg.solve(damped, -gradient, assume_a="pos")


def _try_residual(residual_fn, theta):
    try:
        residual = np.asarray(residual_fn(theta), dtype=float)
    except EVALUATION_ERRORS as error:
        logger.debug("Residual evaluation failed: %s", error)
        return None, np.inf
    cost = float(residual @ residual)
    if not np.isfinite(cost):
        return None, np.inf
    return residual, cost


def lma_minimize(theta0, residual_fn: ResidualFunctionType,
                 jacobian_fn: ResidualFunctionType, config=None, *,
                 names=(), trace=None, console_out_progress=False):
    """Refine `theta0` by Levenberg-Marquardt iterations.

    Args
    ----
    theta0 : np.ndarray
        Initial iterate.
    residual_fn : callable
        Real residual vector r(theta).
    jacobian_fn : callable
        Real Jacobian dr/dtheta. Always called right after `residual_fn` at
        the same parameters, so it may reuse work cached by the residual.
    config : LMAConfig, optional
    names : iterable of str, optional
        Parameter names used for the trace.
    trace : OptimizerTrace, optional
    console_out_progress : bool, optional (default `False`)

    Returns
    -------
    LMAResult

    Raises
    ------
    NumericalFailureError
        If the residual is not finite at `theta0`.

    """
    config = LMAConfig() if config is None else config
    trace = OptimizerTrace(names) if trace is None else trace
    theta = np.array(theta0, dtype=float)
    residual, cost = _try_residual(residual_fn, theta)
    if residual is None:
        msg = "Residual is not finite at the initial parameters."
        raise NumericalFailureError(msg)
    jacobian = np.asarray(jacobian_fn(theta), dtype=float)
    normal_matrix = jacobian.T @ jacobian
    gradient = jacobian.T @ residual
    diagonal = np.diag(normal_matrix).copy()
    damping = config.initial_damping * max(float(np.max(diagonal)), 1.0e-300)
    nu = INITIAL_NU

    def scaling():
        if not config.scaled_damping:
            return None
        return np.where(diagonal > 0, diagonal, 1.0)

    trace.append(TraceRecord(PHASE_LMA, 0, cost, damping, True, theta))
    accepted_steps = 0
    iteration = 0
    reason = REASON_MAX_ITERATIONS
    if np.max(np.abs(gradient), initial=0.0) < config.gradient_tolerance:
        reason = REASON_GRADIENT
    else:
        for iteration in range(1, config.max_iterations + 1):
            try:
                step = lma_step(normal_matrix, gradient, damping, scaling())
            except (np.linalg.LinAlgError, ValueError):
                step = None
            if step is not None and np.linalg.norm(step) <= (
                    config.step_tolerance * (np.linalg.norm(theta)
                                             + config.step_tolerance)):
                reason = REASON_STEP
                break
            if step is None:
                new_residual, new_cost, gain_ratio = None, np.inf, -1.0
            else:
                new_residual, new_cost = _try_residual(residual_fn,
                                                       theta + step)
                scale = np.ones_like(step) if scaling() is None else scaling()
                predicted = step @ (damping * scale * step - gradient)
                if new_residual is None or not predicted > 0:
                    gain_ratio = -1.0
                else:
                    gain_ratio = (cost - new_cost) / predicted
            if gain_ratio > 0:
                theta = theta + step
                residual, cost = new_residual, new_cost
                jacobian = np.asarray(jacobian_fn(theta), dtype=float)
                normal_matrix = jacobian.T @ jacobian
                gradient = jacobian.T @ residual
                diagonal = np.diag(normal_matrix).copy()
                damping *= max(1.0 / 3.0, 1.0 - (2.0 * gain_ratio - 1.0) ** 3)
                nu = INITIAL_NU
                accepted_steps += 1
                trace.append(TraceRecord(PHASE_LMA, iteration, cost, damping,
                                         True, theta))
                if console_out_progress:
                    console_out(f"Iteration {iteration}: cost {cost:.6e}, "
                                f"damping {damping:.3e}")
                if np.max(np.abs(gradient)) < config.gradient_tolerance:
                    reason = REASON_GRADIENT
                    break
            else:
                damping *= nu
                nu *= 2.0
                trace.append(TraceRecord(PHASE_LMA, iteration, cost, damping,
                                         False, theta))
                if damping > MAX_DAMPING:
                    reason = REASON_DAMPING
                    logger.warning("LMA aborted at iteration %d: damping "
                                   "factor exceeded %g.", iteration,
                                   MAX_DAMPING)
                    break
    logger.debug("LMA finished after %d iterations (%s).", iteration, reason)
    return LMAResult(theta, cost, iteration, accepted_steps, reason, trace)
