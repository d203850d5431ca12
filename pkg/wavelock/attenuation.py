"""Normalized Laurent-polynomial attenuation model.

The gain of a source at distance rho from a sensor is

    alpha(rho) = rho^-1 + sum_{l=1}^{L} beta_l rho^(-l-1),

i.e. the leading inverse-distance term is fixed to one and only the L
coefficients beta are unknown. Fixing the leading term removes the joint
scaling of (beta, multipath gains) that leaves the localization cost
unchanged.

Attributes
----------
DEFAULT_TRUE_EXPONENT : float
    Exponent of the power law rho^-p used as ground truth by the simulator.

"""


__all__ = [
    "AttenuationModel",
    "evaluate",
    "true_model_eval",
    "d_evaluate_d_beta",
    "d_evaluate_d_rho",
    "fit_laurent",
]


import collections

import numpy as np
import scipy.linalg
from numpy.polynomial import polynomial

from .errors import AttenuationDomainError


DEFAULT_TRUE_EXPONENT = 1.25


def _check_distances(rho):
    rho = np.asarray(rho, dtype=float)
    if np.any(~(rho > 0)):
        msg = (f"Attenuation is only defined for strictly positive "
               f"distances, got minimum {np.min(rho)}.")
        raise AttenuationDomainError(msg)
    return rho


def _as_output(values):
    return float(values) if np.ndim(values) == 0 else values


attenuation_model_fields = ("coefficients", )
AttenuationModelBase = collections.namedtuple("AttenuationModelBase",
                                              attenuation_model_fields)


class AttenuationModel(AttenuationModelBase):

    """Coefficients beta_1...beta_L of the normalized Laurent form.

    An empty coefficient tuple (L = 0) is the pure inverse-distance law.

    """

    __slots__ = ()

    def __new__(cls, coefficients=()):
        coefficients = tuple(float(beta) for beta in np.ravel(coefficients))
        if not all(np.isfinite(beta) for beta in coefficients):
            msg = "Attenuation coefficients must be finite."
            raise ValueError(msg)
        return super().__new__(cls, coefficients)

    @property
    def order(self):
        return len(self.coefficients)

    @property
    def weights(self):
        """Weights [1, beta_1...beta_L] of the powers rho^-1...rho^-(L+1)."""
        return np.array((1.0, ) + self.coefficients)

    def __call__(self, rho):
        return evaluate(self, rho)


def evaluate(model, rho):
    """Gain alpha(rho) of the normalized Laurent model.

    Args
    ----
    model : AttenuationModel
    rho : float or np.ndarray
        Distances in meters.

    Returns
    -------
    float or np.ndarray
        Same shape as `rho`.

    Raises
    ------
    AttenuationDomainError
        If any distance is not strictly positive.

    """
    rho = _check_distances(rho)
    inverse_rho = 1.0 / rho
    return _as_output(inverse_rho * polynomial.polyval(inverse_rho,
                                                       model.weights))


def true_model_eval(rho, exponent=DEFAULT_TRUE_EXPONENT):
    """Ground-truth power-law gain rho^-exponent."""
    rho = _check_distances(rho)
    return _as_output(rho ** -float(exponent))


def d_evaluate_d_beta(model, rho, index):
    """Sensitivity of alpha(rho) to beta_index, i.e. rho^(-index-1).

    Raises
    ------
    IndexError
        If `index` is not in 1...L.

    """
    if not 1 <= index <= model.order:
        msg = (f"Coefficient index must be in 1...{model.order}, got "
               f"{index}.")
        raise IndexError(msg)
    rho = _check_distances(rho)
    return _as_output(rho ** (-index - 1.0))


def d_evaluate_d_rho(model, rho):
    """Derivative of alpha with respect to distance."""
    rho = _check_distances(rho)
    powers = np.arange(1, model.order + 2)
    terms = [-power * weight * rho ** (-power - 1.0)
             for power, weight in zip(powers, model.weights)]
    return _as_output(np.sum(terms, axis=0))


def fit_laurent(rho, gains, order):
    """Fit scale * alpha(rho) to a reference gain curve.

    The model is linear in (scale, scale * beta), so the fit is a single
    linear least-squares solve over the powers rho^-1...rho^-(order+1).
    Residuals are weighted by 1/gains so every distance contributes with a
    relative error.

    Returns
    -------
    AttenuationModel
        Normalized coefficients.
    float
        Fitted overall scale (gain of the rho^-1 term).

    Raises
    ------
    ValueError
        If fewer distances than unknowns are supplied or any gain is not
        positive.

    """
    rho = _check_distances(np.ravel(rho))
    gains = np.asarray(gains, dtype=float).ravel()
    if gains.shape != rho.shape:
        msg = "Distances and gains must have the same number of entries."
        raise ValueError(msg)
    if rho.size < order + 1:
        msg = (f"At least {order + 1} distances are needed to fit an order "
               f"{order} model, got {rho.size}.")
        raise ValueError(msg)
    if np.any(gains <= 0):
        msg = "Reference gains must be strictly positive."
        raise ValueError(msg)
    powers = np.arange(1, order + 2)
    design = rho[:, np.newaxis] ** -powers[np.newaxis, :]
    scaling = 1.0 / gains
    solution, _, _, _ = scipy.linalg.lstsq(design * scaling[:, np.newaxis],
                                           gains * scaling)
    scale = solution[0]
    if scale == 0:
        msg = "Fitted inverse-distance coefficient is zero."
        raise ValueError(msg)
    return AttenuationModel(solution[1:] / scale), float(scale)
