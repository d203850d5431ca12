"""Fisher information and Cramer-Rao lower bounds for source positions.

The joint unknowns are the source spectra S(f) (real and imaginary parts of
every bin) and the model parameters theta. The noiseless model is
G(f) = K~(f) S(f) with noise covariance n_t sigma^2 I, so

    F = c / (n_t sigma^2) Re([dG/dvartheta]^H [dG/dvartheta]),

with c = 1 (default) or c = 2 for the circular complex Gaussian convention.
dG/dS(f) = K~(f) is block diagonal over bins, so the spectra are eliminated
bin by bin: the information left for theta is

    sum_f Re(D_f^H (I - Pi_f) D_f),    D_f = dK~(f)/dtheta S(f),

and its inverse equals the theta block of the full inverse.

"""


__all__ = [
    "FisherMatrix",
    "CRLBResult",
    "fisher",
    "crlb_positions",
    "reference_parameters",
    "source_bounds",
    "crlb_snr_table",
]


import collections
import logging

import numpy as np
import scipy.linalg

from .attenuation import fit_laurent, true_model_eval
from .cost import ParamVector, SteeringModel, project
from .errors import ConfigError
from .scene import distances
from .sensitivity import model_jacobian
from .settings import (FISHER_COMPLEX, FISHER_PAPER,
                       Settings)
from .synth import noise_variance_for_snr, synthesize


logger = logging.getLogger(__name__)

CONVENTION_FACTORS = {FISHER_PAPER: 1.0, FISHER_COMPLEX: 2.0}


fisher_matrix_fields = ("matrix", "names", "reduced")
FisherMatrixBase = collections.namedtuple("FisherMatrixBase",
                                          fisher_matrix_fields)


class FisherMatrix(FisherMatrixBase):

    """Real symmetric Fisher information matrix with named rows.

    Attributes
    ----------
    matrix : np.ndarray
        (P, P) information matrix.
    names : tuple of str
        Name of every row; positions are `x_n` and `y_n`.
    reduced : bool
        `True` when the source spectra have been eliminated (the matrix
        covers theta only), `False` for the dense joint matrix.

    """

    __slots__ = ()

    def __new__(cls, matrix, names, reduced=True):
        matrix = np.array(matrix, dtype=float)
        names = tuple(names)
        if matrix.ndim != 2 or matrix.shape != (len(names), len(names)):
            msg = (f"Fisher matrix of shape {matrix.shape} does not match "
                   f"{len(names)} names.")
            raise ValueError(msg)
        return super().__new__(cls, matrix, names, bool(reduced))

    @classmethod
    def from_dense(cls, matrix, names):
        return cls(matrix, names, reduced=False)

    def index(self, name):
        return self.names.index(name)

    def scaled(self, factor):
        return self.__class__(self.matrix * factor, self.names, self.reduced)


crlb_result_fields = ("variances", "null_directions")
CRLBResult = collections.namedtuple("CRLBResult", crlb_result_fields)
CRLBResult.__doc__ = """Position bounds extracted from a Fisher matrix.

Attributes
----------
variances : np.ndarray
    (N, 2) lower bounds on the variance of (x_n, y_n).
null_directions : tuple of str
    For every numerically null direction of the Fisher matrix, the name of
    its dominant parameter. Empty when the matrix is invertible.
"""


def _convention_factor(convention):
    if convention not in CONVENTION_FACTORS:
        msg = f"Unknown Fisher convention {convention!r}."
        raise ConfigError(msg)
    return CONVENTION_FACTORS[convention]


def _noise_scale(noise_variance, number_time_samples, convention):
    if not noise_variance > 0:
        msg = f"Noise variance must be positive, got {noise_variance}."
        raise ValueError(msg)
    return (_convention_factor(convention)
            / (number_time_samples * noise_variance))


def fisher(theta_true, source_spectra, scenario, noise_variance, *,
           settings=None, dense=False, model=None):
    """Fisher information about theta (spectra eliminated) or the dense form.

    Args
    ----
    theta_true : np.ndarray or ParamVector
        Parameters at which the information is evaluated.
    source_spectra : np.ndarray
        (N, n_f // 2 + 1) source spectra at the same scale as `theta_true`.
    scenario : Scenario
    noise_variance : float
        Time-domain noise variance sigma^2.
    settings : Settings, optional
        Band mask and scaling convention.
    dense : bool, optional (default `False`)
        Assemble the full joint matrix over [Re S, Im S, theta]. Only
        sensible for a handful of bins.
    model : SteeringModel, optional

    Returns
    -------
    FisherMatrix

    Raises
    ------
    SingularModelError
        If K~ is rank deficient at some bin.

    """
    settings = Settings() if settings is None else settings
    if model is None:
        model = SteeringModel.from_scenario(scenario,
                                            band_mask=settings.band_mask)
    scale = _noise_scale(noise_variance,
                         scenario.signal.number_time_samples,
                         settings.fisher_convention)
    spectra = np.asarray(source_spectra)[:, model.bins].T
    k_tilde = model.build_K_tilde(theta_true)
    derivative = model_jacobian(model, theta_true, spectra)
    if dense:
        return _dense_fisher(model, k_tilde, derivative, scale)
    projection = project(k_tilde, np.zeros(k_tilde.shape[:2], dtype=complex),
                         model.bins)
    orthogonal = derivative - projection.project(derivative)
    information = np.einsum("pfm,qfm->pq", derivative.conj(), orthogonal).real
    information = 0.5 * (information + information.T)
    return FisherMatrix(scale * information, model.layout.names)


def _dense_fisher(model, k_tilde, derivative, scale):
    number_bins, number_sensors, number_sources = k_tilde.shape
    number_rows = number_bins * number_sensors
    spectrum_columns = np.zeros((number_rows, number_bins * number_sources),
                                dtype=complex)
    names = []
    for f in range(number_bins):
        rows = slice(f * number_sensors, (f + 1) * number_sensors)
        cols = slice(f * number_sources, (f + 1) * number_sources)
        spectrum_columns[rows, cols] = k_tilde[f]
        names += [f"S_{n}_{model.bins[f]}" for n in range(number_sources)]
    columns = np.concatenate(
        (spectrum_columns, 1j * spectrum_columns,
         derivative.reshape(derivative.shape[0], -1).T), axis=1)
    names = ([f"re_{name}" for name in names]
             + [f"im_{name}" for name in names] + model.layout.names)
    information = (columns.conj().T @ columns).real
    information = 0.5 * (information + information.T)
    return FisherMatrix.from_dense(scale * information, names)


def crlb_positions(fisher_matrix):
    """Diagonal of the inverse Fisher matrix at the source positions.

    A singular matrix is pseudo-inverted and its null directions reported.

    """
    matrix = fisher_matrix.matrix
    eigenvalues, eigenvectors = scipy.linalg.eigh(matrix)
    largest = max(float(np.max(np.abs(eigenvalues), initial=0.0)), 1e-300)
    tolerance = matrix.shape[0] * np.finfo(float).eps * largest
    null = eigenvalues <= tolerance
    null_directions = tuple(
        fisher_matrix.names[int(np.argmax(np.abs(eigenvectors[:, k])))]
        for k in np.flatnonzero(null))
    if null_directions:
        logger.warning("Fisher matrix is singular; unidentifiable "
                       "directions dominated by %s.",
                       ", ".join(null_directions))
    inverse_eigenvalues = np.where(null, 0.0, 1.0 / np.where(null, 1.0,
                                                             eigenvalues))
    covariance = (eigenvectors * inverse_eigenvalues) @ eigenvectors.T
    number_sources = sum(name.startswith("x_") for name in fisher_matrix.names)
    variances = np.array([
        [covariance[fisher_matrix.index(f"x_{n}"),
                    fisher_matrix.index(f"x_{n}")],
         covariance[fisher_matrix.index(f"y_{n}"),
                    fisher_matrix.index(f"y_{n}")]]
        for n in range(number_sources)])
    return CRLBResult(variances, null_directions)


def reference_parameters(scenario):
    """Parameters of the estimation model closest to the true propagation.

    The true power law is fitted by the scenario's Laurent order over the
    sensor-source distances of the scenario; the fitted overall scale is
    absorbed into the source spectra. Each estimated multipath slot takes the
    strongest remaining true tap of its (cluster, source) pair.

    Returns
    -------
    ParamVector
    float
        Factor by which the true source spectra must be multiplied.

    """
    model = SteeringModel.from_scenario(scenario)
    layout = model.layout
    rho = distances(scenario.array.positions, scenario.source_positions)
    gains = true_model_eval(rho, scenario.true_attenuation_exponent)
    attenuation, scale = fit_laurent(rho, gains,
                                     scenario.attenuation_order)
    shape = (layout.number_clusters, layout.number_sources,
             layout.paths_per_key)
    gamma = np.zeros(shape)
    delay = np.zeros(shape)
    for cluster, source, path in layout.path_keys:
        taps = sorted(scenario.channels.taps_for(cluster, source),
                      key=lambda tap: -tap[0])
        if path < len(taps):
            gamma[cluster, source, path] = taps[path][0] / scale
            delay[cluster, source, path] = taps[path][1]
    params = ParamVector(scenario.source_positions, attenuation.coefficients,
                         gamma, delay, layout)
    return params, scale


def source_bounds(scenario, noise_variance=None, *, settings=None):
    """CRLB of every source position for a scenario.

    Args
    ----
    scenario : Scenario
    noise_variance : float, optional
        Defaults to the variance implied by the scenario's SNR.
    settings : Settings, optional

    Returns
    -------
    CRLBResult

    """
    data, sources = _noiseless_synthesis(scenario)
    if noise_variance is None:
        if scenario.signal.snr_db is None:
            msg = "A noise variance is needed for a noiseless scenario."
            raise ConfigError(msg)
        noise_variance = noise_variance_for_snr(data.spectra,
                                                scenario.signal,
                                                scenario.signal.snr_db)
    return _bounds_at(scenario, sources, noise_variance, settings)


def _noiseless_synthesis(scenario):
    noiseless = scenario.replace(
        signal=scenario.signal.replace(snr_db=None, sync_error_std=0.0))
    return synthesize(noiseless)


def _bounds_at(scenario, sources, noise_variance, settings):
    params, scale = reference_parameters(scenario)
    source_spectra = scale * np.array([source.half_spectrum
                                       for source in sources])
    information = fisher(params, source_spectra, scenario, noise_variance,
                         settings=settings)
    return crlb_positions(information)


crlb_row_fields = ("snr_db", "source", "var_x", "var_y")
CRLBRow = collections.namedtuple("CRLBRow", crlb_row_fields)


def crlb_snr_table(scenario, snr_grid, *, settings=None):
    """Position CRLBs over a grid of SNR values.

    The information is computed once at unit noise variance and rescaled,
    so the bounds scale exactly as sigma^2.

    Returns
    -------
    list of CRLBRow

    """
    data, sources = _noiseless_synthesis(scenario)
    unit = _bounds_at(scenario, sources, 1.0, settings)
    rows = []
    for snr_db in snr_grid:
        noise_variance = noise_variance_for_snr(data.spectra,
                                                scenario.signal, snr_db)
        variances = unit.variances * noise_variance
        rows += [CRLBRow(float(snr_db), n, var_x, var_y)
                 for n, (var_x, var_y) in enumerate(variances)]
    return rows
