"""Closed-form derivatives of the projection residual.

With Pi = K~ K~^+ the projector onto the columns of K~ and Q = (I - Pi) X,

    dQ/dtheta = -(I - Pi) dK~ S^ - (K~^+)^H dK~^H Q,

where S^ = K~^+ X. This is (P + P^H) X with P = (Pi - I) dK~ K~^+. Both
terms reuse the thin SVD computed for the cost at the same parameters.

The real embedding [Re Q; Im Q] turns the complex residual into an ordinary
real least-squares problem for the Levenberg-Marquardt solver.

"""


__all__ = [
    "JacobianBlock",
    "dK_dbeta",
    "dK_dx",
    "dK_dy",
    "dH_dgamma",
    "dH_dtau",
    "dQ_dtheta",
    "residual_jacobian",
    "projector",
    "projector_derivative",
    "finite_difference_jacobian",
    "jacobian_check",
]


import collections

import numpy as np

from .cost import SteeringModel, _as_model


DEFAULT_RELATIVE_STEP = 1e-6


jacobian_block_fields = ("complex", "layout")
JacobianBlockBase = collections.namedtuple("JacobianBlockBase",
                                           jacobian_block_fields)


class JacobianBlock(JacobianBlockBase):

    """Jacobian of the stacked residual with respect to theta.

    Attributes
    ----------
    complex : np.ndarray
        (F * M, size) complex matrix dQ/dtheta, rows ordered bin by bin.
    layout : LayoutDescriptor

    """

    __slots__ = ()

    @property
    def real(self):
        """Real embedding [Re J; Im J], shape (2 F M, size)."""
        return np.concatenate((self.complex.real, self.complex.imag))


def _single_bin(scenario, f):
    return _as_model(scenario).with_bins(f)


def _derivative_column(theta, scenario, f, index):
    model = _single_bin(scenario, f)
    return model.dK_tilde(theta)[index, 0]


def dK_dbeta(theta, scenario, f, index):
    """dK(f)/dbeta_index, equal to R_{index+1}(f).

    Raises
    ------
    IndexError
        If `index` is not in 1...L.

    """
    model = _as_model(scenario)
    order = model.layout.attenuation_order
    if not 1 <= index <= order:
        msg = f"Coefficient index must be in 1...{order}, got {index}."
        raise IndexError(msg)
    return _derivative_column(theta, model,
                              f, model.layout.beta_slice.start + index - 1)


def _source_index(model, source):
    if not 0 <= source < model.layout.number_sources:
        msg = (f"Source index must be in 0...{model.layout.number_sources - 1}"
               f", got {source}.")
        raise IndexError(msg)
    return source


def dK_dx(theta, scenario, f, source):
    """dK(f)/dx of one source; only that source's column is nonzero."""
    model = _as_model(scenario)
    index = model.layout.x_slice.start + _source_index(model, source)
    return _derivative_column(theta, model, f, index)


def dK_dy(theta, scenario, f, source):
    """dK(f)/dy of one source; only that source's column is nonzero."""
    model = _as_model(scenario)
    index = model.layout.y_slice.start + _source_index(model, source)
    return _derivative_column(theta, model, f, index)


def dH_dgamma(theta, scenario, f, key):
    """dH(f)/dgamma of a (cluster, source, path) key."""
    model = _as_model(scenario)
    index = model.layout.gamma_slice.start + model.layout.path_index(key)
    return _derivative_column(theta, model, f, index)


def dH_dtau(theta, scenario, f, key):
    """dH(f)/dtau of a (cluster, source, path) key."""
    model = _as_model(scenario)
    index = model.layout.delay_slice.start + model.layout.path_index(key)
    return _derivative_column(theta, model, f, index)


def residual_jacobian(model, theta, projection):
    """dQ/dtheta for every theta entry given the projection at theta.

    Returns
    -------
    np.ndarray
        (size, F, M) complex derivatives.

    """
    d_k_tilde = model.dK_tilde(theta)
    spectra_hat = projection.recovered_spectra()
    along = np.einsum("pfmn,fn->pfm", d_k_tilde, spectra_hat)
    orthogonal = along - projection.project(along)
    back = np.einsum("pfmn,fm->pfn", d_k_tilde.conj(), projection.residual)
    pinv_h = projection.pinv_hermitian()
    return -orthogonal - np.einsum("fmn,pfn->pfm", pinv_h, back)


def dQ_dtheta(theta, data, scenario, *, projection=None):
    """Jacobian of the stacked projection residual.

    Args
    ----
    theta : np.ndarray or ParamVector
    data : SpectrumData
    scenario : Scenario or SteeringModel
    projection : Projection, optional
        Factorization at `theta`, recomputed when omitted.

    Returns
    -------
    JacobianBlock

    Raises
    ------
    SingularModelError
        If K~(f) is rank deficient at some bin.

    """
    model = _as_model(scenario)
    if projection is None:
        projection = model.projection(theta, data)
    derivative = residual_jacobian(model, theta, projection)
    columns = derivative.reshape(derivative.shape[0], -1).T
    return JacobianBlock(columns, model.layout)


def projector_derivative(theta, scenario, f, index):
    """Derivative of the projector K~ K~^+ at one bin.

    Uses dPi = (I - Pi) dK~ K~^+ + (K~^+)^H dK~^H (I - Pi).

    Returns
    -------
    np.ndarray
        (M, M) derivative of the projector.
    np.ndarray
        (M, M) matrix P = (Pi - I) dK~ K~^+, so that dPi = -(P + P^H).

    """
    model = _single_bin(_as_model(scenario), f)
    k_tilde = model.build_K_tilde(theta)[0]
    d_k_tilde = model.dK_tilde(theta)[index, 0]
    pinv = np.linalg.pinv(k_tilde)
    identity = np.eye(k_tilde.shape[0])
    projector = k_tilde @ pinv
    p_matrix = (projector - identity) @ d_k_tilde @ pinv
    derivative = -(p_matrix + p_matrix.conj().T)
    return derivative, p_matrix


def projector(theta, scenario, f):
    """K~(f) K~^+(f) at one bin."""
    model = _single_bin(_as_model(scenario), f)
    k_tilde = model.build_K_tilde(theta)[0]
    return k_tilde @ np.linalg.pinv(k_tilde)


def finite_difference_jacobian(func, theta,
                               relative_step=DEFAULT_RELATIVE_STEP):
    """Central-difference Jacobian of a real or complex vector function.

    The step of entry i is `relative_step` * (1 + |theta_i|).

    Returns
    -------
    np.ndarray
        (len(func(theta)), len(theta)) matrix.

    """
    theta = np.asarray(theta, dtype=float)
    columns = []
    for i, value in enumerate(theta):
        step = relative_step * (1.0 + abs(value))
        forward = theta.copy()
        backward = theta.copy()
        forward[i] += step
        backward[i] -= step
        difference = (np.asarray(func(forward)) - np.asarray(func(backward)))
        columns.append(np.ravel(difference) / (2 * step))
    return np.column_stack(columns)


def jacobian_check(analytic, numeric, floor=None):
    """Largest relative column error between two Jacobians.

    Column errors are ||a_k - n_k|| / max(||n_k||, floor) with `floor`
    defaulting to 1e-8 times the largest column norm, so structurally zero
    columns compare in absolute terms.

    """
    analytic = np.asarray(analytic)
    numeric = np.asarray(numeric)
    errors = np.linalg.norm(analytic - numeric, axis=0)
    norms = np.linalg.norm(numeric, axis=0)
    if floor is None:
        floor = 1e-8 * max(float(np.max(norms, initial=0.0)), 1e-300)
    return float(np.max(errors / np.maximum(norms, floor), initial=0.0))


def model_jacobian(model: SteeringModel, theta, spectra):
    """d(K~ S)/dtheta at fixed source spectra, shape (size, F, M)."""
    return np.einsum("pfmn,fn->pfm", model.dK_tilde(theta), spectra)
