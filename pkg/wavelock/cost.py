"""Steering matrices and the concentrated maximum-likelihood cost.

For every frequency bin f the observed sensor spectra X(f) are modelled as
K~(f) S(f) with K~ = K + H, where K holds attenuation and propagation delay
of the direct paths and H the cluster-shared multipath channels. The unknown
source spectra S are eliminated by least squares, leaving the projection
residual

    Q(f) = X(f) - K~(f) K~^+(f) X(f),

whose summed squared norm is the cost. Bins are stacked along the leading
axis of every array in this module, i.e. K~ has shape (F, M, N).

"""


__all__ = [
    "LayoutDescriptor",
    "ParamVector",
    "SteeringModel",
    "Projection",
    "build_R",
    "build_K",
    "build_H",
    "residual",
    "recover_spectrum",
]


import collections

import numpy as np

from .attenuation import AttenuationModel, d_evaluate_d_rho, evaluate
from .errors import SingularModelError
from .scene import distances
from .settings import BAND_ALL, BAND_MASK_OPTIONS, BAND_SIGNAL


layout_descriptor_fields = ("number_sources", "attenuation_order",
                            "number_clusters", "paths_per_key")
LayoutDescriptorBase = collections.namedtuple("LayoutDescriptorBase",
                                              layout_descriptor_fields)


class LayoutDescriptor(LayoutDescriptorBase):

    """Position of every unknown inside the flat parameter vector.

    The vector is ordered as [x_0...x_{N-1}, y_0...y_{N-1}, beta_1...beta_L,
    gamma_{c,n,p}..., tau_{c,n,p}...] with the multipath keys (c, n, p) in
    lexicographic order.

    """

    __slots__ = ()

    def __new__(cls, number_sources, attenuation_order=0, number_clusters=1,
                paths_per_key=0):
        values = (int(number_sources), int(attenuation_order),
                  int(number_clusters), int(paths_per_key))
        if values[0] < 1 or values[2] < 1 or min(values) < 0:
            msg = (f"Invalid parameter layout (sources={values[0]}, "
                   f"order={values[1]}, clusters={values[2]}, "
                   f"paths={values[3]}).")
            raise ValueError(msg)
        return super().__new__(cls, *values)

    @property
    def number_paths(self):
        """Total number of multipath (gain, delay) pairs."""
        return self.number_clusters * self.number_sources * self.paths_per_key

    @property
    def size(self):
        return (2 * self.number_sources + self.attenuation_order
                + 2 * self.number_paths)

    @property
    def x_slice(self):
        return slice(0, self.number_sources)

    @property
    def y_slice(self):
        return slice(self.number_sources, 2 * self.number_sources)

    @property
    def beta_slice(self):
        start = 2 * self.number_sources
        return slice(start, start + self.attenuation_order)

    @property
    def gamma_slice(self):
        start = 2 * self.number_sources + self.attenuation_order
        return slice(start, start + self.number_paths)

    @property
    def delay_slice(self):
        start = (2 * self.number_sources + self.attenuation_order
                 + self.number_paths)
        return slice(start, start + self.number_paths)

    @property
    def path_keys(self):
        """Lexicographic (cluster, source, path) keys."""
        return [(c, n, p)
                for c in range(self.number_clusters)
                for n in range(self.number_sources)
                for p in range(self.paths_per_key)]

    def path_index(self, key):
        """Offset of a (cluster, source, path) key inside the gamma block."""
        cluster, source, path = key
        if not (0 <= cluster < self.number_clusters
                and 0 <= source < self.number_sources
                and 0 <= path < self.paths_per_key):
            msg = f"Multipath key {key} is not part of the layout."
            raise IndexError(msg)
        return ((cluster * self.number_sources + source) * self.paths_per_key
                + path)

    @property
    def names(self):
        """Human-readable name of every entry, used as trace CSV headers."""
        sources = range(self.number_sources)
        names = [f"x_{n}" for n in sources] + [f"y_{n}" for n in sources]
        names += [f"beta_{l}" for l in range(1, self.attenuation_order + 1)]
        names += [f"gamma_{c}_{n}_{p}" for c, n, p in self.path_keys]
        names += [f"tau_{c}_{n}_{p}" for c, n, p in self.path_keys]
        return names

    def to_dict(self):
        return dict(self._asdict())


param_vector_fields = ("positions", "beta", "gamma", "delay", "layout")
ParamVectorBase = collections.namedtuple("ParamVectorBase",
                                         param_vector_fields)


class ParamVector(ParamVectorBase):

    """Decoded unknowns of one parameter vector.

    Attributes
    ----------
    positions : np.ndarray
        (N, 2) source positions.
    beta : np.ndarray
        (L, ) attenuation coefficients.
    gamma, delay : np.ndarray
        (C, N, P) multipath gains and delays (samples).
    layout : LayoutDescriptor

    """

    __slots__ = ()

    def __new__(cls, positions, beta=(), gamma=None, delay=None, layout=None):
        positions = np.array(positions, dtype=float).reshape(-1, 2)
        beta = np.array(beta, dtype=float).ravel()
        if layout is None:
            shape = (np.shape(gamma) if gamma is not None
                     else (1, positions.shape[0], 0))
            layout = LayoutDescriptor(positions.shape[0], beta.size,
                                      shape[0], shape[2])
        shape = (layout.number_clusters, layout.number_sources,
                 layout.paths_per_key)
        gamma = (np.zeros(shape) if gamma is None
                 else np.array(gamma, dtype=float).reshape(shape))
        delay = (np.zeros(shape) if delay is None
                 else np.array(delay, dtype=float).reshape(shape))
        if (positions.shape[0] != layout.number_sources
                or beta.size != layout.attenuation_order):
            msg = "Parameter blocks do not match the layout."
            raise ValueError(msg)
        return super().__new__(cls, positions, beta, gamma, delay, layout)

    @classmethod
    def from_array(cls, theta, layout):
        theta = np.asarray(theta, dtype=float)
        if theta.shape != (layout.size, ):
            msg = (f"Parameter vector must have length {layout.size}, got "
                   f"shape {theta.shape}.")
            raise ValueError(msg)
        positions = np.column_stack((theta[layout.x_slice],
                                     theta[layout.y_slice]))
        return cls(positions, theta[layout.beta_slice],
                   theta[layout.gamma_slice], theta[layout.delay_slice],
                   layout)

    def to_array(self):
        return np.concatenate((self.positions[:, 0], self.positions[:, 1],
                               self.beta, self.gamma.ravel(),
                               self.delay.ravel()))

    @property
    def attenuation_model(self):
        return AttenuationModel(self.beta)

    def to_dict(self):
        return {"positions": self.positions.tolist(),
                "beta": self.beta.tolist(),
                "gamma": self.gamma.tolist(),
                "delay": self.delay.tolist()}


projection_fields = ("bins", "k_tilde", "spectra", "u", "s", "vh",
                     "residual")
ProjectionBase = collections.namedtuple("ProjectionBase", projection_fields)


class Projection(ProjectionBase):

    """Per-bin thin SVD of K~ and the projection residual it induces.

    Attributes
    ----------
    bins : np.ndarray
        (F, ) DFT indices.
    k_tilde : np.ndarray
        (F, M, N) steering matrices.
    spectra : np.ndarray
        (F, M) observed spectra.
    u, s, vh : np.ndarray
        Thin SVD factors, K~ = u diag(s) vh.
    residual : np.ndarray
        (F, M) projection residual Q.

    """

    __slots__ = ()

    @property
    def cost(self):
        return float(np.sum(self.residual.real ** 2
                            + self.residual.imag ** 2))

    def recovered_spectra(self):
        """Least-squares source spectra K~^+ X, shape (F, N)."""
        coords = np.einsum("fmn,fm->fn", self.u.conj(), self.spectra)
        return np.einsum("fkn,fk->fn", self.vh.conj(), coords / self.s)

    def pinv_hermitian(self):
        """(K~^+)^H = u diag(1/s) vh, shape (F, M, N)."""
        return self.u @ (self.vh / self.s[..., np.newaxis])

    def pinv(self):
        """K~^+ = vh^H diag(1/s) u^H, shape (F, N, M)."""
        return np.conj(np.swapaxes(self.pinv_hermitian(), -1, -2))

    def project(self, vectors):
        """Apply the projector K~ K~^+ to (..., F, M) vectors."""
        coords = np.einsum("fmn,...fm->...fn", self.u.conj(), vectors)
        return np.einsum("fmn,...fn->...fm", self.u, coords)


def project(k_tilde, spectra, bins):
    """Factorize K~ per bin and return the projection of the spectra.

    The pseudo-inverse uses singular values above
    max(M, N) * eps * s_max; any bin with a smaller singular value has lost
    full column rank.

    Raises
    ------
    SingularModelError
        Naming the first rank-deficient bin.

    """
    u, s, vh = np.linalg.svd(k_tilde, full_matrices=False)
    number_rows, number_cols = k_tilde.shape[-2:]
    tolerance = max(number_rows, number_cols) * np.finfo(float).eps * s[:, 0]
    deficient = ~(s[:, -1] > tolerance)
    if np.any(deficient):
        index = int(np.flatnonzero(deficient)[0])
        bin_index = int(bins[index])
        msg = (f"Steering matrix lost full column rank at frequency bin "
               f"{bin_index} (smallest singular value {s[index, -1]:.3e}).")
        raise SingularModelError(msg, bin_index=bin_index)
    coords = np.einsum("fmn,fm->fn", u.conj(), spectra)
    residual = spectra - np.einsum("fmn,fn->fm", u, coords)
    return Projection(bins, k_tilde, spectra, u, s, vh, residual)


class SteeringModel:

    """Geometry constants, parameter layout and bin selection of the model.

    Args
    ----
    sensor_positions : np.ndarray
        (M, 2) sensor coordinates.
    cluster_ids : np.ndarray
        (M, ) cluster index of each sensor.
    signal : SignalConfig
    layout : LayoutDescriptor
    band_mask : str, optional (default `'all'`)
        `'all'` uses every bin 0...n_f // 2, `'signal'` only the in-band bins.
    delay_only : bool, optional (default `False`)
        Unit-modulus steering entries with no attenuation or multipath
        unknowns (the time-delay-only baseline).

    """

    def __init__(self, sensor_positions, cluster_ids, signal, layout, *,
                 band_mask=BAND_ALL, delay_only=False):
        self.sensor_positions = np.asarray(sensor_positions, dtype=float)
        self.cluster_ids = np.asarray(cluster_ids, dtype=int)
        self.signal = signal
        self.layout = layout
        self.delay_only = bool(delay_only)
        if self.delay_only and (layout.attenuation_order
                                or layout.paths_per_key):
            msg = ("The delay-only model has no attenuation or multipath "
                   "unknowns.")
            raise ValueError(msg)
        if band_mask not in BAND_MASK_OPTIONS:
            msg = f"Unknown band mask {band_mask!r}."
            raise ValueError(msg)
        self.band_mask = band_mask
        if band_mask == BAND_SIGNAL:
            self.bins = signal.signal_bins()
        else:
            self.bins = np.arange(signal.number_bins_used)
        self._cluster_rows = [np.flatnonzero(self.cluster_ids == c)
                              for c in range(layout.number_clusters)]

    @classmethod
    def from_scenario(cls, scenario, *, band_mask=BAND_ALL, delay_only=False):
        if delay_only:
            layout = LayoutDescriptor(scenario.number_sources, 0,
                                      scenario.number_clusters, 0)
        else:
            layout = LayoutDescriptor(scenario.number_sources,
                                      scenario.attenuation_order,
                                      scenario.number_clusters,
                                      scenario.multipath_paths)
        return cls(scenario.array.positions, scenario.array.cluster_ids,
                   scenario.signal, layout, band_mask=band_mask,
                   delay_only=delay_only)

    @property
    def number_sensors(self):
        return self.sensor_positions.shape[0]

    def with_bins(self, bins):
        """Shallow copy evaluating only the given DFT bins."""
        model = object.__new__(self.__class__)
        model.__dict__.update(self.__dict__)
        model.bins = np.atleast_1d(np.asarray(bins, dtype=int))
        return model

    def decode(self, theta):
        if isinstance(theta, ParamVector):
            return theta
        return ParamVector.from_array(theta, self.layout)

    def select(self, data):
        """Observed spectra at the model's bins, shape (F, M)."""
        return np.ascontiguousarray(data.spectra[:, self.bins].T)

    def distances(self, params):
        return distances(self.sensor_positions, params.positions)

    def wavenumbers(self):
        """Phase slope 2 pi N_s f / (n_f v) per bin (radians per meter)."""
        signal = self.signal
        return (2 * np.pi * signal.sample_rate * self.bins
                / (signal.number_frequency_bins * signal.propagation_speed))

    def direct_phase(self, rho):
        """exp(-j k_f rho), shape (F, M, N)."""
        return np.exp(-1j * self.wavenumbers()[:, np.newaxis, np.newaxis]
                      * rho[np.newaxis])

    def build_R(self, theta):
        """Stack of R_1...R_{L+1}, shape (L+1, F, M, N)."""
        params = self.decode(theta)
        rho = self.distances(params)
        phase = self.direct_phase(rho)
        powers = np.arange(1, self.layout.attenuation_order + 2)
        magnitudes = rho[np.newaxis] ** -powers[:, np.newaxis, np.newaxis]
        return magnitudes[:, np.newaxis] * phase[np.newaxis]

    def gains(self, params, rho):
        if self.delay_only:
            return np.ones_like(rho)
        return evaluate(params.attenuation_model, rho)

    def build_K(self, theta):
        """Direct-path steering matrices, shape (F, M, N)."""
        params = self.decode(theta)
        rho = self.distances(params)
        return self.gains(params, rho)[np.newaxis] * self.direct_phase(rho)

    def path_phase(self, delays):
        """exp(-j 2 pi f tau / n_f) for the given delays, shape (F, ...)."""
        delays = np.asarray(delays, dtype=float)
        scale = -2j * np.pi / self.signal.number_frequency_bins
        bins = self.bins.reshape((-1, ) + (1, ) * delays.ndim)
        return np.exp(scale * bins * delays[np.newaxis])

    def channel_responses(self, params):
        """Sum over paths of the multipath response, shape (F, C, N)."""
        if not self.layout.paths_per_key:
            shape = (self.bins.size, self.layout.number_clusters,
                     self.layout.number_sources)
            return np.zeros(shape, dtype=complex)
        phases = self.path_phase(params.delay)
        return np.sum(params.gamma[np.newaxis] * phases, axis=-1)

    def build_H(self, theta):
        """Cluster-shared multipath matrices, shape (F, M, N)."""
        params = self.decode(theta)
        responses = self.channel_responses(params)
        return responses[:, self.cluster_ids, :]

    def build_K_tilde(self, theta):
        params = self.decode(theta)
        k_tilde = self.build_K(params)
        if self.layout.paths_per_key:
            k_tilde = k_tilde + self.build_H(params)
        return k_tilde

    def projection(self, theta, data):
        return project(self.build_K_tilde(theta), self.select(data),
                       self.bins)

    def cost(self, theta, data):
        return self.projection(theta, data).cost

    def dK_tilde(self, theta):
        """Derivative of K~ with respect to every entry of theta.

        Returns
        -------
        np.ndarray
            (size, F, M, N) complex array, entry k holding dK~/dtheta_k.

        """
        layout = self.layout
        params = self.decode(theta)
        rho = self.distances(params)
        phase = self.direct_phase(rho)
        shape = (layout.size, self.bins.size, self.number_sensors,
                 layout.number_sources)
        derivative = np.zeros(shape, dtype=complex)

        gains = self.gains(params, rho)
        if self.delay_only:
            slopes = np.zeros_like(rho)
        else:
            slopes = d_evaluate_d_rho(params.attenuation_model, rho)
        # dK/drho per bin, entry (m, n)
        d_rho = ((slopes[np.newaxis]
                  - 1j * self.wavenumbers()[:, np.newaxis, np.newaxis]
                  * gains[np.newaxis]) * phase)
        offsets = params.positions[np.newaxis] - self.sensor_positions[
            :, np.newaxis]
        for n in range(layout.number_sources):
            x_index = layout.x_slice.start + n
            y_index = layout.y_slice.start + n
            derivative[x_index, ..., n] = (d_rho[..., n]
                                           * offsets[:, n, 0] / rho[:, n])
            derivative[y_index, ..., n] = (d_rho[..., n]
                                           * offsets[:, n, 1] / rho[:, n])

        for l in range(1, layout.attenuation_order + 1):
            index = layout.beta_slice.start + l - 1
            derivative[index] = rho[np.newaxis] ** (-l - 1.0) * phase

        if layout.paths_per_key:
            phases = self.path_phase(params.delay)
            bins = self.bins[:, np.newaxis, np.newaxis, np.newaxis]
            d_delay = (-2j * np.pi * bins / self.signal.number_frequency_bins
                       * params.gamma[np.newaxis] * phases)
            for key in layout.path_keys:
                cluster, source, path = key
                offset = layout.path_index(key)
                rows = self._cluster_rows[cluster]
                gamma_index = layout.gamma_slice.start + offset
                delay_index = layout.delay_slice.start + offset
                derivative[gamma_index][:, rows, source] = phases[
                    :, cluster, source, path][:, np.newaxis]
                derivative[delay_index][:, rows, source] = d_delay[
                    :, cluster, source, path][:, np.newaxis]
        return derivative


def _as_model(scenario):
    if isinstance(scenario, SteeringModel):
        return scenario
    return SteeringModel.from_scenario(scenario)


def _at_bin(model, f):
    return model if f is None else model.with_bins(f)


def _squeeze_bin(values, f):
    if f is not None and np.ndim(f) == 0:
        return values[..., 0, :, :]
    return values


def build_R(theta, scenario, f=None):
    """R_1(f)...R_{L+1}(f), entries rho^-l exp(-j 2 pi N_s f rho / (n_f v)).

    Args
    ----
    theta : np.ndarray or ParamVector
    scenario : Scenario or SteeringModel
    f : int or array of int, optional
        DFT bin(s). Defaults to the model's bins.

    Returns
    -------
    np.ndarray
        (L+1, M, N) for a scalar bin, else (L+1, F, M, N).

    """
    model = _at_bin(_as_model(scenario), f)
    return _squeeze_bin(model.build_R(theta), f)


def build_K(theta, scenario, f=None):
    """K(f) = R_1 + sum_l beta_l R_{l+1}; (M, N) for a scalar bin."""
    model = _at_bin(_as_model(scenario), f)
    return _squeeze_bin(model.build_K(theta), f)


def build_H(theta, scenario, f=None):
    """Multipath matrix H(f); (M, N) for a scalar bin."""
    model = _at_bin(_as_model(scenario), f)
    return _squeeze_bin(model.build_H(theta), f)


def residual(theta, data, scenario):
    """Projection residual and cost.

    Returns
    -------
    np.ndarray
        Complex residual Q stacked bin by bin, length F * M.
    float
        Cost sum_f ||Q(f)||^2.

    Raises
    ------
    SingularModelError
        If K~(f) is rank deficient at some bin.

    """
    projection = _as_model(scenario).projection(theta, data)
    return projection.residual.ravel(), projection.cost


def recover_spectrum(theta, data, scenario):
    """Least-squares source spectra K~^+(f) X(f), shape (F, N)."""
    return _as_model(scenario).projection(theta, data).recovered_spectra()
