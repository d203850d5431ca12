"""Geometry and configuration data model shared by every other module.

Sensor arrays, sources, signal parameters and multipath channels are
immutable records. A :class:`Scenario` bundles them together with the model
order and the optimizer configurations and round-trips through the Scenario
JSON document.

Attributes
----------
DEFAULT_SPIRAL_CENTER : tuple of float
    Center of the spiral array used by the first example experiment.
DEFAULT_SPIRAL_ANGLE_RANGE : tuple of float
    Spiral parameter interval s in [2 pi, 4 pi].
DEFAULT_CIRCLE_RADIUS : float
    Radius (meters) of each circular cluster. Not a measured value; chosen
    small compared with the spacing between clusters.
DEFAULT_TAP_GAINS : tuple of float
    Gains of the default synthetic multipath profile.
DEFAULT_TAP_DELAYS : tuple of float
    Delays (samples) of the default synthetic multipath profile.

"""


__all__ = [
    "SignalConfig",
    "SensorArray",
    "SourceSpec",
    "MultipathChannel",
    "Scenario",
    "spiral_array",
    "circular_arrays",
    "distance",
    "distances",
    "delay_samples",
    "load_scenario",
    "save_scenario",
    "scenario_hash",
]


import collections
import hashlib
import json

import numpy as np
from pyproprop import processed_property

from .errors import ConfigError, DegenerateGeometryError
from .settings import DEConfig, LMAConfig
from .typing import PointsType, PointType


DEFAULT_SPIRAL_CENTER = (4.0, 4.0)
DEFAULT_SPIRAL_ANGLE_RANGE = (2 * np.pi, 4 * np.pi)
DEFAULT_CIRCLE_RADIUS = 1.5
DEFAULT_TAP_GAINS = (0.5, 0.3, 0.2)
DEFAULT_TAP_DELAYS = (60.0, 140.0, 260.0)
CLUSTER_DELAY_OFFSET = 15.0
SOURCE_DELAY_OFFSET = 7.0

DEFAULT_CENTER_FREQUENCY = 500.0
DEFAULT_BANDWIDTH = 200.0
DEFAULT_SAMPLE_RATE = 4000.0
DEFAULT_NUMBER_TIME_SAMPLES = 1000
DEFAULT_NUMBER_FREQUENCY_BINS = 1100
DEFAULT_PROPAGATION_SPEED = 345.0
DEFAULT_SNR_DB = 20.0
DEFAULT_SYNC_ERROR_STD = 0.0
DEFAULT_ATTENUATION_ORDER = 2
DEFAULT_MULTIPATH_PATHS = 0
DEFAULT_TRUE_ATTENUATION_EXPONENT = 1.25
DEFAULT_NOISE_SEED = 0


class SignalConfig:

    """Signal, sampling and noise parameters of a scenario.

    Instances are frozen once constructed; use :meth:`replace` to derive a
    modified copy.

    Attributes
    ----------
    center_frequency : float
        Center of the source band (Hz).
    bandwidth : float
        Width of the source band (Hz).
    sample_rate : float
        Sampling rate N_s (samples/s).
    number_time_samples : int
        Signal length n_t (samples).
    number_frequency_bins : int
        DFT length n_f. Must exceed `number_time_samples` so that delayed
        copies do not wrap around.
    propagation_speed : float
        Wave speed v (m/s).
    snr_db : float or None
        Per-sensor signal-to-noise ratio in decibels. `None` synthesizes
        noiseless data.
    sync_error_std : float
        Standard deviation (seconds) of the per-sensor synchronization
        jitter. Zero disables jitter.

    """

    center_frequency = processed_property(
        "center_frequency",
        description="source band center frequency",
        type=float,
        cast=True,
        min=0.0,
        exclusive=True,
    )
    bandwidth = processed_property(
        "bandwidth",
        description="source bandwidth",
        type=float,
        cast=True,
        min=0.0,
        exclusive=True,
    )
    sample_rate = processed_property(
        "sample_rate",
        description="sampling rate",
        type=float,
        cast=True,
        min=0.0,
        exclusive=True,
    )
    number_time_samples = processed_property(
        "number_time_samples",
        description="number of time samples",
        type=int,
        cast=True,
        min=1,
    )
    number_frequency_bins = processed_property(
        "number_frequency_bins",
        description="number of DFT frequency bins",
        type=int,
        cast=True,
        min=2,
    )
    propagation_speed = processed_property(
        "propagation_speed",
        description="propagation speed",
        type=float,
        cast=True,
        min=0.0,
        exclusive=True,
    )
    snr_db = processed_property(
        "snr_db",
        description="signal-to-noise ratio in decibels",
        type=float,
        cast=True,
        optional=True,
    )
    sync_error_std = processed_property(
        "sync_error_std",
        description="synchronization error standard deviation",
        type=float,
        cast=True,
        min=0.0,
    )

    _FIELDS = (
        "center_frequency",
        "bandwidth",
        "sample_rate",
        "number_time_samples",
        "number_frequency_bins",
        "propagation_speed",
        "snr_db",
        "sync_error_std",
    )

    def __init__(self,
                 *,
                 center_frequency=DEFAULT_CENTER_FREQUENCY,
                 bandwidth=DEFAULT_BANDWIDTH,
                 sample_rate=DEFAULT_SAMPLE_RATE,
                 number_time_samples=DEFAULT_NUMBER_TIME_SAMPLES,
                 number_frequency_bins=DEFAULT_NUMBER_FREQUENCY_BINS,
                 propagation_speed=DEFAULT_PROPAGATION_SPEED,
                 snr_db=DEFAULT_SNR_DB,
                 sync_error_std=DEFAULT_SYNC_ERROR_STD,
                 ):
        self.center_frequency = center_frequency
        self.bandwidth = bandwidth
        self.sample_rate = sample_rate
        self.number_time_samples = number_time_samples
        self.number_frequency_bins = number_frequency_bins
        self.propagation_speed = propagation_speed
        self.snr_db = snr_db
        self.sync_error_std = sync_error_std
        self._check_consistency()
        self._frozen = True

    def __setattr__(self, name, value):
        if getattr(self, "_frozen", False):
            msg = (f"`{self.__class__.__name__}` is immutable; use "
                   f"`replace({name.lstrip('_')}=...)` instead.")
            raise AttributeError(msg)
        super().__setattr__(name, value)

    def _check_consistency(self):
        if self.number_frequency_bins <= self.number_time_samples:
            msg = (f"Number of frequency bins ({self.number_frequency_bins}) "
                   f"must be greater than the number of time samples "
                   f"({self.number_time_samples}).")
            raise ConfigError(msg)
        low, high = self.band
        nyquist = 0.5 * self.sample_rate
        if not 0 < low or not high < nyquist:
            msg = (f"Source band [{low}, {high}] Hz must lie strictly inside "
                   f"(0, {nyquist}) Hz.")
            raise ConfigError(msg)

    @property
    def band(self):
        """Lower and upper band edges (Hz)."""
        half_width = 0.5 * self.bandwidth
        return (self.center_frequency - half_width,
                self.center_frequency + half_width)

    @property
    def duration(self):
        """Signal duration in seconds."""
        return self.number_time_samples / self.sample_rate

    @property
    def number_bins_used(self):
        """Number of non-negative frequency bins, n_f // 2 + 1."""
        return self.number_frequency_bins // 2 + 1

    @property
    def bin_frequencies(self):
        """Physical frequency (Hz) of each non-negative bin."""
        bins = np.arange(self.number_bins_used)
        return bins * self.sample_rate / self.number_frequency_bins

    def signal_bins(self):
        """Indices of the non-negative bins inside the source band."""
        low, high = self.band
        freqs = self.bin_frequencies
        return np.flatnonzero((freqs >= low) & (freqs <= high))

    def replace(self, **changes):
        data = self.to_dict()
        data.update(changes)
        return self.__class__(**data)

    def to_dict(self):
        return {name: getattr(self, name) for name in self._FIELDS}

    @classmethod
    def from_dict(cls, data):
        data = dict(data or {})
        unknown = set(data) - set(cls._FIELDS)
        if unknown:
            msg = f"Unknown signal configuration keys: {sorted(unknown)}."
            raise ConfigError(msg)
        return cls(**data)

    def __eq__(self, other):
        if not isinstance(other, SignalConfig):
            return NotImplemented
        return self.to_dict() == other.to_dict()

    def __hash__(self):
        return hash(tuple(self.to_dict().items()))

    def __repr__(self):
        cls_name = self.__class__.__name__
        fields = ", ".join(f"{name}={getattr(self, name)!r}"
                           for name in self._FIELDS)
        return f"{cls_name}({fields})"


def _frozen_array(values, dtype):
    array = np.array(values, dtype=dtype)
    array.flags.writeable = False
    return array


def _as_point(point, name="point"):
    point = np.asarray(point, dtype=float)
    if point.shape != (2, ):
        msg = f"`{name}` must be a 2D point, got shape {point.shape}."
        raise ValueError(msg)
    if not np.all(np.isfinite(point)):
        msg = f"`{name}` must be finite, got {point.tolist()}."
        raise ValueError(msg)
    return point


sensor_array_fields = ("positions", "cluster_ids")
SensorArrayBase = collections.namedtuple("SensorArrayBase",
                                         sensor_array_fields)


class SensorArray(SensorArrayBase):

    """Known sensor positions and their cluster membership.

    Attributes
    ----------
    positions : np.ndarray
        (M, 2) sensor coordinates in meters.
    cluster_ids : np.ndarray
        (M, ) cluster index of each sensor. Values form the contiguous range
        0...C-1. Sensors in a cluster share one multipath channel.

    """

    __slots__ = ()

    def __new__(cls, positions, cluster_ids=None):
        positions = np.array(positions, dtype=float)
        if positions.ndim != 2 or positions.shape[1] != 2:
            msg = (f"Sensor positions must have shape (M, 2), got "
                   f"{positions.shape}.")
            raise ValueError(msg)
        if positions.shape[0] < 1:
            msg = "A sensor array needs at least one sensor."
            raise ValueError(msg)
        if not np.all(np.isfinite(positions)):
            msg = "Sensor positions must be finite."
            raise ValueError(msg)
        if cluster_ids is None:
            cluster_ids = np.zeros(positions.shape[0], dtype=int)
        cluster_ids = np.array(cluster_ids, dtype=int)
        if cluster_ids.shape != (positions.shape[0], ):
            msg = (f"Expected {positions.shape[0]} cluster ids, got "
                   f"{cluster_ids.size}.")
            raise ValueError(msg)
        unique_ids = np.unique(cluster_ids)
        if not np.array_equal(unique_ids, np.arange(unique_ids.size)):
            msg = (f"Cluster ids must form a contiguous range 0...C-1, got "
                   f"{unique_ids.tolist()}.")
            raise ValueError(msg)
        return super().__new__(cls, _frozen_array(positions, float),
                               _frozen_array(cluster_ids, int))

    @property
    def number_sensors(self):
        return self.positions.shape[0]

    @property
    def number_clusters(self):
        return int(self.cluster_ids.max()) + 1

    def cluster_members(self, cluster):
        """Sensor indices belonging to `cluster`."""
        return np.flatnonzero(self.cluster_ids == cluster)

    def to_dict(self):
        return {"positions": self.positions.tolist(),
                "cluster_ids": self.cluster_ids.tolist()}

    @classmethod
    def from_dict(cls, data):
        return cls(data["positions"], data.get("cluster_ids"))


source_spec_fields = ("position", "seed")
SourceSpecBase = collections.namedtuple("SourceSpecBase", source_spec_fields)


class SourceSpec(SourceSpecBase):

    """Ground-truth source position and the seed of its waveform."""

    __slots__ = ()

    def __new__(cls, position, seed=0):
        position = _frozen_array(_as_point(position, "position"), float)
        return super().__new__(cls, position, int(seed))

    def to_dict(self):
        return {"position": self.position.tolist(), "seed": self.seed}

    @classmethod
    def from_dict(cls, data):
        return cls(data["position"], data.get("seed", 0))


multipath_channel_fields = ("taps", )
MultipathChannelBase = collections.namedtuple("MultipathChannelBase",
                                              multipath_channel_fields)


class MultipathChannel(MultipathChannelBase):

    """Indirect-path taps shared by every sensor of a cluster.

    Attributes
    ----------
    taps : tuple
        Sorted `((cluster, source), ((gain, delay), ...))` entries. Delays are
        in samples and must be non-negative. No entries means no
        reverberation.

    """

    __slots__ = ()

    def __new__(cls, taps=None):
        if taps is None:
            taps = {}
        entries = {}
        for key, key_taps in dict(taps).items():
            cluster, source = (int(index) for index in key)
            parsed = []
            for gain, delay in key_taps:
                gain = float(gain)
                delay = float(delay)
                if not (np.isfinite(gain) and np.isfinite(delay)):
                    msg = (f"Multipath taps of (cluster {cluster}, source "
                           f"{source}) must be finite.")
                    raise ConfigError(msg)
                if delay < 0:
                    msg = (f"Multipath delay {delay} of (cluster {cluster}, "
                           f"source {source}) must be non-negative.")
                    raise ConfigError(msg)
                parsed.append((gain, delay))
            if parsed:
                entries[(cluster, source)] = tuple(parsed)
        return super().__new__(cls, tuple(sorted(entries.items())))

    @classmethod
    def default_profile(cls, number_clusters, number_sources):
        """Three-tap profile, distinct for every (cluster, source) pair."""
        taps = {}
        for cluster in range(number_clusters):
            for source in range(number_sources):
                offset = (CLUSTER_DELAY_OFFSET * cluster
                          + SOURCE_DELAY_OFFSET * source)
                taps[(cluster, source)] = tuple(
                    (gain, delay + offset)
                    for gain, delay in zip(DEFAULT_TAP_GAINS,
                                           DEFAULT_TAP_DELAYS))
        return cls(taps)

    @property
    def keys(self):
        return tuple(key for key, _ in self.taps)

    def taps_for(self, cluster, source):
        """Taps of one (cluster, source) pair, empty if there are none."""
        return dict(self.taps).get((cluster, source), ())

    def is_empty(self):
        return len(self.taps) == 0

    def to_list(self):
        return [{"cluster": cluster,
                 "source": source,
                 "taps": [[gain, delay] for gain, delay in key_taps]}
                for (cluster, source), key_taps in self.taps]

    @classmethod
    def from_list(cls, data):
        return cls({(entry["cluster"], entry["source"]): entry["taps"]
                    for entry in data or ()})


scenario_fields = (
    "array",
    "sources",
    "signal",
    "channels",
    "noise_seed",
    "attenuation_order",
    "multipath_paths",
    "true_attenuation_exponent",
    "de",
    "lma",
)
ScenarioBase = collections.namedtuple("ScenarioBase", scenario_fields)


class Scenario(ScenarioBase):

    """Complete, immutable description of one localization experiment.

    Attributes
    ----------
    array : SensorArray
    sources : tuple of SourceSpec
    signal : SignalConfig
    channels : MultipathChannel
        True multipath used by the synthesizer.
    noise_seed : int
        Seed of the per-sensor noise and jitter streams.
    attenuation_order : int
        Number L of estimated Laurent coefficients.
    multipath_paths : int
        Number P of estimated (gain, delay) pairs per (cluster, source).
    true_attenuation_exponent : float
        Exponent of the power law used as ground-truth attenuation.
    de : DEConfig
    lma : LMAConfig

    """

    __slots__ = ()

    def __new__(cls,
                array,
                sources,
                signal=None,
                channels=None,
                noise_seed=DEFAULT_NOISE_SEED,
                attenuation_order=DEFAULT_ATTENUATION_ORDER,
                multipath_paths=DEFAULT_MULTIPATH_PATHS,
                true_attenuation_exponent=DEFAULT_TRUE_ATTENUATION_EXPONENT,
                de=None,
                lma=None,
                ):
        if not isinstance(array, SensorArray):
            array = SensorArray(*array)
        sources = tuple(source if isinstance(source, SourceSpec)
                        else SourceSpec(*source) for source in sources)
        if not sources:
            msg = "A scenario needs at least one source."
            raise ConfigError(msg)
        if array.number_sensors < len(sources):
            msg = (f"Number of sensors ({array.number_sensors}) must be at "
                   f"least the number of sources ({len(sources)}).")
            raise ConfigError(msg)
        signal = SignalConfig() if signal is None else signal
        channels = MultipathChannel() if channels is None else channels
        if not isinstance(channels, MultipathChannel):
            channels = MultipathChannel(channels)
        for cluster, source in channels.keys:
            if not (0 <= cluster < array.number_clusters
                    and 0 <= source < len(sources)):
                msg = (f"Multipath channel key (cluster {cluster}, source "
                       f"{source}) is outside the {array.number_clusters} "
                       f"clusters and {len(sources)} sources.")
                raise ConfigError(msg)
        attenuation_order = int(attenuation_order)
        multipath_paths = int(multipath_paths)
        if attenuation_order < 0:
            msg = (f"Attenuation order must be non-negative, got "
                   f"{attenuation_order}.")
            raise ConfigError(msg)
        if multipath_paths < 0:
            msg = (f"Number of multipath paths must be non-negative, got "
                   f"{multipath_paths}.")
            raise ConfigError(msg)
        true_attenuation_exponent = float(true_attenuation_exponent)
        if not true_attenuation_exponent > 0:
            msg = (f"True attenuation exponent must be positive, got "
                   f"{true_attenuation_exponent}.")
            raise ConfigError(msg)
        de = DEConfig() if de is None else de
        lma = LMAConfig() if lma is None else lma
        return super().__new__(cls, array, sources, signal, channels,
                               int(noise_seed), attenuation_order,
                               multipath_paths, true_attenuation_exponent,
                               de, lma)

    @property
    def number_sensors(self):
        return self.array.number_sensors

    @property
    def number_sources(self):
        return len(self.sources)

    @property
    def number_clusters(self):
        return self.array.number_clusters

    @property
    def source_positions(self):
        """(N, 2) array of true source positions."""
        return np.array([source.position for source in self.sources])

    def replace(self, **changes):
        """Copy with some fields changed, validated like a new instance."""
        fields = self._asdict()
        unknown = set(changes) - set(fields)
        if unknown:
            msg = f"Unknown scenario fields: {sorted(unknown)}."
            raise ConfigError(msg)
        fields.update(changes)
        return self.__class__(**fields)

    def to_dict(self):
        return {
            "array": self.array.to_dict(),
            "sources": [source.to_dict() for source in self.sources],
            "signal": self.signal.to_dict(),
            "channels": self.channels.to_list(),
            "noise_seed": self.noise_seed,
            "attenuation_order": self.attenuation_order,
            "multipath_paths": self.multipath_paths,
            "true_attenuation_exponent": self.true_attenuation_exponent,
            "optimizer": {"de": self.de.to_dict(),
                          "lma": self.lma.to_dict()},
        }

    @classmethod
    def from_dict(cls, data):
        try:
            optimizer = data.get("optimizer", {})
            return cls(
                array=SensorArray.from_dict(data["array"]),
                sources=[SourceSpec.from_dict(source)
                         for source in data["sources"]],
                signal=SignalConfig.from_dict(data.get("signal")),
                channels=MultipathChannel.from_list(data.get("channels")),
                noise_seed=data.get("noise_seed", DEFAULT_NOISE_SEED),
                attenuation_order=data.get("attenuation_order",
                                           DEFAULT_ATTENUATION_ORDER),
                multipath_paths=data.get("multipath_paths",
                                         DEFAULT_MULTIPATH_PATHS),
                true_attenuation_exponent=data.get(
                    "true_attenuation_exponent",
                    DEFAULT_TRUE_ATTENUATION_EXPONENT),
                de=DEConfig.from_dict(optimizer.get("de")),
                lma=LMAConfig.from_dict(optimizer.get("lma")),
            )
        except KeyError as error:
            msg = f"Scenario document is missing the required key {error}."
            raise ConfigError(msg) from error
        except TypeError as error:
            msg = f"Malformed scenario document: {error}"
            raise ConfigError(msg) from error


def spiral_array(m_count, center=DEFAULT_SPIRAL_CENTER,
                 angle_range=DEFAULT_SPIRAL_ANGLE_RANGE):
    """Sensors on the spiral center + (s/pi)(cos s, sin s).

    Args
    ----
    m_count : int
        Number of sensors. The spiral parameter s is equally spaced over
        `angle_range` (inclusive of both ends).
    center : PointType
    angle_range : tuple of float
        (start, stop) of the spiral parameter in radians.

    Returns
    -------
    SensorArray
        Single-cluster array.

    Raises
    ------
    ValueError
        If `m_count` is smaller than one.

    """
    if m_count < 1:
        msg = f"A spiral array needs at least one sensor, got {m_count}."
        raise ValueError(msg)
    center = _as_point(center, "center")
    start, stop = angle_range
    s = np.linspace(start, stop, int(m_count))
    radius = s / np.pi
    positions = center + np.column_stack((radius * np.cos(s),
                                          radius * np.sin(s)))
    return SensorArray(positions)


def circular_arrays(centers, per_array, radius=DEFAULT_CIRCLE_RADIUS):
    """Equally spaced sensors on one circle per center.

    Sensor k of each circle sits at angle 2 pi k / `per_array`; the cluster id
    of a sensor is the index of its circle.

    Raises
    ------
    ValueError
        If `centers` is empty, `per_array` is smaller than one or `radius` is
        not positive.

    """
    centers = [_as_point(center, "center") for center in centers]
    if not centers:
        msg = "At least one circle center is required."
        raise ValueError(msg)
    if per_array < 1:
        msg = f"Each circle needs at least one sensor, got {per_array}."
        raise ValueError(msg)
    if not radius > 0:
        msg = f"Circle radius must be positive, got {radius}."
        raise ValueError(msg)
    angles = 2 * np.pi * np.arange(per_array) / per_array
    ring = radius * np.column_stack((np.cos(angles), np.sin(angles)))
    positions = np.concatenate([center + ring for center in centers])
    cluster_ids = np.repeat(np.arange(len(centers)), per_array)
    return SensorArray(positions, cluster_ids)


def distance(sensor: PointType, source: PointType) -> float:
    """Euclidean distance (meters) between a sensor and a source.

    Raises
    ------
    DegenerateGeometryError
        If the two points coincide.

    """
    sensor = _as_point(sensor, "sensor")
    source = _as_point(source, "source")
    rho = float(np.hypot(*(sensor - source)))
    if rho <= 0:
        msg = (f"Source at {tuple(source)} coincides with a sensor; the "
               f"attenuation model is singular at zero distance.")
        raise DegenerateGeometryError(msg)
    return rho


def distances(sensor_positions: PointsType,
              source_positions: PointsType) -> np.ndarray:
    """(M, N) matrix of sensor-source distances.

    Raises
    ------
    DegenerateGeometryError
        If any source coincides with a sensor.

    """
    sensor_positions = np.asarray(sensor_positions, dtype=float)
    source_positions = np.asarray(source_positions, dtype=float)
    diff = sensor_positions[:, np.newaxis, :] - source_positions[np.newaxis]
    rho = np.hypot(diff[..., 0], diff[..., 1])
    if np.any(rho <= 0):
        sensor, source = np.argwhere(rho <= 0)[0]
        msg = (f"Source {source} coincides with sensor {sensor}; the "
               f"attenuation model is singular at zero distance.")
        raise DegenerateGeometryError(msg)
    return rho


def delay_samples(rho, signal):
    """Propagation delay rho * N_s / v in (fractional) samples.

    Raises
    ------
    DegenerateGeometryError
        If any distance is not strictly positive.

    """
    rho = np.asarray(rho, dtype=float)
    if np.any(rho <= 0):
        msg = "Delays are only defined for strictly positive distances."
        raise DegenerateGeometryError(msg)
    delay = rho * signal.sample_rate / signal.propagation_speed
    return float(delay) if delay.ndim == 0 else delay


def _canonical_json(scenario):
    return json.dumps(scenario.to_dict(), sort_keys=True,
                      separators=(",", ":"))


def scenario_hash(scenario):
    """SHA-256 hex digest of the canonical Scenario JSON."""
    return hashlib.sha256(_canonical_json(scenario).encode()).hexdigest()


def save_scenario(scenario, path):
    try:
        with open(path, "w") as file:
            json.dump(scenario.to_dict(), file, indent=2, sort_keys=True)
            file.write("\n")
    except OSError as error:
        msg = f"Could not write scenario to '{path}': {error.strerror}"
        raise OSError(error.errno, msg) from error


def load_scenario(path):
    """Read a Scenario JSON document.

    Raises
    ------
    OSError
        If the file cannot be read.
    ConfigError
        If the document is not valid JSON or violates the schema.

    """
    try:
        with open(path) as file:
            data = json.load(file)
    except OSError as error:
        msg = f"Could not read scenario from '{path}': {error.strerror}"
        raise OSError(error.errno, msg) from error
    except json.JSONDecodeError as error:
        msg = f"Scenario file '{path}' is not valid JSON: {error}"
        raise ConfigError(msg) from error
    return Scenario.from_dict(data)
