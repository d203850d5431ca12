"""Forward simulation of sensor spectra.

Source waveforms are band-limited white Gaussian noise. Propagation delays,
attenuation and multipath are applied in the frequency domain so fractional
delays are exact. Measurement noise is generated in the time domain and
transformed, so its per-bin variance is n_t sigma^2.

All random streams derive from seeds stored in the scenario: one stream per
source waveform and one per sensor (jitter, then noise), so results do not
depend on evaluation order.

"""


__all__ = [
    "SourceSignal",
    "SpectrumData",
    "generate_source_signal",
    "synthesize",
    "apply_multipath_profile",
    "noise_variance_for_snr",
    "measured_snr_db",
    "load_spectrum",
    "save_spectrum",
]


import collections
import json
import logging

import numpy as np
import scipy.fft

from .attenuation import true_model_eval
from .errors import ConfigError
from .scene import Scenario, delay_samples, distances


logger = logging.getLogger(__name__)

NPZ_SUFFIX = ".npz"
JSON_SUFFIX = ".json"
SPECTRUM_FORMAT_VERSION = 1


source_signal_fields = ("time_samples", "spectrum")
SourceSignalBase = collections.namedtuple("SourceSignalBase",
                                          source_signal_fields)


class SourceSignal(SourceSignalBase):

    """Real source waveform and its n_f-point DFT.

    Attributes
    ----------
    time_samples : np.ndarray
        (n_t, ) real samples at the 1 m reference distance.
    spectrum : np.ndarray
        (n_f, ) complex DFT of the zero-padded waveform.

    """

    __slots__ = ()

    @property
    def half_spectrum(self):
        """Non-negative bins 0...n_f // 2 of the spectrum."""
        return self.spectrum[:self.spectrum.size // 2 + 1]


spectrum_data_fields = ("spectra", "noise_variance", "number_time_samples",
                        "number_frequency_bins", "scenario")
SpectrumDataBase = collections.namedtuple("SpectrumDataBase",
                                          spectrum_data_fields)


class SpectrumData(SpectrumDataBase):

    """Observed sensor spectra over the non-negative frequency bins.

    Attributes
    ----------
    spectra : np.ndarray
        (M, n_f // 2 + 1) complex matrix X; row m holds sensor m.
    noise_variance : float
        Time-domain noise variance sigma^2 (zero for noiseless data).
    number_time_samples : int
    number_frequency_bins : int
    scenario : Scenario or None
        Provenance of the data.

    """

    __slots__ = ()

    def __new__(cls, spectra, noise_variance, number_time_samples,
                number_frequency_bins, scenario=None):
        spectra = np.array(spectra, dtype=complex)
        number_frequency_bins = int(number_frequency_bins)
        expected = number_frequency_bins // 2 + 1
        if spectra.ndim != 2 or spectra.shape[1] != expected:
            msg = (f"Spectra must have shape (M, {expected}) for "
                   f"{number_frequency_bins} frequency bins, got "
                   f"{spectra.shape}.")
            raise ValueError(msg)
        noise_variance = float(noise_variance)
        if noise_variance < 0:
            msg = "Noise variance must be non-negative."
            raise ValueError(msg)
        spectra.flags.writeable = False
        return super().__new__(cls, spectra, noise_variance,
                               int(number_time_samples),
                               number_frequency_bins, scenario)

    @property
    def number_sensors(self):
        return self.spectra.shape[0]

    @property
    def noise_variance_freq(self):
        """Per-bin noise variance n_t sigma^2."""
        return self.number_time_samples * self.noise_variance


def generate_source_signal(signal, seed):
    """Unit-RMS white Gaussian noise band-limited to the source band.

    The band is imposed with a brick-wall mask on the n_t-point DFT.

    Raises
    ------
    ConfigError
        If no n_t-point DFT bin falls inside the band.

    """
    n_t = signal.number_time_samples
    rng = np.random.default_rng(seed)
    white = rng.standard_normal(n_t)
    freqs = scipy.fft.rfftfreq(n_t, d=1.0 / signal.sample_rate)
    low, high = signal.band
    mask = (freqs >= low) & (freqs <= high)
    if not np.any(mask):
        msg = (f"Band [{low}, {high}] Hz contains no frequency bin at a "
               f"resolution of {signal.sample_rate / n_t} Hz.")
        raise ConfigError(msg)
    shaped = scipy.fft.irfft(scipy.fft.rfft(white) * mask, n=n_t)
    shaped /= np.sqrt(np.mean(shaped ** 2))
    spectrum = scipy.fft.fft(shaped, n=signal.number_frequency_bins)
    return SourceSignal(shaped, spectrum)


def _phase(delays, number_frequency_bins, number_bins_used):
    bins = np.arange(number_bins_used)
    delays = np.asarray(delays, dtype=float)[..., np.newaxis]
    return np.exp(-2j * np.pi * bins * delays / number_frequency_bins)


def apply_multipath_profile(channel, cluster, source, spectrum,
                            number_frequency_bins):
    """Indirect-path contribution sum_p gamma_p e^(-j 2 pi f tau_p / n_f) S(f).

    Args
    ----
    channel : MultipathChannel
    cluster, source : int
        Key of the taps to apply.
    spectrum : np.ndarray
        Source spectrum over bins 0, 1, ...
    number_frequency_bins : int
        DFT length n_f defining the phase of each bin.

    Returns
    -------
    np.ndarray
        Zero when the key has no taps.

    """
    spectrum = np.asarray(spectrum)
    taps = channel.taps_for(cluster, source)
    if not taps:
        return np.zeros_like(spectrum, dtype=complex)
    gains, delays = (np.array(values) for values in zip(*taps))
    if np.any(delays < 0):
        msg = "Multipath delays must be non-negative."
        raise ConfigError(msg)
    phases = _phase(delays, number_frequency_bins, spectrum.size)
    return (gains @ phases) * spectrum


def _time_domain_power(half_spectra, number_frequency_bins,
                       number_time_samples):
    """Mean power per row over n_t samples from half spectra (Parseval)."""
    weights = np.full(half_spectra.shape[-1], 2.0)
    weights[0] = 1.0
    if number_frequency_bins % 2 == 0:
        weights[-1] = 1.0
    energy = (np.abs(half_spectra) ** 2) @ weights / number_frequency_bins
    return energy / number_time_samples


def noise_variance_for_snr(noiseless_spectra, signal, snr_db):
    """Noise variance sigma^2 giving `snr_db` on average over sensors.

    The received power of each sensor is measured on the noiseless spectra;
    the sensor average is divided by 10^(snr_db / 10).

    """
    power = _time_domain_power(np.atleast_2d(noiseless_spectra),
                               signal.number_frequency_bins,
                               signal.number_time_samples)
    return float(np.mean(power) / 10 ** (snr_db / 10))


def measured_snr_db(noiseless_spectra, noise_spectra, signal):
    """Per-sensor SNR (dB) measured from separated signal and noise."""
    args = (signal.number_frequency_bins, signal.number_time_samples)
    signal_power = _time_domain_power(np.atleast_2d(noiseless_spectra), *args)
    noise_power = _time_domain_power(np.atleast_2d(noise_spectra), *args)
    return 10 * np.log10(signal_power / noise_power)


def sensor_streams(scenario):
    """Independent per-sensor random generators derived from noise_seed."""
    children = np.random.SeedSequence(scenario.noise_seed).spawn(
        scenario.number_sensors)
    return [np.random.default_rng(child) for child in children]


def synthesize(scenario, *, return_components=False):
    """Simulate the sensor spectra of a scenario.

    Args
    ----
    scenario : Scenario
    return_components : bool, optional (default `False`)
        Also return the noiseless spectra and the noise spectra.

    Returns
    -------
    SpectrumData
    list of SourceSignal
        Ground-truth source waveforms.
    tuple of np.ndarray
        `(noiseless, noise)` spectra, only when `return_components` is set.

    Raises
    ------
    DegenerateGeometryError
        If a source coincides with a sensor.

    """
    signal = scenario.signal
    n_t = signal.number_time_samples
    n_f = signal.number_frequency_bins
    number_bins_used = signal.number_bins_used
    sources = [generate_source_signal(signal, spec.seed)
               for spec in scenario.sources]
    source_spectra = np.array([source.half_spectrum for source in sources])

    rho = distances(scenario.array.positions, scenario.source_positions)
    delays = delay_samples(rho, signal)
    streams = sensor_streams(scenario)
    jitter_unit = np.array([stream.uniform(-1.0, 1.0) for stream in streams])
    jitter = np.sqrt(3.0) * signal.sync_error_std * jitter_unit
    delays = delays - (jitter * signal.sample_rate)[:, np.newaxis]

    gains = true_model_eval(rho, scenario.true_attenuation_exponent)
    phases = _phase(delays, n_f, number_bins_used)
    noiseless = np.einsum("mn,mnf,nf->mf", gains, phases, source_spectra)
    for cluster, source in scenario.channels.keys:
        rows = scenario.array.cluster_members(cluster)
        noiseless[rows] += apply_multipath_profile(
            scenario.channels, cluster, source, source_spectra[source], n_f)

    if signal.snr_db is None:
        noise_variance = 0.0
        noise = np.zeros_like(noiseless)
    else:
        noise_variance = noise_variance_for_snr(noiseless, signal,
                                                signal.snr_db)
        sigma = np.sqrt(noise_variance)
        noise = np.array([scipy.fft.rfft(sigma * stream.standard_normal(n_t),
                                         n=n_f)
                          for stream in streams])
    logger.debug("Synthesized %d sensors, %d bins, sigma^2=%g",
                 scenario.number_sensors, number_bins_used, noise_variance)
    data = SpectrumData(noiseless + noise, noise_variance, n_t, n_f,
                        scenario)
    if return_components:
        return data, sources, (noiseless, noise)
    return data, sources


def _spectrum_to_dict(data):
    interleaved = np.column_stack((data.spectra.real.ravel(),
                                   data.spectra.imag.ravel())).ravel()
    document = {
        "format_version": SPECTRUM_FORMAT_VERSION,
        "shape": list(data.spectra.shape),
        "number_time_samples": data.number_time_samples,
        "number_frequency_bins": data.number_frequency_bins,
        "noise_variance": data.noise_variance,
        "data": interleaved.tolist(),
    }
    if data.scenario is not None:
        document["scenario"] = data.scenario.to_dict()
    return document


def _spectrum_from_dict(document):
    rows, cols = document["shape"]
    pairs = np.asarray(document["data"], dtype=float).reshape(rows, cols, 2)
    scenario = document.get("scenario")
    if scenario is not None:
        scenario = Scenario.from_dict(scenario)
    return SpectrumData(pairs[..., 0] + 1j * pairs[..., 1],
                        document["noise_variance"],
                        document["number_time_samples"],
                        document["number_frequency_bins"],
                        scenario)


def save_spectrum(data, path):
    """Write spectra to a `.json` document or a binary `.npz` container."""
    path = str(path)
    try:
        if path.endswith(JSON_SUFFIX):
            with open(path, "w") as file:
                json.dump(_spectrum_to_dict(data), file)
            return
        scenario = ("" if data.scenario is None
                    else json.dumps(data.scenario.to_dict(), sort_keys=True))
        with open(path, "wb") as file:
            np.savez(file,
                     format_version=SPECTRUM_FORMAT_VERSION,
                     spectra=data.spectra,
                     noise_variance=data.noise_variance,
                     number_time_samples=data.number_time_samples,
                     number_frequency_bins=data.number_frequency_bins,
                     scenario=scenario)
    except OSError as error:
        msg = f"Could not write spectra to '{path}': {error.strerror}"
        raise OSError(error.errno, msg) from error


def load_spectrum(path):
    """Read spectra written by :func:`save_spectrum`.

    JSON documents are recognised by the `.json` suffix; anything else is
    read as an `.npz` container.

    """
    path = str(path)
    try:
        if path.endswith(JSON_SUFFIX):
            with open(path) as file:
                return _spectrum_from_dict(json.load(file))
        with np.load(path, allow_pickle=False) as archive:
            scenario = str(archive["scenario"])
            scenario = (Scenario.from_dict(json.loads(scenario))
                        if scenario else None)
            return SpectrumData(archive["spectra"],
                                float(archive["noise_variance"]),
                                int(archive["number_time_samples"]),
                                int(archive["number_frequency_bins"]),
                                scenario)
    except OSError as error:
        msg = f"Could not read spectra from '{path}': {error.strerror}"
        raise OSError(error.errno, msg) from error
    except (KeyError, ValueError) as error:
        msg = f"Malformed spectrum file '{path}': {error}"
        raise ConfigError(msg) from error
