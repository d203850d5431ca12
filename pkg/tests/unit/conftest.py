"""Fixtures for unit tests."""

import numpy as np
import pytest

import wavelock


@pytest.fixture
def small_signal():
    """64 samples padded to 80 bins at 4 kHz, 500 +/- 100 Hz, noiseless."""
    return wavelock.SignalConfig(number_time_samples=64,
                                 number_frequency_bins=80, snr_db=None)


@pytest.fixture
def spiral_scenario(small_signal):
    """Noiseless spiral-array scenario whose true attenuation is 1/rho.

    The Laurent model at beta = 0 then matches the data exactly.

    """
    return wavelock.Scenario(
        array=wavelock.spiral_array(12),
        sources=[wavelock.SourceSpec((12.0, 10.0), seed=1)],
        signal=small_signal,
        attenuation_order=2,
        true_attenuation_exponent=1.0,
    )


@pytest.fixture
def two_source_scenario(small_signal):
    """Noiseless two-source scenario on the spiral array."""
    return wavelock.Scenario(
        array=wavelock.spiral_array(12),
        sources=[wavelock.SourceSpec((4.0, 3.0), seed=1),
                 wavelock.SourceSpec((12.0, 10.0), seed=2)],
        signal=small_signal,
        attenuation_order=1,
        true_attenuation_exponent=1.0,
    )


@pytest.fixture
def clustered_scenario(small_signal):
    """Two circular clusters with one multipath tap per (cluster, source)."""
    array = wavelock.circular_arrays([(2.0, 2.0), (8.0, 2.0)], 4, radius=1.0)
    channels = wavelock.MultipathChannel({(0, 0): [(0.4, 6.0)],
                                          (1, 0): [(0.3, 11.0)]})
    return wavelock.Scenario(
        array=array,
        sources=[wavelock.SourceSpec((5.0, 9.0), seed=3)],
        signal=small_signal,
        channels=channels,
        attenuation_order=1,
        multipath_paths=1,
        true_attenuation_exponent=1.0,
    )


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)
