"""Generic pytest-related classes/functions used throughout test suite."""

import types

import numpy as np
import pytest

import wavelock
from wavelock.cost import LayoutDescriptor, ParamVector, SteeringModel


class Utils:
    """Container for utility functions for use within test suite.

    Similar to approach as defined in:
    https://stackoverflow.com/questions/33508060/create-and-import-helper-functions-in-tests-without-creating-packages-in-test-di

    """

    @staticmethod
    def small_signal(number_time_samples=64, number_frequency_bins=80,
                     snr_db=None, sync_error_std=0.0):
        """Small signal configuration that keeps the 500 +/- 100 Hz band."""
        return wavelock.SignalConfig(
            number_time_samples=number_time_samples,
            number_frequency_bins=number_frequency_bins,
            snr_db=snr_db,
            sync_error_std=sync_error_std,
        )

    @classmethod
    def random_instance(cls, rng, number_sensors=5, number_sources=2,
                        attenuation_order=2, paths_per_key=1,
                        number_bins=8, number_clusters=1):
        """Random model, parameters and observed spectra on a few bins.

        Returns
        -------
        SteeringModel
        np.ndarray
            Flat parameter vector.
        SpectrumData
            Spectra on every bin of the small signal, random where the model
            evaluates and zero elsewhere.

        """
        signal = cls.small_signal()
        sensors = rng.uniform(0.0, 10.0, size=(number_sensors, 2))
        cluster_ids = np.arange(number_sensors) % number_clusters
        layout = LayoutDescriptor(number_sources, attenuation_order,
                                  number_clusters, paths_per_key)
        model = SteeringModel(sensors, cluster_ids, signal, layout)
        bins = np.sort(rng.choice(signal.number_bins_used, size=number_bins,
                                  replace=False))
        model = model.with_bins(bins)
        positions = rng.uniform(12.0, 20.0, size=(number_sources, 2))
        shape = (number_clusters, number_sources, paths_per_key)
        params = ParamVector(positions,
                             rng.uniform(-0.5, 0.5, attenuation_order),
                             rng.uniform(0.1, 0.5, shape),
                             rng.uniform(0.0, 30.0, shape),
                             layout)
        spectra = np.zeros((number_sensors, signal.number_bins_used),
                           dtype=complex)
        spectra[:, bins] = (rng.standard_normal((number_sensors, number_bins))
                            + 1j * rng.standard_normal((number_sensors,
                                                        number_bins)))
        data = wavelock.SpectrumData(spectra, 0.0,
                                     signal.number_time_samples,
                                     signal.number_frequency_bins)
        return model, params.to_array(), data

    @staticmethod
    def stacked_residual(model, data):
        """Function theta -> [Re Q; Im Q] used for finite differences."""
        def func(theta):
            q = model.projection(theta, data).residual.ravel()
            return np.concatenate((q.real, q.imag))
        return func


@pytest.fixture
def utils():
    """Fixture for utils helper.

    Related to Utils class above.

    """
    return Utils


@pytest.fixture
def quiet_settings():
    """Settings with console progress suppressed and a single worker."""
    return wavelock.Settings(console_out_progress=False, number_workers=1)


@pytest.fixture(scope="module")
def state():
    """Namespace carried between the steps of an incremental test class."""
    return types.SimpleNamespace()


def pytest_addoption(parser):
    parser.addoption("--runslow", action="store_true", default=False,
                     help="run paper-scale acceptance tests")


def pytest_collection_modifyitems(config, items):
    if config.getoption("--runslow"):
        return
    skip_slow = pytest.mark.skip(reason="needs --runslow to run")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip_slow)


# Store history of failures per test class name and per index in parametrize
# (if parametrize used)
_test_failed_incremental = {}


def pytest_runtest_makereport(item, call):
    """Allow pytest to run tests as incremental.

    Sucessive, related tests are marked as xfailed if a previous test fails.
    Taken from "https://docs.pytest.org/en/latest/example/simple.html"

    """
    if "incremental" in item.keywords and call.excinfo is not None:
        cls_name = str(item.cls)
        parametrize_index = (tuple(item.callspec.indices.values())
                             if hasattr(item, "callspec") else ())
        test_name = item.originalname or item.name
        _test_failed_incremental.setdefault(cls_name, {}).setdefault(
            parametrize_index, test_name)


def pytest_runtest_setup(item):
    """Mark a test as xfailed when an earlier test of its class failed."""
    if "incremental" in item.keywords:
        cls_name = str(item.cls)
        if cls_name in _test_failed_incremental:
            parametrize_index = (tuple(item.callspec.indices.values())
                                 if hasattr(item, "callspec") else ())
            test_name = _test_failed_incremental[cls_name].get(
                parametrize_index, None)
            if test_name is not None:
                pytest.xfail(f"previous test failed ({test_name})")
