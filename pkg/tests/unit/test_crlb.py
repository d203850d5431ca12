"""Test the Fisher information and the position bounds derived from it."""

import numpy as np
import pytest
import pytest_cases

import wavelock
from wavelock.crlb import CRLBResult, FisherMatrix
from wavelock.errors import ConfigError


@pytest.fixture
def spiral_information(spiral_scenario):
    """Exact-model point of the spiral scenario with its source spectra."""
    _, sources = wavelock.synthesize(spiral_scenario)
    spectra = np.array([source.half_spectrum for source in sources])
    theta = np.array([12.0, 10.0, 0.0, 0.0])
    return theta, spectra


def schur_complement(matrix, count):
    """Information left in the last `count` rows after eliminating the rest."""
    split = matrix.shape[0] - count
    nuisance = matrix[:split, :split]
    cross = matrix[:split, split:]
    return matrix[split:, split:] - cross.T @ np.linalg.solve(nuisance, cross)


class TestFisherMatrix:

    def test_shape_must_match_names(self):
        with pytest.raises(ValueError, match="does not match"):
            FisherMatrix(np.eye(3), ["x_0", "y_0"])

    def test_scaled_keeps_names(self):
        matrix = FisherMatrix(np.eye(2), ["x_0", "y_0"])
        doubled = matrix.scaled(2.0)
        np.testing.assert_array_equal(doubled.matrix, 2 * np.eye(2))
        assert doubled.names == ("x_0", "y_0")
        assert doubled.reduced

    def test_dense_flag(self):
        matrix = FisherMatrix.from_dense(np.eye(2), ["x_0", "y_0"])
        assert not matrix.reduced
        assert matrix.index("y_0") == 1


class TestCrlbPositions:

    def test_diagonal_matrix(self):
        matrix = FisherMatrix(np.diag([4.0, 2.0, 5.0]),
                              ["x_0", "y_0", "beta_1"])
        result = wavelock.crlb_positions(matrix)
        assert isinstance(result, CRLBResult)
        np.testing.assert_allclose(result.variances, [[0.25, 0.5]])
        assert result.null_directions == ()

    def test_correlated_parameters(self):
        information = np.array([[2.0, 1.0], [1.0, 2.0]])
        result = wavelock.crlb_positions(
            FisherMatrix(information, ["x_0", "y_0"]))
        np.testing.assert_allclose(result.variances,
                                   [np.diag(np.linalg.inv(information))])

    def test_two_sources(self):
        names = ["x_0", "x_1", "y_0", "y_1"]
        matrix = FisherMatrix(np.diag([1.0, 2.0, 4.0, 8.0]), names)
        result = wavelock.crlb_positions(matrix)
        np.testing.assert_allclose(result.variances,
                                   [[1.0, 0.25], [0.5, 0.125]])

    def test_singular_matrix_reports_null_direction(self):
        matrix = FisherMatrix(np.diag([4.0, 0.0, 5.0]),
                              ["x_0", "y_0", "beta_1"])
        result = wavelock.crlb_positions(matrix)
        assert result.null_directions == ("y_0", )
        np.testing.assert_allclose(result.variances, [[0.25, 0.0]])


class TestFisher:

    def test_symmetric_positive_semidefinite(self, spiral_scenario,
                                             spiral_information):
        theta, spectra = spiral_information
        information = wavelock.fisher(theta, spectra, spiral_scenario, 0.1)
        matrix = information.matrix
        assert information.names == ("x_0", "y_0", "beta_1", "beta_2")
        assert information.reduced
        np.testing.assert_array_equal(matrix, matrix.T)
        eigenvalues = np.linalg.eigvalsh(matrix)
        assert np.all(eigenvalues >= -1e-10 * np.max(eigenvalues))
        assert np.all(np.diag(matrix) > 0)

    def test_inverse_in_noise_variance(self, spiral_scenario,
                                       spiral_information):
        theta, spectra = spiral_information
        single = wavelock.fisher(theta, spectra, spiral_scenario, 0.1)
        double = wavelock.fisher(theta, spectra, spiral_scenario, 0.2)
        np.testing.assert_allclose(double.matrix, 0.5 * single.matrix,
                                   rtol=1e-12)

    def test_complex_convention_doubles(self, spiral_scenario,
                                        spiral_information):
        theta, spectra = spiral_information
        paper = wavelock.fisher(theta, spectra, spiral_scenario, 0.1)
        settings = wavelock.Settings(fisher_convention="complex",
                                     console_out_progress=False)
        complex_ = wavelock.fisher(theta, spectra, spiral_scenario, 0.1,
                                   settings=settings)
        np.testing.assert_allclose(complex_.matrix, 2 * paper.matrix,
                                   rtol=1e-12)

    @pytest.mark.parametrize("noise_variance", [0.0, -1.0])
    def test_non_positive_noise_variance(self, spiral_scenario,
                                         spiral_information, noise_variance):
        theta, spectra = spiral_information
        with pytest.raises(ValueError, match="must be positive"):
            wavelock.fisher(theta, spectra, spiral_scenario, noise_variance)

    def test_dense_schur_complement_equals_reduced(self, spiral_scenario,
                                                   spiral_information):
        theta, spectra = spiral_information
        settings = wavelock.Settings(band_mask="signal",
                                     console_out_progress=False)
        reduced = wavelock.fisher(theta, spectra, spiral_scenario, 0.1,
                                  settings=settings)
        dense = wavelock.fisher(theta, spectra, spiral_scenario, 0.1,
                                settings=settings, dense=True)
        assert not dense.reduced
        assert dense.names[-4:] == reduced.names
        eliminated = schur_complement(dense.matrix, len(reduced.names))
        scale = np.max(np.abs(reduced.matrix))
        np.testing.assert_allclose(eliminated, reduced.matrix, rtol=0,
                                   atol=1e-8 * scale)

    def test_dense_and_reduced_bounds_agree(self, spiral_scenario,
                                            spiral_information):
        theta, spectra = spiral_information
        settings = wavelock.Settings(band_mask="signal",
                                     console_out_progress=False)
        reduced = wavelock.fisher(theta, spectra, spiral_scenario, 0.1,
                                  settings=settings)
        dense = wavelock.fisher(theta, spectra, spiral_scenario, 0.1,
                                settings=settings, dense=True)
        np.testing.assert_allclose(
            wavelock.crlb_positions(dense).variances,
            wavelock.crlb_positions(reduced).variances, rtol=1e-6)


class TestReferenceParameters:

    def test_exact_model_recovered(self, spiral_scenario):
        params, scale = wavelock.reference_parameters(spiral_scenario)
        assert scale == pytest.approx(1.0, rel=1e-9)
        np.testing.assert_allclose(params.positions, [[12.0, 10.0]])
        np.testing.assert_allclose(params.beta, 0.0, atol=1e-8)

    def test_multipath_taps_copied(self, clustered_scenario):
        params, scale = wavelock.reference_parameters(clustered_scenario)
        np.testing.assert_allclose(params.gamma.ravel() * scale, [0.4, 0.3])
        np.testing.assert_allclose(params.delay.ravel(), [6.0, 11.0])


class TestSourceBounds:

    def test_noiseless_needs_explicit_variance(self, spiral_scenario):
        with pytest.raises(ConfigError, match="noise variance is needed"):
            wavelock.source_bounds(spiral_scenario)

    def test_positive_bounds(self, spiral_scenario):
        result = wavelock.source_bounds(spiral_scenario, 0.01)
        assert result.variances.shape == (1, 2)
        assert np.all(result.variances > 0)
        assert result.null_directions == ()

    def test_extra_sensor_never_loosens_bound(self, spiral_scenario):
        positions = spiral_scenario.array.positions
        larger = spiral_scenario.replace(array=wavelock.SensorArray(
            np.vstack((positions, [[20.0, 4.0]]))))
        fewer = wavelock.source_bounds(spiral_scenario, 0.01)
        more = wavelock.source_bounds(larger, 0.01)
        assert np.all(more.variances <= fewer.variances * (1 + 1e-9))

    def test_source_order_permutes_bounds(self, two_source_scenario):
        swapped = two_source_scenario.replace(
            sources=list(reversed(two_source_scenario.sources)))
        original = wavelock.source_bounds(two_source_scenario, 0.01)
        permuted = wavelock.source_bounds(swapped, 0.01)
        np.testing.assert_allclose(permuted.variances,
                                   original.variances[::-1], rtol=1e-6)

    def test_snr_implied_variance(self, spiral_scenario):
        noisy = spiral_scenario.replace(
            signal=spiral_scenario.signal.replace(snr_db=20.0))
        data, _ = wavelock.synthesize(spiral_scenario)
        variance = wavelock.noise_variance_for_snr(data.spectra,
                                                   noisy.signal, 20.0)
        np.testing.assert_allclose(
            wavelock.source_bounds(noisy).variances,
            wavelock.source_bounds(spiral_scenario, variance).variances,
            rtol=1e-10)


class TestSnrTable:

    def test_ten_decibels_is_one_decade(self, two_source_scenario):
        rows = wavelock.crlb_snr_table(two_source_scenario, [10.0, 20.0])
        assert len(rows) == 4
        assert [(row.snr_db, row.source) for row in rows] == [
            (10.0, 0), (10.0, 1), (20.0, 0), (20.0, 1)]
        for low, high in zip(rows[:2], rows[2:]):
            assert low.var_x == pytest.approx(10 * high.var_x, rel=1e-9)
            assert low.var_y == pytest.approx(10 * high.var_y, rel=1e-9)

    def test_synthesizes_once(self, spiral_scenario, monkeypatch):
        calls = []

        def counting_synthesize(scenario):
            calls.append(scenario)
            return wavelock.synthesize(scenario)

        monkeypatch.setattr(wavelock.crlb, "synthesize", counting_synthesize)
        rows = wavelock.crlb_snr_table(spiral_scenario, [0.0, 10.0, 20.0])
        assert len(rows) == 3
        assert len(calls) == 1

    def test_matches_source_bounds(self, spiral_scenario):
        point = spiral_scenario.replace(
            signal=spiral_scenario.signal.replace(snr_db=20.0))
        row, = wavelock.crlb_snr_table(point, [20.0])
        bounds = wavelock.source_bounds(point)
        assert row.var_x == pytest.approx(bounds.variances[0, 0], rel=1e-9)
        assert row.var_y == pytest.approx(bounds.variances[0, 1], rel=1e-9)


SPIRAL_FIXTURE_REF = pytest_cases.fixture_ref("spiral_scenario")
TWO_SOURCE_FIXTURE_REF = pytest_cases.fixture_ref("two_source_scenario")
CLUSTERED_FIXTURE_REF = pytest_cases.fixture_ref("clustered_scenario")
ALL_FIXTURE_REFS = [SPIRAL_FIXTURE_REF, TWO_SOURCE_FIXTURE_REF,
                    CLUSTERED_FIXTURE_REF]


@pytest_cases.parametrize("scenario", ALL_FIXTURE_REFS)
def test_reference_parameters_fit_noiseless_data(scenario):
    data, _ = wavelock.synthesize(scenario)
    params, _ = wavelock.reference_parameters(scenario)
    _, cost = wavelock.residual(params.to_array(), data, scenario)
    assert cost <= 1e-16 * np.sum(np.abs(data.spectra) ** 2)


@pytest_cases.parametrize("scenario", ALL_FIXTURE_REFS)
def test_information_positive_semidefinite(scenario):
    _, sources = wavelock.synthesize(scenario)
    params, scale = wavelock.reference_parameters(scenario)
    spectra = scale * np.array([source.half_spectrum for source in sources])
    information = wavelock.fisher(params, spectra, scenario, 1.0)
    assert len(information.names) == params.layout.size
    eigenvalues = np.linalg.eigvalsh(information.matrix)
    assert np.all(eigenvalues >= -1e-9 * np.max(eigenvalues))
