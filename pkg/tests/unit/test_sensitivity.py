"""Test the closed-form residual and projector derivatives."""

import numpy as np
import pytest

import wavelock
from wavelock import sensitivity
from wavelock.cost import SteeringModel


def richardson_jacobian(func, theta, relative_step=1e-5):
    """Central differences at steps h and 2h combined to fourth order."""
    fine = sensitivity.finite_difference_jacobian(func, theta, relative_step)
    coarse = sensitivity.finite_difference_jacobian(func, theta,
                                                    2 * relative_step)
    return (4 * fine - coarse) / 3


INSTANCE_SHAPES = [
    dict(number_sources=1, attenuation_order=0, paths_per_key=0),
    dict(number_sources=1, attenuation_order=2, paths_per_key=1),
    dict(number_sources=2, attenuation_order=1, paths_per_key=0),
    dict(number_sources=2, attenuation_order=2, paths_per_key=1),
    dict(number_sources=2, attenuation_order=1, paths_per_key=2,
         number_clusters=2, number_sensors=6),
]


class TestResidualJacobian:

    @pytest.mark.parametrize("shape", INSTANCE_SHAPES)
    def test_matches_finite_differences(self, utils, rng, shape):
        for _ in range(4):
            model, theta, data = utils.random_instance(rng, **shape)
            analytic = sensitivity.dQ_dtheta(theta, data, model).real
            numeric = richardson_jacobian(utils.stacked_residual(model, data),
                                          theta)
            assert analytic.shape == numeric.shape
            assert sensitivity.jacobian_check(analytic, numeric) < 1e-6

    def test_reuses_projection(self, utils, rng):
        model, theta, data = utils.random_instance(rng)
        projection = model.projection(theta, data)
        fresh = sensitivity.dQ_dtheta(theta, data, model)
        reused = sensitivity.dQ_dtheta(theta, data, model,
                                       projection=projection)
        np.testing.assert_array_equal(fresh.complex, reused.complex)
        assert fresh.layout == model.layout

    def test_real_embedding(self, utils, rng):
        model, theta, data = utils.random_instance(rng)
        jacobian = sensitivity.dQ_dtheta(theta, data, model)
        q = model.projection(theta, data).residual.ravel()
        assert jacobian.real.shape == (2 * q.size, model.layout.size)
        stacked = np.concatenate((q.real, q.imag))
        np.testing.assert_allclose(jacobian.real.T @ stacked,
                                   (jacobian.complex.conj().T @ q).real,
                                   rtol=1e-10, atol=1e-14)

    def test_zero_gradient_at_noiseless_truth(self, spiral_scenario):
        data, _ = wavelock.synthesize(spiral_scenario)
        theta = np.array([12.0, 10.0, 0.0, 0.0])
        jacobian = sensitivity.dQ_dtheta(theta, data, spiral_scenario)
        q, _ = wavelock.residual(theta, data, spiral_scenario)
        gradient = jacobian.real.T @ np.concatenate((q.real, q.imag))
        scale = np.linalg.norm(jacobian.real) * np.linalg.norm(data.spectra)
        assert np.all(np.abs(gradient) <= 1e-12 * scale)

    def test_noiseless_truth_columns_are_model_derivatives(
            self, spiral_scenario):
        """At an exact fit dQ = -(I - Pi) dK~ S, so Pi dQ = 0."""
        data, _ = wavelock.synthesize(spiral_scenario)
        theta = np.array([12.0, 10.0, 0.0, 0.0])
        model = SteeringModel.from_scenario(spiral_scenario)
        projection = model.projection(theta, data)
        derivative = sensitivity.residual_jacobian(model, theta, projection)
        np.testing.assert_allclose(projection.project(derivative), 0.0,
                                   atol=1e-10 * np.max(np.abs(derivative)))


class TestSteeringDerivatives:

    def test_beta_block_is_next_R(self, spiral_scenario):
        theta = np.array([9.0, 14.0, 0.3, -0.1])
        R = wavelock.build_R(theta, spiral_scenario, 5)
        for index in (1, 2):
            np.testing.assert_array_equal(
                sensitivity.dK_dbeta(theta, spiral_scenario, 5, index),
                R[index])

    def test_beta_index_out_of_range(self, spiral_scenario):
        with pytest.raises(IndexError, match="1...2"):
            sensitivity.dK_dbeta([9.0, 14.0, 0.0, 0.0], spiral_scenario, 5,
                                 3)

    def test_position_support(self, two_source_scenario):
        theta = np.array([4.5, 11.0, 2.5, 10.5, 0.2])
        for source in (0, 1):
            for derivative in (sensitivity.dK_dx, sensitivity.dK_dy):
                block = derivative(theta, two_source_scenario, 7, source)
                assert block.shape == (12, 2)
                assert np.all(block[:, source] != 0)
                assert not np.any(block[:, 1 - source])

    def test_source_index_out_of_range(self, two_source_scenario):
        with pytest.raises(IndexError, match="0...1"):
            sensitivity.dK_dx(np.zeros(5) + 1.0, two_source_scenario, 0, 2)

    def test_dc_multipath_derivatives(self, clustered_scenario):
        theta = np.array([5.0, 9.0, 0.0, 0.4, 0.3, 6.0, 11.0])
        key = (1, 0, 0)
        d_gamma = sensitivity.dH_dgamma(theta, clustered_scenario, 0, key)
        d_tau = sensitivity.dH_dtau(theta, clustered_scenario, 0, key)
        np.testing.assert_array_equal(d_gamma[:4], 0.0)
        np.testing.assert_array_equal(d_gamma[4:], 1.0)
        np.testing.assert_array_equal(d_tau, 0.0)

    def test_delay_derivative_away_from_dc(self, clustered_scenario):
        theta = np.array([5.0, 9.0, 0.0, 0.4, 0.3, 6.0, 11.0])
        d_tau = sensitivity.dH_dtau(theta, clustered_scenario, 3, (0, 0, 0))
        expected = (-2j * np.pi * 3 / 80 * 0.4
                    * np.exp(-2j * np.pi * 3 * 6.0 / 80))
        np.testing.assert_allclose(d_tau[:4, 0], expected, rtol=1e-13)
        np.testing.assert_array_equal(d_tau[4:], 0.0)

    def test_unknown_multipath_key(self, clustered_scenario):
        theta = np.array([5.0, 9.0, 0.0, 0.4, 0.3, 6.0, 11.0])
        with pytest.raises(IndexError):
            sensitivity.dH_dgamma(theta, clustered_scenario, 0, (2, 0, 0))


class TestProjectorDerivative:

    @pytest.mark.parametrize("index", [0, 1, 2])
    def test_matches_finite_differences(self, clustered_scenario, index):
        theta = np.array([5.2, 8.7, 0.1, 0.4, 0.3, 6.0, 11.0])
        f = 7
        derivative, _ = sensitivity.projector_derivative(
            theta, clustered_scenario, f, index)
        step = 1e-6 * (1 + abs(theta[index]))
        forward = theta.copy()
        backward = theta.copy()
        forward[index] += step
        backward[index] -= step
        numeric = (sensitivity.projector(forward, clustered_scenario, f)
                   - sensitivity.projector(backward, clustered_scenario, f)
                   ) / (2 * step)
        assert (np.linalg.norm(derivative - numeric)
                <= 1e-6 * np.linalg.norm(numeric))

    def test_structure(self, two_source_scenario):
        theta = np.array([4.5, 11.0, 2.5, 10.5, 0.2])
        derivative, p_matrix = sensitivity.projector_derivative(
            theta, two_source_scenario, 9, 0)
        assert derivative.shape == (12, 12)
        np.testing.assert_allclose(derivative, derivative.conj().T,
                                   atol=1e-14)
        np.testing.assert_allclose(derivative, -(p_matrix
                                                 + p_matrix.conj().T))
        projector = sensitivity.projector(theta, two_source_scenario, 9)
        np.testing.assert_allclose(projector @ projector, projector,
                                   atol=1e-12)
        # Pi dPi Pi vanishes for an orthogonal projector
        np.testing.assert_allclose(projector @ derivative @ projector, 0.0,
                                   atol=1e-12)


    def test_projector_is_public(self, two_source_scenario):
        assert "projector" in sensitivity.__all__
        theta = np.array([4.5, 11.0, 2.5, 10.5, 0.2])
        projector = sensitivity.projector(theta, two_source_scenario, 9)
        np.testing.assert_allclose(projector, projector.conj().T,
                                   atol=1e-12)
        assert np.trace(projector).real == pytest.approx(2.0, abs=1e-9)


class TestJacobianCheck:

    def test_identical(self):
        matrix = np.arange(6.0).reshape(3, 2)
        assert sensitivity.jacobian_check(matrix, matrix) == 0.0

    def test_relative_column_error(self):
        numeric = np.array([[1.0, 0.0], [0.0, 10.0]])
        analytic = np.array([[1.1, 0.0], [0.0, 10.0]])
        assert sensitivity.jacobian_check(analytic, numeric) == (
            pytest.approx(0.1))

    def test_finite_difference_of_linear_map(self, rng):
        matrix = rng.standard_normal((4, 3))
        numeric = sensitivity.finite_difference_jacobian(
            lambda theta: matrix @ theta, rng.standard_normal(3))
        np.testing.assert_allclose(numeric, matrix, rtol=1e-7, atol=1e-8)
