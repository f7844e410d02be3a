"""Tests for Green kernels."""

import math

import numpy as np
import pytest
from pydantic import ValidationError

from traceforms.core.errors import CoincidentPoints, DimensionMismatch, NonpositiveRadius
from traceforms.numerics.kernels import (
    Kernel,
    KernelType,
    kernel_eval,
    kernel_singularity_params,
    mutual_potential_sphere,
    sphere_green_matrix,
)


class TestKernel:
    """Tests for closed-form kernel evaluation."""

    def test_exponential_value(self, exp_kernel):
        assert kernel_eval(exp_kernel, 0.0, 1.0) == pytest.approx(0.18393972058572117, rel=1e-15)

    def test_exponential_diagonal_is_half(self, exp_kernel):
        assert kernel_eval(exp_kernel, 2.0, 2.0) == pytest.approx(0.5)

    def test_newtonian_value(self, newton_kernel):
        value = kernel_eval(newton_kernel, [0.0, 0.0, 0.0], [2.0, 0.0, 0.0])
        assert value == pytest.approx(1 / (8 * math.pi), rel=1e-14)

    def test_riesz_beta(self):
        kernel = Kernel.riesz(1, 0.5)
        assert kernel.beta == pytest.approx(0.5)
        assert kernel.is_singular

    def test_newtonian_needs_transience(self):
        with pytest.raises(ValidationError):
            Kernel(type=KernelType.NEWTONIAN, d=2)

    def test_riesz_alpha_range(self):
        with pytest.raises(ValidationError):
            Kernel.riesz(1, 1.5)

    def test_singular_diagonal_rejected(self, newton_kernel):
        with pytest.raises(CoincidentPoints):
            kernel_eval(newton_kernel, [1.0, 0.0, 0.0], [1.0, 0.0, 0.0])

    def test_dimension_mismatch(self, newton_kernel):
        with pytest.raises(DimensionMismatch):
            newton_kernel.matrix(np.zeros((2, 2)), np.zeros((2, 2)))

    def test_matrix_is_symmetric(self, exp_kernel):
        pts = np.array([0.0, 0.5, 3.0])
        g = exp_kernel.matrix(pts, pts)
        assert np.array_equal(g, g.T)

    def test_singularity_params(self, exp_kernel, newton_kernel):
        assert kernel_singularity_params(exp_kernel)[0] == 0.0
        beta, c, _ = kernel_singularity_params(newton_kernel)
        assert beta == 1.0
        assert c == pytest.approx(1 / (4 * math.pi))


class TestSpheres:
    """Tests for concentric sphere potentials."""

    def test_mutual_potential(self):
        value = mutual_potential_sphere((1.0, 4 * math.pi), (2.0, 4 * math.pi))
        assert value == pytest.approx(2 * math.pi)

    def test_mutual_potential_rejects_zero_radius(self):
        with pytest.raises(NonpositiveRadius):
            mutual_potential_sphere((0.0, 1.0), (1.0, 1.0))

    def test_green_matrix_mean_value(self):
        g = sphere_green_matrix(np.array([1.0]), np.array([0.0, 0.5, 1.0, 2.0]))
        expected = np.array([1.0, 1.0, 1.0, 0.5]) / (4 * math.pi)
        np.testing.assert_allclose(g[:, 0], expected)
