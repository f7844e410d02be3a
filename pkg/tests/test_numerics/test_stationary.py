"""Tests for stationary solutions on concentric spheres."""

import math

import numpy as np
import pytest

from traceforms.core.errors import InvalidParameter, PointTooCloseToSupport
from traceforms.numerics.measures import SphereFamilyMeasure, thinning_shell_sequence
from traceforms.numerics.potentials import EvaluationGrid
from traceforms.numerics.stationary import (
    far_field_error,
    harmonicity_residual,
    radial_derivative_jump,
    resolvent_identity_residual,
    stationary_compare,
    stationary_solve,
)


@pytest.fixture
def surface_field(unit_surface):
    return stationary_solve(unit_surface, 1.0, 1.0)


class TestStationarySolve:
    def test_surface_values(self, surface_field):
        np.testing.assert_allclose(surface_field.boundary_values, [0.5])
        np.testing.assert_allclose(surface_field.coefficients, [0.5])
        np.testing.assert_allclose(surface_field.radial([0.0, 0.5, 1.0, 2.0, 4.0]), [0.5, 0.5, 0.5, 0.25, 0.125])

    def test_field_at_points(self, surface_field):
        pts = np.array([[0.0, 0.0, 2.0], [3.0, 4.0, 0.0]])
        np.testing.assert_allclose(surface_field(pts), [0.25, 0.1])

    def test_alpha_zero_is_potential(self, unit_surface):
        field = stationary_solve(unit_surface, 0.0, 1.0)
        np.testing.assert_allclose(field.radial([0.0, 2.0]), [1.0, 0.5])

    def test_callable_data(self):
        measure = SphereFamilyMeasure(radii=np.array([1.0, 2.0]), masses=np.array([1.0, 1.0]))
        field = stationary_solve(measure, 0.5, lambda r: 1.0 / r)
        np.testing.assert_allclose(field.data, [1.0, 0.5])
        pts = np.array([[0.0, 3.0, 0.0], [0.0, 0.0, 1.5]])
        assert resolvent_identity_residual(field, pts) < 1e-12

    def test_zero_measure(self):
        empty = SphereFamilyMeasure(radii=np.zeros(0), masses=np.zeros(0))
        field = stationary_solve(empty, 1.0, 1.0)
        np.testing.assert_array_equal(field.radial([0.0, 1.0]), [0.0, 0.0])

    def test_invalid(self, unit_surface):
        with pytest.raises(InvalidParameter):
            stationary_solve(unit_surface, -1.0, 1.0)
        with pytest.raises(InvalidParameter):
            stationary_solve(unit_surface, 1.0, np.array([1.0, 2.0]))


class TestStationaryChecks:
    def test_harmonic_off_sphere(self, surface_field):
        pts = np.array([[2.0, 0.0, 0.0], [0.0, 0.0, 0.3], [1.0, 1.0, 1.0]])
        assert harmonicity_residual(surface_field, pts) < 1e-6

    def test_point_too_close(self, surface_field):
        with pytest.raises(PointTooCloseToSupport):
            harmonicity_residual(surface_field, np.array([[1.001, 0.0, 0.0]]), h=1e-3)

    def test_flux_jump(self, surface_field):
        (jump,) = radial_derivative_jump(surface_field)
        assert jump.radius == 1.0
        assert jump.expected == pytest.approx(0.5)
        assert jump.error < 1e-4

    def test_far_field(self, surface_field):
        assert surface_field.far_field_constant() == pytest.approx(0.5)
        assert far_field_error(surface_field, 1e3) < 1e-12

    def test_identity(self, surface_field):
        pts = np.array([[0.0, 0.0, 0.0], [5.0, 0.0, 0.0]])
        assert resolvent_identity_residual(surface_field, pts) < 1e-12


class TestStationaryCompare:
    def test_thinning_shells_within_bound(self):
        sequence = thinning_shell_sequence([2, 4, 8], slices=2)
        grid = EvaluationGrid.build(0.0, 3.0, 0.05, dim=3, measures=(sequence.terms[0],))
        comparison = stationary_compare(sequence, 1.0, 1.0, grid)
        assert comparison.passed
        assert comparison.monotone
        assert [r.n for r in comparison.rows] == [2, 4, 8]
        assert all(r.bound > 0 for r in comparison.rows)

    def test_rejects_atomic_sequence(self, lattice_sequence, line_grid):
        with pytest.raises(InvalidParameter):
            stationary_compare(lattice_sequence, 1.0, 1.0, line_grid)

    def test_surface_mass(self, unit_surface):
        assert unit_surface.masses[0] == pytest.approx(4 * math.pi)
