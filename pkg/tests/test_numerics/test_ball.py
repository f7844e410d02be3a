"""Tests for the unit ball spectrum and the shell potential gap."""

import math

import numpy as np
import pytest

from traceforms.core.errors import InvalidParameter
from traceforms.numerics.ball import (
    annulus_gap_slope,
    annulus_potential_gap,
    ball_closed_form,
    ball_eigenvalue,
    ball_eigenvalue_table,
    spherical_bessel_zeros,
)


class TestBesselZeros:
    def test_order_zero(self):
        np.testing.assert_allclose(spherical_bessel_zeros(0, 3), [math.pi, 2 * math.pi, 3 * math.pi])

    def test_order_one(self):
        np.testing.assert_allclose(
            spherical_bessel_zeros(1, 2), [4.493409457909064, 7.725251836937707], rtol=1e-13
        )

    def test_invalid(self):
        with pytest.raises(InvalidParameter):
            spherical_bessel_zeros(-1, 3)
        with pytest.raises(InvalidParameter):
            spherical_bessel_zeros(1, 0)


class TestBallEigenvalue:
    def test_closed_forms(self):
        assert ball_closed_form(0) == pytest.approx(1.0 / math.tanh(1.0) - 1.0, rel=1e-14)
        assert ball_closed_form(1) == pytest.approx(1.194528049465325, rel=1e-12)

    def test_ground_energy(self):
        e = ball_eigenvalue(0)
        assert abs(e.value - 0.3130352854993313) < 1e-8
        assert e.multiplicity == 1

    def test_first_excited(self):
        e = ball_eigenvalue(1, tol=1e-7)
        assert abs(e.value - 1.194528049465325) < 1e-6
        assert e.multiplicity == 3

    def test_bracket_contains_closed_form(self):
        for e in ball_eigenvalue_table(4):
            assert e.lower - 1e-12 <= e.closed_form <= e.upper + 1e-12
            assert e.error_bound < 1e-8
            assert e.truncation == len(e.zeros)

    def test_table_increases(self):
        values = [e.value for e in ball_eigenvalue_table(5)]
        assert values == sorted(values)
        assert len(set(values)) == len(values)

    def test_invalid(self):
        with pytest.raises(InvalidParameter):
            ball_eigenvalue(-1)
        with pytest.raises(InvalidParameter):
            ball_eigenvalue(0, tol=0.0)


class TestAnnulusGap:
    def test_cavity_value(self):
        gap = annulus_potential_gap(2)
        assert gap.cavity_value == pytest.approx(1.5 * math.pi)
        assert gap.value == pytest.approx(1.5 * math.pi, rel=1e-10)

    @pytest.mark.parametrize("n", [2, 4, 8, 16, 32])
    def test_supremum_on_cavity(self, n):
        gap = annulus_potential_gap(n)
        assert gap.argmax_radius <= 1.0 - 1.0 / n + 1e-12
        assert gap.value == pytest.approx(gap.cavity_value, rel=1e-10)

    def test_decays_like_one_over_n(self):
        gaps = [annulus_potential_gap(n) for n in (2, 4, 8, 16, 32)]
        assert abs(annulus_gap_slope(gaps) + 1.0) < 0.1

    def test_invalid(self):
        with pytest.raises(InvalidParameter):
            annulus_potential_gap(1)
        with pytest.raises(InvalidParameter):
            annulus_potential_gap(4, quadrature_points=10)
        with pytest.raises(InvalidParameter):
            annulus_gap_slope([annulus_potential_gap(2)])
