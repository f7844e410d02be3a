"""Tests for eigendecomposition and the convergence harness."""

import math

import numpy as np
import pytest

from traceforms.core.errors import (
    BoundaryHitsEigenvalue,
    InvalidParameter,
    NonpositiveEigenvalue,
    ShrinkingSupport,
)
from traceforms.numerics.measures import (
    Direction,
    geometric_weights,
    thinning_shell_sequence,
    truncate_sequence,
)
from traceforms.numerics.potentials import EvaluationGrid, operator_matrix
from traceforms.numerics.spectra import (
    _strictly_decreasing,
    cluster_groups,
    convergence_experiment,
    count_spectrum_in,
    eigendecompose,
    eigenfunction_extend,
    extension_fixed_point_residual,
    lambda_group,
    rayleigh_quotient_check,
    resolvent_convergence,
    spectrum_consistency,
)


@pytest.fixture
def two_atom_spectrum(exp_kernel, two_atoms):
    return eigendecompose(operator_matrix(exp_kernel, two_atoms))


class TestEigendecompose:
    def test_two_atom_eigenvalues(self, two_atom_spectrum):
        np.testing.assert_allclose(
            two_atom_spectrum.lambdas, [0.6839397205857212, 0.3160602794142788], rtol=1e-14
        )
        np.testing.assert_allclose(two_atom_spectrum.energies, [1.462117157, 3.163953413], rtol=1e-9)

    def test_eigenvectors_orthonormal(self, two_atom_spectrum):
        v = two_atom_spectrum.eigenvectors
        np.testing.assert_allclose(v.T @ v, np.eye(2), atol=1e-14)

    def test_negative_eigenvalue_rejected(self):
        with pytest.raises(NonpositiveEigenvalue):
            eigendecompose(np.array([[1.0, 0.0], [0.0, -0.5]]))

    def test_zero_eigenvalue_has_infinite_energy(self):
        result = eigendecompose(np.diag([1.0, 0.0]))
        assert result.energies[0] == 1.0
        assert math.isinf(result.energies[1])

    def test_multiplicity_groups(self):
        result = eigendecompose(np.diag([2.0, 1.0, 1.0]))
        assert result.multiplicities == [1, 2]

    def test_cluster_groups_relative(self):
        assert cluster_groups(np.array([1.0, 1.0 + 1e-12, 0.5]), 1e-8) == ((0, 1), (2,))

    def test_empty_spectrum(self):
        result = eigendecompose(np.zeros((0, 0)))
        assert result.size == 0
        assert result.top() == 0.0


class TestSpectralProperties:
    def test_consistency_across_representations(self, exp_kernel, two_atoms, two_atom_spectrum):
        report = spectrum_consistency(operator_matrix(exp_kernel, two_atoms), two_atom_spectrum)
        assert report["max_discrepancy"] < 1e-12
        assert report["multiplicities_match"]

    def test_extension_reproduces_support_values(self, exp_kernel, two_atoms, two_atom_spectrum):
        v = two_atom_spectrum.eigenvectors[:, 1]
        lam = two_atom_spectrum.lambdas[1]
        assert eigenfunction_extend(exp_kernel, two_atoms, lam, v, [1.0]) == pytest.approx(v[1])

    def test_extension_fixed_point(self, exp_kernel, two_atoms, two_atom_spectrum, line_grid):
        off = line_grid.off_support(two_atoms, margin=0.005)
        assert extension_fixed_point_residual(exp_kernel, two_atoms, two_atom_spectrum, off) < 1e-9

    def test_rayleigh_quotients_bound_ground_energy(self, exp_kernel, two_atoms, two_atom_spectrum):
        check = rayleigh_quotient_check(operator_matrix(exp_kernel, two_atoms), two_atom_spectrum, 1000, 0)
        assert check["holds"]
        assert check["min_sampled"] >= check["e0"]

    def test_count_spectrum(self, two_atom_spectrum):
        assert count_spectrum_in(two_atom_spectrum, (1.0, 2.0)) == 1
        assert count_spectrum_in(two_atom_spectrum, (1.0, 4.0)) == 2

    def test_count_rejects_eigenvalue_endpoint(self, two_atom_spectrum):
        with pytest.raises(BoundaryHitsEigenvalue):
            count_spectrum_in(two_atom_spectrum, (two_atom_spectrum.energies[0], 4.0))

    def test_count_rejects_bad_interval(self, two_atom_spectrum):
        with pytest.raises(InvalidParameter):
            count_spectrum_in(two_atom_spectrum, (2.0, 1.0))

    def test_lambda_group(self, two_atom_spectrum):
        assert lambda_group(two_atom_spectrum, 0.68, 0.01) == [(0, pytest.approx(0.6839397205857212))]


class TestConvergence:
    def test_lattice_family(self, exp_kernel, lattice_sequence, line_grid):
        report = convergence_experiment(exp_kernel, lattice_sequence, 3, line_grid, convergence_tol=1e-3)
        assert all(report.converged.values())
        assert all(report.gaps_nonincreasing.values())
        assert report.ground_state_monotone
        assert report.ground_state_identity_residual < 1e-10
        assert all(d.stable for d in report.dimension_stability)
        # n = 0 has a single atom, so only k = 0 is reported there
        assert len([r for r in report.rows if r.n == 0]) == 1

    def test_potential_difference_equals_difference_potential(self, exp_kernel, lattice_sequence, line_grid):
        report = convergence_experiment(exp_kernel, lattice_sequence, 1, line_grid)
        diffs = [report.potential_sup_diff[n] for n in lattice_sequence.labels]
        assert diffs == sorted(diffs, reverse=True)
        for n in lattice_sequence.labels:
            assert report.potential_sup_diff[n] == pytest.approx(report.bounds[n], rel=1e-9)

    def test_energies_settle_by_thirty(self, exp_kernel):
        sequence = truncate_sequence(geometric_weights(0.5), [5, 10, 20, 30], 40)
        grid = EvaluationGrid.build(-5.0, 5.0, 0.01)
        report = convergence_experiment(exp_kernel, sequence, 6, grid)
        assert all(report.gaps_nonincreasing.values())
        for row in report.rows:
            if row.n == 30:
                assert abs(row.E_n_k - report.limit_energies[row.k]) < 1e-6

    def test_short_schedule_is_not_converged(self, exp_kernel, line_grid):
        sequence = truncate_sequence(geometric_weights(0.5), [0, 1, 2], 40)
        report = convergence_experiment(exp_kernel, sequence, 2, line_grid)
        assert report.converged == {0: False, 1: False}
        for k, gap in report.final_gaps.items():
            assert type(gap) is float
            assert type(report.converged[k]) is bool
            assert gap > 1e-6

    def test_decreasing_family_ground_state_increases(self, newton_kernel):
        sequence = thinning_shell_sequence([2, 4, 8], slices=2)
        grid = EvaluationGrid.build(0.0, 3.0, 0.05, dim=3, measures=(sequence.terms[0],))
        report = convergence_experiment(newton_kernel, sequence, 1, grid)
        assert report.direction == Direction.DECREASING
        e0 = [report.ground_energies[n] for n in (2, 4, 8)]
        assert e0[0] < e0[1] < e0[2] < report.limit_energies[0]
        assert report.ground_state_monotone
        assert report.ground_state_identity_residual < 1e-10

    def test_tied_ground_energies_away_from_limit(self):
        assert not _strictly_decreasing([3.0, 2.0, 2.0], 1.0)
        assert _strictly_decreasing([3.0, 2.0, 1.0], 1.0)
        assert _strictly_decreasing([2.0, 1.0 + 1e-15, 1.0 + 1e-15], 1.0)

    def test_limit_term_has_zero_gap(self, exp_kernel, line_grid):
        sequence = truncate_sequence(geometric_weights(0.5), [2, 6], 6)
        report = convergence_experiment(exp_kernel, sequence, 2, line_grid)
        assert report.bounds[6] == 0.0
        assert all(r.gap_k < 1e-14 for r in report.rows if r.n == 6)

    def test_k_max_above_limit_rank(self, exp_kernel, line_grid):
        sequence = truncate_sequence(geometric_weights(0.5), [0], 1)
        with pytest.raises(ShrinkingSupport):
            convergence_experiment(exp_kernel, sequence, 4, line_grid)

    def test_strict_rank(self, exp_kernel, lattice_sequence, line_grid):
        with pytest.raises(ShrinkingSupport):
            convergence_experiment(exp_kernel, lattice_sequence, 3, line_grid, strict_rank=True)

    def test_threads_do_not_change_results(self, exp_kernel, lattice_sequence, line_grid):
        one = convergence_experiment(exp_kernel, lattice_sequence, 2, line_grid, threads=1)
        many = convergence_experiment(exp_kernel, lattice_sequence, 2, line_grid, threads=4)
        assert one.rows == many.rows


class TestResolventConvergence:
    def test_differences_decrease_within_bound(self, exp_kernel, lattice_sequence, line_grid):
        rows = resolvent_convergence(exp_kernel, lattice_sequence, 1.0, line_grid)
        diffs = [r.difference for r in rows]
        assert all(b <= a * (1 + 1e-10) + 1e-15 for a, b in zip(diffs, diffs[1:], strict=False))
        assert all(r.within_bound for r in rows)

    def test_single_atom_family(self, exp_kernel):
        sequence = truncate_sequence(geometric_weights(0.5), [0], 0)
        rows = resolvent_convergence(exp_kernel, sequence, 1.0, EvaluationGrid.build(-1.0, 1.0, 0.5))
        assert rows[0].difference == 0.0
        assert rows[0].bound_n == 0.0
