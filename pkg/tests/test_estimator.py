import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from emphlab.armodel import rho_of_alpha
from emphlab.dsp import AutocorrPair
from emphlab.estimator import (ALPHA_MAX, CubicCoeffs, build_cubic, build_table,
                               DeemphasisTable, estimate_alpha_encoder, lookup_alpha,
                               rho_max, solve_alpha)

GAMMAS = [0.3, 0.5, 0.7, 0.9]
ALPHA_GRID = np.round(np.arange(-49, 50) * 0.02, 2)


def printed_cubic(gamma, rho):
    """Linear coefficient gamma * (gamma - 1), as the cubic is sometimes written."""
    return CubicCoeffs(gamma * (1 - gamma), gamma * rho * (gamma - 2), gamma * (gamma - 1), rho)


def roots_in_unit_interval(c: CubicCoeffs):
    r = np.roots([c.c3, c.c2, c.c1, c.c0])
    return sorted(z.real for z in r if abs(z.imag) < 1e-9 and -1 < z.real < 1)


class TestEncoderEstimate:
    def test_ratio(self):
        assert estimate_alpha_encoder(AutocorrPair(2, 1, 0.5)) == (0.5, False)

    def test_clamped(self):
        assert estimate_alpha_encoder(AutocorrPair(1, 1, 1.0)).alpha == 0.999
        assert estimate_alpha_encoder(AutocorrPair(1, -1, -1.0)).alpha == -0.999

    def test_silent(self):
        est = estimate_alpha_encoder(AutocorrPair(0, 0, None))
        assert est.alpha == 0 and est.silent


class TestCubic:
    def test_rho_zero(self):
        np.testing.assert_allclose(build_cubic(0.7, 0.0), (0.21, 0.0, -0.3, 0.0), atol=1e-15)

    def test_known_solution(self):
        rho = rho_of_alpha(0.9, 0.7)
        assert abs(build_cubic(0.7, rho)(0.9)) < 1e-12
        assert abs(build_cubic(0.7, 0.44469)(0.9)) < 1e-5

    def test_printed_coefficient_is_inconsistent(self):
        rho = rho_of_alpha(0.9, 0.7)
        assert abs(printed_cubic(0.7, rho)(0.9)) == pytest.approx(0.0819, abs=1e-3)
        # gamma -> 0: corrected form reduces to -a + rho, printed form to rho = 0
        c = build_cubic(1e-9, 0.4)
        assert roots_in_unit_interval(c) == [pytest.approx(0.4, abs=1e-6)]
        assert printed_cubic(1e-9, 0.4)(0.4) == pytest.approx(0.4, abs=1e-6)

    def test_small_gamma_limit(self):
        for rho in (-0.6, 0.1, 0.8):
            assert solve_alpha(1e-6, rho) == pytest.approx(rho, abs=1e-4)

    @pytest.mark.parametrize("g,r", [(0.0, 0.1), (1.0, 0.1), (0.5, 1.0), (0.5, -1.2)])
    def test_invalid(self, g, r):
        with pytest.raises(ValueError):
            build_cubic(g, r)

    @pytest.mark.parametrize("g", GAMMAS)
    def test_single_root_in_unit_interval(self, g):
        fine = np.linspace(-0.99999, 0.99999, 20001)
        for a in ALPHA_GRID:
            c = build_cubic(g, rho_of_alpha(a, g))
            vals = c(fine)
            assert np.count_nonzero(np.diff(vals > 0)) == 1
            roots = roots_in_unit_interval(c)
            assert len(roots) == 1 and roots[0] == pytest.approx(a, abs=1e-7)


class TestSolveAlpha:
    @pytest.mark.parametrize("g,rho,expected,tol", [
        (0.7, 0.0, 0.0, 1e-12),
        (0.7, 0.44469, 0.9, 1e-4),
        (0.7, -0.44469, -0.9, 1e-4),
        (0.5, 0.269231, 0.5, 1e-4),
    ])
    def test_examples(self, g, rho, expected, tol):
        assert solve_alpha(g, rho) == pytest.approx(expected, abs=tol)

    @pytest.mark.parametrize("g", GAMMAS)
    def test_round_trip(self, g):
        rho = rho_of_alpha(ALPHA_GRID, g)
        assert np.max(np.abs(solve_alpha(g, rho) - ALPHA_GRID)) <= 1e-8
        for a, r in zip(ALPHA_GRID[::7], rho[::7]):
            assert abs(rho_of_alpha(solve_alpha(g, r), g) - r) <= 1e-8

    @given(st.floats(0.01, 0.99), st.floats(-0.99, 0.99))
    def test_odd_symmetry(self, g, rho):
        assert solve_alpha(g, -rho) == pytest.approx(-solve_alpha(g, rho), abs=1e-10)

    def test_clamps_out_of_domain(self):
        rm = rho_max(0.7)
        assert solve_alpha(0.7, rm + 0.05) == pytest.approx(ALPHA_MAX, abs=1e-9)
        assert solve_alpha(0.7, -0.99) == pytest.approx(-ALPHA_MAX, abs=1e-9)

    def test_array_input(self):
        out = solve_alpha(0.7, np.array([0.0, 0.44469]))
        assert out.shape == (2,) and out[0] == 0.0

    def test_more_sensitive_near_zero(self):
        g, h = 0.7, 1e-4
        rm = rho_max(g)
        slope0 = (solve_alpha(g, h) - solve_alpha(g, -h)) / (2 * h)
        slope_top = (solve_alpha(g, rm - h) - solve_alpha(g, rm - 3 * h)) / (2 * h)
        assert abs(slope0) > abs(slope_top)

    @pytest.mark.parametrize("g", [0.5, 0.7, 0.9])
    def test_deemphasis_curve_shape(self, g):
        rho = np.linspace(-rho_max(g), rho_max(g), 201)
        curve = g * solve_alpha(g, rho)
        assert curve[100] == pytest.approx(0.0, abs=1e-12)
        assert np.all(np.diff(curve) > 0)


class TestTable:
    def test_three_entries(self):
        t = build_table(0.7, 3)
        np.testing.assert_array_equal(t.alpha_values, [-0.999, 0.0, 0.999])
        rm = rho_max(0.7)
        np.testing.assert_allclose(t.rho_grid, [-rm, 0.0, rm], rtol=1e-15)
        assert t.domain == (t.rho_grid[0], t.rho_grid[-1])

    @pytest.mark.parametrize("g", [0.1, 0.5, 0.9])
    def test_strictly_increasing(self, g):
        t = build_table(g, 257)
        assert np.all(np.diff(t.rho_grid) > 0) and np.all(np.diff(t.alpha_values) > 0)
        np.testing.assert_array_equal(t.rho_grid, rho_of_alpha(t.alpha_values, g))

    def test_grid_points_exact(self):
        t = build_table(0.7, 1024)
        np.testing.assert_array_equal(lookup_alpha(t, t.rho_grid), t.alpha_values)

    def test_zero_and_clamp(self):
        for n in (1024, 1025):
            t = build_table(0.7, n)
            assert lookup_alpha(t, 0.0) == pytest.approx(0.0, abs=1e-15)
            assert lookup_alpha(t, 0.99) == ALPHA_MAX
            assert lookup_alpha(t, -0.99) == -ALPHA_MAX

    def test_against_solver(self):
        t = build_table(0.7, 1024)
        rho = np.random.default_rng(5).uniform(*t.domain, 100)
        assert np.max(np.abs(lookup_alpha(t, rho) - solve_alpha(0.7, rho))) <= 5e-4

    def test_csv_round_trip(self, tmp_path):
        t = build_table(0.5, 64)
        p = tmp_path / "t.csv"
        t.to_csv(p)
        header = p.read_text().splitlines()[0]
        assert header == "rho,alpha,gamma_alpha"
        back = DeemphasisTable.from_csv(p, 0.5)
        np.testing.assert_allclose(back.rho_grid, t.rho_grid, rtol=1e-15)
        np.testing.assert_allclose(back.alpha_values, t.alpha_values, rtol=1e-15)

    def test_invalid(self):
        with pytest.raises(ValueError):
            build_table(1.0, 32)
