"""Cell-based rearrangement, the measure substitution, and the flux
identity / inequality checks.

Cell sorting is exactly equimeasurable at grid resolution, so the norm
and level-measure tests are tight.  The flux identity is checked against
ball solutions where it holds with equality at solver precision; the
flux inequality on the square carries lattice counting noise of order h
(sorted quantile values near a level fluctuate by the number of grid
cells the level curve crosses), so those assertions use the measured
envelope at each grid spacing.
"""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ppwlab.domains import disk_grid, rectangle_grid, solve_domain
from ppwlab.errors import ContractError, RangeError
from ppwlab.potentials import PowerPotential, ZeroPotential
from ppwlab.radial import first_two
from ppwlab.rearrange import (RadialProfile, chiti_crossings,
                              flux_identity_residual,
                              flux_inequality_defect, rearrange,
                              sharp_transform, unit_ball_measure)


@pytest.fixture(scope="module")
def disk_solution_r2():
    # disk Dirichlet solve with V = r^2 and the matching ball solution
    V = PowerPotential(1.0, 2.0)
    g = disk_grid(1.0, 1.0 / 128)
    spec = solve_domain(g, V=V, k=2)
    ft = first_two(2, 1.0, V)
    return g, spec, ft


@pytest.fixture(scope="module")
def square_solution():
    g = rectangle_grid(1.0, 1.0, 1.0 / 128)
    return g, solve_domain(g, k=2)


class TestUnitBallMeasure:
    def test_known_values(self):
        assert abs(unit_ball_measure(2) - math.pi) < 1e-15
        assert abs(unit_ball_measure(3) - 4.0 * math.pi / 3.0) < 1e-15
        assert abs(unit_ball_measure(1) - 2.0) < 1e-15

    @pytest.mark.parametrize("bad", [0, -1, 2.5])
    def test_rejects_bad_dimension(self, bad):
        with pytest.raises(RangeError):
            unit_ball_measure(bad)


class TestRearrange:
    def test_radial_potential_is_fixed_point(self):
        # V = r^2 is already radially increasing, so V* = V up to the
        # cell-to-radius quantization of the staircase disk
        g = disk_grid(1.0, 1.0 / 64)
        rr = g.radii()[g.mask]
        prof = rearrange(rr**2, g.h * g.h, "increasing", n=2)
        err = np.max(np.abs(prof.values - prof.radii**2))
        assert err < 5e-3

    def test_constant_is_invariant(self):
        vals = np.full(400, 3.25)
        prof = rearrange(vals, 0.01, "decreasing", n=2)
        assert np.all(prof.values == 3.25)
        assert abs(prof.R_max - math.sqrt(4.0 / math.pi)) < 1e-14
        assert prof.total_measure == 4.0

    def test_discrete_norm_is_preserved_exactly(self, square_solution):
        g, spec = square_solution
        u = spec.u1[g.mask]
        mu = g.h * g.h
        prof = rearrange(u, mu, "decreasing", n=2)
        # the sorted multiset is identical, so cell-measure sums agree
        # to rounding; endpoint splice rows carry no measure
        src = np.sum(u * u) * mu
        dst = np.sum(prof.values[1:-1] ** 2) * mu
        assert abs(src - dst) <= 1e-12 * src

    def test_weighted_l2_norm_close_to_grid_norm(self, square_solution):
        # continuum reading of the same norm: radial quadrature of the
        # profile against the grid sum; they differ by O(h) interpolation
        g, spec = square_solution
        u = spec.u1[g.mask]
        prof = rearrange(u, g.h * g.h, "decreasing", n=2)
        r = np.linspace(0.0, prof.R_max, 8193)
        w = 2.0 * math.pi * r
        nrm = np.trapezoid(prof(r) ** 2 * w, r)
        src = np.sum(u * u) * g.h * g.h
        assert abs(nrm - src) < 5e-3 * src

    def test_monotone_directions(self):
        rng = np.random.default_rng(7)
        v = rng.uniform(0.0, 5.0, size=500)
        up = rearrange(v, 0.002, "increasing")
        dn = rearrange(v, 0.002, "decreasing")
        assert np.all(np.diff(up.values) >= 0)
        assert np.all(np.diff(dn.values) <= 0)

    @given(st.lists(st.floats(0.0, 1e3), min_size=1, max_size=300))
    @settings(max_examples=40, deadline=None)
    def test_equimeasurable_at_every_level(self, samples):
        v = np.asarray(samples)
        mu = 0.5
        prof = rearrange(v, mu, "increasing", n=2)
        # measure{profile > t} vs cell count above t: within one cell
        for t in np.quantile(v, [0.0, 0.3, 0.7, 1.0]):
            src = np.count_nonzero(v > t) * mu
            r = prof.radii[1:-1]
            above = prof.values[1:-1] > t
            if not np.any(above):
                dst = 0.0
            else:
                # increasing profile: values above t occupy the outer
                # annulus starting at the first qualifying cell radius
                r_in = r[above][0]
                dst = prof.total_measure - prof.C_n * r_in**2
            assert abs(dst - src) <= mu + 1e-12

    def test_rejects_bad_input(self):
        with pytest.raises(ContractError, match="empty"):
            rearrange([], 0.1, "increasing")
        with pytest.raises(ContractError, match="finite"):
            rearrange([1.0, np.nan], 0.1, "increasing")
        with pytest.raises(RangeError, match="measure"):
            rearrange([1.0], 0.0, "increasing")
        with pytest.raises(RangeError, match="direction"):
            rearrange([1.0], 0.1, "sideways")
        with pytest.raises(RangeError, match="nonnegative"):
            rearrange([-1.0, 2.0], 0.1, "increasing")


class TestSharpTransform:
    def test_quadratic_becomes_linear_in_measure(self):
        g = disk_grid(1.0, 1.0 / 64)
        rr = g.radii()[g.mask]
        prof = rearrange(rr**2, g.h * g.h, "increasing", n=2)
        s, f = sharp_transform(prof)
        assert np.max(np.abs(f - s / math.pi)) < 5e-3

    def test_monotone_composition_and_roundtrip(self, square_solution):
        g, spec = square_solution
        prof = rearrange(spec.u1[g.mask], g.h * g.h, "decreasing", n=2)
        s, f = sharp_transform(prof)
        assert np.all(np.diff(f) <= 0)
        r_back = (s / prof.C_n) ** 0.5
        assert np.max(np.abs(r_back - prof.radii)) < 1e-12
        assert f is not prof.values and np.array_equal(f, prof.values)


class TestFluxIdentity:
    @pytest.mark.parametrize("pot", [None, PowerPotential(1.0, 2.0)])
    def test_ball_solution_satisfies_identity(self, pot):
        V = pot if pot is not None else ZeroPotential()
        ft = first_two(2, 1.0, V)
        assert flux_identity_residual(ft.z1, V, ft.lambda1) <= 1e-5

    def test_three_dimensional_ball(self):
        # also pins the measure-coordinate exponent s^(2/n - 2): the
        # n = 2 cases cannot distinguish it from other readings
        V = PowerPotential(1.0, 2.0)
        ft = first_two(3, 1.0, V)
        assert flux_identity_residual(ft.z1, V, ft.lambda1) <= 1e-5

    def test_wrong_eigenvalue_is_detected(self):
        V = ZeroPotential()
        ft = first_two(2, 1.0, V)
        assert flux_identity_residual(ft.z1, V, ft.lambda1 + 0.1) > 1e-2


class TestFluxInequality:
    def test_square_within_lattice_envelope(self, square_solution):
        g, spec = square_solution
        prof = rearrange(spec.u1[g.mask], g.h * g.h, "decreasing", n=2)
        d = flux_inequality_defect(prof, None, spec.lambda1)
        assert d <= 0.2  # measured 0.13 at h = 1/128

    def test_refinement_shrinks_the_defect(self, square_solution):
        g_f, spec_f = square_solution
        g_c = rectangle_grid(1.0, 1.0, 1.0 / 64)
        spec_c = solve_domain(g_c, k=2)
        d_c = flux_inequality_defect(
            rearrange(spec_c.u1[g_c.mask], g_c.h * g_c.h, "decreasing"),
            None, spec_c.lambda1)
        d_f = flux_inequality_defect(
            rearrange(spec_f.u1[g_f.mask], g_f.h * g_f.h, "decreasing"),
            None, spec_f.lambda1)
        assert d_c <= 0.55  # measured 0.41 at h = 1/64
        assert d_f < d_c

    def test_rejects_wrong_direction_and_bad_windows(self):
        prof = rearrange(np.linspace(0, 1, 500), 0.001, "increasing")
        with pytest.raises(ContractError, match="decreasing"):
            flux_inequality_defect(prof, None, 1.0)
        good = rearrange(np.linspace(0, 1, 500), 0.001, "decreasing")
        with pytest.raises(RangeError, match="window"):
            flux_inequality_defect(good, None, 1.0, windows=0)
        with pytest.raises(ContractError, match="cells"):
            flux_inequality_defect(good, None, 1.0, windows=200)


class TestChitiCrossings:
    def test_identity_instance_has_no_crossing(self, disk_solution_r2):
        # same domain, same potential: profiles agree up to staircase
        # noise (measured 1.7e-3 of peak at h = 1/128), so the band must
        # sit above that, not at the converged-profile default
        g, spec, ft = disk_solution_r2
        prof = rearrange(spec.u1[g.mask], g.h * g.h, "decreasing", n=2)
        rep = chiti_crossings(prof, ft.z1,
                              tol=5e-3 * float(np.max(prof.values)))
        assert rep.count == 0
        assert rep.r0 is None

    def test_staircase_noise_grazes_default_band(self, disk_solution_r2):
        # the converged-profile default band is far below staircase
        # noise; the run structure must then flag tangential touching
        g, spec, ft = disk_solution_r2
        prof = rearrange(spec.u1[g.mask], g.h * g.h, "decreasing", n=2)
        rep = chiti_crossings(prof, ft.z1)
        assert rep.tangency or rep.count > 1

    def test_shrunken_ball_crosses_once(self, disk_solution_r2):
        # normalized comparison against a smaller ball: taller center,
        # zero tail, so exactly one sign change with r0 inside the ball
        g, spec, ft = disk_solution_r2
        V = PowerPotential(1.0, 2.0)
        prof = rearrange(spec.u1[g.mask], g.h * g.h, "decreasing", n=2)
        small = first_two(2, 0.9, V)
        rep = chiti_crossings(prof, small.z1,
                              tol=5e-3 * float(np.max(prof.values)))
        assert rep.count == 1
        assert rep.r0 is not None and 0.0 < rep.r0 < 0.9

    def test_dimension_mismatch_rejected(self, disk_solution_r2):
        g, spec, _ = disk_solution_r2
        prof = rearrange(spec.u1[g.mask], g.h * g.h, "decreasing", n=3)
        ft2 = first_two(2, 1.0, PowerPotential(1.0, 2.0))
        with pytest.raises(ContractError, match="dimension"):
            chiti_crossings(prof, ft2.z1)

    def test_increasing_profile_rejected(self, disk_solution_r2):
        _, _, ft = disk_solution_r2
        prof = rearrange(np.linspace(0, 1, 100), 0.01, "increasing")
        with pytest.raises(ContractError, match="decreasing"):
            chiti_crossings(prof, ft.z1)


class TestRadialProfileType:
    def test_dimension_recovery_and_interpolation(self):
        prof = rearrange(np.linspace(0, 1, 100), 0.01, "decreasing", n=3)
        assert prof.dimension == 3
        assert prof(0.0) == prof.values[0]
        assert prof(10.0) == prof.values[-1]  # clamped beyond R_max

    def test_unrecognized_measure_constant(self):
        prof = RadialProfile(radii=np.array([0.0, 1.0]),
                             values=np.array([1.0, 0.0]),
                             direction="decreasing", C_n=17.3,
                             total_measure=1.0)
        with pytest.raises(ContractError, match="dimension"):
            _ = prof.dimension
