"""Radial shooting solver: Bessel baselines, scaling, weights, recovery.

Oracles: Bessel zeros from mpmath.besseljzero (frozen), the closed-form
oscillator spectrum lambda = n + 2N (large-R limits), and the exact
rescaling law.  Eigenfunction profiles are cross-checked against
scipy.special Bessel evaluations, an independent code path.
"""

import dataclasses

import numpy as np
import pytest

from ppwlab.errors import ContractError, NumericError, RangeError
from ppwlab.potentials import (PowerPotential, TablePotential, ZeroPotential,
                               potential_from_spec)
from ppwlab.radial import (BallProblem, EigenPair, FirstTwo, first_two,
                           ode_residual, solve_sector)
from ppwlab.special import ppw_constant

J01_SQ = 5.783185962946784
J11_SQ = 14.681970642123893
J02_SQ = 30.471262343662087
PI_SQ = 9.869604401089358


def _ball(n=2, R=1.0, ell=0, V=None, weight="none"):
    return BallProblem(n=n, R=R, ell=ell, potential=V or ZeroPotential(),
                       weight_sign=weight)


class TestFreeBall:
    def test_ground_state_is_bessel(self):
        p = solve_sector(_ball(ell=0), k=1)
        assert p.lam == pytest.approx(J01_SQ, rel=1e-8)
        assert p.node_count == 0

    def test_first_sector_state(self):
        p = solve_sector(_ball(ell=1), k=1)
        assert p.lam == pytest.approx(J11_SQ, rel=1e-8)

    def test_second_radial_state(self):
        p = solve_sector(_ball(ell=0), k=2)
        assert p.lam == pytest.approx(J02_SQ, rel=1e-8)
        assert p.node_count == 1

    def test_profile_matches_bessel(self):
        from scipy.special import j0, j1

        p = solve_sector(_ball(ell=0), k=1)
        a = np.sqrt(J01_SQ)
        ref = j0(a * p.r)
        # L^2(r dr)-normalize the reference: ||J0(a r)||^2 = J1(a)^2 / 2
        ref /= abs(j1(a)) / np.sqrt(2.0)
        assert np.max(np.abs(p.z - ref)) <= 1e-8

    def test_n3_ground_state_is_pi_squared(self):
        ft = first_two(3, 1.0, ZeroPotential())
        assert ft.lambda1 == pytest.approx(PI_SQ, rel=1e-9)

    def test_free_ratio_equals_classical_constant(self):
        ft = first_two(2, 1.0, ZeroPotential())
        assert ft.lambda2 / ft.lambda1 == pytest.approx(ppw_constant(2),
                                                        rel=1e-8)

    @pytest.mark.parametrize("n", [2, 3, 5, 9, 20])
    def test_free_ratio_across_dimensions(self, n):
        ft = first_two(n, 1.0, ZeroPotential())
        assert ft.lambda2 / ft.lambda1 == pytest.approx(ppw_constant(n),
                                                        rel=1e-8)


class TestOscillator:
    def test_truncated_ground_state(self):
        # spectrum n + 2N on the line; R=8 truncation error far below 1e-6
        p = solve_sector(_ball(R=8.0, V=PowerPotential(1.0, 2.0)), k=1)
        assert p.lam == pytest.approx(2.0, abs=1e-6)

    def test_higher_states_and_nodes(self):
        for k, expect in [(1, 2.0), (2, 6.0), (3, 10.0)]:
            p = solve_sector(_ball(R=7.0, V=PowerPotential(1.0, 2.0)), k=k)
            assert p.lam == pytest.approx(expect, abs=1e-4)
            assert p.node_count == k - 1

    def test_gap_lower_bound_quadratic(self):
        # lambda2 >= (1 + 2/n) lambda1 for potentials meeting (a),(b)
        ft = first_two(2, 1.0, PowerPotential(1.0, 2.0))
        assert ft.lambda2 >= 2.0 * ft.lambda1 - 1e-10


class TestScalingAndMonotonicity:
    @pytest.mark.parametrize("beta", [0.5, 2.0, 5.0])
    def test_rescaling_law(self, beta):
        # lambda_k(B_{R/beta}, beta^2 V(beta r)) = beta^2 lambda_k(B_R, V)
        base = first_two(2, 1.5, PowerPotential(1.0, 2.0))
        scaled = first_two(2, 1.5 / beta, PowerPotential(beta**4, 2.0))
        assert scaled.lambda1 == pytest.approx(beta**2 * base.lambda1,
                                               rel=1e-8)
        assert scaled.lambda2 == pytest.approx(beta**2 * base.lambda2,
                                               rel=1e-8)

    def test_lambda1_decreases_in_radius(self):
        V = PowerPotential(1.0, 2.0)
        lams = [solve_sector(_ball(R=R, V=V), k=1).lam
                for R in (0.5, 1.0, 2.0, 4.0)]
        assert all(b < a for a, b in zip(lams, lams[1:]))

    def test_tiny_radius_rescale_path(self):
        p = solve_sector(_ball(R=1e-4), k=1)
        assert p.lam == pytest.approx(J01_SQ / 1e-8, rel=1e-8)
        # with a potential that matters at that scale
        q = solve_sector(_ball(R=0.005, V=PowerPotential(1e12, 2.0)), k=1)
        ref = solve_sector(_ball(R=1.0, V=PowerPotential(1e12 * 0.005**4,
                                                         2.0)), k=1)
        assert q.lam == pytest.approx(ref.lam / 0.005**2, rel=1e-10)

    @pytest.mark.parametrize("V", [ZeroPotential(), PowerPotential(1.0, 2.0),
                                   PowerPotential(1.0, 4.0)])
    def test_sector_ordering_under_convexity(self, V):
        # r V convex: the ell=1 state sits below the second radial state
        a = solve_sector(_ball(R=1.0, ell=1, V=V), k=1)
        b = solve_sector(_ball(R=1.0, ell=0, V=V), k=2)
        assert a.lam <= b.lam


class TestEigenfunctionContracts:
    @pytest.mark.parametrize("ell,k", [(0, 1), (0, 3), (1, 1), (1, 2),
                                       (2, 1)])
    def test_node_counts(self, ell, k):
        p = solve_sector(_ball(R=1.0, ell=ell), k=k)
        assert p.node_count == k - 1

    def test_first_eigenfunction_positive(self):
        for prob in (_ball(), _ball(ell=1), _ball(R=6.0,
                                                  V=PowerPotential(1.0, 4.0))):
            p = solve_sector(prob, k=1)
            assert np.all(p.z[1:-1] >= 0.0)
            assert p.z[len(p.z) // 2] > 0.0

    def test_boundary_values(self):
        p0 = solve_sector(_ball(ell=0), k=1)
        assert p0.dz[0] == 0.0
        assert abs(p0.z[-1]) <= 1e-6 * np.max(np.abs(p0.z))
        p1 = solve_sector(_ball(ell=1), k=1)
        assert p1.z[0] == 0.0

    def test_normalization_and_samples(self):
        p = solve_sector(_ball(R=2.0, V=PowerPotential(0.5, 2.0)), k=1)
        assert p.normalization == pytest.approx(1.0, abs=1e-8)
        assert p.radial_samples.shape == (2048, 2)
        assert p.radial_samples[0, 0] == 0.0
        assert p.radial_samples[-1, 0] == 2.0

    def test_interpolant_matches_samples(self):
        p = solve_sector(_ball(), k=1)
        f = p.interpolate()
        mid = 0.5 * (p.r[100] + p.r[101])
        assert f(p.r[512]) == pytest.approx(p.z[512], rel=1e-12)
        assert abs(f(mid) - 0.5 * (p.z[100] + p.z[101])) < 1e-5

    def test_residual_converged(self):
        p = solve_sector(_ball(), k=1)
        assert p.residual <= 1e-6

    def test_residual_detects_wrong_lambda(self):
        p = solve_sector(_ball(), k=1)
        prob = _ball()
        bad = dataclasses.replace(p, lam=p.lam + 0.1)
        assert ode_residual(bad, prob) > 1e-3
        assert ode_residual(p, prob) < 1e-6


class TestDeepTunneling:
    def test_quartic_well_two_sided(self):
        p = solve_sector(_ball(R=6.0, V=PowerPotential(1.0, 4.0)), k=1)
        assert p.residual <= 1e-6
        assert p.matching_defect <= 1e-8
        assert p.z[-1] == 0.0  # backward pass pins the boundary exactly
        # R-independence: the well confines everything long before r = 6
        q = solve_sector(_ball(R=3.5, V=PowerPotential(1.0, 4.0)), k=1)
        assert p.lam == pytest.approx(q.lam, rel=1e-9)


class TestWeightedSolves:
    def test_weight_shift_identity(self):
        # density e^{-+r^2} shifts the V = r^2 spectrum by -+n exactly
        base = solve_sector(_ball(R=4.0, V=PowerPotential(1.0, 2.0)), k=1)
        minus = solve_sector(_ball(R=4.0, weight="minus"), k=1)
        plus = solve_sector(_ball(R=4.0, weight="plus"), k=1)
        assert minus.lam == pytest.approx(base.lam - 2.0, abs=1e-9)
        assert plus.lam == pytest.approx(base.lam + 2.0, abs=1e-9)

    def test_weighted_normalization_and_residual(self):
        p = solve_sector(_ball(R=4.0, weight="minus"), k=1)
        assert p.normalization == pytest.approx(1.0, abs=1e-8)
        assert p.residual <= 1e-6


class TestFirstTwoDispatch:
    def test_returns_named_tuple(self):
        ft = first_two(2, 1.0, ZeroPotential())
        assert isinstance(ft, FirstTwo)
        lam1, lam2, z1, z2 = ft
        assert lam1 < lam2
        assert isinstance(z1, EigenPair) and isinstance(z2, EigenPair)
        assert z1.problem.ell == 0 and z2.problem.ell == 1

    def test_nonconvex_rv_triggers_crosscheck_warning(self):
        # V = 2r - r^2 on [0,1]: (rV)'' = 4 - 6r < 0 past r = 2/3.  Power
        # potentials can never get here since (r^(a+1))'' >= 0 for a >= 0.
        rt = np.linspace(0.0, 1.0, 201)
        V = TablePotential(rt, 2.0 * rt - rt**2)
        with pytest.warns(UserWarning, match="not convex"):
            ft = first_two(2, 1.0, V)
        # second eigenvalue still the smaller of the two candidate sectors
        a = solve_sector(_ball(ell=1, V=V), k=1)
        b = solve_sector(_ball(ell=0, V=V), k=2)
        assert ft.lambda2 == pytest.approx(min(a.lam, b.lam), rel=1e-12)


class TestInputValidation:
    def test_problem_field_guards(self):
        with pytest.raises(RangeError):
            BallProblem(n=1, R=1.0, ell=0, potential=ZeroPotential())
        with pytest.raises(RangeError):
            BallProblem(n=2, R=-1.0, ell=0, potential=ZeroPotential())
        with pytest.raises(RangeError):
            BallProblem(n=2, R=1.0, ell=-1, potential=ZeroPotential())
        with pytest.raises(RangeError):
            BallProblem(n=2, R=1.0, ell=0, potential=ZeroPotential(),
                        weight_sign="heavy")

    def test_table_range_must_cover_ball(self):
        T = TablePotential([0.0, 0.5, 1.0], [0.0, 0.25, 1.0])
        with pytest.raises(ContractError):
            BallProblem(n=2, R=2.0, ell=0, potential=T)

    def test_solver_parameter_guards(self):
        with pytest.raises(RangeError):
            solve_sector(_ball(), k=11)
        with pytest.raises(RangeError):
            solve_sector(_ball(), k=0)
        with pytest.raises(RangeError):
            solve_sector(_ball(), k=1, tol=1e-13)

    def test_table_solve_matches_parametric(self):
        rt = np.linspace(0.0, 2.0, 400)
        T = TablePotential(rt, rt**2)
        a = solve_sector(_ball(R=2.0, V=T), k=1)
        b = solve_sector(_ball(R=2.0, V=PowerPotential(1.0, 2.0)), k=1)
        assert a.lam == pytest.approx(b.lam, abs=1e-6)

    def test_spec_string_solve_roundtrip(self):
        V = potential_from_spec("poly:c2=1,c4=0.5")
        p = solve_sector(_ball(R=2.0, V=V), k=1)
        assert p.lam > 0.0
