"""Potential families, structural conditions (a)/(b), domination."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ppwlab.errors import ContractError, RangeError
from ppwlab.potentials import (PolynomialPotential, PowerPotential,
                               TablePotential, ZeroPotential, dominates,
                               eval_potential, parse_table_file,
                               potential_from_spec, validate_conditions)


def test_eval_power_quadratic():
    assert eval_potential(PowerPotential(1.0, 2.0), 2.0) == (4.0, 4.0, 2.0)


def test_eval_zero():
    assert eval_potential(ZeroPotential(), 0.7) == (0.0, 0.0, 0.0)


def test_eval_power_cubic():
    assert eval_potential(PowerPotential(3.0, 3.0), 1.0) == (3.0, 9.0, 18.0)


@pytest.mark.parametrize("P", [
    PowerPotential(1.0, 2.0),
    PowerPotential(2.5, 3.5),
    PowerPotential(1.0, 1.5),
    PolynomialPotential([1.0, 0.5]),
    PolynomialPotential([0.0, 0.0, 2.0]),
])
@pytest.mark.parametrize("r", [0.1, 1.0, 2.0])
def test_derivatives_match_finite_differences(P, r):
    h = 1e-5 * max(r, 1.0)
    d_fd = (P.value(r + h) - P.value(r - h)) / (2 * h)
    d2_fd = (P.value(r + h) - 2 * P.value(r) + P.value(r - h)) / h**2
    assert P.deriv(r) == pytest.approx(d_fd, rel=1e-6)
    assert P.deriv2(r) == pytest.approx(d2_fd, rel=1e-4, abs=1e-6)


def test_vectorized_evaluation():
    r = np.linspace(0.0, 3.0, 17)
    for P in (ZeroPotential(), PowerPotential(2.0, 2.5),
              PolynomialPotential([1.0, 0.25])):
        assert np.shape(P.value(r)) == r.shape
        assert np.shape(P.deriv(r)) == r.shape
    assert np.isscalar(PowerPotential(1.0, 2.0).value(1.5))


def test_conditions_quadratic_all_true():
    rep = validate_conditions(PowerPotential(1.0, 2.0), 1.0)
    assert rep.a_holds and rep.b_holds and rep.rv_convex
    assert rep.worst_violation == 0.0


def test_conditions_subquadratic_power_fails_b():
    # V'' = 0.75 r^{-1/2} is decreasing
    rep = validate_conditions(PowerPotential(1.0, 1.5), 1.0)
    assert rep.a_holds
    assert not rep.b_holds
    assert rep.worst_violation < 0.0


def test_conditions_zero_all_true():
    rep = validate_conditions(ZeroPotential(), 1.0)
    assert rep.a_holds and rep.b_holds and rep.rv_convex


def test_conditions_linear_power_fails_a():
    # V'(0) = k != 0
    rep = validate_conditions(PowerPotential(2.0, 1.0), 1.0)
    assert not rep.a_holds


@pytest.mark.parametrize("alpha", [2.0, 2.5, 3.0, 4.0, 6.0])
@pytest.mark.parametrize("k", [0.1, 1.0, 10.0])
def test_b_holds_iff_alpha_at_least_two(alpha, k):
    assert validate_conditions(PowerPotential(k, alpha), 2.0).b_holds


@pytest.mark.parametrize("alpha", [1.2, 1.5, 1.9, 1.99])
def test_b_fails_below_quadratic(alpha):
    # slope k alpha r^(alpha-1) is increasing but concave for alpha < 2
    assert not validate_conditions(PowerPotential(1.0, alpha), 2.0).b_holds


def test_linear_power_keeps_b_but_drops_a():
    # constant slope is weakly increasing and convex; only (a) fails
    rep = validate_conditions(PowerPotential(1.0, 1.0), 2.0)
    assert rep.b_holds
    assert not rep.a_holds


@given(k=st.floats(0.01, 50.0), alpha=st.floats(2.0, 6.0),
       R=st.floats(0.1, 5.0))
@settings(max_examples=40, deadline=None)
def test_a_and_b_imply_rv_convex(k, alpha, R):
    # (a) and (b) force V + r V' increasing, hence r V convex
    rep = validate_conditions(PowerPotential(k, alpha), R)
    if rep.a_holds and rep.b_holds:
        assert rep.rv_convex


def test_poly_conditions_and_positivity():
    rep = validate_conditions(PolynomialPotential([1.0, 0.5, 0.25]), 2.0)
    assert rep.a_holds and rep.b_holds and rep.rv_convex
    with pytest.raises(RangeError):
        PolynomialPotential([1.0, -0.5])


def test_table_roundtrips_quadratic():
    # pchip is ~3rd order near the ends, so h = 2/800 keeps error < 1e-6
    r = np.linspace(0.0, 2.0, 801)
    T = TablePotential(r, r**2)
    rr = np.linspace(0.0, 2.0, 517)
    assert np.max(np.abs(T.value(rr) - rr**2)) < 1e-6
    rep = validate_conditions(T, 2.0)
    assert rep.a_holds and rep.b_holds and rep.rv_convex


def test_table_interpolation_preserves_monotone_samples():
    # pchip never overshoots monotone data
    r = np.array([0.0, 0.5, 1.0, 1.5, 2.0])
    v = np.array([0.0, 0.1, 0.2, 2.0, 2.1])
    T = TablePotential(r, v)
    rr = np.linspace(0.0, 2.0, 4001)
    vals = T.value(rr)
    assert np.all(np.diff(vals) >= -1e-14)
    assert vals.min() >= 0.0 and vals.max() <= 2.1 + 1e-14


def test_table_input_validation():
    with pytest.raises(ContractError):
        TablePotential([0.1, 0.5, 1.0], [0.0, 1.0, 2.0])  # must start at 0
    with pytest.raises(ContractError):
        TablePotential([0.0, 0.5, 0.5], [0.0, 1.0, 2.0])  # not increasing
    with pytest.raises(RangeError):
        TablePotential([0.0, 1.0], [0.0, -1.0])  # negative value
    T = TablePotential([0.0, 1.0, 2.0], [0.0, 1.0, 4.0])
    with pytest.raises(RangeError):
        T.value(2.5)  # beyond the sampled range


def test_dominates_identity():
    P = PowerPotential(1.0, 2.0)
    rep = dominates(P, P, 1.0)
    assert rep.ok and rep.worst_margin == 0.0


def test_dominates_detects_crossing():
    lo = PowerPotential(1.0, 2.0)
    hi = PowerPotential(1.0, 4.0)
    rep = dominates(lo, hi, 0.5)  # r^2 > r^4 on (0, 1)
    assert not rep.ok
    assert rep.worst_margin < 0.0
    assert 0.0 < rep.r_worst <= 0.5


def test_zero_dominated_by_anything():
    assert dominates(ZeroPotential(), PowerPotential(3.0, 2.5), 2.0).ok
    assert dominates(ZeroPotential(), ZeroPotential(), 1.0).ok


def test_dominates_accepts_plain_callables():
    rep = dominates(PowerPotential(1.0, 2.0), lambda r: np.asarray(r) ** 2,
                    1.5)
    assert rep.ok


def test_spec_string_parsing():
    assert isinstance(potential_from_spec("zero"), ZeroPotential)
    P = potential_from_spec("power:k=2.5,alpha=3")
    assert P.value(1.0) == 2.5 and P.deriv(1.0) == 7.5
    Q = potential_from_spec("poly:c2=1,c4=0.5")
    assert Q.value(1.0) == 1.5
    # order-insensitive keys, gaps filled with zeros
    Q2 = potential_from_spec("poly:c6=2")
    assert Q2.value(1.0) == 2.0 and Q2.value(2.0) == 2.0 * 64


@pytest.mark.parametrize("bad", [
    "gauss", "power", "power:k=1", "power:alpha=2",
    "power:k=1,alpha=2,extra=3", "poly:c3=1", "poly:c0=1", "pow:k=1,alpha=2",
    "poly:cX=1",
])
def test_malformed_specs_raise(bad):
    with pytest.raises((ContractError, RangeError)):
        potential_from_spec(bad)


def test_table_file_parsing(tmp_path):
    f = tmp_path / "pot.txt"
    f.write_text("# radius value\n0.0 0.0\n0.5 0.25\n1.0 1.0\n2.0 4.0\n")
    T = parse_table_file(str(f))
    assert T.max_radius == 2.0
    assert T.value(1.0) == pytest.approx(1.0)
    T2 = potential_from_spec(f"table:{f}")
    assert T2.value(0.5) == pytest.approx(0.25)
