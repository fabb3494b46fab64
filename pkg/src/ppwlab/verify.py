"""Comparison-ball pipeline for two-eigenvalue bounds on planar domains.

The central routine matches a ball to a masked domain through the
ground energy, solves both, and compares second eigenvalues; the bound
under test says the ball's is never smaller.  Around it sit the
spectral-gap estimate driven by radial test functions, radius scans
for ratio monotonicity and for the near-quadratic sharpness family,
and two chain checks that replay the proof's rearrangement and
rescaling steps on concrete instances.

Inequalities are asserted against explicit error budgets; a violation
beyond budget raises NumericError rather than returning quietly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Optional, Sequence

import numpy as np
from scipy.optimize import brentq

from .domains import DomainGrid, richardson, solve_domain
from .errors import ContractError, NoSolutionError, NumericError, RangeError
from .potentials import (PowerPotential, RadialPotential, ZeroPotential,
                         dominates, potential_from_spec, validate_conditions)
from .radial import (BallProblem, FirstTwo, first_two, rescaled_potential,
                     solve_sector)
from .rearrange import rearrange
from .riccati import diagnostics
from .special import bessel_zero

__all__ = [
    "ComparisonReport", "GapBound", "RatioScan", "SharpnessScan",
    "ChainReport", "RescalingReport", "comparison_ball", "verify_ppw_bound",
    "center_find", "gap_bound", "scan_ratio", "sharpness_scan",
    "rearrangement_chain_check", "rescaling_chain_check",
]

_EXPAND_CAP = 60
# relative flattening of lambda1(R) per radius doubling that we read as
# the large-ball plateau; solver noise sits orders of magnitude below
_PLATEAU_RTOL = 1e-8
_MONO_SLACK = 1e-8
# default relative slack per chain step, scaled by h; measured equality
# -case noise is O(h^2) (about 0.1 h^2 on a unit disk), so 0.5 h guards
# the direction with orders of headroom at any tested resolution
_CHAIN_SLACK_PER_H = 0.5


def _as_potential(V) -> RadialPotential:
    if V is None:
        return ZeroPotential()
    if isinstance(V, RadialPotential):
        return V
    if isinstance(V, str):
        return potential_from_spec(V)
    raise ContractError(
        f"expected a radial potential, a spec string, or None, got "
        f"{type(V).__name__}")


def _ball_lambda1(n: int, R: float, V: RadialPotential) -> float:
    return solve_sector(BallProblem(n=n, R=R, ell=0, potential=V), k=1).lam


def comparison_ball(n: int, lambda1_target: float,
                    V_tilde: RadialPotential, tol: float = 1e-8) -> float:
    """Radius of the ball on which -Laplace + V_tilde has ground energy
    lambda1_target.

    R -> lambda1(B_R, V) falls strictly, so the radius comes from
    bracketing plus brentq.  V >= 0 pins lambda1 above the free-ball
    value (j_{n/2-1,1}/R)^2, which seeds the bracket.  Confining
    potentials level lambda1 off at the whole-space ground energy as R
    grows; a target at or below that plateau (or within matching
    tolerance of it) raises NoSolutionError carrying the plateau
    estimate.  tol is relative on the matched ground energy.
    """
    if not lambda1_target > 0:
        raise RangeError(
            f"ground-energy target must be positive, got {lambda1_target}")
    if not tol > 0:
        raise RangeError(f"tol must be positive, got {tol}")
    V_tilde = _as_potential(V_tilde)

    j = bessel_zero(0.5 * n - 1.0, 1).value
    lo = j / math.sqrt(lambda1_target)
    f_lo = _ball_lambda1(n, lo, V_tilde) - lambda1_target
    shrink = 0
    while f_lo <= 0.0:
        # only reachable within solver noise of the free case; nudge
        if shrink == 8:
            raise NumericError(
                "could not seat the lower bracket end above the target; "
                "is the potential nonnegative?")
        lo *= 0.999
        f_lo = _ball_lambda1(n, lo, V_tilde) - lambda1_target
        shrink += 1

    hi = lo
    prev = f_lo + lambda1_target
    for _ in range(_EXPAND_CAP):
        hi *= 2.0
        lam_hi = _ball_lambda1(n, hi, V_tilde)
        drop = prev - lam_hi
        if drop <= _PLATEAU_RTOL * max(abs(lam_hi), 1.0):
            raise NoSolutionError(
                f"no ball matches ground energy {lambda1_target:.10g}: "
                f"lambda1 levels off near {max(lam_hi, prev):.10g} as the "
                f"radius grows")
        if lam_hi < lambda1_target:
            break
        prev = lam_hi
    else:
        raise NoSolutionError(
            f"no bracket for ground energy {lambda1_target:.10g} within "
            f"{_EXPAND_CAP} radius doublings")

    R1 = brentq(lambda R: _ball_lambda1(n, R, V_tilde) - lambda1_target,
                0.5 * hi if hi > lo else lo, hi,
                rtol=max(0.25 * tol, 1e-15))
    lam_hit = _ball_lambda1(n, R1, V_tilde)
    scale = max(abs(lambda1_target), 1.0)
    if abs(lam_hit - lambda1_target) > 4.0 * tol * scale:
        raise NumericError(
            f"matched ground energy {lam_hit:.10g} misses the target "
            f"{lambda1_target:.10g} beyond tolerance")
    # a plateau grazing the target can fake a crossing through solver
    # noise; demand the ground energy actually moves around the match
    lam_probe = _ball_lambda1(n, 1.01 * R1, V_tilde)
    if abs(lam_probe - lam_hit) <= 4.0 * tol * scale:
        raise NoSolutionError(
            f"ground energy is flat to within the matching tolerance near "
            f"R = {R1:.6g}; the target {lambda1_target:.10g} sits at or "
            f"below the large-ball plateau")
    return float(R1)


@dataclass(frozen=True)
class ComparisonReport:
    """Outcome of one domain-vs-matched-ball comparison.

    margin = lambda2_ball - lambda2_domain; the bound predicts it is
    nonnegative whenever the hypotheses hold.  error_budget is three
    times the combined solver error estimate, and passed means the
    margin clears -error_budget.  gap_bound_rhs, center and
    gap_exterior_fraction are filled when the gap estimate runs;
    the fraction flags how much of the gap numerator lives beyond the
    matched ball, where the integrand follows the extension rule
    rather than a solved profile.
    """

    lambda1_domain: float
    lambda2_domain: float
    radius: float
    lambda1_ball: float
    lambda2_ball: float
    margin: float
    error_budget: float
    passed: bool
    gap_bound_rhs: Optional[float] = None
    center: Optional[tuple] = None
    gap_exterior_fraction: Optional[float] = None


def _domain_cells(grid: DomainGrid):
    cx0, cy0 = grid.origin
    jj, ii = np.meshgrid(np.arange(grid.nx), np.arange(grid.ny))
    m = grid.mask
    x = grid.h * (jj[m] - cx0)
    y = grid.h * (ii[m] - cy0)
    return x, y


def center_find(grid: DomainGrid, u1: np.ndarray, g,
                tol: float = 1e-9, max_iter: int = 200) -> tuple:
    """Origin that zeroes the weighted first moment
    W(c) = sum over cells of g(|x-c|) (x-c)/|x-c| u1^2 h^2.

    Damped Newton from the u1^2 centroid; the 2x2 Jacobian comes from
    central differences and steps are halved until |W| decreases.
    Convergence means |W| <= tol * integral of g u1^2.  Returns (cx, cy)
    in the physical frame whose origin is grid.origin.
    """
    if not tol > 0:
        raise RangeError(f"tol must be positive, got {tol}")
    x, y = _domain_cells(grid)
    w = np.asarray(u1, dtype=float)[grid.mask] ** 2 * grid.h ** 2
    tot = float(w.sum())
    if not tot > 0:
        raise ContractError("u1 vanishes on the mask")

    def moment(c):
        dx = x - c[0]
        dy = y - c[1]
        rho = np.hypot(dx, dy)
        gv = np.asarray(g(rho), dtype=float)
        # g(rho)/rho stays bounded (g vanishes linearly at 0) and the
        # rho = 0 cell contributes nothing either way
        f = np.where(rho > 0.0, gv / np.where(rho > 0.0, rho, 1.0), 0.0) * w
        return np.array([f @ dx, f @ dy]), float(np.abs(gv) @ w)

    c = np.array([x @ w, y @ w]) / tot
    Wc, scale = moment(c)
    eps = max(1e-3 * grid.h, 1e-10)
    for _ in range(max_iter):
        nrm = float(np.hypot(*Wc))
        if nrm <= tol * max(scale, 1e-300):
            return float(c[0]), float(c[1])
        J = np.empty((2, 2))
        for k in range(2):
            e = np.zeros(2)
            e[k] = eps
            J[:, k] = (moment(c + e)[0] - moment(c - e)[0]) / (2.0 * eps)
        step, *_ = np.linalg.lstsq(J, -Wc, rcond=None)
        alpha = 1.0
        for _ in range(25):
            cand = c + alpha * step
            Wn, sn = moment(cand)
            if np.hypot(*Wn) < nrm:
                c, Wc, scale = cand, Wn, sn
                break
            alpha *= 0.5
        else:
            raise NumericError(
                f"center search stalled at |W| = {nrm:.3e} "
                f"(needs {tol * scale:.3e})")
    raise NumericError(
        f"center search did not converge in {max_iter} iterations; "
        f"last |W| = {float(np.hypot(*Wc)):.3e}")


def _extended_profiles(diag):
    """Callables g(r), B(r) valid on all r >= 0.

    Inside the ball both interpolate the sampled diagnostics; at the
    rim g takes its limit z2'(R)/z1'(R) and stays frozen there, so
    beyond the rim only the angular part (n-1) g(R)^2 / r^2 of B
    survives.
    """
    rm, gs, Bs = diag.r, diag.g, diag.B
    R1, n = diag.R, diag.n
    dz1 = diag.z1.dz[-1]
    if dz1 == 0.0:
        raise NumericError("first mode has vanishing boundary slope")
    gR = diag.z2.dz[-1] / dz1
    a = gs[0] / rm[0]  # g'(0+): the ratio opens linearly
    r_nodes = np.concatenate(([0.0], rm, [R1]))
    g_nodes = np.concatenate(([0.0], gs, [gR]))
    B0 = n * a * a
    BR = Bs[-1] + (Bs[-1] - Bs[-2]) * (R1 - rm[-1]) / (rm[-1] - rm[-2])
    B_nodes = np.concatenate(([B0], Bs, [BR]))
    tail = (n - 1.0) * gR * gR

    def g_ext(r):
        return np.interp(r, r_nodes, g_nodes)

    def B_ext(r):
        r = np.asarray(r, dtype=float)
        inside = np.interp(r, r_nodes, B_nodes)
        with np.errstate(divide="ignore"):
            outside = tail / np.maximum(r, 1e-300) ** 2
        return np.where(r <= R1, inside, outside)[()]

    return g_ext, B_ext


class GapBound(NamedTuple):
    rhs: float
    exterior_fraction: float
    center: tuple


def gap_bound(grid: DomainGrid, u1: np.ndarray, lams: Sequence[float],
              ball: FirstTwo, center=None, slack: float = None) -> GapBound:
    """Right-hand side of the gap estimate
    (lambda2 - lambda1) <= int B u1^2 / int g^2 u1^2.

    B and g come from the mode-ratio diagnostics of the matched ball,
    extended beyond its radius by freezing g.  The routine asserts the
    inequality against `slack` (default: three times the a-priori h^2
    truncation estimate for both eigenvalues) and reports the fraction
    of the numerator carried by cells outside the ball, where the
    extension rule rather than a solved profile decides the integrand.
    """
    lam1, lam2 = float(lams[0]), float(lams[1])
    diag = diagnostics(ball.z1, ball.z2)
    g_ext, B_ext = _extended_profiles(diag)
    if center is None:
        center = center_find(grid, u1, g_ext)
    x, y = _domain_cells(grid)
    rho = np.hypot(x - center[0], y - center[1])
    w = np.asarray(u1, dtype=float)[grid.mask] ** 2 * grid.h ** 2
    Bv = B_ext(rho)
    num = float(Bv @ w)
    den = float(g_ext(rho) ** 2 @ w)
    if not den > 0:
        raise NumericError("gap denominator vanished; u1 and g do not "
                           "overlap")
    rhs = num / den
    ext = float(Bv[rho > diag.R] @ w[rho > diag.R] / num) if num > 0 else 0.0
    if slack is None:
        slack = 0.5 * (lam1 ** 2 + lam2 ** 2) * grid.h ** 2
    gap = lam2 - lam1
    if gap > rhs + slack:
        raise NumericError(
            f"gap bound violated: lambda2 - lambda1 = {gap:.8g} exceeds "
            f"{rhs:.8g} + slack {slack:.3g}")
    return GapBound(rhs=rhs, exterior_fraction=ext,
                    center=(float(center[0]), float(center[1])))


def verify_ppw_bound(grid: DomainGrid, V, V_tilde, tol: float = 1e-8,
                     coarse_grid: DomainGrid = None,
                     gap: bool = True) -> ComparisonReport:
    """Compare the second eigenvalue of a masked domain against the
    ball matched to it through the ground energy.

    V is the domain potential (a radial potential, a spec string such
    as "power:k=1,alpha=2", or None for the free case); V_tilde lives
    on the comparison ball.  Hypotheses checked up front: V_tilde
    vanishes to first order at the origin with a nondecreasing convex
    slope, and V_tilde never exceeds the increasing rearrangement of
    the domain samples of V (within a staircase allowance of the mask).
    The margin lambda2_ball - lambda2_domain is judged against three
    times the combined error estimate: domain discretization (measured
    by Richardson when coarse_grid is given, a-priori otherwise) plus
    the ground-energy matching error propagated through the ball.
    """
    Vd = _as_potential(V)
    Vt = _as_potential(V_tilde)
    fine = solve_domain(grid, Vd, k=2)
    if coarse_grid is not None:
        rich = richardson(solve_domain(coarse_grid, Vd, k=2), fine)
        lam1, lam2 = rich.lambda1, rich.lambda2
        err1, err2 = rich.error1, rich.error2
    else:
        lam1, lam2 = fine.lambda1, fine.lambda2
        err1 = err2 = fine.estimated_discretization_error

    R1 = comparison_ball(2, lam1, Vt, tol)
    rep = validate_conditions(Vt, R1)
    if not rep.a_holds:
        raise ContractError(
            "comparison potential must vanish to first order at the "
            f"origin; scaled defect {rep.worst_violation:.3e} at "
            f"r = {rep.worst_location:.4g}")
    if not rep.b_holds:
        raise ContractError(
            "comparison potential needs a nondecreasing convex slope on "
            f"the matched ball; scaled defect {rep.worst_violation:.3e} "
            f"at r = {rep.worst_location:.4g}")

    vals = np.asarray(Vd.value(grid.radii()[grid.mask]), dtype=float)
    vstar = rearrange(vals, grid.h ** 2, "increasing", n=2)
    # staircase masks displace both sorted values and radii by O(h)
    probe = np.linspace(0.0, vstar.R_max + grid.h, 256)
    lip = float(np.max(np.abs(np.asarray(Vd.deriv(probe), dtype=float))))
    dom_tol = 2.0 * lip * grid.h + 1e-9 * max(1.0, float(vals.max(initial=0.0)))
    domrep = dominates(Vt, vstar, min(R1, vstar.R_max), tol=dom_tol)
    if not domrep.ok:
        raise ContractError(
            "comparison potential exceeds the rearranged domain potential "
            f"by {-domrep.worst_margin:.3e} at r = {domrep.r_worst:.4g} "
            f"(allowance {dom_tol:.3e})")
    if R1 > vstar.R_max + 3.0 * grid.h:
        raise ContractError(
            f"matched ball (radius {R1:.6g}) sticks out of the rearranged "
            f"domain (radius {vstar.R_max:.6g})")

    ball = first_two(2, R1, Vt)
    if abs(ball.lambda1 - lam1) > 4.0 * tol * max(abs(lam1), 1.0):
        raise NumericError(
            f"ground-energy match drifted: ball gives {ball.lambda1:.10g} "
            f"for target {lam1:.10g}")
    margin = ball.lambda2 - lam2
    budget = 3.0 * (err2 + ball.lambda2 * (err1 / lam1 + tol))

    gap_rhs = cen = extf = None
    if gap:
        gb = gap_bound(grid, fine.u1, (fine.lambda1, fine.lambda2), ball)
        gap_rhs, extf, cen = gb.rhs, gb.exterior_fraction, gb.center

    return ComparisonReport(
        lambda1_domain=float(lam1), lambda2_domain=float(lam2),
        radius=float(R1), lambda1_ball=float(ball.lambda1),
        lambda2_ball=float(ball.lambda2), margin=float(margin),
        error_budget=float(budget), passed=bool(margin >= -budget),
        gap_bound_rhs=gap_rhs, center=cen, gap_exterior_fraction=extf)


class RatioScan(NamedTuple):
    """Radius sweep table; eqlambda_margin is lambda2 - (1 + 2/n) lambda1,
    named for the CSV column the scan emits."""

    R: np.ndarray
    lambda1: np.ndarray
    lambda2: np.ndarray
    ratio: np.ndarray
    eqlambda_margin: np.ndarray


def _scan_radii(R_min, R_max, steps):
    if int(steps) != steps or steps < 2:
        raise RangeError(f"steps must be an integer >= 2, got {steps}")
    if not 0 < R_min < R_max:
        raise RangeError(
            f"need 0 < R_min < R_max, got [{R_min}, {R_max}]")
    return np.linspace(R_min, R_max, int(steps))


def _scan_cell(args):
    n, V, R = args
    ft = first_two(n, R, V)
    return ft.lambda1, ft.lambda2


def scan_ratio(n: int, V, R_min: float, R_max: float,
               steps: int, jobs: int = 1) -> RatioScan:
    """Sweep the ball radius; tabulate lambda1, lambda2, their ratio and
    the margin of lambda2 >= (1 + 2/n) lambda1.

    When V passes the structural conditions the ratio column must come
    out nonincreasing; an increase beyond 1e-8 raises NumericError.
    Rows are independent pure solves merged by index regardless of
    completion order, so jobs > 1 farms them to worker processes.
    """
    V = _as_potential(V)
    Rs = _scan_radii(R_min, R_max, steps)
    if int(jobs) != jobs or jobs < 1:
        raise RangeError(f"jobs must be a positive integer, got {jobs}")
    lam1 = np.empty(Rs.size)
    lam2 = np.empty(Rs.size)
    cells = [(int(n), V, float(R)) for R in Rs]
    if jobs > 1:
        from concurrent.futures import ProcessPoolExecutor

        with ProcessPoolExecutor(max_workers=int(jobs)) as pool:
            rows = list(pool.map(_scan_cell, cells))
    else:
        rows = [_scan_cell(c) for c in cells]
    for i, (l1, l2) in enumerate(rows):
        lam1[i], lam2[i] = l1, l2
    ratio = lam2 / lam1
    margin = lam2 - (1.0 + 2.0 / n) * lam1
    rep = validate_conditions(V, float(R_max))
    if rep.a_holds and rep.b_holds:
        d = np.diff(ratio)
        if np.any(d > _MONO_SLACK):
            i = int(np.argmax(d))
            raise NumericError(
                f"ratio increased by {d[i]:.3e} between R = {Rs[i]:.6g} "
                f"and R = {Rs[i + 1]:.6g}")
    return RatioScan(R=Rs, lambda1=lam1, lambda2=lam2, ratio=ratio,
                     eqlambda_margin=margin)


class SharpnessScan(NamedTuple):
    eps: np.ndarray
    R: np.ndarray
    margin: np.ndarray
    violations: list
    min_margin: float


def sharpness_scan(n: int, epsilons: Sequence[float], R_min: float,
                   R_max: float, steps: int) -> SharpnessScan:
    """Margins of lambda2 >= (1 + 2/n) lambda1 for the family r^(2-eps).

    eps = 0 is the quadratic case, where the bound holds and the scan
    should report no violations; positive eps bends the slope's
    convexity gently, and every (eps, R) cell whose margin falls below
    the 1e-8 slack lands in `violations` as an (eps, R, margin) triple.
    """
    eps = np.asarray(list(epsilons), dtype=float)
    if eps.size == 0:
        raise RangeError("need at least one eps value")
    if np.any(eps < 0.0) or np.any(eps >= 1.0):
        raise RangeError(
            f"eps values must lie in [0, 1), got {eps.tolist()}")
    Rs = _scan_radii(R_min, R_max, steps)
    margin = np.empty((eps.size, Rs.size))
    violations = []
    for a, e in enumerate(eps):
        V = PowerPotential(1.0, 2.0 - float(e))
        for b, R in enumerate(Rs):
            ft = first_two(n, float(R), V)
            m = ft.lambda2 - (1.0 + 2.0 / n) * ft.lambda1
            margin[a, b] = m
            if m < -_MONO_SLACK * max(1.0, abs(ft.lambda2)):
                violations.append((float(e), float(R), float(m)))
    return SharpnessScan(eps=eps, R=Rs, margin=margin,
                         violations=violations,
                         min_margin=float(margin.min()))


class ChainReport(NamedTuple):
    numerator_steps: np.ndarray
    denominator_steps: np.ndarray
    numerator_values: np.ndarray
    denominator_values: np.ndarray
    ball_ratio_defect: float
    slack: float


def rearrangement_chain_check(grid: DomainGrid, u1: np.ndarray,
                              ball: FirstTwo, center=None,
                              slack: float = None) -> ChainReport:
    """Replay the two integral chains that move the gap estimate from
    the domain to the matched ball.

    Numerator chain (weight B, decreasing): domain cells, then the
    sorted-cell pairing against the decreasing rearrangement of u1,
    then the rearranged ball with B at annulus radii, then the ball's
    own mode z1.  Each move can only increase the integral.  The
    denominator chain runs the same stations with g^2 (increasing) and
    only decreases.  Margins are returned in chain order and must
    clear -slack * (chain scale); slack defaults to a staircase
    allowance proportional to h.  The ratio of the two ball-side
    integrals reproduces the ball's gap; its relative defect is
    reported as a cross-check.
    """
    if slack is None:
        slack = _CHAIN_SLACK_PER_H * grid.h
    diag = diagnostics(ball.z1, ball.z2)
    g_ext, B_ext = _extended_profiles(diag)
    if center is None:
        center = center_find(grid, u1, g_ext)
    x, y = _domain_cells(grid)
    rho = np.hypot(x - center[0], y - center[1])
    h2 = grid.h ** 2
    w = np.asarray(u1, dtype=float)[grid.mask] ** 2 * h2
    Bv = B_ext(rho)
    g2 = g_ext(rho) ** 2

    u2_desc = np.sort(w)[::-1]
    n_cells = u2_desc.size
    # midpoint annulus radii of the rearranged domain (n = 2)
    r_bar = np.sqrt((np.arange(n_cells) + 0.5) * h2 / np.pi)

    rz = ball.z1.r
    wz = 2.0 * np.pi * rz * ball.z1.z ** 2
    nrm = np.trapezoid(wz, rz)
    I4 = float(np.trapezoid(B_ext(rz) * wz, rz) / nrm)
    J4 = float(np.trapezoid(g_ext(rz) ** 2 * wz, rz) / nrm)

    I = np.array([
        float(Bv @ w),
        float(np.sort(Bv)[::-1] @ u2_desc),
        float(B_ext(r_bar) @ u2_desc),
        I4,
    ])
    J = np.array([
        float(g2 @ w),
        float(np.sort(g2) @ u2_desc),
        float(g_ext(r_bar) ** 2 @ u2_desc),
        J4,
    ])
    num_steps = np.diff(I)
    den_steps = -np.diff(J)
    scale_I = float(np.max(np.abs(I)))
    scale_J = float(np.max(np.abs(J)))
    worst_num = float(num_steps.min()) / scale_I
    worst_den = float(den_steps.min()) / scale_J
    if min(worst_num, worst_den) < -slack:
        side = "numerator" if worst_num < worst_den else "denominator"
        raise NumericError(
            f"{side} chain step moved the wrong way: relative margin "
            f"{min(worst_num, worst_den):.3e} against slack {slack:.3e}")
    E = diag.E
    defect = abs(I4 / J4 - E) / E
    return ChainReport(
        numerator_steps=num_steps, denominator_steps=den_steps,
        numerator_values=I, denominator_values=J,
        ball_ratio_defect=float(defect), slack=float(slack))


class RescalingReport(NamedTuple):
    beta0: float
    match_defect: float
    comparison_margin: float
    ratio_scaling_defect: float
    ratio_monotone_margin: float
    betas: np.ndarray
    rescaled_lambda1: np.ndarray


def rescaling_chain_check(n: int, V, R_small: float, R_large: float,
                          tol: float = 1e-8,
                          samples: int = 4) -> RescalingReport:
    """Verify the zoom construction that transports the ratio bound
    between two ball radii.

    Zooming by beta maps B_{R_large} with potential V to
    B_{R_large/beta} with beta^2 V(beta r) at unchanged eigenvalue
    ratio.  For admissible V the zoomed ground energy rises with beta
    (checked on `samples` points; since lambda1 falls strictly with
    radius, that is the statement that the matching radius falls, which
    legitimizes the bisection).  At beta0 the zoomed ball matches
    B_{R_small}'s ground energy, the ball-to-ball comparison caps the
    zoomed second eigenvalue by the small ball's, and unwinding the
    zoom orders the two ratios.
    """
    if not 0 < R_small < R_large:
        raise RangeError(
            f"need 0 < R_small < R_large, got {R_small}, {R_large}")
    if int(samples) != samples or samples < 2:
        raise RangeError(f"samples must be an integer >= 2, got {samples}")
    V = _as_potential(V)
    rep = validate_conditions(V, R_large)
    if not (rep.a_holds and rep.b_holds):
        raise ContractError(
            "the zoom construction needs a potential vanishing to first "
            "order at the origin with nondecreasing convex slope; scaled "
            f"defect {rep.worst_violation:.3e} at r = "
            f"{rep.worst_location:.4g}")

    ft_small = first_two(n, R_small, V)
    ft_large = first_two(n, R_large, V)
    target = ft_small.lambda1

    def zoomed_lambda1(b):
        return _ball_lambda1(n, R_large / b, rescaled_potential(V, b))

    b_hi = R_large / R_small
    g_hi = zoomed_lambda1(b_hi) - target
    grow = 0
    while g_hi < 0.0:
        if grow == _EXPAND_CAP:
            raise NoSolutionError(
                "no zoom factor matches the small ball's ground energy")
        b_hi *= 1.25
        g_hi = zoomed_lambda1(b_hi) - target
        grow += 1
    if g_hi == 0.0:
        beta0 = b_hi
    else:
        beta0 = brentq(lambda b: zoomed_lambda1(b) - target, 1.0, b_hi,
                       rtol=max(0.25 * tol, 1e-15))

    ft_zoom = first_two(n, R_large / beta0, rescaled_potential(V, beta0))
    match_defect = abs(ft_zoom.lambda1 - target) / target
    ratio_small = ft_small.lambda2 / ft_small.lambda1
    ratio_large = ft_large.lambda2 / ft_large.lambda1
    ratio_zoom = ft_zoom.lambda2 / ft_zoom.lambda1

    betas = np.linspace(1.0, beta0, int(samples))
    rl1 = np.array([zoomed_lambda1(float(b)) for b in betas])
    drops = np.diff(rl1)
    if np.any(drops < -1e-9 * max(target, 1.0)):
        i = int(np.argmin(drops))
        raise NumericError(
            f"zoomed ground energy fell between beta = {betas[i]:.6g} and "
            f"{betas[i + 1]:.6g}; the matching radius is not decreasing")

    comparison_margin = ft_small.lambda2 - ft_zoom.lambda2
    slack = 3.0 * tol * ft_small.lambda2
    if comparison_margin < -slack:
        raise NumericError(
            f"zoomed second eigenvalue {ft_zoom.lambda2:.10g} exceeds the "
            f"small ball's {ft_small.lambda2:.10g} beyond slack")
    if ratio_small - ratio_large < -_MONO_SLACK:
        raise NumericError(
            f"ratio at R = {R_small:g} fell below the ratio at "
            f"R = {R_large:g}")
    return RescalingReport(
        beta0=float(beta0), match_defect=float(match_defect),
        comparison_margin=float(comparison_margin),
        ratio_scaling_defect=float(abs(ratio_zoom - ratio_large)
                                   / ratio_large),
        ratio_monotone_margin=float(ratio_small - ratio_large),
        betas=betas, rescaled_lambda1=rl1)
