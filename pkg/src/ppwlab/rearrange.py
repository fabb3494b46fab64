"""Radial rearrangements, the measure change of variables, and the
Chiti-style crossing and flux checks.

A rearrangement here is cell-based: grid samples of equal cell measure
are sorted and laid out radially, so the result is exactly
equimeasurable with the source at grid resolution.  The s = C_n r^n
substitution turns radial integrals into plain 1-D integrals; the flux
identity checked below is the integrated form of the radial eigenvalue
equation in these variables, which the ball solution satisfies with
equality and a domain eigenfunction only as an inequality.
"""

import math
from dataclasses import dataclass
from typing import NamedTuple, Optional

import numpy as np

from .errors import ContractError, RangeError
from .radial import EigenPair

__all__ = [
    "RadialProfile", "ChitiReport", "unit_ball_measure", "rearrange",
    "sharp_transform", "chiti_crossings", "flux_identity_residual",
    "flux_inequality_defect",
]


def unit_ball_measure(n: int) -> float:
    """Volume C_n of the unit ball in n dimensions."""
    if not (isinstance(n, (int, np.integer)) and n >= 1):
        raise RangeError(f"dimension must be a positive integer, got {n}")
    return math.pi ** (n / 2.0) / math.gamma(n / 2.0 + 1.0)


@dataclass(frozen=True)
class RadialProfile:
    """Monotone radial profile on the ball of equal measure.

    radii run from 0 to the rearranged-domain radius R_max; values are
    monotone in `direction`.  total_measure is the source measure
    (cell count times cell measure) and C_n the unit-ball volume used
    in s = C_n r^n.  Calling the profile interpolates linearly and
    clamps beyond the ends, so profiles can be handed to dominates().
    """

    radii: np.ndarray
    values: np.ndarray
    direction: str
    C_n: float
    total_measure: float

    @property
    def R_max(self) -> float:
        return float(self.radii[-1])

    @property
    def dimension(self) -> int:
        # C_n identifies n uniquely (C_n is injective over 1..25)
        for n in range(1, 26):
            if abs(unit_ball_measure(n) - self.C_n) < 1e-9:
                return n
        raise ContractError(f"C_n = {self.C_n} matches no dimension")

    def __call__(self, r):
        return np.interp(r, self.radii, self.values)


class ChitiReport(NamedTuple):
    count: int
    r0: Optional[float]
    tangency: bool


def rearrange(values, cell_measure: float, direction: str,
              n: int = 2) -> RadialProfile:
    """Sort equal-measure cell samples into a radial profile.

    The j-th sorted value is placed at the radius enclosing measure
    (j + 1/2) * cell_measure, the cell's midpoint; endpoint samples at
    r = 0 and r = R_max keep the declared range closed.  Increasing
    direction (potentials) requires nonnegative values.
    """
    v = np.asarray(values, dtype=float).ravel()
    if v.size == 0:
        raise ContractError("cannot rearrange an empty sample set")
    if not np.all(np.isfinite(v)):
        raise ContractError("rearrangement input has non-finite samples")
    if not cell_measure > 0:
        raise RangeError(f"cell measure must be positive, got "
                         f"{cell_measure}")
    if direction not in ("increasing", "decreasing"):
        raise RangeError(f"direction must be increasing or decreasing, "
                         f"got {direction!r}")
    if direction == "increasing" and np.any(v < 0):
        raise RangeError("increasing rearrangement (a potential) needs "
                         "nonnegative values")
    v = np.sort(v)
    if direction == "decreasing":
        v = v[::-1]
    C = unit_ball_measure(n)
    total = v.size * cell_measure
    s_mid = (np.arange(v.size) + 0.5) * cell_measure
    r_mid = (s_mid / C) ** (1.0 / n)
    radii = np.concatenate(([0.0], r_mid, [(total / C) ** (1.0 / n)]))
    vals = np.concatenate(([v[0]], v, [v[-1]]))
    return RadialProfile(radii=radii, values=vals, direction=direction,
                         C_n=C, total_measure=total)


def sharp_transform(profile: RadialProfile):
    """Samples of f^#(s) = f((s/C_n)^{1/n}) on the profile's own s-grid."""
    n = profile.dimension
    s = profile.C_n * profile.radii ** n
    return s, profile.values.copy()


def _l2_normalize_on_star(r, f, n):
    # L^2(Omega*) norm of a radial function: n C_n int f^2 r^{n-1} dr
    w = n * unit_ball_measure(n) * r ** (n - 1)
    nrm = math.sqrt(np.trapezoid(f * f * w, r))
    if nrm == 0.0:
        raise ContractError("cannot normalize an identically zero profile")
    return f / nrm


def chiti_crossings(u1_star: RadialProfile, z1: EigenPair,
                    tol: Optional[float] = None) -> ChitiReport:
    """Count sign changes of u1* - z1 on (0, R_max) of the star domain.

    Both functions are (re)normalized in L^2 over the rearranged domain,
    with z1 extended by zero beyond its ball.  Differences inside the
    tolerance band (default 1e-4 of the peak) are ignored; a band that
    separates two runs of the same sign is reported as a tangency.
    The comparison setup predicts count <= 1, with u1* below z1 inside
    the single crossing and above it outside.
    """
    n = z1.problem.n
    if abs(u1_star.C_n - unit_ball_measure(n)) > 1e-9:
        raise ContractError(
            f"profile C_n={u1_star.C_n:g} does not match the ball "
            f"solution's dimension n={n}")
    if u1_star.direction != "decreasing":
        raise ContractError("crossing check expects a decreasing "
                            "eigenfunction rearrangement")
    R = u1_star.R_max
    r = np.linspace(0.0, R, 4097)
    u = _l2_normalize_on_star(r, u1_star(r), n)
    zi = z1.interpolate()
    z = np.where(r <= z1.problem.R, zi(np.minimum(r, z1.problem.R)), 0.0)
    z[z < 0.0] = 0.0  # interpolant wiggle below the hard zero extension
    z = _l2_normalize_on_star(r, z, n)
    d = u - z
    if tol is None:
        tol = 1e-4 * max(float(np.max(u)), float(np.max(z)))

    sig = np.where(np.abs(d) >= tol, np.sign(d), 0.0)[1:-1]  # open interval
    rr = r[1:-1]
    runs = []  # (sign, first index, last index); quiet points merged over
    saw_gap = False
    tangency = False
    for i, sgn in enumerate(sig):
        if sgn == 0.0:
            saw_gap = bool(runs)
            continue
        if runs and runs[-1][0] == sgn:
            if saw_gap:
                tangency = True  # quiet band inside a same-sign stretch
            runs[-1] = (sgn, runs[-1][1], i)
        else:
            runs.append((sgn, i, i))
        saw_gap = False
    count = len(runs) - 1 if runs else 0
    r0 = None
    if count == 1:
        r0 = 0.5 * float(rr[runs[0][2]] + rr[runs[1][1]])
    return ChitiReport(count=count, r0=r0, tangency=tangency)


def _source_integral(s, f, V_at_s, lam):
    # I(s_i) = int_0^{s_i} (lam - V_#) f^# dw by trapezoid in the
    # measure coordinate itself; no r^{n-1} weight survives the change
    # of variables, so there is no start-up bias at the origin.
    g = (lam - V_at_s) * f
    inc = 0.5 * (g[1:] + g[:-1]) * np.diff(s)
    return np.concatenate(([0.0], np.cumsum(inc)))


def flux_identity_residual(z1: EigenPair, V_tilde, lambda1: float) -> float:
    """Defect of the integrated radial equation for a ball solution.

    In measure coordinates the ball eigenfunction satisfies
    -dz^#/ds = n^-2 C_n^{-2/n} s^{2/n-2} Int_0^s (lambda1 - V_#) z^# dw
    exactly; the returned residual is max |LHS - RHS| over the solved
    grid relative to max |LHS|.  The left side uses the solver's own
    derivative samples, dz^#/ds = z'(r) / (n C_n r^{n-1}).  A wrong
    lambda1 breaks the identity at the 1e-2 level, so this doubles as
    a solution check.
    """
    n = z1.problem.n
    C = unit_ball_measure(n)
    r = z1.r
    V = np.asarray(V_tilde.value(r), dtype=float) if V_tilde is not None \
        else np.zeros_like(r)
    s = C * r ** n
    I = _source_integral(s, z1.z, V, lambda1)
    keep = slice(1, len(r))  # r = 0 has no measure coordinate slope
    lhs = -z1.dz[keep] / (n * C * r[keep] ** (n - 1))
    rhs = (s[keep] ** (2.0 / n - 2.0)) * I[keep] / (n * n * C ** (2.0 / n))
    scale = float(np.max(np.abs(lhs)))
    if scale == 0.0:
        raise ContractError("flat profile: flux residual undefined")
    return float(np.max(np.abs(lhs - rhs)) / scale)


def flux_inequality_defect(u1_star: RadialProfile, V_tilde,
                           lambda1: float, windows: int = 64) -> float:
    """Worst normalized violation of the one-sided flux relation for a
    rearranged domain eigenfunction (positive return value = violation).

    The pointwise relation -du^#/ds <= RHS(s) is checked in integrated
    form over `windows` equal-measure windows: the drop of u^# across a
    window must not exceed the integral of the RHS over it.  Differencing
    quantile values instead of estimating the quantile derivative matters
    because near the peak the level-set annulus between adjacent sorted
    cells is thinner than a grid cell, so cell-level slopes carry O(1)
    lattice counting noise while the values themselves are accurate.
    Each window's excess is normalized by that window's RHS integral.
    """
    n = u1_star.dimension
    if u1_star.direction != "decreasing":
        raise ContractError("flux inequality applies to decreasing "
                            "eigenfunction rearrangements")
    if not windows >= 1:
        raise RangeError(f"window count must be >= 1, got {windows}")
    r = u1_star.radii
    u = u1_star.values
    C = u1_star.C_n
    s = C * r ** n
    if u.size < 4 * windows:
        raise ContractError(
            f"need at least {4 * windows} cells for {windows} windows, "
            f"have {u.size}")
    V = np.asarray(V_tilde(r), dtype=float) if V_tilde is not None \
        else np.zeros_like(r)
    I = _source_integral(s, u, V, lambda1)
    K = 1.0 / (n * n * C ** (2.0 / n))
    rhs = np.empty_like(s)
    rhs[1:] = K * s[1:] ** (2.0 / n - 2.0) * I[1:]
    # R(s) = int_0^s RHS.  Near 0 the integrand behaves like
    # (I/s) * s^{2/n-1}, singular but integrable for n >= 3; the first
    # cell gets the closed form of that power law instead of a trapezoid.
    R = np.empty_like(s)
    R[0] = 0.0
    R[1] = K * (I[1] / s[1]) * (n / 2.0) * s[1] ** (2.0 / n)
    R[2:] = R[1] + np.cumsum(0.5 * (rhs[2:] + rhs[1:-1]) * np.diff(s[1:]))
    sb = np.linspace(0.0, s[-1], windows + 1)
    ub = np.interp(sb, s, u)
    Rb = np.interp(sb, s, R)
    drop = ub[:-1] - ub[1:]
    allowed = Rb[1:] - Rb[:-1]
    floor = 1e-12 * max(float(R[-1]), 1.0)
    return float(np.max((drop - allowed) / np.maximum(allowed, floor)))
