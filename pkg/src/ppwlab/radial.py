"""Radial Dirichlet eigenproblems on balls by Pruefer-phase shooting.

The equation for the sector-l radial factor z of an eigenfunction on the
ball B_R in R^n, with potential V and optional density e^{+-r^2}, is

    z'' + ((n-1)/r +- 2r) z' - (V + l(l+n-2)/r^2 - lambda) z = 0,
    z regular at 0,  z(R) = 0.

Everything is integrated in Liouville normal form (see shooting.py); the
eigenvalue is the root of theta(R; lambda) = k pi, which node-count
bisection reaches for free because floor(theta/pi) is the running node
count and theta(R; .) is strictly increasing.  Eigenfunctions come from a
forward wave pass (plus a backward pass stitched at the outer turning
point when the forbidden tail would amplify one-sided roundoff by more
than e^14).
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from . import shooting
from .errors import ContractError, NoSolutionError, NumericError, RangeError
from .potentials import RadialPotential, validate_conditions

_WEIGHTS = ("none", "plus", "minus")
_GRID_M = 2048
_DEFAULT_TOL = 1e-10
_PHASE_RTOL = 1e-12
_WAVE_RTOL = 1e-12
_R0_FACTOR = 1e-6
# Forbidden-tail action (e-foldings) beyond which recovery integrates from
# both ends: one-sided tails carry mode garbage ~ dlam * e^S, which must
# stay below the node-count amplitude floor.
_ACTION_LIMIT = 6.0
_NODE_FLOOR = 1e-6
_RESCALE_BELOW = 1e-2
_BRACKET_DOUBLINGS = 10


@dataclass(frozen=True)
class BallProblem:
    """Radial eigenproblem data: dimension, radius, sector, potential,
    and optional Gaussian density e^{+r^2} ("plus") or e^{-r^2} ("minus").
    """

    n: int
    R: float
    ell: int
    potential: RadialPotential
    weight_sign: str = "none"

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 2:
            raise RangeError(f"dimension must be an integer >= 2, got {self.n}")
        if not self.R > 0:
            raise RangeError(f"radius must be positive, got {self.R}")
        if int(self.ell) != self.ell or self.ell < 0:
            raise RangeError(f"sector must be an integer >= 0, got {self.ell}")
        if self.weight_sign not in _WEIGHTS:
            raise RangeError(f"weight_sign must be one of {_WEIGHTS}")
        if self.potential.max_radius < self.R:
            raise ContractError(
                f"potential only evaluable to r = {self.potential.max_radius:g}"
                f" < R = {self.R:g}")

    @property
    def sigma(self) -> float:
        """Frobenius exponent of the Liouville variable, l + (n-1)/2."""
        return self.ell + 0.5 * (self.n - 1)

    @property
    def liouville_A(self) -> float:
        """Coefficient of 1/r^2 in Liouville form: sigma (sigma - 1)."""
        s = self.sigma
        return s * (s - 1.0)

    @property
    def weight_terms(self) -> tuple[float, float]:
        """(wquad, wshift): the r^2 coefficient and constant shift the
        density adds to the Liouville form potential."""
        if self.weight_sign == "plus":
            return 1.0, float(self.n)
        if self.weight_sign == "minus":
            return 1.0, -float(self.n)
        return 0.0, 0.0


@dataclass(eq=False)
class EigenPair:
    """One converged sector eigenvalue with its radial eigenfunction.

    z and dz are samples of the radial factor and its derivative on the
    uniform grid r; the function is normalized so the weighted radial
    L^2 norm (volume element r^{n-1} e^{+-r^2} dr) is 1 and z > 0 near 0.
    normalization re-measures that norm by Simpson quadrature on the
    stored samples, residual is the max scaled ODE defect (ode_residual),
    and matching_defect the relative derivative jump where a two-sided
    recovery was stitched (0 for one-sided).
    """

    lam: float
    r: np.ndarray
    z: np.ndarray
    dz: np.ndarray
    node_count: int
    k: int
    normalization: float
    residual: float
    phase_defect: float
    boundary_defect: float
    matching_defect: float
    problem: BallProblem
    _interp: object = field(default=None, repr=False)

    @property
    def radial_samples(self) -> np.ndarray:
        """(m, 2) array of [r_i, z(r_i)] rows."""
        return np.column_stack((self.r, self.z))

    def interpolate(self):
        """Cubic interpolant of z with the stored endpoint derivatives."""
        if self._interp is None:
            from scipy.interpolate import CubicSpline

            self._interp = CubicSpline(
                self.r, self.z,
                bc_type=((1, float(self.dz[0])), (1, float(self.dz[-1]))))
        return self._interp

    def __repr__(self):
        p = self.problem
        return (f"EigenPair(lam={self.lam:.12g}, n={p.n}, R={p.R:g}, "
                f"ell={p.ell}, k={self.k}, nodes={self.node_count}, "
                f"residual={self.residual:.2e})")


class FirstTwo(NamedTuple):
    lambda1: float
    lambda2: float
    z1: EigenPair
    z2: EigenPair


def _kernel_args(prob: BallProblem):
    tag, params, bx, bc = prob.potential.kernel_data()
    rscale, vscale = prob.potential.kernel_scaling()
    wquad, wshift = prob.weight_terms
    return (prob.liouville_A, wquad, wshift, tag,
            np.ascontiguousarray(params, dtype=np.float64),
            np.ascontiguousarray(bx, dtype=np.float64),
            np.ascontiguousarray(bc, dtype=np.float64),
            float(rscale), float(vscale))


def _phase(prob: BallProblem, lam: float, kargs) -> float:
    A, wquad, wshift, tag, params, bx, bc, rscale, vscale = kargs
    sigma = prob.sigma
    r0 = _R0_FACTOR * prob.R
    veff0 = float(prob.potential.value(0.0)) + wshift
    d = (veff0 - lam) / (4.0 * sigma + 2.0)
    # theta = atan(y / y') from y = r^sigma (1 + d r^2)
    num = r0 * (1.0 + d * r0 * r0)
    den = sigma + (sigma + 2.0) * d * r0 * r0
    theta0 = math.atan2(num, den)
    th, status = shooting.phase_integrate(
        lam, r0, prob.R, theta0, A, wquad, wshift, tag, params, bx, bc,
        rscale, vscale, _PHASE_RTOL)
    if status != shooting.STATUS_OK:
        raise NumericError(
            f"phase integration stalled (status {status}) at lam={lam:g} "
            f"for {prob}")
    return th


def _lambda_cap(prob: BallProblem) -> float:
    from .special import bessel_zero

    j = bessel_zero(0.5 * prob.n, 1).value
    wquad, wshift = prob.weight_terms
    v_edge = float(prob.potential.value(prob.R))
    v_edge += wquad * prob.R ** 2 + abs(wshift)
    return max(4.0 * (j / prob.R) ** 2, 4.0 * v_edge)


def solve_sector(prob: BallProblem, k: int = 1,
                 tol: float = _DEFAULT_TOL) -> EigenPair:
    """k-th eigenvalue (and eigenfunction) of the sector prob.ell.

    The eigenvalue is bracketed on [0, Lambda_max] (doubling the cap up to
    2^10 times if the phase says the root lies beyond) and polished by
    brentq on theta(R; lambda) - k pi; the converged eigenfunction has
    exactly k-1 interior sign changes, which is re-verified on the sample
    grid.
    """
    if int(k) != k or not 1 <= k <= 10:
        raise RangeError(f"eigenvalue index k must be in 1..10, got {k}")
    if tol < 1e-12:
        raise RangeError(f"tol must be >= 1e-12, got {tol}")

    if prob.R < _RESCALE_BELOW and prob.weight_sign == "none":
        return _solve_rescaled(prob, k, tol)

    from scipy.optimize import brentq

    kargs = _kernel_args(prob)
    target = k * math.pi

    def f(lam):
        return _phase(prob, lam, kargs) - target

    f0 = f(0.0)
    if f0 >= 0.0:
        raise NumericError(
            f"phase at lambda=0 already past k pi for {prob}; "
            "operator is not positive as assumed")
    cap0 = _lambda_cap(prob)
    cap = cap0
    fc = f(cap)
    doublings = 0
    while fc < 0.0:
        doublings += 1
        if doublings > _BRACKET_DOUBLINGS:
            raise NumericError(
                f"no eigenvalue bracket: theta(R) < {k} pi throughout "
                f"[0, {cap:g}] (started from cap {cap0:g})")
        cap *= 2.0
        fc = f(cap)

    lam = brentq(f, 0.0, cap, xtol=max(1e-14, 1e-3 * tol),
                 rtol=max(4 * np.finfo(float).eps, tol))
    phase_defect = abs(f(lam))
    return _recover_pair(prob, lam, k, kargs, phase_defect)


def _solve_rescaled(prob: BallProblem, k: int, tol: float) -> EigenPair:
    # lambda_k(B_R, V) = lambda_k(B_1, R^2 V(R .)) / R^2; conditioning
    # only, the returned pair is expressed in original coordinates.
    beta = prob.R
    unit = BallProblem(n=prob.n, R=1.0, ell=prob.ell,
                       potential=_Rescaled(prob.potential, beta),
                       weight_sign="none")
    hat = solve_sector(unit, k=k, tol=tol)
    lam = hat.lam / beta**2
    r = hat.r * beta
    z = hat.z * beta ** (-0.5 * prob.n)
    dz = hat.dz * beta ** (-0.5 * prob.n - 1.0)
    pair = EigenPair(lam=lam, r=r, z=z, dz=dz, node_count=hat.node_count,
                     k=k, normalization=hat.normalization, residual=0.0,
                     phase_defect=hat.phase_defect,
                     boundary_defect=hat.boundary_defect,
                     matching_defect=hat.matching_defect, problem=prob)
    pair.residual = ode_residual(pair, prob)
    return pair


class _Rescaled(RadialPotential):
    """beta^2 V(beta r); internal to the small-radius conditioning path."""

    family = "rescaled"

    def __init__(self, base: RadialPotential, beta: float):
        self.base = base
        self.beta = float(beta)

    def value(self, r):
        b = self.beta
        return b * b * self.base.value(b * np.asarray(r, dtype=float))

    def deriv(self, r):
        b = self.beta
        return b**3 * self.base.deriv(b * np.asarray(r, dtype=float))

    def deriv2(self, r):
        b = self.beta
        return b**4 * self.base.deriv2(b * np.asarray(r, dtype=float))

    @property
    def max_radius(self):
        return self.base.max_radius / self.beta

    def kernel_data(self):
        # same family data; scaling enters through kernel_scaling
        return self.base.kernel_data()

    def kernel_scaling(self):
        return self.beta, self.beta**2


def rescaled_potential(base: RadialPotential, beta: float) -> RadialPotential:
    """beta^2 V(beta r), the zoom that maps B_R spectra to B_{R/beta}.

    Eigenvalues scale by beta^2 and the ratio lambda2/lambda1 is left
    unchanged, which is what the radius-monotonicity construction
    exploits.
    """
    if not beta > 0:
        raise RangeError(f"need beta > 0, got {beta}")
    return _Rescaled(base, float(beta))


def _effective_Q(prob: BallProblem, lam: float, r: np.ndarray) -> np.ndarray:
    wquad, wshift = prob.weight_terms
    V = np.asarray(prob.potential.value(r), dtype=float)
    return V + prob.liouville_A / r**2 + wquad * r**2 + wshift - lam


def _recover_pair(prob: BallProblem, lam: float, k: int, kargs,
                  phase_defect: float) -> EigenPair:
    A, wquad, wshift, tag, params, bx, bc, rscale, vscale = kargs
    n, R, ell = prob.n, prob.R, prob.ell
    m = _GRID_M
    nodes = np.linspace(0.0, R, m)
    r0 = _R0_FACTOR * R

    ws = {"plus": 1.0, "minus": -1.0, "none": 0.0}[prob.weight_sign]
    cP = 2.0 * ws
    L = ell * (ell + n - 2.0)
    V0 = float(prob.potential.value(0.0))
    d = (V0 - lam - cP * ell) / (4.0 * ell + 2.0 * n)
    z0 = r0**ell * (1.0 + d * r0 * r0)
    u0 = r0 ** (ell - 1.0) * (ell + (ell + 2.0) * d * r0 * r0)

    # One- vs two-sided recovery: the classically forbidden tail amplifies
    # the mode ratio by e^{2S} with S the action integral of the Liouville
    # form (the ratio is the same in z-form; the weight factors cancel).
    interior = nodes[1:]
    Q = _effective_Q(prob, lam, interior)
    allowed = np.nonzero(Q <= 0.0)[0]
    i_tp = int(allowed[-1]) + 1 if allowed.size else 1
    tail = slice(i_tp, m - 1)
    action = float(np.trapezoid(np.sqrt(np.maximum(Q[tail], 0.0)),
                                interior[tail]))

    z = np.zeros(m)
    dz = np.zeros(m)
    matching_defect = 0.0
    if action <= _ACTION_LIMIT:
        s_tot, _, status = shooting.wave_integrate(
            lam, float(n), L, cP, ws, tag, params, bx, bc, rscale, vscale,
            nodes, r0, z0, u0, 1, m - 1, z, dz, _WAVE_RTOL)
        _check_wave(status, prob, lam)
    else:
        i_m = min(max(i_tp + 1, 4), m - 5)
        s_f, _, status = shooting.wave_integrate(
            lam, float(n), L, cP, ws, tag, params, bx, bc, rscale, vscale,
            nodes, r0, z0, u0, 1, i_m, z, dz, _WAVE_RTOL)
        _check_wave(status, prob, lam)
        zb = np.zeros(m)
        ub = np.zeros(m)
        s_b, _, status = shooting.wave_integrate(
            lam, float(n), L, cP, ws, tag, params, bx, bc, rscale, vscale,
            nodes, R, 0.0, -1.0, m - 1, i_m, zb, ub, _WAVE_RTOL)
        _check_wave(status, prob, lam)
        if zb[i_m] == 0.0:
            raise NumericError(
                f"two-sided recovery hit a node at the match point "
                f"(lam={lam:g}, {prob})")
        scale = z[i_m] / zb[i_m]
        uf = dz[i_m]
        ubm = scale * ub[i_m]
        matching_defect = abs(uf - ubm) / (abs(uf) + abs(ubm) + 1e-300)
        z[i_m + 1:] = scale * zb[i_m + 1:]
        dz[i_m + 1:] = scale * ub[i_m + 1:]
        s_tot = s_f + scale**2 * s_b

    # head correction for [0, r0]: z ~ r^ell
    s_tot += r0 ** (2.0 * ell + n) / (2.0 * ell + n)
    norm = math.sqrt(s_tot)
    z /= norm
    dz /= norm
    _fill_origin(z, dz, nodes, ell)

    if z[max(1, m // 10)] < 0.0:
        z = -z
        dz = -dz

    zmax = float(np.max(np.abs(z)))
    sign = np.sign(z[1:m - 1])
    good = np.abs(z[1:m - 1]) > _NODE_FLOOR * zmax
    s_seq = sign[good]
    nodes_found = int(np.count_nonzero(s_seq[1:] * s_seq[:-1] < 0))
    if nodes_found != k - 1:
        raise NumericError(
            f"recovered eigenfunction has {nodes_found} interior nodes, "
            f"expected {k - 1} (lam={lam:g}, {prob})")

    from scipy.integrate import simpson

    wfac = np.exp(ws * nodes**2)
    dens = z**2 * nodes ** (n - 1) * wfac
    renorm = float(simpson(dens, x=nodes))

    pair = EigenPair(lam=float(lam), r=nodes, z=z, dz=dz,
                     node_count=nodes_found, k=k, normalization=renorm,
                     residual=0.0, phase_defect=phase_defect,
                     boundary_defect=abs(z[-1]) / zmax,
                     matching_defect=matching_defect, problem=prob)
    pair.residual = ode_residual(pair, prob)
    return pair


def _check_wave(status, prob, lam):
    if status != shooting.STATUS_OK:
        raise NumericError(
            f"wave integration stalled (status {status}) at lam={lam:g} "
            f"for {prob}")


def _fill_origin(z, dz, nodes, ell):
    # Frobenius: z ~ r^ell (a + b r^2 + ...); extrapolate the analytic
    # piece to r = 0 from the first three interior samples.
    x = nodes[1:4] ** 2
    if ell == 0:
        w = z[1:4]
        z[0] = _lagrange0(x, w)
        dz[0] = 0.0
    elif ell == 1:
        w = z[1:4] / nodes[1:4]
        z[0] = 0.0
        dz[0] = _lagrange0(x, w)
    else:
        z[0] = 0.0
        dz[0] = 0.0


def _lagrange0(x, w):
    # quadratic Lagrange extrapolation to x = 0
    x0, x1, x2 = x
    l0 = (x1 * x2) / ((x0 - x1) * (x0 - x2))
    l1 = (x0 * x2) / ((x1 - x0) * (x1 - x2))
    l2 = (x0 * x1) / ((x2 - x0) * (x2 - x1))
    return float(w[0] * l0 + w[1] * l1 + w[2] * l2)


def ode_residual(pair: EigenPair, prob: BallProblem) -> float:
    """Max scaled defect of the sector ODE over the sample grid.

    z'' is reconstructed by 4th-order finite differences of the stored
    derivative samples, so the defect measures how well the samples solve
    the original (untransformed) equation.
    """
    n, ell = prob.n, prob.ell
    r, z, dz = pair.r, pair.z, pair.dz
    h = r[1] - r[0]
    i = np.arange(2, len(r) - 2)
    d2 = (-dz[i + 2] + 8.0 * dz[i + 1] - 8.0 * dz[i - 1] + dz[i - 2]) \
        / (12.0 * h)
    ws2 = {"plus": 2.0, "minus": -2.0, "none": 0.0}[prob.weight_sign]
    ri = r[i]
    P = (n - 1.0) / ri + ws2 * ri
    L = ell * (ell + n - 2.0)
    Vi = np.asarray(prob.potential.value(ri), dtype=float)
    react = (Vi + L / ri**2 - pair.lam) * z[i]
    defect = d2 + P * dz[i] - react
    zmax = float(np.max(np.abs(z)))
    floor = 1e-9 * max(1.0, abs(pair.lam)) * zmax
    scale = np.abs(d2) + np.abs(P * dz[i]) + np.abs(react) + floor
    return float(np.max(np.abs(defect) / scale))


def first_two(n: int, R: float, potential: RadialPotential,
              tol: float = _DEFAULT_TOL) -> FirstTwo:
    """First two Dirichlet eigenvalues of -Laplace + V on the ball B_R.

    lambda1 comes from sector l=0; lambda2 from sector l=1, which is the
    true second eigenvalue whenever r V(r) is convex.  If the convexity
    check fails, the l=0 second eigenvalue is solved as well, the smaller
    of the two is returned, and a warning is issued since then no sector
    theorem applies.
    """
    prob0 = BallProblem(n=n, R=R, ell=0, potential=potential)
    prob1 = BallProblem(n=n, R=R, ell=1, potential=potential)
    z1 = solve_sector(prob0, k=1, tol=tol)
    z2 = solve_sector(prob1, k=1, tol=tol)
    report = validate_conditions(potential, R)
    if not report.rv_convex:
        alt = solve_sector(prob0, k=2, tol=tol)
        warnings.warn(
            "r V(r) is not convex; second eigenvalue cross-checked "
            f"against the radial sector (l=1: {z2.lam:.10g}, l=0 k=2: "
            f"{alt.lam:.10g})", stacklevel=2)
        if alt.lam < z2.lam:
            z2 = alt
    if not z1.lam < z2.lam:
        raise NumericError(
            f"sector eigenvalues out of order: {z1.lam} >= {z2.lam}")
    return FirstTwo(lambda1=z1.lam, lambda2=z2.lam, z1=z1, z2=z2)
