"""Radial potentials: evaluation, structural-condition checks, domination.

Four families cover the package's needs: the zero potential, powers k r^a,
even polynomials with nonnegative coefficients, and tabulated samples
interpolated by a monotone cubic (PCHIP) so that interpolation never
manufactures monotonicity the data does not have.

The structural conditions live here too:
  (a) V(0) = V'(0) = 0,
  (b) V' nondecreasing and V'' nondecreasing on [0, R],
plus convexity of r V(r), the hypothesis under which the second
eigenfunction of a ball sits in the first angular sector.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

from .errors import ContractError, RangeError

_PROBE_POINTS = 2049  # uniform condition-check grid (spec floor is 1024)
_PARAMETRIC_TOL = 1e-9
_TABLE_TOL = 1e-6


class RadialPotential:
    """Base class: a nonnegative potential V(r) on r >= 0 with two
    derivatives.  Instances are immutable after construction and safe to
    share between workers.
    """

    family = "abstract"

    def value(self, r):
        raise NotImplementedError

    def deriv(self, r):
        raise NotImplementedError

    def deriv2(self, r):
        raise NotImplementedError

    def __call__(self, r):
        return self.value(r)

    @property
    def max_radius(self) -> float:
        """Largest radius the potential can be evaluated at (inf unless
        tabulated)."""
        return math.inf

    def kernel_data(self):
        """(tag, params, breakpoints, coeffs) encoding for jitted kernels."""
        raise NotImplementedError

    def kernel_scaling(self):
        """(rscale, vscale): kernels evaluate vscale * V(rscale * r)."""
        return 1.0, 1.0


class ZeroPotential(RadialPotential):
    """V = 0; the free-Laplacian baseline."""

    family = "zero"

    def value(self, r):
        return np.zeros_like(np.asarray(r, dtype=float))[()]

    deriv = value
    deriv2 = value

    def kernel_data(self):
        e = np.empty(0)
        return 0, e, e, e

    def __repr__(self):
        return "ZeroPotential()"


class PowerPotential(RadialPotential):
    """V = k r^alpha with k > 0 and alpha >= 1.

    alpha below 2 is deliberately allowed even though condition (b) then
    fails; the sharpness scans need the family r^{2-eps}.
    """

    family = "power"

    def __init__(self, k: float, alpha: float):
        if not k > 0:
            raise RangeError(f"power potential needs k > 0, got {k}")
        if not alpha >= 1:
            raise RangeError(f"power potential needs alpha >= 1, got {alpha}")
        self.k = float(k)
        self.alpha = float(alpha)

    def value(self, r):
        r = np.asarray(r, dtype=float)
        return (self.k * np.power(r, self.alpha))[()]

    def deriv(self, r):
        r = np.asarray(r, dtype=float)
        a = self.alpha
        with np.errstate(divide="ignore"):
            out = self.k * a * np.power(r, a - 1.0)
        if a == 1.0:  # limit r -> 0 of k a r^0
            out = np.where(r == 0.0, self.k, out)
        return out[()]

    def deriv2(self, r):
        r = np.asarray(r, dtype=float)
        a = self.alpha
        # a == 1 at r = 0 hits 0 * inf inside the product; masked below
        with np.errstate(divide="ignore", invalid="ignore"):
            out = self.k * a * (a - 1.0) * np.power(r, a - 2.0)
        if a == 1.0:
            out = np.where(r == 0.0, 0.0, out)
        elif a == 2.0:
            out = np.where(r == 0.0, 2.0 * self.k, out)
        # 1 < a < 2 keeps the +inf limit at r = 0
        return out[()]

    def kernel_data(self):
        e = np.empty(0)
        return 1, np.array([self.k, self.alpha]), e, e

    def __repr__(self):
        return f"PowerPotential(k={self.k!r}, alpha={self.alpha!r})"


class PolynomialPotential(RadialPotential):
    """V = sum_j c_{2j} r^{2j} over even powers, nonnegative coefficients."""

    family = "poly"

    def __init__(self, coeffs: Sequence[float]):
        c = np.asarray(coeffs, dtype=float)
        if c.ndim != 1 or c.size == 0:
            raise ContractError("need a flat, nonempty coefficient list")
        if np.any(c < 0):
            raise RangeError("even-polynomial coefficients must be >= 0")
        self.coeffs = c  # coeffs[j] multiplies r^{2(j+1)}

    def value(self, r):
        r2 = np.square(np.asarray(r, dtype=float))
        acc = np.zeros_like(r2)
        for c in self.coeffs[::-1]:
            acc = (acc + c) * r2
        return acc[()]

    def deriv(self, r):
        r = np.asarray(r, dtype=float)
        r2 = np.square(r)
        acc = np.zeros_like(r2)
        for j in range(len(self.coeffs) - 1, -1, -1):
            p = 2 * (j + 1)
            acc = acc * r2 + p * self.coeffs[j]
        return (acc * r)[()]

    def deriv2(self, r):
        r2 = np.square(np.asarray(r, dtype=float))
        acc = np.zeros_like(r2)
        for j in range(len(self.coeffs) - 1, -1, -1):
            p = 2 * (j + 1)
            acc = acc * r2 + p * (p - 1) * self.coeffs[j]
        return acc[()]

    def kernel_data(self):
        e = np.empty(0)
        return 2, np.array(self.coeffs, dtype=float), e, e

    def __repr__(self):
        return f"PolynomialPotential(coeffs={list(self.coeffs)!r})"


class TablePotential(RadialPotential):
    """Sampled potential interpolated by PCHIP (monotone cubic).

    Radii must be strictly increasing and start at 0; values nonnegative.
    Evaluation past the last sample raises, the data does not extrapolate.
    """

    family = "table"

    def __init__(self, radii: Sequence[float], values: Sequence[float]):
        from scipy.interpolate import PchipInterpolator

        r = np.asarray(radii, dtype=float)
        v = np.asarray(values, dtype=float)
        if r.ndim != 1 or r.shape != v.shape or r.size < 2:
            raise ContractError("table needs matching 1-D radii/values, >= 2 rows")
        if r[0] != 0.0:
            raise ContractError(f"table radii must start at 0, got {r[0]}")
        if np.any(np.diff(r) <= 0):
            raise ContractError("table radii must be strictly increasing")
        if np.any(v < 0):
            raise RangeError("table values must be nonnegative")
        self.radii = r
        self.values = v
        self._pp = PchipInterpolator(r, v, extrapolate=False)
        self._d1 = self._pp.derivative(1)
        self._d2 = self._pp.derivative(2)

    @property
    def max_radius(self) -> float:
        return float(self.radii[-1])

    def _check_range(self, r):
        r = np.asarray(r, dtype=float)
        if np.any(r < 0) or np.any(r > self.radii[-1]):
            raise RangeError(
                f"table potential evaluated outside [0, {self.radii[-1]:g}]")
        return r

    def value(self, r):
        return self._pp(self._check_range(r))[()]

    def deriv(self, r):
        return self._d1(self._check_range(r))[()]

    def deriv2(self, r):
        return self._d2(self._check_range(r))[()]

    def kernel_data(self):
        # PPoly layout: value on [x_i, x_{i+1}) is
        # sum_j c[j, i] (r - x_i)^{3-j}; flatten C-order for the kernels.
        return 3, np.empty(0), self._pp.x.copy(), self._pp.c.ravel().copy()

    def __repr__(self):
        return (f"TablePotential({len(self.radii)} samples on "
                f"[0, {self.radii[-1]:g}])")


def eval_potential(P: RadialPotential, r):
    """(V, V', V'') at r.  Tables reject r outside their sampled range."""
    return P.value(r), P.deriv(r), P.deriv2(r)


@dataclass(frozen=True)
class ConditionReport:
    """Outcome of the structural checks on a potential over [0, R].

    worst_violation is the most negative scale-normalized defect found
    across all checks (0.0 when every check passes) and worst_location
    the radius it occurred at.
    """

    a_holds: bool
    b_holds: bool
    rv_convex: bool
    worst_violation: float
    worst_location: float
    tol: float


def _default_tol(P: RadialPotential) -> float:
    return _TABLE_TOL if isinstance(P, TablePotential) else _PARAMETRIC_TOL


# Convexity on the probe grid uses second differences over a widened step
# (stride * h) so float rounding, amplified by 1/h^2, stays orders of
# magnitude under the parametric tol of 1e-9.
_CONVEXITY_STRIDE = 16


def _monotone_defect(vals, r, tol):
    """Most negative slope of vals against r, normalized by value scale.

    Non-finite samples (e.g. V'' at r = 0 for subquadratic powers) are
    dropped; monotonicity is then judged on the open interval.  The
    defect is a rate per unit r, so verdicts do not depend on how finely
    the grid samples.
    """
    keep = np.isfinite(vals)
    v, rr = vals[keep], r[keep]
    if v.size < 3:
        return False, 0.0, 0.0
    scale = max(1.0, float(np.max(np.abs(v))))
    d = np.diff(v) / np.diff(rr) / scale
    i = int(np.argmin(d))
    worst = float(d[i])
    return worst >= -tol, worst, float(rr[i + 1])


def _convexity_defect(vals, r, tol, stride=1):
    """Most negative second divided difference (a curvature per unit r^2)."""
    s = stride
    if vals.size < 2 * s + 1:
        s = max(1, (vals.size - 1) // 2)
    h1 = r[s:-s] - r[:-2 * s]
    h2 = r[2 * s:] - r[s:-s]
    dd = 2.0 * (vals[2 * s:] * h1 - vals[s:-s] * (h1 + h2)
                + vals[:-2 * s] * h2) / (h1 * h2 * (h1 + h2))
    scale = max(1.0, float(np.max(np.abs(vals))))
    dd = dd / scale
    i = int(np.argmin(dd))
    worst = float(dd[i])
    return worst >= -tol, worst, float(r[i + s])


def validate_conditions(P: RadialPotential, R: float,
                        tol: float | None = None) -> ConditionReport:
    """Check conditions (a), (b) and convexity of r V(r) on [0, R].

    All checks are discrete and every defect is a rate (per unit r for
    monotonicity, per unit r^2 for convexity), normalized by the value
    scale, so tol has the same meaning at any resolution.  Parametric
    families are probed on a uniform 2049-point grid with analytic
    derivatives.  Tables are judged at their own nodes through divided
    differences of the sampled values: the interpolant's higher
    derivatives sawtooth at data resolution, so asking them for
    monotonicity would fail every table.  Violations are reported,
    never raised.
    """
    if not R > 0:
        raise RangeError(f"need R > 0, got {R}")
    if tol is None:
        tol = _default_tol(P)

    if isinstance(P, TablePotential):
        return _validate_table(P, R, tol)

    r = np.linspace(0.0, R, _PROBE_POINTS)
    V = np.asarray(P.value(r), dtype=float)
    V1 = np.asarray(P.deriv(r), dtype=float)
    V2 = np.asarray(P.deriv2(r), dtype=float)

    scale0 = max(1.0, float(np.max(np.abs(V[np.isfinite(V)]))))
    a_defect = -max(abs(float(V[0])), abs(float(V1[0]))
                    if np.isfinite(V1[0]) else math.inf) / scale0
    a_holds = a_defect >= -tol

    ok1, worst1, loc1 = _monotone_defect(V1, r, tol)
    ok2, worst2, loc2 = _monotone_defect(V2, r, tol)
    b_holds = ok1 and ok2

    rv_convex, worst_rv, loc_rv = _convexity_defect(
        r * V, r, tol, stride=_CONVEXITY_STRIDE)

    candidates = [(a_defect if not a_holds else 0.0, 0.0),
                  (worst1 if not ok1 else 0.0, loc1),
                  (worst2 if not ok2 else 0.0, loc2),
                  (worst_rv if not rv_convex else 0.0, loc_rv)]
    worst, where = min(candidates, key=lambda t: t[0])
    return ConditionReport(a_holds=a_holds, b_holds=b_holds,
                           rv_convex=rv_convex, worst_violation=worst,
                           worst_location=where, tol=tol)


def _validate_table(P: TablePotential, R: float, tol: float):
    """Condition checks at the table's own nodes.

    V' is estimated by the interpolant's endpoint derivative (exact for
    quadratic data) for condition (a) and by first divided differences
    for monotonicity; V'' by second divided differences.  All further
    smoothness verdicts then come from differences of those sequences.
    """
    keep = P.radii <= R * (1.0 + 1e-12)
    rt = P.radii[keep]
    vt = P.values[keep]
    if rt.size < 5:
        raise ContractError(
            f"need at least 5 table nodes on [0, {R:g}] to judge "
            f"conditions, found {rt.size}")
    scale0 = max(1.0, float(np.max(np.abs(vt))))
    d0 = float(P.deriv(0.0))
    a_defect = -max(abs(float(vt[0])), abs(d0)) / scale0
    a_holds = a_defect >= -tol

    mid = 0.5 * (rt[1:] + rt[:-1])
    slopes = np.diff(vt) / np.diff(rt)
    ok1, worst1, loc1 = _monotone_defect(slopes, mid, tol)
    # second divided differences live at the interior nodes
    h1 = rt[1:-1] - rt[:-2]
    h2 = rt[2:] - rt[1:-1]
    curv = 2.0 * (vt[2:] * h1 - vt[1:-1] * (h1 + h2)
                  + vt[:-2] * h2) / (h1 * h2 * (h1 + h2))
    ok2, worst2, loc2 = _monotone_defect(curv, rt[1:-1], tol)
    b_holds = ok1 and ok2

    rv_convex, worst_rv, loc_rv = _convexity_defect(rt * vt, rt, tol)

    candidates = [(a_defect if not a_holds else 0.0, 0.0),
                  (worst1 if not ok1 else 0.0, loc1),
                  (worst2 if not ok2 else 0.0, loc2),
                  (worst_rv if not rv_convex else 0.0, loc_rv)]
    worst, where = min(candidates, key=lambda t: t[0])
    return ConditionReport(a_holds=a_holds, b_holds=b_holds,
                           rv_convex=rv_convex, worst_violation=worst,
                           worst_location=where, tol=tol)


class DominationReport(NamedTuple):
    ok: bool
    worst_margin: float
    r_worst: float


def dominates(P_low, P_high, R1: float, tol: float = 1e-9) -> DominationReport:
    """Check P_low(r) <= P_high(r) + tol on a 2049-point grid over [0, R1].

    Either argument may be a RadialPotential, a rearranged radial profile,
    or any callable of r.  worst_margin is min(P_high - P_low); negative
    means P_low pokes above.
    """
    if not R1 > 0:
        raise RangeError(f"need R1 > 0, got {R1}")
    r = np.linspace(0.0, R1, _PROBE_POINTS)
    lo = np.asarray(P_low(r), dtype=float)
    hi = np.asarray(P_high(r), dtype=float)
    margin = hi - lo
    i = int(np.argmin(margin))
    worst = float(margin[i])
    return DominationReport(ok=bool(worst >= -tol), worst_margin=worst,
                            r_worst=float(r[i]))


def parse_table_file(path: str) -> TablePotential:
    """Two-column text file `r value` per line; `#` starts a comment."""
    data = np.loadtxt(path, comments="#", ndmin=2)
    if data.shape[1] != 2:
        raise ContractError(
            f"table file must have two columns, {path} has {data.shape[1]}")
    return TablePotential(data[:, 0], data[:, 1])


def potential_from_spec(spec: str) -> RadialPotential:
    """Build a potential from its command-line spec string.

    Grammar: `zero` | `power:k=<f>,alpha=<f>` | `poly:c2=<f>[,c4=<f>...]`
    | `table:<path>`.
    """
    spec = spec.strip()
    if spec == "zero":
        return ZeroPotential()
    head, sep, rest = spec.partition(":")
    if not sep:
        raise ContractError(f"malformed potential spec {spec!r}")
    if head == "table":
        return parse_table_file(rest)
    try:
        kv = dict(item.split("=", 1) for item in rest.split(","))
        params = {k.strip(): float(v) for k, v in kv.items()}
    except (ValueError, TypeError) as exc:
        raise ContractError(f"malformed potential spec {spec!r}") from exc
    if head == "power":
        if set(params) != {"k", "alpha"}:
            raise ContractError(
                f"power spec needs exactly k and alpha, got {sorted(params)}")
        return PowerPotential(params["k"], params["alpha"])
    if head == "poly":
        coeffs = {}
        for key, val in params.items():
            if not (key.startswith("c") and key[1:].isdigit()):
                raise ContractError(f"bad poly coefficient name {key!r}")
            p = int(key[1:])
            if p < 2 or p % 2:
                raise ContractError(f"poly powers must be even >= 2, got {key!r}")
            coeffs[p // 2] = val
        top = max(coeffs)
        flat = [coeffs.get(j, 0.0) for j in range(1, top + 1)]
        return PolynomialPotential(flat)
    raise ContractError(f"unknown potential family {head!r}")
