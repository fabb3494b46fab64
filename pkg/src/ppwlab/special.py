"""Bessel functions of the first kind, their positive zeros, and the
classical free-Laplacian bound on lambda2/lambda1 for a ball.

The series evaluation is kept in-house (ascending series with a term
recurrence) so the package's reference constants do not lean on any outside
special-function library; mpmath backs only the large-argument regime where
the ascending series cancels itself away.
"""

import math
from dataclasses import dataclass

from .errors import NoSolutionError, NumericError, RangeError

# The ascending series alternates, so rounding error is amplified by the
# peak term, roughly e^x / sqrt(2 pi x).  Keeping x <= 8 holds the absolute
# error near 5e-14 in double precision; beyond that, evaluate via mpmath at
# 30 digits (which manages cancellation internally) and round back.
_SERIES_X_MAX = 8.0
_SERIES_TERM_CAP = 200
_SERIES_RTOL = 1e-17
_X_MAX = 200.0


def bessel_j(nu: float, x: float) -> float:
    """Bessel function J_nu(x) for real order nu >= 0 and 0 <= x <= 200.

    Ascending series with term recurrence
    t_{m+1} = -t_m (x^2/4) / ((m+1)(nu+m+1)), truncated once a term falls
    below 1e-17 of the running sum (hard cap 200 terms).  Arguments past
    x = 8 go through mpmath and are rounded back to double.
    """
    if nu < 0.0:
        raise RangeError(f"order nu must be nonnegative, got {nu}")
    if x < 0.0 or x > _X_MAX:
        raise RangeError(f"argument must lie in [0, {_X_MAX:g}], got {x}")
    if x == 0.0:
        return 1.0 if nu == 0.0 else 0.0
    if x > _SERIES_X_MAX:
        import mpmath

        with mpmath.workdps(30):
            return float(mpmath.besselj(nu, x))
    q = 0.25 * x * x
    term = math.pow(0.5 * x, nu) / math.gamma(nu + 1.0)
    total = term
    for m in range(_SERIES_TERM_CAP):
        term *= -q / ((m + 1.0) * (nu + m + 1.0))
        total += term
        if abs(term) <= _SERIES_RTOL * abs(total):
            return total
    raise NumericError(
        f"Bessel series did not settle within {_SERIES_TERM_CAP} terms "
        f"(nu={nu}, x={x})"
    )


def _bessel_j_prime(nu: float, x: float) -> float:
    # J_nu' = (nu/x) J_nu - J_{nu+1}; orders stay >= 0 for nu >= 0
    return (nu / x) * bessel_j(nu, x) - bessel_j(nu + 1.0, x)


@dataclass(frozen=True)
class BesselZero:
    """A located positive zero j_{nu,k} with its achieved residual."""

    nu: float
    k: int
    value: float
    residual: float


def bessel_zero(nu: float, k: int = 1) -> BesselZero:
    """k-th positive zero j_{nu,k} of J_nu (nu <= 50, k <= 20).

    Sign-change scan in steps of 0.5 starting just above nu (J_nu > 0
    there; the first zero exceeds nu and consecutive zeros are at least
    ~pi apart at these orders), then a bracketed Newton polish.
    """
    if k < 1 or int(k) != k:
        raise RangeError(f"zero index k must be a positive integer, got {k}")
    if k > 20:
        raise RangeError(f"zero index k must be at most 20, got {k}")
    if nu < 0.0 or nu > 50.0:
        raise RangeError(f"order nu must lie in [0, 50], got {nu}")

    step = 0.5
    lo = max(nu, 1e-3)
    f_lo = bessel_j(nu, lo)
    found = 0
    for _ in range(int(_X_MAX / step) + 1):
        hi = lo + step
        f_hi = bessel_j(nu, hi)
        if f_lo * f_hi < 0.0:
            found += 1
            if found == k:
                value = _newton_in_bracket(nu, lo, hi, f_lo, f_hi)
                return BesselZero(nu=nu, k=k, value=value,
                                  residual=abs(bessel_j(nu, value)))
        lo, f_lo = hi, f_hi
    raise NoSolutionError(
        f"no sign change for zero #{k} of J_{nu} within x <= {_X_MAX:g}")


def _newton_in_bracket(nu, lo, hi, f_lo, f_hi):
    # Newton iteration that falls back to bisection whenever a step would
    # leave the current sign-change bracket.
    x = 0.5 * (lo + hi)
    for _ in range(80):
        f = bessel_j(nu, x)
        if f == 0.0:
            return x
        if f * f_lo < 0.0:
            hi = x
        else:
            lo, f_lo = x, f
        d = _bessel_j_prime(nu, x)
        x_new = x - f / d if d != 0.0 else 0.5 * (lo + hi)
        if not (lo < x_new < hi):
            x_new = 0.5 * (lo + hi)
        if abs(x_new - x) <= 1e-15 * abs(x) + 1e-15:
            return x_new
        x = x_new
    return x


def ppw_constant(n: int) -> float:
    """Sharp bound on lambda2/lambda1 for the Dirichlet Laplacian on a ball
    in R^n: j_{n/2,1}^2 / j_{n/2-1,1}^2.  About 2.5387 for n = 2.
    """
    if int(n) != n or not 2 <= n <= 20:
        raise RangeError(f"dimension must be an integer in [2, 20], got {n}")
    num = bessel_zero(0.5 * n, 1).value
    den = bessel_zero(0.5 * n - 1.0, 1).value
    return (num / den) ** 2
