"""Jitted integration kernels for the radial eigenproblems.

All radial equations are integrated in Liouville normal form
y'' = Q(r) y with y = r^{(n-1)/2} e^{+-r^2/2} z, where

    Q(r) = vscale*V(rscale*r) + A/r^2 + wquad*r^2 + wshift - lam,
    A    = l(l+n-2) + (n-1)(n-3)/4.

Two kernels share one adaptive Dormand-Prince 5(4) stepper:

* phase_integrate advances the Pruefer angle theta = atan2(y, y'),
  theta' = cos^2(theta) - Q sin^2(theta).  The phase stays O(1) even when
  y itself would swing through hundreds of e-foldings, theta(R; lam) is
  strictly increasing in lam, crosses multiples of pi only upward, and
  floor(theta/pi) is the running node count, so eigenvalues are roots of
  theta(R; lam) = k pi.

* wave_integrate advances the original radial variable (z, z', integral
  of z^2 r^{n-1} e^{+-r^2}) and records z, z' on prescribed grid nodes, in
  either direction, for eigenfunction recovery.  Integrating in z-form
  rather than Liouville form keeps z' free of the cancellation that
  plagues back-conversion when z is nearly flat (weighted ground states
  with lambda near 0); the phase integration already fixed lambda, and
  both forms describe the same solution.

Potentials are passed as (tag, params, bx, bc): 0 zero, 1 power k r^a,
2 even polynomial, 3 cubic spline segments in PPoly layout.
"""

import numpy as np
from numba import njit

STATUS_OK = 0
STATUS_STEP_UNDERFLOW = 1
STATUS_STEP_CAP = 2

_MAX_ITER = 4_000_000

# Dormand-Prince 5(4) tableau (FSAL)
_A21 = 1.0 / 5.0
_A31, _A32 = 3.0 / 40.0, 9.0 / 40.0
_A41, _A42, _A43 = 44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0
_A51, _A52, _A53, _A54 = (19372.0 / 6561.0, -25360.0 / 2187.0,
                          64448.0 / 6561.0, -212.0 / 729.0)
_A61, _A62, _A63, _A64, _A65 = (9017.0 / 3168.0, -355.0 / 33.0,
                                46732.0 / 5247.0, 49.0 / 176.0,
                                -5103.0 / 18656.0)
_B1, _B3, _B4, _B5, _B6 = (35.0 / 384.0, 500.0 / 1113.0, 125.0 / 192.0,
                           -2187.0 / 6784.0, 11.0 / 84.0)
_E1, _E3, _E4, _E5, _E6, _E7 = (71.0 / 57600.0, -71.0 / 16695.0,
                                71.0 / 1920.0, -17253.0 / 339200.0,
                                22.0 / 525.0, -1.0 / 40.0)
_C2, _C3, _C4, _C5 = 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0


@njit(cache=True)
def potential_value(tag, params, bx, bc, r):
    """V(r) for the encoded potential family."""
    if tag == 0:
        return 0.0
    if tag == 1:
        return params[0] * r ** params[1]
    if tag == 2:
        r2 = r * r
        acc = 0.0
        for j in range(params.size - 1, -1, -1):
            acc = (acc + params[j]) * r2
        return acc
    # tag 3: piecewise cubic, bc holds c[j, i] flattened C-order,
    # segment value = ((c0*t + c1)*t + c2)*t + c3 with t = r - bx[i]
    m = bx.size
    if r <= bx[0]:
        i = 0
    elif r >= bx[m - 1]:
        i = m - 2
    else:
        lo, hi = 0, m - 1
        while hi - lo > 1:
            mid = (lo + hi) // 2
            if bx[mid] <= r:
                lo = mid
            else:
                hi = mid
        i = lo
    t = r - bx[i]
    nseg = m - 1
    return (((bc[i] * t + bc[nseg + i]) * t + bc[2 * nseg + i]) * t
            + bc[3 * nseg + i])


@njit(cache=True, inline="always")
def _qval(r, lam, A, wquad, wshift, tag, params, bx, bc, rscale, vscale):
    V = vscale * potential_value(tag, params, bx, bc, rscale * r)
    return V + A / (r * r) + (wquad * r + 0.0) * r + wshift - lam


@njit(cache=True, inline="always")
def _theta_rhs(r, th, lam, A, wquad, wshift, tag, params, bx, bc, rs, vs):
    c = np.cos(th)
    s = np.sin(th)
    Q = _qval(r, lam, A, wquad, wshift, tag, params, bx, bc, rs, vs)
    return c * c - Q * s * s


@njit(cache=True)
def phase_integrate(lam, r0, R, theta0, A, wquad, wshift,
                    tag, params, bx, bc, rscale, vscale, rtol):
    """Pruefer angle at R for spectral parameter lam.

    Returns (theta_R, status).
    """
    r = r0
    th = theta0
    h = 0.05 * r0
    hmin = 1e-16 * R
    k1 = _theta_rhs(r, th, lam, A, wquad, wshift, tag, params, bx, bc,
                    rscale, vscale)
    for _ in range(_MAX_ITER):
        if r >= R:
            return th, STATUS_OK
        if h > R - r:
            h = R - r
        if h < hmin:
            return th, STATUS_STEP_UNDERFLOW
        k2 = _theta_rhs(r + _C2 * h, th + h * (_A21 * k1),
                        lam, A, wquad, wshift, tag, params, bx, bc,
                        rscale, vscale)
        k3 = _theta_rhs(r + _C3 * h, th + h * (_A31 * k1 + _A32 * k2),
                        lam, A, wquad, wshift, tag, params, bx, bc,
                        rscale, vscale)
        k4 = _theta_rhs(r + _C4 * h, th + h * (_A41 * k1 + _A42 * k2
                                               + _A43 * k3),
                        lam, A, wquad, wshift, tag, params, bx, bc,
                        rscale, vscale)
        k5 = _theta_rhs(r + _C5 * h, th + h * (_A51 * k1 + _A52 * k2
                                               + _A53 * k3 + _A54 * k4),
                        lam, A, wquad, wshift, tag, params, bx, bc,
                        rscale, vscale)
        k6 = _theta_rhs(r + h, th + h * (_A61 * k1 + _A62 * k2 + _A63 * k3
                                         + _A64 * k4 + _A65 * k5),
                        lam, A, wquad, wshift, tag, params, bx, bc,
                        rscale, vscale)
        th_new = th + h * (_B1 * k1 + _B3 * k3 + _B4 * k4 + _B5 * k5
                           + _B6 * k6)
        k7 = _theta_rhs(r + h, th_new, lam, A, wquad, wshift,
                        tag, params, bx, bc, rscale, vscale)
        err = h * (_E1 * k1 + _E3 * k3 + _E4 * k4 + _E5 * k5 + _E6 * k6
                   + _E7 * k7)
        sc = rtol * (1.0 + abs(th_new))
        ratio = abs(err) / sc
        if ratio <= 1.0:
            r += h
            th = th_new
            k1 = k7  # FSAL
            fac = 5.0 if ratio < 3.2e-4 else 0.9 * ratio ** -0.2
            h *= fac
        else:
            h *= max(0.2, 0.9 * ratio ** -0.2)
    return th, STATUS_STEP_CAP


@njit(cache=True, inline="always")
def _zrhs(r, z, u, lam, nn, L, cP, tag, params, bx, bc, rs, vs):
    # z'' = (V + L/r^2 - lam) z - ((n-1)/r + cP r) z'
    V = vs * potential_value(tag, params, bx, bc, rs * r)
    return (V + L / (r * r) - lam) * z - ((nn - 1.0) / r + cP * r) * u


@njit(cache=True)
def wave_integrate(lam, nn, L, cP, wexp, tag, params, bx, bc,
                   rscale, vscale, nodes, r_start, z0, u0,
                   i_first, i_last, z_out, u_out, rtol):
    """Integrate the z-form radial equation, landing exactly on grid nodes.

    State is (z, z', s) with s' = z^2 r^{n-1} e^{wexp r^2}.  Records z and
    z' at nodes[i_first..i_last] (inclusive, either direction).  Returns
    (s_total, zmax, status) with s_total the accumulated |integral| and
    zmax the largest |z| seen.  Starting values (z0, u0) apply at r_start;
    when r_start already equals nodes[i_first] the first leg is empty.
    """
    step_dir = 1 if i_last >= i_first else -1
    z = z0
    u = u0
    s = 0.0
    zmax = abs(z0)
    r = r_start
    i = i_first
    hmin = 1e-16 * (abs(nodes[i_last] - r_start) + abs(r_start))
    h = 0.0  # set per leg
    while True:
        target = nodes[i]
        leg = target - r
        if leg != 0.0:
            if h == 0.0 or (leg > 0) != (h > 0):
                h = 0.25 * leg
            it = 0
            while (target - r) * step_dir > 1e-15 * abs(target) + 1e-300:
                it += 1
                if it > _MAX_ITER:
                    return s, zmax, STATUS_STEP_CAP
                if abs(h) > abs(target - r):
                    h = target - r
                if abs(h) < hmin:
                    return s, zmax, STATUS_STEP_UNDERFLOW
                kz1 = u
                ku1 = _zrhs(r, z, u, lam, nn, L, cP, tag, params, bx, bc,
                            rscale, vscale)
                ks1 = z * z * r ** (nn - 1.0) * np.exp(wexp * r * r)
                r_ = r + _C2 * h
                zz = z + h * _A21 * kz1
                uu = u + h * _A21 * ku1
                kz2 = uu
                ku2 = _zrhs(r_, zz, uu, lam, nn, L, cP, tag, params, bx, bc,
                            rscale, vscale)
                ks2 = zz * zz * r_ ** (nn - 1.0) * np.exp(wexp * r_ * r_)
                r_ = r + _C3 * h
                zz = z + h * (_A31 * kz1 + _A32 * kz2)
                uu = u + h * (_A31 * ku1 + _A32 * ku2)
                kz3 = uu
                ku3 = _zrhs(r_, zz, uu, lam, nn, L, cP, tag, params, bx, bc,
                            rscale, vscale)
                ks3 = zz * zz * r_ ** (nn - 1.0) * np.exp(wexp * r_ * r_)
                r_ = r + _C4 * h
                zz = z + h * (_A41 * kz1 + _A42 * kz2 + _A43 * kz3)
                uu = u + h * (_A41 * ku1 + _A42 * ku2 + _A43 * ku3)
                kz4 = uu
                ku4 = _zrhs(r_, zz, uu, lam, nn, L, cP, tag, params, bx, bc,
                            rscale, vscale)
                ks4 = zz * zz * r_ ** (nn - 1.0) * np.exp(wexp * r_ * r_)
                r_ = r + _C5 * h
                zz = z + h * (_A51 * kz1 + _A52 * kz2 + _A53 * kz3
                              + _A54 * kz4)
                uu = u + h * (_A51 * ku1 + _A52 * ku2 + _A53 * ku3
                              + _A54 * ku4)
                kz5 = uu
                ku5 = _zrhs(r_, zz, uu, lam, nn, L, cP, tag, params, bx, bc,
                            rscale, vscale)
                ks5 = zz * zz * r_ ** (nn - 1.0) * np.exp(wexp * r_ * r_)
                r_ = r + h
                zz = z + h * (_A61 * kz1 + _A62 * kz2 + _A63 * kz3
                              + _A64 * kz4 + _A65 * kz5)
                uu = u + h * (_A61 * ku1 + _A62 * ku2 + _A63 * ku3
                              + _A64 * ku4 + _A65 * ku5)
                kz6 = uu
                ku6 = _zrhs(r_, zz, uu, lam, nn, L, cP, tag, params, bx, bc,
                            rscale, vscale)
                ks6 = zz * zz * r_ ** (nn - 1.0) * np.exp(wexp * r_ * r_)
                z_new = z + h * (_B1 * kz1 + _B3 * kz3 + _B4 * kz4
                                 + _B5 * kz5 + _B6 * kz6)
                u_new = u + h * (_B1 * ku1 + _B3 * ku3 + _B4 * ku4
                                 + _B5 * ku5 + _B6 * ku6)
                s_new = s + h * (_B1 * ks1 + _B3 * ks3 + _B4 * ks4
                                 + _B5 * ks5 + _B6 * ks6)
                kz7 = u_new
                ku7 = _zrhs(r_, z_new, u_new, lam, nn, L, cP, tag, params,
                            bx, bc, rscale, vscale)
                ez = h * (_E1 * kz1 + _E3 * kz3 + _E4 * kz4 + _E5 * kz5
                          + _E6 * kz6 + _E7 * kz7)
                eu = h * (_E1 * ku1 + _E3 * ku3 + _E4 * ku4 + _E5 * ku5
                          + _E6 * ku6 + _E7 * ku7)
                # error per unit z-motion: z' enters scaled by the step
                sc = rtol * (abs(z) + abs(h) * abs(u)) + 1e-300
                ratio = max(abs(ez), abs(h * eu)) / sc
                if ratio <= 1.0:
                    r += h
                    z, u, s = z_new, u_new, s_new
                    az = abs(z)
                    if az > zmax:
                        zmax = az
                    fac = 5.0 if ratio < 3.2e-4 else 0.9 * ratio ** -0.2
                    h *= fac
                else:
                    h *= max(0.2, 0.9 * ratio ** -0.2)
        z_out[i] = z
        u_out[i] = u
        if i == i_last:
            return abs(s), zmax, STATUS_OK
        i += step_dir
