"""Compiled Dormand-Prince 5(4) integrator for the two planar fields.

Everything here works on plain floats and preallocated arrays so numba can
compile it without object mode. The Python-facing wrapper lives in
``ecoevo.simulate``.

Parameter array layout (see ``ModelParams.as_array``):
    0 a, 1 b, 2 c, 3 d, 4 q, 5 w, 6 e1, 7 e2, 8 eps
"""

import numpy as np
from numba import njit

STATUS_HORIZON = 0
STATUS_BUFFER_FULL = 1
STATUS_CONVERGED = 2
STATUS_UNDERFLOW = 3
STATUS_CROSSING = 4
STATUS_EXITED = 5

LO = -1e-9
HI = 1.0 + 1e-9
CONV_TOL = 1e-12
CONV_STEPS = 10
SECTION_TIME_TOL = 1e-10
EXIT_RATE_TOL = 1e-13

# Dormand-Prince tableau
C2, C3, C4, C5 = 1 / 5, 3 / 10, 4 / 5, 8 / 9
A21 = 1 / 5
A31, A32 = 3 / 40, 9 / 40
A41, A42, A43 = 44 / 45, -56 / 15, 32 / 9
A51, A52, A53, A54 = 19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729
A61, A62, A63, A64, A65 = 9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656
A71, A73, A74, A75, A76 = 35 / 384, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84
E1, E3, E4, E5, E6, E7 = 71 / 57600, -71 / 16695, 71 / 1920, -17253 / 339200, 22 / 525, -1 / 40

SAFETY = 0.9
FAC_MIN = 0.2
FAC_MAX = 10.0
BETA = 0.04
ALPHA = 0.2 - 0.75 * BETA


@njit(cache=True, nogil=True)
def rhs(kind, p, sgn, x, r):
    a = p[0]
    b = p[1]
    c = p[2]
    d = p[3]
    q = p[4]
    w = p[5]
    e1 = p[6]
    e2 = p[7]
    eps = p[8]
    # bilinear in the corner values b, a, -d, -c: exact on the edges
    g = (1.0 - r) * (b * (1.0 - x) + a * x) - r * (d * (1.0 - x) + c * x)
    fx = x * (1.0 - x) * g
    if kind == 0:
        fr = eps * (1.0 - q * (e1 * r + e2 * (1.0 - r))) * (x - r)
    else:
        fr = eps * (x * (1.0 - r) * (q * e1 + w) - r * (1.0 - x) * (q * e2 + w))
    return sgn * fx, sgn * fr


@njit(cache=True, nogil=True)
def dp_step(kind, p, sgn, x, r, k1x, k1r, h):
    """One Dormand-Prince step. Returns the 5th-order state, the error
    estimate, and f at the new state (first-same-as-last)."""
    k2x, k2r = rhs(kind, p, sgn, x + h * A21 * k1x, r + h * A21 * k1r)
    k3x, k3r = rhs(kind, p, sgn, x + h * (A31 * k1x + A32 * k2x), r + h * (A31 * k1r + A32 * k2r))
    k4x, k4r = rhs(
        kind, p, sgn,
        x + h * (A41 * k1x + A42 * k2x + A43 * k3x),
        r + h * (A41 * k1r + A42 * k2r + A43 * k3r),
    )
    k5x, k5r = rhs(
        kind, p, sgn,
        x + h * (A51 * k1x + A52 * k2x + A53 * k3x + A54 * k4x),
        r + h * (A51 * k1r + A52 * k2r + A53 * k3r + A54 * k4r),
    )
    k6x, k6r = rhs(
        kind, p, sgn,
        x + h * (A61 * k1x + A62 * k2x + A63 * k3x + A64 * k4x + A65 * k5x),
        r + h * (A61 * k1r + A62 * k2r + A63 * k3r + A64 * k4r + A65 * k5r),
    )
    xn = x + h * (A71 * k1x + A73 * k3x + A74 * k4x + A75 * k5x + A76 * k6x)
    rn = r + h * (A71 * k1r + A73 * k3r + A74 * k4r + A75 * k5r + A76 * k6r)
    k7x, k7r = rhs(kind, p, sgn, xn, rn)
    ex = h * (E1 * k1x + E3 * k3x + E4 * k4x + E5 * k5x + E6 * k6x + E7 * k7x)
    er = h * (E1 * k1r + E3 * k3r + E4 * k4r + E5 * k5r + E6 * k6r + E7 * k7r)
    return xn, rn, ex, er, k7x, k7r


@njit(cache=True, nogil=True)
def initial_step(kind, p, sgn, x, r, rtol, atol, hmax):
    fx, fr = rhs(kind, p, sgn, x, r)
    sx = atol + rtol * abs(x)
    sr = atol + rtol * abs(r)
    d0 = np.sqrt(0.5 * ((x / sx) ** 2 + (r / sr) ** 2))
    d1 = np.sqrt(0.5 * ((fx / sx) ** 2 + (fr / sr) ** 2))
    if d0 < 1e-5 or d1 < 1e-5:
        h = 1e-6
    else:
        h = 0.01 * d0 / d1
    return min(h, hmax)


@njit(cache=True, nogil=True)
def run(kind, p, sgn, t, x, r, t_end, rtol, atol, hmax, hmin, ctrl, sec_on, xs, rs, out_t, out_x, out_r):
    """Integrate from elapsed time ``t`` toward ``t_end``.

    ``ctrl`` carries controller state between calls: [h, err_old, conv_count].
    Recording is enabled when the output buffers are non-empty; each accepted
    state is written. Returns (n_written, status, t, x, r).
    """
    cap = out_t.shape[0]
    rec = cap > 0
    n = 0
    h = ctrl[0]
    err_old = ctrl[1]
    conv = ctrl[2]
    if h <= 0.0:
        h = initial_step(kind, p, sgn, x, r, rtol, atol, hmax)
    k1x, k1r = rhs(kind, p, sgn, x, r)
    status = STATUS_HORIZON
    while True:
        if t >= t_end:
            status = STATUS_HORIZON
            break
        if rec and n >= cap:
            status = STATUS_BUFFER_FULL
            break
        if h > hmax:
            h = hmax
        last = False
        if t + h >= t_end:
            h = t_end - t
            last = True
        xn, rn, ex, er, k7x, k7r = dp_step(kind, p, sgn, x, r, k1x, k1r, h)
        if xn < LO or xn > HI or rn < LO or rn > HI:
            h *= 0.5
            if h < hmin:
                status = STATUS_UNDERFLOW
                break
            continue
        sx = atol + rtol * max(abs(x), abs(xn))
        sr = atol + rtol * max(abs(r), abs(rn))
        err = np.sqrt(0.5 * ((ex / sx) ** 2 + (er / sr) ** 2))
        if err <= 1.0:
            if err == 0.0:
                fac = FAC_MAX
            else:
                fac = SAFETY * err ** (-ALPHA) * err_old ** BETA
                fac = min(FAC_MAX, max(FAC_MIN, fac))
            err_old = max(err, 1e-4)
            # a clamped state whose normal velocity still points outward has left the square
            if (xn < 0.0 and k7x < -EXIT_RATE_TOL) or (xn > 1.0 and k7x > EXIT_RATE_TOL) or (
                rn < 0.0 and k7r < -EXIT_RATE_TOL
            ) or (rn > 1.0 and k7r > EXIT_RATE_TOL):
                status = STATUS_EXITED
                break
            xn = min(max(xn, 0.0), 1.0)
            rn = min(max(rn, 0.0), 1.0)
            crossed = False
            if sec_on:
                g0 = x - xs
                g1 = xn - xs
                if g0 * g1 < 0.0:
                    lo = 0.0
                    hi = 1.0
                    while (hi - lo) * h > SECTION_TIME_TOL:
                        mid = 0.5 * (lo + hi)
                        xm, rm, _, _, _, _ = dp_step(kind, p, sgn, x, r, k1x, k1r, mid * h)
                        if (xm - xs) * g0 > 0.0:
                            lo = mid
                        else:
                            hi = mid
                    xc, rc, _, _, kcx, kcr = dp_step(kind, p, sgn, x, r, k1x, k1r, hi * h)
                    if rc > rs:
                        crossed = True
                        t = t + hi * h
                        x = min(max(xc, 0.0), 1.0)
                        r = min(max(rc, 0.0), 1.0)
                        k1x = kcx
                        k1r = kcr
            if not crossed:
                dx = abs(xn - x)
                dr = abs(rn - r)
                t = t_end if last else t + h
                x = xn
                r = rn
                k1x = k7x
                k1r = k7r
                if abs(k7x) <= CONV_TOL and abs(k7r) <= CONV_TOL and dx <= CONV_TOL and dr <= CONV_TOL:
                    conv += 1
                else:
                    conv = 0
            if rec:
                out_t[n] = t
                out_x[n] = x
                out_r[n] = r
                n += 1
            h = h * fac
            if crossed:
                status = STATUS_CROSSING
                break
            if conv >= CONV_STEPS:
                status = STATUS_CONVERGED
                break
        else:
            fac = max(FAC_MIN, SAFETY * err ** (-ALPHA))
            h = h * fac
            if h < hmin:
                status = STATUS_UNDERFLOW
                break
    ctrl[0] = h
    ctrl[1] = err_old
    ctrl[2] = conv
    return n, status, t, x, r


STATUS_CAUCHY = 6


@njit(cache=True, nogil=True)
def poincare(kind, p, sgn, x, r, xs, rs, t_max, rtol, atol, hmax, hmin, tol, ctrl, rets_r, rets_t):
    """Iterate section returns until three consecutive returns agree to ``tol``.

    Returns (n_returns, status, t, x, r); ``rets_r``/``rets_t`` receive the
    r-coordinate and elapsed time of each crossing.
    """
    empty = np.empty(0)
    cap = rets_r.shape[0]
    n = 0
    t = 0.0
    status = STATUS_HORIZON
    while True:
        if n >= cap:
            status = STATUS_BUFFER_FULL
            break
        _, st, t, x, r = run(kind, p, sgn, t, x, r, t_max, rtol, atol, hmax, hmin, ctrl, True, xs, rs, empty, empty, empty)
        if st != STATUS_CROSSING:
            status = st
            break
        rets_r[n] = r
        rets_t[n] = t
        n += 1
        if n >= 4 and abs(rets_r[n - 1] - rets_r[n - 2]) <= tol and abs(rets_r[n - 2] - rets_r[n - 3]) <= tol:
            status = STATUS_CAUCHY
            break
    return n, status, t, x, r
