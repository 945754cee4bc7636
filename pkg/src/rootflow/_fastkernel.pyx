# cython: boundscheck=False, wraparound=False, initializedcheck=False, cdivision=True
"""Compiled integrator core: Dormand-Prince 5(4) with PI step control.

Twin of ``rootflow._purekernel``: the stepping arithmetic is written in the
same order so both backends produce the same trajectories.  This kernel only
handles polynomial right-hand sides given as flattened term arrays.
"""

from libc.math cimport fabs, sqrt, pow, isnan, isinf
from libc.stdlib cimport malloc, free

cdef double C2 = 1.0 / 5.0
cdef double C3 = 3.0 / 10.0
cdef double C4 = 4.0 / 5.0
cdef double C5 = 8.0 / 9.0
cdef double A21 = 1.0 / 5.0
cdef double A31 = 3.0 / 40.0
cdef double A32 = 9.0 / 40.0
cdef double A41 = 44.0 / 45.0
cdef double A42 = -56.0 / 15.0
cdef double A43 = 32.0 / 9.0
cdef double A51 = 19372.0 / 6561.0
cdef double A52 = -25360.0 / 2187.0
cdef double A53 = 64448.0 / 6561.0
cdef double A54 = -212.0 / 729.0
cdef double A61 = 9017.0 / 3168.0
cdef double A62 = -355.0 / 33.0
cdef double A63 = 46732.0 / 5247.0
cdef double A64 = 49.0 / 176.0
cdef double A65 = -5103.0 / 18656.0
cdef double B1 = 35.0 / 384.0
cdef double B3 = 500.0 / 1113.0
cdef double B4 = 125.0 / 192.0
cdef double B5 = -2187.0 / 6784.0
cdef double B6 = 11.0 / 84.0
cdef double E1 = 71.0 / 57600.0
cdef double E3 = -71.0 / 16695.0
cdef double E4 = 71.0 / 1920.0
cdef double E5 = -17253.0 / 339200.0
cdef double E6 = 22.0 / 525.0
cdef double E7 = -1.0 / 40.0
cdef double D1 = -12715105075.0 / 11282082432.0
cdef double D3 = 87487479700.0 / 32700410799.0
cdef double D4 = -10690763975.0 / 1880347072.0
cdef double D5 = 701980252875.0 / 199316789632.0
cdef double D6 = -1453857185.0 / 822651844.0
cdef double D7 = 69997945.0 / 29380423.0

cdef double SAFETY = 0.9
cdef double MIN_FACTOR = 0.2
cdef double MAX_FACTOR = 5.0
cdef double ALPHA = 0.14
cdef double BETA = 0.08
cdef double ERR_FLOOR = 1e-4
cdef double EPS = 2.220446049250313e-16
cdef double INF = 1e308 * 10.0

STATUS_OK = 0
STATUS_STEP_UNDERFLOW = 1
STATUS_NONFINITE = 2
STATUS_MAX_STEPS = 3


cdef inline void _eval_poly(int nv, long long* offs, double complex* coeffs,
                            int* exps, double complex* y, double complex* out) noexcept:
    cdef int i, v, e, r
    cdef long long j, base
    cdef double complex acc, m, yv
    for i in range(nv):
        acc = 0
        for j in range(offs[i], offs[i + 1]):
            m = coeffs[j]
            base = j * nv
            for v in range(nv):
                e = exps[base + v]
                yv = y[v]
                for r in range(e):
                    m = m * yv
            acc = acc + m
        out[i] = acc


cdef inline double _dmax(double a, double b) noexcept:
    return a if a > b else b


cdef inline double _err_norm(int n, double complex* errv, double complex* y,
                             double complex* ynew, double rtol, double atol) noexcept:
    cdef double acc = 0.0
    cdef double sc, q
    cdef int c
    for c in range(n):
        sc = atol + rtol * _dmax(fabs(y[c].real), fabs(ynew[c].real))
        q = errv[c].real / sc
        acc += q * q
        sc = atol + rtol * _dmax(fabs(y[c].imag), fabs(ynew[c].imag))
        q = errv[c].imag / sc
        acc += q * q
    return sqrt(acc / (2.0 * n))


cdef inline double _rms(int n, double complex* vals, double* scales) noexcept:
    cdef double acc = 0.0
    cdef double q
    cdef int c
    for c in range(n):
        q = vals[c].real / scales[2 * c]
        acc += q * q
        q = vals[c].imag / scales[2 * c + 1]
        acc += q * q
    return sqrt(acc / (2.0 * n))


def integrate_poly(int nv,
                   long long[::1] offs,
                   double complex[::1] coeffs,
                   int[::1] exps,
                   double complex[::1] y0,
                   double t0, double t1,
                   double rtol, double atol,
                   double[::1] sample_ts,
                   double complex[:, ::1] out,
                   long max_steps):
    """Fill ``out`` with dense-output samples; see the pure twin for contract.

    Returns ``(n_filled, status, t_reached, n_accepted, n_rejected)``.
    """
    cdef int n = nv
    cdef Py_ssize_t m = sample_ts.shape[0]
    cdef Py_ssize_t isamp = 0
    cdef int c
    cdef long n_accept = 0, n_reject = 0
    cdef double t, h, hmin, err, errold, fac, th, th1, t_old
    cdef double d0, d1, d2, dm, h0, h1
    cdef bint last_err_nan = False
    cdef int status = 1

    cdef double complex* y = <double complex*> malloc(n * sizeof(double complex))
    cdef double complex* k1 = <double complex*> malloc(n * sizeof(double complex))
    cdef double complex* k2 = <double complex*> malloc(n * sizeof(double complex))
    cdef double complex* k3 = <double complex*> malloc(n * sizeof(double complex))
    cdef double complex* k4 = <double complex*> malloc(n * sizeof(double complex))
    cdef double complex* k5 = <double complex*> malloc(n * sizeof(double complex))
    cdef double complex* k6 = <double complex*> malloc(n * sizeof(double complex))
    cdef double complex* k7 = <double complex*> malloc(n * sizeof(double complex))
    cdef double complex* yt = <double complex*> malloc(n * sizeof(double complex))
    cdef double complex* ynew = <double complex*> malloc(n * sizeof(double complex))
    cdef double complex* errv = <double complex*> malloc(n * sizeof(double complex))
    cdef double complex* rc2 = <double complex*> malloc(n * sizeof(double complex))
    cdef double complex* rc3 = <double complex*> malloc(n * sizeof(double complex))
    cdef double complex* rc4 = <double complex*> malloc(n * sizeof(double complex))
    cdef double complex* rc5 = <double complex*> malloc(n * sizeof(double complex))
    cdef double* scales = <double*> malloc(2 * n * sizeof(double))
    cdef long long* offs_p = &offs[0]
    cdef double complex* coeffs_p = &coeffs[0]
    cdef int* exps_p = &exps[0]

    try:
        for c in range(n):
            y[c] = y0[c]
        while isamp < m and sample_ts[isamp] <= t0:
            for c in range(n):
                out[isamp, c] = y[c]
            isamp += 1

        t = t0
        _eval_poly(nv, offs_p, coeffs_p, exps_p, y, k1)
        for c in range(n):
            if isnan(k1[c].real) or isinf(k1[c].real) or isnan(k1[c].imag) or isinf(k1[c].imag):
                return isamp, STATUS_NONFINITE, t, 0, 0

        # initial step size (same scheme as the pure twin)
        for c in range(n):
            scales[2 * c] = atol + rtol * fabs(y[c].real)
            scales[2 * c + 1] = atol + rtol * fabs(y[c].imag)
        d0 = _rms(n, y, scales)
        d1 = _rms(n, k1, scales)
        if d0 < 1e-5 or d1 < 1e-5:
            h0 = 1e-6 * (t1 - t0)
        else:
            h0 = 0.01 * (d0 / d1)
        if h0 > t1 - t0:
            h0 = t1 - t0
        for c in range(n):
            yt[c] = y[c] + h0 * k1[c]
        _eval_poly(nv, offs_p, coeffs_p, exps_p, yt, k2)
        for c in range(n):
            errv[c] = k2[c] - k1[c]
        d2 = _rms(n, errv, scales) / h0
        dm = _dmax(d1, d2)
        if dm <= 1e-15:
            h1 = _dmax(1e-6, h0 * 1e-3)
        else:
            h1 = pow(0.01 / dm, 0.2)
        h = 100.0 * h0
        if h1 < h:
            h = h1
        if t1 - t0 < h:
            h = t1 - t0

        errold = ERR_FLOOR

        while t < t1:
            if n_accept + n_reject >= max_steps:
                status = STATUS_MAX_STEPS
                return isamp, status, t, n_accept, n_reject
            hmin = 16.0 * EPS * _dmax(fabs(t), fabs(t1 - t0))
            if h < hmin or t + h == t:
                status = STATUS_NONFINITE if last_err_nan else STATUS_STEP_UNDERFLOW
                return isamp, status, t, n_accept, n_reject
            if t + h >= t1:
                h = t1 - t

            for c in range(n):
                yt[c] = y[c] + h * (A21 * k1[c])
            _eval_poly(nv, offs_p, coeffs_p, exps_p, yt, k2)
            for c in range(n):
                yt[c] = y[c] + h * (A31 * k1[c] + A32 * k2[c])
            _eval_poly(nv, offs_p, coeffs_p, exps_p, yt, k3)
            for c in range(n):
                yt[c] = y[c] + h * (A41 * k1[c] + A42 * k2[c] + A43 * k3[c])
            _eval_poly(nv, offs_p, coeffs_p, exps_p, yt, k4)
            for c in range(n):
                yt[c] = y[c] + h * (A51 * k1[c] + A52 * k2[c] + A53 * k3[c] + A54 * k4[c])
            _eval_poly(nv, offs_p, coeffs_p, exps_p, yt, k5)
            for c in range(n):
                yt[c] = y[c] + h * (A61 * k1[c] + A62 * k2[c] + A63 * k3[c] + A64 * k4[c] + A65 * k5[c])
            _eval_poly(nv, offs_p, coeffs_p, exps_p, yt, k6)
            for c in range(n):
                ynew[c] = y[c] + h * (B1 * k1[c] + B3 * k3[c] + B4 * k4[c] + B5 * k5[c] + B6 * k6[c])
            _eval_poly(nv, offs_p, coeffs_p, exps_p, ynew, k7)
            for c in range(n):
                errv[c] = h * (E1 * k1[c] + E3 * k3[c] + E4 * k4[c] + E5 * k5[c] + E6 * k6[c] + E7 * k7[c])
            err = _err_norm(n, errv, y, ynew, rtol, atol)

            if isnan(err) or isinf(err):
                last_err_nan = True
                fac = MIN_FACTOR
            elif err == 0.0:
                last_err_nan = False
                fac = MAX_FACTOR
            else:
                last_err_nan = False
                fac = SAFETY * pow(err, -ALPHA) * pow(errold, BETA)
                if fac < MIN_FACTOR:
                    fac = MIN_FACTOR
                elif fac > MAX_FACTOR:
                    fac = MAX_FACTOR

            if err <= 1.0:
                t_old = t
                t = t_old + h
                if isamp < m and sample_ts[isamp] <= t:
                    for c in range(n):
                        rc2[c] = ynew[c] - y[c]
                        rc3[c] = h * k1[c] - rc2[c]
                        rc4[c] = rc2[c] - h * k7[c] - rc3[c]
                        rc5[c] = h * (D1 * k1[c] + D3 * k3[c] + D4 * k4[c] + D5 * k5[c]
                                      + D6 * k6[c] + D7 * k7[c])
                    while isamp < m and sample_ts[isamp] <= t:
                        th = (sample_ts[isamp] - t_old) / h
                        th1 = 1.0 - th
                        for c in range(n):
                            out[isamp, c] = y[c] + th * (rc2[c] + th1 * (rc3[c] + th * (rc4[c] + th1 * rc5[c])))
                        isamp += 1
                for c in range(n):
                    y[c] = ynew[c]
                    k1[c] = k7[c]
                errold = err if err > ERR_FLOOR else ERR_FLOOR
                n_accept += 1
                h = h * fac
            else:
                n_reject += 1
                h = h * (fac if fac < 1.0 else 1.0)

        status = STATUS_OK
        return isamp, status, t, n_accept, n_reject
    finally:
        free(y); free(k1); free(k2); free(k3); free(k4); free(k5); free(k6); free(k7)
        free(yt); free(ynew); free(errv); free(rc2); free(rc3); free(rc4); free(rc5)
        free(scales)
