"""Pure-Python integrator core: Dormand-Prince 5(4) with PI step control.

This is the import-time fallback twin of the compiled kernel in
``rootflow._fastkernel``.  Both implement the identical arithmetic in the
identical order, so their trajectories agree to the last bit on conforming
IEEE-754 hardware; the compiled kernel only accelerates polynomial
right-hand sides, while this module also accepts arbitrary callables.

Complex states are integrated componentwise; the error norm is the RMS over
all 2n real components, scaled by ``atol + rtol*|component|``.
"""

from __future__ import annotations

import math

# Dormand-Prince 5(4) tableau
C2 = 1.0 / 5.0
C3 = 3.0 / 10.0
C4 = 4.0 / 5.0
C5 = 8.0 / 9.0
A21 = 1.0 / 5.0
A31 = 3.0 / 40.0
A32 = 9.0 / 40.0
A41 = 44.0 / 45.0
A42 = -56.0 / 15.0
A43 = 32.0 / 9.0
A51 = 19372.0 / 6561.0
A52 = -25360.0 / 2187.0
A53 = 64448.0 / 6561.0
A54 = -212.0 / 729.0
A61 = 9017.0 / 3168.0
A62 = -355.0 / 33.0
A63 = 46732.0 / 5247.0
A64 = 49.0 / 176.0
A65 = -5103.0 / 18656.0
B1 = 35.0 / 384.0
B3 = 500.0 / 1113.0
B4 = 125.0 / 192.0
B5 = -2187.0 / 6784.0
B6 = 11.0 / 84.0
# weights of the embedded 4th-order error estimate (b5 - b4)
E1 = 71.0 / 57600.0
E3 = -71.0 / 16695.0
E4 = 71.0 / 1920.0
E5 = -17253.0 / 339200.0
E6 = 22.0 / 525.0
E7 = -1.0 / 40.0
# dense-output weights of the 4th-order continuous extension
D1 = -12715105075.0 / 11282082432.0
D3 = 87487479700.0 / 32700410799.0
D4 = -10690763975.0 / 1880347072.0
D5 = 701980252875.0 / 199316789632.0
D6 = -1453857185.0 / 822651844.0
D7 = 69997945.0 / 29380423.0

SAFETY = 0.9
MIN_FACTOR = 0.2
MAX_FACTOR = 5.0
ALPHA = 0.14  # 0.7 / order
BETA = 0.08   # 0.4 / order
ERR_FLOOR = 1e-4
EPS = 2.220446049250313e-16

STATUS_OK = 0
STATUS_STEP_UNDERFLOW = 1
STATUS_NONFINITE = 2
STATUS_MAX_STEPS = 3


def eval_poly_rhs(nv, offs, coeffs, exps, y, out):
    """Evaluate a polynomial vector field given in flattened term arrays."""
    for i in range(nv):
        acc = 0.0 + 0.0j
        for j in range(offs[i], offs[i + 1]):
            m = coeffs[j]
            base = j * nv
            for v in range(nv):
                e = exps[base + v]
                yv = y[v]
                for _ in range(e):
                    m = m * yv
            acc = acc + m
        out[i] = acc


def _err_norm(n, errv, y, ynew, rtol, atol):
    acc = 0.0
    for c in range(n):
        sc = atol + rtol * max(abs(y[c].real), abs(ynew[c].real))
        q = errv[c].real / sc
        acc += q * q
        sc = atol + rtol * max(abs(y[c].imag), abs(ynew[c].imag))
        q = errv[c].imag / sc
        acc += q * q
    return math.sqrt(acc / (2.0 * n))


def _rms(n, vals, scales):
    acc = 0.0
    for c in range(n):
        q = vals[c].real / scales[2 * c]
        acc += q * q
        q = vals[c].imag / scales[2 * c + 1]
        acc += q * q
    return math.sqrt(acc / (2.0 * n))


def _initial_step(rhs, n, y0, f0, t0, t1, rtol, atol):
    scales = [0.0] * (2 * n)
    for c in range(n):
        scales[2 * c] = atol + rtol * abs(y0[c].real)
        scales[2 * c + 1] = atol + rtol * abs(y0[c].imag)
    d0 = _rms(n, y0, scales)
    d1 = _rms(n, f0, scales)
    if d0 < 1e-5 or d1 < 1e-5:
        h0 = 1e-6 * (t1 - t0)
    else:
        h0 = 0.01 * (d0 / d1)
    h0 = min(h0, t1 - t0)
    y1 = [y0[c] + h0 * f0[c] for c in range(n)]
    f1 = [0.0 + 0.0j] * n
    rhs(t0 + h0, y1, f1)
    diff = [f1[c] - f0[c] for c in range(n)]
    d2 = _rms(n, diff, scales) / h0
    dm = max(d1, d2)
    if dm <= 1e-15:
        h1 = max(1e-6, h0 * 1e-3)
    else:
        h1 = (0.01 / dm) ** 0.2
    return min(100.0 * h0, h1, t1 - t0)


def integrate_core(rhs, y0, t0, t1, rtol, atol, sample_ts, max_steps):
    """March from t0 to t1 emitting dense-output samples.

    ``rhs(t, y, out)`` fills ``out`` with the derivative.  Returns
    ``(samples, n_filled, status, t_reached, n_accepted, n_rejected)`` where
    ``samples`` holds one state tuple per emitted sample time.
    """
    n = len(y0)
    m = len(sample_ts)
    y = [complex(v) for v in y0]
    samples: list[tuple[complex, ...]] = []
    isamp = 0
    while isamp < m and sample_ts[isamp] <= t0:
        samples.append(tuple(y))
        isamp += 1

    k1 = [0j] * n
    k2 = [0j] * n
    k3 = [0j] * n
    k4 = [0j] * n
    k5 = [0j] * n
    k6 = [0j] * n
    k7 = [0j] * n
    yt = [0j] * n
    ynew = [0j] * n
    errv = [0j] * n

    t = t0
    rhs(t, y, k1)
    for c in range(n):
        if not (math.isfinite(k1[c].real) and math.isfinite(k1[c].imag)):
            return samples, isamp, STATUS_NONFINITE, t, 0, 0
    h = _initial_step(rhs, n, y, k1, t0, t1, rtol, atol)
    errold = ERR_FLOOR
    n_accept = 0
    n_reject = 0
    last_err_nan = False

    while t < t1:
        if n_accept + n_reject >= max_steps:
            return samples, isamp, STATUS_MAX_STEPS, t, n_accept, n_reject
        hmin = 16.0 * EPS * max(abs(t), abs(t1 - t0))
        if h < hmin or t + h == t:
            status = STATUS_NONFINITE if last_err_nan else STATUS_STEP_UNDERFLOW
            return samples, isamp, status, t, n_accept, n_reject
        if t + h >= t1:
            h = t1 - t

        for c in range(n):
            yt[c] = y[c] + h * (A21 * k1[c])
        rhs(t + C2 * h, yt, k2)
        for c in range(n):
            yt[c] = y[c] + h * (A31 * k1[c] + A32 * k2[c])
        rhs(t + C3 * h, yt, k3)
        for c in range(n):
            yt[c] = y[c] + h * (A41 * k1[c] + A42 * k2[c] + A43 * k3[c])
        rhs(t + C4 * h, yt, k4)
        for c in range(n):
            yt[c] = y[c] + h * (A51 * k1[c] + A52 * k2[c] + A53 * k3[c] + A54 * k4[c])
        rhs(t + C5 * h, yt, k5)
        for c in range(n):
            yt[c] = y[c] + h * (A61 * k1[c] + A62 * k2[c] + A63 * k3[c] + A64 * k4[c] + A65 * k5[c])
        rhs(t + h, yt, k6)
        for c in range(n):
            ynew[c] = y[c] + h * (B1 * k1[c] + B3 * k3[c] + B4 * k4[c] + B5 * k5[c] + B6 * k6[c])
        rhs(t + h, ynew, k7)
        for c in range(n):
            errv[c] = h * (E1 * k1[c] + E3 * k3[c] + E4 * k4[c] + E5 * k5[c] + E6 * k6[c] + E7 * k7[c])
        err = _err_norm(n, errv, y, ynew, rtol, atol)

        if err != err or err == math.inf:
            last_err_nan = True
            fac = MIN_FACTOR
        elif err == 0.0:
            last_err_nan = False
            fac = MAX_FACTOR
        else:
            last_err_nan = False
            fac = SAFETY * err ** (-ALPHA) * errold ** BETA
            if fac < MIN_FACTOR:
                fac = MIN_FACTOR
            elif fac > MAX_FACTOR:
                fac = MAX_FACTOR

        if err <= 1.0:
            t_old = t
            t = t_old + h
            # dense output for any sample time inside this step
            if isamp < m and sample_ts[isamp] <= t:
                rc2 = [ynew[c] - y[c] for c in range(n)]
                rc3 = [h * k1[c] - rc2[c] for c in range(n)]
                rc4 = [rc2[c] - h * k7[c] - rc3[c] for c in range(n)]
                rc5 = [h * (D1 * k1[c] + D3 * k3[c] + D4 * k4[c] + D5 * k5[c]
                            + D6 * k6[c] + D7 * k7[c]) for c in range(n)]
                while isamp < m and sample_ts[isamp] <= t:
                    th = (sample_ts[isamp] - t_old) / h
                    th1 = 1.0 - th
                    samples.append(tuple(
                        y[c] + th * (rc2[c] + th1 * (rc3[c] + th * (rc4[c] + th1 * rc5[c])))
                        for c in range(n)))
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

    return samples, isamp, STATUS_OK, t, n_accept, n_reject


def _make_poly_rhs(nv, offs, coeffs, exps):
    def rhs(t, y, out):
        eval_poly_rhs(nv, offs, coeffs, exps, y, out)
    return rhs


def integrate_poly(nv, offs, coeffs, exps, y0, t0, t1, rtol, atol, sample_ts, max_steps):
    """Polynomial-RHS entry point matching the compiled kernel's signature."""
    offs = list(offs)
    coeffs = [complex(c) for c in coeffs]
    exps = [int(e) for e in exps]
    return integrate_core(_make_poly_rhs(nv, offs, coeffs, exps),
                          list(y0), t0, t1, rtol, atol, list(sample_ts), max_steps)
