# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled Dormand-Prince 5(4) driver with dense output.

Systems:
    0  pendulum, params (beta, zeta, tau), state (delta, delta_dot)
    1  star network in the reference-rotating frame, params
       (J[N], K_self[N], K_link[N], tau[N], c[N]), state (phi[N], nu[N]);
       machine 0 is the hub, links join it to machines 1..N-1.
"""
import numpy as np
cimport numpy as cnp
from libc.math cimport sin, sqrt, fabs, pow, fmax, fmin
from libc.stdlib cimport malloc, free

cnp.import_array()

cdef double SAFETY = 0.9
cdef double MIN_FACTOR = 0.2
cdef double MAX_FACTOR = 10.0

cdef double C2 = 1.0 / 5, C3 = 3.0 / 10, C4 = 4.0 / 5, C5 = 8.0 / 9
cdef double A21 = 1.0 / 5
cdef double A31 = 3.0 / 40, A32 = 9.0 / 40
cdef double A41 = 44.0 / 45, A42 = -56.0 / 15, A43 = 32.0 / 9
cdef double A51 = 19372.0 / 6561, A52 = -25360.0 / 2187, A53 = 64448.0 / 6561, A54 = -212.0 / 729
cdef double A61 = 9017.0 / 3168, A62 = -355.0 / 33, A63 = 46732.0 / 5247, A64 = 49.0 / 176, A65 = -5103.0 / 18656
cdef double B1 = 35.0 / 384, B3 = 500.0 / 1113, B4 = 125.0 / 192, B5 = -2187.0 / 6784, B6 = 11.0 / 84
cdef double E1 = -71.0 / 57600, E3 = 71.0 / 16695, E4 = -71.0 / 1920, E5 = 17253.0 / 339200, E6 = -22.0 / 525, E7 = 1.0 / 40

cdef double[7][4] P = [
    [1.0, -8048581381.0 / 2820520608, 8663915743.0 / 2820520608, -12715105075.0 / 11282082432],
    [0.0, 0.0, 0.0, 0.0],
    [0.0, 131558114200.0 / 32700410799, -68118460800.0 / 10900136933, 87487479700.0 / 32700410799],
    [0.0, -1754552775.0 / 470086768, 14199869525.0 / 1410260304, -10690763975.0 / 1880347072],
    [0.0, 127303824393.0 / 49829197408, -318862633887.0 / 49829197408, 701980252875.0 / 199316789632],
    [0.0, -282668133.0 / 205662961, 2019193451.0 / 616988883, -1453857185.0 / 822651844],
    [0.0, 40617522.0 / 29380423, -110615467.0 / 29380423, 69997945.0 / 29380423],
]


def tableau():
    """Coefficients as numpy arrays (c, a, b, e, p) for cross-checking."""
    c = np.array([0.0, C2, C3, C4, C5, 1.0])
    a = np.zeros((6, 5))
    a[1, :1] = [A21]
    a[2, :2] = [A31, A32]
    a[3, :3] = [A41, A42, A43]
    a[4, :4] = [A51, A52, A53, A54]
    a[5, :5] = [A61, A62, A63, A64, A65]
    b = np.array([B1, 0.0, B3, B4, B5, B6])
    e = np.array([E1, 0.0, E3, E4, E5, E6, E7])
    p = np.array([[P[i][j] for j in range(4)] for i in range(7)])
    return c, a, b, e, p


cdef void rhs(int system, int n, const double* p, const double* y, double* f) noexcept nogil:
    cdef int j, m
    cdef double s, dn, dphi
    if system == 0:
        f[0] = y[1]
        f[1] = p[2] - p[0] * y[1] - p[1] * sin(y[0])
        return
    m = n // 2
    # p layout: J, K_self, K_link, tau, c (each length m)
    for j in range(m):
        f[j] = y[m + j]
        f[m + j] = p[3 * m + j] - p[m + j] * y[m + j]
    s = 0.0
    for j in range(1, m):
        dphi = y[j] - y[0]
        dn = y[m + j] - y[m]
        f[m + j] -= p[4 * m + j] * sin(dphi) + p[2 * m + j] * dn
        s += p[4 * m + j] * sin(dphi) + p[2 * m + j] * dn
    f[m] += s
    for j in range(m):
        f[m + j] /= p[j]


cdef double rms_norm(int n, const double* v, const double* scale) noexcept nogil:
    cdef int i
    cdef double acc = 0.0, r
    for i in range(n):
        r = v[i] / scale[i]
        acc += r * r
    return sqrt(acc / n)


def dopri5(int system, double[::1] params, double[::1] y0, double[::1] t_eval,
           double rtol, double atol, long max_steps=10000000):
    """Integrate from t_eval[0] and return (Y, n_accepted, n_rejected, status).

    status: 0 ok, 1 step size underflow, 2 step budget exhausted.
    Y has one row per output time, filled by dense output.
    """
    cdef int n = y0.shape[0]
    cdef int n_out = t_eval.shape[0]
    out = np.empty((n_out, n))
    cdef double[:, ::1] Y = out
    if n_out == 0:
        return out, 0, 0, 0
    cdef double* work = <double*> malloc(12 * n * sizeof(double))
    if work == NULL:
        raise MemoryError()
    cdef double* y = work
    cdef double* ynew = work + n
    cdef double* tmp = work + 2 * n
    cdef double* scale = work + 3 * n
    cdef double* err = work + 4 * n
    cdef double* k1 = work + 5 * n
    cdef double* k2 = work + 6 * n
    cdef double* k3 = work + 7 * n
    cdef double* k4 = work + 8 * n
    cdef double* k5 = work + 9 * n
    cdef double* k6 = work + 10 * n
    cdef double* k7 = work + 11 * n
    cdef const double* pp = &params[0]
    cdef int i, idx = 0, status = 0
    cdef long accepted = 0, rejected = 0
    cdef double t = t_eval[0], t_end = t_eval[n_out - 1], t_new, h, hh, d0, d1, d2, h0, h1
    cdef double en, factor, x, x2, x3, x4, b1, b2, b3, b4, b5, b6, b7
    cdef bint step_rejected, clipped

    for i in range(n):
        y[i] = y0[i]
        Y[0, i] = y0[i]
    idx = 1
    try:
        with nogil:
            rhs(system, n, pp, y, k1)
            # initial step selection
            for i in range(n):
                scale[i] = atol + fabs(y[i]) * rtol
            d0 = rms_norm(n, y, scale)
            d1 = rms_norm(n, k1, scale)
            if d0 < 1e-5 or d1 < 1e-5:
                h0 = 1e-6
            else:
                h0 = 0.01 * d0 / d1
            for i in range(n):
                tmp[i] = y[i] + h0 * k1[i]
            rhs(system, n, pp, tmp, k2)
            for i in range(n):
                err[i] = k2[i] - k1[i]
            d2 = rms_norm(n, err, scale) / h0
            if d1 <= 1e-15 and d2 <= 1e-15:
                h1 = fmax(1e-6, h0 * 1e-3)
            else:
                h1 = pow(0.01 / fmax(d1, d2), 0.2)
            h = fmin(100.0 * h0, h1)

            while idx < n_out:
                if accepted + rejected >= max_steps:
                    status = 2
                    break
                if h < 10.0 * fabs(t) * 2.220446049250313e-16 or h < 1e-300:
                    status = 1
                    break
                step_rejected = False
                while True:
                    clipped = t + h >= t_end
                    if clipped:
                        h = t_end - t
                    hh = h
                    for i in range(n):
                        tmp[i] = y[i] + hh * A21 * k1[i]
                    rhs(system, n, pp, tmp, k2)
                    for i in range(n):
                        tmp[i] = y[i] + hh * (A31 * k1[i] + A32 * k2[i])
                    rhs(system, n, pp, tmp, k3)
                    for i in range(n):
                        tmp[i] = y[i] + hh * (A41 * k1[i] + A42 * k2[i] + A43 * k3[i])
                    rhs(system, n, pp, tmp, k4)
                    for i in range(n):
                        tmp[i] = y[i] + hh * (A51 * k1[i] + A52 * k2[i] + A53 * k3[i] + A54 * k4[i])
                    rhs(system, n, pp, tmp, k5)
                    for i in range(n):
                        tmp[i] = y[i] + hh * (A61 * k1[i] + A62 * k2[i] + A63 * k3[i] + A64 * k4[i]
                                              + A65 * k5[i])
                    rhs(system, n, pp, tmp, k6)
                    for i in range(n):
                        ynew[i] = y[i] + hh * (B1 * k1[i] + B3 * k3[i] + B4 * k4[i] + B5 * k5[i]
                                               + B6 * k6[i])
                    rhs(system, n, pp, ynew, k7)
                    for i in range(n):
                        err[i] = hh * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i]
                                       + E6 * k6[i] + E7 * k7[i])
                        scale[i] = atol + fmax(fabs(y[i]), fabs(ynew[i])) * rtol
                    en = rms_norm(n, err, scale)
                    if en < 1.0:
                        if en == 0.0:
                            factor = MAX_FACTOR
                        else:
                            factor = fmin(MAX_FACTOR, SAFETY * pow(en, -0.2))
                        if step_rejected:
                            factor = fmin(1.0, factor)
                        h = hh * factor
                        break
                    factor = fmax(MIN_FACTOR, SAFETY * pow(en, -0.2))
                    h = hh * factor
                    step_rejected = True
                    rejected += 1
                    if h < 10.0 * fabs(t) * 2.220446049250313e-16 or h < 1e-300:
                        status = 1
                        break
                if status:
                    break
                t_new = t_end if clipped else t + hh
                # dense output on (t, t_new]
                while idx < n_out and t_eval[idx] <= t_new:
                    x = (t_eval[idx] - t) / hh
                    x2 = x * x
                    x3 = x2 * x
                    x4 = x3 * x
                    for i in range(n):
                        b1 = k1[i] * (P[0][0] * x + P[0][1] * x2 + P[0][2] * x3 + P[0][3] * x4)
                        b3 = k3[i] * (P[2][1] * x2 + P[2][2] * x3 + P[2][3] * x4)
                        b4 = k4[i] * (P[3][1] * x2 + P[3][2] * x3 + P[3][3] * x4)
                        b5 = k5[i] * (P[4][1] * x2 + P[4][2] * x3 + P[4][3] * x4)
                        b6 = k6[i] * (P[5][1] * x2 + P[5][2] * x3 + P[5][3] * x4)
                        b7 = k7[i] * (P[6][1] * x2 + P[6][2] * x3 + P[6][3] * x4)
                        Y[idx, i] = y[i] + hh * (b1 + b3 + b4 + b5 + b6 + b7)
                    if t_eval[idx] == t_new:
                        for i in range(n):
                            Y[idx, i] = ynew[i]
                    idx += 1
                t = t_new
                for i in range(n):
                    y[i] = ynew[i]
                    k1[i] = k7[i]
                accepted += 1
    finally:
        free(work)
    return out, accepted, rejected, status
