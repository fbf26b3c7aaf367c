"""Pure-Python Dormand-Prince 5(4) driver; same interface as the compiled core."""
from __future__ import annotations

import math

import numpy as np

SAFETY = 0.9
MIN_FACTOR = 0.2
MAX_FACTOR = 10.0
EPS = 2.220446049250313e-16

C = [0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0]
A = [
    [],
    [1 / 5],
    [3 / 40, 9 / 40],
    [44 / 45, -56 / 15, 32 / 9],
    [19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729],
    [9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656],
]
B = [35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84]
E = [-71 / 57600, 0.0, 71 / 16695, -71 / 1920, 17253 / 339200, -22 / 525, 1 / 40]
P = [
    [1.0, -8048581381 / 2820520608, 8663915743 / 2820520608, -12715105075 / 11282082432],
    [0.0, 0.0, 0.0, 0.0],
    [0.0, 131558114200 / 32700410799, -68118460800 / 10900136933, 87487479700 / 32700410799],
    [0.0, -1754552775 / 470086768, 14199869525 / 1410260304, -10690763975 / 1880347072],
    [0.0, 127303824393 / 49829197408, -318862633887 / 49829197408, 701980252875 / 199316789632],
    [0.0, -282668133 / 205662961, 2019193451 / 616988883, -1453857185 / 822651844],
    [0.0, 40617522 / 29380423, -110615467 / 29380423, 69997945 / 29380423],
]


def tableau():
    a = np.zeros((6, 5))
    for i, row in enumerate(A):
        a[i, :len(row)] = row
    return np.array(C), a, np.array(B), np.array(E), np.array(P)


def _rhs(system, p, y):
    if system == 0:
        return [y[1], p[2] - p[0] * y[1] - p[1] * math.sin(y[0])]
    m = len(y) // 2
    f = [0.0] * (2 * m)
    for j in range(m):
        f[j] = y[m + j]
        f[m + j] = p[3 * m + j] - p[m + j] * y[m + j]
    s = 0.0
    for j in range(1, m):
        link = p[4 * m + j] * math.sin(y[j] - y[0]) + p[2 * m + j] * (y[m + j] - y[m])
        f[m + j] -= link
        s += link
    f[m] += s
    for j in range(m):
        f[m + j] /= p[j]
    return f


def _rms(v, scale):
    return math.sqrt(sum((a / b) ** 2 for a, b in zip(v, scale)) / len(v))


def dopri5(system, params, y0, t_eval, rtol, atol, max_steps=10_000_000):
    p = [float(v) for v in params]
    y = [float(v) for v in y0]
    ts = [float(v) for v in t_eval]
    n, n_out = len(y), len(ts)
    out = np.empty((n_out, n))
    if n_out == 0:
        return out, 0, 0, 0
    out[0] = y
    t, t_end = ts[0], ts[-1]
    idx, status, accepted, rejected = 1, 0, 0, 0

    k1 = _rhs(system, p, y)
    scale = [atol + abs(v) * rtol for v in y]
    d0, d1 = _rms(y, scale), _rms(k1, scale)
    h0 = 1e-6 if d0 < 1e-5 or d1 < 1e-5 else 0.01 * d0 / d1
    f1 = _rhs(system, p, [a + h0 * b for a, b in zip(y, k1)])
    d2 = _rms([a - b for a, b in zip(f1, k1)], scale) / h0
    h1 = max(1e-6, h0 * 1e-3) if d1 <= 1e-15 and d2 <= 1e-15 else (0.01 / max(d1, d2)) ** 0.2
    h = min(100 * h0, h1)

    while idx < n_out:
        if accepted + rejected >= max_steps:
            status = 2
            break
        if h < 10 * abs(t) * EPS or h < 1e-300:
            status = 1
            break
        step_rejected = False
        while True:
            clipped = t + h >= t_end
            if clipped:
                h = t_end - t
            hh = h
            k = [k1]
            for s in range(1, 6):
                ys = [y[i] + hh * sum(A[s][r] * k[r][i] for r in range(s)) for i in range(n)]
                k.append(_rhs(system, p, ys))
            ynew = [y[i] + hh * sum(B[r] * k[r][i] for r in range(6)) for i in range(n)]
            k.append(_rhs(system, p, ynew))
            err = [hh * sum(E[r] * k[r][i] for r in range(7)) for i in range(n)]
            scale = [atol + max(abs(a), abs(b)) * rtol for a, b in zip(y, ynew)]
            en = _rms(err, scale)
            if en < 1.0:
                factor = MAX_FACTOR if en == 0.0 else min(MAX_FACTOR, SAFETY * en ** -0.2)
                if step_rejected:
                    factor = min(1.0, factor)
                h = hh * factor
                break
            h = hh * max(MIN_FACTOR, SAFETY * en ** -0.2)
            step_rejected = True
            rejected += 1
            if h < 10 * abs(t) * EPS or h < 1e-300:
                status = 1
                break
        if status:
            break
        t_new = t_end if clipped else t + hh
        while idx < n_out and ts[idx] <= t_new:
            if ts[idx] == t_new:
                out[idx] = ynew
            else:
                x = (ts[idx] - t) / hh
                powers = (x, x * x, x ** 3, x ** 4)
                for i in range(n):
                    acc = 0.0
                    for r in range(7):
                        acc += k[r][i] * sum(P[r][c] * powers[c] for c in range(4))
                    out[idx, i] = y[i] + hh * acc
            idx += 1
        t = t_new
        y = ynew
        k1 = k[6]
        accepted += 1
    return out, accepted, rejected, status
