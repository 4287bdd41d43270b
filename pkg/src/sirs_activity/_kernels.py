"""Compiled inner loops for the forward simulation and the backward value sweep.

State columns are ordered (s_p, i_p, r, s_q, i_q); value columns follow the
same order. All inputs are already policy-adjusted: ``bp``/``bq`` include the
mask multiplier and ``m`` is the mean activity of infected agents.
"""

import numba as nb
import numpy as np

RENORM_THRESHOLD = 1e-12


@nb.njit(cache=True)
def forward(x0, ap, aq, bp, bq, gp, gq, alpha, sigma, m):
    T = ap.shape[0]
    X = np.empty((T + 1, 5))
    X[0] = x0
    renormalized = 0
    bad = -1
    for t in range(T):
        sp = X[t, 0]
        ip = X[t, 1]
        r = X[t, 2]
        sq = X[t, 3]
        iq = X[t, 4]
        it = m * (ip + sigma * iq)
        new_p = bp * ap[t] * sp * it
        new_q = bq * aq[t] * sq * it
        rec_p = gp * ip
        rec_q = gq * iq
        lost = alpha * r
        if bad < 0 and (new_p > sp or new_q > sq or rec_p > ip or rec_q > iq or lost > r):
            bad = t
        X[t + 1, 0] = sp - new_p
        X[t + 1, 1] = ip + new_p - rec_p
        X[t + 1, 2] = r + rec_p + rec_q - lost
        X[t + 1, 3] = sq + lost - new_q
        X[t + 1, 4] = iq + new_q - rec_q
        total = X[t + 1, 0] + X[t + 1, 1] + X[t + 1, 2] + X[t + 1, 3] + X[t + 1, 4]
        if abs(total - 1.0) > RENORM_THRESHOLD:
            for k in range(5):
                X[t + 1, k] /= total
            renormalized += 1
    return X, renormalized, bad


@nb.njit(cache=True)
def _u(a):
    return np.log(a) - a + 1.0


@nb.njit(cache=True)
def backward(X, ap, aq, VT, bp, bq, gp, gq, alpha, sigma, m, kp, kq, lam, qflow, central):
    """Returns (V, best_p, best_q, terminal_a, bad_date).

    ``bad_date`` is the first date (scanning backwards) with a negative value
    gap, or -1. The activity at T (beyond the path) is the first-order
    optimum under the terminal values.
    """
    T = ap.shape[0]
    V = np.empty((T + 1, 5))
    V[T] = VT
    pressure = m * (X[:, 1] + sigma * X[:, 4])
    bad = -1
    gap_p = VT[0] - VT[1]
    gap_q = VT[3] - VT[4]
    if gap_p < 0.0 or gap_q < 0.0:
        bad = T
    ta_p = 1.0 / (1.0 + bp * pressure[T] * max(gap_p, 0.0))
    ta_q = 1.0 / (1.0 + bq * pressure[T] * max(gap_q, 0.0))
    for t in range(T - 1, -1, -1):
        vsp = V[t + 1, 0]
        vip = V[t + 1, 1]
        vr = V[t + 1, 2]
        vsq = V[t + 1, 3]
        viq = V[t + 1, 4]
        i1 = pressure[t + 1]
        if t + 1 < T:
            a1p = ap[t + 1]
            a1q = aq[t + 1]
        else:
            a1p = ta_p
            a1q = ta_q
        ext = 0.0
        if central:
            ext = m * (bp * a1p * X[t + 1, 0] * (vsp - vip) + bq * a1q * X[t + 1, 3] * (vsq - viq))
        V[t, 0] = lam * (_u(a1p) + vsp - bp * a1p * i1 * (vsp - vip))
        V[t, 1] = lam * (qflow + vip - gp * (kp + vip - vr) - ext)
        V[t, 2] = lam * (vr + alpha * (vsq - vr))
        V[t, 3] = lam * (_u(a1q) + vsq - bq * a1q * i1 * (vsq - viq))
        V[t, 4] = lam * (qflow + viq - gq * (kq + viq - vr) - sigma * ext)
        if bad < 0 and (V[t, 0] < V[t, 1] or V[t, 3] < V[t, 4]):
            bad = t
    best_p = np.empty(T)
    best_q = np.empty(T)
    for t in range(T):
        best_p[t] = 1.0 / (1.0 + bp * pressure[t] * max(V[t, 0] - V[t, 1], 0.0))
        best_q[t] = 1.0 / (1.0 + bq * pressure[t] * max(V[t, 3] - V[t, 4], 0.0))
    terminal_a = np.array([ta_p, ta_q])
    return V, best_p, best_q, terminal_a, bad
