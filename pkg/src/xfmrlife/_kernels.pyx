# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot loops; see ``_kernels_py`` for the reference semantics."""

import numpy as np
cimport numpy as cnp
from libc.math cimport exp, floor, pow, fabs

cnp.import_array()

DEF HOURS = 24
DEF N_GENES = 6
cdef double AGING_REF = 15000.0 / 383.0


def thermal_path(ambient, k_u, double to0, double h0, double to_rated, double h_rated,
                 double loss_ratio, double m, double n, double tau_to, double tau_w, double dt):
    cdef const double[::1] amb = np.ascontiguousarray(ambient, dtype=np.float64)
    cdef const double[::1] k = np.ascontiguousarray(k_u, dtype=np.float64)
    cdef Py_ssize_t size = amb.shape[0], i
    to_arr = np.empty(size)
    h_arr = np.empty(size)
    th_arr = np.empty(size)
    cdef double[::1] to_out = to_arr
    cdef double[::1] h_out = h_arr
    cdef double[::1] theta = th_arr
    cdef double a_to = 1.0 - exp(-dt / tau_to)
    cdef double a_w = 1.0 - exp(-dt / tau_w)
    cdef double to = to0, h = h0, ki, h_ult, to_ult, two_m = 2.0 * m
    with nogil:
        for i in range(size):
            ki = k[i]
            h_ult = h_rated * pow(ki, two_m)
            to_ult = to_rated * pow((ki * ki * loss_ratio + 1.0) / (loss_ratio + 1.0), n)
            to = (to_ult - to) * a_to + to
            h = (h_ult - h) * a_w + h
            to_out[i] = to
            h_out[i] = h
            theta[i] = amb[i] + to + h
    return to_arr, h_arr, th_arr


def aging_factors(theta):
    cdef const double[::1] th = np.ascontiguousarray(theta, dtype=np.float64)
    cdef Py_ssize_t i, size = th.shape[0]
    out = np.empty(size)
    cdef double[::1] o = out
    with nogil:
        for i in range(size):
            o[i] = exp(AGING_REF - 15000.0 / (th[i] + 273.0))
    return out


cdef inline double _clip(double x, double lo, double hi) nogil:
    if x < lo:
        return lo
    if x > hi:
        return hi
    return x


cdef double _repair_one(double* g, const double* net, double target, double soc0,
                        double capacity, double rated_kw, double eta, double sqrt_eta,
                        double soc_min) nogil:
    cdef double c1, c2, d1, d2, pc, pd, a, b, lc, ld, cap, mid, room, cost, pb
    cdef int i
    a = _clip(floor(g[0] + 0.5), 0.0, HOURS - 1)
    b = _clip(floor(g[1] + 0.5), 0.0, HOURS - 1)
    c1 = a if a < b else b
    c2 = b if a < b else a
    a = _clip(floor(g[2] + 0.5), 0.0, HOURS - 1)
    b = _clip(floor(g[3] + 0.5), 0.0, HOURS - 1)
    d1 = a if a < b else b
    d2 = b if a < b else a
    pc = _clip(g[4], 0.0, rated_kw)
    pd = _clip(g[5], 0.0, rated_kw)

    if pc > 0.0 and pd > 0.0:
        if c1 < d1 and d1 <= c2:
            c2 = d1 - 1.0
        elif d1 < c1 and c1 <= d2:
            d2 = c1 - 1.0
        elif c1 == d1:
            d1 = c2 + 1.0
            if d2 < d1:
                d2 = d1
            if d1 > HOURS - 1:
                d1 = HOURS - 1
                d2 = HOURS - 1
                pd = 0.0

    lc = c2 - c1 + 1.0
    ld = d2 - d1 + 1.0
    room = eta * capacity
    if c1 < d1:
        cap = room * (1.0 - soc0) / lc
        if cap < 0.0:
            cap = 0.0
        if pc > cap:
            pc = cap
        mid = soc0 + pc * lc * sqrt_eta / capacity
        cap = room * (mid - soc_min) / ld
        if cap < 0.0:
            cap = 0.0
        if pd > cap:
            pd = cap
    else:
        cap = room * (soc0 - soc_min) / ld
        if cap < 0.0:
            cap = 0.0
        if pd > cap:
            pd = cap
        mid = soc0 - pd * ld / (sqrt_eta * capacity)
        cap = room * (1.0 - mid) / lc
        if cap < 0.0:
            cap = 0.0
        if pc > cap:
            pc = cap

    g[0] = c1
    g[1] = c2
    g[2] = d1
    g[3] = d2
    g[4] = pc
    g[5] = pd

    cost = 0.0
    for i in range(HOURS):
        pb = 0.0
        if c1 <= i and i <= c2:
            pb = pc
        if d1 <= i and i <= d2:
            pb = pb - pd
        cost += fabs(net[i] + pb - target)
    return cost


def repair_and_score(double[:, ::1] genes, net_day, double target, double soc0,
                     double capacity, double rated_kw, double eta, double sqrt_eta,
                     double soc_min):
    cdef const double[::1] net = np.ascontiguousarray(net_day, dtype=np.float64)
    cdef Py_ssize_t k, size = genes.shape[0]
    out = np.empty(size)
    cdef double[::1] cost = out
    with nogil:
        for k in range(size):
            cost[k] = _repair_one(&genes[k, 0], &net[0], target, soc0, capacity,
                                  rated_kw, eta, sqrt_eta, soc_min)
    return out


def run_ga(net_day, double target, double soc0, double capacity, double rated_kw,
           double eta, double sqrt_eta, double soc_min, pop0,
           const cnp.int64_t[:, :, :, ::1] tour, const cnp.npy_bool[:, :, ::1] cx_gate,
           const cnp.npy_bool[:, :, ::1] mut_gate, const double[:, :, ::1] mut_noise,
           const cnp.npy_bool[:, :, ::1] reset_gate, const double[:, :, ::1] reset_value, int elite):
    cdef const double[::1] net = np.ascontiguousarray(net_day, dtype=np.float64)
    pop_a = np.array(pop0, dtype=np.float64, order="C")
    pop_b = np.empty_like(pop_a)
    cost_a = np.empty(pop_a.shape[0])
    cdef double[:, ::1] pop = pop_a
    cdef double[:, ::1] new = pop_b
    cdef double[:, ::1] tmp
    cdef double[::1] cost = cost_a
    cdef Py_ssize_t size = pop.shape[0]
    cdef Py_ssize_t generations = tour.shape[0], children = tour.shape[1]
    cdef Py_ssize_t ksize = tour.shape[3]
    cdef Py_ssize_t gen, c, j, q, e, best, p1, p2, idx
    cdef double bc

    with nogil:
        for j in range(size):
            cost[j] = _repair_one(&pop[j, 0], &net[0], target, soc0, capacity,
                                  rated_kw, eta, sqrt_eta, soc_min)
    for gen in range(generations):
        order = np.argsort(cost_a, kind="stable")
        for e in range(elite):
            idx = order[e]
            for q in range(N_GENES):
                new[e, q] = pop[idx, q]
        with nogil:
            for c in range(children):
                p1 = tour[gen, c, 0, 0]
                bc = cost[p1]
                for j in range(1, ksize):
                    idx = tour[gen, c, 0, j]
                    if cost[idx] < bc:
                        bc = cost[idx]
                        p1 = idx
                p2 = tour[gen, c, 1, 0]
                bc = cost[p2]
                for j in range(1, ksize):
                    idx = tour[gen, c, 1, j]
                    if cost[idx] < bc:
                        bc = cost[idx]
                        p2 = idx
                for q in range(N_GENES):
                    if cx_gate[gen, c, q]:
                        new[elite + c, q] = pop[p2, q]
                    else:
                        new[elite + c, q] = pop[p1, q]
                    if mut_gate[gen, c, q]:
                        if reset_gate[gen, c, q]:
                            new[elite + c, q] = reset_value[gen, c, q]
                        else:
                            new[elite + c, q] = new[elite + c, q] + mut_noise[gen, c, q]
        tmp = pop
        pop = new
        new = tmp
        with nogil:
            for j in range(size):
                cost[j] = _repair_one(&pop[j, 0], &net[0], target, soc0, capacity,
                                      rated_kw, eta, sqrt_eta, soc_min)
    best = 0
    for j in range(1, size):
        if cost[j] < cost[best]:
            best = j
    return np.asarray(pop[best]).copy(), float(cost[best])
