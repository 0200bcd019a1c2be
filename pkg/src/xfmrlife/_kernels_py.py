"""Pure-Python/numpy implementations of the hot loops.

Mirrors ``_kernels.pyx`` operation for operation so both backends produce the
same numbers; the compiled module is preferred when it is importable.

Chromosome layout (one row per individual)::

    [charge_start, charge_end, discharge_start, discharge_end, charge_kw, discharge_kw]

Window bounds are inclusive hour indices.
"""

from __future__ import annotations

import math

import numpy as np

HOURS = 24
N_GENES = 6
AGING_REF = 15000.0 / 383.0


def thermal_path(ambient, k_u, to0, h0, to_rated, h_rated, loss_ratio, m, n,
                 tau_to, tau_w, dt):
    """Hourly top-oil rise, hot-spot rise and hot-spot temperature.

    Every sample is stepped from the previous state, starting at ``(to0, h0)``.
    """
    ambient = np.asarray(ambient, dtype=float)
    k_u = np.asarray(k_u, dtype=float)
    size = ambient.size
    to_out = np.empty(size)
    h_out = np.empty(size)
    theta = np.empty(size)
    a_to = 1.0 - math.exp(-dt / tau_to)
    a_w = 1.0 - math.exp(-dt / tau_w)
    to, h = float(to0), float(h0)
    two_m = 2.0 * m
    for i in range(size):
        k = float(k_u[i])
        h_ult = h_rated * k**two_m
        to_ult = to_rated * ((k * k * loss_ratio + 1.0) / (loss_ratio + 1.0)) ** n
        to = (to_ult - to) * a_to + to
        h = (h_ult - h) * a_w + h
        to_out[i] = to
        h_out[i] = h
        theta[i] = float(ambient[i]) + to + h
    return to_out, h_out, theta


def aging_factors(theta):
    theta = np.asarray(theta, dtype=float)
    return np.exp(AGING_REF - 15000.0 / (theta + 273.0))


def repair_and_score(genes, net_day, target, soc0, capacity, rated_kw, eta, sqrt_eta, soc_min):
    """Repair ``genes`` in place into feasible schedules and return their costs."""
    g = genes
    # windows: round half up, clip to the day, order bounds
    w = np.floor(g[:, :4] + 0.5)
    np.clip(w, 0.0, HOURS - 1, out=w)
    c1 = np.minimum(w[:, 0], w[:, 1])
    c2 = np.maximum(w[:, 0], w[:, 1])
    d1 = np.minimum(w[:, 2], w[:, 3])
    d2 = np.maximum(w[:, 2], w[:, 3])
    pc = np.clip(g[:, 4], 0.0, rated_kw)
    pd = np.clip(g[:, 5], 0.0, rated_kw)

    both = (pc > 0.0) & (pd > 0.0)
    # overlapping windows: the later-starting one wins its hours
    m = both & (c1 < d1) & (d1 <= c2)
    c2 = np.where(m, d1 - 1.0, c2)
    m = both & (d1 < c1) & (c1 <= d2)
    d2 = np.where(m, c1 - 1.0, d2)
    m = both & (c1 == d1)
    d1 = np.where(m, c2 + 1.0, d1)
    d2 = np.where(m, np.maximum(d2, d1), d2)
    off = m & (d1 > HOURS - 1)
    d1 = np.where(off, HOURS - 1.0, d1)
    d2 = np.where(off, HOURS - 1.0, d2)
    pd = np.where(off, 0.0, pd)

    lc = c2 - c1 + 1.0
    ld = d2 - d1 + 1.0
    charge_first = c1 < d1
    room = eta * capacity

    # charge window first
    cap = np.maximum(room * (1.0 - soc0) / lc, 0.0)
    pc_a = np.minimum(pc, cap)
    mid = soc0 + pc_a * lc * sqrt_eta / capacity
    cap = np.maximum(room * (mid - soc_min) / ld, 0.0)
    pd_a = np.minimum(pd, cap)
    # discharge window first
    cap = np.maximum(room * (soc0 - soc_min) / ld, 0.0)
    pd_b = np.minimum(pd, cap)
    mid = soc0 - pd_b * ld / (sqrt_eta * capacity)
    cap = np.maximum(room * (1.0 - mid) / lc, 0.0)
    pc_b = np.minimum(pc, cap)

    pc = np.where(charge_first, pc_a, pc_b)
    pd = np.where(charge_first, pd_a, pd_b)

    g[:, 0] = c1
    g[:, 1] = c2
    g[:, 2] = d1
    g[:, 3] = d2
    g[:, 4] = pc
    g[:, 5] = pd

    cost = np.zeros(g.shape[0])
    for i in range(HOURS):
        pb = np.where((c1 <= i) & (i <= c2), pc, 0.0) - np.where((d1 <= i) & (i <= d2), pd, 0.0)
        cost += np.abs(net_day[i] + pb - target)
    return cost


def run_ga(net_day, target, soc0, capacity, rated_kw, eta, sqrt_eta, soc_min,
           pop0, tour, cx_gate, mut_gate, mut_noise, reset_gate, reset_value, elite):
    """Elitist GA over window/power chromosomes.

    All randomness arrives pre-drawn, shaped ``(generations, children, ...)``:
    ``tour`` holds tournament candidate indices ``(G, C, 2, K)``, ``cx_gate``
    marks genes taken from the second parent, ``mut_gate`` and ``mut_noise``
    give the additive Gaussian mutation, and where ``reset_gate`` is also set
    the gene is redrawn as ``reset_value`` instead. Returns ``(best_genes, best_cost)``.
    """
    net_day = np.asarray(net_day, dtype=float)
    pop = np.array(pop0, dtype=float)
    cost = repair_and_score(pop, net_day, target, soc0, capacity, rated_kw, eta, sqrt_eta, soc_min)
    generations, children = tour.shape[0], tour.shape[1]
    new = np.empty_like(pop)
    for gen in range(generations):
        order = np.argsort(cost, kind="stable")
        new[:elite] = pop[order[:elite]]
        t = tour[gen]
        pick = np.argmin(cost[t], axis=-1)  # first minimum wins ties
        parents = np.take_along_axis(t, pick[..., None], axis=-1)[..., 0]
        p1 = pop[parents[:, 0]]
        p2 = pop[parents[:, 1]]
        child = np.where(cx_gate[gen], p2, p1)
        child = np.where(mut_gate[gen],
                         np.where(reset_gate[gen], reset_value[gen], child + mut_noise[gen]),
                         child)
        new[elite:elite + children] = child
        pop, new = new, pop
        cost = repair_and_score(pop, net_day, target, soc0, capacity, rated_kw, eta, sqrt_eta, soc_min)
    best = int(np.argmin(cost))
    return pop[best].copy(), float(cost[best])
