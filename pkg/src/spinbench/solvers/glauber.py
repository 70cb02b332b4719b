"""Zero-temperature Glauber dynamics with restarts.

Sweeps the nodes in a fresh random permutation, flipping a spin when that
strictly lowers the energy and flipping with probability one half when the
energy is unchanged.  Flipping sigma_i changes the energy by
-2 sigma_i ell_i with ell_i = h_i + sum_j J_ij sigma_j, so the test needs
only the cached local field.  After a sweep with no strict improvement the
current state is checked exactly; if no single flip can lower the energy
the state is a local minimum and the walk restarts from a fresh uniform
random configuration.
"""

from __future__ import annotations

import numpy as np

from .base import SolveClock, TrajectoryRecorder

__all__ = ["glauber", "is_local_minimum"]


def _local_fields(model, sigma):
    ell = model.field.copy()
    sf = sigma.astype(np.float64)
    np.add.at(ell, model.edge_head, model.coupling * sf[model.edge_tail])
    np.add.at(ell, model.edge_tail, model.coupling * sf[model.edge_head])
    return ell


def is_local_minimum(model, config):
    """True iff no single spin flip strictly lowers the energy."""
    sigma = np.asarray(config, dtype=np.int8)
    ell = _local_fields(model, sigma)
    return bool(np.all(sigma * ell <= 0))


def _sweep(spins, ell, nbrs, order, rng):
    """One pass over ``order``; mutates spins and cached local fields.

    Returns True when at least one flip strictly lowered the energy.
    """
    improved = False
    for i in order:
        i = int(i)
        drive = spins[i] * ell[i]  # flip gain: delta E = -2 * drive
        if drive > 0.0 or (drive == 0.0 and rng.integers(2) == 0):
            new = -spins[i]
            spins[i] = new
            for j, w in nbrs[i]:
                ell[j] += 2.0 * w * new
            if drive > 0.0:
                improved = True
    return improved


def glauber(model, time_limit, seed=None, clock="wall"):
    """Randomized greedy descent; restarts when a local minimum is proven."""
    ck = SolveClock(time_limit, clock)
    rec = TrajectoryRecorder(model, "gd", seed, ck)
    rng = np.random.default_rng(seed)
    n = model.node_count
    nbrs = [[(j, float(model.coupling[e])) for j, e in adj]
            for adj in model.adjacency()]

    restarts = -1
    while not ck.expired():
        restarts += 1
        sigma = (2 * rng.integers(0, 2, n) - 1).astype(np.int8)
        ell = list(_local_fields(model, sigma))
        spins = list(sigma)
        rec.offer(sigma)
        while not ck.expired():
            improved = _sweep(spins, ell, nbrs, rng.permutation(n), rng)
            ck.charge(n)
            if not improved:
                state = np.asarray(spins, dtype=np.int8)
                if is_local_minimum(model, state):
                    rec.offer(state)
                    break
        else:
            # budget ran out mid-walk; keep the current state if it helps
            rec.offer(np.asarray(spins, dtype=np.int8))
    return rec.finish(total_restarts=max(0, restarts))
