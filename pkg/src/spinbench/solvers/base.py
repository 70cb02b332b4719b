"""Shared solver plumbing: budget clocks and improvement trajectories."""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from ..model import ContractViolation, energy

__all__ = ["SolveClock", "SolveTrajectory", "TrajectoryRecorder"]


class SolveClock:
    """Budget clock for a solver run.

    ``mode="wall"`` reads the monotonic clock.  ``mode="ticks"`` is a
    deterministic virtual clock: solvers charge counted work units and one
    unit advances time by ``tick_scale`` seconds.  Tick mode makes seeded
    runs byte-identical across machines; wall mode is for real profiling.
    """

    def __init__(self, time_limit, mode="wall", tick_scale=1e-6):
        if time_limit <= 0:
            raise ContractViolation(f"time_limit must be positive, got {time_limit}")
        if mode not in ("wall", "ticks"):
            raise ContractViolation(f"unknown clock mode {mode!r}")
        self.time_limit = float(time_limit)
        self.mode = mode
        self.tick_scale = float(tick_scale)
        self._ticks = 0
        self._start = time.monotonic()

    def charge(self, units=1):
        """Account for completed work; only advances time in tick mode."""
        self._ticks += units

    def elapsed(self):
        if self.mode == "ticks":
            return self._ticks * self.tick_scale
        return time.monotonic() - self._start

    def expired(self):
        return self.elapsed() >= self.time_limit


@dataclass
class SolveTrajectory:
    """Anytime record of a solver run: every strict improvement found.

    ``improvements`` holds (elapsed_seconds, energy, config) triples with
    strictly decreasing energies and non-decreasing times; each recorded
    energy recomputes exactly from its configuration.
    """

    solver_name: str
    seed: object
    time_limit: float
    improvements: list = field(default_factory=list)
    total_restarts: int = 0
    metadata: dict = field(default_factory=dict)

    def best_energy(self):
        return self.improvements[-1][1] if self.improvements else None

    def best_config(self):
        return self.improvements[-1][2] if self.improvements else None

    def energy_at(self, t):
        """Best energy found by elapsed time t, or None before the first record."""
        best = None
        for rec_t, rec_e, _ in self.improvements:
            if rec_t <= t:
                best = rec_e
            else:
                break
        return best

    def config_at(self, t):
        best = None
        for rec_t, _, rec_c in self.improvements:
            if rec_t <= t:
                best = rec_c
            else:
                break
        return best


class TrajectoryRecorder:
    """Builds a SolveTrajectory, enforcing its invariants at record time.

    Candidates are re-evaluated with the canonical energy function, so a
    solver's incremental bookkeeping can drift without ever corrupting the
    trajectory.  Only strict improvements are kept.
    """

    def __init__(self, model, solver_name, seed, clock):
        self.model = model
        self.clock = clock
        self.trajectory = SolveTrajectory(solver_name=solver_name, seed=seed,
                                          time_limit=clock.time_limit)
        self._best = np.inf

    def offer(self, config):
        """Record config if it strictly beats the best so far; returns its energy."""
        e = energy(self.model, config)
        if e < self._best:
            self._best = e
            self.trajectory.improvements.append(
                (self.clock.elapsed(), e, np.asarray(config, dtype=np.int8).copy()))
        return e

    @property
    def best_energy(self):
        return self._best

    def finish(self, total_restarts=0):
        self.trajectory.total_restarts = int(total_restarts)
        return self.trajectory
