"""Classical heuristic solvers producing anytime trajectories.

``SOLVERS`` maps registry names to a uniform signature
``run(model, topology, time_limit, seed=None, clock="wall", **settings)``;
solvers that do not use the topology ignore it.
"""

from .base import SolveClock, SolveTrajectory, TrajectoryRecorder
from .scd import scd, scd_marginals
from .glauber import glauber, is_local_minimum
from .minsum import min_sum, ssl, decode_messages
from .hfs import hfs, HfsContext

__all__ = ["SolveClock", "SolveTrajectory", "TrajectoryRecorder",
           "scd", "scd_marginals", "glauber", "is_local_minimum",
           "min_sum", "ssl", "decode_messages", "hfs", "HfsContext",
           "SOLVERS"]


def _run_scd(model, topology, time_limit, seed=None, clock="wall", **kw):
    return scd(model, time_limit, seed=seed, clock=clock, **kw)


def _run_gd(model, topology, time_limit, seed=None, clock="wall", **kw):
    return glauber(model, time_limit, seed=seed, clock=clock, **kw)


def _run_ms(model, topology, time_limit, seed=None, clock="wall", **kw):
    return min_sum(model, time_limit, seed=seed, clock=clock, **kw)


def _run_hfs(model, topology, time_limit, seed=None, clock="wall", **kw):
    if topology is None:
        raise ValueError("hfs requires a topology")
    return hfs(model, topology, time_limit, seed=seed, clock=clock, **kw)


SOLVERS = {
    "scd": _run_scd,
    "gd": _run_gd,
    "ms": _run_ms,
    "hfs": _run_hfs,
}
