"""Race the heuristic solvers on one corrupted ferromagnet.

All four heuristics share the signature
``run(model, topology, time_limit, seed, clock)`` and return anytime
trajectories: a list of (time, energy, config) improvements plus a
restart counter.  Tick clocks make the race deterministic, so reruns
reproduce the exact same table.
"""

from spinbench.chimera import build_chimera
from spinbench.exact import certify
from spinbench.generators import generate_family
from spinbench.solvers import SOLVERS


def main():
    topo = build_chimera(2, 2)
    model, sidecar = generate_family(topo, "CBFM", 42)
    cert = certify(model, sidecar, time_limit=60.0)
    print(f"CBFM seed 42 on {model.node_count} nodes, "
          f"certified optimum {cert.optimal_energy:+.2f}\n")

    budget = 0.02  # simulated seconds of tick time
    print(f"{'solver':>6} {'best':>8} {'gap':>6} {'improvements':>12} "
          f"{'restarts':>8}")
    for name in ("scd", "gd", "ms", "hfs"):
        traj = SOLVERS[name](model, topo, budget, seed=9, clock="ticks")
        gap = traj.best_energy() - cert.optimal_energy
        print(f"{name:>6} {traj.best_energy():>+8.2f} {gap:>6.2f} "
              f"{len(traj.improvements):>12} {traj.total_restarts:>8}")

    print("\nscd improvement trace (time, energy):")
    traj = SOLVERS["scd"](model, topo, budget, seed=9, clock="ticks")
    for t, e, _ in traj.improvements:
        print(f"  {t:10.6f}  {e:+8.2f}")


if __name__ == "__main__":
    main()
