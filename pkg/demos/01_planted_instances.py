"""Draw planted Ising instances and look at what was planted.

A biased ferromagnet puts J = -1 on every edge of the working graph and
a weak field h = -1 on about one percent of the nodes, so all-(+1) is
the intended optimum and the all-(-1) mirror sits slightly above it.
"""

import numpy as np

from spinbench.chimera import build_chimera
from spinbench.generators import expected_gap, generate_family
from spinbench.model import energy


def main():
    topo = build_chimera(2, 2)
    n = len(topo.nodes)
    print(f"working graph: {topo.rows}x{topo.cols} cells, "
          f"{n} nodes, {len(topo.edges)} edges")

    gaps = []
    for seed in range(8):
        model, sidecar = generate_family(topo, "BFM", seed,
                                         apply_random_gauge=False)
        planted = sidecar.planted_config
        flipped = -planted
        e_planted = energy(model, planted)
        e_flipped = energy(model, flipped)
        biased = int(np.sum(model.field != 0))
        gaps.append(e_flipped - e_planted)
        tag = " (no field fired: both mirrors optimal)" if sidecar.degenerate else ""
        print(f"seed {seed}: planted energy {e_planted:+.1f}, mirror "
              f"{e_flipped:+.1f}, biased sites {biased}{tag}")

    print(f"\nmean mirror gap over 8 draws: {np.mean(gaps):.2f}")
    print(f"expected from the construction: 0.02 * {n} = "
          f"{expected_gap('BFM', n):.2f}")

    # the corrupted variant mixes in antiferromagnetic edges, so the
    # planted configuration is a good incumbent but not always optimal
    model, sidecar = generate_family(topo, "CBFM", 0, apply_random_gauge=False)
    kinds = dict(zip(*np.unique(model.coupling, return_counts=True)))
    print(f"\nCBFM seed 0 coupling mix: {kinds}")
    print(f"planted energy {energy(model, sidecar.planted_config):+.2f} "
          "(certify before trusting it, see demo 03)")


if __name__ == "__main__":
    main()
