"""Planted-structure instance families on arbitrary topologies.

Each family is a pair of discrete distributions: couplings are always drawn
(probabilities sum to 1) while fields carry an implicit remainder at h = 0.
The biased-ferromagnet families plant sigma = +1 as the likely unique
optimum; an optional uniform random gauge then hides it.  The gauge and the
planted state live in a sidecar kept away from the instance file so solvers
cannot peek.

Draw order is fixed and documented: one uniform per coupling in canonical
edge order, one uniform per field in node order, then (gauge enabled) one
integer in {0,1} per node.  The generator is numpy's PCG64 via
``default_rng(seed)``, which pins the byte stream for a given seed.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from typing import Optional

import numpy as np

from .model import IsingModel, apply_gauge, as_gauge, as_spins, energy, gauge_transform

__all__ = ["FieldDistribution", "CouplingDistribution", "GroundTruthSidecar",
           "family_presets", "generate", "generate_family", "expected_gap"]

_PROB_TOL = 1e-12


class DistributionError(ValueError):
    pass


@dataclass(frozen=True)
class FieldDistribution:
    """Discrete field values with probabilities; leftover mass sits at 0."""

    entries: tuple  # of (value, probability)

    def __post_init__(self):
        total = 0.0
        for value, p in self.entries:
            if not 0.0 <= p <= 1.0:
                raise DistributionError(f"probability {p} for value {value} outside [0,1]")
            total += p
        if total > 1.0 + _PROB_TOL:
            raise DistributionError(f"field probabilities sum to {total} > 1")

    def sample(self, u):
        """Map uniforms in [0,1) to values; the tail maps to 0."""
        out = np.zeros(u.shape, dtype=np.float64)
        lo = 0.0
        for value, p in self.entries:
            hi = lo + p
            out[(u >= lo) & (u < hi)] = value
            lo = hi
        return out

    def mean(self):
        return float(sum(v * p for v, p in self.entries))


@dataclass(frozen=True)
class CouplingDistribution:
    """Discrete coupling values; probabilities must cover the whole mass."""

    entries: tuple

    def __post_init__(self):
        total = sum(p for _, p in self.entries)
        if abs(total - 1.0) > _PROB_TOL:
            raise DistributionError(f"coupling probabilities sum to {total} != 1")
        for value, p in self.entries:
            if not 0.0 <= p <= 1.0:
                raise DistributionError(f"probability {p} for value {value} outside [0,1]")

    def sample(self, u):
        out = np.empty(u.shape, dtype=np.float64)
        out[:] = self.entries[-1][0]  # guard against u landing on the rounding tail
        lo = 0.0
        for value, p in self.entries:
            hi = lo + p
            out[(u >= lo) & (u < hi)] = value
            lo = hi
        return out


@dataclass
class GroundTruthSidecar:
    """What the generator knows about an instance's optimum.

    ``planted_config`` is the pre-gauge all-ones state mapped through the
    applied gauge.  ``certified`` flips to True once complete search has
    proven the optimum; the certified energy is then <= the planted energy.
    ``degenerate`` marks instances whose field draw came out all-zero, which
    makes the planted state and its global flip energy ties.
    """

    planted_config: np.ndarray
    gauge: np.ndarray
    certified: bool = False
    certified_energy: Optional[float] = None
    certified_optima: Optional[list] = None
    degenerate: bool = False

    def reference_optima(self):
        """Configurations metrics should compare against."""
        if self.certified and self.certified_optima:
            return [as_spins(c) for c in self.certified_optima]
        optima = [as_spins(self.planted_config)]
        if self.degenerate:
            optima.append((-optima[0]).astype(np.int8))
        return optima


_PRESETS = {
    "BFM": (((-1.00, 1.000),), ((-1.00, 0.010),)),
    "FBFM": (((-1.00, 1.000),), ((-1.00, 0.020), (1.00, 0.010))),
    "CBFM": (((-1.00, 0.625), (0.20, 0.375)), ((-1.00, 0.020), (1.00, 0.010))),
    "BFM-U": (((-1.00, 1.000),), ((-0.01, 1.000),)),
    "FBFM-U": (((-1.00, 1.000),), ((-0.03, 0.666), (0.03, 0.334))),
    "CBFM-U": (((-1.00, 0.625), (0.20, 0.375)), ((-0.03, 0.666), (0.03, 0.334))),
    "RANF-1": (((-1.00, 0.5), (1.00, 0.5)), ((-1.00, 0.5), (1.00, 0.5))),
}


def family_presets():
    """Name -> (CouplingDistribution, FieldDistribution) for all families."""
    return {name: (CouplingDistribution(j), FieldDistribution(h))
            for name, (j, h) in _PRESETS.items()}


def get_preset(name):
    key = name.upper()
    if key not in _PRESETS:
        raise KeyError(f"unknown family {name!r}; known: {', '.join(_PRESETS)}")
    j, h = _PRESETS[key]
    return CouplingDistribution(j), FieldDistribution(h)


def generate(topology, j_dist, h_dist, apply_random_gauge, seed, family=None):
    """Draw one instance on a topology; returns (model, sidecar).

    The model uses dense indices 0..N-1; the topology's node ids are stored
    as ``metadata["variable_labels"]``.  With the gauge enabled, couplings
    and fields are transformed by a uniform random sign vector g and the
    sidecar's planted configuration becomes g itself.
    """
    rng = np.random.default_rng(seed)
    nodes = list(topology.nodes)
    index = {v: k for k, v in enumerate(nodes)}
    n = len(nodes)
    if n == 0:
        raise DistributionError("topology has no surviving nodes")

    edge_pairs = [(index[i], index[j]) for i, j in topology.edges]
    j_values = j_dist.sample(rng.random(len(edge_pairs)))
    h_values = h_dist.sample(rng.random(n))

    meta = {
        "generator": "spinbench",
        "family": family,
        "seed": None if seed is None else int(seed),
        "coupling_distribution": [[float(v), float(p)] for v, p in j_dist.entries],
        "field_distribution": [[float(v), float(p)] for v, p in h_dist.entries],
        "random_gauge": bool(apply_random_gauge),
        "variable_labels": [int(v) for v in nodes],
        "topology": {
            "rows": topology.rows,
            "cols": topology.cols,
            "cell_size": topology.cell_size,
            "omitted_nodes": sorted(topology.omitted_nodes),
            "omitted_edges": [list(e) for e in sorted(topology.omitted_edges)],
        },
    }
    edges = [(i, j, w) for (i, j), w in zip(edge_pairs, j_values)]
    model = IsingModel(n, edges, h_values, metadata=meta)

    degenerate = not np.any(h_values)
    if apply_random_gauge:
        gauge = (2 * rng.integers(0, 2, n) - 1).astype(np.int8)
        model = gauge_transform(model, gauge)
        # the sidecar, not the instance file, carries the gauge
        meta2 = dict(model.metadata)
        meta2.pop("gauge", None)
        model = model.replace(metadata=meta2)
    else:
        gauge = np.ones(n, dtype=np.int8)

    planted = apply_gauge(np.ones(n, dtype=np.int8), gauge)
    sidecar = GroundTruthSidecar(planted_config=planted, gauge=gauge,
                                 degenerate=degenerate)
    return model, sidecar


def generate_family(topology, family, seed, apply_random_gauge=True):
    """Preset-parameterized :func:`generate`."""
    j_dist, h_dist = get_preset(family)
    return generate(topology, j_dist, h_dist, apply_random_gauge, seed,
                    family=family.upper())


def expected_gap(family, topology_or_n):
    """Expected E(all -1) - E(all +1) for the biased ferromagnet families.

    Both BFM and FBFM have mean field -0.01 per node, so the all-(-1) state
    sits 0.02 * N above the planted state in expectation.
    """
    key = family.upper()
    if key not in ("BFM", "FBFM"):
        raise KeyError(f"expected_gap supports BFM and FBFM, not {family!r}")
    n = topology_or_n if isinstance(topology_or_n, int) \
        else topology_or_n.node_count
    return 0.02 * n


def planted_energy(model, sidecar):
    """Energy of the sidecar's planted configuration under the instance."""
    return energy(model, sidecar.planted_config)


def verify_gauge_obfuscation(model_plain, model_gauged, sidecar, config):
    """energy(gauged, g * sigma) == energy(plain, sigma), bit for bit."""
    g = as_gauge(sidecar.gauge, model_plain.node_count)
    return energy(model_gauged, apply_gauge(config, g)) == energy(model_plain, config)
