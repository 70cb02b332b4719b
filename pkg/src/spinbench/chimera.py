"""Chimera cell-grid topologies with node/edge omissions.

A Chimera graph is an M x C grid of complete bipartite K_{K,K} unit cells.
Within a cell, every node of half 0 couples to every node of half 1.
Between cells, half-0 nodes couple to the same-index half-0 node of the
vertically adjacent cells and half-1 nodes to the horizontally adjacent
cells.  Node ids follow the dense hardware labeling

    id = (cell_row * cols + cell_col) * 2K + half * K + index

and survive omissions unchanged (ids keep gaps; dense model indices are a
separate mapping kept by the generators).
"""

from __future__ import annotations

import json

import numpy as np

__all__ = ["ChimeraTopology", "build_chimera", "random_omissions",
           "load_topology", "save_topology"]


class TopologyError(ValueError):
    pass


class ChimeraTopology:
    """Immutable Chimera graph with omissions already applied.

    Attributes
    ----------
    rows, cols, cell_size : grid shape; ``cell_size`` is K (4 on 2000Q-like chips).
    omitted_nodes : frozenset of dropped node ids.
    omitted_edges : frozenset of (i, j) pairs dropped beyond node omissions.
    nodes : sorted tuple of surviving node ids.
    edges : sorted tuple of surviving (i, j) pairs, i < j.
    """

    __slots__ = ("rows", "cols", "cell_size", "omitted_nodes", "omitted_edges",
                 "nodes", "edges", "_index")

    def __init__(self, rows, cols, cell_size, omitted_nodes=(), omitted_edges=()):
        rows, cols, cell_size = int(rows), int(cols), int(cell_size)
        if min(rows, cols, cell_size) < 1:
            raise TopologyError("rows, cols and cell_size must all be >= 1")
        object.__setattr__(self, "rows", rows)
        object.__setattr__(self, "cols", cols)
        object.__setattr__(self, "cell_size", cell_size)

        all_nodes = range(rows * cols * 2 * cell_size)
        ideal_edges = set(self._ideal_edges())
        omitted_nodes = frozenset(int(v) for v in omitted_nodes)
        for v in omitted_nodes:
            if v not in all_nodes:
                raise TopologyError(f"omitted node {v} does not exist")
        canon = []
        for i, j in omitted_edges:
            i, j = int(i), int(j)
            if i > j:
                i, j = j, i
            if (i, j) not in ideal_edges:
                raise TopologyError(f"omitted edge ({i},{j}) does not exist")
            canon.append((i, j))
        omitted_edges = frozenset(canon)
        object.__setattr__(self, "omitted_nodes", omitted_nodes)
        object.__setattr__(self, "omitted_edges", omitted_edges)

        nodes = tuple(v for v in all_nodes if v not in omitted_nodes)
        edges = tuple(sorted(
            (i, j) for i, j in ideal_edges
            if i not in omitted_nodes and j not in omitted_nodes
            and (i, j) not in omitted_edges))
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "edges", edges)
        object.__setattr__(self, "_index", {v: k for k, v in enumerate(nodes)})

    def __setattr__(self, name, value):
        raise AttributeError("ChimeraTopology is immutable")

    # -- labeling ---------------------------------------------------------

    def node_id(self, cell_row, cell_col, half, index):
        k = self.cell_size
        return ((cell_row * self.cols + cell_col) * 2 + half) * k + index

    def locate(self, node_id):
        """Inverse of node_id: (cell_row, cell_col, half, index)."""
        k = self.cell_size
        index = node_id % k
        rest = node_id // k
        half = rest % 2
        cell = rest // 2
        return cell // self.cols, cell % self.cols, half, index

    def dense_index(self):
        """Mapping node id -> dense index 0..len(nodes)-1 (sorted id order)."""
        return dict(self._index)

    def cell_blocks(self):
        """Surviving nodes grouped by unit cell, as dense-index lists.

        Cells are ordered row-major; empty cells are skipped.  Useful as a
        block partition for bounded search: all intra-cell structure sits
        inside one block, only inter-cell couplers cross blocks.
        """
        k = self.cell_size
        per_cell = {}
        for v in self.nodes:
            per_cell.setdefault(v // (2 * k), []).append(self._index[v])
        return [per_cell[c] for c in sorted(per_cell)]

    def _ideal_edges(self):
        k = self.cell_size
        for r in range(self.rows):
            for c in range(self.cols):
                for a in range(k):
                    u = self.node_id(r, c, 0, a)
                    # intra-cell bipartite block
                    for b in range(k):
                        yield (u, self.node_id(r, c, 1, b))
                    # half 0 couples vertically
                    if r + 1 < self.rows:
                        yield (u, self.node_id(r + 1, c, 0, a))
                for a in range(k):
                    # half 1 couples horizontally
                    if c + 1 < self.cols:
                        yield (self.node_id(r, c, 1, a),
                               self.node_id(r, c + 1, 1, a))

    # -- stats ------------------------------------------------------------

    @property
    def node_count(self):
        return len(self.nodes)

    @property
    def edge_count(self):
        return len(self.edges)

    def degrees(self):
        deg = {v: 0 for v in self.nodes}
        for i, j in self.edges:
            deg[i] += 1
            deg[j] += 1
        return deg

    def __repr__(self):
        return (f"ChimeraTopology({self.rows}x{self.cols}, K={self.cell_size}, "
                f"nodes={self.node_count}, edges={self.edge_count})")


def build_chimera(rows, cols, cell_size=4, omitted_nodes=(), omitted_edges=()):
    """Construct an M x C Chimera topology with the given omissions."""
    return ChimeraTopology(rows, cols, cell_size, omitted_nodes, omitted_edges)


def random_omissions(topology, node_drop_rate, seed):
    """Drop each surviving node independently with the given rate.

    Draws one uniform per node in sorted id order from ``default_rng(seed)``.
    Incident edges disappear with their nodes.
    """
    rate = float(node_drop_rate)
    if not 0.0 <= rate < 1.0:
        raise TopologyError(f"drop rate must be in [0, 1), got {rate}")
    rng = np.random.default_rng(seed)
    u = rng.random(len(topology.nodes))
    dropped = [v for v, x in zip(topology.nodes, u) if x < rate]
    return ChimeraTopology(
        topology.rows, topology.cols, topology.cell_size,
        set(topology.omitted_nodes) | set(dropped),
        topology.omitted_edges)


def save_topology(topology, path):
    doc = {
        "rows": topology.rows,
        "cols": topology.cols,
        "cell_size": topology.cell_size,
        "omitted_nodes": sorted(topology.omitted_nodes),
        "omitted_edges": [list(e) for e in sorted(topology.omitted_edges)],
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=1)
        fh.write("\n")


def load_topology(path):
    with open(path, encoding="utf-8") as fh:
        doc = json.load(fh)
    try:
        return ChimeraTopology(doc["rows"], doc["cols"], doc["cell_size"],
                               doc.get("omitted_nodes", ()),
                               [tuple(e) for e in doc.get("omitted_edges", ())])
    except KeyError as exc:
        raise TopologyError(f"topology file missing key {exc}") from exc
