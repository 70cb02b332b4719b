"""Large neighborhood search over Chimera cell trees.

Repeatedly selects a random set of unit cells whose induced cell graph is
a tree, fixes every spin outside the selection (folding the crossing
couplers into local fields), solves the freed subproblem exactly by
dynamic programming over the cell tree, and installs the result.  Moves
never increase the energy because the incumbent restricted to the patch is
one of the states the DP minimizes over.  When a stretch of moves brings
no strict improvement the incumbent is abandoned for a fresh random
configuration; the trajectory keeps the global best across restarts.

Cell selection grows from a random seed cell, admitting a neighboring cell
only while it touches exactly one already-selected cell; cells touching
two or more are permanently blocked.  Every edge induced between selected
cells is therefore a growth step, which makes the induced cell graph a
tree by construction.

The DP enumerates all 2^(2K) spin states per cell.  Inter-cell couplers
touch only one half of a cell (vertical links use half 0, horizontal links
half 1), so the message passed to a parent cell is indexed by the 2^K
states of that linking half.
"""

from __future__ import annotations

import numpy as np

from ..model import ContractViolation
from .base import SolveClock, TrajectoryRecorder

__all__ = ["hfs", "HfsContext"]

_tables_cache = {}


def _tables(k):
    """Spin tables for cell size K: full-state and half-state sign matrices."""
    if k not in _tables_cache:
        s = 1 << (2 * k)
        states = np.arange(s, dtype=np.int64)
        bits = (states[:, None] >> np.arange(2 * k)) & 1
        sub = np.arange(1 << k, dtype=np.int64)
        half_bits = (sub[:, None] >> np.arange(k)) & 1
        _tables_cache[k] = (
            1.0 - 2.0 * bits,            # (2^2K, 2K) signs, bit=1 -> -1
            1.0 - 2.0 * half_bits,       # (2^K, K)
            states & ((1 << k) - 1),     # half-0 substate per state
            states >> k,                 # half-1 substate per state
        )
    return _tables_cache[k]


class HfsContext:
    """Precomputed cell structure binding a model to its Chimera topology.

    Everything that does not depend on the incumbent configuration is
    tabulated up front: per-cell cost vectors over all 2^2K states
    (fields plus intra-cell couplings), the couplers crossing out of each
    cell, and the 2^K-by-2^K interaction matrix of every adjacent cell
    pair.  A patch solve then only gathers boundary contributions and
    runs the tree DP on small dense arrays.
    """

    def __init__(self, model, topology):
        if model.node_count != len(topology.nodes):
            raise ContractViolation(
                f"model has {model.node_count} nodes, topology {len(topology.nodes)}")
        self.model = model
        self.topology = topology
        self.k = topology.cell_size
        index = topology.dense_index()

        topo_edges = set(topology.edges)
        labels = topology.nodes
        for i, j in zip(model.edge_head, model.edge_tail):
            a, b = labels[int(i)], labels[int(j)]
            if (min(a, b), max(a, b)) not in topo_edges:
                raise ContractViolation(
                    f"model edge ({a},{b}) is not a topology edge")

        k = self.k
        slots = {}
        for v in topology.nodes:
            r, c, half, idx = topology.locate(v)
            cell = (r, c)
            if cell not in slots:
                slots[cell] = np.full(2 * k, -1, dtype=np.int64)
            slots[cell][half * k + idx] = index[v]
        self.cell_slots = slots
        self.cells = sorted(slots)

        edge_w = {}
        for i, j, w in zip(model.edge_head, model.edge_tail, model.coupling):
            edge_w[(int(i), int(j))] = float(w)

        def weight(a, b):
            if a < 0 or b < 0:
                return 0.0
            return edge_w.get((min(a, b), max(a, b)), 0.0)

        bits, half_bits, _, _ = _tables(k)
        self.static_cost = {}
        self.cross = {}
        cell_of = {}
        for cell, sl in slots.items():
            for d in sl[sl >= 0]:
                cell_of[int(d)] = cell
        for cell, sl in slots.items():
            fields = np.where(sl >= 0, model.field[np.maximum(sl, 0)], 0.0)
            cost = bits @ fields
            for b0 in range(k):
                for b1 in range(k, 2 * k):
                    w = weight(sl[b0], sl[b1])
                    if w != 0.0:
                        cost = cost + w * bits[:, b0] * bits[:, b1]
            self.static_cost[cell] = cost

            slot_ids, nbr_ids, nbr_w = [], [], []
            for b in range(2 * k):
                d = int(sl[b])
                if d < 0:
                    continue
                for u, e in model.adjacency()[d]:
                    if cell_of[u] != cell:
                        slot_ids.append(b)
                        nbr_ids.append(u)
                        nbr_w.append(float(model.coupling[e]))
            self.cross[cell] = (np.array(slot_ids, dtype=np.int64),
                                np.array(nbr_ids, dtype=np.int64),
                                np.array(nbr_w))

        self.neighbors = {}
        self.link_half = {}
        self.inter = {}
        for (r, c) in self.cells:
            nbrs = []
            for dr, dc, half in ((1, 0, 0), (-1, 0, 0), (0, 1, 1), (0, -1, 1)):
                other = (r + dr, c + dc)
                if other in slots:
                    nbrs.append(other)
                    wlink = np.array([weight(slots[(r, c)][half * k + i],
                                             slots[other][half * k + i])
                                      for i in range(k)])
                    self.link_half[((r, c), other)] = half
                    self.inter[((r, c), other)] = (half_bits * wlink) @ half_bits.T
            self.neighbors[(r, c)] = nbrs

    def random_cell_tree(self, rng, max_cells=48):
        """Grow a random induced cell tree; returns (order, parent, link_half)."""
        cells = self.cells
        root = cells[int(rng.integers(len(cells)))]
        order = [root]
        parent = {root: None}
        link = {}
        seen = {root: 0}
        candidates = []
        for nb in self.neighbors[root]:
            seen[nb] = 1
            candidates.append(nb)
        cap = min(len(cells), max_cells)
        while len(order) < cap and candidates:
            cell = candidates.pop(int(rng.integers(len(candidates))))
            if seen[cell] != 1:
                continue  # blocked: grew a second selected neighbor while queued
            par = next(nb for nb in self.neighbors[cell] if nb in parent)
            order.append(cell)
            parent[cell] = par
            link[cell] = self.link_half[(cell, par)]
            for nb in self.neighbors[cell]:
                if nb in parent:
                    continue
                seen[nb] = seen.get(nb, 0) + 1
                if seen[nb] == 1:
                    candidates.append(nb)
        return order, parent, link

    def optimize_patch(self, tree, sigma):
        """Exactly minimize over the patch with the rest of sigma fixed."""
        order, parent, link = tree
        k = self.k
        bits, _, sub0, sub1 = _tables(k)
        slots = self.cell_slots

        in_patch = np.zeros(self.model.node_count, dtype=bool)
        for cell in order:
            sl = slots[cell]
            in_patch[sl[sl >= 0]] = True

        pending = {cell: [] for cell in order}
        chosen_arg = {}
        root_total = None
        for cell in reversed(order):
            slot_ids, nbr_ids, nbr_w = self.cross[cell]
            outside = ~in_patch[nbr_ids]
            dyn = np.zeros(2 * k)
            if outside.any():
                np.add.at(dyn, slot_ids[outside],
                          nbr_w[outside] * sigma[nbr_ids[outside]])
            cost = self.static_cost[cell] + bits @ dyn
            for msg, half in pending[cell]:
                cost = cost + msg[sub0 if half == 0 else sub1]

            par = parent[cell]
            if par is None:
                root_total = cost
                continue
            half = link[cell]
            grid = cost.reshape(1 << k, 1 << k)  # [sub1, sub0]
            if half == 0:
                best = grid.min(axis=0)
                other = grid.argmin(axis=0)
                full = other * (1 << k) + np.arange(1 << k)
            else:
                best = grid.min(axis=1)
                other = grid.argmin(axis=1)
                full = np.arange(1 << k) * (1 << k) + other
            stacked = best[:, None] + self.inter[(cell, par)]
            msg = stacked.min(axis=0)
            pick = stacked.argmin(axis=0)
            pending[par].append((msg, half))
            chosen_arg[cell] = (full[pick], half)

        states = {order[0]: int(np.argmin(root_total))}
        for cell in order[1:]:
            par_state = states[parent[cell]]
            arg_full, half = chosen_arg[cell]
            t = int(sub0[par_state] if half == 0 else sub1[par_state])
            states[cell] = int(arg_full[t])

        out = sigma.copy()
        for cell in order:
            sl = slots[cell]
            st = states[cell]
            for b in range(2 * k):
                d = int(sl[b])
                if d >= 0:
                    out[d] = 1 if (st >> b) & 1 == 0 else -1
        return out


def hfs(model, topology, time_limit, seed=None, clock="wall", max_cells=48,
        stall_limit=None):
    """Cell-tree large neighborhood search under a time budget.

    ``stall_limit`` moves without strict improvement trigger a restart
    from a fresh random configuration (default: twice the cell count).
    """
    ctx = HfsContext(model, topology)
    ck = SolveClock(time_limit, clock)
    rec = TrajectoryRecorder(model, "hfs", seed, ck)
    rng = np.random.default_rng(seed)
    if stall_limit is None:
        stall_limit = 2 * len(ctx.cells)

    cur = (2 * rng.integers(0, 2, model.node_count) - 1).astype(np.int8)
    cur_e = rec.offer(cur)
    stall = 0
    restarts = 0
    while not ck.expired():
        tree = ctx.random_cell_tree(rng, max_cells)
        cand = ctx.optimize_patch(tree, cur)
        cand_e = rec.offer(cand)
        if cand_e < cur_e:
            stall = 0
        else:
            stall += 1
        if cand_e <= cur_e:
            cur, cur_e = cand, cand_e
        ck.charge(len(tree[0]))
        if stall >= stall_limit:
            cur = (2 * rng.integers(0, 2, model.node_count) - 1).astype(np.int8)
            cur_e = rec.offer(cur)
            stall = 0
            restarts += 1
    return rec.finish(total_restarts=restarts)
