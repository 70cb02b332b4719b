"""Shared naive oracles for the test suite.

Everything here is written independently of the package internals: plain
dicts and loops, no vectorization, so agreement with the fast paths is
meaningful evidence rather than a tautology.
"""

import itertools

import numpy as np
import pytest

# seeded miniature experiment shared by the harness tests and the release
# gate; its CSV is frozen at tests/data/miniature_report.csv
MINIATURE_PLAN = {
    "family": "BFM", "topology": {"rows": 1, "cols": 1},
    "time_ladder": [1e-4, 5e-4, 2e-3], "solvers": ["scd", "gd", "ms"],
    "instance_count": 3, "timing": "ticks", "certify_time_limit": 30.0,
}


def naive_energy(n, edges, fields, config):
    """Textbook double loop: sum J_ij s_i s_j + sum h_i s_i."""
    total = 0.0
    for (i, j), w in edges.items():
        total += w * config[i] * config[j]
    for i, h in fields.items():
        total += h * config[i]
    return total


def naive_minimum(n, edges, fields):
    """Enumerate all 2^n spin vectors; return (best energy, all optima)."""
    best = None
    optima = []
    for bits in itertools.product((1, -1), repeat=n):
        e = naive_energy(n, edges, fields, bits)
        if best is None or e < best - 1e-12:
            best = e
            optima = [bits]
        elif abs(e - best) <= 1e-12:
            optima.append(bits)
    return best, optima


def naive_gauge(edges, fields, g):
    """Apply spin flips g to couplings and fields term by term."""
    new_edges = {(i, j): w * g[i] * g[j] for (i, j), w in edges.items()}
    new_fields = {i: h * g[i] for i, h in fields.items()}
    return new_edges, new_fields


def random_model_dict(rng, n, p_edge=0.4, couplings=(-1.0, 1.0),
                      field_values=(-1.0, 0.0, 1.0)):
    edges = {}
    for i in range(n):
        for j in range(i + 1, n):
            if rng.random() < p_edge:
                edges[(i, j)] = float(rng.choice(couplings))
    fields = {i: float(rng.choice(field_values)) for i in range(n)}
    return edges, fields


def dict_to_model(n, edges, fields):
    from spinbench.model import IsingModel
    return IsingModel(n, [(i, j, w) for (i, j), w in edges.items()],
                      [fields.get(i, 0.0) for i in range(n)])


def random_tree(rng, n):
    """Random recursive tree with continuous tie-free weights."""
    edges = {}
    for i in range(1, n):
        p = int(rng.integers(i))
        edges[(p, i)] = float(rng.uniform(0.2, 1.0) * (2 * rng.integers(0, 2) - 1))
    fields = {i: float(rng.uniform(-1.0, 1.0)) for i in range(n)}
    return edges, fields


def tree_dp_minimum(n, edges, fields):
    """Exact tree minimum by leaf-to-root elimination; independent of min-sum."""
    adj = {i: [] for i in range(n)}
    for (i, j), w in edges.items():
        adj[i].append((j, w))
        adj[j].append((i, w))
    config = np.zeros(n, dtype=np.int8)
    total = 0.0
    done = set()
    for root in range(n):
        if root in done:
            continue
        parent = {root: None}
        order = [root]
        stack = [root]
        while stack:
            v = stack.pop()
            done.add(v)
            for u, _ in adj[v]:
                if u not in parent:
                    parent[u] = v
                    order.append(u)
                    stack.append(u)
        table = {}  # v -> {parent_spin: (subtree min, own spin)}
        for v in reversed(order):
            pw = next((w for u, w in adj[v] if u == parent[v]), 0.0)
            opts = (1, -1) if parent[v] is not None else (None,)
            table[v] = {}
            for sp in opts:
                best = None
                for sv in (1, -1):
                    val = fields.get(v, 0.0) * sv
                    if sp is not None:
                        val += pw * sv * sp
                    for u, _ in adj[v]:
                        if u != parent[v]:
                            val += table[u][sv][0]
                    if best is None or val < best[0]:
                        best = (val, sv)
                table[v][sp] = best
        total += table[root][None][0]
        spin = {root: table[root][None][1]}
        for v in order[1:]:
            spin[v] = table[v][spin[parent[v]]][1]
        for v, s in spin.items():
            config[v] = s
    return total, config


def chimera_edge_oracle(rows, cols, k):
    """Spell out the Chimera edge set straight from the labeling rule."""
    def nid(r, c, half, idx):
        return ((r * cols + c) * 2 + half) * k + idx

    edges = set()
    for r in range(rows):
        for c in range(cols):
            for a in range(k):
                for b in range(k):
                    edges.add((nid(r, c, 0, a), nid(r, c, 1, b)))
            for a in range(k):
                if r + 1 < rows:
                    edges.add((nid(r, c, 0, a), nid(r + 1, c, 0, a)))
                if c + 1 < cols:
                    edges.add((nid(r, c, 1, a), nid(r, c + 1, 1, a)))
    return {(min(i, j), max(i, j)) for i, j in edges}


@pytest.fixture
def rng():
    return np.random.default_rng(20260823)
