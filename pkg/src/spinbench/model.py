"""Core Ising/QUBO data model.

An Ising model is a sparse graph with a coupling J_ij on each edge (i < j)
and a field h_i on each node; configurations assign each node a spin in
{-1, +1}.  Energy is

    E(sigma) = sum_{(i,j)} J_ij sigma_i sigma_j + sum_i h_i sigma_i

accumulated in a fixed order (canonically sorted edges, then nodes) so
repeated evaluations are bit-identical.  A partial configuration marks
unassigned nodes with 0; zero spins contribute nothing to the energy.
"""

from __future__ import annotations

import numpy as np

__all__ = [
    "IsingModel",
    "BoolModel",
    "ContractViolation",
    "as_spins",
    "as_gauge",
    "energy",
    "partial_energy",
    "interaction_lower_bound",
    "is_frustrated",
    "gauge_transform",
    "apply_gauge",
    "to_boolean",
    "to_ising",
    "spins_to_bool",
    "bool_to_spins",
    "hamming_distance",
]


class ContractViolation(ValueError):
    """An argument breaks a documented precondition."""


def _canonical_edges(node_count, edges):
    """Normalize edge input to sorted (i, j) with i < j plus weights."""
    head, tail, weight = [], [], []
    for i, j, w in edges:
        i, j = int(i), int(j)
        if i == j:
            raise ContractViolation(f"self-loop on node {i}")
        if not (0 <= i < node_count and 0 <= j < node_count):
            raise ContractViolation(f"edge ({i},{j}) outside [0,{node_count})")
        if i > j:
            i, j = j, i
        head.append(i)
        tail.append(j)
        weight.append(float(w))
    head = np.asarray(head, dtype=np.int32)
    tail = np.asarray(tail, dtype=np.int32)
    weight = np.asarray(weight, dtype=np.float64)
    order = np.lexsort((tail, head))
    head, tail, weight = head[order], tail[order], weight[order]
    if head.size > 1:
        same = (head[:-1] == head[1:]) & (tail[:-1] == tail[1:])
        if same.any():
            k = int(np.flatnonzero(same)[0])
            raise ContractViolation(f"duplicate edge ({head[k]},{tail[k]})")
    return head, tail, weight


def _field_array(node_count, fields):
    h = np.zeros(node_count, dtype=np.float64)
    if fields is None:
        return h
    if isinstance(fields, dict):
        for i, v in fields.items():
            i = int(i)
            if not 0 <= i < node_count:
                raise ContractViolation(f"field on node {i} outside [0,{node_count})")
            h[i] = float(v)
        return h
    arr = np.asarray(fields, dtype=np.float64)
    if arr.shape != (node_count,):
        raise ContractViolation(f"field array shape {arr.shape} != ({node_count},)")
    return arr.copy()


class IsingModel:
    """Sparse Ising model over dense node indices 0..N-1.

    Parameters
    ----------
    node_count : int
        Number of spins, N >= 1.
    edges : iterable of (i, j, J_ij)
        Couplings; endpoints are canonicalized to i < j and sorted.
        Duplicate edges and self-loops are rejected.
    fields : dict node -> h, array of length N, or None
    metadata : dict, optional
        Free-form provenance (generator name, seed, variable labels, ...).

    Instances are immutable; the arrays are read-only views.
    """

    __slots__ = ("node_count", "edge_head", "edge_tail", "coupling", "field",
                 "metadata", "_adjacency")

    def __init__(self, node_count, edges=(), fields=None, metadata=None):
        node_count = int(node_count)
        if node_count < 1:
            raise ContractViolation(f"node_count must be >= 1, got {node_count}")
        object.__setattr__(self, "node_count", node_count)
        head, tail, weight = _canonical_edges(node_count, edges)
        object.__setattr__(self, "edge_head", head)
        object.__setattr__(self, "edge_tail", tail)
        object.__setattr__(self, "coupling", weight)
        object.__setattr__(self, "field", _field_array(node_count, fields))
        object.__setattr__(self, "metadata", dict(metadata) if metadata else {})
        object.__setattr__(self, "_adjacency", None)
        for arr in (self.edge_head, self.edge_tail, self.coupling, self.field):
            arr.flags.writeable = False

    def __setattr__(self, name, value):
        raise AttributeError("IsingModel is immutable")

    @property
    def edge_count(self):
        return int(self.coupling.size)

    def edge_list(self):
        """Edges as a list of (i, j, J_ij) tuples in canonical order."""
        return [(int(i), int(j), float(w))
                for i, j, w in zip(self.edge_head, self.edge_tail, self.coupling)]

    def field_dict(self):
        """Nonzero fields as {node: h}."""
        nz = np.flatnonzero(self.field)
        return {int(i): float(self.field[i]) for i in nz}

    def adjacency(self):
        """Per-node list of (neighbor, edge_index), cached."""
        if self._adjacency is None:
            adj = [[] for _ in range(self.node_count)]
            for e, (i, j) in enumerate(zip(self.edge_head, self.edge_tail)):
                adj[int(i)].append((int(j), e))
                adj[int(j)].append((int(i), e))
            object.__setattr__(self, "_adjacency", adj)
        return self._adjacency

    def replace(self, coupling=None, field=None, metadata=None):
        """Copy with substituted coupling/field arrays (same graph)."""
        edges = zip(self.edge_head, self.edge_tail,
                    self.coupling if coupling is None else coupling)
        return IsingModel(self.node_count, edges,
                          self.field if field is None else field,
                          self.metadata if metadata is None else metadata)

    def structurally_equal(self, other):
        return (self.node_count == other.node_count
                and np.array_equal(self.edge_head, other.edge_head)
                and np.array_equal(self.edge_tail, other.edge_tail)
                and np.array_equal(self.coupling, other.coupling)
                and np.array_equal(self.field, other.field))

    def __repr__(self):
        return (f"IsingModel(N={self.node_count}, edges={self.edge_count}, "
                f"fields={int(np.count_nonzero(self.field))})")


class BoolModel:
    """QUBO twin of :class:`IsingModel`: minimize sum c_ij x_i x_j + sum c_i x_i + c
    over x in {0,1}^N.  Same graph-shape invariants as the Ising form."""

    __slots__ = ("node_count", "edge_head", "edge_tail", "quadratic", "linear",
                 "offset", "metadata")

    def __init__(self, node_count, quadratic=(), linear=None, offset=0.0,
                 metadata=None):
        node_count = int(node_count)
        if node_count < 1:
            raise ContractViolation(f"node_count must be >= 1, got {node_count}")
        object.__setattr__(self, "node_count", node_count)
        head, tail, weight = _canonical_edges(node_count, quadratic)
        object.__setattr__(self, "edge_head", head)
        object.__setattr__(self, "edge_tail", tail)
        object.__setattr__(self, "quadratic", weight)
        object.__setattr__(self, "linear", _field_array(node_count, linear))
        object.__setattr__(self, "offset", float(offset))
        object.__setattr__(self, "metadata", dict(metadata) if metadata else {})
        for arr in (self.edge_head, self.edge_tail, self.quadratic, self.linear):
            arr.flags.writeable = False

    def __setattr__(self, name, value):
        raise AttributeError("BoolModel is immutable")

    @property
    def edge_count(self):
        return int(self.quadratic.size)

    def objective(self, x):
        """Boolean objective at x in {0,1}^N, including the constant offset."""
        x = np.asarray(x, dtype=np.float64)
        if x.shape != (self.node_count,):
            raise ContractViolation(f"assignment length {x.shape} != {self.node_count}")
        quad = np.sum(self.quadratic * x[self.edge_head] * x[self.edge_tail])
        return float(quad + np.sum(self.linear * x) + self.offset)

    def __repr__(self):
        return (f"BoolModel(N={self.node_count}, quadratic={self.edge_count}, "
                f"offset={self.offset})")


def as_spins(values, node_count=None, allow_zero=False):
    """Validate and convert a spin configuration to an int8 array.

    Values must lie in {-1, +1}; with ``allow_zero`` the 0 sentinel marks
    unassigned nodes (partial configurations used during greedy construction).
    """
    s = np.asarray(values)
    if s.ndim != 1:
        raise ContractViolation(f"configuration must be 1-D, got shape {s.shape}")
    s = s.astype(np.int8, copy=True)
    if node_count is not None and s.size != node_count:
        raise ContractViolation(f"configuration length {s.size} != {node_count}")
    allowed = (s == 1) | (s == -1)
    if allow_zero:
        allowed |= s == 0
    if not allowed.all():
        bad = int(np.flatnonzero(~allowed)[0])
        raise ContractViolation(f"spin value {s[bad]} at node {bad}")
    return s


def as_gauge(values, node_count=None):
    """Validate a gauge vector: length-N array of signs in {-1, +1}."""
    g = as_spins(values, node_count, allow_zero=False)
    return g


def energy(model, config):
    """Exact Ising energy of a fully assigned configuration.

    Accumulation order is fixed (canonical edges, then nodes), so the same
    (model, config) pair always produces the same double.
    """
    s = as_spins(config, model.node_count, allow_zero=False)
    return _energy_values(model, s)


def partial_energy(model, config):
    """Energy of a partial configuration; unassigned (0) spins contribute 0."""
    s = as_spins(config, model.node_count, allow_zero=True)
    return _energy_values(model, s)


def _energy_values(model, s):
    sf = s.astype(np.float64)
    edge_terms = model.coupling * sf[model.edge_head] * sf[model.edge_tail]
    node_terms = model.field * sf
    return float(np.sum(edge_terms) + np.sum(node_terms))


def interaction_lower_bound(model):
    """sum -|J_ij| - sum |h_i|: the energy every term would reach at its
    individual minimum.  Attained iff the model is unfrustrated."""
    return float(-np.sum(np.abs(model.coupling)) - np.sum(np.abs(model.field)))


def is_frustrated(model, optimum):
    """True iff a certified ground state misses the per-term lower bound."""
    return energy(model, optimum) > interaction_lower_bound(model)


def gauge_transform(model, gauge):
    """Sign-flip change of variables: J'_ij = J_ij g_i g_j, h'_i = h_i g_i.

    Energies satisfy E'(g * sigma) = E(sigma), so optima map through the
    gauge.  The composed gauge is tracked in ``metadata["gauge"]``; applying
    the same gauge twice removes the record, making the transform involutive.
    """
    g = as_gauge(gauge, model.node_count)
    gf = g.astype(np.float64)
    coupling = model.coupling * gf[model.edge_head] * gf[model.edge_tail]
    field = model.field * gf
    meta = dict(model.metadata)
    prior = meta.get("gauge")
    composed = g if prior is None else as_gauge(prior, model.node_count) * g
    if np.all(composed == 1):
        meta.pop("gauge", None)
    else:
        meta["gauge"] = [int(v) for v in composed]
    return model.replace(coupling=coupling, field=field, metadata=meta)


def apply_gauge(config, gauge):
    """Map a configuration through a gauge: (g * sigma)_i = g_i sigma_i."""
    s = np.asarray(config, dtype=np.int8)
    g = as_gauge(gauge, s.size)
    return (s * g).astype(np.int8)


def to_boolean(model):
    """Ising -> QUBO under sigma_i = 2 x_i - 1.

    The boolean objective (including its constant) equals the Ising energy
    at the mapped configuration.
    """
    j = model.coupling
    quad = 4.0 * j
    linear = 2.0 * model.field.copy()
    np.subtract.at(linear, model.edge_head, 2.0 * j)
    np.subtract.at(linear, model.edge_tail, 2.0 * j)
    offset = float(np.sum(j) - np.sum(model.field))
    quadratic = zip(model.edge_head, model.edge_tail, quad)
    return BoolModel(model.node_count, quadratic, linear, offset,
                     metadata=dict(model.metadata))


def to_ising(model):
    """QUBO -> Ising under x_i = (sigma_i + 1)/2.

    Returns ``(ising, offset)`` with ``bool.objective(x) = energy(ising, sigma)
    + offset`` for corresponding assignments.
    """
    q = model.quadratic
    coupling = q / 4.0
    field = model.linear / 2.0
    field = field.copy()
    np.add.at(field, model.edge_head, q / 4.0)
    np.add.at(field, model.edge_tail, q / 4.0)
    offset = float(model.offset + np.sum(q) / 4.0 + np.sum(model.linear) / 2.0)
    edges = zip(model.edge_head, model.edge_tail, coupling)
    ising = IsingModel(model.node_count, edges, field,
                       metadata=dict(model.metadata))
    return ising, offset


def spins_to_bool(config):
    """sigma in {-1,+1} -> x in {0,1} via x = (sigma + 1)/2."""
    s = as_spins(config)
    return ((s + 1) // 2).astype(np.int8)


def bool_to_spins(x):
    """x in {0,1} -> sigma in {-1,+1} via sigma = 2x - 1."""
    x = np.asarray(x, dtype=np.int8)
    if not np.isin(x, (0, 1)).all():
        raise ContractViolation("boolean assignment must be 0/1")
    return (2 * x - 1).astype(np.int8)


def hamming_distance(a, b):
    """Number of positions where two fully assigned configurations differ."""
    sa = as_spins(a)
    sb = as_spins(b)
    if sa.size != sb.size:
        raise ContractViolation(f"length mismatch {sa.size} != {sb.size}")
    return int(np.count_nonzero(sa != sb))
