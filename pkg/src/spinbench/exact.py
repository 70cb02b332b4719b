"""Complete search: brute force, branch-and-bound, and LP-file export.

The enumeration kernel fixes a bit convention shared with the annealing
simulator: configuration mask bit i = 0 means sigma_i = +1, bit i = 1 means
sigma_i = -1, node i on the i-th least significant bit.  Row-wise sums are
arranged to reproduce :func:`spinbench.model.energy` bit-for-bit.

Branch-and-bound prunes with the frustration inequality applied to the
boundary-conditioned subproblem: every undecided node contributes
-|h_i + sum over assigned neighbors J_ij sigma_j| and every edge between
two undecided nodes contributes -|J_ij|.  The bound is admissible, reaches
the optimum exactly on unfrustrated models (zero backtracks), and prunes
with a 1e-12 safety margin so float reassociation cannot discard a strictly
better completion.

With a block partition (``blocks``), untouched blocks swap their per-term
slack for the exact minimum of their induced submodel.  Small blocks keep
that minimum conditioned: each assignment folds into the neighboring
block's effective fields and the block minimum is recomputed from a
precomputed sign table, so decided spins exert pressure on cells the
search has not entered yet.  On cell-structured graphs this absorbs all
intra-cell frustration and all decided-to-undecided coupler slack into
the bound.

A dominance table cuts repeated work: the subproblem left after d
assignments depends only on the assigned spins that still touch unassigned
nodes, so a revisit of that boundary pattern with no better prefix energy
cannot beat what the first visit already recorded.  On bounded-frontier
orders this caps the tree near the underlying dynamic-programming state
count instead of the naive exponential.
"""

from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np

from .chimera import ChimeraTopology, TopologyError
from .model import ContractViolation, IsingModel, as_spins, energy

__all__ = ["Certificate", "brute_force", "branch_and_bound", "certify",
           "all_energies", "mask_to_spins", "spins_to_mask",
           "blocks_from_metadata", "export_ilp", "export_iqp"]

BRUTE_FORCE_CAP = 24
_PRUNE_EPS = 1e-12


@dataclass
class Certificate:
    """Proof object for an optimization run.

    ``optimal_configs`` holds every optimum when produced by brute force,
    and at least one when produced by branch-and-bound.  ``proof_complete``
    is False when a time budget expired before the search tree was
    exhausted; the energy is then only an incumbent value.
    """

    optimal_energy: float
    optimal_configs: list
    method: str
    proof_complete: bool
    nodes_explored: int = 0
    backtracks: int = 0


def mask_to_spins(mask, node_count):
    """Mask -> spin vector under the fixed bit convention."""
    bits = (int(mask) >> np.arange(node_count, dtype=np.uint64)) & 1
    return (1 - 2 * bits).astype(np.int8)


def spins_to_mask(config):
    """Spin vector -> mask; inverse of :func:`mask_to_spins`."""
    s = as_spins(config)
    return int(np.sum((s < 0).astype(np.uint64) << np.arange(s.size, dtype=np.uint64)))


def all_energies(model, chunk=1 << 15):
    """Energies of all 2^N configurations, indexed by mask.

    Entries agree with ``energy(model, mask_to_spins(mask, N))`` up to
    floating point reassociation (the chunked reduction does not promise
    the scalar accumulation order).  Callers that need canonical values,
    e.g. to resolve exact ties, must re-evaluate through
    :func:`spinbench.model.energy`.
    """
    n = model.node_count
    if n > BRUTE_FORCE_CAP:
        raise ContractViolation(f"enumeration capped at N={BRUTE_FORCE_CAP}, got {n}")
    total = 1 << n
    out = np.empty(total, dtype=np.float64)
    shifts = np.arange(n, dtype=np.uint64)
    head, tail = model.edge_head, model.edge_tail
    coupling, field = model.coupling, model.field
    for start in range(0, total, chunk):
        masks = np.arange(start, min(start + chunk, total), dtype=np.uint64)
        bits = (masks[:, None] >> shifts[None, :]) & 1
        spins = 1.0 - 2.0 * bits
        edge_terms = coupling[None, :] * spins[:, head] * spins[:, tail] \
            if head.size else np.zeros((masks.size, 0))
        node_terms = field[None, :] * spins
        out[start:start + masks.size] = \
            np.sum(edge_terms, axis=1) + np.sum(node_terms, axis=1)
    return out


def brute_force(model):
    """Enumerate all configurations; returns the complete optimal set."""
    n = model.node_count
    if n > BRUTE_FORCE_CAP:
        raise ContractViolation(f"brute force capped at N={BRUTE_FORCE_CAP}, got {n}")
    energies = all_energies(model)
    # the table is only ULP-accurate; re-evaluate a window around its
    # minimum canonically so the optimal set is resolved bit-for-bit
    near = np.flatnonzero(energies <= np.min(energies) + 1e-9)
    canon = np.array([energy(model, mask_to_spins(int(m), n)) for m in near])
    best = float(np.min(canon))
    configs = [mask_to_spins(int(m), n) for m in near[canon == best]]
    return Certificate(optimal_energy=best, optimal_configs=configs,
                       method="brute_force", proof_complete=True,
                       nodes_explored=int(energies.size))


def _visit_order(model, order):
    n = model.node_count
    if order == "locality":
        return list(range(n))
    if order == "influence":
        weight = np.abs(model.field).copy()
        np.add.at(weight, model.edge_head, np.abs(model.coupling))
        np.add.at(weight, model.edge_tail, np.abs(model.coupling))
        return list(np.argsort(-weight, kind="stable"))
    raise ContractViolation(f"unknown branch order {order!r}")


def _block_partition(model, blocks):
    """Validate a block cover and precompute exact per-block floors."""
    n = model.node_count
    node_block = [-1] * n
    members = []
    for b, block in enumerate(blocks):
        block = [int(v) for v in block]
        for v in block:
            if not 0 <= v < n:
                raise ContractViolation(f"block node {v} out of range")
            if node_block[v] != -1:
                raise ContractViolation(f"node {v} appears in two blocks")
            node_block[v] = b
        if len(block) > 20:
            raise ContractViolation(
                f"block of {len(block)} nodes too large to enumerate")
        members.append(block)

    head, tail, coupling = model.edge_head, model.edge_tail, model.coupling
    intra = [[] for _ in blocks]
    cross_abs = 0.0
    for i, j, w in zip(head, tail, coupling):
        i, j, w = int(i), int(j), float(w)
        b = node_block[i]
        if b != -1 and b == node_block[j]:
            intra[b].append((i, j, w))
        else:
            cross_abs += abs(w)

    floors = []
    for block, edges in zip(members, intra):
        pos = {v: k for k, v in enumerate(block)}
        sub = IsingModel(len(block),
                         [(pos[i], pos[j], w) for i, j, w in edges],
                         [float(model.field[v]) for v in block])
        floors.append(float(np.min(all_energies(sub))))
    intra_abs = [sum(abs(w) for _, _, w in edges) for edges in intra]
    return node_block, members, floors, intra_abs, cross_abs, intra


_MEMO_CAP = 1 << 21


def branch_and_bound(model, time_limit, order="locality", warm_start=None,
                     blocks=None):
    """Depth-first exact search under a wall-time budget.

    ``order`` picks the variable sequence: "locality" visits nodes in index
    order (on Chimera ids this walks cell by cell, keeping the conditioning
    frontier small), "influence" visits by descending |h_i| + sum |J_ij|.
    ``warm_start`` seeds the incumbent with a known configuration.
    ``blocks`` optionally partitions (a subset of) the nodes into groups of
    at most 20, e.g. :meth:`ChimeraTopology.cell_blocks`; the bound then
    charges each untouched group its exact internal minimum instead of a
    term-by-term relaxation.
    """
    if time_limit <= 0:
        raise ContractViolation(f"time_limit must be positive, got {time_limit}")
    n = model.node_count
    deadline = time.monotonic() + time_limit
    visit = _visit_order(model, order)

    nbrs = [[] for _ in range(n)]
    for i, j, w in zip(model.edge_head, model.edge_tail, model.coupling):
        w = float(w)
        nbrs[int(i)].append((int(j), w, abs(w)))
        nbrs[int(j)].append((int(i), w, abs(w)))

    # depth d leaves a subproblem determined by the assigned spins that
    # still have unassigned neighbors; equal patterns dominate by prefix
    rank = {v: d for d, v in enumerate(visit)}
    last_rank = [max((rank[u] for u, _, _ in nbrs[v]), default=-1)
                 for v in range(n)]
    boundary = [tuple(u for u in visit[:d] if last_rank[u] >= d)
                for d in range(n)]
    memo = [dict() for _ in range(n)]
    memo_room = _MEMO_CAP

    if blocks is None:
        node_block = [-1] * n
        block_members, block_floor, block_intra_abs = [], [], []
        block_intra = []
        slack_edges = float(np.sum(np.abs(model.coupling)))
        slack_nodes = float(np.sum(np.abs(model.field)))
    else:
        (node_block, block_members, block_floor,
         block_intra_abs, slack_edges, block_intra) = \
            _block_partition(model, blocks)
        # uncovered nodes start on per-term accounting
        slack_nodes = sum(abs(float(model.field[v]))
                          for v in range(n) if node_block[v] == -1)
    touched_block = [False] * len(block_members)

    # blocks small enough for a sign table get conditioned floors: the
    # block minimum is re-solved against current effective fields every
    # time a decided neighbor pushes on one of its members
    block_vec = [None] * len(block_members)
    for b, mem in enumerate(block_members):
        m = len(mem)
        if m > 12:
            continue
        pos = {u: k for k, u in enumerate(mem)}
        signs = 1.0 - 2.0 * ((np.arange(1 << m)[:, None] >> np.arange(m)) & 1)
        evec = np.zeros(1 << m)
        for i, j, w in block_intra[b]:
            evec += w * signs[:, pos[i]] * signs[:, pos[j]]
        block_vec[b] = (evec, signs, mem)
    cfloor = list(block_floor)
    cfloor_sum = sum(cfloor)

    sigma = [0] * n
    cond = [float(h) for h in model.field]
    dcross = [0.0] * n
    e_assigned = 0.0

    best_energy = np.inf
    best_config = None
    if warm_start is not None:
        s = as_spins(warm_start, n)
        best_energy = energy(model, s)
        best_config = s.copy()

    nodes_explored = 0
    backtracks = 0
    proof_complete = True

    def new_frame(depth):
        v = visit[depth]
        first = -1 if cond[v] > 0.0 else 1
        return [v, (first, -first), 0, None]

    frames = [new_frame(0)]
    while frames:
        frame = frames[-1]
        v, values, idx, saved = frame
        if saved is not None:
            # undo the previous assignment of v before trying the next value
            (e_assigned, slack_nodes, slack_edges, cfloor_sum,
             cond_v, touched, touched_b, dirty) = saved
            cond[v] = cond_v
            for u, old_c, old_d in touched:
                cond[u] = old_c
                dcross[u] = old_d
            for b, old_f in dirty:
                cfloor[b] = old_f
            if touched_b != -1:
                touched_block[touched_b] = False
            sigma[v] = 0
            frame[3] = None
        if idx == 2:
            frames.pop()
            continue
        s = values[idx]
        frame[2] = idx + 1

        nodes_explored += 1
        if nodes_explored % 8192 == 0 and time.monotonic() > deadline:
            proof_complete = False
            break

        cv = cond[v]
        touched = []
        dirty = []
        saved = (e_assigned, slack_nodes, slack_edges, cfloor_sum,
                 cv, touched, -1, dirty)

        bv = node_block[v]
        if bv != -1 and not touched_block[bv]:
            # first decision inside this block: trade the conditioned
            # floor for per-term slack on its still-undecided contents
            touched_block[bv] = True
            cfloor_sum -= cfloor[bv]
            slack_edges += block_intra_abs[bv]
            for u in block_members[bv]:
                slack_nodes += abs(cond[u])
                slack_edges -= dcross[u]
            saved = saved[:6] + (bv, dirty)

        e_assigned += cv * s
        slack_nodes -= abs(cv)
        dirty_ids = None
        for u, w, aw in nbrs[v]:
            if sigma[u] == 0:
                old_c = cond[u]
                touched.append((u, old_c, dcross[u]))
                cond[u] = old_c + w * s
                bu = node_block[u]
                if bu == -1 or touched_block[bu]:
                    slack_edges -= aw
                    slack_nodes += abs(cond[u]) - abs(old_c)
                elif block_vec[bu] is not None:
                    # conditioned floor absorbs the decided side of the edge
                    slack_edges -= aw
                    if dirty_ids is None:
                        dirty_ids = [bu]
                    elif bu not in dirty_ids:
                        dirty_ids.append(bu)
                else:
                    # edge keeps its -|w| slack until u's block is touched
                    dcross[u] += aw
        if dirty_ids is not None:
            for b in dirty_ids:
                evec, signs, mem = block_vec[b]
                cvec = np.array([cond[u] for u in mem])
                new_f = float(np.min(evec + signs @ cvec))
                dirty.append((b, cfloor[b]))
                cfloor_sum += new_f - cfloor[b]
                cfloor[b] = new_f
        sigma[v] = s
        frame[3] = saved

        if e_assigned - slack_nodes - slack_edges + cfloor_sum \
                >= best_energy - _PRUNE_EPS:
            continue
        if idx == 1:
            backtracks += 1  # the non-preferred value survived the bound
        if len(frames) == n:
            config = np.asarray(sigma, dtype=np.int8)
            leaf = energy(model, config)
            if leaf < best_energy:
                best_energy = leaf
                best_config = config
            continue
        depth = len(frames)
        key = 0
        for bit, u in enumerate(boundary[depth]):
            if sigma[u] < 0:
                key |= 1 << bit
        table = memo[depth]
        seen = table.get(key)
        if seen is not None:
            if seen <= e_assigned:
                continue
            table[key] = e_assigned
        elif memo_room > 0:
            table[key] = e_assigned
            memo_room -= 1
        frames.append(new_frame(depth))

    configs = [] if best_config is None else [best_config]
    return Certificate(optimal_energy=float(best_energy), optimal_configs=configs,
                       method="branch_and_bound", proof_complete=proof_complete,
                       nodes_explored=nodes_explored, backtracks=backtracks)


def blocks_from_metadata(model):
    """Recover the cell partition recorded by the generators, if any.

    Returns dense-index cell blocks when the model's metadata names a
    topology whose surviving nodes match the model size, else None.
    """
    spec = (model.metadata or {}).get("topology")
    if not isinstance(spec, dict):
        return None
    try:
        topo = ChimeraTopology(spec["rows"], spec["cols"], spec["cell_size"],
                               spec.get("omitted_nodes", ()),
                               [tuple(e) for e in spec.get("omitted_edges", ())])
    except (KeyError, TypeError, TopologyError):
        return None
    if topo.node_count != model.node_count:
        return None
    return topo.cell_blocks()


def certify(model, sidecar, time_limit=60.0, warm_start=None, blocks=None):
    """Prove an instance's optimum and record it on the ground-truth sidecar.

    Uses brute force when the instance fits under its cap, otherwise
    branch-and-bound (warm-started from the planted configuration by
    default, with cell blocks recovered from the instance metadata when
    present).  The sidecar is updated only on a complete proof.
    """
    if model.node_count <= 20:
        cert = brute_force(model)
    else:
        if warm_start is None and sidecar is not None:
            warm_start = sidecar.planted_config
        if blocks is None:
            blocks = blocks_from_metadata(model)
        cert = branch_and_bound(model, time_limit, warm_start=warm_start,
                                blocks=blocks)
    if sidecar is not None and cert.proof_complete:
        sidecar.certified = True
        sidecar.certified_energy = cert.optimal_energy
        sidecar.certified_optima = [c.copy() for c in cert.optimal_configs]
    return cert


def _coeff(value):
    text = repr(float(value))
    return text[:-2] if text.endswith(".0") else text


def _objective_terms(pairs):
    """[(coeff, name)] -> LP objective string with explicit signs."""
    parts = []
    for coeff, name in pairs:
        if coeff == 0.0:
            continue
        sign = "-" if coeff < 0 else "+"
        parts.append(f"{sign} {_coeff(abs(coeff))} {name}")
    if not parts:
        return "0 x_0"
    text = " ".join(parts)
    return text[2:] if text.startswith("+ ") else text


def export_ilp(model, path):
    """Write the linearized boolean model as a CPLEX-dialect LP file.

    One binary x_i per node and one binary x_i_j per edge, with the three
    standard product constraints per edge.  The constant offset cannot be
    expressed in LP objectives, so it rides in a leading comment.
    """
    lines = ["\\ binary quadratic program, linearized product formulation",
             f"\\ constant offset: {_coeff(model.offset)}",
             "Minimize"]
    terms = [(float(c), f"x_{i}") for i, c in enumerate(model.linear)]
    terms += [(float(w), f"x_{i}_{j}")
              for i, j, w in zip(model.edge_head, model.edge_tail, model.quadratic)]
    lines.append(" obj: " + _objective_terms(terms))
    lines.append("Subject To")
    k = 0
    for i, j in zip(model.edge_head, model.edge_tail):
        pair = f"x_{i}_{j}"
        lines.append(f" c{k}: {pair} - x_{i} - x_{j} >= -1")
        lines.append(f" c{k + 1}: {pair} - x_{i} <= 0")
        lines.append(f" c{k + 2}: {pair} - x_{j} <= 0")
        k += 3
    lines.append("Binary")
    names = [f"x_{i}" for i in range(model.node_count)]
    names += [f"x_{i}_{j}" for i, j in zip(model.edge_head, model.edge_tail)]
    lines.extend(" " + " ".join(names[p:p + 8]) for p in range(0, len(names), 8))
    lines.append("End")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")


def export_iqp(model, path):
    """Write the boolean model with its quadratic objective kept intact.

    Uses the LP-dialect quadratic section ``[ ... ] / 2``; bracketed
    coefficients are doubled so the halved sum restores them.
    """
    lines = ["\\ binary quadratic program, direct quadratic objective",
             f"\\ constant offset: {_coeff(model.offset)}",
             "Minimize"]
    linear = _objective_terms([(float(c), f"x_{i}") for i, c in enumerate(model.linear)])
    quad = _objective_terms(
        [(2.0 * float(w), f"x_{i} * x_{j}")
         for i, j, w in zip(model.edge_head, model.edge_tail, model.quadratic)])
    if any(model.quadratic):
        lines.append(f" obj: {linear} + [ {quad} ] / 2")
    else:
        lines.append(" obj: " + linear)
    lines.append("Subject To")
    lines.append("Binary")
    names = [f"x_{i}" for i in range(model.node_count)]
    lines.extend(" " + " ".join(names[p:p + 8]) for p in range(0, len(names), 8))
    lines.append("End")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")
