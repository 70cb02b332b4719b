"""File formats: instance JSON, ground-truth sidecar, solver trajectories.

The instance format is a flat JSON object:

    {"variable_ids": [...], "linear_terms": [{"id", "coeff"}, ...],
     "quadratic_terms": [{"id_head", "id_tail", "coeff"}, ...],
     "variable_domain": "spin" | "boolean", "offset": 0.0, "metadata": {...}}

``variable_ids`` is sorted and may be sparse (hardware labels); in-memory
models are always dense, so save/load maps through the id table.  Numbers
round-trip at full double precision (repr-style JSON floats).

Spin configurations in sidecars and trajectories are run-length encoded as
a sign-count string: "+5-3" means five +1 followed by three -1.  A count of
1 may be written bare ("+-+" decodes as three alternating spins).
"""

from __future__ import annotations

import json
import re

import numpy as np

from .model import BoolModel, ContractViolation, IsingModel, as_spins
from .generators import GroundTruthSidecar

__all__ = ["save_instance", "load_instance", "save_sidecar", "load_sidecar",
           "encode_spins", "decode_spins", "save_trajectory", "load_trajectory",
           "truth_path_for"]

_RLE_TOKEN = re.compile(r"([+-])(\d*)")


def encode_spins(config):
    """Spin vector -> sign-count run string, e.g. [1,1,1,-1] -> '+3-1'."""
    spins = as_spins(config)
    out = []
    i = 0
    n = spins.shape[0]
    while i < n:
        j = i
        while j < n and spins[j] == spins[i]:
            j += 1
        out.append(("+" if spins[i] > 0 else "-") + str(j - i))
        i = j
    return "".join(out)


def decode_spins(text, expect_length=None):
    """Inverse of :func:`encode_spins`; bare signs mean a run of one."""
    if not isinstance(text, str) or (text and not _RLE_TOKEN.match(text)):
        raise ContractViolation(f"bad run-length spin string {text!r}")
    consumed = 0
    runs = []
    for m in _RLE_TOKEN.finditer(text):
        if m.start() != consumed:
            raise ContractViolation(f"bad run-length spin string {text!r}")
        consumed = m.end()
        count = int(m.group(2)) if m.group(2) else 1
        runs.append((1 if m.group(1) == "+" else -1, count))
    if consumed != len(text):
        raise ContractViolation(f"bad run-length spin string {text!r}")
    spins = np.concatenate([np.full(c, s, dtype=np.int8) for s, c in runs]) \
        if runs else np.zeros(0, dtype=np.int8)
    if expect_length is not None and spins.shape[0] != expect_length:
        raise ContractViolation(
            f"run-length string decodes to {spins.shape[0]} spins, expected {expect_length}")
    return spins


def save_instance(model, path):
    """Write an IsingModel (or BoolModel) as canonical instance JSON."""
    if isinstance(model, BoolModel):
        payload = _bool_payload(model)
    else:
        payload = _spin_payload(model)
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=1)
        fh.write("\n")


def _spin_payload(model):
    labels = model.metadata.get("variable_labels") or list(range(model.node_count))
    if len(labels) != model.node_count:
        raise ContractViolation("variable_labels length mismatch")
    lab = [int(v) for v in labels]
    if sorted(set(lab)) != sorted(lab):
        raise ContractViolation("duplicate variable labels")

    quad = []
    for i, j, w in zip(model.edge_head, model.edge_tail, model.coupling):
        a, b = lab[int(i)], lab[int(j)]
        if a > b:
            a, b = b, a
        quad.append({"id_head": a, "id_tail": b, "coeff": float(w)})
    quad.sort(key=lambda d: (d["id_head"], d["id_tail"]))
    lin = sorted(({"id": lab[i], "coeff": float(h)}
                  for i, h in enumerate(model.field) if h != 0.0),
                 key=lambda d: d["id"])
    meta = {k: v for k, v in model.metadata.items() if k != "variable_labels"}
    return {
        "variable_ids": sorted(lab),
        "linear_terms": lin,
        "quadratic_terms": quad,
        "variable_domain": "spin",
        "offset": 0.0,
        "metadata": _jsonable(meta),
    }


def _bool_payload(model):
    n = model.node_count
    quad = sorted(({"id_head": int(i), "id_tail": int(j), "coeff": float(w)}
                   for i, j, w in zip(model.edge_head, model.edge_tail,
                                      model.quadratic)),
                  key=lambda d: (d["id_head"], d["id_tail"]))
    lin = sorted(({"id": int(i), "coeff": float(c)}
                  for i, c in enumerate(model.linear) if c != 0.0),
                 key=lambda d: d["id"])
    return {
        "variable_ids": list(range(n)),
        "linear_terms": lin,
        "quadratic_terms": quad,
        "variable_domain": "boolean",
        "offset": float(model.offset),
        "metadata": _jsonable(dict(model.metadata)),
    }


def load_instance(path):
    """Read instance JSON; returns IsingModel or BoolModel by domain."""
    with open(path, encoding="utf-8") as fh:
        payload = json.load(fh)
    for key in ("variable_ids", "linear_terms", "quadratic_terms", "variable_domain"):
        if key not in payload:
            raise ContractViolation(f"instance file missing {key!r}")
    ids = payload["variable_ids"]
    if ids != sorted(ids) or len(set(ids)) != len(ids):
        raise ContractViolation("variable_ids must be sorted and unique")
    index = {v: k for k, v in enumerate(ids)}
    n = len(ids)
    domain = payload["variable_domain"]
    offset = float(payload.get("offset", 0.0))
    meta = dict(payload.get("metadata", {}))

    linear = np.zeros(n, dtype=np.float64)
    for term in payload["linear_terms"]:
        try:
            linear[index[term["id"]]] += float(term["coeff"])
        except KeyError as exc:
            raise ContractViolation(f"linear term references unknown id {term.get('id')}") from exc
    edges = []
    for term in payload["quadratic_terms"]:
        try:
            a, b = index[term["id_head"]], index[term["id_tail"]]
        except KeyError as exc:
            raise ContractViolation("quadratic term references unknown id") from exc
        if term["id_head"] >= term["id_tail"]:
            raise ContractViolation("quadratic terms must have id_head < id_tail")
        edges.append((a, b, float(term["coeff"])))

    if domain == "spin":
        if offset != 0.0:
            meta["offset"] = offset
        meta["variable_labels"] = list(ids)
        return IsingModel(n, edges, linear, metadata=meta)
    if domain == "boolean":
        meta["variable_labels"] = list(ids)
        return BoolModel(n, edges, linear, offset, metadata=meta)
    raise ContractViolation(f"unknown variable_domain {domain!r}")


def truth_path_for(instance_path):
    text = str(instance_path)
    return (text[:-5] if text.endswith(".json") else text) + ".truth.json"


def save_sidecar(sidecar, path):
    payload = {
        "planted_config": encode_spins(sidecar.planted_config),
        "gauge": encode_spins(sidecar.gauge),
        "certified": bool(sidecar.certified),
        "degenerate": bool(sidecar.degenerate),
    }
    if sidecar.certified_energy is not None:
        payload["certified_energy"] = float(sidecar.certified_energy)
    if sidecar.certified_optima is not None:
        payload["certified_optima"] = [encode_spins(c) for c in sidecar.certified_optima]
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=1)
        fh.write("\n")


def load_sidecar(path, expect_length=None):
    with open(path, encoding="utf-8") as fh:
        payload = json.load(fh)
    optima = payload.get("certified_optima")
    return GroundTruthSidecar(
        planted_config=decode_spins(payload["planted_config"], expect_length),
        gauge=decode_spins(payload["gauge"], expect_length),
        certified=bool(payload.get("certified", False)),
        certified_energy=payload.get("certified_energy"),
        certified_optima=None if optima is None
        else [decode_spins(c, expect_length) for c in optima],
        degenerate=bool(payload.get("degenerate", False)),
    )


def save_trajectory(trajectory, path):
    payload = {
        "solver": trajectory.solver_name,
        "seed": _jsonable(trajectory.seed),
        "time_limit": float(trajectory.time_limit),
        "total_restarts": int(trajectory.total_restarts),
        "improvements": [
            {"t": float(t), "energy": float(e), "config": encode_spins(c)}
            for t, e, c in trajectory.improvements
        ],
    }
    if trajectory.metadata:
        payload["metadata"] = _jsonable(trajectory.metadata)
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=1)
        fh.write("\n")


def load_trajectory(path):
    """Returns the trajectory as a plain dict with decoded spin arrays."""
    with open(path, encoding="utf-8") as fh:
        payload = json.load(fh)
    return {
        "solver": payload["solver"],
        "seed": payload["seed"],
        "time_limit": float(payload["time_limit"]),
        "total_restarts": int(payload.get("total_restarts", 0)),
        "improvements": [
            (float(rec["t"]), float(rec["energy"]), decode_spins(rec["config"]))
            for rec in payload["improvements"]
        ],
        "metadata": payload.get("metadata", {}),
    }


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    if isinstance(obj, np.ndarray):
        return [_jsonable(v) for v in obj.tolist()]
    return obj
