"""Benchmark orchestration: planted instances x solvers x time ladder.

Each (instance, solver) pair gets one run at the largest budget; the
anytime trajectory is then read off at every ladder point, which is exact
for monotone best-so-far curves.  Metrics per point:

    gap(t)     = (E_best(t) - E_ref) / |E_ref|   (absolute when |E_ref| < 1e-9)
    hamming(t) = min over reference optima of hamming_distance / N

Energy differences within 1e-9 of zero count as optimal and clamp to a
zero gap; a difference below -1e-9 against a certified reference means the
certificate was wrong and aborts the experiment.

Solver seeds derive from ``SeedSequence([instance_seed, solver_position])``
so every run is replayable from the plan alone.
"""

from __future__ import annotations

import csv
import hashlib
import json
import math
from dataclasses import dataclass, field as dc_field

import numpy as np

from . import __version__ as _pkg_version
from .chimera import ChimeraTopology, build_chimera, load_topology
from .exact import certify, mask_to_spins
from .generators import generate_family, get_preset
from .model import ContractViolation, energy, hamming_distance
from .qasim import anneal
from .solvers import SOLVERS, SolveTrajectory

__all__ = ["ExperimentPlan", "BenchmarkReport", "CertificateError",
           "load_plan", "plan_from_dict", "run_experiment",
           "write_report_csv", "read_report_csv", "write_manifest",
           "qa_read_protocol", "qa_reads"]

GAP_ABS_GUARD = 1e-9
OPTIMAL_TOL = 1e-9


class CertificateError(RuntimeError):
    """A solver beat a supposedly certified optimum."""


class PlanError(ValueError):
    """Invalid experiment plan; message lists every failure found."""


@dataclass
class ExperimentPlan:
    family: str
    topology: object
    time_ladder: list
    solvers: list
    instance_count: int = 100
    seeds: list = None
    reference: str = "certified"
    gauge: bool = True
    timing: str = "wall"
    certify_time_limit: float = 60.0
    threads: int = 1

    def __post_init__(self):
        problems = []
        try:
            get_preset(self.family)
        except KeyError as exc:
            problems.append(str(exc))
        if self.instance_count < 1:
            problems.append(f"instance_count must be >= 1, got {self.instance_count}")
        if self.seeds is None:
            self.seeds = list(range(self.instance_count))
        elif len(self.seeds) != self.instance_count:
            problems.append(f"{len(self.seeds)} seeds for {self.instance_count} instances")
        ladder = list(self.time_ladder)
        if not ladder:
            problems.append("time_ladder is empty")
        elif any(b <= a for a, b in zip(ladder, ladder[1:])) or ladder[0] <= 0:
            problems.append(f"time_ladder must be positive and strictly increasing: {ladder}")
        if not self.solvers:
            problems.append("no solvers listed")
        for spec in self.solvers:
            name = spec.get("name") if isinstance(spec, dict) else None
            if name not in SOLVERS:
                problems.append(f"unknown solver {name!r}; registered: " +
                                ", ".join(sorted(SOLVERS)))
        if self.reference not in ("planted", "certified", "best_found"):
            problems.append(f"unknown reference policy {self.reference!r}")
        if self.timing not in ("wall", "ticks"):
            problems.append(f"unknown timing mode {self.timing!r}")
        if problems:
            raise PlanError("; ".join(problems))


def plan_from_dict(payload):
    """Build a validated plan from the JSON-mirror dict."""
    known = {"family", "topology", "time_ladder", "solvers", "instance_count",
             "seeds", "reference", "gauge", "timing", "certify_time_limit",
             "threads"}
    unknown = set(payload) - known
    if unknown:
        raise PlanError(f"unknown plan keys: {', '.join(sorted(unknown))}")
    missing = {"family", "topology", "time_ladder", "solvers"} - set(payload)
    if missing:
        raise PlanError(f"missing plan keys: {', '.join(sorted(missing))}")
    kwargs = dict(payload)
    kwargs["solvers"] = [{"name": s} if isinstance(s, str) else dict(s)
                         for s in payload["solvers"]]
    return ExperimentPlan(**kwargs)


def load_plan(path):
    with open(path, encoding="utf-8") as fh:
        return plan_from_dict(json.load(fh))


def resolve_topology(spec):
    if isinstance(spec, ChimeraTopology):
        return spec
    if isinstance(spec, str):
        return load_topology(spec)
    if isinstance(spec, dict):
        return build_chimera(spec["rows"], spec["cols"], spec.get("cell_size", 4),
                            spec.get("omitted_nodes", ()),
                            spec.get("omitted_edges", ()))
    raise PlanError(f"cannot interpret topology spec {spec!r}")


@dataclass
class BenchmarkReport:
    family: str
    rows: list                      # aggregated, CSV schema order
    raw: list = dc_field(default_factory=list)
    metadata: dict = dc_field(default_factory=dict)


def _reference_for(model, sidecar, policy, certify_time_limit, warm_start=None):
    """Returns (E_ref, optima list) or None when policy defers to solvers."""
    if policy == "planted":
        optima = sidecar.reference_optima()
        return energy(model, optima[0]), optima
    if policy == "certified":
        cert = certify(model, sidecar, time_limit=certify_time_limit,
                       warm_start=warm_start)
        if not cert.proof_complete:
            raise ContractViolation(
                f"could not certify N={model.node_count} instance within "
                f"{certify_time_limit}s; raise certify_time_limit or use planted")
        return cert.optimal_energy, cert.optimal_configs
    return None


def _instance_rows(plan, index, topology=None):
    if topology is None:
        topology = resolve_topology(plan.topology)
    seed = plan.seeds[index]
    model, sidecar = generate_family(topology, plan.family, seed,
                                     apply_random_gauge=plan.gauge)
    budget = plan.time_ladder[-1]

    runs = []
    for pos, spec in enumerate(plan.solvers):
        spec = dict(spec)
        name = spec.pop("name")
        solver_seed = np.random.SeedSequence([int(seed), pos])
        traj = SOLVERS[name](model, topology, budget, seed=solver_seed,
                             clock=plan.timing, **spec)
        runs.append((name, traj))

    # certification after the heuristics: the best heuristic configuration
    # seeds the branch-and-bound incumbent, which shortens the proof on
    # hard seeds; the optimality proof itself is independent of it
    warm = sidecar.planted_config if sidecar is not None else None
    e_warm = energy(model, warm) if warm is not None else math.inf
    for _, traj in runs:
        e_best = traj.best_energy()
        if e_best is not None and e_best < e_warm:
            warm, e_warm = traj.best_config(), e_best
    reference = _reference_for(model, sidecar, plan.reference,
                               plan.certify_time_limit, warm_start=warm)

    if reference is None:
        finals = [traj.best_energy() for _, traj in runs
                  if traj.best_energy() is not None]
        if not finals:
            raise ContractViolation(f"no solver produced a result on seed {seed}")
        e_ref = min(finals)
        optima = [traj.best_config() for _, traj in runs
                  if traj.best_energy() == e_ref]
    else:
        e_ref, optima = reference

    n = model.node_count
    rows = []
    for name, traj in runs:
        for t in plan.time_ladder:
            e_t = traj.energy_at(t)
            if e_t is None:
                rows.append({"instance_seed": seed, "solver": name, "time": t,
                             "gap": math.nan, "hamming": math.nan,
                             "optimal": False, "energy": math.nan})
                continue
            diff = e_t - e_ref
            if diff < -GAP_ABS_GUARD and plan.reference == "certified":
                raise CertificateError(
                    f"{name} found energy {e_t} below certified optimum {e_ref} "
                    f"on seed {seed}: certificate is wrong")
            if abs(diff) <= OPTIMAL_TOL:
                diff = 0.0
            gap = diff if abs(e_ref) < GAP_ABS_GUARD else diff / abs(e_ref)
            config = traj.config_at(t)
            ham = min(hamming_distance(config, ref) for ref in optima) / n
            rows.append({"instance_seed": seed, "solver": name, "time": t,
                         "gap": gap, "hamming": ham,
                         "optimal": diff == 0.0, "energy": e_t})
    return rows


def run_experiment(plan):
    """Execute a plan; returns per-point aggregates plus raw rows."""
    raw = []
    if plan.threads > 1:
        # workers rebuild the topology from the plan spec; the built object
        # is immutable and does not pickle
        from concurrent.futures import ProcessPoolExecutor
        with ProcessPoolExecutor(max_workers=plan.threads) as pool:
            futures = [pool.submit(_instance_rows, plan, i)
                       for i in range(plan.instance_count)]
            for fut in futures:
                raw.extend(fut.result())
    else:
        topology = resolve_topology(plan.topology)
        for i in range(plan.instance_count):
            raw.extend(_instance_rows(plan, i, topology))

    solver_names = [spec["name"] for spec in plan.solvers]
    rows = []
    for name in solver_names:
        for t in plan.time_ladder:
            hits = [r for r in raw
                    if r["solver"] == name and r["time"] == t
                    and not math.isnan(r["gap"])]
            if hits:
                rows.append({
                    "family": plan.family, "solver": name, "time": t,
                    "mean_gap": sum(r["gap"] for r in hits) / len(hits),
                    "mean_hamming": sum(r["hamming"] for r in hits) / len(hits),
                    "frac_optimal": sum(r["optimal"] for r in hits) / len(hits),
                    "n_instances": len(hits),
                })
            else:
                rows.append({"family": plan.family, "solver": name, "time": t,
                             "mean_gap": math.nan, "mean_hamming": math.nan,
                             "frac_optimal": math.nan, "n_instances": 0})
    metadata = {
        "gap_definition": "relative |E_ref| with absolute fallback below 1e-9",
        "timing": plan.timing,
        "reference": plan.reference,
        "spinbench_version": _pkg_version,
    }
    return BenchmarkReport(family=plan.family, rows=rows, raw=raw,
                           metadata=metadata)


_CSV_COLUMNS = ["family", "solver", "time", "mean_gap", "mean_hamming",
                "frac_optimal", "n_instances"]


def _csv_number(value):
    if isinstance(value, float):
        text = repr(value)
        return text
    return str(value)


def write_report_csv(report, path):
    """Deterministic CSV: fixed column order, full-precision decimals."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(_CSV_COLUMNS)
        for row in report.rows:
            writer.writerow([row[c] if c in ("family", "solver")
                             else _csv_number(row[c]) for c in _CSV_COLUMNS])


def read_report_csv(path):
    """CSV -> list of row dicts with numeric fields parsed back."""
    rows = []
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        missing = [c for c in _CSV_COLUMNS if c not in (reader.fieldnames or [])]
        if missing:
            raise ContractViolation(f"report CSV missing columns: {', '.join(missing)}")
        for rec in reader:
            rows.append({
                "family": rec["family"], "solver": rec["solver"],
                "time": float(rec["time"]), "mean_gap": float(rec["mean_gap"]),
                "mean_hamming": float(rec["mean_hamming"]),
                "frac_optimal": float(rec["frac_optimal"]),
                "n_instances": int(rec["n_instances"]),
            })
    return rows


def plan_fingerprint(plan):
    payload = {
        "family": plan.family, "topology": plan.topology,
        "time_ladder": list(plan.time_ladder), "solvers": plan.solvers,
        "instance_count": plan.instance_count, "seeds": list(plan.seeds),
        "reference": plan.reference, "gauge": plan.gauge,
        "timing": plan.timing,
    }
    blob = json.dumps(payload, sort_keys=True).encode()
    return hashlib.sha256(blob).hexdigest()


def write_manifest(plan, report, path):
    payload = {
        "plan_sha256": plan_fingerprint(plan),
        "seeds": list(plan.seeds),
        "timing": plan.timing,
        "reference": plan.reference,
        "spinbench_version": _pkg_version,
        "numpy_version": np.__version__,
        "report_metadata": report.metadata,
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=1)
        fh.write("\n")


def qa_reads(model, n_reads, anneal_time, steps, seed, regauge_every=100):
    """Sample best-of-one reads from the annealing simulator.

    Every ``regauge_every`` reads the instance is re-gauged with a fresh
    random sign vector and the anneal re-run; samples are drawn from the
    current final distribution and mapped back through the gauge.  Returns
    one single-shot trajectory per read.
    """
    from .model import apply_gauge, gauge_transform

    if n_reads < 1:
        raise ContractViolation(f"n_reads must be >= 1, got {n_reads}")
    rng = np.random.default_rng(seed)
    n = model.node_count
    shots = []
    for start in range(0, n_reads, regauge_every):
        block = min(regauge_every, n_reads - start)
        gauge = (2 * rng.integers(0, 2, n) - 1).astype(np.int8)
        gauged = gauge_transform(model, gauge)
        result = anneal(gauged, anneal_time, steps)
        masks = rng.choice(result.final_distribution.size, size=block,
                           p=result.final_distribution)
        for m in masks:
            config = apply_gauge(mask_to_spins(int(m), n), gauge)
            e = energy(model, config)
            traj = SolveTrajectory(solver_name="qa-sim", seed=None,
                                   time_limit=float(anneal_time),
                                   improvements=[(float(anneal_time), e, config)])
            shots.append(traj)
    return shots


def qa_read_protocol(trajectories, reads_schedule, per_read_time=None,
                     regauge_every=100):
    """Best-of-k aggregation over single-shot runs.

    ``reads_schedule`` lists the k values to evaluate; elapsed time for a
    k-read result is k times the per-read time (defaulting to the first
    shot's budget).  Gauge re-randomization boundaries, every
    ``regauge_every`` reads by the sampling convention, are recorded in the
    trajectory metadata.
    """
    shots = list(trajectories)
    if not shots:
        raise ContractViolation("reads protocol needs at least one shot")
    schedule = sorted(set(int(k) for k in reads_schedule))
    if schedule[0] < 1 or schedule[-1] > len(shots):
        raise ContractViolation(
            f"reads schedule {schedule} outside 1..{len(shots)}")
    if per_read_time is None:
        per_read_time = shots[0].time_limit

    out = SolveTrajectory(
        solver_name="qa-reads", seed=None,
        time_limit=float(per_read_time) * schedule[-1],
        metadata={"regauge_every": int(regauge_every),
                  "reads_schedule": schedule})
    best_e = math.inf
    best_c = None
    k_done = 0
    for k in schedule:
        for shot in shots[k_done:k]:
            e = shot.best_energy()
            if e is not None and e < best_e:
                best_e = e
                best_c = shot.best_config()
        k_done = k
        if best_c is not None and (not out.improvements
                                   or best_e < out.improvements[-1][1]):
            out.improvements.append((per_read_time * k, best_e, best_c))
    return out
