"""Command-line front door.

Subcommands::

    spinbench generate [family] -rgt --topology c4.json --seed 7 -o inst.json
    spinbench solve scd -rtl 1 -f inst.json --trajectory-out run.json
    spinbench experiment plan.json -o report.csv
    spinbench export --form ilp -f inst.json -o model.lp

Generator flag names (-rgt, -j1-val, -h1-pr, ...) and solver flags (-rtl,
-f, -s, -ss) follow the conventions of the original instance-generation
and solver scripts this toolkit mirrors.  Family presets fill the
distribution flags; explicit flags override preset entries.

Every command prints a machine-parseable ``RESULT`` line on success.  Exit
codes: 0 success, 1 validation error, 2 I/O error, 3 internal error.

The qa-sim solver accepts -nr (read count), -at (per-read anneal time) and
-srtr (gauge re-randomization period).  These drive the desk-scale
simulator only; they do not model hardware timing.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from .chimera import TopologyError, build_chimera, load_topology
from .exact import branch_and_bound, brute_force, export_ilp, export_iqp
from .generators import (CouplingDistribution, DistributionError,
                         FieldDistribution, generate, get_preset)
from .harness import (CertificateError, PlanError, load_plan, qa_read_protocol,
                      qa_reads, run_experiment, write_manifest,
                      write_report_csv)
from .io import (load_instance, load_sidecar, save_instance, save_sidecar,
                 save_trajectory, truth_path_for)
from .model import BoolModel, ContractViolation, to_boolean
from .solvers import SOLVERS

__all__ = ["main"]

TOPOLOGY_ENV = "SPINBENCH_TOPOLOGY"

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_IO = 2
EXIT_INTERNAL = 3


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="spinbench",
        description="planted Ising benchmarks: generate, solve, experiment, export")
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("generate", help="draw a planted instance")
    gen.add_argument("family", nargs="?", default=None,
                     help="preset family (BFM, FBFM, CBFM, BFM-U, FBFM-U, CBFM-U, RANF-1)")
    gen.add_argument("-rgt", action="store_true",
                     help="apply a random gauge transformation")
    for tag in ("j1", "j2", "h1", "h2"):
        gen.add_argument(f"-{tag}-val", type=float, default=None)
        gen.add_argument(f"-{tag}-pr", type=float, default=None)
    gen.add_argument("--topology", default=None,
                     help=f"topology JSON (default from ${TOPOLOGY_ENV})")
    gen.add_argument("--seed", type=int, default=None)
    gen.add_argument("-o", "--output", default=None,
                     help="instance path (default <family>_<seed>.json)")

    slv = sub.add_parser("solve", help="run a solver on an instance file")
    slv.add_argument("solver", choices=sorted(SOLVERS) + ["bnb", "brute", "qa-sim"])
    slv.add_argument("-rtl", type=float, default=1.0,
                     help="runtime limit in seconds (default 1)")
    slv.add_argument("-f", dest="case_file", required=True, help="instance JSON")
    slv.add_argument("-s", dest="seed", type=int, default=None)
    slv.add_argument("-ss", action="store_true",
                     help="stochastic seed: draw fresh entropy, stamp it in outputs")
    slv.add_argument("--trajectory-out", default=None)
    slv.add_argument("--topology", default=None,
                     help="topology JSON override (hfs; defaults to instance metadata)")
    slv.add_argument("--clock", choices=("wall", "ticks"), default="wall")
    slv.add_argument("-nr", type=int, default=100, help="qa-sim: number of reads")
    slv.add_argument("-at", type=float, default=5.0, help="qa-sim: per-read anneal time")
    slv.add_argument("-srtr", type=int, default=100,
                     help="qa-sim: reads between gauge re-randomizations")

    exp = sub.add_parser("experiment", help="run an experiment plan")
    exp.add_argument("plan", help="plan JSON")
    exp.add_argument("-o", "--output", default="report.csv")
    exp.add_argument("--manifest", default=None,
                     help="manifest path (default <output>.manifest.json)")
    exp.add_argument("--threads", type=int, default=None,
                     help="override the plan's worker count")

    exo = sub.add_parser("export", help="write an LP-format model file")
    exo.add_argument("--form", choices=("ilp", "iqp"), required=True)
    exo.add_argument("-f", dest="case_file", required=True)
    exo.add_argument("-o", "--output", required=True)
    return parser


def _distribution_from_flags(args, preset):
    """Merge preset entries with explicit flag overrides; validate sums."""
    if preset is not None:
        j_entries = [list(e) for e in preset[0].entries]
        h_entries = [list(e) for e in preset[1].entries]
    else:
        j_entries, h_entries = [], []

    def apply(entries, val, pr, slot):
        if val is None and pr is None:
            return
        while len(entries) <= slot:
            entries.append([0.0, 0.0])
        if val is not None:
            entries[slot][0] = val
        if pr is not None:
            entries[slot][1] = pr

    apply(j_entries, args.j1_val, args.j1_pr, 0)
    apply(j_entries, args.j2_val, args.j2_pr, 1)
    apply(h_entries, args.h1_val, args.h1_pr, 0)
    apply(h_entries, args.h2_val, args.h2_pr, 1)
    if not j_entries:
        raise DistributionError("no coupling distribution: give a family or -j1-val/-j1-pr")

    j_total = sum(p for _, p in j_entries)
    if abs(j_total - 1.0) > 1e-12:
        raise DistributionError(
            f"coupling probabilities (-j1-pr, -j2-pr) sum to {j_total}, need exactly 1")
    h_total = sum(p for _, p in h_entries)
    if h_total > 1.0 + 1e-12:
        raise DistributionError(
            f"field probabilities (-h1-pr, -h2-pr) sum to {h_total} > 1")
    return (CouplingDistribution(tuple(tuple(e) for e in j_entries)),
            FieldDistribution(tuple(tuple(e) for e in h_entries)))


def _cmd_generate(args):
    preset = None
    family = None
    if args.family is not None:
        family = args.family.upper()
        preset = get_preset(family)
    j_dist, h_dist = _distribution_from_flags(args, preset)

    topo_path = args.topology or os.environ.get(TOPOLOGY_ENV)
    if topo_path is None:
        raise ContractViolation(
            f"no topology: pass --topology or set ${TOPOLOGY_ENV}")
    topology = load_topology(topo_path)

    seed = args.seed
    model, sidecar = generate(topology, j_dist, h_dist, args.rgt, seed,
                              family=family)
    out = args.output or f"{(family or 'instance').lower()}_{seed}.json"
    save_instance(model, out)
    save_sidecar(sidecar, truth_path_for(out))
    print(f"RESULT command=generate family={family or 'custom'} seed={seed} "
          f"nodes={model.node_count} edges={model.edge_count} instance={out}")
    return EXIT_OK


def _topology_for_instance(model, override):
    if override:
        return load_topology(override)
    spec = model.metadata.get("topology")
    if spec is None:
        raise ContractViolation(
            "instance metadata has no topology; pass --topology")
    return build_chimera(spec["rows"], spec["cols"], spec.get("cell_size", 4),
                         spec.get("omitted_nodes", ()),
                         spec.get("omitted_edges", ()))


def _cmd_solve(args):
    if args.solver not in ("brute",) and args.rtl <= 0:
        raise ContractViolation(f"runtime limit must be positive, got {args.rtl}")
    model = load_instance(args.case_file)
    if isinstance(model, BoolModel):
        raise ContractViolation("solvers take spin-domain instances; convert first")

    seed = args.seed
    if args.ss:
        seed = int(np.random.SeedSequence().entropy % (2 ** 63))

    if args.solver in ("brute", "bnb"):
        if args.solver == "brute":
            cert = brute_force(model)
        else:
            cert = branch_and_bound(model, args.rtl)
        _record_certificate(args.case_file, model, cert)
        proof = "complete" if cert.proof_complete else "incomplete"
        print(f"RESULT solver={args.solver} energy={cert.optimal_energy!r} "
              f"time={args.rtl!r} proof={proof}")
        return EXIT_OK

    if args.solver == "qa-sim":
        shots = qa_reads(model, args.nr, args.at, steps=200, seed=seed,
                         regauge_every=args.srtr)
        schedule = sorted({k for k in (1, 5, 10, 50, 100, 500, 1000, args.nr)
                           if 1 <= k <= args.nr})
        traj = qa_read_protocol(shots, schedule, per_read_time=args.at,
                                regauge_every=args.srtr)
    else:
        topology = None
        if args.solver == "hfs":
            topology = _topology_for_instance(model, args.topology)
        traj = SOLVERS[args.solver](model, topology, args.rtl, seed=seed,
                                    clock=args.clock)
    if args.trajectory_out:
        save_trajectory(traj, args.trajectory_out)
    if traj.improvements:
        t_best, e_best, _ = traj.improvements[-1]
    else:
        t_best, e_best = args.rtl, float("nan")
    line = f"RESULT solver={args.solver} energy={e_best!r} time={t_best!r}"
    if args.ss:
        line += f" seed={seed}"
    print(line)
    return EXIT_OK


def _record_certificate(case_file, model, cert):
    """Fold a complete proof into the instance's truth sidecar, if present."""
    path = truth_path_for(case_file)
    if not cert.proof_complete or not os.path.exists(path):
        return
    sidecar = load_sidecar(path, expect_length=model.node_count)
    sidecar.certified = True
    sidecar.certified_energy = cert.optimal_energy
    sidecar.certified_optima = cert.optimal_configs
    save_sidecar(sidecar, path)


def _cmd_experiment(args):
    plan = load_plan(args.plan)
    if args.threads is not None:
        plan.threads = args.threads
    report = run_experiment(plan)
    write_report_csv(report, args.output)
    manifest = args.manifest or args.output + ".manifest.json"
    write_manifest(plan, report, manifest)
    print(f"RESULT command=experiment family={report.family} "
          f"rows={len(report.rows)} report={args.output} manifest={manifest}")
    return EXIT_OK


def _cmd_export(args):
    model = load_instance(args.case_file)
    if not isinstance(model, BoolModel):
        model = to_boolean(model)
    if args.form == "ilp":
        export_ilp(model, args.output)
    else:
        export_iqp(model, args.output)
    print(f"RESULT command=export form={args.form} model={args.output}")
    return EXIT_OK


_DISPATCH = {
    "generate": _cmd_generate,
    "solve": _cmd_solve,
    "experiment": _cmd_experiment,
    "export": _cmd_export,
}


def main(argv=None):
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_VALIDATION if exc.code not in (0, None) else EXIT_OK
    try:
        return _DISPATCH[args.command](args)
    except (OSError, json.JSONDecodeError) as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (ContractViolation, DistributionError, TopologyError, PlanError,
            KeyError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except Exception as exc:  # includes CertificateError: a wrong proof is our bug
        print(f"internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
