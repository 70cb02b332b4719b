"""Planted-structure Ising benchmarks on Chimera graphs.

Instance generators with hidden ground truth, four classical heuristics
with anytime trajectories, exact certification at desk scale, a tiny
quantum-annealing simulator, and a benchmark harness that turns all of it
into performance-profile CSV.
"""

__version__ = "0.1.0"

from .model import (IsingModel, BoolModel, ContractViolation, as_spins,
                    as_gauge, energy, partial_energy, interaction_lower_bound,
                    is_frustrated, gauge_transform, apply_gauge, to_boolean,
                    to_ising, spins_to_bool, bool_to_spins, hamming_distance)
from .chimera import (ChimeraTopology, TopologyError, build_chimera,
                      random_omissions, save_topology, load_topology)
from .generators import (FieldDistribution, CouplingDistribution,
                         GroundTruthSidecar, family_presets, get_preset,
                         generate, generate_family, expected_gap)
from .exact import (Certificate, brute_force, branch_and_bound, certify,
                    all_energies, mask_to_spins, spins_to_mask,
                    export_ilp, export_iqp)
from .qasim import DiagonalLift, AnnealResult, lift, anneal, save_anneal_result
from .solvers import (SOLVERS, SolveClock, SolveTrajectory, scd, glauber,
                      min_sum, hfs, HfsContext)
from .harness import (ExperimentPlan, BenchmarkReport, load_plan,
                      plan_from_dict, run_experiment, write_report_csv,
                      read_report_csv, qa_read_protocol, qa_reads)
from .io import (save_instance, load_instance, save_sidecar, load_sidecar,
                 save_trajectory, load_trajectory, encode_spins, decode_spins)

__all__ = [
    "IsingModel", "BoolModel", "ContractViolation", "as_spins", "as_gauge",
    "energy", "partial_energy", "interaction_lower_bound", "is_frustrated",
    "gauge_transform", "apply_gauge", "to_boolean", "to_ising",
    "spins_to_bool", "bool_to_spins", "hamming_distance",
    "ChimeraTopology", "TopologyError", "build_chimera", "random_omissions",
    "save_topology", "load_topology",
    "FieldDistribution", "CouplingDistribution", "GroundTruthSidecar",
    "family_presets", "get_preset", "generate", "generate_family",
    "expected_gap",
    "Certificate", "brute_force", "branch_and_bound", "certify",
    "all_energies", "mask_to_spins", "spins_to_mask", "export_ilp",
    "export_iqp",
    "DiagonalLift", "AnnealResult", "lift", "anneal", "save_anneal_result",
    "SOLVERS", "SolveClock", "SolveTrajectory", "scd", "glauber", "min_sum",
    "hfs", "HfsContext",
    "ExperimentPlan", "BenchmarkReport", "load_plan", "plan_from_dict",
    "run_experiment", "write_report_csv", "read_report_csv",
    "qa_read_protocol", "qa_reads",
    "save_instance", "load_instance", "save_sidecar", "load_sidecar",
    "save_trajectory", "load_trajectory", "encode_spins", "decode_spins",
]
