"""Quantum annealing at desk scale: diagonal lifts and tiny Schrodinger runs.

The classical objective lifts to a diagonal operator on the 2^N state
space: basis vector ``mask`` (bit i = 0 meaning sigma_i = +1, matching the
enumeration kernel) has diagonal entry E(sigma(mask)).  The anneal
interpolates

    H(Gamma) = (1 - Gamma) * H0 + Gamma * diag(E),   Gamma = t / T

with H0 = -sum_i X_i, starting from the uniform superposition (the ground
state of H0), integrated by fixed-step Strang splitting: a half-step of
the transverse term, a full diagonal phase, another transverse half-step,
with Gamma frozen at the step midpoint.  Each factor is unitary, so the
state norm is conserved by construction.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .model import ContractViolation
from .exact import all_energies

__all__ = ["DiagonalLift", "AnnealResult", "lift", "anneal", "save_anneal_result"]

LIFT_CAP = 20
ANNEAL_CAP = 10


@dataclass(frozen=True)
class DiagonalLift:
    """Diagonal of the lifted energy operator, indexed by configuration mask."""

    energies: np.ndarray

    @property
    def node_count(self):
        return int(self.energies.size.bit_length() - 1)

    def minimum(self):
        return float(np.min(self.energies))

    def optimal_masks(self):
        return np.flatnonzero(self.energies == np.min(self.energies))


@dataclass(frozen=True)
class AnnealResult:
    schedule_points: int
    anneal_time: float
    ground_state_probability: float
    final_distribution: np.ndarray

    def to_dict(self):
        return {
            "schedule_points": int(self.schedule_points),
            "anneal_time": float(self.anneal_time),
            "ground_state_probability": float(self.ground_state_probability),
            "final_distribution": [float(p) for p in self.final_distribution],
        }


def lift(model):
    """Diagonal lift of the model; N capped so the 2^N table stays small."""
    if model.node_count > LIFT_CAP:
        raise ContractViolation(f"lift capped at N={LIFT_CAP}, got {model.node_count}")
    return DiagonalLift(energies=all_energies(model))


def _transverse_half_step(psi, n, phase):
    """Apply prod_q exp(i * phase * X_q) to the state in place."""
    c = np.cos(phase)
    s = 1j * np.sin(phase)
    for q in range(n):
        view = psi.reshape(-1, 2, 1 << q)
        a = view[:, 0, :].copy()
        b = view[:, 1, :]
        view[:, 0, :] = c * a + s * b
        view[:, 1, :] = s * a + c * b
    return psi


def anneal(model, anneal_time, steps=200):
    """Integrate the interpolated dynamics; reports optimal-set probability."""
    n = model.node_count
    if n > ANNEAL_CAP:
        raise ContractViolation(f"anneal capped at N={ANNEAL_CAP}, got {n}")
    if not np.isfinite(anneal_time) or anneal_time < 0:
        raise ContractViolation(f"anneal_time must be finite and >= 0, got {anneal_time}")
    if steps < 10:
        raise ContractViolation(f"steps must be >= 10, got {steps}")
    energies = all_energies(model)
    dim = 1 << n
    psi = np.full(dim, 1.0 / np.sqrt(dim), dtype=np.complex128)

    dt = anneal_time / steps
    for step in range(steps):
        gamma = (step + 0.5) / steps
        phase = 0.5 * dt * (1.0 - gamma)  # exp(-i dt/2 (1-Gamma) * (-sum X))
        _transverse_half_step(psi, n, phase)
        psi *= np.exp(-1j * dt * gamma * energies)
        _transverse_half_step(psi, n, phase)

    dist = np.abs(psi) ** 2
    optimal = energies == np.min(energies)
    return AnnealResult(schedule_points=steps, anneal_time=float(anneal_time),
                        ground_state_probability=float(np.sum(dist[optimal])),
                        final_distribution=dist)


def save_anneal_result(result, path):
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(result.to_dict(), fh, indent=1)
        fh.write("\n")
