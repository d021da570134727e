"""Phase estimation on two counter-propagating system copies.

The phase register starts in a uniform superposition; its bit j (weight
2**j in the outcome) controls the powered step ``(exp(1j*H*delta) on copy a)
times (exp(-1j*H*delta) on copy b)`` applied 2**j times, so the branch
labelled x accumulates ``exp(1j*delta*(e_n - e_m)*x)`` between eigenstates
n of copy a and m of copy b.  After the inverse Fourier transform the
outcome f therefore concentrates near ``delta * 2**l * (e_n - e_m) / 2pi``;
positive energy differences land at small positive f and negative ones wrap
into the upper half of the register, which ``outcome_frequency`` maps back
to signed angular frequencies.

Controlled powers are built by raising eigenphases once, not by repeating
gates; repeating the base step is used only as a consistency check in the
test-suite.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import DimensionMismatchError, ResourceCapError
from .simcore import (
    QUBIT_CAP,
    HermitianOperator,
    RegisterLayout,
    StateVector,
    apply_controlled_unitary,
    eig_hermitian,
    inverse_qft,
    plus_state,
    register_distribution,
    tensor_product,
)


@dataclass(frozen=True)
class PhaseDistribution:
    """Exact or sampled outcome probabilities of the phase register."""

    num_bits: int
    delta: float
    probabilities: np.ndarray
    kind: str = "exact"
    shots: int | None = None

    def __post_init__(self) -> None:
        probs = np.asarray(self.probabilities, dtype=float)
        if probs.shape != (1 << self.num_bits,):
            raise DimensionMismatchError(
                f"expected {1 << self.num_bits} probabilities, got {probs.shape}"
            )
        if probs.min() < -1e-12:
            raise ValueError(f"negative probability {probs.min():.3e}")
        probs = np.maximum(probs, 0.0)
        object.__setattr__(self, "probabilities", probs)
        if abs(probs.sum() - 1.0) > 1e-10:
            raise ValueError(f"probabilities sum to {probs.sum():.12f}")
        if self.kind not in ("exact", "empirical"):
            raise ValueError(f"kind must be exact or empirical, got {self.kind!r}")
        if self.kind == "empirical" and (self.shots is None or self.shots < 1):
            raise ValueError("empirical distributions must record a positive shot count")

    def frequencies(self) -> np.ndarray:
        """Signed angular frequency of every outcome."""
        return np.array(
            [outcome_frequency(f, self.num_bits, self.delta) for f in range(1 << self.num_bits)]
        )

    def to_dict(self) -> dict:
        return {
            "num_bits": self.num_bits,
            "delta": self.delta,
            "kind": self.kind,
            "shots": self.shots,
            "omega": self.frequencies().tolist(),
            "probabilities": self.probabilities.tolist(),
        }

    def to_json(self, path: str | Path) -> None:
        Path(path).write_text(json.dumps(self.to_dict(), indent=2) + "\n")

    def to_csv(self, path: str | Path) -> None:
        freqs = self.frequencies()
        lines = ["f,omega,probability"]
        lines += [
            f"{f},{freqs[f]:.17g},{p:.17g}" for f, p in enumerate(self.probabilities)
        ]
        Path(path).write_text("\n".join(lines) + "\n")


def run_qpe(
    prepared: StateVector,
    hamiltonian: HermitianOperator,
    num_bits: int,
    delta: float,
) -> PhaseDistribution:
    """Exact outcome distribution of the phase register for a prepared doubled state."""
    if delta <= 0:
        raise ValueError("delta must be positive")
    if num_bits < 1:
        raise ValueError("need at least one phase bit")
    if prepared.num_qubits % 2:
        raise DimensionMismatchError("prepared state must cover two equal copies")
    num_sites = prepared.num_qubits // 2
    if hamiltonian.dim != (1 << num_sites):
        raise DimensionMismatchError(
            f"Hamiltonian dim {hamiltonian.dim} does not match {num_sites}-site copies"
        )
    if prepared.num_qubits + num_bits > QUBIT_CAP:
        raise ResourceCapError(
            f"{prepared.num_qubits + num_bits} qubits exceed the {QUBIT_CAP}-qubit cap"
        )

    layout = RegisterLayout.standard(num_sites, num_bits)
    state = tensor_product(prepared, plus_state(num_bits))
    eig = eig_hermitian(hamiltonian)
    for j in range(num_bits):
        control = layout.phase[num_bits - 1 - j]  # bit j of the outcome
        step = delta * (1 << j)
        forward = eig.propagator(step, +1)
        backward = eig.propagator(step, -1)
        state = apply_controlled_unitary(state, control, forward, layout.copy_a, validate=False)
        state = apply_controlled_unitary(state, control, backward, layout.copy_b, validate=False)
    state = inverse_qft(state, layout.phase)
    probs = register_distribution(state, layout.phase)
    return PhaseDistribution(num_bits, delta, probs, kind="exact")


def sample_outcomes(
    dist: PhaseDistribution,
    shots: int,
    seed: int | np.random.SeedSequence,
) -> PhaseDistribution:
    """Multinomial draw from an exact distribution, returned as normalized counts."""
    if dist.kind != "exact":
        raise ValueError("sampling requires an exact distribution")
    if shots < 1:
        raise ValueError("shots must be at least 1")
    rng = np.random.default_rng(seed)
    pvals = dist.probabilities / dist.probabilities.sum()
    counts = rng.multinomial(shots, pvals)
    return PhaseDistribution(
        dist.num_bits, dist.delta, counts / shots, kind="empirical", shots=shots
    )


def outcome_frequency(f: int, num_bits: int, delta: float) -> float:
    """Signed angular frequency of outcome f; the upper half wraps to negative values."""
    dim = 1 << num_bits
    if not 0 <= f < dim:
        raise ValueError(f"outcome {f} out of range for {num_bits} bits")
    wrapped = f - dim if f >= dim // 2 else f
    return 2.0 * math.pi * wrapped / (delta * dim)


@dataclass(frozen=True)
class ResolutionPlan:
    """Register size and coupling time meeting a bandwidth and linewidth target."""

    num_bits: int
    delta: float
    omega_max: float
    gamma: float

    def __post_init__(self) -> None:
        dim = 1 << self.num_bits
        scale = self.delta * dim / (2.0 * math.pi)
        if scale * self.gamma < 1.0 - 1e-9:
            raise ValueError("plan does not resolve the target linewidth")
        if scale * self.omega_max > (dim - 1) * (1.0 + 1e-9):
            raise ValueError("plan does not cover the bandwidth")


def plan_resolution(omega_max: float, gamma: float) -> ResolutionPlan:
    """Smallest register with 2**l >= 1 + omega_max/gamma, delta saturating the linewidth.

    The register grows by at most one bit when gamma halves, matching the
    logarithmic scaling of bits with omega_max/gamma.
    """
    if omega_max <= 0 or gamma <= 0:
        raise ValueError("omega_max and gamma must be positive")
    if gamma >= omega_max:
        raise ValueError("gamma must be below omega_max; nothing to resolve otherwise")
    ratio = 1.0 + omega_max / gamma
    num_bits = 1
    while (1 << num_bits) < ratio:
        num_bits += 1
    delta = 2.0 * math.pi / (gamma * (1 << num_bits))
    return ResolutionPlan(num_bits, delta, omega_max, gamma)
