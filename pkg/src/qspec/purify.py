"""Purified states on the doubled register.

A state on two copies of an N-site system is stored with copy a on the
high qubits and copy b on the low qubits, so its amplitudes reshape to a
``(2**N, 2**N)`` matrix M with ``M[i, j]`` the amplitude of ``|i>|j>``.
In that picture the maximally entangled pair state is the identity matrix
over sqrt(2**N), applying an operator to copy a is a left matrix product,
and the Gibbs purification at inverse temperature beta is the normalized
matrix ``exp(-beta*H/2)``.

The Gibbs construction therefore carries a conjugation on copy b relative
to the plain eigenvector sum; the two coincide whenever the eigenbasis can
be chosen real, and the matrix form keeps the beta=0 limit exactly equal
to the entangled pair state for every Hermitian input.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    DimensionMismatchError,
    ResourceCapError,
    ZeroNormError,
    ZeroOperatorError,
)
from .simcore import (
    QUBIT_CAP,
    EigenDecomposition,
    HermitianOperator,
    StateVector,
    eig_hermitian,
)

ENSEMBLE_KINDS = ("infinite_temperature", "ground_state", "gibbs")


@dataclass(frozen=True)
class EnsembleSpec:
    """Which base state the operator is purified against."""

    kind: str
    beta: float | None = None

    def __post_init__(self) -> None:
        if self.kind not in ENSEMBLE_KINDS:
            raise ValueError(f"unknown ensemble {self.kind!r}; choose from {ENSEMBLE_KINDS}")
        if self.kind == "gibbs":
            if self.beta is None or not math.isfinite(self.beta) or self.beta < 0:
                raise ValueError("gibbs ensemble needs a finite beta >= 0")
        elif self.beta is not None:
            raise ValueError(f"{self.kind} ensemble takes no beta")


INFINITE_TEMPERATURE = EnsembleSpec("infinite_temperature")
GROUND_STATE = EnsembleSpec("ground_state")


def gibbs(beta: float) -> EnsembleSpec:
    return EnsembleSpec("gibbs", float(beta))


def _check_cap(num_sites: int) -> None:
    if 2 * num_sites > QUBIT_CAP:
        raise ResourceCapError(
            f"two copies of {num_sites} sites exceed the {QUBIT_CAP}-qubit cap"
        )


def entangled_pair_state(num_sites: int) -> StateVector:
    """Product of Bell pairs between the system and its copy: 2**(-N/2) sum_z |z>|z>."""
    if num_sites < 1:
        raise ValueError("num_sites must be at least 1")
    _check_cap(num_sites)
    dim = 1 << num_sites
    m = np.eye(dim, dtype=complex) / np.sqrt(dim)
    return StateVector(2 * num_sites, m.reshape(-1))


def purify_operator(operator: HermitianOperator) -> StateVector:
    """Normalized operator state: (O tensor 1) applied to the entangled pair state.

    Equals ``sum_i O_i |i>|i> / sqrt(tr O^2)`` whenever the eigenbasis of O
    can be chosen real, and stays well defined under degeneracies.
    """
    m = operator.matrix
    norm_sq = float(np.sum(np.abs(m) ** 2))  # tr(O^dagger O) = tr O^2 for Hermitian O
    if norm_sq <= 1e-24:
        raise ZeroOperatorError("cannot normalize the state of a zero operator")
    _check_cap(operator.num_qubits)
    return StateVector(2 * operator.num_qubits, m.reshape(-1) / np.sqrt(norm_sq))


def purify_gibbs(hamiltonian: HermitianOperator, beta: float) -> StateVector:
    """Gibbs purification: the normalized matrix exp(-beta*H/2) on the doubled register.

    Eigenvalues are shifted by the ground-state energy before exponentiation,
    so large beta cannot overflow; the normalization absorbs the shift.
    """
    if not (math.isfinite(beta) and beta >= 0):
        raise ValueError("beta must be finite and non-negative")
    eig = eig_hermitian(hamiltonian)
    _check_cap(hamiltonian.num_qubits)
    weights = np.exp(-0.5 * beta * (eig.eigenvalues - eig.eigenvalues[0]))
    m = (eig.eigenvectors * weights) @ eig.eigenvectors.conj().T
    amps = m.reshape(-1)
    return StateVector(2 * hamiltonian.num_qubits, amps / np.linalg.norm(amps))


def ground_state_degeneracy(hamiltonian: HermitianOperator, tol: float = 1e-9) -> int:
    """Number of eigenvalues within ``tol`` (scaled by the spectral span) of the minimum."""
    vals = eig_hermitian(hamiltonian).eigenvalues
    span = float(vals[-1] - vals[0])
    return int(np.sum(vals - vals[0] <= tol * max(1.0, span)))


def base_state(
    ensemble: EnsembleSpec,
    hamiltonian: HermitianOperator | None = None,
    num_sites: int | None = None,
) -> StateVector:
    """The doubled-register state the operator is applied to.

    Infinite temperature needs only the site count (the entangled pair
    state); ground state and Gibbs need the Hamiltonian.  A degenerate
    ground level uses the lowest-index eigenvector.
    """
    if ensemble.kind == "infinite_temperature":
        if num_sites is None:
            if hamiltonian is None:
                raise ValueError("infinite temperature needs num_sites or a Hamiltonian")
            num_sites = hamiltonian.num_qubits
        return entangled_pair_state(num_sites)
    if hamiltonian is None:
        raise ValueError(f"{ensemble.kind} base state requires the Hamiltonian")
    if ensemble.kind == "gibbs":
        return purify_gibbs(hamiltonian, ensemble.beta)
    _check_cap(hamiltonian.num_qubits)
    psi0 = eig_hermitian(hamiltonian).eigenvectors[:, 0]
    # Copy b holds the same ground state as a phase reference, not a conjugate:
    # it must stay an eigenvector of H under the backward evolution.
    return StateVector(2 * hamiltonian.num_qubits, np.kron(psi0, psi0))


def thermal_operator_state(
    operator: HermitianOperator,
    hamiltonian: HermitianOperator | None,
    ensemble: EnsembleSpec,
) -> StateVector:
    """Normalized (O tensor 1) applied to the ensemble's base state."""
    if hamiltonian is not None and hamiltonian.dim != operator.dim:
        raise DimensionMismatchError(
            f"operator dim {operator.dim} vs Hamiltonian dim {hamiltonian.dim}"
        )
    base = base_state(ensemble, hamiltonian=hamiltonian, num_sites=operator.num_qubits)
    dim = operator.dim
    m = operator.matrix @ base.amplitudes.reshape(dim, dim)
    norm = float(np.linalg.norm(m))
    if norm <= 1e-12:
        raise ZeroNormError("operator annihilates the base state")
    return StateVector(base.num_qubits, m.reshape(-1) / norm)


def ensemble_populations(eig: EigenDecomposition, ensemble: EnsembleSpec) -> np.ndarray:
    """Diagonal occupation of each eigenstate in the ensemble's density matrix."""
    dim = eig.dim
    if ensemble.kind == "infinite_temperature":
        return np.full(dim, 1.0 / dim)
    if ensemble.kind == "gibbs":
        w = np.exp(-ensemble.beta * (eig.eigenvalues - eig.eigenvalues[0]))
        return w / w.sum()
    pops = np.zeros(dim)
    pops[0] = 1.0
    return pops
