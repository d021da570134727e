"""Dense state-vector simulation on labelled qubit registers.

Conventions fixed here and relied on by every other module:

* Qubit 0 is the most significant bit of a computational index, so on
  three qubits the state ``|x=2>`` is ``|010>``.  ``tensor_product(a, b)``
  places a's qubits above b's.
* A register is a sequence of distinct qubit positions; its computational
  value is read most-significant-first along that sequence.
* ``inverse_qft`` applies the matrix ``2**(-l/2) * exp(-2j*pi*x*k / 2**l)``,
  so a phase gradient ``exp(+2j*pi*k0*x / 2**l)`` across the register maps
  onto the basis state ``|k0>``.

All operations are pure functions of immutable inputs: amplitude arrays are
never mutated in place and identical inputs produce bit-identical outputs.
Time evolution is computed exactly in the eigenbasis of its generator,
never split into short steps.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterable

import numpy as np

from .errors import (
    DimensionMismatchError,
    HermiticityError,
    NormalizationError,
    RegisterError,
    UnitarityError,
)

#: Hard cap on simultaneously simulated qubits (2**22 amplitudes).
QUBIT_CAP = 22

HERMITICITY_TOL = 1e-10
UNITARITY_TOL = 1e-10
NORM_TOL = 1e-10


@dataclass(frozen=True)
class StateVector:
    """Amplitudes over ``2**num_qubits`` computational states, qubit 0 most significant."""

    num_qubits: int
    amplitudes: np.ndarray
    normalized: bool = True

    def __post_init__(self) -> None:
        if self.num_qubits < 0:
            raise ValueError("num_qubits must be non-negative")
        amps = np.ascontiguousarray(self.amplitudes, dtype=complex)
        object.__setattr__(self, "amplitudes", amps)
        if amps.shape != (1 << self.num_qubits,):
            raise DimensionMismatchError(
                f"expected {1 << self.num_qubits} amplitudes, got shape {amps.shape}"
            )
        if self.normalized:
            err = abs(np.linalg.norm(amps) - 1.0)
            if err > NORM_TOL:
                raise NormalizationError(f"norm deviates from 1 by {err:.3e}")

    @property
    def dim(self) -> int:
        return 1 << self.num_qubits

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))


def basis_state(num_qubits: int, index: int) -> StateVector:
    """The computational basis state ``|index>``."""
    dim = 1 << num_qubits
    if not 0 <= index < dim:
        raise ValueError(f"basis index {index} out of range for {num_qubits} qubits")
    amps = np.zeros(dim, dtype=complex)
    amps[index] = 1.0
    return StateVector(num_qubits, amps)


def plus_state(num_qubits: int) -> StateVector:
    """Uniform superposition over all computational states."""
    dim = 1 << num_qubits
    return StateVector(num_qubits, np.full(dim, 1.0 / np.sqrt(dim), dtype=complex))


def overlap(a: StateVector, b: StateVector) -> complex:
    """Inner product <a|b>."""
    if a.num_qubits != b.num_qubits:
        raise DimensionMismatchError("states live on different registers")
    return complex(np.vdot(a.amplitudes, b.amplitudes))


@dataclass(frozen=True)
class RegisterLayout:
    """Qubit positions of the two system copies, the phase register and an optional ancilla."""

    copy_a: tuple[int, ...]
    copy_b: tuple[int, ...]
    phase: tuple[int, ...]
    prep_ancilla: int | None = None

    @classmethod
    def standard(cls, num_sites: int, num_bits: int, with_ancilla: bool = False) -> "RegisterLayout":
        """Copy a first, copy b second, phase register third, ancilla last (least significant)."""
        a = tuple(range(num_sites))
        b = tuple(range(num_sites, 2 * num_sites))
        ph = tuple(range(2 * num_sites, 2 * num_sites + num_bits))
        anc = 2 * num_sites + num_bits if with_ancilla else None
        return cls(a, b, ph, anc)

    def all_qubits(self) -> tuple[int, ...]:
        anc = () if self.prep_ancilla is None else (self.prep_ancilla,)
        return self.copy_a + self.copy_b + self.phase + anc

    def validate(self, num_qubits: int) -> None:
        """Registers must be pairwise disjoint and cover the state exactly."""
        qs = self.all_qubits()
        if len(set(qs)) != len(qs):
            raise RegisterError("register layout has overlapping qubits")
        if set(qs) != set(range(num_qubits)):
            raise RegisterError(
                f"layout covers {sorted(set(qs))}, state has qubits 0..{num_qubits - 1}"
            )


@dataclass(frozen=True)
class HermitianOperator:
    """Dense Hermitian matrix on a power-of-two dimension."""

    matrix: np.ndarray

    def __post_init__(self) -> None:
        mat = np.ascontiguousarray(self.matrix, dtype=complex)
        object.__setattr__(self, "matrix", mat)
        if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
            raise DimensionMismatchError(f"operator matrix must be square, got {mat.shape}")
        dim = mat.shape[0]
        if dim < 1 or dim & (dim - 1):
            raise DimensionMismatchError(f"dimension {dim} is not a power of two")
        dev = float(np.max(np.abs(mat - mat.conj().T)))
        if dev > HERMITICITY_TOL:
            raise HermiticityError(f"matrix deviates from Hermitian by {dev:.3e}")

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @property
    def num_qubits(self) -> int:
        return self.dim.bit_length() - 1


@dataclass(frozen=True)
class EigenDecomposition:
    """Ascending eigenvalues and a matching unitary of column eigenvectors."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    @property
    def dim(self) -> int:
        return self.eigenvalues.shape[0]

    def apply_function(self, fn: Callable[[np.ndarray], np.ndarray]) -> np.ndarray:
        """The matrix ``V fn(diag) V^dagger``."""
        return (self.eigenvectors * fn(self.eigenvalues)) @ self.eigenvectors.conj().T

    def propagator(self, t: float, sign: int = 1) -> np.ndarray:
        """``exp(1j * sign * t * H)`` as a dense matrix."""
        return self.apply_function(lambda lam: np.exp(1j * sign * t * lam))


def eig_hermitian(operator: HermitianOperator | np.ndarray) -> EigenDecomposition:
    """Full spectral decomposition; rejects non-Hermitian input."""
    if not isinstance(operator, HermitianOperator):
        operator = HermitianOperator(np.asarray(operator))
    vals, vecs = np.linalg.eigh(operator.matrix)
    return EigenDecomposition(vals, vecs)


def tensor_product(a: StateVector, b: StateVector) -> StateVector:
    """Joint state with a's qubits more significant than b's."""
    return StateVector(
        a.num_qubits + b.num_qubits,
        np.kron(a.amplitudes, b.amplitudes),
        normalized=a.normalized and b.normalized,
    )


def _as_register(register: Iterable[int], num_qubits: int, allow_empty: bool = False) -> tuple[int, ...]:
    reg = tuple(int(q) for q in register)
    if not reg and not allow_empty:
        raise RegisterError("empty register")
    if len(set(reg)) != len(reg):
        raise RegisterError(f"register {reg} repeats a qubit")
    for q in reg:
        if not 0 <= q < num_qubits:
            raise RegisterError(f"qubit {q} out of range for a {num_qubits}-qubit state")
    return reg


def _require_unitary(mat: np.ndarray) -> None:
    dim = mat.shape[0]
    dev = float(np.max(np.abs(mat.conj().T @ mat - np.eye(dim))))
    if dev > UNITARITY_TOL:
        raise UnitarityError(f"matrix deviates from unitary by {dev:.3e}")


def apply_unitary(
    state: StateVector,
    matrix: np.ndarray,
    register: Iterable[int],
    validate: bool = True,
) -> StateVector:
    """Apply a register-wide unitary; ``register[0]`` is the operator's most significant bit.

    Set ``validate=False`` only when the caller guarantees unitarity (for
    example a matrix built as ``V exp(i diag) V^dagger``).
    """
    reg = _as_register(register, state.num_qubits)
    k = len(reg)
    mat = np.asarray(matrix, dtype=complex)
    if mat.shape != (1 << k, 1 << k):
        raise DimensionMismatchError(
            f"matrix shape {mat.shape} does not fit a {k}-qubit register"
        )
    if validate:
        _require_unitary(mat)
    psi = state.amplitudes.reshape([2] * state.num_qubits)
    moved = np.moveaxis(psi, reg, range(k))
    out = mat @ moved.reshape(1 << k, -1)
    out = np.moveaxis(out.reshape([2] * state.num_qubits), range(k), reg)
    return StateVector(state.num_qubits, out.reshape(-1), normalized=state.normalized)


def apply_controlled_unitary(
    state: StateVector,
    control: int,
    matrix: np.ndarray | complex,
    target: Iterable[int] = (),
    validate: bool = True,
) -> StateVector:
    """Multiply the control=1 branch by a unitary on ``target``.

    The control=0 branch is untouched.  An empty target with a scalar (or
    1x1) ``matrix`` attaches a pure phase to the control=1 branch.
    """
    n = state.num_qubits
    if not 0 <= control < n:
        raise RegisterError(f"control qubit {control} out of range")
    targets = _as_register(target, n, allow_empty=True)
    if control in targets:
        raise RegisterError("control qubit overlaps the target register")

    psi = state.amplitudes.reshape([2] * n).copy()
    sel = [slice(None)] * n
    sel[control] = 1
    sel = tuple(sel)

    if not targets:
        phase = complex(np.asarray(matrix).reshape(()))
        if abs(abs(phase) - 1.0) > UNITARITY_TOL:
            raise UnitarityError(f"scalar phase has modulus {abs(phase):.12f}")
        psi[sel] = psi[sel] * phase
    else:
        k = len(targets)
        mat = np.asarray(matrix, dtype=complex)
        if mat.shape != (1 << k, 1 << k):
            raise DimensionMismatchError(
                f"matrix shape {mat.shape} does not fit a {k}-qubit target"
            )
        if validate:
            _require_unitary(mat)
        # Target axes inside the control=1 slice shift down by one past the control.
        shifted = tuple(q - (q > control) for q in targets)
        branch = np.moveaxis(psi[sel], shifted, range(k))
        out = mat @ branch.reshape(1 << k, -1)
        out = np.moveaxis(out.reshape([2] * (n - 1)), range(k), shifted)
        psi[sel] = out

    return StateVector(n, psi.reshape(-1), normalized=state.normalized)


def evolve(
    state: StateVector,
    hamiltonian: HermitianOperator | EigenDecomposition | np.ndarray,
    t: float,
    sign: int = 1,
    register: Iterable[int] | None = None,
) -> StateVector:
    """Propagate ``register`` by ``exp(1j * sign * t * H)``, exact in H's eigenbasis."""
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    eig = hamiltonian if isinstance(hamiltonian, EigenDecomposition) else eig_hermitian(hamiltonian)
    reg = tuple(register) if register is not None else tuple(range(state.num_qubits))
    if (1 << len(reg)) != eig.dim:
        raise DimensionMismatchError(
            f"operator dimension {eig.dim} does not match a {len(reg)}-qubit register"
        )
    return apply_unitary(state, eig.propagator(t, sign), reg, validate=False)


def _fourier_matrix(num_bits: int, sign: int) -> np.ndarray:
    dim = 1 << num_bits
    idx = np.arange(dim)
    return np.exp(sign * 2j * np.pi * np.outer(idx, idx) / dim) / np.sqrt(dim)


def inverse_qft(state: StateVector, register: Iterable[int]) -> StateVector:
    """Inverse Fourier transform of the register; see the module docstring for the sign."""
    reg = _as_register(register, state.num_qubits)
    return apply_unitary(state, _fourier_matrix(len(reg), -1), reg, validate=False)


def qft(state: StateVector, register: Iterable[int]) -> StateVector:
    """Adjoint of ``inverse_qft``."""
    reg = _as_register(register, state.num_qubits)
    return apply_unitary(state, _fourier_matrix(len(reg), +1), reg, validate=False)


def register_distribution(state: StateVector, register: Iterable[int]) -> np.ndarray:
    """Marginal outcome probabilities of the register, summed over all other qubits."""
    if abs(state.norm() - 1.0) > NORM_TOL:
        raise NormalizationError("register_distribution requires a normalized state")
    reg = _as_register(register, state.num_qubits)
    n = state.num_qubits
    probs = (np.abs(state.amplitudes) ** 2).reshape([2] * n)
    others = tuple(ax for ax in range(n) if ax not in reg)
    marg = probs.sum(axis=others) if others else probs
    # Remaining axes sit in ascending qubit order; permute into register order.
    order = sorted(reg)
    perm = [order.index(q) for q in reg]
    return marg.transpose(perm).reshape(-1)
