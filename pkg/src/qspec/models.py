"""Spin-1/2 chain Hamiltonians and observables.

Models are written as sums of Pauli strings and compiled to dense Hermitian
matrices.  Chains use open boundary conditions.  Synthetic diagonal
observables draw their eigenvalues from one of four symmetric laws
(semicircle, uniform, arcsine, gaussian) and are shifted traceless.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import reduce

import numpy as np

from .errors import ResourceCapError
from .simcore import HermitianOperator

#: Largest chain compiled to a dense matrix (doubled-system use stays in cap).
MAX_SITES = 11

_PAULI = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}


@dataclass(frozen=True)
class PauliTerm:
    """One weighted Pauli string, e.g. ``0.5 * ZZI``."""

    coefficient: float
    factors: str

    def __post_init__(self) -> None:
        if not math.isfinite(self.coefficient):
            raise ValueError("coefficient must be finite")
        if not self.factors or any(c not in _PAULI for c in self.factors):
            raise ValueError(f"factors must be a non-empty string over IXYZ, got {self.factors!r}")


@dataclass(frozen=True)
class ModelSpec:
    """A named sum of Pauli strings on ``num_sites`` spins."""

    num_sites: int
    terms: tuple[PauliTerm, ...]
    name: str = ""

    def __post_init__(self) -> None:
        object.__setattr__(self, "terms", tuple(self.terms))
        if self.num_sites < 1:
            raise ValueError("num_sites must be at least 1")
        if not self.terms:
            raise ValueError("model needs at least one term")
        for term in self.terms:
            if len(term.factors) != self.num_sites:
                raise ValueError(
                    f"term {term.factors!r} does not cover {self.num_sites} sites"
                )

    def to_dict(self) -> dict:
        return {
            "N": self.num_sites,
            "name": self.name,
            "terms": [{"coefficient": t.coefficient, "factors": t.factors} for t in self.terms],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "ModelSpec":
        terms = tuple(
            PauliTerm(float(t["coefficient"]), str(t["factors"])) for t in data["terms"]
        )
        return cls(int(data["N"]), terms, str(data.get("name", "")))


def build_operator(spec: ModelSpec) -> HermitianOperator:
    """Compile the Pauli sum to a dense matrix (real coefficients keep it Hermitian)."""
    if spec.num_sites > MAX_SITES:
        raise ResourceCapError(
            f"{spec.num_sites} sites exceed the dense-matrix cap of {MAX_SITES}"
        )
    dim = 1 << spec.num_sites
    total = np.zeros((dim, dim), dtype=complex)
    for term in spec.terms:
        total += term.coefficient * reduce(np.kron, [_PAULI[c] for c in term.factors])
    return HermitianOperator(total)


def _string(num_sites: int, placed: dict[int, str]) -> str:
    return "".join(placed.get(i, "I") for i in range(num_sites))


def tilted_ising(num_sites: int, g: float = 1.05, h: float = 0.5) -> ModelSpec:
    """Nearest-neighbour ZZ chain with transverse field g and longitudinal tilt h.

    With both fields on, the chain is nonintegrable; h=0 recovers the plain
    transverse-field model.
    """
    terms = [PauliTerm(1.0, _string(num_sites, {i: "Z", i + 1: "Z"})) for i in range(num_sites - 1)]
    terms += [PauliTerm(g, _string(num_sites, {i: "X"})) for i in range(num_sites)]
    if h != 0.0:
        terms += [PauliTerm(h, _string(num_sites, {i: "Z"})) for i in range(num_sites)]
    return ModelSpec(num_sites, tuple(terms), name=f"tilted_ising(g={g},h={h})")


def heisenberg(num_sites: int, coupling: float = 1.0) -> ModelSpec:
    """Isotropic nearest-neighbour XX+YY+ZZ chain."""
    terms = []
    for i in range(num_sites - 1):
        for axis in "XYZ":
            terms.append(PauliTerm(coupling, _string(num_sites, {i: axis, i + 1: axis})))
    return ModelSpec(num_sites, tuple(terms), name=f"heisenberg(J={coupling})")


def total_magnetization(num_sites: int) -> HermitianOperator:
    """Sum of sigma^z over all sites; diagonal entry is N - 2*popcount(bits)."""
    if num_sites < 1:
        raise ValueError("num_sites must be at least 1")
    bits = np.arange(1 << num_sites, dtype=np.uint64)
    pop = np.array([int(b).bit_count() for b in bits], dtype=float)
    return HermitianOperator(np.diag(num_sites - 2.0 * pop))


def site_magnetization(num_sites: int, site: int = 0) -> HermitianOperator:
    """sigma^z on one site (site 0 is the most significant qubit)."""
    if not 0 <= site < num_sites:
        raise ValueError(f"site {site} out of range")
    idx = np.arange(1 << num_sites)
    vals = np.where((idx >> (num_sites - 1 - site)) & 1 == 0, 1.0, -1.0)
    return HermitianOperator(np.diag(vals))


def staggered_magnetization(num_sites: int) -> HermitianOperator:
    """Alternating sum (-1)^i sigma^z_i."""
    diag = np.zeros(1 << num_sites)
    idx = np.arange(1 << num_sites)
    for i in range(num_sites):
        bit = (idx >> (num_sites - 1 - i)) & 1
        diag += (-1.0) ** i * np.where(bit == 0, 1.0, -1.0)
    return HermitianOperator(np.diag(diag))


OBSERVABLE_PRESETS = ("total_sz", "site_sz", "staggered_sz")


def observable_spec(name: str, num_sites: int, site: int = 0) -> ModelSpec:
    """The named observable preset written out as a Pauli sum."""
    if name == "total_sz":
        terms = tuple(PauliTerm(1.0, _string(num_sites, {i: "Z"})) for i in range(num_sites))
    elif name == "site_sz":
        if not 0 <= site < num_sites:
            raise ValueError(f"site {site} out of range")
        terms = (PauliTerm(1.0, _string(num_sites, {site: "Z"})),)
    elif name == "staggered_sz":
        terms = tuple(
            PauliTerm((-1.0) ** i, _string(num_sites, {i: "Z"})) for i in range(num_sites)
        )
    else:
        raise ValueError(f"unknown observable preset {name!r}; choose from {OBSERVABLE_PRESETS}")
    return ModelSpec(num_sites, terms, name=name)


DISTRIBUTION_KINDS = ("semicircle", "uniform", "arcsine", "gaussian")


@dataclass(frozen=True)
class EigenvalueDistribution:
    """A symmetric eigenvalue law: semicircle(R), uniform(a), arcsine(a) or gaussian(sigma)."""

    kind: str
    parameter: float = 1.0

    def __post_init__(self) -> None:
        if self.kind not in DISTRIBUTION_KINDS:
            raise ValueError(f"unknown distribution {self.kind!r}; choose from {DISTRIBUTION_KINDS}")
        if not (math.isfinite(self.parameter) and self.parameter > 0):
            raise ValueError("distribution parameter must be positive and finite")


def analytic_moments(dist: EigenvalueDistribution) -> tuple[float, float, float]:
    """Exact (m2, m3, m4) of the law; all four laws are symmetric, so m3 = 0."""
    p = dist.parameter
    if dist.kind == "semicircle":
        return p**2 / 4.0, 0.0, p**4 / 8.0
    if dist.kind == "uniform":
        return p**2 / 3.0, 0.0, p**4 / 5.0
    if dist.kind == "arcsine":
        return p**2 / 2.0, 0.0, 3.0 * p**4 / 8.0
    return p**2, 0.0, 3.0 * p**4  # gaussian


def sample_eigenvalues(dist: EigenvalueDistribution, size: int, rng: np.random.Generator) -> np.ndarray:
    p = dist.parameter
    if dist.kind == "uniform":
        return rng.uniform(-p, p, size)
    if dist.kind == "gaussian":
        return rng.normal(0.0, p, size)
    if dist.kind == "arcsine":
        return p * np.cos(np.pi * rng.random(size))
    # Semicircle by rejection in the unit disk: x | x^2 + y^2 <= 1 is semicircular.
    out = np.empty(size)
    filled = 0
    while filled < size:
        x = rng.uniform(-1.0, 1.0, 2 * (size - filled))
        y = rng.uniform(-1.0, 1.0, 2 * (size - filled))
        keep = x[x * x + y * y <= 1.0]
        take = min(keep.size, size - filled)
        out[filled : filled + take] = keep[:take]
        filled += take
    return p * out


def synthetic_diagonal_observable(
    dist: EigenvalueDistribution, num_sites: int, seed: int
) -> HermitianOperator:
    """Diagonal observable with 2**N seeded i.i.d. eigenvalues, shifted traceless."""
    if num_sites > MAX_SITES:
        raise ResourceCapError(
            f"{num_sites} sites exceed the dense-matrix cap of {MAX_SITES}"
        )
    rng = np.random.default_rng(seed)
    vals = sample_eigenvalues(dist, 1 << num_sites, rng)
    vals = vals - vals.mean()
    return HermitianOperator(np.diag(vals))
