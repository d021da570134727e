"""Configuration-driven experiment runner.

One JSON document describes model, observable, ensemble, preparation, phase
estimation and sampling, and one 64-bit master seed makes the whole run
reproducible: component generators derive from it through fixed spawn keys,
``(1, attempt)`` for preparation attempts and ``(2,)`` for shot sampling,
so no amount of internal parallelism can reorder draws.

A run writes ``report.json`` plus two CSV files (``distribution.csv`` with
columns f, omega, p_exact, p_oracle and optionally p_empirical;
``spectrum.csv`` with columns omega, sigma).  Floats are printed with 17
significant digits, which round-trips IEEE doubles exactly, so identical
configs produce byte-identical CSV output.
"""

from __future__ import annotations

import json
import math
import platform
import time
from dataclasses import dataclass, replace
from importlib import metadata as importlib_metadata
from pathlib import Path

import numpy as np

from .errors import ConfigError, PrepExhaustedError, ResourceCapError
from .models import (
    MAX_SITES,
    ModelSpec,
    OBSERVABLE_PRESETS,
    build_operator,
    heisenberg,
    observable_spec,
    tilted_ising,
)
from .oracle import (
    SpectrumTable,
    distribution_distance,
    exact_outcome_distribution,
    spectral_function,
)
from .purify import EnsembleSpec, ground_state_degeneracy, thermal_operator_state
from .qpe import (
    PhaseDistribution,
    ResolutionPlan,
    plan_resolution,
    run_qpe,
    sample_outcomes,
)
from .simcore import QUBIT_CAP, eig_hermitian
from .stateprep import choose_phi, run_prep_circuit, success_probability_bound

SCHEMA_VERSION = 1

_PREP_KEY = 1
_SHOT_KEY = 2

_MODEL_PRESETS = ("tilted_ising", "heisenberg")


def _package_version() -> str:
    try:
        return importlib_metadata.version("qspec")
    except importlib_metadata.PackageNotFoundError:
        return "unknown"


@dataclass(frozen=True)
class PrepSettings:
    mode: str = "exact"
    epsilon: float = 0.01
    max_attempts: int = 1000


@dataclass(frozen=True)
class QpeSettings:
    num_bits: int | None = None
    delta: float | None = None
    gamma: float | None = None
    auto_plan: bool = False


@dataclass(frozen=True)
class ExperimentConfig:
    model: ModelSpec
    observable: ModelSpec
    ensemble: EnsembleSpec
    prep: PrepSettings
    qpe: QpeSettings
    shots: int
    seed: int
    output_dir: str

    def to_dict(self) -> dict:
        if self.qpe.auto_plan:
            qpe = {"gamma": self.qpe.gamma, "auto_plan": True}
        else:
            qpe = {"l": self.qpe.num_bits, "delta": self.qpe.delta}
        return {
            "model": self.model.to_dict(),
            "observable": self.observable.to_dict(),
            "ensemble": {"kind": self.ensemble.kind, "beta": self.ensemble.beta},
            "prep": {
                "mode": self.prep.mode,
                "epsilon": self.prep.epsilon,
                "max_attempts": self.prep.max_attempts,
            },
            "qpe": qpe,
            "shots": self.shots,
            "seed": self.seed,
            "output_dir": self.output_dir,
        }


def _reject_unknown(obj: dict, allowed: tuple[str, ...], path: str) -> None:
    for key in obj:
        if key not in allowed:
            raise ConfigError(f"{path}.{key}: unknown field" if path else f"{key}: unknown field")


def _require(obj: dict, key: str, path: str):
    if key not in obj:
        raise ConfigError(f"{path}.{key}: required field missing" if path else f"{key}: required field missing")
    return obj[key]


def _as_int(value, path: str, minimum: int | None = None) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigError(f"{path}: expected an integer, got {value!r}")
    if minimum is not None and value < minimum:
        raise ConfigError(f"{path}: must be >= {minimum}, got {value}")
    return value


def _as_number(value, path: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{path}: expected a number, got {value!r}")
    if not math.isfinite(float(value)):
        raise ConfigError(f"{path}: must be finite")
    return float(value)


def _parse_terms(obj: dict, path: str) -> ModelSpec:
    _reject_unknown(obj, ("N", "terms", "name"), path)
    num_sites = _as_int(_require(obj, "N", path), f"{path}.N", minimum=1)
    raw_terms = _require(obj, "terms", path)
    if not isinstance(raw_terms, list) or not raw_terms:
        raise ConfigError(f"{path}.terms: expected a non-empty list")
    for index, term in enumerate(raw_terms):
        if not isinstance(term, dict):
            raise ConfigError(f"{path}.terms[{index}]: expected an object")
        _reject_unknown(term, ("coefficient", "factors"), f"{path}.terms[{index}]")
        _require(term, "coefficient", f"{path}.terms[{index}]")
        _require(term, "factors", f"{path}.terms[{index}]")
    try:
        spec = ModelSpec.from_dict({"N": num_sites, "terms": raw_terms, "name": obj.get("name", "")})
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{path}.terms: {exc}") from exc
    return spec


def _parse_model(obj, path: str) -> ModelSpec:
    if not isinstance(obj, dict):
        raise ConfigError(f"{path}: expected an object")
    if "preset" in obj:
        preset = obj["preset"]
        if preset == "tilted_ising":
            _reject_unknown(obj, ("preset", "N", "g", "h"), path)
            num_sites = _as_int(_require(obj, "N", path), f"{path}.N", minimum=1)
            return tilted_ising(
                num_sites,
                g=_as_number(obj.get("g", 1.05), f"{path}.g"),
                h=_as_number(obj.get("h", 0.5), f"{path}.h"),
            )
        if preset == "heisenberg":
            _reject_unknown(obj, ("preset", "N", "coupling"), path)
            num_sites = _as_int(_require(obj, "N", path), f"{path}.N", minimum=2)
            return heisenberg(num_sites, coupling=_as_number(obj.get("coupling", 1.0), f"{path}.coupling"))
        raise ConfigError(f"{path}.preset: unknown preset {preset!r}; choose from {_MODEL_PRESETS}")
    return _parse_terms(obj, path)


def _parse_observable(obj, num_sites: int, path: str) -> ModelSpec:
    if isinstance(obj, str):
        if obj not in OBSERVABLE_PRESETS:
            raise ConfigError(f"{path}: unknown preset {obj!r}; choose from {OBSERVABLE_PRESETS}")
        return observable_spec(obj, num_sites)
    if not isinstance(obj, dict):
        raise ConfigError(f"{path}: expected a preset name or an object")
    if "preset" in obj:
        _reject_unknown(obj, ("preset", "site"), path)
        name = obj["preset"]
        if name not in OBSERVABLE_PRESETS:
            raise ConfigError(f"{path}.preset: unknown preset {name!r}; choose from {OBSERVABLE_PRESETS}")
        site = _as_int(obj.get("site", 0), f"{path}.site", minimum=0)
        try:
            return observable_spec(name, num_sites, site=site)
        except ValueError as exc:
            raise ConfigError(f"{path}.site: {exc}") from exc
    spec = _parse_terms(obj, path)
    if spec.num_sites != num_sites:
        raise ConfigError(f"{path}.N: observable covers {spec.num_sites} sites, model has {num_sites}")
    return spec


def _parse_ensemble(obj, path: str) -> EnsembleSpec:
    if not isinstance(obj, dict):
        raise ConfigError(f"{path}: expected an object")
    _reject_unknown(obj, ("kind", "beta"), path)
    kind = _require(obj, "kind", path)
    try:
        if kind == "gibbs":
            return EnsembleSpec("gibbs", _as_number(_require(obj, "beta", path), f"{path}.beta"))
        if "beta" in obj:
            raise ConfigError(f"{path}.beta: only the gibbs ensemble takes beta")
        return EnsembleSpec(kind)
    except ValueError as exc:
        raise ConfigError(f"{path}.kind: {exc}") from exc


def _parse_prep(obj, path: str) -> PrepSettings:
    if not isinstance(obj, dict):
        raise ConfigError(f"{path}: expected an object")
    _reject_unknown(obj, ("mode", "epsilon", "max_attempts"), path)
    mode = obj.get("mode", "exact")
    if mode not in ("exact", "circuit"):
        raise ConfigError(f"{path}.mode: must be exact or circuit, got {mode!r}")
    epsilon = _as_number(obj.get("epsilon", 0.01), f"{path}.epsilon")
    if not 0.0 < epsilon < 1.0:
        raise ConfigError(f"{path}.epsilon: must lie strictly between 0 and 1")
    max_attempts = _as_int(obj.get("max_attempts", 1000), f"{path}.max_attempts", minimum=1)
    return PrepSettings(mode, epsilon, max_attempts)


def _parse_qpe(obj, path: str) -> QpeSettings:
    if not isinstance(obj, dict):
        raise ConfigError(f"{path}: expected an object")
    _reject_unknown(obj, ("l", "delta", "gamma", "auto_plan"), path)
    explicit = "l" in obj or "delta" in obj
    auto = "gamma" in obj or "auto_plan" in obj
    if explicit and auto:
        raise ConfigError(f"{path}: (l, delta) conflicts with (gamma, auto_plan); provide exactly one form")
    if explicit:
        num_bits = _as_int(_require(obj, "l", path), f"{path}.l", minimum=1)
        delta = _as_number(_require(obj, "delta", path), f"{path}.delta")
        if delta <= 0:
            raise ConfigError(f"{path}.delta: must be positive")
        return QpeSettings(num_bits=num_bits, delta=delta)
    if auto:
        if obj.get("auto_plan") is not True:
            raise ConfigError(f"{path}.auto_plan: must be true when planning from gamma")
        gamma = _as_number(_require(obj, "gamma", path), f"{path}.gamma")
        if gamma <= 0:
            raise ConfigError(f"{path}.gamma: must be positive")
        return QpeSettings(gamma=gamma, auto_plan=True)
    raise ConfigError(f"{path}: provide either (l, delta) or (gamma, auto_plan)")


def validate_config(raw: str | dict) -> ExperimentConfig:
    """Parse and validate a JSON experiment document, applying defaults."""
    if isinstance(raw, str):
        try:
            document = json.loads(raw)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"invalid JSON: {exc}") from exc
    else:
        document = raw
    if not isinstance(document, dict):
        raise ConfigError("top level: expected a JSON object")
    _reject_unknown(
        document,
        ("model", "observable", "ensemble", "prep", "qpe", "shots", "seed", "output_dir"),
        "",
    )
    model = _parse_model(_require(document, "model", ""), "model")
    if model.num_sites > MAX_SITES:
        raise ConfigError(f"model.N: {model.num_sites} sites exceed the cap of {MAX_SITES}")
    observable = _parse_observable(_require(document, "observable", ""), model.num_sites, "observable")
    ensemble = _parse_ensemble(document.get("ensemble", {"kind": "infinite_temperature"}), "ensemble")
    prep = _parse_prep(document.get("prep", {}), "prep")
    qpe_settings = _parse_qpe(_require(document, "qpe", ""), "qpe")
    shots = _as_int(document.get("shots", 0), "shots", minimum=0)
    seed = _as_int(document.get("seed", 0), "seed", minimum=0)
    if seed >= 1 << 64:
        raise ConfigError("seed: must fit in 64 bits")
    output_dir = document.get("output_dir", "runs")
    if not isinstance(output_dir, str) or not output_dir:
        raise ConfigError("output_dir: expected a non-empty string")
    return ExperimentConfig(model, observable, ensemble, prep, qpe_settings, shots, seed, output_dir)


@dataclass(frozen=True)
class ExperimentReport:
    """Everything one run produced, serializable to JSON plus two CSV files."""

    config: ExperimentConfig
    plan: ResolutionPlan | None
    prep_stats: dict
    exact_distribution: PhaseDistribution
    oracle_distribution: PhaseDistribution
    empirical_distribution: PhaseDistribution | None
    spectrum: SpectrumTable
    distances: dict
    metadata: dict

    def to_dict(self) -> dict:
        plan = None
        if self.plan is not None:
            plan = {
                "l": self.plan.num_bits,
                "delta": self.plan.delta,
                "omega_max": self.plan.omega_max,
                "gamma": self.plan.gamma,
            }
        dist = self.exact_distribution
        return {
            "schema_version": SCHEMA_VERSION,
            "config": self.config.to_dict(),
            "plan": plan,
            "prep": self.prep_stats,
            "distribution": {
                "f": list(range(1 << dist.num_bits)),
                "omega": dist.frequencies().tolist(),
                "p_exact": dist.probabilities.tolist(),
                "p_oracle": self.oracle_distribution.probabilities.tolist(),
                "p_empirical": (
                    None
                    if self.empirical_distribution is None
                    else self.empirical_distribution.probabilities.tolist()
                ),
            },
            "spectrum": {
                "gamma": self.spectrum.gamma,
                "omega": self.spectrum.frequencies.tolist(),
                "sigma": self.spectrum.values.tolist(),
            },
            "distances": self.distances,
            "metadata": self.metadata,
        }

    def write(self, output_dir: str | Path) -> Path:
        out = Path(output_dir)
        out.mkdir(parents=True, exist_ok=True)
        (out / "report.json").write_text(json.dumps(self.to_dict(), indent=2) + "\n")

        dist = self.exact_distribution
        freqs = dist.frequencies()
        empirical = self.empirical_distribution
        header = "f,omega,p_exact,p_oracle" + (",p_empirical" if empirical is not None else "")
        lines = [header]
        for f in range(1 << dist.num_bits):
            row = (
                f"{f},{freqs[f]:.17g},{dist.probabilities[f]:.17g},"
                f"{self.oracle_distribution.probabilities[f]:.17g}"
            )
            if empirical is not None:
                row += f",{empirical.probabilities[f]:.17g}"
            lines.append(row)
        (out / "distribution.csv").write_text("\n".join(lines) + "\n")
        self.spectrum.to_csv(out / "spectrum.csv")
        return out


def _auto_plan(config: ExperimentConfig, hamiltonian) -> ResolutionPlan:
    vals = eig_hermitian(hamiltonian).eigenvalues
    span = float(vals[-1] - vals[0])
    # Two-sided ensembles populate both signs of frequency, so the full
    # band to alias-protect is twice the spectral span.
    omega_max = span if config.ensemble.kind == "ground_state" else 2.0 * span
    if omega_max <= 0:
        raise ConfigError("qpe.auto_plan: model spectrum has zero bandwidth; give l and delta explicitly")
    if config.qpe.gamma >= omega_max:
        raise ConfigError(
            f"qpe.gamma: {config.qpe.gamma} does not resolve anything below the bandwidth {omega_max:.6g}"
        )
    return plan_resolution(omega_max, config.qpe.gamma)


def run_experiment(config: ExperimentConfig) -> ExperimentReport:
    """Run the full pipeline and write all artifacts to ``config.output_dir``."""
    timings: dict[str, float] = {}
    t_total = time.perf_counter()

    t0 = time.perf_counter()
    hamiltonian = build_operator(config.model)
    observable = build_operator(config.observable)
    timings["build_s"] = time.perf_counter() - t0

    plan = None
    if config.qpe.auto_plan:
        plan = _auto_plan(config, hamiltonian)
        num_bits, delta = plan.num_bits, plan.delta
    else:
        num_bits, delta = config.qpe.num_bits, config.qpe.delta
    total_qubits = 2 * config.model.num_sites + num_bits + 1
    if total_qubits > QUBIT_CAP:
        raise ResourceCapError(
            f"run needs {total_qubits} qubits (2N + l + 1), cap is {QUBIT_CAP}"
        )

    t0 = time.perf_counter()
    prep_stats: dict = {"mode": config.prep.mode}
    if config.prep.mode == "exact":
        prepared = thermal_operator_state(observable, hamiltonian, config.ensemble)
    else:
        phi = choose_phi(observable, config.prep.epsilon, config.ensemble, hamiltonian)
        bound = success_probability_bound(
            observable, config.prep.epsilon, config.ensemble, hamiltonian
        )
        outcome = None
        attempts = 0
        for attempt in range(config.prep.max_attempts):
            outcome = run_prep_circuit(
                observable,
                phi,
                config.ensemble,
                seed=np.random.SeedSequence(config.seed, spawn_key=(_PREP_KEY, attempt)),
                hamiltonian=hamiltonian,
            )
            attempts += 1
            if outcome.accepted:
                break
        if outcome is None or not outcome.accepted:
            raise PrepExhaustedError(
                f"no acceptance in {attempts} attempts; exact acceptance probability "
                f"is {outcome.acceptance_probability:.6f}"
            )
        prepared = outcome.post_state
        prep_stats.update(
            phi=phi,
            epsilon=config.prep.epsilon,
            attempts=attempts,
            acceptance_probability=outcome.acceptance_probability,
            fidelity_with_target=outcome.fidelity_with_target,
            predicted_p1=bound.predicted_p1,
            spectral_bound=bound.spectral_bound,
            rank_bound=bound.rank_bound,
            o_max=bound.o_max,
            o_min=bound.o_min,
            rank=bound.rank,
        )
    timings["prep_s"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    exact = run_qpe(prepared, hamiltonian, num_bits, delta)
    timings["qpe_s"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    reference = exact_outcome_distribution(hamiltonian, observable, num_bits, delta, config.ensemble)
    gamma_eff = config.qpe.gamma if config.qpe.auto_plan else 2.0 * math.pi / (delta * (1 << num_bits))
    grid = np.sort(exact.frequencies())
    spectrum = spectral_function(hamiltonian, observable, grid, gamma_eff, config.ensemble)
    timings["oracle_s"] = time.perf_counter() - t0

    empirical = None
    if config.shots > 0:
        empirical = sample_outcomes(
            exact, config.shots, np.random.SeedSequence(config.seed, spawn_key=(_SHOT_KEY,))
        )

    distances = {
        "exact_vs_oracle": {
            "total_variation": distribution_distance(exact, reference, "total_variation"),
            "max_abs": distribution_distance(exact, reference, "max_abs"),
        }
    }
    if empirical is not None:
        distances["empirical_vs_exact"] = {
            "total_variation": distribution_distance(empirical, exact, "total_variation"),
            "max_abs": distribution_distance(empirical, exact, "max_abs"),
        }

    metadata = {
        "package_version": _package_version(),
        "numpy_version": np.__version__,
        "python_version": platform.python_version(),
        "seed": config.seed,
        "qpe": {"l": num_bits, "delta": delta},
        "timings": timings,
    }
    if config.ensemble.kind == "ground_state":
        metadata["ground_state_degeneracy"] = ground_state_degeneracy(hamiltonian)
    timings["total_s"] = time.perf_counter() - t_total

    report = ExperimentReport(
        config=config,
        plan=plan,
        prep_stats=prep_stats,
        exact_distribution=exact,
        oracle_distribution=reference,
        empirical_distribution=empirical,
        spectrum=spectrum,
        distances=distances,
        metadata=metadata,
    )
    report.write(config.output_dir)
    return report


def with_overrides(
    config: ExperimentConfig,
    seed: int | None = None,
    output_dir: str | None = None,
) -> ExperimentConfig:
    """Copy of the config with the command-line overrides applied."""
    updates: dict = {}
    if seed is not None:
        updates["seed"] = seed
    if output_dir is not None:
        updates["output_dir"] = output_dir
    return replace(config, **updates) if updates else config
