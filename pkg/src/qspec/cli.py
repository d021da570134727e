"""Command-line entry point.

Subcommands:

* ``run``       full pipeline from a JSON config (prep, phase estimation,
                oracle comparison, sampling, CSV + JSON artifacts).
* ``prepstudy`` acceptance probability and fidelity over an angle grid for
                the four synthetic eigenvalue laws.
* ``oracle``    reference spectrum only, from the same config format.
* ``plan``      register size and coupling time for a bandwidth/linewidth pair.

Exit codes: 0 success, 1 configuration error, 2 resource cap exceeded,
3 circuit preparation exhausted its attempt budget.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from .errors import ConfigError, PrepExhaustedError, ResourceCapError
from .experiment import run_experiment, validate_config, with_overrides
from .models import (
    DISTRIBUTION_KINDS,
    EigenvalueDistribution,
    build_operator,
    synthetic_diagonal_observable,
)
from .oracle import spectral_function
from .qpe import plan_resolution
from .simcore import eig_hermitian
from .stateprep import acceptance_probability, preparation_fidelity

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_CAP = 2
EXIT_PREP = 3

_SYNTH_KEY = 3


def _load_config(args: argparse.Namespace):
    path = Path(args.config)
    try:
        raw = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    config = validate_config(raw)
    if args.seed is not None and not 0 <= args.seed < 1 << 64:
        raise ConfigError("--seed must fit in 64 unsigned bits")
    return with_overrides(config, seed=args.seed, output_dir=args.out)


def _cmd_run(args: argparse.Namespace) -> int:
    config = _load_config(args)
    report = run_experiment(config)
    out = Path(config.output_dir).resolve()
    tv = report.distances["exact_vs_oracle"]["total_variation"]
    print(f"run complete: artifacts in {out} (TV circuit vs oracle {tv:.3e})")
    return EXIT_OK


def _cmd_oracle(args: argparse.Namespace) -> int:
    config = _load_config(args)
    hamiltonian = build_operator(config.model)
    observable = build_operator(config.observable)
    vals = eig_hermitian(hamiltonian).eigenvalues
    span = float(vals[-1] - vals[0])
    if config.qpe.auto_plan:
        gamma = config.qpe.gamma
    else:
        gamma = 2.0 * np.pi / (config.qpe.delta * (1 << config.qpe.num_bits))
    reach = 1.2 * span if span > 0 else 1.0
    grid = np.linspace(-reach, reach, 2001)
    table = spectral_function(hamiltonian, observable, grid, gamma, config.ensemble)
    out = Path(config.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    table.to_csv(out / "spectrum.csv")
    table.to_json(out / "spectrum.json")
    print(f"oracle spectrum written to {out.resolve()}")
    return EXIT_OK


def _cmd_prepstudy(args: argparse.Namespace) -> int:
    if args.phi_points < 1 or args.phi_max <= 0:
        raise ConfigError("prepstudy needs a positive angle grid")
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    phis = np.linspace(args.phi_max / args.phi_points, args.phi_max, args.phi_points)
    lines = ["phi,P1,fidelity,distribution,N,seed"]
    for index, kind in enumerate(DISTRIBUTION_KINDS):
        dist = EigenvalueDistribution(kind, 1.0)
        observable = synthetic_diagonal_observable(
            dist, args.num_sites, np.random.SeedSequence(args.seed, spawn_key=(_SYNTH_KEY, index))
        )
        for phi in phis:
            p1 = acceptance_probability(observable, float(phi))
            fid = preparation_fidelity(observable, float(phi))
            lines.append(f"{phi:.17g},{p1:.17g},{fid:.17g},{kind},{args.num_sites},{args.seed}")
    (out / "prepstudy.csv").write_text("\n".join(lines) + "\n")
    print(f"prep study written to {(out / 'prepstudy.csv').resolve()}")
    return EXIT_OK


def _cmd_plan(args: argparse.Namespace) -> int:
    try:
        plan = plan_resolution(args.omega_max, args.gamma)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    print(
        json.dumps(
            {
                "l": plan.num_bits,
                "delta": plan.delta,
                "omega_max": plan.omega_max,
                "gamma": plan.gamma,
            }
        )
    )
    return EXIT_OK


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qspec",
        description="Sample many-body spectral functions with a phase-estimation simulator.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    for name, handler in (("run", _cmd_run), ("oracle", _cmd_oracle)):
        p = sub.add_parser(name)
        p.add_argument("--config", required=True, help="path to the JSON experiment document")
        p.add_argument("--seed", type=int, default=None, help="override the config seed")
        p.add_argument("--out", default=None, help="override the config output directory")
        p.set_defaults(handler=handler)

    p = sub.add_parser("prepstudy")
    p.add_argument("--out", required=True, help="output directory for prepstudy.csv")
    p.add_argument("--num-sites", type=int, default=10)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--phi-max", type=float, default=3.0)
    p.add_argument("--phi-points", type=int, default=60)
    p.set_defaults(handler=_cmd_prepstudy)

    p = sub.add_parser("plan")
    p.add_argument("--omega-max", type=float, required=True)
    p.add_argument("--gamma", type=float, required=True)
    p.set_defaults(handler=_cmd_plan)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.handler(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ResourceCapError as exc:
        print(f"resource cap: {exc}", file=sys.stderr)
        return EXIT_CAP
    except PrepExhaustedError as exc:
        print(f"preparation exhausted: {exc}", file=sys.stderr)
        return EXIT_PREP


if __name__ == "__main__":
    sys.exit(main())
