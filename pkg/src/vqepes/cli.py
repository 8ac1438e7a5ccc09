"""Command-line interface.

Subcommands: ``map`` (fermion-operator file -> Pauli serialization),
``fci`` (oracle energies per point), ``energy`` (one point, one method),
``pes`` (full sweep), ``noise-sim`` (fixed-parameter noisy evaluation).

Exit codes: 0 success, 2 config error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from .ansatz import bind_and_compile
from .encodings import EncodingScheme, map_operator
from .errors import ConfigError, NumericalError
from .fci import fci_ground_energy
from .fermion import FermionOperator
from .hamiltonian import HARTREE_TO_MILLIHARTREE
from .pes import (
    build_method_ansatz,
    build_point_hamiltonian,
    derive_seed,
    load_sweep_config,
    run_sweep,
)
from .simulator import expectation_exact, load_noise_spec, run_noisy, run_statevector
from .vqe import Backend, OptimizerSettings, VqeProblem, minimize, write_trace_csv

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3


def _cmd_map(args) -> int:
    text = Path(args.input).read_text()
    try:
        operator = FermionOperator.from_text(text, args.modes)
    except ValueError as exc:
        raise ConfigError(f"{args.input}: {exc}") from exc
    image = map_operator(operator, EncodingScheme(args.scheme, args.modes))
    output = image.to_text()
    if args.output:
        Path(args.output).write_text(output)
    else:
        sys.stdout.write(output)
    return EXIT_OK


def _cmd_fci(args) -> int:
    cfg = load_sweep_config(args.config)
    lines = ["point_label,e_fci_hartree"]
    for point in cfg.points:
        h, reduced = build_point_hamiltonian(point, cfg.scheme_kind)
        scheme = EncodingScheme(cfg.scheme_kind, 2 * reduced.n_spatial)
        result = fci_ground_energy(h, n_electrons=reduced.n_electrons, scheme=scheme)
        lines.append(f"{point.label},{result.ground_energy!r}")
    output = "\n".join(lines) + "\n"
    if args.output:
        Path(args.output).write_text(output)
    else:
        sys.stdout.write(output)
    return EXIT_OK


def _select(cfg, point_label: str, method_name: str):
    points = {p.label: (i, p) for i, p in enumerate(cfg.points)}
    if point_label not in points:
        raise ConfigError(f"unknown point {point_label!r}; have {sorted(points)}")
    methods = {m.name: (i, m) for i, m in enumerate(cfg.methods)}
    if method_name not in methods:
        raise ConfigError(f"unknown method {method_name!r}; have {sorted(methods)}")
    return points[point_label], methods[method_name]


def _build_problem(cfg, point, method, seed):
    h, reduced = build_point_hamiltonian(point, cfg.scheme_kind)
    scheme = EncodingScheme(cfg.scheme_kind, 2 * reduced.n_spatial)
    ansatz = build_method_ansatz(method, scheme.n_modes, reduced.n_electrons, scheme)
    noise = load_noise_spec(method.noise_spec_path) if method.noise_spec_path else None
    backend = Backend(kind=method.backend, shots=method.shots, seed=seed, noise=noise)
    problem = VqeProblem(
        hamiltonian=h,
        ansatz=ansatz,
        backend=backend,
        optimizer=OptimizerSettings(name=method.optimizer),
    )
    return problem, reduced


def _cmd_energy(args) -> int:
    cfg = load_sweep_config(args.config)
    (point_index, point), (method_index, method) = _select(cfg, args.point, args.method)
    seed = args.seed if args.seed is not None else derive_seed(cfg.seed, method_index, point_index)
    problem, _ = _build_problem(cfg, point, method, seed)
    result = minimize(problem)
    if args.emit_circuit:
        program = bind_and_compile(problem.ansatz, np.asarray(result.optimal_params))
        Path(args.emit_circuit).write_text(program.to_text())
    if args.trace:
        write_trace_csv(result, args.trace)
    print(f"point_label,{point.label}")
    print(f"method,{method.name}")
    print(f"e_abs_hartree,{result.optimal_energy!r}")
    print(f"n_evaluations,{result.n_evaluations}")
    print(f"converged,{str(result.converged).lower()}")
    return EXIT_OK


def _cmd_pes(args) -> int:
    cfg = load_sweep_config(args.config)
    if args.seed is not None:
        import dataclasses

        cfg = dataclasses.replace(cfg, seed=args.seed)
    run_sweep(cfg, out_dir=Path(args.out_dir))
    print(f"wrote {args.out_dir}")
    return EXIT_OK


def _cmd_noise_sim(args) -> int:
    cfg = load_sweep_config(args.config)
    (point_index, point), (method_index, method) = _select(cfg, args.point, args.method)
    if method.noise_spec_path is None:
        raise ConfigError(f"method {method.name!r} has no noise_spec")
    noise = load_noise_spec(method.noise_spec_path)
    h, reduced = build_point_hamiltonian(point, cfg.scheme_kind)
    scheme = EncodingScheme(cfg.scheme_kind, 2 * reduced.n_spatial)
    ansatz = build_method_ansatz(method, scheme.n_modes, reduced.n_electrons, scheme)
    if args.params:
        params = np.array([float(x) for x in args.params.split(",")])
    else:
        params = np.zeros(ansatz.n_parameters)
    program = bind_and_compile(ansatz, params)
    if args.emit_circuit:
        Path(args.emit_circuit).write_text(program.to_text())
    state = run_statevector(program, ansatz.n_qubits)
    e_clean = expectation_exact(state, h)
    rho = run_noisy(program, ansatz.n_qubits, noise)
    e_noisy = expectation_exact(rho, h)
    print(f"point_label,{point.label}")
    print(f"method,{method.name}")
    print(f"e_noiseless_hartree,{e_clean!r}")
    print(f"e_noisy_hartree,{e_noisy!r}")
    print(f"error_mhartree,{(e_noisy - e_clean) * HARTREE_TO_MILLIHARTREE!r}")
    for gate_class, channels in sorted(noise.channels.items()):
        for ch in channels:
            print(f"noise,{gate_class},{ch.name},{ch.rate!r}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="vqepes", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p_map = sub.add_parser("map", help="map a fermion-operator file to a Pauli sum")
    p_map.add_argument("--input", required=True)
    p_map.add_argument("--scheme", required=True, choices=("jw", "parity", "bk"))
    p_map.add_argument("--modes", required=True, type=int)
    p_map.add_argument("--output")
    p_map.set_defaults(fn=_cmd_map)

    p_fci = sub.add_parser("fci", help="oracle energies for every configured point")
    p_fci.add_argument("--config", required=True)
    p_fci.add_argument("--output")
    p_fci.set_defaults(fn=_cmd_fci)

    p_energy = sub.add_parser("energy", help="one point, one method")
    p_energy.add_argument("--config", required=True)
    p_energy.add_argument("--point", required=True)
    p_energy.add_argument("--method", required=True)
    p_energy.add_argument("--seed", type=int)
    p_energy.add_argument("--emit-circuit", dest="emit_circuit")
    p_energy.add_argument("--trace")
    p_energy.set_defaults(fn=_cmd_energy)

    p_pes = sub.add_parser("pes", help="full sweep with output tables")
    p_pes.add_argument("--config", required=True)
    p_pes.add_argument("--out-dir", dest="out_dir", required=True)
    p_pes.add_argument("--seed", type=int)
    p_pes.set_defaults(fn=_cmd_pes)

    p_noise = sub.add_parser("noise-sim", help="fixed-parameter noisy evaluation")
    p_noise.add_argument("--config", required=True)
    p_noise.add_argument("--point", required=True)
    p_noise.add_argument("--method", required=True)
    p_noise.add_argument("--params", help="comma-separated parameter values (default zeros)")
    p_noise.add_argument("--emit-circuit", dest="emit_circuit")
    p_noise.set_defaults(fn=_cmd_noise_sim)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (NumericalError, FileNotFoundError) as exc:
        code = EXIT_CONFIG if isinstance(exc, FileNotFoundError) else EXIT_NUMERICAL
        print(f"error: {exc}", file=sys.stderr)
        return code


if __name__ == "__main__":
    sys.exit(main())
