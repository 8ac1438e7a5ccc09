"""Acceptance criteria, one test per criterion.

Each test prints ``[ACCEPTANCE] <criterion>: PASS`` (or FAIL) and
asserts its stated tolerance and runtime budget.  Statistical criteria
run at fixed seeds, as everywhere in the package; all inputs are the
committed fixtures.  Run with ``pytest tests/test_acceptance.py -s`` to
see the summary lines inline.
"""

import contextlib
import filecmp
import sys
import time
from pathlib import Path

import numpy as np
import pytest

from vqepes.ansatz import bind_and_compile, build_kupccgsd, build_uccsd
from vqepes.encodings import EncodingScheme, map_operator
from vqepes.fci import fci_ground_energy
from vqepes.fermion import FermionOperator
from vqepes.hamiltonian import (
    HARTREE_TO_KCALMOL,
    HARTREE_TO_MILLIHARTREE,
    ActiveSpaceSpec,
    build_qubit_hamiltonian,
    load_integrals,
)
from vqepes.pauli import PauliSum
from vqepes.pes import load_sweep_config, rmse, run_sweep
from vqepes.simulator import (
    NoiseChannel,
    expectation_exact,
    expectation_sampled,
    kraus_completeness_defect,
    load_noise_spec,
    run_noisy,
    run_statevector,
)
from vqepes.vqe import Backend, VqeProblem, minimize, repeat_and_average

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"
H2_LABELS = ("r0.60", "r0.74", "r1.00")
BK4 = EncodingScheme("bk", 4)


@contextlib.contextmanager
def criterion(name: str, budget_seconds: float):
    start = time.monotonic()
    try:
        yield
    except BaseException:
        print(f"[ACCEPTANCE] {name}: FAIL", file=sys.stderr)
        raise
    elapsed = time.monotonic() - start
    print(f"[ACCEPTANCE] {name}: PASS ({elapsed:.1f}s)", file=sys.stderr)
    assert elapsed < budget_seconds, f"{name} exceeded {budget_seconds}s budget"


def h2_hamiltonian(label: str, kind: str = "bk") -> PauliSum:
    ints = load_integrals(FIXTURES / f"h2_sto3g_{label}.int")
    return build_qubit_hamiltonian(ints, ActiveSpaceSpec.full(ints), kind)


def bundled_hamiltonians(kind: str):
    out = {}
    for label in H2_LABELS:
        out[label] = h2_hamiltonian(label, kind)
    ints = load_integrals(FIXTURES / "he_sto3g.int")
    out["he"] = build_qubit_hamiltonian(ints, ActiveSpaceSpec.full(ints), kind)
    return out


def test_encoding_correctness():
    with criterion("encoding CAR (4 and 6 modes, jw/parity/bk)", 10.0):
        for n_modes in (4, 6):
            for kind in ("jw", "parity", "bk"):
                scheme = EncodingScheme(kind, n_modes)
                annihilate = [
                    map_operator(FermionOperator.ladder(n_modes, [(m, False)]), scheme)
                    for m in range(n_modes)
                ]
                create = [
                    map_operator(FermionOperator.ladder(n_modes, [(m, True)]), scheme)
                    for m in range(n_modes)
                ]
                for p in range(n_modes):
                    for q in range(n_modes):
                        anti = (annihilate[p] * create[q] + create[q] * annihilate[p]).simplify()
                        if p == q:
                            assert anti == PauliSum.identity(n_modes), (kind, p, q)
                        else:
                            assert len(anti) == 0, (kind, p, q)


def test_spectral_equivalence():
    with criterion("spectral equivalence across encodings", 10.0):
        by_kind = {kind: bundled_hamiltonians(kind) for kind in ("jw", "parity", "bk")}
        for name in by_kind["jw"]:
            reference = np.sort(np.linalg.eigvalsh(by_kind["jw"][name].to_dense_matrix()))
            for kind in ("parity", "bk"):
                spectrum = np.sort(
                    np.linalg.eigvalsh(by_kind[kind][name].to_dense_matrix())
                )
                assert np.max(np.abs(spectrum - reference)) < 1e-10, (name, kind)


def _ansatz_set():
    ansatzes = {"uccsd": build_uccsd(4, 2, BK4)}
    for k in range(1, 6):
        ansatzes[f"{k}-upccgsd"] = build_kupccgsd(4, 2, k, BK4)
    return ansatzes


def test_noiseless_chemical_accuracy():
    with criterion("noiseless accuracy vs FCI (UCCSD, k=1..5)", 120.0):
        oracles = {}
        for label in H2_LABELS:
            h = h2_hamiltonian(label)
            oracles[label] = fci_ground_energy(h, 2, BK4).ground_energy

        curves = {"fci": [oracles[label] for label in H2_LABELS]}
        for name, ansatz in _ansatz_set().items():
            energies = []
            for label in H2_LABELS:
                h = h2_hamiltonian(label)
                result = minimize(VqeProblem(h, ansatz, Backend("exact")))
                assert abs(result.optimal_energy - oracles[label]) < 1e-6, (name, label)
                energies.append(result.optimal_energy)
            curves[name] = energies

        def relative(curve):
            return [(e - curve[0]) * HARTREE_TO_KCALMOL for e in curve]

        for name in _ansatz_set():
            assert rmse(relative(curves[name]), relative(curves["fci"])) < 1e-3, name


def test_k_layer_parameter_structure():
    with criterion("k-UpCCGSD parameter structure and monotonicity", 120.0):
        base_count = build_kupccgsd(4, 2, 1, BK4).n_parameters
        for k in range(1, 6):
            assert build_kupccgsd(4, 2, k, BK4).n_parameters == k * base_count

        h = h2_hamiltonian("r0.74")
        previous_energy = None
        previous_params = None
        for k in range(1, 6):
            ansatz = build_kupccgsd(4, 2, k, BK4)
            init = np.zeros(ansatz.n_parameters)
            if previous_params is not None:
                init[: len(previous_params)] = previous_params
            result = minimize(VqeProblem(h, ansatz, Backend("exact")), init)
            if previous_energy is not None:
                assert result.optimal_energy <= previous_energy + 1e-8, k
            previous_energy = result.optimal_energy
            previous_params = np.asarray(result.optimal_params)


def test_shot_statistics():
    with criterion("shot-noise scaling and 32-repeat protocol", 300.0):
        h = h2_hamiltonian("r0.74")
        ansatz = build_uccsd(4, 2, BK4)

        # fixed state away from the reference so every group has variance
        state = run_statevector(bind_and_compile(ansatz, [0.05, -0.11]), 4)
        scaled = []
        for exponent in range(7, 14):
            shots = 2**exponent
            stderr = np.mean(
                [expectation_sampled(state, h, shots, seed)[1] for seed in range(8)]
            )
            scaled.append(stderr * np.sqrt(shots))
        assert max(scaled) / min(scaled) < 1.5

        exact_optimum = minimize(VqeProblem(h, ansatz, Backend("exact"))).optimal_energy
        aggregate = repeat_and_average(
            VqeProblem(h, ansatz, Backend("sampled", shots=8192, seed=31415)), 32
        )
        tolerance = 3 * aggregate.std_energy / np.sqrt(32)
        assert abs(aggregate.mean_energy - exact_optimum) <= tolerance


def test_noise_qualitative_ordering():
    with criterion("noise ordering (deepest vs 1-UpCCGSD) and error window", 600.0):
        noise = load_noise_spec(FIXTURES / "noise_default.yaml")
        configured = {
            "uccsd_nosym": build_uccsd(4, 2, BK4, spin_symmetrize=False),
            "1-upccgsd": build_kupccgsd(4, 2, 1, BK4),
            "5-upccgsd": build_kupccgsd(4, 2, 5, BK4),
        }
        deepest = max(configured, key=lambda name: len(configured[name].gates))
        assert deepest == "5-upccgsd"

        errors = {name: [] for name in configured}
        for label in H2_LABELS:
            h = h2_hamiltonian(label)
            for name, ansatz in configured.items():
                result = minimize(VqeProblem(h, ansatz, Backend("exact")))
                params = np.asarray(result.optimal_params)
                program = bind_and_compile(ansatz, params)
                clean = expectation_exact(run_statevector(program, 4), h)
                noisy = expectation_exact(run_noisy(program, 4, noise), h)
                error_mha = (noisy - clean) * HARTREE_TO_MILLIHARTREE
                assert 0.01 < error_mha < 100.0, (name, label, error_mha)
                errors[name].append(error_mha)

        wins = sum(
            errors[deepest][i] >= errors["1-upccgsd"][i] for i in range(len(H2_LABELS))
        )
        assert wins >= 2, errors


def test_cptp_suite():
    with criterion("CPTP: Kraus completeness and physical noisy outputs", 60.0):
        for name, rate in (
            ("bit_flip", 0.2),
            ("dephasing", 0.35),
            ("depolarizing_1q", 0.5),
            ("depolarizing_2q", 0.25),
            ("amplitude_damping", 0.6),
        ):
            assert kraus_completeness_defect(NoiseChannel(name, rate)) < 1e-12, name

        noise = load_noise_spec(FIXTURES / "noise_default.yaml")
        for label in H2_LABELS:
            h = h2_hamiltonian(label)
            ansatz = build_kupccgsd(4, 2, 3, BK4)
            program = bind_and_compile(ansatz, np.full(ansatz.n_parameters, 0.1))
            rho = run_noisy(program, 4, noise)
            assert abs(np.trace(rho.matrix) - 1.0) < 1e-9
            assert np.max(np.abs(rho.matrix - rho.matrix.conj().T)) < 1e-9
            assert rho.smallest_eigenvalue() > -1e-9


def test_sweep_determinism(tmp_path):
    with criterion("byte-identical repeated sweep", 600.0):
        out_a, out_b = tmp_path / "a", tmp_path / "b"
        cfg = load_sweep_config(FIXTURES / "h2_scan.yaml")
        run_sweep(cfg, out_dir=out_a)
        run_sweep(cfg, out_dir=out_b)
        names = sorted(p.name for p in out_a.iterdir())
        assert names == sorted(p.name for p in out_b.iterdir())
        match, mismatch, errors = filecmp.cmpfiles(out_a, out_b, names, shallow=False)
        assert mismatch == [] and errors == []
