"""Ansatz construction: parameter structure, reference states, compilation."""

from pathlib import Path

import numpy as np
import pytest

from vqepes.ansatz import (
    GateProgram,
    PauliRotation,
    XGate,
    bind_and_compile,
    build_kupccgsd,
    build_uccsd,
)
from vqepes.encodings import EncodingScheme, map_operator
from vqepes.fci import fci_ground_energy
from vqepes.fermion import number_operator
from vqepes.hamiltonian import ActiveSpaceSpec, build_qubit_hamiltonian, load_integrals
from vqepes.pauli import PauliSum, commutator
from vqepes.simulator import expectation_exact, run_statevector
from vqepes.vqe import Backend, VqeProblem, minimize

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"
JW4 = EncodingScheme("jw", 4)
BK4 = EncodingScheme("bk", 4)


@pytest.fixture(scope="module")
def h2_bk():
    ints = load_integrals(FIXTURES / "h2_sto3g_r0.74.int")
    return build_qubit_hamiltonian(ints, ActiveSpaceSpec.full(ints), "bk")


class TestUccsdStructure:
    def test_no_virtuals_means_reference_only(self):
        circuit = build_uccsd(2, 2, EncodingScheme("jw", 2))
        assert circuit.n_parameters == 0
        assert circuit.gates == ()

    def test_parameter_count_spin_symmetrized(self):
        # 2e/4so: one spatial single pair shared across spins + one double
        circuit = build_uccsd(4, 2, JW4)
        assert circuit.n_parameters == 2
        singles = [e for e in circuit.excitations if e.kind == "single"]
        assert len(singles) == 2
        assert singles[0].parameter_id == singles[1].parameter_id

    def test_parameter_count_unsymmetrized(self):
        # derived by enumerating occ={0,1}, virt={2,3}: two spin singles
        # plus one spin-conserving double
        circuit = build_uccsd(4, 2, JW4, spin_symmetrize=False)
        assert circuit.n_parameters == 3

    def test_odd_electron_count_rejected(self):
        with pytest.raises(ValueError, match="even"):
            build_uccsd(4, 1, JW4)

    def test_reference_is_hf_bitstring(self):
        circuit = build_uccsd(4, 2, JW4)
        assert circuit.reference_occupations == (1, 1, 0, 0)

    def test_zero_parameters_prepare_reference(self):
        circuit = build_uccsd(4, 2, BK4)
        program = bind_and_compile(circuit, np.zeros(2))
        state = run_statevector(program, 4)
        want = np.zeros(16, dtype=complex)
        want[0b0001] = 1.0  # BK bits of occupation 1100
        assert np.max(np.abs(state.amplitudes - want)) < 1e-12


class TestKupccgsdStructure:
    def test_layer_parameter_count(self):
        circuit = build_kupccgsd(4, 2, 1, JW4)
        assert circuit.n_parameters == 2  # 1 generalized single + 1 paired double

    @pytest.mark.parametrize("k", (1, 2, 3, 5))
    def test_k_scaling(self, k):
        base = build_kupccgsd(4, 2, 1, JW4)
        circuit = build_kupccgsd(4, 2, k, JW4)
        assert circuit.n_parameters == k * base.n_parameters
        assert len(circuit.gates) == k * len(base.gates)

    def test_layers_share_gate_order(self):
        circuit = build_kupccgsd(4, 2, 3, JW4)
        per_layer = len(circuit.gates) // 3
        layers = [
            circuit.gates[i * per_layer : (i + 1) * per_layer] for i in range(3)
        ]
        for layer in layers[1:]:
            assert [g.generator for g in layer] == [g.generator for g in layers[0]]
            assert [g.multiplier for g in layer] == [g.multiplier for g in layers[0]]

    def test_invalid_k(self):
        with pytest.raises(ValueError, match="k must be"):
            build_kupccgsd(4, 2, 0, JW4)

    def test_zero_parameters_prepare_reference(self):
        circuit = build_kupccgsd(4, 2, 2, JW4)
        program = bind_and_compile(circuit, np.zeros(circuit.n_parameters))
        state = run_statevector(program, 4)
        want = np.zeros(16, dtype=complex)
        want[0b0011] = 1.0
        assert np.max(np.abs(state.amplitudes - want)) < 1e-12


class TestCompile:
    def test_empty_circuit_program(self):
        circuit = build_uccsd(2, 2, EncodingScheme("jw", 2))
        program = bind_and_compile(circuit, [])
        assert all(isinstance(op, XGate) for op in program.instructions)

    def test_parameter_length_mismatch(self):
        circuit = build_uccsd(4, 2, JW4)
        with pytest.raises(ValueError, match="expected 2 parameters"):
            bind_and_compile(circuit, [0.1])

    def test_global_phase_rotation_preserves_moduli(self):
        from vqepes.pauli import PauliTerm

        program = GateProgram(
            1, (PauliRotation(np.pi, PauliTerm(1, [(0, "Z")])),)
        )
        state = run_statevector(program, 1)
        assert abs(abs(state.amplitudes[0]) - 1.0) < 1e-12

    def test_program_text_round_trip(self):
        circuit = build_uccsd(4, 2, BK4)
        program = bind_and_compile(circuit, [0.12, -0.3])
        back = GateProgram.from_text(program.to_text())
        assert back == program

    def test_gate_generators_have_unit_coefficient(self):
        circuit = build_kupccgsd(4, 2, 2, BK4)
        for gate in circuit.gates:
            assert gate.generator.coefficient == 1.0


class TestPhysicalProperties:
    def test_unitarity_random_parameters(self):
        rng = np.random.default_rng(41)
        circuit = build_kupccgsd(4, 2, 2, BK4)
        for _ in range(5):
            params = rng.uniform(-1, 1, circuit.n_parameters)
            state = run_statevector(bind_and_compile(circuit, params), 4)
            assert abs(np.linalg.norm(state.amplitudes) - 1.0) < 1e-12

    @pytest.mark.parametrize("kind", ("jw", "bk"))
    @pytest.mark.parametrize("builder", ("uccsd", "kupccgsd"))
    def test_particle_number_conserved(self, kind, builder):
        scheme = EncodingScheme(kind, 4)
        if builder == "uccsd":
            circuit = build_uccsd(4, 2, scheme)
        else:
            circuit = build_kupccgsd(4, 2, 2, scheme)
        n_image = map_operator(number_operator(4), scheme)
        rng = np.random.default_rng(43)
        for _ in range(4):
            params = rng.uniform(-0.8, 0.8, circuit.n_parameters)
            state = run_statevector(bind_and_compile(circuit, params), 4)
            assert abs(expectation_exact(state, n_image) - 2.0) < 1e-10

    def test_first_order_gradient_matches_finite_differences(self, h2_bk):
        # analytic oracle: dE/dtheta_j at 0 = <ref|[H, Q_j]|ref> with Q_j
        # the mapped anti-Hermitian generator of parameter j
        circuit = build_uccsd(4, 2, BK4)
        program = bind_and_compile(circuit, np.zeros(circuit.n_parameters))
        ref = run_statevector(program, 4).amplitudes

        generators = {}
        for gate in circuit.gates:
            q = PauliSum.from_terms(
                4, [gate.generator.with_coefficient(-0.5j * gate.multiplier)]
            )
            generators[gate.parameter_id] = (
                generators.get(gate.parameter_id, PauliSum.zero(4)) + q
            )

        step = 1e-4
        for pid, q in generators.items():
            analytic = np.real(
                np.vdot(ref, commutator(h2_bk, q).to_dense_matrix() @ ref)
            )
            plus = np.zeros(circuit.n_parameters)
            plus[pid] = step
            minus = -plus
            e_plus = expectation_exact(
                run_statevector(bind_and_compile(circuit, plus), 4), h2_bk
            )
            e_minus = expectation_exact(
                run_statevector(bind_and_compile(circuit, minus), 4), h2_bk
            )
            fd = (e_plus - e_minus) / (2 * step)
            assert np.isclose(analytic, fd, rtol=1e-6, atol=1e-8)

    def test_uccsd_reaches_fci_on_fixture(self, h2_bk):
        oracle = fci_ground_energy(h2_bk, 2, BK4).ground_energy
        circuit = build_uccsd(4, 2, BK4)
        result = minimize(VqeProblem(h2_bk, circuit, Backend("exact")))
        assert abs(result.optimal_energy - oracle) < 1e-6

    def test_k_monotone_energy_warm_started(self, h2_bk):
        oracle = fci_ground_energy(h2_bk, 2, BK4).ground_energy
        previous_energy = None
        previous_params = None
        for k in range(1, 4):
            circuit = build_kupccgsd(4, 2, k, BK4)
            init = np.zeros(circuit.n_parameters)
            if previous_params is not None:
                init[: len(previous_params)] = previous_params
            result = minimize(VqeProblem(h2_bk, circuit, Backend("exact")), init)
            if previous_energy is not None:
                assert result.optimal_energy <= previous_energy + 1e-8
            assert result.optimal_energy >= oracle - 1e-9
            previous_energy = result.optimal_energy
            previous_params = np.asarray(result.optimal_params)
