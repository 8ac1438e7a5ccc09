"""Integral files, active-space reduction, and Hamiltonian assembly."""

from pathlib import Path

import numpy as np
import pytest

from vqepes.encodings import EncodingScheme, map_operator
from vqepes.fci import fci_ground_energy
from vqepes.fermion import number_operator
from vqepes.hamiltonian import (
    ActiveSpaceSpec,
    IntegralFormatError,
    MolecularIntegrals,
    build_fermionic_hamiltonian,
    build_qubit_hamiltonian,
    load_integrals,
    reduce_to_active_space,
)
from vqepes.pauli import commutator

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"


@pytest.fixture(scope="module")
def h2_ints():
    return load_integrals(FIXTURES / "h2_sto3g_r0.74.int")


class TestLoadIntegrals:
    def test_minimal_single_orbital_file(self, tmp_path):
        path = tmp_path / "one.int"
        path.write_text("&FCI NORB=1,NELEC=2,MS2=0\n &END\n-1.0 1 1 0 0\n0.5 0 0 0 0\n")
        ints = load_integrals(path)
        assert ints.n_spatial == 1
        assert ints.n_electrons == 2
        assert ints.h1[0, 0] == -1.0
        assert ints.e_core == 0.5

    def test_bundled_fixture_header(self, h2_ints):
        assert h2_ints.n_spatial == 2
        assert h2_ints.n_electrons == 2

    def test_symmetry_violation_rejected(self, tmp_path):
        path = tmp_path / "bad.int"
        path.write_text(
            "&FCI NORB=2,NELEC=2,MS2=0\n &END\n"
            "0.3 1 2 0 0\n0.1 2 1 0 0\n0.5 0 0 0 0\n"
        )
        with pytest.raises(IntegralFormatError, match="symmetry"):
            load_integrals(path)

    def test_unknown_header_key_rejected(self, tmp_path):
        path = tmp_path / "bad.int"
        path.write_text("&FCI NORB=1,NELEC=2,MS2=0,ORBSYM=1\n-1.0 1 1 0 0\n")
        with pytest.raises(IntegralFormatError, match="unknown header key"):
            load_integrals(path)

    def test_parse_error_reports_line_number(self, tmp_path):
        path = tmp_path / "bad.int"
        path.write_text("&FCI NORB=1,NELEC=2,MS2=0\n-1.0 1 1 0\n")
        with pytest.raises(IntegralFormatError, match=":2:"):
            load_integrals(path)

    def test_malformed_index_pattern(self, tmp_path):
        path = tmp_path / "bad.int"
        path.write_text("&FCI NORB=2,NELEC=2,MS2=0\n0.1 1 2 1 0\n")
        with pytest.raises(IntegralFormatError, match="index pattern"):
            load_integrals(path)

    def test_two_body_symmetry_expansion(self, h2_ints):
        g = h2_ints.h2
        # every 8-fold image of the stored (21|21) element agrees
        value = g[1, 0, 1, 0]
        for perm in [(0, 1, 1, 0), (1, 0, 0, 1), (0, 1, 0, 1)]:
            assert g[perm] == value


class TestActiveSpace:
    def test_empty_frozen_set_is_restriction(self, h2_ints):
        spec = ActiveSpaceSpec(2, 2, (0, 1))
        reduced = reduce_to_active_space(h2_ints, spec)
        assert np.array_equal(reduced.h1, h2_ints.h1)
        assert np.array_equal(reduced.h2, h2_ints.h2)
        assert reduced.e_core == h2_ints.e_core

    def test_freeze_all_occupied_gives_mean_field_energy(self, h2_ints):
        # oracle: HF determinant expectation from the dense full-space
        # Hamiltonian (modes 0,1 of the JW image occupied)
        spec = ActiveSpaceSpec(0, 0, (), frozen_occupied_indices=(0,))
        reduced = reduce_to_active_space(h2_ints, spec)
        h_full = build_qubit_hamiltonian(h2_ints, None, "jw")
        dense = h_full.to_dense_matrix()
        hf_index = 0b0011
        assert abs(reduced.e_core - dense[hf_index, hf_index].real) < 1e-10

    def test_frozen_core_formulas_hand_expanded(self, h2_ints):
        # scripted expansion of h'_pq and the core shift for freezing
        # orbital 0 with active {1}
        h1, g = h2_ints.h1, h2_ints.h2
        want_core = h2_ints.e_core + 2 * h1[0, 0] + 2 * g[0, 0, 0, 0] - g[0, 0, 0, 0]
        want_h11 = h1[1, 1] + 2 * g[1, 1, 0, 0] - g[1, 0, 0, 1]
        spec = ActiveSpaceSpec(1, 0, (1,), frozen_occupied_indices=(0,))
        reduced = reduce_to_active_space(h2_ints, spec)
        assert abs(reduced.e_core - want_core) < 1e-12
        assert abs(reduced.h1[0, 0] - want_h11) < 1e-12

    def test_overlapping_sets_rejected(self):
        with pytest.raises(ValueError, match="overlap"):
            ActiveSpaceSpec(1, 2, (0,), frozen_occupied_indices=(0,))

    def test_out_of_range_index(self, h2_ints):
        spec = ActiveSpaceSpec(1, 2, (5,))
        with pytest.raises(ValueError, match="out of range"):
            reduce_to_active_space(h2_ints, spec)

    def test_electron_count_consistency(self, h2_ints):
        spec = ActiveSpaceSpec(1, 2, (1,), frozen_occupied_indices=(0,))
        with pytest.raises(ValueError, match="inconsistent"):
            reduce_to_active_space(h2_ints, spec)


class TestBuildHamiltonian:
    def test_h1_only_single_orbital(self):
        ints = MolecularIntegrals(
            n_spatial=1,
            n_electrons=2,
            e_core=0.5,
            h1=np.array([[-1.0]]),
            h2=np.zeros((1, 1, 1, 1)),
        )
        f = build_fermionic_hamiltonian(ints)
        d = f.as_dict()
        assert d[()] == 0.5
        from vqepes.fermion import LadderOp

        assert d[(LadderOp(0, True), LadderOp(0, False))] == -1.0
        assert d[(LadderOp(1, True), LadderOp(1, False))] == -1.0

    def test_hermitian_dense_image(self, h2_ints):
        h = build_qubit_hamiltonian(h2_ints, ActiveSpaceSpec.full(h2_ints), "jw")
        dense = h.to_dense_matrix()
        assert np.max(np.abs(dense - dense.conj().T)) < 1e-10

    def test_ground_energy_matches_determinant_ci_oracle(self, h2_ints):
        # independent oracle: 2x2 CI in the sigma_g^2 / sigma_u^2
        # determinant basis, expanded directly from the MO integrals
        h1, g = h2_ints.h1, h2_ints.h2
        e1 = 2 * h1[0, 0] + g[0, 0, 0, 0]
        e2 = 2 * h1[1, 1] + g[1, 1, 1, 1]
        coupling = g[0, 1, 0, 1]
        oracle = np.linalg.eigvalsh(np.array([[e1, coupling], [coupling, e2]]))[0]
        oracle += h2_ints.e_core

        h = build_qubit_hamiltonian(h2_ints, ActiveSpaceSpec.full(h2_ints), "jw")
        result = fci_ground_energy(h, n_electrons=2, scheme=EncodingScheme("jw", 4))
        assert abs(result.ground_energy - oracle) < 1e-12

    def test_single_active_orbital_jw_term_budget(self, h2_ints):
        spec = ActiveSpaceSpec(1, 2, (0,), frozen_occupied_indices=())
        # freezing nothing, restricting to orbital 0 only is inconsistent
        # with 2 electrons in 1 orbital? no: 2 electrons fill it exactly
        h = build_qubit_hamiltonian(h2_ints, spec, "jw")
        assert h.n_qubits == 2
        assert len(h) <= 4

    def test_qubit_count_follows_active_space(self, h2_ints):
        h = build_qubit_hamiltonian(h2_ints, ActiveSpaceSpec.full(h2_ints), "bk")
        assert h.n_qubits == 4

    @pytest.mark.parametrize("kind", ("jw", "parity", "bk"))
    def test_identity_coefficient_is_trace_mean(self, h2_ints, kind):
        h = build_qubit_hamiltonian(h2_ints, ActiveSpaceSpec.full(h2_ints), kind)
        dense = h.to_dense_matrix()
        trace_mean = np.trace(dense).real / dense.shape[0]
        assert abs(h.identity_coefficient.real - trace_mean) < 1e-10

    def test_spectra_equal_across_schemes(self, h2_ints):
        spectra = []
        for kind in ("jw", "parity", "bk"):
            h = build_qubit_hamiltonian(h2_ints, ActiveSpaceSpec.full(h2_ints), kind)
            spectra.append(np.sort(np.linalg.eigvalsh(h.to_dense_matrix())))
        assert np.max(np.abs(spectra[0] - spectra[1])) < 1e-10
        assert np.max(np.abs(spectra[0] - spectra[2])) < 1e-10

    @pytest.mark.parametrize("kind", ("jw", "parity", "bk"))
    def test_commutes_with_number_operator(self, h2_ints, kind):
        scheme = EncodingScheme(kind, 4)
        h = build_qubit_hamiltonian(h2_ints, ActiveSpaceSpec.full(h2_ints), kind)
        n_image = map_operator(number_operator(4), scheme)
        assert len(commutator(h, n_image).simplify(1e-10)) == 0

    def test_spin_label_swap_leaves_spectrum(self, h2_ints):
        # swapping alpha/beta spin-orbital labels permutes modes
        # (0<->1, 2<->3); the JW spectrum must not move
        from vqepes.fermion import FermionOperator, LadderOp

        reduced = reduce_to_active_space(h2_ints, ActiveSpaceSpec.full(h2_ints))
        f = build_fermionic_hamiltonian(reduced)
        swap = {0: 1, 1: 0, 2: 3, 3: 2}
        swapped = FermionOperator.from_dict(
            4,
            {
                tuple(LadderOp(swap[op.mode], op.dagger) for op in ops): coeff
                for ops, coeff in f.terms
            },
        )
        scheme = EncodingScheme("jw", 4)
        a = np.sort(np.linalg.eigvalsh(map_operator(f, scheme).to_dense_matrix()))
        b = np.sort(np.linalg.eigvalsh(map_operator(swapped, scheme).to_dense_matrix()))
        assert np.max(np.abs(a - b)) < 1e-10

    def test_active_space_consistency_full_vs_reduced(self, h2_ints):
        # zero frozen orbitals: reduced FCI equals full FCI at the same
        # electron count
        full = build_qubit_hamiltonian(h2_ints, None, "jw")
        reduced = build_qubit_hamiltonian(h2_ints, ActiveSpaceSpec.full(h2_ints), "jw")
        scheme = EncodingScheme("jw", 4)
        e_full = fci_ground_energy(full, 2, scheme).ground_energy
        e_reduced = fci_ground_energy(reduced, 2, scheme).ground_energy
        assert abs(e_full - e_reduced) < 1e-10
