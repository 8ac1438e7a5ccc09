"""JW / parity / BK encoding correctness: index sets, ladder images,
canonical anticommutation, and spectral equivalence."""

import numpy as np
import pytest

from vqepes.encodings import (
    EncodingScheme,
    build_bk_sets,
    encode_occupations,
    map_operator,
)
from vqepes.fermion import FermionOperator, hermitian_conjugate
from vqepes.pauli import PauliSum

ALL_KINDS = ("jw", "parity", "bk")


def ladder_image(kind, n_modes, mode, dagger):
    return map_operator(
        FermionOperator.ladder(n_modes, [(mode, dagger)]), EncodingScheme(kind, n_modes)
    )


class TestSingleModeImages:
    def test_jw_creation_single_mode(self):
        image = ladder_image("jw", 1, 0, True)
        assert image.coefficient_of([(0, "X")]) == 0.5
        assert image.coefficient_of([(0, "Y")]) == -0.5j

    @pytest.mark.parametrize("kind", ("parity", "bk"))
    def test_single_mode_degenerates_to_jw(self, kind):
        assert ladder_image(kind, 1, 0, True) == ladder_image("jw", 1, 0, True)

    def test_jw_number_operator(self):
        image = map_operator(
            FermionOperator.ladder(2, [(0, True), (0, False)]), EncodingScheme("jw", 2)
        )
        assert image.coefficient_of([]) == 0.5
        assert image.coefficient_of([(0, "Z")]) == -0.5


class TestBKSets:
    def test_one_mode_all_empty(self):
        sets = build_bk_sets(1)
        assert sets.update_sets[0] == frozenset()
        assert sets.parity_sets[0] == frozenset()
        assert sets.flip_sets[0] == frozenset()

    def test_four_modes_mode0(self):
        sets = build_bk_sets(4)
        assert sets.update_sets[0] == {1, 3}
        assert sets.parity_sets[0] == frozenset()
        assert sets.flip_sets[0] == frozenset()

    def test_four_modes_mode3(self):
        sets = build_bk_sets(4)
        assert sets.update_sets[3] == frozenset()
        assert sets.parity_sets[3] == {1, 2}
        assert sets.flip_sets[3] == {1, 2}

    def test_sets_against_matrix_oracle(self):
        # occupation-vector encoder doubles as an independent oracle for
        # the tree structure: qubit j stores the parity of a stored set,
        # and flipping occupation f_m flips exactly the bits in
        # update(m) | {m}
        for n in (2, 3, 4, 6, 8):
            sets = build_bk_sets(n)
            scheme = EncodingScheme("bk", n)
            zero = encode_occupations((0,) * n, scheme)
            assert zero == (0,) * n
            for m in range(n):
                occ = [0] * n
                occ[m] = 1
                bits = encode_occupations(tuple(occ), scheme)
                flipped = {j for j, b in enumerate(bits) if b}
                assert flipped == set(sets.update_sets[m]) | {m}


@pytest.mark.parametrize("kind", ALL_KINDS)
@pytest.mark.parametrize("n_modes", (2, 4, 6))
def test_canonical_anticommutation(kind, n_modes):
    scheme = EncodingScheme(kind, n_modes)
    images = {
        (m, d): ladder_image(kind, n_modes, m, d)
        for m in range(n_modes)
        for d in (False, True)
    }
    for p in range(n_modes):
        for q in range(n_modes):
            a_p = images[(p, False)]
            adag_q = images[(q, True)]
            anti = (a_p * adag_q + adag_q * a_p).simplify()
            if p == q:
                assert anti == PauliSum.identity(n_modes)
            else:
                assert len(anti) == 0


def _random_two_body_hermitian(rng, n_modes):
    f = FermionOperator.zero(n_modes)
    for _ in range(6):
        modes = rng.integers(0, n_modes, size=2)
        c = complex(rng.standard_normal(), rng.standard_normal())
        f = f + FermionOperator.ladder(n_modes, [(int(modes[0]), True), (int(modes[1]), False)], c)
    for _ in range(4):
        modes = rng.integers(0, n_modes, size=4)
        c = complex(rng.standard_normal(), rng.standard_normal())
        f = f + FermionOperator.ladder(
            n_modes,
            [(int(modes[0]), True), (int(modes[1]), True), (int(modes[2]), False), (int(modes[3]), False)],
            c,
        )
    return f + hermitian_conjugate(f)


def test_spectral_equivalence_across_schemes():
    rng = np.random.default_rng(37)
    for _ in range(5):
        f = _random_two_body_hermitian(rng, 4)
        spectra = []
        for kind in ALL_KINDS:
            dense = map_operator(f, EncodingScheme(kind, 4)).to_dense_matrix()
            spectra.append(np.sort(np.linalg.eigvalsh(dense)))
        assert np.max(np.abs(spectra[0] - spectra[1])) < 1e-10
        assert np.max(np.abs(spectra[0] - spectra[2])) < 1e-10


def test_bk_weight_bound_power_of_two():
    for n in (2, 4, 8):
        bound = int(np.ceil(np.log2(n))) + 2
        for m in range(n):
            image = ladder_image("bk", n, m, True)
            assert max(t.weight for t in image.terms) <= bound


def test_parity_occupation_encoding():
    scheme = EncodingScheme("parity", 4)
    assert encode_occupations((1, 1, 0, 0), scheme) == (1, 0, 0, 0)
    assert encode_occupations((1, 0, 1, 0), scheme) == (1, 1, 0, 0)


def test_mode_count_mismatch():
    with pytest.raises(ValueError, match="mismatch"):
        map_operator(FermionOperator.ladder(2, [(0, True)]), EncodingScheme("jw", 3))


def test_unknown_kind_rejected():
    with pytest.raises(ValueError, match="unknown encoding"):
        EncodingScheme("ternary", 4)
