"""Fermion-to-qubit transformations: Jordan-Wigner, parity, Bravyi-Kitaev.

All three encodings are instances of one construction.  For mode ``j``
three index sets determine the Pauli image of a ladder operator:

* update set ``U(j)``: qubits whose stored partial sum flips when the
  occupation of mode j flips (X factors),
* parity set ``P(j)``: qubits that together store the parity of modes
  below j (Z factors on the X-component Majorana),
* remainder set ``rho(j) = P(j) \\ F(j)``, with ``F(j)`` the flip set of
  qubits whose stored sums feed into qubit j (Z factors on the
  Y-component Majorana).

With ``c_j = X_U X_j Z_P`` and ``d_j = X_U Y_j Z_rho``:

    a_j  = (c_j + i d_j) / 2        a_j^ = (c_j - i d_j) / 2

Jordan-Wigner stores occupations directly (U, F empty; P = all lower
modes).  Parity stores cumulative sums (U = all higher modes; P = F =
{j-1}).  Bravyi-Kitaev stores partial sums over a Fenwick tree, giving
O(log n) locality; non-power-of-two mode counts use the Fenwick-tree
generalization directly rather than padding.
"""

from __future__ import annotations

from dataclasses import dataclass

from .fermion import FermionOperator
from .pauli import PauliSum, PauliTerm

JORDAN_WIGNER = "jw"
PARITY = "parity"
BRAVYI_KITAEV = "bk"
SCHEME_KINDS = (JORDAN_WIGNER, PARITY, BRAVYI_KITAEV)


@dataclass(frozen=True)
class EncodingScheme:
    """One of the supported fermion-to-qubit mappings on n_modes modes.

    The qubit count always equals the mode count (no tapering).
    """

    kind: str
    n_modes: int

    def __post_init__(self):
        if self.kind not in SCHEME_KINDS:
            raise ValueError(f"unknown encoding kind {self.kind!r}; expected one of {SCHEME_KINDS}")
        if self.n_modes < 1:
            raise ValueError("n_modes must be >= 1")

    @property
    def n_qubits(self) -> int:
        return self.n_modes


@dataclass(frozen=True)
class BKIndexSets:
    """Per-mode update/parity/flip sets of the Bravyi-Kitaev binary tree."""

    n_modes: int
    update_sets: tuple[frozenset[int], ...]
    parity_sets: tuple[frozenset[int], ...]
    flip_sets: tuple[frozenset[int], ...]


class _FenwickTree:
    """Fenwick (binary indexed) tree over modes 0..n-1; root is node n-1.

    Qubit j stores the occupation sum over node j's subtree.
    """

    def __init__(self, n_modes: int):
        self.n_modes = n_modes
        self.parent = [None] * n_modes
        self.children: list[list[int]] = [[] for _ in range(n_modes)]

        def build(left: int, right: int, parent: int) -> None:
            if left >= right:
                return
            pivot = (left + right) >> 1
            self.children[parent].append(pivot)
            self.parent[pivot] = parent
            build(left, pivot, pivot)
            build(pivot + 1, right, parent)

        if n_modes > 0:
            build(0, n_modes - 1, n_modes - 1)

    def ancestors(self, j: int) -> frozenset[int]:
        out = set()
        node = self.parent[j]
        while node is not None:
            out.add(node)
            node = self.parent[node]
        return frozenset(out)

    def children_of(self, j: int) -> frozenset[int]:
        return frozenset(self.children[j])

    def remainder(self, j: int) -> frozenset[int]:
        """Children of j's ancestors with index below j."""
        return frozenset(c for a in self.ancestors(j) for c in self.children[a] if c < j)

    def subtree(self, j: int) -> frozenset[int]:
        out = {j}
        todo = list(self.children[j])
        while todo:
            node = todo.pop()
            out.add(node)
            todo.extend(self.children[node])
        return frozenset(out)


def build_bk_sets(n_modes: int) -> BKIndexSets:
    """Update/parity/flip sets per the Bravyi-Kitaev tree construction."""
    if n_modes < 1:
        raise ValueError("n_modes must be >= 1")
    tree = _FenwickTree(n_modes)
    update, parity, flip = [], [], []
    for j in range(n_modes):
        update.append(tree.ancestors(j))
        flip.append(tree.children_of(j))
        parity.append(tree.remainder(j) | tree.children_of(j))
    return BKIndexSets(n_modes, tuple(update), tuple(parity), tuple(flip))


def _mode_sets(scheme: EncodingScheme) -> list[tuple[frozenset[int], frozenset[int], frozenset[int]]]:
    """(update, parity, remainder) triple per mode for the scheme."""
    n = scheme.n_modes
    if scheme.kind == JORDAN_WIGNER:
        empty = frozenset()
        return [(empty, frozenset(range(j)), frozenset(range(j))) for j in range(n)]
    if scheme.kind == PARITY:
        return [
            (
                frozenset(range(j + 1, n)),
                frozenset({j - 1}) if j > 0 else frozenset(),
                frozenset(),
            )
            for j in range(n)
        ]
    sets = build_bk_sets(n)
    return [
        (sets.update_sets[j], sets.parity_sets[j], sets.parity_sets[j] - sets.flip_sets[j])
        for j in range(n)
    ]


def _ladder_images(scheme: EncodingScheme) -> list[tuple[PauliSum, PauliSum]]:
    """Per mode, the (annihilation, creation) Pauli images."""
    n = scheme.n_modes
    images = []
    for j, (update, parity, remainder) in enumerate(_mode_sets(scheme)):
        c_factors = [(q, "X") for q in update] + [(j, "X")] + [(q, "Z") for q in parity]
        d_factors = [(q, "X") for q in update] + [(j, "Y")] + [(q, "Z") for q in remainder]
        c = PauliTerm(n, c_factors, 0.5)
        annihilate = PauliSum.from_terms(n, [c, PauliTerm(n, d_factors, 0.5j)])
        create = PauliSum.from_terms(n, [c, PauliTerm(n, d_factors, -0.5j)])
        images.append((annihilate, create))
    return images


def map_operator(f: FermionOperator, scheme: EncodingScheme) -> PauliSum:
    """Linear map of a fermionic operator to its qubit image, simplified."""
    if f.n_modes != scheme.n_modes:
        raise ValueError(f"mode count mismatch: operator has {f.n_modes}, scheme {scheme.n_modes}")
    images = _ladder_images(scheme)
    n = scheme.n_qubits
    total = PauliSum.zero(n)
    for ops, coeff in f.terms:
        product = PauliSum.identity(n, coeff)
        for op in ops:
            product = product * images[op.mode][1 if op.dagger else 0]
        total = total + product
    return total.simplify()


def encode_occupations(occupations: tuple[int, ...], scheme: EncodingScheme) -> tuple[int, ...]:
    """Qubit bit values storing a given mode-occupation vector.

    Under JW this is the occupation vector itself; under parity and BK,
    qubit j stores the (mod-2) sum of the occupations it accumulates.
    """
    n = scheme.n_modes
    if len(occupations) != n:
        raise ValueError(f"expected {n} occupations, got {len(occupations)}")
    if scheme.kind == JORDAN_WIGNER:
        stored = [frozenset({j}) for j in range(n)]
    elif scheme.kind == PARITY:
        stored = [frozenset(range(j + 1)) for j in range(n)]
    else:
        tree = _FenwickTree(n)
        stored = [tree.subtree(j) for j in range(n)]
    return tuple(sum(occupations[m] for m in stored[j]) % 2 for j in range(n))
