"""Sparse algebra of Pauli strings and complex-weighted sums of them.

A :class:`PauliTerm` is a tensor product of single-qubit Pauli factors
(identity factors implicit) times a complex coefficient.  A
:class:`PauliSum` is a simplified collection of terms over a shared qubit
count.  Values are immutable; all operations are pure functions, so
instances are safe to share between threads.

Qubit/bit convention used throughout the package: qubit ``j`` corresponds
to bit ``j`` of a computational-basis index (little-endian), so the dense
matrix of a term is ``kron(sigma[n-1], ..., sigma[0])``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np

DEFAULT_DROP_TOL = 1e-12
DEFAULT_DENSE_LIMIT = 14

_AXES = ("X", "Y", "Z")

_I2 = np.eye(2, dtype=complex)
_PAULI_MATRICES = {
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}

# Single-qubit product table: (a, b) -> (result axis or None for identity,
# integer power of i picked up).  Phases stay exact integers until folded
# into the coefficient at the end of a product.
_PRODUCT_TABLE = {
    ("X", "X"): (None, 0),
    ("Y", "Y"): (None, 0),
    ("Z", "Z"): (None, 0),
    ("X", "Y"): ("Z", 1),
    ("Y", "X"): ("Z", 3),
    ("Y", "Z"): ("X", 1),
    ("Z", "Y"): ("X", 3),
    ("Z", "X"): ("Y", 1),
    ("X", "Z"): ("Y", 3),
}

_I_POWERS = (1.0 + 0.0j, 1.0j, -1.0 + 0.0j, -1.0j)


def _canonical_factors(
    factors: Mapping[int, str] | Iterable[tuple[int, str]], n_qubits: int
) -> tuple[tuple[int, str], ...]:
    items = sorted(factors.items() if isinstance(factors, Mapping) else factors)
    seen = set()
    for index, axis in items:
        if not 0 <= index < n_qubits:
            raise ValueError(f"qubit index {index} out of range for {n_qubits} qubits")
        if axis not in _AXES:
            raise ValueError(f"invalid Pauli axis {axis!r} (expected X, Y, or Z)")
        if index in seen:
            raise ValueError(f"duplicate factor for qubit {index}")
        seen.add(index)
    return tuple(items)


@dataclass(frozen=True)
class PauliTerm:
    """A single Pauli string with a complex coefficient.

    ``factors`` holds only non-identity single-qubit factors, as (index,
    axis) pairs in ascending index order.
    """

    n_qubits: int
    factors: tuple[tuple[int, str], ...]
    coefficient: complex = 1.0 + 0.0j

    def __post_init__(self):
        if self.n_qubits < 0:
            raise ValueError("n_qubits must be non-negative")
        object.__setattr__(self, "factors", _canonical_factors(self.factors, self.n_qubits))
        object.__setattr__(self, "coefficient", complex(self.coefficient))

    @property
    def key(self) -> tuple[tuple[int, str], ...]:
        """Canonical identity of the string, ignoring the coefficient."""
        return self.factors

    @property
    def weight(self) -> int:
        """Number of non-identity factors."""
        return len(self.factors)

    def is_identity(self) -> bool:
        return not self.factors

    def with_coefficient(self, coefficient: complex) -> "PauliTerm":
        return PauliTerm(self.n_qubits, self.factors, coefficient)

    def axis_on(self, qubit: int) -> str | None:
        for index, axis in self.factors:
            if index == qubit:
                return axis
        return None

    def adjoint(self) -> "PauliTerm":
        return self.with_coefficient(self.coefficient.conjugate())

    def __mul__(self, other: "PauliTerm") -> "PauliTerm":
        return multiply(self, other)

    def __rmul__(self, scalar: complex) -> "PauliTerm":
        return self.with_coefficient(complex(scalar) * self.coefficient)

    def __str__(self) -> str:
        body = " ".join(f"{axis}{index}" for index, axis in self.factors) or "I"
        return f"({self.coefficient}) {body}"


def multiply(a: PauliTerm, b: PauliTerm) -> PauliTerm:
    """Operator product of two Pauli terms, phase folded into the coefficient."""
    if a.n_qubits != b.n_qubits:
        raise ValueError(f"qubit count mismatch: {a.n_qubits} != {b.n_qubits}")
    factors_a = dict(a.factors)
    out: list[tuple[int, str]] = []
    ipow = 0
    for index, axis_b in b.factors:
        axis_a = factors_a.pop(index, None)
        if axis_a is None:
            out.append((index, axis_b))
            continue
        result_axis, phase = _PRODUCT_TABLE[(axis_a, axis_b)]
        ipow += phase
        if result_axis is not None:
            out.append((index, result_axis))
    out.extend(factors_a.items())
    coeff = a.coefficient * b.coefficient * _I_POWERS[ipow % 4]
    return PauliTerm(a.n_qubits, out, coeff)


def _term_dense(factors: Sequence[tuple[int, str]], n_qubits: int) -> np.ndarray:
    by_index = dict(factors)
    mat = np.ones((1, 1), dtype=complex)
    for qubit in range(n_qubits - 1, -1, -1):
        mat = np.kron(mat, _PAULI_MATRICES.get(by_index.get(qubit), _I2))
    return mat


@dataclass(frozen=True)
class PauliSum:
    """A simplified sum of Pauli terms over a shared qubit count.

    After construction no two terms share a factor map, terms with
    coefficient magnitude below the drop tolerance are removed, and terms
    are ordered lexicographically by their (index, axis) key so output is
    deterministic.
    """

    n_qubits: int
    terms: tuple[PauliTerm, ...] = field(default=())

    def __post_init__(self):
        for term in self.terms:
            if term.n_qubits != self.n_qubits:
                raise ValueError("all terms must share the sum's qubit count")

    @classmethod
    def from_terms(
        cls,
        n_qubits: int,
        terms: Iterable[PauliTerm],
        drop_tol: float = DEFAULT_DROP_TOL,
    ) -> "PauliSum":
        merged: dict[tuple[tuple[int, str], ...], complex] = {}
        for term in terms:
            if term.n_qubits != n_qubits:
                raise ValueError("all terms must share the sum's qubit count")
            merged[term.key] = merged.get(term.key, 0.0 + 0.0j) + term.coefficient
        kept = [
            PauliTerm(n_qubits, key, coeff)
            for key, coeff in merged.items()
            if abs(coeff) > drop_tol
        ]
        kept.sort(key=lambda t: t.key)
        return cls(n_qubits, tuple(kept))

    @classmethod
    def zero(cls, n_qubits: int) -> "PauliSum":
        return cls(n_qubits, ())

    @classmethod
    def identity(cls, n_qubits: int, coefficient: complex = 1.0) -> "PauliSum":
        return cls.from_terms(n_qubits, [PauliTerm(n_qubits, (), coefficient)])

    def simplify(self, drop_tol: float = DEFAULT_DROP_TOL) -> "PauliSum":
        return PauliSum.from_terms(self.n_qubits, self.terms, drop_tol)

    def coefficient_of(self, factors: Mapping[int, str] | Iterable[tuple[int, str]]) -> complex:
        key = _canonical_factors(factors, self.n_qubits)
        for term in self.terms:
            if term.key == key:
                return term.coefficient
        return 0.0 + 0.0j

    @property
    def identity_coefficient(self) -> complex:
        return self.coefficient_of(())

    def adjoint(self) -> "PauliSum":
        return PauliSum.from_terms(self.n_qubits, (t.adjoint() for t in self.terms))

    def is_hermitian(self, tol: float = 1e-10) -> bool:
        return all(abs(t.coefficient.imag) <= tol for t in self.terms)

    def __add__(self, other: "PauliSum") -> "PauliSum":
        return add(self, other)

    def __sub__(self, other: "PauliSum") -> "PauliSum":
        return add(self, other * -1.0)

    def __mul__(self, other):
        if isinstance(other, PauliSum):
            return multiply_sums(self, other)
        return PauliSum.from_terms(
            self.n_qubits, (t.with_coefficient(t.coefficient * complex(other)) for t in self.terms)
        )

    def __rmul__(self, scalar: complex) -> "PauliSum":
        return self * scalar

    def __len__(self) -> int:
        return len(self.terms)

    def to_dense_matrix(self, dense_limit: int = DEFAULT_DENSE_LIMIT) -> np.ndarray:
        """Kronecker-product expansion into a 2^n x 2^n complex matrix."""
        if self.n_qubits > dense_limit:
            raise ValueError(
                f"dense expansion of {self.n_qubits} qubits exceeds limit {dense_limit}"
            )
        dim = 2**self.n_qubits
        out = np.zeros((dim, dim), dtype=complex)
        for term in self.terms:
            out += term.coefficient * _term_dense(term.factors, self.n_qubits)
        return out

    def to_text(self) -> str:
        """One term per line: ``<coeff_re> <coeff_im> <axis><index>...``.

        The identity factor sequence is written as ``I``.  Floats use
        shortest round-trip repr, so serialization is bit-exact.
        """
        lines = []
        for term in self.terms:
            body = " ".join(f"{axis}{index}" for index, axis in term.factors) or "I"
            lines.append(f"{term.coefficient.real!r} {term.coefficient.imag!r} {body}")
        return "\n".join(lines) + ("\n" if lines else "")

    @classmethod
    def from_text(cls, text: str, n_qubits: int) -> "PauliSum":
        terms = []
        for lineno, raw in enumerate(text.splitlines(), start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split()
            if len(parts) < 3:
                raise ValueError(f"line {lineno}: expected '<re> <im> <factors...>'")
            try:
                re_part, im_part = float(parts[0]), float(parts[1])
            except ValueError as exc:
                raise ValueError(f"line {lineno}: bad coefficient: {exc}") from exc
            factors = []
            if parts[2:] != ["I"]:
                for token in parts[2:]:
                    axis, index = token[0], token[1:]
                    if axis not in _AXES or not index.isdigit():
                        raise ValueError(f"line {lineno}: bad factor token {token!r}")
                    factors.append((int(index), axis))
            terms.append(PauliTerm(n_qubits, factors, complex(re_part, im_part)))
        return cls.from_terms(n_qubits, terms, drop_tol=0.0)

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        return " + ".join(str(t) for t in self.terms)


def add(a: PauliSum, b: PauliSum) -> PauliSum:
    """Term-wise union followed by simplification."""
    if a.n_qubits != b.n_qubits:
        raise ValueError(f"qubit count mismatch: {a.n_qubits} != {b.n_qubits}")
    return PauliSum.from_terms(a.n_qubits, (*a.terms, *b.terms))


def multiply_sums(a: PauliSum, b: PauliSum) -> PauliSum:
    if a.n_qubits != b.n_qubits:
        raise ValueError(f"qubit count mismatch: {a.n_qubits} != {b.n_qubits}")
    return PauliSum.from_terms(a.n_qubits, (multiply(ta, tb) for ta in a.terms for tb in b.terms))


def commutator(a: PauliSum, b: PauliSum) -> PauliSum:
    """ab - ba, simplified."""
    return add(multiply_sums(a, b), multiply_sums(b, a) * -1.0)
