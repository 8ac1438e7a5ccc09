"""Sums of fermionic creation/annihilation operator strings.

Normal order puts all creation operators before annihilation operators,
each group in descending mode order, applying the canonical
anticommutation relations ``{a_p, a_q^} = delta_pq`` exhaustively.

Spin-orbital convention (used package-wide): spatial orbital ``m`` yields
interleaved spin orbitals ``2m`` (alpha) and ``2m+1`` (beta).

Debug text form, one term per line: ``(coeff) [p^ q ...]`` where ``p^``
is creation on mode p and ``q`` annihilation; the identity string is
``[]``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, NamedTuple

MERGE_TOL = 1e-12


class LadderOp(NamedTuple):
    mode: int
    dagger: bool

    def __str__(self) -> str:
        return f"{self.mode}^" if self.dagger else f"{self.mode}"


def alpha(spatial: int) -> int:
    """Spin-orbital index of the alpha spin of a spatial orbital."""
    return 2 * spatial


def beta(spatial: int) -> int:
    """Spin-orbital index of the beta spin of a spatial orbital."""
    return 2 * spatial + 1


@dataclass(frozen=True)
class FermionOperator:
    """A complex-weighted sum of ladder-operator strings on n_modes modes."""

    n_modes: int
    terms: tuple[tuple[tuple[LadderOp, ...], complex], ...] = ()

    def __post_init__(self):
        for ops, _ in self.terms:
            for op in ops:
                if not 0 <= op.mode < self.n_modes:
                    raise ValueError(f"mode {op.mode} out of range for {self.n_modes} modes")

    @classmethod
    def from_dict(
        cls, n_modes: int, terms: dict[tuple[LadderOp, ...], complex], merge_tol: float = MERGE_TOL
    ) -> "FermionOperator":
        kept = sorted(
            (ops, complex(coeff)) for ops, coeff in terms.items() if abs(coeff) > merge_tol
        )
        return cls(n_modes, tuple(kept))

    @classmethod
    def zero(cls, n_modes: int) -> "FermionOperator":
        return cls(n_modes, ())

    @classmethod
    def identity(cls, n_modes: int, coefficient: complex = 1.0) -> "FermionOperator":
        return cls.from_dict(n_modes, {(): complex(coefficient)})

    @classmethod
    def ladder(cls, n_modes: int, ops: Iterable[tuple[int, bool]], coefficient: complex = 1.0):
        """Single term from (mode, dagger) pairs, e.g. ``[(2, True), (0, False)]``."""
        seq = tuple(LadderOp(m, d) for m, d in ops)
        return cls.from_dict(n_modes, {seq: complex(coefficient)})

    def as_dict(self) -> dict[tuple[LadderOp, ...], complex]:
        return dict(self.terms)

    def __add__(self, other: "FermionOperator") -> "FermionOperator":
        if self.n_modes != other.n_modes:
            raise ValueError(f"mode count mismatch: {self.n_modes} != {other.n_modes}")
        merged = self.as_dict()
        for ops, coeff in other.terms:
            merged[ops] = merged.get(ops, 0.0 + 0.0j) + coeff
        return FermionOperator.from_dict(self.n_modes, merged)

    def __sub__(self, other: "FermionOperator") -> "FermionOperator":
        return self + (other * -1.0)

    def __mul__(self, other):
        if isinstance(other, FermionOperator):
            if self.n_modes != other.n_modes:
                raise ValueError(f"mode count mismatch: {self.n_modes} != {other.n_modes}")
            merged: dict[tuple[LadderOp, ...], complex] = {}
            for ops_a, ca in self.terms:
                for ops_b, cb in other.terms:
                    key = ops_a + ops_b
                    merged[key] = merged.get(key, 0.0 + 0.0j) + ca * cb
            return FermionOperator.from_dict(self.n_modes, merged)
        return FermionOperator.from_dict(
            self.n_modes, {ops: coeff * complex(other) for ops, coeff in self.terms}
        )

    def __rmul__(self, scalar: complex) -> "FermionOperator":
        return self * scalar

    def __len__(self) -> int:
        return len(self.terms)

    def __str__(self) -> str:
        if not self.terms:
            return "(0) []"
        return "\n".join(
            f"({str(coeff).strip('()')}) [{' '.join(str(op) for op in ops)}]"
            for ops, coeff in self.terms
        )

    @classmethod
    def from_text(cls, text: str, n_modes: int) -> "FermionOperator":
        """Parse the debug text form emitted by ``str()``."""
        merged: dict[tuple[LadderOp, ...], complex] = {}
        for lineno, raw in enumerate(text.splitlines(), start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            if not (line.startswith("(") and ") [" in line):
                raise ValueError(f"line {lineno}: expected '(coeff) [ops]'")
            close = line.rindex(") [")
            try:
                coeff = complex(line[1:close].replace(" ", "").strip("()"))
            except ValueError as exc:
                raise ValueError(f"line {lineno}: bad coefficient: {exc}") from exc
            rest = line[close + 1 :].strip()
            if not (rest.startswith("[") and rest.endswith("]")):
                raise ValueError(f"line {lineno}: expected bracketed operator string")
            ops = []
            for token in rest[1:-1].split():
                dagger = token.endswith("^")
                digits = token[:-1] if dagger else token
                if not digits.isdigit():
                    raise ValueError(f"line {lineno}: bad ladder token {token!r}")
                ops.append(LadderOp(int(digits), dagger))
            key = tuple(ops)
            merged[key] = merged.get(key, 0.0 + 0.0j) + coeff
        return cls.from_dict(n_modes, merged)


def hermitian_conjugate(f: FermionOperator) -> FermionOperator:
    """Reverse sequences, toggle daggers, conjugate coefficients."""
    merged: dict[tuple[LadderOp, ...], complex] = {}
    for ops, coeff in f.terms:
        key = tuple(LadderOp(op.mode, not op.dagger) for op in reversed(ops))
        merged[key] = merged.get(key, 0.0 + 0.0j) + coeff.conjugate()
    return FermionOperator.from_dict(f.n_modes, merged)


def _normal_order_sequence(
    ops: tuple[LadderOp, ...], coeff: complex
) -> dict[tuple[LadderOp, ...], complex]:
    """Normal-order a single string via CAR, returning a term dictionary.

    Worklist rewriting: a_p a_q^ -> delta_pq - a_q^ a_p; within-group
    swaps pick up a sign; repeated (mode, dagger) pairs annihilate the
    term (nilpotency).
    """
    result: dict[tuple[LadderOp, ...], complex] = {}
    stack: list[tuple[list[LadderOp], complex]] = [(list(ops), coeff)]
    while stack:
        seq, c = stack.pop()
        swapped = True
        dead = False
        while swapped:
            swapped = False
            for i in range(len(seq) - 1):
                left, right = seq[i], seq[i + 1]
                if not left.dagger and right.dagger:
                    # a_p a_q^ = delta_pq - a_q^ a_p
                    if left.mode == right.mode:
                        stack.append((seq[:i] + seq[i + 2 :], c))
                    seq[i], seq[i + 1] = right, left
                    c = -c
                    swapped = True
                    break
                if left.dagger == right.dagger:
                    if left.mode == right.mode:
                        dead = True
                        break
                    if left.mode < right.mode:
                        seq[i], seq[i + 1] = right, left
                        c = -c
                        swapped = True
                        break
            if dead:
                break
        if not dead:
            key = tuple(seq)
            result[key] = result.get(key, 0.0 + 0.0j) + c
    return result


def normal_order(f: FermionOperator) -> FermionOperator:
    """Apply anticommutation relations exhaustively; merge coefficients."""
    merged: dict[tuple[LadderOp, ...], complex] = {}
    for ops, coeff in f.terms:
        for key, c in _normal_order_sequence(ops, coeff).items():
            merged[key] = merged.get(key, 0.0 + 0.0j) + c
    return FermionOperator.from_dict(f.n_modes, merged)


def number_operator(n_modes: int) -> FermionOperator:
    """Total particle-number operator sum_p a_p^ a_p."""
    merged = {
        (LadderOp(p, True), LadderOp(p, False)): 1.0 + 0.0j for p in range(n_modes)
    }
    return FermionOperator.from_dict(n_modes, merged)
