"""Second-quantized electronic Hamiltonians from integral files.

The integral file grammar (FCIDUMP-style) is::

    &FCI NORB=<n>,NELEC=<m>,MS2=<s>
     &END
    <value> <i> <j> <k> <l>

with 1-based orbital indices and the following line kinds:

* ``v i j k l`` (all > 0): two-body value in chemists' notation
  ``(ij|kl)``, expanded internally to its 8-fold-symmetry orbit;
* ``v i j 0 0``: one-body value ``h[i, j]`` (symmetrized);
* ``v i 0 0 0``: orbital energy, not used by this loader;
* ``v 0 0 0 0``: core energy (nuclear repulsion plus any frozen-core
  constant).

Only the header keys NORB, NELEC, MS2 are recognized; anything else is a
loud parse error.  All energies are in hartree; kcal/mol appears only at
reporting boundaries.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import ConfigError
from .fermion import FermionOperator, LadderOp, alpha, beta
from .pauli import PauliSum

SYMMETRY_TOL = 1e-10
INTEGRAL_DROP_TOL = 1e-12

HARTREE_TO_KCALMOL = 627.5094740631
HARTREE_TO_MILLIHARTREE = 1000.0


class IntegralFormatError(ConfigError):
    """Integral file failed to parse or violated a structural invariant."""


@dataclass(frozen=True)
class MolecularIntegrals:
    """One- and two-body spatial-orbital integrals plus the core energy.

    ``h2[p, q, r, s]`` is the chemists'-notation value ``(pq|rs)``.
    """

    n_spatial: int
    n_electrons: int
    e_core: float
    h1: np.ndarray
    h2: np.ndarray
    point_label: str = ""
    ms2: int = 0

    def __post_init__(self):
        n = self.n_spatial
        if self.h1.shape != (n, n):
            raise ValueError(f"h1 must be {n}x{n}, got {self.h1.shape}")
        if self.h2.shape != (n, n, n, n):
            raise ValueError(f"h2 must have rank-4 shape {n}, got {self.h2.shape}")
        validate_symmetries(self.h1, self.h2)


def validate_symmetries(h1: np.ndarray, h2: np.ndarray, tol: float = SYMMETRY_TOL) -> None:
    if h1.size == 0:
        return
    if np.max(np.abs(h1 - h1.T)) > tol:
        raise IntegralFormatError("one-body tensor is not symmetric within tolerance")
    for axes in [(1, 0, 2, 3), (0, 1, 3, 2), (2, 3, 0, 1)]:
        if np.max(np.abs(h2 - h2.transpose(axes))) > tol:
            raise IntegralFormatError(
                "two-body tensor violates 8-fold permutation symmetry within tolerance"
            )


def _parse_header(line: str, path: str) -> dict[str, int]:
    body = line.strip()
    if not body.upper().startswith("&FCI"):
        raise IntegralFormatError(f"{path}:1: expected header starting with '&FCI'")
    fields: dict[str, int] = {}
    for chunk in body[4:].replace(",", " ").split():
        if "=" not in chunk:
            raise IntegralFormatError(f"{path}:1: malformed header item {chunk!r}")
        key, _, value = chunk.partition("=")
        key = key.strip().upper()
        if key not in ("NORB", "NELEC", "MS2"):
            raise IntegralFormatError(f"{path}:1: unknown header key {key!r}")
        try:
            fields[key] = int(value)
        except ValueError:
            raise IntegralFormatError(f"{path}:1: non-integer value for {key}") from None
    for required in ("NORB", "NELEC", "MS2"):
        if required not in fields:
            raise IntegralFormatError(f"{path}:1: missing header key {required}")
    if fields["NORB"] < 1:
        raise IntegralFormatError(f"{path}:1: NORB must be >= 1")
    if not 0 <= fields["NELEC"] <= 2 * fields["NORB"]:
        raise IntegralFormatError(f"{path}:1: NELEC inconsistent with NORB")
    return fields


def _store(
    array: np.ndarray,
    written: np.ndarray,
    index: tuple,
    value: float,
    path: str,
    lineno: int,
) -> None:
    if written[index] and abs(array[index] - value) > SYMMETRY_TOL:
        raise IntegralFormatError(
            f"{path}:{lineno}: symmetry violation: conflicting value for index {index} "
            f"({array[index]!r} vs {value!r})"
        )
    array[index] = value
    written[index] = True


def load_integrals(path, point_label: str | None = None) -> MolecularIntegrals:
    """Parse an integral file; expand stored unique elements by symmetry."""
    path = Path(path)
    try:
        lines = path.read_text().splitlines()
    except OSError as exc:
        raise IntegralFormatError(f"cannot read integral file {path}: {exc}") from exc
    if not lines:
        raise IntegralFormatError(f"{path}: empty file")
    header = _parse_header(lines[0], str(path))
    n = header["NORB"]

    h1 = np.zeros((n, n))
    h2 = np.zeros((n, n, n, n))
    h1_written = np.zeros((n, n), dtype=bool)
    h2_written = np.zeros((n, n, n, n), dtype=bool)
    e_core = 0.0
    core_seen = False

    for lineno, raw in enumerate(lines[1:], start=2):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if line in ("&END", "/"):
            continue
        parts = line.split()
        if len(parts) != 5:
            raise IntegralFormatError(
                f"{path}:{lineno}: expected '<value> <i> <j> <k> <l>', got {len(parts)} fields"
            )
        try:
            value = float(parts[0])
            i, j, k, l = (int(x) for x in parts[1:])
        except ValueError as exc:
            raise IntegralFormatError(f"{path}:{lineno}: {exc}") from exc
        for idx in (i, j, k, l):
            if idx < 0 or idx > n:
                raise IntegralFormatError(f"{path}:{lineno}: orbital index {idx} out of range")
        if i == j == k == l == 0:
            if core_seen and abs(e_core - value) > SYMMETRY_TOL:
                raise IntegralFormatError(f"{path}:{lineno}: conflicting core energy")
            e_core, core_seen = value, True
        elif j == k == l == 0:
            continue  # orbital-energy record, unused
        elif k == l == 0:
            if i == 0 or j == 0:
                raise IntegralFormatError(f"{path}:{lineno}: malformed one-body index pattern")
            p, q = i - 1, j - 1
            _store(h1, h1_written, (p, q), value, str(path), lineno)
            _store(h1, h1_written, (q, p), value, str(path), lineno)
        elif i > 0 and j > 0 and k > 0 and l > 0:
            p, q, r, s = i - 1, j - 1, k - 1, l - 1
            for a, b, c, d in {
                (p, q, r, s), (q, p, r, s), (p, q, s, r), (q, p, s, r),
                (r, s, p, q), (s, r, p, q), (r, s, q, p), (s, r, q, p),
            }:
                _store(h2, h2_written, (a, b, c, d), value, str(path), lineno)
        else:
            raise IntegralFormatError(f"{path}:{lineno}: malformed index pattern {(i, j, k, l)}")

    try:
        return MolecularIntegrals(
            n_spatial=n,
            n_electrons=header["NELEC"],
            e_core=e_core,
            h1=h1,
            h2=h2,
            point_label=point_label if point_label is not None else path.stem,
            ms2=header["MS2"],
        )
    except IntegralFormatError:
        raise
    except ValueError as exc:
        raise IntegralFormatError(f"{path}: {exc}") from exc


@dataclass(frozen=True)
class ActiveSpaceSpec:
    """Which spatial orbitals stay active and which are frozen occupied."""

    n_active_spatial: int
    n_active_electrons: int
    active_indices: tuple[int, ...]
    frozen_occupied_indices: tuple[int, ...] = field(default=())

    def __post_init__(self):
        object.__setattr__(self, "active_indices", tuple(self.active_indices))
        object.__setattr__(
            self, "frozen_occupied_indices", tuple(self.frozen_occupied_indices)
        )
        if len(self.active_indices) != self.n_active_spatial:
            raise ValueError("n_active_spatial disagrees with active_indices length")
        if len(set(self.active_indices)) != len(self.active_indices):
            raise ValueError("active_indices contains duplicates")
        if set(self.active_indices) & set(self.frozen_occupied_indices):
            raise ValueError("active and frozen orbital sets overlap")
        if not 0 <= self.n_active_electrons <= 2 * self.n_active_spatial:
            raise ValueError("n_active_electrons must lie in [0, 2 * n_active_spatial]")

    @classmethod
    def full(cls, ints: MolecularIntegrals) -> "ActiveSpaceSpec":
        return cls(
            n_active_spatial=ints.n_spatial,
            n_active_electrons=ints.n_electrons,
            active_indices=tuple(range(ints.n_spatial)),
        )


def reduce_to_active_space(ints: MolecularIntegrals, spec: ActiveSpaceSpec) -> MolecularIntegrals:
    """Restrict to active orbitals with a mean-field core from frozen ones.

    Effective one-body term: h'_pq = h_pq + sum_i [2(pq|ii) - (pi|iq)];
    core energy gains sum_i 2 h_ii + sum_ij [2(ii|jj) - (ij|ji)], both
    over frozen occupied spatial orbitals.
    """
    for idx in (*spec.active_indices, *spec.frozen_occupied_indices):
        if not 0 <= idx < ints.n_spatial:
            raise ValueError(f"orbital index {idx} out of range for {ints.n_spatial} orbitals")
    expected_active_electrons = ints.n_electrons - 2 * len(spec.frozen_occupied_indices)
    if spec.n_active_electrons != expected_active_electrons:
        raise ValueError(
            f"n_active_electrons={spec.n_active_electrons} inconsistent with freezing "
            f"{len(spec.frozen_occupied_indices)} doubly occupied orbitals out of "
            f"{ints.n_electrons} electrons"
        )

    frozen = list(spec.frozen_occupied_indices)
    active = list(spec.active_indices)

    e_core = ints.e_core
    for i in frozen:
        e_core += 2.0 * ints.h1[i, i]
    for i in frozen:
        for j in frozen:
            e_core += 2.0 * ints.h2[i, i, j, j] - ints.h2[i, j, j, i]

    n_act = len(active)
    h1 = np.zeros((n_act, n_act))
    for p_new, p in enumerate(active):
        for q_new, q in enumerate(active):
            value = ints.h1[p, q]
            for i in frozen:
                value += 2.0 * ints.h2[p, q, i, i] - ints.h2[p, i, i, q]
            h1[p_new, q_new] = value
    h2 = ints.h2[np.ix_(active, active, active, active)].copy()

    return MolecularIntegrals(
        n_spatial=n_act,
        n_electrons=spec.n_active_electrons,
        e_core=float(e_core),
        h1=h1,
        h2=h2,
        point_label=ints.point_label,
        ms2=ints.ms2,
    )


def build_fermionic_hamiltonian(ints: MolecularIntegrals) -> FermionOperator:
    """Spin-orbital expansion of the spatial integrals, interleaved convention.

    H = e_core + sum_{pq,s} h_pq a^_{ps} a_{qs}
        + 1/2 sum_{pqrs,st} (pq|rs) a^_{ps} a^_{rt} a_{st} a_{qs'}
    """
    n_modes = 2 * ints.n_spatial
    spins = (alpha, beta)
    terms: dict[tuple[LadderOp, ...], complex] = {}
    if abs(ints.e_core) > INTEGRAL_DROP_TOL:
        terms[()] = complex(ints.e_core)

    for p in range(ints.n_spatial):
        for q in range(ints.n_spatial):
            value = ints.h1[p, q]
            if abs(value) <= INTEGRAL_DROP_TOL:
                continue
            for spin in spins:
                key = (LadderOp(spin(p), True), LadderOp(spin(q), False))
                terms[key] = terms.get(key, 0.0) + value

    for p in range(ints.n_spatial):
        for q in range(ints.n_spatial):
            for r in range(ints.n_spatial):
                for s in range(ints.n_spatial):
                    value = ints.h2[p, q, r, s]
                    if abs(value) <= INTEGRAL_DROP_TOL:
                        continue
                    for spin1 in spins:
                        for spin2 in spins:
                            key = (
                                LadderOp(spin1(p), True),
                                LadderOp(spin2(r), True),
                                LadderOp(spin2(s), False),
                                LadderOp(spin1(q), False),
                            )
                            terms[key] = terms.get(key, 0.0) + 0.5 * value
    return FermionOperator.from_dict(n_modes, terms)


def build_qubit_hamiltonian(ints: MolecularIntegrals, spec: ActiveSpaceSpec | None, scheme_kind: str) -> PauliSum:
    """Active-space reduction, spin-orbital expansion, and qubit mapping."""
    from .encodings import EncodingScheme, map_operator

    reduced = reduce_to_active_space(ints, spec) if spec is not None else ints
    fermionic = build_fermionic_hamiltonian(reduced)
    scheme = EncodingScheme(scheme_kind, 2 * reduced.n_spatial)
    return map_operator(fermionic, scheme)
