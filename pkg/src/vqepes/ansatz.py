"""UCCSD and k-UpCCGSD circuits as ordered Pauli-rotation gate lists.

Each fermionic excitation T contributes the anti-Hermitian generator
T - T^, whose qubit image is a sum of Pauli strings with purely
imaginary coefficients i*c.  A single first-order Trotter step turns
every string into one rotation gate exp(-i * theta * multiplier / 2 * P)
with multiplier = -2c, emitted in the canonical term order of the
mapping.  At the variational optimum for the problem sizes targeted here
this factorization is exact (verified against the diagonalization
oracle).

Parameter conventions (asserted by tests so changes are loud):

* UCCSD singles between one spatial pair share one parameter across the
  alpha and beta components when ``spin_symmetrize`` is on (the
  default); each double gets its own parameter.
* A k-UpCCGSD layer holds all spin-symmetrized generalized singles over
  spatial pairs p < q plus all paired doubles; every layer gets a fresh
  parameter block, with identical gate order inside each layer.

The reference state is the HF occupation bitstring; under parity/BK the
occupations are re-encoded into the scheme's stored partial sums before
X-gate placement.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .encodings import EncodingScheme, encode_occupations, map_operator
from .fermion import FermionOperator, hermitian_conjugate, normal_order
from .pauli import PauliTerm

GENERATOR_IMAG_TOL = 1e-12


@dataclass(frozen=True)
class ExcitationTerm:
    """One excitation in the cluster operator.

    ``modes`` are spin-orbital indices: (i, a) for single and
    generalized_single (i -> a), (i, j, a, b) for double
    ((i, j) -> (a, b)), and (2m, 2m+1, 2n, 2n+1) for paired_double
    (spatial pair m -> n).
    """

    kind: str
    modes: tuple[int, ...]
    parameter_id: int


@dataclass(frozen=True)
class AnsatzGate:
    """One Pauli rotation: angle = parameter[parameter_id] * multiplier."""

    generator: PauliTerm
    parameter_id: int
    multiplier: float


@dataclass(frozen=True)
class AnsatzCircuit:
    n_qubits: int
    scheme: EncodingScheme
    reference_occupations: tuple[int, ...]
    excitations: tuple[ExcitationTerm, ...]
    gates: tuple[AnsatzGate, ...]
    n_parameters: int

    def __post_init__(self):
        ids = {gate.parameter_id for gate in self.gates}
        if ids and ids != set(range(self.n_parameters)):
            raise ValueError("gate parameter ids must cover 0..n_parameters-1")


@dataclass(frozen=True)
class XGate:
    qubit: int


@dataclass(frozen=True)
class PauliRotation:
    """exp(-i * angle / 2 * P) for a coefficient-free Pauli string P."""

    angle: float
    term: PauliTerm


@dataclass(frozen=True)
class GateProgram:
    n_qubits: int
    instructions: tuple

    def to_text(self) -> str:
        """One gate per line: ``X q`` or ``ROT <theta> <paulistring>``."""
        lines = [f"QUBITS {self.n_qubits}"]
        for op in self.instructions:
            if isinstance(op, XGate):
                lines.append(f"X {op.qubit}")
            else:
                factors = " ".join(f"{axis}{index}" for index, axis in op.term.factors)
                lines.append(f"ROT {op.angle!r} {factors}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "GateProgram":
        lines = [ln.strip() for ln in text.splitlines() if ln.strip() and not ln.startswith("#")]
        if not lines or not lines[0].startswith("QUBITS"):
            raise ValueError("gate program must start with a 'QUBITS <n>' line")
        n_qubits = int(lines[0].split()[1])
        instructions = []
        for lineno, line in enumerate(lines[1:], start=2):
            parts = line.split()
            if parts[0] == "X" and len(parts) == 2:
                instructions.append(XGate(int(parts[1])))
            elif parts[0] == "ROT" and len(parts) >= 3:
                factors = []
                for token in parts[2:]:
                    factors.append((int(token[1:]), token[0]))
                instructions.append(
                    PauliRotation(float(parts[1]), PauliTerm(n_qubits, factors))
                )
            else:
                raise ValueError(f"line {lineno}: bad gate line {line!r}")
        return cls(n_qubits, tuple(instructions))


def _gates_for_generator(
    excitation_fermion: FermionOperator, parameter_id: int, scheme: EncodingScheme
) -> list[AnsatzGate]:
    """Rotations realizing exp(theta * (T - T^)) for one excitation T."""
    generator = normal_order(excitation_fermion - hermitian_conjugate(excitation_fermion))
    image = map_operator(generator, scheme)
    gates = []
    for term in image.terms:
        if abs(term.coefficient.real) > GENERATOR_IMAG_TOL:
            raise ValueError(
                f"excitation generator mapped to non-imaginary coefficient {term.coefficient}"
            )
        gates.append(
            AnsatzGate(
                generator=term.with_coefficient(1.0),
                parameter_id=parameter_id,
                multiplier=-2.0 * term.coefficient.imag,
            )
        )
    return gates


def _single(n_modes: int, i: int, a: int) -> FermionOperator:
    return FermionOperator.ladder(n_modes, [(a, True), (i, False)])


def _double(n_modes: int, i: int, j: int, a: int, b: int) -> FermionOperator:
    # product-of-singles form: (a^ i)(b^ j) excitations composed
    return FermionOperator.ladder(n_modes, [(b, True), (j, False), (a, True), (i, False)])


def _hf_occupations(n_modes: int, n_electrons: int) -> tuple[int, ...]:
    return tuple(1 if m < n_electrons else 0 for m in range(n_modes))


def build_uccsd(
    n_modes: int,
    n_electrons: int,
    scheme: EncodingScheme,
    spin_symmetrize: bool = True,
) -> AnsatzCircuit:
    """Spin-conserving singles and doubles over the HF reference."""
    if n_modes % 2 != 0:
        raise ValueError("n_modes must be even (interleaved spin orbitals)")
    if n_electrons % 2 != 0:
        raise ValueError("n_electrons must be even for the spin-adapted reference")
    if not 0 <= n_electrons <= n_modes:
        raise ValueError("invalid electron count")
    if scheme.n_modes != n_modes:
        raise ValueError("scheme mode count mismatch")

    n_spatial = n_modes // 2
    occ_sp = range(n_electrons // 2)
    virt_sp = range(n_electrons // 2, n_spatial)

    excitations: list[ExcitationTerm] = []
    gates: list[AnsatzGate] = []
    next_parameter = 0

    for i_sp in occ_sp:
        for a_sp in virt_sp:
            components = [(2 * i_sp, 2 * a_sp), (2 * i_sp + 1, 2 * a_sp + 1)]
            for spin_index, (i, a) in enumerate(components):
                pid = next_parameter if spin_symmetrize else next_parameter + spin_index
                excitations.append(ExcitationTerm("single", (i, a), pid))
                gates.extend(_gates_for_generator(_single(n_modes, i, a), pid, scheme))
            next_parameter += 1 if spin_symmetrize else 2

    occ_so = range(n_electrons)
    virt_so = range(n_electrons, n_modes)
    for i in occ_so:
        for j in occ_so:
            if j <= i:
                continue
            for a in virt_so:
                for b in virt_so:
                    if b <= a:
                        continue
                    if (i % 2 + j % 2) != (a % 2 + b % 2):
                        continue  # spin-flipping double
                    pid = next_parameter
                    next_parameter += 1
                    excitations.append(ExcitationTerm("double", (i, j, a, b), pid))
                    gates.extend(
                        _gates_for_generator(_double(n_modes, i, j, a, b), pid, scheme)
                    )

    return AnsatzCircuit(
        n_qubits=scheme.n_qubits,
        scheme=scheme,
        reference_occupations=_hf_occupations(n_modes, n_electrons),
        excitations=tuple(excitations),
        gates=tuple(gates),
        n_parameters=next_parameter,
    )


def build_kupccgsd(
    n_modes: int, n_electrons: int, k: int, scheme: EncodingScheme
) -> AnsatzCircuit:
    """k layers of generalized singles plus paired doubles."""
    if k < 1:
        raise ValueError("k must be >= 1")
    if n_modes % 2 != 0:
        raise ValueError("n_modes must be even (interleaved spin orbitals)")
    if n_electrons % 2 != 0:
        raise ValueError("n_electrons must be even for the paired reference")
    if scheme.n_modes != n_modes:
        raise ValueError("scheme mode count mismatch")

    n_spatial = n_modes // 2
    spatial_pairs = [(p, q) for p in range(n_spatial) for q in range(p + 1, n_spatial)]

    excitations: list[ExcitationTerm] = []
    gates: list[AnsatzGate] = []
    next_parameter = 0
    for _layer in range(k):
        for p, q in spatial_pairs:
            pid = next_parameter
            next_parameter += 1
            for i, a in [(2 * p, 2 * q), (2 * p + 1, 2 * q + 1)]:
                excitations.append(ExcitationTerm("generalized_single", (i, a), pid))
                gates.extend(_gates_for_generator(_single(n_modes, i, a), pid, scheme))
        for m, n in spatial_pairs:
            pid = next_parameter
            next_parameter += 1
            modes = (2 * m, 2 * m + 1, 2 * n, 2 * n + 1)
            excitations.append(ExcitationTerm("paired_double", modes, pid))
            pair_op = _double(n_modes, 2 * m, 2 * m + 1, 2 * n, 2 * n + 1)
            gates.extend(_gates_for_generator(pair_op, pid, scheme))

    return AnsatzCircuit(
        n_qubits=scheme.n_qubits,
        scheme=scheme,
        reference_occupations=_hf_occupations(n_modes, n_electrons),
        excitations=tuple(excitations),
        gates=tuple(gates),
        n_parameters=next_parameter,
    )


def bind_and_compile(circuit: AnsatzCircuit, params) -> GateProgram:
    """Reference-prep X gates followed by bound Pauli rotations."""
    params = np.asarray(params, dtype=float)
    if params.shape != (circuit.n_parameters,):
        raise ValueError(
            f"expected {circuit.n_parameters} parameters, got shape {params.shape}"
        )
    bits = encode_occupations(circuit.reference_occupations, circuit.scheme)
    instructions: list = [XGate(q) for q, bit in enumerate(bits) if bit]
    for gate in circuit.gates:
        angle = float(params[gate.parameter_id]) * gate.multiplier
        instructions.append(PauliRotation(angle, gate.generator))
    return GateProgram(circuit.n_qubits, tuple(instructions))
