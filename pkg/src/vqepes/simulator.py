"""Gate-program execution, expectation estimation, and noise channels.

Pure states evolve as dense statevectors; noisy runs evolve a density
matrix with the configured Kraus channels applied exactly after each
gate (no trajectory sampling), so shot noise is the only stochastic
element anywhere in the stack.

Measurement sampling groups Pauli terms into qubit-wise commuting sets,
rotates into the shared eigenbasis, and draws multinomial bitstring
counts (``shots`` per group) from a seeded PCG64 generator; the identity
term enters exactly.

Noise attaches per gate class.  Classes are ``state_prep`` (the
reference X gates), ``single_qubit_gate`` (rotations of Pauli weight 1),
and ``multi_qubit_rotation`` (weight >= 2).  Single-qubit channels apply
to every qubit in the gate's support; the two-qubit depolarizing channel
applies across consecutive pairs of the sorted support, mirroring the
entangler ladder such a rotation would compile to.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import yaml

from .ansatz import GateProgram, PauliRotation, XGate
from .errors import ConfigError
from .pauli import PauliSum, PauliTerm

DENSITY_MATRIX_LIMIT = 10
KRAUS_COMPLETENESS_TOL = 1e-12
STATE_NORM_TOL = 1e-10
HERMITICITY_TOL = 1e-10

GATE_CLASSES = ("state_prep", "single_qubit_gate", "multi_qubit_rotation")

_H = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2.0)
_SDG = np.array([[1, 0], [0, -1j]], dtype=complex)
_BASIS_ROTATIONS = {"X": _H, "Y": _H @ _SDG, "Z": np.eye(2, dtype=complex)}


# ---------------------------------------------------------------------------
# states


@dataclass(frozen=True)
class StateVector:
    n_qubits: int
    amplitudes: np.ndarray

    def __post_init__(self):
        if self.amplitudes.shape != (2**self.n_qubits,):
            raise ValueError("amplitude vector has wrong length")
        norm = float(np.linalg.norm(self.amplitudes))
        if abs(norm - 1.0) > STATE_NORM_TOL:
            raise ValueError(f"state norm {norm} deviates from 1")

    @classmethod
    def zero_state(cls, n_qubits: int) -> "StateVector":
        amplitudes = np.zeros(2**n_qubits, dtype=complex)
        amplitudes[0] = 1.0
        return cls(n_qubits, amplitudes)

    def to_density_matrix(self) -> "DensityMatrix":
        return DensityMatrix(self.n_qubits, np.outer(self.amplitudes, self.amplitudes.conj()))


@dataclass(frozen=True)
class DensityMatrix:
    n_qubits: int
    matrix: np.ndarray

    def __post_init__(self):
        dim = 2**self.n_qubits
        if self.matrix.shape != (dim, dim):
            raise ValueError("density matrix has wrong shape")
        if abs(np.trace(self.matrix) - 1.0) > STATE_NORM_TOL:
            raise ValueError(f"trace {np.trace(self.matrix)} deviates from 1")
        if np.max(np.abs(self.matrix - self.matrix.conj().T)) > STATE_NORM_TOL:
            raise ValueError("density matrix is not Hermitian")

    def smallest_eigenvalue(self) -> float:
        return float(np.min(np.linalg.eigvalsh(self.matrix)))


# ---------------------------------------------------------------------------
# Pauli-string primitives on basis-indexed arrays (qubit j = bit j)


def _parity(values: np.ndarray) -> np.ndarray:
    v = values.copy()
    shift = 1
    while shift < 32:
        v ^= v >> shift
        shift <<= 1
    return v & 1


def _term_masks(term: PauliTerm) -> tuple[int, int, int]:
    """(flip mask for X/Y, count of Y factors, sign mask for Y/Z)."""
    flip = 0
    sign = 0
    n_y = 0
    for index, axis in term.factors:
        if axis in ("X", "Y"):
            flip |= 1 << index
        if axis in ("Y", "Z"):
            sign |= 1 << index
        if axis == "Y":
            n_y += 1
    return flip, n_y, sign


def _apply_term_rows(arr: np.ndarray, term: PauliTerm, n_qubits: int) -> np.ndarray:
    """P @ arr for a coefficient-1 Pauli string, acting on axis 0."""
    flip, n_y, sign_mask = _term_masks(term)
    idx = np.arange(2**n_qubits)
    phase = (1j**n_y) * (1.0 - 2.0 * _parity(idx & sign_mask))
    out = np.empty_like(arr)
    if arr.ndim == 1:
        out[idx ^ flip] = phase * arr
    else:
        out[idx ^ flip, :] = phase[:, None] * arr
    return out


def _apply_term_columns(arr: np.ndarray, term: PauliTerm, n_qubits: int) -> np.ndarray:
    """arr @ P for a coefficient-1 Pauli string."""
    flip, n_y, sign_mask = _term_masks(term)
    idx = np.arange(2**n_qubits)
    phase = (1j**n_y) * (1.0 - 2.0 * _parity(idx & sign_mask))
    return arr[:, idx ^ flip] * phase[None, :]


def _apply_local_rows(arr: np.ndarray, local: np.ndarray, qubits: tuple[int, ...], n_qubits: int):
    """(local x I_rest) @ arr; local bit j corresponds to qubits[j]."""
    k = len(qubits)
    dim = 2**n_qubits
    idx = np.arange(dim)
    sub = np.zeros(dim, dtype=np.int64)
    for j, q in enumerate(qubits):
        sub |= ((idx >> q) & 1) << j
    clear = idx & ~sum(1 << q for q in qubits)
    out = np.zeros_like(arr, dtype=complex)
    for column in range(2**k):
        source = clear | sum(((column >> j) & 1) << q for j, q in enumerate(qubits))
        weights = local[sub, column]
        if arr.ndim == 1:
            out += weights * arr[source]
        else:
            out += weights[:, None] * arr[source, :]
    return out


def _conjugate_local(rho: np.ndarray, local: np.ndarray, qubits, n_qubits: int) -> np.ndarray:
    """local rho local^dagger on the given qubits."""
    left = _apply_local_rows(rho, local, qubits, n_qubits)
    return _apply_local_rows(left.T, local.conj(), qubits, n_qubits).T


# ---------------------------------------------------------------------------
# program execution


def _rotate_vector(psi: np.ndarray, op: PauliRotation, n_qubits: int) -> np.ndarray:
    half = 0.5 * op.angle
    return np.cos(half) * psi - 1j * np.sin(half) * _apply_term_rows(psi, op.term, n_qubits)


def _rotate_density(rho: np.ndarray, op: PauliRotation, n_qubits: int) -> np.ndarray:
    half = 0.5 * op.angle
    c, s = np.cos(half), np.sin(half)
    left = c * rho - 1j * s * _apply_term_rows(rho, op.term, n_qubits)
    return c * left + 1j * s * _apply_term_columns(left, op.term, n_qubits)


def run_statevector(program: GateProgram, n_qubits: int) -> StateVector:
    """Exact application of X gates and multi-qubit Pauli rotations."""
    if program.n_qubits > n_qubits:
        raise ValueError("program qubit count exceeds requested register size")
    psi = np.zeros(2**n_qubits, dtype=complex)
    psi[0] = 1.0
    idx = np.arange(2**n_qubits)
    for op in program.instructions:
        if isinstance(op, XGate):
            if not 0 <= op.qubit < n_qubits:
                raise ValueError(f"X gate qubit {op.qubit} out of range")
            psi = psi[idx ^ (1 << op.qubit)]
        elif isinstance(op, PauliRotation):
            if op.term.factors and op.term.factors[-1][0] >= n_qubits:
                raise ValueError("rotation touches qubit out of range")
            psi = _rotate_vector(psi, op, n_qubits)
        else:
            raise ValueError(f"unknown instruction {op!r}")
    return StateVector(n_qubits, psi)


# ---------------------------------------------------------------------------
# exact expectations


def expectation_exact(state: StateVector | DensityMatrix, h: PauliSum) -> float:
    """<psi|H|psi> or Tr(rho H) for a Hermitian Pauli sum, in hartree."""
    if state.n_qubits != h.n_qubits:
        raise ValueError("state and operator qubit counts differ")
    if not h.is_hermitian(HERMITICITY_TOL):
        raise ValueError("operator is not Hermitian within tolerance")
    total = 0.0 + 0.0j
    if isinstance(state, StateVector):
        psi = state.amplitudes
        for term in h.terms:
            total += term.coefficient * np.vdot(psi, _apply_term_rows(psi, term, h.n_qubits))
    else:
        rho = state.matrix
        idx = np.arange(2**h.n_qubits)
        for term in h.terms:
            flip, n_y, sign_mask = _term_masks(term)
            phase = (1j**n_y) * (1.0 - 2.0 * _parity(idx & sign_mask))
            total += term.coefficient * np.sum(phase * rho[idx, idx ^ flip])
    if abs(total.imag) > HERMITICITY_TOL:
        raise ValueError(f"expectation has non-negligible imaginary part {total.imag}")
    return float(total.real)


# ---------------------------------------------------------------------------
# shot sampling


def qwc_groups(h: PauliSum) -> list[tuple[dict[int, str], list[PauliTerm]]]:
    """Greedy qubit-wise-commuting grouping, deterministic in term order.

    Returns (measurement basis per qubit, member terms) pairs; the
    identity term is excluded (it is added exactly).
    """
    groups: list[tuple[dict[int, str], list[PauliTerm]]] = []
    for term in h.terms:
        if term.is_identity():
            continue
        placed = False
        for basis, members in groups:
            if all(basis.get(q, axis) == axis for q, axis in term.factors):
                basis.update(dict(term.factors))
                members.append(term)
                placed = True
                break
        if not placed:
            groups.append((dict(term.factors), [term]))
    return groups


def _rotated_probabilities(state, basis: dict[int, str], n_qubits: int) -> np.ndarray:
    if isinstance(state, StateVector):
        psi = state.amplitudes
        for qubit, axis in sorted(basis.items()):
            if axis != "Z":
                psi = _apply_local_rows(psi, _BASIS_ROTATIONS[axis], (qubit,), n_qubits)
        probs = np.abs(psi) ** 2
    else:
        rho = state.matrix
        for qubit, axis in sorted(basis.items()):
            if axis != "Z":
                rho = _conjugate_local(rho, _BASIS_ROTATIONS[axis], (qubit,), n_qubits)
        probs = np.real(np.diag(rho))
    probs = np.clip(probs, 0.0, None)
    return probs / probs.sum()


def expectation_sampled(
    state: StateVector | DensityMatrix, h: PauliSum, shots: int, seed
) -> tuple[float, float]:
    """Shot-based estimate of <H>: (mean energy, standard error).

    Every qubit-wise-commuting group is measured with the full ``shots``
    budget; deterministic for a fixed seed.
    """
    if shots < 1:
        raise ValueError("shots must be >= 1")
    if state.n_qubits != h.n_qubits:
        raise ValueError("state and operator qubit counts differ")
    if not h.is_hermitian(HERMITICITY_TOL):
        raise ValueError("operator is not Hermitian within tolerance")
    rng = np.random.default_rng(seed)
    n_qubits = h.n_qubits
    idx = np.arange(2**n_qubits)

    mean = float(h.identity_coefficient.real)
    variance_of_mean = 0.0
    for basis, members in qwc_groups(h):
        probs = _rotated_probabilities(state, basis, n_qubits)
        counts = rng.multinomial(shots, probs)
        outcome_value = np.zeros(2**n_qubits)
        for term in members:
            support = sum(1 << q for q, _ in term.factors)
            outcome_value += term.coefficient.real * (1.0 - 2.0 * _parity(idx & support))
        group_mean = float(np.dot(counts, outcome_value)) / shots
        mean += group_mean
        if shots > 1:
            second_moment = float(np.dot(counts, outcome_value**2)) / shots
            sample_var = max(second_moment - group_mean**2, 0.0) * shots / (shots - 1)
            variance_of_mean += sample_var / shots
    return mean, float(np.sqrt(variance_of_mean))


# ---------------------------------------------------------------------------
# noise channels


@dataclass(frozen=True)
class NoiseChannel:
    """One of: bit_flip(p), dephasing(p), depolarizing_1q(p),
    depolarizing_2q(p), amplitude_damping(gamma)."""

    name: str
    rate: float

    def __post_init__(self):
        if self.name not in CHANNEL_ARITY:
            raise ConfigError(f"unknown noise channel {self.name!r}")
        if not 0.0 <= self.rate <= 1.0:
            raise ConfigError(f"channel rate {self.rate} outside [0, 1]")

    @property
    def arity(self) -> int:
        return CHANNEL_ARITY[self.name]


CHANNEL_ARITY = {
    "bit_flip": 1,
    "dephasing": 1,
    "depolarizing_1q": 1,
    "depolarizing_2q": 2,
    "amplitude_damping": 1,
}

_PAULI_1Q = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}


def kraus_operators(channel: NoiseChannel) -> list[np.ndarray]:
    p = channel.rate
    if channel.name == "bit_flip":
        return [np.sqrt(1 - p) * _PAULI_1Q["I"], np.sqrt(p) * _PAULI_1Q["X"]]
    if channel.name == "dephasing":
        return [np.sqrt(1 - p) * _PAULI_1Q["I"], np.sqrt(p) * _PAULI_1Q["Z"]]
    if channel.name == "depolarizing_1q":
        return [np.sqrt(1 - 3 * p / 4) * _PAULI_1Q["I"]] + [
            np.sqrt(p / 4) * _PAULI_1Q[axis] for axis in "XYZ"
        ]
    if channel.name == "depolarizing_2q":
        ops = [np.sqrt(1 - 15 * p / 16) * np.eye(4, dtype=complex)]
        for a in "IXYZ":
            for b in "IXYZ":
                if a == b == "I":
                    continue
                ops.append(np.sqrt(p / 16) * np.kron(_PAULI_1Q[b], _PAULI_1Q[a]))
        return ops
    if channel.name == "amplitude_damping":
        return [
            np.array([[1, 0], [0, np.sqrt(1 - p)]], dtype=complex),
            np.array([[0, np.sqrt(p)], [0, 0]], dtype=complex),
        ]
    raise ConfigError(f"unknown noise channel {channel.name!r}")


def kraus_completeness_defect(channel: NoiseChannel) -> float:
    """Max-norm deviation of sum K^dagger K from identity."""
    ops = kraus_operators(channel)
    total = sum(k.conj().T @ k for k in ops)
    return float(np.max(np.abs(total - np.eye(total.shape[0]))))


@dataclass(frozen=True)
class NoiseSpec:
    """Per-gate-class channel attachments plus the sampling seed."""

    channels: dict[str, tuple[NoiseChannel, ...]] = field(default_factory=dict)
    seed: int | None = None

    def __post_init__(self):
        for gate_class, channel_list in self.channels.items():
            if gate_class not in GATE_CLASSES:
                raise ConfigError(
                    f"unknown gate class {gate_class!r}; expected one of {GATE_CLASSES}"
                )
            for channel in channel_list:
                defect = kraus_completeness_defect(channel)
                if defect > KRAUS_COMPLETENESS_TOL:
                    raise ConfigError(
                        f"channel {channel.name} violates Kraus completeness ({defect:.2e})"
                    )

    def for_class(self, gate_class: str) -> tuple[NoiseChannel, ...]:
        return self.channels.get(gate_class, ())

    def to_mapping(self) -> dict:
        out: dict = {"seed": self.seed}
        for gate_class in GATE_CLASSES:
            entries = [
                {"channel": ch.name, "rate": ch.rate} for ch in self.for_class(gate_class)
            ]
            if entries:
                out[gate_class] = entries
        return out


def load_noise_spec(path) -> NoiseSpec:
    """Parse a NoiseSpec YAML file (gate class -> channel/rate entries)."""
    path = Path(path)
    try:
        raw = yaml.safe_load(path.read_text())
    except OSError as exc:
        raise ConfigError(f"cannot read noise spec {path}: {exc}") from exc
    except yaml.YAMLError as exc:
        raise ConfigError(f"noise spec {path}: {exc}") from exc
    if not isinstance(raw, dict):
        raise ConfigError(f"noise spec {path}: top level must be a mapping")
    seed = raw.pop("seed", None)
    if seed is not None and not isinstance(seed, int):
        raise ConfigError(f"noise spec {path}: seed must be an integer")
    channels: dict[str, tuple[NoiseChannel, ...]] = {}
    for gate_class, entries in raw.items():
        if gate_class not in GATE_CLASSES:
            raise ConfigError(
                f"noise spec {path}: unknown gate class {gate_class!r} "
                f"(expected one of {GATE_CLASSES})"
            )
        if not isinstance(entries, list):
            raise ConfigError(f"noise spec {path}: {gate_class} must hold a list of channels")
        parsed = []
        for entry in entries:
            if not isinstance(entry, dict) or set(entry) != {"channel", "rate"}:
                raise ConfigError(
                    f"noise spec {path}: each {gate_class} entry needs exactly "
                    f"'channel' and 'rate' keys"
                )
            parsed.append(NoiseChannel(str(entry["channel"]), float(entry["rate"])))
        channels[gate_class] = tuple(parsed)
    return NoiseSpec(channels=channels, seed=seed)


def apply_channel(rho: DensityMatrix, channel: NoiseChannel, qubits) -> DensityMatrix:
    """rho -> sum_K K rho K^dagger on the given qubits."""
    qubits = tuple(qubits)
    if len(qubits) != channel.arity:
        raise ValueError(
            f"channel {channel.name} acts on {channel.arity} qubit(s), got {len(qubits)}"
        )
    for q in qubits:
        if not 0 <= q < rho.n_qubits:
            raise ValueError(f"qubit {q} out of range")
    out = np.zeros_like(rho.matrix)
    for kraus in kraus_operators(channel):
        out += _conjugate_local(rho.matrix, kraus, qubits, rho.n_qubits)
    return DensityMatrix(rho.n_qubits, out)


def _gate_class_and_support(op) -> tuple[str, tuple[int, ...]]:
    if isinstance(op, XGate):
        return "state_prep", (op.qubit,)
    support = tuple(q for q, _ in op.term.factors)
    return ("single_qubit_gate" if len(support) <= 1 else "multi_qubit_rotation"), support


def run_noisy(
    program: GateProgram,
    n_qubits: int,
    noise: NoiseSpec,
    dense_limit: int = DENSITY_MATRIX_LIMIT,
) -> DensityMatrix:
    """Density-matrix evolution with channels applied after each gate."""
    if n_qubits > dense_limit:
        raise ValueError(f"{n_qubits} qubits exceed density-matrix limit {dense_limit}")
    if program.n_qubits > n_qubits:
        raise ValueError("program qubit count exceeds requested register size")
    dim = 2**n_qubits
    rho = np.zeros((dim, dim), dtype=complex)
    rho[0, 0] = 1.0
    idx = np.arange(dim)
    for op in program.instructions:
        if isinstance(op, XGate):
            flipped = idx ^ (1 << op.qubit)
            rho = rho[np.ix_(flipped, flipped)]
        elif isinstance(op, PauliRotation):
            rho = _rotate_density(rho, op, n_qubits)
        else:
            raise ValueError(f"unknown instruction {op!r}")
        gate_class, support = _gate_class_and_support(op)
        for channel in noise.for_class(gate_class):
            if channel.rate == 0.0:
                continue
            if channel.arity == 1:
                for q in support:
                    rho = _apply_channel_raw(rho, channel, (q,), n_qubits)
            else:
                ordered = tuple(sorted(support))
                for pair in zip(ordered, ordered[1:]):
                    rho = _apply_channel_raw(rho, channel, pair, n_qubits)
    rho = 0.5 * (rho + rho.conj().T)
    return DensityMatrix(n_qubits, rho)


def _apply_channel_raw(rho: np.ndarray, channel: NoiseChannel, qubits, n_qubits: int):
    out = np.zeros_like(rho)
    for kraus in kraus_operators(channel):
        out += _conjugate_local(rho, kraus, qubits, n_qubits)
    return out
