"""Exact-diagonalization reference within a particle-number sector.

Diagonalizes the dense image of a qubit Hamiltonian directly (problem
sizes here are at most a few hundred basis states), restricting to the
requested electron-number sector via the scheme-mapped total-number
operator, whose image is diagonal in the computational basis for every
supported encoding.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .encodings import EncodingScheme, map_operator
from .fermion import number_operator
from .pauli import DEFAULT_DENSE_LIMIT, PauliSum


@dataclass(frozen=True)
class SpectrumResult:
    """Lowest eigenvalues (ascending) and the normalized ground vector."""

    eigenvalues: np.ndarray
    ground_state: np.ndarray
    n_electrons: int | None

    @property
    def ground_energy(self) -> float:
        return float(self.eigenvalues[0])


def number_sector_indices(scheme: EncodingScheme, n_electrons: int) -> np.ndarray:
    """Computational-basis indices spanning the electron-number sector."""
    number_image = map_operator(number_operator(scheme.n_modes), scheme)
    diag = np.real(np.diag(number_image.to_dense_matrix()))
    indices = np.flatnonzero(np.abs(diag - n_electrons) < 1e-6)
    if indices.size == 0:
        raise ValueError(f"empty sector: no basis states with {n_electrons} electrons")
    return indices


def fci_ground_energy(
    h: PauliSum,
    n_electrons: int | None = None,
    scheme: EncodingScheme | None = None,
    k: int = 1,
    dense_limit: int = DEFAULT_DENSE_LIMIT,
) -> SpectrumResult:
    """Diagonalize ``h`` restricted to a particle-number sector.

    With ``n_electrons=None`` the full space is used.  Otherwise the
    sector projector comes from the scheme-mapped number operator, so the
    scheme must match the one that produced ``h``.
    """
    if h.n_qubits > dense_limit:
        raise ValueError(f"{h.n_qubits} qubits exceed dense limit {dense_limit}")
    if not h.is_hermitian():
        raise ValueError("hamiltonian must be Hermitian (real coefficients)")
    dense = h.to_dense_matrix(dense_limit)

    if n_electrons is None:
        indices = np.arange(dense.shape[0])
    else:
        if scheme is None:
            raise ValueError("a scheme is required to build the number-sector projector")
        if scheme.n_qubits != h.n_qubits:
            raise ValueError("scheme qubit count does not match hamiltonian")
        indices = number_sector_indices(scheme, n_electrons)

    block = dense[np.ix_(indices, indices)]
    eigenvalues, eigenvectors = np.linalg.eigh(block)
    k = min(k, eigenvalues.size)
    ground = np.zeros(dense.shape[0], dtype=complex)
    ground[indices] = eigenvectors[:, 0]
    ground /= np.linalg.norm(ground)
    return SpectrumResult(
        eigenvalues=eigenvalues[:k].copy(), ground_state=ground, n_electrons=n_electrons
    )
