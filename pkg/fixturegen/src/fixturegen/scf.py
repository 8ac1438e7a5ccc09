"""Restricted Hartree-Fock over contracted s-type Gaussians.

A deliberately small electronic-structure engine: closed-form overlap,
kinetic, nuclear-attraction, and repulsion integrals for s functions,
followed by a plain SCF loop.  It exists so fixture integral files can be
regenerated without any external quantum-chemistry installation; accuracy
for s-only systems matches the standard analytic formulas to machine
precision.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .basis import ANGSTROM_TO_BOHR, NUCLEAR_CHARGE, shells_for


class ScfError(RuntimeError):
    """SCF failed to converge or the request is outside engine capability."""


@dataclass(frozen=True)
class Molecule:
    """Geometry in Angstrom plus charge/multiplicity."""

    atoms: tuple[tuple[str, tuple[float, float, float]], ...]
    charge: int = 0
    multiplicity: int = 1

    def __post_init__(self):
        if not self.atoms:
            raise ValueError("geometry must contain at least one atom")
        if self.multiplicity != 1:
            raise ScfError("only closed-shell singlets are supported")

    @property
    def n_electrons(self) -> int:
        return sum(NUCLEAR_CHARGE[el] for el, _ in self.atoms) - self.charge


@dataclass
class MeanFieldResult:
    """Converged RHF solution with MO-basis integrals."""

    n_spatial: int
    n_electrons: int
    e_hf: float
    e_nuc: float
    orbital_energies: np.ndarray
    mo_coeff: np.ndarray
    h1_mo: np.ndarray  # (p, q), hartree
    h2_mo: np.ndarray  # chemists' (pq|rs), hartree
    iterations: int = field(default=0)


def _boys0(t: float) -> float:
    if t < 1e-12:
        return 1.0 - t / 3.0
    return 0.5 * math.sqrt(math.pi / t) * math.erf(math.sqrt(t))


class _ContractedS:
    """Normalized contracted s function at a center (bohr)."""

    def __init__(self, exponents, coeffs, center):
        self.exps = np.asarray(exponents, dtype=float)
        self.center = np.asarray(center, dtype=float)
        prim_norm = (2.0 * self.exps / math.pi) ** 0.75
        raw = np.asarray(coeffs, dtype=float) * prim_norm
        # renormalize the contraction
        self_overlap = 0.0
        for ci, ai in zip(raw, self.exps):
            for cj, aj in zip(raw, self.exps):
                self_overlap += ci * cj * (math.pi / (ai + aj)) ** 1.5
        self.coeffs = raw / math.sqrt(self_overlap)


def _pairs(f1: _ContractedS, f2: _ContractedS):
    rab2 = float(np.dot(f1.center - f2.center, f1.center - f2.center))
    for ci, ai in zip(f1.coeffs, f1.exps):
        for cj, aj in zip(f2.coeffs, f2.exps):
            p = ai + aj
            mu = ai * aj / p
            k = math.exp(-mu * rab2)
            pc = (ai * f1.center + aj * f2.center) / p
            yield ci * cj, p, mu, rab2, k, pc


def _overlap(f1, f2) -> float:
    return sum(c * (math.pi / p) ** 1.5 * k for c, p, _, _, k, _ in _pairs(f1, f2))


def _kinetic(f1, f2) -> float:
    return sum(
        c * mu * (3.0 - 2.0 * mu * rab2) * (math.pi / p) ** 1.5 * k
        for c, p, mu, rab2, k, _ in _pairs(f1, f2)
    )


def _nuclear(f1, f2, centers_charges) -> float:
    total = 0.0
    for c, p, _, _, k, pc in _pairs(f1, f2):
        for zc, center in centers_charges:
            t = p * float(np.dot(pc - center, pc - center))
            total -= zc * c * (2.0 * math.pi / p) * k * _boys0(t)
    return total


def _repulsion(f1, f2, f3, f4) -> float:
    total = 0.0
    for c12, p, _, _, k12, pp in _pairs(f1, f2):
        for c34, q, _, _, k34, pq in _pairs(f3, f4):
            t = p * q / (p + q) * float(np.dot(pp - pq, pp - pq))
            total += (
                c12
                * c34
                * 2.0
                * math.pi**2.5
                / (p * q * math.sqrt(p + q))
                * k12
                * k34
                * _boys0(t)
            )
    return total


def _build_functions(molecule: Molecule, basis: str) -> list[_ContractedS]:
    functions = []
    for element, xyz in molecule.atoms:
        center = np.asarray(xyz, dtype=float) * ANGSTROM_TO_BOHR
        for exponents, coeffs in shells_for(element, basis):
            functions.append(_ContractedS(exponents, coeffs, center))
    return functions


def run_rhf(
    molecule: Molecule,
    basis: str = "sto-3g",
    max_iterations: int = 200,
    e_tol: float = 1e-12,
    d_tol: float = 1e-10,
) -> MeanFieldResult:
    """Converge RHF and return MO-basis one/two-body integrals."""
    if molecule.n_electrons % 2 != 0:
        raise ScfError("odd electron counts are not supported (restricted closed shell)")
    functions = _build_functions(molecule, basis)
    n = len(functions)
    n_occ = molecule.n_electrons // 2
    if n_occ > n:
        raise ScfError(f"{molecule.n_electrons} electrons exceed capacity of {n} orbitals")

    centers_charges = [
        (float(NUCLEAR_CHARGE[el]), np.asarray(xyz, dtype=float) * ANGSTROM_TO_BOHR)
        for el, xyz in molecule.atoms
    ]
    s = np.array([[_overlap(fi, fj) for fj in functions] for fi in functions])
    t = np.array([[_kinetic(fi, fj) for fj in functions] for fi in functions])
    v = np.array([[_nuclear(fi, fj, centers_charges) for fj in functions] for fi in functions])
    eri = np.zeros((n, n, n, n))
    for i in range(n):
        for j in range(n):
            for k in range(n):
                for l in range(n):
                    eri[i, j, k, l] = _repulsion(
                        functions[i], functions[j], functions[k], functions[l]
                    )

    e_nuc = 0.0
    for a in range(len(centers_charges)):
        for b in range(a + 1, len(centers_charges)):
            za, ra = centers_charges[a]
            zb, rb = centers_charges[b]
            e_nuc += za * zb / float(np.linalg.norm(ra - rb))

    hcore = t + v
    s_vals, s_vecs = np.linalg.eigh(s)
    if np.min(s_vals) < 1e-10:
        raise ScfError("overlap matrix is numerically singular")
    x = s_vecs @ np.diag(s_vals**-0.5) @ s_vecs.T

    def solve_fock(fock):
        f_prime = x.T @ fock @ x
        eps, c_prime = np.linalg.eigh(f_prime)
        return eps, x @ c_prime

    eps, c = solve_fock(hcore)
    density = 2.0 * c[:, :n_occ] @ c[:, :n_occ].T
    e_elec = 0.0
    for iteration in range(1, max_iterations + 1):
        coulomb = np.einsum("mnls,ls->mn", eri, density)
        exchange = np.einsum("mlsn,ls->mn", eri, density)
        fock = hcore + coulomb - 0.5 * exchange
        e_new = 0.5 * np.sum(density * (hcore + fock))
        eps, c = solve_fock(fock)
        density_new = 2.0 * c[:, :n_occ] @ c[:, :n_occ].T
        delta_d = float(np.max(np.abs(density_new - density)))
        delta_e = abs(e_new - e_elec)
        density, e_elec = density_new, e_new
        if iteration > 1 and delta_e < e_tol and delta_d < d_tol:
            break
    else:
        raise ScfError(f"SCF did not converge in {max_iterations} iterations")

    h1_mo = c.T @ hcore @ c
    h2_mo = np.einsum("mnls,mp,nq,lr,st->pqrt", eri, c, c, c, c, optimize=True)
    return MeanFieldResult(
        n_spatial=n,
        n_electrons=molecule.n_electrons,
        e_hf=float(e_elec + e_nuc),
        e_nuc=float(e_nuc),
        orbital_energies=eps.copy(),
        mo_coeff=c.copy(),
        h1_mo=h1_mo,
        h2_mo=h2_mo,
        iterations=iteration,
    )
