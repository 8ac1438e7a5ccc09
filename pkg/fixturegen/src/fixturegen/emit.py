"""Writers for the integral-file grammar and its metadata sidecar.

Integral files are FCIDUMP-style text:

    &FCI NORB=<n>,NELEC=<m>,MS2=<s>
     &END
    <value> <i> <j> <k> <l>

with 1-based indices, two-body values in chemists' notation ``(ij|kl)``
stored once per 8-fold-symmetry orbit (i>=j, k>=l, (i,j) >= (k,l)),
one-body values as ``v i j 0 0`` (i>=j), orbital energies as
``e i 0 0 0``, and the core energy last as ``v 0 0 0 0``.  Floats use
shortest round-trip repr.

The sidecar is YAML carrying hf_energy, orbital_energies, and the
selected active_indices.
"""

from __future__ import annotations

from pathlib import Path

import yaml

from .scf import MeanFieldResult

VALUE_DROP_TOL = 1e-12


def _canonical_quads(n: int):
    for i in range(n):
        for j in range(i + 1):
            for k in range(i + 1):
                lmax = j if k == i else k
                for l in range(lmax + 1):
                    yield i, j, k, l


def format_integals_text(
    result: MeanFieldResult, ms2: int = 0, point_label: str | None = None
) -> str:
    n = result.n_spatial
    lines = [f"&FCI NORB={n},NELEC={result.n_electrons},MS2={ms2}", " &END"]
    for i, j, k, l in _canonical_quads(n):
        value = float(result.h2_mo[i, j, k, l])
        if abs(value) > VALUE_DROP_TOL:
            lines.append(f"{value!r} {i + 1} {j + 1} {k + 1} {l + 1}")
    for i in range(n):
        for j in range(i + 1):
            value = float(result.h1_mo[i, j])
            if abs(value) > VALUE_DROP_TOL:
                lines.append(f"{value!r} {i + 1} {j + 1} 0 0")
    for i in range(n):
        lines.append(f"{float(result.orbital_energies[i])!r} {i + 1} 0 0 0")
    lines.append(f"{float(result.e_nuc)!r} 0 0 0 0")
    return "\n".join(lines) + "\n"


def select_active_indices(result: MeanFieldResult, rule: str) -> list[int]:
    """Spatial-orbital indices selected by the active-space rule."""
    n_occ = result.n_electrons // 2
    if rule == "homo_lumo":
        indices = [n_occ - 1]
        if n_occ < result.n_spatial:
            indices.append(n_occ)
        return indices
    if rule == "full":
        return list(range(result.n_spatial))
    raise ValueError(f"unknown active-space rule {rule!r} (expected 'homo_lumo' or 'full')")


def write_fixture(
    result: MeanFieldResult,
    path: Path,
    active_rule: str = "homo_lumo",
    point_label: str | None = None,
    geometry: list | None = None,
    basis: str | None = None,
) -> Path:
    """Write the integral file plus its ``.sidecar.yaml``; returns the sidecar path."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(format_integals_text(result, point_label=point_label))
    sidecar = {
        "point_label": point_label or path.stem,
        "basis": basis,
        "geometry_angstrom": geometry,
        "n_spatial": result.n_spatial,
        "n_electrons": result.n_electrons,
        "hf_energy": float(result.e_hf),
        "nuclear_repulsion": float(result.e_nuc),
        "orbital_energies": [float(x) for x in result.orbital_energies],
        "active_rule": active_rule,
        "active_indices": select_active_indices(result, active_rule),
        "scf_iterations": result.iterations,
    }
    sidecar_path = path.with_suffix(".sidecar.yaml")
    sidecar_path.write_text(yaml.safe_dump(sidecar, sort_keys=False))
    return sidecar_path
