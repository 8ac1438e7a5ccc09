"""Fixture requests: what to compute and where to put it."""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

from .emit import write_fixture
from .scf import Molecule, run_rhf


@dataclass(frozen=True)
class FixtureRequest:
    """One molecule at one geometry, destined for one integral file."""

    atoms: tuple[tuple[str, tuple[float, float, float]], ...]
    output: Path
    charge: int = 0
    multiplicity: int = 1
    basis: str = "sto-3g"
    active_rule: str = "homo_lumo"
    point_label: str | None = None

    def __post_init__(self):
        if not self.atoms:
            raise ValueError("geometry must be non-empty")


def generate_fixture(request: FixtureRequest):
    """Run the mean-field engine and emit integral file + sidecar."""
    molecule = Molecule(
        atoms=request.atoms, charge=request.charge, multiplicity=request.multiplicity
    )
    result = run_rhf(molecule, basis=request.basis)
    sidecar = write_fixture(
        result,
        Path(request.output),
        active_rule=request.active_rule,
        point_label=request.point_label or Path(request.output).stem,
        geometry=[[el, list(xyz)] for el, xyz in request.atoms],
        basis=request.basis,
    )
    return result, sidecar


def h2_at(distance_angstrom: float, output: Path, **kwargs) -> FixtureRequest:
    return FixtureRequest(
        atoms=(("H", (0.0, 0.0, 0.0)), ("H", (0.0, 0.0, float(distance_angstrom)))),
        output=output,
        **kwargs,
    )


def bundled_fixture_requests(out_dir: Path) -> list[FixtureRequest]:
    """The committed fixture set: a 3-point H2 bond scan plus a He atom."""
    out_dir = Path(out_dir)
    requests = [
        h2_at(0.60, out_dir / "h2_sto3g_r0.60.int", point_label="r0.60"),
        h2_at(0.74, out_dir / "h2_sto3g_r0.74.int", point_label="r0.74"),
        h2_at(1.00, out_dir / "h2_sto3g_r1.00.int", point_label="r1.00"),
        FixtureRequest(
            atoms=(("He", (0.0, 0.0, 0.0)),),
            output=out_dir / "he_sto3g.int",
            point_label="he",
        ),
    ]
    return requests
