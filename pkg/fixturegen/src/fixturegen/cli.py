"""Fixture-generation CLI.

``fixturegen bundled --out-dir DIR`` regenerates the committed fixture
set; ``fixturegen from-request FILE`` runs one request described in
YAML::

    atoms: [[H, [0.0, 0.0, 0.0]], [H, [0.0, 0.0, 0.74]]]
    charge: 0
    multiplicity: 1
    basis: sto-3g
    active_rule: homo_lumo
    output: h2_custom.int
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import yaml

from .requests import FixtureRequest, bundled_fixture_requests, generate_fixture
from .scf import ScfError


def _request_from_yaml(path: Path) -> FixtureRequest:
    raw = yaml.safe_load(path.read_text())
    if not isinstance(raw, dict):
        raise ValueError(f"{path}: top level must be a mapping")
    unknown = set(raw) - {"atoms", "charge", "multiplicity", "basis", "active_rule", "output"}
    if unknown:
        raise ValueError(f"{path}: unknown key(s) {sorted(unknown)}")
    if "atoms" not in raw or "output" not in raw:
        raise ValueError(f"{path}: 'atoms' and 'output' are required")
    atoms = tuple(
        (str(element), (float(x), float(y), float(z))) for element, (x, y, z) in raw["atoms"]
    )
    return FixtureRequest(
        atoms=atoms,
        output=path.parent / str(raw["output"]),
        charge=int(raw.get("charge", 0)),
        multiplicity=int(raw.get("multiplicity", 1)),
        basis=str(raw.get("basis", "sto-3g")),
        active_rule=str(raw.get("active_rule", "homo_lumo")),
    )


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="fixturegen", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p_bundled = sub.add_parser("bundled", help="regenerate the committed fixture set")
    p_bundled.add_argument("--out-dir", required=True)

    p_request = sub.add_parser("from-request", help="run one YAML fixture request")
    p_request.add_argument("request")

    args = parser.parse_args(argv)
    try:
        if args.command == "bundled":
            for request in bundled_fixture_requests(Path(args.out_dir)):
                result, sidecar = generate_fixture(request)
                print(f"{request.output}  e_hf={result.e_hf!r}  ({sidecar.name})")
        else:
            request = _request_from_yaml(Path(args.request))
            result, sidecar = generate_fixture(request)
            print(f"{request.output}  e_hf={result.e_hf!r}  ({sidecar.name})")
        return 0
    except (ValueError, OSError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except ScfError as exc:
        print(f"engine error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
