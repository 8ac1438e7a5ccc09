"""Sweep orchestration: run methods over a geometry path, assemble
relative-energy curves, and compute RMSE tables.

The sweep config is YAML::

    scheme: bk
    seed: 12345
    workers: 1            # optional worker-pool width
    points:
      - label: r0.60
        integrals: h2_sto3g_r0.60.int     # relative to the config file
        active:
          spatial: [0, 1]
          electrons: 2
          frozen: []                      # optional
    methods:
      - name: uccsd_exact
        ansatz: uccsd                     # or kupccgsd (needs k)
        backend: exact                    # exact | sampled | noisy
        # shots, repeats, seed-free: derived from the global seed
        # optimizer: cobyla | nelder-mead
        # spin_symmetrize: true
        # noise_spec: noise.yaml          # for noisy backends

Outputs: one ``<method>.csv`` per method (plus the always-computed
``fci`` baseline), ``rmse_matrix.csv``, and ``manifest.yaml`` echoing
the config, derived seeds, and package versions.  Absolute energies are
hartree (``_hartree`` columns); relative energies are kcal/mol
(``_kcalmol``), pinned to zero at the first point.  Identical config and
seeds reproduce byte-identical files.
"""

from __future__ import annotations

import concurrent.futures
import dataclasses
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import yaml

from .ansatz import AnsatzCircuit, build_kupccgsd, build_uccsd
from .encodings import SCHEME_KINDS, EncodingScheme
from .errors import ConfigError, NumericalError
from .fci import fci_ground_energy
from .hamiltonian import (
    HARTREE_TO_KCALMOL,
    ActiveSpaceSpec,
    MolecularIntegrals,
    load_integrals,
    reduce_to_active_space,
    build_fermionic_hamiltonian,
)
from .encodings import map_operator
from .pauli import PauliSum
from .simulator import load_noise_spec
from .vqe import (
    Backend,
    OptimizerSettings,
    VqeProblem,
    minimize,
    repeat_and_average,
)

FCI_METHOD_NAME = "fci"


@dataclass(frozen=True)
class PointSpec:
    label: str
    integrals_path: Path
    active: ActiveSpaceSpec


@dataclass(frozen=True)
class MethodSpec:
    name: str
    ansatz: str  # "uccsd" | "kupccgsd"
    backend: str  # "exact" | "sampled" | "noisy"
    k: int | None = None
    shots: int | None = None
    repeats: int = 1
    optimizer: str = "cobyla"
    spin_symmetrize: bool = True
    noise_spec_path: Path | None = None

    def __post_init__(self):
        if self.ansatz not in ("uccsd", "kupccgsd"):
            raise ConfigError(f"method {self.name}: unknown ansatz {self.ansatz!r}")
        if self.ansatz == "kupccgsd" and (self.k is None or self.k < 1):
            raise ConfigError(f"method {self.name}: kupccgsd requires k >= 1")
        if self.backend not in ("exact", "sampled", "noisy"):
            raise ConfigError(f"method {self.name}: unknown backend {self.backend!r}")
        if self.backend == "sampled" and (self.shots is None or self.shots < 1):
            raise ConfigError(f"method {self.name}: sampled backend requires shots >= 1")
        if self.backend == "noisy" and self.noise_spec_path is None:
            raise ConfigError(f"method {self.name}: noisy backend requires noise_spec")
        if self.repeats < 1:
            raise ConfigError(f"method {self.name}: repeats must be >= 1")
        if self.backend == "exact" and self.repeats != 1:
            raise ConfigError(f"method {self.name}: repeats only apply to sampled/noisy")


@dataclass(frozen=True)
class SweepConfig:
    points: tuple[PointSpec, ...]
    methods: tuple[MethodSpec, ...]
    scheme_kind: str
    seed: int
    workers: int = 1

    def __post_init__(self):
        if not self.points:
            raise ConfigError("sweep needs at least one point")
        labels = [p.label for p in self.points]
        if len(set(labels)) != len(labels):
            raise ConfigError("point labels must be unique")
        names = [m.name for m in self.methods]
        if len(set(names)) != len(names):
            raise ConfigError("method names must be unique")
        if FCI_METHOD_NAME in names:
            raise ConfigError(f"method name {FCI_METHOD_NAME!r} is reserved for the oracle")
        if self.scheme_kind not in SCHEME_KINDS:
            raise ConfigError(f"unknown scheme {self.scheme_kind!r}")
        if self.workers < 1:
            raise ConfigError("workers must be >= 1")


def _require(mapping: dict, key: str, context: str):
    if key not in mapping:
        raise ConfigError(f"{context}: missing required key {key!r}")
    return mapping[key]


def _check_keys(mapping: dict, allowed: set[str], context: str):
    unknown = set(mapping) - allowed
    if unknown:
        raise ConfigError(f"{context}: unknown key(s) {sorted(unknown)}")


def load_sweep_config(path) -> SweepConfig:
    path = Path(path)
    try:
        raw = yaml.safe_load(path.read_text())
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except yaml.YAMLError as exc:
        raise ConfigError(f"config {path}: {exc}") from exc
    if not isinstance(raw, dict):
        raise ConfigError(f"config {path}: top level must be a mapping")
    _check_keys(raw, {"scheme", "seed", "workers", "points", "methods"}, str(path))

    base = path.parent
    points = []
    raw_points = _require(raw, "points", str(path))
    if not isinstance(raw_points, list) or not raw_points:
        raise ConfigError(f"config {path}: 'points' must be a non-empty list")
    for i, entry in enumerate(raw_points):
        context = f"{path}: points[{i}]"
        if not isinstance(entry, dict):
            raise ConfigError(f"{context}: must be a mapping")
        _check_keys(entry, {"label", "integrals", "active"}, context)
        active_raw = _require(entry, "active", context)
        _check_keys(active_raw, {"spatial", "electrons", "frozen"}, f"{context}.active")
        spatial = tuple(_require(active_raw, "spatial", f"{context}.active"))
        try:
            active = ActiveSpaceSpec(
                n_active_spatial=len(spatial),
                n_active_electrons=int(_require(active_raw, "electrons", f"{context}.active")),
                active_indices=spatial,
                frozen_occupied_indices=tuple(active_raw.get("frozen", ())),
            )
        except ValueError as exc:
            raise ConfigError(f"{context}.active: {exc}") from exc
        points.append(
            PointSpec(
                label=str(_require(entry, "label", context)),
                integrals_path=base / str(_require(entry, "integrals", context)),
                active=active,
            )
        )

    methods = []
    for i, entry in enumerate(raw.get("methods") or []):
        context = f"{path}: methods[{i}]"
        if not isinstance(entry, dict):
            raise ConfigError(f"{context}: must be a mapping")
        _check_keys(
            entry,
            {"name", "ansatz", "backend", "k", "shots", "repeats", "optimizer",
             "spin_symmetrize", "noise_spec"},
            context,
        )
        noise_path = entry.get("noise_spec")
        methods.append(
            MethodSpec(
                name=str(_require(entry, "name", context)),
                ansatz=str(_require(entry, "ansatz", context)),
                backend=str(_require(entry, "backend", context)),
                k=entry.get("k"),
                shots=entry.get("shots"),
                repeats=int(entry.get("repeats", 1)),
                optimizer=str(entry.get("optimizer", "cobyla")),
                spin_symmetrize=bool(entry.get("spin_symmetrize", True)),
                noise_spec_path=base / str(noise_path) if noise_path else None,
            )
        )

    return SweepConfig(
        points=tuple(points),
        methods=tuple(methods),
        scheme_kind=str(raw.get("scheme", "bk")),
        seed=int(raw.get("seed", 0)),
        workers=int(raw.get("workers", 1)),
    )


@dataclass(frozen=True)
class PesTable:
    """Absolute/relative energies per method and the RMSE matrix.

    The first point is the reference: every method's relative curve is
    zero there by construction.
    """

    labels: tuple[str, ...]
    methods: tuple[str, ...]
    absolute_hartree: dict[str, tuple[float, ...]]
    stderr_hartree: dict[str, tuple[float, ...]]
    rmse_kcalmol: dict[tuple[str, str], float]

    def relative_kcalmol(self, method: str) -> tuple[float, ...]:
        curve = self.absolute_hartree[method]
        return tuple((e - curve[0]) * HARTREE_TO_KCALMOL for e in curve)


def rmse(curve_a, curve_b) -> float:
    """Root-mean-square difference of two relative curves (kcal/mol).

    Both curves must already be relative to their own first point; the
    pinned (0, 0) first point is included in the mean.
    """
    a = np.asarray(curve_a, dtype=float)
    b = np.asarray(curve_b, dtype=float)
    if a.shape != b.shape:
        raise ValueError(f"curve length mismatch: {a.shape} vs {b.shape}")
    return float(np.sqrt(np.mean((a - b) ** 2)))


def build_point_hamiltonian(
    point: PointSpec, scheme_kind: str
) -> tuple[PauliSum, MolecularIntegrals]:
    ints = load_integrals(point.integrals_path, point_label=point.label)
    reduced = reduce_to_active_space(ints, point.active)
    scheme = EncodingScheme(scheme_kind, 2 * reduced.n_spatial)
    return map_operator(build_fermionic_hamiltonian(reduced), scheme), reduced


def build_method_ansatz(
    method: MethodSpec, n_modes: int, n_electrons: int, scheme: EncodingScheme
) -> AnsatzCircuit:
    if method.ansatz == "uccsd":
        return build_uccsd(
            n_modes, n_electrons, scheme, spin_symmetrize=method.spin_symmetrize
        )
    return build_kupccgsd(n_modes, n_electrons, method.k, scheme)


def derive_seed(global_seed: int, method_index: int, point_index: int) -> int:
    return int(
        np.random.SeedSequence([global_seed, method_index, point_index]).generate_state(1)[0]
    )


def _run_method_point(
    cfg: SweepConfig, method: MethodSpec, method_index: int, point_index: int
) -> tuple[float, float]:
    point = cfg.points[point_index]
    h, reduced = build_point_hamiltonian(point, cfg.scheme_kind)
    scheme = EncodingScheme(cfg.scheme_kind, 2 * reduced.n_spatial)
    ansatz = build_method_ansatz(method, scheme.n_modes, reduced.n_electrons, scheme)
    seed = derive_seed(cfg.seed, method_index, point_index)
    noise = load_noise_spec(method.noise_spec_path) if method.noise_spec_path else None
    backend = Backend(kind=method.backend, shots=method.shots, seed=seed, noise=noise)
    problem = VqeProblem(
        hamiltonian=h,
        ansatz=ansatz,
        backend=backend,
        optimizer=OptimizerSettings(name=method.optimizer),
    )
    if method.backend == "exact" or (method.backend == "noisy" and method.shots is None):
        result = minimize(problem)
        return result.optimal_energy, 0.0
    aggregate = repeat_and_average(problem, method.repeats)
    return aggregate.mean_energy, aggregate.std_energy


def _run_fci_point(cfg: SweepConfig, point_index: int) -> tuple[float, float]:
    point = cfg.points[point_index]
    h, reduced = build_point_hamiltonian(point, cfg.scheme_kind)
    scheme = EncodingScheme(cfg.scheme_kind, 2 * reduced.n_spatial)
    result = fci_ground_energy(h, n_electrons=reduced.n_electrons, scheme=scheme)
    return result.ground_energy, 0.0


def run_sweep(cfg: SweepConfig, out_dir=None) -> PesTable:
    """Evaluate every (method, point) plus the FCI baseline.

    Any point failure aborts the sweep with the failing label attached;
    no partial tables are written.
    """
    tasks: list[tuple[str, int, MethodSpec | None]] = []
    for point_index in range(len(cfg.points)):
        tasks.append((FCI_METHOD_NAME, point_index, None))
    for method_index, method in enumerate(cfg.methods):
        for point_index in range(len(cfg.points)):
            tasks.append((method.name, point_index, method))

    def run_task(task):
        name, point_index, method = task
        label = cfg.points[point_index].label
        try:
            if method is None:
                return name, point_index, _run_fci_point(cfg, point_index)
            method_index = cfg.methods.index(method)
            return name, point_index, _run_method_point(cfg, method, method_index, point_index)
        except (ConfigError, NumericalError):
            raise
        except Exception as exc:
            raise NumericalError(f"point {label!r}, method {name!r}: {exc}") from exc

    results: dict[tuple[str, int], tuple[float, float]] = {}
    if cfg.workers > 1:
        with concurrent.futures.ThreadPoolExecutor(max_workers=cfg.workers) as pool:
            for name, point_index, value in pool.map(run_task, tasks):
                results[(name, point_index)] = value
    else:
        for task in tasks:
            name, point_index, value = run_task(task)
            results[(name, point_index)] = value

    labels = tuple(p.label for p in cfg.points)
    method_names = (FCI_METHOD_NAME, *(m.name for m in cfg.methods))
    absolute = {
        name: tuple(results[(name, i)][0] for i in range(len(labels)))
        for name in method_names
    }
    stderr = {
        name: tuple(results[(name, i)][1] for i in range(len(labels)))
        for name in method_names
    }

    table = PesTable(
        labels=labels,
        methods=method_names,
        absolute_hartree=absolute,
        stderr_hartree=stderr,
        rmse_kcalmol={},
    )
    rmse_matrix = {
        (a, b): rmse(table.relative_kcalmol(a), table.relative_kcalmol(b))
        for a in method_names
        for b in method_names
    }
    table = dataclasses.replace(table, rmse_kcalmol=rmse_matrix)

    if out_dir is not None:
        write_outputs(cfg, table, Path(out_dir))
    return table


def write_outputs(cfg: SweepConfig, table: PesTable, out_dir: Path) -> None:
    out_dir.mkdir(parents=True, exist_ok=True)
    for name in table.methods:
        lines = ["label,e_abs_hartree,e_rel_kcalmol,stderr_hartree"]
        relative = table.relative_kcalmol(name)
        for i, label in enumerate(table.labels):
            lines.append(
                f"{label},{table.absolute_hartree[name][i]!r},"
                f"{relative[i]!r},{table.stderr_hartree[name][i]!r}"
            )
        (out_dir / f"{name}.csv").write_text("\n".join(lines) + "\n")

    header = ["method"] + list(table.methods)
    lines = [",".join(header)]
    for a in table.methods:
        row = [a] + [repr(table.rmse_kcalmol[(a, b)]) for b in table.methods]
        lines.append(",".join(row))
    (out_dir / "rmse_matrix.csv").write_text("\n".join(lines) + "\n")

    (out_dir / "manifest.yaml").write_text(yaml.safe_dump(_manifest(cfg), sort_keys=False))


def _manifest(cfg: SweepConfig) -> dict:
    import numpy
    import scipy

    from . import __version__

    return {
        "versions": {
            "vqepes": __version__,
            "numpy": numpy.__version__,
            "scipy": scipy.__version__,
        },
        "scheme": cfg.scheme_kind,
        "seed": cfg.seed,
        "workers": cfg.workers,
        "points": [
            {
                "label": p.label,
                "integrals": str(p.integrals_path),
                "active": {
                    "spatial": list(p.active.active_indices),
                    "electrons": p.active.n_active_electrons,
                    "frozen": list(p.active.frozen_occupied_indices),
                },
            }
            for p in cfg.points
        ],
        "methods": [
            {
                "name": m.name,
                "ansatz": m.ansatz,
                "k": m.k,
                "backend": m.backend,
                "shots": m.shots,
                "repeats": m.repeats,
                "optimizer": m.optimizer,
                "spin_symmetrize": m.spin_symmetrize,
                "noise_spec": str(m.noise_spec_path) if m.noise_spec_path else None,
                "noise_channels": (
                    load_noise_spec(m.noise_spec_path).to_mapping()
                    if m.noise_spec_path
                    else None
                ),
                "derived_seeds": [
                    derive_seed(cfg.seed, i, j)
                    for i, mm in enumerate(cfg.methods)
                    if mm.name == m.name
                    for j in range(len(cfg.points))
                ],
            }
            for m in cfg.methods
        ],
    }
