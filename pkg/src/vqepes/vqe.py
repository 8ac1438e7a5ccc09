"""Derivative-free minimization of the ansatz energy.

Two optimizers are available behind one interface: a COBYLA-family
linear-approximation trust-region method (the default) and Nelder-Mead
as a cross-check; both run via scipy, wrapped so the stopping contract
is ours: the loop ends when the best energy stops improving by more
than ``tol_energy`` over a trailing window, or at ``max_evaluations``.

Sampled and noisy backends evaluate every iterate with the configured
shot budget and one sampling seed per run, so a whole minimization is a
deterministic function of its inputs; repeats derive independent seeds
from the base seed.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy import optimize as scipy_optimize

from .ansatz import AnsatzCircuit, bind_and_compile
from .errors import NumericalError
from .pauli import PauliSum
from .simulator import (
    NoiseSpec,
    expectation_exact,
    expectation_sampled,
    run_noisy,
    run_statevector,
)

EXACT_TOL_ENERGY = 1e-8
SAMPLED_TOL_ENERGY = 1e-5
DEFAULT_MAX_EVALUATIONS = 5000
DEFAULT_RHOBEG = 0.3
COBYLA_RHOEND_EXACT = 1e-7
COBYLA_RHOEND_SAMPLED = 1e-3

OPTIMIZER_NAMES = ("cobyla", "nelder-mead")
BACKEND_KINDS = ("exact", "sampled", "noisy")


@dataclass(frozen=True)
class Backend:
    """Energy-evaluation backend: exact, sampled(shots, seed), or
    noisy(noise, shots, seed); noisy with shots=None evaluates Tr(rho H)
    exactly on the noisy state."""

    kind: str
    shots: int | None = None
    seed: int | None = None
    noise: NoiseSpec | None = None

    def __post_init__(self):
        if self.kind not in BACKEND_KINDS:
            raise ValueError(f"unknown backend kind {self.kind!r}")
        if self.kind == "sampled" and (self.shots is None or self.shots < 1):
            raise ValueError("sampled backend requires shots >= 1")
        if self.kind == "noisy" and self.noise is None:
            raise ValueError("noisy backend requires a NoiseSpec")
        if self.kind in ("sampled", "noisy") and self.shots is not None and self.seed is None:
            raise ValueError(f"{self.kind} backend with shots requires a seed")


@dataclass(frozen=True)
class OptimizerSettings:
    name: str = "cobyla"
    tol_energy: float | None = None  # default depends on backend kind
    max_evaluations: int = DEFAULT_MAX_EVALUATIONS
    rhobeg: float = DEFAULT_RHOBEG

    def __post_init__(self):
        if self.name not in OPTIMIZER_NAMES:
            raise ValueError(f"unknown optimizer {self.name!r}; expected {OPTIMIZER_NAMES}")
        if self.max_evaluations < 1:
            raise ValueError("max_evaluations must be >= 1")


@dataclass(frozen=True)
class VqeProblem:
    hamiltonian: PauliSum
    ansatz: AnsatzCircuit
    backend: Backend
    optimizer: OptimizerSettings = field(default_factory=OptimizerSettings)

    def __post_init__(self):
        if self.hamiltonian.n_qubits != self.ansatz.n_qubits:
            raise ValueError("hamiltonian and ansatz qubit counts differ")

    @property
    def tol_energy(self) -> float:
        if self.optimizer.tol_energy is not None:
            return self.optimizer.tol_energy
        return EXACT_TOL_ENERGY if self.backend.kind == "exact" else SAMPLED_TOL_ENERGY

    def evaluate(self, params) -> tuple[float, float]:
        """(energy, std-error) at the given parameters."""
        program = bind_and_compile(self.ansatz, params)
        backend = self.backend
        if backend.kind == "exact":
            state = run_statevector(program, self.ansatz.n_qubits)
            return expectation_exact(state, self.hamiltonian), 0.0
        if backend.kind == "sampled":
            state = run_statevector(program, self.ansatz.n_qubits)
            return expectation_sampled(state, self.hamiltonian, backend.shots, backend.seed)
        rho = run_noisy(program, self.ansatz.n_qubits, backend.noise)
        if backend.shots is None:
            return expectation_exact(rho, self.hamiltonian), 0.0
        seed = backend.seed if backend.seed is not None else backend.noise.seed
        return expectation_sampled(rho, self.hamiltonian, backend.shots, seed)


@dataclass(frozen=True)
class TracePoint:
    eval_index: int
    params: tuple[float, ...]
    energy: float
    stderr: float


@dataclass(frozen=True)
class VqeResult:
    optimal_energy: float
    optimal_params: tuple[float, ...]
    trace: tuple[TracePoint, ...]
    n_evaluations: int
    converged: bool
    stop_reason: str
    seeds: dict


def _run_scipy_pass(problem, objective, x0, rhobeg, budget):
    sampled = problem.backend.kind != "exact"
    if problem.optimizer.name == "cobyla":
        scipy_optimize.minimize(
            objective,
            x0,
            method="COBYLA",
            tol=COBYLA_RHOEND_SAMPLED if sampled else COBYLA_RHOEND_EXACT,
            options={"rhobeg": rhobeg, "maxiter": budget},
        )
    else:
        n_params = x0.size
        simplex = np.vstack([x0] + [x0 + rhobeg * e for e in np.eye(n_params)])
        scipy_optimize.minimize(
            objective,
            x0,
            method="Nelder-Mead",
            options={
                "initial_simplex": simplex,
                "xatol": 1e-4 if sampled else 1e-8,
                "fatol": problem.tol_energy,
                "maxfev": budget,
            },
        )


def minimize(problem: VqeProblem, initial_params=None) -> VqeResult:
    """Run one derivative-free minimization; deterministic given seeds.

    Stopping: the evaluation budget is enforced natively by the
    optimizer (COBYLA maxiter / Nelder-Mead maxfev both count function
    evaluations); the energy-change criterion is Nelder-Mead's native
    ``fatol`` and, for COBYLA, a final trust-region radius small enough
    to imply it.  The ``converged`` flag reports whether the best energy
    actually stopped improving by more than ``tol_energy`` over the
    trailing window of the trace.

    Shot-sampled objectives reuse one sampling seed per optimizer pass
    (common random numbers, which derivative-free model-based methods
    tolerate far better than per-call noise) and run a second, tighter
    pass under a re-drawn seed so a stall on one noise realization's dip
    does not stick.  The reported optimal energy is then a fresh
    unbiased estimate at the best parameters under a third derived seed;
    every derived seed is logged in the result.
    """
    n_params = problem.ansatz.n_parameters
    if initial_params is None:
        initial_params = np.zeros(n_params)
    x0 = np.asarray(initial_params, dtype=float)
    if x0.shape != (n_params,):
        raise ValueError(f"expected {n_params} initial parameters, got shape {x0.shape}")

    trace: list[TracePoint] = []
    tol_energy = problem.tol_energy
    max_evals = problem.optimizer.max_evaluations
    window = max(2 * n_params + 3, 6)
    seeds: dict = {"backend_seed": problem.backend.seed}

    def make_objective(pass_problem):
        def objective(x: np.ndarray) -> float:
            energy, stderr = pass_problem.evaluate(x)
            if not np.isfinite(energy):
                raise NumericalError(f"non-finite energy {energy} at parameters {x.tolist()}")
            trace.append(TracePoint(len(trace), tuple(float(v) for v in x), energy, stderr))
            return energy

        return objective

    stochastic = problem.backend.kind != "exact" and problem.backend.shots is not None

    if n_params == 0:
        energy, stderr = problem.evaluate(x0)
        trace.append(TracePoint(0, (), energy, stderr))
        stop_reason = "no_parameters"
        converged = True
        best = trace[0]
        optimal_energy = best.energy
    else:
        if stochastic:
            pass_plan = []
            for index, rhobeg_scale in enumerate((1.0, 1.0 / 3.0)):
                pass_seed = int(
                    np.random.SeedSequence([problem.backend.seed or 0, 2, index]).generate_state(1)[0]
                )
                pass_plan.append((rhobeg_scale, pass_seed))
            seeds["pass_seeds"] = tuple(seed for _, seed in pass_plan)
        else:
            pass_plan = [(1.0, problem.backend.seed)]

        start = x0
        for rhobeg_scale, pass_seed in pass_plan:
            if len(trace) >= max_evals:
                break
            pass_problem = dataclasses.replace(
                problem, backend=dataclasses.replace(problem.backend, seed=pass_seed)
            )
            _run_scipy_pass(
                pass_problem,
                make_objective(pass_problem),
                start,
                problem.optimizer.rhobeg * rhobeg_scale,
                max_evals - len(trace),
            )
            start = np.asarray(min(trace, key=lambda point: point.energy).params)

        best_history = np.minimum.accumulate([point.energy for point in trace])
        tail = min(window, len(best_history) - 1)
        improvement = best_history[-1 - tail] - best_history[-1] if tail > 0 else 0.0
        converged = bool(improvement < tol_energy)
        if len(trace) >= max_evals and not converged:
            stop_reason = "max_evaluations"
        else:
            stop_reason = "energy_converged" if converged else "optimizer_stopped"

        best = min(trace, key=lambda point: point.energy)
        optimal_energy = best.energy
        if stochastic:
            # the trace minimum is selection-biased under a shared seed;
            # report a fresh estimate at the best parameters instead
            final_seed = int(
                np.random.SeedSequence([problem.backend.seed or 0, 1]).generate_state(1)[0]
            )
            final_problem = dataclasses.replace(
                problem, backend=dataclasses.replace(problem.backend, seed=final_seed)
            )
            optimal_energy, _ = final_problem.evaluate(np.asarray(best.params))
            seeds["final_eval_seed"] = final_seed

    return VqeResult(
        optimal_energy=optimal_energy,
        optimal_params=best.params,
        trace=tuple(trace),
        n_evaluations=len(trace),
        converged=converged,
        stop_reason=stop_reason,
        seeds=seeds,
    )


@dataclass(frozen=True)
class VqeAggregate:
    mean_energy: float
    std_energy: float
    results: tuple[VqeResult, ...]
    run_seeds: tuple[int, ...]


def derive_run_seeds(base_seed: int | None, n_repeats: int) -> tuple[int, ...]:
    state = np.random.SeedSequence(base_seed).generate_state(n_repeats, dtype=np.uint64)
    return tuple(int(s) for s in state)


def repeat_and_average(
    problem: VqeProblem, n_repeats: int, initial_params=None
) -> VqeAggregate:
    """n_repeats independent minimizations with seeds derived from the
    backend seed; returns mean, sample std, and every run."""
    if n_repeats < 1:
        raise ValueError("n_repeats must be >= 1")
    if problem.backend.kind == "exact":
        raise ValueError("repeat_and_average requires a sampled or noisy backend")
    run_seeds = derive_run_seeds(problem.backend.seed, n_repeats)
    results = []
    for seed in run_seeds:
        run_problem = dataclasses.replace(
            problem, backend=dataclasses.replace(problem.backend, seed=seed)
        )
        results.append(minimize(run_problem, initial_params))
    energies = np.array([r.optimal_energy for r in results])
    std = float(np.std(energies, ddof=1)) if n_repeats > 1 else 0.0
    return VqeAggregate(
        mean_energy=float(np.mean(energies)),
        std_energy=std,
        results=tuple(results),
        run_seeds=run_seeds,
    )


def write_trace_csv(result: VqeResult, path) -> None:
    """CSV: eval_index,energy_hartree,stderr_hartree,param_0..param_{m-1}."""
    path = Path(path)
    n_params = len(result.trace[0].params) if result.trace else 0
    header = ["eval_index", "energy_hartree", "stderr_hartree"]
    header += [f"param_{i}" for i in range(n_params)]
    lines = [",".join(header)]
    for point in result.trace:
        row = [str(point.eval_index), repr(point.energy), repr(point.stderr)]
        row += [repr(p) for p in point.params]
        lines.append(",".join(row))
    path.write_text("\n".join(lines) + "\n")
