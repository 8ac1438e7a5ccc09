"""VQE potential-energy-surface toolkit."""

__version__ = "0.1.0"

from .pauli import PauliSum, PauliTerm
from .fermion import FermionOperator, LadderOp
from .encodings import EncodingScheme, map_operator
from .hamiltonian import ActiveSpaceSpec, MolecularIntegrals, load_integrals
from .ansatz import AnsatzCircuit, build_kupccgsd, build_uccsd, bind_and_compile
from .simulator import DensityMatrix, NoiseSpec, StateVector
from .vqe import Backend, VqeProblem, VqeResult, minimize, repeat_and_average
from .fci import SpectrumResult, fci_ground_energy
from .pes import PesTable, SweepConfig, load_sweep_config, rmse, run_sweep

__all__ = [
    "PauliSum",
    "PauliTerm",
    "FermionOperator",
    "LadderOp",
    "EncodingScheme",
    "map_operator",
    "ActiveSpaceSpec",
    "MolecularIntegrals",
    "load_integrals",
    "AnsatzCircuit",
    "build_uccsd",
    "build_kupccgsd",
    "bind_and_compile",
    "StateVector",
    "DensityMatrix",
    "NoiseSpec",
    "Backend",
    "VqeProblem",
    "VqeResult",
    "minimize",
    "repeat_and_average",
    "SpectrumResult",
    "fci_ground_energy",
    "PesTable",
    "SweepConfig",
    "load_sweep_config",
    "rmse",
    "run_sweep",
    "__version__",
]
