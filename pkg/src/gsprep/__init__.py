"""gsprep: ground-state preparation by quantum phase search with shallow
variational warm-starts."""

from .ansatz import AnsatzSpec, apply_ansatz
from .fermions import FermionOperator, jordan_wigner
from .hamiltonians import (
    HeisenbergSpec,
    HubbardSpec,
    QuboSpec,
    basis_occupation_state,
    charge_spin_density,
    chemical_potentials,
    heisenberg_hamiltonian,
    heisenberg_random,
    hubbard_1d,
    occupation_project,
    paper_hubbard_instance,
    qubo_complete,
    qubo_hamiltonian,
    qubo_random_maxcut,
    spectrum_guard,
)
from .operator_io import load_operator_file, save_operator_file
from .paulis import PauliString, PauliSum, expectation
from .rounds import (
    BlockEncoding,
    RoundSpec,
    build_block_encoding,
    measurement_maps,
    postselect_ancilla,
    round_branches,
    run_round,
    run_round_be,
    run_round_he,
)
from .search import (
    PrepareResult,
    Region,
    SearchConfig,
    SearchTrace,
    prepare_from_decomposition,
    prepare_ground_state,
    refine,
    rough_search,
    trajectory_tree,
    update_region,
)
from .signpoly import (
    PhaseFactorSet,
    SignApproxParams,
    TrigPolynomial,
    approx_sign,
    find_phase_factors,
    reconstruct,
    sign_factors,
)
from .spectral import (
    EvolutionHandle,
    SpectralDecomposition,
    diagonalize,
    evolution_unitary,
    unitary_eigensystem,
)
from .states import QuantumState, measure_qubit, partial_trace, trace_distance
from .vqe import (
    GibbsConfig,
    OptimizerConfig,
    VqeResult,
    gibbs_vqe,
    gradient_variance_experiment,
    qubo_cost_and_gradient,
    qubo_warmstart,
    vqe_minimize,
)

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
