"""Subrank, symmetric subrank and quantum functionals for small tensors.

Scalar domains are prime fields F_p and the complex numbers.  The package
computes restriction-based rank parameters with verifiable certificates
(subrank, symmetric subrank, symmetric rank, congruence normal forms),
constructs symmetric restrictions out of plain ones, evaluates hypergraph
independence bounds through adjacency tensors, and estimates the symmetric
and uniform quantum functionals numerically.

Submodules: domains, tensors, linalg, restrict, congruence, symmetrize,
hypergraphs, quantum, cli.
"""

from .congruence import (
    CongruenceError,
    CongruenceResult,
    DomainTooSmallError,
    MatrixSymsubrankResult,
    MissingSquareRootError,
    PivotSearchExhaustedError,
    PowerDiagResult,
    SkewInputError,
    SymDiagResult,
    ballantine_reduce,
    congruence_result_to_json,
    is_skew_zero_diag,
    matrix_symsubrank,
    power_diag_certificate,
    sym_diagonalize,
)
from .domains import (
    ComplexNumbers,
    Domain,
    DomainError,
    PrimeField,
    characteristic,
    domain_from_name,
    field_inverse,
    square_root_in_field,
)
from .hypergraphs import (
    CapacityLowerResult,
    ChainReport,
    Hypergraph,
    HypergraphError,
    adjacency_tensor,
    alpha_chain_check,
    capacity_lower,
    capacity_upper_quantum,
    hypergraph_from_json,
    hypergraph_to_json,
    independence_number,
    induced_matching_number,
    strong_power,
)
from .quantum import (
    DensityMatrix,
    OptimizerOptions,
    OrbitPoint,
    QuantumError,
    QuantumFunctionalResult,
    SandwichReport,
    density,
    directional_derivative_check,
    jacobi_eigh,
    marginal,
    marginal_equality_check,
    moment_map,
    sandwich_check,
    sym_quantum_functional,
    uniform_quantum_functional,
    vn_entropy,
)
from .restrict import (
    DEFAULT_BUDGET,
    Certificate,
    SearchInfeasibleError,
    SymrankResult,
    certificate_from_json,
    certificate_to_json,
    reconstruct_waring,
    restriction_exists,
    subrank_exact,
    symrank_small,
    symrestriction_exists,
    symsubrank_exact,
    verify_certificate,
)
from .symmetrize import (
    CreateTCertificate,
    MissingKthRootError,
    SymmetrizeResult,
    SymrankUpperResult,
    WaringDecomposition,
    create_t,
    fully_symmetric,
    make_sym,
    remove_powers,
    selection_map,
    symmetrize_certificate,
    symrank_upper,
    waring_h,
    waring_reconstruct,
)
from .tensors import (
    ENTRY_CAP,
    LinearMap,
    Tensor,
    TensorSizeError,
    apply,
    apply_sym,
    apply_sym_power,
    direct_sum,
    flattening_rank,
    identity_map,
    is_symmetric,
    kron,
    map_from_json,
    map_to_json,
    matrix_rank,
    permute_legs,
    support,
    tensor_from_json,
    tensor_id,
    tensor_power,
    tensor_product,
    tensor_to_json,
    tensors_equal,
    unit_tensor,
)

__version__ = "0.1.0"
