"""folcone: exact invariants of polynomial singular foliations.

Parse polynomial generator fields, compute pointwise kernels, strong kernels
and isotropy Lie algebras, sample Nash-blow-up and cone fibers as exact
Grassmannian limits along arcs, realize operator words as differential
operators with symbols and ellipticity verdicts, and verify cone invariance
under fiberwise-linear Hamiltonian flows.
"""

__version__ = "0.1.0"

from .algebra import (
    generic_rank,
    kernel_basis,
    kernel_basis_over_curve,
    lie_bracket,
    rank,
    solve_linear,
)
from .expr import (
    OperatorWord,
    ParseError,
    Polynomial,
    PolyVectorField,
    parse_operator,
    parse_polynomial,
    parse_vector_field,
)
from .foliation import (
    FoliationPresentation,
    IsotropyAlgebra,
    MissingStructureFunctions,
    anchor_matrix,
    isotropy_algebra,
    jacobi_flag,
    leaf_dimension_at,
    regular_data,
    solve_structure_functions,
    strong_kernel_at,
)
from .grassmann import (
    Curve,
    CurveNotGeneric,
    Subspace,
    ZeroPluckerLimit,
    annihilator,
    limit_along_curve,
    make_subspace,
    subspace_distance,
)
from .hncone import (
    HNFiberSample,
    NashFiberSample,
    curve_family,
    hn_fiber,
    hn_membership_distance,
    limit_subalgebra_check,
    nash_fiber,
    sandwich_check,
)
from .poisson import (
    DualPoint,
    HamiltonianField,
    NonFiniteState,
    cotangent_lift_check,
    flow_rk4,
    hamiltonian_field,
    hn_invariance_test,
    poisson_bracket,
)
from .presets import Preset, PresetError, load_preset
from .symbols import (
    DiffOperator,
    OddDegreeWarning,
    SymbolPolynomial,
    UEAElement,
    apply_operator,
    classical_principal_symbol,
    ellipticity_check,
    pullback_consistency,
    realize,
    symbol_on_fiber,
    symbol_top,
    uea_product,
)
