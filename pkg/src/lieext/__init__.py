"""Lie algebra/group cohomology, abelian extensions, and period-lattice
integrability tests for finite-dimensional matrix groups."""

from .algebra import (
    Lattice,
    LatticeMembership,
    LieAlgebra,
    ModuleAction,
    ValidationIssue,
    abelian_algebra,
    adjoint_module,
    bracket,
    change_of_basis,
    direct_sum,
    heisenberg3_algebra,
    lattice_member,
    reduce_mod_lattice,
    sl2_algebra,
    trivial_module,
    validate_algebra,
    validate_module,
)
from .cohomology import (
    Cochain,
    ComplexSlice,
    GroupCochain,
    apply_d,
    apply_delta,
    betti,
    build_complex_slice,
    coboundary_matrix,
    cochain_from_pairs,
    cohomology_representatives,
    delta_cochain,
    increasing_tuples,
    is_cocycle,
    normalization_residual,
    random_cochain,
    zero_cochain,
)
from .errors import (
    BoundaryMismatchError,
    DocumentError,
    ExpressionError,
    InvalidLatticeError,
    LieExtError,
    MalformedInputError,
    MembershipError,
    NotACocycleError,
    NotALoopError,
    OpenChainError,
    TangentDecompositionError,
    UnresolvedReferenceError,
    UserFunctionError,
)
from .extensions import (
    AlgebraExtension,
    GroupLaw,
    are_equivalent,
    build_algebra_extension,
    conjugate_coeff,
    group_inverse,
    group_multiply,
    group_unit,
)
from .geometry import (
    EquivariantForm,
    Surface2Chain,
    SurfacePatch,
    cocycle_recovery_residual,
    cube_boundary_chain,
    curvature_defect,
    derived_cochain,
    differentiate_group_cocycle,
    empty_chain,
    eval_equivariant,
    holonomy,
    left_translate_chain,
    path_cocycle,
    path_cocycle_coboundary,
    product_triangle_chain,
    representative_independence_residuals,
    smooth_step,
    spanning_chain,
    surface_integral,
)
from .groups import (
    CoordinateChart,
    GroupPath,
    MatrixGroup,
    coordinate_path,
    exp_path,
    heisenberg_group,
    identity_path,
    log_derivative,
    pointwise_product,
    quaternion_element,
    sl2_group,
    su2_group,
    torus_group,
    translation_group,
    validate_action_compatibility,
    validate_group,
    validate_path,
)
from .integrability import (
    CycleSet,
    IntegrabilityReport,
    Pi1CocycleTable,
    assert_cycle_closed,
    check_integrability,
    period,
    pi1_cocycle_table,
    torus_winding_loop,
)

__version__ = "0.1.0"
