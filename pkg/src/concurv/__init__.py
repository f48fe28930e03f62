"""Bakry-Emery curvature of connection graphs.

Curvature values come from the smallest eigenvalue of small Hermitian
curvature matrices assembled from the incomplete 2-ball around a vertex; an
independent semidefinite-feasibility bisection cross-checks them.  See the
README for the graph JSON schema and the CLI.
"""

from .errors import CrossCheckError, ValidationError
from .graphs import (
    ConnectionGraph,
    LocalStructure,
    is_locally_balanced,
    load_graph,
    local_structure,
    signature_groups_commute,
    switch,
)
from .hermitian import (
    HermitianMatrix,
    albert_condition,
    min_eig_hermitian,
    pinv,
    schur_complement,
    simultaneous_diagonalize,
)
from .operators import (
    LocalOperators,
    delta_matrix,
    gamma2_matrix,
    gamma_forms,
    gamma_matrix,
    local_operators,
    q_matrix,
)
from .curvature import (
    INF,
    CurvatureBundle,
    CurvatureProfile,
    canonical_basis,
    curvature,
    curvature_bundle,
    curvature_function,
    curvature_matrix,
    curvature_oracle,
    curvature_profile,
    general_basis,
)
from .tensor import phi_map, psi_extend, ric_and_metric, tangent_from_function, tensor_matrix_check
from .product import ProductSpec, cartesian_product, product_decomposition, product_vertex, star_product
from .local_ops import EditReport, add_spherical_edge, merge_s2, s1_in_regular

__all__ = [
    "INF",
    "ConnectionGraph",
    "CrossCheckError",
    "CurvatureBundle",
    "CurvatureProfile",
    "EditReport",
    "HermitianMatrix",
    "LocalOperators",
    "LocalStructure",
    "ProductSpec",
    "ValidationError",
    "add_spherical_edge",
    "albert_condition",
    "canonical_basis",
    "cartesian_product",
    "curvature",
    "curvature_bundle",
    "curvature_function",
    "curvature_matrix",
    "curvature_oracle",
    "curvature_profile",
    "delta_matrix",
    "gamma2_matrix",
    "gamma_forms",
    "gamma_matrix",
    "general_basis",
    "is_locally_balanced",
    "load_graph",
    "local_operators",
    "local_structure",
    "merge_s2",
    "min_eig_hermitian",
    "phi_map",
    "pinv",
    "product_decomposition",
    "product_vertex",
    "psi_extend",
    "q_matrix",
    "ric_and_metric",
    "s1_in_regular",
    "schur_complement",
    "signature_groups_commute",
    "simultaneous_diagonalize",
    "star_product",
    "switch",
    "tangent_from_function",
    "tensor_matrix_check",
]

__version__ = "0.1.0"
