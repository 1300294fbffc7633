"""Inversive distance circle packings on closed triangulated surfaces.

Computes Euclidean and hyperbolic circle packings with prescribed
inversive distances by Newton descent on a concave energy, and ships an
executable certification suite for the variational structure behind it.
"""

from .errors import (
    BracketError,
    DomainError,
    FeasibilityError,
    FormatError,
    PackError,
    PathError,
    RangeError,
)
from .geometry import (
    Geometry,
    angle_jacobian,
    angles,
    edge_length,
    euclidean_admissibility_form,
    inversive_distance,
    is_admissible,
    lengths_of_triangle,
    lengths_realizable,
    matrix_M,
    matrix_M1,
    matrix_M_entry_12,
    matrix_M_product,
    matrix_N,
    r_from_u,
    radii_from_lengths,
    triangle_energy,
    u_from_r,
)
from .mesh import (
    Triangulation,
    ValidationReport,
    WeightedTriangulation,
    cone_angles,
    face_weights,
    global_hessian,
    total_energy,
    validate,
    weight_problems,
)
from .solver import SolveReport, SolverOptions, feasibility_check, solve
from .verify import (
    CertificateReport,
    SampleSpec,
    WitnessReport,
    certify_closedness,
    certify_inequality2_equivalence,
    certify_injectivity,
    certify_minor_inequalities,
    certify_spectrum,
    certify_symmetry,
    find_nonconvexity_witness,
    paper_matrix_regressions,
    run_suite,
)

__version__ = "0.1.0"
