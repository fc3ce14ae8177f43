"""tightbell: exact and certified analysis of two-player XOR games.

Classical biases, optimal-vertex enumeration and polytope face dimensions are
exact (rational/integer arithmetic); the quantum bias is solved as a
unit-diagonal semidefinite program and reported only together with its dual
certificate.
"""

from .classical import (
    ClassicalBiasResult,
    FRelationReport,
    OptimalVertexSet,
    classical_bias,
    optimal_vertices,
    verify_F_relation,
)
from .errors import TightBellError
from .facegeom import (
    EmbeddedVertex,
    FaceReport,
    ProbeReport,
    TrivialFacetReport,
    affine_dimension_exact,
    embed_vertex,
    face_report,
    face_report_to_dict,
    quantum_face_probe,
    theorem1_dim_bound,
    theorem2_codim_bound,
    trivial_facet_check,
)
from .game import (
    Behaviour,
    DeterministicStrategy,
    GameMatrix,
    ReductionMap,
    XorGame,
    behaviour_of_strategy,
    bias_of_behaviour,
    bias_of_strategy,
    build_game,
    game_matrix,
    load_game,
    make_named,
    ns_perfect_behaviour,
    probability_table,
    reduce_exhaustive,
    save_game,
    transpose_game,
)
from .nlc import (
    CorollaryBound,
    G0Dimension,
    NlcAnalysis,
    NlcBiasBound,
    NlcSpec,
    build_nlc,
    corollary_bound,
    g0_dimension,
    hadamard_spectrum,
    kl_dimension_bound,
    nlc_bias_bound,
    spec_from_game,
)
from .qsdp import (
    DualCertificate,
    GramSolution,
    PhiTilde,
    QuantumBiasResult,
    SlacknessReport,
    SolveConfig,
    build_phi_tilde,
    certificate_to_dict,
    extract_F,
    quantum_slackness_check,
    slackness_residual_classical,
    solve_quantum_bias,
)

__version__ = "0.1.0"
