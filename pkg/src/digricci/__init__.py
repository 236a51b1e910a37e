"""Coarse Ricci curvature and heat-flow certificates for directed graphs.

The pipeline: build a strongly connected weighted digraph, take the
random walk and its stationary measure, symmetrize into a reversible
kernel, and study the induced Laplacian. Curvature between two
vertices is computed exactly by linear programming; positive curvature
is then certified to propagate into Lipschitz contraction of the heat
flow, Gaussian-type concentration of the stationary measure, and
transport inequalities against entropy and Fisher information.
"""

from __future__ import annotations

__version__ = "0.1.0"

from .certificates import InequalityCertificate, certificate_from_samples
from .chain import (
    ByPartsReport,
    LaplacianOperator,
    MarkovData,
    check_integration_by_parts,
    gamma,
    gamma_via_delta,
    inner,
    laplacian_apply,
    markov_data,
    mean,
    mean_kernel,
    perron_measure,
    transition_kernel,
)
from .concentration import (
    DensityFixture,
    centered_lipschitz_samples,
    check_bobkov_goetze,
    check_exp_chain_rule_bound,
    check_exp_square_chain_rule_bound,
    check_info_to_entropy,
    check_laplace_bound,
    check_transport_entropy,
    check_transport_information,
    check_transport_l1_bound,
    concentration_tail,
    entropy_dual_pairing,
    fisher_information,
    random_densities,
    relative_entropy,
)
from .curvature import (
    CurvatureReport,
    curvature_matrix,
    kappa_eps,
    kappa_limit,
    kappa_lp,
    smoothed_measure,
)
from .digraph import (
    DirectedGraph,
    DistanceMatrix,
    build_graph,
    distances,
    gradient,
    gradient_matrix,
    is_strongly_connected,
    lipschitz_constant,
    load_graph,
    reversed_graph,
    sample_lipschitz_functions,
    strongly_connected_components,
)
from .errors import (
    EmptySubsetError,
    EpsOutOfRangeError,
    GraphCurvatureError,
    HypothesisUnmetError,
    LpFailureError,
    MarginalMismatchError,
    NegativeTimeError,
    NegativeWeightError,
    NotLipschitzError,
    NotStronglyConnectedError,
    NumericsError,
    ParseError,
    SameVertexError,
    SelfLoopError,
    SingularSystemError,
    ZeroOutDegreeError,
)
from .heat import (
    HeatOperator,
    curvature_time_limit,
    heat_kernel,
    heat_kernel_matrix,
    heat_operator,
    uniformization_matrix,
    verify_gradient_estimate,
    verify_transport_contraction,
)
from .lp import LinearProgram, LpSolution, TransportSolution, solve_lp, solve_transport
from .report import RunConfig, VerificationReport, render_json
from .transport import TransportPlan, kantorovich_dual, wasserstein

__all__ = [
    "ByPartsReport",
    "CurvatureReport",
    "DensityFixture",
    "DirectedGraph",
    "DistanceMatrix",
    "EmptySubsetError",
    "EpsOutOfRangeError",
    "GraphCurvatureError",
    "HeatOperator",
    "HypothesisUnmetError",
    "InequalityCertificate",
    "LaplacianOperator",
    "LinearProgram",
    "LpFailureError",
    "LpSolution",
    "MarginalMismatchError",
    "MarkovData",
    "NegativeTimeError",
    "NegativeWeightError",
    "NotLipschitzError",
    "NotStronglyConnectedError",
    "NumericsError",
    "ParseError",
    "RunConfig",
    "SameVertexError",
    "SelfLoopError",
    "SingularSystemError",
    "TransportPlan",
    "TransportSolution",
    "VerificationReport",
    "ZeroOutDegreeError",
    "build_graph",
    "centered_lipschitz_samples",
    "certificate_from_samples",
    "check_bobkov_goetze",
    "check_exp_chain_rule_bound",
    "check_exp_square_chain_rule_bound",
    "check_info_to_entropy",
    "check_integration_by_parts",
    "check_laplace_bound",
    "check_transport_entropy",
    "check_transport_information",
    "check_transport_l1_bound",
    "concentration_tail",
    "curvature_matrix",
    "curvature_time_limit",
    "distances",
    "entropy_dual_pairing",
    "fisher_information",
    "gamma",
    "gamma_via_delta",
    "gradient",
    "gradient_matrix",
    "heat_kernel",
    "heat_kernel_matrix",
    "heat_operator",
    "inner",
    "is_strongly_connected",
    "kantorovich_dual",
    "kappa_eps",
    "kappa_limit",
    "kappa_lp",
    "laplacian_apply",
    "lipschitz_constant",
    "load_graph",
    "markov_data",
    "mean",
    "mean_kernel",
    "perron_measure",
    "random_densities",
    "relative_entropy",
    "render_json",
    "reversed_graph",
    "sample_lipschitz_functions",
    "smoothed_measure",
    "solve_lp",
    "solve_transport",
    "strongly_connected_components",
    "uniformization_matrix",
    "verify_gradient_estimate",
    "verify_transport_contraction",
    "wasserstein",
]
