"""Information geometry on state spaces of finite-dimensional C*-algebras.

Relative entropy and divergence topologies, exponential families with the
BKM metric and mean value chart, projection lattices of constraint spaces,
divergence projections, and maximum-entropy inference under linear
constraints including rank-deficient boundary solutions.
"""

from .algebra import (
    AlgebraMismatchError,
    AlgebraSpec,
    EmbeddingSpec,
    HermElem,
    State,
    embed,
    embed_adjoint,
    hs_inner,
    norm,
    random_herm,
    random_state,
    shift_family,
)
from .entropy import (
    ExtReal,
    divergence_to_set,
    omega_divergence,
    pinsker_slack,
    relative_entropy,
    von_neumann_entropy,
)
from .expfam import (
    BudgetExhaustedError,
    ExpFamilySpec,
    MeanValue,
    NewtonReport,
    OutsideConvexSupportError,
    bkm,
    dF,
    e_geodesic_limit,
    exp_limit_nonpositive,
    free_energy,
    free_energy_asymptote,
    gibbs_state,
    invert_mean_chart,
    mean_value,
    monotone_geodesic_divergence,
)
from .lattice import (
    AccessStep,
    FaceLocation,
    LatticeBudget,
    LatticeNode,
    access_step,
    enumerate_lattice,
    exposed_projection,
    face_of_mean_value,
    locate_face,
)
from .maxent import (
    AscentResult,
    ClosureMembershipError,
    MaxEntResult,
    MaximizerCertificate,
    OrthogonalityError,
    ProjectionResult,
    PythagorasReport,
    ascend_entropy_distance,
    classic_pythagoras_check,
    entropy_distance,
    max_entropy,
    maximizer_certificate,
    pythagoras_check,
    rI_projection,
)
from .spectral import (
    Compression,
    FunctionDomainError,
    Projection,
    SpectralForm,
    compress,
    eig,
    func_calc,
    kernel_projection,
    max_projection,
    ordered_leq,
    support_projection,
    weyl_gap,
)
from .topology import (
    ConvergenceReport,
    ImplicationReport,
    StateSequence,
    closure_infimum_experiment,
    disk_membership,
    implication_suite,
    omega_converges,
)

__version__ = "0.1.0"
