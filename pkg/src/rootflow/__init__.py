"""rootflow: algebraically solvable planar polynomial ODE systems.

The package synthesizes two-variable polynomial dynamical systems whose
trajectories are the tracked roots of low-degree monic polynomials with
solvable coefficient dynamics, solves them in closed form (elliptic and
logistic branches), and cross-checks everything against an independent
adaptive integrator.
"""

from ._backend import BACKEND, HAVE_COMPILED
from .correspondence import (
    AmbiguousLabelingError,
    CoeffState,
    CollisionError,
    Config,
    InconsistentCoeffsError,
    Pair,
    RootState,
    coeffs_to_roots,
    roots_from_pair,
    roots_to_coeffs,
    xdot_from_ydot,
)
from .elliptic import EllipticError, EllipticPoleError, sn, sn_with_prime
from .generator import (
    ConditionReport,
    SynthesisError,
    XSystem,
    YSystemSpec,
    builtin_example,
    check_condition,
    example_params,
    example_xsystem_reference,
    synthesize_xsystem,
)
from .oracle import (
    FiniteDifferenceReport,
    IntegrationResult,
    OdeProblem,
    PolyVectorField,
    finite_difference_check,
    integrate,
)
from .parsing import PolyParseError, UndeclaredSymbolError, parse_poly
from .pipeline import (
    DegenerateInitialStateError,
    SolveRequest,
    Trajectory,
    TrajectoryEvent,
    UnsupportedSpecError,
    VerifyReport,
    classify_yspec,
    resolve_system,
    solve,
    solve_algebraic,
    verify_against_oracle,
)
from .poly import MultiPoly, exact_div
from .variants import (
    AffineMap,
    IsochronyReport,
    IsochronySetup,
    VectorState,
    affine_transform_system,
    complex_rhs_as_vectors,
    coupling_vectors,
    example1_affine_coeffs,
    example1_vector_rhs,
    from_vector_form,
    homogeneity_check,
    isochronize,
    isochrony_report,
    to_vector_form,
)
from .ysolve import (
    AnharmonicSpec,
    ClosedFormSingularityError,
    DegenerateQuadraticError,
    EllipticParams,
    LogisticSpec,
    SelectionError,
    anharmonic_y,
    fit_elliptic_params,
    logistic_y,
)

__version__ = "0.1.0"
