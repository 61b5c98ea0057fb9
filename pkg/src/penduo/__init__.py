"""Fictitious-domain penalty and penalty-duality solvers in 1D.

Compares interface, stiffness and L2 volume penalties for prescribing a
rigid value on an immersed structure, and the Bertsekas penalty-duality
(Uzawa) alternative that enforces the interface constraint exactly with a
moderate penalty weight.
"""

from .core import Mesh1D, MeshMismatch, PenaltyConfig
from .diagnostics import (
    DEFAULT_EPS_SWEEP,
    NonPositiveData,
    RateFit,
    error_norms,
    fit_rate,
    interface_flux,
)
from .elliptic1d import (
    EllipticProblem,
    MisalignedStructure,
    alpha_only_interface_value,
    assemble_elliptic,
    exact_limit_flux,
    exact_limit_solution,
    limit_point_multiplier,
    solve_penalized_elliptic,
)
from .linalg import (
    IndexOutOfRange,
    TridiagonalSystem,
    ZeroPivot,
    add_point_penalty,
    solve_cyclic_tridiagonal,
    solve_tridiagonal,
)
from .saddle import (
    EllipticInterfaceProblem,
    LengthMismatch,
    UzawaResult,
    multiplier_update,
    uzawa_iterate,
)
from .transport1d import (
    CflViolation,
    RigidMotion,
    StructureRegion,
    Trajectory,
    TransportParams,
    godunov_flux,
    initial_condition,
    run_transient,
    step_burgers,
    step_linear,
)

__version__ = "0.1.0"

__all__ = [
    "Mesh1D", "PenaltyConfig", "MeshMismatch",
    "TridiagonalSystem", "ZeroPivot", "IndexOutOfRange",
    "solve_tridiagonal", "add_point_penalty", "solve_cyclic_tridiagonal",
    "EllipticProblem", "MisalignedStructure", "assemble_elliptic",
    "solve_penalized_elliptic", "exact_limit_solution", "exact_limit_flux",
    "limit_point_multiplier", "alpha_only_interface_value",
    "UzawaResult", "LengthMismatch", "multiplier_update", "uzawa_iterate",
    "EllipticInterfaceProblem",
    "StructureRegion", "RigidMotion", "TransportParams", "Trajectory",
    "CflViolation", "godunov_flux", "initial_condition", "run_transient",
    "step_linear", "step_burgers",
    "RateFit", "NonPositiveData", "interface_flux", "error_norms",
    "fit_rate", "DEFAULT_EPS_SWEEP",
]
