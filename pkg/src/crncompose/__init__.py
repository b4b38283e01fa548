"""Structural composability analysis and numerical verification for
mass-action chemical reaction computers."""

from .composability import ComposabilityVerdict, certify_composable, check_assumptions
from .compose import CoupledSystem, WiringError, couple
from .core import (
    Complex,
    Constant,
    Crn,
    DomainError,
    MsCrc,
    Reaction,
    Species,
    TimeVarying,
    complexes,
    mass_action_rhs,
    stoichiometric_matrix,
)
from .corpus import load_builtin
from .dynamics import (
    IntegratorConfig,
    SimulationTrace,
    check_persistence,
    conservation_residual,
    detect_steady_state,
    pseudo_helmholtz,
    simulate,
)
from .linalg import exact_rank
from .parser import ParseError, format_network, parse_network
from .reduction import FrozenInput, ReducedSystem, TrajectoryInput, freeze_inputs, reduce_mscrc
from .structure import (
    StructuralReport,
    UndeterminedError,
    conservation_vector,
    deficiency,
    linkage_classes,
    reversibility_flags,
    structural_report,
)
from .verify import (
    VerificationReport,
    lyapunov_descent_probe,
    verify_composition_numeric,
    verify_dynamic_computation,
)

__version__ = "0.1.0"
