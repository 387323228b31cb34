"""Local charges of rank-2 holomorphic bundles on the surfaces Z_k."""

from .bundle import (
    BundleSpec,
    ExtensionClass,
    SpecError,
    Term,
    canonical_window,
    canonicalize,
    parse_class,
    restrict_to_neighborhood,
    transition_matrix,
)
from .grafting import GlobalLedger, GraftResult, ParityViolation, closed_graft, decay_search, open_graft
from .invariants import (
    ChargeBounds,
    DomainError,
    LocalInvariants,
    NonStabilized,
    TruncationPolicy,
    charge_bounds,
    compute_charge,
    compute_height,
    compute_width,
    enumerate_invariants,
    extremal_search,
    instanton_moduli_dimension,
    is_generic_stable,
    is_instanton_type,
    moduli_dimension,
)

__version__ = "0.1.0"
