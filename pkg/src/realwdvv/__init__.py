"""Exact real and complex genus-zero curve counts on the plane and its blowups.

The package instantiates three WDVV-type recursions for real invariants,
assembles them into an overdetermined linear system per degree, and solves
it in exact rational arithmetic."""

from .complex_gw import (
    ComplexProvider,
    complex_invariant,
    default_provider,
    kontsevich_p2,
    load_complex_table,
)
from .errors import (
    ConflictingEntry,
    EngineError,
    GateViolation,
    InconsistentSystem,
    InvalidClass,
    InvalidDegree,
    InvalidDivisorTriple,
    Mismatch,
    MissingComplexValue,
    NonInjectiveConjugation,
    NonlinearFrontier,
    ParseError,
    UnknownKey,
)
from .lattice import (
    CurveClass,
    DivisorClass,
    SurfaceModel,
    admissible_classes,
    bracket_indicator,
    c1_degree,
    decompositions,
    default_triples,
    doubling,
    ell_omega,
    halve,
    intersect,
    is_admissible,
    pair,
    real_dim_k,
    validate_triple,
)
from .relations import (
    Monomial,
    RealKey,
    RelationInstance,
    applicable_l_range,
    binom,
    enumerate_instances,
    instantiate,
    is_live,
)
from .solver import (
    InvariantTable,
    SolveReport,
    check_integrality,
    default_seeds,
    residual,
    solve,
    table_to_csv,
    table_to_jsonable,
)
from .verify import (
    cross_subset_check,
    expected_values_check,
    load_expected_table,
    residual_sweep,
)

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "1.0.0"
