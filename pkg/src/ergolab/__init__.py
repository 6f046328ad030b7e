"""Exact wandering-rate maps on measure algebras of simple dynamical systems."""

__version__ = "0.1.0"

from .errors import (  # noqa: E402
    BudgetError,
    CapabilityError,
    ErgolabError,
    ParseError,
    PreconditionError,
    SemanticError,
    SpaceMismatchError,
    StructuralError,
)
from .scalars import Quadratic, format_scalar, parse_scalar, quadratic  # noqa: E402
from .algebra import (  # noqa: E402
    AtomSet,
    AtomSpace,
    Circle,
    CylinderSet,
    CylinderSpace,
    IntervalSet,
    ProductSet,
    ProductSpace,
    atoms,
    complement,
    cylinder,
    difference,
    distance,
    empty,
    fiber_set,
    format_set,
    full,
    interval,
    intersect,
    is_null,
    is_subset,
    measure,
    normalize,
    symdiff,
    union,
)
from .systems import (  # noqa: E402
    FinitePermutation,
    Odometer,
    Power,
    Product,
    Rotation,
    apply,
    apply_inverse,
    forward_saturation,
    full_saturation,
    identity,
    invariant_set,
    is_ergodic,
    is_totally_ergodic,
    iterate,
    periodic_profile,
    power,
)
from .phi import (  # noqa: E402
    PhiResult,
    ergodic_decomposition,
    ergodic_power_profile,
    phi,
    phi_m,
    phi_star,
    wandering_rate,
)
from .probes import (  # noqa: E402
    ProbeReport,
    RokhlinTower,
    Witness,
    continuity_probe,
    discontinuity_witness,
    phi_star_discontinuity_witness,
    rokhlin_tower,
    verify_tower,
)
from .parsing import format_system, parse_set_expr, parse_system_spec  # noqa: E402

__all__ = [
    "__version__",
    "BudgetError",
    "CapabilityError",
    "ErgolabError",
    "ParseError",
    "PreconditionError",
    "SemanticError",
    "SpaceMismatchError",
    "StructuralError",
    "Quadratic",
    "format_scalar",
    "parse_scalar",
    "quadratic",
    "AtomSet",
    "AtomSpace",
    "Circle",
    "CylinderSet",
    "CylinderSpace",
    "IntervalSet",
    "ProductSet",
    "ProductSpace",
    "atoms",
    "complement",
    "cylinder",
    "difference",
    "distance",
    "empty",
    "fiber_set",
    "format_set",
    "full",
    "interval",
    "intersect",
    "is_null",
    "is_subset",
    "measure",
    "normalize",
    "symdiff",
    "union",
    "FinitePermutation",
    "Odometer",
    "Power",
    "Product",
    "Rotation",
    "apply",
    "apply_inverse",
    "forward_saturation",
    "full_saturation",
    "identity",
    "invariant_set",
    "is_ergodic",
    "is_totally_ergodic",
    "iterate",
    "periodic_profile",
    "power",
    "PhiResult",
    "ergodic_decomposition",
    "ergodic_power_profile",
    "phi",
    "phi_m",
    "phi_star",
    "wandering_rate",
    "ProbeReport",
    "RokhlinTower",
    "Witness",
    "continuity_probe",
    "discontinuity_witness",
    "phi_star_discontinuity_witness",
    "rokhlin_tower",
    "verify_tower",
    "format_system",
    "parse_set_expr",
    "parse_system_spec",
]
