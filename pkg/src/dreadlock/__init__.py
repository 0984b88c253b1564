"""Dynamic rays of exponential and cosine maps: pullbacks, landing and ray portraits."""

from ._geometry import Window
from .errors import (
    ArcLeavesW0,
    BranchAmbiguity,
    DerivativeBlowup,
    DreadlockError,
    EmptyLevel,
    NoConvergence,
    NormalizationError,
    NotComparable,
    NotExpanding,
    OrbitEntersDisc,
    PreconditionViolated,
    PullbackError,
    ResolutionCapExceeded,
)
from .function_model import (
    DomainLabel,
    EntireMap,
    Family,
    check_postsingular_bounded,
    choose_radius,
)
from .periodic_points import (
    Classification,
    HyperbolicSetApprox,
    PeriodicPoint,
    build_hyperbolic_set,
    classify,
    newton_periodic,
    scan_periodic,
)
from .portrait import (
    CandidateTree,
    PortraitReport,
    Tolerances,
    candidate_tree,
    compare_colanding,
    count_colanding,
    rays_to_point,
    uniform_landing_check,
    verify_landing_theorem,
)
from .pullback import (
    LandingReport,
    RayPolyline,
    Status,
    escape_address,
    gap_decay_check,
    land,
    pullback_point,
    trace_ray,
)
from .render import RenderSpec, render
from .symbolic import (
    ExternalAddress,
    FiniteAddress,
    alphabet,
    cyclic_between,
    is_exponentially_bounded,
    lex_compare,
    parse_address,
    periodic_addresses,
)

__version__ = "0.1.0"
