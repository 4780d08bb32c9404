"""Locally Euclidean metrics d_t on S^2 and rho_t on R^3."""
from .chains import Chain, StepProfile, chain_cost, realizable, realize_chain
from .errors import (
    BudgetError,
    ChainStepError,
    DomainError,
    LocEuclidError,
    NoEmbeddingError,
    RangeError,
    RealizationError,
)
from .geometry import (
    Isometry,
    SphereEmbedding,
    angle_of_chord,
    antipode,
    apply,
    central_angle,
    chord_of_angle,
    d_E,
    point3,
    random_isometry,
    sphere_point,
    unit_sphere_through,
)
from .rho_metric import (
    IntervalEstimate,
    rho,
    rho_at,
    rho_profile_dp,
    shortcut_upper_bound,
    subdivision_upper_bound,
)
from .montecarlo import SearchResult, monte_carlo_chain_search
from .sphere_metric import Param, chord_cost, d_t_pair, d_t_sphere, make_param

from .verify import (
    AxiomReport,
    all_passed,
    format_reports,
    replay_space,
    replay_sphere,
    reports_to_jsonl,
    run_space_suite,
    run_sphere_suite,
)

__version__ = "0.1.0"
