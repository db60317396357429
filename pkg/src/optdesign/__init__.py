"""Approximate D- and A-optimal designs on finite candidate sets."""
from .config import ConfigError, RunConfig, load_config
from .linalg import NotPositiveDefinite
from .optimality import (
    Certificate,
    CertificateFault,
    SingularInformation,
    a_certificate,
    a_efficiency,
    criterion_value,
    d_certificate,
    d_efficiency,
)
from .solver import (
    ConvergenceTrace,
    Design,
    IterationCapReached,
    SolverConfig,
    SupportCollapse,
    a_update,
    d_update,
    initial_weights,
    prune_support,
    run_phase,
    solve,
    solve_mul,
    solve_vdm,
)
from .spaces import (
    CandidateSet,
    FeatureMap,
    RejectionStall,
    SpaceSpec,
    build_candidates,
    cube_grid,
    disk_points,
    random_candidates,
    sphere_fibonacci,
    square_grid,
    wynn_polygon_points,
)

__version__ = "0.1.0"
