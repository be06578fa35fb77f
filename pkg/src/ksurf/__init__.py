"""Numerical laboratory for constant extrinsic curvature surface ends in H^3."""

__version__ = "0.1.0"

from .asymptotics import (
    AsymptoticSeries,
    build_semigroup,
    extract_series,
    radius_centroid,
)
from .endfield import EndFunction, mode_masses
from .endsolver import (
    RadialProfile,
    SolveReport,
    boundary_samples,
    jacobi_operator,
    newton_solve,
    ode_radial_solve,
    residual_field,
)
from .errors import (
    ConstraintError,
    ConvergenceError,
    CutoffError,
    DegenerateEndError,
    DegenerateImmersionError,
    DomainError,
    KsurfError,
    RateCollisionWarning,
    SmallnessError,
    TailTruncationWarning,
)
from .functionals import (
    FluxProfile,
    energy_renormalized,
    flux_alpha,
    flux_conormal,
    flux_dnu,
    flux_normal_cumulative,
    volume_truncated,
)
from .greens import GreenConfig, green1d_dirichlet, green2d_dirichlet, picard_solve
from .steiner import (
    INFINITY,
    SteinerData,
    check_relations,
    make_end,
    steiner_geodesic,
    steiner_point,
    steiner_transform,
    symmetric_examples,
)

__all__ = [
    "AsymptoticSeries",
    "EndFunction",
    "FluxProfile",
    "GreenConfig",
    "INFINITY",
    "RadialProfile",
    "SolveReport",
    "SteinerData",
    "boundary_samples",
    "check_relations",
    "energy_renormalized",
    "extract_series",
    "flux_alpha",
    "flux_conormal",
    "flux_dnu",
    "flux_normal_cumulative",
    "build_semigroup",
    "green1d_dirichlet",
    "green2d_dirichlet",
    "jacobi_operator",
    "make_end",
    "mode_masses",
    "newton_solve",
    "ode_radial_solve",
    "picard_solve",
    "radius_centroid",
    "residual_field",
    "steiner_geodesic",
    "steiner_point",
    "steiner_transform",
    "symmetric_examples",
    "volume_truncated",
    "KsurfError",
    "DomainError",
    "DegenerateImmersionError",
    "DegenerateEndError",
    "SmallnessError",
    "ConvergenceError",
    "CutoffError",
    "ConstraintError",
    "RateCollisionWarning",
    "TailTruncationWarning",
    "__version__",
]
