"""Numerical quasiconformal maps of the unit disk by the disk algorithm."""
import os

from .affine import (
    DegenerateDataError,
    GeneralAffine,
    affine_conformal,
    affine_from_triangles,
    beltrami_of_affine,
    foot_parameter,
    interpolate_two_points,
    is_skewed,
    linear_stretch,
    signed_area,
    triangle_beltrami,
)
from .beltrami import (
    BeltramiField,
    constant_mu,
    daripa_mu,
    exact_radial_map,
    exact_sectorial_map,
    from_callable,
    grid_mu,
    parse_provider,
    radial_mu,
    sectorial_mu,
    triangle_average,
)
from .conformal import ZipperGeometryError, ZipperMap, geodesic_zipper_build, set_threads, zipper_apply
from .elliptic import EllipseGeometry, complete_elliptic_K, ellipse_to_disk, jacobi_sn, seed_map
from .mesh import MeshConfig, RingMesh, build_mesh, max_ratio_bound, ring_count, table1_generate
from .solver import (
    ApplicabilityError,
    DomainError,
    GeometryError,
    PiecewiseLinearResult,
    Retention,
    RetentionError,
    SolverConfig,
    check_applicability,
    evaluate,
    exterior_compose,
    per_triangle_beltrami,
    ring_extension,
    solve,
)

if os.environ.get("QCDISK_THREADS"):
    set_threads()
