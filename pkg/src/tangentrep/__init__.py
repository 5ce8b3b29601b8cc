"""tangentrep: max-min representations of smooth functions from their tangent
planes, and Boolean half-plane representations of smooth planar regions.

The hot evaluation loops run on a compiled extension when it is available;
``tangentrep.kernel_backend()`` reports which implementation is active.
"""

from ._kernels import backend as kernel_backend
from .counterexample import (FailedRepresentationReport, ObstructionReport,
                             TriangleDomain, failed_representation_demo,
                             obstruction_certificate)
from .domainrep import (AgreementReport, BooleanDomainRep, ImplicitDomain2D,
                        agreement_stats, boundary_halfspace, build_domain_rep,
                        member, member_many, ray_exit)
from .expr import FieldExpr, parse, to_string
from .fields import (CATALOG_NAMES, CONVEX_DOMAIN_CATALOG, ScalarField,
                     catalog, eval_with_gradient, from_expr, parse_field)
from .geometry import ConvexDomain, HalfSpace, contains, sample_grid
from .legendre import (GradientMapDiagnostic, LegendreSample, conjugate_eval,
                       conjugate_eval_many, legendre_points)
from .maxmin import (MaxMinRepresentation, SiteSet, build_representation,
                     build_representation_from_sites, extremal_eval,
                     extremal_eval_many, rep_eval, rep_eval_many, site_set)
from .segments import (NoRootFoundError, PivotTrace, SegmentFunction,
                       pivot_parameter, pivot_site)
from .tangent import TangentPlane, plane_eval, plane_eval_many, tangent_plane

__version__ = "0.1.0"

__all__ = [
    "AgreementReport", "BooleanDomainRep", "CATALOG_NAMES",
    "CONVEX_DOMAIN_CATALOG", "ConvexDomain", "FailedRepresentationReport",
    "FieldExpr", "GradientMapDiagnostic", "HalfSpace", "ImplicitDomain2D",
    "LegendreSample", "MaxMinRepresentation", "NoRootFoundError",
    "ObstructionReport", "PivotTrace", "ScalarField", "SegmentFunction",
    "SiteSet", "TangentPlane", "TriangleDomain", "agreement_stats",
    "boundary_halfspace", "build_domain_rep", "build_representation",
    "build_representation_from_sites", "catalog", "conjugate_eval",
    "conjugate_eval_many", "contains", "eval_with_gradient", "extremal_eval",
    "extremal_eval_many", "failed_representation_demo", "from_expr",
    "kernel_backend", "legendre_points", "member", "member_many",
    "obstruction_certificate", "parse", "parse_field", "plane_eval",
    "plane_eval_many", "ray_exit", "rep_eval", "rep_eval_many", "sample_grid",
    "site_set", "tangent_plane", "to_string",
]
