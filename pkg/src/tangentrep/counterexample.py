"""Numeric certificate that tangent-plane max-min representation fails on a
non-convex domain.

The domain is a union of three triangles meeting at the origin and along the
segment [0,1] x {0}; the field is x2^2 on the middle triangle and 0 on the
other two (C^1 across the shared edges).  Every tangent plane depends on x2
alone, so it takes equal values at a point a inside the middle triangle and
at its mirror image b across the x2-axis, while f(a) > 0 = f(b).  No max-min
expression over these planes can separate the two points.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .fields import (TRIANGLE_BOTTOM, TRIANGLE_LEFT, TRIANGLE_MIDDLE,
                     PIECEWISE_TIE_TOL, ScalarField, catalog)
from .geometry import ConvexDomain, as_point, barycentric_coordinates, in_triangle
from .maxmin import (MaxMinRepresentation, build_representation_from_sites,
                     rep_eval, rep_eval_many)
from .tangent import tangent_planes

INTERIOR_MARGIN = 1e-6
PLANE_GAP_TOL = 1e-12

CONSTRUCTION_NOTES = (
    "The left triangle uses vertices (-1,0), (-1,1), (0,0): it is the mirror "
    "image of the middle triangle across the x2-axis, so the reflected point "
    "b = (-a1, a2) of any interior point a of the middle triangle lies in the "
    "domain.",
    "Families that realize a positive value at a can only draw on sites in "
    "the middle triangle, where planes reduce to x -> 2*t2*x2 - t2^2.",
)


class PointNotInInteriorError(ValueError):
    pass


@dataclass(frozen=True)
class TriangleDomain:
    """The three-triangle union; connected but not convex."""

    left: np.ndarray = field(default_factory=lambda: TRIANGLE_LEFT.copy())
    middle: np.ndarray = field(default_factory=lambda: TRIANGLE_MIDDLE.copy())
    bottom: np.ndarray = field(default_factory=lambda: TRIANGLE_BOTTOM.copy())

    def triangles(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        return self.left, self.middle, self.bottom

    def contains_many(self, X, tol: float = PIECEWISE_TIE_TOL) -> np.ndarray:
        X = np.asarray(X, dtype=float)
        out = np.zeros(X.shape[0] if X.ndim > 1 else 1, dtype=bool)
        for tri in self.triangles():
            out |= np.atleast_1d(in_triangle(tri, X, tol))
        return out

    def contains(self, x) -> bool:
        return bool(self.contains_many(as_point(x, 2)[None, :])[0])

    def sample_sites(self, resolution: int) -> np.ndarray:
        xs = np.linspace(-1.0, 1.0, resolution)
        mx, my = np.meshgrid(xs, xs, indexing="ij")
        pts = np.column_stack([mx.reshape(-1), my.reshape(-1)])
        return pts[self.contains_many(pts)]

    def nonconvexity_witness(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Two inside points whose midpoint falls outside the union."""
        p = np.array([-0.5, 0.5])
        q = np.array([0.5, 0.5])
        mid = 0.5 * (p + q)
        assert self.contains(p) and self.contains(q) and not self.contains(mid)
        return p, q, mid


def _require_interior(a: np.ndarray) -> None:
    w = barycentric_coordinates(TRIANGLE_MIDDLE, a)
    if w.min() < INTERIOR_MARGIN:
        raise PointNotInInteriorError(
            f"point {a.tolist()} is not strictly inside the middle triangle "
            f"(barycentric margin {w.min():.3e} < {INTERIOR_MARGIN})"
        )


@dataclass(frozen=True)
class ObstructionReport:
    """Certificate that every tangent plane takes equal values at a and b."""

    a: np.ndarray
    b: np.ndarray
    f_a: float
    f_b: float
    b_in_mirror_triangle: bool
    site_resolution: int
    n_sites: int
    max_plane_gap: float  # max over sites of |g_t(a) - g_t(b)|
    separable: bool
    conclusion: str
    notes: tuple = CONSTRUCTION_NOTES

    def to_json_dict(self) -> dict:
        return {
            "a": list(self.a), "b": list(self.b),
            "f_a": self.f_a, "f_b": self.f_b,
            "b_in_mirror_triangle": self.b_in_mirror_triangle,
            "site_resolution": self.site_resolution,
            "n_sites": self.n_sites,
            "max_plane_gap": self.max_plane_gap,
            "separable": self.separable,
            "conclusion": self.conclusion,
            "notes": list(self.notes),
        }


def plane_values_at_pair(f: ScalarField, sites: np.ndarray,
                         a: np.ndarray, b: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """g_t(a) and g_t(b) for every site t, in site-anchored form."""
    values, grads = tangent_planes(f, sites)
    g_a = values + np.einsum("ij,ij->i", grads, a[None, :] - sites)
    g_b = values + np.einsum("ij,ij->i", grads, b[None, :] - sites)
    return g_a, g_b


def obstruction_certificate(a, site_resolution: int = 41) -> ObstructionReport:
    """Check g_t(a) = g_t(b) over a site grid for the mirrored pair (a, b)."""
    a = as_point(a, 2)
    _require_interior(a)
    b = np.array([-a[0], a[1]])
    domain = TriangleDomain()
    f = catalog("triangle_counterexample_f")
    sites = domain.sample_sites(site_resolution)
    g_a, g_b = plane_values_at_pair(f, sites, a, b)
    gap = float(np.abs(g_a - g_b).max())
    separable = gap > PLANE_GAP_TOL
    return ObstructionReport(
        a=a, b=b,
        f_a=f.value(a), f_b=f.value(b),
        b_in_mirror_triangle=bool(in_triangle(TRIANGLE_LEFT, b, PIECEWISE_TIE_TOL)),
        site_resolution=site_resolution,
        n_sites=sites.shape[0],
        max_plane_gap=gap,
        separable=separable,
        conclusion=(
            "every tangent plane takes the same value at a and b, so no "
            "max-min expression over these planes can separate them; the "
            "field still has f(a) > 0 = f(b)"
            if not separable else
            "unexpected: some tangent plane separates a from b"
        ),
    )


@dataclass(frozen=True)
class FailedRepresentationReport:
    """The representation built anyway cannot reproduce f at both a and b."""

    resolution: int
    n_sites: int
    a: np.ndarray
    b: np.ndarray
    f_a: float
    f_b: float
    rep_a: float
    rep_b: float
    rep_gap: float  # |rep(a) - rep(b)|
    worst_error_at_pair: float  # max(|rep(a)-f(a)|, |rep(b)-f(b)|)
    convex_control_max_err: float
    affine_control_max_err: float
    notes: tuple = CONSTRUCTION_NOTES

    def to_json_dict(self) -> dict:
        return {
            "resolution": self.resolution, "n_sites": self.n_sites,
            "a": list(self.a), "b": list(self.b),
            "f_a": self.f_a, "f_b": self.f_b,
            "rep_a": self.rep_a, "rep_b": self.rep_b,
            "rep_gap": self.rep_gap,
            "worst_error_at_pair": self.worst_error_at_pair,
            "convex_control_max_err": self.convex_control_max_err,
            "affine_control_max_err": self.affine_control_max_err,
            "notes": list(self.notes),
        }


def _convex_control(resolution: int) -> float:
    """Same field restricted to the (convex) middle triangle: the build works."""
    f = catalog("triangle_counterexample_f")
    tri = ConvexDomain.polygon([(0.0, 0.0), (1.0, 0.0), (1.0, 1.0)])
    from .geometry import sample_grid

    sites = sample_grid(tri, resolution)
    rep = build_representation_from_sites(f, sites, domain=tri)
    # off-grid test points strictly inside, away from edges
    fine = sample_grid(tri, 2 * resolution - 1)
    test = fine[barycentric_coordinates(TRIANGLE_MIDDLE, fine).min(axis=1) > 0.05]
    vals = rep_eval_many(rep, test)
    return float(np.abs(vals - f.value_many(test)).max())


def _affine_control(resolution: int) -> float:
    """An affine field is reproduced exactly even on the non-convex union."""
    f = catalog("affine")
    sites = TriangleDomain().sample_sites(resolution)
    rep = build_representation_from_sites(f, sites)
    vals = rep_eval_many(rep, sites)
    return float(np.abs(vals - f.value_many(sites)).max())


def failed_representation_demo(resolution: int = 21) -> FailedRepresentationReport:
    """Build the max-min representation over the non-convex union and show it
    collapses a and b to one value, erring by about f(a) at one of them."""
    if resolution < 11:
        raise ValueError("resolution must be at least 11")
    a = np.array([0.7, 0.3])
    b = np.array([-0.7, 0.3])
    f = catalog("triangle_counterexample_f")
    sites = TriangleDomain().sample_sites(resolution)
    rep = build_representation_from_sites(f, sites)
    rep_a = rep_eval(rep, a)
    rep_b = rep_eval(rep, b)
    return FailedRepresentationReport(
        resolution=resolution,
        n_sites=sites.shape[0],
        a=a, b=b,
        f_a=f.value(a), f_b=f.value(b),
        rep_a=rep_a, rep_b=rep_b,
        rep_gap=abs(rep_a - rep_b),
        worst_error_at_pair=max(abs(rep_a - f.value(a)), abs(rep_b - f.value(b))),
        convex_control_max_err=_convex_control(resolution),
        affine_control_max_err=_affine_control(resolution),
    )


def write_reports_json(obstruction: ObstructionReport,
                       demo: FailedRepresentationReport, path) -> None:
    with open(path, "w") as handle:
        json.dump({"obstruction": obstruction.to_json_dict(),
                   "failed_representation": demo.to_json_dict()}, handle, indent=1)
        handle.write("\n")


def write_plane_pair_csv(a, site_resolution: int, path) -> None:
    """CSV of (t, g_t(a), g_t(b)) over the site grid."""
    import csv

    a = as_point(a, 2)
    b = np.array([-a[0], a[1]])
    f = catalog("triangle_counterexample_f")
    sites = TriangleDomain().sample_sites(site_resolution)
    g_a, g_b = plane_values_at_pair(f, sites, a, b)
    with open(path, "w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(["t1", "t2", "g_t_at_a", "g_t_at_b"])
        for t, ga, gb in zip(sites, g_a, g_b):
            writer.writerow([f"{t[0]:.17g}", f"{t[1]:.17g}", f"{ga:.17g}", f"{gb:.17g}"])
