"""Points, half-spaces and sampleable convex domains in dimensions 1 to 3.

All membership tests are closed with an absolute boundary tolerance of
``BOUNDARY_TOL`` (inputs throughout the toolkit are O(1)-scaled).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

BOUNDARY_TOL = 1e-12
MIN_DIRECTION_NORM = 1e-12


class DimensionMismatchError(ValueError):
    pass


class DegenerateDirectionError(ValueError):
    pass


class OutsideDomainError(ValueError):
    """A point fell outside the domain an operation requires it in."""


def as_point(x, dim: int | None = None) -> np.ndarray:
    """Coerce to a 1-D float vector, optionally checking its dimension."""
    p = np.atleast_1d(np.asarray(x, dtype=float))
    if p.ndim != 1:
        raise DimensionMismatchError(f"expected a single point, got shape {p.shape}")
    if dim is not None and p.shape[0] != dim:
        raise DimensionMismatchError(f"expected dimension {dim}, got {p.shape[0]}")
    return p


def normalize(v) -> np.ndarray:
    """Return v scaled to unit Euclidean norm."""
    v = as_point(v)
    n = float(np.linalg.norm(v))
    if n < MIN_DIRECTION_NORM:
        raise DegenerateDirectionError(f"direction norm {n} below {MIN_DIRECTION_NORM}")
    return v / n


@dataclass(frozen=True, eq=False)
class HalfSpace:
    """Closed half-space {y : <normal, y> <= offset} anchored at a boundary point."""

    anchor: np.ndarray
    normal: np.ndarray  # unit outward normal
    offset: float  # = <normal, anchor>

    @classmethod
    def from_anchor_normal(cls, anchor, normal) -> "HalfSpace":
        anchor = as_point(anchor)
        unit = normalize(normal)
        if anchor.shape != unit.shape:
            raise DimensionMismatchError("anchor and normal dimensions differ")
        return cls(anchor=anchor, normal=unit, offset=float(unit @ anchor))

    @property
    def dim(self) -> int:
        return self.anchor.shape[0]

    def signed_slack(self, y):
        """<normal, y> - offset; non-positive (within tolerance) inside."""
        y = np.asarray(y, dtype=float)
        return y @ self.normal - self.offset

    def contains(self, y, tol: float = BOUNDARY_TOL) -> bool:
        return bool(self.signed_slack(as_point(y, self.dim)) <= tol)

    def to_json_dict(self) -> dict:
        return {"anchor": list(self.anchor), "normal": list(self.normal)}


@dataclass(frozen=True, eq=False)
class ConvexDomain:
    """A box, ball or convex polygon that supports membership and grid sampling."""

    kind: str
    dim: int
    lo: np.ndarray | None = None
    hi: np.ndarray | None = None
    center: np.ndarray | None = None
    radius: float | None = None
    vertices: np.ndarray | None = field(default=None)

    @classmethod
    def box(cls, lo, hi) -> "ConvexDomain":
        lo, hi = as_point(lo), as_point(hi)
        if lo.shape != hi.shape:
            raise DimensionMismatchError("box corners have different dimensions")
        _check_dim(lo.shape[0])
        if not np.all(lo < hi):
            raise ValueError("box needs lo < hi componentwise")
        return cls(kind="box", dim=lo.shape[0], lo=lo, hi=hi)

    @classmethod
    def ball(cls, center, radius: float) -> "ConvexDomain":
        center = as_point(center)
        _check_dim(center.shape[0])
        if not radius > 0:
            raise ValueError("ball needs radius > 0")
        return cls(kind="ball", dim=center.shape[0], center=center, radius=float(radius))

    @classmethod
    def polygon(cls, vertices) -> "ConvexDomain":
        verts = np.asarray(vertices, dtype=float)
        if verts.ndim != 2 or verts.shape[1] != 2 or verts.shape[0] < 3:
            raise ValueError("polygon needs at least 3 vertices in the plane")
        rolled = np.roll(verts, -1, axis=0)
        rolled2 = np.roll(verts, -2, axis=0)
        e1 = rolled - verts
        e2 = rolled2 - rolled
        cross = e1[:, 0] * e2[:, 1] - e1[:, 1] * e2[:, 0]
        if not np.all(cross > 0):
            raise ValueError("polygon vertices must be in convex position, counter-clockwise")
        return cls(kind="polygon", dim=2, vertices=verts)

    def bounding_box(self) -> tuple[np.ndarray, np.ndarray]:
        if self.kind == "box":
            return self.lo.copy(), self.hi.copy()
        if self.kind == "ball":
            return self.center - self.radius, self.center + self.radius
        return self.vertices.min(axis=0), self.vertices.max(axis=0)

    def contains_many(self, X, tol: float = BOUNDARY_TOL) -> np.ndarray:
        X = np.asarray(X, dtype=float)
        if X.ndim == 1:
            X = X[None, :]
        if X.shape[1] != self.dim:
            raise DimensionMismatchError(f"points have dimension {X.shape[1]}, domain {self.dim}")
        if self.kind == "box":
            return np.all(X >= self.lo - tol, axis=1) & np.all(X <= self.hi + tol, axis=1)
        if self.kind == "ball":
            return np.linalg.norm(X - self.center, axis=1) <= self.radius + tol
        verts = self.vertices
        edges = np.roll(verts, -1, axis=0) - verts
        rel = X[:, None, :] - verts[None, :, :]
        cross = edges[None, :, 0] * rel[:, :, 1] - edges[None, :, 1] * rel[:, :, 0]
        return np.all(cross >= -tol, axis=1)

    def contains(self, x, tol: float = BOUNDARY_TOL) -> bool:
        return bool(self.contains_many(as_point(x, self.dim), tol)[0])

    def to_json_dict(self) -> dict:
        if self.kind == "box":
            return {"kind": "box", "lo": list(self.lo), "hi": list(self.hi)}
        if self.kind == "ball":
            return {"kind": "ball", "center": list(self.center), "radius": self.radius}
        return {"kind": "polygon", "vertices": [list(v) for v in self.vertices]}

    @classmethod
    def from_json_dict(cls, d: dict) -> "ConvexDomain":
        kind = d.get("kind")
        if kind == "box":
            return cls.box(d["lo"], d["hi"])
        if kind == "ball":
            return cls.ball(d["center"], d["radius"])
        if kind == "polygon":
            return cls.polygon(d["vertices"])
        raise ValueError(f"unknown domain kind {kind!r}")


def _check_dim(dim: int) -> None:
    if dim not in (1, 2, 3):
        raise DimensionMismatchError(f"supported dimensions are 1..3, got {dim}")


def contains(domain: ConvexDomain, x) -> bool:
    """Closed membership test with the standard boundary tolerance."""
    return domain.contains(x)


def sample_grid(domain: ConvexDomain, resolution: int) -> np.ndarray:
    """Uniform grid over the bounding box, filtered to the domain.

    ``resolution`` points per axis (>= 2, so bounding-box corners are always
    grid nodes).  Points are ordered lexicographically by grid index.
    """
    if resolution < 2:
        raise ValueError("resolution must be at least 2 per axis")
    lo, hi = domain.bounding_box()
    axes = [np.linspace(lo[k], hi[k], resolution) for k in range(domain.dim)]
    mesh = np.meshgrid(*axes, indexing="ij")
    pts = np.stack([m.reshape(-1) for m in mesh], axis=1)
    return pts[domain.contains_many(pts)]


def barycentric_coordinates(triangle, x) -> np.ndarray:
    """Barycentric coordinates of points x w.r.t. a planar triangle (3x2 array)."""
    v0, v1, v2 = np.asarray(triangle, dtype=float)
    X = np.asarray(x, dtype=float)
    single = X.ndim == 1
    if single:
        X = X[None, :]
    d = (v1[0] - v0[0]) * (v2[1] - v0[1]) - (v2[0] - v0[0]) * (v1[1] - v0[1])
    w1 = ((X[:, 0] - v0[0]) * (v2[1] - v0[1]) - (v2[0] - v0[0]) * (X[:, 1] - v0[1])) / d
    w2 = ((v1[0] - v0[0]) * (X[:, 1] - v0[1]) - (X[:, 0] - v0[0]) * (v1[1] - v0[1])) / d
    w0 = 1.0 - w1 - w2
    out = np.stack([w0, w1, w2], axis=1)
    return out[0] if single else out


def in_triangle(triangle, x, tol: float = BOUNDARY_TOL) -> np.ndarray:
    """Closed triangle membership by barycentric coordinates (tie tolerance tol)."""
    w = barycentric_coordinates(triangle, x)
    return np.all(w >= -tol, axis=-1)
