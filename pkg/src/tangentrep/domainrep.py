"""Boolean half-plane representations of smooth planar level-set domains.

A domain is given as {x : phi(x) <= 0} inside a bounding box.  For each base
point sampled in the interior, rays are marched to their first boundary
crossing; the outward tangent half-plane there bounds one conjunct of the base
point's clause.  The whole region is represented as the union over base points
of the intersection of each clause's half-planes, and membership queries are
answered from that formula alone.
"""

from __future__ import annotations

import csv
import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .fields import ScalarField, catalog
from .geometry import BOUNDARY_TOL, HalfSpace, as_point, normalize

BOUNDARY_PHI_TOL = 1e-8
MIN_GRADIENT_NORM = 1e-8
ROOT_PHI_TOL = 1e-10
MARCH_CELLS = 1024
INTERIOR_INSET = 1e-6
DEDUP_DECIMALS = 9
_ROW_BLOCK = 2048


class NotOnBoundaryError(ValueError):
    pass


class DegenerateGradientError(ArithmeticError):
    pass


class RayEscapesBoundingBoxError(ArithmeticError):
    """A marched ray left the bounding box without crossing the boundary."""


@dataclass(frozen=True, eq=False)
class ImplicitDomain2D:
    """Planar region {phi <= 0} with a bounding box enclosing it."""

    phi: ScalarField
    lo: np.ndarray
    hi: np.ndarray

    def __post_init__(self):
        if self.phi.dim != 2:
            raise ValueError("level-set field must be 2-D")

    @classmethod
    def from_field(cls, phi: ScalarField, lo, hi) -> "ImplicitDomain2D":
        return cls(phi=phi, lo=as_point(lo, 2), hi=as_point(hi, 2))

    @classmethod
    def unit_disk(cls) -> "ImplicitDomain2D":
        phi = ScalarField(
            dim=2,
            evaluator=lambda X: X[..., 0] ** 2 + X[..., 1] ** 2 - 1.0,
            gradient=lambda X: np.stack([2.0 * X[..., 0], 2.0 * X[..., 1]], axis=-1),
            smoothness_note="polynomial, C^inf",
            name="unit_disk_phi",
        )
        return cls.from_field(phi, [-1.25, -1.25], [1.25, 1.25])

    @classmethod
    def peanut(cls) -> "ImplicitDomain2D":
        return cls.from_field(catalog("peanut_phi"), [-1.5, -1.0], [1.5, 1.0])

    def diameter(self) -> float:
        return float(np.linalg.norm(self.hi - self.lo))

    def grid(self, resolution: int) -> np.ndarray:
        xs = np.linspace(self.lo[0], self.hi[0], resolution)
        ys = np.linspace(self.lo[1], self.hi[1], resolution)
        mx, my = np.meshgrid(xs, ys, indexing="ij")
        return np.column_stack([mx.reshape(-1), my.reshape(-1)])

    def boundary_distance_estimate(self, Y) -> np.ndarray:
        """First-order distance to the zero level set: |phi| / |grad phi|."""
        Y = np.asarray(Y, dtype=float)
        v = np.abs(self.phi.value_many(Y))
        g = np.linalg.norm(self.phi.grad_many(Y), axis=-1)
        return v / np.maximum(g, 1e-300)


@dataclass(eq=False)
class BooleanDomainRep:
    """Union over clauses of intersections of tangent half-planes."""

    halfspaces: list[HalfSpace]
    clauses: list[np.ndarray]  # int32 half-space indices, one array per base point
    base_points: np.ndarray  # (K, 2)
    ray_count: int
    _normals: np.ndarray = field(default=None, repr=False)
    _offsets: np.ndarray = field(default=None, repr=False)
    _csr: tuple = field(default=None, repr=False)

    def __post_init__(self):
        if self._normals is None:
            self._normals = np.array([h.normal for h in self.halfspaces])
            self._offsets = np.array([h.offset for h in self.halfspaces])
        if self._csr is None:
            if any(len(c) == 0 for c in self.clauses):
                raise ValueError("every clause must be nonempty")
            members = np.concatenate(self.clauses).astype(np.int32, copy=False)
            offsets = np.zeros(len(self.clauses) + 1, dtype=np.int64)
            np.cumsum([len(c) for c in self.clauses], out=offsets[1:])
            self._csr = (members, offsets)

    @property
    def n_halfspaces(self) -> int:
        return len(self.halfspaces)


def boundary_halfspace(dom: ImplicitDomain2D, x0) -> HalfSpace:
    """Outward tangent half-plane {y : <n, y - x0> <= 0} at a boundary point."""
    x0 = as_point(x0, 2)
    v = dom.phi.value(x0)
    if abs(v) > BOUNDARY_PHI_TOL:
        raise NotOnBoundaryError(f"|phi(x0)| = {abs(v):.3e} exceeds {BOUNDARY_PHI_TOL}")
    g = dom.phi.grad(x0)
    norm = float(np.linalg.norm(g))
    if norm < MIN_GRADIENT_NORM:
        raise DegenerateGradientError(f"|grad phi(x0)| = {norm:.3e} below {MIN_GRADIENT_NORM}")
    return HalfSpace.from_anchor_normal(x0, g / norm)


def _bbox_exit_lengths(dom: ImplicitDomain2D, origins: np.ndarray,
                       dirs: np.ndarray) -> np.ndarray:
    smax = np.full(origins.shape[0], np.inf)
    for k in range(2):
        d = dirs[:, k]
        pos = d > 1e-15
        neg = d < -1e-15
        smax[pos] = np.minimum(smax[pos], (dom.hi[k] - origins[pos, k]) / d[pos])
        smax[neg] = np.minimum(smax[neg], (dom.lo[k] - origins[neg, k]) / d[neg])
    return np.maximum(smax, 0.0)


def _ray_exit_batch(dom: ImplicitDomain2D, origins: np.ndarray,
                    dirs: np.ndarray) -> np.ndarray:
    """First boundary crossing along each ray, by marching plus bisection."""
    v0 = dom.phi.value_many(origins)
    if np.any(v0 > BOUNDARY_PHI_TOL):
        bad = origins[np.nonzero(v0 > BOUNDARY_PHI_TOL)[0][0]]
        raise ValueError(f"ray origin {bad.tolist()} lies outside the region")
    delta = dom.diameter() / MARCH_CELLS
    smax = _bbox_exit_lengths(dom, origins, dirs)
    exits = np.empty_like(origins)
    for lo_row in range(0, origins.shape[0], _ROW_BLOCK):
        rows = slice(lo_row, min(origins.shape[0], lo_row + _ROW_BLOCK))
        exits[rows] = _march_block(dom, origins[rows], dirs[rows], smax[rows], delta)
    return exits


def _march_block(dom, origins, dirs, smax, delta):
    n_steps = int(np.ceil(smax.max() / delta)) if smax.size else 0
    s_nodes = np.minimum(np.arange(n_steps + 1) * delta, smax[:, None])
    pts = origins[:, None, :] + s_nodes[:, :, None] * dirs[:, None, :]
    v = dom.phi.value_many(pts)
    v[:, 0] = np.minimum(v[:, 0], 0.0)  # origins are in the region by precondition
    crossing = (v[:, :-1] <= 0.0) & (v[:, 1:] > 0.0)
    found = crossing.any(axis=1)
    if not np.all(found):
        bad = np.nonzero(~found)[0][0]
        raise RayEscapesBoundingBoxError(
            f"ray from {origins[bad].tolist()} along {dirs[bad].tolist()} "
            "never leaves the region inside the bounding box"
        )
    first = crossing.argmax(axis=1)
    rows = np.arange(origins.shape[0])
    s_lo = s_nodes[rows, first]
    s_hi = s_nodes[rows, first + 1]
    s_mid = 0.5 * (s_lo + s_hi)
    for _ in range(100):
        mid_pts = origins + s_mid[:, None] * dirs
        vm = dom.phi.value_many(mid_pts)
        done = np.abs(vm) <= ROOT_PHI_TOL
        if done.all():
            break
        go_up = vm > 0.0
        s_hi = np.where(~done & go_up, s_mid, s_hi)
        s_lo = np.where(~done & ~go_up, s_mid, s_lo)
        if np.all((s_hi - s_lo) <= 1e-15 * np.maximum(1.0, s_hi)):
            break
        s_mid = np.where(done, s_mid, 0.5 * (s_lo + s_hi))
    return origins + s_mid[:, None] * dirs


def ray_exit(dom: ImplicitDomain2D, a, d) -> np.ndarray:
    """Far endpoint of the boundary-to-boundary visible segment from a along d."""
    a = as_point(a, 2)
    d = normalize(as_point(d, 2))
    return _ray_exit_batch(dom, a[None, :], d[None, :])[0]


def build_domain_rep(dom: ImplicitDomain2D, base_resolution: int,
                     ray_count: int) -> BooleanDomainRep:
    """Assemble the union-of-intersections formula from ray-visible tangents.

    Base points are the interior grid nodes (phi <= -inset); each contributes
    one clause built from ``ray_count`` equiangular rays.  Half-planes are
    pooled and deduplicated by anchor and normal rounded to 1e-9.
    """
    if base_resolution < 2:
        raise ValueError("base_resolution must be at least 2")
    if ray_count < 1:
        raise ValueError("ray_count must be positive")
    grid = dom.grid(base_resolution)
    bases = grid[dom.phi.value_many(grid) <= -INTERIOR_INSET]
    if bases.shape[0] == 0:
        raise ValueError("no interior base points at this resolution")
    angles = 2.0 * np.pi * np.arange(ray_count) / ray_count
    directions = np.column_stack([np.cos(angles), np.sin(angles)])

    k = bases.shape[0]
    origins = np.repeat(bases, ray_count, axis=0)
    dirs = np.tile(directions, (k, 1))
    exits = _ray_exit_batch(dom, origins, dirs)

    grads = dom.phi.grad_many(exits)
    norms = np.linalg.norm(grads, axis=1)
    if np.any(norms < MIN_GRADIENT_NORM):
        bad = exits[np.nonzero(norms < MIN_GRADIENT_NORM)[0][0]]
        raise DegenerateGradientError(
            f"vanishing gradient at boundary point {bad.tolist()}"
        )
    normals = grads / norms[:, None]

    keys = np.column_stack([np.round(exits, DEDUP_DECIMALS),
                            np.round(normals, DEDUP_DECIMALS)])
    pool: dict[bytes, int] = {}
    halfspaces: list[HalfSpace] = []
    ids = np.empty(exits.shape[0], dtype=np.int32)
    for i in range(exits.shape[0]):
        key = keys[i].tobytes()
        idx = pool.get(key)
        if idx is None:
            idx = len(halfspaces)
            pool[key] = idx
            halfspaces.append(HalfSpace.from_anchor_normal(exits[i], normals[i]))
        ids[i] = idx

    clauses = [np.unique(ids[j * ray_count:(j + 1) * ray_count]) for j in range(k)]
    rep = BooleanDomainRep(halfspaces=halfspaces, clauses=clauses,
                           base_points=bases, ray_count=ray_count)
    slack = bases @ rep._normals.T - rep._offsets
    for j, clause in enumerate(clauses):
        if not np.all(slack[j, clause] <= BOUNDARY_TOL):
            raise AssertionError("base point escaped its own clause")
    return rep


def member_many(rep: BooleanDomainRep, Y) -> np.ndarray:
    """Formula-only membership for every row of Y."""
    Y = np.asarray(Y, dtype=float)
    if Y.ndim == 1:
        Y = Y[None, :]
    members, offsets = rep._csr
    threads = _kernels.thread_count()
    blocks = [Y[lo:lo + _ROW_BLOCK] for lo in range(0, Y.shape[0], _ROW_BLOCK)]

    def run(block):
        slack = np.ascontiguousarray(block @ rep._normals.T - rep._offsets)
        return _kernels.clause_any_all_block(slack, members, offsets, BOUNDARY_TOL)

    if threads > 1 and len(blocks) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(run, blocks))
    else:
        parts = [run(b) for b in blocks]
    return np.concatenate(parts) if parts else np.empty(0, dtype=bool)


def member(rep: BooleanDomainRep, y) -> bool:
    """True iff some clause contains y in all of its half-planes."""
    return bool(member_many(rep, as_point(y, 2))[0])


@dataclass(frozen=True)
class AgreementReport:
    """Agreement of formula membership with the phi-sign oracle on a grid."""

    grid_resolution: int
    band_width: float
    n_points: int
    n_outside_band: int
    agreement_rate: float  # fraction of outside-band points that agree
    false_positives: int  # member true but phi > 0 beyond the band (containment breaches)
    false_negatives: int  # member false but phi <= 0 beyond the band (coverage gaps)


def agreement_stats(rep: BooleanDomainRep, dom: ImplicitDomain2D,
                    resolution: int = 101, band: float = 0.05) -> AgreementReport:
    Y = dom.grid(resolution)
    inside = dom.phi.value_many(Y) <= 0.0
    dist = dom.boundary_distance_estimate(Y)
    outside_band = dist > band
    got = member_many(rep, Y)
    agree = got == inside
    n_out = int(outside_band.sum())
    return AgreementReport(
        grid_resolution=resolution,
        band_width=band,
        n_points=Y.shape[0],
        n_outside_band=n_out,
        agreement_rate=float(agree[outside_band].mean()) if n_out else 1.0,
        false_positives=int((got & ~inside & outside_band).sum()),
        false_negatives=int((~got & inside & outside_band).sum()),
    )


def rep_to_json_dict(rep: BooleanDomainRep) -> dict:
    return {
        "halfspaces": [h.to_json_dict() for h in rep.halfspaces],
        "clauses": [[int(i) for i in clause] for clause in rep.clauses],
        "bases": [list(b) for b in rep.base_points],
        "ray_count": rep.ray_count,
    }


def rep_to_json(rep: BooleanDomainRep, path) -> None:
    with open(path, "w") as handle:
        json.dump(rep_to_json_dict(rep), handle, indent=1)
        handle.write("\n")


def write_membership_csv(rep: BooleanDomainRep, dom: ImplicitDomain2D,
                         resolution: int, path) -> None:
    Y = dom.grid(resolution)
    phi = dom.phi.value_many(Y)
    got = member_many(rep, Y)
    with open(path, "w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(["x1", "x2", "phi", "member"])
        for row, p, g in zip(Y, phi, got):
            writer.writerow([f"{row[0]:.17g}", f"{row[1]:.17g}", f"{p:.17g}", int(g)])
