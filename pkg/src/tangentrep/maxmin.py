"""Max-min representations of smooth fields over a finite site grid.

A representation stores one tangent plane per site together with, for every
site u, the index family of sites whose planes sit at or above the field at u.
Evaluation takes the maximum over families of the minimum over each family's
planes.  Everything is evaluated over one shared site grid, so the value is
exact at sites and one-sided in between, improving as the grid refines.
"""

from __future__ import annotations

import csv
import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .fields import ScalarField
from .geometry import ConvexDomain, OutsideDomainError, as_point, sample_grid
from .tangent import TangentPlane, tangent_planes

DEFAULT_TAU = 1e-9
_COLUMN_BLOCK = 1024


@dataclass(frozen=True, eq=False)
class SiteSet:
    """Indices of sites whose planes lie at or above the field at site u."""

    u_index: int
    member_indices: np.ndarray  # sorted int32, always contains u_index


@dataclass(eq=False)
class MaxMinRepresentation:
    sites: np.ndarray  # (M, dim)
    plane_values: np.ndarray  # (M,)
    plane_grads: np.ndarray  # (M, dim)
    families: list[SiteSet]
    tau: float
    domain: ConvexDomain | None = None
    _intercepts: np.ndarray = field(default=None, repr=False)
    _csr: tuple = field(default=None, repr=False)

    def __post_init__(self):
        if self._intercepts is None:
            self._intercepts = self.plane_values - np.einsum(
                "ij,ij->i", self.plane_grads, self.sites
            )
        if self._csr is None:
            if not self.families:
                raise ValueError("a representation needs at least one site")
            # duplicate families contribute nothing to a maximum: keep unique
            # member arrays only (id check first, builders share array objects)
            unique: dict[bytes, np.ndarray] = {}
            seen_ids: set[int] = set()
            for fam in self.families:
                arr = fam.member_indices
                if fam.u_index not in arr:
                    raise ValueError("a site family must contain its own site")
                if id(arr) in seen_ids:
                    continue
                seen_ids.add(id(arr))
                unique.setdefault(arr.tobytes(), arr)
            arrays = list(unique.values())
            members = np.concatenate(arrays).astype(np.int32, copy=False)
            offsets = np.zeros(len(arrays) + 1, dtype=np.int64)
            np.cumsum([a.size for a in arrays], out=offsets[1:])
            self._csr = (members, offsets)

    @property
    def n_sites(self) -> int:
        return self.sites.shape[0]

    @property
    def dim(self) -> int:
        return self.sites.shape[1]

    @property
    def planes(self) -> list[TangentPlane]:
        return [
            TangentPlane(site=self.sites[i], grad=self.plane_grads[i],
                         value=float(self.plane_values[i]))
            for i in range(self.n_sites)
        ]

    def family(self, u_index: int) -> SiteSet:
        return self.families[u_index]

    def plane_values_at(self, X) -> np.ndarray:
        """All plane evaluations: rows are points, columns are plane indices."""
        X = np.asarray(X, dtype=float)
        return np.ascontiguousarray(X @ self.plane_grads.T + self._intercepts)


def site_set(f: ScalarField, sites, u_index: int, tau: float = DEFAULT_TAU) -> SiteSet:
    """Family of site indices whose planes reach the field value at site u.

    Membership uses the relative tolerance tau * (1 + |f(u)|); the site u
    itself always qualifies.
    """
    sites = np.asarray(sites, dtype=float)
    if sites.ndim == 1:
        sites = sites[:, None]
    if not 0 <= u_index < sites.shape[0]:
        raise IndexError(f"u_index {u_index} out of range for {sites.shape[0]} sites")
    values, grads = tangent_planes(f, sites)
    intercepts = values - np.einsum("ij,ij->i", grads, sites)
    g_at_u = intercepts + grads @ sites[u_index]
    f_u = values[u_index]
    members = np.nonzero(g_at_u >= f_u - tau * (1.0 + abs(f_u)))[0]
    return SiteSet(u_index=u_index, member_indices=members.astype(np.int32))


def build_representation_from_sites(
    f: ScalarField,
    sites,
    tau: float = DEFAULT_TAU,
    domain: ConvexDomain | None = None,
) -> MaxMinRepresentation:
    """Assemble the representation over an explicit site list."""
    sites = np.asarray(sites, dtype=float)
    if sites.ndim == 1:
        sites = sites[:, None]
    values, grads = tangent_planes(f, sites)
    intercepts = values - np.einsum("ij,ij->i", grads, sites)
    thresholds = values - tau * (1.0 + np.abs(values))

    m = sites.shape[0]
    if m == 0:
        raise ValueError("sites must be nonempty")
    families: list[SiteSet] = [None] * m
    shared: dict[bytes, np.ndarray] = {}
    for lo in range(0, m, _COLUMN_BLOCK):
        hi = min(m, lo + _COLUMN_BLOCK)
        # block[i, j] = plane i evaluated at site lo+j
        block = intercepts[:, None] + grads @ sites[lo:hi].T
        mask = block >= thresholds[None, lo:hi]
        u_offsets, plane_ids = np.nonzero(mask.T)
        splits = np.searchsorted(u_offsets, np.arange(1, hi - lo))
        for j, members in enumerate(np.split(plane_ids.astype(np.int32), splits)):
            u = lo + j
            if members.size == 0 or not mask[u, j]:
                raise AssertionError("site families must contain their own site")
            families[u] = SiteSet(u_index=u, member_indices=shared.setdefault(
                members.tobytes(), members))
    return MaxMinRepresentation(
        sites=sites, plane_values=values, plane_grads=grads,
        families=families, tau=tau, domain=domain,
    )


def build_representation(
    f: ScalarField,
    domain: ConvexDomain,
    resolution: int,
    tau: float = DEFAULT_TAU,
) -> MaxMinRepresentation:
    """Sample the domain on a grid and assemble the representation there."""
    sites = sample_grid(domain, resolution)
    return build_representation_from_sites(f, sites, tau=tau, domain=domain)


def _eval_blocks(rep: MaxMinRepresentation, X: np.ndarray) -> np.ndarray:
    members, offsets = rep._csr
    threads = _kernels.thread_count()
    blocks = [X[lo:lo + _COLUMN_BLOCK] for lo in range(0, X.shape[0], _COLUMN_BLOCK)]

    def run(block):
        return _kernels.maximin_block(rep.plane_values_at(block), members, offsets)

    if threads > 1 and len(blocks) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(run, blocks))
    else:
        parts = [run(b) for b in blocks]
    return np.concatenate(parts) if parts else np.empty(0)


def rep_eval_many(rep: MaxMinRepresentation, X, check_domain: bool = True) -> np.ndarray:
    """Evaluate the representation at every row of X."""
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        X = X[:, None] if rep.dim == 1 else X[None, :]
    if rep.domain is not None and check_domain:
        inside = rep.domain.contains_many(X)
        if not np.all(inside):
            bad = X[np.nonzero(~inside)[0][0]]
            raise OutsideDomainError(f"point {bad.tolist()} outside the representation domain")
    return _eval_blocks(rep, X)


def rep_eval(rep: MaxMinRepresentation, x) -> float:
    """Max over site families of the family's minimum plane value at x."""
    x = as_point(x, rep.dim)
    return float(rep_eval_many(rep, x[None, :])[0])


def extremal_eval_many(f: ScalarField, sites, X, mode: str) -> np.ndarray:
    """Pointwise max ('sup') or min ('inf') over all site tangent planes."""
    if mode not in ("sup", "inf"):
        raise ValueError("mode must be 'sup' or 'inf'")
    sites = np.asarray(sites, dtype=float)
    if sites.ndim == 1:
        sites = sites[:, None]
    if sites.shape[0] == 0:
        raise ValueError("sites must be nonempty")
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        X = X[:, None] if f.dim == 1 else X[None, :]
    values, grads = tangent_planes(f, sites)
    intercepts = values - np.einsum("ij,ij->i", grads, sites)
    table = X @ grads.T + intercepts
    return table.max(axis=1) if mode == "sup" else table.min(axis=1)


def extremal_eval(f: ScalarField, sites, x, mode: str) -> float:
    x = as_point(x, f.dim)
    return float(extremal_eval_many(f, sites, x[None, :], mode)[0])


# ---------------------------------------------------------------------------
# Serialization


def rep_to_json_dict(rep: MaxMinRepresentation) -> dict:
    return {
        "sites": [list(s) for s in rep.sites],
        "planes": [p.to_json_dict() for p in rep.planes],
        "families": [
            {"u": fam.u_index, "members": [int(i) for i in fam.member_indices]}
            for fam in rep.families
        ],
        "tau": rep.tau,
        "domain": rep.domain.to_json_dict() if rep.domain is not None else None,
    }


def rep_from_json_dict(d: dict) -> MaxMinRepresentation:
    sites = np.asarray(d["sites"], dtype=float)
    values = np.array([p["f_t"] for p in d["planes"]], dtype=float)
    grads = np.asarray([p["grad"] for p in d["planes"]], dtype=float)
    families = [
        SiteSet(u_index=int(fd["u"]),
                member_indices=np.asarray(fd["members"], dtype=np.int32))
        for fd in d["families"]
    ]
    domain = ConvexDomain.from_json_dict(d["domain"]) if d.get("domain") else None
    return MaxMinRepresentation(
        sites=sites, plane_values=values, plane_grads=grads,
        families=families, tau=float(d["tau"]), domain=domain,
    )


def write_eval_csv(rep: MaxMinRepresentation, f: ScalarField, X, path) -> float:
    """Dump x..., f, rep, abs_err rows; returns the maximum absolute error."""
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        X = X[:, None]
    fx = f.value_many(X)
    rx = rep_eval_many(rep, X)
    err = np.abs(rx - fx)
    with open(path, "w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow([f"x{k + 1}" for k in range(X.shape[1])] + ["f", "rep", "abs_err"])
        for row, fv, rv, ev in zip(X, fx, rx, err):
            writer.writerow([f"{v:.17g}" for v in row]
                            + [f"{fv:.17g}", f"{rv:.17g}", f"{ev:.17g}"])
    return float(err.max()) if err.size else 0.0


def rep_to_json(rep: MaxMinRepresentation, path) -> None:
    with open(path, "w") as handle:
        json.dump(rep_to_json_dict(rep), handle, indent=1)
        handle.write("\n")
