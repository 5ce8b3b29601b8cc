"""Sampled Legendre transform: slope/intercept pairs from tangent data.

Each site t yields the pair p = grad f(t) and H = <p, t> - f(t); the function
is recovered (for strictly convex f, exactly in the limit) as the supremum of
x -> <p, x> - H over the sampled pairs.  Samples stay parametrized by their
source site, so non-convex fields are handled too: the supremum then recovers
the convex envelope rather than f itself.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from .fields import ScalarField
from .geometry import as_point
from .tangent import tangent_planes

DUPLICATE_DECIMALS = 12


@dataclass(frozen=True, eq=False)
class LegendreSample:
    """One dual-space point: slopes p and intercept H, tagged by its site."""

    t: np.ndarray
    p: np.ndarray
    H: float


@dataclass(frozen=True)
class GradientMapDiagnostic:
    """Injectivity evidence for the site-to-slope map over the sample."""

    n_sites: int
    min_site_gap: float  # smallest pairwise distance among sites
    min_slope_gap: float  # smallest pairwise distance among p values
    duplicate_slopes: int  # pairs identified after rounding to 1e-12
    injective: bool


def _pairwise_min_gap(X: np.ndarray) -> float:
    if X.shape[0] < 2:
        return float("inf")
    d2 = np.sum((X[:, None, :] - X[None, :, :]) ** 2, axis=-1)
    np.fill_diagonal(d2, np.inf)
    return float(np.sqrt(d2.min()))


def legendre_points(f: ScalarField, sites) -> tuple[list[LegendreSample], GradientMapDiagnostic]:
    """One (p, H) sample per site, plus an injectivity diagnostic."""
    sites = np.asarray(sites, dtype=float)
    if sites.ndim == 1:
        sites = sites[:, None]
    values, grads = tangent_planes(f, sites)
    H = np.einsum("ij,ij->i", grads, sites) - values
    samples = [
        LegendreSample(t=sites[i], p=grads[i], H=float(H[i]))
        for i in range(sites.shape[0])
    ]
    rounded = np.round(grads, DUPLICATE_DECIMALS)
    n_unique = np.unique(rounded, axis=0).shape[0]
    duplicates = sites.shape[0] - n_unique
    diagnostic = GradientMapDiagnostic(
        n_sites=sites.shape[0],
        min_site_gap=_pairwise_min_gap(sites),
        min_slope_gap=_pairwise_min_gap(grads),
        duplicate_slopes=duplicates,
        injective=duplicates == 0,
    )
    return samples, diagnostic


def sample_arrays(samples: list[LegendreSample]) -> tuple[np.ndarray, np.ndarray]:
    P = np.array([s.p for s in samples])
    H = np.array([s.H for s in samples])
    return P, H


def conjugate_eval_many(samples: list[LegendreSample], X) -> np.ndarray:
    """sup over samples of <p, x> - H, for every row of X."""
    if not samples:
        raise ValueError("samples must be nonempty")
    P, H = sample_arrays(samples)
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        X = X[:, None] if P.shape[1] == 1 else X[None, :]
    return (X @ P.T - H).max(axis=1)


def conjugate_eval(samples: list[LegendreSample], x) -> float:
    if not samples:
        raise ValueError("samples must be nonempty")
    dim = samples[0].p.shape[0]
    return float(conjugate_eval_many(samples, as_point(x, dim)[None, :])[0])


def second_difference_convexity(f: ScalarField, sites) -> bool:
    """Sampled stand-in for strict convexity of a 1-D field: positive second
    differences along the sorted site list."""
    sites = np.asarray(sites, dtype=float).reshape(-1)
    s = np.sort(sites)
    v = f.value_many(s[:, None])
    second = v[:-2] - 2.0 * v[1:-1] + v[2:]
    return bool(np.all(second > 0.0))


def write_samples_csv(samples: list[LegendreSample], path) -> None:
    """CSV rows: site coordinates, slope coordinates, intercept."""
    if not samples:
        raise ValueError("samples must be nonempty")
    dim = samples[0].t.shape[0]
    with open(path, "w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow([f"t{k + 1}" for k in range(dim)]
                        + [f"p{k + 1}" for k in range(dim)] + ["H"])
        for s in samples:
            writer.writerow([f"{v:.17g}" for v in s.t]
                            + [f"{v:.17g}" for v in s.p] + [f"{s.H:.17g}"])


def write_dual_points_csv(samples: list[LegendreSample], path) -> None:
    """CSV of the dual-space parametric points (p, H) only."""
    if not samples:
        raise ValueError("samples must be nonempty")
    dim = samples[0].p.shape[0]
    with open(path, "w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow([f"p{k + 1}" for k in range(dim)] + ["H"])
        for s in samples:
            writer.writerow([f"{v:.17g}" for v in s.p] + [f"{s.H:.17g}"])
