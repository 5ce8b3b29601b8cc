"""Constructive solvers on the unit segment.

``pivot_parameter`` finds a parameter L in [0, 1] where the tangent line of a
differentiable h lies at or below h(0) at 0 and at or above h(1) at 1:

    h'(L)(0 - L) + h(L) <= h(0)   and   h'(L)(1 - L) + h(L) >= h(1).

``pivot_site`` transports this along a segment [a, b] of a field's domain to a
site c whose tangent plane is below the field at a and above it at b.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .fields import ScalarField
from .geometry import as_point

INEQUALITY_SLACK = 1e-8
DEFAULT_SCAN_CELLS = 4096
SCAN_REFINEMENTS = 2


class NoRootFoundError(ArithmeticError):
    """The chord-gap scan exhausted every refinement without a usable root."""

    def __init__(self, message: str, diagnostics: dict | None = None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}


@dataclass(frozen=True)
class SegmentFunction:
    """Differentiable function on [0, 1] with an explicit derivative oracle."""

    value: Callable[[float], float]
    derivative: Callable[[float], float]

    @classmethod
    def from_field_segment(cls, f: ScalarField, a, b) -> "SegmentFunction":
        a = as_point(a, f.dim)
        b = as_point(b, f.dim)
        step = b - a

        def value(lam: float) -> float:
            return f.value((1.0 - lam) * a + lam * b)

        def derivative(lam: float) -> float:
            return float(f.grad((1.0 - lam) * a + lam * b) @ step)

        return cls(value=value, derivative=derivative)


@dataclass
class PivotTrace:
    """Record of one pivot_parameter run (chord slope, scan nodes, residuals)."""

    chord_slope: float
    branch: str  # "left_endpoint" | "right_endpoint" | "interior"
    scan_cells: int
    scan_nodes: np.ndarray = field(default_factory=lambda: np.empty((0, 2)))
    bisection_steps: int = 0
    pivot: float = 0.0
    chord_gap_at_pivot: float = 0.0
    residual_left: float = 0.0  # h'(L)(-L) + h(L) - h(0), must be <= slack
    residual_right: float = 0.0  # h'(L)(1-L) + h(L) - h(1), must be >= -slack

    def write_csv(self, path) -> None:
        with open(path, "w", newline="") as handle:
            writer = csv.writer(handle)
            writer.writerow(["lambda", "chord_gap"])
            for lam, gap in self.scan_nodes:
                writer.writerow([f"{lam:.17g}", f"{gap:.17g}"])


def _inequality_residuals(h: SegmentFunction, lam: float) -> tuple[float, float]:
    hv = h.value(lam)
    hd = h.derivative(lam)
    return (hd * (-lam) + hv - h.value(0.0), hd * (1.0 - lam) + hv - h.value(1.0))


def pivot_parameter(
    h: SegmentFunction,
    tol: float = 1e-12,
    cells: int = DEFAULT_SCAN_CELLS,
    slack: float = INEQUALITY_SLACK,
) -> tuple[float, PivotTrace]:
    """Find L in [0, 1] satisfying both tangent-line inequalities.

    Endpoint branches are decided by exact comparisons (ties go to the
    endpoint).  Otherwise the chord gap  H(L) = h(L) - m*L - h(0)  with
    m = h(1) - h(0) starts negative and ends at 0; the scan locates its first
    sign change from negative and bisects to |H| <= tol.  A root where the
    inequalities fail (descending tangential zero) is stepped past by one grid
    cell; an exhausted scan is retried with a 4x finer grid.
    """
    h0 = h.value(0.0)
    h1 = h.value(1.0)
    m = h1 - h0

    if h.derivative(0.0) >= m:
        lam = 0.0
        trace = PivotTrace(chord_slope=m, branch="left_endpoint", scan_cells=0)
    elif h.derivative(1.0) >= m:
        lam = 1.0
        trace = PivotTrace(chord_slope=m, branch="right_endpoint", scan_cells=0)
    else:
        lam, trace = _interior_pivot(h, h0, m, tol, cells, slack)
    trace.pivot = lam
    trace.chord_gap_at_pivot = h.value(lam) - m * lam - h0
    trace.residual_left, trace.residual_right = _inequality_residuals(h, lam)
    return lam, trace


def _interior_pivot(h, h0, m, tol, cells, slack):
    def chord_gap(lam: float) -> float:
        return h.value(lam) - m * lam - h0

    n = cells
    for _ in range(SCAN_REFINEMENTS + 1):
        nodes = np.linspace(0.0, 1.0, n + 1)
        gaps = np.array([chord_gap(lam) for lam in nodes])
        trace = PivotTrace(chord_slope=m, branch="interior", scan_cells=n,
                           scan_nodes=np.column_stack([nodes, gaps]))
        start = 0
        while True:
            change = np.nonzero((gaps[start:-1] < 0.0) & (gaps[start + 1:] >= 0.0))[0]
            if change.size == 0:
                break
            i = start + int(change[0])
            lo, hi = nodes[i], nodes[i + 1]
            mid = hi
            steps = 0
            for _ in range(200):
                mid = 0.5 * (lo + hi)
                gap_mid = chord_gap(mid)
                steps += 1
                if abs(gap_mid) <= tol or hi - lo <= np.finfo(float).eps:
                    break
                if gap_mid >= 0.0:
                    hi = mid
                else:
                    lo = mid
            trace.bisection_steps += steps
            left, right = _inequality_residuals(h, mid)
            if left <= slack and right >= -slack:
                return mid, trace
            start = i + 1  # degenerate descending zero: step past and rescan
        n *= 4
    raise NoRootFoundError(
        "no admissible chord-gap root found",
        diagnostics={"cells": n // 4, "chord_slope": m,
                     "gap_min": float(gaps.min()), "gap_max": float(gaps.max())},
    )


def pivot_site(f: ScalarField, a, b, tol: float = 1e-12) -> np.ndarray:
    """Site c on the segment [a, b] whose tangent plane is below f at a and
    above f at b (within the standard slack)."""
    a = as_point(a, f.dim)
    b = as_point(b, f.dim)
    h = SegmentFunction.from_field_segment(f, a, b)
    lam, _ = pivot_parameter(h, tol=tol)
    return (1.0 - lam) * a + lam * b
