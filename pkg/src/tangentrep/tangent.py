"""Tangent planes: the affine function touching a field's graph at one site."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .fields import ScalarField
from .geometry import DimensionMismatchError, as_point


@dataclass(frozen=True, eq=False)
class TangentPlane:
    """Affine function x -> <grad, x - site> + value, tangent at ``site``."""

    site: np.ndarray
    grad: np.ndarray
    value: float

    @property
    def dim(self) -> int:
        return self.site.shape[0]

    def intercept(self) -> float:
        """c such that the plane is x -> c + <grad, x>."""
        return self.value - float(self.grad @ self.site)

    def to_json_dict(self) -> dict:
        return {"t": list(self.site), "grad": list(self.grad), "f_t": self.value}

    @classmethod
    def from_json_dict(cls, d: dict) -> "TangentPlane":
        return cls(site=np.asarray(d["t"], dtype=float),
                   grad=np.asarray(d["grad"], dtype=float),
                   value=float(d["f_t"]))


def tangent_plane(f: ScalarField, t) -> TangentPlane:
    """Tangent plane of f at site t."""
    t = as_point(t, f.dim)
    return TangentPlane(site=t, grad=f.grad(t), value=f.value(t))


def tangent_planes(f: ScalarField, sites) -> tuple[np.ndarray, np.ndarray]:
    """Batch tangent-plane data: (values, gradients) for an (M, dim) site array."""
    sites = np.asarray(sites, dtype=float)
    if sites.ndim != 2 or sites.shape[1] != f.dim:
        raise DimensionMismatchError(
            f"expected sites of shape (M, {f.dim}), got {sites.shape}"
        )
    return f.value_many(sites), f.grad_many(sites)


def plane_eval(plane: TangentPlane, x) -> float:
    """Evaluate the plane at x: <grad, x - site> + value."""
    x = as_point(x, plane.dim)
    return float(plane.grad @ (x - plane.site) + plane.value)


def plane_eval_many(plane: TangentPlane, X) -> np.ndarray:
    """Evaluate the plane at every row of an (M, dim) array."""
    X = np.asarray(X, dtype=float)
    if X.shape[-1] != plane.dim:
        raise DimensionMismatchError(
            f"points have dimension {X.shape[-1]}, plane {plane.dim}"
        )
    return (X - plane.site) @ plane.grad + plane.value
