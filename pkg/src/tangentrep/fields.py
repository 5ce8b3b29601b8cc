"""Scalar fields with gradient oracles, from a catalog or parsed expressions.

Catalog fields carry analytically coded gradients.  Parsed fields get exact
gradients from one forward-mode dual pass per coordinate.  Evaluators and
gradients accept a single point ``(dim,)`` or a batch ``(M, dim)`` and operate
on the last axis.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .autodiff import Dual
from .expr import FieldExpr, eval_tree, parse
from .geometry import ConvexDomain, DimensionMismatchError, in_triangle

# Vertices of the three-triangle test domain; the middle triangle carries the
# only non-zero piece of the piecewise catalog field.
TRIANGLE_LEFT = np.array([(-1.0, 0.0), (-1.0, 1.0), (0.0, 0.0)])
TRIANGLE_MIDDLE = np.array([(0.0, 0.0), (1.0, 1.0), (1.0, 0.0)])
TRIANGLE_BOTTOM = np.array([(-1.0, 0.0), (1.0, 0.0), (0.0, -1.0)])

PIECEWISE_TIE_TOL = 1e-12


@dataclass(frozen=True)
class ScalarField:
    """Real-valued function on R^dim together with its gradient oracle."""

    dim: int
    evaluator: Callable
    gradient: Callable
    smoothness_note: str = ""
    name: str = ""
    domain: ConvexDomain | None = None
    convexity: str = ""  # "strictly_convex" | "strictly_concave" | "affine" | ""

    def _point(self, x) -> np.ndarray:
        p = np.asarray(x, dtype=float)
        if p.ndim == 0 and self.dim == 1:
            p = p[None]
        if p.shape != (self.dim,):
            raise DimensionMismatchError(
                f"expected a point of dimension {self.dim}, got shape {p.shape}"
            )
        return p

    def value(self, x) -> float:
        return float(self.evaluator(self._point(x)))

    def grad(self, x) -> np.ndarray:
        g = np.asarray(self.gradient(self._point(x)), dtype=float)
        return g.reshape(self.dim)

    def value_many(self, X) -> np.ndarray:
        X = np.asarray(X, dtype=float)
        v = np.asarray(self.evaluator(X), dtype=float)
        return np.broadcast_to(v, X.shape[:-1]).copy() if v.shape != X.shape[:-1] else v

    def grad_many(self, X) -> np.ndarray:
        X = np.asarray(X, dtype=float)
        return np.asarray(self.gradient(X), dtype=float)


def eval_with_gradient(field: ScalarField, x) -> tuple[float, np.ndarray]:
    """Evaluate value and gradient at one point."""
    return field.value(x), field.grad(x)


def from_expr(expr: FieldExpr, name: str = "", smoothness_note: str = "",
              domain: ConvexDomain | None = None) -> ScalarField:
    """Wrap an expression tree as a ScalarField with dual-number gradients."""

    def evaluator(X):
        coords = [X[..., i] for i in range(expr.dim)]
        return eval_tree(expr.root, coords)

    def gradient(X):
        cols = []
        for k in range(expr.dim):
            coords = [
                Dual(X[..., i], 1.0 if i == k else 0.0) for i in range(expr.dim)
            ]
            out = eval_tree(expr.root, coords)
            dot = out.dot if isinstance(out, Dual) else np.zeros_like(X[..., k])
            cols.append(np.broadcast_to(np.asarray(dot, dtype=float), np.shape(X[..., k])))
        return np.stack(cols, axis=-1)

    return ScalarField(
        dim=expr.dim,
        evaluator=evaluator,
        gradient=gradient,
        smoothness_note=smoothness_note or "smooth wherever every primitive is",
        name=name,
        domain=domain,
    )


def parse_field(text: str, dim: int, name: str = "",
                domain: ConvexDomain | None = None) -> ScalarField:
    """Parse an expression and wrap it as a ScalarField."""
    return from_expr(parse(text, dim), name=name or text, domain=domain)


# ---------------------------------------------------------------------------
# Catalog


def _triangle_piece_mask(X):
    return in_triangle(TRIANGLE_MIDDLE, X, tol=PIECEWISE_TIE_TOL)


def _catalog_entries():
    tau = 2.0 * math.pi

    def simple(name, dim, ev, gr, domain, note, convexity=""):
        return ScalarField(dim=dim, evaluator=ev, gradient=gr, smoothness_note=note,
                           name=name, domain=domain, convexity=convexity)

    def quadratic_bowl():
        return simple(
            "quadratic_bowl", 2,
            lambda X: X[..., 0] ** 2 + X[..., 1] ** 2,
            lambda X: np.stack([2.0 * X[..., 0], 2.0 * X[..., 1]], axis=-1),
            ConvexDomain.box([-1.0, -1.0], [1.0, 1.0]),
            "polynomial, C^inf", convexity="strictly_convex")

    def negative_bowl():
        return simple(
            "negative_bowl", 2,
            lambda X: -(X[..., 0] ** 2) - X[..., 1] ** 2,
            lambda X: np.stack([-2.0 * X[..., 0], -2.0 * X[..., 1]], axis=-1),
            ConvexDomain.box([-1.0, -1.0], [1.0, 1.0]),
            "polynomial, C^inf", convexity="strictly_concave")

    def saddle():
        return simple(
            "saddle", 2,
            lambda X: X[..., 0] ** 2 - X[..., 1] ** 2,
            lambda X: np.stack([2.0 * X[..., 0], -2.0 * X[..., 1]], axis=-1),
            ConvexDomain.box([-1.0, -1.0], [1.0, 1.0]),
            "polynomial, C^inf")

    def sine_1d():
        return simple(
            "sine_1d", 1,
            lambda X: np.sin(X[..., 0]),
            lambda X: np.cos(X[..., 0])[..., None],
            ConvexDomain.box([0.0], [tau]),
            "entire, C^inf")

    def exp_1d():
        return simple(
            "exp_1d", 1,
            lambda X: np.exp(X[..., 0]),
            lambda X: np.exp(X[..., 0])[..., None],
            ConvexDomain.box([0.0], [1.0]),
            "entire, C^inf", convexity="strictly_convex")

    def affine():
        return simple(
            "affine", 2,
            lambda X: 0.75 * X[..., 0] - 0.5 * X[..., 1] + 0.25,
            lambda X: np.broadcast_to(
                np.array([0.75, -0.5]), np.shape(X[..., 0]) + (2,)
            ).copy(),
            ConvexDomain.box([0.0, 0.0], [1.0, 1.0]),
            "affine, C^inf", convexity="affine")

    def half_square_1d():
        return simple(
            "half_square_1d", 1,
            lambda X: 0.5 * X[..., 0] ** 2,
            lambda X: X[..., 0][..., None],
            ConvexDomain.box([-2.0], [2.0]),
            "polynomial, C^inf", convexity="strictly_convex")

    def peanut_phi():
        def ev(X):
            a = (X[..., 0] - 0.7) ** 2 + X[..., 1] ** 2
            b = (X[..., 0] + 0.7) ** 2 + X[..., 1] ** 2
            return a * b - 0.8

        def gr(X):
            a = (X[..., 0] - 0.7) ** 2 + X[..., 1] ** 2
            b = (X[..., 0] + 0.7) ** 2 + X[..., 1] ** 2
            return np.stack(
                [2.0 * (X[..., 0] - 0.7) * b + 2.0 * (X[..., 0] + 0.7) * a,
                 2.0 * X[..., 1] * (a + b)],
                axis=-1)

        # level-set function for the two-lobe test region; that region is not
        # convex, so no convex domain is attached here
        return simple("peanut_phi", 2, ev, gr, None,
                      "polynomial, C^inf; mixed curvature")

    def triangle_counterexample_f():
        def ev(X):
            on = _triangle_piece_mask(X)
            return np.where(on, np.asarray(X[..., 1]) ** 2, 0.0)

        def gr(X):
            on = _triangle_piece_mask(X)
            g2 = np.where(on, 2.0 * np.asarray(X[..., 1]), 0.0)
            return np.stack([np.zeros_like(g2), g2], axis=-1)

        return simple(
            "triangle_counterexample_f", 2, ev, gr, None,
            "C^1 on the three-triangle domain; discontinuous outside it")

    return {
        fn.__name__: fn
        for fn in (quadratic_bowl, negative_bowl, saddle, sine_1d, exp_1d,
                   affine, half_square_1d, peanut_phi, triangle_counterexample_f)
    }


_CATALOG = _catalog_entries()

CATALOG_NAMES = tuple(sorted(_CATALOG))

# catalog fields paired with a convex domain (the representation test corpus)
CONVEX_DOMAIN_CATALOG = tuple(
    name for name in CATALOG_NAMES if _CATALOG[name]().domain is not None
)


def catalog(name: str) -> ScalarField:
    """Return a catalog field by name."""
    try:
        builder = _CATALOG[name]
    except KeyError:
        raise KeyError(
            f"unknown catalog field {name!r}; known: {', '.join(CATALOG_NAMES)}"
        ) from None
    return builder()
