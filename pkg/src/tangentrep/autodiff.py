"""First-order forward-mode automatic differentiation on dual numbers.

A :class:`Dual` carries a value and the derivative of that value along one
input direction.  Payloads may be plain floats or numpy arrays, so one dual
pass can differentiate a whole batch of points at once.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


class EvaluationDomainError(ArithmeticError):
    """An evaluation left the smooth domain of a primitive (log(-1), 1/0, ...)."""


def _check(cond, message: str) -> None:
    if not cond:
        raise EvaluationDomainError(message)


@dataclass(frozen=True)
class Dual:
    """Number of the form value + derivative * eps with eps^2 = 0."""

    val: object  # float or ndarray
    dot: object

    def __add__(self, other):
        if isinstance(other, Dual):
            return Dual(self.val + other.val, self.dot + other.dot)
        return Dual(self.val + other, self.dot)

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, Dual):
            return Dual(self.val - other.val, self.dot - other.dot)
        return Dual(self.val - other, self.dot)

    def __rsub__(self, other):
        return Dual(other - self.val, -self.dot)

    def __mul__(self, other):
        if isinstance(other, Dual):
            return Dual(self.val * other.val, self.val * other.dot + self.dot * other.val)
        return Dual(self.val * other, self.dot * other)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, Dual):
            _check(np.all(other.val != 0.0), "division by zero")
            return Dual(
                self.val / other.val,
                (self.dot * other.val - self.val * other.dot) / (other.val * other.val),
            )
        _check(np.all(np.asarray(other) != 0.0), "division by zero")
        return Dual(self.val / other, self.dot / other)

    def __rtruediv__(self, other):
        _check(np.all(self.val != 0.0), "division by zero")
        return Dual(other / self.val, -other * self.dot / (self.val * self.val))

    def __neg__(self):
        return Dual(-self.val, -self.dot)

    def __pow__(self, n: int):
        return powi(self, n)


def value_of(x):
    return x.val if isinstdual(x) else x


def isinstdual(x) -> bool:
    return isinstance(x, Dual)


def powi(x, n: int):
    """Integer power, differentiable everywhere except 0 for negative n."""
    if isinstdual(x):
        if n == 0:
            return Dual(np.ones_like(x.val * 1.0), np.zeros_like(x.val * 1.0))
        if n < 0:
            _check(np.all(x.val != 0.0), "zero raised to a negative power")
        return Dual(x.val ** n, n * x.val ** (n - 1) * x.dot)
    if n < 0:
        _check(np.all(np.asarray(x) != 0.0), "zero raised to a negative power")
    return np.asarray(x) ** n if isinstance(x, np.ndarray) else x ** n


def _lift(fn, dfn, domain=None, domain_msg=""):
    def apply(x):
        if isinstdual(x):
            if domain is not None:
                _check(np.all(domain(x.val)), domain_msg)
            return Dual(fn(x.val), dfn(x.val) * x.dot)
        if domain is not None:
            _check(np.all(domain(x)), domain_msg)
        return fn(x)

    return apply


def _sqrt_value(x):
    _check(np.all(np.asarray(x) >= 0.0), "sqrt of a negative number")
    return np.sqrt(x)


def _sqrt(x):
    # the derivative 1/(2 sqrt) needs a strictly positive argument
    if isinstdual(x):
        _check(np.all(x.val > 0.0), "sqrt not differentiable at or below 0")
        r = np.sqrt(x.val)
        return Dual(r, 0.5 / r * x.dot)
    return _sqrt_value(x)


SMOOTH_FUNCTIONS = {
    "sin": _lift(np.sin, np.cos),
    "cos": _lift(np.cos, lambda v: -np.sin(v)),
    "exp": _lift(np.exp, np.exp),
    "log": _lift(np.log, lambda v: 1.0 / v, domain=lambda v: v > 0.0,
                 domain_msg="log of a non-positive number"),
    "sqrt": _sqrt,
}
