"""Concave value functions and the scalar root finders used by the planner and designer."""

from __future__ import annotations

import math
from abc import ABC, abstractmethod
from typing import Callable

import numpy as np

DEFAULT_TOL = 1e-10
MAX_ITER = 200


class SolverError(ArithmeticError):
    """A bracketed root search could not be carried out."""


class ValueFunction(ABC):
    """Concave, strictly increasing valuation of money with v(0) = 0 and v(z)/z -> 0."""

    @abstractmethod
    def eval(self, z: float) -> float: ...

    @abstractmethod
    def inverse(self, y: float) -> float: ...

    @abstractmethod
    def derivative(self, z: float) -> float: ...

    @abstractmethod
    def derivative_inverse(self, w: float) -> float:
        """Return z with v'(z) = w."""

    @property
    @abstractmethod
    def derivative_at_zero(self) -> float: ...

    def __call__(self, z):
        return self.eval(z)

    def ratio_inverse(self, target: float) -> float | None:
        """Closed-form solution of v(z)/z = target, or None when the family has none."""
        return None

    def eval_array(self, z):
        return np.vectorize(self.eval, otypes=[float])(z)

    def inverse_array(self, y):
        return np.vectorize(self.inverse, otypes=[float])(y)


class PowerValue(ValueFunction):
    """v(z) = beta * z**alpha with 0 < alpha < 1 and beta > 0."""

    def __init__(self, alpha: float = 0.5, beta: float = 1.0):
        alpha = float(alpha)
        beta = float(beta)
        if not (0.0 < alpha < 1.0) or not math.isfinite(alpha):
            raise ValueError(f"alpha must lie in (0, 1), got {alpha}")
        if not (beta > 0.0) or not math.isfinite(beta):
            raise ValueError(f"beta must be positive, got {beta}")
        self.alpha = alpha
        self.beta = beta

    def __repr__(self):
        return f"PowerValue(alpha={self.alpha!r}, beta={self.beta!r})"

    def __eq__(self, other):
        return isinstance(other, PowerValue) and (self.alpha, self.beta) == (other.alpha, other.beta)

    def __hash__(self):
        return hash(("power", self.alpha, self.beta))

    def eval(self, z):
        if z < 0:
            raise ValueError(f"v is defined on nonnegative reals, got {z}")
        return self.beta * z**self.alpha

    def inverse(self, y):
        if y < 0:
            raise ValueError(f"v^-1 is defined on nonnegative reals, got {y}")
        return (y / self.beta) ** (1.0 / self.alpha)

    def derivative(self, z):
        if z < 0:
            raise ValueError(f"v' is defined on nonnegative reals, got {z}")
        if z == 0:
            return math.inf
        return self.alpha * self.beta * z ** (self.alpha - 1.0)

    def derivative_inverse(self, w):
        if w <= 0:
            raise ValueError(f"v' takes only positive values, got {w}")
        if math.isinf(w):
            return 0.0
        return (w / (self.alpha * self.beta)) ** (1.0 / (self.alpha - 1.0))

    @property
    def derivative_at_zero(self):
        return math.inf

    def ratio_inverse(self, target):
        return (self.beta / target) ** (1.0 / (1.0 - self.alpha))

    def eval_array(self, z):
        return self.beta * np.asarray(z, dtype=float) ** self.alpha

    def inverse_array(self, y):
        return (np.asarray(y, dtype=float) / self.beta) ** (1.0 / self.alpha)


def solve_increasing(f: Callable[[float], float], lo: float, hi: float, tol: float = DEFAULT_TOL,
                     max_iter: int = MAX_ITER) -> float:
    """Bisection on a monotone function with a sign change on [lo, hi].

    Iterates to machine resolution (at most ``max_iter`` halvings), which
    also meets the ``tol * (1 + |x|)`` width criterion. Infinite values at the
    endpoints are accepted as sign information only; NaN anywhere is an error.
    """
    if lo > hi:
        raise SolverError(f"empty bracket [{lo}, {hi}]")
    f_lo = f(lo)
    f_hi = f(hi)
    if math.isnan(f_lo) or math.isnan(f_hi):
        raise SolverError("non-finite evaluation at bracket endpoint")
    if abs(f_lo) <= tol and abs(f_hi) <= tol:
        return lo if abs(f_lo) <= abs(f_hi) else hi
    if abs(f_lo) <= tol:
        return lo
    if abs(f_hi) <= tol:
        return hi
    if (f_lo > 0) == (f_hi > 0):
        raise SolverError(f"no sign change on [{lo}, {hi}]: f={f_lo}, {f_hi}")
    rising = f_hi > 0
    for _ in range(max_iter):
        mid = lo + 0.5 * (hi - lo)
        if mid <= lo or mid >= hi:
            break
        f_mid = f(mid)
        if not math.isfinite(f_mid):
            raise SolverError(f"non-finite evaluation at x={mid}")
        if f_mid == 0.0:
            return mid
        if (f_mid > 0) == rising:
            hi = mid
        else:
            lo = mid
    return lo + 0.5 * (hi - lo)


def solve_v_ratio(v: ValueFunction, target: float, tol: float = DEFAULT_TOL,
                  closed_form: bool = True) -> float:
    """Unique z > 0 with v(z)/z = target.

    v(z)/z decreases strictly from v'(0+) to 0, so a solution exists iff
    0 < target < v'(0+).
    """
    if not target > 0:
        raise SolverError(f"target must be positive, got {target}")
    if target >= v.derivative_at_zero:
        raise SolverError(f"target {target} is not below v'(0+) = {v.derivative_at_zero}")
    if closed_form:
        z = v.ratio_inverse(target)
        if z is not None:
            return z

    def h(z):
        return 1.0 - v.eval(z) / (z * target)  # increasing in z, relative residual

    # walk from z = 1 by factors of two until the sign flips
    lo = hi = 1.0
    if h(1.0) < 0:
        while h(hi) < 0:
            lo, hi = hi, hi * 2.0
            if math.isinf(hi):
                raise SolverError("could not bracket v(z)/z = target from above")
    else:
        while h(lo) > 0:
            lo, hi = lo * 0.5, lo
            if lo == 0.0:
                raise SolverError("could not bracket v(z)/z = target from below")
    # the bracket spans a factor of two; bisecting it out costs about 53 steps
    return solve_increasing(h, lo, hi, min(tol, 1e-15))


def solve_tangent_np(v: ValueFunction, r: float, c: float, tol: float = DEFAULT_TOL) -> float:
    """Principal utility maximising x * (v(r - x) - c) on the frontier.

    Solves v(r - x) - x v'(r - x) = c. The left side decreases on [0, r],
    equals v(r) >= c at 0 and -x v'(v^-1(c)) <= 0 at x = r - v^-1(c).
    """
    if c < 0 or r < 0:
        raise SolverError("reward and cost must be nonnegative")
    if v.eval(r) < c - tol:
        raise SolverError(f"r - v^-1(c) < 0 for r={r}, c={c}")
    hi = r - v.inverse(c)
    if hi <= 0:
        return 0.0

    def g(x):
        z = r - x
        if z <= 0:
            return math.inf
        return c - v.eval(z) + x * v.derivative(z)

    return solve_increasing(g, 0.0, hi, tol)


def solve_equal_split(v: ValueFunction, r: float, c: float, tol: float = DEFAULT_TOL) -> float:
    """Unique x >= 0 with x = v(r - x) - c."""
    if v.eval(r) - c < -tol:
        raise SolverError(f"v(r) - c < 0 for r={r}, c={c}")
    return solve_increasing(lambda x: x - v.eval(r - x) + c, 0.0, r, tol)
