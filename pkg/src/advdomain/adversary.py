"""Inner maximization/minimization over the l-infinity ball.

Closed forms for the linear and shifted-square problems, an exact edge
enumeration for products of two affine functions, a certified lower bound,
and a brute-force grid used to cross-check all of them.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Callable, Union

import numpy as np

from .errors import ValidationError
from .linalg import p_norm, sign_vector


@dataclass(frozen=True)
class AdversaryBudget:
    epsilon: float

    def __post_init__(self):
        e = float(self.epsilon)
        if not (e >= 0.0 and math.isfinite(e)):
            raise ValidationError(f"adversary budget must be a finite value >= 0, got {self.epsilon}")
        object.__setattr__(self, "epsilon", e)


BudgetLike = Union[AdversaryBudget, float, int]


def _eps(eps: BudgetLike) -> float:
    return eps.epsilon if isinstance(eps, AdversaryBudget) else AdversaryBudget(eps).epsilon


@dataclass
class InnerSolution:
    optimum: float
    argpoint: np.ndarray
    attained: bool = True


def _vec(z) -> np.ndarray:
    z = np.asarray(z, dtype=float).ravel()
    if z.size == 0:
        raise ValidationError("empty vector")
    return z


def max_dot_over_box(z, eps: BudgetLike) -> InnerSolution:
    z, e = _vec(z), _eps(eps)
    return InnerSolution(e * p_norm(z, 1), e * sign_vector(z))


def min_dot_over_box(z, eps: BudgetLike) -> InnerSolution:
    z, e = _vec(z), _eps(eps)
    return InnerSolution(-e * p_norm(z, 1), -e * sign_vector(z))


def max_shifted_square(w, a: float, eps: BudgetLike) -> InnerSolution:
    """max over the box of (w^T delta + a)^2; at a = 0 the corner follows sign(a) = +1."""
    w, e, a = _vec(w), _eps(eps), float(a)
    sa = 1.0 if a >= 0 else -1.0
    opt = (e * p_norm(w, 1) + abs(a)) ** 2
    return InnerSolution(opt, e * sa * sign_vector(w))


def min_shifted_square(w, a: float, eps: BudgetLike) -> InnerSolution:
    """min over the box of (w^T delta + a)^2."""
    w, e, a = _vec(w), _eps(eps), float(a)
    l1 = p_norm(w, 1)
    if a == 0.0 or l1 == 0.0 or e == 0.0:
        return InnerSolution(a * a, np.zeros_like(w))
    step = min(1.0 / l1, e / abs(a))
    # |a| * (eps / |a|) can round one ulp past eps
    delta = np.clip(-a * sign_vector(w) * step, -e, e)
    return InnerSolution(max(abs(a) - e * l1, 0.0) ** 2, delta)


def grid_axis(eps: float, points: int) -> np.ndarray:
    # integer numerators keep the centre at exactly 0 and the ends at exactly +-eps
    k = np.arange(points)
    return eps * (2 * k - (points - 1)) / (points - 1)


def grid_values(objective: Callable, d: int, eps: BudgetLike, points_per_axis: int = 201) -> np.ndarray:
    """Objective on the full uniform grid over [-eps, eps]^d.

    The objective is called once with d broadcastable coordinate arrays (an
    open mesh, as from np.ogrid) and must return values broadcastable to the
    grid shape.
    """
    if not 1 <= d <= 3:
        raise ValidationError(f"grid oracle supports 1 <= d <= 3, got d={d}")
    if points_per_axis < 3 or points_per_axis % 2 == 0:
        raise ValidationError("points_per_axis must be odd and >= 3")
    axis = grid_axis(_eps(eps), points_per_axis)
    coords = []
    for j in range(d):
        shape = [1] * d
        shape[j] = points_per_axis
        coords.append(axis.reshape(shape))
    vals = np.asarray(objective(*coords), dtype=float)
    return np.broadcast_to(vals, (points_per_axis,) * d)


def grid_point(index: int, d: int, eps: BudgetLike, points_per_axis: int = 201) -> np.ndarray:
    axis = grid_axis(_eps(eps), points_per_axis)
    return axis[list(np.unravel_index(index, (points_per_axis,) * d))]


def grid_oracle(objective: Callable, d: int, eps: BudgetLike, points_per_axis: int = 201,
                sense: str = "min") -> InnerSolution:
    """Best grid point; ties resolve to the lexicographically smallest grid index."""
    vals = grid_values(objective, d, eps, points_per_axis).ravel()
    if sense == "min":
        i = int(np.argmin(vals))
    elif sense == "max":
        i = int(np.argmax(vals))
    else:
        raise ValidationError(f"sense must be 'min' or 'max', got {sense!r}")
    return InnerSolution(float(vals[i]), grid_point(i, d, eps, points_per_axis), attained=False)


def min_product_over_box(u, u2, a, b, eps: float, with_arg: bool = True):
    """Exact min over the box of (a + u^T delta)(b + u2^T delta), batched.

    u, u2 have shape (..., d); a, b broadcast against (...). A local minimum in
    the relative interior of a face of dimension >= 2 needs a PSD Hessian
    u u2^T + u2 u^T, which forces the product to depend on one linear form and
    so to attain the same value on a lower face. The minimum therefore lives
    on an edge, and each edge is a one-dimensional quadratic.
    Returns (values, argpoints); argpoints is None when with_arg is False.
    """
    u = np.asarray(u, dtype=float)
    u2 = np.asarray(u2, dtype=float)
    d = u.shape[-1]
    lead = np.broadcast_shapes(u.shape[:-1], u2.shape[:-1], np.shape(a), np.shape(b))
    u = np.broadcast_to(u, lead + (d,))
    u2 = np.broadcast_to(u2, lead + (d,))
    a = np.broadcast_to(np.asarray(a, dtype=float), lead)
    b = np.broadcast_to(np.asarray(b, dtype=float), lead)
    best = np.full(lead, np.inf)
    arg = np.zeros(lead + (d,))
    for j in range(d):
        others = [i for i in range(d) if i != j]
        for signs in itertools.product((-1.0, 1.0), repeat=d - 1):
            s = np.zeros(d)
            s[others] = eps * np.asarray(signs)
            A = a + u @ s
            B = b + u2 @ s
            uj, vj = u[..., j], u2[..., j]
            curv = uj * vj
            with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
                tstar = np.where(curv > 0, -(A * vj + B * uj) / (2 * curv), -eps)
            tstar = np.clip(tstar, -eps, eps)
            for t in (np.full(lead, -eps), np.full(lead, eps), tstar):
                val = (A + uj * t) * (B + vj * t)
                if not with_arg:
                    best = np.minimum(best, val)
                    continue
                better = val < best
                if np.any(better):
                    best = np.where(better, val, best)
                    cand = np.broadcast_to(s, lead + (d,)).copy()
                    cand[..., j] = t
                    arg = np.where(better[..., None], cand, arg)
    return best, (arg if with_arg else None)


def min_bilinear_over_box(w, w2, x, eps: BudgetLike, mode: str = "exact-small",
                          points_per_axis: int = 201) -> InnerSolution:
    """min over the box of w^T(x+delta) * w2^T(x+delta).

    mode 'exact-small' uses the grid oracle (d <= 3), 'edges' the exact edge
    enumeration, 'lower-bound' the certified bound
    w^T x w2^T x - eps ||(w w2^T + w2 w^T) x||_1 - eps^2 ||w||_1 ||w2||_1.
    """
    w, w2, x, e = _vec(w), _vec(w2), _vec(x), _eps(eps)
    if not (w.size == w2.size == x.size):
        raise ValidationError("w, w2 and x must have the same length")
    a, b = float(w @ x), float(w2 @ x)
    if mode == "exact-small":
        d = x.size
        if d > 3:
            raise ValidationError("exact-small mode needs d <= 3")

        def obj(*c):
            s1 = sum(wi * ci for wi, ci in zip(w, c))
            s2 = sum(vi * ci for vi, ci in zip(w2, c))
            return (a + s1) * (b + s2)

        return grid_oracle(obj, d, e, points_per_axis, sense="min")
    if mode == "edges":
        val, arg = min_product_over_box(w, w2, a, b, e)
        return InnerSolution(float(val), arg)
    if mode == "lower-bound":
        lin = w * b + w2 * a
        bound = a * b - e * p_norm(lin, 1) - e * e * p_norm(w, 1) * p_norm(w2, 1)
        return InnerSolution(bound, -e * sign_vector(lin), attained=False)
    raise ValidationError(f"unknown mode {mode!r}")
