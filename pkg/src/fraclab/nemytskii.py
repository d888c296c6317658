"""Pointwise composition operators |u|, u+, u- and the sign-set machinery.

The operators act nodewise on sampled functions; output gradients are
assigned from the distributional formulas (sgn(u) grad u for |u|, the
positive/negative-set indicators for u+/u-), never re-differenced across
the kink.  Nodes with u exactly 0 are excluded from {u > 0} and carry a
zero assigned gradient.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import List, Optional

import numpy as np

from .domains import Grid1D, SampledFunction, VectorField
from .errors import InputError, ParameterError

__all__ = [
    "OPERATORS",
    "apply",
    "gradient_indicator",
    "sign_decompose",
    "SignDecomposition",
    "SignInterval",
]

OPERATORS = ("T1", "T2", "T3")


def apply(op: str, u: SampledFunction) -> SampledFunction:
    """Apply T1 = |u|, T2 = max(u, 0) or T3 = max(-u, 0) nodewise.

    When u carries a gradient the result carries the assigned gradient
    field sgn(u)*grad u, 1_{u>0}*grad u or -1_{u<0}*grad u respectively.
    """
    if op not in OPERATORS:
        raise ParameterError(f"operator must be one of {OPERATORS}, got '{op}'")
    v = u.values
    if op == "T1":
        out = np.abs(v)
        weight = np.sign(v)
    elif op == "T2":
        out = np.maximum(v, 0.0)
        weight = (v > 0.0).astype(float)
    else:
        out = np.maximum(-v, 0.0)
        weight = -(v < 0.0).astype(float)
    grad = None
    if u.gradient is not None:
        grad = u.gradient * weight[:, None]
    return SampledFunction(u.grid, out, grad)


def gradient_indicator(u: SampledFunction) -> VectorField:
    """The field grad(u) * 1_{u > 0} on the same grid."""
    if u.gradient is None:
        raise InputError("gradient_indicator needs a gradient on the sample")
    ind = (u.values > 0.0).astype(float)
    return VectorField(u.grid, u.gradient * ind[:, None])


INTERIOR = "interior"
TOUCHES_LEFT = "touches-left-boundary"
TOUCHES_RIGHT = "touches-right-boundary"
WHOLE_DOMAIN = "whole-domain"


@dataclass(frozen=True)
class SignInterval:
    a: float
    b: float
    kind: str

    def to_dict(self):
        return {"a": self.a, "b": self.b, "class": self.kind}


@dataclass(frozen=True)
class SignDecomposition:
    """Maximal intervals of {u > 0} at grid resolution, endpoints refined
    by linear interpolation between the bracketing nodes."""

    intervals: tuple

    def __len__(self):
        return len(self.intervals)

    def __iter__(self):
        return iter(self.intervals)

    def to_json(self):
        return [iv.to_dict() for iv in self.intervals]


def _cross(x0, u0, x1, u1) -> float:
    # linear interpolation of the zero between two nodes of opposite sign
    if u1 == u0:
        return 0.5 * (x0 + x1)
    return x0 + u0 * (x1 - x0) / (u0 - u1)


def sign_decompose(u: SampledFunction) -> SignDecomposition:
    """Decompose {u > 0} into maximal runs of positive nodes.

    Runs touching the first/last node are classified as boundary
    intervals with the exact domain endpoint; interior runs get
    interpolated zero crossings on both sides.  An empty decomposition is
    returned when u <= 0 everywhere.
    """
    grid = u.grid
    if not isinstance(grid, Grid1D):
        raise InputError("sign decomposition is defined on 1D grids")
    v = u.values
    x = grid.nodes
    pos = v > 0.0
    if pos.all():
        return SignDecomposition(
            (SignInterval(grid.interval.a, grid.interval.b, WHOLE_DOMAIN),))
    intervals: List[SignInterval] = []
    n = len(v)
    i = 0
    while i < n:
        if not pos[i]:
            i += 1
            continue
        j = i
        while j + 1 < n and pos[j + 1]:
            j += 1
        left_touch = i == 0
        right_touch = j == n - 1
        a = grid.interval.a if left_touch else _cross(x[i - 1], v[i - 1], x[i], v[i])
        b = grid.interval.b if right_touch else _cross(x[j], v[j], x[j + 1], v[j + 1])
        if left_touch and right_touch:
            kind = WHOLE_DOMAIN
        elif left_touch:
            kind = TOUCHES_LEFT
        elif right_touch:
            kind = TOUCHES_RIGHT
        else:
            kind = INTERIOR
        intervals.append(SignInterval(a, b, kind))
        i = j + 1
    return SignDecomposition(tuple(intervals))
