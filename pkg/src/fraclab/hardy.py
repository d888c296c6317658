"""Hardy-type inequality machinery on the half line and on intervals.

Everything here reports *empirical* constants: the inequalities under
test hold with unspecified constants, so each check computes both sides
by quadrature and records the best constant the data supports, asserting
only positivity and refinement stability.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import List, Optional, Sequence

import numpy as np
from scipy.integrate import quad

from .domains import (
    FunctionSpec,
    Grid1D,
    Interval,
    SampledFunction,
    distances_to_complement,
    sample,
)
from .errors import InputError, ParameterError, ResolutionError
from .norms import gagliardo_sq, l2_norm_sq

__all__ = [
    "WeightFunction",
    "InequalityReport",
    "f_kernel",
    "f_kernel_sup",
    "DEFAULT_K_GRID",
    "pointwise_weight_inequality_check",
    "hardy_halfline_check",
    "interval_hardy_check",
    "mean_square_difference_identity",
    "counterexample_scaling",
    "ScalingRow",
    "ScalingTable",
]


def _check_alpha_delta(alpha: float, delta: float):
    if not (0.0 < alpha < 1.0):
        raise ParameterError(f"alpha must lie in (0, 1), got {alpha}")
    if not (0.0 < delta < 1.0 - alpha):
        raise ParameterError(
            f"delta must lie in (0, 1 - alpha) = (0, {1 - alpha:g}), got {delta}")


@dataclass(frozen=True)
class WeightFunction:
    """Super-harmonic trial weight w(x) = x^(-delta) on (0, inf)."""

    delta: float
    alpha: float

    def __post_init__(self):
        _check_alpha_delta(self.alpha, self.delta)

    def __call__(self, x):
        return np.asarray(x, dtype=float) ** (-self.delta)


@dataclass
class InequalityReport:
    lhs: float
    rhs: float
    empirical_constant: float
    resolution: int
    verdict: bool
    family_id: str = ""
    extras: dict = field(default_factory=dict)

    def to_dict(self):
        d = {
            "lhs": self.lhs,
            "rhs": self.rhs,
            "empirical_constant": self.empirical_constant,
            "resolution": self.resolution,
            "verdict": "pass" if self.verdict else "fail",
            "family_id": self.family_id,
        }
        d.update(self.extras)
        return d


# --------------------------------------------------------------------------
# the kernel bound F(k)
# --------------------------------------------------------------------------

def f_kernel(k: float, alpha: float, delta: float) -> float:
    """F(k) = int_0^inf (1 - y^(-delta)) / (k + |1-y|^2)^((1+alpha)/2) dy.

    At k = 0 the integrable singularity at y = 1 is handled through the
    reduced form obtained by folding (1, inf) onto (0, 1) with y -> 1/y:
    int_0^1 (1 - y^(-delta)) (1 - y^(alpha+delta-1)) / |1-y|^(1+alpha) dy.
    """
    _check_alpha_delta(alpha, delta)
    if k < 0:
        raise ParameterError("k must be nonnegative")
    if k == 0.0:
        def reduced(y):
            return ((1.0 - y ** (-delta)) * (1.0 - y ** (alpha + delta - 1.0))
                    / abs(1.0 - y) ** (1.0 + alpha))
        v = quad(reduced, 0.0, 0.5, limit=400, points=[0.0])[0]
        v += quad(reduced, 0.5, 1.0, limit=400)[0]
        return v
    p = (1.0 + alpha) / 2.0

    def integrand(y):
        return (1.0 - y ** (-delta)) / (k + (1.0 - y) ** 2) ** p

    v = quad(integrand, 0.0, 1.0, limit=400, points=[0.0])[0]
    v += quad(integrand, 1.0, 2.0, limit=400)[0]
    v += quad(integrand, 2.0, np.inf, limit=400)[0]
    return v


DEFAULT_K_GRID = (0.0,) + tuple(10.0 ** e for e in range(-6, 7))


def f_kernel_sup(alpha: float, delta: float, k_grid: Sequence[float] = DEFAULT_K_GRID) -> float:
    """sup of F over the standard k grid {0, 1e-6, ..., 1e6}."""
    return max(f_kernel(k, alpha, delta) for k in k_grid)


# --------------------------------------------------------------------------
# pointwise super-harmonic inequality
# --------------------------------------------------------------------------

def pointwise_weight_inequality_check(ux, uy, wx, wy):
    """Truth of (u(x)-u(y))^2 >= u(x)^2 (w(x)-w(y))/w(x)
                              + u(y)^2 (w(y)-w(x))/w(y)  for w > 0.

    Scalar inputs give a bool, arrays an elementwise bool array.  The
    inequality is an exact algebraic consequence of AM-GM; any False is
    a bug signal, not a property of the data.
    """
    ux = np.asarray(ux, dtype=float)
    uy = np.asarray(uy, dtype=float)
    wx = np.asarray(wx, dtype=float)
    wy = np.asarray(wy, dtype=float)
    if np.any(wx <= 0) or np.any(wy <= 0):
        raise ParameterError("weights must be strictly positive")
    lhs = (ux - uy) ** 2
    rhs = ux * ux * (wx - wy) / wx + uy * uy * (wy - wx) / wy
    out = lhs >= rhs
    return bool(out) if out.ndim == 0 else out


# --------------------------------------------------------------------------
# half-line Hardy bound
# --------------------------------------------------------------------------

def hardy_halfline_check(u: SampledFunction, alpha: float, delta: float,
                         min_constant: Optional[float] = None,
                         family_id: str = "") -> InequalityReport:
    """Empirical constant in the half-line lower bound

        pair sum at gamma = alpha/2  >=  c * int u^2 / x^alpha.

    The grid interval must start at 0; the decay precondition
    |u(x)| <= 4 sup|u| / x^2 is enforced on the sampled tail x >= 1.
    """
    _check_alpha_delta(alpha, delta)
    grid = u.grid
    if not isinstance(grid, Grid1D) or abs(grid.interval.a) > 1e-15:
        raise InputError("half-line check expects a 1D grid on (0, L)")
    x = grid.nodes
    sup = float(np.max(np.abs(u.values)))
    tail = x >= 1.0
    if np.any(np.abs(u.values[tail]) * x[tail] ** 2 > 4.0 * sup + 1e-300):
        raise InputError("tail decay |u| <~ x^-2 violated on the sampled tail")
    lhs = gagliardo_sq(u, alpha / 2.0).value_sq
    rhs_weight = float(np.sum(u.values ** 2 / x ** alpha) * grid.h)
    if rhs_weight == 0.0:
        return InequalityReport(lhs, 0.0, math.nan, grid.n, True, family_id,
                                {"degenerate": True, "alpha": alpha, "delta": delta})
    const = lhs / rhs_weight
    verdict = const > (0.0 if min_constant is None else min_constant)
    return InequalityReport(lhs, rhs_weight, const, grid.n, verdict, family_id,
                            {"alpha": alpha, "delta": delta})


# --------------------------------------------------------------------------
# interval Hardy inequalities
# --------------------------------------------------------------------------

def interval_hardy_check(f: SampledFunction, alpha: float, mode: str = "general",
                         beta1: float = 1.0, beta2: Optional[float] = None,
                         beta3: Optional[float] = None,
                         family_id: str = "") -> InequalityReport:
    """Boundary-distance Hardy inequality on a finite interval.

    general:   pair sum + beta1 |I|^(-alpha) ||f||_2^2  >=  beta2 * H
    mean-zero: pair sum                               >=  beta3 * H
    with H = int f^2 / dist(x, I^c)^alpha.  Reports the maximal feasible
    constant; the verdict compares it against the configured beta when
    one is supplied, otherwise asserts plain positivity.
    """
    if not (0.0 < alpha < 1.0):
        raise ParameterError(f"alpha must lie in (0, 1), got {alpha}")
    if mode not in ("general", "mean-zero"):
        raise ParameterError(f"unknown mode '{mode}'")
    grid = f.grid
    if not isinstance(grid, Grid1D):
        raise InputError("interval check expects a 1D grid")
    iv = grid.interval
    dist = distances_to_complement(grid.nodes, iv)
    H = float(np.sum(f.values ** 2 / dist ** alpha) * grid.h)
    G = gagliardo_sq(f, alpha / 2.0).value_sq
    if mode == "mean-zero":
        mean = float(np.sum(f.values) * grid.h)
        l1 = float(np.sum(np.abs(f.values)) * grid.h)
        if l1 > 0 and abs(mean) > 1e-8 * l1:
            raise InputError(
                f"mean-zero mode needs |mean| < 1e-8 * L1 norm, got {mean:g}")
        if H == 0.0:
            return InequalityReport(G, 0.0, math.nan, grid.n, True, family_id,
                                    {"degenerate": True, "alpha": alpha, "mode": mode})
        const = G / H
        verdict = const > (0.0 if beta3 is None else beta3)
        return InequalityReport(G, H, const, grid.n, verdict, family_id,
                                {"alpha": alpha, "mode": mode})
    l2sq = l2_norm_sq(f)
    lhs = G + beta1 * iv.length ** (-alpha) * l2sq
    if H == 0.0:
        return InequalityReport(lhs, 0.0, math.nan, grid.n, True, family_id,
                                {"degenerate": True, "alpha": alpha, "mode": mode})
    const = lhs / H
    verdict = const > (0.0 if beta2 is None else beta2)
    return InequalityReport(lhs, H, const, grid.n, verdict, family_id,
                            {"alpha": alpha, "mode": mode, "beta1": beta1})


def mean_square_difference_identity(f: SampledFunction) -> dict:
    """Discrete check of the algebraic identity
        int_I int_I (u(x)-u(y))^2 dx dy = 2 |I| ||u||_2^2    when int u = 0.

    Returns lhs, rhs and their relative gap; exact to rounding at every
    resolution for midpoint sums with a zero discrete mean.
    """
    grid = f.grid
    if not isinstance(grid, Grid1D):
        raise InputError("identity check expects a 1D grid")
    v = f.values
    h = grid.h
    mean = float(np.sum(v) * h)
    l1 = float(np.sum(np.abs(v)) * h)
    if l1 > 0 and abs(mean) > 1e-8 * l1:
        raise InputError("identity requires a (discretely) mean-zero sample")
    # explicit double sum in chunks; no kernel, no shortcuts
    n = len(v)
    lhs = 0.0
    chunk = 4096
    for i0 in range(0, n, chunk):
        d = v[i0:i0 + chunk, None] - v[None, :]
        lhs += float(np.sum(d * d))
    lhs *= h * h
    rhs = 2.0 * grid.interval.length * l2_norm_sq(f)
    denom = max(abs(lhs), abs(rhs), 1e-300)
    return {"lhs": lhs, "rhs": rhs, "rel_gap": abs(lhs - rhs) / denom}


# --------------------------------------------------------------------------
# the plateau counterexample family
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class ScalingRow:
    n: int
    hardy_integral: float
    gagliardo_sq: float


@dataclass(frozen=True)
class ScalingTable:
    alpha: float
    rows: tuple
    slope: float

    def to_rows(self):
        return [
            {"alpha": self.alpha, "n": r.n, "hardy_integral": r.hardy_integral,
             "gagliardo_sq": r.gagliardo_sq, "fitted_slope": self.slope}
            for r in self.rows
        ]


def counterexample_scaling(alpha: float, n_list: Sequence[int],
                           grid_n: Optional[int] = None) -> ScalingTable:
    """Plateau-family scaling study on (0, 1).

    For each n, build the plateau function (1 on [1/n, 1-1/n], smoothstep
    ramps down to 0 at distance 1/(2n) from the endpoints), and tabulate
    the two-sided Hardy integral int u^2 / (x (1-x))^alpha and the
    Gagliardo pair sum at gamma = alpha/2.  The slope column is the
    log-log least-squares fit of the pair sums against n.
    """
    if not (0.0 < alpha < 1.0):
        raise ParameterError(f"alpha must lie in (0, 1), got {alpha}")
    n_list = sorted(int(n) for n in n_list)
    if grid_n is None:
        grid_n = 32 * n_list[-1]
    if grid_n < 16 * n_list[-1]:
        raise ResolutionError(
            f"grid with {grid_n} cells is too coarse for n = {n_list[-1]} "
            f"(need at least {16 * n_list[-1]})")
    grid = Grid1D(Interval(0.0, 1.0), grid_n)
    x = grid.nodes
    weight = (x * (1.0 - x)) ** (-alpha)
    rows: List[ScalingRow] = []
    for n in n_list:
        u = sample(FunctionSpec("plateau", (("n", n),)), grid)
        hardy_integral = float(np.sum(u.values ** 2 * weight) * grid.h)
        gag = gagliardo_sq(u, alpha / 2.0).value_sq
        rows.append(ScalingRow(n, hardy_integral, gag))
    slope = float(np.polyfit(np.log([r.n for r in rows]),
                             np.log([r.gagliardo_sq for r in rows]), 1)[0])
    return ScalingTable(alpha, tuple(rows), slope)
