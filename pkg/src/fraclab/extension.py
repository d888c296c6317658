"""Extension operators: zero extension, C1-preserving reflection across a
flat boundary, boundary straightening, and the assembled extension
operator for model C2 domains.

The reflection across x2 = 0 uses the two-point dilation formula

    u~(x1, x2) = -3 u(x1, -x2) + 4 u(x1, -x2/2)        for x2 < 0,

whose weights are the unique value/derivative matching pair:
-3 + 4 = 1 (continuity) and, after the chain rule, 3 - 2 = 1 (continuity
of the normal derivative).  Midpoint grids make the mirrored nodes land
exactly on source nodes, so only the half-argument term needs
interpolation (1D linear along columns).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import _pairsum
from .domains import (
    Disk,
    FunctionSpec,
    GraphDomain2D,
    Grid1D,
    Grid2D,
    Interval,
    SampledFunction,
    VectorField,
    smoothstep,
    smoothstep_prime,
)
from .errors import (
    ConfigurationError,
    InputError,
    PreconditionError,
    UnsupportedError,
)
from .hardy import InequalityReport
from .norms import field_hs_norm, gagliardo_sq, l2_norm_sq

__all__ = [
    "REFLECT_VALUE_WEIGHTS",
    "REFLECT_DERIV_WEIGHTS",
    "SUPPORT_TOL",
    "ExtensionResult",
    "StraighteningMap",
    "zero_extend",
    "hestenes_reflect",
    "cross_kernel_check",
    "straighten",
    "unstraighten",
    "extend_lemma33",
    "extend_E",
]

REFLECT_VALUE_WEIGHTS = (-3.0, 4.0)   # at (x1, -x2) and (x1, -x2/2)
REFLECT_DERIV_WEIGHTS = (3.0, -2.0)   # normal derivative, after the chain rule
SUPPORT_TOL = 1e-10


@dataclass
class ExtensionResult:
    """Extended field plus the measured norm ratios and support box."""

    output: SampledFunction
    norm_ratios: dict
    support_box: tuple
    restriction_max_error: Optional[float] = None

    def to_dict(self):
        d = {"norm_ratios": dict(self.norm_ratios), "support_box": self.support_box,
             "n": self.output.grid.n_active}
        if self.restriction_max_error is not None:
            d["restriction_max_error"] = self.restriction_max_error
        return d


# --------------------------------------------------------------------------
# zero extension (valid below order 1/2)
# --------------------------------------------------------------------------

def _check_s_below_half(s: float):
    if not (0.0 < s < 0.5):
        raise UnsupportedError(
            f"extension by zero is only valid for orders in (0, 1/2), got s = {s}")


def _scalar_hs_norm(f: SampledFunction, s: float) -> float:
    return math.sqrt(l2_norm_sq(f)) + math.sqrt(gagliardo_sq(f, s).value_sq)


def zero_extend(g: SampledFunction, s: float, margin_frac: float = 0.25) -> ExtensionResult:
    """Extend by zero onto an enlarged grid and record the H^s norm ratio."""
    _check_s_below_half(s)
    grid = g.grid
    if isinstance(grid, Grid1D):
        k = max(1, math.ceil(margin_frac * grid.n))
        out_grid = grid.enlarged(k)
        values = np.zeros(out_grid.n)
        values[k:k + grid.n] = g.values
        out = SampledFunction(out_grid, values)
        support = (grid.interval.a, grid.interval.b)
    elif isinstance(grid, Grid2D):
        mx = max(1, math.ceil(margin_frac * grid.nx))
        my = max(1, math.ceil(margin_frac * grid.ny))
        out_grid = grid.enlarged(mx, my)
        full = np.zeros((out_grid.nx, out_grid.ny))
        inner = grid.values_to_full(g.values)
        full[mx:mx + grid.nx, my:my + grid.ny] = inner
        out = SampledFunction(out_grid, full.ravel())
        support = ((grid.box[0].a, grid.box[0].b), (grid.box[1].a, grid.box[1].b))
    else:
        raise InputError(f"unsupported grid type {type(grid).__name__}")
    denom = _scalar_hs_norm(g, s)
    ratio = math.nan if denom == 0.0 else _scalar_hs_norm(out, s) / denom
    return ExtensionResult(out, {"hs": ratio}, support)


# --------------------------------------------------------------------------
# reflection extension on a flat-bottom chart
# --------------------------------------------------------------------------

def _support_margins(full_vals: np.ndarray, tol: float):
    supp = np.abs(full_vals) > tol
    if not supp.any():
        return None
    ix, iy = np.nonzero(supp)
    return ix.min(), ix.max(), iy.min(), iy.max()


def _require_core_margin(u: SampledFunction, cells: int = 2):
    grid = u.grid
    if not isinstance(grid, Grid2D):
        raise InputError("reflection extension expects a 2D grid")
    if abs(grid.box[1].a) > 1e-14:
        raise InputError("chart grid must have its bottom edge at x2 = 0")
    full = grid.values_to_full(u.values)
    tol = SUPPORT_TOL * max(np.max(np.abs(u.values)), 1e-300)
    box = _support_margins(full, tol)
    if box is None:
        return full, None
    x0, x1, y0, y1 = box
    if x0 < cells or x1 > grid.nx - 1 - cells or y1 > grid.ny - 1 - cells:
        raise PreconditionError(
            "field support reaches the lateral or top chart boundary; the "
            "reflection formula needs a compactly contained core")
    return full, box


def _half_argument_interp(full: np.ndarray, ny: int):
    """Values of each column at the half-argument heights (k + 1/2) h / 2.

    Returns an (nx, ny) array whose [:, k] entry interpolates column
    values at height ((k + 1/2) / 2) h, linearly (with end extrapolation
    below the first node)."""
    k = np.arange(ny)
    t = (k + 0.5) / 2.0 - 0.5  # fractional node index of the half point
    k0 = np.clip(np.floor(t).astype(int), 0, ny - 2)
    frac = t - k0
    return full[:, k0] * (1.0 - frac) + full[:, k0 + 1] * frac


def hestenes_reflect(u: SampledFunction, s: Optional[float] = None) -> ExtensionResult:
    """Reflect a field on a flat-bottom chart across x2 = 0.

    The output grid doubles the chart downward; mirrored nodes coincide
    with source nodes exactly, the half-argument samples use linear
    column interpolation.  The gradient, when present, is transported by
    the derivative-matching weights.  With s given, the ratio
    ||grad u~||_{H^s(grid)} / ||grad u||_{H^s(chart)} is recorded.
    """
    grid = u.grid
    full, _ = _require_core_margin(u)
    nx, ny = grid.nx, grid.ny
    out_grid = Grid2D((grid.box[0], Interval(-grid.box[1].b, grid.box[1].b)),
                      nx, 2 * ny)
    wv1, wv2 = REFLECT_VALUE_WEIGHTS
    mirrored = full[:, ::-1]                      # row j < ny sees node ny-1-j
    half = _half_argument_interp(full, ny)[:, ::-1]
    out_vals = np.concatenate([wv1 * mirrored + wv2 * half, full], axis=1)
    out_grad = None
    if u.gradient is not None:
        gx = grid.values_to_full(u.gradient[:, 0])
        gy = grid.values_to_full(u.gradient[:, 1])
        wd1, wd2 = REFLECT_DERIV_WEIGHTS
        gx_out = np.concatenate(
            [wv1 * gx[:, ::-1] + wv2 * _half_argument_interp(gx, ny)[:, ::-1], gx], axis=1)
        gy_out = np.concatenate(
            [wd1 * gy[:, ::-1] + wd2 * _half_argument_interp(gy, ny)[:, ::-1], gy], axis=1)
        out_grad = np.column_stack([gx_out.ravel(), gy_out.ravel()])
    out = SampledFunction(out_grid, out_vals.ravel(), out_grad)
    ratios = {}
    if s is not None:
        if u.gradient is None:
            raise InputError("norm ratio at fractional order needs the gradient")
        denom = field_hs_norm(VectorField(grid, u.gradient), s)
        num = field_hs_norm(out.gradient_field(), s)
        ratios["hs_grad"] = math.nan if denom == 0.0 else num / denom
    support = ((grid.box[0].a, grid.box[0].b), (-grid.box[1].b, grid.box[1].b))
    return ExtensionResult(out, ratios, support)


def cross_kernel_check(g: SampledFunction, s: float, family_id: str = "") -> InequalityReport:
    """Ratio of the reflected-cross-term quadratic form

        sum_{x, y in chart} g(y)^2 / (|x1 - y1| + |x2 + y2|)^(2 + 2s)

    to the squared H^s norm of g on the chart."""
    if not (0.0 < s < 0.5):
        raise UnsupportedError(f"cross-kernel bound needs s in (0, 1/2), got {s}")
    _require_core_margin(g)
    grid = g.grid
    lhs = _pairsum.cross_reflection_sum(grid.points, g.values, s, grid.cell_measure)
    rhs = _scalar_hs_norm(g, s) ** 2
    if rhs == 0.0:
        return InequalityReport(lhs, 0.0, math.nan, grid.n_active, True, family_id,
                                {"degenerate": True, "s": s})
    ratio = lhs / rhs
    return InequalityReport(lhs, rhs, ratio, grid.n_active, ratio > 0.0, family_id,
                            {"s": s})


# --------------------------------------------------------------------------
# boundary straightening
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class StraighteningMap:
    """Vertical shear flattening a graph curve: psi(x) = (x1, x2 - gb(x1)),
    phi(y) = (y1, y2 + gb(y1)).  Volume preserving (unit Jacobian)."""

    curve: FunctionSpec

    def forward(self, pts: np.ndarray) -> np.ndarray:
        pts = np.asarray(pts, dtype=float)
        out = pts.copy()
        out[:, 1] -= self.curve.evaluate(pts[:, 0])
        return out

    def inverse(self, pts: np.ndarray) -> np.ndarray:
        pts = np.asarray(pts, dtype=float)
        out = pts.copy()
        out[:, 1] += self.curve.evaluate(pts[:, 0])
        return out


def _column_interp(ys: np.ndarray, col: np.ndarray, yq: np.ndarray) -> np.ndarray:
    """1D linear interpolation along a column with end extrapolation."""
    idx = np.clip(np.searchsorted(ys, yq) - 1, 0, len(ys) - 2)
    y0 = ys[idx]
    y1 = ys[idx + 1]
    t = (yq - y0) / (y1 - y0)
    return col[idx] * (1.0 - t) + col[idx + 1] * t


def _lemma33_domain_of(u: SampledFunction) -> GraphDomain2D:
    dom = getattr(u.grid, "domain", None)
    if not isinstance(dom, GraphDomain2D) or dom.kind != "lemma33":
        raise InputError("operation needs a sample on a lemma33 graph domain grid")
    return dom


def straighten(u: SampledFunction, w_ny: Optional[int] = None) -> SampledFunction:
    """Pull a field on a lemma33 domain back to the straightened region
    W = psi(Omega) (columns preserved, heights shifted by the curve).

    Values and gradient components are interpolated column-wise; the
    gradient is transported by the shear chain rule
    (d1 + gb' d2, d2)."""
    dom = _lemma33_domain_of(u)
    grid = u.grid
    gb = dom.lower
    xs = grid.xs
    curve_at = gb.evaluate(xs)
    top_at = dom.upper.evaluate(xs)
    heights = top_at - curve_at
    H = float(np.max(heights))
    hy = grid.hy
    ny_w = w_ny or int(math.ceil(H / hy))
    w_box = (grid.box[0], Interval(0.0, ny_w * hy))
    ys_w = w_box[1].a + (np.arange(ny_w) + 0.5) * hy
    mask = ys_w[None, :] < (heights[:, None])
    w_grid = Grid2D(w_box, grid.nx, ny_w, mask=mask)

    full_v = grid.values_to_full(u.values)
    has_grad = u.gradient is not None
    if has_grad:
        full_gx = grid.values_to_full(u.gradient[:, 0])
        full_gy = grid.values_to_full(u.gradient[:, 1])
        slope = gb.derivative(xs)
    ys_src = grid.ys
    vals = np.zeros((grid.nx, ny_w))
    gx_t = np.zeros_like(vals)
    gy_t = np.zeros_like(vals)
    col_mask = grid.mask
    for i in range(grid.nx):
        valid = np.nonzero(col_mask[i])[0]
        rows = np.nonzero(mask[i])[0]
        if valid.size < 2 or rows.size == 0:
            continue
        yq = ys_w[rows] + curve_at[i]
        ys_col = ys_src[valid]
        vals[i, rows] = _column_interp(ys_col, full_v[i, valid], yq)
        if has_grad:
            gxq = _column_interp(ys_col, full_gx[i, valid], yq)
            gyq = _column_interp(ys_col, full_gy[i, valid], yq)
            gx_t[i, rows] = gxq + slope[i] * gyq
            gy_t[i, rows] = gyq
    grad = None
    if has_grad:
        grad = np.column_stack([gx_t[w_grid.mask], gy_t[w_grid.mask]])
    return SampledFunction(w_grid, vals[w_grid.mask], grad)


def unstraighten(v: SampledFunction, dom: GraphDomain2D,
                 target_grid: Grid2D) -> SampledFunction:
    """Push a field on the straightened region back to domain coordinates
    on the target grid: u(x) = v(x1, x2 - gb(x1)), gradient transported by
    the inverse shear (d1 - gb' d2, d2)."""
    gb = dom.lower
    grid = v.grid
    xs = target_grid.xs
    curve_at = gb.evaluate(xs)
    full_v = grid.values_to_full(v.values)
    has_grad = v.gradient is not None
    if has_grad:
        full_g1 = grid.values_to_full(v.gradient[:, 0])
        full_g2 = grid.values_to_full(v.gradient[:, 1])
        slope = gb.derivative(xs)
    ys_src = grid.ys
    vals = np.zeros((target_grid.nx, target_grid.ny))
    g1 = np.zeros_like(vals)
    g2 = np.zeros_like(vals)
    # match target columns to source columns by coordinate; interpolate only
    # within the valid (unmasked) span of each source column
    src_idx = np.rint((xs - grid.xs[0]) / grid.hx).astype(int)
    for i in range(target_grid.nx):
        j = src_idx[i]
        if j < 0 or j >= grid.nx:
            continue
        valid = np.nonzero(grid.mask[j])[0]
        if valid.size < 2:
            continue
        rows = np.nonzero(target_grid.mask[i])[0]
        if rows.size == 0:
            continue
        yq = target_grid.ys[rows] - curve_at[i]
        ys_col = ys_src[valid]
        vals[i, rows] = _column_interp(ys_col, full_v[j, valid], yq)
        if has_grad:
            a = _column_interp(ys_col, full_g1[j, valid], yq)
            b = _column_interp(ys_col, full_g2[j, valid], yq)
            g1[i, rows] = a - slope[i] * b
            g2[i, rows] = b
    m = target_grid.mask
    grad = np.column_stack([g1[m], g2[m]]) if has_grad else None
    return SampledFunction(target_grid, vals[m], grad)


# --------------------------------------------------------------------------
# assembled extensions
# --------------------------------------------------------------------------

def _in_core_f0(dom: GraphDomain2D, pts: np.ndarray) -> np.ndarray:
    d0 = dom.core_margin
    x1, x2 = pts[:, 0], pts[:, 1]
    return ((x1 > dom.base.a + d0) & (x1 < dom.base.b - d0)
            & (x2 < dom.upper.evaluate(x1) - d0))


def extend_lemma33(u: SampledFunction, s: float) -> ExtensionResult:
    """Extension across the curved bottom boundary of a lemma33 domain:
    straighten, reflect on the flat chart, map back, truncate inside the
    ball of radius r0.  The input must be supported in the margin core F0
    (distance core_margin from the arc and the lateral ends)."""
    _check_s_below_half(s)
    dom = _lemma33_domain_of(u)
    if dom.core_margin <= 0:
        raise PreconditionError("lemma33 extension needs a positive core margin")
    grid = u.grid
    tol = SUPPORT_TOL * max(np.max(np.abs(u.values)), 1e-300)
    outside_core = ~_in_core_f0(dom, grid.points)
    if np.any(np.abs(u.values[outside_core]) > tol):
        raise PreconditionError(
            "field must vanish outside the margin core F0 of the domain")
    if u.gradient is None:
        raise InputError("lemma33 extension needs the gradient field")
    v = straighten(u)
    reflected = hestenes_reflect(v).output

    # output grid: the domain box extended downward far enough to hold the
    # reflected collar
    depth = v.grid.box[1].b
    my = int(math.ceil(depth / grid.hy)) + 2
    out_box = (grid.box[0], Interval(grid.box[1].a - my * grid.hy, grid.box[1].b))
    out_grid = Grid2D(out_box, grid.nx, grid.ny + my)

    xs = out_grid.xs
    curve_at = dom.lower.evaluate(xs)
    slope = dom.lower.derivative(xs)
    refl_full = reflected.grid.values_to_full(reflected.values)
    refl_gx = reflected.grid.values_to_full(reflected.gradient[:, 0])
    refl_gy = reflected.grid.values_to_full(reflected.gradient[:, 1])
    ys_refl = reflected.grid.ys

    vals = np.zeros((out_grid.nx, out_grid.ny))
    gx = np.zeros_like(vals)
    gy = np.zeros_like(vals)

    # interior: copy the original nodal data exactly
    src_cols = np.rint((grid.xs - out_grid.xs[0]) / grid.hx).astype(int)
    src_rows = np.rint((grid.ys - out_grid.ys[0]) / grid.hy).astype(int)
    inner_vals = grid.values_to_full(u.values)
    inner_gx = grid.values_to_full(u.gradient[:, 0])
    inner_gy = grid.values_to_full(u.gradient[:, 1])
    vals[np.ix_(src_cols, src_rows)] = inner_vals
    gx[np.ix_(src_cols, src_rows)] = inner_gx
    gy[np.ix_(src_cols, src_rows)] = inner_gy

    # exterior collar below the curve: pull from the reflected chart
    X, Y = np.meshgrid(xs, out_grid.ys, indexing="ij")
    inside = dom.contains(X, Y)
    for i in range(out_grid.nx):
        eta2 = out_grid.ys - curve_at[i]
        rows = np.nonzero((eta2 < 0.0) & (eta2 > -depth) & ~inside[i])[0]
        if rows.size == 0:
            continue
        yq = eta2[rows]
        a = _column_interp(ys_refl, refl_full[i], yq)
        b1 = _column_interp(ys_refl, refl_gx[i], yq)
        b2 = _column_interp(ys_refl, refl_gy[i], yq)
        vals[i, rows] = a
        gx[i, rows] = b1 - slope[i] * b2
        gy[i, rows] = b2
    # zero any numerically polluted nodes that are neither interior nor collar
    keep = inside.copy()
    for i in range(out_grid.nx):
        eta2 = out_grid.ys - curve_at[i]
        keep[i] |= (eta2 < 0.0) & (eta2 > -depth)
    vals[~keep] = 0.0
    gx[~keep] = 0.0
    gy[~keep] = 0.0

    # truncate inside B(0, r0)
    r0 = float(dom.r0)
    d0 = dom.core_margin
    R = np.hypot(X, Y)
    width = 0.5 * d0
    tcut = smoothstep((r0 - R) / width)
    dts = smoothstep_prime((r0 - R) / width) / width
    with np.errstate(invalid="ignore", divide="ignore"):
        ux = np.where(R > 0, X / R, 0.0)
        uy = np.where(R > 0, Y / R, 0.0)
    gx = tcut * gx + vals * dts * (-ux)
    gy = tcut * gy + vals * dts * (-uy)
    vals = tcut * vals

    out = SampledFunction(out_grid, vals.ravel(),
                          np.column_stack([gx.ravel(), gy.ravel()]))
    denom = math.sqrt(l2_norm_sq(u)) + field_hs_norm(u.gradient_field(), s)
    num = math.sqrt(l2_norm_sq(out)) + field_hs_norm(out.gradient_field(), s)
    ratio = math.nan if denom == 0.0 else num / denom
    err = float(np.max(np.abs(vals[np.ix_(src_cols, src_rows)][grid.mask]
                              - u.values))) if grid.n_active else 0.0
    return ExtensionResult(out, {"l2_plus_hs_grad": ratio},
                           ((-r0, r0), (-r0, r0)), restriction_max_error=err)


# ---- disk partition of unity -------------------------------------------

_RING_LO = 0.78
_RING_HI = 0.88
_N_PATCHES = 8
_CHART_HALFWIDTH = 0.8
_CHART_HEIGHT = 0.40
_TRUNC_LO = 1.05
_TRUNC_HI = 1.22


def _ring(r):
    return smoothstep((r - _RING_LO) / (_RING_HI - _RING_LO))


def _ring_prime(r):
    return smoothstep_prime((r - _RING_LO) / (_RING_HI - _RING_LO)) / (_RING_HI - _RING_LO)


def _angular_weight(theta, j, n_patches):
    """Piecewise smoothstep bump centered at c_j = j * delta with support
    width 2 delta; adjacent bumps sum to one exactly."""
    delta = 2.0 * math.pi / n_patches
    d = np.mod(theta - j * delta + math.pi, 2.0 * math.pi) - math.pi
    rising = smoothstep((d + delta) / delta)
    falling = 1.0 - smoothstep(d / delta)
    return np.where(d < 0.0, rising, falling) * (np.abs(d) < delta)


def _angular_weight_prime(theta, j, n_patches):
    delta = 2.0 * math.pi / n_patches
    d = np.mod(theta - j * delta + math.pi, 2.0 * math.pi) - math.pi
    rising = smoothstep_prime((d + delta) / delta) / delta
    falling = -smoothstep_prime(d / delta) / delta
    return np.where(d < 0.0, rising, falling) * (np.abs(d) < delta)


def _bilinear(full: np.ndarray, xs: np.ndarray, ys: np.ndarray,
              qx: np.ndarray, qy: np.ndarray) -> np.ndarray:
    hx = xs[1] - xs[0]
    hy = ys[1] - ys[0]
    tx = np.clip((qx - xs[0]) / hx, 0.0, len(xs) - 1.000001)
    ty = np.clip((qy - ys[0]) / hy, 0.0, len(ys) - 1.000001)
    ix = np.clip(np.floor(tx).astype(int), 0, len(xs) - 2)
    iy = np.clip(np.floor(ty).astype(int), 0, len(ys) - 2)
    fx = tx - ix
    fy = ty - iy
    return (full[ix, iy] * (1 - fx) * (1 - fy)
            + full[ix + 1, iy] * fx * (1 - fy)
            + full[ix, iy + 1] * (1 - fx) * fy
            + full[ix + 1, iy + 1] * fx * fy)


def _fill_outside(full: np.ndarray, mask: np.ndarray, passes: int = 6) -> np.ndarray:
    """Continue values a few cells past the mask by neighbor averaging, so
    near-boundary interpolation does not mix in spurious zeros."""
    out = full.copy()
    known = mask.copy()
    for _ in range(passes):
        acc = np.zeros_like(out)
        cnt = np.zeros(out.shape, dtype=int)
        for ax, sh in ((0, 1), (0, -1), (1, 1), (1, -1)):
            rolled = np.roll(out, sh, axis=ax)
            rolled_known = np.roll(known, sh, axis=ax)
            if ax == 0 and sh == 1:
                rolled[0, :] = 0; rolled_known[0, :] = False
            elif ax == 0:
                rolled[-1, :] = 0; rolled_known[-1, :] = False
            elif sh == 1:
                rolled[:, 0] = 0; rolled_known[:, 0] = False
            else:
                rolled[:, -1] = 0; rolled_known[:, -1] = False
            acc += np.where(rolled_known, rolled, 0.0)
            cnt += rolled_known
        grow = (~known) & (cnt > 0)
        out[grow] = acc[grow] / cnt[grow]
        known |= grow
    return out


def extend_E(f: SampledFunction, s: float) -> ExtensionResult:
    """Assembled extension operator on a model C2 domain.

    On the unit disk: one interior cutoff plus eight overlapping boundary
    charts (rotated graph charts of the circle, straightened, reflected
    and mapped back), truncated inside the 1.25x dilation box V.  On a
    lemma33 graph domain the single-chart route applies.  The result
    equals f exactly at the interior nodes; the ratios
    ||Ef||_H1 / ||f||_H1(Omega) and ||grad Ef||_Hs / ||grad f||_Hs(Omega)
    are recorded.
    """
    _check_s_below_half(s)
    grid = f.grid
    dom = getattr(grid, "domain", None)
    if isinstance(dom, GraphDomain2D) and dom.kind == "lemma33":
        return extend_lemma33(f, s)
    if not isinstance(dom, Disk):
        raise InputError("assembled extension needs a disk or lemma33 domain grid")
    if f.gradient is None:
        raise InputError("assembled extension needs the gradient field")
    if abs(dom.r - 1.0) > 1e-12 or abs(dom.cx) > 1e-12 or abs(dom.cy) > 1e-12:
        raise ConfigurationError("the disk chart layout is calibrated for the unit disk")

    h = grid.hx
    if abs(grid.hy - h) > 1e-12:
        raise ConfigurationError("disk extension expects square cells")

    # enlarged output grid = 1.25x dilation of the bounding box
    margin = 0.25
    mx = int(math.ceil(margin / h))
    out_grid = grid.enlarged(mx, mx)
    X, Y = np.meshgrid(out_grid.xs, out_grid.ys, indexing="ij")
    inside = dom.contains(X, Y)

    vals = np.zeros((out_grid.nx, out_grid.ny))
    gx = np.zeros_like(vals)
    gy = np.zeros_like(vals)

    # interior nodes: exact nodal copy
    ix_src, iy_src = np.nonzero(grid.mask)
    vals[ix_src + mx, iy_src + mx] = f.values
    gx[ix_src + mx, iy_src + mx] = f.gradient[:, 0]
    gy[ix_src + mx, iy_src + mx] = f.gradient[:, 1]

    # filled full arrays of f for chart sampling
    f_full = _fill_outside(grid.values_to_full(f.values), grid.mask)
    fgx_full = _fill_outside(grid.values_to_full(f.gradient[:, 0]), grid.mask)
    fgy_full = _fill_outside(grid.values_to_full(f.gradient[:, 1]), grid.mask)

    # accumulate the exterior collar from the eight boundary charts
    ext_v = np.zeros_like(vals)
    ext_gx = np.zeros_like(vals)
    ext_gy = np.zeros_like(vals)
    outside_pts = ~inside
    ox, oy = np.nonzero(outside_pts)
    px = X[ox, oy]
    py = Y[ox, oy]

    n_eta1 = int(math.ceil(2 * _CHART_HALFWIDTH / h))
    n_eta2 = int(math.ceil(_CHART_HEIGHT / h))
    chart_box = (Interval(-_CHART_HALFWIDTH, _CHART_HALFWIDTH),
                 Interval(0.0, n_eta2 * h))
    chart_grid = Grid2D(chart_box, n_eta1, n_eta2)
    ceta1 = chart_grid.xs
    ceta2 = chart_grid.ys

    covered = np.zeros(px.shape, dtype=bool)
    for j in range(_N_PATCHES):
        theta_j = 2.0 * math.pi * j / _N_PATCHES
        rot = -0.5 * math.pi - theta_j
        cr, sr = math.cos(rot), math.sin(rot)

        # chart nodes -> physical coordinates
        E1, E2 = np.meshgrid(ceta1, ceta2, indexing="ij")
        gamma_loc = 1.0 - np.sqrt(np.maximum(1.0 - E1 ** 2, 0.0))
        gamma_slope = np.where(1.0 - E1 ** 2 > 1e-12,
                               E1 / np.sqrt(np.maximum(1.0 - E1 ** 2, 1e-12)), 0.0)
        Z1 = E1
        Z2 = E2 + gamma_loc - 1.0          # undo the vertical shift
        PX = cr * Z1 + sr * Z2             # R^T zeta
        PY = -sr * Z1 + cr * Z2

        r = np.hypot(PX, PY)
        theta = np.arctan2(PY, PX)
        wj = _ring(r) * _angular_weight(theta, j, _N_PATCHES)
        fv = _bilinear(f_full, grid.xs, grid.ys, PX, PY)
        fgx = _bilinear(fgx_full, grid.xs, grid.ys, PX, PY)
        fgy = _bilinear(fgy_full, grid.xs, grid.ys, PX, PY)
        with np.errstate(invalid="ignore", divide="ignore"):
            inv_r = np.where(r > 1e-12, 1.0 / r, 0.0)
        dwx = (_ring_prime(r) * _angular_weight(theta, j, _N_PATCHES) * PX * inv_r
               + _ring(r) * _angular_weight_prime(theta, j, _N_PATCHES) * (-PY) * inv_r ** 2)
        dwy = (_ring_prime(r) * _angular_weight(theta, j, _N_PATCHES) * PY * inv_r
               + _ring(r) * _angular_weight_prime(theta, j, _N_PATCHES) * PX * inv_r ** 2)
        piece = wj * fv
        piece_gx = wj * fgx + fv * dwx
        piece_gy = wj * fgy + fv * dwy

        # transport the gradient into chart coordinates
        # d/d eta1 follows (R^T (1, gamma_loc')), d/d eta2 follows (R^T (0,1))
        c1x = cr * 1.0 + sr * gamma_slope
        c1y = -sr * 1.0 + cr * gamma_slope
        c2x = sr
        c2y = cr
        g_eta1 = piece_gx * c1x + piece_gy * c1y
        g_eta2 = piece_gx * c2x + piece_gy * c2y

        chart_field = SampledFunction(chart_grid, piece.ravel(),
                                      np.column_stack([g_eta1.ravel(), g_eta2.ravel()]))
        reflected = hestenes_reflect(chart_field).output
        refl_v = reflected.grid.values_to_full(reflected.values)
        refl_g1 = reflected.grid.values_to_full(reflected.gradient[:, 0])
        refl_g2 = reflected.grid.values_to_full(reflected.gradient[:, 1])

        # write back at the exterior nodes covered by this chart
        q1 = cr * px - sr * py             # R x
        q2 = sr * px + cr * py
        z2 = q2 + 1.0
        glq = 1.0 - np.sqrt(np.maximum(1.0 - q1 ** 2, 0.0))
        gsq = np.where(1.0 - q1 ** 2 > 1e-12,
                       q1 / np.sqrt(np.maximum(1.0 - q1 ** 2, 1e-12)), 0.0)
        e1 = q1
        e2 = z2 - glq
        sel = (np.abs(e1) < _CHART_HALFWIDTH) & (e2 < 0.0) & (e2 > -chart_box[1].b)
        if not sel.any():
            continue
        covered |= sel
        v_add = _bilinear(refl_v, reflected.grid.xs, reflected.grid.ys, e1[sel], e2[sel])
        g1_add = _bilinear(refl_g1, reflected.grid.xs, reflected.grid.ys, e1[sel], e2[sel])
        g2_add = _bilinear(refl_g2, reflected.grid.xs, reflected.grid.ys, e1[sel], e2[sel])
        # back to physical coordinates: grad_x = g1 grad(eta1) + g2 grad(eta2)
        # with grad(eta1) = R row 1, grad(eta2) = R row 2 - gamma' R row 1
        gxa = g1_add * cr + g2_add * (sr - gsq[sel] * cr)
        gya = g1_add * (-sr) + g2_add * (cr + gsq[sel] * sr)
        ii = ox[sel]
        jj = oy[sel]
        ext_v[ii, jj] += v_add
        ext_gx[ii, jj] += gxa
        ext_gy[ii, jj] += gya

    # truncation cutoff: one inside the collar, zero before the box V
    R = np.hypot(X, Y)
    width = _TRUNC_HI - _TRUNC_LO
    tcut = smoothstep((_TRUNC_HI - R) / width)
    dts = smoothstep_prime((_TRUNC_HI - R) / width) / width
    with np.errstate(invalid="ignore", divide="ignore"):
        uxn = np.where(R > 0, X / R, 0.0)
        uyn = np.where(R > 0, Y / R, 0.0)
    sel_out = ~inside
    vals[sel_out] = (tcut * ext_v)[sel_out]
    gx[sel_out] = (tcut * ext_gx + ext_v * dts * (-uxn))[sel_out]
    gy[sel_out] = (tcut * ext_gy + ext_v * dts * (-uyn))[sel_out]

    out = SampledFunction(out_grid, vals.ravel(),
                          np.column_stack([gx.ravel(), gy.ravel()]))
    # ratios
    h1_in = math.sqrt(l2_norm_sq(f) + l2_norm_sq(f.gradient_field()))
    h1_out = math.sqrt(l2_norm_sq(out) + l2_norm_sq(out.gradient_field()))
    hs_in = field_hs_norm(f.gradient_field(), s)
    hs_out = field_hs_norm(out.gradient_field(), s)
    ratios = {
        "h1": math.nan if h1_in == 0 else h1_out / h1_in,
        "hs_grad": math.nan if hs_in == 0 else hs_out / hs_in,
    }
    err = float(np.max(np.abs(vals[ix_src + mx, iy_src + mx] - f.values)))
    V = ((out_grid.box[0].a, out_grid.box[0].b), (out_grid.box[1].a, out_grid.box[1].b))
    return ExtensionResult(out, ratios, V, restriction_max_error=err)
