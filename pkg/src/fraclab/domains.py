"""Grids, domains and sampled scalar fields.

Everything here is cell-centered: 1D and 2D grids store midpoint nodes, so
nodes never coincide with domain boundaries and boundary-distance weights
stay finite.  All objects are immutable after construction and safe to
share across threads.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from scipy.optimize import bisect

from .errors import (
    DomainError,
    GeometryError,
    InputError,
    ParameterError,
)

__all__ = [
    "Interval",
    "Grid1D",
    "Grid2D",
    "GraphDomain2D",
    "Disk",
    "SampledFunction",
    "VectorField",
    "FunctionSpec",
    "sample",
    "build_graph_domain",
    "distance_to_complement",
    "smoothstep",
    "smoothstep_prime",
]


def smoothstep(t):
    """Cubic smoothstep: 0 for t<=0, 1 for t>=1, t^2(3-2t) between."""
    t = np.clip(t, 0.0, 1.0)
    return t * t * (3.0 - 2.0 * t)


def smoothstep_prime(t):
    t = np.asarray(t, dtype=float)
    inside = (t > 0.0) & (t < 1.0)
    tc = np.clip(t, 0.0, 1.0)
    return np.where(inside, 6.0 * tc * (1.0 - tc), 0.0)


@dataclass(frozen=True)
class Interval:
    a: float
    b: float

    def __post_init__(self):
        if not (self.a < self.b):
            raise GeometryError(f"interval needs a < b, got ({self.a}, {self.b})")

    @property
    def length(self) -> float:
        return self.b - self.a

    def contains(self, x) -> np.ndarray:
        x = np.asarray(x)
        return (x > self.a) & (x < self.b)

    def to_dict(self):
        return {"a": self.a, "b": self.b}


class Grid1D:
    """Uniform midpoint grid: n cells on an interval, node_k = a + (k+1/2)h."""

    def __init__(self, interval: Interval, n: int):
        if n < 1:
            raise ParameterError("cell count must be positive")
        self.interval = interval
        self.n = int(n)
        self.h = interval.length / n
        nodes = interval.a + (np.arange(n) + 0.5) * self.h
        nodes.setflags(write=False)
        self.nodes = nodes

    @property
    def dim(self) -> int:
        return 1

    @property
    def n_active(self) -> int:
        return self.n

    @property
    def points(self) -> np.ndarray:
        return self.nodes

    @property
    def cell_measure(self) -> float:
        return self.h

    def refined(self, factor: int = 2) -> "Grid1D":
        return Grid1D(self.interval, self.n * factor)

    def enlarged(self, margin_cells: int) -> "Grid1D":
        """Grid extended by whole cells on both sides; existing nodes are
        preserved at the same coordinates."""
        k = int(margin_cells)
        iv = Interval(self.interval.a - k * self.h, self.interval.b + k * self.h)
        return Grid1D(iv, self.n + 2 * k)

    def to_dict(self):
        return {"a": self.interval.a, "b": self.interval.b, "n": self.n}

    @staticmethod
    def from_dict(d) -> "Grid1D":
        return Grid1D(Interval(float(d["a"]), float(d["b"])), int(d["n"]))

    def __repr__(self):
        return f"Grid1D(({self.interval.a}, {self.interval.b}), n={self.n})"


class Grid2D:
    """Tensor midpoint grid over a bounding box with a boolean membership
    mask selecting the active nodes."""

    def __init__(self, box, nx: int, ny: int, mask: Optional[np.ndarray] = None,
                 domain=None):
        self.box = (box[0], box[1])
        if nx < 1 or ny < 1:
            raise ParameterError("cell counts must be positive")
        self.nx, self.ny = int(nx), int(ny)
        self.hx = self.box[0].length / nx
        self.hy = self.box[1].length / ny
        self.xs = self.box[0].a + (np.arange(nx) + 0.5) * self.hx
        self.ys = self.box[1].a + (np.arange(ny) + 0.5) * self.hy
        if mask is None:
            mask = np.ones((nx, ny), dtype=bool)
        mask = np.asarray(mask, dtype=bool)
        if mask.shape != (nx, ny):
            raise InputError(f"mask shape {mask.shape} != grid shape {(nx, ny)}")
        if not mask.any():
            raise GeometryError("domain mask selects no nodes")
        mask.setflags(write=False)
        self.mask = mask
        self.domain = domain
        X, Y = np.meshgrid(self.xs, self.ys, indexing="ij")
        pts = np.column_stack([X[mask], Y[mask]])
        pts.setflags(write=False)
        self._points = pts

    @classmethod
    def from_domain(cls, domain, nx: int, ny: Optional[int] = None, box=None) -> "Grid2D":
        if box is None:
            box = domain.bounding_box()
        if ny is None:
            ny = max(1, round(nx * box[1].length / box[0].length))
        g = cls(box, nx, ny, mask=None, domain=domain)
        X, Y = np.meshgrid(g.xs, g.ys, indexing="ij")
        mask = domain.contains(X, Y)
        return cls(box, nx, ny, mask=mask, domain=domain)

    @classmethod
    def full(cls, box, nx: int, ny: int) -> "Grid2D":
        return cls(box, nx, ny)

    @property
    def dim(self) -> int:
        return 2

    @property
    def is_full(self) -> bool:
        return bool(self.mask.all())

    @property
    def n_active(self) -> int:
        return self._points.shape[0]

    @property
    def points(self) -> np.ndarray:
        return self._points

    @property
    def cell_measure(self) -> float:
        return self.hx * self.hy

    def values_to_full(self, values: np.ndarray, fill: float = 0.0) -> np.ndarray:
        """Scatter active-node values back onto the (nx, ny) tensor array."""
        full = np.full((self.nx, self.ny), fill, dtype=float)
        full[self.mask] = values
        return full

    def refined(self, factor: int = 2) -> "Grid2D":
        if self.domain is not None:
            return Grid2D.from_domain(self.domain, self.nx * factor, self.ny * factor,
                                      box=self.box)
        if self.is_full:
            return Grid2D(self.box, self.nx * factor, self.ny * factor)
        raise InputError("cannot refine a masked grid without its domain")

    def enlarged(self, mx: int, my: int) -> "Grid2D":
        """Full grid extended by whole cells; original nodes keep their
        coordinates.  The mask is dropped (all nodes active)."""
        bx = Interval(self.box[0].a - mx * self.hx, self.box[0].b + mx * self.hx)
        by = Interval(self.box[1].a - my * self.hy, self.box[1].b + my * self.hy)
        return Grid2D((bx, by), self.nx + 2 * mx, self.ny + 2 * my)

    def to_dict(self):
        return {
            "x": {"a": self.box[0].a, "b": self.box[0].b, "n": self.nx},
            "y": {"a": self.box[1].a, "b": self.box[1].b, "n": self.ny},
        }

    def __repr__(self):
        return (f"Grid2D([{self.box[0].a},{self.box[0].b}]x[{self.box[1].a},"
                f"{self.box[1].b}], {self.nx}x{self.ny}, active={self.n_active})")


@dataclass(frozen=True)
class Disk:
    cx: float = 0.0
    cy: float = 0.0
    r: float = 1.0

    def __post_init__(self):
        if self.r <= 0:
            raise GeometryError("disk radius must be positive")

    def contains(self, x, y):
        return (np.asarray(x) - self.cx) ** 2 + (np.asarray(y) - self.cy) ** 2 < self.r ** 2

    def bounding_box(self):
        return (Interval(self.cx - self.r, self.cx + self.r),
                Interval(self.cy - self.r, self.cy + self.r))


@dataclass(frozen=True)
class GraphDomain2D:
    """Region between two graph curves over a base interval.

    kind "qplus"/"qminus"/"q" are the flat-bottom model boxes bounded by a
    positive curve f; kind "lemma33" is the disk-capped region above a C^2
    curve gamma_b with gamma_b(0) = 0, whose lateral extent (x_minus,
    x_plus) is cut by the circle of radius r0.
    """

    base: Interval
    lower: "FunctionSpec"
    upper: "FunctionSpec"
    kind: str
    r0: Optional[float] = None
    core_margin: float = 0.0

    def contains(self, x, y):
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        inside_x = (x > self.base.a) & (x < self.base.b)
        xc = np.clip(x, self.base.a, self.base.b)
        lo = self.lower.evaluate(xc.ravel()).reshape(xc.shape)
        hi = self.upper.evaluate(xc.ravel()).reshape(xc.shape)
        return inside_x & (y > lo) & (y < hi)

    def bounding_box(self):
        xs = np.linspace(self.base.a, self.base.b, 2049)
        lo = float(np.min(self.lower.evaluate(xs)))
        hi = float(np.max(self.upper.evaluate(xs)))
        return (self.base, Interval(lo, hi))


class SampledFunction:
    """Nodal values (and optionally a nodal gradient field) on a grid."""

    def __init__(self, grid, values: np.ndarray, gradient: Optional[np.ndarray] = None):
        values = np.asarray(values, dtype=float)
        if values.shape != (grid.n_active,):
            raise InputError(f"expected {grid.n_active} values, got {values.shape}")
        values.setflags(write=False)
        self.grid = grid
        self.values = values
        if gradient is not None:
            gradient = np.asarray(gradient, dtype=float)
            if gradient.ndim == 1:
                gradient = gradient[:, None]
            if gradient.shape != (grid.n_active, grid.dim):
                raise InputError(
                    f"expected gradient shape {(grid.n_active, grid.dim)}, got {gradient.shape}")
            gradient.setflags(write=False)
        self.gradient = gradient

    @property
    def has_gradient(self) -> bool:
        return self.gradient is not None

    def with_values(self, values, gradient=None) -> "SampledFunction":
        return SampledFunction(self.grid, values, gradient)

    def gradient_field(self) -> "VectorField":
        if self.gradient is None:
            raise InputError("gradient not available on this sample")
        return VectorField(self.grid, self.gradient)


@dataclass(frozen=True)
class VectorField:
    """d-component nodal field on a grid (e.g. a gradient)."""

    grid: object
    components: np.ndarray = field(repr=False)

    def __post_init__(self):
        comps = np.asarray(self.components, dtype=float)
        if comps.ndim == 1:
            comps = comps[:, None]
        if comps.shape != (self.grid.n_active, self.grid.dim):
            raise InputError(
                f"expected components shape {(self.grid.n_active, self.grid.dim)}, "
                f"got {comps.shape}")
        comps.setflags(write=False)
        object.__setattr__(self, "components", comps)

    def component(self, i: int) -> SampledFunction:
        return SampledFunction(self.grid, self.components[:, i])


# --------------------------------------------------------------------------
# function families
# --------------------------------------------------------------------------

def _coeffs_1d(seed, degree, decay):
    rng = np.random.default_rng(seed)
    k = np.arange(1, degree + 1, dtype=float)
    a = rng.normal(size=degree) / k ** decay
    b = rng.normal(size=degree) / k ** decay
    return k, a, b


def _coeffs_2d(seed, degree, decay):
    rng = np.random.default_rng(seed)
    ks, ls, amp_a, amp_b = [], [], [], []
    for k in range(0, degree + 1):
        for l in range(0, degree + 1):
            if k == 0 and l == 0:
                continue
            ks.append(k)
            ls.append(l)
    ks = np.array(ks, dtype=float)
    ls = np.array(ls, dtype=float)
    w = (1.0 + ks ** 2 + ls ** 2) ** (decay / 2.0)
    amp_a = rng.normal(size=ks.size) / w
    amp_b = rng.normal(size=ks.size) / w
    return ks, ls, amp_a, amp_b


def _plateau_vals(x, n):
    up = smoothstep((x - 0.5 / n) * (2.0 * n))
    down = smoothstep((1.0 - x - 0.5 / n) * (2.0 * n))
    return np.minimum(up, down)


def _plateau_grad(x, n):
    up = smoothstep((x - 0.5 / n) * (2.0 * n))
    down = smoothstep((1.0 - x - 0.5 / n) * (2.0 * n))
    dup = smoothstep_prime((x - 0.5 / n) * (2.0 * n)) * 2.0 * n
    ddn = -smoothstep_prime((1.0 - x - 0.5 / n) * (2.0 * n)) * 2.0 * n
    return np.where(up <= down, dup, ddn)


def _cutoff_chi(x, inner, outer):
    return smoothstep((outer - np.abs(x)) / (outer - inner))


def _cutoff_chi_prime(x, inner, outer):
    return (smoothstep_prime((outer - np.abs(x)) / (outer - inner))
            * (-np.sign(x) / (outer - inner)))


@dataclass(frozen=True)
class FunctionSpec:
    """Named, parameterized function family; reproducible from (family,
    params, seed) and evaluable at arbitrary points of its domain."""

    family: str
    params: tuple = ()
    seed: Optional[int] = None

    def __post_init__(self):
        if isinstance(self.params, dict):
            object.__setattr__(self, "params", tuple(sorted(self.params.items())))
        if self.family not in _FAMILIES:
            raise ParameterError(f"unknown function family '{self.family}'")

    def _p(self, name, default=None):
        d = dict(self.params)
        if name in d:
            return d[name]
        if default is None:
            raise ParameterError(f"family '{self.family}' needs parameter '{name}'")
        return default

    @property
    def dim(self) -> int:
        return _FAMILIES[self.family][0]

    def domain_interval(self) -> Optional[Interval]:
        """Natural domain for families that have one (else None = global)."""
        if self.family == "plateau":
            return Interval(0.0, 1.0)
        return None

    def evaluate(self, points) -> np.ndarray:
        return _FAMILIES[self.family][1](self, np.asarray(points, dtype=float))

    def gradient(self, points) -> Optional[np.ndarray]:
        g = _FAMILIES[self.family][2]
        return None if g is None else g(self, np.asarray(points, dtype=float))

    @property
    def has_gradient(self) -> bool:
        return _FAMILIES[self.family][2] is not None

    def derivative(self, x) -> np.ndarray:
        """1D derivative, for specs used as boundary curves."""
        if self.dim != 1:
            raise ParameterError("derivative() is for 1D families")
        g = self.gradient(x)
        if g is None:
            raise ParameterError(f"family '{self.family}' has no analytic derivative")
        return g[:, 0] if g.ndim > 1 else g

    def to_dict(self):
        return {"family": self.family, "params": dict(self.params), "seed": self.seed}

    @staticmethod
    def from_dict(d) -> "FunctionSpec":
        return FunctionSpec(d["family"], tuple(sorted(d.get("params", {}).items())),
                            d.get("seed"))


def _f_constant(spec, x):
    c = spec._p("c", 1.0)
    base = x if x.ndim == 1 else x[..., 0]
    return np.full_like(np.asarray(base, dtype=float), c)


def _g_constant(spec, x):
    if x.ndim == 1:
        return np.zeros((x.shape[0], 1))
    return np.zeros_like(x)


def _f_linear(spec, x):
    return spec._p("slope", 1.0) * x + spec._p("intercept", 0.0)


def _g_linear(spec, x):
    return np.full((x.shape[0], 1), spec._p("slope", 1.0))


def _f_indicator(spec, x):
    return (x > spec._p("threshold", 0.5)).astype(float)


def _f_sine(spec, x):
    w = 2.0 * math.pi * spec._p("freq", 1.0)
    return spec._p("amplitude", 1.0) * np.sin(w * x + spec._p("phase", 0.0))


def _g_sine(spec, x):
    w = 2.0 * math.pi * spec._p("freq", 1.0)
    return (spec._p("amplitude", 1.0) * w * np.cos(w * x + spec._p("phase", 0.0)))[:, None]


def _f_cosine(spec, x):
    w = 2.0 * math.pi * spec._p("freq", 1.0)
    return spec._p("amplitude", 1.0) * np.cos(w * x + spec._p("phase", 0.0))


def _g_cosine(spec, x):
    w = 2.0 * math.pi * spec._p("freq", 1.0)
    return (-spec._p("amplitude", 1.0) * w * np.sin(w * x + spec._p("phase", 0.0)))[:, None]


def _f_gaussian(spec, x):
    c, w = spec._p("center", 0.5), spec._p("width", 0.1)
    return spec._p("amplitude", 1.0) * np.exp(-((x - c) ** 2) / (2 * w * w))


def _g_gaussian(spec, x):
    c, w = spec._p("center", 0.5), spec._p("width", 0.1)
    return (_f_gaussian(spec, x) * (-(x - c) / (w * w)))[:, None]


def _f_bump_pair(spec, x):
    c, w = spec._p("offset", 0.2), spec._p("width", 0.05)
    ctr = spec._p("center", 0.5)
    return (np.exp(-((x - ctr - c) ** 2) / (2 * w * w))
            - np.exp(-((x - ctr + c) ** 2) / (2 * w * w)))


def _g_bump_pair(spec, x):
    c, w = spec._p("offset", 0.2), spec._p("width", 0.05)
    ctr = spec._p("center", 0.5)
    g = (np.exp(-((x - ctr - c) ** 2) / (2 * w * w)) * (-(x - ctr - c) / (w * w))
         - np.exp(-((x - ctr + c) ** 2) / (2 * w * w)) * (-(x - ctr + c) / (w * w)))
    return g[:, None]


def _f_x_cutoff(spec, x):
    inner, outer = spec._p("inner", 0.25), spec._p("outer", 0.5)
    return x * _cutoff_chi(x, inner, outer)


def _g_x_cutoff(spec, x):
    inner, outer = spec._p("inner", 0.25), spec._p("outer", 0.5)
    return (_cutoff_chi(x, inner, outer) + x * _cutoff_chi_prime(x, inner, outer))[:, None]


def _f_plateau(spec, x):
    return _plateau_vals(x, spec._p("n"))


def _g_plateau(spec, x):
    return _plateau_grad(x, spec._p("n"))[:, None]


def _f_polynomial(spec, x):
    coeffs = [spec._p(f"c{i}", 0.0) for i in range(int(spec._p("order", 2)) + 1)]
    return np.polynomial.polynomial.polyval(x, coeffs)


def _g_polynomial(spec, x):
    order = int(spec._p("order", 2))
    coeffs = [spec._p(f"c{i}", 0.0) for i in range(order + 1)]
    dcoeffs = [i * coeffs[i] for i in range(1, order + 1)] or [0.0]
    return np.polynomial.polynomial.polyval(x, dcoeffs)[:, None]


def _f_circle_arc(spec, x):
    r0 = spec._p("r0")
    return np.sqrt(np.maximum(r0 * r0 - x * x, 0.0))


def _g_circle_arc(spec, x):
    r0 = spec._p("r0")
    y = np.sqrt(np.maximum(r0 * r0 - x * x, 1e-300))
    return (-x / y)[:, None]


def _f_random_trig(spec, x):
    k, a, b = _coeffs_1d(spec.seed, int(spec._p("degree", 12)), spec._p("decay", 1.5))
    w = 2.0 * math.pi * k
    return np.cos(np.outer(x, w)) @ a + np.sin(np.outer(x, w)) @ b


def _g_random_trig(spec, x):
    k, a, b = _coeffs_1d(spec.seed, int(spec._p("degree", 12)), spec._p("decay", 1.5))
    w = 2.0 * math.pi * k
    return (-np.sin(np.outer(x, w)) @ (a * w) + np.cos(np.outer(x, w)) @ (b * w))[:, None]


def _f_linear2d(spec, p):
    return (spec._p("gx", 0.0) * p[..., 0] + spec._p("gy", 1.0) * p[..., 1]
            + spec._p("c", 0.0))


def _g_linear2d(spec, p):
    n = p.shape[0]
    return np.column_stack([np.full(n, spec._p("gx", 0.0)), np.full(n, spec._p("gy", 1.0))])


def _f_gaussian2d(spec, p):
    cx, cy = spec._p("cx", 0.0), spec._p("cy", 0.0)
    w = spec._p("width", 0.2)
    r2 = (p[..., 0] - cx) ** 2 + (p[..., 1] - cy) ** 2
    return spec._p("amplitude", 1.0) * np.exp(-r2 / (2 * w * w))


def _g_gaussian2d(spec, p):
    cx, cy = spec._p("cx", 0.0), spec._p("cy", 0.0)
    w = spec._p("width", 0.2)
    v = _f_gaussian2d(spec, p)
    return np.column_stack([v * (-(p[..., 0] - cx) / (w * w)),
                            v * (-(p[..., 1] - cy) / (w * w))])


def _f_random_trig2d(spec, p):
    ks, ls, a, b = _coeffs_2d(spec.seed, int(spec._p("degree", 3)), spec._p("decay", 2.0))
    phase = math.pi * (np.outer(p[..., 0], ks) + np.outer(p[..., 1], ls))
    return np.cos(phase) @ a + np.sin(phase) @ b


def _g_random_trig2d(spec, p):
    ks, ls, a, b = _coeffs_2d(spec.seed, int(spec._p("degree", 3)), spec._p("decay", 2.0))
    phase = math.pi * (np.outer(p[..., 0], ks) + np.outer(p[..., 1], ls))
    s, c = np.sin(phase), np.cos(phase)
    gx = -s @ (a * ks * math.pi) + c @ (b * ks * math.pi)
    gy = -s @ (a * ls * math.pi) + c @ (b * ls * math.pi)
    return np.column_stack([gx, gy])


def _f_bump2d(spec, p):
    # compactly supported radial smoothstep bump: amplitude inside
    # radius-ramp, identically 0 outside radius
    cx, cy = spec._p("cx", 0.0), spec._p("cy", 0.0)
    rad, ramp = spec._p("radius", 0.3), spec._p("ramp", 0.15)
    r = np.hypot(p[..., 0] - cx, p[..., 1] - cy)
    return spec._p("amplitude", 1.0) * smoothstep((rad - r) / ramp)


def _g_bump2d(spec, p):
    cx, cy = spec._p("cx", 0.0), spec._p("cy", 0.0)
    rad, ramp = spec._p("radius", 0.3), spec._p("ramp", 0.15)
    dx = p[..., 0] - cx
    dy = p[..., 1] - cy
    r = np.hypot(dx, dy)
    amp = spec._p("amplitude", 1.0)
    ds = amp * smoothstep_prime((rad - r) / ramp) / ramp
    with np.errstate(invalid="ignore", divide="ignore"):
        ux = np.where(r > 0, dx / r, 0.0)
        uy = np.where(r > 0, dy / r, 0.0)
    return np.column_stack([-ds * ux, -ds * uy])


def _core_profile(spec):
    hw = spec._p("halfwidth", 0.7)
    ytop = spec._p("ytop", 0.7)
    rng = np.random.default_rng(spec.seed)
    c = rng.normal(size=3)
    return hw, ytop, c


def _f_core_field(spec, p):
    # collar field on a flat-bottom chart: nonzero at y2 = 0, compactly
    # supported in |y1| <= halfwidth, 0 <= y2 <= ytop
    hw, ytop, c = _core_profile(spec)
    y1, y2 = p[..., 0], p[..., 1]
    bump = smoothstep((hw - np.abs(y1)) / (0.4 * hw))
    decay = smoothstep((ytop - y2) / (0.4 * ytop))
    poly = c[0] + c[1] * y2 + c[2] * y2 * y2
    return bump * decay * poly


def _g_core_field(spec, p):
    hw, ytop, c = _core_profile(spec)
    y1, y2 = p[..., 0], p[..., 1]
    bump = smoothstep((hw - np.abs(y1)) / (0.4 * hw))
    dbump = smoothstep_prime((hw - np.abs(y1)) / (0.4 * hw)) * (-np.sign(y1) / (0.4 * hw))
    decay = smoothstep((ytop - y2) / (0.4 * ytop))
    ddecay = smoothstep_prime((ytop - y2) / (0.4 * ytop)) * (-1.0 / (0.4 * ytop))
    poly = c[0] + c[1] * y2 + c[2] * y2 * y2
    dpoly = c[1] + 2.0 * c[2] * y2
    return np.column_stack([dbump * decay * poly,
                            bump * (ddecay * poly + decay * dpoly)])


_FAMILIES = {
    # name: (dim, value, gradient-or-None)
    "constant": (1, _f_constant, _g_constant),
    "linear": (1, _f_linear, _g_linear),
    "indicator": (1, _f_indicator, None),
    "sine": (1, _f_sine, _g_sine),
    "cosine": (1, _f_cosine, _g_cosine),
    "gaussian": (1, _f_gaussian, _g_gaussian),
    "bump_pair": (1, _f_bump_pair, _g_bump_pair),
    "x_cutoff": (1, _f_x_cutoff, _g_x_cutoff),
    "plateau": (1, _f_plateau, _g_plateau),
    "polynomial": (1, _f_polynomial, _g_polynomial),
    "circle_arc": (1, _f_circle_arc, _g_circle_arc),
    "random_trig": (1, _f_random_trig, _g_random_trig),
    "constant2d": (2, _f_constant, _g_constant),
    "linear2d": (2, _f_linear2d, _g_linear2d),
    "gaussian2d": (2, _f_gaussian2d, _g_gaussian2d),
    "bump2d": (2, _f_bump2d, _g_bump2d),
    "random_trig2d": (2, _f_random_trig2d, _g_random_trig2d),
    "core_field": (2, _f_core_field, _g_core_field),
}


def _fd_gradient_1d(values: np.ndarray, h: float) -> np.ndarray:
    g = np.empty_like(values)
    g[1:-1] = (values[2:] - values[:-2]) / (2 * h)
    g[0] = (values[1] - values[0]) / h
    g[-1] = (values[-1] - values[-2]) / h
    return g[:, None]


def _fd_gradient_2d_full(grid: Grid2D, values: np.ndarray) -> np.ndarray:
    V = values.reshape(grid.nx, grid.ny)
    gx = np.empty_like(V)
    gy = np.empty_like(V)
    gx[1:-1, :] = (V[2:, :] - V[:-2, :]) / (2 * grid.hx)
    gx[0, :] = (V[1, :] - V[0, :]) / grid.hx
    gx[-1, :] = (V[-1, :] - V[-2, :]) / grid.hx
    gy[:, 1:-1] = (V[:, 2:] - V[:, :-2]) / (2 * grid.hy)
    gy[:, 0] = (V[:, 1] - V[:, 0]) / grid.hy
    gy[:, -1] = (V[:, -1] - V[:, -2]) / grid.hy
    return np.column_stack([gx.ravel(), gy.ravel()])


def sample(spec: FunctionSpec, grid) -> SampledFunction:
    """Evaluate a function family at the grid nodes.

    The analytic gradient is attached when the family provides one;
    otherwise centered finite differences are used (one-sided at the
    boundary).  Raises DomainError when the family dimension or natural
    domain does not cover the grid.
    """
    if spec.dim != grid.dim:
        raise DomainError(
            f"family '{spec.family}' is {spec.dim}D but grid is {grid.dim}D")
    nat = spec.domain_interval()
    if nat is not None and grid.dim == 1:
        if grid.interval.a < nat.a - 1e-12 or grid.interval.b > nat.b + 1e-12:
            raise DomainError(
                f"family '{spec.family}' lives on [{nat.a}, {nat.b}], grid is "
                f"[{grid.interval.a}, {grid.interval.b}]")
    pts = grid.points
    values = spec.evaluate(pts)
    grad = spec.gradient(pts)
    if grad is None:
        if grid.dim == 1:
            grad = _fd_gradient_1d(values, grid.h)
        elif grid.is_full:
            grad = _fd_gradient_2d_full(grid, values)
        else:
            grad = None  # no finite-difference rule across a masked grid
    return SampledFunction(grid, values, grad)


def _check_c2(curve: FunctionSpec, interval: Interval, bound: float, npts: int = 513):
    xs = np.linspace(interval.a, interval.b, npts)
    v = curve.evaluate(xs)
    h = xs[1] - xs[0]
    second = np.abs(np.diff(v, 2)) / (h * h)
    worst = float(second.max()) if second.size else 0.0
    if worst > bound:
        raise GeometryError(
            f"curve fails the C2 check: max |second difference| {worst:.3g} "
            f"exceeds the supplied bound {bound:.3g}")


def build_graph_domain(curve_spec: FunctionSpec, kind: str, r0: float = 1.0,
                       core_margin: float = 0.0, c2_bound: float = 100.0,
                       base: Optional[Interval] = None) -> GraphDomain2D:
    """Assemble a graph-bounded domain of one of the model kinds.

    For the flat-bottom kinds the supplied curve is the positive upper
    profile f; for "lemma33" it is the lower boundary curve (gamma_b(0)=0)
    capped by the circle of radius r0, and the lateral endpoints are the
    intersection abscissas found by bisection.
    """
    zero = FunctionSpec("constant", (("c", 0.0),))
    if kind in ("qplus", "qminus", "q"):
        b = base or Interval(-1.0, 1.0)
        _check_c2(curve_spec, b, c2_bound)
        f_min = float(np.min(curve_spec.evaluate(np.linspace(b.a, b.b, 2049))))
        if f_min <= 0:
            raise GeometryError("upper profile must be strictly positive")
        if kind == "qplus":
            lo, hi = zero, curve_spec
        elif kind == "qminus":
            lo, hi = _negated(curve_spec), zero
        else:
            lo, hi = _negated(curve_spec), curve_spec
        return GraphDomain2D(b, lo, hi, kind, r0=None, core_margin=core_margin)
    if kind != "lemma33":
        raise ParameterError(f"unknown domain kind '{kind}'")
    if r0 <= 0:
        raise GeometryError("lemma33 domain needs r0 > 0")
    probe = Interval(-r0, r0)
    _check_c2(curve_spec, probe, c2_bound)
    g0 = float(curve_spec.evaluate(np.array([0.0]))[0])
    if abs(g0) > 1e-12:
        raise GeometryError(f"lemma33 curve must vanish at 0, got {g0}")
    arc = FunctionSpec("circle_arc", (("r0", r0),))

    def gap(x):
        return (math.sqrt(max(r0 * r0 - x * x, 0.0))
                - float(curve_spec.evaluate(np.array([x]))[0]))

    def _endpoint(direction):
        xs = np.linspace(0.0, direction * r0, 2049)
        vals = np.array([gap(x) for x in xs])
        idx = np.nonzero(vals <= 0.0)[0]
        if idx.size == 0:
            if abs(vals[-1]) < 1e-9:
                return direction * r0
            raise GeometryError("no intersection of the curve with the circle")
        k = idx[0]
        if k == 0:
            raise GeometryError("curve lies outside the circle at x = 0")
        if vals[k] == 0.0:
            return float(xs[k])
        return float(bisect(gap, xs[k - 1], xs[k], xtol=1e-13))

    x_plus = _endpoint(+1.0)
    x_minus = _endpoint(-1.0)
    return GraphDomain2D(Interval(x_minus, x_plus), curve_spec, arc, "lemma33",
                         r0=r0, core_margin=core_margin)


def _negated(spec: FunctionSpec) -> FunctionSpec:
    if spec.family == "constant":
        return FunctionSpec("constant", (("c", -spec._p("c", 1.0)),))
    if spec.family == "polynomial":
        order = int(spec._p("order", 2))
        params = [("order", order)] + [(f"c{i}", -spec._p(f"c{i}", 0.0))
                                       for i in range(order + 1)]
        return FunctionSpec("polynomial", tuple(params))
    raise ParameterError(f"cannot negate family '{spec.family}'")


def distance_to_complement(x, dom) -> float:
    """Distance from an interior point to the complement of the domain."""
    if isinstance(dom, Interval):
        x = float(x)
        if not (dom.a < x < dom.b):
            raise DomainError(f"{x} is not inside ({dom.a}, {dom.b})")
        return min(x - dom.a, dom.b - x)
    if isinstance(dom, Disk):
        p = np.asarray(x, dtype=float)
        d = math.hypot(p[0] - dom.cx, p[1] - dom.cy)
        if d >= dom.r:
            raise DomainError("point is not inside the disk")
        return dom.r - d
    raise DomainError(f"no boundary-distance rule for {type(dom).__name__}")


def distances_to_complement(xs: np.ndarray, interval: Interval) -> np.ndarray:
    """Vectorized interval variant; all points must lie inside."""
    xs = np.asarray(xs, dtype=float)
    if np.any(xs <= interval.a) or np.any(xs >= interval.b):
        raise DomainError("points must lie strictly inside the interval")
    return np.minimum(xs - interval.a, interval.b - xs)
