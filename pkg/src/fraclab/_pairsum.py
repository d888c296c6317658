"""Tiled O(N^2) pair-summation kernels for singular-kernel quadrature.

All kernels share the same reduction contract: work is split over tile
pairs of a fixed tile size, each tile pair is accumulated by exactly one
parallel task into its own slot, and the slots are combined in a fixed
sequential order.  The result is therefore bit-identical for any worker
count (only the amount of parallelism changes, never the summation
order).

Weights are powers of the squared distance, w = r2**(-q).  When 8*q is
an integer the power is evaluated through a sqrt chain plus an integer
power, which is substantially cheaper than libm pow and covers the
exponents that dominate the workload (gamma in quarters).
"""

import numpy as np
from numba import get_num_threads, njit, prange, set_num_threads

TILE = 2048

__all__ = [
    "pair_sum",
    "pair_sum_periodic",
    "cross_reflection_sum",
    "periodic_remainder_table_1d",
    "periodic_remainder_table_2d",
    "use_threads",
    "max_threads",
]


def max_threads() -> int:
    import numba

    return numba.config.NUMBA_NUM_THREADS


def use_threads(k: int) -> int:
    """Set the numba worker count, clamped to what the host allows.

    Returns the count actually in effect.  Results never depend on it.
    """
    k = max(1, min(int(k), max_threads()))
    set_num_threads(k)
    return get_num_threads()


@njit(cache=True, fastmath=True, parallel=True)
def _pair_sum_1d(x, vals, q, dyadic, m8, tis, tjs):
    n = x.shape[0]
    nch = vals.shape[1]
    npair = tis.shape[0]
    partial = np.zeros((npair, nch))
    for t in prange(npair):
        ti = tis[t]
        tj = tjs[t]
        i0 = ti * TILE
        i1 = min(i0 + TILE, n)
        j0 = tj * TILE
        j1 = min(j0 + TILE, n)
        acc = np.zeros(nch)
        for i in range(i0, i1):
            xi = x[i]
            jlo = i + 1 if ti == tj else j0
            for j in range(jlo, j1):
                dx = x[j] - xi
                r2 = dx * dx
                if dyadic:
                    s = np.sqrt(np.sqrt(np.sqrt(r2)))
                    w = 1.0 / s ** m8
                else:
                    w = r2 ** (-q)
                for c in range(nch):
                    d = vals[j, c] - vals[i, c]
                    acc[c] += d * d * w
        partial[t] = acc
    out = np.zeros(nch)
    for t in range(npair):
        for c in range(nch):
            out[c] += partial[t, c]
    return out


@njit(cache=True, fastmath=True, parallel=True)
def _pair_sum_2d(p1, p2, vals, q, dyadic, m8, tis, tjs):
    n = p1.shape[0]
    nch = vals.shape[1]
    npair = tis.shape[0]
    partial = np.zeros((npair, nch))
    for t in prange(npair):
        ti = tis[t]
        tj = tjs[t]
        i0 = ti * TILE
        i1 = min(i0 + TILE, n)
        j0 = tj * TILE
        j1 = min(j0 + TILE, n)
        acc = np.zeros(nch)
        for i in range(i0, i1):
            xi = p1[i]
            yi = p2[i]
            jlo = i + 1 if ti == tj else j0
            for j in range(jlo, j1):
                dx = p1[j] - xi
                dy = p2[j] - yi
                r2 = dx * dx + dy * dy
                if dyadic:
                    s = np.sqrt(np.sqrt(np.sqrt(r2)))
                    w = 1.0 / s ** m8
                else:
                    w = r2 ** (-q)
                for c in range(nch):
                    d = vals[j, c] - vals[i, c]
                    acc[c] += d * d * w
        partial[t] = acc
    out = np.zeros(nch)
    for t in range(npair):
        for c in range(nch):
            out[c] += partial[t, c]
    return out


@njit(cache=True, fastmath=True, parallel=True)
def _pair_sum_1d_periodic(x, vals, q, dyadic, m8, period, table, dz, tis, tjs):
    n = x.shape[0]
    nch = vals.shape[1]
    half = 0.5 * period
    npair = tis.shape[0]
    partial = np.zeros((npair, nch))
    nt = table.shape[0]
    for t in prange(npair):
        ti = tis[t]
        tj = tjs[t]
        i0 = ti * TILE
        i1 = min(i0 + TILE, n)
        j0 = tj * TILE
        j1 = min(j0 + TILE, n)
        acc = np.zeros(nch)
        for i in range(i0, i1):
            xi = x[i]
            jlo = i + 1 if ti == tj else j0
            for j in range(jlo, j1):
                dx = x[j] - xi
                if dx > half:
                    dx -= period
                elif dx < -half:
                    dx += period
                r2 = dx * dx
                if dyadic:
                    s = np.sqrt(np.sqrt(np.sqrt(r2)))
                    w = 1.0 / s ** m8
                else:
                    w = r2 ** (-q)
                # smooth image remainder, linear interpolation on [0, half]
                z = abs(dx)
                u = z / dz
                k = int(u)
                if k >= nt - 1:
                    k = nt - 2
                fr = u - k
                w += table[k] * (1.0 - fr) + table[k + 1] * fr
                for c in range(nch):
                    d = vals[j, c] - vals[i, c]
                    acc[c] += d * d * w
        partial[t] = acc
    out = np.zeros(nch)
    for t in range(npair):
        for c in range(nch):
            out[c] += partial[t, c]
    return out


@njit(cache=True, fastmath=True, parallel=True)
def _pair_sum_2d_periodic(p1, p2, vals, q, dyadic, m8, per1, per2, table, dz1, dz2, tis, tjs):
    n = p1.shape[0]
    nch = vals.shape[1]
    h1 = 0.5 * per1
    h2 = 0.5 * per2
    nt1 = table.shape[0]
    nt2 = table.shape[1]
    npair = tis.shape[0]
    partial = np.zeros((npair, nch))
    for t in prange(npair):
        ti = tis[t]
        tj = tjs[t]
        i0 = ti * TILE
        i1 = min(i0 + TILE, n)
        j0 = tj * TILE
        j1 = min(j0 + TILE, n)
        acc = np.zeros(nch)
        for i in range(i0, i1):
            xi = p1[i]
            yi = p2[i]
            jlo = i + 1 if ti == tj else j0
            for j in range(jlo, j1):
                dx = p1[j] - xi
                if dx > h1:
                    dx -= per1
                elif dx < -h1:
                    dx += per1
                dy = p2[j] - yi
                if dy > h2:
                    dy -= per2
                elif dy < -h2:
                    dy += per2
                r2 = dx * dx + dy * dy
                if dyadic:
                    s = np.sqrt(np.sqrt(np.sqrt(r2)))
                    w = 1.0 / s ** m8
                else:
                    w = r2 ** (-q)
                u = abs(dx) / dz1
                v = abs(dy) / dz2
                ku = int(u)
                kv = int(v)
                if ku >= nt1 - 1:
                    ku = nt1 - 2
                if kv >= nt2 - 1:
                    kv = nt2 - 2
                fu = u - ku
                fv = v - kv
                w += (
                    table[ku, kv] * (1 - fu) * (1 - fv)
                    + table[ku + 1, kv] * fu * (1 - fv)
                    + table[ku, kv + 1] * (1 - fu) * fv
                    + table[ku + 1, kv + 1] * fu * fv
                )
                for c in range(nch):
                    d = vals[j, c] - vals[i, c]
                    acc[c] += d * d * w
        partial[t] = acc
    out = np.zeros(nch)
    for t in range(npair):
        for c in range(nch):
            out[c] += partial[t, c]
    return out


@njit(cache=True, fastmath=True, parallel=True)
def _cross_reflection_2d(p1, p2, gsq, p):
    # sum over all ordered pairs (x, y) of gsq[y] / (|x1-y1| + (x2+y2))^p,
    # x2, y2 > 0 so the kernel is finite everywhere including x == y
    n = p1.shape[0]
    ntile = (n + TILE - 1) // TILE
    partial = np.zeros(ntile)
    for t in prange(ntile):
        j0 = t * TILE
        j1 = min(j0 + TILE, n)
        acc = 0.0
        for j in range(j0, j1):
            yj1 = p1[j]
            yj2 = p2[j]
            wsum = 0.0
            for i in range(n):
                den = abs(p1[i] - yj1) + (p2[i] + yj2)
                wsum += den ** (-p)
            acc += gsq[j] * wsum
        partial[t] = acc
    out = 0.0
    for t in range(ntile):
        out += partial[t]
    return out


def _tile_indices(n: int):
    ntile = (n + TILE - 1) // TILE
    tis, tjs = np.triu_indices(ntile)
    return tis.astype(np.int64), tjs.astype(np.int64)


def _exponent_form(q: float):
    m8 = int(round(8.0 * q))
    dyadic = abs(8.0 * q - m8) < 1e-12 and 0 < m8 < 64
    return dyadic, m8


def _as_channels(values: np.ndarray) -> np.ndarray:
    v = np.ascontiguousarray(np.atleast_2d(values.T).T if values.ndim == 1 else values, dtype=np.float64)
    if v.ndim == 1:
        v = v[:, None]
    return v


def pair_sum(points: np.ndarray, values: np.ndarray, gamma: float, cell_measure: float) -> np.ndarray:
    """Ordered-pair Gagliardo sums, diagonal pairs excluded.

    points: (N,) for 1D or (N, 2) for 2D node coordinates.
    values: (N,) or (N, C); one sum per channel is returned.
    Result channel c equals
        sum_{i != j} (v[i,c]-v[j,c])^2 / |x_i-x_j|^(d+2*gamma) * cell_measure^2.
    """
    v = _as_channels(values)
    if points.ndim == 1:
        q = 0.5 + gamma
        dyadic, m8 = _exponent_form(q)
        tis, tjs = _tile_indices(points.shape[0])
        raw = _pair_sum_1d(np.ascontiguousarray(points, dtype=np.float64), v, q, dyadic, m8, tis, tjs)
    else:
        q = 1.0 + gamma
        dyadic, m8 = _exponent_form(q)
        tis, tjs = _tile_indices(points.shape[0])
        raw = _pair_sum_2d(
            np.ascontiguousarray(points[:, 0], dtype=np.float64),
            np.ascontiguousarray(points[:, 1], dtype=np.float64),
            v, q, dyadic, m8, tis, tjs,
        )
    return raw * (2.0 * cell_measure * cell_measure)


def periodic_remainder_table_1d(gamma: float, period: float, npts: int = 4097, images: int = 64) -> np.ndarray:
    """Smooth part of the periodized kernel sum_m |z+m*L|^-(1+2g), m != 0,
    tabulated on [0, L/2].  The tail beyond the last image is folded in
    through its midpoint-rule integral."""
    p = 1.0 + 2.0 * gamma
    z = np.linspace(0.0, 0.5 * period, npts)
    r = np.zeros_like(z)
    for m in range(1, images + 1):
        r += (m * period + z) ** (-p) + (m * period - z) ** (-p)
    edge = (images + 0.5) * period
    r += ((edge + z) ** (-2 * gamma) + (edge - z) ** (-2 * gamma)) / (2 * gamma * period)
    return r


def periodic_remainder_table_2d(gamma: float, per1: float, per2: float,
                                npts: int = 257, images: int = 40) -> np.ndarray:
    """Smooth part of the 2D periodized kernel over the image lattice,
    tabulated on [0, L1/2] x [0, L2/2]."""
    p = 2.0 + 2.0 * gamma
    z1 = np.linspace(0.0, 0.5 * per1, npts)
    z2 = np.linspace(0.0, 0.5 * per2, npts)
    Z1, Z2 = np.meshgrid(z1, z2, indexing="ij")
    r = np.zeros_like(Z1)
    for m1 in range(-images, images + 1):
        for m2 in range(-images, images + 1):
            if m1 == 0 and m2 == 0:
                continue
            r += ((Z1 + m1 * per1) ** 2 + (Z2 + m2 * per2) ** 2) ** (-0.5 * p)
    # isotropic integral tail beyond the image block
    edge = (images + 0.5) * min(per1, per2)
    r += np.pi * edge ** (-2 * gamma) / gamma / (per1 * per2)
    return r


def pair_sum_periodic(points: np.ndarray, values: np.ndarray, gamma: float,
                      cell_measure: float, period) -> np.ndarray:
    """Pair sums with the periodized kernel sum_m |z + m*L|^(-d-2*gamma)
    (minimum-image main term plus tabulated smooth remainder)."""
    v = _as_channels(values)
    if points.ndim == 1:
        L = float(period)
        q = 0.5 + gamma
        dyadic, m8 = _exponent_form(q)
        table = periodic_remainder_table_1d(gamma, L)
        dz = (0.5 * L) / (table.shape[0] - 1)
        tis, tjs = _tile_indices(points.shape[0])
        raw = _pair_sum_1d_periodic(
            np.ascontiguousarray(points, dtype=np.float64), v, q, dyadic, m8, L, table, dz, tis, tjs
        )
    else:
        L1, L2 = (float(period[0]), float(period[1]))
        q = 1.0 + gamma
        dyadic, m8 = _exponent_form(q)
        table = periodic_remainder_table_2d(gamma, L1, L2)
        dz1 = (0.5 * L1) / (table.shape[0] - 1)
        dz2 = (0.5 * L2) / (table.shape[1] - 1)
        tis, tjs = _tile_indices(points.shape[0])
        raw = _pair_sum_2d_periodic(
            np.ascontiguousarray(points[:, 0], dtype=np.float64),
            np.ascontiguousarray(points[:, 1], dtype=np.float64),
            v, q, dyadic, m8, L1, L2, table, dz1, dz2, tis, tjs,
        )
    return raw * (2.0 * cell_measure * cell_measure)


def cross_reflection_sum(points: np.ndarray, g_values: np.ndarray, s: float, cell_area: float) -> float:
    """Sum over ordered pairs of |g(y)|^2 / (|x1-y1| + |x2+y2|)^(2+2s),
    for points in the upper half plane (second coordinate > 0)."""
    gsq = np.ascontiguousarray(g_values * g_values, dtype=np.float64)
    raw = _cross_reflection_2d(
        np.ascontiguousarray(points[:, 0], dtype=np.float64),
        np.ascontiguousarray(points[:, 1], dtype=np.float64),
        gsq, 2.0 + 2.0 * s,
    )
    return float(raw * cell_area * cell_area)
