"""Orchestrated studies: operator-norm sweeps, the kink-sharpness
refinement study, the sign-change spectral gap, the anisotropic
multiplier domination, and report emission (JSON / CSV / text summary
with golden-file comparison)."""

from __future__ import annotations

import csv
import json
import math
import os
from dataclasses import dataclass, field
from typing import List, Optional, Sequence

import numpy as np

from . import _pairsum
from .domains import (
    Disk,
    FunctionSpec,
    Grid1D,
    Grid2D,
    Interval,
    SampledFunction,
    sample,
)
from .errors import ConfigurationError, InputError, ParameterError, PreconditionError
from .hardy import InequalityReport
from .nemytskii import OPERATORS, apply
from .norms import (
    RichardsonEstimate,
    SmoothnessIndex,
    fourier_seminorm_sq,
    l2_norm_sq,
    log_divergence_signature,
    richardson,
)

__all__ = [
    "SweepConfig",
    "SweepCell",
    "SweepReport",
    "operator_norm_sweep",
    "SharpnessRow",
    "sharpness_study",
    "musina_nazarov_gap",
    "musina_nazarov_check",
    "anisotropic_multiplier_check",
    "emit_report",
    "compare_golden",
    "write_json",
    "write_csv",
]

DRIFT_TOL = 0.05


@dataclass(frozen=True)
class SweepConfig:
    operator: str
    s_list: tuple
    n_list: tuple
    seeds: int = 20
    domain: str = "interval"
    degree: int = 12
    drift_tol: float = DRIFT_TOL

    def __post_init__(self):
        if self.operator not in OPERATORS:
            raise ConfigurationError(f"operator must be one of {OPERATORS}")
        if self.domain not in ("interval", "disk"):
            raise ConfigurationError("domain must be 'interval' or 'disk'")
        for s in self.s_list:
            if not (0.0 <= s < 1.5):
                raise ConfigurationError(f"sweep orders must lie in [0, 1.5), got {s}")
        ns = list(self.n_list)
        if len(ns) < 2:
            raise ConfigurationError("need at least two grid sizes")
        for a, b in zip(ns, ns[1:]):
            if b != 2 * a:
                raise ConfigurationError("grid sizes must double (geometric schedule)")

    def to_dict(self):
        return {
            "operator": self.operator,
            "s_list": list(self.s_list),
            "n_list": list(self.n_list),
            "seeds": self.seeds,
            "domain": self.domain,
            "degree": self.degree,
        }


@dataclass
class SweepCell:
    s: float
    n: int
    max_ratio: float
    argmax_seed: int

    def to_dict(self):
        return {"s": self.s, "n": self.n, "max_ratio": self.max_ratio,
                "argmax_seed": self.argmax_seed}


@dataclass
class SweepReport:
    config: SweepConfig
    cells: List[SweepCell]
    drift: dict           # s -> relative drift at the two finest levels
    verdicts: dict        # s -> bool
    contraction_ok: bool  # T1 at s <= 1 never exceeded ratio 1 + 1e-10

    @property
    def passed(self) -> bool:
        return all(self.verdicts.values()) and self.contraction_ok

    def max_ratio(self, s: float, n: int) -> float:
        for c in self.cells:
            if c.s == s and c.n == n:
                return c.max_ratio
        raise KeyError((s, n))

    def to_dict(self):
        return {
            "config": self.config.to_dict(),
            "cells": [c.to_dict() for c in self.cells],
            "drift": {str(k): v for k, v in self.drift.items()},
            "verdicts": {str(k): bool(v) for k, v in self.verdicts.items()},
            "contraction_ok": self.contraction_ok,
            "passed": self.passed,
        }

    def to_rows(self):
        return [c.to_dict() for c in self.cells]


def _sweep_field(domain: str, n: int, seed: int, degree: int) -> SampledFunction:
    if domain == "interval":
        spec = FunctionSpec("random_trig", (("degree", degree), ("decay", 1.5)), seed)
        return sample(spec, Grid1D(Interval(0.0, 1.0), n))
    spec = FunctionSpec("random_trig2d", (("degree", 3), ("decay", 2.0)), seed)
    return sample(spec, Grid2D.from_domain(Disk(), n, n))


def _fused_norm_pair(u: SampledFunction, tu: SampledFunction, s: SmoothnessIndex):
    """Sobolev norms of u and T u sharing one multichannel pair sum."""
    grid = u.grid
    if s.s == 0.0:
        return math.sqrt(l2_norm_sq(u)), math.sqrt(l2_norm_sq(tu))
    if s.m == 0:
        sums = _pairsum.pair_sum(grid.points,
                                 np.stack([u.values, tu.values], axis=1),
                                 s.gamma, grid.cell_measure)
        return (math.sqrt(l2_norm_sq(u)) + math.sqrt(sums[0]),
                math.sqrt(l2_norm_sq(tu)) + math.sqrt(sums[1]))
    if u.gradient is None or tu.gradient is None:
        raise InputError("sweep orders above 1 need gradients")
    d = grid.dim
    chans = np.concatenate([u.gradient, tu.gradient], axis=1)
    h1_u = math.sqrt(l2_norm_sq(u) + float(np.sum(u.gradient ** 2) * grid.cell_measure))
    h1_t = math.sqrt(l2_norm_sq(tu) + float(np.sum(tu.gradient ** 2) * grid.cell_measure))
    if s.s == 1.0:
        return h1_u, h1_t
    sums = _pairsum.pair_sum(grid.points, chans, s.gamma, grid.cell_measure)
    return (h1_u + math.sqrt(float(np.sum(sums[:d]))),
            h1_t + math.sqrt(float(np.sum(sums[d:]))))


def operator_norm_sweep(cfg: SweepConfig) -> SweepReport:
    """Max ratio ||T u||_{H^s} / ||u||_{H^s} over a seeded sign-changing
    family, tabulated per (s, n); the verdict for each s requires the
    relative drift of the max ratio at the two finest levels to stay
    within cfg.drift_tol."""
    cells: List[SweepCell] = []
    contraction_ok = True
    for s_val in cfg.s_list:
        s = SmoothnessIndex(float(s_val))
        for n in cfg.n_list:
            worst = -math.inf
            argmax = -1
            for seed in range(cfg.seeds):
                u = _sweep_field(cfg.domain, n, seed, cfg.degree)
                if not (u.values.min() < 0.0 < u.values.max()):
                    raise PreconditionError(
                        f"sweep family seed {seed} does not change sign")
                tu = apply(cfg.operator, u)
                nu, nt = _fused_norm_pair(u, tu, s)
                ratio = math.nan if nu == 0 else nt / nu
                if ratio > worst:
                    worst = ratio
                    argmax = seed
            if cfg.operator == "T1" and s.s <= 1.0 and worst > 1.0 + 1e-10:
                contraction_ok = False
            cells.append(SweepCell(s.s, n, worst, argmax))
    drift = {}
    verdicts = {}
    for s_val in cfg.s_list:
        s = float(s_val)
        col = [c.max_ratio for c in cells if c.s == s]
        d = abs(col[-1] - col[-2]) / abs(col[-2])
        drift[s] = d
        verdicts[s] = d <= cfg.drift_tol
    return SweepReport(cfg, cells, drift, verdicts, contraction_ok)


# --------------------------------------------------------------------------
# sharpness of the s = 3/2 threshold
# --------------------------------------------------------------------------

@dataclass
class SharpnessRow:
    s: float
    operator: str
    n_list: tuple
    values_sq: tuple
    verdict: str
    limit: float
    rate: float

    def to_dict(self):
        return {"s": self.s, "operator": self.operator, "n_list": list(self.n_list),
                "values_sq": list(self.values_sq), "verdict": self.verdict,
                "limit": self.limit, "rate": self.rate}


DEFAULT_SHARPNESS_SCHEDULE = (512, 1024, 2048, 4096, 8192, 16384)


def _norm_sq_curve(op: Optional[str], s: float, schedule) -> tuple:
    from .norms import sobolev_norm

    out = []
    for n in schedule:
        grid = Grid1D(Interval(-1.0, 1.0), n)
        phi = sample(FunctionSpec("x_cutoff"), grid)
        f = apply(op, phi) if op else phi
        out.append(sobolev_norm(f, s).value_sq)
    return tuple(out)


def sharpness_study(s_list: Sequence[float] = (1.25, 1.4, 1.45, 1.5),
                    schedule: Sequence[int] = DEFAULT_SHARPNESS_SCHEDULE,
                    include_smooth_row: bool = True) -> List[SharpnessRow]:
    """Refinement behavior of ||T1 phi||^2_{H^s} for the x-cutoff kink
    function phi: Richardson convergence below 3/2, the log-divergence
    signature at exactly 3/2.  The optional smooth row tracks phi itself
    at s = 3/2 (convergent: the divergence belongs to the kink)."""
    rows: List[SharpnessRow] = []
    for s in s_list:
        vals = _norm_sq_curve("T1", float(s), schedule)
        diverges = log_divergence_signature(vals)
        est = richardson(*vals[-3:])
        verdict = "diverges" if diverges else ("converges" if est.ok else "inconclusive")
        rows.append(SharpnessRow(float(s), "T1", tuple(schedule), vals, verdict,
                                 est.limit, est.rate))
    if include_smooth_row:
        vals = _norm_sq_curve(None, 1.5, schedule)
        est = richardson(*vals[-3:])
        verdict = "diverges" if log_divergence_signature(vals) else (
            "converges" if est.ok else "inconclusive")
        rows.append(SharpnessRow(1.5, "identity", tuple(schedule), vals, verdict,
                                 est.limit, est.rate))
    return rows


# --------------------------------------------------------------------------
# sign-change spectral gap
# --------------------------------------------------------------------------

def musina_nazarov_gap(u: SampledFunction, s: float) -> float:
    """Gap <(-Delta)^s |u|, |u|> - <(-Delta)^s u, u> of the spectral
    quadratic forms on the grid period.  Zero exactly when u >= 0."""
    if not (1.0 < s < 1.5):
        raise ParameterError(f"the strict gap regime is 1 < s < 3/2, got {s}")
    lhs = fourier_seminorm_sq(u.with_values(np.abs(u.values)), s)
    rhs = fourier_seminorm_sq(u, s)
    return lhs - rhs


def musina_nazarov_check(s_list: Sequence[float] = (1.1, 1.25, 1.4),
                         seeds: int = 20, n: int = 2048) -> List[InequalityReport]:
    """Strict positivity of the gap for a seeded family of sign-changing,
    compactly supported fields on the unit period."""
    grid = Grid1D(Interval(0.0, 1.0), n)
    env = FunctionSpec("gaussian", (("center", 0.5), ("width", 0.08))).evaluate(grid.nodes)
    reports: List[InequalityReport] = []
    for s in s_list:
        for seed in range(seeds):
            carrier = FunctionSpec("random_trig", (("degree", 8), ("decay", 1.0)),
                                   seed).evaluate(grid.nodes)
            u = SampledFunction(grid, env * carrier)
            if not (u.values.min() < 0.0 < u.values.max()):
                raise PreconditionError(f"family seed {seed} does not change sign")
            gap = musina_nazarov_gap(u, float(s))
            lhs = fourier_seminorm_sq(u.with_values(np.abs(u.values)), float(s))
            reports.append(InequalityReport(
                lhs, lhs - gap, gap, n, gap > 0.0,
                family_id=f"env*trig(seed={seed})", extras={"s": float(s)}))
    return reports


# --------------------------------------------------------------------------
# anisotropic multiplier domination
# --------------------------------------------------------------------------

def anisotropic_multiplier_check(gamma: float, n: int = 512,
                                 xi_max: float = 64.0) -> InequalityReport:
    """Pointwise domination (1+|xi|^2)^(1+g) <= 2^(1+g) sum_j (1+xi_j^2)^(1+g)
    over a discrete frequency box (the mechanism reducing a 2D norm to its
    directional parts).  Zero tolerance: this is an algebraic fact."""
    if not (0.0 < gamma < 1.0):
        raise ParameterError(f"gamma must lie in (0, 1), got {gamma}")
    xi = np.fft.fftfreq(n, d=1.0 / (2.0 * xi_max))
    X1, X2 = np.meshgrid(xi, xi, indexing="ij")
    p = 1.0 + gamma
    lhs = (1.0 + X1 ** 2 + X2 ** 2) ** p
    core = (1.0 + X1 ** 2) ** p + (1.0 + X2 ** 2) ** p
    ratio = lhs / core
    worst = float(ratio.max())
    k = np.unravel_index(int(np.argmax(ratio)), ratio.shape)
    bound = 2.0 ** p
    return InequalityReport(
        worst, bound, worst, n, worst <= bound,
        family_id=f"frequency-box n={n}",
        extras={"gamma": gamma, "xi_at_max": [float(X1[k]), float(X2[k])],
                "violations": int(np.count_nonzero(lhs > bound * core))})


# --------------------------------------------------------------------------
# report emission
# --------------------------------------------------------------------------

def write_json(obj, path: str):
    with open(path, "w") as fh:
        json.dump(obj, fh, indent=2, sort_keys=True)
        fh.write("\n")


def write_csv(rows: List[dict], path: str):
    if not rows:
        with open(path, "w") as fh:
            fh.write("")
        return
    headers: List[str] = []
    for r in rows:
        for k in r:
            if k not in headers:
                headers.append(k)
    with open(path, "w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=headers)
        w.writeheader()
        for r in rows:
            w.writerow({k: _csv_cell(r.get(k)) for k in headers})


def _csv_cell(v):
    if isinstance(v, float):
        return repr(v)
    if isinstance(v, (list, tuple)):
        return ";".join(repr(x) if isinstance(x, float) else str(x) for x in v)
    return v


def emit_report(name: str, payload: dict, out_dir: str, fmt: str = "both",
                rows: Optional[List[dict]] = None,
                summary_lines: Optional[List[str]] = None) -> List[str]:
    """Write a study result as JSON and/or CSV plus a text summary.
    Returns the list of files written."""
    if fmt not in ("json", "csv", "both"):
        raise ConfigurationError(f"unknown format '{fmt}'")
    os.makedirs(out_dir, exist_ok=True)
    written = []
    if fmt in ("json", "both"):
        p = os.path.join(out_dir, f"{name}.json")
        write_json(payload, p)
        written.append(p)
    if fmt in ("csv", "both") and rows is not None:
        p = os.path.join(out_dir, f"{name}.csv")
        write_csv(rows, p)
        written.append(p)
    if summary_lines:
        p = os.path.join(out_dir, f"{name}.txt")
        with open(p, "w") as fh:
            fh.write("\n".join(summary_lines) + "\n")
        written.append(p)
    return written


def compare_golden(current: dict, golden_path: str, rel_tol: float = 1e-9,
                   tolerances: Optional[dict] = None) -> List[str]:
    """Diff a result dict against a stored golden JSON file.  Numeric
    leaves compare within rel_tol (or a per-key override); everything
    else compares exactly.  Returns the list of differences."""
    with open(golden_path) as fh:
        golden = json.load(fh)
    diffs: List[str] = []
    tolerances = tolerances or {}

    def walk(cur, gold, path):
        if isinstance(gold, dict):
            if not isinstance(cur, dict):
                diffs.append(f"{path}: type mismatch")
                return
            for k in sorted(set(gold) | set(cur)):
                if k not in gold:
                    diffs.append(f"{path}.{k}: unexpected key")
                elif k not in cur:
                    diffs.append(f"{path}.{k}: missing key")
                else:
                    walk(cur[k], gold[k], f"{path}.{k}")
        elif isinstance(gold, list):
            if not isinstance(cur, list) or len(cur) != len(gold):
                diffs.append(f"{path}: list shape mismatch")
                return
            for i, (c, g) in enumerate(zip(cur, gold)):
                walk(c, g, f"{path}[{i}]")
        elif isinstance(gold, (int, float)) and not isinstance(gold, bool):
            tol = tolerances.get(path.rsplit(".", 1)[-1], rel_tol)
            c = float(cur)
            g = float(gold)
            if math.isnan(g) and math.isnan(c):
                return
            if abs(c - g) > tol * max(abs(g), 1.0):
                diffs.append(f"{path}: {c!r} != golden {g!r} (rel tol {tol:g})")
        else:
            if cur != gold:
                diffs.append(f"{path}: {cur!r} != golden {gold!r}")

    walk(current, golden, "$")
    return diffs
