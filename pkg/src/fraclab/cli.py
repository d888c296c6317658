"""Command-line front end: one subcommand per study or primitive, JSON/CSV
artifacts under --out-dir, deterministic output for any --threads value.

Exit codes: 0 on pass, 1 on a verdict failure, 2 on usage errors.
"""

from __future__ import annotations

import argparse
import os
import sys

import numpy as np

from . import _pairsum, experiments, extension, hardy, nemytskii, norms
from .domains import (
    Disk,
    FunctionSpec,
    Grid1D,
    Grid2D,
    Interval,
    sample,
)
from .errors import FraclabError

__all__ = ["main", "build_parser"]


def _parse_interval(text: str) -> Interval:
    try:
        a, b = (float(t) for t in text.split(","))
        return Interval(a, b)
    except Exception as exc:
        raise argparse.ArgumentTypeError(f"expected 'a,b' with a < b, got '{text}'") from exc


def _parse_int_list(text: str):
    return tuple(int(t) for t in text.split(","))


def _parse_float_list(text: str):
    return tuple(float(t) for t in text.split(","))


def _parse_params(pairs):
    params = {}
    for p in pairs or ():
        if "=" not in p:
            raise argparse.ArgumentTypeError(f"--param needs key=value, got '{p}'")
        k, v = p.split("=", 1)
        try:
            fv = float(v)
            params[k] = int(fv) if fv.is_integer() and "." not in v and "e" not in v.lower() else fv
        except ValueError:
            params[k] = v
    return params


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="fraclab",
        description="fractional Sobolev seminorms, composition operators, "
                    "Hardy inequalities and extension operators at desk scale")
    ap.add_argument("--out-dir", default=os.environ.get("FRACLAB_OUT_DIR", "fraclab-out"),
                    help="output directory (env FRACLAB_OUT_DIR overrides the default)")
    ap.add_argument("--format", choices=("json", "csv", "both"), default="both")
    ap.add_argument("--threads", type=int, default=1,
                    help="worker count for the pair-sum kernels (>= 1); results "
                         "are byte-identical for any value")
    ap.add_argument("--seed", type=int, default=0, help="base seed for random families")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("seminorm", help="Gagliardo seminorm of a function family")
    p.add_argument("--fn", default="linear", help="function family name")
    p.add_argument("--domain", type=_parse_interval, default=Interval(0.0, 1.0),
                   metavar="A,B")
    p.add_argument("--gamma", type=float, required=True)
    p.add_argument("--n", type=int, default=1024)
    p.add_argument("--param", action="append", metavar="KEY=VALUE")

    p = sub.add_parser("nemytskii", help="apply T1/T2/T3 and report the sign set")
    p.add_argument("--op", choices=nemytskii.OPERATORS, required=True)
    p.add_argument("--fn", default="random_trig")
    p.add_argument("--domain", type=_parse_interval, default=Interval(0.0, 1.0),
                   metavar="A,B")
    p.add_argument("--n", type=int, default=1024)
    p.add_argument("--gamma", type=float, default=0.25)
    p.add_argument("--param", action="append", metavar="KEY=VALUE")

    p = sub.add_parser("hardy", help="Hardy-inequality checks and scaling tables")
    p.add_argument("--check", choices=("fkernel", "halfline", "interval", "scaling"),
                   required=True)
    p.add_argument("--alpha", type=float, default=0.5)
    p.add_argument("--delta", type=float, default=0.2)
    p.add_argument("--mode", choices=("general", "mean-zero"), default="general")
    p.add_argument("--n", type=int, default=2048)
    p.add_argument("--ell", type=float, default=8.0, help="half-line truncation length")
    p.add_argument("--n-list", type=_parse_int_list, default=(8, 16, 32, 64, 128, 256))
    p.add_argument("--grid-n", type=int, default=None)
    p.add_argument("--fn", default=None)
    p.add_argument("--param", action="append", metavar="KEY=VALUE")

    p = sub.add_parser("extend", help="extension operators and their norm ratios")
    p.add_argument("--kind", choices=("zero", "reflect", "operator"), required=True)
    p.add_argument("--s", type=float, default=0.25)
    p.add_argument("--n", type=int, default=96)

    p = sub.add_parser("sweep", help="operator-norm sweep over a seeded family")
    p.add_argument("--op", choices=nemytskii.OPERATORS, required=True)
    p.add_argument("--s", type=_parse_float_list, required=True, metavar="S1,S2,...")
    p.add_argument("--n", type=_parse_int_list, required=True, metavar="N1,N2,...")
    p.add_argument("--seeds", type=int, default=20)
    p.add_argument("--sweep-domain", choices=("interval", "disk"), default="interval")

    p = sub.add_parser("sharpness", help="refinement study at the s = 3/2 threshold")
    p.add_argument("--s-list", type=_parse_float_list, default=(1.25, 1.4, 1.45, 1.5))
    p.add_argument("--schedule", type=_parse_int_list,
                   default=experiments.DEFAULT_SHARPNESS_SCHEDULE)

    p = sub.add_parser("mn-check", help="sign-change spectral gap check")
    p.add_argument("--s-list", type=_parse_float_list, default=(1.1, 1.25, 1.4))
    p.add_argument("--seeds", type=int, default=20)
    p.add_argument("--n", type=int, default=2048)

    p = sub.add_parser("report", help="golden-file comparison of a result JSON")
    p.add_argument("--current", required=True)
    p.add_argument("--golden", required=True)
    p.add_argument("--rel-tol", type=float, default=1e-9)
    return ap


def _spec_from_args(args, default_family: str, dim: int = 1) -> FunctionSpec:
    family = getattr(args, "fn", None) or default_family
    params = _parse_params(getattr(args, "param", None))
    return FunctionSpec(family, tuple(sorted(params.items())), args.seed)


def _emit(args, name, payload, rows=None, summary=None):
    return experiments.emit_report(name, payload, args.out_dir, args.format,
                                   rows=rows, summary_lines=summary)


def _cmd_seminorm(args, parser):
    if not (0.0 < args.gamma < 1.0):
        parser.error(f"--gamma must lie in (0, 1), got {args.gamma}")
    spec = _spec_from_args(args, "linear")
    f = sample(spec, Grid1D(args.domain, args.n))
    res = norms.gagliardo_sq(f, args.gamma)
    print(f"gagliardo_sq[{spec.family}, gamma={args.gamma:g}, n={args.n}] "
          f"= {res.value_sq:.12g}")
    payload = {"spec": spec.to_dict(), "gamma": args.gamma, "result": res.to_dict()}
    _emit(args, "seminorm", payload, rows=[res.to_dict()])
    return 0


def _cmd_nemytskii(args, parser):
    spec = _spec_from_args(args, "random_trig")
    u = sample(spec, Grid1D(args.domain, args.n))
    tu = nemytskii.apply(args.op, u)
    dec = nemytskii.sign_decompose(u)
    gu = norms.gagliardo_sq(u, args.gamma)
    gt = norms.gagliardo_sq(tu, args.gamma)
    ratio = float("nan") if gu.value_sq == 0 else gt.value_sq / gu.value_sq
    print(f"{args.op}: gagliardo_sq ratio = {ratio:.12g} "
          f"({len(dec)} positive interval(s))")
    payload = {"spec": spec.to_dict(), "op": args.op, "gamma": args.gamma,
               "seminorm_sq_in": gu.value_sq, "seminorm_sq_out": gt.value_sq,
               "ratio": ratio, "sign_set": dec.to_json()}
    _emit(args, "nemytskii", payload, rows=dec.to_json())
    return 0


def _cmd_hardy(args, parser):
    if args.check == "fkernel":
        f0 = hardy.f_kernel(0.0, args.alpha, args.delta)
        sup = hardy.f_kernel_sup(args.alpha, args.delta)
        print(f"F(0) = {f0:.12g}   sup_k F = {sup:.12g}")
        rows = [{"k": k, "F": hardy.f_kernel(k, args.alpha, args.delta)}
                for k in hardy.DEFAULT_K_GRID]
        _emit(args, "hardy-fkernel",
              {"alpha": args.alpha, "delta": args.delta, "F0": f0, "sup": sup,
               "grid": rows}, rows=rows)
        return 0
    if args.check == "halfline":
        spec = _spec_from_args(args, "gaussian") if args.fn else FunctionSpec(
            "gaussian", (("center", 1.0), ("width", 0.3)))
        u = sample(spec, Grid1D(Interval(0.0, args.ell), args.n))
        rep = hardy.hardy_halfline_check(u, args.alpha, args.delta,
                                         family_id=spec.family)
        print(f"halfline constant = {rep.empirical_constant:.12g} "
              f"[{'pass' if rep.verdict else 'fail'}]")
        _emit(args, "hardy-halfline", rep.to_dict(), rows=[rep.to_dict()])
        return 0 if rep.verdict else 1
    if args.check == "interval":
        spec = _spec_from_args(args, "sine") if args.fn else FunctionSpec(
            "sine", (("freq", 1.0),))
        f = sample(spec, Grid1D(Interval(0.0, 1.0), args.n))
        rep = hardy.interval_hardy_check(f, args.alpha, mode=args.mode,
                                         family_id=spec.family)
        print(f"interval ({args.mode}) constant = {rep.empirical_constant:.12g} "
              f"[{'pass' if rep.verdict else 'fail'}]")
        _emit(args, "hardy-interval", rep.to_dict(), rows=[rep.to_dict()])
        return 0 if rep.verdict else 1
    table = hardy.counterexample_scaling(args.alpha, args.n_list, args.grid_n)
    print(f"plateau scaling slope = {table.slope:.12g} "
          f"(target {-(1 - args.alpha):g})")
    _emit(args, "hardy-scaling",
          {"alpha": table.alpha, "slope": table.slope, "rows": table.to_rows()},
          rows=table.to_rows())
    return 0


def _cmd_extend(args, parser):
    if not (0.0 < args.s < 0.5):
        parser.error(f"--s must lie in (0, 0.5) for extension, got {args.s}")
    if args.kind == "zero":
        spec = FunctionSpec("gaussian", (("center", 0.5), ("width", 0.08)))
        g = sample(spec, Grid1D(Interval(0.0, 1.0), args.n))
        res = extension.zero_extend(g, args.s)
        name = "extend-zero"
    elif args.kind == "reflect":
        grid = Grid2D((Interval(-1.0, 1.0), Interval(0.0, 1.0)), 2 * args.n, args.n)
        u = sample(FunctionSpec("core_field", seed=args.seed), grid)
        res = extension.hestenes_reflect(u, s=args.s)
        name = "extend-reflect"
    else:
        grid = Grid2D.from_domain(Disk(), args.n, args.n)
        f = sample(FunctionSpec("random_trig2d", (("degree", 3), ("decay", 2.0)),
                                args.seed), grid)
        res = extension.extend_E(f, args.s)
        name = "extend-operator"
    parts = ", ".join(f"{k}={v:.12g}" for k, v in sorted(res.norm_ratios.items()))
    print(f"{name}: {parts}")
    _emit(args, name, res.to_dict(), rows=[res.to_dict()["norm_ratios"]])
    return 0


def _cmd_sweep(args, parser):
    cfg = experiments.SweepConfig(args.op, tuple(args.s), tuple(args.n),
                                  seeds=args.seeds, domain=args.sweep_domain)
    rep = experiments.operator_norm_sweep(cfg)
    for s, d in sorted(rep.drift.items()):
        print(f"s={s:g}: max ratio {rep.max_ratio(s, cfg.n_list[-1]):.12g} "
              f"drift {d:.3%} [{'pass' if rep.verdicts[s] else 'fail'}]")
    summary = [f"s={s:g} drift={d:.5f} verdict="
               f"{'pass' if rep.verdicts[s] else 'fail'}" for s, d in sorted(rep.drift.items())]
    _emit(args, "sweep", rep.to_dict(), rows=rep.to_rows(), summary=summary)
    return 0 if rep.passed else 1


def _cmd_sharpness(args, parser):
    rows = experiments.sharpness_study(args.s_list, args.schedule)
    ok = True
    for r in rows:
        expected = "diverges" if (r.operator == "T1" and r.s >= 1.5) else "converges"
        ok = ok and (r.verdict == expected)
        print(f"s={r.s:g} [{r.operator}]: {r.verdict} "
              f"(limit {r.limit:.6g}, rate {r.rate:.3g})")
    _emit(args, "sharpness", {"rows": [r.to_dict() for r in rows]},
          rows=[r.to_dict() for r in rows])
    return 0 if ok else 1


def _cmd_mn_check(args, parser):
    reports = experiments.musina_nazarov_check(args.s_list, args.seeds, args.n)
    worst = min(r.empirical_constant for r in reports)
    ok = all(r.verdict for r in reports)
    print(f"minimal spectral gap over {len(reports)} cases = {worst:.12g} "
          f"[{'pass' if ok else 'fail'}]")
    _emit(args, "mn-check", {"gaps": [r.to_dict() for r in reports]},
          rows=[r.to_dict() for r in reports])
    return 0 if ok else 1


def _cmd_report(args, parser):
    import json

    with open(args.current) as fh:
        current = json.load(fh)
    diffs = experiments.compare_golden(current, args.golden, rel_tol=args.rel_tol)
    if diffs:
        for d in diffs:
            print(d, file=sys.stderr)
        print(f"{len(diffs)} difference(s) vs golden")
        return 1
    print("golden comparison: no differences")
    return 0


_COMMANDS = {
    "seminorm": _cmd_seminorm,
    "nemytskii": _cmd_nemytskii,
    "hardy": _cmd_hardy,
    "extend": _cmd_extend,
    "sweep": _cmd_sweep,
    "sharpness": _cmd_sharpness,
    "mn-check": _cmd_mn_check,
    "report": _cmd_report,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.threads < 1:
        parser.error("--threads must be >= 1")
    _pairsum.use_threads(args.threads)
    np.seterr(all="ignore")
    try:
        return _COMMANDS[args.command](args, parser)
    except FraclabError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
