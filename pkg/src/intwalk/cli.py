"""Batch command-line front end; one subcommand per library operation.

Reports go to stdout as JSON by default (CSV via --format csv).  Exact
probabilities are always emitted as (numerator, scale) pairs with a float
rendering alongside; floats alone are never the source of truth.  Randomized
subcommands require an explicit --seed.  Exit codes: 0 success, 2 precondition
violation, 3 budget exceeded.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from fractions import Fraction

from . import dist, exponent, fourier, sampling, transforms
from .errors import BudgetError, PreconditionError
from .layers import Weight

EXIT_OK = 0
EXIT_PRECONDITION = 2
EXIT_BUDGET = 3


def _weight(w: Weight) -> dict:
    return {
        "numerator": w.numerator,
        "scale": w.scale,
        "float": w.value,
        "exact_str": str(w) if w.exact else None,
    }


def _scalar(x) -> dict:
    if isinstance(x, Fraction):
        return {"numerator": x.numerator, "denominator": x.denominator,
                "float": float(x), "exact_str": f"{x.numerator}/{x.denominator}"}
    return {"numerator": None, "denominator": None, "float": float(x),
            "exact_str": None}


def _flatten(prefix: str, obj, rows: list[tuple[str, str]]) -> None:
    if isinstance(obj, dict):
        for k, v in sorted(obj.items()):
            _flatten(f"{prefix}.{k}" if prefix else str(k), v, rows)
    elif isinstance(obj, (list, tuple)):
        for i, v in enumerate(obj):
            _flatten(f"{prefix}[{i}]", v, rows)
    else:
        rows.append((prefix, "" if obj is None else obj if isinstance(obj, str) else json.dumps(obj)))


def emit(report: dict, fmt: str, out) -> None:
    if fmt == "json":
        json.dump(report, out, sort_keys=True, indent=2)
        out.write("\n")
        return
    rows: list[tuple[str, str]] = []
    _flatten("", report, rows)
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(["key", "value"])
    writer.writerows(rows)


def emit_exponent_csv(report: dict, out) -> None:
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(["regime", "n", "p_numerator", "p_scale", "p_float", "exact_flag"])
    for pt in report["result"]["series"]:
        writer.writerow([report["params"]["regime"], pt["n"],
                         pt.get("p_numerator", ""), pt.get("p_scale", ""),
                         pt["p_float"], pt["exact"]])


# -- command handlers ---------------------------------------------------------


def _mode_exact(args) -> bool:
    return args.mode == "exact"


def cmd_point_prob(args) -> dict:
    w = dist.point_prob(args.n, (args.l1, args.l2), exact=_mode_exact(args),
                        budget=args.budget)
    return {"n": args.n, "l": [args.l1, args.l2], "prob": _weight(w)}


def cmd_persistence(args) -> dict:
    w = dist.persistence(args.n, exact=_mode_exact(args), budget=args.budget)
    return {"n": args.n, "prob": _weight(w)}


def cmd_bridge(args) -> dict:
    r = dist.bridge_persistence(args.n, exact=_mode_exact(args), budget=args.budget)
    return {"n": args.n, "joint": _weight(r.joint), "endpoint": _weight(r.endpoint),
            "conditional": _scalar(r.conditional)}


def cmd_s_bridge(args) -> dict:
    r = dist.s_bridge_persistence(args.n, exact=_mode_exact(args), budget=args.budget)
    return {"n": args.n, "joint": _weight(r.joint), "endpoint": _weight(r.endpoint),
            "conditional": _scalar(r.conditional)}


def cmd_moments(args) -> dict:
    m = dist.conditional_moments(args.n, exact=_mode_exact(args), budget=args.budget)
    return {"n": args.n, "e_abs_s": _scalar(m.e_abs_s), "e_a": _scalar(m.e_a),
            "e_s_plus": _scalar(m.e_s_plus)}


def cmd_first_passage(args) -> dict:
    r = dist.first_passage(args.n, exact=_mode_exact(args))
    extra = dist.strict_positive_moment(args.n, exact=_mode_exact(args))
    return {"n": args.n, "p_survive": _scalar(r.p_survive), "lhs": _scalar(r.lhs),
            "rhs": _scalar(r.rhs), "identity_holds": r.lhs == r.rhs,
            "strict_positive_moment": _scalar(extra)}


def cmd_tail_bound(args) -> dict:
    r = dist.tail_joint_bound(args.n, args.l, args.m, exact=_mode_exact(args),
                              budget=args.budget)
    return {"n": args.n, "l": args.l, "m": args.m, "lhs": _scalar(r.lhs),
            "rhs": _scalar(r.rhs), "holds": bool(r.holds)}


def cmd_association(args) -> dict:
    r = dist.association_check(args.l, args.m, exact=_mode_exact(args),
                               budget=args.budget)
    return {"l": args.l, "m": args.m, "lhs": _scalar(r.lhs), "rhs": _scalar(r.rhs),
            "holds": bool(r.holds)}


def cmd_decomposition(args) -> dict:
    r = dist.decomposition_identity(args.n, exact=_mode_exact(args), budget=args.budget)
    return {"n": args.n, "direct": _weight(r.direct), "composed": _weight(r.composed),
            "holds": bool(r.holds)}


def cmd_target_zone(args) -> dict:
    v = dist.target_zone_mass(args.n, args.a, args.b, exact=_mode_exact(args),
                              budget=args.budget)
    return {"n": args.n, "a": args.a, "b": args.b, "mass": _scalar(v)}


def cmd_llt_error(args) -> dict:
    v = fourier.llt_sup_error(args.n, exact=None if args.mode == "auto" else _mode_exact(args),
                              budget=args.budget)
    return {"n": args.n, "sup_error": v}


def cmd_invert_cf(args) -> dict:
    if args.panels_t1 and args.panels_t2:
        spec = fourier.QuadratureSpec(args.panels_t1, args.panels_t2, args.nodes)
    else:
        spec = fourier.QuadratureSpec.for_horizon(args.n, nodes=args.nodes)
    val, err = fourier.invert_cf(args.n, (args.l1, args.l2), spec, estimate_error=True)
    return {"n": args.n, "l": [args.l1, args.l2], "value": val,
            "error_estimate": err,
            "panels": [spec.panels_t1, spec.panels_t2], "nodes": spec.nodes}


def cmd_lemma_quadratic(args) -> dict:
    r = fourier.quadratic_bound_scan(args.n, grid=args.grid)
    return {"n": args.n, "min_ratio": r.min_ratio, "c1": _scalar(r.c1),
            "min_g": _scalar(r.min_g), "grid": args.grid}


def cmd_lemma_decay(args) -> dict:
    r = fourier.cf_decay_scan(args.n, args.eps, grid=args.grid)
    return {"n": args.n, "eps": args.eps, "sup_abs": r.sup_abs,
            "per_step": r.per_step, "grid": [r.grid_t1, r.grid_t2]}


def cmd_density(args) -> dict:
    if args.t is None:
        return {"x": args.x, "y": args.y, "value": float(fourier.g_density(args.x, args.y))}
    v = float(fourier.g_transition(args.t, args.u, args.v, args.x, args.y))
    return {"t": args.t, "u": args.u, "v": args.v, "x": args.x, "y": args.y, "value": v}


def cmd_transition_ck(args) -> dict:
    from .quad import integrate_2d
    s, t = args.s, args.t
    w = (args.w1, args.w2)
    if not (0 < s < t):
        raise PreconditionError("need 0 < s < t")
    lhs = integrate_2d(
        lambda z1, z2: fourier.g_transition(s, 0.0, 0.0, z1, z2)
        * fourier.g_transition(t - s, z1, z2, w[0], w[1]),
        (-8.0, 8.0, -8.0, 8.0), panels=(30, 30), nodes=16)
    rhs = float(fourier.g_transition(t, 0.0, 0.0, w[0], w[1]))
    return {"s": s, "t": t, "w": [w[0], w[1]], "integral": lhs, "direct": rhs,
            "abs_error": abs(lhs - rhs)}


def cmd_transforms_check(args) -> dict:
    flip = transforms.check_sign_flip_injection(args.n)
    levels = {}
    for r in args.r:
        rep = transforms.check_level_r_injection(args.n, r)
        levels[str(r)] = {"n": rep.n, "domain_size": rep.domain_size,
                          "image_size": rep.image_size, "injective": rep.injective,
                          "codomain_ok": rep.codomain_ok,
                          "inequality_ok": rep.inequality_ok, "passed": rep.passed}
    mono = transforms.check_monotone_membership(min(args.n, args.monotone_cap))
    return {"n": args.n,
            "sign_flip": {"n": flip.n, "domain_size": flip.domain_size,
                          "image_size": flip.image_size, "injective": flip.injective,
                          "codomain_ok": flip.codomain_ok,
                          "inequality_ok": flip.inequality_ok, "passed": flip.passed},
            "level_r": levels,
            "monotone_membership": {"n": min(args.n, args.monotone_cap), "passed": mono}}


def _parse_pin(args) -> tuple:
    given = [args.pin is not None, args.walk_pin is not None, args.free]
    if sum(given) != 1:
        raise PreconditionError("give exactly one of --pin, --walk-pin, --free")
    if args.pin is not None:
        return (int(args.pin[0]), int(args.pin[1])), None
    if args.walk_pin is not None:
        return None, int(args.walk_pin)
    return None, None


def cmd_sample(args) -> dict:
    pin, walk_pin = _parse_pin(args)
    table = sampling.build_backward(args.n, pin=pin, walk_pin=walk_pin,
                                    positivity=args.positivity,
                                    exact=_mode_exact(args), budget=args.budget)
    steps = sampling.sample_pinned(table, args.seed, args.count)
    ends = sampling.walk_area_endpoints(steps)
    area_ok = sampling.area_nonnegative(steps)
    signs = sampling.paths_to_signs(steps)
    if args.paths_out:
        with open(args.paths_out, "w") as fh:
            fh.write("\n".join(signs) + ("\n" if signs else ""))
    result = {"n": args.n, "count": args.count, "seed": args.seed,
              "constraint_prob": _weight(table.root_weight()),
              "positivity_fraction": float(area_ok.mean()) if args.count else None,
              "endpoint_s_mean": float(ends[:, 0].mean()) if args.count else None,
              "endpoint_a_mean": float(ends[:, 1].mean()) if args.count else None,
              "paths_out": args.paths_out}
    if args.count <= 32:
        result["paths"] = signs
    return result


def cmd_clt_check(args) -> dict:
    rep = sampling.pinned_clt_check(args.n, sampling.PinSpec((args.p1, args.p2)),
                                    args.t, args.samples, args.seed,
                                    method=args.method, allow_odd=args.allow_odd,
                                    budget=args.budget)
    return {"n": rep.n, "t": rep.t, "pin_lattice": list(rep.pin_lattice),
            "pin_scaled": list(rep.pin_scaled), "samples": rep.samples,
            "method": rep.method,
            "emp_mean": rep.emp_mean.tolist(), "emp_cov": rep.emp_cov.tolist(),
            "oracle_mean": rep.oracle_mean.tolist(),
            "oracle_cov": rep.oracle_cov.tolist(),
            "mean_rel_err": rep.mean_rel_err.tolist(),
            "cov_rel_err": rep.cov_rel_err.tolist()}


def cmd_mc(args) -> dict:
    est = sampling.mc_persistence(args.n, args.samples, args.seed, args.regime,
                                  budget=args.budget)
    return {"n": est.n, "regime": est.regime, "samples": est.samples,
            "estimate": est.estimate, "std_error": est.std_error}


def cmd_exponent(args) -> dict:
    n_list = [int(x) for x in args.n_list.split(",")]
    series = exponent.regime_suite(n_list, args.regime, source=args.source,
                                   exact=_mode_exact(args) and args.source == "dp",
                                   samples=args.samples, seed=args.seed or 0,
                                   budget=args.budget)
    pts = []
    for pt in series.points:
        rec = {"n": pt.n, "p_float": pt.p, "exact": pt.exact,
               "p_num": pt.num, "p_den": pt.den}
        if pt.den is not None and pt.den & (pt.den - 1) == 0:
            rec["p_numerator"] = pt.num
            rec["p_scale"] = pt.den.bit_length() - 1
        pts.append(rec)
    fit = exponent.fit_exponent(series, min_n=args.min_n)
    try:
        upper = exponent.fit_exponent(
            series, min_n=sorted(p.n for p in series.points)[len(series.points) // 2])
        upper_rec = {"theta": upper.theta, "intercept": upper.intercept,
                     "residual": upper.residual, "n_used": list(upper.n_used)}
    except PreconditionError:
        upper_rec = None
    return {"regime": args.regime, "min_n": args.min_n, "series": pts,
            "fit": {"theta": fit.theta, "intercept": fit.intercept,
                    "residual": fit.residual, "n_used": list(fit.n_used)},
            "fit_upper_half": upper_rec}


# -- parser -------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    top = argparse.ArgumentParser(
        prog="intwalk",
        description="Persistence probabilities of the integrated simple random "
                    "walk and its bridge: exact DP, inversion, sampling, exponents.")
    top.add_argument("--format", choices=("json", "csv"), default="json")
    top.add_argument("--out", default=None, help="write the report to a file")
    sub = top.add_subparsers(dest="command", required=True)

    def add(name, handler, **kw):
        p = sub.add_parser(name, **kw)
        p.set_defaults(handler=handler)
        p.add_argument("--mode", choices=("exact", "float"), default="exact")
        p.add_argument("--budget", type=int, default=None,
                       help="override the horizon budget for the chosen mode")
        return p

    p = add("point-prob", cmd_point_prob, help="P((S_n, A_n) = l)")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--l1", type=int, required=True)
    p.add_argument("--l2", type=int, required=True)

    p = add("persistence", cmd_persistence, help="P(area stays nonnegative)")
    p.add_argument("--n", type=int, required=True)

    p = add("bridge", cmd_bridge, help="persistence given S_n = A_n = 0")
    p.add_argument("--n", type=int, required=True)

    p = add("s-bridge", cmd_s_bridge, help="persistence given S_n = 0")
    p.add_argument("--n", type=int, required=True)

    p = add("moments", cmd_moments, help="conditional moments under positivity")
    p.add_argument("--n", type=int, required=True)

    p = add("first-passage", cmd_first_passage, help="stopping-time identity")
    p.add_argument("--n", type=int, required=True)

    p = add("tail-bound", cmd_tail_bound, help="joint tail lower bound")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--l", type=int, required=True)
    p.add_argument("--m", type=int, required=True)

    p = add("association", cmd_association, help="positive-correlation inequality")
    p.add_argument("--l", type=int, required=True)
    p.add_argument("--m", type=int, required=True)

    p = add("decomposition", cmd_decomposition, help="three-block bridge identity")
    p.add_argument("--n", type=int, required=True)

    p = add("target-zone", cmd_target_zone, help="conditional mass of a scaling window")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--a", type=float, required=True)
    p.add_argument("--b", type=float, required=True)

    p = add("llt-error", cmd_llt_error, help="sup |scaled point mass - limit density|")
    p.add_argument("--n", type=int, required=True)
    p.set_defaults(mode="auto")

    p = add("invert-cf", cmd_invert_cf, help="characteristic-function inversion")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--l1", type=int, required=True)
    p.add_argument("--l2", type=int, required=True)
    p.add_argument("--panels-t1", type=int, default=None)
    p.add_argument("--panels-t2", type=int, default=None)
    p.add_argument("--nodes", type=int, default=16)

    p = add("lemma-quadratic", cmd_lemma_quadratic, help="quadratic lower-bound scan")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--grid", type=int, default=2048)

    p = add("lemma-decay", cmd_lemma_decay, help="characteristic-function decay scan")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--eps", type=float, required=True)
    p.add_argument("--grid", type=int, default=384)

    p = add("density", cmd_density, help="limit density g, or g_t with --t/--u/--v")
    p.add_argument("--x", type=float, required=True)
    p.add_argument("--y", type=float, required=True)
    p.add_argument("--t", type=float, default=None)
    p.add_argument("--u", type=float, default=0.0)
    p.add_argument("--v", type=float, default=0.0)

    p = add("transition-ck", cmd_transition_ck, help="Chapman-Kolmogorov residual")
    p.add_argument("--s", type=float, default=0.5)
    p.add_argument("--t", type=float, default=1.0)
    p.add_argument("--w1", type=float, default=0.3)
    p.add_argument("--w2", type=float, default=0.2)

    p = add("transforms-check", cmd_transforms_check, help="step-inversion injections")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--r", type=int, nargs="+", default=[1, 2, 3])
    p.add_argument("--monotone-cap", type=int, default=8)

    p = add("sample", cmd_sample, help="exact conditional path sampling")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--count", type=int, required=True)
    p.add_argument("--pin", type=int, nargs=2, default=None, metavar=("S", "A"))
    p.add_argument("--walk-pin", type=int, default=None)
    p.add_argument("--free", action="store_true")
    p.add_argument("--positivity", action="store_true")
    p.add_argument("--paths-out", default=None)

    p = add("clt-check", cmd_clt_check, help="pinned marginal vs limit moments")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--p1", type=float, required=True)
    p.add_argument("--p2", type=float, required=True)
    p.add_argument("--t", type=float, default=0.5)
    p.add_argument("--samples", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--method", choices=("auto", "paths", "marginal"), default="auto")
    p.add_argument("--allow-odd", action="store_true")

    p = add("mc", cmd_mc, help="Monte Carlo persistence estimate")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--samples", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--regime", choices=exponent.REGIMES, default="free")

    p = add("exponent", cmd_exponent, help="decay series and log-log fit")
    p.add_argument("--regime", choices=exponent.REGIMES, required=True)
    p.add_argument("--n-list", required=True, help="comma-separated sizes")
    p.add_argument("--source", choices=("dp", "mc"), default="dp")
    p.add_argument("--min-n", type=int, default=exponent.DEFAULT_MIN_N)
    p.add_argument("--samples", type=int, default=100000)
    p.add_argument("--seed", type=int, default=None)

    return top


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "exponent" and args.source == "mc" and args.seed is None:
            raise PreconditionError("--seed is required for Monte Carlo sources")
        result = args.handler(args)
    except PreconditionError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION
    except BudgetError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    report = {"command": args.command, "params": _param_dict(args), "result": result}
    buf = io.StringIO()
    if args.command == "exponent" and args.format == "csv":
        emit_exponent_csv(report, buf)
    else:
        emit(report, args.format, buf)
    text = buf.getvalue()
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


_SKIP_PARAMS = {"handler", "command", "format", "out"}


def _param_dict(args) -> dict:
    out = {}
    for k, v in sorted(vars(args).items()):
        if k in _SKIP_PARAMS or callable(v):
            continue
        out[k] = v
    return out


if __name__ == "__main__":
    sys.exit(main())
