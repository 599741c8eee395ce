"""Command-line front end: ``anticonc {bound,diagonal,verify,sweep,infer}``.

Exit status: 0 on success / PASS, 1 when any verdict is FAIL, 2 on usage or
parameter errors. Floats are written with 17 significant digits; infinities
as the strings "inf" / "-inf".
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys

import numpy as np

from .bounds import BOUND_KINDS, BoundQuery, BoundResult, evaluate
from .diagonals import (
    Archimedean,
    check_convexity,
    diagonal_from_dict,
    psi_monotonicity_check,
    validate_lemma1,
    with_dimension,
)
from .errors import AntiConcError, ParameterError, UsageError
from .inference import factor_model_scenario, scenario_from_dict, size_distortion_bound
from .marginals import marginal_from_dict
from .montecarlo import (
    DEFAULT_K_SIGMA,
    DEFAULT_N,
    SampleConfig,
    default_seed,
    estimate_concentration,
    sample_max_via_diagonal,
    verify_bound,
)

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2
SWEEP_HEADER = ("d", "x", "eps", "kind", "bound", "p_hat", "stderr", "verdict")


# --- serialization -----------------------------------------------------------

def fmt_float(v: float) -> str:
    if math.isinf(v):
        return "inf" if v > 0 else "-inf"
    if math.isnan(v):
        return "nan"
    s = format(v, ".17g")
    # keep integral floats recognisable as floats
    return s if any(c in s for c in ".e") else s + ".0"


def to_json(obj, indent: int = 2) -> str:
    """JSON with every float at 17 significant digits and non-finite floats as strings."""

    def enc(o, level):
        pad = " " * (indent * (level + 1))
        end = " " * (indent * level)
        if isinstance(o, bool) or o is None:
            return json.dumps(o)
        if isinstance(o, (int, np.integer)):
            return str(int(o))
        if isinstance(o, (float, np.floating)):
            v = float(o)
            return json.dumps(fmt_float(v)) if not math.isfinite(v) else fmt_float(v)
        if isinstance(o, str):
            return json.dumps(o)
        if isinstance(o, dict):
            if not o:
                return "{}"
            items = [f"{pad}{json.dumps(str(k))}: {enc(v, level + 1)}" for k, v in o.items()]
            return "{\n" + ",\n".join(items) + "\n" + end + "}"
        if isinstance(o, (list, tuple, np.ndarray)):
            if len(o) == 0:
                return "[]"
            items = [pad + enc(v, level + 1) for v in o]
            return "[\n" + ",\n".join(items) + "\n" + end + "]"
        raise TypeError(f"cannot serialize {type(o).__name__}")

    return enc(obj, 0) + "\n"


def to_csv(rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    for row in rows:
        w.writerow([fmt_float(float(v)) if isinstance(v, (float, np.floating)) else v for v in row])
    return buf.getvalue()


# --- input parsing -----------------------------------------------------------

def load_json_arg(text: str, field: str):
    """Inline JSON, or a path to a JSON file."""
    raw = text.strip()
    if not raw.startswith(("{", "[")):
        try:
            with open(raw) as fh:
                raw = fh.read()
        except OSError as exc:
            raise ParameterError(f"--{field}: not inline JSON and not a readable file ({exc.strerror})", field=field)
    try:
        return json.loads(raw)
    except json.JSONDecodeError as exc:
        raise ParameterError(f"--{field}: malformed JSON ({exc.msg} at line {exc.lineno} column {exc.colno})",
                             field=field)


def _as_object(obj, field):
    if not isinstance(obj, dict):
        raise ParameterError(f"--{field} must be a JSON object", field=field)
    return obj


def _with_field(exc: ParameterError, field: str) -> ParameterError:
    inner = getattr(exc, "field", None)
    name = f"{field}.{inner}" if inner and inner != field else field
    return ParameterError(f"--{field}: {exc}", field=name)


def parse_marginal(text):
    try:
        return marginal_from_dict(_as_object(load_json_arg(text, "marginal"), "marginal"))
    except ParameterError as exc:
        if str(exc).startswith("--marginal"):
            raise
        raise _with_field(exc, "marginal") from None


def parse_diagonal(text, field="diagonal"):
    try:
        return diagonal_from_dict(_as_object(load_json_arg(text, field), field))
    except ParameterError as exc:
        if str(exc).startswith(f"--{field}"):
            raise
        raise _with_field(exc, field) from None


def parse_float_list(text, field):
    try:
        vals = [float(s) for s in text.split(",") if s.strip()]
    except ValueError:
        raise ParameterError(f"--{field} must be a comma-separated list of numbers", field=field)
    if not vals:
        raise ParameterError(f"--{field} is empty", field=field)
    return vals


def parse_int_list(text, field):
    try:
        vals = [int(s) for s in text.split(",") if s.strip()]
    except ValueError:
        raise ParameterError(f"--{field} must be a comma-separated list of integers", field=field)
    if not vals or any(v < 1 for v in vals):
        raise ParameterError(f"--{field} needs positive integers", field=field)
    return vals


def _sample_config(args):
    seed = args.seed
    if seed is None:
        try:
            seed = default_seed()
        except ValueError:
            raise ParameterError("ANTICONC_SEED must be an integer", field="seed")
    return SampleConfig(args.n, seed, args.workers)


# --- subcommands ---------------------------------------------------------------

def cmd_bound(args):
    marginal = parse_marginal(args.marginal)
    res = evaluate(args.kind, BoundQuery(args.x, args.eps, args.d, marginal))
    report = {"value": res.value, "regime": res.regime, "formula_id": res.formula_id, "sense": res.sense}
    if args.format == "csv":
        return EXIT_OK, to_csv([tuple(report), tuple(report.values())])
    return EXIT_OK, to_json(report)


def cmd_diagonal(args):
    diag = parse_diagonal(args.spec, "spec")
    report = {"diagonal": diag.to_dict(), "check": args.check}
    if args.check == "lemma1":
        r = validate_lemma1(diag, args.grid, args.tol if args.tol is not None else 1e-9)
        passed = r.passed
        report.update(r.to_dict())
    elif args.check == "convexity":
        r = check_convexity(diag, args.grid, args.tol)
        passed = r.convex
        report.update(r.to_dict())
    elif args.check == "psi":
        if not isinstance(diag, Archimedean):
            raise ParameterError("--check psi needs an archimedean diagonal", field="spec.kind")
        r = psi_monotonicity_check(diag.generator, diag.d, tol=args.tol if args.tol is not None else 1e-10)
        passed = r.nonincreasing
        report.update(r.to_dict())
    else:
        if args.t is None:
            raise UsageError("--check eval needs --t")
        ts = parse_float_list(args.t, "t")
        vals = [float(diag.eval(t)) for t in ts]
        passed = True
        if args.format == "csv":
            return EXIT_OK, to_csv([("t", "value")] + list(zip(ts, vals)))
        report["t"] = ts
        report["value"] = vals
    report["verdict"] = "PASS" if passed else "FAIL"
    if args.format == "csv":
        return (EXIT_OK if passed else EXIT_FAIL), to_csv([("check", "verdict"), (args.check, report["verdict"])])
    return (EXIT_OK if passed else EXIT_FAIL), to_json(report)


def _bound_for(kind, x, eps, d, marginal, override):
    if override is not None:
        sense = "lower" if kind == "thm1-lower" else "upper"
        return BoundResult(float(override), "override", "override", sense)
    return evaluate(kind, BoundQuery(x, eps, d, marginal))


def cmd_verify(args):
    diag = parse_diagonal(args.diagonal)
    marginal = parse_marginal(args.marginal)
    bound = _bound_for(args.bound_kind, args.x, args.eps, diag.d, marginal, args.override_bound)
    cfg = _sample_config(args)
    est = estimate_concentration(sample_max_via_diagonal(diag, marginal, cfg), args.x, args.eps)
    v = verify_bound(bound, est, args.k_sigma)
    code = EXIT_OK if v.passed else EXIT_FAIL
    if args.format == "csv":
        return code, to_csv([SWEEP_HEADER, (diag.d, args.x, args.eps, args.bound_kind, bound.value,
                                            est.p_hat, est.stderr, v.label)])
    report = {
        "diagonal": diag.to_dict(),
        "marginal": marginal.to_dict(),
        "x": args.x,
        "eps": args.eps,
        "bound_kind": args.bound_kind,
        "bound": {"value": bound.value, "regime": bound.regime, "formula_id": bound.formula_id,
                  "sense": bound.sense},
        "estimate": est.to_dict(),
        "workers": cfg.workers,
        "k_sigma": v.k_sigma,
        "slack": v.slack,
        "verdict": v.label,
    }
    return code, to_json(report)


def cmd_sweep(args):
    base = parse_diagonal(args.diagonal)
    marginal = parse_marginal(args.marginal)
    xs = parse_float_list(args.x_grid, "x-grid")
    ds = parse_int_list(args.d_list, "d-list") if args.d_list else [base.d]
    kinds = args.bound_kind or ["thm1-upper"]
    cfg = _sample_config(args)
    rows, failed = [], False
    for d in ds:
        diag = with_dimension(base, d)
        samples = sample_max_via_diagonal(diag, marginal, cfg)
        for x in xs:
            est = estimate_concentration(samples, x, args.eps)
            for kind in kinds:
                bound = _bound_for(kind, x, args.eps, d, marginal, args.override_bound)
                v = verify_bound(bound, est, args.k_sigma)
                failed |= not v.passed
                rows.append((d, x, args.eps, kind, bound.value, est.p_hat, est.stderr, v.label))
    code = EXIT_FAIL if failed else EXIT_OK
    if args.format == "json":
        return code, to_json([dict(zip(SWEEP_HEADER, r)) for r in rows])
    return code, to_csv([SWEEP_HEADER] + rows)


def cmd_infer(args):
    spec = _as_object(load_json_arg(args.scenario, "scenario"), "scenario")
    if spec.get("kind") == "factor_model":
        return _infer_factor_model(spec, args)
    scenario = scenario_from_dict(spec)
    res = size_distortion_bound(scenario, args.mode)
    csv_text = to_csv(res.csv_rows())
    if args.csv:
        with open(args.csv, "w") as fh:
            fh.write(csv_text)
    if args.format == "csv":
        return EXIT_OK, csv_text
    report = {"diagonal": scenario.diagonal.to_dict(), "marginal": scenario.marginal.to_dict(),
              "alpha": scenario.alpha, **res.to_dict()}
    return EXIT_OK, to_json(report)


def _infer_factor_model(spec, args):
    for key in ("p", "sigma", "d", "eps"):
        if key not in spec:
            raise ParameterError(f"factor_model scenario is missing field {key!r}", field=key)
    xs = spec.get("x_grid", [0.0, 0.5, 1.0, 2.0, 3.0])
    cfg = None
    if not spec.get("skip_mc", False):
        cfg = SampleConfig(int(spec.get("n", args.n)), int(spec.get("seed", _sample_config(args).seed)),
                           int(spec.get("workers", args.workers)))
    rep = factor_model_scenario(spec["p"], spec["sigma"], spec["d"], spec["eps"], xs, cfg, args.k_sigma)
    code = EXIT_OK if rep.mc_passed else EXIT_FAIL
    if args.format == "csv":
        rows = [("x", "p_hat", "stderr", "bound", "verdict")]
        rows += [(r["x"], r["p_hat"], r["stderr"], r["bound"], r["verdict"]) for r in rep.mc]
        return code, to_csv(rows)
    return code, to_json(rep.to_dict())


# --- parser ------------------------------------------------------------------------

def _add_common(p, fmt_default="json"):
    p.add_argument("--out", help="write output to this path instead of stdout")
    p.add_argument("--format", choices=("json", "csv"), default=fmt_default)


def _add_mc(p):
    p.add_argument("--n", type=int, default=DEFAULT_N, help="Monte Carlo sample size")
    p.add_argument("--seed", type=int, default=None, help="master seed (default: $ANTICONC_SEED or 42)")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--k-sigma", type=float, default=DEFAULT_K_SIGMA)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="anticonc", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("bound", help="evaluate an anti-concentration bound")
    p.add_argument("--marginal", required=True, help="marginal as JSON or a JSON file path")
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--x", type=float, required=True)
    p.add_argument("--eps", type=float, required=True)
    p.add_argument("--kind", choices=BOUND_KINDS, required=True)
    _add_common(p)

    p = sub.add_parser("diagonal", help="validate or evaluate a diagonal section")
    p.add_argument("--spec", required=True, help="diagonal as JSON or a JSON file path")
    p.add_argument("--check", choices=("lemma1", "convexity", "psi", "eval"), default="lemma1")
    p.add_argument("--grid", type=int, default=10_000)
    p.add_argument("--tol", type=float, default=None)
    p.add_argument("--t", help="comma-separated evaluation points for --check eval")
    _add_common(p)

    p = sub.add_parser("verify", help="check a bound against Monte Carlo")
    p.add_argument("--diagonal", required=True)
    p.add_argument("--marginal", required=True)
    p.add_argument("--x", type=float, required=True)
    p.add_argument("--eps", type=float, required=True)
    p.add_argument("--bound-kind", choices=BOUND_KINDS, default="thm1-upper")
    p.add_argument("--override-bound", type=float, default=None, help="replace the bound value (negative controls)")
    _add_mc(p)
    _add_common(p)

    p = sub.add_parser("sweep", help="verify bounds over a grid of x and d; CSV output")
    p.add_argument("--diagonal", required=True, help="template diagonal; its d is replaced by each --d-list entry")
    p.add_argument("--marginal", required=True)
    p.add_argument("--x-grid", required=True, help="comma-separated x values")
    p.add_argument("--d-list", help="comma-separated dimensions (default: the diagonal's d)")
    p.add_argument("--eps", type=float, required=True)
    p.add_argument("--bound-kind", choices=BOUND_KINDS, action="append",
                   help="repeatable; default thm1-upper")
    p.add_argument("--override-bound", type=float, default=None)
    _add_mc(p)
    _add_common(p, "csv")

    p = sub.add_parser("infer", help="size-distortion bound for an inference scenario")
    p.add_argument("--scenario", required=True, help="scenario JSON file (or inline JSON)")
    p.add_argument("--mode", choices=("exact", "thm2"), default="exact")
    p.add_argument("--csv", help="also write the per-eps breakdown as CSV to this path")
    _add_mc(p)
    _add_common(p)
    return parser


COMMANDS = {"bound": cmd_bound, "diagonal": cmd_diagonal, "verify": cmd_verify,
            "sweep": cmd_sweep, "infer": cmd_infer}


def run(argv=None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else EXIT_OK
    try:
        code, text = COMMANDS[args.command](args)
    except (AntiConcError, ValueError, ArithmeticError, TypeError) as exc:
        field = getattr(exc, "field", None)
        where = f" [field: {field}]" if field else ""
        stderr.write(f"anticonc {args.command}: error{where}: {exc}\n")
        return EXIT_USAGE
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        stdout.write(text)
    return code


def main(argv=None):
    sys.exit(run(argv))


if __name__ == "__main__":
    main()
