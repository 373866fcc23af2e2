"""``esagraph`` command line.

Every command prints one report. JSON reports carry ``schema``, the
package version, the command echo and a digest of the inputs; floats are
written with 17 significant digits and keys are sorted, so identical
inputs give byte-identical output (``--timing`` adds a wall-clock field
and gives that up).

Exit codes: 0 on success, 1 on input errors, 2 when ``--strict`` is set
and the verdict is Inconclusive.
"""
from __future__ import annotations

import argparse
import csv
import hashlib
import io
import math
import sys
import time
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import __version__
from . import catalog
from .classify import INCONCLUSIVE, classify, growth_condition_margin, root_moduli
from .dirichlet import non_esa_witness
from .errors import EsaError
from .families import family_from_dict, load_document, placeholders
from .graph_core import EndFamily, StarLikeSpec, TreeSpec, build_truncation, radial_reduce
from .metric import MetricScheme, boundary_distance, end_completeness
from .operators import dense_matrix
from .weyl import BORDERLINE, LIMIT_POINT, classify_end, limit_matrix, radial_characteristic_roots, radial_limit

SCHEMA = 1


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


# -- serialization ----------------------------------------------------------

def _plain(obj):
    """Convert numpy and complex values into JSON-ready Python objects."""
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _plain(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return float(obj)
    if isinstance(obj, (complex, np.complexfloating)):
        return [float(obj.real), float(obj.imag)]
    if obj is None or isinstance(obj, str):
        return obj
    if hasattr(obj, "value"):      # enums
        return obj.value
    return str(obj)


def _fmt_float(x: float) -> str:
    if math.isnan(x):
        return '"NaN"'
    if math.isinf(x):
        return '"Infinity"' if x > 0 else '"-Infinity"'
    return format(x, ".17g")


def dumps(obj, indent: int = 2) -> str:
    """Deterministic JSON: sorted keys, 17-digit floats, non-finite floats as strings."""
    import json

    def enc(o, level):
        pad = " " * (indent * (level + 1))
        end = " " * (indent * level)
        if isinstance(o, dict):
            if not o:
                return "{}"
            items = [f"{pad}{json.dumps(k)}: {enc(o[k], level + 1)}" for k in sorted(o)]
            return "{\n" + ",\n".join(items) + "\n" + end + "}"
        if isinstance(o, list):
            if not o:
                return "[]"
            return "[\n" + ",\n".join(pad + enc(v, level + 1) for v in o) + "\n" + end + "]"
        if isinstance(o, bool) or o is None:
            return json.dumps(o)
        if isinstance(o, float):
            return _fmt_float(o)
        return json.dumps(o)

    return enc(_plain(obj), 0)


def _digest(*parts) -> str:
    h = hashlib.sha256()
    for p in parts:
        h.update(dumps(p, indent=0).encode())
    return h.hexdigest()[:16]


def _csv(rows: list[dict], columns: list[str]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for r in rows:
        w.writerow([_csv_cell(r.get(c)) for c in columns])
    return buf.getvalue()


def _csv_cell(v):
    v = _plain(v)
    if isinstance(v, float):
        return format(v, ".17g")
    if isinstance(v, list):
        return ";".join(str(_csv_cell(x)) for x in v)
    return "" if v is None else v


# -- argument helpers -------------------------------------------------------

def parse_lambda(text: str) -> complex:
    t = text.strip().replace(" ", "").replace("i", "j")
    try:
        return complex(t)
    except ValueError:
        raise UsageError(f"cannot parse spectral parameter {text!r}") from None


def parse_horizons(text: str) -> list[int]:
    try:
        hs = [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise UsageError(f"horizons must be comma-separated integers, got {text!r}") from None
    if not hs:
        raise UsageError("at least one horizon is required")
    return hs


def parse_params(items) -> dict:
    out = {}
    for item in items or ():
        key, sep, val = item.partition("=")
        if not sep:
            raise UsageError(f"--set expects name=value, got {item!r}")
        try:
            out[key] = float(val)
        except ValueError:
            raise UsageError(f"--set {key}: not a number: {val!r}") from None
    return out


def _load(args, extra: dict | None = None):
    doc = load_document(args.family)
    params = {**parse_params(getattr(args, "set", None)), **(extra or {})}
    return doc, params, family_from_dict(doc, params)


# -- commands ----------------------------------------------------------------

def _verdict_payload(spec, lam) -> dict:
    v = classify(spec, lam)
    out = v.as_dict()
    out["root_moduli"] = root_moduli(v)
    return out


def cmd_classify(args) -> tuple[dict, str | None]:
    doc, params, spec = _load(args)
    res = _verdict_payload(spec, parse_lambda(args.lam))
    return {"inputs": _digest(doc, params), "results": res}, res["status"]


def _grid(args) -> list[float]:
    if args.values:
        return [float(x) for x in args.values.split(",")]
    if args.start is None or args.stop is None or args.step is None:
        raise UsageError("sweep needs --values or all of --from, --to, --step")
    if args.step <= 0:
        raise UsageError("--step must be positive")
    n = int(math.floor((args.stop - args.start) / args.step + 1e-9)) + 1
    return [round(args.start + i * args.step, 12) for i in range(max(n, 0))]


def cmd_sweep(args):
    doc = load_document(args.family)
    base = parse_params(args.set)
    if args.param not in placeholders(doc):
        raise UsageError(f"family has no placeholder ${args.param}")
    lam = parse_lambda(args.lam)
    grid = _grid(args)

    def one(x):
        spec = family_from_dict(doc, {**base, args.param: x})
        v = classify(spec, lam)
        return {args.param: x, "status": v.status, "rule": v.rule, "root_moduli": root_moduli(v),
                "conflict": v.conflict}

    with ThreadPoolExecutor(max_workers=max(1, args.jobs)) as pool:
        rows = list(pool.map(one, grid))      # map keeps grid order
    worst = INCONCLUSIVE if any(r["status"] == INCONCLUSIVE for r in rows) else "ok"
    return {"inputs": _digest(doc, base, grid), "results": {"rows": rows}}, worst


def cmd_dirichlet(args):
    doc, params, spec = _load(args)
    rep = non_esa_witness(spec, parse_horizons(args.horizons), args.boundary_value)
    return {"inputs": _digest(doc, params), "results": rep.as_dict()}, None


def _end_list(spec):
    if isinstance(spec, EndFamily):
        return [spec]
    if isinstance(spec, StarLikeSpec):
        return list(spec.ends)
    return [radial_reduce(spec)]


def cmd_weyl(args):
    doc, params, spec = _load(args)
    lam = parse_lambda(args.lam)
    ends = []
    for e in _end_list(spec):
        c = classify_end(e, lam, audit=True)
        item = c.as_dict()
        if args.dump_matrix:
            item["limit_matrix"] = limit_matrix(e, lam).matrix
        ends.append(item)
    res = {"ends": ends, "radial": isinstance(spec, TreeSpec)}
    statuses = {e["status"] for e in ends}
    if BORDERLINE not in statuses:
        n = sum(0 if e["status"] == LIMIT_POINT else 1 for e in ends)
        res["n_plus"] = res["n_minus"] = n
    return {"inputs": _digest(doc, params), "results": res}, None


def cmd_metric(args):
    doc, params, spec = _load(args)
    scheme = MetricScheme.parse(args.scheme)
    res = {"scheme": scheme.value}
    if isinstance(spec, (EndFamily, TreeSpec)):
        comp = end_completeness(spec, scheme)
        res["completeness"] = {"status": comp.status.value, "length": comp.tail_sum, "method": comp.method}
        if comp.status.value == "NonComplete":
            ns = list(range(0, 21, 5))
            res["D"] = {str(n): boundary_distance(spec, scheme, n) for n in ns}
    else:
        res["ends"] = []
        for e in spec.ends:
            comp = end_completeness(e, scheme)
            res["ends"].append({"status": comp.status.value, "length": comp.tail_sum, "method": comp.method})
    try:
        res["growth"] = growth_condition_margin(spec, scheme=scheme).as_dict()
    except EsaError as exc:
        res["growth"] = {"error": str(exc)}
    if args.dump_matrix:
        g = build_truncation(spec, min(args.dump_horizon, 64))
        res["laplacian"] = dense_matrix(g, "laplacian")
    return {"inputs": _digest(doc, params, scheme.value), "results": res}, None


# -- reproduce ---------------------------------------------------------------

def _asymptotic_rows(end: EndFamily, exp_a: float, exp_w: float, coef_w: float, ns=(10, 100, 1000, 10_000)):
    a, W = end.gauge_coefficients()
    return [{"n": n, "a_ratio": float(a(float(n)) / n**exp_a), "W_ratio": float(W(float(n)) / (coef_w * n**exp_w))}
            for n in ns]


def _expected_row(name, expected, status, rule):
    return {"example": name, "expected": expected, "status": status, "rule": rule,
            "matches": status == expected}


def reproduce_example1(args):
    end = catalog.example1()
    v = classify(end)
    cross = classify(end, disabled_rules=("ThmNonComplete",))
    wit = non_esa_witness(end, [100, 200, 400])
    return {
        "family": "c = n^3, omega = 1/(n+1)",
        "asymptotics": _asymptotic_rows(end, 5.0, 3.0, -3.0),
        "verdict": v.as_dict(),
        "cross_check": {"disabled": ["ThmNonComplete"], "status": cross.status, "rule": cross.rule},
        "witness": wit.as_dict(),
        "table": [_expected_row("example1", "NotESA", v.status, v.rule)],
    }, v.status


def _example2_expected(A: float) -> str:
    if abs(A - catalog.A0) < 1e-12 or abs(A - catalog.A0_MIRROR) < 1e-12:
        return INCONCLUSIVE
    return "NotESA" if catalog.A0_MIRROR < A < catalog.A0 else "ESA"


def reproduce_example2(args):
    A = float(args.A)
    end = catalog.example2(A)
    v = classify(end)
    raw = catalog.example2(A, "raw")
    raw_v = classify(raw)
    try:
        growth = growth_condition_margin(raw).as_dict()
    except EsaError as exc:
        growth = {"error": str(exc)}
    return {
        "A": A,
        "A0": catalog.A0,
        "A0_mirror": catalog.A0_MIRROR,
        "verdict": v.as_dict(),
        "root_moduli": root_moduli(v),
        "raw_form": {"status": raw_v.status, "rule": raw_v.rule},
        "growth_raw": growth,
        "table": [_expected_row(f"example2(A={A:g})", _example2_expected(A), v.status, v.rule)],
    }, v.status


def reproduce_example3(args):
    end = catalog.example3(args.gamma, args.beta)
    g, b = args.gamma, args.beta
    v = classify(end)
    cross = classify(end, disabled_rules=("ThmNonComplete",))
    return {
        "gamma": g,
        "beta": b,
        "asymptotics": _asymptotic_rows(end, g + 2 * b, 2 * b + g - 2, -b * (b + g - 1)),
        "verdict": v.as_dict(),
        "cross_check": {"disabled": ["ThmNonComplete"], "status": cross.status, "rule": cross.rule},
        "table": [_expected_row(f"example3(gamma={g:g}, beta={b:g})", "NotESA", v.status, v.rule)],
    }, v.status


def reproduce_example4(args):
    tree = catalog.example4(args.N)
    v = classify(tree)
    u_roots = radial_characteristic_roots(tree)
    cert = radial_limit(tree)
    return {
        "N": args.N,
        "verdict": v.as_dict(),
        "depth_roots": u_roots,
        "depth_root_moduli": np.abs(u_roots),
        "radial_certified": cert.certified,
        "radial_root_moduli": root_moduli(v),
        "table": [_expected_row(f"example4(N={args.N})", "NotESA", v.status, v.rule)],
    }, v.status


REPRODUCERS = {
    "example1": reproduce_example1,
    "example2": reproduce_example2,
    "example3": reproduce_example3,
    "example4": reproduce_example4,
}


def cmd_reproduce(args):
    res, status = REPRODUCERS[args.example](args)
    return {"inputs": _digest(args.example, {k: getattr(args, k) for k in ("A", "N", "gamma", "beta")}),
            "results": res}, status


# -- parser --------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="esagraph", description="Essential self-adjointness of weighted graph operators.")
    p.add_argument("--version", action="version", version=f"esagraph {__version__}")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp, family=True):
        if family:
            sp.add_argument("--family", required=True, help="JSON family description")
            sp.add_argument("--set", action="append", metavar="NAME=VALUE",
                            help="value for a $NAME placeholder (repeatable)")
        sp.add_argument("--format", choices=("json", "csv"), default="json")
        sp.add_argument("--strict", action="store_true", help="exit 2 on Inconclusive verdicts")
        sp.add_argument("--timing", action="store_true", help="include wall-clock time in the report")
        sp.add_argument("--lambda", dest="lam", default="1j", help="spectral parameter (default i)")

    sp = sub.add_parser("classify", help="verdict with the rule trail")
    common(sp)

    sp = sub.add_parser("sweep", help="classify over a parameter grid")
    common(sp)
    sp.add_argument("--param", required=True)
    sp.add_argument("--from", dest="start", type=float)
    sp.add_argument("--to", dest="stop", type=float)
    sp.add_argument("--step", type=float)
    sp.add_argument("--values", help="explicit comma-separated grid")
    sp.add_argument("--jobs", type=int, default=1)

    sp = sub.add_parser("dirichlet", help="Dirichlet witness at increasing horizons")
    common(sp)
    sp.add_argument("--horizons", default="100,200,400")
    sp.add_argument("--boundary-value", "--boundary", dest="boundary_value", type=float, default=1.0)

    sp = sub.add_parser("weyl", help="limit point / limit circle per end")
    common(sp)
    sp.add_argument("--dump-matrix", action="store_true", help="include the limiting transfer matrix")

    sp = sub.add_parser("metric", help="completeness, boundary distance, growth margin")
    common(sp)
    sp.add_argument("--scheme", default="min-omega", help="inv-sqrt-c or min-omega")
    sp.add_argument("--dump-matrix", action="store_true", help="include a dense Laplacian of a small truncation")
    sp.add_argument("--dump-horizon", type=int, default=8)

    sp = sub.add_parser("reproduce", help="rerun a worked example")
    common(sp, family=False)
    sp.add_argument("example", choices=sorted(REPRODUCERS))
    sp.add_argument("--A", type=float, default=0.0)
    sp.add_argument("--N", type=int, default=2)
    sp.add_argument("--gamma", type=float, default=3.0)
    sp.add_argument("--beta", type=float, default=1.0)
    return p


COMMANDS = {
    "classify": cmd_classify,
    "sweep": cmd_sweep,
    "dirichlet": cmd_dirichlet,
    "weyl": cmd_weyl,
    "metric": cmd_metric,
    "reproduce": cmd_reproduce,
}


def _render(report: dict, fmt: str, command: str) -> str:
    if fmt == "json":
        return dumps(report) + "\n"
    res = report["results"]
    if isinstance(res.get("rows"), list):
        rows = res["rows"]
        cols = list(rows[0].keys()) if rows else []
        return _csv(rows, cols)
    if "table" in res:
        return _csv(res["table"], ["example", "expected", "status", "rule", "matches"])
    flat = [{"key": k, "value": v} for k, v in sorted(res.items()) if not isinstance(v, (dict, list))]
    return _csv(flat, ["key", "value"])


def execute(argv=None, out=None, err=None) -> int:
    out = sys.stdout if out is None else out
    err = sys.stderr if err is None else err
    try:
        args = build_parser().parse_args(argv)
    except UsageError as exc:
        print(f"esagraph: error: {exc}", file=err)
        return 1
    except SystemExit as exc:       # --help / --version
        return int(exc.code or 0)
    t0 = time.perf_counter()
    try:
        body, status = COMMANDS[args.command](args)
    except FileNotFoundError as exc:
        print(f"esagraph: error: file not found: {exc.filename}", file=err)
        return 1
    except (UsageError, EsaError) as exc:
        print(f"esagraph: error: {exc}", file=err)
        return 1
    report = {"schema": SCHEMA, "version": __version__,
              "command": [args.command] + ([args.example] if args.command == "reproduce" else []), **body}
    if args.timing:
        report["wall_time"] = time.perf_counter() - t0
    out.write(_render(report, args.format, args.command))
    if args.strict and status == INCONCLUSIVE:
        return 2
    return 0


def main() -> None:
    sys.exit(execute())


if __name__ == "__main__":
    main()
