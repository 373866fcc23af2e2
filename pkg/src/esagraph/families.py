"""JSON description of families, with ``"$name"`` placeholders for sweeps.

A document is an object with a ``kind``:

``end``
    ``form`` (``raw`` or ``gauged``), coefficients ``c``/``omega`` or ``a``,
    optional ``W`` and ``horizon``.
``tree``
    ``branching``, ``omega``, ``c``, optional ``W`` and ``max_depth``.
``starlike``
    ``core`` (``n_vertices``, ``edges``, ``omega``, ``conductance``,
    optional ``potential``), a list of ``ends``, ``attach`` and optional
    ``attach_conductance``.
``example``
    ``name`` plus the keyword arguments of the catalog constructor.

Coefficients are numbers (constants), lists (tables starting at 0) or
objects ``{"type": "power", "k", "s", "shift"}``, ``{"type": "geometric",
"k", "rho", "shift"}``, ``{"type": "table", "values", "start"}`` or
``{"type": "sum", "terms": [...]}``.
"""
from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from . import catalog
from . import sequences as sq
from .errors import EsaError, FamilyFormatError
from .graph_core import EndFamily, StarLikeSpec, TreeSpec, WeightedGraph


VALIDATION_DEPTH = 32


def substitute(doc, params: dict):
    """Replace every string ``"$name"`` by ``params[name]``."""
    if isinstance(doc, dict):
        return {k: substitute(v, params) for k, v in doc.items()}
    if isinstance(doc, list):
        return [substitute(v, params) for v in doc]
    if isinstance(doc, str) and doc.startswith("$"):
        key = doc[1:]
        if key not in params:
            raise FamilyFormatError(f"no value supplied for parameter {doc!r}")
        return params[key]
    return doc


def placeholders(doc) -> set[str]:
    if isinstance(doc, dict):
        return set().union(*(placeholders(v) for v in doc.values())) if doc else set()
    if isinstance(doc, list):
        return set().union(*(placeholders(v) for v in doc)) if doc else set()
    if isinstance(doc, str) and doc.startswith("$"):
        return {doc[1:]}
    return set()


def _num(x, what: str) -> float:
    if isinstance(x, bool) or not isinstance(x, (int, float)):
        raise FamilyFormatError(f"{what} must be a number, got {x!r}")
    return float(x)


def parse_seq(doc, what: str = "coefficient") -> sq.Seq:
    if isinstance(doc, (int, float)) and not isinstance(doc, bool):
        return sq.as_seq(float(doc))
    if isinstance(doc, list):
        return sq.Table([_num(v, what) for v in doc])
    if not isinstance(doc, dict) or "type" not in doc:
        raise FamilyFormatError(f"{what}: expected a number, a list or an object with 'type'")
    t = doc["type"]
    try:
        if t == "power":
            return sq.power(_num(doc.get("k", 1.0), "k"), _num(doc.get("s", 0.0), "s"),
                            _num(doc.get("shift", 0.0), "shift"))
        if t == "geometric":
            return sq.geometric(_num(doc.get("k", 1.0), "k"), _num(doc.get("rho", 1.0), "rho"),
                                _num(doc.get("shift", 0.0), "shift"))
        if t == "table":
            return sq.Table([_num(v, what) for v in doc["values"]], int(doc.get("start", 0)))
        if t == "sum":
            terms = [parse_seq(d, what) for d in doc["terms"]]
            if not terms:
                raise FamilyFormatError(f"{what}: empty sum")
            out = terms[0]
            for s in terms[1:]:
                out = out + s
            return out
    except KeyError as exc:
        raise FamilyFormatError(f"{what}: missing field {exc}") from None
    raise FamilyFormatError(f"{what}: unknown coefficient type {t!r}")


def _require(doc: dict, *keys):
    missing = [k for k in keys if k not in doc]
    if missing:
        raise FamilyFormatError(f"{doc.get('kind', 'family')}: missing field(s) {', '.join(missing)}")


def _end(doc: dict) -> EndFamily:
    form = doc.get("form", "raw")
    W = parse_seq(doc["W"], "W") if "W" in doc else None
    horizon = int(doc.get("horizon", 400))
    name = str(doc.get("name", ""))
    if form == "raw":
        _require(doc, "c", "omega")
        end = EndFamily.raw(parse_seq(doc["c"], "c"), parse_seq(doc["omega"], "omega"), W, horizon, name)
    elif form == "gauged":
        _require(doc, "a")
        end = EndFamily.gauged(parse_seq(doc["a"], "a"), W, horizon, name)
    else:
        raise FamilyFormatError(f"end form must be 'raw' or 'gauged', got {form!r}")
    # catch sign errors early, on the first stretch of the end
    limits = [s.domain_limit() for s in (end.conductance, end.weight, end.W)]
    end.validate(min([horizon, VALIDATION_DEPTH] + [x for x in limits if x is not None]))
    return end


def _core(doc: dict) -> WeightedGraph:
    _require(doc, "n_vertices", "edges", "omega", "conductance")
    pot = doc.get("potential")
    return WeightedGraph(int(doc["n_vertices"]), np.asarray(doc["edges"], dtype=np.int64).reshape(-1, 2),
                         np.asarray(doc["omega"], dtype=float), np.asarray(doc["conductance"], dtype=float),
                         None if pot is None else np.asarray(pot, dtype=float))


def family_from_dict(doc: dict, params: dict | None = None):
    """Build an ``EndFamily``, ``TreeSpec`` or ``StarLikeSpec`` from a parsed document."""
    if not isinstance(doc, dict):
        raise FamilyFormatError("family document must be a JSON object")
    doc = substitute(doc, params or {})
    kind = doc.get("kind")
    try:
        if kind == "end":
            return _end(doc)
        if kind == "tree":
            _require(doc, "branching", "omega", "c")
            W = parse_seq(doc["W"], "W") if "W" in doc else sq.ZERO
            return TreeSpec(int(doc["branching"]), parse_seq(doc["omega"], "omega"), parse_seq(doc["c"], "c"),
                            W, int(doc.get("max_depth", 8)))
        if kind == "starlike":
            _require(doc, "core", "ends", "attach")
            ends = tuple(_end({**e, "kind": "end"}) for e in doc["ends"])
            return StarLikeSpec(_core(doc["core"]), ends, tuple(doc["attach"]),
                                tuple(doc.get("attach_conductance", ())))
        if kind == "example":
            _require(doc, "name")
            kwargs = {k: v for k, v in doc.items() if k not in ("kind", "name")}
            ctor = {"example1": catalog.example1, "example2": catalog.example2,
                    "example3": catalog.example3, "example4": catalog.example4}.get(doc["name"])
            if ctor is None:
                raise FamilyFormatError(f"unknown example {doc['name']!r}")
            return ctor(**kwargs)
    except FamilyFormatError:
        raise
    except (EsaError, ValueError, TypeError) as exc:
        raise FamilyFormatError(f"invalid {kind} family: {exc}") from exc
    raise FamilyFormatError(f"unknown family kind {kind!r}")


def load_document(path) -> dict:
    """Read a family file; ``FileNotFoundError`` propagates, bad JSON becomes ``FamilyFormatError``."""
    text = Path(path).read_text()
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise FamilyFormatError(f"{path}: malformed JSON ({exc.msg} at line {exc.lineno})") from exc


def load_family(path, params: dict | None = None):
    return family_from_dict(load_document(path), params)
