"""JSON documents: dgcat-v1, alg-v1, mod-v1, tw-v1 and cert-v1.

Every document carries a ``schema`` header.  Scalars are written in
canonical form (``"p/q"`` strings over Q, integers over F_p) and documents
are emitted with sorted keys, so equal values serialize to equal bytes.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .algebras import AlgebraPresentation, FpModule, ProjCategory
from .dgcore import AdditiveClosure, DgCategory
from .errors import SchemaError, StructuralError
from .exactlin import Matrix, field_from_tag
from .twisted import TwistedComplex, TwMorphism

SCHEMAS = ("dgcat-v1", "alg-v1", "mod-v1", "tw-v1", "cert-v1")


def dumps(doc) -> str:
    return json.dumps(doc, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def load_json(path: str) -> dict:
    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise SchemaError(f"cannot read {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise SchemaError(f"{path}: invalid JSON ({exc.msg} at line {exc.lineno})") from None
    if not isinstance(doc, dict) or "schema" not in doc:
        raise SchemaError(f"{path}: missing schema header")
    if doc["schema"] not in SCHEMAS:
        raise SchemaError(f"{path}: unknown schema {doc['schema']!r}")
    return doc


def _need(doc, *keys, where="document"):
    for k in keys:
        if k not in doc:
            raise SchemaError(f"{where}: missing key {k!r}")


def _expect_schema(doc, schema):
    if doc.get("schema") != schema:
        raise SchemaError(f"expected a {schema} document, got {doc.get('schema')!r}")


def doc_field(doc, override=None):
    """Field of a document.

    An override may restate the header or reduce a Q document mod p; any
    other combination is inconsistent.
    """
    _need(doc, "field")
    try:
        header = field_from_tag(doc["field"])
    except ValueError as exc:
        raise SchemaError(str(exc)) from None
    if override is None or override == header:
        return header
    if header.characteristic == 0:
        return override
    raise SchemaError(f"field override {override.name} is inconsistent with header {header.name}")


def _check_nested_field(outer: dict, inner: dict):
    if "field" in outer and inner.get("field") != outer["field"]:
        raise SchemaError(f"referenced document has field {inner.get('field')!r}, expected {outer['field']!r}")


def scalar(F, tok):
    if isinstance(tok, bool) or not isinstance(tok, (int, str)):
        raise SchemaError(f"scalar must be an integer or a 'p/q' string, got {tok!r}")
    try:
        q = Fraction(tok)
    except (ValueError, ZeroDivisionError) as exc:
        raise SchemaError(f"scalar {tok!r} is not a rational number: {exc}") from None
    if not F.characteristic:
        return q
    den = F(q.denominator)
    if not den:
        raise SchemaError(f"scalar {tok!r} has a denominator divisible by {F.characteristic}")
    return F(q.numerator) / den


def vector(F, toks) -> tuple:
    if not isinstance(toks, list):
        raise SchemaError(f"expected a list of scalars, got {toks!r}")
    return tuple(scalar(F, t) for t in toks)


def dump_vector(F, v) -> list:
    return [F.dump(x) for x in v]


def matrix(F, rows, ncols=None) -> Matrix:
    if not isinstance(rows, list):
        raise SchemaError("matrix must be a list of rows")
    vals = [vector(F, r) for r in rows]
    if ncols is None:
        ncols = len(vals[0]) if vals else 0
    if any(len(r) != ncols for r in vals):
        raise SchemaError("ragged matrix rows")
    return Matrix(F, len(vals), ncols, [list(r) for r in vals])


def dump_matrix(F, M: Matrix) -> list:
    return [dump_vector(F, r) for r in M.rows]


# ---------------------------------------------------------------------------
# dgcat-v1


def dgcat_to_doc(P: DgCategory) -> dict:
    F = P.field
    homs = []
    for a in P.objects:
        for b in P.objects:
            dims = P.hom_dims(a, b)
            if dims:
                homs.append({"source": a, "target": b, "dims": {str(n): d for n, d in sorted(dims.items())}})
    diffs = [{"source": a, "target": b, "degree": n, "matrix": dump_matrix(F, M)}
             for (a, b, n), M in P.differential_items()]
    comps = []
    for (a, b, c, p, q), table in P.composition_items():
        ent = [[ig, jf, k, F.dump(x)] for (ig, jf), row in sorted(table.items()) for k, x in row]
        comps.append({"objects": [a, b, c], "degrees": [p, q], "entries": ent})
    units = {a: dump_vector(F, u) for a, u in sorted(P.units().items()) if u}
    return {"schema": "dgcat-v1", "field": F.name, "objects": list(P.objects), "zero": P.zero,
            "nonpositive": P.nonpositive, "homs": homs, "differentials": diffs, "compositions": comps,
            "units": units}


def dgcat_from_doc(doc: dict, field=None) -> DgCategory:
    _expect_schema(doc, "dgcat-v1")
    _need(doc, "objects", "homs", where="dgcat-v1")
    F = doc_field(doc, field)
    try:
        dims = {}
        for h in doc["homs"]:
            _need(h, "source", "target", "dims", where="hom entry")
            dims[(h["source"], h["target"])] = {int(n): int(d) for n, d in h["dims"].items()}
        diffs = {}
        for e in doc.get("differentials", []):
            _need(e, "source", "target", "degree", "matrix", where="differential entry")
            a, b, n = e["source"], e["target"], int(e["degree"])
            ncols = dims.get((a, b), {}).get(n, 0)
            diffs[(a, b, n)] = matrix(F, e["matrix"], ncols)
        comps = {}
        for e in doc.get("compositions", []):
            _need(e, "objects", "degrees", "entries", where="composition entry")
            a, b, c = e["objects"]
            p, q = e["degrees"]
            table = {}
            for ig, jf, k, x in e["entries"]:
                table.setdefault((int(ig), int(jf)), []).append((int(k), scalar(F, x)))
            comps[(a, b, c, int(p), int(q))] = table
        units = {a: vector(F, u) for a, u in doc.get("units", {}).items()}
        return DgCategory(F, doc["objects"], dims, diffs, comps, units, zero=doc.get("zero"),
                          nonpositive=bool(doc.get("nonpositive", True)))
    except (TypeError, ValueError, KeyError) as exc:
        if isinstance(exc, SchemaError):
            raise
        raise SchemaError(f"malformed dgcat-v1 document: {exc}") from None


# ---------------------------------------------------------------------------
# alg-v1 and mod-v1


def algebra_to_doc(R: AlgebraPresentation) -> dict:
    F = R.field
    prods = []
    for i in range(R.dim):
        for j in range(R.dim):
            v = R.c[i][j]
            if any(v):
                prods.append({"left": R.basis_names[i], "right": R.basis_names[j], "value": dump_vector(F, v)})
    return {"schema": "alg-v1", "field": F.name, "basis": list(R.basis_names), "products": prods,
            "unit": dump_vector(F, R.unit),
            "idempotents": [{"name": n, "vector": dump_vector(F, e)} for n, e in zip(R.names, R.idempotents)],
            "radical": [dump_vector(F, r) for r in R.radical]}


def algebra_from_doc(doc: dict, field=None) -> AlgebraPresentation:
    _expect_schema(doc, "alg-v1")
    _need(doc, "basis", "products", "unit", "idempotents", "radical", where="alg-v1")
    F = doc_field(doc, field)
    names = list(doc["basis"])
    d = len(names)
    idx = {n: i for i, n in enumerate(names)}
    st = [[[0] * d for _ in range(d)] for _ in range(d)]
    for p in doc["products"]:
        _need(p, "left", "right", "value", where="product entry")
        if p["left"] not in idx or p["right"] not in idx:
            raise SchemaError(f"product of unknown basis elements {p['left']!r}, {p['right']!r}")
        st[idx[p["left"]]][idx[p["right"]]] = list(vector(F, p["value"]))
    try:
        return AlgebraPresentation(F, d, st, vector(F, doc["unit"]),
                                   [vector(F, e["vector"]) for e in doc["idempotents"]],
                                   [vector(F, r) for r in doc["radical"]],
                                   names=[e["name"] for e in doc["idempotents"]], basis_names=names)
    except StructuralError as exc:
        raise SchemaError(str(exc)) from None


def module_to_doc(M: FpModule, algebra_ref: Optional[dict] = None) -> dict:
    F = M.field
    R = M.algebra
    doc = {"schema": "mod-v1", "field": F.name, "dim": M.dim,
           "action": {n: dump_matrix(F, A) for n, A in zip(R.basis_names, M.action)}}
    doc["algebra"] = algebra_ref if algebra_ref is not None else algebra_to_doc(R)
    return doc


def module_from_doc(doc: dict, base_dir: str = ".", field=None) -> FpModule:
    _expect_schema(doc, "mod-v1")
    _need(doc, "dim", "action", "algebra", where="mod-v1")
    F = doc_field(doc, field)
    R = _resolve(doc["algebra"], base_dir, "alg-v1", field, outer=doc)
    d = int(doc["dim"])
    acts = []
    for n in R.basis_names:
        if n not in doc["action"]:
            raise SchemaError(f"mod-v1: no action matrix for basis element {n!r}")
        acts.append(matrix(F, doc["action"][n], d))
    try:
        return FpModule(R, d, acts)
    except StructuralError as exc:
        raise SchemaError(str(exc)) from None


# ---------------------------------------------------------------------------
# tw-v1


@dataclass
class Context:
    """Coefficient data of a tw-v1 document."""

    closure: AdditiveClosure
    pc: Optional[ProjCategory]
    category_doc: dict

    @property
    def field(self):
        return self.closure.field


def _resolve(ref, base_dir, schema, field, outer=None):
    if isinstance(ref, str):
        doc = load_json(os.path.join(base_dir, ref))
    elif isinstance(ref, dict):
        doc = ref
    else:
        raise SchemaError(f"bad {schema} reference {ref!r}")
    if outer is not None:
        _check_nested_field(outer, doc)
    if schema == "alg-v1":
        return algebra_from_doc(doc, field)
    return dgcat_from_doc(doc, field)


def context_from_doc(cdoc: dict, base_dir: str = ".", field=None) -> Context:
    if not isinstance(cdoc, dict):
        raise SchemaError("tw-v1: category must be an object")
    if "algebra" in cdoc:
        R = _resolve(cdoc["algebra"], base_dir, "alg-v1", field)
        try:
            pc = ProjCategory(R)
        except StructuralError as exc:
            raise SchemaError(str(exc)) from None
        return Context(pc.closure, pc, {"algebra": algebra_to_doc(R)} if field is not None else cdoc)
    if "dgcat" in cdoc:
        P = _resolve(cdoc["dgcat"], base_dir, "dgcat-v1", field)
        return Context(AdditiveClosure(P), None, {"dgcat": dgcat_to_doc(P)} if field is not None else cdoc)
    raise SchemaError("tw-v1: category needs a 'dgcat' or 'algebra' entry")


def _dump_element(C: AdditiveClosure, S, T, n, v) -> list:
    F = C.field
    out = []
    for r in range(len(T)):
        for c in range(len(S)):
            blk = C.block(S, T, n, v, r, c)
            if any(blk):
                out.append({"row": r, "col": c, "coords": dump_vector(F, blk)})
    return out


def _load_element(C: AdditiveClosure, S, T, n, blocks) -> tuple:
    F = C.field
    got = {}
    for b in blocks:
        _need(b, "row", "col", "coords", where="block")
        r, c = int(b["row"]), int(b["col"])
        if not (0 <= r < len(T) and 0 <= c < len(S)):
            raise SchemaError(f"block ({r}, {c}) outside a {len(T)}×{len(S)} matrix")
        v = vector(F, b["coords"])
        if len(v) != C.base.dim(S[c], T[r], n):
            raise SchemaError(f"block ({r}, {c}) has {len(v)} coordinates, expected {C.base.dim(S[c], T[r], n)}")
        got[(r, c)] = v
    return C.from_blocks(S, T, n, got)


def _complex_body(X: TwistedComplex) -> dict:
    C = X.cat
    tw = []
    for (i, j), v in X.twist.items():
        tw.append({"from": i, "to": j, "blocks": _dump_element(C, X.obj(i), X.obj(j), i - j + 1, v)})
    return {"bounds": X.bounds, "components": {str(i): list(A) for i, A in X.components.items()}, "twist": tw}


def complex_to_doc(X: TwistedComplex, category_doc: dict) -> dict:
    doc = {"schema": "tw-v1", "kind": "complex", "category": category_doc}
    doc.update(_complex_body(X))
    return doc


def _complex_from_body(body: dict, C: AdditiveClosure) -> TwistedComplex:
    _need(body, "components", where="complex")
    try:
        comps = {int(i): tuple(A) for i, A in body["components"].items()}
        X0 = TwistedComplex(C, comps, {}, body.get("bounds", "both"))
        tw = {}
        for t in body.get("twist", []):
            _need(t, "from", "to", "blocks", where="twist entry")
            i, j = int(t["from"]), int(t["to"])
            if not i < j:
                raise SchemaError(f"twist entry ({i}, {j}) must have from < to")
            tw[(i, j)] = _load_element(C, X0.obj(i), X0.obj(j), i - j + 1, t["blocks"])
        return TwistedComplex(C, comps, tw, body.get("bounds", "both"))
    except StructuralError as exc:
        raise SchemaError(str(exc)) from None
    except (TypeError, AttributeError) as exc:
        raise SchemaError(f"malformed complex: {exc}") from None


def morphism_to_doc(f: TwMorphism, category_doc: dict) -> dict:
    C = f.cat
    comps = []
    for (i, j), v in f.components.items():
        comps.append({"from": i, "to": j,
                      "blocks": _dump_element(C, f.source.obj(i), f.target.obj(j), i - j + f.degree, v)})
    return {"schema": "tw-v1", "kind": "morphism", "category": category_doc, "degree": f.degree,
            "source": _complex_body(f.source), "target": _complex_body(f.target), "components": comps}


def _morphism_from_doc(doc: dict, ctx: Context) -> TwMorphism:
    _need(doc, "source", "target", "components", where="morphism")
    C = ctx.closure
    X = _complex_from_body(doc["source"], C)
    Y = _complex_from_body(doc["target"], C)
    p = int(doc.get("degree", 0))
    comps = {}
    for e in doc["components"]:
        _need(e, "from", "to", "blocks", where="morphism component")
        i, j = int(e["from"]), int(e["to"])
        comps[(i, j)] = _load_element(C, X.obj(i), Y.obj(j), i - j + p, e["blocks"])
    try:
        return TwMorphism(X, Y, p, comps)
    except StructuralError as exc:
        raise SchemaError(str(exc)) from None


def tw_from_doc(doc: dict, base_dir: str = ".", field=None):
    """(kind, value, context) for a tw-v1 document."""
    _expect_schema(doc, "tw-v1")
    _need(doc, "kind", "category", where="tw-v1")
    ctx = context_from_doc(doc["category"], base_dir, field)
    if doc["kind"] == "complex":
        return "complex", _complex_from_body(doc, ctx.closure), ctx
    if doc["kind"] == "morphism":
        return "morphism", _morphism_from_doc(doc, ctx), ctx
    raise SchemaError(f"tw-v1: unknown kind {doc['kind']!r}")


# ---------------------------------------------------------------------------
# cert-v1


def cert_doc(command: str, status: str, checks: list, data: dict) -> dict:
    """A report: every check has a name, a pass flag and its residual."""
    return {"schema": "cert-v1", "command": command, "status": status, "checks": checks, "data": data}


def check(name: str, passed: bool, residual=None, **extra) -> dict:
    out = {"name": name, "passed": bool(passed)}
    if residual is not None:
        out["residual"] = residual
    out.update(extra)
    return out
