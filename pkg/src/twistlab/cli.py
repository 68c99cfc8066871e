"""Command line front end.

    twistlab <verb> FILE [FILE ...] [--n N] [--k K] [--degree P]
                                    [--depth-cap D] [--field TAG] [--out PATH]

Exit status: 0 when every check passes, 1 when a mathematical check fails,
2 for unreadable or malformed input.  Each run prints a human summary
followed by the same report as a cert-v1 JSON document; ``--out`` writes
that document to a file.
"""

from __future__ import annotations

import argparse
import os
import random
import sys

from . import formats as fm
from .dgcore import validate_dgcat
from .errors import ContractError, SchemaError, StructuralError, TwistlabError, UnsupportedInput
from .exactlin import field_from_tag
from .homotopy import HomWindowComplex, h0_iso_decide, tower_holim
from .tstruct import (
    aisle_membership, cohomology_dims, derived_projective_cert, t_truncate,
)
from .twisted import (
    is_closed, sigma_geq, sigma_leq, truncation_tower_leq, tw_cone, tw_shift, tw_shift_mor,
    validate_twisted, weight_triangle,
)

VERBS = ("validate", "cone", "shift", "truncate", "weight-triangle", "cohomology", "iso-check",
         "t-truncate", "holim", "cert-derived-proj")

DEFAULT_TEST_FAMILY = 20


class InputError(Exception):
    pass


class Report:
    def __init__(self, command):
        self.command = command
        self.checks = []
        self.data = {}

    def check(self, name, passed, residual=None, **extra):
        self.checks.append(fm.check(name, passed, residual, **extra))

    @property
    def passed(self):
        return all(c["passed"] for c in self.checks)

    def doc(self):
        return fm.cert_doc(self.command, "pass" if self.passed else "fail", self.checks, self.data)

    def text(self):
        lines = [f"twistlab {self.command}: {'PASS' if self.passed else 'FAIL'}"]
        for c in self.checks:
            mark = "ok  " if c["passed"] else "FAIL"
            extra = ""
            if "location" in c:
                extra += f" at {tuple(c['location'])}"
            if "residual" in c:
                extra += f" residual {c['residual']}"
            lines.append(f"  [{mark}] {c['name']}{extra}")
        for k in sorted(self.data):
            v = self.data[k]
            flat = isinstance(v, list) and all(isinstance(x, (str, int)) for x in v)
            if isinstance(v, (str, int, bool)) or v is None or flat:
                lines.append(f"  {k}: {v}")
        return "\n".join(lines)


# ---------------------------------------------------------------------------
# loading


def _load(path):
    doc = fm.load_json(path)
    return doc, os.path.dirname(os.path.abspath(path))


def load_tw(path, field, want=None):
    doc, base = _load(path)
    if doc["schema"] != "tw-v1":
        raise SchemaError(f"{path}: expected a tw-v1 document, got {doc['schema']}")
    kind, value, ctx = fm.tw_from_doc(doc, base, field)
    if want is not None and kind != want:
        raise SchemaError(f"{path}: expected a {want}, got a {kind}")
    return kind, value, ctx


def _violations(rep, report, F, prefix=""):
    for v in rep.violations:
        report.check(prefix + v.axiom, False, fm.dump_vector(F, v.residual), location=list(v.location))


def _complex_summary(X):
    return {"support": [X.lo, X.hi] if not X.is_zero() else [],
            "components": {str(i): list(A) for i, A in X.components.items()},
            "twist_components": len(X.twist)}


def _mc_check(report, name, X):
    rep = validate_twisted(X)
    if rep.passed:
        report.check(name, True)
    for v in rep.violations:
        report.check(name, False, fm.dump_vector(X.field, v.residual), location=list(v.location))


# ---------------------------------------------------------------------------
# verbs


def cmd_validate(args, report):
    path = args.files[0]
    doc, base = _load(path)
    schema = doc["schema"]
    report.data["schema"] = schema
    if schema == "dgcat-v1":
        P = fm.dgcat_from_doc(doc, args.field)
        rep = validate_dgcat(P)
        report.data["objects"] = len(P.objects)
        if rep.passed:
            report.check("dgcat-axioms", True)
        _violations(rep, report, P.field)
    elif schema == "alg-v1":
        R = fm.algebra_from_doc(doc, args.field)
        bad = R.validate()
        report.data["dim"] = R.dim
        report.check("algebra-axioms", not bad)
        for name, loc in bad:
            report.check(name, False, location=list(loc))
    elif schema == "mod-v1":
        M = fm.module_from_doc(doc, base, args.field)
        bad = M.validate()
        report.data["dim"] = M.dim
        report.check("module-axioms", not bad)
        for name, loc in bad:
            report.check(name, False, location=list(loc))
    elif schema == "tw-v1":
        kind, value, ctx = fm.tw_from_doc(doc, base, args.field)
        report.data["kind"] = kind
        rep = validate_dgcat(ctx.closure.base)
        report.check("coefficients", rep.passed)
        _violations(rep, report, ctx.field, "coefficients: ")
        if kind == "complex":
            report.data["complex"] = _complex_summary(value)
            _mc_check(report, "maurer-cartan", value)
        else:
            _mc_check(report, "source maurer-cartan", value.source)
            _mc_check(report, "target maurer-cartan", value.target)
            report.data["degree"] = value.degree
            report.data["closed"] = is_closed(value)
    else:
        raise SchemaError(f"{path}: nothing to validate in a {schema} document")


def cmd_cone(args, report):
    _, f, ctx = load_tw(args.files[0], args.field, "morphism")
    report.check("degree 0", f.degree == 0)
    closed = is_closed(f)
    report.check("closed", closed)
    if f.degree != 0 or not closed:
        return
    pre = tw_cone(f, check=False)
    _mc_check(report, "cone maurer-cartan", pre.cone)
    bad = pre.failures()
    for name in ("dj=0", "dp=0", "di=jf1", "ds=-f1p", "pi=1", "sj=1", "pj=0", "si=0", "ip+js=1"):
        report.check(name, name not in bad)
    report.data["cone"] = fm.complex_to_doc(pre.cone, ctx.category_doc)


def cmd_shift(args, report):
    n = _need_int(args.n, "--n")
    kind, value, ctx = load_tw(args.files[0], args.field)
    report.data["n"] = n
    if kind == "complex":
        Y = tw_shift(value, n)
        _mc_check(report, "maurer-cartan", Y)
        report.data["result"] = fm.complex_to_doc(Y, ctx.category_doc)
    else:
        g = tw_shift_mor(value, n)
        report.check("closed preserved", is_closed(g) == is_closed(value))
        report.data["result"] = fm.morphism_to_doc(g, ctx.category_doc)


def cmd_truncate(args, report):
    if args.n is None and args.k is None:
        raise InputError("truncate needs --n (keep degrees ≥ n), --k (keep degrees ≤ k) or both")
    _, X, ctx = load_tw(args.files[0], args.field, "complex")
    Y = X
    if args.n is not None:
        Y = sigma_geq(Y, args.n)
        report.data["n"] = args.n
    if args.k is not None:
        Y = sigma_leq(Y, args.k)
        report.data["k"] = args.k
    _mc_check(report, "maurer-cartan", Y)
    report.data["result"] = fm.complex_to_doc(Y, ctx.category_doc)


def cmd_weight_triangle(args, report):
    n = _need_int(args.n, "--n")
    _, X, ctx = load_tw(args.files[0], args.field, "complex")
    wt = weight_triangle(X, n)
    report.data["n"] = n
    report.check("attaching map closed", is_closed(wt.xt))
    report.check("cone reproduces X", wt.realizes(X))
    report.check(f"upper in w>={n}", aisle_membership(wt.upper, "w>=", n).member)
    report.check(f"lower in w<={n - 1}", aisle_membership(wt.lower, "w<=", n - 1).member)
    report.data["upper"] = fm.complex_to_doc(wt.upper, ctx.category_doc)
    report.data["lower"] = fm.complex_to_doc(wt.lower, ctx.category_doc)


def cmd_cohomology(args, report):
    _, X, ctx = load_tw(args.files[0], args.field, "complex")
    if len(args.files) > 1:
        _, Y, ctx2 = load_tw(args.files[1], args.field, "complex")
        if not (X.cat == Y.cat):
            raise InputError("the two complexes live over different categories")
        H = HomWindowComplex(X, Y)
        degs = [args.degree] if args.degree is not None else H.degrees()
        report.data["hom_cohomology"] = {str(p): H.cohomology(p).dim for p in degs}
        report.check("computed", True)
        return
    if ctx.pc is not None:
        degs = [args.degree] if args.degree is not None else list(X.degrees())
        dims = cohomology_dims(ctx.pc, X, degs)
        report.data["heart_cohomology"] = {str(k): list(v) for k, v in dims.items()}
    else:
        H = HomWindowComplex(X, X)
        degs = [args.degree] if args.degree is not None else H.degrees()
        report.data["hom_cohomology"] = {str(p): H.cohomology(p).dim for p in degs}
    report.check("computed", True)


def cmd_iso_check(args, report):
    _, f, ctx = load_tw(args.files[0], args.field, "morphism")
    report.check("degree 0", f.degree == 0)
    closed = is_closed(f)
    report.check("closed", closed)
    if f.degree != 0 or not closed:
        return
    dec = h0_iso_decide(f)
    report.data["diagonal_invertible"] = dec.diagonal_invertible
    report.check("H^0-isomorphism", dec.iso)
    if dec.iso:
        cert = dec.certificate
        report.data["method"] = cert.method
        bad = cert.failures()
        for name in ("g closed of degree 0", "g∘f = 1 + d h_l", "f∘g = 1 + d h_r"):
            report.check(name, name not in bad)
        report.data["inverse"] = fm.morphism_to_doc(cert.g, ctx.category_doc)


def cmd_t_truncate(args, report):
    n = _need_int(args.n, "--n")
    _, X, ctx = load_tw(args.files[0], args.field, "complex")
    if ctx.pc is None:
        raise InputError("t-truncate needs a complex over an algebra (category.algebra)")
    tri = t_truncate(ctx.pc, X, n, depth_cap=args.depth_cap)
    report.data["n"] = n
    report.data["exact"] = tri.exact
    report.data["validity"] = list(tri.validity) if tri.validity else None
    report.data["pattern"] = {str(k): {"X": list(hx), "tau_le": list(hl), "tau_ge": list(hg)}
                              for k, (hx, hl, hg) in tri.pattern.items()}
    report.check("cohomology pattern", tri.pattern_ok)
    report.check("unit after counit null", tri.composite_null)
    report.data["tau_le"] = fm.complex_to_doc(tri.tau_le, ctx.category_doc)
    report.data["tau_ge"] = fm.complex_to_doc(tri.tau_ge, ctx.category_doc)


def cmd_holim(args, report):
    _, X, ctx = load_tw(args.files[0], args.field, "complex")
    if X.is_zero():
        raise InputError("holim needs a nonzero complex")
    start = X.lo if args.n is None else args.n
    stop = X.hi + 1 if args.k is None else args.k
    if stop < start:
        raise InputError("--k must not be below --n")
    T = truncation_tower_leq(X, start, stop)
    stable = T.check_stabilization()
    report.check("tower stabilizes", stable)
    report.data["tower"] = [start, stop]
    if not stable:
        return
    res = tower_holim(T)
    report.check("holim maurer-cartan", validate_twisted(res.holim).passed)
    report.check("comparison closed", is_closed(res.comparison))
    report.check("lim -> holim is an H^0-isomorphism", h0_iso_decide(res.comparison, certify=False).iso)
    report.data["limit"] = fm.complex_to_doc(res.limit, ctx.category_doc)
    report.data["holim"] = _complex_summary(res.holim)


def default_test_family(pc, count=DEFAULT_TEST_FAMILY, seed=0):
    """Seeded complexes supported in degrees −2..0, hence in the t≤0 aisle."""
    from .samples import random_complex
    rng = random.Random(seed)
    return [random_complex(pc.closure, rng, -2, 0, list(pc.names)) for _ in range(count)]


def cmd_cert_derived_proj(args, report):
    _, Q, ctx = load_tw(args.files[0], args.field, "complex")
    if ctx.pc is None:
        raise InputError("cert-derived-proj needs a complex over an algebra (category.algebra)")
    if len(args.files) > 1:
        tests = []
        for p in args.files[1:]:
            _, Z, c2 = load_tw(p, args.field, "complex")
            if not (Z.cat == Q.cat):
                raise InputError(f"{p}: test object lives over a different category")
            tests.append(Z)
        report.data["family"] = "files"
    else:
        tests = default_test_family(ctx.pc)
        report.data["family"] = f"default seeded family of {DEFAULT_TEST_FAMILY}"
    for idx, Z in enumerate(tests):
        if not aisle_membership(Z, "t<=", 0, ctx.pc).member:
            raise InputError(f"test object {idx} is not in the t<=0 aisle")
    cert = derived_projective_cert(ctx.pc, Q, tests)
    report.check("Q in t<=0", cert.in_aisle)
    for entry in cert.tests:
        report.check(f"H^0 Hom(Q, Z{entry['index']}[1]) = 0", entry["h0_dim"] == 0, h0_dim=entry["h0_dim"])
    report.check("H^0_t(Q) projective", cert.h0_projective)
    report.data["h0_t"] = list(cert.h0)


HANDLERS = {
    "validate": cmd_validate, "cone": cmd_cone, "shift": cmd_shift, "truncate": cmd_truncate,
    "weight-triangle": cmd_weight_triangle, "cohomology": cmd_cohomology, "iso-check": cmd_iso_check,
    "t-truncate": cmd_t_truncate, "holim": cmd_holim, "cert-derived-proj": cmd_cert_derived_proj,
}


def _need_int(v, flag):
    if v is None:
        raise InputError(f"{flag} is required")
    return v


def _field_arg(tag):
    try:
        return field_from_tag(tag)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def build_parser():
    ap = argparse.ArgumentParser(prog="twistlab", description="Exact twisted-complex computations.")
    ap.add_argument("verb", choices=VERBS)
    ap.add_argument("files", nargs="+", metavar="FILE")
    ap.add_argument("--n", type=int)
    ap.add_argument("--k", type=int)
    ap.add_argument("--degree", type=int)
    ap.add_argument("--depth-cap", type=int, default=8, dest="depth_cap")
    ap.add_argument("--field", type=_field_arg, help="Q or Fp:<p>; overrides the file headers")
    ap.add_argument("--out", help="write the cert-v1 report here")
    return ap


def run(argv=None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    args = build_parser().parse_args(argv)
    report = Report(args.verb)
    try:
        HANDLERS[args.verb](args, report)
    except (SchemaError, StructuralError, InputError, UnsupportedInput) as exc:
        print(f"twistlab {args.verb}: input error: {exc}", file=stderr)
        return 2
    except ContractError as exc:
        print(f"twistlab {args.verb}: input error: {exc}", file=stderr)
        return 2
    except TwistlabError as exc:
        print(f"twistlab {args.verb}: internal error: {exc}", file=stderr)
        return 1
    text = fm.dumps(report.doc())
    stdout.write(report.text() + "\n")
    stdout.write(text)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    return 0 if report.passed else 1


def main(argv=None):
    sys.exit(run(argv))


if __name__ == "__main__":
    main()
