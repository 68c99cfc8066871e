"""Acceptance criteria, one test per criterion, all checks exact.

Each test prints a single PASS/FAIL line to the terminal before asserting.
"""

import io
import os
import random

import pytest
import sympy

from conftest import DATA_DIR, GOLDEN_CASES, GOLDEN_DIR, closures
from twistlab.cli import default_test_family, run
from twistlab.dgcore import AdditiveClosure, field_category, validate_dgcat
from twistlab.exactlin import GF, QQ, Matrix
from twistlab.homotopy import (
    HomWindowComplex, cone_iso_transfer, h0_iso_decide, is_quasi_fully_faithful, nullhomotopy, qff_lift,
    tower_lim, truncation_sequence,
)
from twistlab.samples import (
    a2_category, acyclic_extension, collapse_functor, dual_numbers_category, random_closed,
    random_closed_map, random_complex, random_diagonal_iso, random_witness_tuple, section_functor,
)
from twistlab.tstruct import (
    ProjCategory, a2_algebra, aisle_membership, cohomology_dims, derived_projective_cert,
    dual_numbers_algebra, field_algebra, heart_cohomology, module_hom_space, proj_t_truncate_unbounded,
    t_truncate,
)
from twistlab.twisted import (
    TwistedComplex, TwMorphism, identity, is_closed, map_functor, object_complex, tw_cone, tw_diff,
    tw_sum, truncation_tower_geq, truncation_tower_leq, validate_twisted, weight_triangle,
)


def announce(capsys, number, title, failures, detail=""):
    status = "PASS" if not failures else "FAIL"
    with capsys.disabled():
        extra = f" ({detail})" if detail else ""
        print(f"\n[{status}] criterion {number}: {title}{extra}")
        for f in failures[:5]:
            print(f"        {f}")
    assert not failures, failures


# ---------------------------------------------------------------------------
# 1. Maurer-Cartan validation and violation locations


def _twist_matrices(X, p):
    """Adjacent twist components of a complex over the closure of k as
    integer matrices (reduced mod p when p is set)."""
    mats = {}
    for (i, j), v in X.twist.items():
        S, T = X.obj(i), X.obj(j)
        M = sympy.zeros(len(T), len(S))
        for r in range(len(T)):
            for c in range(len(S)):
                x = v[r * len(S) + c]
                M[r, c] = sympy.Integer(int(x)) if p else sympy.Rational(x.numerator, x.denominator)
        mats[i] = M
    return mats


def _oracle_violations(X, p):
    mats = _twist_matrices(X, p)
    out = {}
    for i, M in mats.items():
        if i + 1 in mats:
            prod = mats[i + 1] * M
            if p:
                prod = prod.applyfunc(lambda x: x % p)
            if any(x != 0 for x in prod):
                out[(i, i + 2)] = tuple(prod)
    return out


def _as_oracle(v, p):
    return tuple(int(x) if p else sympy.Rational(x.numerator, x.denominator) for x in v)


def test_criterion_1_axiom_suite(capsys):
    failures = []
    rng = random.Random(101)
    validated = perturbed = flagged = 0
    for F in (QQ, GF(101)):
        p = F.characteristic
        P = field_category(F)
        if not validate_dgcat(P).passed:
            failures.append(f"presentation over {F} invalid")
        C = AdditiveClosure(P)
        made = 0
        while made < 50:
            X = random_complex(C, rng, -3, 0, ["k"], max_parts=2)
            if len(X.twist) < 2:
                continue
            made += 1
            validated += 1
            if not validate_twisted(X).passed:
                failures.append(f"valid complex rejected: {X}")
            hits = 0
            for (i, j) in [(i, i + 1) for i in range(X.lo, X.hi)]:
                n = X.cat.dim(X.obj(i), X.obj(j), 0)
                for c in range(n):
                    tw = dict(X.twist)
                    v = list(X.x(i, j))
                    v[c] = v[c] + F.one
                    tw[(i, j)] = tuple(v)
                    Y = TwistedComplex(C, X.components, tw)
                    expect = _oracle_violations(Y, p)
                    rep = validate_twisted(Y)
                    got = {vi.location: _as_oracle(vi.residual, p) for vi in rep.violations}
                    perturbed += 1
                    if got != expect:
                        failures.append(f"entry {(i, j, c)}: reported {sorted(got)} expected {sorted(expect)}")
                    if expect:
                        hits += 1
                        flagged += 1
            if hits == 0:
                failures.append(f"no perturbation of {X} produced a violation")
    if validated != 100:
        failures.append(f"validated {validated} complexes")
    announce(capsys, 1, "axiom suite", failures,
             f"{validated} complexes, {perturbed} perturbations, {flagged} flagged")


# ---------------------------------------------------------------------------
# 2. pretriangles


def test_criterion_2_pretriangles(capsys):
    failures = []
    rng = random.Random(202)
    cats = closures(QQ) + closures(GF(101))
    for t in range(50):
        label, C, objs = cats[t % len(cats)]
        X = random_complex(C, rng, -2, 1, objs)
        Y = random_complex(C, rng, -2, 1, objs)
        f = random_closed_map(X, Y, rng)
        pre = tw_cone(f)
        if not validate_twisted(pre.cone).passed:
            failures.append(f"cone {t} fails MC")
        if not tw_diff(pre.j).is_zero():
            failures.append(f"dj ≠ 0 at {t}")
        if not tw_diff(pre.p).is_zero():
            failures.append(f"dp ≠ 0 at {t}")
        if tw_diff(pre.i) != pre.j @ f @ pre.one:
            failures.append(f"di ≠ j f 1 at {t}")
        if tw_diff(pre.s) != -(f @ pre.one @ pre.p):
            failures.append(f"ds ≠ −f 1 p at {t}")
    for t in range(20):
        label, C, objs = cats[t % len(cats)]
        X = random_complex(C, rng, -2, 1, objs)
        K = tw_cone(identity(X)).cone
        h = nullhomotopy(identity(K))
        if h is None or tw_diff(h) != identity(K):
            failures.append(f"cone(1_X) identity not nullhomotopic at {t}")
    announce(capsys, 2, "pretriangle suite", failures, "50 cones, 20 cones of identities")


# ---------------------------------------------------------------------------
# 3. isomorphisms


def test_criterion_3_isomorphisms(capsys):
    failures = []
    rng = random.Random(303)
    cats = closures(QQ) + closures(GF(101))
    for t in range(30):
        label, C, objs = cats[t % len(cats)]
        X = random_complex(C, rng, -2, 1, objs)
        f = random_diagonal_iso(X, rng) @ random_diagonal_iso(X, rng)
        dec = h0_iso_decide(f)
        if not (dec.iso and dec.diagonal_invertible):
            failures.append(f"map {t} not decided iso")
            continue
        c = dec.certificate
        if c.g @ f != identity(X) + tw_diff(c.h_l):
            failures.append(f"g∘f ≠ 1 + d h_l at {t}")
        if f @ c.g != identity(X) + tw_diff(c.h_r):
            failures.append(f"f∘g ≠ 1 + d h_r at {t}")
        if not is_closed(c.g):
            failures.append(f"inverse not closed at {t}")
    # [P =1= P] → 0: an isomorphism whose diagonal components P → 0 are not
    C = AdditiveClosure(a2_category(QQ))
    K = tw_cone(identity(object_complex(C, ("P1",), 0))).cone
    Z = TwistedComplex(C, {})
    dec = h0_iso_decide(TwMorphism(K, Z, 0, {}))
    if not dec.iso or dec.diagonal_invertible or not dec.certificate.holds():
        failures.append("[P=1=P] → 0 not decided iso by the fallback")
    announce(capsys, 3, "iso suite", failures, "30 diagonal-invertible maps + contractible case")


# ---------------------------------------------------------------------------
# 4. cone transfer over F5


def test_criterion_4_cone_transfer(capsys):
    failures = []
    F = GF(5)
    rng = random.Random(404)
    cats = closures(F)
    for t in range(30):
        label, C, objs = cats[t % len(cats)]
        w = random_witness_tuple(C, rng, -1, 0, objs)
        f, fp, u, v, h = w["f"], w["fp"], w["u"], w["v"], w["h"]
        A, B, A2, B2 = f.source, f.target, fp.source, fp.target
        if not (tw_diff(h) == v @ f - fp @ u
                and w["u_inv"] @ u == identity(A) - tw_diff(w["ut"])
                and w["v_inv"] @ v == identity(B) + tw_diff(w["vt"])
                and u @ w["u_inv"] == identity(A2) - tw_diff(w["ut_r"])
                and v @ w["v_inv"] == identity(B2) + tw_diff(w["vt_r"])):
            failures.append(f"witness tuple {t} malformed")
            continue
        src, tgt = tw_cone(f), tw_cone(fp)
        out = cone_iso_transfer(src, tgt, u, v, h, w["u_inv"], w["v_inv"], w["ut"], w["vt"], w["ut_r"], w["vt_r"])
        if out.w_left @ out.w - identity(src.cone) != tw_diff(out.h_left):
            failures.append(f"w_l∘w − 1 ≠ d h_l at {t}")
        if out.w @ out.w_right - identity(tgt.cone) != tw_diff(out.h_right):
            failures.append(f"w∘w_r − 1 ≠ d h_r at {t}")
        if not (is_closed(out.w) and is_closed(out.w_left) and is_closed(out.w_right)):
            failures.append(f"transfer maps not closed at {t}")
    announce(capsys, 4, "cone transfer suite", failures, "30 witness tuples over F5")


# ---------------------------------------------------------------------------
# 5. towers


def test_criterion_5_towers(capsys):
    failures = []
    rng = random.Random(505)
    cats = [closures(QQ)[0], closures(QQ)[1], closures(GF(101))[1], closures(GF(101))[3]]
    checked = 0
    for t in range(30):
        label, C, objs = cats[t % len(cats)]
        X = random_complex(C, rng, -2, 1, objs)
        lim = tower_lim(truncation_tower_leq(X, X.lo - 1, X.hi + 1)).limit
        colim = tower_lim(truncation_tower_geq(X, -X.hi - 1, -X.lo + 1)).limit
        if lim != X:
            failures.append(f"lim ≠ X at {t}")
        if colim != X:
            failures.append(f"colim ≠ X at {t}")
        Z = random_complex(C, rng, -1, 1, objs)
        degs = HomWindowComplex(X, Z).degrees()
        for p in range(min(degs, default=0) - 1, max(degs, default=0) + 2):
            chk = truncation_sequence(X, Z, p)
            checked += 1
            if not chk.exact:
                failures.append(f"sequence not exact at {t}, degree {p}: {chk}")
    announce(capsys, 5, "truncation/tower suite", failures, f"30 complexes, {checked} degree-wise sequences")


# ---------------------------------------------------------------------------
# 6. weights


def test_criterion_6_weights(capsys):
    failures = []
    rng = random.Random(606)
    cats = closures(QQ) + closures(GF(101))
    for t in range(24):
        label, C, objs = cats[t % len(cats)]
        X = random_complex(C, rng, 0, 2, objs)
        Y = random_complex(C, rng, -3, -1, objs)
        # oracle: degree-0 components are hom^{i-j}(X^i, Y^j) with i − j ≥ 1
        expected = sum(C.dim(X.obj(i), Y.obj(j), i - j) for i in X.components for j in Y.components)
        H = HomWindowComplex(X, Y)
        if expected != 0 or H.dim(0) != 0 or H.cohomology(0).dim != 0:
            failures.append(f"nonzero degree-0 homs at {t}")
        W = random_complex(C, rng, -2, 2, objs)
        n = rng.randint(-1, 2)
        wt = weight_triangle(W, n)
        if not wt.realizes(W):
            failures.append(f"weight triangle {t} does not realize X")
        if not aisle_membership(wt.upper, "w>=", n).member:
            failures.append(f"σ≥n not in w≥{n} at {t}")
        if not aisle_membership(wt.lower, "w<=", n - 1).member:
            failures.append(f"σ≤n−1 not in w≤{n - 1} at {t}")
        # a contractible summand far outside the window keeps membership
        K = tw_cone(identity(object_complex(C, (objs[0],), n - 4))).cone
        padded = tw_sum([wt.upper, K]).total
        if not aisle_membership(padded, "w>=", n).member:
            failures.append(f"σ≥n ⊕ contractible not certified in w≥{n} at {t}")
    announce(capsys, 6, "weight suite", failures, "24 orthogonality pairs and weight triangles")


# ---------------------------------------------------------------------------
# 7. t-structures


def _pattern_failures(pc, X, tri, n, window):
    out = []
    zero = tuple(0 for _ in pc.algebra.idempotents)
    for k in range(window[0], window[1] + 1):
        hx = tuple(heart_cohomology(pc, X, k).dim_vector()) if heart_cohomology(pc, X, k).dim else zero
        hl = cohomology_dims(pc, tri.tau_le, [k])[k]
        hg = cohomology_dims(pc, tri.tau_ge, [k])[k]
        want = (hx, zero) if k <= n else (zero, hx)
        if (hl, hg) != want:
            out.append(f"degree {k}: τ≤ {hl}, τ≥ {hg}, X {hx}, n = {n}")
    return out


def test_criterion_7_t_structures(capsys):
    failures = []
    rng = random.Random(707)
    triangles = 0
    for R in (field_algebra(QQ), a2_algebra(QQ), dual_numbers_algebra(QQ)):
        pc = ProjCategory(R)
        for _ in range(8):
            X = random_complex(pc.closure, rng, -2, 1, list(pc.names))
            n = rng.randint(X.lo - 1, X.hi)
            tri = t_truncate(pc, X, n, depth_cap=6)
            triangles += 1
            if not tri.pattern_ok:
                failures.append(f"pattern flag false over {pc.names}")
            window = (X.lo - 1, X.hi + 1) if tri.exact else tri.validity
            failures += _pattern_failures(pc, X, tri, n, window)
    pc = ProjCategory(a2_algebra(QQ))
    for t in range(20):
        X = random_complex(pc.closure, rng, -2, 1, ["P1", "P2"])
        n = rng.randint(-2, 1)
        res = proj_t_truncate_unbounded(pc, X, n)
        direct = t_truncate(pc, X, n)
        if not res.agrees or res.triangle.tau_le != direct.tau_le:
            failures.append(f"unbounded route disagrees at {t}")
        if res.steps > X.hi - X.lo + 2:
            failures.append(f"tower took {res.steps} steps at {t}")
        if not res.tower.check_stabilization():
            failures.append(f"tower stabilization unverified at {t}")
    announce(capsys, 7, "t-structure suite", failures, f"{triangles} triangles, 20 unbounded comparisons")


# ---------------------------------------------------------------------------
# 8. derived projectives


def _find_iso(M, N, rng):
    basis = module_hom_space(M, N)
    if M.dim != N.dim:
        return None
    for _ in range(20):
        phi = Matrix.zeros(M.field, N.dim, M.dim)
        for B in basis:
            phi = phi + B.scale(M.field(rng.randint(-5, 5)))
        if phi.nrows and phi.rank() == phi.nrows:
            return phi
    return None


def test_criterion_8_derived_projectives(capsys):
    failures = []
    rng = random.Random(808)
    certs = 0
    for R in (field_algebra(QQ), a2_algebra(QQ), dual_numbers_algebra(QQ)):
        pc = ProjCategory(R)
        family = default_test_family(pc)
        if len(family) != 20:
            failures.append("test family does not have 20 members")
        for Z in family:
            if not aisle_membership(Z, "t<=", 0, pc).member:
                failures.append("family member outside the t≤0 aisle")
        for name in pc.names:
            Q = object_complex(pc.closure, (name,), 0)
            cert = derived_projective_cert(pc, Q, family)
            certs += 1
            if not cert.passed:
                failures.append(f"{name}: {cert.failures}")
            H0 = heart_cohomology(pc, Q, 0)
            if _find_iso(H0, pc.module((name,)), rng) is None:
                failures.append(f"H^0_t({name}) is not isomorphic to {name}")
    announce(capsys, 8, "derived projective suite", failures, f"{certs} generators against 20 test objects")


# ---------------------------------------------------------------------------
# 9. quasi-fully-faithful lifts


def test_criterion_9_qff_lift(capsys):
    failures = []
    rng = random.Random(909)
    instances = []
    for F in (QQ, GF(101)):
        for P, objs in ((field_category(F), ["k"]), (a2_category(F), ["P1", "P2"]),
                        (dual_numbers_category(F), ["R"])):
            PL = acyclic_extension(P, 1)
            instances.append((collapse_functor(P, PL), PL, objs))
            instances.append((section_functor(P, PL), P, objs))
    instances = instances[:10]
    for t, (u, base, objs) in enumerate(instances):
        if not is_quasi_fully_faithful(u):
            failures.append(f"instance {t} is not quasi-fully faithful")
            continue
        C = AdditiveClosure(base)
        A = random_complex(C, rng, -2, 0, objs)
        B = random_complex(C, rng, -2, 0, objs)
        g = random_closed(HomWindowComplex(map_functor(u, A), map_functor(u, B)), 0, rng)
        f, alpha = qff_lift(u, A, B, g)
        if not is_closed(f) or f.source != A or f.target != B:
            failures.append(f"lift {t} is not a closed map A → B")
        if map_functor(u, f) + tw_diff(alpha) != g:
            failures.append(f"u(f) + dα ≠ g at {t}")
    announce(capsys, 9, "qff_lift suite", failures, f"{len(instances)} instances")


# ---------------------------------------------------------------------------
# 10. command line


def test_criterion_10_cli(capsys):
    failures = []
    old = os.getcwd()
    os.chdir(DATA_DIR)
    try:
        for stem, argv, code in GOLDEN_CASES:
            out, err = io.StringIO(), io.StringIO()
            got = run(argv, stdout=out, stderr=err)
            if got != code:
                failures.append(f"{stem}: exit {got}, expected {code}")
            with open(os.path.join(GOLDEN_DIR, stem + ".txt"), encoding="utf-8") as fh:
                if out.getvalue() != fh.read():
                    failures.append(f"{stem}: report differs from golden file")
        err = io.StringIO()
        if run(["validate", "no_such_file.json"], stdout=io.StringIO(), stderr=err) != 2:
            failures.append("missing input does not exit 2")
        with pytest.raises(SystemExit) as exc:
            run(["unknown-verb", "no_such_file.json"], stderr=io.StringIO())
        if exc.value.code != 2:
            failures.append("unknown verb does not exit 2")
    finally:
        os.chdir(old)
    announce(capsys, 10, "CLI golden files and exit codes", failures, f"{len(GOLDEN_CASES)} golden reports")
