import random

import pytest

from conftest import closures
from twistlab.dgcore import AdditiveClosure, field_category
from twistlab.errors import ContractError
from twistlab.exactlin import GF, QQ
from twistlab.homotopy import (
    HomWindowComplex, cone_iso_transfer, h0_iso_decide, homotopy_inverse, is_contractible,
    iso_certificate_by_induction, nullhomotopy, qff_lift, strict_cone_inverse, tower_holim, tower_lim,
    truncation_sequence,
)
from twistlab.samples import (
    a2_category, acyclic_extension, collapse_functor, random_closed, random_closed_map, random_complex,
    random_diagonal_iso, random_element, random_witness_tuple, section_functor,
)
from twistlab.twisted import (
    TwistedComplex, TwMorphism, cone_morphism, identity, is_closed, map_functor, truncation_tower_geq,
    truncation_tower_leq, tw_cone, tw_diff, tw_sum, validate_twisted,
)


def k_closure(F=QQ):
    return AdditiveClosure(field_category(F))


def test_hom_window_cohomology_small_cases():
    C = k_closure()
    K = TwistedComplex(C, {0: ("k",)})
    K1 = TwistedComplex(C, {1: ("k",)})
    E = TwistedComplex(C, {0: ("k",), 1: ("k",)}, {(0, 1): (1,)})
    assert HomWindowComplex(K, K).cohomology(0).dim == 1
    # Hom(k, k[-1]) is concentrated in degree 1
    H = HomWindowComplex(K, K1)
    assert H.degrees() == [1] and H.cohomology(1).dim == 1
    HE = HomWindowComplex(E, E)
    assert all(HE.cohomology(p).dim == 0 for p in HE.degrees())


def test_cone_of_identity_is_contractible(field):
    rng = random.Random(1)
    for label, C, objs in closures(field):
        X = random_complex(C, rng, -2, 0, objs)
        cone = tw_cone(identity(X)).cone
        h = nullhomotopy(identity(cone))
        assert h is not None and tw_diff(h) == identity(cone)
        assert is_contractible(cone)


def test_nullhomotopy_returns_none_for_nonzero_class():
    C = k_closure()
    K = TwistedComplex(C, {0: ("k",)})
    assert nullhomotopy(identity(K)) is None
    assert not is_contractible(K)


def test_diagonal_isos_certified_by_induction(field):
    rng = random.Random(2)
    for label, C, objs in closures(field):
        for _ in range(2):
            X = random_complex(C, rng, -2, 1, objs)
            f = random_diagonal_iso(X, rng)
            cert = iso_certificate_by_induction(f)
            assert cert is not None and cert.method != "solve"
            assert cert.failures() == []
            dec = h0_iso_decide(f)
            assert dec.iso and dec.diagonal_invertible and dec.certificate.holds()


def test_solve_fallback_and_non_iso(field):
    C = k_closure(field)
    E = TwistedComplex(C, {0: ("k",), 1: ("k",)}, {(0, 1): (1,)})
    Z = TwistedComplex(C, {})
    dec = h0_iso_decide(TwMorphism(E, Z, 0, {}))
    assert dec.iso and not dec.diagonal_invertible and dec.certificate.holds()
    K = TwistedComplex(C, {0: ("k",)})
    assert not h0_iso_decide(TwMorphism(K, Z, 0, {})).iso
    assert homotopy_inverse(TwMorphism(K, Z, 0, {})) is None


def test_iso_decide_rejects_open_maps():
    C = k_closure()
    E = TwistedComplex(C, {0: ("k",), 1: ("k",)}, {(0, 1): (1,)})
    K = TwistedComplex(C, {0: ("k",)})
    f = TwMorphism(K, E, 0, {(0, 0): (1,)})
    assert not is_closed(f)
    with pytest.raises(ContractError):
        h0_iso_decide(f)


def test_cone_transfer_on_witness_tuples():
    F = GF(5)
    rng = random.Random(3)
    for label, C, objs in closures(F)[:3]:
        for _ in range(3):
            t = random_witness_tuple(C, rng, -1, 0, objs)
            src, tgt = tw_cone(t["f"]), tw_cone(t["fp"])
            out = cone_iso_transfer(src, tgt, t["u"], t["v"], t["h"], t["u_inv"], t["v_inv"],
                                    t["ut"], t["vt"], t["ut_r"], t["vt_r"])
            assert out.w_left @ out.w == identity(src.cone) + tw_diff(out.h_left)
            assert out.w @ out.w_right == identity(tgt.cone) + tw_diff(out.h_right)
            assert out.certificate().holds()


def test_cone_transfer_rejects_bad_witness():
    F = GF(5)
    rng = random.Random(4)
    label, C, objs = closures(F)[1]
    t = random_witness_tuple(C, rng, -1, 0, objs)
    H = HomWindowComplex(t["u"].source, t["v"].target)
    e = random_element(H, -1, rng)
    while is_closed(e):
        e = random_element(H, -1, rng)
    bad = t["h"] + e
    with pytest.raises(ContractError):
        cone_iso_transfer(tw_cone(t["f"]), tw_cone(t["fp"]), t["u"], t["v"], bad, t["u_inv"], t["v_inv"],
                          t["ut"], t["vt"], t["ut_r"], t["vt_r"])


def test_strict_cone_inverse(field):
    rng = random.Random(5)
    label, C, objs = closures(field)[1]
    for _ in range(4):
        X = random_complex(C, rng, -1, 1, objs)
        Y = random_complex(C, rng, -1, 1, objs)
        f = random_closed_map(X, Y, rng)
        a, b = field(rng.randint(1, 4)), field(rng.randint(1, 4))
        u, v = identity(X).scale(a), identity(Y).scale(b)
        k = random_element(HomWindowComplex(X, Y), -1, rng)
        fp = (v @ f @ identity(X).scale(1 / a)) + tw_diff(k)
        # dh = vf − f'u with h = −k u
        h = -(k @ u)
        assert tw_diff(h) == v @ f - fp @ u
        src, tgt = tw_cone(f), tw_cone(fp)
        w = cone_morphism(src, tgt, u, v, h)
        winv = strict_cone_inverse(src, tgt, u, v, h, identity(X).scale(1 / a), identity(Y).scale(1 / b))
        assert winv @ w == identity(src.cone)
        assert w @ winv == identity(tgt.cone)


def test_qff_lift_for_collapse_and_section(field):
    rng = random.Random(6)
    P = a2_category(field)
    PL = acyclic_extension(P, 1)
    for u, base in ((collapse_functor(P, PL), PL), (section_functor(P, PL), P)):
        C = AdditiveClosure(base)
        for _ in range(2):
            A = random_complex(C, rng, -1, 1, ["P1", "P2"])
            B = random_complex(C, rng, -1, 1, ["P1", "P2"])
            uA, uB = map_functor(u, A), map_functor(u, B)
            g = random_closed(HomWindowComplex(uA, uB), 0, rng)
            f, alpha = qff_lift(u, A, B, g)
            assert is_closed(f)
            assert map_functor(u, f) + tw_diff(alpha) == g


def test_towers_and_holim(field):
    rng = random.Random(7)
    label, C, objs = closures(field)[1]
    for _ in range(3):
        X = random_complex(C, rng, -2, 1, objs)
        T = truncation_tower_leq(X, X.lo, X.hi + 1)
        assert tower_lim(T).limit == X
        D = truncation_tower_geq(X, -X.hi, -X.lo + 1)
        assert tower_lim(D).limit == X
        res = tower_holim(T)
        assert validate_twisted(res.holim).passed
        assert h0_iso_decide(res.comparison, certify=False).iso
        Z = random_complex(C, rng, -1, 1, objs)
        for p in range(-3, 3):
            assert truncation_sequence(X, Z, p).exact


def test_direct_sums():
    C = AdditiveClosure(a2_category(QQ))
    rng = random.Random(8)
    X = random_complex(C, rng, -1, 1, ["P1", "P2"])
    Y = random_complex(C, rng, -1, 1, ["P1", "P2"])
    S = tw_sum([X, Y])
    assert validate_twisted(S.total).passed
    assert S.projections[0] @ S.inclusions[0] == identity(X)
    assert (S.projections[1] @ S.inclusions[0]).is_zero()
    assert S.inclusions[0] @ S.projections[0] + S.inclusions[1] @ S.projections[1] == identity(S.total)
