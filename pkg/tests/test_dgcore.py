import pytest

from twistlab.dgcore import (
    AdditiveClosure, DgCategory, adjoin_zero, field_category, identity_functor, validate_dgcat,
)
from twistlab.errors import StructuralError
from twistlab.samples import (
    a2_category, acyclic_extension, collapse_functor, contractible_extension, dual_numbers_category,
    section_functor,
)


def sample_categories(F):
    return [field_category(F), a2_category(F), dual_numbers_category(F), contractible_extension(F),
            acyclic_extension(a2_category(F), 2)]


def test_sample_categories_validate(field):
    for P in sample_categories(field):
        rep = validate_dgcat(P)
        assert rep.passed, rep.violations[:3]


def test_opposites_validate_and_involute(field):
    for P in sample_categories(field):
        op = P.opposite()
        assert validate_dgcat(op).passed
        assert op.opposite() == P


def test_wrong_unit_is_reported(field):
    P = DgCategory(field, ["k", "0"], {("k", "k"): {0: 1}}, {},
                   {("k", "k", "k", 0, 0): {(0, 0): [(0, 1)]}}, {"k": [2]}, zero="0")
    rep = validate_dgcat(P)
    assert {"unit-left", "unit-right"} <= rep.axioms()
    assert ("k", "k", 0, 0) in rep.locations("unit-left")


def test_non_associative_tensor_is_reported(field):
    comps = {("R", "R", "R", 0, 0): {(0, 0): [(0, 1)], (0, 1): [(1, 1)], (1, 0): [(1, 1)],
                                     (1, 1): [(0, 1), (1, 1)]}}
    P = DgCategory(field, ["R"], {("R", "R"): {0: 2}}, {}, comps, {"R": [1, 0]})
    assert validate_dgcat(P).passed  # k[x]/(x² − x − 1)
    # x·1 = 2x breaks the unit and associativity together
    comps[("R", "R", "R", 0, 0)][(0, 1)] = [(1, 2)]
    P = DgCategory(field, ["R"], {("R", "R"): {0: 2}}, {}, comps, {"R": [1, 0]})
    assert not validate_dgcat(P).passed


def test_d_squared_and_leibniz_detected(field):
    # hom^{-1} = span(s), hom^0 = span(1), ds = 1; dropping s∘1 breaks a unit law and Leibniz
    P = DgCategory(field, ["E"], {("E", "E"): {0: 1, -1: 1}}, {("E", "E", -1): [[1]]},
                   {("E", "E", "E", 0, 0): {(0, 0): [(0, 1)]},
                    ("E", "E", "E", -1, 0): {(0, 0): [(0, 1)]},
                    ("E", "E", "E", 0, -1): {(0, 0): [(0, 1)]}}, {"E": [1]})
    assert validate_dgcat(P).passed
    bad = DgCategory(field, ["E"], {("E", "E"): {0: 1, -1: 1}}, {("E", "E", -1): [[1]]},
                     {("E", "E", "E", 0, 0): {(0, 0): [(0, 1)]},
                      ("E", "E", "E", -1, 0): {(0, 0): [(0, 1)]}}, {"E": [1]})
    rep = validate_dgcat(bad)
    assert rep.axioms() == {"unit-right", "leibniz"}
    assert rep.locations("unit-right") == [("E", "E", -1, 0)]


def test_structural_errors():
    from twistlab.exactlin import QQ
    with pytest.raises(StructuralError):
        DgCategory(QQ, ["a", "a"], {})
    with pytest.raises(StructuralError):
        DgCategory(QQ, ["a"], {("a", "b"): {0: 1}})
    with pytest.raises(StructuralError):
        DgCategory(QQ, ["a"], {("a", "a"): {0: 1}}, {("a", "a", -1): [[1]]})
    with pytest.raises(StructuralError):
        DgCategory(QQ, ["a"], {("a", "a"): {0: 1}}, units={"a": [1, 0]})


def test_additive_closure_axioms_on_sums(field):
    C = AdditiveClosure(a2_category(field))
    objs = [(), ("P1",), ("P2", "P1"), ("P1", "P2", "P2")]
    assert validate_dgcat(C, objs).passed


def test_functors_validate(field):
    for P in (field_category(field), a2_category(field), dual_numbers_category(field)):
        PL = acyclic_extension(P, 1)
        assert collapse_functor(P, PL).validate().passed
        assert section_functor(P, PL).validate().passed
        assert identity_functor(P).validate().passed
        both = section_functor(P, PL).then(collapse_functor(P, PL))
        assert both.validate().passed


def test_adjoin_zero():
    from twistlab.exactlin import QQ
    P = field_category(QQ, with_zero=False)
    Z = adjoin_zero(P)
    assert Z.zero is not None and Z.is_zero_object(Z.zero)
    assert validate_dgcat(Z).passed
