import os
import random

import pytest

from twistlab.exactlin import GF, QQ

DATA_DIR = os.path.join(os.path.dirname(__file__), "..", "src", "twistlab", "data")
GOLDEN_DIR = os.path.join(os.path.dirname(__file__), "golden")

# (golden file stem, argv relative to the data directory, expected exit status)
GOLDEN_CASES = [
    ("validate_k_to_k", ["validate", "k_to_k.tw.json"], 0),
    ("validate_three_term_bad", ["validate", "three_term_bad.tw.json"], 1),
    ("validate_contractible_dgcat", ["validate", "contractible.dgcat.json"], 0),
    ("validate_s1_module", ["validate", "s1.mod.json"], 0),
    ("validate_a2_algebra", ["validate", "a2.alg.json"], 0),
    ("cone_k_identity", ["cone", "k_identity.tw.json"], 0),
    ("shift_k_to_k", ["shift", "k_to_k.tw.json", "--n", "1"], 0),
    ("truncate_bad_window", ["truncate", "three_term_bad.tw.json", "--n", "1", "--k", "2"], 0),
    ("weight_triangle_k_to_k", ["weight-triangle", "k_to_k.tw.json", "--n", "1"], 0),
    ("cohomology_a2_resolution", ["cohomology", "a2_resolution.tw.json"], 0),
    ("cohomology_hom_pair", ["cohomology", "a2_p1.tw.json", "a2_resolution.tw.json"], 0),
    ("iso_contractible_to_zero", ["iso-check", "contractible_to_zero.tw.json"], 0),
    ("iso_scale_two", ["iso-check", "scale_two.tw.json"], 0),
    ("iso_k_to_zero", ["iso-check", "k_to_zero.tw.json"], 1),
    ("t_truncate_a2_resolution", ["t-truncate", "a2_resolution.tw.json", "--n", "0"], 0),
    ("t_truncate_dual_x", ["t-truncate", "dual_x.tw.json", "--n", "0", "--depth-cap", "3"], 0),
    ("holim_a2_resolution", ["holim", "a2_resolution.tw.json"], 0),
    ("cert_derived_proj_p1", ["cert-derived-proj", "a2_p1.tw.json"], 0),
    ("cert_derived_proj_s1_presentation", ["cert-derived-proj", "s1_presentation.tw.json", "a2_p2.tw.json"], 1),
    ("validate_bad_field_fp5", ["validate", "three_term_bad.tw.json", "--field", "Fp:5"], 1),
]


def data_path(name):
    return os.path.join(DATA_DIR, name)


@pytest.fixture
def rng():
    return random.Random(20240611)


@pytest.fixture(params=[QQ, GF(101)], ids=["Q", "F101"])
def field(request):
    return request.param


def closures(F):
    """(label, additive closure, generating objects) for the sample categories."""
    from twistlab.dgcore import AdditiveClosure, field_category
    from twistlab.samples import a2_category, contractible_extension, dual_numbers_category
    return [
        ("k", AdditiveClosure(field_category(F)), ["k"]),
        ("a2", AdditiveClosure(a2_category(F)), ["P1", "P2"]),
        ("dual", AdditiveClosure(dual_numbers_category(F)), ["R"]),
        ("lambda", AdditiveClosure(contractible_extension(F)), ["E"]),
    ]
