import pytest

from knothom.closed import KappaData, closed_component_homology, conf_ranks, kappa_ses, quotient_homology, unknot_detectors
from knothom.errors import UnsupportedClass
from knothom.expr import parse
from knothom.graded import F2, F3, QQ, AbGroup, GradedAb, field_betti, so3

KNOTS = ["T(3,2)", "F8", "cable(3,2;T(3,2))", "sum(T(3,2),T(5,2))", "hyp(W;m=2;rev=yes;T(3,2))", "sum(T(3,2),F8,T(5,2))"]


def test_unknot_spaces():
    u = parse("U")
    assert closed_component_homology(u, "s3", None, 5) == GradedAb.from_ranks([1, 0, 1, 1, 0, 1])
    assert closed_component_homology(u, "star", None, 3) == GradedAb.from_ranks([1, 0, 1, 0])
    assert closed_component_homology(u, "r3", None, 3) == so3(3)


def test_trefoil_in_s3():
    h = closed_component_homology(parse("T(3,2)"), "s3", None, 4)
    assert h[1] == AbGroup(0, (2,))
    assert closed_component_homology(parse("T(3,2)"), "star", None, 3) == so3(3)


@pytest.mark.parametrize("text", KNOTS)
@pytest.mark.parametrize("space", ["s3", "star", "r3"])
def test_field_matches_integral(text, space):
    e = parse(text)
    h = closed_component_homology(e, space, None, 5)
    for fld in (QQ, F2, F3):
        assert closed_component_homology(e, space, fld, 5) == field_betti(h, fld)


def test_repeated_summand_unsupported():
    with pytest.raises(UnsupportedClass):
        closed_component_homology(parse("sum(T(3,2),T(3,2))"), "s3", None, 3)
    with pytest.raises(UnsupportedClass):
        quotient_homology(parse("sum(T(3,2),T(5,2))"), 3)


def test_conf_ranks():
    assert conf_ranks(3, 3).ranks().coeffs == (1, 3, 2, 0)


@pytest.mark.parametrize("text", KNOTS)
def test_kappa_coker_two_torsion(text):
    for space in ("star", "r3"):
        k = kappa_ses(parse(text), space, 1)
        assert k["coker"].torsion_count(2) >= 1


@pytest.mark.parametrize("text", KNOTS)
@pytest.mark.parametrize("space", ["star", "r3"])
def test_kappa_ranks_match_homology(text, space):
    e = parse(text)
    h = closed_component_homology(e, space, QQ, 4)
    for n in range(4):
        assert kappa_ses(e, space, n)["rank"] == h[n]


def test_kappa_composite():
    assert KappaData(GradedAb.of([1, 1])).composite_is_zero(1)


@pytest.mark.parametrize("text", ["U"] + KNOTS)
def test_detectors_consistent(text):
    d = unknot_detectors(parse(text))
    assert d["consistent"]
    assert d["unknot"] == (text == "U")


def test_bad_space():
    with pytest.raises(ValueError):
        closed_component_homology(parse("T(3,2)"), "s4", None, 3)
    with pytest.raises(ValueError):
        kappa_ses(parse("T(3,2)"), "s3", 1)
