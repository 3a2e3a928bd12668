import pytest

from cychom.complexes import homology
from cychom.dga import (
    DGAlgebra,
    DGAMorphism,
    base_ring,
    dump_algebra,
    koszul_resolution,
    load_algebra,
    reduction_map,
    validate,
)
from cychom.errors import InvalidModulus, InvalidParams, NotDivisible, ParseError
from cychom.intlin import AbelianGroup


def test_koszul_resolution_structure():
    A = koszul_resolution(9)
    assert A.degree_of("t") == 1
    assert A.product("t", "t") == {}
    assert A.differential("t") == {"1": 9}
    assert validate(A)
    with pytest.raises(InvalidModulus):
        koszul_resolution(1)


def test_koszul_resolution_resolves():
    C = koszul_resolution(12).underlying_complex()
    assert homology(C, 0) == AbelianGroup.cyclic(12)
    assert homology(C, 1).is_trivial()


def test_base_ring():
    A = base_ring()
    assert A.labels() == ["1"]
    assert homology(A.underlying_complex(), 0) == AbelianGroup.free(1)


def test_validation_catches_broken_tables():
    # broken unit law
    with pytest.raises(InvalidParams):
        DGAlgebra(
            basis={0: ("1", "x")},
            mult={("1", "1"): {"1": 1}, ("1", "x"): {}, ("x", "1"): {"x": 1},
                  ("x", "x"): {}},
            diff={},
            unit="1",
        )
    # Leibniz failure: d(t*t) = 0 but dt*t picks up a nonzero term
    with pytest.raises(InvalidParams):
        DGAlgebra(
            basis={0: ("1",), 1: ("t",), 2: ("u",)},
            mult={
                ("1", "1"): {"1": 1}, ("1", "t"): {"t": 1}, ("t", "1"): {"t": 1},
                ("1", "u"): {"u": 1}, ("u", "1"): {"u": 1},
                ("t", "t"): {"u": 1}, ("t", "u"): {}, ("u", "t"): {}, ("u", "u"): {},
            },
            diff={"t": {"1": 2}},
            unit="1",
        )
    # degree bookkeeping
    with pytest.raises(InvalidParams):
        DGAlgebra(
            basis={0: ("1",), 1: ("t",)},
            mult={("1", "1"): {"1": 1}, ("1", "t"): {"1": 1},
                  ("t", "1"): {"t": 1}, ("t", "t"): {}},
            diff={},
            unit="1",
        )


def test_exterior_two_generators_validates():
    # Lambda(t, u) with dt = 2, du = 3; degree-2 part spanned by tu
    A = DGAlgebra(
        basis={0: ("1",), 1: ("t", "u"), 2: ("tu",)},
        mult={
            ("1", "1"): {"1": 1},
            ("1", "t"): {"t": 1}, ("t", "1"): {"t": 1},
            ("1", "u"): {"u": 1}, ("u", "1"): {"u": 1},
            ("1", "tu"): {"tu": 1}, ("tu", "1"): {"tu": 1},
            ("t", "t"): {}, ("u", "u"): {},
            ("t", "u"): {"tu": 1}, ("u", "t"): {"tu": -1},
            ("t", "tu"): {}, ("tu", "t"): {},
            ("u", "tu"): {}, ("tu", "u"): {},
            ("tu", "tu"): {},
        },
        diff={"t": {"1": 2}, "u": {"1": 3}, "tu": {"u": 2, "t": -3}},
        unit="1",
    )
    assert validate(A)


def test_morphism_checks():
    f = reduction_map(8, 2)
    assert f.apply({"t": 1}) == {"t": 4}
    with pytest.raises(NotDivisible):
        reduction_map(8, 3)
    with pytest.raises(InvalidParams):
        # t -> 2t is not a chain map from koszul(4) to koszul(4)
        DGAMorphism(koszul_resolution(4), koszul_resolution(4),
                    {"1": {"1": 1}, "t": {"t": 2}})


def test_morphism_compose_and_identity():
    f = reduction_map(8, 4)
    g = reduction_map(4, 2)
    h = g.compose(f)
    assert h.apply({"t": 1}) == {"t": 4}
    assert h.action == reduction_map(8, 2).action
    ident = DGAMorphism.identity(koszul_resolution(8))
    assert f.compose(ident).action == f.action


def test_text_format_round_trip():
    A = koszul_resolution(4)
    text = dump_algebra(A)
    assert load_algebra(text) == A
    assert dump_algebra(load_algebra(text)) == text


def test_text_format_errors():
    with pytest.raises(ParseError):
        load_algebra("[basis]\n1 0\n")  # missing unit
    with pytest.raises(ParseError):
        load_algebra("[junk]\n")
    with pytest.raises(ParseError):
        load_algebra("x 0\n")  # content before a section
    with pytest.raises(ParseError):
        load_algebra("[basis]\n1 zero\n[unit]\n1\n")
    with pytest.raises(ParseError):
        load_algebra("[basis]\n1 0\n[unit]\n1\n[diff]\nt = 1\n")  # unknown label
    with pytest.raises(ParseError):
        # validation failures surface as parse errors with context
        load_algebra("[basis]\n1 0\n[unit]\n1\n[mult]\n1*1 = 2*1\n")


def test_combo_parsing_details():
    # coefficient 1 may be omitted, except for labels that look like bare
    # integers (ambiguous, rejected)
    src = "[basis]\n1 0\nt 1\n[unit]\n1\n[diff]\nt = 4*1\n[mult]\n" \
          "1*1 = 1*1\n1*t = t\nt*1 = t\nt*t = 0\n"
    A = load_algebra(src)
    assert A == koszul_resolution(4)
    with pytest.raises(ParseError):
        load_algebra(src.replace("1*1 = 1*1", "1*1 = 1"))
