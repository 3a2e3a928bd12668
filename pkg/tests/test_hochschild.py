import pytest

from cychom.dga import (
    DGAlgebra,
    base_ring,
    koszul_resolution,
    reduction_map,
)
from cychom.errors import BoundTooSmall, TruncationTooTight
from cychom.hochschild import (
    connes_B,
    hh,
    hochschild_complex,
    induced_map,
)
from cychom.intlin import AbelianGroup


def exterior_two():
    """Lambda(t, u), dt = 2, du = 3."""
    return DGAlgebra(
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


def upper_triangular_two():
    """2x2 upper triangular matrices over Z, concentrated in degree 0.

    Basis {one, e12, e22}: the unit is a basis label, so e11 = one - e22
    is implicit and the table below encodes e_{ij} e_{kl} = delta_{jk} e_{il}.
    """
    mult2 = {
        ("one", "one"): {"one": 1},
        ("one", "e12"): {"e12": 1}, ("e12", "one"): {"e12": 1},
        ("one", "e22"): {"e22": 1}, ("e22", "one"): {"e22": 1},
        ("e12", "e12"): {}, ("e12", "e22"): {"e12": 1},
        ("e22", "e12"): {}, ("e22", "e22"): {"e22": 1},
    }
    return DGAlgebra(
        basis={0: ("one", "e12", "e22")}, mult=mult2, diff={}, unit="one"
    )


def test_identity_suite_all_primes_up_to_seven():
    # D^2 = B^2 = DB + BD = 0 as matrix identities through degree 2p + 1
    for p in (2, 3, 5, 7):
        H = hochschild_complex(koszul_resolution(p), 2 * p + 1)
        checks = H.check_identities()
        assert all(checks.values()), (p, checks)


def test_identity_suite_other_algebras():
    for A in (base_ring(), exterior_two(), upper_triangular_two()):
        H = hochschild_complex(A, 6)
        assert all(H.check_identities().values())


def test_hh_of_base_ring():
    assert hh(base_ring(), 0) == AbelianGroup.free(1)
    for i in (1, 2, 3):
        assert hh(base_ring(), i).is_trivial()


def test_hh_of_z_mod_m():
    # HH_i(Z/m over Z) = Z/m for even i, 0 for odd i
    for m in (4, 9, 25):
        for i in range(6):
            want = AbelianGroup.cyclic(m) if i % 2 == 0 else AbelianGroup.trivial()
            assert hh(koszul_resolution(m), i) == want, (m, i)


def test_hh_of_upper_triangular_is_separable_like():
    # triangular algebras have the Hochschild homology of their diagonal,
    # here Z x Z: Z^2 in degree 0 and nothing above
    A = upper_triangular_two()
    assert hh(A, 0, bound=4) == AbelianGroup.free(2)
    for i in (1, 2, 3):
        assert hh(A, i, bound=4).is_trivial()


def test_bounds_and_truncation():
    with pytest.raises(BoundTooSmall):
        hochschild_complex(base_ring(), -1)
    H = hochschild_complex(koszul_resolution(4), 3)
    with pytest.raises(TruncationTooTight):
        H.homology(4)
    with pytest.raises(TruncationTooTight):
        H.cyclic_operator(4)


def test_connes_operator_degrees():
    H = hochschild_complex(koszul_resolution(4), 4)
    B = connes_B(H, 2)
    assert B.shape == (H.dim(3), H.dim(2))


def test_induced_map_is_chain_map_and_functorial():
    f = reduction_map(8, 4)
    g = reduction_map(4, 2)
    src, mid, F = induced_map(f, 4)
    mid2, tgt, G = induced_map(g, 4)
    assert mid.total == mid2.total
    _, _, GF = induced_map(g.compose(f), 4)
    for n in range(5):
        assert GF.component(n) == G.component(n) @ F.component(n)


def test_induced_map_drops_normalized_units():
    # t -> 4 t' in koszul(8) -> koszul(2); words stay unit-free in slots >= 1
    _, tgt, F = induced_map(reduction_map(8, 2), 3)
    for n in range(4):
        M = F.component(n)
        assert M.shape == (tgt.total.dim(n), M.cols)
