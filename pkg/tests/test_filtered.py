import pytest

from cychom.errors import InvalidParams, ParseError, UnsupportedFiltration
from cychom.filtered import (
    FilteredAbelianGroup,
    FilteredRing,
    PresentedGroup,
    adic_filtration,
    cyclic_bar,
    degeneracy_map,
    face_map,
    filtered_tensor,
    fixed_points_check,
    graded,
    graded_comparison,
    graded_piece,
    load_filtered_ring,
    multi_tensor,
    tensor_transition,
)
from cychom.intlin import AbelianGroup, SparseIntMatrix, lattice_contains

from oracles import quotient_invariants


def group_of(level):
    return level.group()


def as_group(pres):
    cols = [
        [pres.relations[(r, c)] for r in range(pres.num_generators)]
        for c in range(pres.relations.cols)
    ]
    free, facs = quotient_invariants(pres.num_generators, cols)
    return AbelianGroup(free, tuple(facs))


def test_presented_group_basics():
    P = PresentedGroup.cyclic(6)
    assert P.group() == AbelianGroup.cyclic(6)
    assert PresentedGroup.free(2).group() == AbelianGroup.free(2)
    # multiplication by 3: Z/6 -> Z/6 is a hom, by 1: Z/6 -> Z/4 is not
    three = SparseIntMatrix.from_dense([[3]])
    assert P.admits_hom(three, P)
    assert not P.admits_hom(SparseIntMatrix.from_dense([[1]]), PresentedGroup.cyclic(4))
    assert P.homs_equal(three, SparseIntMatrix.from_dense([[9]]), P)


def test_adic_filtration_shape():
    M = adic_filtration(3, 3)
    assert M.depth() == 3
    assert M.piece(0).group() == AbelianGroup.cyclic(27)
    assert M.piece(-1).group() == AbelianGroup.cyclic(9)
    assert M.piece(-2).group() == AbelianGroup.cyclic(3)
    assert M.piece(-3).group().is_trivial()
    assert M.piece(5).group() == AbelianGroup.cyclic(27)  # constant above 0
    assert M.group.transition(-1).to_dense() == [[3]]
    with pytest.raises(InvalidParams):
        adic_filtration(4, 2)
    with pytest.raises(InvalidParams):
        adic_filtration(3, 2, exponent=3)


def test_adic_filtration_larger_exponent():
    # ideal (p^2) inside Z/p^3: depth ceil(3/2) = 2
    M = adic_filtration(5, 3, exponent=2)
    assert M.depth() == 2
    assert M.piece(-1).group() == AbelianGroup.cyclic(5)
    assert M.piece(-2).group().is_trivial()


def test_filtered_group_validation():
    pieces = {0: PresentedGroup.cyclic(4), -1: PresentedGroup.cyclic(2)}
    good = {-1: SparseIntMatrix.from_dense([[2]])}
    FilteredAbelianGroup(pieces, good)
    with pytest.raises(InvalidParams):
        # x -> x is not a hom Z/2 -> Z/4
        FilteredAbelianGroup(pieces, {-1: SparseIntMatrix.from_dense([[1]])})
    with pytest.raises(InvalidParams):
        FilteredAbelianGroup({-1: PresentedGroup.cyclic(2)}, {})
    with pytest.raises(InvalidParams):
        FilteredAbelianGroup(pieces, {})


def test_filtered_ring_validation_catches_bad_product():
    pieces = {0: PresentedGroup.cyclic(4), -1: PresentedGroup.cyclic(2)}
    group = FilteredAbelianGroup(pieces, {-1: SparseIntMatrix.from_dense([[2]])})
    unit = SparseIntMatrix.from_dense([[1]])
    ok = {
        (0, 0): SparseIntMatrix.from_dense([[1]]),
        (0, -1): SparseIntMatrix.from_dense([[1]]),
        (-1, 0): SparseIntMatrix.from_dense([[1]]),
        # target piece(-2) is trivial
        (-1, -1): SparseIntMatrix.zero(0, 1),
    }
    FilteredRing(group, ok, unit)
    bad = dict(ok)
    bad[(0, -1)] = SparseIntMatrix.from_dense([[0]])  # breaks the unit law
    with pytest.raises(InvalidParams):
        FilteredRing(group, bad, unit)
    with pytest.raises(InvalidParams):
        FilteredRing(group, {(0, 0): ok[(0, 0)]}, unit)  # missing products


def test_filtered_tensor_small_orders():
    # (Z/p^2, p-adic) tensor itself: level 0 gives Z/p^2, level -1 the
    # pushout of p Z/p^2 (x) Z/p^2 <- pZ (x) pZ -> Z/p^2 (x) p Z/p^2
    X = adic_filtration(3, 2).group
    assert group_of(filtered_tensor(X, X, 0)) == AbelianGroup.cyclic(9)
    assert group_of(filtered_tensor(X, X, -1)) == AbelianGroup(0, (3, 3))
    # level -2 is the single spot (-1, -1): Z/3 (x) Z/3
    assert group_of(filtered_tensor(X, X, -2)) == AbelianGroup.cyclic(3)
    # every deeper spot touches the trivial piece
    assert group_of(filtered_tensor(X, X, -3)).is_trivial()
    # constancy above 0
    assert group_of(filtered_tensor(X, X, 2)) == AbelianGroup.cyclic(9)


def test_tensor_transition_iso_above_zero():
    X = adic_filtration(3, 2).group
    a = multi_tensor([X, X], 0)
    b = multi_tensor([X, X], 1)
    T = tensor_transition(a, b)
    # onto with matching invariants: an isomorphism
    from cychom.intlin import cokernel

    assert cokernel(T.hstack(b.presentation.relations)).is_trivial()
    assert a.group() == b.group()
    with pytest.raises(InvalidParams):
        tensor_transition(b, a)


def test_multi_tensor_three_factors():
    X = adic_filtration(2, 2).group
    assert group_of(multi_tensor([X, X, X], 0)) == AbelianGroup.cyclic(4)
    assert group_of(multi_tensor([X, X, X], -6)).is_trivial()


def test_graded_pieces():
    M = adic_filtration(3, 2)
    assert as_group(graded_piece(M, 0)) == AbelianGroup.cyclic(3)
    assert as_group(graded_piece(M, -1)) == AbelianGroup.cyclic(3)
    assert as_group(graded_piece(M, -2)).is_trivial()
    assert as_group(graded_piece(M, 1)).is_trivial()
    G = graded(M)
    assert G.piece(0).group() == AbelianGroup(0, (3, 3))
    assert G.piece(-1).group() == AbelianGroup.cyclic(3)


def test_cyclic_bar_identities():
    # simplicial and cyclic identities as matrix identities mod relations
    M = adic_filtration(3, 2)
    q, k = 2, -1
    Z2 = cyclic_bar(M, q, k)
    Z1 = cyclic_bar(M, q - 1, k)
    Z0 = cyclic_bar(M, q - 2, k)
    rel1 = Z1.tensor.presentation.relations
    rel0 = Z0.tensor.presentation.relations

    def eq(A, B, rel):
        return lattice_contains(rel, A + B.scale(-1))

    d = {i: face_map(Z2, Z1, i) for i in range(q + 1)}
    dd = {i: face_map(Z1, Z0, i) for i in range(q)}
    s = {i: degeneracy_map(Z1, Z2, i) for i in range(q)}
    # d_i d_j = d_{j-1} d_i for i < j
    for i in range(q):
        for j in range(i + 1, q + 1):
            assert eq(dd[i] @ d[j], dd[j - 1] @ d[i], rel0), (i, j)
    # d_i s_j identities
    ss = {i: degeneracy_map(Z0, Z1, i) for i in range(q - 1)}
    for j in range(q):
        for i in range(q + 1):
            lhs = d[i] @ s[j]
            if i == j or i == j + 1:
                rhs = SparseIntMatrix.identity(lhs.rows)
            elif i < j:
                rhs = ss[j - 1] @ dd[i]
            else:
                rhs = ss[j] @ dd[i - 1]
            assert eq(lhs, rhs, rel1), (i, j)
    # rotation: d_i t = t d_{i-1} for 0 < i <= q, and t^(q+1) = id
    t2, t1 = Z2.rotation, Z1.rotation
    for i in range(1, q + 1):
        assert eq(d[i] @ t2, t1 @ d[i - 1], rel1), i
    power = SparseIntMatrix.identity(t2.rows)
    for _ in range(q + 1):
        power = t2 @ power
    assert eq(power, SparseIntMatrix.identity(t2.rows),
              Z2.tensor.presentation.relations)
    # degeneracy against rotation: s_i t = t s_{i-1} for i >= 1
    for i in range(1, q):
        assert eq(s[i] @ t1, t2 @ s[i - 1], Z2.tensor.presentation.relations)


def test_face_degeneracy_argument_checks():
    M = adic_filtration(3, 1)
    Z1 = cyclic_bar(M, 1, 0)
    Z0 = cyclic_bar(M, 0, 0)
    with pytest.raises(InvalidParams):
        face_map(Z1, Z0, 5)
    with pytest.raises(InvalidParams):
        face_map(Z0, Z1, 0)
    with pytest.raises(InvalidParams):
        degeneracy_map(Z1, Z0, 0)
    with pytest.raises(InvalidParams):
        cyclic_bar(M, -1, 0)


def test_graded_comparison_grid():
    for p, n in ((2, 2), (3, 2), (2, 3)):
        M = adic_filtration(p, n)
        m = M.depth()
        for q in range(3):
            for k in range(-(q + 1) * m - 1, 2):
                rep = graded_comparison(M, q, k)
                assert rep, (p, n, q, k, rep)


def test_graded_comparison_report_fields():
    rep = graded_comparison(adic_filtration(3, 2), 1, -1)
    assert rep.invariants_match and rep.map_is_iso and rep.rotation_compatible
    assert rep.lhs == rep.rhs


def split_free_example():
    # free pieces Z^1 -> Z^2 -> Z^2, transitions basis to basis
    pieces = {
        0: PresentedGroup.free(2),
        -1: PresentedGroup.free(2),
        -2: PresentedGroup.free(1),
    }
    transitions = {
        -1: SparseIntMatrix.identity(2),
        -2: SparseIntMatrix.from_dense([[1], [0]]),
    }
    return FilteredAbelianGroup(pieces, transitions)


def test_fixed_points_split_free():
    Y = split_free_example()
    for q in (1, 2, 3):
        for s in range(-2 * q, 1):
            rep = fixed_points_check(Y, q, s)
            assert rep, (q, s, rep)
            assert rep.found == Y.piece(s // q).num_generators


def test_fixed_points_rejects_torsion():
    Y = adic_filtration(3, 2).group
    with pytest.raises(UnsupportedFiltration):
        fixed_points_check(Y, 2, 0)
    with pytest.raises(InvalidParams):
        fixed_points_check(split_free_example(), 0, 0)


RING_TEXT = """
[piece]
index 0
generators 1
relations 1
9
[piece]
index -1
generators 1
relations 1
3
[piece]
index -2
generators 0
relations 0
[transition]
index -1
3
[transition]
index -2
[product]
indices 0 0
1
[product]
indices 0 -1
1
[product]
indices -1 0
1
[product]
indices -1 -1
[product]
indices 0 -2
[product]
indices -2 0
[product]
indices -1 -2
[product]
indices -2 -1
[product]
indices -2 -2
[unit]
1
"""


def test_load_filtered_ring():
    M = load_filtered_ring(RING_TEXT)
    assert M.depth() == 2
    assert M.piece(0).group() == AbelianGroup.cyclic(9)
    # it is exactly the 3-adic filtration of Z/9
    N = adic_filtration(3, 2)
    for q in range(2):
        for k in range(-4, 1):
            assert cyclic_bar(M, q, k).group() == cyclic_bar(N, q, k).group()


def test_load_filtered_ring_errors():
    with pytest.raises(ParseError):
        load_filtered_ring("[piece]\nindex 0\n")  # truncated header
    with pytest.raises(ParseError):
        load_filtered_ring("junk\n")
    with pytest.raises(ParseError):
        load_filtered_ring("[unit]\n1\n")  # no pieces
    with pytest.raises(ParseError):
        # transition 1 (not a hom) fails ring validation
        load_filtered_ring(RING_TEXT.replace("index -1\n3", "index -1\n1"))
