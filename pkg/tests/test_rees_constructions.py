"""Blow-up presentations checked against hand-computed relation ideals,
piece counts from generator products, and classical invariant values."""

import pytest

from mgcm.graded_poly import GradedRing, InputError, RationalField, parse_polynomial
from mgcm.groebner_engine import (
    cyclic_presentation,
    free_module,
    free_presentation,
    presentation,
    submodules_equal,
)
from mgcm.homological import (
    a_invariant,
    graded_piece_dim,
    is_cohen_macaulay,
    krull_dim,
    v_of,
)
from mgcm.rees_constructions import (
    IrrelevantReesModule,
    ReesPresentation,
    diagonal_of,
    fiber_cone_spread,
    irrelevant_piece_oracle,
    irrelevant_rees,
    multi_rees_algebra_presentation,
    rees_info,
    rees_module_presentation,
    rees_piece_oracle,
)

QQ = RationalField()


def local_base(*names):
    return GradedRing(QQ, names, [(0,)] * len(names), [1] * len(names))


@pytest.fixture(scope="module")
def A():
    return local_base("a", "b")


def ideal_equal(ring, gens, text):
    fm = free_module(ring, (((0,) * ring.rank, 0),))
    expected = [(parse_polynomial(ring, t),) for t in text]
    return submodules_equal(fm, [(g,) for g in gens], expected)


# -- algebra presentations --------------------------------------------------


def test_principal_ideal_gives_free_extension(A):
    rees = multi_rees_algebra_presentation(A, ((A.var("a"),),))
    assert rees.defining == ()
    assert rees.ambient.names == ("a", "b", "T")
    assert rees.ambient.degrees == ((0,), (0,), (1,))
    assert rees.ambient.weights == (1, 1, 1)


def test_single_two_generator_ideal_is_koszul(A):
    rees = multi_rees_algebra_presentation(A, ((A.var("a"), A.var("b")),))
    assert rees.ambient.names == ("a", "b", "T", "U")
    assert len(rees.defining) == 1
    assert ideal_equal(rees.ambient, rees.defining, ["b*T - a*U"])


def test_two_ideal_blowup_relation(A):
    rees = multi_rees_algebra_presentation(
        A, ((A.var("a"),), (A.var("a"), A.var("b")))
    )
    assert rees.rank == 2
    assert rees.ambient.names == ("a", "b", "T", "U", "V")
    assert rees.ambient.degrees == ((0, 0), (0, 0), (1, 0), (0, 1), (0, 1))
    assert len(rees.defining) == 1
    assert ideal_equal(rees.ambient, rees.defining, ["b*U - a*V"])


def test_ambient_is_public_ring(A):
    rees = multi_rees_algebra_presentation(A, ((A.var("a"), A.var("b")),))
    assert all(w >= 1 for w in rees.ambient.weights)
    assert all(all(x >= 0 for x in d) for d in rees.ambient.degrees)


def test_unit_ideal_rejected(A):
    with pytest.raises(InputError):
        multi_rees_algebra_presentation(A, ((A.one(),),))


def test_zero_generator_rejected(A):
    with pytest.raises(InputError):
        multi_rees_algebra_presentation(A, ((A.zero(),),))


def test_base_must_be_graded_local():
    S = GradedRing(QQ, ("x", "y"), [(1,), (1,)], [1, 1])
    with pytest.raises(InputError):
        multi_rees_algebra_presentation(S, ((S.var("x"),),))


# -- module presentations ---------------------------------------------------


def test_rank_one_free_module_recovers_algebra(A):
    N = free_presentation(A, (((0,), 0),))
    blocks = ((A.var("a"),), (A.var("a"), A.var("b")))
    mod = rees_module_presentation(N, blocks)
    rees = multi_rees_algebra_presentation(A, blocks)
    assert mod.ring == rees.ambient
    fm = free_module(rees.ambient, (((0, 0), 0),))
    assert submodules_equal(fm, mod.relations, [(h,) for h in rees.defining])


def test_module_pieces_match_generator_product_oracle(A):
    N = free_presentation(A, (((0,), 0),))
    blocks = ((A.var("a"),), (A.var("a"), A.var("b")))
    mod = rees_module_presentation(N, blocks)
    assert graded_piece_dim(mod, (1, 1), 2) == 2
    assert graded_piece_dim(mod, (1, 1), 3) == 3
    for n1 in range(3):
        for n2 in range(3):
            for w in range(5):
                assert graded_piece_dim(mod, (n1, n2), w) == rees_piece_oracle(
                    N, blocks, (n1, n2), w
                )


def test_cyclic_quotient_coefficients(A):
    N = cyclic_presentation(A, (A.var("b"),))
    mod = rees_module_presentation(N, ((A.var("a"),),))
    for n in range(4):
        assert graded_piece_dim(mod, (n,), n) == 1
        assert graded_piece_dim(mod, (n,), n + 2) == 1
    assert graded_piece_dim(mod, (2,), 1) == 0
    assert krull_dim(mod) == 2


def test_dimension_formula(A):
    N = free_presentation(A, (((0,), 0),))
    assert krull_dim(rees_module_presentation(N, ((A.var("a"),),))) == 3
    blocks = ((A.var("a"),), (A.var("a"), A.var("b")))
    assert krull_dim(rees_module_presentation(N, blocks)) == 4


def test_v_and_a_invariants(A):
    N = free_presentation(A, (((0,), 0),))
    koszul = rees_module_presentation(N, ((A.var("a"), A.var("b")),))
    assert v_of(koszul) == (0,)
    assert a_invariant(koszul) == (-1,)
    blocks = ((A.var("a"),), (A.var("a"), A.var("b")))
    mod = rees_module_presentation(N, blocks)
    assert v_of(mod) == (0, 0)
    assert a_invariant(mod) == (-1, -1)
    assert is_cohen_macaulay(mod).cm


def test_nonzero_multidegree_shift_rejected(A):
    N = presentation(A, (((1,), 0),), ())
    with pytest.raises(InputError):
        rees_module_presentation(N, ((A.var("a"),),))


# -- diagonals ----------------------------------------------------------------


def test_diagonal_of_algebra(A):
    blocks = ((A.var("a"),), (A.var("a"), A.var("b")))
    rees = multi_rees_algebra_presentation(A, blocks)
    value, cert = diagonal_of(rees)
    assert isinstance(value, ReesPresentation)
    assert value.rank == 1
    assert ideal_equal(A, value.blocks[0], ["a^2", "a*b"])
    assert cert
    dm = value.as_module()
    assert [graded_piece_dim(dm, (n,), 2 * n) for n in range(3)] == [1, 2, 3]


def test_diagonal_rank_one_is_identity(A):
    rees = multi_rees_algebra_presentation(A, ((A.var("a"), A.var("b")),))
    value, cert = diagonal_of(rees)
    assert value is rees
    assert cert == ()


def test_diagonal_of_module(A):
    N = free_presentation(A, (((0,), 0),))
    blocks = ((A.var("a"),), (A.var("a"), A.var("b")))
    mod = rees_module_presentation(N, blocks)
    value, cert = diagonal_of(mod)
    assert graded_piece_dim(value, (1,), 2) == 2
    assert cert


def test_unregistered_module_rejected(A):
    stray = free_presentation(A, (((0,), 0),))
    with pytest.raises(InputError):
        rees_info(stray)
    with pytest.raises(InputError):
        diagonal_of(stray)


# -- fiber cones --------------------------------------------------------------


def test_analytic_spreads(A):
    a, b = A.var("a"), A.var("b")
    assert fiber_cone_spread((a,)) == 1
    assert fiber_cone_spread((a, b)) == 2
    assert fiber_cone_spread((a * a, a * b)) == 2


# -- the regraded module of the irrelevant ideal ------------------------------


def test_regraded_line(A):
    S = GradedRing(QQ, ("x",), [(1,)], [1])
    M = free_presentation(S, (((0,), 0),))
    blow = irrelevant_rees(M)
    assert isinstance(blow, IrrelevantReesModule)
    assert blow.ambient.names == ("x", "T")
    assert blow.ambient.degrees == ((1, 0), (0, 1))
    assert blow.algebra_relations == ()
    assert graded_piece_dim(blow.module, (1, 2)) == 1
    assert irrelevant_piece_oracle(blow, (1,), 2) == 1


def test_regraded_projective_line():
    S = GradedRing(QQ, ("x0", "x1"), [(1,), (1,)], [1, 1])
    M = free_presentation(S, (((0,), 0),))
    blow = irrelevant_rees(M)
    assert len(blow.algebra_relations) == 1
    assert ideal_equal(blow.ambient, blow.algebra_relations, ["x1*T - x0*U"])
    for n in range(4):
        assert graded_piece_dim(blow.module, (n, 0)) == graded_piece_dim(M, (n,))


def test_regraded_quotient_window_matches_oracle():
    S = GradedRing(QQ, ("x0", "x1", "y0", "y1"), [(1, 0), (1, 0), (0, 1), (0, 1)], [1] * 4)
    M = cyclic_presentation(S, (S.var("x0") * S.var("y0"),))
    blow = irrelevant_rees(M)
    for n1 in range(-1, 2):
        for n2 in range(-1, 2):
            for k in range(3):
                engine = graded_piece_dim(blow.module, (n1, n2, k))
                assert engine == irrelevant_piece_oracle(blow, (n1, n2), k)
    # pieces vanish once some coordinate drops below every generator degree
    assert v_of(M) == (0, 0)
    for k in range(3):
        assert graded_piece_dim(blow.module, (-1, 3, k)) == 0
