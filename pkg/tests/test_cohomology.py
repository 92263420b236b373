"""Local and sheaf cohomology dimensions against classical hand values."""

import pytest
from fractions import Fraction

from mgcm.graded_poly import (
    GradedRingSpec,
    InputError,
    PrimeField,
    RationalField,
    make_graded_ring,
)
from mgcm.groebner_engine import cyclic_presentation, presentation
from mgcm.cohomology import (
    CohomologyValue,
    cohomology_table,
    custom_support,
    default_window,
    degree_box,
    irrelevant_support,
    local_cohomology_dim,
    local_cohomology_layer_vanishes,
    matrix_rank,
    maximal_support,
    mdeg_layer_nonzero,
    sections_natural_iso,
    sheaf_cohomology_dim,
    support_E_dim,
)


def p1_ring(char=0):
    return make_graded_ring(GradedRingSpec(char, ("x0", "x1"), ((1,), (1,)), (1, 1)))


def p2_ring(char=32003):
    return make_graded_ring(
        GradedRingSpec(char, ("x0", "x1", "x2"), ((1,), (1,), (1,)), (1, 1, 1))
    )


def p1xp1_ring(char=32003):
    return make_graded_ring(
        GradedRingSpec(
            char,
            ("x0", "x1", "y0", "y1"),
            ((1, 0), (1, 0), (0, 1), (0, 1)),
            (1, 1, 1, 1),
        )
    )


# ---------------------------------------------------------------------------
# rank


def test_rank_rational():
    F = RationalField()
    assert matrix_rank(F, [[Fraction(1), Fraction(2)], [Fraction(2), Fraction(4)]]) == 1
    assert matrix_rank(F, []) == 0


def test_rank_mod_p():
    F = PrimeField(7)
    assert matrix_rank(F, [[1, 2], [2, 4], [0, 1]]) == 2
    assert matrix_rank(F, [[7, 14]]) == 0


# ---------------------------------------------------------------------------
# support specs


def test_irrelevant_support_blocks():
    sup = irrelevant_support(p1xp1_ring())
    assert sorted(str(g) for g in sup.generators) == [
        "x0*y0",
        "x0*y1",
        "x1*y0",
        "x1*y1",
    ]


def test_irrelevant_support_requires_block_variables():
    R = make_graded_ring(GradedRingSpec(0, ("x",), ((2,),), (2,)))
    with pytest.raises(InputError):
        irrelevant_support(R)


def test_custom_support_rejects_empty():
    R = p1_ring()
    with pytest.raises(InputError):
        custom_support((R.zero(),))


# ---------------------------------------------------------------------------
# local cohomology, both routes


def test_top_local_cohomology_of_plane():
    R = p1_ring()
    S = cyclic_presentation(R, ())
    ms = maximal_support(R)
    assert local_cohomology_dim(S, ms, 2, (-2,)).value == 1
    assert local_cohomology_dim(S, ms, 2, (-3,)).value == 2
    assert local_cohomology_dim(S, ms, 2, (-1,)).value == 0
    assert local_cohomology_dim(S, ms, 1, (-2,)).value == 0
    assert local_cohomology_dim(S, ms, 5, (-2,)).value == 0


def test_duality_equals_colimit_small_window():
    R = p1_ring()
    S = cyclic_presentation(R, ())
    ms = maximal_support(R)
    cs = custom_support(R.gens())
    for n in range(-4, 2):
        for i in range(3):
            a = local_cohomology_dim(S, ms, i, (n,))
            b = local_cohomology_dim(S, cs, i, (n,))
            assert a.value == b.value
            assert a.mode == "duality" and b.mode == "koszul-colimit"


def test_bigraded_corner_piece():
    R = make_graded_ring(GradedRingSpec(0, ("x", "y"), ((1, 0), (0, 1)), (1, 1)))
    M = cyclic_presentation(R, ())
    ms = maximal_support(R)
    assert local_cohomology_dim(M, ms, 2, (-1, -1)).value == 1
    assert local_cohomology_dim(M, ms, 2, (-2, -1)).value == 1
    assert local_cohomology_dim(M, ms, 2, (0, -1)).value == 0


def test_torsion_free_has_no_h0():
    R = p1_ring()
    S = cyclic_presentation(R, ())
    sup = irrelevant_support(R)
    for n in range(-3, 4):
        assert local_cohomology_dim(S, sup, 0, (n,)).value == 0


def test_negative_index_rejected():
    R = p1_ring()
    S = cyclic_presentation(R, ())
    with pytest.raises(InputError):
        local_cohomology_dim(S, maximal_support(R), -1, (0,))


# ---------------------------------------------------------------------------
# sheaf cohomology


def test_line_bundles_on_p1():
    S = cyclic_presentation(p1_ring(), ())
    assert sheaf_cohomology_dim(S, 0, (2,)) == 3
    assert sheaf_cohomology_dim(S, 0, (-1,)) == 0
    assert sheaf_cohomology_dim(S, 1, (-2,)) == 1
    assert sheaf_cohomology_dim(S, 1, (-3,)) == 2
    assert sheaf_cohomology_dim(S, 1, (0,)) == 0
    assert sheaf_cohomology_dim(S, 2, (-5,)) == 0


def test_line_bundles_on_p2():
    S = cyclic_presentation(p2_ring(), ())
    assert sheaf_cohomology_dim(S, 0, (2,)) == 6
    assert sheaf_cohomology_dim(S, 1, (-2,)) == 0
    assert sheaf_cohomology_dim(S, 2, (-3,)) == 1
    assert sheaf_cohomology_dim(S, 2, (-4,)) == 3


def test_line_bundles_on_p1xp1():
    S = cyclic_presentation(p1xp1_ring(), ())
    assert sheaf_cohomology_dim(S, 0, (1, 2)) == 6
    assert sheaf_cohomology_dim(S, 1, (-2, 0)) == 1
    assert sheaf_cohomology_dim(S, 1, (-1, 5)) == 0
    assert sheaf_cohomology_dim(S, 2, (-2, -2)) == 1
    assert sheaf_cohomology_dim(S, 2, (-2, -3)) == 2


def test_natural_sections_map():
    S = cyclic_presentation(p1_ring(), ())
    assert sections_natural_iso(S, (0,))
    assert sections_natural_iso(S, (-2,))
    # a module with S_+ torsion: k = S/(x0,x1) has h0 != 0 at degree 0
    R = p1_ring()
    x0, x1 = R.gens()
    k = cyclic_presentation(R, (x0, x1))
    assert not sections_natural_iso(k, (0,))


def test_support_E_direct_mode_on_field_base():
    S = cyclic_presentation(p1_ring(), ())
    val, mode = support_E_dim(S, 1, (-2,))
    assert (val, mode) == (1, "direct")


def test_support_E_identity_gate():
    # graded-local base: one base variable and one block variable
    R = make_graded_ring(GradedRingSpec(0, ("a", "T"), ((0,), (1,)), (1, 1)))
    M = cyclic_presentation(R, ())
    with pytest.raises(InputError):
        support_E_dim(M, 0, (0,))  # not strictly below v = 0
    val, mode = support_E_dim(M, 0, (-1,), weight=0)
    assert mode == "fiber-identity"
    assert val == 0


def test_layer_vanishing_graded_local():
    R = make_graded_ring(GradedRingSpec(0, ("a", "T"), ((0,), (1,)), (1, 1)))
    M = cyclic_presentation(R, ())
    assert not local_cohomology_layer_vanishes(M, 2, (-1,))
    assert local_cohomology_layer_vanishes(M, 2, (0,))
    assert local_cohomology_layer_vanishes(M, 1, (-1,))


def test_mdeg_layer_nonzero_direct():
    R = make_graded_ring(GradedRingSpec(0, ("a", "T"), ((0,), (1,)), (1, 1)))
    a, T = R.gens()
    M = cyclic_presentation(R, (T * T,))
    assert mdeg_layer_nonzero(M, (1,))
    assert not mdeg_layer_nonzero(M, (2,))
    assert not mdeg_layer_nonzero(M, (-1,))


# ---------------------------------------------------------------------------
# tables and windows


def test_degree_box():
    assert degree_box((-1, 0), (0, 1)) == ((-1, 0), (-1, 1), (0, 0), (0, 1))
    with pytest.raises(InputError):
        degree_box((1,), (0,))


def test_cohomology_table_matches_pointwise():
    S = cyclic_presentation(p1_ring(), ())
    tab = cohomology_table(S, (0, 1), degree_box((-3,), (3,)))
    got = {(i, n): d for (i, n, d, _) in tab.entries}
    for n in range(-3, 4):
        assert got[(0, (n,))] == sheaf_cohomology_dim(S, 0, (n,))
        assert got[(1, (n,))] == sheaf_cohomology_dim(S, 1, (n,))
    # classical line: h0 = max(n+1, 0), h1 = max(-n-1, 0)
    for n in range(-3, 4):
        assert got[(0, (n,))] == max(n + 1, 0)
        assert got[(1, (n,))] == max(-n - 1, 0)


def test_table_of_zero_module():
    R = p1_ring()
    z = cyclic_presentation(R, (R.one(),))
    tab = cohomology_table(z, (0, 1), degree_box((-1,), (1,)))
    assert all(d == 0 for (_, _, d, _) in tab.entries)


def test_table_deterministic_order():
    S = cyclic_presentation(p1_ring(), ())
    tab = cohomology_table(S, (1, 0), degree_box((-1,), (1,)))
    keys = [(i, n) for (i, n, _, _) in tab.entries]
    assert keys == sorted(keys)


def test_default_window_contains_v():
    S = cyclic_presentation(p1_ring(), ())
    win = default_window(S)
    assert (0,) in win
    assert (-3,) in win and (3,) in win
