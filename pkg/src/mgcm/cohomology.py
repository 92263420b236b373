"""Exact graded-piece dimensions of local and sheaf cohomology.

Two independent routes are implemented:

* duality: pieces of local cohomology at the full graded maximal ideal are
  k-duals of pieces of the dual Ext module in complementary index (graded
  local duality over the polynomial cover),
* Koszul colimit: local cohomology against any finitely generated support
  ideal is computed as the stabilizing cohomology of Koszul complexes on
  rising powers of the generators, one graded piece at a time.

Sheaf cohomology on the Proj of the ambient multigraded ring is read off the
irrelevant-ideal route.  Dimensions summed over the auxiliary weight grading
are only offered when the ambient has no multidegree-0 variables; otherwise
callers pass an explicit weight slice, or use the exact multidegree-layer
vanishing test which quantifies over all weights at once.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache
from typing import Dict, List, Optional, Sequence, Tuple

from .graded_poly import (
    Degree,
    GradedRing,
    InputError,
    Polynomial,
    ResourceLimit,
    compare_degrees,
    deg_add,
    deg_neg,
    deg_scale,
    deg_sub,
    deg_zero,
)
from .groebner_engine import ModulePresentation, normal_form_column
from .homological import (
    _relations_gb,
    ext_dual_module,
    graded_piece_dim,
    is_zero_module,
    minimal_free_resolution,
    piece_basis,
    v_of,
)

KOSZUL_STEP_LIMIT = 40


# ---------------------------------------------------------------------------
# exact rank over the coefficient field


def matrix_rank(field, rows: Sequence[Sequence]) -> int:
    """Rank of a dense matrix with entries in the coefficient field."""
    nrows = len(rows)
    if nrows == 0:
        return 0
    ncols = len(rows[0])
    if ncols == 0:
        return 0
    if field.char != 0:
        return _rank_mod_p(rows, field.char)
    work = [list(r) for r in rows]
    rank = 0
    for col in range(ncols):
        piv = None
        for r in range(rank, nrows):
            if work[r][col] != 0:
                piv = r
                break
        if piv is None:
            continue
        work[rank], work[piv] = work[piv], work[rank]
        inv = field.inv(work[rank][col])
        work[rank] = [x * inv for x in work[rank]]
        for r in range(nrows):
            if r != rank and work[r][col] != 0:
                f = work[r][col]
                work[r] = [a - f * b for a, b in zip(work[r], work[rank])]
        rank += 1
        if rank == nrows:
            break
    return rank


def _rank_mod_p(rows: Sequence[Sequence[int]], p: int) -> int:
    import numpy as np

    a = np.array(rows, dtype=np.int64) % p
    nrows, ncols = a.shape
    rank = 0
    for col in range(ncols):
        piv = None
        for r in range(rank, nrows):
            if a[r, col]:
                piv = r
                break
        if piv is None:
            continue
        if piv != rank:
            a[[rank, piv]] = a[[piv, rank]]
        inv = pow(int(a[rank, col]), p - 2, p)
        a[rank] = (a[rank] * inv) % p
        below = a[rank + 1 :, col].copy()
        if below.any():
            a[rank + 1 :] = (a[rank + 1 :] - below[:, None] * a[rank][None, :]) % p
        rank += 1
        if rank == nrows:
            break
    return rank


def sparse_rank(field, rows: List[Dict[int, object]]) -> int:
    """Rank of a matrix given as row dicts (column -> nonzero entry).

    Singleton rows and columns are valid pivots that cause no fill-in, so
    they are peeled off first; the leftover dense core (tiny for the
    monomial-heavy matrices this engine produces) is eliminated directly.
    """
    work: Dict[int, Dict[int, object]] = {
        i: dict(r) for i, r in enumerate(rows) if r
    }
    col_rows: Dict[int, set] = {}
    for ri, r in work.items():
        for c in r:
            col_rows.setdefault(c, set()).add(ri)
    rank = 0
    row_queue = [ri for ri, r in work.items() if len(r) == 1]
    col_queue = [c for c, rs in col_rows.items() if len(rs) == 1]

    def drop_row(ri: int):
        for c in work[ri]:
            rs = col_rows.get(c)
            if rs is not None:
                rs.discard(ri)
                if len(rs) == 1:
                    col_queue.append(c)
                elif not rs:
                    del col_rows[c]
        del work[ri]

    while row_queue or col_queue:
        if col_queue:
            c = col_queue.pop()
            rs = col_rows.get(c)
            if rs is None or len(rs) != 1:
                continue
            (ri,) = rs
            rank += 1
            del col_rows[c]
            del work[ri][c]
            drop_row(ri)
            continue
        ri = row_queue.pop()
        r = work.get(ri)
        if r is None or len(r) != 1:
            continue
        (c,) = r
        rank += 1
        for r2 in list(col_rows.get(c, ())):
            if r2 == ri:
                continue
            del work[r2][c]
            if len(work[r2]) == 1:
                row_queue.append(r2)
            elif not work[r2]:
                del work[r2]
        col_rows.pop(c, None)
        del work[ri][c]
        drop_row(ri)

    work = {ri: r for ri, r in work.items() if r}
    if not work:
        return rank
    cols = sorted({c for r in work.values() for c in r})
    cmap = {c: i for i, c in enumerate(cols)}
    dense = []
    zero = field.zero
    for r in work.values():
        row = [zero] * len(cols)
        for c, v in r.items():
            row[cmap[c]] = v
        dense.append(row)
    return rank + matrix_rank(field, dense)


# ---------------------------------------------------------------------------
# support specifications


@dataclass(frozen=True)
class SupportSpec:
    """Radical generators of the support ideal local cohomology is taken at.

    kind "maximal" means the full graded maximal ideal (duality route);
    "irrelevant" the Proj-irrelevant ideal generated by block products;
    "custom" an explicit generator list (Koszul route).
    """

    kind: str
    generators: Tuple[Polynomial, ...]

    def __post_init__(self):
        if self.kind not in ("maximal", "irrelevant", "custom"):
            raise InputError(f"unknown support kind: {self.kind}")
        if not self.generators:
            raise InputError("support ideal needs at least one generator")


def maximal_support(ring: GradedRing) -> SupportSpec:
    return SupportSpec("maximal", ring.gens())


def irrelevant_support(ring: GradedRing) -> SupportSpec:
    """One generator per choice of a multidegree-e_j variable from each block."""
    r = ring.rank
    blocks: List[List[int]] = []
    for j in range(r):
        unit = tuple(1 if t == j else 0 for t in range(r))
        idx = [v for v in range(ring.nvars) if ring.degrees[v] == unit]
        if not idx:
            raise InputError(f"no variable of multidegree e_{j + 1}; ring not standard")
        blocks.append(idx)
    variables = ring.gens()
    gens = []
    for combo in itertools.product(*blocks):
        g = ring.one()
        for v in combo:
            g = g * variables[v]
        gens.append(g)
    return SupportSpec("irrelevant", tuple(gens))


def custom_support(gens: Sequence[Polynomial]) -> SupportSpec:
    gens = tuple(g for g in gens if not g.is_zero())
    if not gens:
        raise InputError("support ideal needs at least one nonzero generator")
    for g in gens:
        g.degree_pair()
    return SupportSpec("custom", gens)


# ---------------------------------------------------------------------------
# multiplication matrices between graded pieces


@lru_cache(maxsize=None)
def _mult_matrix(
    module: ModulePresentation, g: Polynomial, n: Degree, weight: Optional[int]
):
    """Matrix (rows = target basis) of multiplication by g on the (n, weight)
    piece; returns (rows, source dim, target dim)."""
    ring = module.ring
    src = piece_basis(module, n, weight)
    gm, gw = g.degree_pair()
    tgt_n = deg_add(n, gm)
    tgt_w = None if weight is None else weight + gw
    tgt = piece_basis(module, tgt_n, tgt_w)
    index = {t: i for i, t in enumerate(tgt)}
    gb = _relations_gb(module)
    field_zero = ring.field.zero
    rows = [[field_zero] * len(src) for _ in range(len(tgt))]
    for ci, (comp, exps) in enumerate(src):
        col = [ring.zero()] * module.rank
        col[comp] = g * ring.monomial(exps)
        red = normal_form_column(gb, tuple(col))
        for comp2, entry in enumerate(red):
            for e2, c2 in entry.terms:
                rows[index[(comp2, e2)]][ci] = c2
    return tuple(tuple(r) for r in rows), len(src), len(tgt)


@lru_cache(maxsize=None)
def _gen_power(g: Polynomial, k: int) -> Polynomial:
    return g ** k


# ---------------------------------------------------------------------------
# Koszul-complex cohomology of one graded piece at one power level


def _subset_shift(degs: Sequence[Tuple[Degree, int]], J: Tuple[int, ...], k: int):
    m = deg_zero(len(degs[0][0]))
    w = 0
    for j in J:
        m = deg_add(m, deg_scale(degs[j][0], k))
        w += degs[j][1] * k
    return m, w


def _piece_dim_at(module, n, weight) -> int:
    return len(piece_basis(module, n, weight))


@lru_cache(maxsize=None)
def _differential_rank(
    module: ModulePresentation,
    gens: Tuple[Polynomial, ...],
    k: int,
    p: int,
    n: Degree,
    weight: Optional[int],
) -> int:
    """Rank of d^p: C^p -> C^{p+1} on the (n, weight) piece at power level k."""
    s = len(gens)
    if p < 0 or p >= s:
        return 0
    degs = tuple(g.degree_pair() for g in gens)
    powers = tuple(_gen_power(g, k) for g in gens)
    src_subsets = list(itertools.combinations(range(s), p))
    tgt_subsets = list(itertools.combinations(range(s), p + 1))
    ring = module.ring

    src_off: Dict[Tuple[int, ...], int] = {}
    total_src = 0
    for J in src_subsets:
        dm, dw = _subset_shift(degs, J, k)
        src_off[J] = total_src
        total_src += _piece_dim_at(
            module, deg_add(n, dm), None if weight is None else weight + dw
        )
    tgt_off: Dict[Tuple[int, ...], int] = {}
    total_tgt = 0
    for J in tgt_subsets:
        dm, dw = _subset_shift(degs, J, k)
        tgt_off[J] = total_tgt
        total_tgt += _piece_dim_at(
            module, deg_add(n, dm), None if weight is None else weight + dw
        )
    if total_src == 0 or total_tgt == 0:
        return 0

    field = ring.field
    rows: List[Dict[int, object]] = [{} for _ in range(total_tgt)]
    for J in src_subsets:
        dm, dw = _subset_shift(degs, J, k)
        src_n = deg_add(n, dm)
        src_w = None if weight is None else weight + dw
        for j in range(s):
            if j in J:
                continue
            J2 = tuple(sorted(J + (j,)))
            sign = (-1) ** sum(1 for x in J if x < j)
            block, src_len, tgt_len = _mult_matrix(module, powers[j], src_n, src_w)
            if src_len == 0 or tgt_len == 0:
                continue
            ro, co = tgt_off[J2], src_off[J]
            for bi in range(tgt_len):
                brow = block[bi]
                out = rows[ro + bi]
                for bj in range(src_len):
                    v = brow[bj]
                    if v:
                        out[co + bj] = v if sign > 0 else field.neg(v)
    return sparse_rank(field, rows)


def _koszul_value(
    module: ModulePresentation,
    degs: Sequence[Tuple[Degree, int]],
    gens: Tuple[Polynomial, ...],
    k: int,
    i: int,
    n: Degree,
    weight: Optional[int],
) -> int:
    s = len(gens)
    dim_ci = 0
    for J in itertools.combinations(range(s), i):
        dm, dw = _subset_shift(degs, J, k)
        dim_ci += _piece_dim_at(
            module, deg_add(n, dm), None if weight is None else weight + dw
        )
    r_i = _differential_rank(module, gens, k, i, n, weight)
    r_prev = _differential_rank(module, gens, k, i - 1, n, weight)
    value = dim_ci - r_i - r_prev
    if value < 0:
        raise AssertionError("negative cohomology dimension (rank bookkeeping bug)")
    return value


def _koszul_stable_dim(
    module: ModulePresentation,
    gens: Tuple[Polynomial, ...],
    i: int,
    n: Degree,
    weight: Optional[int],
    margin: bool,
) -> Tuple[int, int]:
    """Koszul-colimit dimension with stabilization exponent.

    Accepts the first power level whose value repeats at the next level
    (two consecutive repeats with the safety margin on, the default)."""
    need = 3 if margin else 2
    k0 = 1 + max([abs(x) for x in n] + ([abs(weight)] if weight else [0]))
    history: List[int] = []
    k = k0
    while k - k0 < KOSZUL_STEP_LIMIT:
        degs = tuple(g.degree_pair() for g in gens)
        history.append(_koszul_value(module, degs, gens, k, i, n, weight))
        if len(history) >= need and len(set(history[-need:])) == 1:
            return history[-1], k - need + 1
        k += 1
    raise ResourceLimit(
        f"Koszul colimit did not stabilize within {KOSZUL_STEP_LIMIT} levels"
    )


# ---------------------------------------------------------------------------
# local cohomology


@dataclass(frozen=True)
class CohomologyValue:
    value: int
    mode: str
    stab_k: Optional[int]


def local_cohomology_dim(
    module: ModulePresentation,
    support: SupportSpec,
    i: int,
    n: Sequence[int],
    weight: Optional[int] = None,
    margin: bool = True,
) -> CohomologyValue:
    """dim_k of the (n[, weight]) piece of H^i against the support ideal."""
    if i < 0:
        raise InputError("negative cohomological index")
    ring = module.ring
    n = tuple(int(x) for x in n)
    if len(n) != ring.rank:
        raise InputError("degree rank mismatch")
    for g in support.generators:
        if g.ring.core_key() != ring.core_key():
            raise InputError("support ideal lives in a different ring")

    if support.kind == "maximal":
        if i > ring.nvars:
            return CohomologyValue(0, "duality", None)
        ext = ext_dual_module(module, ring.nvars - i)
        w = None if weight is None else -weight
        return CohomologyValue(graded_piece_dim(ext, deg_neg(n), w), "duality", None)

    gens = support.generators
    if i > len(gens):
        return CohomologyValue(0, "koszul-colimit", 0)
    value, stab = _koszul_stable_dim(module, gens, i, n, weight, margin)
    return CohomologyValue(value, "koszul-colimit", stab)


def local_cohomology_layer_vanishes(
    module: ModulePresentation, i: int, n: Sequence[int]
) -> bool:
    """Exact test: [H^i at the maximal ideal]_(n, w) = 0 for every weight w.

    Via duality this asks whether the dual Ext module has any nonzero
    element of multidegree -n, quantified over all weights at once."""
    if i < 0:
        raise InputError("negative cohomological index")
    ring = module.ring
    n = tuple(int(x) for x in n)
    if i > ring.nvars:
        return True
    ext = ext_dual_module(module, ring.nvars - i)
    return not mdeg_layer_nonzero(ext, deg_neg(n))


def mdeg_layer_nonzero(module: ModulePresentation, n: Degree) -> bool:
    """Is the full multidegree-n layer (all weights) of the module nonzero?

    A monomial b * t * e_s with t supported on positive-multidegree variables
    and b on multidegree-0 variables survives for some b iff t * e_s is not
    divisible by any relation lead term supported only on the t-variables.
    """
    ring = module.ring
    if len(n) != ring.rank:
        raise InputError("degree rank mismatch")
    if module.rank == 0:
        return False
    gb = _relations_gb(module)
    base = set(ring.base_variable_indices())
    order = None
    leads: Dict[int, List[Tuple[int, ...]]] = {}
    for col in gb.elements:
        if order is None:
            order = gb.order()
        vec = {(c, e): v for c, entry in enumerate(col) for e, v in entry.terms}
        comp, exps = max(vec, key=order.key)
        if all(exps[v] == 0 for v in base):
            leads.setdefault(comp, []).append(exps)

    nv = ring.nvars
    degs = ring.degrees
    nonbase = [v for v in range(nv) if v not in base]

    for comp in range(module.rank):
        target = deg_sub(n, module.mdeg_shifts[comp])
        if any(x < 0 for x in target):
            continue
        acc = {v: 0 for v in nonbase}

        def walk(pos: int, rem: Degree) -> bool:
            if pos == len(nonbase):
                if any(rem):
                    return False
                exps = tuple(acc.get(v, 0) for v in range(nv))
                for lt in leads.get(comp, ()):
                    if all(a <= b for a, b in zip(lt, exps)):
                        break
                else:
                    return True
                return False
            v = nonbase[pos]
            d = degs[v]
            cap = None
            for coord in range(len(d)):
                if d[coord] > 0:
                    c = rem[coord] // d[coord]
                    cap = c if cap is None else min(cap, c)
            if cap is None:
                raise InputError("variable with zero multidegree outside the base")
            for e in range(cap + 1):
                nr = deg_sub(rem, deg_scale(d, e))
                if any(x < 0 for x in nr):
                    break
                acc[v] = e
                if walk(pos + 1, nr):
                    acc[v] = 0
                    return True
            acc[v] = 0
            return False

        if walk(0, target):
            return True
    return False


# ---------------------------------------------------------------------------
# sheaf cohomology on Proj


def sheaf_cohomology_dim(
    module: ModulePresentation,
    i: int,
    n: Sequence[int],
    weight: Optional[int] = None,
    margin: bool = True,
) -> int:
    """dim_k H^i(Z, sheaf(module)(n)) on Z = Proj of the ambient ring.

    For i >= 1 this is the degree-n piece of H^{i+1} at the irrelevant
    ideal; for i = 0 global sections have dimension
    dim module_n - h^0 + h^1 (h^j at the irrelevant ideal)."""
    if i < 0:
        raise InputError("negative cohomological index")
    support = irrelevant_support(module.ring)
    if i >= 1:
        return local_cohomology_dim(module, support, i + 1, n, weight, margin).value
    mn = graded_piece_dim(module, tuple(n), weight)
    h0 = local_cohomology_dim(module, support, 0, n, weight, margin).value
    h1 = local_cohomology_dim(module, support, 1, n, weight, margin).value
    return mn - h0 + h1


def sections_natural_iso(
    module: ModulePresentation,
    n: Sequence[int],
    weight: Optional[int] = None,
    margin: bool = True,
) -> bool:
    """Does the natural map module_n -> global sections hit an isomorphism?"""
    support = irrelevant_support(module.ring)
    h0 = local_cohomology_dim(module, support, 0, n, weight, margin).value
    h1 = local_cohomology_dim(module, support, 1, n, weight, margin).value
    return h0 == 0 and h1 == 0


def support_E_dim(
    module: ModulePresentation,
    i: int,
    n: Sequence[int],
    weight: Optional[int] = None,
    margin: bool = True,
) -> Tuple[int, str]:
    """Cohomology supported on the closed fiber of Proj -> Spec(base).

    Field base: the fiber is all of Proj, mode "direct".  Otherwise the
    dimension is read through the identity with local cohomology at the
    maximal ideal in index i + rank, valid only strictly below v(module)."""
    if i < 0:
        raise InputError("negative cohomological index")
    ring = module.ring
    if ring.is_field_base():
        return sheaf_cohomology_dim(module, i, n, weight, margin), "direct"
    _check_below_v(module, n)
    r = ring.rank
    val = local_cohomology_dim(
        module, maximal_support(ring), i + r, n, weight, margin
    ).value
    return val, "fiber-identity"


def support_E_vanishes(module: ModulePresentation, i: int, n: Sequence[int]) -> Tuple[bool, str]:
    """Exact all-weights vanishing of fiber-supported cohomology in index i."""
    ring = module.ring
    if ring.is_field_base():
        return sheaf_cohomology_dim(module, i, tuple(n)) == 0, "direct"
    _check_below_v(module, n)
    return (
        local_cohomology_layer_vanishes(module, i + ring.rank, n),
        "fiber-identity",
    )


def _check_below_v(module: ModulePresentation, n: Sequence[int]):
    v = v_of(module)
    rel = compare_degrees(v, tuple(int(x) for x in n))
    if not rel.gt:
        raise InputError(
            f"fiber identity out of range: degree {tuple(n)} is not strictly below v = {v}"
        )


# ---------------------------------------------------------------------------
# tables and windows


@dataclass(frozen=True)
class CohomologyTable:
    """Sheaf cohomology dimensions over a degree window.

    entries: rows (i, n, dim, stabilization exponent or None) sorted by i
    then lexicographically by n."""

    entries: Tuple[Tuple[int, Degree, int, Optional[int]], ...]
    window: Tuple[Degree, ...]
    mode: str


def cohomology_table(
    module: ModulePresentation,
    i_range: Sequence[int],
    window: Sequence[Sequence[int]],
    margin: bool = True,
) -> CohomologyTable:
    window = tuple(tuple(int(x) for x in n) for n in window)
    if not window:
        raise InputError("empty degree window")
    i_list = sorted(set(int(i) for i in i_range))
    if any(i < 0 for i in i_list):
        raise InputError("negative cohomological index")
    support = irrelevant_support(module.ring)
    rows = []
    for i in i_list:
        for n in sorted(window):
            if i >= 1:
                cv = local_cohomology_dim(module, support, i + 1, n, None, margin)
                rows.append((i, n, cv.value, cv.stab_k))
            else:
                h0 = local_cohomology_dim(module, support, 0, n, None, margin)
                h1 = local_cohomology_dim(module, support, 1, n, None, margin)
                dim = graded_piece_dim(module, n) - h0.value + h1.value
                stab = max(x for x in (h0.stab_k, h1.stab_k, 0) if x is not None)
                rows.append((i, n, dim, stab))
    return CohomologyTable(tuple(rows), window, "koszul-colimit")


def degree_box(lo: Sequence[int], hi: Sequence[int]) -> Tuple[Degree, ...]:
    """All degrees in the closed box [lo, hi], lexicographically ascending."""
    lo = tuple(int(x) for x in lo)
    hi = tuple(int(x) for x in hi)
    if len(lo) != len(hi):
        raise InputError("box corners of different rank")
    if any(a > b for a, b in zip(lo, hi)):
        raise InputError("empty degree box")
    axes = [range(a, b + 1) for a, b in zip(lo, hi)]
    return tuple(itertools.product(*axes))


def default_window(module: ModulePresentation) -> Tuple[Degree, ...]:
    """Box [v - w, v + w] around the minimal generator degree, where w is 3
    plus the largest multidegree spread among the resolution twists."""
    r = module.ring.rank
    if is_zero_module(module):
        center = deg_zero(r)
        spread = 0
    else:
        center = v_of(module)
        res = minimal_free_resolution(module)
        spread = 0
        for coord in range(r):
            vals = [s[coord] for step in res.shifts for s in step[0]]
            if vals:
                spread = max(spread, max(vals) - min(vals))
    w = 3 + spread
    lo = tuple(c - w for c in center)
    hi = tuple(c + w for c in center)
    return degree_box(lo, hi)
