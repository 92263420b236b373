"""Minimal free resolutions and the invariants read off from them.

Everything here runs over a free polynomial ambient; quotient modules are
re-presented over the cover (their defining ideal folded into the relation
columns).  The weight grading does the graded-local work: minimal generators
via Nakayama, depth via Auslander-Buchsbaum (depth = #vars - pd), Krull
dimension as the pole order of the weight Hilbert series at t = 1.

Duality: ext_dual_module(M, i) presents Ext^i(M, P(-w_total)) where w_total
is the sum of all variable degrees.  Its graded pieces are the k-duals of
local cohomology pieces at the maximal graded ideal, which is how a-invariants
and the duality route of the cohomology layer are computed.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Dict, List, Optional, Sequence, Tuple

from .graded_poly import (
    Degree,
    GradedRing,
    InputError,
    Polynomial,
    deg_add,
    deg_neg,
    deg_sub,
    deg_zero,
)
from .groebner_engine import (
    Column,
    FreeModule,
    GroebnerBasis,
    ModulePresentation,
    cyclic_presentation,
    free_presentation,
    groebner_module,
    lift_through,
    module_kernel,
    presentation,
    submodule_contains,
    syzygy_basis,
)

# ---------------------------------------------------------------------------
# resolutions


@dataclass(frozen=True)
class Resolution:
    """Chain F_L -> ... -> F_1 -> F_0 with H_0 = the presented module.

    shifts[i] = (multidegree shifts, weight shifts) of F_i;
    differentials[i-1] = d_i as a tuple of columns in F_{i-1} coordinates.
    """

    module: ModulePresentation
    shifts: Tuple[Tuple[Tuple[Degree, ...], Tuple[int, ...]], ...]
    differentials: Tuple[Tuple[Column, ...], ...]
    complete: bool

    @property
    def length(self) -> int:
        return len(self.shifts) - 1

    def rank(self, i: int) -> int:
        if i < 0 or i > self.length:
            return 0
        return len(self.shifts[i][0])

    def free(self, i: int) -> FreeModule:
        md, w = self.shifts[i]
        return FreeModule(self.module.ring, md, w)

    def betti(self) -> Dict[int, int]:
        return {i: self.rank(i) for i in range(self.length + 1) if self.rank(i)}

    def graded_betti(self) -> Dict[int, Tuple[Tuple[Degree, int], ...]]:
        out = {}
        for i in range(self.length + 1):
            md, w = self.shifts[i]
            if md:
                out[i] = tuple(sorted(zip(md, w)))
        return out


def _column_is_zero(col: Column) -> bool:
    return all(e.is_zero() for e in col)


def _apply_matrix(ring: GradedRing, target_rank: int, matrix: Sequence[Column], vec: Column) -> Column:
    """matrix * vec where vec has one entry per matrix column."""
    out = [ring.zero()] * target_rank
    for j, col in enumerate(matrix):
        c = vec[j]
        if c.is_zero():
            continue
        for i, entry in enumerate(col):
            if not entry.is_zero():
                out[i] = out[i] + entry * c
    return tuple(out)


def _is_constant(p: Polynomial) -> bool:
    return len(p.terms) == 1 and all(e == 0 for e in p.terms[0][0])


def _prune_complex(
    shifts: List[Tuple[List[Degree], List[int]]],
    diffs: List[List[List[Polynomial]]],
) -> None:
    """Remove constant pivots in place (Gaussian elimination of the complex).

    diffs[i] is d_{i+1} stored column-major: diffs[i][col][row].
    Pivot rule: smallest (step, row, column) with a constant nonzero entry.
    """

    def find_pivot():
        for step, mat in enumerate(diffs):
            best = None
            for col, column in enumerate(mat):
                for row, entry in enumerate(column):
                    if not entry.is_zero() and _is_constant(entry):
                        if best is None or (row, col) < best:
                            best = (row, col)
            if best is not None:
                return step, best[0], best[1]
        return None

    while True:
        hit = find_pivot()
        if hit is None:
            return
        step, row, col = hit
        mat = diffs[step]
        u = mat[col][row].lead_coeff()
        field = mat[col][row].ring.field
        uinv = field.inv(u)
        pivot_col = mat[col]
        ncols = len(mat)
        nrows = len(pivot_col)
        new_mat: List[List[Polynomial]] = []
        for j in range(ncols):
            if j == col:
                continue
            b = mat[j][row]
            if b.is_zero():
                new_col = [mat[j][r] for r in range(nrows) if r != row]
            else:
                factor = b.scale(uinv)
                new_col = [
                    mat[j][r] - pivot_col[r] * factor for r in range(nrows) if r != row
                ]
            new_mat.append(new_col)
        diffs[step] = new_mat
        # basis updates
        md, w = shifts[step + 1]
        del md[col], w[col]
        md, w = shifts[step]
        del md[row], w[row]
        if step + 1 < len(diffs):
            # delete row `col` of the next differential
            nxt = diffs[step + 1]
            diffs[step + 1] = [[c[r] for r in range(len(c)) if r != col] for c in nxt]
        if step - 1 >= 0:
            # delete column `row` of the previous differential
            prev = diffs[step - 1]
            diffs[step - 1] = [prev[j] for j in range(len(prev)) if j != row]


def _minimal_generators(free: FreeModule, cols: Sequence[Column]) -> Tuple[Column, ...]:
    """Greedy minimal generating subset: sorted by (weight, index), a column
    is dropped iff it lies in the span of the kept ones (graded Nakayama)."""
    order = sorted(
        range(len(cols)),
        key=lambda j: (free.column_degree(cols[j])[1], j),
    )
    kept: List[Column] = []
    for j in order:
        if kept and submodule_contains(free, tuple(kept), cols[j]):
            continue
        if not kept and _column_is_zero(cols[j]):
            continue
        kept.append(cols[j])
    return tuple(kept)


@lru_cache(maxsize=None)
def _minimal_free_resolution_cached(module: ModulePresentation, bound: int) -> Resolution:
    ring = module.ring
    if ring.quotient_gens:
        raise InputError("resolutions need a free ambient; re-present over the cover")
    shifts: List[Tuple[List[Degree], List[int]]] = [
        (list(module.mdeg_shifts), list(module.weight_shifts))
    ]
    diffs: List[List[List[Polynomial]]] = []

    current = tuple(c for c in module.relations if not _column_is_zero(c))
    current_free = module.free()
    step = 0
    complete = True
    while current:
        if step >= bound:
            complete = False
            break
        degs = [current_free.column_degree(c) for c in current]
        shifts.append(([d for d, _ in degs], [w for _, w in degs]))
        diffs.append([list(c) for c in current])
        syz_free, syz = syzygy_basis(current_free, current)
        syz = tuple(c for c in syz if not _column_is_zero(c))
        syz = _minimal_generators(syz_free, syz)
        current = syz
        current_free = syz_free
        step += 1

    _prune_complex(shifts, diffs)
    # drop trailing zero steps
    while diffs and not diffs[-1]:
        if len(shifts[-1][0]) == 0:
            shifts.pop()
            diffs.pop()
        else:
            break
    out_shifts = tuple((tuple(md), tuple(w)) for md, w in shifts)
    out_diffs = tuple(tuple(tuple(col) for col in mat) for mat in diffs)
    return Resolution(module, out_shifts, out_diffs, complete)


def minimal_free_resolution(module: ModulePresentation, bound: Optional[int] = None) -> Resolution:
    """Minimal graded free resolution, computed to length <= bound.

    Default bound is #vars, which suffices: iterated minimal syzygies
    terminate by then (Hilbert syzygy theorem + Nakayama at every step).
    """
    if bound is None:
        bound = module.ring.nvars + 1
    if bound < 0:
        raise InputError("negative resolution bound")
    res = _minimal_free_resolution_cached(module, bound)
    if not res.complete:
        raise InputError(f"resolution did not terminate within bound {bound}")
    return res


def check_complex(res: Resolution) -> bool:
    """d_{i-1} o d_i = 0 for all i (test/certificate helper)."""
    for i in range(1, len(res.differentials)):
        prev = res.differentials[i - 1]
        rank_out = res.rank(i - 1)
        for col in res.differentials[i]:
            img = _apply_matrix(res.module.ring, rank_out, prev, col)
            if not _column_is_zero(img):
                return False
    return True


# ---------------------------------------------------------------------------
# numerical invariants


@dataclass(frozen=True)
class InvariantRecord:
    dim: int
    depth: int
    pd: int
    nvars: int
    cm: bool
    is_zero: bool
    betti: Tuple[Tuple[int, int], ...]


@lru_cache(maxsize=None)
def minimalize_presentation(module: ModulePresentation) -> ModulePresentation:
    """Prune constant entries of the relation matrix: minimal generators."""
    shifts: List[Tuple[List[Degree], List[int]]] = [
        (list(module.mdeg_shifts), list(module.weight_shifts))
    ]
    rels = [c for c in module.relations if not _column_is_zero(c)]
    diffs: List[List[List[Polynomial]]] = []
    if rels:
        free = module.free()
        degs = [free.column_degree(c) for c in rels]
        shifts.append(([d for d, _ in degs], [w for _, w in degs]))
        diffs.append([list(c) for c in rels])
    _prune_complex(shifts, diffs)
    md, w = shifts[0]
    new_rels: Tuple[Column, ...] = ()
    if diffs:
        new_rels = tuple(tuple(col) for col in diffs[0] if not _column_is_zero(tuple(col)))
    return ModulePresentation(module.ring, tuple(md), tuple(w), new_rels)


def is_zero_module(module: ModulePresentation) -> bool:
    return minimalize_presentation(module).rank == 0


def v_of(module: ModulePresentation) -> Degree:
    """Coordinatewise min of the minimal generator multidegrees."""
    m = minimalize_presentation(module)
    if m.rank == 0:
        raise InputError("v is undefined for the zero module")
    mins = list(m.mdeg_shifts[0])
    for d in m.mdeg_shifts[1:]:
        mins = [min(a, b) for a, b in zip(mins, d)]
    return tuple(mins)


def hilbert_numerator(module: ModulePresentation) -> Dict[int, int]:
    """Signed sum of t^(weight shift) over the minimal resolution."""
    res = minimal_free_resolution(module)
    out: Dict[int, int] = {}
    for i in range(res.length + 1):
        sign = -1 if i % 2 else 1
        for w in res.shifts[i][1]:
            out[w] = out.get(w, 0) + sign
            if out[w] == 0:
                del out[w]
    return out


def _order_of_root_at_one(coeffs: Dict[int, int]) -> int:
    """Multiplicity of t = 1 as a root of a Laurent polynomial."""
    if not coeffs:
        raise ValueError("zero polynomial")
    lo = min(coeffs)
    hi = max(coeffs)
    vec = [coeffs.get(k, 0) for k in range(lo, hi + 1)]
    mult = 0
    while sum(vec) == 0:
        # divide by (1 - t): q_0 = n_0, q_k = n_k + q_{k-1}
        q = []
        acc = 0
        for c in vec[:-1]:
            acc += c
            q.append(acc)
        vec = q if q else [0]
        mult += 1
        if not any(vec):
            raise ValueError("numerator vanished identically")
    return mult


def krull_dim(module: ModulePresentation) -> int:
    """Pole order of the weight Hilbert series at t = 1; -1 for the zero module."""
    num = hilbert_numerator(module)
    if not num:
        return -1
    return module.ring.nvars - _order_of_root_at_one(num)


def projective_dimension(module: ModulePresentation) -> int:
    res = minimal_free_resolution(module)
    if res.rank(0) == 0:
        return -1
    return res.length


def depth_of(module: ModulePresentation) -> int:
    pd = projective_dimension(module)
    if pd < 0:
        return -1
    return module.ring.nvars - pd


def is_cohen_macaulay(module: ModulePresentation) -> InvariantRecord:
    res = minimal_free_resolution(module)
    nvars = module.ring.nvars
    if res.rank(0) == 0:
        return InvariantRecord(-1, -1, -1, nvars, True, True, ())
    pd = res.length
    depth = nvars - pd
    dim = krull_dim(module)
    if not (0 <= depth <= dim <= nvars):
        raise AssertionError(f"invariant violation: depth={depth} dim={dim} nvars={nvars}")
    betti = tuple((i, res.rank(i)) for i in range(res.length + 1))
    return InvariantRecord(dim, depth, pd, nvars, dim == depth, False, betti)


# ---------------------------------------------------------------------------
# graded pieces


@lru_cache(maxsize=None)
def _relations_gb(module: ModulePresentation) -> GroebnerBasis:
    rels = tuple(c for c in module.relations if not _column_is_zero(c))
    return groebner_module(module.free(), rels)


@lru_cache(maxsize=None)
def piece_basis(
    module: ModulePresentation, n: Degree, weight: Optional[int] = None
) -> Tuple[Tuple[int, Tuple[int, ...]], ...]:
    """Standard monomial basis (component, exponents) of the (n[, weight]) piece.

    Without a weight the ambient must have no multidegree-0 variables, else
    the piece is not finite-dimensional and we refuse to sum over weights.
    """
    ring = module.ring
    if len(n) != ring.rank:
        raise InputError("degree rank mismatch")
    if weight is None and not ring.is_field_base():
        raise InputError(
            "piece is an infinite-dimensional base-module; pass a weight slice"
        )
    gb = _relations_gb(module)
    leads = {}
    for col in gb.elements:
        order = gb.order()
        vec = {(i, e): c for i, entry in enumerate(col) for e, c in entry.terms}
        comp, exps = max(vec, key=order.key)
        leads.setdefault(comp, []).append(exps)

    nv = ring.nvars
    degs = ring.degrees
    wts = ring.weights
    out: List[Tuple[int, Tuple[int, ...]]] = []

    def standard(comp: int, exps: Tuple[int, ...]) -> bool:
        for lt in leads.get(comp, ()):  # divisor check
            if all(a <= b for a, b in zip(lt, exps)):
                return False
        return True

    for comp in range(module.rank):
        target_m = deg_sub(n, module.mdeg_shifts[comp])
        target_w = None if weight is None else weight - module.weight_shifts[comp]
        if any(x < 0 for x in target_m):
            continue
        if target_w is not None and target_w < 0:
            continue

        acc: List[int] = []

        def walk(i: int, rem_m: Degree, rem_w: Optional[int]):
            if i == nv:
                if any(rem_m) or (rem_w is not None and rem_w != 0):
                    return
                exps = tuple(acc)
                if standard(comp, exps):
                    out.append((comp, exps))
                return
            d, w = degs[i], wts[i]
            if rem_w is not None:
                cap = rem_w // w if w > 0 else rem_w  # w=0 never in public rings
            else:
                cap = None
            # max exponent from the multidegree budget
            mcap = None
            for coord in range(len(d)):
                if d[coord] > 0:
                    c = rem_m[coord] // d[coord]
                    mcap = c if mcap is None else min(mcap, c)
            if cap is None and mcap is None:
                raise InputError("unbounded enumeration (zero-degree variable)")
            top = min(x for x in (cap, mcap) if x is not None)
            for e in range(top + 1):
                nm = deg_sub(rem_m, tuple(e * x for x in d))
                if any(x < 0 for x in nm):
                    break
                nw = None if rem_w is None else rem_w - e * w
                if nw is not None and nw < 0:
                    break
                acc.append(e)
                walk(i + 1, nm, nw)
                acc.pop()

        walk(0, target_m, target_w)

    out.sort(key=lambda t: (t[0], ring.term_sort_key(t[1])))
    return tuple(out)


def graded_piece_dim(module: ModulePresentation, n: Sequence[int], weight: Optional[int] = None) -> int:
    """Exact k-dimension of the degree-n (optionally weight-sliced) piece."""
    return len(piece_basis(module, tuple(int(x) for x in n), weight))


# ---------------------------------------------------------------------------
# duality


def _dual_twist(ring: GradedRing) -> Tuple[Degree, int]:
    m = deg_zero(ring.rank)
    w = 0
    for d, wt in zip(ring.degrees, ring.weights):
        m = deg_add(m, d)
        w += wt
    return m, w


def _transpose_columns(matrix: Sequence[Column], nrows: int) -> Tuple[Column, ...]:
    """Columns of the transpose: one per row of the original."""
    cols = []
    for r in range(nrows):
        cols.append(tuple(col[r] for col in matrix))
    return tuple(cols)


def _zero_presentation(ring: GradedRing) -> ModulePresentation:
    return ModulePresentation(ring, (), (), ())


@lru_cache(maxsize=None)
def ext_dual_module(module: ModulePresentation, i: int) -> ModulePresentation:
    """Presentation of Ext^i(M, P(-w_total)), the graded dual of local
    cohomology at the maximal graded ideal in complementary index."""
    ring = module.ring
    if i < 0 or i > ring.nvars:
        raise InputError(f"ext index {i} out of range 0..{ring.nvars}")
    res = minimal_free_resolution(module)
    if res.rank(0) == 0 or i > res.length:
        return _zero_presentation(ring)
    cm, cw = _dual_twist(ring)

    def dual_free(j: int) -> FreeModule:
        md, w = res.shifts[j]
        return FreeModule(
            ring,
            tuple(deg_sub(cm, s) for s in md),
            tuple(cw - x for x in w),
        )

    d_i = dual_free(i)
    # kernel of the transposed map D^i -> D^{i+1}
    if i < res.length:
        delta_next = _transpose_columns(res.differentials[i], res.rank(i))
        # columns of delta_next live in D^{i+1}
        target = free_presentation(
            ring,
            tuple(zip(dual_free(i + 1).mdeg_shifts, dual_free(i + 1).weight_shifts)),
        )
        kernel = module_kernel(d_i, delta_next, target)
    else:
        unit = []
        zero = ring.zero()
        for j in range(d_i.rank):
            col = [zero] * d_i.rank
            col[j] = ring.one()
            unit.append(tuple(col))
        kernel = tuple(unit)
    if not kernel:
        return _zero_presentation(ring)

    gen_degs = [d_i.column_degree(c) for c in kernel]
    syz_free, syz = syzygy_basis(d_i, kernel)
    relations: List[Column] = [c for c in syz if not _column_is_zero(c)]
    if i >= 1:
        delta_prev = _transpose_columns(res.differentials[i - 1], res.rank(i - 1))
        for col in delta_prev:
            if _column_is_zero(col):
                continue
            lifted = lift_through(d_i, kernel, col)
            if lifted is None:
                raise AssertionError("image does not lie in kernel (not a complex?)")
            if not _column_is_zero(lifted):
                relations.append(lifted)
    return presentation(ring, tuple(gen_degs), tuple(relations))


def a_invariant(module: ModulePresentation) -> Degree:
    """a_j(M) = max top-local-cohomology degree in coordinate j, computed as
    -(min generator multidegree coordinate j) of the dual Ext module."""
    rec = is_cohen_macaulay(module)
    if rec.is_zero:
        raise InputError("a-invariant of the zero module")
    ext = ext_dual_module(module, module.ring.nvars - rec.dim)
    ext_min = minimalize_presentation(ext)
    if ext_min.rank == 0:
        raise AssertionError("top local cohomology cannot vanish")
    mins = list(ext_min.mdeg_shifts[0])
    for d in ext_min.mdeg_shifts[1:]:
        mins = [min(a, b) for a, b in zip(mins, d)]
    return deg_neg(tuple(mins))


# ---------------------------------------------------------------------------
# grade


def _hom_into_module(
    res: Resolution, j: int, target: ModulePresentation
) -> Tuple[ModulePresentation, FreeModule]:
    """Hom(F_j, N) as a presentation: rank = rank F_j * rank N, block relations."""
    ring = target.ring
    mdF, wF = res.shifts[j]
    shifts = []
    for a in range(len(mdF)):
        for g in range(target.rank):
            shifts.append(
                (
                    deg_sub(target.mdeg_shifts[g], mdF[a]),
                    target.weight_shifts[g] - wF[a],
                )
            )
    zero = ring.zero()
    rels: List[Column] = []
    for a in range(len(mdF)):
        for col in target.relations:
            big = [zero] * (len(mdF) * target.rank)
            for g in range(target.rank):
                big[a * target.rank + g] = col[g]
            rels.append(tuple(big))
    pres = ModulePresentation(
        ring,
        tuple(d for d, _ in shifts),
        tuple(w for _, w in shifts),
        tuple(rels),
    )
    return pres, pres.free()


def _hom_transpose_map(
    res: Resolution, j: int, target: ModulePresentation
) -> Tuple[Column, ...]:
    """Columns of Hom(F_j, N) -> Hom(F_{j+1}, N), precomposition with d_{j+1}."""
    ring = target.ring
    zero = ring.zero()
    d = res.differentials[j]  # d_{j+1}: columns in F_j coordinates
    rank_j = res.rank(j)
    rank_j1 = res.rank(j + 1)
    p = target.rank
    cols: List[Column] = []
    for a in range(rank_j):
        for g in range(p):
            big = [zero] * (rank_j1 * p)
            for b in range(rank_j1):
                entry = d[b][a]
                if not entry.is_zero():
                    big[b * p + g] = entry
            cols.append(tuple(big))
    return tuple(cols)


def grade_of(ideal_gens: Sequence[Polynomial], target: ModulePresentation) -> Optional[int]:
    """grade(I, N) = least i with Ext^i(P/I, N) != 0; None when I N = N."""
    gens = [g for g in ideal_gens if not g.is_zero()]
    if not gens:
        raise InputError("grade of the zero ideal")
    ring = target.ring
    if ring.quotient_gens:
        raise InputError("grade needs a free ambient; re-present over the cover")
    for g in gens:
        if g.ring.core_key() != ring.core_key():
            raise InputError("ideal and module over different rings")
    if is_zero_module(target):
        raise InputError("grade against the zero module")
    # I N = N detection: every cover generator inside I*cover + relations
    free = target.free()
    zero = ring.zero()
    in_gens: List[Column] = list(target.relations)
    for f in gens:
        for j in range(target.rank):
            col = [zero] * target.rank
            col[j] = f
            in_gens.append(tuple(col))
    unit_cols = []
    for j in range(target.rank):
        col = [zero] * target.rank
        col[j] = ring.one()
        unit_cols.append(tuple(col))
    if all(submodule_contains(free, tuple(in_gens), c) for c in unit_cols):
        return None

    quot = cyclic_presentation(ring, tuple(gens))
    res = minimal_free_resolution(quot)
    for i in range(res.length + 1):
        hom_i, free_i = _hom_into_module(res, i, target)
        if i < res.length:
            delta = _hom_transpose_map(res, i, target)
            hom_next, _ = _hom_into_module(res, i + 1, target)
            kernel = module_kernel(free_i, delta, hom_next)
        else:
            kernel = tuple(
                tuple(ring.one() if a == j else zero for a in range(hom_i.rank))
                for j in range(hom_i.rank)
            )
        if i >= 1:
            prev = _hom_image_cols(res, i, target)
        else:
            prev = ()
        span = tuple(prev) + tuple(hom_i.relations)
        span = tuple(c for c in span if not _column_is_zero(c))
        for col in kernel:
            if _column_is_zero(col):
                continue
            if not span:
                return i
            if not submodule_contains(free_i, span, col):
                return i
    return None


def _hom_image_cols(res: Resolution, i: int, target: ModulePresentation) -> Tuple[Column, ...]:
    """Image generators of Hom(F_{i-1}, N) -> Hom(F_i, N)."""
    return _hom_transpose_map(res, i - 1, target)
