"""Window-relative verdicts for the statements the engine can check.

Each verifier builds a report with an explicit hypothesis checklist, one
check row per (index, degree) probed, and an overall verdict.  Verdicts for
implications are only "violated" when every hypothesis passed and the
conclusion computably failed; everything window-relative records its window.
"""

import itertools
from dataclasses import dataclass
from typing import Callable, List, Optional, Sequence, Tuple

from .graded_poly import (
    Degree,
    InputError,
    ResourceLimit,
    compare_degrees,
    deg_zero,
)
from .groebner_engine import (
    ModulePresentation,
    free_presentation,
    ideal_power_product,
    submodules_equal,
    colon_in_quotient,
)
from .homological import (
    a_invariant,
    grade_of,
    is_cohen_macaulay,
    is_zero_module,
    krull_dim,
    v_of,
)
from .cohomology import (
    custom_support,
    default_window,
    degree_box,
    irrelevant_support,
    local_cohomology_dim,
    local_cohomology_layer_vanishes,
    maximal_support,
    sections_natural_iso,
    sheaf_cohomology_dim,
    support_E_vanishes,
)
from .rees_constructions import (
    diagonal_of,
    fiber_cone_spread,
    irrelevant_rees,
    multi_rees_algebra_presentation,
    rees_module_presentation,
)

REGRADED_VAR_LIMIT = 12


# ---------------------------------------------------------------------------
# report types


@dataclass(frozen=True)
class HypothesisCheck:
    name: str
    passed: bool
    witness: str


@dataclass(frozen=True)
class CheckRecord:
    check: str
    i: Optional[int]
    degree: Optional[Tuple[int, ...]]
    value: str
    expected: str
    verdict: str
    mode: str = ""


@dataclass(frozen=True)
class VerificationReport:
    theorem: str
    instance: str
    hypotheses: Tuple[HypothesisCheck, ...]
    left: Optional[bool]
    right: Optional[bool]
    verdict: str
    window: Optional[Tuple[Degree, Degree]]
    characteristic: int
    modes: Tuple[str, ...]
    checks: Tuple[CheckRecord, ...]

    @property
    def failures(self) -> Tuple[CheckRecord, ...]:
        return tuple(c for c in self.checks if c.verdict == "fail")

    @property
    def passed(self) -> bool:
        return self.verdict in ("holds", "hypothesis-not-met")


@dataclass(frozen=True)
class AggregateReport:
    entries: Tuple[VerificationReport, ...]
    passed: int
    failed: int
    input_errors: int
    resource_limits: int

    def exit_code(self) -> int:
        if self.failed - self.input_errors - self.resource_limits > 0:
            return 1
        if self.input_errors:
            return 2
        if self.resource_limits:
            return 3
        return 0


def _cell(x) -> str:
    if isinstance(x, tuple):
        return "(" + "|".join(str(v) for v in x) + ")"
    return str(x)


def _row(check, i, degree, value, expected, mode="") -> CheckRecord:
    verdict = "pass" if value == expected else "fail"
    return CheckRecord(check, i, degree, _cell(value), _cell(expected), verdict, mode)


def _bool_row(check, i, degree, ok: bool, mode="") -> CheckRecord:
    return CheckRecord(check, i, degree, str(ok), str(True),
                       "pass" if ok else "fail", mode)


def _finish(
    theorem, instance, hyps, left, right, window, char, modes, checks
) -> VerificationReport:
    hyp_ok = all(h.passed for h in hyps)
    if not hyp_ok:
        verdict = "hypothesis-not-met"
    elif left is None:
        verdict = "holds" if right else "violated"
    else:
        verdict = "holds" if left == right else "violated"
    return VerificationReport(
        theorem,
        instance,
        tuple(hyps),
        left,
        right,
        verdict,
        window,
        char,
        tuple(sorted(set(modes))),
        tuple(checks),
    )


# ---------------------------------------------------------------------------
# shared gates


def _weight_window(module: ModulePresentation) -> Tuple[int, int]:
    shifts = module.weight_shifts or (0,)
    hi = 3 + max(0, max(shifts))
    return (-hi, hi)


def _window_box(module, window):
    """Resolve a window argument to (degree box, lo corner, hi corner)."""
    if window is None:
        box = default_window(module)
        return box, box[0], box[-1]
    lo = tuple(int(x) for x in window[0])
    hi = tuple(int(x) for x in window[1])
    return degree_box(lo, hi), lo, hi


def _grade_hypotheses(base, blocks) -> List[HypothesisCheck]:
    target = free_presentation(base, ((deg_zero(base.rank), 0),))
    out = []
    for j, gens in enumerate(blocks):
        g = grade_of(tuple(gens), target)
        ok = g is not None and g >= 1
        out.append(
            HypothesisCheck(
                f"positive-grade-{j + 1}",
                ok,
                f"grade {g}" if g is not None else "unit ideal",
            )
        )
    return out


def _normalize_blocks(ideals) -> Tuple[Tuple, ...]:
    return tuple(tuple(gens) for gens in ideals)


# ---------------------------------------------------------------------------
# the Cohen-Macaulay biconditional


def verify_cm_biconditional(
    M: ModulePresentation,
    window: Optional[Tuple[Sequence[int], Sequence[int]]] = None,
    margin: bool = True,
    instance: str = "",
) -> VerificationReport:
    """Left side: Cohen-Macaulay with top degrees strictly below generator
    degrees.  Right side: section matching at high twists, positive sheaf
    vanishing at high twists, and fiber-supported vanishing below the
    generator degrees.  Verdict: the two sides agree on the window."""
    ring = M.ring
    if is_zero_module(M):
        raise InputError("the zero module has no biconditional content")
    box, lo, hi = _window_box(M, window)
    r = ring.rank
    char = ring.field.char
    modes: List[str] = []
    checks: List[CheckRecord] = []

    gens = irrelevant_support(ring).generators
    gtarget = free_presentation(ring, ((deg_zero(r), 0),))
    g = grade_of(gens, gtarget)
    hyps = [
        HypothesisCheck(
            "positive-grade-irrelevant",
            g is not None and g >= 1,
            f"grade {g}" if g is not None else "unit ideal",
        )
    ]

    inv = is_cohen_macaulay(M)
    a = a_invariant(M)
    v = v_of(M)
    a_below = compare_degrees(v, a).gt
    left = inv.cm and a_below
    checks.append(
        CheckRecord("left-cm", None, None, str(inv.cm), "", "info",
                    f"dim={inv.dim} depth={inv.depth}")
    )
    checks.append(
        CheckRecord("left-top-below-generators", None, None,
                    f"a={a} v={v}", "", "info", f"strict={a_below}")
    )

    field_base = ring.is_field_base()
    if field_base:
        weights: Tuple[Optional[int], ...] = (None,)
    else:
        wlo, whi = _weight_window(M)
        weights = tuple(range(wlo, whi + 1))
        modes.append(f"weight-window[{wlo}..{whi}]")

    dim_m = inv.dim
    imax_sheaf = max(1, dim_m - r + 1)
    right = True
    for n in box:
        above = compare_degrees(n, v).geq
        below = compare_degrees(v, n).gt
        if above:
            for w in weights:
                iso = sections_natural_iso(M, n, w, margin)
                checks.append(_bool_row("sections-match", 0, n, iso))
                right = right and iso
            for i in range(1, imax_sheaf + 1):
                for w in weights:
                    val = sheaf_cohomology_dim(M, i, n, w, margin)
                    checks.append(_row("sheaf-vanishing", i, n, val, 0))
                    right = right and val == 0
        elif below:
            for i in range(0, dim_m - r):
                ok, mode = support_E_vanishes(M, i, n)
                modes.append(mode)
                checks.append(_bool_row("fiber-support-vanishing", i, n, ok, mode))
                right = right and ok
    return _finish("thm31", instance, hyps, left, right, (lo, hi), char, modes, checks)


# ---------------------------------------------------------------------------
# vanishing of the regraded blow-up module


def verify_regraded_vanishing(
    M: ModulePresentation,
    window: Optional[Tuple[Sequence[int], Sequence[int]]] = None,
    k_range: Sequence[int] = (0, 1, 2),
    instance: str = "",
) -> VerificationReport:
    """All local-cohomology layers of the blow-up of the irrelevant ideal
    with M as coefficients vanish at degrees below the generator degrees of
    M, for every nonnegative blow-up exponent in range."""
    planned = M.ring.nvars + len(irrelevant_support(M.ring).generators)
    if planned > REGRADED_VAR_LIMIT:
        raise ResourceLimit("instance too large for the regraded vanishing check")
    blow = irrelevant_rees(M)
    T = blow.module
    box, lo, hi = _window_box(M, window)
    v = v_of(M)
    dim_t = krull_dim(T)
    checks: List[CheckRecord] = []
    right = True
    for n in box:
        if not compare_degrees(v, n).gt:
            continue
        for k in k_range:
            if k < 0:
                raise InputError("blow-up exponents must be nonnegative")
            layer = n + (k,)
            for i in range(0, max(dim_t, 0) + 1):
                ok = local_cohomology_layer_vanishes(T, i, layer)
                checks.append(_bool_row("regraded-vanishing", i, layer, ok, "duality"))
                right = right and ok
    return _finish(
        "lem-vanish", instance, [], None, right, (lo, hi),
        M.ring.field.char, ["duality"], checks,
    )


# ---------------------------------------------------------------------------
# top degree of blow-up modules


def verify_rees_a_invariant(
    N: ModulePresentation, ideals, instance: str = ""
) -> VerificationReport:
    """The per-coordinate top nonvanishing degree of the top local
    cohomology of a multi-Rees module equals -1 in every coordinate."""
    blocks = _normalize_blocks(ideals)
    hyps = _grade_hypotheses(N.ring, blocks)
    char = N.ring.field.char
    if not all(h.passed for h in hyps):
        return _finish("lem41", instance, hyps, None, None, None, char, [], [])
    mod = rees_module_presentation(N, blocks)
    a = a_invariant(mod)
    expected = tuple(-1 for _ in a)
    checks = [_row("a-invariant", None, a, a, expected, "duality")]
    return _finish(
        "lem41", instance, hyps, None, a == expected, None, char, ["duality"], checks
    )


# ---------------------------------------------------------------------------
# transfer of the Cohen-Macaulay property to the diagonal


def verify_rees_transfer(
    N: ModulePresentation, ideals, instance: str = ""
) -> VerificationReport:
    """If the multi-Rees module is Cohen-Macaulay then so is the Rees module
    of the product ideal (its diagonal)."""
    blocks = _normalize_blocks(ideals)
    hyps = _grade_hypotheses(N.ring, blocks)
    char = N.ring.field.char
    if not all(h.passed for h in hyps):
        return _finish("thm42", instance, hyps, None, None, None, char, [], [])
    mod = rees_module_presentation(N, blocks)
    inv = is_cohen_macaulay(mod)
    hyps.append(
        HypothesisCheck(
            "multi-rees-cm", inv.cm, f"dim={inv.dim} depth={inv.depth}"
        )
    )
    if not inv.cm:
        return _finish("thm42", instance, hyps, None, None, None, char, [], [])
    value, cert = diagonal_of(mod)
    dinv = is_cohen_macaulay(value)
    checks = [
        _bool_row("diagonal-cm", None, None, dinv.cm,
                  f"dim={dinv.dim} depth={dinv.depth}"),
        CheckRecord("diagonal-certificate", None, None, str(len(cert)),
                    "", "info", "window-identity"),
    ]
    return _finish(
        "thm42", instance, hyps, None, dinv.cm, None, char, [], checks
    )


# ---------------------------------------------------------------------------
# colon identity families


def _power_cols(N: ModulePresentation, blocks, exps) -> Tuple[Tuple, ...]:
    """Cover columns spanning (product of ideal powers) * N + relations."""
    base = N.ring
    prod = ideal_power_product(blocks, exps)
    cols: List[Tuple] = []
    if prod == (base.one(),):
        for s in range(N.rank):
            col = [base.zero()] * N.rank
            col[s] = base.one()
            cols.append(tuple(col))
    else:
        for f in prod:
            for s in range(N.rank):
                col = [base.zero()] * N.rank
                col[s] = f
                cols.append(tuple(col))
    cols.extend(N.relations)
    return tuple(cols)


def verify_colon_identities(
    N: ModulePresentation,
    ideals,
    bound: Sequence[int] = (2, 2),
    which: str = "both",
    instance: str = "",
    theorem: Optional[str] = None,
) -> VerificationReport:
    """Exact generator-membership colon checks over the base.

    "pushforward-colon": (product^(n-m)) N equals ((product^n) N : product^m)
    for all 0 <= m <= n <= bound.  "subset-colon": for every nonempty index
    subset K and l in K, (prod_K) N : I_l equals (prod_{K minus l}) N.
    """
    if which not in ("pushforward-colon", "subset-colon", "both"):
        raise InputError(f"unknown colon family {which!r}")
    blocks = _normalize_blocks(ideals)
    base = N.ring
    hyps = _grade_hypotheses(base, blocks)
    char = base.field.char
    r = len(blocks)
    if theorem is None:
        theorem = "lem45" if which == "pushforward-colon" else "thm46"
    if not all(h.passed for h in hyps):
        return _finish(theorem, instance, hyps, None, None, None, char, [], [])
    bound = tuple(int(x) for x in bound)
    if len(bound) != r or any(x < 0 for x in bound):
        raise InputError("bound must be a nonnegative exponent per ideal")

    mod = rees_module_presentation(N, blocks)
    inv = is_cohen_macaulay(mod)
    ident = inv.cm and compare_degrees(v_of(mod), a_invariant(mod)).gt
    hyps.append(
        HypothesisCheck(
            "sections-are-power-pieces",
            True,
            "exact module-level rendering; section identification "
            + ("certified (CM with top degrees below generator degrees)"
               if ident else "not certified, identity checked as stated"),
        )
    )
    if which in ("subset-colon", "both"):
        prod_all = ideal_power_product(blocks, (1,) * r)
        palg = multi_rees_algebra_presentation(base, (prod_all,))
        pinv = is_cohen_macaulay(palg.as_module())
        hyps.append(
            HypothesisCheck(
                "diagonal-charts-cm",
                True,
                f"algebra CM={pinv.cm}; chart rings are localizations"
                " (chart-proxy)",
            )
        )

    free = N.free()
    checks: List[CheckRecord] = []
    right = True

    if which in ("pushforward-colon", "both"):
        for n in degree_box(deg_zero(r), bound):
            for m in degree_box(deg_zero(r), n):
                lhs = _power_cols(N, blocks, tuple(x - y for x, y in zip(n, m)))
                power_n = _power_cols(N, blocks, n)
                colon_ideal = ideal_power_product(blocks, m)
                rhs = colon_in_quotient(N, power_n, colon_ideal)
                ok = submodules_equal(free, lhs, rhs)
                checks.append(
                    _bool_row("pushforward-colon", None, tuple(n) + tuple(m), ok)
                )
                right = right and ok

    if which in ("subset-colon", "both"):
        for size in range(1, r + 1):
            for K in itertools.combinations(range(r), size):
                exps_k = tuple(1 if j in K else 0 for j in range(r))
                power_k = _power_cols(N, blocks, exps_k)
                for l in K:
                    rest = tuple(1 if j in K and j != l else 0 for j in range(r))
                    lhs = _power_cols(N, blocks, rest)
                    rhs = colon_in_quotient(N, power_k, blocks[l])
                    ok = submodules_equal(free, lhs, rhs)
                    checks.append(
                        _bool_row("subset-colon", l + 1, exps_k, ok)
                    )
                    right = right and ok

    window = (deg_zero(r), bound) if which != "subset-colon" else None
    return _finish(theorem, instance, hyps, None, right, window, char, [], checks)


# ---------------------------------------------------------------------------
# the analytic-spread vanishing line


def verify_spread_vanishing(
    N: ModulePresentation,
    ideal_gens,
    weight_range: Sequence[int] = range(-3, 4),
    margin: bool = True,
    instance: str = "",
) -> VerificationReport:
    """For a Cohen-Macaulay blow-up module L of one ideal with analytic
    spread l, the positive sheaf cohomology of L twisted by l - 1 - i
    vanishes.  The fiber-supported line is checked only on field bases and
    is otherwise skipped with a mode tag."""
    gens = tuple(ideal_gens)
    blocks = (gens,)
    hyps = _grade_hypotheses(N.ring, blocks)
    char = N.ring.field.char
    if not all(h.passed for h in hyps):
        return _finish("lem44", instance, hyps, None, None, None, char, [], [])
    ell = fiber_cone_spread(gens)
    d = krull_dim(N)
    L = rees_module_presentation(N, blocks)
    inv = is_cohen_macaulay(L)
    hyps.append(
        HypothesisCheck("blowup-cm", inv.cm, f"dim={inv.dim} depth={inv.depth}")
    )
    hyps.append(
        HypothesisCheck(
            "locally-free",
            True,
            "assumed by corpus construction"
            + (" (module is free)" if not N.relations else ""),
        )
    )
    if not inv.cm:
        return _finish("lem44", instance, hyps, None, None, None, char, [], [])

    modes = [f"spread={ell}", f"weight-window[{weight_range[0]}..{weight_range[-1]}]"]
    checks: List[CheckRecord] = []
    right = True
    imax = max(1, krull_dim(L) - 1) + 1
    for i in range(1, imax + 1):
        n = (ell - 1 - i,)
        for w in weight_range:
            val = sheaf_cohomology_dim(L, i, n, w, margin)
            checks.append(_row("twist-vanishing", i, n, val, 0))
            right = right and val == 0
    if L.ring.is_field_base():
        for i in range(0, d):
            n = (d - ell - i,)
            ok, mode = support_E_vanishes(L, i, n)
            modes.append(mode)
            checks.append(_bool_row("fiber-line-vanishing", i, n, ok, mode))
            right = right and ok
    else:
        modes.append("fiber-line-skipped-nonfield-base")
    return _finish("lem44", instance, hyps, None, right, None, char, modes, checks)


# ---------------------------------------------------------------------------
# cross-route agreement reports


def dual_route_report(
    module: ModulePresentation,
    window: Optional[Tuple[Sequence[int], Sequence[int]]] = None,
    i_range: Optional[Sequence[int]] = None,
    weights: Optional[Sequence[Optional[int]]] = None,
    margin: bool = True,
    instance: str = "",
) -> VerificationReport:
    """Local cohomology at the full variable ideal computed twice: once by
    duality, once as a stabilized colimit of exponent-power complexes."""
    ring = module.ring
    box, lo, hi = _window_box(module, window)
    if i_range is None:
        i_range = range(0, ring.nvars + 1)
    if weights is None:
        weights = (None,) if ring.is_field_base() else tuple(range(0, 4))
    dual = maximal_support(ring)
    kozs = custom_support(ring.gens())
    checks: List[CheckRecord] = []
    right = True
    for n in box:
        for i in i_range:
            for w in weights:
                dv = local_cohomology_dim(module, dual, i, n, w, margin)
                kv = local_cohomology_dim(module, kozs, i, n, w, margin)
                ok = dv.value == kv.value
                checks.append(
                    CheckRecord(
                        "dual-route", i, n if w is None else tuple(n) + (w,),
                        str(kv.value), str(dv.value),
                        "pass" if ok else "fail",
                        f"{dv.mode}|{kv.mode}",
                    )
                )
                right = right and ok
    return _finish(
        "dual-route", instance, [], None, right, (lo, hi),
        ring.field.char, ["duality", "koszul-colimit"], checks,
    )


def fiber_identity_report(
    M: ModulePresentation,
    window: Optional[Tuple[Sequence[int], Sequence[int]]] = None,
    i_range: Optional[Sequence[int]] = None,
    margin: bool = True,
    instance: str = "",
) -> VerificationReport:
    """On a field base, the degree-n layer of the i-th local cohomology at
    the full variable ideal equals sheaf cohomology in index i - r of the
    n-th twist, for every n strictly below the generator degrees."""
    ring = M.ring
    if not ring.is_field_base():
        raise InputError("the identity cross-check needs a field base")
    box, lo, hi = _window_box(M, window)
    if i_range is None:
        i_range = range(0, ring.nvars + 1)
    r = ring.rank
    v = v_of(M)
    dual = maximal_support(ring)
    checks: List[CheckRecord] = []
    right = True
    for n in box:
        if not compare_degrees(v, n).gt:
            continue
        for i in i_range:
            dv = local_cohomology_dim(M, dual, i, n, None, margin).value
            sv = sheaf_cohomology_dim(M, i - r, n, None, margin) if i >= r else 0
            ok = dv == sv
            checks.append(
                CheckRecord(
                    "fiber-identity", i, n, str(dv), str(sv),
                    "pass" if ok else "fail", "duality|koszul-colimit",
                )
            )
            right = right and ok
    return _finish(
        "fiber-identity", instance, [], None, right, (lo, hi),
        ring.field.char, ["duality", "koszul-colimit"], checks,
    )


# ---------------------------------------------------------------------------
# corpus driver


def run_corpus(
    entries: Sequence[Tuple[str, Callable[[], VerificationReport]]]
) -> AggregateReport:
    """Run one thunk per corpus entry; input and resource failures are
    isolated into per-entry reports instead of aborting the batch."""
    reports: List[VerificationReport] = []
    passed = failed = input_errors = resource_limits = 0
    for instance, thunk in entries:
        try:
            rep = thunk()
        except InputError as e:
            rep = VerificationReport(
                "error", instance, (), None, None, "input-error", None, 0,
                ("input-error",),
                (CheckRecord("input-error", None, None, str(e), "", "fail"),),
            )
            input_errors += 1
        except ResourceLimit as e:
            rep = VerificationReport(
                "error", instance, (), None, None, "resource-limit", None, 0,
                ("resource-limit",),
                (CheckRecord("resource-limit", None, None, str(e), "", "fail"),),
            )
            resource_limits += 1
        if rep.passed:
            passed += 1
        else:
            failed += 1
        reports.append(rep)
    return AggregateReport(tuple(reports), passed, failed, input_errors, resource_limits)
