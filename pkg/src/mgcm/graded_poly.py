"""Multigraded polynomial rings with exact coefficient arithmetic.

A ring is a polynomial ring over Q or a prime field F_p whose variables carry
two gradings at once:

  * a multidegree in N^r (r >= 1), the grading the theory talks about; and
  * a positive integer weight, an auxiliary total grading.

Every weight is >= 1, so the weight-0 piece of the ring is the coefficient
field.  That is what makes the graded-local arguments (Nakayama, minimal
resolutions, Hilbert series, Auslander-Buchsbaum) valid verbatim: a "local
base" is modeled as the block of variables with multidegree 0.

Polynomials are immutable and canonical: a tuple of (exponent tuple,
coefficient) pairs sorted descending in the ring's term order, which is
degree-reverse-lexicographic on the weight grading refined by variable index.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Iterable, Iterator, List, Optional, Sequence, Tuple, Union


class InputError(ValueError):
    """Bad user input: malformed spec, inhomogeneous data, rank mismatch."""


class ResourceLimit(RuntimeError):
    """A configured size or iteration gate was exceeded."""


# ---------------------------------------------------------------------------
# coefficient fields


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    for p in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        if n % p == 0:
            return n == p
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


@dataclass(frozen=True)
class RationalField:
    """Arbitrary-precision rationals (stdlib Fraction)."""

    char: int = 0

    @property
    def zero(self) -> Fraction:
        return Fraction(0)

    @property
    def one(self) -> Fraction:
        return Fraction(1)

    def of(self, n: Union[int, Fraction]) -> Fraction:
        return Fraction(n)

    def add(self, a, b):
        return a + b

    def sub(self, a, b):
        return a - b

    def mul(self, a, b):
        return a * b

    def neg(self, a):
        return -a

    def inv(self, a):
        if a == 0:
            raise ZeroDivisionError("inverse of 0")
        return 1 / Fraction(a)

    def render(self, a) -> str:
        return str(a)


@dataclass(frozen=True)
class PrimeField:
    """F_p with elements stored as residues in range(p)."""

    p: int

    def __post_init__(self):
        if not _is_prime(self.p):
            raise InputError(f"characteristic {self.p} is not prime")

    @property
    def char(self) -> int:
        return self.p

    @property
    def zero(self) -> int:
        return 0

    @property
    def one(self) -> int:
        return 1

    def of(self, n: Union[int, Fraction]) -> int:
        if isinstance(n, Fraction):
            return self.mul(n.numerator % self.p, self.inv(n.denominator % self.p))
        return n % self.p

    def add(self, a, b):
        return (a + b) % self.p

    def sub(self, a, b):
        return (a - b) % self.p

    def mul(self, a, b):
        return (a * b) % self.p

    def neg(self, a):
        return (-a) % self.p

    def inv(self, a):
        a %= self.p
        if a == 0:
            raise ZeroDivisionError("inverse of 0 mod p")
        return pow(a, self.p - 2, self.p)

    def render(self, a) -> str:
        return str(a)


Field = Union[RationalField, PrimeField]

DEFAULT_PRIME = 32003


def field_for_char(char: int) -> Field:
    if char == 0:
        return RationalField()
    return PrimeField(char)


# ---------------------------------------------------------------------------
# multidegrees

Degree = Tuple[int, ...]


def deg_zero(rank: int) -> Degree:
    return (0,) * rank


def deg_add(a: Degree, b: Degree) -> Degree:
    return tuple(x + y for x, y in zip(a, b))


def deg_sub(a: Degree, b: Degree) -> Degree:
    return tuple(x - y for x, y in zip(a, b))


def deg_neg(a: Degree) -> Degree:
    return tuple(-x for x in a)


def deg_scale(a: Degree, c: int) -> Degree:
    return tuple(c * x for x in a)


def deg_leq(a: Degree, b: Degree) -> bool:
    """Coordinatewise a <= b."""
    return all(x <= y for x, y in zip(a, b))


def deg_lt(a: Degree, b: Degree) -> bool:
    """Strict in every coordinate (the order the theory uses for n < v)."""
    return all(x < y for x, y in zip(a, b))


def deg_min(a: Degree, b: Degree) -> Degree:
    return tuple(min(x, y) for x, y in zip(a, b))


def deg_max(a: Degree, b: Degree) -> Degree:
    return tuple(max(x, y) for x, y in zip(a, b))


@dataclass(frozen=True)
class DegreeRelation:
    geq: bool
    gt: bool
    leq: bool
    lt: bool
    incomparable: bool
    lower: Degree
    upper: Degree


def compare_degrees(a: Sequence[int], b: Sequence[int]) -> DegreeRelation:
    """Partial-order comparison record plus coordinatewise min/max."""
    a = tuple(int(x) for x in a)
    b = tuple(int(x) for x in b)
    if len(a) != len(b):
        raise InputError(f"rank mismatch: {len(a)} vs {len(b)}")
    if len(a) == 0:
        raise InputError("empty multidegree")
    geq = deg_leq(b, a)
    leq = deg_leq(a, b)
    return DegreeRelation(
        geq=geq,
        gt=deg_lt(b, a),
        leq=leq,
        lt=deg_lt(a, b),
        incomparable=not (geq or leq),
        lower=deg_min(a, b),
        upper=deg_max(a, b),
    )


@dataclass(frozen=True)
class GradingMap:
    """Integer matrix Z^k -> Z^l applied to multidegrees (rows = target coords)."""

    rows: Tuple[Tuple[int, ...], ...]

    def __post_init__(self):
        if not self.rows:
            raise InputError("grading map needs at least one row")
        k = len(self.rows[0])
        if any(len(r) != k for r in self.rows):
            raise InputError("ragged grading map")

    @property
    def source_rank(self) -> int:
        return len(self.rows[0])

    @property
    def target_rank(self) -> int:
        return len(self.rows)

    @staticmethod
    def identity(rank: int) -> "GradingMap":
        return GradingMap(tuple(tuple(1 if i == j else 0 for j in range(rank)) for i in range(rank)))

    @staticmethod
    def from_rows(rows: Iterable[Iterable[int]]) -> "GradingMap":
        return GradingMap(tuple(tuple(int(x) for x in r) for r in rows))

    def apply(self, deg: Degree) -> Degree:
        if len(deg) != self.source_rank:
            raise InputError(f"grading map rank mismatch: {len(deg)} vs {self.source_rank}")
        return tuple(sum(c * d for c, d in zip(row, deg)) for row in self.rows)


# ---------------------------------------------------------------------------
# ring spec and ring

_NAME_RE = re.compile(r"[A-Za-z][A-Za-z0-9_]*\Z")


@dataclass(frozen=True)
class GradedRingSpec:
    """Validated description of a ring: names, multidegrees, weights, char,
    optional defining ideal given as polynomial strings."""

    char: int
    names: Tuple[str, ...]
    degrees: Tuple[Degree, ...]
    weights: Tuple[int, ...]
    quotient: Tuple[str, ...] = ()
    reduce_on_multiply: bool = False


class GradedRing:
    """Immutable multigraded polynomial ring, optionally with a defining ideal.

    Most machinery treats a quotient ring S = P/J as the free cover P plus
    module relations; `quotient_gens` carries J for the constructions that
    need it (Rees presentations, reduce-on-multiply arithmetic).
    """

    __slots__ = (
        "field",
        "names",
        "degrees",
        "weights",
        "quotient_gens",
        "reduce_on_multiply",
        "_allow_zero_weight",
        "_name_index",
        "_key",
        "_hash",
    )

    def __init__(
        self,
        field: Field,
        names: Sequence[str],
        degrees: Sequence[Sequence[int]],
        weights: Sequence[int],
        quotient_gens: Sequence["Polynomial"] = (),
        reduce_on_multiply: bool = False,
        _allow_zero_weight: bool = False,
    ):
        names = tuple(names)
        degrees = tuple(tuple(int(x) for x in d) for d in degrees)
        weights = tuple(int(w) for w in weights)
        if not names:
            raise InputError("ring needs at least one variable")
        if len(set(names)) != len(names):
            raise InputError("duplicate variable names")
        for nm in names:
            if not _NAME_RE.match(nm):
                raise InputError(f"bad variable name {nm!r}")
        if len(degrees) != len(names) or len(weights) != len(names):
            raise InputError("names/degrees/weights length mismatch")
        rank = len(degrees[0]) if degrees else 0
        if rank < 1:
            raise InputError("multidegree rank must be >= 1")
        for d in degrees:
            if len(d) != rank:
                raise InputError("inconsistent multidegree rank")
            if not _allow_zero_weight and any(x < 0 for x in d):
                raise InputError("variable multidegrees must lie in N^r")
        floor = 0 if _allow_zero_weight else 1
        for w in weights:
            if w < floor:
                raise InputError(f"variable weight {w} below {floor}")
        self.field = field
        self.names = names
        self.degrees = degrees
        self.weights = weights
        self.reduce_on_multiply = bool(reduce_on_multiply)
        self._allow_zero_weight = bool(_allow_zero_weight)
        self._name_index = {nm: i for i, nm in enumerate(names)}
        qg = tuple(quotient_gens)
        for g in qg:
            if g.ring.core_key() != self.core_key():
                raise InputError("defining ideal generator from a different ring")
            if g.is_zero():
                raise InputError("zero generator in defining ideal")
            if not g.is_homogeneous():
                raise InputError("inhomogeneous defining ideal generator")
        self.quotient_gens = qg
        self._key = (
            self.field,
            names,
            degrees,
            weights,
            tuple(g.terms for g in qg),
            self.reduce_on_multiply,
            self._allow_zero_weight,
        )
        self._hash = hash(self._key)

    # identity of the underlying free ring, quotient ignored
    def core_key(self):
        return (self.field, self.names, self.degrees, self.weights, self._allow_zero_weight)

    def __eq__(self, other):
        return isinstance(other, GradedRing) and self._key == other._key

    def __hash__(self):
        return self._hash

    def __repr__(self):
        q = f"/({len(self.quotient_gens)} gens)" if self.quotient_gens else ""
        return f"GradedRing(char={self.field.char}, vars={','.join(self.names)}{q})"

    # -- basic data ----------------------------------------------------

    @property
    def nvars(self) -> int:
        return len(self.names)

    @property
    def rank(self) -> int:
        return len(self.degrees[0])

    def var_index(self, name: str) -> int:
        try:
            return self._name_index[name]
        except KeyError:
            raise InputError(f"unknown variable {name!r}") from None

    def monomial_mdeg(self, exps: Tuple[int, ...]) -> Degree:
        out = [0] * self.rank
        for e, d in zip(exps, self.degrees):
            if e:
                for j in range(self.rank):
                    out[j] += e * d[j]
        return tuple(out)

    def monomial_weight(self, exps: Tuple[int, ...]) -> int:
        return sum(e * w for e, w in zip(exps, self.weights))

    def term_sort_key(self, exps: Tuple[int, ...]):
        """Degrevlex on the weight grading refined by variable index.

        Tuple keys compare like the order: u > v iff key(u) > key(v).
        """
        return (self.monomial_weight(exps), tuple(-e for e in reversed(exps)))

    # -- polynomial constructors ----------------------------------------

    def zero(self) -> "Polynomial":
        return Polynomial(self, ())

    def one(self) -> "Polynomial":
        return self.const(1)

    def const(self, c: Union[int, Fraction]) -> "Polynomial":
        cc = self.field.of(c)
        if cc == self.field.zero:
            return self.zero()
        return Polynomial(self, (((0,) * self.nvars, cc),))

    def var(self, name: str) -> "Polynomial":
        i = self.var_index(name)
        exps = tuple(1 if j == i else 0 for j in range(self.nvars))
        return Polynomial(self, ((exps, self.field.one),))

    def gens(self) -> Tuple["Polynomial", ...]:
        return tuple(self.var(nm) for nm in self.names)

    def monomial(self, exps: Sequence[int], coeff: Union[int, Fraction] = 1) -> "Polynomial":
        exps = tuple(int(e) for e in exps)
        if len(exps) != self.nvars or any(e < 0 for e in exps):
            raise InputError("bad exponent vector")
        c = self.field.of(coeff)
        if c == self.field.zero:
            return self.zero()
        return Polynomial(self, ((exps, c),))

    def from_dict(self, d: Dict[Tuple[int, ...], object]) -> "Polynomial":
        items = [(e, c) for e, c in d.items() if c != self.field.zero]
        items.sort(key=lambda t: self.term_sort_key(t[0]), reverse=True)
        return Polynomial(self, tuple(items))

    # -- variants --------------------------------------------------------

    def free_cover(self) -> "GradedRing":
        """The same ring with the defining ideal dropped."""
        if not self.quotient_gens:
            return self
        return GradedRing(self.field, self.names, self.degrees, self.weights,
                          (), self.reduce_on_multiply, self._allow_zero_weight)

    def with_quotient(self, gens: Sequence["Polynomial"]) -> "GradedRing":
        return GradedRing(self.field, self.names, self.degrees, self.weights,
                          tuple(gens), self.reduce_on_multiply, self._allow_zero_weight)

    def base_variable_indices(self) -> Tuple[int, ...]:
        """Variables with multidegree 0 (the graded-local base block)."""
        z = deg_zero(self.rank)
        return tuple(i for i, d in enumerate(self.degrees) if d == z)

    def is_field_base(self) -> bool:
        return not self.base_variable_indices()


def make_graded_ring(spec: GradedRingSpec) -> GradedRing:
    """Validate a GradedRingSpec and build the ring (quotient strings parsed)."""
    field = field_for_char(spec.char)
    ring = GradedRing(field, spec.names, spec.degrees, spec.weights,
                      reduce_on_multiply=spec.reduce_on_multiply)
    if spec.quotient:
        qg = tuple(parse_polynomial(ring, s) for s in spec.quotient)
        ring = ring.with_quotient(qg)
    return ring


# ---------------------------------------------------------------------------
# polynomials


class Polynomial:
    """Immutable sparse polynomial; terms sorted descending in the ring order."""

    __slots__ = ("ring", "terms", "_hash")

    def __init__(self, ring: GradedRing, terms: Tuple[Tuple[Tuple[int, ...], object], ...]):
        self.ring = ring
        self.terms = terms
        self._hash = None

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.ring.core_key(), self.terms))
        return self._hash

    def __eq__(self, other):
        return (
            isinstance(other, Polynomial)
            and self.ring.core_key() == other.ring.core_key()
            and self.terms == other.terms
        )

    def __repr__(self):
        return f"Polynomial({poly_str(self)})"

    def __str__(self):
        return poly_str(self)

    def is_zero(self) -> bool:
        return not self.terms

    def as_dict(self) -> Dict[Tuple[int, ...], object]:
        return dict(self.terms)

    def lead_exps(self) -> Tuple[int, ...]:
        if not self.terms:
            raise ValueError("zero polynomial has no lead term")
        return self.terms[0][0]

    def lead_coeff(self):
        if not self.terms:
            raise ValueError("zero polynomial has no lead term")
        return self.terms[0][1]

    def _check_same_ring(self, other: "Polynomial"):
        if self.ring.core_key() != other.ring.core_key():
            raise InputError("polynomials from different rings")

    def __add__(self, other: "Polynomial") -> "Polynomial":
        self._check_same_ring(other)
        d = dict(self.terms)
        f = self.ring.field
        for e, c in other.terms:
            nc = f.add(d.get(e, f.zero), c)
            if nc == f.zero:
                d.pop(e, None)
            else:
                d[e] = nc
        return self.ring.from_dict(d)

    def __neg__(self) -> "Polynomial":
        f = self.ring.field
        return Polynomial(self.ring, tuple((e, f.neg(c)) for e, c in self.terms))

    def __sub__(self, other: "Polynomial") -> "Polynomial":
        return self + (-other)

    def scale(self, c) -> "Polynomial":
        f = self.ring.field
        c = f.of(c) if isinstance(c, (int, Fraction)) else c
        if c == f.zero:
            return self.ring.zero()
        return Polynomial(self.ring, tuple((e, f.mul(cc, c)) for e, cc in self.terms))

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        self._check_same_ring(other)
        f = self.ring.field
        d: Dict[Tuple[int, ...], object] = {}
        for e1, c1 in self.terms:
            for e2, c2 in other.terms:
                e = tuple(a + b for a, b in zip(e1, e2))
                nc = f.add(d.get(e, f.zero), f.mul(c1, c2))
                if nc == f.zero:
                    d.pop(e, None)
                else:
                    d[e] = nc
        out = self.ring.from_dict(d)
        if self.ring.reduce_on_multiply and self.ring.quotient_gens:
            from . import groebner_engine as _ge

            out = _ge.reduce_by_quotient(out)
        return out

    def __rmul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        return NotImplemented

    def __pow__(self, n: int) -> "Polynomial":
        if n < 0:
            raise InputError("negative power")
        out = self.ring.one()
        base = self
        while n:
            if n & 1:
                out = out * base
            base_needed = n >> 1
            if base_needed:
                base = base * base
            n >>= 1
        return out

    # -- grading ---------------------------------------------------------

    def term_degrees(self) -> Iterator[Tuple[Degree, int]]:
        for e, _ in self.terms:
            yield self.ring.monomial_mdeg(e), self.ring.monomial_weight(e)

    def is_homogeneous(self) -> bool:
        if not self.terms:
            return True
        seen = None
        for pair in self.term_degrees():
            if seen is None:
                seen = pair
            elif pair != seen:
                return False
        return True

    def degree_pair(self) -> Tuple[Degree, int]:
        """(multidegree, weight) of a nonzero homogeneous polynomial."""
        if not self.terms:
            raise InputError("zero polynomial has no degree")
        pairs = set(self.term_degrees())
        if len(pairs) != 1:
            raise InputError(f"inhomogeneous polynomial: {poly_str(self)}")
        return next(iter(pairs))


def ring_arithmetic(f: Polynomial, g: Polynomial, op: str) -> Polynomial:
    """Convenience dispatcher: op in {add, sub, mul}."""
    if op == "add":
        return f + g
    if op == "sub":
        return f - g
    if op == "mul":
        return f * g
    raise InputError(f"unknown op {op!r}")


def substitute(poly: Polynomial, target: GradedRing, images: Dict[str, Polynomial]) -> Polynomial:
    """Ring map by variable images; names absent from `images` map to the
    same-named variable of the target ring."""
    if poly.ring.field.char != target.field.char:
        raise InputError("substitution across characteristics")
    out = target.zero()
    for exps, c in poly.terms:
        term = Polynomial(target, (((0,) * target.nvars, c),))
        for i, e in enumerate(exps):
            if not e:
                continue
            nm = poly.ring.names[i]
            img = images.get(nm)
            if img is None:
                img = target.var(nm)
            term = term * img ** e
        out = out + term
    return out


# ---------------------------------------------------------------------------
# printing and parsing


def _render_coeff(field: Field, c) -> Tuple[str, bool]:
    """(text for |c|, is_negative); negativity only meaningful over Q."""
    if isinstance(field, RationalField) and c < 0:
        return field.render(-c), True
    return field.render(c), False


def poly_str(p: Polynomial) -> str:
    if not p.terms:
        return "0"
    ring = p.ring
    field = ring.field
    chunks: List[str] = []
    for k, (exps, c) in enumerate(p.terms):
        factors = []
        for i, e in enumerate(exps):
            if e == 1:
                factors.append(ring.names[i])
            elif e > 1:
                factors.append(f"{ring.names[i]}^{e}")
        ctext, neg = _render_coeff(field, c)
        if factors:
            body = "*".join(factors) if ctext == "1" else ctext + "*" + "*".join(factors)
        else:
            body = ctext
        if k == 0:
            chunks.append(("-" if neg else "") + body)
        else:
            chunks.append((" - " if neg else " + ") + body)
    return "".join(chunks)


_TOKEN_RE = re.compile(r"\s*(?:(?P<int>\d+)|(?P<name>[A-Za-z][A-Za-z0-9_]*)|(?P<op>[-+*/^()]))")


def _tokenize(text: str) -> List[Tuple[str, str]]:
    pos, out = 0, []
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if not m:
            if text[pos:].strip() == "":
                break
            raise InputError(f"bad character in polynomial at {text[pos:pos+10]!r}")
        pos = m.end()
        if m.lastgroup:
            out.append((m.lastgroup, m.group(m.lastgroup)))
    return out


class _PolyParser:
    def __init__(self, ring: GradedRing, text: str):
        self.ring = ring
        self.toks = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.toks[self.i] if self.i < len(self.toks) else (None, None)

    def take(self):
        t = self.peek()
        self.i += 1
        return t

    def parse(self) -> Polynomial:
        p = self.expr()
        if self.i != len(self.toks):
            raise InputError(f"trailing tokens in polynomial: {self.toks[self.i:]}")
        return p

    def expr(self) -> Polynomial:
        sign = 1
        kind, val = self.peek()
        if kind == "op" and val in "+-":
            self.take()
            sign = -1 if val == "-" else 1
        p = self.term()
        if sign < 0:
            p = -p
        while True:
            kind, val = self.peek()
            if kind == "op" and val in "+-":
                self.take()
                q = self.term()
                p = p + q if val == "+" else p - q
            else:
                return p

    def term(self) -> Polynomial:
        p = self.factor()
        while True:
            kind, val = self.peek()
            if kind == "op" and val == "*":
                self.take()
                p = p * self.factor()
            elif kind == "op" and val == "/":
                self.take()
                kind2, val2 = self.take()
                if kind2 != "int":
                    raise InputError("only integer denominators are supported")
                if self.ring.field.char == 0:
                    p = p.scale(Fraction(1, int(val2)))
                else:
                    p = p.scale(self.ring.field.inv(int(val2)))
            else:
                return p

    def factor(self) -> Polynomial:
        base = self.base()
        kind, val = self.peek()
        if kind == "op" and val == "^":
            self.take()
            kind2, val2 = self.take()
            if kind2 != "int":
                raise InputError("exponent must be an integer literal")
            return base ** int(val2)
        return base

    def base(self) -> Polynomial:
        kind, val = self.take()
        if kind == "int":
            return self.ring.const(int(val))
        if kind == "name":
            return self.ring.var(val)
        if kind == "op" and val == "(":
            p = self.expr()
            kind2, val2 = self.take()
            if (kind2, val2) != ("op", ")"):
                raise InputError("unbalanced parenthesis in polynomial")
            return p
        if kind == "op" and val == "-":
            return -self.base()
        raise InputError(f"unexpected token {val!r} in polynomial")


def parse_polynomial(ring: GradedRing, text: str) -> Polynomial:
    return _PolyParser(ring, text).parse()


# ---------------------------------------------------------------------------
# grading coarsening


def coarsen_grading(obj, gmap: GradingMap):
    """Re-grade a ring or a module presentation along an integer matrix.

    New variable multidegrees must land in N^l; weights are untouched, so
    graded-piece counts aggregate along fibers of the map.
    """
    if isinstance(obj, GradedRing):
        new_degs = tuple(gmap.apply(d) for d in obj.degrees)
        for d in new_degs:
            if any(x < 0 for x in d):
                raise InputError("coarsened multidegree leaves N^r")
        ring = GradedRing(obj.field, obj.names, new_degs, obj.weights, (),
                          obj.reduce_on_multiply, obj._allow_zero_weight)
        if obj.quotient_gens:
            qg = tuple(Polynomial(ring, g.terms) for g in obj.quotient_gens)
            ring = ring.with_quotient(qg)
        return ring
    # late import: presentations live in groebner_engine
    from . import groebner_engine as _ge

    if isinstance(obj, _ge.ModulePresentation):
        return _ge.coarsen_presentation(obj, gmap)
    raise InputError(f"cannot coarsen object of type {type(obj).__name__}")
