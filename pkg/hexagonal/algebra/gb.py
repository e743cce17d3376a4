"""
Gröbner engine: normal forms, Buchberger completion, elimination, saturation,
Hilbert series, and graded maps of free modules with syzygies and lifting.

Ideals are over field-mode rings. The default completion is Buchberger's
algorithm with the Gebauer–Möller pair update and the sugar selection strategy;
the "linear" backend completes homogeneous ideals degree by degree with
Macaulay matrices and returns the same reduced basis.
"""
import heapq
import logging
from dataclasses import dataclass
from itertools import combinations
from math import comb
from typing import Dict, Iterable, List, Optional, Sequence, Set, Tuple

import numpy as np

from ..errors import InconsistentSystemError, LiftError, VerificationError
from .poly import GradedPoly, PolyRing

logger = logging.getLogger(__name__)


# -- reduction ---------------------------------------------------------------

class _Reducer:
    __slots__ = ("lead", "inv", "tail")

    def __init__(self, g: GradedPoly):
        lead, lc = g.lead()
        self.lead = lead
        self.inv = g.ring.field.inv(lc)
        self.tail = [(m, c) for m, c in g.terms.items() if m != lead]


def _reduce_terms(ring: PolyRing, terms: Dict[int, int], reducers: Sequence[_Reducer],
                  full: bool = True) -> Dict[int, int]:
    """Remainder of a term dict modulo reducers, processing terms largest first."""
    p = ring.p
    key = ring.key
    divides = ring.monomials.divides
    f = dict(terms)
    heap = [(-key(m), m) for m in f]
    heapq.heapify(heap)
    out: Dict[int, int] = {}
    while heap:
        _, m = heapq.heappop(heap)
        c = f.pop(m, None)
        if c is None:
            continue
        reducer = None
        for r in reducers:
            if divides(r.lead, m):
                reducer = r
                break
        if reducer is None:
            out[m] = c
            if not full:
                out.update(f)
                return out
            continue
        shift = m - reducer.lead
        factor = c * reducer.inv % p
        for gm, gc in reducer.tail:
            mm = gm + shift
            old = f.get(mm)
            v = ((old or 0) - factor * gc) % p
            if v:
                if old is None:
                    heapq.heappush(heap, (-key(mm), mm))
                f[mm] = v
            elif old is not None:
                del f[mm]
    return out


def normal_form(f: GradedPoly, basis: Sequence[GradedPoly]) -> GradedPoly:
    """Fully reduced remainder of f modulo a Gröbner basis."""
    if f.is_zero() or not basis:
        return f
    reducers = [_Reducer(g) for g in basis]
    return GradedPoly(f.ring, _reduce_terms(f.ring, f.terms, reducers))


def spoly(f: GradedPoly, g: GradedPoly) -> GradedPoly:
    ring = f.ring
    mf, cf = f.lead()
    mg, cg = g.lead()
    lcm = ring.monomials.lcm(mf, mg)
    inv = ring.field.inv
    return f.mul_term(lcm - mf, inv(cf)) - g.mul_term(lcm - mg, inv(cg))


def exact_divide(h: GradedPoly, g: GradedPoly) -> GradedPoly:
    """Quotient h / g; raises ValueError when g does not divide h."""
    ring = h.ring
    lm, lc = g.lead()
    inv = ring.field.inv(lc)
    quotient = ring.zero()
    rest = h
    while rest:
        m, c = rest.lead()
        if not ring.monomials.divides(lm, m):
            raise ValueError("polynomial division is not exact")
        term = GradedPoly(ring, {m - lm: c * inv % ring.p})
        quotient = quotient + term
        rest = rest - term * g
    return quotient


# -- Buchberger --------------------------------------------------------------

def _interreduce(polys: Sequence[GradedPoly]) -> List[GradedPoly]:
    # ascending leads: a later lead never divides an earlier one
    out: List[GradedPoly] = []
    for f in sorted((f for f in polys if f), key=lambda g: g.ring.key(g.lead_monomial())):
        r = normal_form(f, out)
        if r:
            out.append(r.monic())
    return out


def buchberger(ring: PolyRing, generators: Sequence[GradedPoly]) -> List[GradedPoly]:
    """Reduced Gröbner basis, largest leading monomial first."""
    if not ring.is_field:
        raise ValueError("Gröbner bases are computed over field-mode rings")
    monos = ring.monomials
    key = ring.key
    f = _interreduce(generators)
    if not f:
        return []
    if any(g.degree() == 0 for g in f):
        return [ring.one()]

    leads: List[int] = [g.lead_monomial() for g in f]
    sugar: List[int] = [g.degree() for g in f]
    reducers: List[_Reducer] = [_Reducer(g) for g in f]

    def lm_lcm(i: int, j: int) -> int:
        return monos.lcm(leads[i], leads[j])

    def pair_entry(i: int, j: int) -> Tuple[int, int, int, int]:
        lcm = lm_lcm(i, j)
        d = monos.degree(lcm)
        s = max(sugar[i] + d - monos.degree(leads[i]), sugar[j] + d - monos.degree(leads[j]))
        return (s, key(lcm), i, j)

    def update(G: Set[int], B: Set[Tuple[int, int]], ih: int):
        mh = leads[ih]
        C = set(G)
        D: Set[Tuple[int, int]] = set()
        while C:
            ig = C.pop()
            lcm_hg = lm_lcm(ih, ig)

            def lcm_divides(ip: int) -> bool:
                return monos.divides(lm_lcm(ih, ip), lcm_hg)

            if mh + leads[ig] == lcm_hg or (
                    not any(lcm_divides(ipx) for ipx in C)
                    and not any(lcm_divides(pr[1]) for pr in D)):
                D.add((ih, ig))
        E = {(ih, ig) for _, ig in D if mh + leads[ig] != lm_lcm(ih, ig)}
        B_new = set()
        for ig1, ig2 in B:
            lcm12 = lm_lcm(ig1, ig2)
            if (not monos.divides(mh, lcm12) or lm_lcm(ig1, ih) == lcm12
                    or lm_lcm(ig2, ih) == lcm12):
                B_new.add((ig1, ig2))
        B_new |= E
        G_new = {ig for ig in G if not monos.divides(mh, leads[ig])}
        G_new.add(ih)
        return G_new, B_new

    G: Set[int] = set()
    CP: Set[Tuple[int, int]] = set()
    for ih in sorted(range(len(f)), key=lambda i: key(leads[i])):
        G, CP = update(G, CP, ih)

    queue = [pair_entry(i, j) for i, j in CP]
    heapq.heapify(queue)
    zero_reductions = 0
    while queue:
        _, _, i, j = heapq.heappop(queue)
        if (i, j) not in CP:
            continue
        CP.discard((i, j))
        s = spoly(f[i], f[j])
        pair_sugar = pair_entry(i, j)[0]
        basis = sorted(G, key=lambda g: key(leads[g]))
        h = GradedPoly(ring, _reduce_terms(ring, s.terms, [reducers[g] for g in basis]))
        if not h:
            zero_reductions += 1
            continue
        h = h.monic()
        if h.degree() == 0:
            return [ring.one()]
        f.append(h)
        leads.append(h.lead_monomial())
        reducers.append(_Reducer(h))
        sugar.append(pair_sugar)
        ih = len(f) - 1
        before = set(CP)
        G, CP = update(G, CP, ih)
        for pair in CP - before:
            heapq.heappush(queue, pair_entry(*pair))
    logger.debug("[gb] %d polynomials, %d zero reductions", len(f), zero_reductions)

    reduced = []
    for ig in G:
        others = [f[j] for j in G if j != ig]
        r = normal_form(f[ig], others)
        reduced.append(r.monic())
    reduced.sort(key=lambda g: key(g.lead_monomial()), reverse=True)
    return reduced


def _linear_groebner(ring: PolyRing, generators: Sequence[GradedPoly]) -> List[GradedPoly]:
    """Degree-by-degree completion of a homogeneous ideal by Macaulay matrices."""
    gens = [g for g in generators if g]
    if not gens:
        return []
    if not all(g.is_homogeneous() for g in gens):
        raise ValueError("the linear backend needs homogeneous generators")
    if any(g.degree() == 0 for g in gens):
        return [ring.one()]
    field = ring.field
    monos = ring.monomials
    found: List[GradedPoly] = []
    leads: List[int] = []
    bound = max(g.degree() for g in gens)
    d = min(g.degree() for g in gens)
    while d <= bound:
        basis = ring.basis(d)
        rows = []
        for g in gens:
            e = g.degree()
            if e > d:
                continue
            for mono in ring.graded_basis(d - e):
                rows.append(basis.vector(g.mul_term(mono, 1)))
        if rows:
            reduced, pivots = field.rref(np.array(rows, dtype=np.int64))
            for i, col in enumerate(pivots):
                lead = basis.monomials[col]
                if any(monos.divides(l, lead) for l in leads):
                    continue
                found.append(basis.polynomial(reduced[i]))
                leads.append(lead)
        for a, b in combinations(leads, 2):
            bound = max(bound, monos.degree(monos.lcm(a, b)))
        d += 1
    found.sort(key=lambda g: ring.key(g.lead_monomial()), reverse=True)
    return found


BACKENDS = {
    "buchberger": buchberger,
    "linear": _linear_groebner,
}


# -- ideals ------------------------------------------------------------------

class Ideal:
    """Ideal of a field-mode polynomial ring with a write-once Gröbner basis cache."""

    def __init__(self, ring: PolyRing, generators: Iterable[GradedPoly]):
        self.ring = ring
        gens = []
        for g in generators:
            if g.ring != ring:
                raise ValueError(f"generator in {g.ring}, ideal in {ring}")
            if g:
                gens.append(g)
        self.generators: Tuple[GradedPoly, ...] = tuple(gens)
        self._groebner: Optional[List[GradedPoly]] = None

    def __repr__(self) -> str:
        return f"Ideal({len(self.generators)} generators in {self.ring})"

    @classmethod
    def unit(cls, ring: PolyRing) -> "Ideal":
        ideal = cls(ring, [ring.one()])
        ideal._groebner = [ring.one()]
        return ideal

    def groebner(self, backend: str = "buchberger") -> List[GradedPoly]:
        if self._groebner is None:
            try:
                engine = BACKENDS[backend]
            except KeyError:
                raise ValueError(f"unknown Gröbner backend {backend!r}; valid are {sorted(BACKENDS)}")
            self._groebner = engine(self.ring, self.generators)
        return self._groebner

    def is_homogeneous(self) -> bool:
        return all(g.is_homogeneous() for g in self.generators)

    def is_unit(self) -> bool:
        basis = self.groebner()
        return bool(basis) and basis[0].degree() == 0

    def contains(self, f: GradedPoly) -> bool:
        return normal_form(f, self.groebner()).is_zero()

    def __add__(self, other: "Ideal") -> "Ideal":
        return Ideal(self.ring, self.generators + other.generators)

    def equals(self, other: "Ideal") -> bool:
        return self.groebner() == other.groebner()

    def hilbert(self) -> "HilbertData":
        return hilbert(self)


def groebner(ideal: Ideal, backend: str = "buchberger") -> List[GradedPoly]:
    return ideal.groebner(backend)


def is_member(f: GradedPoly, ideal: Ideal) -> bool:
    return ideal.contains(f)


def eliminate(ideal: Ideal, names: Sequence[str]) -> Ideal:
    """I ∩ K[remaining variables], computed with a block order."""
    ring = ideal.ring
    names = [n for n in ring.names if n in set(names)]
    if not names:
        return Ideal(ring, ideal.groebner())
    rest = [n for n in ring.names if n not in names]
    work = ring.elimination_ring(names)
    basis = buchberger(work, [ring.transfer(g, work) for g in ideal.generators])
    target = PolyRing(rest, ring.field)
    block = len(names)
    kept = []
    for g in basis:
        if all(not any(work.monomials.unpack(m)[:block]) for m in g.terms):
            kept.append(work.transfer(g, target))
    return Ideal(target, kept)


def intersect(a: Ideal, b: Ideal) -> Ideal:
    """a ∩ b via elimination of t from t·a + (1−t)·b."""
    ring = a.ring
    work = PolyRing(("_t",) + ring.names, ring.field, block=1)
    t = work.gen(0)
    one_minus_t = work.one() - t
    gens = [t * ring.transfer(g, work) for g in a.generators]
    gens += [one_minus_t * ring.transfer(g, work) for g in b.generators]
    basis = buchberger(work, gens)
    kept = [work.transfer(g, ring) for g in basis
            if all(work.monomials.exponent(m, 0) == 0 for m in g.terms)]
    return Ideal(ring, kept)


def quotient_by_element(ideal: Ideal, g: GradedPoly) -> Ideal:
    """I : g."""
    if ideal.contains(g):
        return Ideal.unit(ideal.ring)
    meet = intersect(ideal, Ideal(ideal.ring, [g]))
    return Ideal(ideal.ring, [exact_divide(h, g) for h in meet.generators])


def quotient(ideal: Ideal, other: Ideal) -> Ideal:
    """I : J as the intersection of the quotients by generators of J."""
    result: Optional[Ideal] = None
    for g in other.generators:
        q = quotient_by_element(ideal, g)
        if q.is_unit():
            continue
        result = q if result is None else intersect(result, q)
    return result if result is not None else Ideal.unit(ideal.ring)


def _saturate_by_linear_form(ideal: Ideal, form: GradedPoly) -> Ideal:
    """Bayer–Stillman: make the form the last variable and strip its powers."""
    ring = ideal.ring
    field = ring.field
    n = ring.nvars
    coeffs = [0] * n
    for m, c in form.terms.items():
        coeffs[ring.monomials.unpack(m).index(1)] = c
    pivot = max(i for i, c in enumerate(coeffs) if c)
    rows = [list(np.eye(n, dtype=np.int64)[i]) for i in range(n) if i != pivot] + [coeffs]
    change = field.array(rows)  # y = change · x
    back = field.inverse(change)  # x = back · y
    to_y = [ring.linear_form(back[i]) for i in range(n)]
    to_x = [ring.linear_form(change[i]) for i in range(n)]
    basis = buchberger(ring, [g.substitute(ring, to_y) for g in ideal.generators])
    last = n - 1
    stripped = []
    for g in basis:
        power = min(ring.monomials.exponent(m, last) for m in g.terms)
        if power:
            g = GradedPoly(ring, {m - power * ring.monomials.unit(last): c for m, c in g.terms.items()})
        stripped.append(g)
    return Ideal(ring, [g.substitute(ring, to_x) for g in stripped])


def saturate(ideal: Ideal, other: Ideal) -> Ideal:
    """I : J^∞ as a stabilized iterated quotient."""
    gens = other.generators
    if (len(gens) == 1 and gens[0].is_homogeneous() and gens[0].degree() == 1
            and ideal.is_homogeneous() and ideal.ring.block is None):
        return _saturate_by_linear_form(ideal, gens[0])
    current = ideal
    while True:
        nxt = quotient(current, other)
        if nxt.equals(current):
            return current
        current = nxt


# -- Hilbert series ----------------------------------------------------------

def _padd(a: List[int], b: List[int]) -> List[int]:
    out = [0] * max(len(a), len(b))
    for i, c in enumerate(a):
        out[i] += c
    for i, c in enumerate(b):
        out[i] += c
    return out


def _pmul(a: List[int], b: List[int]) -> List[int]:
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return out


def _one_minus_t_power(e: int) -> List[int]:
    out = [0] * (e + 1)
    out[0] += 1
    out[e] -= 1
    return out


def _minimalize(gens: Iterable[Tuple[int, ...]]) -> List[Tuple[int, ...]]:
    minimal: List[Tuple[int, ...]] = []
    for m in sorted(set(gens), key=sum):
        if not any(all(a <= b for a, b in zip(g, m)) for g in minimal):
            minimal.append(m)
    return minimal


def _numerator(gens: List[Tuple[int, ...]]) -> List[int]:
    """Numerator N(t) of the Hilbert series N(t)/(1−t)^n of S/(monomials)."""
    gens = _minimalize(gens)
    if not gens:
        return [1]
    mixed = [g for g in gens if sum(1 for e in g if e) > 1]
    if len(mixed) <= 1:
        pure = [g for g in gens if sum(1 for e in g if e) == 1]
        result = [1]
        for g in pure:
            result = _pmul(result, _one_minus_t_power(sum(g)))
        if mixed:
            m = mixed[0]
            colon = [1]
            for g in pure:
                v = next(i for i, e in enumerate(g) if e)
                colon = _pmul(colon, _one_minus_t_power(g[v] - m[v]))
            shifted = [0] * sum(m) + [-c for c in colon]
            result = _padd(result, shifted)
        return result
    n = len(gens[0])
    counts = [sum(1 for g in mixed if g[v]) for v in range(n)]
    v = max(range(n), key=lambda i: counts[i])
    exps = sorted(g[v] for g in mixed if g[v])
    e = exps[(len(exps) - 1) // 2]
    pivot = tuple(e if i == v else 0 for i in range(n))
    left = _numerator(gens + [pivot])
    right = _numerator([tuple(max(a - b, 0) for a, b in zip(g, pivot)) for g in gens])
    return _padd(left, [0] * e + right)


def _binomial(x: int, r: int) -> int:
    """Binomial coefficient C(x, r) as a polynomial in x (x may be negative)."""
    if r < 0:
        return 0
    num = 1
    for j in range(r):
        num *= x - j
    den = 1
    for j in range(2, r + 1):
        den *= j
    return num // den


@dataclass(frozen=True)
class HilbertData:
    """Hilbert series data of S/I read from the leading-term ideal."""
    nvars: int
    numerator: Tuple[int, ...]
    h_vector: Tuple[int, ...]
    krull_dim: int

    @property
    def projective_dim(self) -> int:
        return self.krull_dim - 1

    @property
    def degree(self) -> int:
        return sum(self.h_vector)

    def polynomial_value(self, t: int) -> int:
        """Hilbert polynomial at t."""
        if self.krull_dim <= 0:
            return 0
        r = self.krull_dim - 1
        return sum(h * _binomial(t - k + r, r) for k, h in enumerate(self.h_vector))

    def function_value(self, d: int) -> int:
        """dim (S/I)_d from the series N(t)/(1−t)^n."""
        return sum(c * comb(d - k + self.nvars - 1, self.nvars - 1)
                   for k, c in enumerate(self.numerator) if k <= d)

    def genus(self) -> int:
        """Arithmetic genus 1 − HP(0) of a one-dimensional projective scheme."""
        if self.krull_dim != 2:
            raise ValueError(f"genus needs a curve, got projective dimension {self.projective_dim}")
        return 1 - self.polynomial_value(0)

    def to_dict(self) -> Dict[str, object]:
        return {
            "projective_dim": self.projective_dim,
            "degree": self.degree,
            "h_vector": list(self.h_vector),
        }


def hilbert_from_leads(nvars: int, leads: Iterable[Tuple[int, ...]]) -> HilbertData:
    leads = list(leads)
    if any(not any(m) for m in leads):
        return HilbertData(nvars, (), (), -1)
    numerator = _numerator(leads)
    while len(numerator) > 1 and numerator[-1] == 0:
        numerator.pop()
    h = list(numerator)
    removed = 0
    while sum(h) == 0 and removed < nvars:
        quotient = []
        running = 0
        for c in h:
            running += c
            quotient.append(running)
        while len(quotient) > 1 and quotient[-1] == 0:
            quotient.pop()
        h = quotient
        removed += 1
    return HilbertData(nvars, tuple(numerator), tuple(h), nvars - removed)


def hilbert(ideal: Ideal) -> HilbertData:
    ring = ideal.ring
    leads = [ring.monomials.unpack(g.lead_monomial()) for g in ideal.groebner()]
    return hilbert_from_leads(ring.nvars, leads)


# -- graded free modules -----------------------------------------------------

class FreeModulePiece:
    """Degree-d piece of ⊕_k S(−a_k): basis pairs (summand, monomial)."""

    def __init__(self, ring: PolyRing, degrees: Sequence[int], d: int):
        self.ring = ring
        self.degrees = tuple(degrees)
        self.d = d
        self.offsets: List[int] = []
        self.blocks: List[List[int]] = []
        self.index: Dict[Tuple[int, int], int] = {}
        size = 0
        for k, a in enumerate(self.degrees):
            monos = ring.graded_basis(d - a)
            self.offsets.append(size)
            self.blocks.append(monos)
            for s, m in enumerate(monos):
                self.index[(k, m)] = size + s
            size += len(monos)
        self.size = size

    def vector(self, column: Sequence[GradedPoly], shift: int = 0) -> np.ndarray:
        """Coordinates of a column (times the monomial `shift`)."""
        vec = np.zeros(self.size, dtype=np.int64)
        for k, entry in enumerate(column):
            for m, c in entry.terms.items():
                vec[self.index[(k, m + shift)]] = c
        return vec

    def column(self, vec: np.ndarray) -> List[GradedPoly]:
        ring = self.ring
        out = []
        for k, monos in enumerate(self.blocks):
            start = self.offsets[k]
            terms = {}
            for s in np.flatnonzero(vec[start:start + len(monos)]):
                terms[monos[s]] = int(vec[start + s])
            out.append(GradedPoly(ring, terms))
        return out


@dataclass
class FreeModuleMap:
    """Graded map ⊕ S(−source_degrees[j]) → ⊕ S(−target_degrees[i])."""
    ring: PolyRing
    target_degrees: Tuple[int, ...]
    source_degrees: Tuple[int, ...]
    entries: List[List[GradedPoly]]

    def __post_init__(self):
        self.target_degrees = tuple(self.target_degrees)
        self.source_degrees = tuple(self.source_degrees)
        if len(self.entries) != len(self.target_degrees):
            raise ValueError("one row of entries per target summand required")
        for i, row in enumerate(self.entries):
            if len(row) != len(self.source_degrees):
                raise ValueError(f"row {i} has {len(row)} entries, expected {len(self.source_degrees)}")
            for j, f in enumerate(row):
                if f and (not f.is_homogeneous()
                          or f.degree() != self.source_degrees[j] - self.target_degrees[i]):
                    raise ValueError(f"entry ({i},{j}) has the wrong degree")

    @property
    def rows(self) -> int:
        return len(self.target_degrees)

    @property
    def cols(self) -> int:
        return len(self.source_degrees)

    @classmethod
    def from_columns(cls, ring, target_degrees, source_degrees, columns) -> "FreeModuleMap":
        rows = len(target_degrees)
        entries = [[columns[j][i] for j in range(len(columns))] for i in range(rows)]
        return cls(ring, tuple(target_degrees), tuple(source_degrees), entries)

    @classmethod
    def identity(cls, ring: PolyRing, degrees: Sequence[int]) -> "FreeModuleMap":
        n = len(degrees)
        entries = [[ring.one() if i == j else ring.zero() for j in range(n)] for i in range(n)]
        return cls(ring, tuple(degrees), tuple(degrees), entries)

    @classmethod
    def zero(cls, ring, target_degrees, source_degrees) -> "FreeModuleMap":
        entries = [[ring.zero() for _ in source_degrees] for _ in target_degrees]
        return cls(ring, tuple(target_degrees), tuple(source_degrees), entries)

    def column(self, j: int) -> List[GradedPoly]:
        return [row[j] for row in self.entries]

    def is_zero(self) -> bool:
        return all(not f for row in self.entries for f in row)

    def __eq__(self, other) -> bool:
        return (isinstance(other, FreeModuleMap)
                and self.target_degrees == other.target_degrees
                and self.source_degrees == other.source_degrees
                and all(a == b for ra, rb in zip(self.entries, other.entries) for a, b in zip(ra, rb)))

    def compose(self, other: "FreeModuleMap") -> "FreeModuleMap":
        """self ∘ other."""
        if self.source_degrees != other.target_degrees:
            raise ValueError("maps are not composable")
        ring = self.ring
        entries = []
        for i in range(self.rows):
            row = []
            for j in range(other.cols):
                acc = ring.zero()
                for k in range(self.cols):
                    a = self.entries[i][k]
                    if a:
                        b = other.entries[k][j]
                        if b:
                            acc = acc + a * b
                row.append(acc)
            entries.append(row)
        return FreeModuleMap(ring, self.target_degrees, other.source_degrees, entries)

    def submap(self, rows: Sequence[int], cols: Sequence[int]) -> "FreeModuleMap":
        entries = [[self.entries[i][j] for j in cols] for i in rows]
        return FreeModuleMap(self.ring, tuple(self.target_degrees[i] for i in rows),
                             tuple(self.source_degrees[j] for j in cols), entries)

    def scaled(self, c: int) -> "FreeModuleMap":
        entries = [[f.scale(c) for f in row] for row in self.entries]
        return FreeModuleMap(self.ring, self.target_degrees, self.source_degrees, entries)

    def matrix_in_degree(self, d: int, source: Optional[FreeModulePiece] = None,
                         target: Optional[FreeModulePiece] = None) -> np.ndarray:
        """Matrix of the induced linear map (source)_d → (target)_d."""
        source = source or FreeModulePiece(self.ring, self.source_degrees, d)
        target = target or FreeModulePiece(self.ring, self.target_degrees, d)
        mat = np.zeros((target.size, source.size), dtype=np.int64)
        for j in range(self.cols):
            column = self.column(j)
            for s, mono in enumerate(source.blocks[j]):
                col = source.offsets[j] + s
                for i, entry in enumerate(column):
                    for m, c in entry.terms.items():
                        row = target.index[(i, m + mono)]
                        mat[row, col] = (mat[row, col] + c) % self.ring.p
        return mat

    def to_json(self) -> Dict[str, object]:
        return {
            "target_degrees": list(self.target_degrees),
            "source_degrees": list(self.source_degrees),
            "entries": [[f.to_json() for f in row] for row in self.entries],
        }

    @classmethod
    def from_json(cls, ring: PolyRing, data: Dict[str, object]) -> "FreeModuleMap":
        entries = [[GradedPoly.from_json(ring, f) for f in row] for row in data["entries"]]
        return cls(ring, tuple(data["target_degrees"]), tuple(data["source_degrees"]), entries)


def row_map(ring: PolyRing, polys: Sequence[GradedPoly]) -> FreeModuleMap:
    """The 1×m map S(−deg f_1)⊕… → S given by a sequence of forms."""
    return FreeModuleMap(ring, (0,), tuple(f.degree() for f in polys), [list(polys)])


def schreyer_bound(F: FreeModuleMap) -> int:
    """Degree bound for generators of the syzygies of a single-row map."""
    if F.rows != 1:
        raise ValueError("the Schreyer bound is computed for single-row maps")
    ring = F.ring
    shift = F.target_degrees[0]
    basis = Ideal(ring, [f for f in F.entries[0] if f]).groebner()
    bound = max(F.source_degrees, default=0)
    monos = ring.monomials
    leads = [g.lead_monomial() for g in basis]
    for a, b in combinations(leads, 2):
        bound = max(bound, monos.degree(monos.lcm(a, b)) + shift)
    return bound


def syzygies(F: FreeModuleMap, max_degree: Optional[int] = None,
             min_degree: Optional[int] = None) -> FreeModuleMap:
    """Minimal generators of ker F up to max_degree, found degree by degree."""
    ring = F.ring
    field = ring.field
    if max_degree is None:
        max_degree = schreyer_bound(F)
    if min_degree is None:
        min_degree = min(F.source_degrees, default=0)
    found: List[Tuple[int, List[GradedPoly]]] = []
    for d in range(min_degree, max_degree + 1):
        source = FreeModulePiece(ring, F.source_degrees, d)
        if source.size == 0:
            continue
        kernel = field.kernel(F.matrix_in_degree(d, source=source))
        if kernel.shape[1] == 0:
            continue
        image = [source.vector(col, shift)
                 for e, col in found for shift in ring.graded_basis(d - e)]
        if image:
            new, _ = field.extend_basis(np.column_stack(image), kernel)
        else:
            new = field.column_basis(kernel)
        for j in range(new.shape[1]):
            found.append((d, source.column(new[:, j])))
        logger.debug("[gb] syzygies in degree %d: kernel %d, new %d", d, kernel.shape[1], new.shape[1])
    return FreeModuleMap.from_columns(ring, F.source_degrees, [d for d, _ in found],
                                      [col for _, col in found])


def lift_through(G: FreeModuleMap, B: FreeModuleMap, check: bool = False) -> FreeModuleMap:
    """X with G ∘ X = B, solved degree by degree; LiftError names the first bad column."""
    if G.target_degrees != B.target_degrees:
        raise ValueError("G and B must share their target")
    ring = G.ring
    field = ring.field
    columns: List[Optional[List[GradedPoly]]] = [None] * B.cols
    by_degree: Dict[int, List[int]] = {}
    for j, e in enumerate(B.source_degrees):
        by_degree.setdefault(e, []).append(j)
    for e, cols in sorted(by_degree.items()):
        source = FreeModulePiece(ring, G.source_degrees, e)
        target = FreeModulePiece(ring, G.target_degrees, e)
        a = G.matrix_in_degree(e, source=source, target=target)
        rhs = np.column_stack([target.vector(B.column(j)) for j in cols])
        try:
            x = field.solve(a, rhs)
        except InconsistentSystemError as err:
            raise LiftError(cols[err.columns[0]])
        for idx, j in enumerate(cols):
            columns[j] = source.column(x[:, idx])
    lifted = FreeModuleMap.from_columns(ring, G.source_degrees, B.source_degrees, columns)
    if check and G.compose(lifted) != B:
        raise VerificationError(["lift_through postcondition G·X = B"])
    return lifted
