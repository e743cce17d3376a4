"""
Graded multivariate polynomials over GF(p) and over its first-order extensions.

A monomial is a packed integer P = deg·W^n + Σ e_i·W^i with W = 2^16, so that
multiplication is addition, division is subtraction and divisibility is a
single masked comparison. Coefficients are residues in field mode; in the dual
and square-zero modes they are int64 vectors (base, first-order parts) and
products of two first-order parts vanish.
"""
import itertools
import logging
from dataclasses import dataclass
from enum import Enum
from typing import Dict, Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np

from ..errors import InconsistentSystemError, NotInSpanError
from .ffla import PrimeField

logger = logging.getLogger(__name__)

BITS = 16
_MASK = (1 << BITS) - 1


class CoefficientMode(str, Enum):
    FIELD = "field"
    DUAL = "dual"
    SQUARE_ZERO = "square-zero"


class Monomials:
    """Packing of exponent vectors with a guard bit per field."""

    def __init__(self, nvars: int):
        self.nvars = nvars
        self.shift = BITS * nvars
        self.guard = sum(1 << (BITS * i + BITS - 1) for i in range(nvars + 1))
        self._units = [(1 << (BITS * i)) + (1 << self.shift) for i in range(nvars)]

    def pack(self, exps: Sequence[int]) -> int:
        if len(exps) != self.nvars:
            raise ValueError(f"expected {self.nvars} exponents, got {len(exps)}")
        packed = sum(int(e) << (BITS * i) for i, e in enumerate(exps))
        return packed + (sum(int(e) for e in exps) << self.shift)

    def unpack(self, m: int) -> Tuple[int, ...]:
        return tuple((m >> (BITS * i)) & _MASK for i in range(self.nvars))

    def degree(self, m: int) -> int:
        return m >> self.shift

    def unit(self, var: int) -> int:
        return self._units[var]

    def divides(self, a: int, b: int) -> bool:
        guard = self.guard
        return ((b + guard) - a) & guard == guard

    def lcm(self, a: int, b: int) -> int:
        return self.pack([max(x, y) for x, y in zip(self.unpack(a), self.unpack(b))])

    def exponent(self, m: int, var: int) -> int:
        return (m >> (BITS * var)) & _MASK


def _grevlex_int(exps: Sequence[int]) -> int:
    packed = sum(int(e) << (BITS * i) for i, e in enumerate(exps))
    return (sum(exps) << (BITS * len(exps))) - packed


class PolyRing:
    """Polynomial ring K[x_0..x_{n-1}] with a monomial order and a coefficient mode."""

    def __init__(
        self,
        names: Sequence[str],
        prime: Union[int, PrimeField],
        mode: CoefficientMode = CoefficientMode.FIELD,
        nparams: int = 0,
        block: Optional[int] = None,
    ):
        names = tuple(names)
        if len(set(names)) != len(names):
            raise ValueError(f"variable names not distinct: {names}")
        self.names = names
        self.nvars = len(names)
        self.field = prime if isinstance(prime, PrimeField) else PrimeField(prime)
        self.p = self.field.p
        self.mode = CoefficientMode(mode)
        if self.mode is CoefficientMode.FIELD:
            nparams = 0
        elif self.mode is CoefficientMode.DUAL:
            nparams = 1
        elif nparams < 1:
            raise ValueError("square-zero mode needs at least one parameter")
        self.nparams = nparams
        if block is not None and not 0 < block < self.nvars:
            raise ValueError(f"block size {block} out of range")
        self.block = block
        self.monomials = Monomials(self.nvars)
        self._shift = self.monomials.shift
        self._basis_cache: Dict[int, List[int]] = {}
        if block is not None:
            rest = self.nvars - block
            self._block_offset = 1 << (BITS * rest)
            self._block_scale = 1 << (BITS * (rest + 2))

    def __repr__(self) -> str:
        order = "grevlex" if self.block is None else f"block({self.block})"
        extra = "" if self.mode is CoefficientMode.FIELD else f", {self.mode.value}[{self.nparams}]"
        return f"GF({self.p})[{','.join(self.names)}] {order}{extra}"

    def _signature(self):
        return (self.names, self.p, self.mode, self.nparams, self.block)

    def __eq__(self, other) -> bool:
        return isinstance(other, PolyRing) and self._signature() == other._signature()

    def __hash__(self) -> int:
        return hash(self._signature())

    # -- monomial order ------------------------------------------------------

    def key(self, m: int) -> int:
        """Integer sort key of a packed monomial; larger key = larger monomial."""
        if self.block is None:
            return ((m >> self._shift) << (self._shift + 1)) - m
        exps = self.monomials.unpack(m)
        first = _grevlex_int(exps[:self.block])
        second = _grevlex_int(exps[self.block:])
        return first * self._block_scale + second + self._block_offset

    def graded_basis(self, d: int) -> List[int]:
        """All monomials of degree d, largest first."""
        if d < 0:
            return []
        cached = self._basis_cache.get(d)
        if cached is None:
            monos = []
            for combo in itertools.combinations_with_replacement(range(self.nvars), d):
                exps = [0] * self.nvars
                for v in combo:
                    exps[v] += 1
                monos.append(self.monomials.pack(exps))
            monos.sort(key=self.key, reverse=True)
            self._basis_cache[d] = cached = monos
        return cached

    def basis(self, d: int) -> "GradedBasis":
        return GradedBasis(self, d)

    # -- coefficients --------------------------------------------------------

    @property
    def is_field(self) -> bool:
        return self.mode is CoefficientMode.FIELD

    def coefficient(self, value) -> Union[int, np.ndarray]:
        """Normalize an int or a (base, first-order...) vector to this ring's coefficients."""
        if self.is_field:
            return int(value) % self.p
        if isinstance(value, (int, np.integer)):
            vec = np.zeros(1 + self.nparams, dtype=np.int64)
            vec[0] = int(value) % self.p
            return vec
        vec = np.asarray(value, dtype=np.int64) % self.p
        if vec.shape != (1 + self.nparams,):
            raise ValueError(f"coefficient vector of length {1 + self.nparams} expected")
        return vec

    def c_mul(self, a, b):
        if self.is_field:
            return a * b % self.p
        out = (a[0] * b + b[0] * a) % self.p
        out[0] = a[0] * b[0] % self.p
        return out

    def c_is_zero(self, c) -> bool:
        return c == 0 if self.is_field else not c.any()

    # -- constructors --------------------------------------------------------

    def zero(self) -> "GradedPoly":
        return GradedPoly(self, {})

    def constant(self, value) -> "GradedPoly":
        c = self.coefficient(value)
        return GradedPoly(self, {} if self.c_is_zero(c) else {0: c})

    def one(self) -> "GradedPoly":
        return self.constant(1)

    def monomial(self, exps: Sequence[int], coeff=1) -> "GradedPoly":
        c = self.coefficient(coeff)
        if self.c_is_zero(c):
            return self.zero()
        return GradedPoly(self, {self.monomials.pack(exps): c})

    def gen(self, i: int) -> "GradedPoly":
        exps = [0] * self.nvars
        exps[i] = 1
        return self.monomial(exps)

    def gens(self) -> List["GradedPoly"]:
        return [self.gen(i) for i in range(self.nvars)]

    def index(self, name: str) -> int:
        return self.names.index(name)

    def from_terms(self, terms: Iterable[Tuple[Sequence[int], object]]) -> "GradedPoly":
        out = self.zero()
        for exps, coeff in terms:
            out = out + self.monomial(exps, coeff)
        return out

    def linear_form(self, coefficients: Sequence[int]) -> "GradedPoly":
        terms = {}
        for i, c in enumerate(coefficients):
            c = int(c) % self.p
            if c:
                terms[self.monomials.unit(i)] = self.coefficient(c)
        return GradedPoly(self, terms)

    # -- related rings -------------------------------------------------------

    def with_mode(self, mode: CoefficientMode, nparams: int = 0) -> "PolyRing":
        return PolyRing(self.names, self.field, mode, nparams, self.block)

    def base_ring(self) -> "PolyRing":
        return PolyRing(self.names, self.field, CoefficientMode.FIELD, 0, self.block)

    def lift(self, f: "GradedPoly") -> "GradedPoly":
        """Embed a field-mode polynomial with zero first-order part."""
        if f.ring.names != self.names:
            raise ValueError("ring mismatch")
        return GradedPoly(self, {m: self.coefficient(c) for m, c in f.terms.items()})

    def perturb(self, base: "GradedPoly", parts: Sequence["GradedPoly"]) -> "GradedPoly":
        """base + Σ_t ε_t·parts[t], with base and parts in field mode."""
        if self.is_field:
            raise ValueError("perturbations live in a first-order ring")
        if len(parts) > self.nparams:
            raise ValueError(f"{len(parts)} first-order parts for {self.nparams} parameters")
        terms: Dict[int, np.ndarray] = {}
        for m, c in base.terms.items():
            terms[m] = self.coefficient(c)
        for t, part in enumerate(parts):
            for m, c in part.terms.items():
                vec = terms.get(m)
                if vec is None:
                    vec = terms[m] = self.coefficient(0)
                vec[1 + t] = (vec[1 + t] + c) % self.p
        return GradedPoly(self, {m: c for m, c in terms.items() if c.any()})

    def elimination_ring(self, first: Sequence[str]) -> "PolyRing":
        """Same variables reordered with `first` in front, block order eliminating them."""
        rest = [n for n in self.names if n not in first]
        return PolyRing(list(first) + rest, self.field, block=len(first))

    def transfer(self, f: "GradedPoly", target: "PolyRing") -> "GradedPoly":
        """Move f to a ring whose variables include those f uses (matched by name)."""
        positions = [target.names.index(n) if n in target.names else None for n in self.names]
        terms = {}
        for m, c in f.terms.items():
            exps = [0] * target.nvars
            for i, e in enumerate(self.monomials.unpack(m)):
                if not e:
                    continue
                if positions[i] is None:
                    raise ValueError(f"variable {self.names[i]} not present in {target}")
                exps[positions[i]] = e
            terms[target.monomials.pack(exps)] = c
        return GradedPoly(target, terms)

    def parse(self, text: str) -> "GradedPoly":
        """Inverse of GradedPoly.to_text for field-mode rings."""
        text = text.replace(" ", "")
        if text in ("", "0"):
            return self.zero()
        out = self.zero()
        for term in text.split("+"):
            coeff = 1
            exps = [0] * self.nvars
            for factor in term.split("*"):
                if factor.lstrip("-").isdigit():
                    coeff = coeff * int(factor)
                    continue
                name, _, power = factor.partition("^")
                exps[self.index(name)] += int(power) if power else 1
            out = out + self.monomial(exps, coeff)
        return out


class GradedPoly:
    """Sparse polynomial: dict from packed monomial to nonzero coefficient."""

    __slots__ = ("ring", "terms")

    def __init__(self, ring: PolyRing, terms: Optional[Dict[int, object]] = None):
        self.ring = ring
        self.terms = {} if terms is None else terms

    # -- basic protocol ------------------------------------------------------

    def __repr__(self) -> str:
        return f"GradedPoly({self.to_text()})"

    def __bool__(self) -> bool:
        return bool(self.terms)

    def __len__(self) -> int:
        return len(self.terms)

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, np.integer)):
            other = self.ring.constant(other)
        if not isinstance(other, GradedPoly) or other.ring != self.ring:
            return False
        if self.terms.keys() != other.terms.keys():
            return False
        if self.ring.is_field:
            return self.terms == other.terms
        return all(np.array_equal(c, other.terms[m]) for m, c in self.terms.items())

    __hash__ = None

    def _coerce(self, other) -> "GradedPoly":
        if isinstance(other, GradedPoly):
            if other.ring != self.ring:
                raise ValueError(f"ring mismatch: {self.ring} vs {other.ring}")
            return other
        if isinstance(other, (int, np.integer)):
            return self.ring.constant(int(other))
        raise TypeError(f"cannot combine GradedPoly with {type(other).__name__}")

    # -- arithmetic ----------------------------------------------------------

    def __add__(self, other) -> "GradedPoly":
        other = self._coerce(other)
        ring = self.ring
        p = ring.p
        terms = dict(self.terms)
        if ring.is_field:
            for m, c in other.terms.items():
                v = (terms.get(m, 0) + c) % p
                if v:
                    terms[m] = v
                else:
                    terms.pop(m, None)
        else:
            for m, c in other.terms.items():
                v = (terms[m] + c) % p if m in terms else c.copy()
                if v.any():
                    terms[m] = v
                else:
                    terms.pop(m, None)
        return GradedPoly(ring, terms)

    __radd__ = __add__

    def __neg__(self) -> "GradedPoly":
        p = self.ring.p
        return GradedPoly(self.ring, {m: (-c) % p for m, c in self.terms.items()})

    def __sub__(self, other) -> "GradedPoly":
        return self + (-self._coerce(other))

    def __rsub__(self, other) -> "GradedPoly":
        return self._coerce(other) - self

    def scale(self, c) -> "GradedPoly":
        """Multiply by a scalar (an int, or a coefficient vector in first-order modes)."""
        ring = self.ring
        if isinstance(c, (int, np.integer)):
            c = int(c) % ring.p
            if c == 0:
                return ring.zero()
            if c == 1:
                return GradedPoly(ring, dict(self.terms))
            return GradedPoly(ring, {m: v * c % ring.p for m, v in self.terms.items()})
        c = ring.coefficient(c)
        terms = {}
        for m, v in self.terms.items():
            w = ring.c_mul(v, c)
            if not ring.c_is_zero(w):
                terms[m] = w
        return GradedPoly(ring, terms)

    def mul_term(self, mono: int, coeff) -> "GradedPoly":
        ring = self.ring
        if ring.is_field:
            coeff = int(coeff) % ring.p
            if coeff == 0:
                return ring.zero()
            return GradedPoly(ring, {m + mono: c * coeff % ring.p for m, c in self.terms.items()})
        return GradedPoly(ring, {m + mono: c for m, c in self.scale(coeff).terms.items()})

    def __mul__(self, other) -> "GradedPoly":
        if isinstance(other, (int, np.integer)):
            return self.scale(int(other))
        other = self._coerce(other)
        ring = self.ring
        p = ring.p
        terms: Dict[int, object] = {}
        if ring.is_field:
            for m1, c1 in self.terms.items():
                for m2, c2 in other.terms.items():
                    m = m1 + m2
                    terms[m] = (terms.get(m, 0) + c1 * c2) % p
            return GradedPoly(ring, {m: c for m, c in terms.items() if c})
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                m = m1 + m2
                prod = ring.c_mul(c1, c2)
                terms[m] = (terms[m] + prod) % p if m in terms else prod
        return GradedPoly(ring, {m: c for m, c in terms.items() if c.any()})

    __rmul__ = __mul__

    def __pow__(self, e: int) -> "GradedPoly":
        result = self.ring.one()
        base = self
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    # -- structure -----------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def monomials_sorted(self) -> List[int]:
        return sorted(self.terms, key=self.ring.key, reverse=True)

    def lead(self) -> Tuple[int, object]:
        if not self.terms:
            raise ValueError("zero polynomial has no leading term")
        m = max(self.terms, key=self.ring.key)
        return m, self.terms[m]

    def lead_monomial(self) -> int:
        return self.lead()[0]

    def lead_coefficient(self):
        return self.lead()[1]

    def monic(self) -> "GradedPoly":
        if not self.terms:
            return self
        return self.scale(self.ring.field.inv(self.lead_coefficient()))

    def degree(self) -> int:
        if not self.terms:
            return -1
        shift = self.ring.monomials.shift
        return max(m >> shift for m in self.terms)

    def is_homogeneous(self) -> bool:
        shift = self.ring.monomials.shift
        return len({m >> shift for m in self.terms}) <= 1

    def homogeneous_component(self, d: int) -> "GradedPoly":
        shift = self.ring.monomials.shift
        return GradedPoly(self.ring, {m: c for m, c in self.terms.items() if m >> shift == d})

    def exponents(self) -> List[Tuple[Tuple[int, ...], object]]:
        unpack = self.ring.monomials.unpack
        return [(unpack(m), self.terms[m]) for m in self.monomials_sorted()]

    def base_part(self) -> "GradedPoly":
        """Field-mode polynomial of base coefficients."""
        if self.ring.is_field:
            return self
        base = self.ring.base_ring()
        return GradedPoly(base, {m: int(c[0]) for m, c in self.terms.items() if c[0]})

    def first_order_part(self, t: int) -> "GradedPoly":
        """Field-mode polynomial multiplying the t-th first-order parameter."""
        if self.ring.is_field:
            return self.ring.zero()
        base = self.ring.base_ring()
        return GradedPoly(base, {m: int(c[1 + t]) for m, c in self.terms.items() if c[1 + t]})

    # -- calculus and evaluation ---------------------------------------------

    def partial_derivative(self, var: int, order: int = 1) -> "GradedPoly":
        """Iterated formal derivative with falling-factorial coefficients mod p."""
        if order < 0:
            raise ValueError("derivative order must be nonnegative")
        if order == 0:
            return self
        ring = self.ring
        if order >= ring.p:
            logger.warning("[poly] derivative order %d reaches the characteristic %d", order, ring.p)
        monos = ring.monomials
        step = order * monos.unit(var)
        terms = {}
        for m, c in self.terms.items():
            e = monos.exponent(m, var)
            if e < order:
                continue
            factor = 1
            for j in range(order):
                factor *= e - j
            factor %= ring.p
            if factor == 0:
                continue
            v = c * factor % ring.p
            if ring.c_is_zero(v):
                continue
            terms[m - step] = v
        return GradedPoly(ring, terms)

    def derivative(self, orders: Sequence[int]) -> "GradedPoly":
        out = self
        for var, order in enumerate(orders):
            if order:
                out = out.partial_derivative(var, order)
        return out

    def evaluate(self, point) -> Union[int, np.ndarray]:
        """Value at a coordinate tuple (or PlanePoint); lands in the coefficient ring."""
        coords = point.coords if isinstance(point, PlanePoint) else point
        ring = self.ring
        if len(coords) != ring.nvars:
            raise ValueError(f"point has {len(coords)} coordinates, ring has {ring.nvars}")
        p = ring.p
        coords = [int(x) % p for x in coords]
        unpack = ring.monomials.unpack
        total = ring.coefficient(0)
        for m, c in self.terms.items():
            value = 1
            for x, e in zip(coords, unpack(m)):
                if e:
                    value = value * pow(x, e, p) % p
            total = (total + c * value) % p
        return int(total) if ring.is_field else total

    def gradient_at(self, point) -> List[Union[int, np.ndarray]]:
        return [self.partial_derivative(i).evaluate(point) for i in range(self.ring.nvars)]

    def substitute(self, target: PolyRing, images: Sequence["GradedPoly"]) -> "GradedPoly":
        """Image under the ring map sending x_i to images[i]."""
        ring = self.ring
        if len(images) != ring.nvars:
            raise ValueError("one image per variable required")
        powers: List[List[GradedPoly]] = [[target.one()] for _ in images]
        unpack = ring.monomials.unpack
        out = target.zero()
        for m, c in self.terms.items():
            if ring.is_field:
                term = target.constant(c)
            else:
                term = GradedPoly(target, {0: target.coefficient(c)})
            for i, e in enumerate(unpack(m)):
                if not e:
                    continue
                table = powers[i]
                while len(table) <= e:
                    table.append(table[-1] * images[i])
                term = term * table[e]
            out = out + term
        return out

    # -- serialization -------------------------------------------------------

    def to_text(self) -> str:
        if not self.terms:
            return "0"
        ring = self.ring
        parts = []
        for m in self.monomials_sorted():
            c = self.terms[m]
            coeff = str(int(c)) if ring.is_field else "[" + ",".join(str(int(v)) for v in c) + "]"
            factors = []
            for name, e in zip(ring.names, ring.monomials.unpack(m)):
                if e == 1:
                    factors.append(name)
                elif e:
                    factors.append(f"{name}^{e}")
            if not factors:
                parts.append(coeff)
            elif coeff == "1":
                parts.append("*".join(factors))
            else:
                parts.append("*".join([coeff] + factors))
        return "+".join(parts)

    def to_json(self) -> List[list]:
        out = []
        for exps, c in self.exponents():
            coeff = int(c) if self.ring.is_field else [int(v) for v in c]
            out.append([list(exps), coeff])
        return out

    @classmethod
    def from_json(cls, ring: PolyRing, data: Sequence[Sequence]) -> "GradedPoly":
        terms = {}
        for exps, coeff in data:
            c = ring.coefficient(coeff)
            if not ring.c_is_zero(c):
                terms[ring.monomials.pack(exps)] = c
        return cls(ring, terms)


class GradedBasis:
    """Coordinates of degree-d polynomials in the monomial basis (largest first)."""

    def __init__(self, ring: PolyRing, degree: int):
        self.ring = ring
        self.degree = degree
        self.monomials = ring.graded_basis(degree)
        self.index = {m: i for i, m in enumerate(self.monomials)}

    def __len__(self) -> int:
        return len(self.monomials)

    def vector(self, f: GradedPoly) -> np.ndarray:
        """Coordinate vector of a field-mode polynomial (base part in other modes)."""
        vec = np.zeros(len(self.monomials), dtype=np.int64)
        base = f.base_part()
        for m, c in base.terms.items():
            i = self.index.get(m)
            if i is None:
                raise ValueError(f"term of degree {m >> self.ring.monomials.shift}, expected {self.degree}")
            vec[i] = c
        return vec

    def first_order_matrix(self, f: GradedPoly) -> np.ndarray:
        """len(basis) × (1 + nparams) matrix of base and first-order coordinates."""
        width = 1 + f.ring.nparams
        mat = np.zeros((len(self.monomials), width), dtype=np.int64)
        for m, c in f.terms.items():
            i = self.index[m]
            mat[i] = c if width > 1 else int(c)
        return mat

    def matrix(self, polys: Sequence[GradedPoly]) -> np.ndarray:
        """Columns are coordinate vectors of the given polynomials."""
        mat = np.zeros((len(self.monomials), len(polys)), dtype=np.int64)
        for j, f in enumerate(polys):
            mat[:, j] = self.vector(f)
        return mat

    def polynomial(self, vec: Sequence[int]) -> GradedPoly:
        ring = self.ring.base_ring() if not self.ring.is_field else self.ring
        p = ring.p
        terms = {}
        for i in np.flatnonzero(np.asarray(vec) % p):
            terms[self.monomials[i]] = int(vec[i]) % p
        return GradedPoly(ring, terms)

    def polynomials(self, mat: np.ndarray) -> List[GradedPoly]:
        return [self.polynomial(mat[:, j]) for j in range(mat.shape[1])]


def coordinates_in_basis(f: GradedPoly, basis: Sequence[GradedPoly]) -> Tuple[int, ...]:
    """Coefficients c with f = Σ c_i basis_i; NotInSpanError carries the residual."""
    if not basis:
        raise ValueError("empty basis")
    if f.is_zero():
        return tuple([0] * len(basis))
    ring = basis[0].ring
    field = ring.field
    graded = GradedBasis(ring, basis[0].degree())
    a = graded.matrix(basis)
    v = graded.vector(f)
    try:
        return tuple(int(c) for c in field.solve(a, v))
    except InconsistentSystemError:
        rows, pivots = field.rref(a.T)
        residual = v.copy()
        for i, c in enumerate(pivots):
            if residual[c]:
                residual = (residual - residual[c] * rows[i]) % field.p
        raise NotInSpanError(graded.polynomial(residual))


@dataclass(frozen=True)
class PlanePoint:
    """Point of P² normalized so its last nonzero coordinate is 1."""
    coords: Tuple[int, int, int]

    @classmethod
    def normalize(cls, coords: Sequence[int], p: int) -> "PlanePoint":
        values = [int(c) % p for c in coords]
        if len(values) != 3:
            raise ValueError("plane points have three coordinates")
        nonzero = [i for i, c in enumerate(values) if c]
        if not nonzero:
            raise ValueError("(0:0:0) is not a projective point")
        inv = pow(values[nonzero[-1]], p - 2, p)
        return cls(tuple(c * inv % p for c in values))

    @property
    def chart(self) -> int:
        """Index of the coordinate normalized to 1."""
        return max(i for i, c in enumerate(self.coords) if c)

    @property
    def free_coordinates(self) -> Tuple[int, int]:
        """The two coordinate indices that vary in the affine chart."""
        return tuple(i for i in range(3) if i != self.chart)

    def to_list(self) -> List[int]:
        return list(self.coords)
