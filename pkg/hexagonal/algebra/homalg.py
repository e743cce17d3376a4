"""
Graded free resolutions, Betti tables, Koszul cohomology and chain maps.

Resolutions are built from iterated degree-wise syzygies and minimalized by
cancelling constant pivots. For the large Betti numbers the Koszul complex
∧^{i+1}V⊗A_{j-i-1} → ∧^iV⊗A_{j-i} → ∧^{i-1}V⊗A_{j-i+1} of A = S/I is used
directly, optionally after an Artinian reduction by general linear forms.
"""
import logging
from dataclasses import dataclass, field
from itertools import combinations
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .gb import FreeModuleMap, HilbertData, Ideal, hilbert, lift_through, row_map, syzygies
from .poly import GradedPoly, PolyRing

logger = logging.getLogger(__name__)


# -- Betti tables ------------------------------------------------------------

@dataclass
class BettiTable:
    """β_{i,j}: number of degree-j generators in homological position i."""
    entries: Dict[Tuple[int, int], int] = field(default_factory=dict)

    def __getitem__(self, key: Tuple[int, int]) -> int:
        return self.entries.get(key, 0)

    def __setitem__(self, key: Tuple[int, int], value: int):
        if value < 0:
            raise ValueError(f"negative Betti number at {key}")
        if value:
            self.entries[key] = value
        else:
            self.entries.pop(key, None)

    def positions(self) -> List[int]:
        return sorted({i for i, _ in self.entries})

    def to_grid(self) -> str:
        """Rows j−i, columns i, dots for zeros."""
        if not self.entries:
            return ""
        cols = range(max(i for i, _ in self.entries) + 1)
        rows = sorted({j - i for i, j in self.entries})
        width = max(len(str(v)) for v in self.entries.values()) + 1
        lines = ["    " + "".join(f"{i:>{width}}" for i in cols)]
        for r in rows:
            cells = []
            for i in cols:
                value = self.entries.get((i, i + r), 0)
                cells.append(f"{value if value else '.':>{width}}")
            lines.append(f"{r:>3}:" + "".join(cells))
        return "\n".join(lines)

    def to_dict(self) -> Dict[str, int]:
        return {f"{i},{j}": v for (i, j), v in sorted(self.entries.items())}

    @classmethod
    def from_dict(cls, data: Dict[str, int]) -> "BettiTable":
        table = cls()
        for key, value in data.items():
            i, j = (int(s) for s in key.split(","))
            table[(i, j)] = int(value)
        return table


# -- resolutions -------------------------------------------------------------

@dataclass
class Resolution:
    """maps[i−1] is the differential d_i: F_i → F_{i−1}; F_0 is the target of d_1."""
    maps: List[FreeModuleMap]
    minimal: bool = False

    @property
    def length(self) -> int:
        return len(self.maps)

    def degrees(self, i: int) -> Tuple[int, ...]:
        if i == 0:
            return self.maps[0].target_degrees
        return self.maps[i - 1].source_degrees

    def differential(self, i: int) -> FreeModuleMap:
        return self.maps[i - 1]

    def is_complex(self) -> bool:
        return all(self.maps[i].compose(self.maps[i + 1]).is_zero()
                   for i in range(len(self.maps) - 1))

    def betti_table(self) -> BettiTable:
        return betti_table(self)

    def to_json(self) -> Dict[str, object]:
        return {"minimal": self.minimal, "maps": [d.to_json() for d in self.maps]}


def minimal_generators(ideal: Ideal) -> List[GradedPoly]:
    """A minimal homogeneous generating subset, chosen degree by degree."""
    ring = ideal.ring
    field_ = ring.field
    if not ideal.is_homogeneous():
        raise ValueError("minimal generators are defined for homogeneous ideals")
    by_degree: Dict[int, List[GradedPoly]] = {}
    for g in ideal.generators:
        by_degree.setdefault(g.degree(), []).append(g)
    chosen: List[GradedPoly] = []
    for d in sorted(by_degree):
        basis = ring.basis(d)
        span = [basis.vector(g.mul_term(m, 1))
                for g in chosen for m in ring.graded_basis(d - g.degree())]
        candidates = np.column_stack([basis.vector(g) for g in by_degree[d]])
        if span:
            _, picked = field_.extend_basis(np.column_stack(span), candidates)
        else:
            _, picked = field_.rref(candidates)
        chosen.extend(by_degree[d][c] for c in picked)
    return chosen


def resolve(ideal: Ideal, length: int, max_degree: Optional[int] = None,
            linear_strand_only: bool = False) -> Resolution:
    """Free resolution of S/I up to homological position `length`, minimalized.

    `max_degree` bounds the regularity of S/I; by default it is estimated as the
    top degree of the Gröbner basis minus one.
    """
    if length < 1:
        raise ValueError("resolution length must be at least 1")
    ring = ideal.ring
    gens = minimal_generators(ideal)
    if not gens:
        raise ValueError("the zero ideal has the trivial resolution")
    low = min(g.degree() for g in gens)
    if linear_strand_only:
        gens = [g for g in gens if g.degree() == low]
    if max_degree is None:
        max_degree = max(g.degree() for g in ideal.groebner()) - 1
    maps = [row_map(ring, gens)]
    logger.info("[resolve] F1 of rank %d", len(gens))
    for i in range(2, length + 1):
        previous = maps[-1]
        if previous.cols == 0:
            break
        if linear_strand_only:
            top = bottom = i + low - 1
        else:
            top = i + max_degree
            bottom = min(previous.source_degrees) + 1
        kernel = syzygies(previous, max_degree=top, min_degree=bottom)
        logger.info("[resolve] F%d of rank %d", i, kernel.cols)
        if kernel.cols == 0:
            break
        maps.append(kernel)
    return minimalize(Resolution(maps))


def _constant_pivot(d: FreeModuleMap) -> Optional[Tuple[int, int, int]]:
    for c in range(d.cols):
        for r in range(d.rows):
            f = d.entries[r][c]
            if f and f.degree() == 0:
                return r, c, f.terms[0]
    return None


def minimalize(resolution: Resolution) -> Resolution:
    """Cancel constant entries one pivot at a time until none remain."""
    maps = list(resolution.maps)
    for i in range(len(maps)):
        while True:
            pivot = _constant_pivot(maps[i])
            if pivot is None:
                break
            r, c, u = pivot
            d = maps[i]
            ring = d.ring
            inv = ring.field.inv(u)
            pivot_row = d.entries[r]
            rows = [k for k in range(d.rows) if k != r]
            cols = [k for k in range(d.cols) if k != c]
            entries = []
            for rr in rows:
                factor = d.entries[rr][c].scale(inv)
                row = []
                for cc in cols:
                    entry = d.entries[rr][cc]
                    if factor and pivot_row[cc]:
                        entry = entry - factor * pivot_row[cc]
                    row.append(entry)
                entries.append(row)
            maps[i] = FreeModuleMap(ring, tuple(d.target_degrees[k] for k in rows),
                                    tuple(d.source_degrees[k] for k in cols), entries)
            if i > 0:
                below = maps[i - 1]
                maps[i - 1] = below.submap(range(below.rows), cols=[k for k in range(below.cols) if k != r])
            if i + 1 < len(maps):
                above = maps[i + 1]
                maps[i + 1] = above.submap([k for k in range(above.rows) if k != c], range(above.cols))
            logger.debug("[resolve] cancelled a unit pivot in d%d", i + 1)
    while maps and maps[-1].cols == 0:
        maps.pop()
    return Resolution(maps, minimal=True)


def betti_table(resolution: Resolution) -> BettiTable:
    table = BettiTable()
    if not resolution.maps:
        return table
    for i in range(resolution.length + 1):
        for j in resolution.degrees(i):
            table[(i, j)] = table[(i, j)] + 1
    return table


# -- Koszul cohomology -------------------------------------------------------

def wedge_basis(n: int, k: int) -> List[Tuple[int, ...]]:
    """Index sets of ∧^k of an n-dimensional space, lexicographically ordered."""
    if k < 0 or k > n:
        return []
    return list(combinations(range(n), k))


@dataclass
class QuotientPiece:
    """Degree-d piece of S/I: standard monomials and the normal-form matrix on S_d."""
    degree: int
    standard: List[int]
    normal_form: np.ndarray  # dim(S/I)_d × dim S_d
    index: Dict[int, int]  # monomial → column of normal_form

    @property
    def dimension(self) -> int:
        return len(self.standard)


class KoszulComplex:
    """Koszul complex of the graded quotient A = S/I over the degree-one forms."""

    def __init__(self, ideal: Ideal):
        if not ideal.is_homogeneous():
            raise ValueError("Koszul cohomology needs a homogeneous ideal")
        self.ideal = ideal
        self.ring: PolyRing = ideal.ring
        self.field = self.ring.field
        self.n = self.ring.nvars
        self._pieces: Dict[int, QuotientPiece] = {}
        self._mult: Dict[int, List[np.ndarray]] = {}

    def piece(self, d: int) -> QuotientPiece:
        cached = self._pieces.get(d)
        if cached is not None:
            return cached
        ring = self.ring
        p = ring.p
        monos = ring.graded_basis(d)
        index = {m: i for i, m in enumerate(monos)}
        basis = ring.basis(d)
        rows = [basis.vector(g.mul_term(m, 1))
                for g in self.ideal.generators if g.degree() <= d
                for m in ring.graded_basis(d - g.degree())]
        if rows:
            reduced, pivots = self.field.rref(np.array(rows, dtype=np.int64))
        else:
            reduced, pivots = np.zeros((0, len(monos)), dtype=np.int64), []
        pivot_set = set(pivots)
        free = [c for c in range(len(monos)) if c not in pivot_set]
        nf = np.zeros((len(free), len(monos)), dtype=np.int64)
        nf[np.arange(len(free)), free] = 1
        if pivots and free:
            nf[:, pivots] = (-reduced[:len(pivots)][:, free].T) % p
        piece = QuotientPiece(d, [monos[c] for c in free], nf, index)
        self._pieces[d] = piece
        logger.debug("[koszul] (S/I)_%d has dimension %d", d, piece.dimension)
        return piece

    def hilbert_function(self, d: int) -> int:
        return self.piece(d).dimension

    def reduce(self, f: GradedPoly) -> np.ndarray:
        """Coordinates of the class of a form in the standard-monomial basis."""
        piece = self.piece(f.degree())
        vec = self.ring.basis(f.degree()).vector(f)
        return self.field.matmul(piece.normal_form, vec)

    def multiplication(self, d: int) -> List[np.ndarray]:
        """For each variable, the matrix of multiplication A_d → A_{d+1}."""
        cached = self._mult.get(d)
        if cached is not None:
            return cached
        source = self.piece(d)
        target = self.piece(d + 1)
        units = [self.ring.monomials.unit(v) for v in range(self.n)]
        mats = []
        for unit in units:
            cols = [target.index[s + unit] for s in source.standard]
            mats.append(target.normal_form[:, cols] if cols else
                        np.zeros((target.dimension, 0), dtype=np.int64))
        self._mult[d] = mats
        return mats

    def differential(self, k: int, d: int) -> np.ndarray:
        """∧^kV⊗A_d → ∧^{k−1}V⊗A_{d+1}, sign (−1)^position."""
        source_wedges = wedge_basis(self.n, k)
        target_wedges = wedge_basis(self.n, k - 1)
        a_src = self.piece(d).dimension if d >= 0 else 0
        a_tgt = self.piece(d + 1).dimension if d + 1 >= 0 else 0
        mat = np.zeros((len(target_wedges) * a_tgt, len(source_wedges) * a_src), dtype=np.int64)
        if mat.size == 0 or k == 0:
            return mat
        p = self.ring.p
        mult = self.multiplication(d)
        position = {w: i for i, w in enumerate(target_wedges)}
        for s, wedge in enumerate(source_wedges):
            cols = slice(s * a_src, (s + 1) * a_src)
            for pos, var in enumerate(wedge):
                t = position[wedge[:pos] + wedge[pos + 1:]]
                rows = slice(t * a_tgt, (t + 1) * a_tgt)
                block = mult[var] if pos % 2 == 0 else (-mult[var]) % p
                mat[rows, cols] = (mat[rows, cols] + block) % p
        return mat

    def middle_dimension(self, k: int, d: int) -> int:
        if d < 0:
            return 0
        return len(wedge_basis(self.n, k)) * self.piece(d).dimension

    def betti(self, i: int, j: int) -> int:
        """β_{i,j}(S/I) = dim H of the complex at ∧^iV⊗A_{j−i}."""
        d = j - i
        middle = self.middle_dimension(i, d)
        if middle == 0:
            return 0
        out_rank = self.field.rank(self.differential(i, d)) if i > 0 else 0
        in_rank = self.field.rank(self.differential(i + 1, d - 1)) if d - 1 >= 0 else 0
        logger.debug("[koszul] β(%d,%d): %d − %d − %d", i, j, middle, out_rank, in_rank)
        return middle - out_rank - in_rank

    def cycles(self, i: int, d: int) -> np.ndarray:
        if i == 0:
            return self.field.identity(self.middle_dimension(0, d))
        return self.field.kernel(self.differential(i, d))

    def boundaries(self, i: int, d: int) -> np.ndarray:
        if d - 1 < 0:
            return np.zeros((self.middle_dimension(i, d), 0), dtype=np.int64)
        return self.field.column_basis(self.differential(i + 1, d - 1))

    def homology_basis(self, i: int, d: int) -> np.ndarray:
        """Cycles whose classes form a basis of H at ∧^iV⊗A_d."""
        boundaries = self.boundaries(i, d)
        cycles = self.cycles(i, d)
        basis, _ = self.field.extend_basis(boundaries, cycles)
        return basis

    def homology_coordinates(self, i: int, d: int, vectors: np.ndarray,
                             basis: Optional[np.ndarray] = None) -> np.ndarray:
        """Coordinates of cycle classes in a homology basis."""
        if basis is None:
            basis = self.homology_basis(i, d)
        boundaries = self.boundaries(i, d)
        coords = self.field.solve(np.hstack([boundaries, basis]), vectors)
        return coords[boundaries.shape[1]:]


def koszul_betti(ideal: Ideal, i: int, j: int, reduce_by: int = 0,
                 rng: Optional[np.random.Generator] = None) -> int:
    """β_{i,j}(S/I) from two ranks, optionally on a general Artinian reduction."""
    if reduce_by:
        ideal = artinian_reduction(ideal, reduce_by, rng or np.random.default_rng()).ideal
    return KoszulComplex(ideal).betti(i, j)


def koszul_betti_table(ideal: Ideal, positions: Sequence[Tuple[int, int]], reduce_by: int = 0,
                       rng: Optional[np.random.Generator] = None) -> BettiTable:
    """β_{i,j} at the requested positions, sharing one Koszul complex."""
    if reduce_by:
        ideal = artinian_reduction(ideal, reduce_by, rng or np.random.default_rng()).ideal
    complex_ = KoszulComplex(ideal)
    table = BettiTable()
    for i, j in positions:
        if i <= complex_.n:
            table[(i, j)] = complex_.betti(i, j)
    return table


# -- Artinian reduction ------------------------------------------------------

@dataclass
class ArtinianReduction:
    ideal: Ideal
    images: List[GradedPoly]
    hilbert_function: List[int]


def reduction_map(ring: PolyRing, count: int, rng: np.random.Generator) -> Tuple[PolyRing, List[GradedPoly]]:
    """Ring on the first n − count variables and images substituting the rest."""
    if not 0 < count < ring.nvars:
        raise ValueError(f"cannot reduce {ring.nvars} variables by {count}")
    keep = ring.nvars - count
    target = PolyRing(ring.names[:keep], ring.field)
    images = target.gens()
    for _ in range(count):
        images.append(target.linear_form(ring.field.random_matrix(rng, keep)))
    return target, images


def artinian_reduction(ideal: Ideal, count: int, rng: np.random.Generator,
                       max_degree: int = 12) -> ArtinianReduction:
    """Section by `count` general hyperplanes together with its Hilbert function."""
    target, images = reduction_map(ideal.ring, count, rng)
    reduced = Ideal(target, [g.substitute(target, images) for g in ideal.generators])
    complex_ = KoszulComplex(reduced)
    values = []
    for d in range(max_degree + 1):
        dim = complex_.hilbert_function(d)
        if dim == 0:
            break
        values.append(dim)
    logger.info("[koszul] Artinian reduction by %d: Hilbert function %s", count, values)
    return ArtinianReduction(reduced, images, values)


def regular_reduction(ideal: Ideal, rng: np.random.Generator,
                      data: Optional[HilbertData] = None) -> Tuple[Ideal, int]:
    """
    Section by the largest number of general hyperplanes that is regular on S/I.

    A general linear form keeps the h-vector and lowers the Krull dimension by
    one exactly when it is a nonzerodivisor, and Koszul Betti numbers do not
    change modulo a regular sequence of linear forms. Returns the reduced
    ideal and the number of forms cut; a count of 0 returns I itself.
    """
    if data is None:
        data = hilbert(ideal)
    ring = ideal.ring
    for count in range(min(data.krull_dim, ring.nvars - 1), 0, -1):
        target, images = reduction_map(ring, count, rng)
        reduced = Ideal(target, [g.substitute(target, images) for g in ideal.generators])
        cut = hilbert(reduced)
        if cut.krull_dim == data.krull_dim - count and cut.h_vector == data.h_vector:
            logger.info("[koszul] %d general hyperplanes are regular, %d variables remain",
                        count, target.nvars)
            return reduced, count
    return ideal, 0


# -- comparison maps ---------------------------------------------------------

def chain_map(source: Resolution, target: Resolution, start: FreeModuleMap,
              length: Optional[int] = None) -> List[FreeModuleMap]:
    """V^0 = start and V^k with target.d_k ∘ V^k = V^{k−1} ∘ source.d_k."""
    if length is None:
        length = min(source.length, target.length)
    maps = [start]
    for k in range(1, length + 1):
        rhs = maps[-1].compose(source.differential(k))
        maps.append(lift_through(target.differential(k), rhs))
    return maps
