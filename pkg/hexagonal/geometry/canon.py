"""
Canonical embedding of a plane model in P^10 and the scrolls of its pencils.

The canonical map is given by the eleven adjoint forms. Its ideal is the kernel
of Sym^2 of the adjoints modulo the plane form, which is generated by 36
quadrics. Each hexagonal pencil sweeps out a rational normal scroll cut by the
2×2 minors of a 2×6 matrix of linear forms. When the residual series K − L is
cut by plane forms the matrix comes from multiplying the pencil with them;
otherwise it is assembled from three fiber spans.
"""
import logging
from dataclasses import dataclass, field
from itertools import combinations
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from ..errors import (
    GenericityError,
    InconsistentSystemError,
    NotInSpanError,
    SpanMatchingError,
    VerificationError,
)
from ..algebra.gb import HilbertData, Ideal, hilbert
from ..algebra.homalg import KoszulComplex, QuotientPiece, koszul_betti_table, regular_reduction
from ..algebra.poly import GradedPoly, PolyRing, coordinates_in_basis
from .plane import PencilSpec, PlaneModel, linear_system

logger = logging.getLogger(__name__)

CANONICAL_VARIABLES = tuple(f"x{i}" for i in range(11))
QUADRIC_COUNT = 36
STRAND_LENGTH = 9  # codimension of the canonical curve in P^10
SPAN_KINDS = frozenset({"cubic-residual"})
LINEAR_KINDS = frozenset({
    "line-through-triple-point",
    "conic-through-four-triples",
    "line-through-node",
    "4-secant",
})


def canonical_ring(prime) -> PolyRing:
    return PolyRing(CANONICAL_VARIABLES, prime)


# -- adjoints and the canonical ideal ----------------------------------------

def adjoint_basis(model: PlaneModel) -> List[GradedPoly]:
    """Forms of degree d−3 with multiplicity m−1 at every assigned m-fold point."""
    conditions = [(spec.point, spec.multiplicity - 1) for spec in model.specs]
    try:
        return linear_system(model.ring, model.degree - 3, conditions, expected=model.genus)
    except GenericityError as err:
        raise GenericityError(f"adjoint series: {err}")


@dataclass
class CanonicalCurve:
    """The canonical model: 11 adjoints and the 36 quadrics they satisfy."""
    model: PlaneModel
    ring: PolyRing
    adjoints: List[GradedPoly]
    quadrics: List[GradedPoly]
    _koszul: Optional[KoszulComplex] = field(default=None, repr=False, compare=False)

    @property
    def ideal(self) -> Ideal:
        return Ideal(self.ring, self.quadrics)

    @property
    def koszul(self) -> KoszulComplex:
        if self._koszul is None:
            self._koszul = KoszulComplex(Ideal(self.ring, self.quadrics))
        return self._koszul

    def hilbert(self) -> HilbertData:
        return hilbert(self.koszul.ideal)

    def linear_form(self, coefficients: Sequence[int]) -> GradedPoly:
        return self.ring.linear_form(coefficients)

    def pullback_coordinates(self, plane_form: GradedPoly) -> Tuple[int, ...]:
        """Coordinates of an adjoint-degree plane form in the adjoint basis."""
        return coordinates_in_basis(plane_form, self.adjoints)

    def to_dict(self) -> Dict[str, object]:
        return {
            "adjoints": [a.to_json() for a in self.adjoints],
            "quadrics": [q.to_json() for q in self.quadrics],
        }

    @classmethod
    def from_dict(cls, model: PlaneModel, data: Dict[str, object]) -> "CanonicalCurve":
        ring = canonical_ring(model.prime)
        return cls(
            model=model,
            ring=ring,
            adjoints=[GradedPoly.from_json(model.ring, a) for a in data["adjoints"]],
            quadrics=[GradedPoly.from_json(ring, q) for q in data["quadrics"]],
        )


def quadric_relations(plane_ring: PolyRing, ring: PolyRing, adjoints: Sequence[GradedPoly],
                      form: GradedPoly) -> np.ndarray:
    """Rows spanning the quadrics Σ c_m m(x) with Σ c_m m(a) ∈ (form), in RREF."""
    field_ = ring.field
    target_degree = 2 * adjoints[0].degree()
    target = plane_ring.basis(target_degree)
    quadric_monos = ring.graded_basis(2)
    columns = []
    for mono in quadric_monos:
        i, j = [v for v, e in enumerate(ring.monomials.unpack(mono)) for _ in range(e)]
        columns.append(target.vector(adjoints[i] * adjoints[j]))
    for mono in plane_ring.graded_basis(target_degree - form.degree()):
        columns.append(target.vector(form.mul_term(mono, 1)))
    kernel = field_.kernel(np.column_stack(columns))
    projected = kernel[:len(quadric_monos)]
    reduced, pivots = field_.rref(projected.T)
    return reduced[:len(pivots)]


def canonical_ideal(model: PlaneModel, adjoints: Optional[Sequence[GradedPoly]] = None,
                    certify_hilbert: bool = False) -> CanonicalCurve:
    """Ideal of the canonical image, as 36 quadrics in RREF over the monomial basis."""
    if adjoints is None:
        adjoints = adjoint_basis(model)
    ring = canonical_ring(model.prime)
    rows = quadric_relations(model.ring, ring, adjoints, model.form)
    if rows.shape[0] != QUADRIC_COUNT:
        raise GenericityError(f"canonical ideal has {rows.shape[0]} quadrics, expected {QUADRIC_COUNT}")
    basis = ring.basis(2)
    quadrics = [basis.polynomial(row) for row in rows]
    curve = CanonicalCurve(model, ring, list(adjoints), quadrics)
    logger.info("[canon] canonical ideal with %d quadrics", len(quadrics))
    if certify_hilbert:
        data = curve.hilbert()
        if (data.projective_dim, data.degree) != (1, 2 * model.genus - 2):
            raise GenericityError(
                f"canonical image has dimension {data.projective_dim} and degree {data.degree}")
    return curve


def quadric_reduction(curve: CanonicalCurve) -> QuotientPiece:
    """Normal-form map (S)_2 → (S/I_C)_2 by standard monomials."""
    return curve.koszul.piece(2)


def reduces_to_zero(curve: CanonicalCurve, f: GradedPoly) -> bool:
    return not curve.koszul.reduce(f).any()


# -- pencils -----------------------------------------------------------------

def residual_system(model: PlaneModel, pencil: PencilSpec) -> List[GradedPoly]:
    """Plane forms cutting K − L: degree (d−3)−e, multiplicity (m−1) minus the pencil's."""
    degree = model.degree - 3 - pencil.degree
    conditions = []
    for spec in model.specs:
        mult = spec.multiplicity - 1 - pencil.base.get(spec.label, 0)
        if mult < 0:
            raise GenericityError(f"pencil {pencil.label} is not cut residually by plane forms")
        conditions.append((spec.point, mult))
    return linear_system(model.ring, degree, conditions, expected=6)


def fiber_space(curve: CanonicalCurve, pencil: PencilSpec, s: int, t: int) -> np.ndarray:
    """11 × 6 basis of the linear forms on P^10 vanishing on the fiber s·f0 + t·f1.

    An adjoint a vanishes on the fiber exactly when a·g ∈ (Γ, member) for a form g
    that lies in the base scheme and misses the fiber; a power of another member
    of the pencil serves as g.
    """
    model = curve.model
    plane = model.ring
    field_ = plane.field
    member = pencil.member(s, t)
    other = pencil.forms[1] if t % plane.p == 0 else pencil.forms[0]
    top = max(spec.multiplicity for spec in model.specs)
    g = other ** top
    degree = curve.adjoints[0].degree() + g.degree()
    target = plane.basis(degree)
    columns = [target.vector(a * g) for a in curve.adjoints]
    for mono in plane.graded_basis(degree - model.degree):
        columns.append(target.vector(model.form.mul_term(mono, 1)))
    for mono in plane.graded_basis(degree - member.degree()):
        columns.append(target.vector(member.mul_term(mono, 1)))
    kernel = field_.kernel(np.column_stack(columns))
    space = field_.column_basis(kernel[:len(curve.adjoints)])
    if space.shape[1] != 6:
        raise GenericityError(f"fiber of {pencil.label} at ({s}:{t}) spans a space of dimension {space.shape[1]}")
    return space


@dataclass
class PencilSections:
    """Defining forms, the residual series and the type I certificate of one pencil."""
    pencil: PencilSpec
    method: str
    residual: List[GradedPoly]  # plane forms, or linear forms on P^10 for the span method
    fibers: Dict[str, np.ndarray]
    twice_residual_dimension: int  # h0(K − 2L)

    @property
    def type_one(self) -> bool:
        return self.twice_residual_dimension == 1


def pencil_sections(curve: CanonicalCurve, pencil: PencilSpec) -> PencilSections:
    field_ = curve.ring.field
    fibers = {
        "0": fiber_space(curve, pencil, 1, 0),
        "inf": fiber_space(curve, pencil, 0, 1),
        "1": fiber_space(curve, pencil, 1, 1),
    }
    twice = field_.intersect(fibers["0"], fibers["inf"]).shape[1]
    if pencil.kind in SPAN_KINDS:
        method = "span"
        residual = [curve.linear_form(fibers["0"][:, j]) for j in range(6)]
    else:
        method = "multiplication"
        residual = residual_system(curve.model, pencil)
    sections = PencilSections(pencil, method, residual, fibers, twice)
    if not sections.type_one:
        raise VerificationError([f"type-I:{pencil.label} (h0(K-2L) = {twice})"])
    return sections


# -- scrolls -----------------------------------------------------------------

@dataclass
class ScrollData:
    """2×6 matrix of linear forms whose minors cut the scroll of a pencil."""
    label: str
    kind: str
    method: str
    matrix: List[List[GradedPoly]]
    _hilbert: Optional[HilbertData] = field(default=None, repr=False, compare=False)

    @property
    def ring(self) -> PolyRing:
        return self.matrix[0][0].ring

    @property
    def minors(self) -> List[GradedPoly]:
        top, bottom = self.matrix
        return [top[m] * bottom[n] - top[n] * bottom[m] for m, n in combinations(range(len(top)), 2)]

    @property
    def ideal(self) -> Ideal:
        return Ideal(self.ring, self.minors)

    def hilbert(self) -> HilbertData:
        if self._hilbert is None:
            self._hilbert = hilbert(self.ideal)
        return self._hilbert

    def matrix_coefficients(self) -> np.ndarray:
        """2 × 6 × 11 array of the entries' coefficients."""
        basis = self.ring.basis(1)
        return np.array([[basis.vector(f) for f in row] for row in self.matrix], dtype=np.int64)

    def to_dict(self) -> Dict[str, object]:
        data = {
            "label": self.label,
            "kind": self.kind,
            "method": self.method,
            "matrix": [[f.to_json() for f in row] for row in self.matrix],
        }
        if self._hilbert is not None:
            data["hilbert"] = self._hilbert.to_dict()
        return data

    @classmethod
    def from_dict(cls, ring: PolyRing, data: Dict[str, object]) -> "ScrollData":
        matrix = [[GradedPoly.from_json(ring, f) for f in row] for row in data["matrix"]]
        return cls(data["label"], data["kind"], data["method"], matrix)


def multiplication_matrix(curve: CanonicalCurve, sections: PencilSections) -> List[List[GradedPoly]]:
    """Entry (ε, m) is the linear form whose pullback is f_ε · r_m."""
    rows = []
    for form in sections.pencil.forms:
        row = []
        for r in sections.residual:
            try:
                coords = curve.pullback_coordinates(form * r)
            except NotInSpanError:
                raise GenericityError(f"pencil {sections.pencil.label}: product leaves the adjoint series")
            row.append(curve.linear_form(coords))
        rows.append(row)
    return rows


def span_matrix(curve: CanonicalCurve, sections: PencilSections) -> List[List[GradedPoly]]:
    """Rows from the fibers over 0 and ∞ matched through the fiber over 1.

    With u_m = u0_m − u∞_m a basis of U_1 and w spanning U_0 ∩ U_∞, the columns
    (u0_m + c_m w, u∞_m + c_m w) have minors Q_mn + c_n·w·u_m − c_m·w·u_n, which
    are linear in c; c is fixed by requiring every minor to vanish on the curve.
    """
    field_ = curve.ring.field
    p = field_.p
    label = sections.pencil.label
    u0, uinf, u1 = sections.fibers["0"], sections.fibers["inf"], sections.fibers["1"]
    w = field_.intersect(u0, uinf)[:, 0]
    split = field_.solve(np.hstack([u0, (-uinf) % p]), u1)
    first = field_.matmul(u0, split[:6])
    second = field_.matmul(uinf, split[6:])
    lin = curve.linear_form
    w_form = lin(w)
    a = [lin(first[:, m]) for m in range(6)]
    b = [lin(second[:, m]) for m in range(6)]
    u = [lin(u1[:, m]) for m in range(6)]
    reduce = curve.koszul.reduce
    w_u = [reduce(w_form * f) for f in u]
    blocks, rhs = [], []
    for m, n in combinations(range(6), 2):
        block = np.zeros((w_u[0].shape[0], 6), dtype=np.int64)
        block[:, n] = w_u[m]
        block[:, m] = (-w_u[n]) % p
        blocks.append(block)
        rhs.append((-reduce(a[m] * b[n] - a[n] * b[m])) % p)
    system = np.vstack(blocks)
    ambiguity = system.shape[1] - field_.rank(system)
    if ambiguity:
        raise SpanMatchingError(label, ambiguity)
    try:
        c = field_.solve(system, np.concatenate(rhs))
    except InconsistentSystemError:
        raise SpanMatchingError(label, None)
    top = [a[m] + w_form.scale(int(c[m])) for m in range(6)]
    bottom = [b[m] + w_form.scale(int(c[m])) for m in range(6)]
    return [top, bottom]


def scroll(curve: CanonicalCurve, pencil: PencilSpec, certify_hilbert: bool = False) -> ScrollData:
    """Scroll matrix of a pencil, certified to lie on the curve."""
    sections = pencil_sections(curve, pencil)
    if sections.method == "span":
        matrix = span_matrix(curve, sections)
    else:
        matrix = multiplication_matrix(curve, sections)
    data = ScrollData(pencil.label, pencil.kind, sections.method, matrix)
    failed = [f"minor:{pencil.label}:{i}" for i, q in enumerate(data.minors) if not reduces_to_zero(curve, q)]
    if failed:
        raise VerificationError(failed)
    if certify_hilbert:
        h = data.hilbert()
        if (h.projective_dim, h.degree) != (5, 6):
            raise VerificationError([f"scroll:{pencil.label} has dimension {h.projective_dim}, degree {h.degree}"])
    logger.info("[canon] scroll of %s by the %s method", pencil.label, sections.method)
    return data


# -- syzygy schemes ----------------------------------------------------------

@dataclass
class SyzygySchemeReport:
    """Numerical data of the intersection of the scrolls of chosen pencils."""
    labels: List[str]
    a: int
    b: int
    projective_dim: int
    degree: int
    genus: Optional[int]
    betti: Dict[str, int] = field(default_factory=dict)

    def to_dict(self) -> Dict[str, object]:
        return {
            "labels": list(self.labels),
            "a": self.a,
            "b": self.b,
            "projective_dim": self.projective_dim,
            "degree": self.degree,
            "genus": self.genus,
            "betti": dict(self.betti),
        }

    @classmethod
    def from_dict(cls, data: Dict[str, object]) -> "SyzygySchemeReport":
        return cls(
            labels=list(data["labels"]),
            a=int(data["a"]),
            b=int(data["b"]),
            projective_dim=int(data["projective_dim"]),
            degree=int(data["degree"]),
            genus=None if data.get("genus") is None else int(data["genus"]),
            betti={k: int(v) for k, v in data.get("betti", {}).items()},
        )

    def to_row(self) -> List[str]:
        order = sorted(self.betti, key=lambda key: tuple(int(x) for x in key.split(",")))
        betti = " ".join(str(self.betti[key]) for key in order)
        genus = "" if self.genus is None else str(self.genus)
        return [str(self.a), str(self.b), str(self.projective_dim), str(self.degree), genus, betti]


def pencil_counts(scrolls: Sequence[ScrollData]) -> Tuple[int, int]:
    """(a, b): pencils cut by lines or conics, and cubic-residual pencils."""
    a = sum(1 for s in scrolls if s.kind in LINEAR_KINDS)
    b = sum(1 for s in scrolls if s.kind in SPAN_KINDS)
    return a, b


def strand_positions(length: int) -> List[Tuple[int, int]]:
    """(i, i+1) and (i, i+2) for 1 ≤ i ≤ length: the linear strand and the row after it."""
    return [(i, i + row) for i in range(1, length + 1) for row in (1, 2)]


def syzygy_scheme(curve: CanonicalCurve, scrolls: Sequence[ScrollData], strand_length: int = STRAND_LENGTH,
                  rng: Optional[np.random.Generator] = None) -> SyzygySchemeReport:
    """
    Dimension, degree, genus and Betti table of ⋂ X_i.

    The Betti numbers are read off the Koszul complex after cutting by as many
    general hyperplanes as are regular on the scheme, so they are exact.
    """
    if len(scrolls) < 2:
        raise ValueError("a syzygy scheme needs at least two scrolls")
    if not 1 <= strand_length <= curve.ring.nvars - 2:
        raise ValueError(f"strand length must lie in 1..{curve.ring.nvars - 2}, got {strand_length}")
    gens = [q for s in scrolls for q in s.minors]
    ideal = Ideal(curve.ring, gens)
    data = hilbert(ideal)
    genus = data.genus() if data.krull_dim == 2 else None
    reduced, _ = regular_reduction(ideal, rng or np.random.default_rng(), data)
    table = koszul_betti_table(reduced, strand_positions(strand_length))
    betti = {f"{i},{j}": table[(i, j)] for i, j in strand_positions(strand_length)}
    a, b = pencil_counts(scrolls)
    logger.info("[canon] syzygy scheme of %s: dim %d, degree %d", [s.label for s in scrolls],
                data.projective_dim, data.degree)
    return SyzygySchemeReport([s.label for s in scrolls], a, b, data.projective_dim, data.degree, genus, betti)
