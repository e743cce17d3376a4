"""
First-order deformations of the plane models and of their canonical curves.

The equisingular tangent space is the kernel of the linearized singularity
conditions in the form coefficients and the free point coordinates. On the
canonical side, embedded first-order deformations are 36-tuples in (S/I_C)_2
killed by the 160 linear syzygies; modulo the coordinate changes of P^10 they
leave 30 parameters b_0..b_29. Carrying these through the Koszul strand of an
Artinian reduction yields the 5k × 5k matrix M whose determinant splits into
fifth powers of one linear form per pencil.
"""
import logging
from dataclasses import dataclass, field
from typing import Dict, Iterator, List, Optional, Sequence, Tuple

import numpy as np

from ..config.models import get_model_definition
from ..errors import (
    GenericityError,
    InconsistentSystemError,
    VerificationError,
)
from ..algebra.ffla import PrimeField
from ..algebra.gb import FreeModuleMap, Ideal, exact_divide, lift_through, row_map, syzygies
from ..algebra.homalg import ArtinianReduction, KoszulComplex, artinian_reduction
from ..algebra.poly import CoefficientMode, GradedPoly, PolyRing
from .canon import CanonicalCurve, ScrollData
from .plane import (
    PlaneModel,
    derivative_row,
    form_motion,
    ninth_point_derivative,
    partial_orders,
    plane_vector_fields,
    point_motion,
)

logger = logging.getLogger(__name__)

LINEAR_SYZYGY_COUNT = 160
NORMAL_DIMENSION = 150
TRIVIAL_DIMENSION = 120
PARAMETER_COUNT = 30
AUTOMORPHISM_DIMENSION = 8


def parameter_ring(prime, count: int = PARAMETER_COUNT) -> PolyRing:
    return PolyRing([f"b{t}" for t in range(count)], prime)


# -- equisingular tangent space ---------------------------------------------

@dataclass
class SeveriTangentReport:
    """Linearized singularity conditions on (form coefficients, free points)."""
    k: int
    m: Optional[int]
    degree: int
    coefficient_unknowns: int
    point_labels: List[str]
    conditions: int
    rank: int
    expected: Optional[int] = None
    kernel: np.ndarray = field(default=None, repr=False, compare=False)

    @property
    def unknowns(self) -> int:
        return self.coefficient_unknowns + 2 * len(self.point_labels)

    @property
    def kernel_dimension(self) -> int:
        return self.unknowns - self.rank

    @property
    def passed(self) -> bool:
        return self.expected is None or self.kernel_dimension == self.expected

    def to_dict(self) -> Dict[str, object]:
        return {
            "k": self.k,
            "m": self.m,
            "degree": self.degree,
            "unknowns": self.unknowns,
            "conditions": self.conditions,
            "rank": self.rank,
            "kernel_dimension": self.kernel_dimension,
            "expected": self.expected,
        }


def point_motion_maps(model: PlaneModel) -> Dict[str, np.ndarray]:
    """For every labelled point, the 2 × 2n map from free-point motion to its chart motion."""
    free = model.free_labels
    width = 2 * len(free)
    maps: Dict[str, np.ndarray] = {}
    for i, label in enumerate(free):
        block = np.zeros((2, width), dtype=np.int64)
        block[0, 2 * i] = 1
        block[1, 2 * i + 1] = 1
        maps[label] = block
    for label, parents in model.ninth_points.items():
        derivative = ninth_point_derivative(model.ring, [model.points[q] for q in parents], model.points[label])
        maps[label] = model.ring.field.matmul(derivative, np.vstack([maps[q] for q in parents]))
    return maps


def assigned_conditions(model: PlaneModel) -> List[Tuple[str, int]]:
    return [(s.label, s.multiplicity) for s in model.specs] + [(label, 1) for label in model.simple_points]


def _normalized_index(model: PlaneModel) -> int:
    """Position of x^d, whose coefficient is normalized to 1."""
    lead = model.ring.monomials.pack((model.degree, 0, 0))
    return model.ring.graded_basis(model.degree).index(lead)


def severi_tangent(model: PlaneModel) -> SeveriTangentReport:
    """Kernel of the linearized conditions: multiplicity at each point, incidence at simple points."""
    ring = model.ring
    field_ = ring.field
    p = ring.p
    d = model.degree
    skip = _normalized_index(model)
    keep = [i for i in range(len(ring.graded_basis(d))) if i != skip]
    motions = point_motion_maps(model)
    rows = []
    for label, mult in assigned_conditions(model):
        point = model.points[label]
        for orders in partial_orders(mult - 1):
            grad = model.form.derivative(orders).gradient_at(point)
            local = np.array([grad[c] for c in point.free_coordinates], dtype=np.int64)
            rows.append(np.concatenate([derivative_row(ring, point, orders, d)[keep],
                                        field_.matmul(local.reshape(1, 2), motions[label])[0]]))
    matrix = np.array(rows, dtype=np.int64) % p
    kernel = field_.kernel(matrix)
    definition = get_model_definition(model.k)
    report = SeveriTangentReport(
        k=model.k,
        m=definition.ninth_points if definition.degree == 9 and definition.triple_points == 4 else None,
        degree=d,
        coefficient_unknowns=len(keep),
        point_labels=list(model.free_labels),
        conditions=matrix.shape[0],
        rank=matrix.shape[1] - kernel.shape[1],
        expected=definition.severi_dimension,
        kernel=kernel,
    )
    logger.info("[deform] Severi tangent: %d unknowns, rank %d, kernel %d",
                report.unknowns, report.rank, report.kernel_dimension)
    return report


def tangent_motion(model: PlaneModel, report: SeveriTangentReport,
                   vector: np.ndarray) -> Tuple[GradedPoly, Dict[str, np.ndarray]]:
    """δF and the chart motion of every labelled point for a Severi tangent vector."""
    ring = model.ring
    n = report.coefficient_unknowns
    coeffs = np.insert(np.asarray(vector[:n], dtype=np.int64), _normalized_index(model), 0)
    delta_form = ring.basis(model.degree).polynomial(coeffs)
    free = np.asarray(vector[n:], dtype=np.int64)
    motions = point_motion_maps(model)
    deltas = {label: ring.field.matmul(motion, free) for label, motion in motions.items()}
    return delta_form, deltas


def automorphism_motion(model: PlaneModel, e: np.ndarray) -> Tuple[GradedPoly, Dict[str, np.ndarray]]:
    p = model.ring.p
    deltas = {label: np.array(point_motion(pt, e, p), dtype=np.int64) for label, pt in model.points.items()}
    return form_motion(model.form, e), deltas


def automorphism_tangents(model: PlaneModel, report: SeveriTangentReport) -> np.ndarray:
    """The plane vector fields in Severi coordinates, with the x^d coefficient rescaled away."""
    ring = model.ring
    p = ring.p
    basis = ring.basis(model.degree)
    skip = _normalized_index(model)
    columns = []
    for e in plane_vector_fields(ring):
        delta_form, deltas = automorphism_motion(model, e)
        vec = basis.vector(delta_form)
        vec = (vec - vec[skip] * basis.vector(model.form)) % p
        motion = np.concatenate([deltas[label] for label in report.point_labels])
        columns.append(np.concatenate([np.delete(vec, skip), motion]) % p)
    return np.column_stack(columns)


# -- normal space ------------------------------------------------------------

def linear_syzygies(curve: CanonicalCurve) -> FreeModuleMap:
    """The 36 × 160 matrix of linear syzygies among the quadrics."""
    syz = syzygies(row_map(curve.ring, curve.quadrics), max_degree=3, min_degree=3)
    if syz.cols != LINEAR_SYZYGY_COUNT:
        raise GenericityError(f"{syz.cols} linear syzygies, expected {LINEAR_SYZYGY_COUNT}")
    return syz


def section_vector(curve: CanonicalCurve, polys: Sequence[GradedPoly]) -> np.ndarray:
    """Concatenated (S/I_C)_2 coordinates of a 36-tuple of quadrics."""
    width = curve.koszul.piece(2).dimension
    parts = [curve.koszul.reduce(f) if f else np.zeros(width, dtype=np.int64) for f in polys]
    return np.concatenate(parts)


def _syzygy_blocks(curve: CanonicalCurve, syz: FreeModuleMap, chunk: int = 16) -> Iterator[np.ndarray]:
    """Rows of h ↦ Σ_g h_g·r_g in (S/I_C)_3, a chunk of syzygies at a time."""
    field_ = curve.ring.field
    linear = curve.ring.basis(1)
    coeffs = np.array([[linear.vector(syz.entries[g][j]) if syz.entries[g][j] else np.zeros(11, dtype=np.int64)
                        for g in range(syz.rows)] for j in range(syz.cols)], dtype=np.int64)
    mult = np.stack(curve.koszul.multiplication(2))  # variable × A_3 × A_2
    for start in range(0, syz.cols, chunk):
        block = field_.matmul(coeffs[start:start + chunk], mult.reshape(mult.shape[0], -1))
        block = block.reshape(block.shape[:2] + mult.shape[1:]).transpose(0, 2, 1, 3)
        yield block.reshape(-1, syz.rows * mult.shape[2])


@dataclass
class KodairaSpencerData:
    """Normal-space sections, their trivial part and a complement T of dimension 30."""
    curve: CanonicalCurve = field(repr=False)
    syzygies: FreeModuleMap = field(repr=False)
    normal: np.ndarray = field(repr=False)
    trivial: np.ndarray = field(repr=False)
    complement: np.ndarray = field(repr=False)

    @property
    def normal_dimension(self) -> int:
        return self.normal.shape[1]

    @property
    def trivial_dimension(self) -> int:
        return self.trivial.shape[1]

    @property
    def parameters(self) -> int:
        return self.complement.shape[1]

    def deformation_forms(self) -> List[List[GradedPoly]]:
        """T as 30 tuples of 36 quadrics in standard monomials."""
        piece = self.curve.koszul.piece(2)
        ring = self.curve.ring
        width = piece.dimension
        out = []
        for t in range(self.parameters):
            column = self.complement[:, t]
            tuple_ = []
            for g in range(len(self.curve.quadrics)):
                coords = column[g * width:(g + 1) * width]
                tuple_.append(GradedPoly(ring, {piece.standard[s]: int(coords[s]) for s in np.flatnonzero(coords)}))
            out.append(tuple_)
        return out

    def contains(self, vectors: np.ndarray) -> bool:
        return self.curve.ring.field.in_span(self.normal, vectors)

    def quotient_coordinates(self, vectors: np.ndarray) -> np.ndarray:
        """Coordinates along T of sections taken modulo the trivial part."""
        coords = self.curve.ring.field.solve(np.hstack([self.trivial, self.complement]), vectors)
        return coords[self.trivial_dimension:]

    def to_dict(self) -> Dict[str, object]:
        return {
            "normal_dimension": self.normal_dimension,
            "trivial_dimension": self.trivial_dimension,
            "parameters": self.parameters,
            "linear_syzygies": self.syzygies.cols,
        }


def trivial_deformations(curve: CanonicalCurve) -> np.ndarray:
    """Sections x_k·∂f/∂x_j from the substitutions x_j ↦ x_j + ε·x_k (121 columns)."""
    ring = curve.ring
    columns = []
    for j in range(ring.nvars):
        partials = [f.partial_derivative(j) for f in curve.quadrics]
        for k in range(ring.nvars):
            columns.append(section_vector(curve, [ring.gen(k) * g for g in partials]))
    return np.column_stack(columns)


def normal_space(curve: CanonicalCurve) -> KodairaSpencerData:
    """H^0 of the normal sheaf in degree 0, split as trivial ⊕ T."""
    field_ = curve.ring.field
    syz = linear_syzygies(curve)
    width = curve.koszul.piece(2).dimension
    normal = field_.incremental_kernel(_syzygy_blocks(curve, syz), len(curve.quadrics) * width)
    logger.info("[deform] normal space of dimension %d", normal.shape[1])
    trivial = field_.column_basis(trivial_deformations(curve))
    if normal.shape[1] != NORMAL_DIMENSION:
        raise GenericityError(f"normal space has dimension {normal.shape[1]}, expected {NORMAL_DIMENSION}")
    if trivial.shape[1] != TRIVIAL_DIMENSION:
        raise GenericityError(f"coordinate changes span {trivial.shape[1]}, expected {TRIVIAL_DIMENSION}")
    if not field_.in_span(normal, trivial):
        raise VerificationError(["trivial deformations outside the normal space"])
    complement, _ = field_.extend_basis(trivial, normal)
    return KodairaSpencerData(curve, syz, normal, trivial, complement)


# -- differential of the construction -----------------------------------------

class FirstOrderPipeline:
    """Pushes first-order motions of (form, points) to normal-space sections.

    Adjoints follow the moving points; quadrics q_g follow from
    (q + ε·δq)(a + ε·δa) = (A_g + ε·δA_g)(F + ε·δF) with q_g(a) = A_g·F.
    """

    def __init__(self, model: PlaneModel, curve: CanonicalCurve, ks: KodairaSpencerData):
        self.model = model
        self.curve = curve
        self.ks = ks
        ring = model.ring
        self.field = ring.field
        adeg = curve.adjoints[0].degree()
        self.adjoint_degree = adeg
        self.target = ring.basis(2 * adeg)
        self.pairs = [tuple(v for v, e in enumerate(curve.ring.monomials.unpack(m)) for _ in range(e))
                      for m in curve.ring.graded_basis(2)]
        products = np.column_stack([self.target.vector(curve.adjoints[i] * curve.adjoints[j])
                                    for i, j in self.pairs])
        multiples = [model.form.mul_term(m, 1) for m in ring.graded_basis(2 * adeg - model.degree)]
        self.system = np.hstack([products, self.target.matrix(multiples)]) if multiples else products
        self.quadric_matrix = curve.ring.basis(2).matrix(curve.quadrics)
        self.cofactors = [exact_divide(q.substitute(ring, curve.adjoints), model.form) for q in curve.quadrics]
        self.conditions = []  # (label, point, orders)
        for spec in model.specs:
            for orders in partial_orders(spec.multiplicity - 2):
                self.conditions.append((spec.label, spec.point, orders))
        self.condition_rows = np.array([derivative_row(ring, pt, orders, adeg)
                                        for _, pt, orders in self.conditions], dtype=np.int64)
        self.gradients = [np.array([a.derivative(orders).gradient_at(pt) for a in curve.adjoints], dtype=np.int64)
                          for _, pt, orders in self.conditions]

    def adjoint_motion(self, deltas: Dict[str, np.ndarray]) -> List[GradedPoly]:
        p = self.field.p
        rhs = []
        for (label, point, _), grad in zip(self.conditions, self.gradients):
            a, b = point.free_coordinates
            rhs.append((-(grad[:, a] * deltas[label][0] + grad[:, b] * deltas[label][1])) % p)
        try:
            motion = self.field.solve(self.condition_rows, np.array(rhs, dtype=np.int64))
        except InconsistentSystemError:
            raise GenericityError("adjoint conditions are dependent along the motion")
        return self.model.ring.basis(self.adjoint_degree).polynomials(motion)

    def section(self, delta_form: GradedPoly, deltas: Dict[str, np.ndarray]) -> np.ndarray:
        p = self.field.p
        adjoints = self.curve.adjoints
        moved = self.adjoint_motion(deltas)
        first = np.column_stack([self.target.vector(moved[i] * adjoints[j] + adjoints[i] * moved[j])
                                 for i, j in self.pairs])
        rhs = np.column_stack([self.target.vector(c * delta_form) for c in self.cofactors])
        rhs = (rhs - self.field.matmul(first, self.quadric_matrix)) % p
        try:
            solution = self.field.solve(self.system, rhs)
        except InconsistentSystemError:
            raise VerificationError(["first-order quadrics: motion is not equisingular"])
        delta_q = solution[:len(self.pairs)]
        h = self.field.matmul(self.curve.koszul.piece(2).normal_form, delta_q)
        return h.T.reshape(-1)

    def kodaira_spencer(self, delta_form: GradedPoly, deltas: Dict[str, np.ndarray]) -> np.ndarray:
        h = self.section(delta_form, deltas)
        if not self.ks.contains(h):
            raise VerificationError(["first-order section outside the normal space"])
        return self.ks.quotient_coordinates(h)


@dataclass
class DifferentialRankReport:
    tangent_dimension: int
    rank: int
    expected_rank: Optional[int]
    automorphisms_trivial: bool
    automorphisms_span_kernel: bool

    @property
    def kernel_dimension(self) -> int:
        return self.tangent_dimension - self.rank

    @property
    def passed(self) -> bool:
        return (self.automorphisms_trivial and self.automorphisms_span_kernel
                and self.kernel_dimension == AUTOMORPHISM_DIMENSION
                and (self.expected_rank is None or self.rank == self.expected_rank))

    def to_dict(self) -> Dict[str, object]:
        return {
            "tangent_dimension": self.tangent_dimension,
            "rank": self.rank,
            "kernel_dimension": self.kernel_dimension,
            "expected_rank": self.expected_rank,
            "automorphisms_trivial": self.automorphisms_trivial,
            "automorphisms_span_kernel": self.automorphisms_span_kernel,
        }


def differential_rank(model: PlaneModel, curve: CanonicalCurve, ks: KodairaSpencerData,
                      severi: Optional[SeveriTangentReport] = None) -> DifferentialRankReport:
    """Rank of the map from the equisingular tangent space to H^1(T_C)."""
    if severi is None:
        severi = severi_tangent(model)
    field_ = model.ring.field
    pipeline = FirstOrderPipeline(model, curve, ks)
    images = []
    for j in range(severi.kernel.shape[1]):
        delta_form, deltas = tangent_motion(model, severi, severi.kernel[:, j])
        images.append(pipeline.kodaira_spencer(delta_form, deltas))
    image = np.column_stack(images)
    rank = field_.rank(image)
    trivial = True
    for e in plane_vector_fields(model.ring):
        if pipeline.kodaira_spencer(*automorphism_motion(model, e)).any():
            trivial = False
    fields = automorphism_tangents(model, severi)
    kernel = field_.matmul(severi.kernel, field_.kernel(image))
    spans = (field_.rank(fields) == AUTOMORPHISM_DIMENSION
             and field_.rank(np.hstack([kernel, fields])) == kernel.shape[1] == AUTOMORPHISM_DIMENSION)
    expected = None
    if severi.expected is not None:
        expected = severi.expected - AUTOMORPHISM_DIMENSION
    logger.info("[deform] differential rank %d of %d", rank, severi.kernel_dimension)
    return DifferentialRankReport(severi.kernel_dimension, rank, expected, trivial, spans)


# -- the deformed resolution and M -------------------------------------------

@dataclass
class DeformedResolution:
    """First-order lift of the linear syzygies and the matrix M = Σ b_t·M_t."""
    curve: CanonicalCurve = field(repr=False)
    syzygies: FreeModuleMap = field(repr=False)
    first_order: List[FreeModuleMap] = field(repr=False)
    reduction: ArtinianReduction = field(repr=False)
    koszul: KoszulComplex = field(repr=False)
    cycles: np.ndarray = field(repr=False)  # basis of K_{5,1} in ∧^5 V'⊗B_1
    targets: np.ndarray = field(repr=False)  # basis of K_{4,2} in ∧^4 V'⊗B_2
    M: np.ndarray = field(repr=False)  # 5k × 5k × 30

    @property
    def size(self) -> int:
        return self.M.shape[0]

    @property
    def k(self) -> int:
        return self.size // 5

    def evaluate(self, b: Sequence[int]) -> np.ndarray:
        p = self.curve.ring.p
        return self.curve.ring.field.matmul(self.M, np.asarray(b, dtype=np.int64) % p)

    def entry(self, i: int, j: int) -> GradedPoly:
        return parameter_ring(self.curve.ring.field, self.M.shape[2]).linear_form(self.M[i, j])

    def to_dict(self) -> Dict[str, object]:
        return {
            "size": self.size,
            "parameters": int(self.M.shape[2]),
            "M": self.M.tolist(),
        }


def _first_order_syzygies(curve: CanonicalCurve, syz: FreeModuleMap,
                          forms: Sequence[Sequence[GradedPoly]]) -> List[FreeModuleMap]:
    """φ_1^(t) with f·φ_1^(t) = −T_t·φ_1."""
    ring = curve.ring
    f = row_map(ring, curve.quadrics)
    lifted = []
    for tuple_ in forms:
        row = []
        for j in range(syz.cols):
            acc = ring.zero()
            for g, t in enumerate(tuple_):
                if t and syz.entries[g][j]:
                    acc = acc + t * syz.entries[g][j]
            row.append(-acc)
        rhs = FreeModuleMap(ring, (0,), syz.source_degrees, [row])
        lifted.append(lift_through(f, rhs))
    return lifted


def certify_first_order(curve: CanonicalCurve, syz: FreeModuleMap, forms: Sequence[Sequence[GradedPoly]],
                        lifted: Sequence[FreeModuleMap]) -> bool:
    """(f + Σ b_t T_t)(φ_1 + Σ b_t φ_1^(t)) ≡ 0 mod (b)^2, in square-zero arithmetic."""
    ring = curve.ring.with_mode(CoefficientMode.SQUARE_ZERO, len(forms))
    row = [ring.perturb(q, [tuple_[g] for tuple_ in forms]) for g, q in enumerate(curve.quadrics)]
    f = FreeModuleMap(ring, (0,), tuple(2 for _ in row), [row])
    entries = [[ring.perturb(syz.entries[g][j], [phi.entries[g][j] for phi in lifted])
                for j in range(syz.cols)] for g in range(syz.rows)]
    phi = FreeModuleMap(ring, syz.target_degrees, syz.source_degrees, entries)
    return f.compose(phi).is_zero()


def _reduce(polys: Sequence[GradedPoly], reduction: ArtinianReduction) -> List[GradedPoly]:
    target = reduction.ideal.ring
    return [f.substitute(target, reduction.images) for f in polys]


def quotient_deformation(reduction: ArtinianReduction, koszul: KoszulComplex, quadrics: Sequence[GradedPoly],
                         forms: Sequence[Sequence[GradedPoly]]) -> List[np.ndarray]:
    """Maps D_t: S'_2 → B_2 with NF_b(m) = NF(m) + Σ_t b_t·D_t(m).

    Each monomial is NF(m) plus a combination of the reduced quadrics; in the
    deformed ring each quadric f_g is replaced by −Σ_t b_t T_{t,g}.
    """
    ring = reduction.ideal.ring
    field_ = ring.field
    p = field_.p
    basis = ring.basis(2)
    piece = koszul.piece(2)
    lift = np.zeros((len(basis), piece.dimension), dtype=np.int64)
    for s, m in enumerate(piece.standard):
        lift[piece.index[m], s] = 1
    residual = (field_.identity(len(basis)) - field_.matmul(lift, piece.normal_form)) % p
    cofactors = field_.solve(basis.matrix(_reduce(quadrics, reduction)), residual)
    maps = []
    for tuple_ in forms:
        images = field_.matmul(piece.normal_form, basis.matrix(_reduce(tuple_, reduction)))
        maps.append((-field_.matmul(images, cofactors)) % p)
    return maps


def slice_products(field_: PrimeField, matrix: np.ndarray, stacked: np.ndarray) -> np.ndarray:
    """matrix · stacked[w] for every w, reduced mod p."""
    wedges, inner, cols = stacked.shape
    flat = field_.matmul(matrix, stacked.transpose(1, 0, 2).reshape(inner, wedges * cols))
    return flat.reshape(matrix.shape[0], wedges, cols).transpose(1, 0, 2)


def extract_M(curve: CanonicalCurve, forms: Sequence[Sequence[GradedPoly]], reduction: ArtinianReduction
              ) -> Tuple[KoszulComplex, np.ndarray, np.ndarray, np.ndarray]:
    """M_t: K_{5,1} → K_{4,2}, z ↦ [D_t(∂z)] with ∂ the Koszul differential over S'."""
    ring = reduction.ideal.ring
    field_ = ring.field
    koszul = KoszulComplex(reduction.ideal)
    cycles = koszul.homology_basis(5, 1)
    targets = koszul.homology_basis(4, 2)
    if cycles.shape[1] != targets.shape[1] or cycles.shape[1] % 5:
        raise GenericityError(f"K_(5,1) and K_(4,2) have dimensions {cycles.shape[1]}, {targets.shape[1]}")
    free = KoszulComplex(Ideal(ring, []))
    image = field_.matmul(free.differential(5, 1), cycles)
    wedges = image.shape[0] // len(ring.basis(2))
    image = image.reshape(wedges, len(ring.basis(2)), cycles.shape[1])
    piece = koszul.piece(2)
    if slice_products(field_, piece.normal_form, image).any():
        raise VerificationError(["K_(5,1) representatives are not cycles"])
    maps = quotient_deformation(reduction, koszul, curve.quadrics, forms)
    blocks = []
    for t, d_t in enumerate(maps):
        moved = slice_products(field_, d_t, image).reshape(-1, cycles.shape[1])
        try:
            blocks.append(koszul.homology_coordinates(4, 2, moved, basis=targets))
        except InconsistentSystemError:
            raise VerificationError([f"deformed differential of parameter b{t} is not a cycle"])
    logger.info("[deform] M of size %d extracted from the Koszul strand", cycles.shape[1])
    return koszul, cycles, targets, np.stack(blocks, axis=2)


def lift_resolution(curve: CanonicalCurve, ks: KodairaSpencerData, rng: np.random.Generator,
                    reduction_count: int = 2, certify: bool = True) -> DeformedResolution:
    """Lift φ_1 to first order along T and extract M."""
    forms = ks.deformation_forms()
    lifted = _first_order_syzygies(curve, ks.syzygies, forms)
    if certify and not certify_first_order(curve, ks.syzygies, forms, lifted):
        raise VerificationError(["perturbed composite f·φ_1 is not zero mod (b)^2"])
    reduction = artinian_reduction(curve.ideal, reduction_count, rng)
    if sum(reduction.hilbert_function) != 2 * curve.model.genus - 2:
        raise GenericityError(f"Artinian reduction has length {sum(reduction.hilbert_function)}")
    koszul, cycles, targets, M = extract_M(curve, forms, reduction)
    return DeformedResolution(curve, ks.syzygies, lifted, reduction, koszul, cycles, targets, M)


# -- factorization of det M --------------------------------------------------

def scroll_cycles(deformed: DeformedResolution, scroll: ScrollData) -> np.ndarray:
    """V_i: image of K_{5,1} of the scroll in K_{5,1} of the curve (5k × 5)."""
    field_ = deformed.curve.ring.field
    ideal = Ideal(deformed.reduction.ideal.ring, _reduce(scroll.minors, deformed.reduction))
    cycles = KoszulComplex(ideal).cycles(5, 1)
    coords = deformed.koszul.homology_coordinates(5, 1, cycles, basis=deformed.cycles)
    space = field_.column_basis(coords)
    if space.shape[1] != 5:
        raise VerificationError([f"scroll {scroll.label} contributes {space.shape[1]} classes, expected 5"])
    return space


@dataclass
class FactorizationReport:
    k: int
    labels: List[str]
    forms: List[List[int]]
    span_dimension: int
    expected_span: int
    w_ranks: List[int] = field(default_factory=list)
    wbar_ranks: List[int] = field(default_factory=list)
    block_diagonal: Optional[bool] = None
    determinant_certified: Optional[bool] = None
    unit: Optional[int] = None

    @property
    def complete(self) -> bool:
        return self.block_diagonal is not None

    @property
    def passed(self) -> bool:
        if self.span_dimension != self.expected_span:
            return False
        if not self.complete:
            return True
        return (self.block_diagonal and bool(self.determinant_certified)
                and all(r == 5 * (self.k - 1) for r in self.w_ranks)
                and all(r == 5 for r in self.wbar_ranks))

    def to_dict(self, prime: Optional[int] = None) -> Dict[str, object]:
        data = {
            "k": self.k,
            "labels": list(self.labels),
            "forms": [list(map(int, l)) for l in self.forms],
            "span_dimension": self.span_dimension,
            "expected_span": self.expected_span,
            "w_ranks": list(self.w_ranks),
            "wbar_ranks": list(self.wbar_ranks),
            "block_diagonal": self.block_diagonal,
            "determinant_certified": self.determinant_certified,
            "unit": self.unit,
        }
        if prime is not None:
            ring = parameter_ring(prime, len(self.forms[0]) if self.forms else PARAMETER_COUNT)
            data["form_texts"] = [ring.linear_form(l).to_text() for l in self.forms]
        return data


def branch_form(deformed: DeformedResolution, V: np.ndarray, label: str) -> Tuple[np.ndarray, np.ndarray]:
    """(l, C) with M·V = l·C, l normalized to leading coefficient 1."""
    field_ = deformed.curve.ring.field
    p = field_.p
    slices = [field_.matmul(deformed.M[:, :, t], V) for t in range(deformed.M.shape[2])]
    reference = next((s for s in slices if s.any()), None)
    if reference is None:
        raise VerificationError([f"block:{label} vanishes identically"])
    pos = tuple(np.argwhere(reference)[0])
    inv = field_.inv(int(reference[pos]))
    form = np.array([int(s[pos]) * inv % p for s in slices], dtype=np.int64)
    for c, s in zip(form, slices):
        if not np.array_equal(s, (int(c) * reference) % p):
            raise VerificationError([f"block:{label} is not a constant times a linear form"])
    lead = int(form[np.flatnonzero(form)[0]])
    return form * field_.inv(lead) % p, reference * lead % p


def factor_M(deformed: DeformedResolution, scrolls: Sequence[ScrollData], rng: np.random.Generator,
             expected_span: Optional[int] = None, checks: int = 3) -> FactorizationReport:
    """Linear forms l_i from the scroll blocks; full block factorization when the scrolls cover K_{5,1}."""
    field_ = deformed.curve.ring.field
    p = field_.p
    labels = [s.label for s in scrolls]
    spaces = [scroll_cycles(deformed, s) for s in scrolls]
    pairs = [branch_form(deformed, V, s.label) for V, s in zip(spaces, scrolls)]
    forms = [l for l, _ in pairs]
    span = field_.rank(np.array(forms, dtype=np.int64))
    if expected_span is None:
        expected_span = get_model_definition(deformed.curve.model.k).expected_form_span
    report = FactorizationReport(deformed.k, labels, [l.tolist() for l in forms], span, expected_span)
    size = deformed.size
    whole = np.hstack(spaces)
    if whole.shape[1] != size or field_.rank(whole) != size:
        logger.info("[deform] scrolls span %d of %d classes; block factorization skipped",
                    field_.rank(whole), size)
        return report
    params = deformed.M.shape[2]
    W = []
    for V in spaces:
        stacked = np.vstack([field_.matmul(deformed.M[:, :, t], V).T for t in range(params)])
        W.append(field_.kernel(stacked))
    report.w_ranks = [w.shape[1] for w in W]
    Wbar = []
    for j in range(len(spaces)):
        acc = None
        for i, w in enumerate(W):
            if i != j:
                acc = w if acc is None else field_.intersect(acc, w)
        Wbar.append(acc)
    report.wbar_ranks = [w.shape[1] for w in Wbar]
    if any(r != 5 for r in report.wbar_ranks):
        report.block_diagonal = False
        return report
    P = np.hstack(Wbar).T % p
    blocks_ok = True
    A = []
    for i, (l, C) in enumerate(pairs):
        transformed = field_.matmul(P, C)
        rows = slice(5 * i, 5 * i + 5)
        outside = np.delete(transformed, np.arange(5 * i, 5 * i + 5), axis=0)
        if outside.any():
            blocks_ok = False
        A.append(transformed[rows])
    report.block_diagonal = blocks_ok
    det_A = 1
    for a in A:
        det_A = det_A * field_.det(a) % p
    denominator = field_.det(P) * field_.det(whole) % p
    if denominator == 0 or det_A == 0:
        report.determinant_certified = False
        return report
    unit = det_A * field_.inv(denominator) % p
    report.unit = unit
    certified = True
    for _ in range(checks):
        b = field_.random_matrix(rng, params)
        product = unit
        for l in forms:
            product = product * pow(int(field_.matmul(np.asarray(l), b)), 5, p) % p
        if field_.det(deformed.evaluate(b)) != product:
            certified = False
    report.determinant_certified = certified
    logger.info("[deform] det M factorization %s; forms span %d", "certified" if certified else "FAILED", span)
    return report
