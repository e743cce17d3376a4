"""
Plane models of genus-11 curves with ordinary singularities.

A model is a plane form together with its assigned triple and double points,
the simple base points it is forced through, and the pencils that cut the
hexagonal series. Points that are ninth base points of cubic pencils keep the
labels of the eight points they are derived from, so that their first-order
motion can be recovered from the motion of the free points.
"""
import logging
from dataclasses import dataclass, field
from math import comb
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from sympy import Poly, symbols

from ..errors import DegenerateConfigurationError, EmptyLinearSystemError, GenericityError
from ..algebra.ffla import PrimeField
from ..algebra.gb import Ideal, hilbert, saturate
from ..algebra.poly import GradedPoly, PlanePoint, PolyRing

logger = logging.getLogger(__name__)

PLANE_VARIABLES = ("x", "y", "z")

_t = symbols("t")


def plane_ring(prime) -> PolyRing:
    return PolyRing(PLANE_VARIABLES, prime)


def random_point(field: PrimeField, rng: np.random.Generator) -> PlanePoint:
    """Uniform point of the affine chart z = 1."""
    x, y = field.random_matrix(rng, 2)
    return PlanePoint.normalize((int(x), int(y), 1), field.p)


# -- data --------------------------------------------------------------------

@dataclass(frozen=True)
class SingularitySpec:
    label: str
    point: PlanePoint
    multiplicity: int

    def __post_init__(self):
        if self.multiplicity not in (2, 3):
            raise ValueError(f"{self.label}: ordinary points of multiplicity 2 or 3 only")


@dataclass
class PencilSpec:
    """A pencil of plane curves and its multiplicity at each assigned point."""
    kind: str
    label: str
    forms: Tuple[GradedPoly, GradedPoly]
    base: Dict[str, int] = field(default_factory=dict)

    @property
    def degree(self) -> int:
        return self.forms[0].degree()

    def member(self, s: int, t: int) -> GradedPoly:
        """s·forms[0] + t·forms[1]."""
        return self.forms[0].scale(s) + self.forms[1].scale(t)

    def to_dict(self) -> Dict[str, object]:
        return {
            "kind": self.kind,
            "label": self.label,
            "forms": [f.to_json() for f in self.forms],
            "base": dict(self.base),
        }

    @classmethod
    def from_dict(cls, ring: PolyRing, data: Dict[str, object]) -> "PencilSpec":
        forms = tuple(GradedPoly.from_json(ring, f) for f in data["forms"])
        return cls(data["kind"], data["label"], forms, {k: int(v) for k, v in data["base"].items()})


@dataclass
class PlaneModel:
    """A plane model: the form, its assigned points and its pencil inventory."""
    k: int
    degree: int
    form: GradedPoly
    points: Dict[str, PlanePoint]
    specs: List[SingularitySpec]
    simple_points: List[str]
    ninth_points: Dict[str, Tuple[str, ...]]
    pencils: List[PencilSpec]
    prime: int
    seed: int

    @property
    def ring(self) -> PolyRing:
        return self.form.ring

    @property
    def free_labels(self) -> List[str]:
        """Labels of points chosen freely, in drawing order."""
        return [label for label in self.points if label not in self.ninth_points]

    def multiplicity(self, label: str) -> int:
        for spec in self.specs:
            if spec.label == label:
                return spec.multiplicity
        return 1 if label in self.simple_points else 0

    @property
    def genus(self) -> int:
        return comb(self.degree - 1, 2) - sum(comb(s.multiplicity, 2) for s in self.specs)

    def pencil(self, label: str) -> PencilSpec:
        for pencil in self.pencils:
            if pencil.label == label:
                return pencil
        raise KeyError(f"no pencil labelled {label}")

    def to_dict(self) -> Dict[str, object]:
        return {
            "k": self.k,
            "prime": self.prime,
            "seed": self.seed,
            "degree": self.degree,
            "form": self.form.to_json(),
            "points": {label: pt.to_list() for label, pt in self.points.items()},
            "specs": [{"label": s.label, "multiplicity": s.multiplicity} for s in self.specs],
            "simple_points": list(self.simple_points),
            "ninth_points": {label: list(parents) for label, parents in self.ninth_points.items()},
            "pencils": [pencil.to_dict() for pencil in self.pencils],
        }

    @classmethod
    def from_dict(cls, data: Dict[str, object]) -> "PlaneModel":
        ring = plane_ring(int(data["prime"]))
        points = {label: PlanePoint(tuple(int(c) for c in coords))
                  for label, coords in data["points"].items()}
        specs = [SingularitySpec(s["label"], points[s["label"]], int(s["multiplicity"]))
                 for s in data["specs"]]
        return cls(
            k=int(data["k"]),
            degree=int(data["degree"]),
            form=GradedPoly.from_json(ring, data["form"]),
            points=points,
            specs=specs,
            simple_points=list(data["simple_points"]),
            ninth_points={label: tuple(parents) for label, parents in data["ninth_points"].items()},
            pencils=[PencilSpec.from_dict(ring, pencil) for pencil in data["pencils"]],
            prime=int(data["prime"]),
            seed=int(data["seed"]),
        )


# -- linear conditions -------------------------------------------------------

def derivative_row(ring: PolyRing, point: PlanePoint, orders: Sequence[int], d: int) -> np.ndarray:
    """Row r with r·coeffs = (∂^orders F)(point) for F of degree d in the monomial basis."""
    p = ring.p
    monos = ring.graded_basis(d)
    unpack = ring.monomials.unpack
    row = np.zeros(len(monos), dtype=np.int64)
    for j, m in enumerate(monos):
        exps = unpack(m)
        value = 1
        for e, o, x in zip(exps, orders, point.coords):
            if e < o:
                value = 0
                break
            for s in range(o):
                value = value * (e - s) % p
            value = value * pow(x, e - o, p) % p
        row[j] = value
    return row


def partial_orders(order: int) -> List[Tuple[int, int, int]]:
    """All (a, b, c) with a + b + c = order, lexicographically descending."""
    return [(a, b, order - a - b) for a in range(order, -1, -1) for b in range(order - a, -1, -1)]


def singular_conditions(ring: PolyRing, point: PlanePoint, m: int, d: int) -> np.ndarray:
    """m(m+1)/2 rows: every partial of order m−1 vanishes at the point."""
    if m < 1:
        raise ValueError("multiplicity must be positive")
    if ring.p <= d:
        raise ValueError(f"characteristic {ring.p} must exceed the degree {d}")
    return np.array([derivative_row(ring, point, orders, d) for orders in partial_orders(m - 1)],
                    dtype=np.int64)


def condition_matrix(ring: PolyRing, d: int, conditions: Sequence[Tuple[PlanePoint, int]]) -> np.ndarray:
    rows = [singular_conditions(ring, point, m, d) for point, m in conditions if m > 0]
    if not rows:
        return np.zeros((0, comb(d + 2, 2)), dtype=np.int64)
    return np.vstack(rows)


def linear_system(ring: PolyRing, d: int, conditions: Sequence[Tuple[PlanePoint, int]],
                  expected: Optional[int] = None) -> List[GradedPoly]:
    """Basis of degree-d forms with multiplicity ≥ m at each (point, m).

    When `expected` is given the conditions must be independent and leave
    exactly that many forms, otherwise GenericityError.
    """
    field_ = ring.field
    mat = condition_matrix(ring, d, conditions)
    kernel = field_.kernel(mat)
    if kernel.shape[1] == 0:
        raise EmptyLinearSystemError(f"no nonzero form of degree {d} satisfies {mat.shape[0]} conditions")
    if expected is not None and kernel.shape[1] != expected:
        raise GenericityError(f"degree-{d} system has dimension {kernel.shape[1]}, expected {expected}")
    return ring.basis(d).polynomials(kernel)


def linear_forms_through(ring: PolyRing, point: PlanePoint) -> Tuple[GradedPoly, GradedPoly]:
    forms = linear_system(ring, 1, [(point, 1)], expected=2)
    return forms[0], forms[1]


def line_through(ring: PolyRing, a: PlanePoint, b: PlanePoint) -> GradedPoly:
    return linear_system(ring, 1, [(a, 1), (b, 1)], expected=1)[0]


# -- ninth base point --------------------------------------------------------

def ninth_base_point(ring: PolyRing, points: Sequence[PlanePoint]) -> PlanePoint:
    """The ninth base point of the pencil of cubics through eight points.

    The base scheme (c1, c2) is saturated by the ideal of the eight points,
    which is generated by the pencil and one extra quartic.
    """
    if len(points) != 8:
        raise ValueError("eight points required")
    if len(set(points)) != 8:
        raise DegenerateConfigurationError("the eight points are not distinct")
    field_ = ring.field
    conditions = [(pt, 1) for pt in points]
    try:
        cubics = linear_system(ring, 3, conditions, expected=2)
    except GenericityError as err:
        raise DegenerateConfigurationError(f"cubic pencil through the points: {err}")
    quartics = linear_system(ring, 4, conditions)
    basis4 = ring.basis(4)
    multiples = [c * v for c in cubics for v in ring.gens()]
    extra, chosen = field_.extend_basis(basis4.matrix(multiples), basis4.matrix(quartics))
    if len(chosen) != 1:
        raise DegenerateConfigurationError(f"the eight points need {len(chosen)} extra quartics, expected 1")
    eight = Ideal(ring, list(cubics) + [quartics[chosen[0]]])
    residual = saturate(Ideal(ring, cubics), eight)
    linear = [g for g in residual.groebner() if g.degree() == 1]
    if len(linear) != 2:
        raise DegenerateConfigurationError(
            f"residual of the cubic pencil is not a reduced point ({len(linear)} linear generators)")
    a = ring.basis(1).vector(linear[0])
    b = ring.basis(1).vector(linear[1])
    # basis(1) is (x, y, z); the point is the cross product of the two coefficient vectors
    cross = (int(a[1] * b[2] - a[2] * b[1]), int(a[2] * b[0] - a[0] * b[2]), int(a[0] * b[1] - a[1] * b[0]))
    point = PlanePoint.normalize(cross, ring.p)
    if point in points:
        raise DegenerateConfigurationError("the ninth base point coincides with a given point")
    if any(c.evaluate(point) for c in cubics):
        raise DegenerateConfigurationError("computed ninth point is off the pencil")
    return point


def ninth_point_derivative(ring: PolyRing, points: Sequence[PlanePoint], ninth: PlanePoint) -> np.ndarray:
    """2 × 16 matrix: first-order motion of the ninth point in its chart from that of the eight.

    Columns are ordered point by point, each by the point's two free chart
    coordinates. The pencil members move by δc(p_a) = −∇c(p_a)·δp_a, and the
    ninth point follows from ∇c(R)·δR = −δc(R) for both members.
    """
    field_ = ring.field
    p = ring.p
    cubics = linear_system(ring, 3, [(pt, 1) for pt in points], expected=2)
    n_cubic = comb(5, 2)
    eval_rows = [derivative_row(ring, pt, (0, 0, 0), 3) for pt in points]
    eval_ninth = derivative_row(ring, ninth, (0, 0, 0), 3)
    unknowns = 2 * n_cubic + 2
    lhs = np.zeros((2 * len(points) + 2, unknowns), dtype=np.int64)
    rhs = np.zeros((2 * len(points) + 2, 2 * len(points)), dtype=np.int64)
    for i, cubic in enumerate(cubics):
        block = slice(i * n_cubic, (i + 1) * n_cubic)
        for a, pt in enumerate(points):
            row = i * len(points) + a
            lhs[row, block] = eval_rows[a]
            grad = cubic.gradient_at(pt)
            for s, coord in enumerate(pt.free_coordinates):
                rhs[row, 2 * a + s] = (-grad[coord]) % p
        row = 2 * len(points) + i
        lhs[row, block] = eval_ninth
        grad = cubic.gradient_at(ninth)
        for s, coord in enumerate(ninth.free_coordinates):
            lhs[row, 2 * n_cubic + s] = grad[coord]
    solution = field_.solve(lhs, rhs)
    return solution[2 * n_cubic:]


# -- verification ------------------------------------------------------------

def local_expansion_form(form: GradedPoly, point: PlanePoint, m: int) -> List[int]:
    """Coefficients c_0..c_m of the degree-m part Σ c_i u^i v^(m−i) at the point."""
    ring = form.ring
    p = ring.p
    field_ = ring.field
    a, b = point.free_coordinates
    coeffs = []
    for i in range(m + 1):
        orders = [0, 0, 0]
        orders[a] = i
        orders[b] = m - i
        value = form.derivative(orders).evaluate(point)
        factorial = 1
        for s in range(2, i + 1):
            factorial *= s
        for s in range(2, m - i + 1):
            factorial *= s
        coeffs.append(value * field_.inv(factorial % p) % p)
    return coeffs


def tangent_cone_is_reduced(form: GradedPoly, point: PlanePoint, m: int) -> bool:
    """Whether the tangent cone at an m-fold point consists of m distinct lines."""
    coeffs = local_expansion_form(form, point, m)
    if not any(coeffs):
        return False
    g = Poly(list(reversed(coeffs)), _t, modulus=form.ring.p)
    if g.degree() < m - 1:
        return False  # v² divides the binary form
    if g.degree() == 0:
        return m <= 1
    return g.gcd(g.diff(_t)).degree() == 0


def point_multiplicity(form: GradedPoly, point: PlanePoint, max_order: int = 4) -> int:
    """Order of vanishing of the form at the point (capped at max_order + 1)."""
    for order in range(max_order + 1):
        for orders in partial_orders(order):
            if form.derivative(orders).evaluate(point):
                return order
    return max_order + 1


@dataclass
class ModelVerification:
    """Itemized certificate of a plane model."""
    checks: Dict[str, bool] = field(default_factory=dict)
    details: Dict[str, object] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(self.checks.values())

    def failed(self) -> List[str]:
        return [name for name, ok in self.checks.items() if not ok]

    def to_dict(self) -> Dict[str, object]:
        return {"passed": self.passed, "checks": dict(self.checks), "details": dict(self.details)}


def jacobian_data(form: GradedPoly):
    """Hilbert data of the scheme cut out by the three partial derivatives."""
    partials = [form.partial_derivative(i) for i in range(form.ring.nvars)]
    return hilbert(Ideal(form.ring, partials))


def verify_model(form: GradedPoly, specs: Sequence[SingularitySpec],
                 simple_points: Sequence[PlanePoint] = (),
                 expected_genus: Optional[int] = 11) -> ModelVerification:
    """Multiplicities, ordinariness, no further singularities and the genus count."""
    report = ModelVerification()
    d = form.degree()
    report.checks["homogeneous"] = form.is_homogeneous()
    for spec in specs:
        mult = point_multiplicity(form, spec.point, max_order=spec.multiplicity)
        report.checks[f"multiplicity:{spec.label}"] = mult == spec.multiplicity
        report.checks[f"ordinary:{spec.label}"] = (
            mult == spec.multiplicity and tangent_cone_is_reduced(form, spec.point, spec.multiplicity))
    for i, pt in enumerate(simple_points):
        report.checks[f"passes:{i}"] = form.evaluate(pt) == 0
    jacobian = jacobian_data(form)
    expected_degree = sum((s.multiplicity - 1) ** 2 for s in specs)
    report.details["jacobian"] = {"projective_dim": jacobian.projective_dim, "degree": jacobian.degree}
    if specs:
        report.checks["no-other-singularities"] = (jacobian.krull_dim == 1
                                                   and jacobian.degree == expected_degree)
    else:
        report.checks["no-other-singularities"] = jacobian.krull_dim <= 0
    genus = comb(d - 1, 2) - sum(comb(s.multiplicity, 2) for s in specs)
    report.details["genus"] = genus
    if expected_genus is not None:
        report.checks["genus"] = genus == expected_genus
    logger.debug("[plane] verification %s", report.checks)
    return report


def verify_plane_model(model: PlaneModel, expected_genus: Optional[int] = 11) -> ModelVerification:
    simple = [model.points[label] for label in model.simple_points]
    report = verify_model(model.form, model.specs, simple, expected_genus)
    for pencil in model.pencils:
        for label, mult in pencil.base.items():
            pt = model.points[label]
            report.checks[f"pencil:{pencil.label}:{label}"] = all(
                point_multiplicity(f, pt, max_order=mult) >= mult for f in pencil.forms)
    return report


# -- infinitesimal automorphisms ---------------------------------------------

def plane_vector_fields(ring: PolyRing) -> List[np.ndarray]:
    """Traceless 3×3 matrices E spanning the Lie algebra of PGL(3).

    x ↦ (1 + εE)x moves a form by δF = Σ E_ij x_j ∂F/∂x_i and a point P by −E·P.
    """
    mats = []
    for i in range(3):
        for j in range(3):
            if i == j:
                continue
            e = np.zeros((3, 3), dtype=np.int64)
            e[i, j] = 1
            mats.append(e)
    for i in range(2):
        e = np.zeros((3, 3), dtype=np.int64)
        e[i, i] = 1
        e[2, 2] = ring.p - 1
        mats.append(e)
    return mats


def form_motion(form: GradedPoly, e: np.ndarray) -> GradedPoly:
    ring = form.ring
    out = ring.zero()
    for i in range(3):
        for j in range(3):
            if e[i, j]:
                out = out + (ring.gen(j) * form.partial_derivative(i)).scale(int(e[i, j]))
    return out


def point_motion(point: PlanePoint, e: np.ndarray, p: int) -> Tuple[int, int]:
    """Chart-coordinate motion of a point under x ↦ (1 + εE)x (the point moves by −E·P)."""
    delta = [(-int(sum(e[i, j] * point.coords[j] for j in range(3)))) % p for i in range(3)]
    chart = point.chart
    return tuple((delta[c] - point.coords[c] * delta[chart]) % p for c in point.free_coordinates)


def random_model(k: int, prime: int, seed: int, retries: int = 20) -> PlaneModel:
    """A verified random model for k pencils, deterministic in (k, prime, seed)."""
    from .builders import get_builder

    return get_builder(k, prime, seed).build(retries)
