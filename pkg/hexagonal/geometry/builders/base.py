"""
Base builder class for all plane-model families.
"""
import logging
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from math import comb
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from ...config.models import ModelDefinition
from ...errors import (
    DegenerateConfigurationError,
    EmptyLinearSystemError,
    GenericityError,
    RetryExhaustedError,
)
from ...algebra.poly import GradedPoly, PlanePoint
from ..plane import (
    PencilSpec,
    PlaneModel,
    SingularitySpec,
    linear_system,
    ninth_base_point,
    plane_ring,
    random_point,
    verify_plane_model,
)

logger = logging.getLogger(__name__)


@dataclass
class PointLayout:
    """Assigned points of one draw, before the form is chosen."""
    points: Dict[str, PlanePoint] = field(default_factory=dict)
    specs: List[SingularitySpec] = field(default_factory=list)
    simple_points: List[str] = field(default_factory=list)
    ninth_points: Dict[str, Tuple[str, ...]] = field(default_factory=dict)

    def conditions(self) -> List[Tuple[PlanePoint, int]]:
        out = [(spec.point, spec.multiplicity) for spec in self.specs]
        out += [(self.points[label], 1) for label in self.simple_points]
        return out

    def condition_count(self) -> int:
        return sum(m * (m + 1) // 2 for _, m in self.conditions())


class ModelBuilder(ABC):
    """
    Base class for random plane-model generators.
    Each attempt draws points, derives the dependent ones, picks a random member
    of the linear system and certifies it; non-generic draws are retried.
    """

    def __init__(self, definition: ModelDefinition, prime: int, seed: int):
        """
        Initialize the builder.

        Args:
            definition: Model family (degree, point counts, pencil kinds)
            prime: Characteristic of the ground field
            seed: Seed of the single random generator used by every draw
        """
        self.definition = definition
        self.ring = plane_ring(prime)
        self.field = self.ring.field
        self.seed = seed
        self.rng = np.random.default_rng(seed)

    @abstractmethod
    def place_points(self) -> PointLayout:
        """Draw the free points and derive the ninth base points."""
        pass

    @abstractmethod
    def pencils(self, layout: PointLayout) -> List[PencilSpec]:
        """Pencil inventory of a model with the given points."""
        pass

    # -- helpers for subclasses ------------------------------------------------

    def draw_point(self, layout: PointLayout, label: str) -> PlanePoint:
        point = random_point(self.field, self.rng)
        if point in layout.points.values():
            raise DegenerateConfigurationError(f"{label} repeats an earlier point")
        layout.points[label] = point
        return point

    def add_ninth_point(self, layout: PointLayout, label: str, parents: Sequence[str]) -> PlanePoint:
        point = ninth_base_point(self.ring, [layout.points[p] for p in parents])
        if point in layout.points.values():
            raise DegenerateConfigurationError(f"{label} coincides with an assigned point")
        layout.points[label] = point
        layout.ninth_points[label] = tuple(parents)
        return point

    def pencil_through(self, kind: str, label: str, degree: int,
                       base: Dict[str, int], layout: PointLayout) -> PencilSpec:
        conditions = [(layout.points[name], mult) for name, mult in base.items()]
        forms = linear_system(self.ring, degree, conditions, expected=2)
        return PencilSpec(kind, label, (forms[0], forms[1]), dict(base))

    # -- construction ----------------------------------------------------------

    def expected_dimension(self, layout: PointLayout) -> int:
        return comb(self.definition.degree + 2, 2) - layout.condition_count()

    def choose_form(self, layout: PointLayout) -> GradedPoly:
        """Random member of the linear system, scaled so the x^d coefficient is 1."""
        d = self.definition.degree
        basis = linear_system(self.ring, d, layout.conditions(), expected=self.expected_dimension(layout))
        coeffs = self.field.random_matrix(self.rng, len(basis))
        form = self.ring.zero()
        for c, f in zip(coeffs, basis):
            form = form + f.scale(int(c))
        lead = form.terms.get(self.ring.graded_basis(d)[0], 0)
        if not lead:
            raise GenericityError("normalized coefficient vanishes")
        return form.scale(self.field.inv(lead))

    def attempt(self) -> PlaneModel:
        layout = self.place_points()
        form = self.choose_form(layout)
        pencils = self.pencils(layout)
        if len(pencils) != len(self.definition.pencils):
            raise GenericityError(f"{len(pencils)} pencils, expected {len(self.definition.pencils)}")
        model = PlaneModel(
            k=self.definition.k,
            degree=self.definition.degree,
            form=form,
            points=layout.points,
            specs=layout.specs,
            simple_points=layout.simple_points,
            ninth_points=layout.ninth_points,
            pencils=pencils,
            prime=self.ring.p,
            seed=self.seed,
        )
        report = verify_plane_model(model)
        if not report.passed:
            raise GenericityError(f"model failed {report.failed()}")
        return model

    def build(self, retries: int = 20) -> PlaneModel:
        last: Optional[Exception] = None
        for attempt in range(1, retries + 1):
            try:
                model = self.attempt()
            except (GenericityError, DegenerateConfigurationError, EmptyLinearSystemError) as err:
                last = err
                logger.info("[plane] k=%d attempt %d rejected: %s", self.definition.k, attempt, err)
                continue
            logger.info("[plane] k=%d model found on attempt %d", self.definition.k, attempt)
            return model
        raise RetryExhaustedError(self.definition.k, retries, last)
