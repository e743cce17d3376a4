"""
Plane model definitions for each supported number of pencils.
"""
from dataclasses import dataclass, field
from typing import Dict, List, Optional

from ..errors import UnsupportedModelError


@dataclass(frozen=True)
class ModelDefinition:
    """Definition of a family of plane models of genus-11 hexagonal curves."""
    k: int
    degree: int
    triple_points: int
    double_points: int
    ninth_points: int = 0  # chosen ninth base points the curve passes through
    nodal_ninth_point: bool = False  # node at the ninth base point of a cubic pencil
    pencils: List[str] = field(default_factory=list)
    description: str = ""
    severi_dimension: Optional[int] = None  # equisingular tangent dimension, when known
    form_span: Optional[int] = None  # span of the branch forms l_i; None means k

    @property
    def genus(self) -> int:
        d = self.degree
        nodes = self.double_points + (1 if self.nodal_ninth_point else 0)
        return (d - 1) * (d - 2) // 2 - 3 * self.triple_points - nodes

    @property
    def adjoint_degree(self) -> int:
        return self.degree - 3

    @property
    def expected_form_span(self) -> int:
        return self.k if self.form_span is None else self.form_span


def _nonic(k: int) -> ModelDefinition:
    m = k - 5
    return ModelDefinition(
        k=k,
        degree=9,
        triple_points=4,
        double_points=5,
        ninth_points=m,
        pencils=["line-through-triple-point"] * 4 + ["conic-through-four-triples"]
        + ["cubic-residual"] * m,
        description=f"nonic with 4 triple points, 5 nodes, through {m} ninth base points",
        severi_dimension=33 - m,
    )


MODEL_DEFINITIONS: Dict[int, ModelDefinition] = {k: _nonic(k) for k in range(5, 10)}

MODEL_DEFINITIONS[4] = ModelDefinition(
    k=4,
    degree=9,
    triple_points=3,
    double_points=7,
    nodal_ninth_point=True,
    pencils=["line-through-triple-point"] * 3 + ["cubic-residual"],
    description="nonic with 3 triple points, 7 nodes and a node at a ninth base point",
)

MODEL_DEFINITIONS[10] = ModelDefinition(
    k=10,
    degree=8,
    triple_points=0,
    double_points=10,
    pencils=["line-through-node"] * 10,
    description="octic with 10 nodes in general position",
    severi_dimension=34,
    form_span=4,
)

MODEL_DEFINITIONS[20] = ModelDefinition(
    k=20,
    degree=9,
    triple_points=5,
    double_points=2,
    pencils=["4-secant"] * 10,
    description="nonic with 5 triple points and 2 nodes; the 10 pencils cut by lines and conics through the triple points",
    form_span=5,
)


def get_model_definition(k: int) -> ModelDefinition:
    """Get model definition by number of pencils."""
    definition = MODEL_DEFINITIONS.get(k)
    if definition is None:
        raise UnsupportedModelError(k, list_supported_k())
    return definition


def list_supported_k() -> List[int]:
    """List all supported pencil counts."""
    return sorted(MODEL_DEFINITIONS)
