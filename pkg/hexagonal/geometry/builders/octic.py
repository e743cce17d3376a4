"""
Degree-8 model with ten nodes in general position (k = 10).
"""
from typing import List

from ..plane import PencilSpec, SingularitySpec
from .base import ModelBuilder, PointLayout


class OcticBuilder(ModelBuilder):
    """Octic with nodes N1..N10; the pencils are the lines through each node."""

    def place_points(self) -> PointLayout:
        layout = PointLayout()
        for i in range(1, 11):
            label = f"N{i}"
            layout.specs.append(SingularitySpec(label, self.draw_point(layout, label), 2))
        return layout

    def pencils(self, layout: PointLayout) -> List[PencilSpec]:
        return [self.pencil_through("line-through-node", f"L{i}", 1, {f"N{i}": 1}, layout)
                for i in range(1, 11)]
