"""
Degree-9 models: four triple points with cubic-residual pencils (k = 4..9) and
five triple points (k = 20).
"""
from typing import List

from ..plane import PencilSpec, SingularitySpec
from .base import ModelBuilder, PointLayout


class NonicBuilder(ModelBuilder):
    """
    Nonic with triple points P1..P4, nodes Q1..Q5, through the ninth base points
    R1..Rm of the cubic pencils through P1..P4 and the Q's other than Qj.
    Pencils: lines through each Pi, conics through P1..P4, and one cubic pencil per Rj.
    """

    def place_points(self) -> PointLayout:
        layout = PointLayout()
        for i in range(1, 5):
            label = f"P{i}"
            layout.specs.append(SingularitySpec(label, self.draw_point(layout, label), 3))
        for j in range(1, 6):
            label = f"Q{j}"
            layout.specs.append(SingularitySpec(label, self.draw_point(layout, label), 2))
        for j in range(1, self.definition.ninth_points + 1):
            parents = [f"P{i}" for i in range(1, 5)] + [f"Q{l}" for l in range(1, 6) if l != j]
            self.add_ninth_point(layout, f"R{j}", parents)
            layout.simple_points.append(f"R{j}")
        return layout

    def pencils(self, layout: PointLayout) -> List[PencilSpec]:
        out = [self.pencil_through("line-through-triple-point", f"L{i}", 1, {f"P{i}": 1}, layout)
               for i in range(1, 5)]
        out.append(self.pencil_through("conic-through-four-triples", "C", 2,
                                       {f"P{i}": 1 for i in range(1, 5)}, layout))
        for j in range(1, self.definition.ninth_points + 1):
            base = {name: 1 for name in layout.ninth_points[f"R{j}"]}
            base[f"R{j}"] = 1
            parents = {name: 1 for name in layout.ninth_points[f"R{j}"]}
            pencil = self.pencil_through("cubic-residual", f"K{j}", 3, parents, layout)
            pencil.base = base
            out.append(pencil)
        return out


class NodalNinthNonicBuilder(ModelBuilder):
    """
    Nonic with triple points P1..P3, nodes Q1..Q7 and a node at the ninth base
    point R of the cubic pencil through P1..P3, Q1..Q5 (Q6 and Q7 are left out).
    """

    def place_points(self) -> PointLayout:
        layout = PointLayout()
        for i in range(1, 4):
            label = f"P{i}"
            layout.specs.append(SingularitySpec(label, self.draw_point(layout, label), 3))
        for j in range(1, 8):
            label = f"Q{j}"
            layout.specs.append(SingularitySpec(label, self.draw_point(layout, label), 2))
        parents = [f"P{i}" for i in range(1, 4)] + [f"Q{j}" for j in range(1, 6)]
        point = self.add_ninth_point(layout, "R", parents)
        layout.specs.append(SingularitySpec("R", point, 2))
        return layout

    def pencils(self, layout: PointLayout) -> List[PencilSpec]:
        out = [self.pencil_through("line-through-triple-point", f"L{i}", 1, {f"P{i}": 1}, layout)
               for i in range(1, 4)]
        parents = {name: 1 for name in layout.ninth_points["R"]}
        pencil = self.pencil_through("cubic-residual", "K1", 3, parents, layout)
        pencil.base = dict(parents, R=1)
        out.append(pencil)
        return out


class FiveTripleNonicBuilder(ModelBuilder):
    """
    Nonic with triple points P1..P5 and nodes Q1, Q2, a curve with twenty
    pencils. Ten of them are cut by plane systems through the singular points:
    the lines through each Pi and the conics through the four triple points
    other than Pj. All twenty are cut by the 4-secant lines of the space model
    given by the cubics through P1..P5 and Q1; the other ten would need those
    lines themselves and are not built here.
    """

    def place_points(self) -> PointLayout:
        layout = PointLayout()
        for i in range(1, 6):
            label = f"P{i}"
            layout.specs.append(SingularitySpec(label, self.draw_point(layout, label), 3))
        for j in range(1, 3):
            label = f"Q{j}"
            layout.specs.append(SingularitySpec(label, self.draw_point(layout, label), 2))
        return layout

    def pencils(self, layout: PointLayout) -> List[PencilSpec]:
        out = [self.pencil_through("4-secant", f"L{i}", 1, {f"P{i}": 1}, layout) for i in range(1, 6)]
        for j in range(1, 6):
            base = {f"P{i}": 1 for i in range(1, 6) if i != j}
            out.append(self.pencil_through("4-secant", f"C{j}", 2, base, layout))
        return out
