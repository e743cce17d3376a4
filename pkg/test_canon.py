#!/usr/bin/env python3
"""
Tests for the canonical embedding, pencil scrolls and syzygy schemes.

Everything here builds a genus-11 curve in P^10 and is marked slow.
"""
import sys

import numpy as np
import pytest
from rich.console import Console

from hexagonal.algebra.gb import Ideal
from hexagonal.algebra.homalg import KoszulComplex, koszul_betti_table
from hexagonal.geometry.canon import (
    LINEAR_KINDS,
    QUADRIC_COUNT,
    SPAN_KINDS,
    STRAND_LENGTH,
    CanonicalCurve,
    ScrollData,
    SyzygySchemeReport,
    adjoint_basis,
    canonical_ideal,
    fiber_space,
    pencil_counts,
    pencil_sections,
    reduces_to_zero,
    scroll,
    strand_positions,
    syzygy_scheme,
)
from hexagonal.geometry.plane import random_model

console = Console()

P = 12347

pytestmark = pytest.mark.slow


@pytest.fixture(scope="module")
def model():
    return random_model(9, P, 42)


@pytest.fixture(scope="module")
def curve(model):
    return canonical_ideal(model)


@pytest.fixture(scope="module")
def scrolls(curve, model):
    return {pencil.label: scroll(curve, pencil) for pencil in model.pencils}


def by_kind(model, kinds):
    return [p.label for p in model.pencils if p.kind in kinds]


def test_adjoint_series_has_genus_many_forms(model):
    adjoints = adjoint_basis(model)
    assert len(adjoints) == 11
    assert all(a.degree() == model.degree - 3 for a in adjoints)


def test_quadrics_vanish_on_the_plane_model(model, curve):
    assert len(curve.quadrics) == QUADRIC_COUNT
    assert all(q.is_homogeneous() and q.degree() == 2 for q in curve.quadrics)
    principal = Ideal(model.ring, [model.form])
    for q in curve.quadrics[:6]:
        assert principal.contains(q.substitute(model.ring, curve.adjoints))


def test_canonical_image_is_a_degree_twenty_curve(model):
    certified = canonical_ideal(model, certify_hilbert=True)
    data = certified.hilbert()
    assert (data.projective_dim, data.degree) == (1, 20)
    assert data.genus() == 11


def test_betti_numbers_of_the_canonical_curve(curve):
    table = koszul_betti_table(curve.ideal, [(1, 2), (2, 3), (4, 6), (5, 6)], reduce_by=2,
                               rng=np.random.default_rng([42, 1]))
    assert table[(1, 2)] == 36
    assert table[(2, 3)] == 160
    assert table[(4, 6)] == table[(5, 6)] == 5 * 9


def test_fibers_of_every_pencil_are_type_one(model, curve):
    for pencil in model.pencils:
        sections = pencil_sections(curve, pencil)
        assert sections.type_one
        assert sections.method == ("span" if pencil.kind in SPAN_KINDS else "multiplication")
        assert len(sections.residual) == 6
        assert fiber_space(curve, pencil, 2, 3).shape == (11, 6)


def test_scroll_minors_lie_in_the_canonical_ideal(model, curve, scrolls):
    assert len(scrolls) == 9
    for data in scrolls.values():
        assert data.matrix_coefficients().shape == (2, 6, 11)
        assert len(data.minors) == 15
        assert all(reduces_to_zero(curve, q) for q in data.minors)


@pytest.mark.parametrize("kinds", [LINEAR_KINDS, SPAN_KINDS], ids=["multiplication", "span"])
def test_scrolls_are_five_dimensional_of_degree_six(model, curve, kinds):
    label = by_kind(model, kinds)[0]
    data = scroll(curve, model.pencil(label), certify_hilbert=True)
    assert (data.hilbert().projective_dim, data.hilbert().degree) == (5, 6)
    assert "hilbert" in data.to_dict()


def test_scroll_betti_numbers_are_eagon_northcott(model, scrolls):
    data = scrolls[by_kind(model, LINEAR_KINDS)[0]]
    complex_ = KoszulComplex(data.ideal)
    assert complex_.betti(1, 2) == 15
    assert complex_.betti(2, 3) == 40


def test_serialization_round_trips(model, curve, scrolls):
    restored = CanonicalCurve.from_dict(model, curve.to_dict())
    assert restored.quadrics == curve.quadrics
    assert restored.adjoints == curve.adjoints
    data = next(iter(scrolls.values()))
    again = ScrollData.from_dict(curve.ring, data.to_dict())
    assert again.matrix == data.matrix
    assert (again.label, again.kind, again.method) == (data.label, data.kind, data.method)


def test_pencil_counts(model, scrolls):
    assert pencil_counts(list(scrolls.values())) == (5, 4)
    chosen = [scrolls[label] for label in by_kind(model, SPAN_KINDS)[:2]]
    assert pencil_counts(chosen) == (0, 2)


def test_syzygy_scheme_needs_two_scrolls(curve, scrolls):
    with pytest.raises(ValueError):
        syzygy_scheme(curve, list(scrolls.values())[:1])
    with pytest.raises(ValueError):
        syzygy_scheme(curve, list(scrolls.values())[:2], strand_length=10)


def choose(model, a, b):
    return by_kind(model, LINEAR_KINDS)[:a] + by_kind(model, SPAN_KINDS)[:b]


@pytest.mark.parametrize("a,b,deg", [
    (2, 0, 18), (1, 1, 18), (0, 2, 18), (3, 0, 16), (4, 0, 15), (5, 0, 15),
])
def test_syzygy_schemes_that_are_surfaces(model, curve, scrolls, a, b, deg):
    labels = choose(model, a, b)
    report = syzygy_scheme(curve, [scrolls[label] for label in labels], strand_length=2,
                           rng=np.random.default_rng([42, a, b]))
    assert (report.a, report.b) == (a, b)
    assert (report.projective_dim, report.degree) == (2, deg)
    assert report.genus is None
    assert set(report.betti) == {"1,2", "1,3", "2,3", "2,4"}
    assert SyzygySchemeReport.from_dict(report.to_dict()) == report


@pytest.mark.parametrize("a,b,deg,genus", [
    (1, 2, 20, 11),
    (0, 3, 21, 12), (2, 1, 21, 12),
    (2, 2, 20, 11), (0, 4, 20, 11),
    (3, 2, 20, 11), (1, 4, 20, 11),
    (4, 2, 20, 11), (2, 4, 20, 11),
])
def test_syzygy_schemes_that_are_curves(model, curve, scrolls, a, b, deg, genus):
    labels = choose(model, a, b)
    report = syzygy_scheme(curve, [scrolls[label] for label in labels], strand_length=2,
                           rng=np.random.default_rng([42, a, b]))
    assert (report.projective_dim, report.degree, report.genus) == (1, deg, genus)
    if genus == 11:
        assert report.betti["1,2"] == QUADRIC_COUNT


def test_large_subsets_carry_the_betti_table_of_the_curve(model, curve, scrolls):
    labels = choose(model, 4, 3)
    report = syzygy_scheme(curve, [scrolls[label] for label in labels], rng=np.random.default_rng([42, 7]))
    assert (report.projective_dim, report.degree, report.genus) == (1, 20, 11)
    own = koszul_betti_table(curve.ideal, strand_positions(STRAND_LENGTH), reduce_by=2,
                             rng=np.random.default_rng([42, 1]))
    assert report.betti == {f"{i},{j}": own[(i, j)] for i, j in strand_positions(STRAND_LENGTH)}
    assert report.betti["1,2"] == 36
    assert report.betti["2,3"] == 160
    assert report.betti["4,6"] == report.betti["5,6"] == 45
    assert report.to_row()[:5] == ["4", "3", "1", "20", "11"]
    assert report.to_row()[5].split()[:4] == ["36", "0", "160", "0"]


def test_twenty_pencil_curve_has_one_hundred_syzygy_classes():
    model20 = random_model(20, P, 42)
    assert len(model20.pencils) == 10
    curve20 = canonical_ideal(model20)
    table = koszul_betti_table(curve20.ideal, [(4, 6), (5, 6)], reduce_by=2,
                               rng=np.random.default_rng([42, 1]))
    assert table[(4, 6)] == table[(5, 6)] == 5 * 20


def test_canonical_betti_table_is_gorenstein_symmetric(curve):
    # the resolution of S/I_C has length 9 and ends in S(-12)
    table = koszul_betti_table(curve.ideal, strand_positions(STRAND_LENGTH), reduce_by=2,
                               rng=np.random.default_rng([42, 1]))
    for i, j in strand_positions(STRAND_LENGTH):
        assert table[(i, j)] == table[(9 - i, 12 - j)], (i, j)
    assert table[(8, 10)] == 36
    assert table[(7, 9)] == 160
    assert all(table[(i, i + 1)] == 0 for i in range(6, 10))
    assert all(table[(i, i + 2)] == 0 for i in range(1, 4))


if __name__ == "__main__":
    console.print("[bold cyan]Canonical curve and scroll tests[/bold cyan]\n")
    sys.exit(pytest.main([__file__, "-v"]))
