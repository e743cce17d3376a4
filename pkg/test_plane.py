#!/usr/bin/env python3
"""
Tests for plane linear systems, ninth base points, singularity certificates
and the random plane models.
"""
import sys

import numpy as np
import pytest
from rich.console import Console

from hexagonal.algebra.poly import PlanePoint
from hexagonal.config import get_model_definition, list_supported_k
from hexagonal.errors import RetryExhaustedError, UnsupportedModelError
from hexagonal.geometry.plane import (
    PlaneModel,
    SingularitySpec,
    linear_system,
    ninth_base_point,
    ninth_point_derivative,
    plane_ring,
    plane_vector_fields,
    point_motion,
    point_multiplicity,
    random_model,
    random_point,
    singular_conditions,
    tangent_cone_is_reduced,
    verify_model,
    verify_plane_model,
)

console = Console()

P = 12347


@pytest.fixture(scope="module")
def ring():
    return plane_ring(P)


@pytest.fixture(scope="module")
def eight_points(ring):
    rng = np.random.default_rng(2024)
    return [random_point(ring.field, rng) for _ in range(8)]


@pytest.fixture(scope="module")
def octic():
    return random_model(10, P, 42)


def test_singular_condition_count(ring, eight_points):
    assert singular_conditions(ring, eight_points[0], 3, 9).shape == (6, 55)
    assert singular_conditions(ring, eight_points[0], 2, 9).shape == (3, 55)


def test_linear_system_dimensions(ring, eight_points):
    assert len(linear_system(ring, 3, [(pt, 1) for pt in eight_points])) == 2
    sextics = linear_system(ring, 6, [(pt, 2) for pt in eight_points[:4]])
    assert len(sextics) == 28 - 12
    for f in sextics:
        assert point_multiplicity(f, eight_points[0]) >= 2


def test_ninth_base_point_lies_on_the_pencil(ring, eight_points):
    ninth = ninth_base_point(ring, eight_points)
    assert ninth not in eight_points
    for cubic in linear_system(ring, 3, [(pt, 1) for pt in eight_points]):
        assert cubic.evaluate(ninth) == 0


def test_ninth_point_motion_is_equivariant(ring, eight_points):
    ninth = ninth_base_point(ring, eight_points)
    D = ninth_point_derivative(ring, eight_points, ninth)
    assert D.shape == (2, 16)
    for e in plane_vector_fields(ring):
        motion = np.array([c for pt in eight_points for c in point_motion(pt, e, P)], dtype=np.int64)
        assert tuple(int(v) for v in ring.field.matmul(D, motion)) == point_motion(ninth, e, P)


def test_tangent_cones(ring):
    x, y, z = ring.gens()
    o = PlanePoint.normalize((0, 0, 1), P)
    assert point_multiplicity(x * y * (x + y), o) == 3
    assert tangent_cone_is_reduced(x * y * (x + y), o, 3)
    assert not tangent_cone_is_reduced(x * x * y, o, 3)
    cusp = y * y * z - x ** 3
    assert point_multiplicity(cusp, o) == 2
    assert not tangent_cone_is_reduced(cusp, o, 2)
    node = y * y * z - x * x * z - x ** 3
    assert tangent_cone_is_reduced(node, o, 2)


def test_verify_model_of_a_nodal_cubic(ring):
    x, y, z = ring.gens()
    o = PlanePoint.normalize((0, 0, 1), P)
    node = y * y * z - x * x * z - x ** 3
    report = verify_model(node, [SingularitySpec("O", o, 2)], expected_genus=0)
    assert report.passed, report.failed()
    smooth = verify_model(x ** 3 + y ** 3 + z ** 3, [], expected_genus=1)
    assert smooth.passed, smooth.failed()
    wrong = verify_model(node, [], expected_genus=1)
    assert "no-other-singularities" in wrong.failed()


def test_vector_fields_are_traceless(ring):
    fields = plane_vector_fields(ring)
    assert len(fields) == 8
    for e in fields:
        assert int(np.trace(e)) % P == 0


def test_supported_models():
    assert list_supported_k() == [4, 5, 6, 7, 8, 9, 10, 20]
    for k in list_supported_k():
        assert get_model_definition(k).genus == 11
    assert get_model_definition(7).severi_dimension == 31
    assert get_model_definition(10).severi_dimension == 34
    with pytest.raises(UnsupportedModelError) as err:
        random_model(12, P, 1)
    assert err.value.exit_code == 2


def test_retry_exhaustion_exit_code():
    with pytest.raises(RetryExhaustedError) as err:
        random_model(10, P, 1, retries=0)
    assert err.value.exit_code == 3


@pytest.mark.slow
def test_octic_model(octic):
    assert octic.degree == 8
    assert octic.genus == 11
    assert len(octic.pencils) == 10
    assert len(octic.specs) == 10
    report = verify_plane_model(octic)
    assert report.passed, report.failed()


@pytest.mark.slow
def test_model_is_deterministic_and_serializable(octic):
    again = random_model(10, P, 42)
    assert again.form == octic.form
    restored = PlaneModel.from_dict(octic.to_dict())
    assert restored.form == octic.form
    assert [p.label for p in restored.pencils] == [p.label for p in octic.pencils]
    assert restored.points == octic.points


@pytest.mark.slow
@pytest.mark.parametrize("k", [4, 7, 20])
def test_nonic_models(k):
    model = random_model(k, P, 7)
    definition = get_model_definition(k)
    assert model.degree == 9
    assert model.genus == 11
    assert len(model.pencils) == len(definition.pencils)
    assert len(model.ninth_points) == definition.ninth_points + (1 if definition.nodal_ninth_point else 0)
    for label, parents in model.ninth_points.items():
        assert len(parents) == 8
        point = model.points[label]
        assert model.form.evaluate(point) == 0


if __name__ == "__main__":
    console.print("[bold cyan]Plane model tests[/bold cyan]\n")
    sys.exit(pytest.main([__file__, "-v"]))
