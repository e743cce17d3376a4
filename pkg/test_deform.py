#!/usr/bin/env python3
"""
Tests for equisingular tangent spaces, the normal space of the canonical
curve, the differential of the construction and the factorization of det M.

The octic model carries ten pencils and is the cheapest curve on which every
stage runs, so the deformation pipeline is exercised there.
"""
import sys
from types import SimpleNamespace

import numpy as np
import pytest
from rich.console import Console

from hexagonal.algebra.ffla import PrimeField
from hexagonal.algebra.poly import PolyRing
from hexagonal.config import get_model_definition
from hexagonal.geometry.canon import canonical_ideal, scroll
from hexagonal.geometry.deform import (
    AUTOMORPHISM_DIMENSION,
    LINEAR_SYZYGY_COUNT,
    NORMAL_DIMENSION,
    PARAMETER_COUNT,
    TRIVIAL_DIMENSION,
    DeformedResolution,
    FactorizationReport,
    automorphism_tangents,
    differential_rank,
    factor_M,
    lift_resolution,
    normal_space,
    parameter_ring,
    severi_tangent,
    slice_products,
)
from hexagonal.geometry.plane import random_model

console = Console()

P = 12347


LARGE = 2 ** 31 - 1


@pytest.fixture(scope="module")
def octic():
    return random_model(10, P, 42)


@pytest.fixture(scope="module")
def curve(octic):
    return canonical_ideal(octic)


@pytest.fixture(scope="module")
def ks(curve):
    return normal_space(curve)


@pytest.fixture(scope="module")
def deformed(curve, ks):
    return lift_resolution(curve, ks, np.random.default_rng([42, 1]))


def test_dimension_constants():
    assert NORMAL_DIMENSION - TRIVIAL_DIMENSION == PARAMETER_COUNT
    assert LINEAR_SYZYGY_COUNT == 160
    assert AUTOMORPHISM_DIMENSION == 8
    assert parameter_ring(P).names[-1] == "b29"


def test_products_stay_exact_for_primes_near_the_word_size():
    field_ = PrimeField(LARGE)
    rng = np.random.default_rng(5)
    M = field_.random_matrix(rng, (10, 10, PARAMETER_COUNT))
    b = field_.random_matrix(rng, PARAMETER_COUNT)
    curve = SimpleNamespace(ring=PolyRing(("x",), LARGE))
    deformed = DeformedResolution(curve, None, [], None, None, None, None, M)
    exact = (M.astype(object) * b.astype(object)).sum(axis=2) % LARGE
    assert np.array_equal(deformed.evaluate(b).astype(object), exact)
    assert int(field_.matmul(M[0, 0], b)) == exact[0, 0]

    stacked = field_.random_matrix(rng, (4, 45, 6))
    matrix = field_.random_matrix(rng, (7, 45))
    expected = np.array([matrix.astype(object) @ stacked[w].astype(object) % LARGE for w in range(4)])
    assert np.array_equal(slice_products(field_, matrix, stacked).astype(object), expected)


@pytest.mark.slow
@pytest.mark.parametrize("k", [5, 7, 9, 10])
def test_severi_tangent_has_expected_dimension(k):
    model = random_model(k, P, 3)
    report = severi_tangent(model)
    assert report.kernel_dimension == get_model_definition(k).severi_dimension
    assert report.passed
    assert report.kernel.shape[1] == report.kernel_dimension
    assert report.to_dict()["rank"] + report.kernel_dimension == report.unknowns


@pytest.mark.slow
def test_vector_fields_are_tangent_to_the_severi_variety(octic):
    report = severi_tangent(octic)
    fields = automorphism_tangents(octic, report)
    field_ = octic.ring.field
    assert field_.rank(fields) == AUTOMORPHISM_DIMENSION
    assert field_.in_span(report.kernel, fields)


@pytest.mark.slow
def test_normal_space_splits(ks):
    assert ks.normal_dimension == NORMAL_DIMENSION
    assert ks.trivial_dimension == TRIVIAL_DIMENSION
    assert ks.parameters == PARAMETER_COUNT
    assert ks.contains(ks.complement)
    assert ks.to_dict()["linear_syzygies"] == LINEAR_SYZYGY_COUNT
    forms = ks.deformation_forms()
    assert len(forms) == PARAMETER_COUNT
    assert all(len(t) == 36 for t in forms)


@pytest.mark.slow
def test_differential_has_an_eight_dimensional_kernel(octic, curve, ks):
    report = differential_rank(octic, curve, ks)
    assert report.kernel_dimension == AUTOMORPHISM_DIMENSION
    assert report.automorphisms_trivial
    assert report.automorphisms_span_kernel
    assert report.rank == 34 - AUTOMORPHISM_DIMENSION
    assert report.passed


@pytest.mark.slow
def test_lifted_resolution_gives_a_square_M(deformed):
    assert deformed.size == 50
    assert deformed.k == 10
    assert deformed.M.shape == (50, 50, PARAMETER_COUNT)
    b = np.arange(PARAMETER_COUNT)
    assert deformed.evaluate(b).shape == (50, 50)
    assert deformed.entry(0, 0).is_zero() or deformed.entry(0, 0).degree() == 1


@pytest.mark.slow
def test_det_M_factors_over_the_pencils(octic, curve, deformed):
    scrolls = [scroll(curve, pencil) for pencil in octic.pencils]
    report = factor_M(deformed, scrolls, np.random.default_rng([42, 2]))
    assert report.span_dimension == get_model_definition(10).expected_form_span == 4
    assert report.complete
    assert report.block_diagonal
    assert report.determinant_certified
    assert report.w_ranks == [45] * 10
    assert report.wbar_ranks == [5] * 10
    assert report.passed
    data = report.to_dict(prime=P)
    assert len(data["form_texts"]) == 10
    assert FactorizationReport(**{k: v for k, v in data.items() if k != "form_texts"}).passed


@pytest.mark.slow
def test_partial_scroll_sets_only_check_the_span(octic, curve, deformed):
    scrolls = [scroll(curve, pencil) for pencil in octic.pencils[:3]]
    report = factor_M(deformed, scrolls, np.random.default_rng([42, 2]), expected_span=3)
    assert not report.complete
    assert report.w_ranks == []
    assert len(report.forms) == 3
    assert report.passed == (report.span_dimension == 3)


if __name__ == "__main__":
    console.print("[bold cyan]Deformation tests[/bold cyan]\n")
    sys.exit(pytest.main([__file__, "-v"]))
