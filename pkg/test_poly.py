#!/usr/bin/env python3
"""
Tests for graded polynomial rings over GF(p) and their first-order variants.
"""
import sys

import numpy as np
import pytest
from rich.console import Console

from hexagonal.algebra.poly import (
    CoefficientMode,
    GradedBasis,
    PlanePoint,
    PolyRing,
    coordinates_in_basis,
)
from hexagonal.errors import NotInSpanError

console = Console()

P = 101


@pytest.fixture(scope="module")
def ring():
    return PolyRing(("x", "y", "z"), P)


def test_grevlex_order_in_degree_two(ring):
    exps = [ring.monomials.unpack(m) for m in ring.graded_basis(2)]
    assert exps == [
        (2, 0, 0), (1, 1, 0), (0, 2, 0),
        (1, 0, 1), (0, 1, 1), (0, 0, 2),
    ]


def test_arithmetic(ring):
    x, y, z = ring.gens()
    assert (x + y) ** 2 == x * x + 2 * x * y + y * y
    assert (x - x).is_zero()
    assert (x * y + 3) - 3 == y * x
    assert ((x + 1) * (x - 1)) == x ** 2 - 1
    f = x ** 3 + 5 * y * z ** 2
    assert f.degree() == 3
    assert f.is_homogeneous()
    assert not (f + x).is_homogeneous()
    assert (f + x).homogeneous_component(1) == x


def test_coefficients_reduce_mod_p(ring):
    x = ring.gen(0)
    assert P * x == ring.zero()
    assert (-x).lead_coefficient() == P - 1
    assert (x.scale(7)).monic() == x


def test_text_parse_and_json(ring):
    x, y, z = ring.gens()
    f = 3 * x ** 2 * y + 100 * z ** 3 + y
    assert ring.parse(f.to_text()) == f
    assert type(f).from_json(ring, f.to_json()) == f


def test_partial_derivatives_and_evaluation(ring):
    x, y, z = ring.gens()
    f = x ** 3 * y + 2 * y * z ** 2
    assert f.partial_derivative(0) == 3 * x ** 2 * y
    assert f.partial_derivative(2, 2) == 4 * y
    assert f.derivative((1, 1, 0)) == 3 * x ** 2
    assert f.evaluate((1, 2, 3)) == (2 + 36) % P
    assert f.gradient_at((1, 2, 3)) == [6, (1 + 18) % P, 24]


def random_poly(ring, rng, top=3):
    """Sum of random homogeneous pieces of degrees 0..top."""
    f = ring.zero()
    for d in range(top + 1):
        f = f + ring.basis(d).polynomial(rng.integers(0, ring.p, size=len(ring.graded_basis(d))))
    return f


@pytest.mark.parametrize("seed", range(30))
def test_ring_axioms_on_random_samples(ring, seed):
    rng = np.random.default_rng([seed, 3])
    f, g, h = (random_poly(ring, rng) for _ in range(3))
    assert f + g == g + f
    assert f * g == g * f
    assert (f + g) + h == f + (g + h)
    assert (f * g) * h == f * (g * h)
    assert f * (g + h) == f * g + f * h
    assert f + ring.zero() == f
    assert f * ring.one() == f
    assert (f - f).is_zero()


@pytest.mark.parametrize("seed", range(30))
def test_mixed_partials_commute(ring, seed):
    rng = np.random.default_rng([seed, 4])
    f = random_poly(ring, rng, top=4)
    for i in range(ring.nvars):
        for j in range(i + 1, ring.nvars):
            assert f.partial_derivative(i).partial_derivative(j) == f.partial_derivative(j).partial_derivative(i)


@pytest.mark.parametrize("seed", range(30))
def test_evaluation_is_a_ring_homomorphism(ring, seed):
    rng = np.random.default_rng([seed, 5])
    f, g = random_poly(ring, rng), random_poly(ring, rng)
    point = tuple(int(c) for c in rng.integers(0, P, size=ring.nvars))
    assert (f + g).evaluate(point) == (f.evaluate(point) + g.evaluate(point)) % P
    assert (f * g).evaluate(point) == f.evaluate(point) * g.evaluate(point) % P
    assert ring.one().evaluate(point) == 1


def test_derivative_orders_reaching_the_characteristic():
    small = PolyRing(("s", "t"), 11)
    s = small.gen(0)
    # d^11/ds^11 of s^11 is 11! which vanishes mod 11
    assert (s ** 11).partial_derivative(0, 11).is_zero()


def test_substitute_into_another_ring(ring):
    x, y, z = ring.gens()
    target = PolyRing(("a", "b"), P)
    a, b = target.gens()
    f = x * y - z ** 2
    assert f.substitute(target, [a, b, a + b]) == a * b - (a + b) ** 2


def test_transfer_and_elimination_ring(ring):
    x, y, z = ring.gens()
    elim = ring.elimination_ring(["z"])
    assert elim.names == ("z", "x", "y")
    f = ring.transfer(x * z + y, elim)
    assert f.lead_monomial() == elim.monomials.pack((1, 1, 0))
    with pytest.raises(ValueError):
        ring.transfer(x, PolyRing(("y", "z"), P))


def test_graded_basis_coordinates(ring):
    x, y, z = ring.gens()
    basis = GradedBasis(ring, 2)
    assert len(basis) == 6
    f = 4 * x * y + z ** 2
    assert basis.polynomial(basis.vector(f)) == f
    mat = basis.matrix([x * x, y * z])
    assert mat.shape == (6, 2)
    with pytest.raises(ValueError):
        basis.vector(x)


def test_coordinates_in_basis(ring):
    x, y, z = ring.gens()
    quadrics = [x * x, x * y + z * z, y * y]
    assert coordinates_in_basis(2 * x * x - (x * y + z * z), quadrics) == (2, P - 1, 0)
    with pytest.raises(NotInSpanError) as err:
        coordinates_in_basis(x * z, quadrics)
    assert err.value.residual == x * z


def test_dual_numbers(ring):
    dual = ring.with_mode(CoefficientMode.DUAL)
    x, y, _ = dual.gens()
    eps_y = dual.perturb(ring.zero(), [ring.gen(1)])
    f = x + eps_y
    # ε² = 0
    assert (f * f).base_part() == ring.gen(0) ** 2
    assert (f * f).first_order_part(0) == 2 * ring.gen(0) * ring.gen(1)
    assert (eps_y * eps_y).is_zero()


def test_square_zero_parameters(ring):
    first = ring.with_mode(CoefficientMode.SQUARE_ZERO, 3)
    x, y, z = ring.gens()
    f = first.perturb(x * y, [z * z, ring.zero(), x * z])
    g = first.perturb(z, [ring.zero(), y, ring.zero()])
    h = f * g
    assert h.base_part() == x * y * z
    assert h.first_order_part(0) == z ** 3
    assert h.first_order_part(1) == x * y * y
    assert h.first_order_part(2) == x * z * z
    with pytest.raises(ValueError):
        ring.perturb(x, [y])


def test_plane_point_normalization():
    pt = PlanePoint.normalize((2, 4, 2), P)
    assert pt.coords == (1, 2, 1)
    assert pt.chart == 2
    assert pt.free_coordinates == (0, 1)
    assert PlanePoint.normalize((3, 0, 0), P).coords == (1, 0, 0)
    with pytest.raises(ValueError):
        PlanePoint.normalize((0, 0, 0), P)


if __name__ == "__main__":
    console.print("[bold cyan]Graded polynomial ring tests[/bold cyan]\n")
    sys.exit(pytest.main([__file__, "-v"]))
