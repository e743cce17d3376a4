#!/usr/bin/env python3
"""
Tests for the Gröbner engine, Hilbert series and graded free-module maps.

Small bases are checked against sympy and against the S-pair criterion: a set
G is a Gröbner basis when every S-polynomial of two members reduces to zero
modulo G.
"""
import sys
from itertools import combinations, combinations_with_replacement

import numpy as np
import pytest
from rich.console import Console
from sympy import Poly, groebner as sympy_groebner, symbols

from hexagonal.algebra.gb import (
    FreeModuleMap,
    Ideal,
    eliminate,
    exact_divide,
    hilbert_from_leads,
    intersect,
    is_member,
    lift_through,
    normal_form,
    quotient,
    row_map,
    saturate,
    spoly,
    syzygies,
)
from hexagonal.algebra.poly import PolyRing
from hexagonal.errors import LiftError

console = Console()

P = 32003


@pytest.fixture(scope="module")
def ring():
    return PolyRing(("x", "y", "z", "w"), P)


def assert_groebner(basis, generators):
    """S-pair fixed point, membership of the generators and reducedness."""
    for f, g in combinations(basis, 2):
        assert normal_form(spoly(f, g), basis).is_zero()
    for f in generators:
        assert normal_form(f, basis).is_zero()
    divides = basis[0].ring.monomials.divides
    for g in basis:
        assert g.lead_coefficient() == 1
        for h in basis:
            if h is not g:
                assert not any(divides(h.lead_monomial(), m) for m in g.terms)


def from_sympy(ring, expr, syms):
    poly = Poly(expr, *syms, modulus=ring.p)
    return ring.from_terms((exps, int(c) % ring.p) for exps, c in poly.terms())


def twisted_cubic(ring):
    x, y, z, w = ring.gens()
    return [x * z - y * y, x * w - y * z, y * w - z * z]


def test_twisted_cubic_basis(ring):
    gens = twisted_cubic(ring)
    basis = Ideal(ring, gens).groebner()
    assert len(basis) == 3
    assert_groebner(basis, gens)


def test_matches_sympy(ring):
    syms = symbols("x y z w")
    x, y, z, w = syms
    exprs = [x ** 2 * y - 3 * z * w ** 2, x * y * z + y ** 3 - w ** 3, x ** 3 - 2 * y * z ** 2 + z * w ** 2]
    gens = [from_sympy(ring, e, syms) for e in exprs]
    ours = Ideal(ring, gens).groebner()
    assert_groebner(ours, gens)
    theirs = sympy_groebner(exprs, *syms, order="grevlex", modulus=P)
    expected = sorted(from_sympy(ring, g, syms).monic().to_text() for g in theirs.exprs)
    assert sorted(g.to_text() for g in ours) == expected


def random_form(ring, rng, degree, terms):
    size = len(ring.graded_basis(degree))
    vec = np.zeros(size, dtype=np.int64)
    chosen = rng.choice(size, size=min(terms, size), replace=False)
    vec[chosen] = rng.integers(1, ring.p, size=len(chosen))
    return ring.basis(degree).polynomial(vec)


@pytest.mark.parametrize("seed", range(25))
def test_random_ideals_reach_the_s_pair_fixed_point(ring, seed):
    rng = np.random.default_rng([seed, 25])
    degrees = [2, 2, 3] if seed % 2 else [2, 3, 3]
    gens = [random_form(ring, rng, d, 4) for d in degrees]
    basis = Ideal(ring, gens).groebner()
    assert_groebner(basis, gens)
    linear = Ideal(ring, gens).groebner("linear")
    assert [g.to_text() for g in linear] == [g.to_text() for g in basis]


def test_linear_backend_agrees(ring):
    x, y, z, w = ring.gens()
    gens = [x * x + y * z - w * w, x * y * z - z ** 3 + y * w * w]
    slow = Ideal(ring, gens).groebner("buchberger")
    fast = Ideal(ring, gens).groebner("linear")
    assert [g.to_text() for g in slow] == [g.to_text() for g in fast]
    with pytest.raises(ValueError):
        Ideal(ring, gens).groebner("f4")


def test_unit_ideal(ring):
    x, y, _, _ = ring.gens()
    ideal = Ideal(ring, [x * y - 1, x])
    assert ideal.is_unit()
    assert ideal.contains(ring.one())


def test_membership(ring):
    gens = twisted_cubic(ring)
    x, y, z, w = ring.gens()
    ideal = Ideal(ring, gens)
    assert ideal.contains(w * gens[0] - 5 * x * gens[2])
    assert not ideal.contains(x * w)
    assert is_member(gens[1], ideal)


def test_exact_divide(ring):
    x, y, _, _ = ring.gens()
    assert exact_divide(x * x - y * y, x - y) == x + y
    with pytest.raises(ValueError):
        exact_divide(x * x + y, x)


def test_eliminate_parametrization():
    ring = PolyRing(("t", "x", "y"), P)
    t, x, y = ring.gens()
    elim = eliminate(Ideal(ring, [x - t ** 2, y - t ** 3]), ["t"])
    assert elim.ring.names == ("x", "y")
    a, b = elim.ring.gens()
    assert elim.equals(Ideal(elim.ring, [b * b - a ** 3]))


def test_intersect_and_quotient(ring):
    x, y, z, _ = ring.gens()
    meet = intersect(Ideal(ring, [x, z]), Ideal(ring, [y]))
    assert meet.equals(Ideal(ring, [x * y, y * z]))
    colon = quotient(Ideal(ring, [x * y, x * z]), Ideal(ring, [x]))
    assert colon.equals(Ideal(ring, [y, z]))


def test_saturate_by_a_linear_form(ring):
    x, y, z, w = ring.gens()
    ideal = Ideal(ring, [x * x * y, x ** 3 * z, w * x])
    assert saturate(ideal, Ideal(ring, [x])).equals(Ideal(ring, [y, z, w]))


def test_saturate_by_a_non_linear_ideal(ring):
    x, y, z, w = ring.gens()
    ideal = Ideal(ring, [x * x * y, x * y * y])
    sat = saturate(ideal, Ideal(ring, [x * y]))
    assert sat.is_unit()


def test_hilbert_of_curves(ring):
    cubic = Ideal(ring, twisted_cubic(ring)).hilbert()
    assert (cubic.projective_dim, cubic.degree, cubic.genus()) == (1, 3, 0)
    x, y, z, w = ring.gens()
    quartic = Ideal(ring, [x * x + y * y - z * w, x * y - z * z + w * w]).hilbert()
    assert (quartic.projective_dim, quartic.degree, quartic.genus()) == (1, 4, 1)
    plane = PolyRing(("u", "v", "s"), P)
    u, v, s = plane.gens()
    quintic = Ideal(plane, [u ** 5 + v ** 5 + s ** 5]).hilbert()
    assert quintic.genus() == 6
    assert quintic.function_value(4) == 15


def test_hilbert_of_points_has_no_genus(ring):
    x, y, z, w = ring.gens()
    points = Ideal(ring, [x, y, z * z - w * w]).hilbert()
    assert points.projective_dim == 0
    assert points.degree == 2
    with pytest.raises(ValueError):
        points.genus()


@pytest.mark.parametrize("seed", [1, 2, 3])
def test_hilbert_numerator_counts_standard_monomials(seed):
    rng = np.random.default_rng(seed)
    nvars = 4
    gens = [tuple(int(e) for e in rng.integers(0, 4, size=nvars)) for _ in range(7)]
    gens = [g for g in gens if any(g)]
    data = hilbert_from_leads(nvars, gens)
    for d in range(9):
        standard = 0
        for combo in combinations_with_replacement(range(nvars), d):
            exps = [0] * nvars
            for v in combo:
                exps[v] += 1
            if not any(all(a >= b for a, b in zip(exps, g)) for g in gens):
                standard += 1
        assert data.function_value(d) == standard


def test_syzygies_of_the_variables():
    ring = PolyRing(("a", "b", "c"), P)
    koszul = row_map(ring, ring.gens())
    first = syzygies(koszul)
    assert first.source_degrees == (2, 2, 2)
    assert koszul.compose(first).is_zero()
    second = syzygies(first, max_degree=4)
    assert second.source_degrees == (3,)
    assert first.compose(second).is_zero()


def test_free_module_map_degree_check(ring):
    x, y, _, _ = ring.gens()
    with pytest.raises(ValueError):
        FreeModuleMap(ring, (0,), (1, 1), [[x, y * y]])
    same = FreeModuleMap.from_json(ring, row_map(ring, [x, y]).to_json())
    assert same == row_map(ring, [x, y])


def test_lift_through(ring):
    x, y, z, _ = ring.gens()
    G = row_map(ring, [x, y])
    B = row_map(ring, [x * z + y * y, 3 * x])
    X = lift_through(G, B, check=True)
    assert G.compose(X) == B
    with pytest.raises(LiftError) as err:
        lift_through(G, row_map(ring, [x * x, z * z]))
    assert err.value.column == 1


if __name__ == "__main__":
    console.print("[bold cyan]Gröbner engine tests[/bold cyan]\n")
    sys.exit(pytest.main([__file__, "-v"]))
