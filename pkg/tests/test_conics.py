import random
from fractions import Fraction
from math import gcd

import pytest
from hypothesis import assume, given
from hypothesis import strategies as st
from sympy.functions.combinatorial.numbers import kronecker_symbol as sympy_kronecker

from oracles import form_count, lattice_points, points_on_flat
from paraboloid_incidences.conics import (Conic, ProperEllipsoidSpec, QuadraticForm,
                                          brute_force_form_count, conic_from_intersection,
                                          count_lattice_points_on_ellipse,
                                          count_lattice_points_on_ellipsoid,
                                          dirichlet_count, discriminant_conductor,
                                          form_solutions, hyperplane_pair_spec,
                                          kronecker_symbol, max_common_points,
                                          reduce_to_integer_form)
from paraboloid_incidences.errors import (DegenerateElimination, DomainError,
                                          NoIntegerSolutions, NotElliptic)
from paraboloid_incidences.hyperplanes import sum_hyperplane
from paraboloid_incidences.lattice import point_set_for_bound
from paraboloid_incidences.surfaces import Hyperplane


def spec4(*planes):
    """d = 4 ellipse spec from (coeffs, rhs) pairs."""
    return ProperEllipsoidSpec(4, 1, planes)


# ---------------------------------------------------------------- Kronecker

def test_kronecker_examples():
    assert kronecker_symbol(-4, 5) == 1
    assert kronecker_symbol(-4, 3) == -1
    assert kronecker_symbol(-4, 2) == 0
    assert kronecker_symbol(5, 1) == 1
    with pytest.raises(DomainError):
        kronecker_symbol(5, 0)


def test_kronecker_against_sympy():
    for D in range(-60, 61):
        for m in range(1, 80):
            assert kronecker_symbol(D, m) == sympy_kronecker(D, m), (D, m)


@given(st.integers(-2000, 2000), st.integers(1, 300), st.integers(1, 300))
def test_kronecker_completely_multiplicative(D, m1, m2):
    assert kronecker_symbol(D, m1 * m2) == kronecker_symbol(D, m1) * kronecker_symbol(D, m2)


# ---------------------------------------------------------------- forms

@pytest.mark.parametrize("c4,count", [(5, 8), (3, 0), (25, 12), (1, 4), (2, 4)])
def test_dirichlet_sum_of_two_squares(c4, count):
    F = QuadraticForm(1, 1, 0, c4)
    assert dirichlet_count(F) == count == brute_force_form_count(F)


def test_brute_force_examples():
    assert brute_force_form_count(QuadraticForm(1, 1, 0, 0)) == 1
    assert form_solutions(QuadraticForm(1, 1, 0, 5)) == [(-2, -1), (-2, 1), (-1, -2), (-1, 2),
                                                         (1, -2), (1, 2), (2, -1), (2, 1)]
    assert brute_force_form_count(QuadraticForm(5, 5, 2, 4)) == form_count(5, 5, 2, 4)
    assert brute_force_form_count(QuadraticForm(5, 5, 2, 12)) == form_count(5, 5, 2, 12) == 2
    with pytest.raises(DomainError):
        brute_force_form_count(QuadraticForm(1, -1, 0, 1))


def test_dirichlet_preconditions():
    with pytest.raises(DomainError):
        dirichlet_count(QuadraticForm(1, -1, 0, 1))   # D > 0
    with pytest.raises(DomainError):
        dirichlet_count(QuadraticForm(2, 2, 2, 2))    # not primitive
    with pytest.raises(DomainError):
        dirichlet_count(QuadraticForm(1, 1, 0, 0))    # c4 < 1


def test_unit_counts_by_discriminant():
    # x^2 + xy + y^2 = 1 has the six units of Z[omega]
    assert dirichlet_count(QuadraticForm(1, 1, 1, 1)) == 6 == brute_force_form_count(QuadraticForm(1, 1, 1, 1))
    # x^2 + 2y^2 = 3 (D = -8): (+-1, +-1)
    assert dirichlet_count(QuadraticForm(1, 2, 0, 3)) == 4 == brute_force_form_count(QuadraticForm(1, 2, 0, 3))


@given(st.integers(1, 12), st.integers(1, 12), st.integers(-12, 12), st.integers(-40, 400))
def test_form_solutions_match_double_loop(c1, c2, c3, c4):
    assume(c3 * c3 < 4 * c1 * c2)
    sols = form_solutions(QuadraticForm(c1, c2, c3, c4))
    assert len(sols) == form_count(c1, c2, c3, c4)
    assert all(c1 * x * x + c2 * y * y + c3 * x * y == c4 for x, y in sols)
    assert len(set(sols)) == len(sols)


def test_negative_definite_forms_flip_sign():
    assert brute_force_form_count(QuadraticForm(-1, -1, 0, -5)) == 8
    assert brute_force_form_count(QuadraticForm(-1, -1, 0, 5)) == 0


def test_sum_of_two_squares_equality_up_to_1000():
    for c4 in range(1, 1001):
        F = QuadraticForm(1, 1, 0, c4)
        assert dirichlet_count(F) == brute_force_form_count(F)


def _random_valid_form(rng):
    while True:
        c1, c2 = rng.randint(1, 40), rng.randint(1, 40)
        c3 = rng.randint(-40, 40)
        D = c3 * c3 - 4 * c1 * c2
        if -1000 < D < 0 and gcd(gcd(c1, c2), c3) == 1:
            c4 = rng.randint(1, 500)
            if gcd(c4, discriminant_conductor(D)) == 1:
                return QuadraticForm(c1, c2, c3, c4)


def test_dirichlet_is_an_upper_bound_on_valid_forms():
    rng = random.Random(11)
    for _ in range(300):
        F = _random_valid_form(rng)
        assert dirichlet_count(F) >= brute_force_form_count(F), F


def test_dirichlet_bound_fails_when_c4_shares_the_conductor():
    # D = -16 has conductor 2; the all-classes sum undercounts this form
    F = QuadraticForm(1, 4, 0, 4)
    assert discriminant_conductor(F.discriminant) == 2
    assert brute_force_form_count(F) == 4  # (+-2, 0), (0, +-1)
    assert dirichlet_count(F) == 2


def test_conductor():
    assert discriminant_conductor(-4) == 1
    assert discriminant_conductor(-16) == 2
    assert discriminant_conductor(-12) == 2
    assert discriminant_conductor(-3 * 25) == 5
    assert discriminant_conductor(-20) == 1


# ---------------------------------------------------------------- conics

def test_conic_from_intersection_examples():
    # x4 = x1 + x2 and 2 x3 = x4
    c = conic_from_intersection(spec4(((1, 1, 0, -1), 0), ((0, 0, 2, -1), 0)))
    assert c.coefficients == (Fraction(5, 4), Fraction(5, 4), Fraction(1, 2), -1, -1, 0)
    circ = conic_from_intersection(spec4(((0, 0, 1, 0), 0), ((0, 0, 0, 1), 1)))
    assert circ.coefficients == (1, 1, 0, 0, 0, 1)
    d5 = ProperEllipsoidSpec(5, 1, [((0, 0, 1, 0, 0), 0), ((0, 0, 0, 0, 1), 1)], [(3, 0)])
    assert conic_from_intersection(d5).coefficients == (1, 1, 0, 0, 0, 1)


def test_conic_errors_are_distinct():
    # x1 = 0, x2 = 0: the section x4 = x3^2 projects to a line pair, elimination fails
    with pytest.raises(DegenerateElimination):
        conic_from_intersection(spec4(((1, 0, 0, 0), 0), ((0, 1, 0, 0), 0)))
    # a non-vertical slice of the paraboloid is always an ellipse
    assert conic_from_intersection(spec4(((0, 0, 1, 0), 0), ((0, 1, 0, -1), 0))).is_elliptic
    with pytest.raises(NotElliptic):
        Conic(1, -1, 0, 0, 0, 1).center()
    assert not Conic(1, 1, 2, 0, 0, 1).is_elliptic  # parabola-type a3^2 = 4 a1 a2


def test_reduce_examples():
    circ = Conic(1, 1, 0, 0, 0, 1)
    red = reduce_to_integer_form(circ)
    assert red.form == QuadraticForm(1, 1, 0, 1) and red.refinement == 1 and red.center == (0, 0)
    c = Conic(Fraction(5, 4), Fraction(5, 4), Fraction(1, 2), -1, -1, 0)
    red = reduce_to_integer_form(c)
    assert red.center == (Fraction(1, 3), Fraction(1, 3))
    assert red.refinement == 3
    assert red.form == QuadraticForm(5, 5, 2, 12)
    # already centered: translation is the identity
    centered = Conic(2, 3, 1, 0, 0, 7)
    assert reduce_to_integer_form(centered).center == (0, 0)
    assert reduce_to_integer_form(centered).form == QuadraticForm(2, 3, 1, 7)


def test_reduce_gcd_short_circuit():
    spec = spec4(((2, -2, 2, -2), 2), ((2, 2, -2, 1), 3))
    with pytest.raises(NoIntegerSolutions) as info:
        reduce_to_integer_form(conic_from_intersection(spec))
    assert info.value.gcd == 2
    assert count_lattice_points_on_ellipse(spec, 5) == (0, 0)


@given(st.integers(1, 9), st.integers(1, 9), st.integers(-9, 9),
       st.fractions(-5, 5, max_denominator=7), st.fractions(-5, 5, max_denominator=7),
       st.fractions(-20, 20, max_denominator=5))
def test_reduce_invariants(a1, a2, a3, a4, a5, a6):
    assume(a3 * a3 < 4 * a1 * a2)
    c = Conic(a1, a2, a3, a4, a5, a6)
    try:
        red = reduce_to_integer_form(c)
    except NoIntegerSolutions as e:
        assert e.gcd > 1
        return
    F = red.form
    assert gcd(gcd(F.c1, F.c2), gcd(F.c3, F.c4)) == 1
    assert F.c3 ** 2 < 4 * F.c1 * F.c2
    # every reduced solution pulls back onto the original conic
    px, py = red.center
    for X, Y in form_solutions(F):
        assert c.evaluate(Fraction(X, red.refinement) + px, Fraction(Y, red.refinement) + py) == 0


def test_translate_refine_scale_is_a_bijection_on_lattice_points():
    # integer points of the conic in a big box <-> reduced solutions with integral pull-back
    c = Conic(Fraction(5, 4), Fraction(5, 4), Fraction(1, 2), -1, -1, 0)
    direct = {(x, y) for x in range(-10, 11) for y in range(-10, 11) if c.evaluate(x, y) == 0}
    red = reduce_to_integer_form(c)
    px, py = red.center
    L = red.refinement
    pulled = set()
    for X, Y in form_solutions(red.form):
        x, y = Fraction(X, L) + px, Fraction(Y, L) + py
        if x.denominator == 1 and y.denominator == 1:
            pulled.add((int(x), int(y)))
    assert direct == pulled == {(0, 0)}


# ---------------------------------------------------------------- counting

def test_ellipse_count_examples():
    unit = spec4(((0, 0, 1, 0), 0), ((0, 0, 0, 1), 1))
    assert count_lattice_points_on_ellipse(unit, 2) == (4, 4)
    three = spec4(((0, 0, 1, 0), 0), ((0, 0, 0, 1), 3))
    assert count_lattice_points_on_ellipse(three, 2) == (0, 0)
    five = spec4(((0, 0, 1, 0), 0), ((0, 0, 0, 1), 5))
    assert count_lattice_points_on_ellipse(five, 1) == (0, 8)   # the box cuts all 8 off
    assert count_lattice_points_on_ellipse(five, 2) == (8, 8)


def test_ellipsoid_examples():
    sphere = ProperEllipsoidSpec(5, 2, [((0, 0, 0, 1, 0), 0), ((0, 0, 0, 0, 1), 1)])
    assert count_lattice_points_on_ellipsoid(sphere, 2) == 6
    far = ProperEllipsoidSpec(5, 2, [((0, 0, 0, 1, 0), 0), ((0, 0, 0, 0, 1), 100)])
    assert count_lattice_points_on_ellipsoid(far, 2) == 0
    unit = spec4(((0, 0, 1, 0), 0), ((0, 0, 0, 1), 1))
    assert count_lattice_points_on_ellipsoid(unit, 2) == count_lattice_points_on_ellipse(unit, 2).exact
    with pytest.raises(DomainError):
        count_lattice_points_on_ellipsoid(ProperEllipsoidSpec(4, 0, [((1, 0, 0, 0), 0), ((0, 1, 0, 0), 0)], [(2, 0)]), 2)


def test_vertical_flat_rejected():
    spec = ProperEllipsoidSpec(5, 2, [((1, 0, 0, 0, 0), 0), ((0, 1, 0, 0, 0), 0)])
    with pytest.raises(NotElliptic):
        count_lattice_points_on_ellipsoid(spec, 2)


def test_spec_validation():
    with pytest.raises(DomainError):
        ProperEllipsoidSpec(4, 1, [((1, 0, 0, 0), 0)])
    with pytest.raises(DomainError):
        ProperEllipsoidSpec(5, 1, [((1, 0, 0, 0, 0), 0), ((0, 1, 0, 0, 0), 0)], [(2, 0), (2, 1)])
    with pytest.raises(DomainError):
        ProperEllipsoidSpec(4, 1, [((1, 0, 0), 0), ((0, 1, 0, 0), 0)])


def _random_spec(rng, d, k, P):
    gen = []
    for _ in range(2):
        c = [rng.randint(-3, 3) for _ in range(d)]
        if c[-1] == 0:
            c[-1] = rng.choice([-2, -1, 1, 2])
        p = rng.choice(P)
        gen.append((c, sum(a * x for a, x in zip(c, p))))
    p = rng.choice(P)
    axis = [(i, p[i]) for i in rng.sample(range(d - 1), d - k - 3)]
    return ProperEllipsoidSpec(d, k, gen, axis)


@pytest.mark.parametrize("d,k,B", [(4, 1, 3), (5, 1, 2), (5, 2, 2), (6, 1, 2), (6, 2, 2), (6, 3, 2),
                                   (5, 2, 4), (6, 3, 3)])
def test_ellipsoid_counts_equal_enumeration(d, k, B):
    rng = random.Random(1000 * d + 10 * k + B)
    P = lattice_points(d, B)
    checked = 0
    while checked < 15:
        try:
            spec = _random_spec(rng, d, k, P)
            got = count_lattice_points_on_ellipsoid(spec, B)
        except (NotElliptic, DegenerateElimination):
            continue
        assert got == points_on_flat(P, *spec.equations()), spec
        checked += 1


@given(st.data())
def test_ellipse_path_equals_enumeration(data):
    P = lattice_points(4, 3)
    gen = []
    for _ in range(2):
        c = data.draw(st.lists(st.integers(-4, 4), min_size=4, max_size=4))
        p = data.draw(st.sampled_from(P))
        gen.append((c, sum(a * x for a, x in zip(c, p))))
    try:
        spec = spec4(*gen)
        res = count_lattice_points_on_ellipse(spec, 3)
    except DomainError:
        assume(False)
    assert res.exact == points_on_flat(P, *spec.equations())


def test_exact_count_bounded_by_dirichlet_on_sum_plane_pairs():
    P = point_set_for_bound(4, 2)
    rng = random.Random(4)
    vs = sorted({tuple(x + y for x, y in zip(a, b)) for a in P.points for b in P.points})
    for _ in range(40):
        v, w = rng.sample(vs, 2)
        spec = hyperplane_pair_spec(sum_hyperplane(v), sum_hyperplane(w))
        try:
            res = count_lattice_points_on_ellipse(spec, 2)
        except DomainError:
            continue
        assert res.exact == points_on_flat(P.points, *spec.equations())


def test_max_common_points_witness():
    P = point_set_for_bound(4, 2)
    h1 = Hyperplane.from_graph((1, 1, 0), 0)
    h2 = Hyperplane.from_graph((1, -1, 0), 0)
    res = max_common_points(P, [h1, h2])
    assert res.t_max == 2 and res.witness == (h1, h2)
    assert max_common_points(P, [h1]) == (0, None)
