"""Lattice points on ellipses and ellipsoids cut from the paraboloid.

Covers the Kronecker symbol, Dirichlet's representation count for binary
quadratic forms, the reduction of an ellipse section to a centered primitive
integer form, recursive slicing of higher-dimensional sections, and the
pairwise common-point count that certifies K_{2,t}-freeness.
"""

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from math import gcd, isqrt, lcm
from typing import NamedTuple

from .errors import DegenerateElimination, DomainError, NoIntegerSolutions, NotElliptic
from .exact import as_rational, as_vector, content, denominator, rref, solve_affine
from .incidence import DEFAULT_PAIR_LIMIT
from .incidence import max_common_points as _max_common_indices
from .surfaces import Hyperplane


# ---------------------------------------------------------------- characters

def jacobi_symbol(a, n):
    """Jacobi symbol (a/n) for odd n >= 1."""
    if n < 1 or n % 2 == 0:
        raise DomainError(f"Jacobi symbol needs odd n >= 1, got {n}")
    a %= n
    result = 1
    while a:
        while a % 2 == 0:
            a //= 2
            if n % 8 in (3, 5):
                result = -result
        a, n = n, a
        if a % 4 == 3 and n % 4 == 3:
            result = -result
        a %= n
    return result if n == 1 else 0


def kronecker_symbol(D, m):
    """Kronecker symbol (D/m) for m >= 1, completely multiplicative in m."""
    if m < 1:
        raise DomainError(f"Kronecker symbol here needs m >= 1, got {m}")
    sign = 1
    if m % 2 == 0:
        if D % 2 == 0:
            return 0
        v = 0
        while m % 2 == 0:
            m //= 2
            v += 1
        if v % 2 == 1 and D % 8 in (3, 5):
            sign = -1
    return sign * jacobi_symbol(D, m)


def divisors(n):
    if n < 1:
        raise DomainError(f"divisors of {n} requested")
    small, large = [], []
    i = 1
    while i * i <= n:
        if n % i == 0:
            small.append(i)
            if i * i != n:
                large.append(n // i)
        i += 1
    return small + large[::-1]


def discriminant_conductor(D):
    """Largest f with D / f^2 still a discriminant (congruent to 0 or 1 mod 4)."""
    if D >= 0:
        raise DomainError("conductor is defined here for negative discriminants")
    best = 1
    for f in range(2, isqrt(-D) + 1):
        if D % (f * f) == 0 and (D // (f * f)) % 4 in (0, 1):
            best = f
    return best


def unit_count(D):
    """6 for D = -3, 4 for D = -4, 2 for any other negative discriminant."""
    return {-3: 6, -4: 4}.get(D, 2)


# ------------------------------------------------------------ binary forms

@dataclass(frozen=True)
class QuadraticForm:
    """c1 x^2 + c2 y^2 + c3 xy = c4 over the integers."""

    c1: int
    c2: int
    c3: int
    c4: int

    @property
    def discriminant(self):
        return self.c3 * self.c3 - 4 * self.c1 * self.c2

    @property
    def primitive(self):
        return gcd(gcd(self.c1, self.c2), self.c3) == 1

    def value(self, x, y):
        return self.c1 * x * x + self.c2 * y * y + self.c3 * x * y


def dirichlet_count(F):
    """k * sum_{m | c4} (D/m) with k fixed by the discriminant.

    This is Dirichlet's total over a full set of classes of discriminant D,
    so for one form it is an upper bound (equality when D has class number
    one). The bound is guaranteed when D is fundamental or gcd(c4, f) = 1
    for the conductor f of D; otherwise it can fail, e.g. x^2 + 4y^2 = 4.
    """
    D = F.discriminant
    if D >= 0:
        raise DomainError(f"discriminant {D} is not negative")
    if not F.primitive:
        raise DomainError(f"gcd(c1, c2, c3) = {gcd(gcd(F.c1, F.c2), F.c3)} != 1")
    if F.c4 < 1:
        raise DomainError(f"c4 must be >= 1, got {F.c4}")
    return unit_count(D) * sum(kronecker_symbol(D, m) for m in divisors(F.c4))


def _definite(F):
    """Return an equivalent positive definite form (all signs flipped if needed)."""
    if F.discriminant >= 0:
        raise DomainError(f"discriminant {F.discriminant} >= 0: solution set unbounded")
    if F.c1 < 0:
        return QuadraticForm(-F.c1, -F.c2, -F.c3, -F.c4)
    return F


def form_solutions(F):
    """All integer (x, y) with F.value(x, y) == c4, in increasing (x, y) order.

    x ranges over the exact extent |x| <= ceil(sqrt(4 c2 c4 / -D)); for each
    x the two candidate y are the integer roots of the quadratic in y.
    """
    F = _definite(F)
    c1, c2, c3, c4 = F.c1, F.c2, F.c3, F.c4
    if c4 < 0:
        return []
    if c4 == 0:
        return [(0, 0)]
    negD = -F.discriminant
    X = isqrt(4 * c2 * c4 // negD) + 1
    out = []
    for x in range(-X, X + 1):
        disc = (c3 * x) ** 2 - 4 * c2 * (c1 * x * x - c4)
        if disc < 0:
            continue
        s = isqrt(disc)
        if s * s != disc:
            continue
        ys = {(-c3 * x + s), (-c3 * x - s)}
        for num in sorted(ys):
            if num % (2 * c2) == 0:
                out.append((x, num // (2 * c2)))
    return out


def brute_force_form_count(F):
    return len(form_solutions(F))


# ------------------------------------------------------------ conics

@dataclass(frozen=True)
class Conic:
    """a1 x^2 + a2 y^2 + a3 xy + a4 x + a5 y - a6 = 0 in the projected plane.

    ``axes`` names the two ambient coordinates used as (x, y); ``lift`` maps
    every other ambient coordinate to (const, {axis: coeff}).
    """

    a1: object
    a2: object
    a3: object
    a4: object
    a5: object
    a6: object
    axes: tuple = (0, 1)
    lift: dict = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        for name in ("a1", "a2", "a3", "a4", "a5", "a6"):
            object.__setattr__(self, name, as_rational(getattr(self, name)))

    @property
    def coefficients(self):
        return (self.a1, self.a2, self.a3, self.a4, self.a5, self.a6)

    @property
    def is_elliptic(self):
        return self.a1 != 0 and self.a2 != 0 and self.a3 ** 2 < 4 * self.a1 * self.a2

    def evaluate(self, x, y):
        return (self.a1 * x * x + self.a2 * y * y + self.a3 * x * y
                + self.a4 * x + self.a5 * y - self.a6)

    def center(self):
        """Unique solution of 2a1 px + a3 py + a4 = 0, a3 px + 2a2 py + a5 = 0."""
        if not self.is_elliptic:
            raise NotElliptic(self._kind())
        det = Fraction(4 * self.a1 * self.a2 - self.a3 ** 2)
        px = (-self.a4 * 2 * self.a2 + self.a3 * self.a5) / det
        py = (-2 * self.a1 * self.a5 + self.a3 * self.a4) / det
        return as_rational(px), as_rational(py)

    def lift_point(self, x, y):
        """Ambient point over (x, y), using the elimination map."""
        if self.lift is None:
            raise DomainError("conic carries no lift map")
        d = len(self.lift) + 2
        coords = [None] * d
        coords[self.axes[0]], coords[self.axes[1]] = x, y
        for j, (c, lin) in self.lift.items():
            coords[j] = as_rational(c + lin[self.axes[0]] * x + lin[self.axes[1]] * y)
        return tuple(coords)

    def _kind(self):
        disc = self.a3 ** 2 - 4 * self.a1 * self.a2
        if disc == 0:
            return "parabola (a3^2 = 4 a1 a2)"
        if disc > 0:
            return "hyperbola (a3^2 > 4 a1 a2)"
        return "degenerate conic (a1 or a2 vanishes)"


@dataclass(frozen=True)
class ProperEllipsoidSpec:
    """Section of the paraboloid x_d = |x'|^2 by d - k - 1 hyperplanes.

    ``general`` holds the two hyperplanes with arbitrary integer coefficients,
    each as (coeffs, rhs) meaning coeffs . x = rhs; ``axis`` holds the
    remaining ones as (index, value) meaning x_index = value. Indices are
    0-based, so index d - 1 is the paraboloid's height coordinate.
    """

    d: int
    k: int
    general: tuple
    axis: tuple = ()

    def __post_init__(self):
        general = tuple((as_vector(c), as_rational(r)) for c, r in self.general)
        axis = tuple((int(i), as_rational(v)) for i, v in self.axis)
        object.__setattr__(self, "general", general)
        object.__setattr__(self, "axis", axis)
        if self.d < 4:
            raise DomainError(f"proper sections need d >= 4, got {self.d}")
        if len(general) != 2:
            raise DomainError("exactly two general hyperplanes are required")
        for c, _ in general:
            if len(c) != self.d:
                raise DomainError(f"hyperplane has {len(c)} coefficients, expected {self.d}")
            if all(x == 0 for x in c):
                raise DomainError("zero hyperplane")
        idx = [i for i, _ in axis]
        if len(set(idx)) != len(idx) or any(not 0 <= i < self.d for i in idx):
            raise DomainError("axis hyperplanes must fix distinct coordinates")
        if len(general) + len(axis) != self.d - self.k - 1:
            raise DomainError(
                f"a {self.k}-dimensional section in R^{self.d} needs {self.d - self.k - 1} "
                f"hyperplanes, got {len(general) + len(axis)}")

    def equations(self):
        rows = [list(c) for c, _ in self.general]
        rhs = [r for _, r in self.general]
        for i, v in self.axis:
            e = [0] * self.d
            e[i] = 1
            rows.append(e)
            rhs.append(v)
        return rows, rhs

    @classmethod
    def from_hyperplanes(cls, h1, h2, axis=()):
        """Spec from two Hyperplane objects plus optional axis constraints."""
        d = h1.dimension
        general = tuple((h.normal, -h.offset) for h in (h1, h2))
        return cls(d, d - 3 - len(axis), general, tuple(axis))


def _conic_from_lift(d, axes, lift):
    """Substitute the affine lift into sum_{i<d} x_i^2 - x_d."""
    u, v = axes
    terms = {}
    for j in range(d):
        if j == u:
            terms[j] = (0, 1, 0)
        elif j == v:
            terms[j] = (0, 0, 1)
        else:
            c, lin = lift[j]
            terms[j] = (c, lin[u], lin[v])
    a1 = a2 = a3 = a4 = a5 = const = Fraction(0)
    for j in range(d - 1):
        c, al, be = terms[j]
        a1 += al * al
        a2 += be * be
        a3 += 2 * al * be
        a4 += 2 * c * al
        a5 += 2 * c * be
        const += c * c
    c, al, be = terms[d - 1]
    return Conic(a1, a2, a3, a4 - al, a5 - be, -(const - c), axes, lift)


def _eliminate(d, rows, rhs, axes):
    if not (0 <= axes[0] < d - 1 and 0 <= axes[1] < d - 1 and axes[0] != axes[1]):
        raise DomainError(f"free axes {axes} must be two distinct coordinates below d")
    unknowns = [j for j in range(d) if j not in axes]
    return solve_affine(rows, rhs, unknowns, list(axes))


def conic_from_intersection(spec, axes=(0, 1)):
    """Project an ellipse section onto the ``axes`` plane by exact elimination."""
    if spec.k != 1:
        raise DomainError(f"ellipse sections have k = 1, got k = {spec.k}")
    rows, rhs = spec.equations()
    lift = _eliminate(spec.d, rows, rhs, axes)
    if lift is None:
        raise DegenerateElimination(
            f"hyperplanes cannot be solved for the coordinates outside {axes}")
    conic = _conic_from_lift(spec.d, tuple(axes), lift)
    if not conic.is_elliptic:
        raise NotElliptic(f"section is a {conic._kind()}")
    return conic


class ReducedForm(NamedTuple):
    form: QuadraticForm
    refinement: int  # L: integer points (x, y) become X = L(x - px), Y = L(y - py)
    center: tuple


def reduce_to_integer_form(conic):
    """Center, refine, scale and normalize an elliptic conic to c1X^2+c2Y^2+c3XY = c4.

    Raises NoIntegerSolutions when gcd(c1, c2, c3) > 1 after normalization.
    """
    px, py = conic.center()
    a1, a2, a3, a4, a5, a6 = conic.coefficients
    rhs = a6 - (a1 * px * px + a2 * py * py + a3 * px * py + a4 * px + a5 * py)
    L = lcm(denominator(px), denominator(py))
    coeffs = [Fraction(a1), Fraction(a2), Fraction(a3), Fraction(rhs) * L * L]
    scale = 1
    for c in coeffs:
        scale = lcm(scale, c.denominator)
    ints = [int(c * scale) for c in coeffs]
    g = content(ints)
    ints = [c // g for c in ints]
    if ints[0] < 0:
        ints = [-c for c in ints]
    form = QuadraticForm(*ints)
    g3 = gcd(gcd(form.c1, form.c2), form.c3)
    if g3 > 1:
        raise NoIntegerSolutions(
            f"gcd(c1, c2, c3) = {g3} does not divide c4 = {form.c4}", gcd=g3)
    return ReducedForm(form, L, (px, py))


# ------------------------------------------------------------ counting

class EllipseCount(NamedTuple):
    exact: int
    dirichlet: object  # int, or None when the reduced form is outside the formula's domain


def _in_box(x, B):
    return isinstance(x, int) and abs(x) <= B


def _free_axis_candidates(d, first=(0, 1)):
    pairs = [first] + [p for p in combinations(range(d - 1), 2) if p != tuple(first)]
    return pairs


def _plane_count(d, rows, rhs, B, axes=None):
    """Count paraboloid lattice points in the box on a 2-dimensional flat.

    Goes through the reduced integer form: its integer solutions in the
    right residue class mod L pull back to integer points of the projection.
    """
    candidates = [tuple(axes)] if axes else _free_axis_candidates(d)
    lift = None
    for ax in candidates:
        lift = _eliminate(d, rows, rhs, ax)
        if lift is not None:
            axes = ax
            break
    if lift is None:
        raise DegenerateElimination("no coordinate pair parametrizes this flat")
    conic = _conic_from_lift(d, axes, lift)
    if not conic.is_elliptic:
        raise NotElliptic(f"section is a {conic._kind()}")
    try:
        red = reduce_to_integer_form(conic)
    except NoIntegerSolutions:
        return EllipseCount(0, 0), conic, None
    px, py = red.center
    L = red.refinement
    count = 0
    for X, Y in form_solutions(red.form):
        x, y = as_rational(Fraction(X) / L + px), as_rational(Fraction(Y) / L + py)
        if not (_in_box(x, B) and _in_box(y, B)):
            continue
        p = conic.lift_point(x, y)
        if all(isinstance(c, int) for c in p) and all(abs(c) <= B for c in p[:-1]):
            count += 1
    F = red.form
    dv = None
    if F.c4 >= 1 and F.discriminant < 0 and F.primitive:
        dv = dirichlet_count(F)
    return EllipseCount(count, dv), conic, red


def count_lattice_points_on_ellipse(spec, box):
    """(exact count in the box, Dirichlet value of the reduced form)."""
    if spec.k != 1:
        raise DomainError(f"ellipse sections have k = 1, got k = {spec.k}")
    rows, rhs = spec.equations()
    res, _, _ = _plane_count(spec.d, rows, rhs, box)
    return res


def _section(d, rows, rhs):
    """Independent equations of the flat, or None when inconsistent."""
    R, piv = rref([list(r) + [b] for r, b in zip(rows, rhs)])
    if d in piv:
        return None
    return [r[:d] for r in R], [r[d] for r in R]


def _constant_on_flat(rows, j, d):
    e = [0] * d
    e[j] = 1
    _, piv = rref(rows + [e])
    return len(piv) == len(rows)


def _count_section(d, rows, rhs, B):
    sec = _section(d, rows, rhs)
    if sec is None:
        return 0
    rows, rhs = sec
    if all(r[d - 1] == 0 for r in rows):
        raise NotElliptic("the flat contains the vertical direction; the section is unbounded")
    dim = d - len(rows)
    if dim == 2:
        return _plane_count(d, rows, rhs, B)[0].exact
    if dim == 0:
        # unique point: read it off the reduced rows
        p = [None] * d
        for r, b in zip(rows, rhs):
            p[next(j for j in range(d) if r[j] != 0)] = as_rational(b)
        ok = all(isinstance(c, int) for c in p) and all(abs(c) <= B for c in p[:-1])
        return int(ok and p[-1] == sum(c * c for c in p[:-1]))
    j = next(j for j in range(d - 1) if not _constant_on_flat(rows, j, d))
    e = [0] * d
    e[j] = 1
    return sum(_count_section(d, rows + [e], rhs + [c], B) for c in range(-B, B + 1))


def count_lattice_points_on_ellipsoid(spec, box):
    """Exact count by slicing with axis-orthogonal hyperplanes down to ellipses."""
    if not 1 <= spec.k <= spec.d - 3:
        raise DomainError(f"k must lie in [1, d-3] = [1, {spec.d - 3}], got {spec.k}")
    rows, rhs = spec.equations()
    return _count_section(spec.d, rows, rhs, box)


# ------------------------------------------------------------ K_{2,t}

class CommonPoints(NamedTuple):
    t_max: int
    witness: object  # (H, H') or None


def max_common_points(points, hyperplanes, pair_limit=DEFAULT_PAIR_LIMIT, workers=1):
    """Most points of P on two hyperplanes of the family, with a witnessing pair.

    No two members share t_max + 1 points, so the incidence graph has no
    K_{2, t_max + 1} with the 2 on the hyperplane side.
    """
    t, pair = _max_common_indices(points, hyperplanes, pair_limit=pair_limit, workers=workers)
    if pair is None:
        return CommonPoints(0, None)
    if hasattr(hyperplanes, "hyperplane"):
        get = hyperplanes.hyperplane
    else:
        seq = list(hyperplanes)
        get = seq.__getitem__
    return CommonPoints(t, (get(pair[0]), get(pair[1])))


def hyperplane_pair_spec(h1, h2):
    """The ellipse spec cut by two hyperplanes in R^4 (or higher, with k = d - 3)."""
    if not isinstance(h1, Hyperplane) or not isinstance(h2, Hyperplane):
        raise TypeError("expected two Hyperplane objects")
    return ProperEllipsoidSpec.from_hyperplanes(h1, h2)
