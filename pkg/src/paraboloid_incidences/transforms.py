"""Incidence-preserving maps: point-hyperplane duality, inversion, shear.

All maps are exact. Duality sends the non-vertical hyperplane
x_d = c.x' + c0 to the point (c, -c0) and the point p to the hyperplane
y_d = p'.y' - p_d. Inversion is x -> x / |x|^2. The shear adds f(x') to the
last coordinate, turning hyperplanes into graphs of a linearly-closed family.
"""

from dataclasses import dataclass
from fractions import Fraction
from itertools import count

from .errors import DomainError
from .exact import as_rational, as_vector
from .surfaces import GraphHypersurface, Hyperplane, Hypersphere


def _hyperplane_list(hyperplanes):
    if hasattr(hyperplanes, "hyperplanes"):
        return hyperplanes.hyperplanes()
    return list(hyperplanes)


def _point_list(points):
    pts = points.points if hasattr(points, "points") else points
    return [as_vector(p) for p in pts]


# ---------------------------------------------------------------- duality

def dual_point(h):
    """Hyperplane x_d = c.x' + c0  ->  point (c_1, ..., c_{d-1}, -c0)."""
    if h.is_vertical:
        raise DomainError(f"vertical hyperplane {h} has no dual point")
    slopes, c0 = h.graph_form()
    return slopes + (as_rational(-c0),)


def dual_hyperplane(p):
    """Point p  ->  hyperplane y_d = p_1 y_1 + ... + p_{d-1} y_{d-1} - p_d."""
    p = as_vector(p)
    return Hyperplane.from_graph(p[:-1], -p[-1])


def dualize(points, hyperplanes):
    """(dual points of the hyperplanes, dual hyperplanes of the points).

    Row order is kept, so hyperplane i becomes point i and point j becomes
    hyperplane j; the incidence matrix is transposed.
    """
    return ([dual_point(h) for h in _hyperplane_list(hyperplanes)],
            [dual_hyperplane(p) for p in _point_list(points)])


# ---------------------------------------------------------------- inversion

def invert_point(p):
    p = as_vector(p)
    r2 = sum(x * x for x in p)
    if r2 == 0:
        raise DomainError("the origin has no inversion image")
    return tuple(as_rational(Fraction(x) / r2) for x in p)


def invert_hyperplane(h):
    """Image of a.x = c (c != 0): sphere through the origin, center a/(2c), r^2 = |a|^2/(4c^2)."""
    c = -Fraction(h.offset)
    if c == 0:
        raise DomainError(f"hyperplane {h} passes through the origin")
    a = h.normal
    return Hypersphere(tuple(Fraction(x) / (2 * c) for x in a),
                       Fraction(sum(x * x for x in a)) / (4 * c * c))


def translate_point(p, t):
    return tuple(as_rational(x + y) for x, y in zip(p, t))


def translate_hyperplane(h, t):
    """The hyperplane {x + t : x in h}."""
    return Hyperplane(h.normal, h.offset - sum(a * s for a, s in zip(h.normal, t)))


def _search_directions(d):
    yield (1,) + (0,) * (d - 1)
    for s in count(1):
        yield tuple(s ** i for i in range(d))


def find_translation(points, hyperplanes):
    """Deterministic translation moving every point and hyperplane off the origin.

    Tries 0 first, then j*w for j = 1, 2, ... along the first direction w
    (e_1, then moment-curve vectors (1, s, s^2, ...)) that is not parallel to
    any hyperplane through the origin. Along such w each point and each
    hyperplane rules out at most one j, so the scan stops.
    """
    pts = _point_list(points)
    hs = _hyperplane_list(hyperplanes)
    d = len(pts[0]) if pts else (hs[0].dimension if hs else 0)
    if d == 0:
        raise DomainError("empty configuration")

    def ok(t):
        if any(all(x + y == 0 for x, y in zip(p, t)) for p in pts):
            return False
        return all(h.offset != sum(a * s for a, s in zip(h.normal, t)) for h in hs)

    zero = (0,) * d
    if ok(zero):
        return zero
    through_origin = [h.normal for h in hs if h.offset == 0]
    for w in _search_directions(d):
        if all(sum(a * x for a, x in zip(n, w)) != 0 for n in through_origin):
            break
    for j in count(1):
        t = tuple(j * x for x in w)
        if ok(t):
            return t


@dataclass(frozen=True)
class InversionResult:
    points: list
    spheres: list
    translation: tuple


def apply_inversion_config(points, hyperplanes):
    """Translate (see ``find_translation``), then invert all points and hyperplanes."""
    pts = _point_list(points)
    hs = _hyperplane_list(hyperplanes)
    t = find_translation(pts, hs)
    moved_pts = [translate_point(p, t) for p in pts]
    moved_hs = [translate_hyperplane(h, t) for h in hs]
    return InversionResult([invert_point(p) for p in moved_pts],
                           [invert_hyperplane(h) for h in moved_hs], t)


# ---------------------------------------------------------------- shear

class QuadraticFormShear:
    """f(x') = x'^T Q x' for a symmetric rational matrix Q (given as rows)."""

    def __init__(self, matrix, tag="quadratic-form"):
        Q = tuple(as_vector(row) for row in matrix)
        if any(len(row) != len(Q) for row in Q):
            raise DomainError("shear matrix must be square")
        self.matrix = Q
        self.tag = tag

    @classmethod
    def sum_of_squares(cls, d):
        """x_1^2 + ... + x_{d-1}^2."""
        m = d - 1
        return cls([[int(i == j) for j in range(m)] for i in range(m)], "sum-of-squares")

    @property
    def arity(self):
        return len(self.matrix)

    def __call__(self, xprime):
        if len(xprime) != len(self.matrix):
            raise DomainError(f"shear expects {len(self.matrix)} coordinates, got {len(xprime)}")
        return as_rational(sum(q * a * b for row, a in zip(self.matrix, xprime)
                               for q, b in zip(row, xprime)))

    def __repr__(self):
        return f"QuadraticFormShear({self.matrix!r})"


def shear_point(p, f):
    p = as_vector(p)
    return p[:-1] + (as_rational(p[-1] + f(p[:-1])),)


def unshear_point(p, f):
    p = as_vector(p)
    return p[:-1] + (as_rational(p[-1] - f(p[:-1])),)


def shear_hyperplane(h, f, tag=None):
    slopes, c0 = h.graph_form()
    return GraphHypersurface(slopes, c0, f, tag or getattr(f, "tag", "graph"))


def shear_map(points, hyperplanes, f):
    """phi(x) = (x', x_d + f(x')) on points; x_d = l(x') becomes x_d = l(x') + f(x')."""
    return ([shear_point(p, f) for p in _point_list(points)],
            [shear_hyperplane(h, f) for h in _hyperplane_list(hyperplanes)])
