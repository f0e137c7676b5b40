"""Exact hypersurfaces: hyperplanes, hyperspheres and graphs x_d = l(x') + f(x').

All coefficients are ints or Fractions. Each surface knows how to give an
integer row that, dotted with a point's integer feature vector, vanishes
exactly on incidence; ``incidence.py`` batches those dot products.
"""

from dataclasses import dataclass, field
from fractions import Fraction

from .errors import DomainError
from .exact import as_rational, as_vector, common_denominator, fmt_rational


@dataclass(frozen=True)
class Hyperplane:
    """sum_i normal[i] * x_i + offset = 0."""

    normal: tuple
    offset: object = 0

    def __post_init__(self):
        object.__setattr__(self, "normal", as_vector(self.normal))
        object.__setattr__(self, "offset", as_rational(self.offset))
        if all(c == 0 for c in self.normal):
            raise DomainError("hyperplane normal is the zero vector")

    @property
    def dimension(self):
        return len(self.normal)

    @classmethod
    def from_graph(cls, slopes, intercept):
        """The hyperplane x_d = sum_i slopes[i] x_i + intercept."""
        slopes = as_vector(slopes)
        return cls(tuple(-s for s in slopes) + (1,), -as_rational(intercept))

    def evaluate(self, p):
        if len(p) != len(self.normal):
            raise DomainError(f"point has {len(p)} coordinates, hyperplane lives in R^{len(self.normal)}")
        return sum(a * x for a, x in zip(self.normal, p)) + self.offset

    def contains(self, p):
        return self.evaluate(p) == 0

    @property
    def is_vertical(self):
        return self.normal[-1] == 0

    def graph_form(self):
        """(slopes, intercept) with x_d = slopes . x' + intercept."""
        if self.is_vertical:
            raise DomainError("vertical hyperplane has no graph form")
        nd = Fraction(self.normal[-1])
        slopes = tuple(as_rational(-a / nd) for a in self.normal[:-1])
        return slopes, as_rational(-self.offset / nd)

    def integer_row(self):
        coeffs = list(self.normal) + [self.offset]
        s = common_denominator(coeffs)
        return [int(c * s) for c in coeffs]

    def __str__(self):
        return " ".join(fmt_rational(c) for c in self.normal + (self.offset,))


@dataclass(frozen=True)
class Hypersphere:
    """|x - center|^2 = radius_squared."""

    center: tuple
    radius_squared: object

    def __post_init__(self):
        object.__setattr__(self, "center", as_vector(self.center))
        object.__setattr__(self, "radius_squared", as_rational(self.radius_squared))
        if self.radius_squared <= 0:
            raise DomainError("radius squared must be positive")

    @property
    def dimension(self):
        return len(self.center)

    def contains(self, x):
        return sum((a - c) ** 2 for a, c in zip(x, self.center)) == self.radius_squared

    @property
    def passes_through_origin(self):
        return sum(c * c for c in self.center) == self.radius_squared

    def integer_row(self):
        """Integer (A, b_1..b_d, C) with A|x|^2 + b.x + C = 0 on the sphere."""
        coeffs = [1] + [-2 * c for c in self.center] + \
            [sum(c * c for c in self.center) - self.radius_squared]
        s = common_denominator(coeffs)
        return [int(Fraction(c) * s) for c in coeffs]

    def __str__(self):
        return " ".join(fmt_rational(c) for c in self.center + (self.radius_squared,))


@dataclass(frozen=True)
class GraphHypersurface:
    """x_d = slopes . x' + intercept + f(x') for an exact evaluator ``f``."""

    slopes: tuple
    intercept: object
    f: object = field(compare=False)
    tag: str = "graph"

    def __post_init__(self):
        object.__setattr__(self, "slopes", as_vector(self.slopes))
        object.__setattr__(self, "intercept", as_rational(self.intercept))

    @property
    def dimension(self):
        return len(self.slopes) + 1

    def height(self, xprime):
        lin = sum(a * x for a, x in zip(self.slopes, xprime)) + self.intercept
        return as_rational(lin + self.f(tuple(xprime)))

    def contains(self, x):
        return x[-1] == self.height(x[:-1])

    def base_hyperplane(self):
        return Hyperplane.from_graph(self.slopes, self.intercept)
