"""Integer points on the truncated paraboloid x_d = x_1^2 + ... + x_{d-1}^2."""

from dataclasses import dataclass
from itertools import product
from typing import NamedTuple

import numpy as np

from .errors import DomainError
from .exact import iroot

LatticePoint = tuple  # tuple of d Python ints


class Check(NamedTuple):
    """Result of a validation: truthy iff ``ok``; ``reason`` names the first failure."""

    ok: bool
    reason: str = ""

    def __bool__(self):
        return self.ok


@dataclass(frozen=True)
class PointSet:
    """The point set P = S_{n,d} ∩ Z^d, ordered lexicographically on x_1..x_{d-1}."""

    dimension: int
    truncation: int
    n_parameter: int
    points: tuple

    def __len__(self):
        return len(self.points)

    def __iter__(self):
        return iter(self.points)

    def as_array(self):
        return np.array(self.points, dtype=np.int64).reshape(len(self.points), self.dimension)


def truncation_bound(d, n):
    """B = floor(n^(1/(d-1))), computed with integer roots only."""
    if d < 2:
        raise DomainError(f"dimension must be >= 2, got {d}")
    if n < 1:
        raise DomainError(f"n must be a positive integer, got {n}")
    return iroot(n, d - 1)


def paraboloid_points(d, B):
    """All lifts (x', |x'|^2) with x' in [-B, B]^(d-1), in lexicographic order."""
    r = range(-B, B + 1)
    return tuple(x + (sum(c * c for c in x),) for x in product(r, repeat=d - 1))


def build_point_set(d, n):
    """Build P for dimension ``d`` and size parameter ``n``.

    >>> len(build_point_set(4, 27))
    343
    """
    B = truncation_bound(d, n)
    return PointSet(d, B, n, paraboloid_points(d, B))


def point_set_for_bound(d, B):
    """Build P directly from the truncation ``B``, recording n = B^(d-1).

    B = 0 gives the single point at the origin with n = 0, which no
    positive n can reach through ``build_point_set``.
    """
    if d < 2:
        raise DomainError(f"dimension must be >= 2, got {d}")
    if B < 0:
        raise DomainError(f"truncation must be >= 0, got {B}")
    return PointSet(d, B, B ** (d - 1), paraboloid_points(d, B))


def validate_point_set(P):
    d, B = P.dimension, P.truncation
    if d < 2:
        return Check(False, f"dimension {d} < 2")
    if P.n_parameter < 0:
        return Check(False, f"n parameter {P.n_parameter} < 0")
    if B != iroot(P.n_parameter, d - 1):
        return Check(False, f"truncation {B} != floor(n^(1/(d-1))) for n={P.n_parameter}")
    seen = set()
    for i, p in enumerate(P.points):
        if len(p) != d:
            return Check(False, f"point {i} has {len(p)} coordinates, expected {d}")
        if any(abs(c) > B for c in p[:-1]):
            return Check(False, f"point {i} {p} leaves the box |x_i| <= {B}")
        if p[-1] != sum(c * c for c in p[:-1]):
            return Check(False, f"point {i} {p} is not on the paraboloid")
        if p in seen:
            return Check(False, f"point {i} {p} is a duplicate")
        seen.add(p)
    expected = (2 * B + 1) ** (d - 1)
    if len(P.points) != expected:
        return Check(False, f"cardinality {len(P.points)} != (2B+1)^(d-1) = {expected}")
    return Check(True)


def as_point_array(points):
    """Integer ndarray (m, d) for a PointSet or a sequence of integer tuples."""
    if isinstance(points, PointSet):
        return points.as_array()
    if isinstance(points, np.ndarray):
        return points.astype(np.int64, copy=False)
    pts = [tuple(int(c) for c in p) for p in points]
    if not pts:
        raise DomainError("empty point set")
    return np.array(pts, dtype=np.int64)


def as_point_tuples(points):
    if isinstance(points, PointSet):
        return list(points.points)
    if isinstance(points, np.ndarray):
        return [tuple(int(c) for c in row) for row in points]
    return [tuple(p) for p in points]
