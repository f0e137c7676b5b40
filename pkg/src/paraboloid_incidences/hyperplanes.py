"""Sum hyperplanes H_v, the family they form, and its dyadic levels.

If a, b lie on the paraboloid and a + b = v, both satisfy

    2 x_d - 2 v_1 x_1 - ... - 2 v_{d-1} x_{d-1} + (v_1^2 + ... + v_{d-1}^2) - v_d = 0,

so every pair sum v names one hyperplane H_v through its generating pairs.
"""

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .energy import sum_multiplicities
from .errors import DomainError
from .incidence import count_incidences  # noqa: F401  (re-exported)
from .surfaces import Hyperplane


def sum_hyperplane(v, d=None):
    """H_v in the integer form (-2v_1, ..., -2v_{d-1}, 2; |v'|^2 - v_d)."""
    v = tuple(int(c) for c in v)
    if d is not None and len(v) != d:
        raise DomainError(f"sum vector has {len(v)} coordinates, expected {d}")
    if len(v) < 2:
        raise DomainError("sum vectors need at least two coordinates")
    head = v[:-1]
    return Hyperplane(tuple(-2 * c for c in head) + (2,), sum(c * c for c in head) - v[-1])


def sum_hyperplane_rows(sums):
    """Vectorized integer rows (normal..., offset) of H_v for an array of sums."""
    sums = np.asarray(sums)
    head = sums[:, :-1]
    rows = np.empty((len(sums), sums.shape[1] + 1), dtype=sums.dtype)
    rows[:, :-2] = -2 * head
    rows[:, -2] = 2
    rows[:, -1] = (head * head).sum(axis=1) - sums[:, -1]
    return rows


@dataclass(frozen=True, eq=False)
class HyperplaneFamily:
    """Pi = {H_v}: one member per distinct pair sum v, with its multiplicity mu(v).

    ``sums`` rows are in lexicographic order; ``source`` is the generating
    PointSet (None for families read back from disk).
    """

    sums: np.ndarray
    multiplicities: np.ndarray
    source: object = None

    def __len__(self):
        return len(self.sums)

    @property
    def dimension(self):
        return self.sums.shape[1]

    def coefficients(self):
        return sum_hyperplane_rows(self.sums)

    def hyperplane(self, i):
        return sum_hyperplane(self.sums[i])

    def hyperplanes(self):
        return [sum_hyperplane(v) for v in self.sums]

    def __iter__(self):
        return iter(self.hyperplanes())

    def __getitem__(self, v):
        return self.members[tuple(int(c) for c in v)]

    @property
    def members(self):
        """Mapping v -> (H_v, mu(v)), built on first access."""
        cached = self.__dict__.get("_members")
        if cached is None:
            cached = {tuple(int(c) for c in v): (sum_hyperplane(v), int(mu))
                      for v, mu in zip(self.sums, self.multiplicities)}
            object.__setattr__(self, "_members", cached)
        return cached

    def subset(self, mask):
        return HyperplaneFamily(self.sums[mask], self.multiplicities[mask], self.source)


def build_family(points, workers=1):
    table = sum_multiplicities(points, workers=workers)
    return HyperplaneFamily(table.sums, table.unordered, points)


def _level(mu):
    return int(mu).bit_length() - 1


@dataclass(frozen=True)
class DyadicHistogram:
    """counts[k] = N_k, the number of members with 2^k <= mu(v) < 2^(k+1)."""

    counts: dict
    r_level: float
    dimension: int
    n_parameter: object = None
    family: object = field(default=None, repr=False, compare=False)


def r_level(d, n):
    """((d-3)/(d-1)) * log2(n)."""
    if n is None or n < 1:
        raise DomainError(f"r level needs a positive n, got {n}")
    return (d - 3) * math.log2(n) / (d - 1)


def dyadic_histogram(family, n=None):
    if len(family) == 0:
        raise DomainError("empty hyperplane family")
    if n is None:
        n = getattr(family.source, "n_parameter", None)
    mu = np.asarray(family.multiplicities, dtype=np.int64)
    levels = np.floor(np.log2(mu)).astype(np.int64)
    # log2 rounding guard: recompute exactly at the two neighbouring levels
    levels = np.where((1 << (levels + 1)) <= mu, levels + 1, levels)
    levels = np.where((1 << levels) > mu, levels - 1, levels)
    N = np.bincount(levels)
    counts = {k: int(c) for k, c in enumerate(N)}
    d = family.dimension
    r = r_level(d, n) if n else float("nan")
    return DyadicHistogram(counts, r, d, n, family)


@dataclass(frozen=True)
class LevelSelection:
    level: int
    family: object  # the sub-family Pi' at the chosen level, or None
    r_level: float
    drift: float  # |k' - r_level|
    beta: Fraction


def select_level(hist, beta):
    """k' = argmax_k N_k 2^(beta k); ties go to the k nearest r_level, then smaller k.

    Scores are compared exactly: with beta = p/q the q-th powers
    N_k^q 2^(p k) are integers.
    """
    beta = Fraction(beta)
    if beta <= 2:
        raise DomainError(f"beta must exceed 2, got {beta}")
    nonzero = {k: c for k, c in hist.counts.items() if c > 0}
    if not nonzero:
        raise DomainError("all-zero histogram")
    p, q = beta.numerator, beta.denominator
    r = hist.r_level
    dist = (lambda k: abs(k - r)) if not math.isnan(r) else (lambda k: 0.0)
    best = max(nonzero, key=lambda k: (nonzero[k] ** q << (p * k), -dist(k), -k))
    sub = None
    if hist.family is not None:
        mu = np.asarray(hist.family.multiplicities, dtype=np.int64)
        sub = hist.family.subset((mu >= (1 << best)) & (mu < (1 << (best + 1))))
    return LevelSelection(best, sub, r, dist(best), beta)
