"""Additive energy E(P) = #{(a, b, c, e) in P^4 : a + b = c + e}.

The main path counts pair sums into a table keyed by the sum vector and
returns sum_v r(v)^2. ``energy_brute_force`` and
``quadrature_energy_estimate`` are independent cross-checks.
"""

from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, SizeLimitError
from .lattice import PointSet, as_point_array

BRUTE_FORCE_LIMIT = 200
QUADRATURE_POINT_LIMIT = 50
QUADRATURE_GRID_CAP = 10 ** 8

# dense bincount is used while the encoded key space stays below this size
_DENSE_KEYS = 1 << 26
_INT64_SAFE = 1 << 62


@dataclass(frozen=True, eq=False)
class SumMultiplicityTable:
    """Distinct pair sums v (rows of ``sums``, lexicographic) with counts.

    ``ordered[i]`` is r(v), the number of ordered pairs (a, b) with a + b = v;
    ``unordered[i]`` is mu(v), the number of unordered pairs {a, b}, a = b allowed.
    """

    sums: np.ndarray
    ordered: np.ndarray
    unordered: np.ndarray
    point_count: int

    def __len__(self):
        return len(self.sums)

    def __getitem__(self, v):
        i = self._index().get(tuple(int(c) for c in v))
        if i is None:
            raise KeyError(v)
        return int(self.ordered[i]), int(self.unordered[i])

    def __contains__(self, v):
        return tuple(int(c) for c in v) in self._index()

    def _index(self):
        idx = self.__dict__.get("_idx")
        if idx is None:
            idx = {tuple(int(c) for c in row): i for i, row in enumerate(self.sums)}
            object.__setattr__(self, "_idx", idx)
        return idx

    def items(self):
        for row, r, mu in zip(self.sums, self.ordered, self.unordered):
            yield tuple(int(c) for c in row), (int(r), int(mu))

    def as_dict(self):
        return dict(self.items())


@dataclass(frozen=True)
class EnergyReport:
    energy: int
    point_count: int
    n_parameter: object  # int, or None for ad-hoc point lists
    method: str  # "table" | "brute_force" | "quadrature"


def _n_of(points):
    return points.n_parameter if isinstance(points, PointSet) else None


class _KeyCodec:
    """Mixed-radix integer encoding of bounded integer vectors.

    The first coordinate is most significant, so numeric order of keys is
    lexicographic order of vectors.
    """

    def __init__(self, lo, hi):
        self.lo = np.asarray(lo, dtype=np.int64)
        span = [int(h) - int(l) + 1 for l, h in zip(lo, hi)]
        self.size = 1
        for s in span:
            self.size *= s
        strides = []
        acc = 1
        for s in reversed(span):
            strides.append(acc)
            acc *= s
        self.span = np.array(span, dtype=np.int64)
        self.strides = np.array(strides[::-1], dtype=np.int64)

    def encode(self, vecs):
        return (vecs - self.lo) @ self.strides

    def decode(self, keys):
        out = np.empty((len(keys), len(self.span)), dtype=np.int64)
        rem = np.asarray(keys, dtype=np.int64).copy()
        for j, st in enumerate(self.strides):
            out[:, j], rem = np.divmod(rem, st)
        return out + self.lo


def _row_blocks(m, workers):
    """Split rows 0..m-1 into contiguous blocks with similar upper-triangle work."""
    nblocks = max(1, min(m, 8 * max(1, workers)))
    target = m * (m + 1) / 2 / nblocks
    blocks, start, acc = [], 0, 0
    for i in range(m):
        acc += m - i
        if acc >= target:
            blocks.append((start, i + 1))
            start, acc = i + 1, 0
    if start < m:
        blocks.append((start, m))
    return blocks


def _block_keys(A, codec, lo_row, hi_row):
    parts = [codec.encode(A[i] + A[i:]) for i in range(lo_row, hi_row)]
    return np.concatenate(parts)


def _unordered_counts_numpy(A, workers):
    codec = _KeyCodec(2 * A.min(axis=0), 2 * A.max(axis=0))
    blocks = _row_blocks(len(A), workers)
    dense = codec.size <= _DENSE_KEYS

    def work(block):
        keys = _block_keys(A, codec, *block)
        if dense:
            return np.bincount(keys, minlength=codec.size)
        return np.unique(keys, return_counts=True)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as ex:
            partial = list(ex.map(work, blocks))
    else:
        partial = [work(b) for b in blocks]

    # merge is a sum, so the result does not depend on the block split
    if dense:
        total = partial[0]
        for c in partial[1:]:
            total = total + c
        keys = np.nonzero(total)[0]
        mu = total[keys]
    else:
        allk = np.concatenate([k for k, _ in partial])
        allc = np.concatenate([c for _, c in partial])
        keys, inv = np.unique(allk, return_inverse=True)
        mu = np.zeros(len(keys), dtype=np.int64)
        np.add.at(mu, inv, allc)
    return codec, keys, mu.astype(np.int64)


def _fits_int64(A):
    if A.size == 0:
        return True
    lo, hi = 2 * A.min(axis=0), 2 * A.max(axis=0)
    size = 1
    for l, h in zip(lo, hi):
        size *= int(h) - int(l) + 1
    return size < _INT64_SAFE


def _python_table(pts):
    mu = Counter()
    for i, a in enumerate(pts):
        for b in pts[i:]:
            mu[tuple(x + y for x, y in zip(a, b))] += 1
    diag = {tuple(2 * x for x in a) for a in pts}
    rows = sorted(mu)
    r = [2 * mu[v] - (v in diag) for v in rows]
    return SumMultiplicityTable(np.array(rows, dtype=object), np.array(r, dtype=object),
                                np.array([mu[v] for v in rows], dtype=object), len(pts))


def _check_distinct(A):
    if len(np.unique(A, axis=0)) != len(A):
        raise DomainError("point set contains duplicates")


def sum_multiplicities(points, workers=1):
    """Pair-sum table of ``points`` (a PointSet or a sequence of integer tuples)."""
    pts = points.points if isinstance(points, PointSet) else [tuple(int(c) for c in p) for p in points]
    if not pts:
        raise DomainError("empty point set")
    big = max(abs(c) for p in pts for c in p) >= 1 << 30
    if big:
        if len(set(pts)) != len(pts):
            raise DomainError("point set contains duplicates")
        return _python_table(pts)
    A = as_point_array(points)
    _check_distinct(A)
    if not _fits_int64(A):
        return _python_table(pts)
    codec, keys, mu = _unordered_counts_numpy(A, workers)
    diag_keys = codec.encode(2 * A)
    r = 2 * mu
    pos = np.searchsorted(keys, diag_keys)
    r[pos] -= 1
    return SumMultiplicityTable(codec.decode(keys), r, mu, len(A))


def additive_energy(points, workers=1):
    """E(P) as sum_v r(v)^2 over the pair-sum table."""
    table = sum_multiplicities(points, workers=workers)
    r = table.ordered
    if r.dtype == object or table.point_count ** 3 >= _INT64_SAFE:
        energy = sum(int(x) * int(x) for x in r)
    else:
        energy = int((r * r).sum())
    return EnergyReport(energy, table.point_count, _n_of(points), "table")


def energy_brute_force(points):
    """Count ordered quadruples directly, independent of the sum table.

    Every ordered triple (a, b, c) is enumerated and the quadruple is
    counted when the forced fourth element a + b - c belongs to P.
    """
    A = as_point_array(points)
    m = len(A)
    if m > BRUTE_FORCE_LIMIT:
        raise SizeLimitError(f"brute force limited to {BRUTE_FORCE_LIMIT} points, got {m}")
    _check_distinct(A)
    members = {tuple(int(c) for c in row) for row in A}
    diffs = (A[:, None, :] - A[None, :, :]).reshape(-1, A.shape[1])  # b - c
    codec = _KeyCodec(A.min(axis=0) + diffs.min(axis=0), A.max(axis=0) + diffs.max(axis=0))
    member_keys = np.array(sorted(codec.encode(np.array(sorted(members), dtype=np.int64))))
    total = 0
    for a in A:
        keys = codec.encode(a + diffs)
        pos = np.searchsorted(member_keys, keys)
        pos[pos == len(member_keys)] = 0
        total += int(np.count_nonzero(member_keys[pos] == keys))
    return EnergyReport(total, m, _n_of(points), "brute_force")


def quadrature_energy_estimate(points, grid_points_per_axis, chunk=1 << 15):
    """Midpoint-rule value of the torus integral of |sum_p e(x.p)|^4.

    Returns a float. When every coordinate of every a + b - c - e is smaller
    in absolute value than the grid size, the midpoint rule integrates each
    character exactly and the estimate equals E(P) up to round-off.
    """
    A = as_point_array(points)
    m, d = A.shape
    N = int(grid_points_per_axis)
    if m > QUADRATURE_POINT_LIMIT:
        raise SizeLimitError(f"quadrature limited to {QUADRATURE_POINT_LIMIT} points, got {m}")
    if N < 1:
        raise DomainError("grid needs at least one point per axis")
    total_nodes = N ** d
    if total_nodes > QUADRATURE_GRID_CAP:
        raise SizeLimitError(f"grid^d = {total_nodes} exceeds {QUADRATURE_GRID_CAP}")
    Pf = A.astype(np.float64).T
    acc = 0.0
    for start in range(0, total_nodes, chunk):
        idx = np.arange(start, min(start + chunk, total_nodes))
        coords = np.empty((len(idx), d))
        rem = idx
        for j in range(d - 1, -1, -1):
            rem, digit = np.divmod(rem, N)
            coords[:, j] = (digit + 0.5) / N
        f = np.exp(2j * np.pi * (coords @ Pf)).sum(axis=1)
        mod2 = f.real ** 2 + f.imag ** 2
        acc += float((mod2 * mod2).sum())
    return acc / total_nodes


def quadrature_report(points, grid_points_per_axis):
    est = quadrature_energy_estimate(points, grid_points_per_axis)
    return EnergyReport(est, len(as_point_array(points)), _n_of(points), "quadrature")

