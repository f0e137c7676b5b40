"""Exact point-surface incidence testing, batched.

Points are taken to homogeneous integer coordinates (q, L) with p = q / L.
A hyperplane with integer row (n, o) contains p iff n.q + o*L = 0; a sphere
with integer row (A, b, C) contains p iff A|q|^2 + L b.q + C L^2 = 0. Both are
integer dot products, evaluated in int64 when a magnitude bound proves that
no overflow can occur and with Python integers otherwise.
"""

from concurrent.futures import ThreadPoolExecutor

import numpy as np

from .errors import DomainError, SizeLimitError
from .exact import as_rational, common_denominator
from .lattice import PointSet
from .surfaces import GraphHypersurface, Hyperplane, Hypersphere

_SAFE = 1 << 62
DEFAULT_PAIR_LIMIT = 10 ** 8


def _is_family(obj):
    return hasattr(obj, "coefficients") and hasattr(obj, "multiplicities")


def _rational_points(points):
    if isinstance(points, PointSet):
        return list(points.points)
    if isinstance(points, np.ndarray):
        return [tuple(int(c) for c in row) for row in points]
    return [tuple(as_rational(c) for c in p) for p in points]


def _to_array(rows):
    """int64 array when every entry fits comfortably, else object array."""
    big = max((abs(x) for row in rows for x in row), default=0)
    if big < 1 << 62:
        return np.array(rows, dtype=np.int64), big
    return np.array(rows, dtype=object), big


class _PointFeatures:
    def __init__(self, points):
        self.points = _rational_points(points)
        if not self.points:
            raise DomainError("empty point set")
        self.dim = len(self.points[0])
        self._cache = {}

    def _homogeneous(self, pts):
        out = []
        for p in pts:
            L = common_denominator(p)
            out.append([int(c * L) for c in p] + [L])
        return out

    def linear(self):
        if "lin" not in self._cache:
            self._cache["lin"] = _to_array(self._homogeneous(self.points))
        return self._cache["lin"]

    def sphere(self):
        if "sph" not in self._cache:
            rows = []
            for h in self._homogeneous(self.points):
                q, L = h[:-1], h[-1]
                rows.append([sum(c * c for c in q)] + [c * L for c in q] + [L * L])
            self._cache["sph"] = _to_array(rows)
        return self._cache["sph"]

    def sheared(self, f):
        """Features of (x', x_d - f(x')) so graph membership becomes linear."""
        key = ("graph", id(f))
        if key not in self._cache:
            moved = [p[:-1] + (as_rational(p[-1] - f(tuple(p[:-1]))),) for p in self.points]
            self._cache[key] = (_to_array(self._homogeneous(moved)), f)
        return self._cache[key][0]


def _zero_mask(rows, features):
    R, rbig = rows
    F, fbig = features
    if R.shape[1] != F.shape[1]:
        raise DomainError("surface and point dimensions differ")
    if R.dtype != object and F.dtype != object and rbig * fbig * R.shape[1] < _SAFE:
        return (R @ F.T) == 0
    prod = R.astype(object) @ F.T.astype(object)
    return np.array(prod == 0, dtype=bool)


def _surface_kind(s):
    if isinstance(s, Hyperplane):
        return "lin", s.integer_row()
    if isinstance(s, Hypersphere):
        return "sph", s.integer_row()
    if isinstance(s, GraphHypersurface):
        return ("graph", id(s.f), s.f), s.base_hyperplane().integer_row()
    raise TypeError(f"unsupported surface type {type(s).__name__}")


def _block(feats, surfaces):
    """Boolean incidence block for a list of surfaces (rows) against all points."""
    out = np.zeros((len(surfaces), len(feats.points)), dtype=bool)
    groups = {}
    for i, s in enumerate(surfaces):
        if s.dimension != feats.dim:
            raise DomainError(f"surface of dimension {s.dimension} against points of dimension {feats.dim}")
        kind, row = _surface_kind(s)
        key = kind if isinstance(kind, str) else kind[:2]
        groups.setdefault(key, (kind, [], []))
        groups[key][1].append(i)
        groups[key][2].append(row)
    for kind, idx, rows in groups.values():
        if kind == "lin":
            F = feats.linear()
        elif kind == "sph":
            F = feats.sphere()
        else:
            F = feats.sheared(kind[2])
        out[idx] = _zero_mask(_to_array(rows), F)
    return out


def iter_incidence_blocks(points, surfaces, chunk=2048, workers=1):
    """Yield (row_offset, bool block) covering all surfaces in order."""
    feats = _PointFeatures(points)
    if _is_family(surfaces):
        coeffs = surfaces.coefficients()
        if coeffs.shape[1] != feats.dim + 1:
            raise DomainError("family and point dimensions differ")
        big = int(np.abs(coeffs).max()) if len(coeffs) else 0
        coeffs = coeffs if coeffs.dtype == object else coeffs.astype(np.int64)

        def work(start):
            return start, _zero_mask((coeffs[start:start + chunk], big), feats.linear())
        n = len(coeffs)
    else:
        surfaces = list(surfaces)

        def work(start):
            return start, _block(feats, surfaces[start:start + chunk])
        n = len(surfaces)
    starts = range(0, n, chunk)
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as ex:
            yield from ex.map(work, starts)
    else:
        for s in starts:
            yield work(s)


def incidence_matrix(points, surfaces, workers=1):
    """Boolean matrix with one row per surface and one column per point."""
    feats_n = len(_rational_points(points))
    blocks = [b for _, b in iter_incidence_blocks(points, surfaces, workers=workers)]
    if not blocks:
        return np.zeros((0, feats_n), dtype=bool)
    return np.vstack(blocks)


def count_incidences(points, surfaces, workers=1):
    """|{(p, S) : p in S}| by exact evaluation of every point-surface pair."""
    return sum(int(b.sum()) for _, b in iter_incidence_blocks(points, surfaces, workers=workers))


def _max_codegree(M, pair_limit, label):
    """Max over unordered row pairs of the number of shared columns.

    Returns (max, (i, j)) with i < j the first maximizing pair in row-major
    order, or (0, None) with fewer than two rows.
    """
    k = M.shape[0]
    if k < 2:
        return 0, None
    if pair_limit is not None and k * k > pair_limit:
        raise SizeLimitError(f"{k} {label} give {k * k} pairs, above the limit {pair_limit}")
    Mf = np.ascontiguousarray(M, dtype=np.float32)  # counts stay far below 2^24, so float32 is exact
    step = max(1, min(k, (1 << 26) // max(k, 1)))
    best, witness = -1, None
    for a in range(0, k, step):
        G = Mf[a:a + step] @ Mf.T
        rows = np.arange(a, min(a + step, k))
        mask = np.arange(k)[None, :] <= rows[:, None]
        G[mask] = -1
        flat = int(np.argmax(G))
        val = G.flat[flat]
        if val > best:
            best = int(val)
            r, c = divmod(flat, k)
            witness = (a + r, c)
    return best, witness


def max_common_points(points, surfaces, pair_limit=DEFAULT_PAIR_LIMIT, workers=1):
    """(t_max, (i, j)): the most points shared by two surfaces, by index."""
    M = incidence_matrix(points, surfaces, workers=workers)
    return _max_codegree(M, pair_limit, "surfaces")


def max_common_surfaces(points, surfaces, pair_limit=None, workers=1):
    """(s_max, (i, j)): the most surfaces through a pair of points, by index."""
    M = incidence_matrix(points, surfaces, workers=workers)
    return _max_codegree(M.T, pair_limit, "points")


def degree_sequences(points, surfaces):
    """Sorted point degrees and sorted surface degrees of the incidence graph."""
    M = incidence_matrix(points, surfaces)
    return sorted(M.sum(axis=0).tolist()), sorted(M.sum(axis=1).tolist())
