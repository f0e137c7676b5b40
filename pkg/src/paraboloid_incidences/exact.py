"""Small helpers for exact rational arithmetic."""

from fractions import Fraction
from math import gcd, lcm
from numbers import Rational


def as_rational(x):
    """Return ``x`` as an int when integral, else as a Fraction.

    Floats are rejected: everything in this package is exact.
    """
    if isinstance(x, bool):
        raise TypeError("booleans are not coordinates")
    if isinstance(x, int):
        return x
    if isinstance(x, Rational):
        x = Fraction(x)
        return x.numerator if x.denominator == 1 else x
    if hasattr(x, "__index__"):  # numpy integers
        return int(x)
    if isinstance(x, str):
        x = Fraction(x)
        return x.numerator if x.denominator == 1 else x
    raise TypeError(f"expected an exact rational, got {type(x).__name__}")


def as_vector(v):
    return tuple(as_rational(x) for x in v)


def denominator(x):
    return x.denominator if isinstance(x, Fraction) else 1


def common_denominator(values):
    out = 1
    for x in values:
        out = lcm(out, denominator(x))
    return out


def scale_to_integers(values):
    """Multiply by the lcm of denominators; returns (ints, scale)."""
    s = common_denominator(values)
    return [int(x * s) for x in values], s


def content(ints):
    g = 0
    for x in ints:
        g = gcd(g, x)
    return g


def fmt_rational(x):
    x = as_rational(x)
    if isinstance(x, int):
        return str(x)
    return f"{x.numerator}/{x.denominator}"


def parse_rational(token):
    return as_rational(Fraction(token))


def iroot(n, k):
    """Exact floor of the k-th root of a non-negative integer."""
    if n < 0 or k < 1:
        raise ValueError("iroot needs n >= 0 and k >= 1")
    if n < 2 or k == 1:
        return n
    # float guess, then integer correction in both directions
    x = int(round(n ** (1.0 / k))) if n < 1 << 1000 else 1 << (n.bit_length() // k)
    while x ** k > n:
        x -= 1
    while (x + 1) ** k <= n:
        x += 1
    return x


def solve_affine(rows, rhs, unknowns, params):
    """Solve a square linear system for ``unknowns`` in terms of ``params``.

    ``rows`` are coefficient vectors over all coordinates and ``rhs`` the
    right-hand sides of ``row . x = rhs``. Returns a dict mapping each
    unknown index to ``(const, {param: coeff})`` or None when the matrix
    restricted to the unknown columns is singular.
    """
    m = len(unknowns)
    if len(rows) != m:
        return None
    # augmented matrix: unknown columns | constant | -param columns
    aug = []
    for row, b in zip(rows, rhs):
        aug.append([Fraction(row[j]) for j in unknowns] + [Fraction(b)]
                   + [Fraction(-row[j]) for j in params])
    for col in range(m):
        pivot = next((r for r in range(col, m) if aug[r][col] != 0), None)
        if pivot is None:
            return None
        aug[col], aug[pivot] = aug[pivot], aug[col]
        inv = 1 / aug[col][col]
        aug[col] = [x * inv for x in aug[col]]
        for r in range(m):
            if r != col and aug[r][col] != 0:
                f = aug[r][col]
                aug[r] = [a - f * b for a, b in zip(aug[r], aug[col])]
    out = {}
    for i, j in enumerate(unknowns):
        row = aug[i]
        out[j] = (as_rational(row[m]),
                  {p: as_rational(row[m + 1 + t]) for t, p in enumerate(params)})
    return out


def rref(rows):
    """Reduced row echelon form over the rationals; returns (rows, pivots)."""
    mat = [[Fraction(x) for x in row] for row in rows]
    pivots = []
    r = 0
    ncols = len(mat[0]) if mat else 0
    for c in range(ncols):
        pivot = next((i for i in range(r, len(mat)) if mat[i][c] != 0), None)
        if pivot is None:
            continue
        mat[r], mat[pivot] = mat[pivot], mat[r]
        inv = 1 / mat[r][c]
        mat[r] = [x * inv for x in mat[r]]
        for i in range(len(mat)):
            if i != r and mat[i][c] != 0:
                f = mat[i][c]
                mat[i] = [a - f * b for a, b in zip(mat[i], mat[r])]
        pivots.append(c)
        r += 1
        if r == len(mat):
            break
    return mat, pivots
