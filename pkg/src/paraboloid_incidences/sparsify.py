"""Chernoff-bound calculators and seeded random thinning of a hyperplane family.

Random generator
----------------
Sampling decisions are a pure function of (seed, index):

    mix64(z):  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9 mod 2^64
               z = (z ^ (z >> 27)) * 0x94D049BB133111EB mod 2^64
               return z ^ (z >> 31)
    uniform64(seed, i) = mix64(seed + (i + 1) * 0x9E3779B97F4A7C15 mod 2^64)

(the SplitMix64 output function on a Weyl sequence). Member i is kept iff
uniform64(seed, i) < floor(p * 2^64). Retry r >= 1 draws with
derive_seed(seed, r); string labels are first hashed with SHA-256.
"""

import hashlib
from dataclasses import asdict, dataclass
from decimal import Decimal, localcontext
from fractions import Fraction
from math import ceil

import numpy as np

from .errors import DomainError
from .incidence import _max_codegree, count_incidences, incidence_matrix

MASK64 = (1 << 64) - 1
GOLDEN_GAMMA = 0x9E3779B97F4A7C15
_M1 = 0xBF58476D1CE4E5B9
_M2 = 0x94D049BB133111EB
PRECISION = 50


# ---------------------------------------------------------------- bounds

def _dec(x):
    x = Fraction(x) if not isinstance(x, Fraction) else x
    return Decimal(x.numerator) / Decimal(x.denominator)


def _check_np(n, p):
    if n < 1:
        raise DomainError(f"n must be positive, got {n}")
    if not 0 < p < 1:
        raise DomainError(f"p must lie in (0, 1), got {p}")


def chernoff_upper(n, p, lam):
    """exp(-lam^2 / (2pn + 2lam/3)), a bound on Pr[X >= pn + lam]."""
    p, lam = _as_exact(p), _as_exact(lam)
    _check_np(n, p)
    if lam <= 0:
        raise DomainError(f"lambda must be positive, got {lam}")
    with localcontext() as ctx:
        ctx.prec = PRECISION
        return (-_dec(lam * lam / (2 * p * n + Fraction(2, 3) * lam))).exp()


def chernoff_lower(n, p, lam):
    """exp(-lam^2 / (2pn)), a bound on Pr[X <= pn - lam]."""
    p, lam = _as_exact(p), _as_exact(lam)
    _check_np(n, p)
    if lam <= 0:
        raise DomainError(f"lambda must be positive, got {lam}")
    with localcontext() as ctx:
        ctx.prec = PRECISION
        return (-_dec(lam * lam / (2 * p * n))).exp()


def chernoff_tail(n, p, k):
    """(np/k)^k e^(k - np), a bound on Pr[X >= k] for k > np."""
    p = _as_exact(p)
    _check_np(n, p)
    mean = n * p
    if k <= mean:
        raise DomainError(f"need k > np = {mean}, got k = {k}")
    with localcontext() as ctx:
        ctx.prec = PRECISION
        return _dec(mean / k) ** int(k) * _dec(k - mean).exp()


def _as_exact(x):
    """ints and Fractions as-is; floats and strings through their decimal text."""
    if isinstance(x, (int, Fraction)):
        return Fraction(x)
    if isinstance(x, (float, str, Decimal)):
        return Fraction(str(x))
    raise TypeError(f"cannot read {x!r} as an exact number")


# ---------------------------------------------------------------- generator

def mix64(z):
    z &= MASK64
    z = ((z ^ (z >> 30)) * _M1) & MASK64
    z = ((z ^ (z >> 27)) * _M2) & MASK64
    return z ^ (z >> 31)


def uniform64(seed, i):
    return mix64((seed + (i + 1) * GOLDEN_GAMMA) & MASK64)


def uniform64_array(seed, count):
    """uniform64(seed, i) for i = 0..count-1 as a uint64 array."""
    i = np.arange(1, count + 1, dtype=np.uint64)
    with np.errstate(over="ignore"):
        z = np.uint64(seed & MASK64) + i * np.uint64(GOLDEN_GAMMA)
        z = (z ^ (z >> np.uint64(30))) * np.uint64(_M1)
        z = (z ^ (z >> np.uint64(27))) * np.uint64(_M2)
    return z ^ (z >> np.uint64(31))


def derive_seed(seed, label):
    """Child seed for a retry index or a stage name."""
    if isinstance(label, str):
        label = int.from_bytes(hashlib.sha256(label.encode()).digest()[:8], "big")
    return mix64(mix64(seed) ^ mix64(label * GOLDEN_GAMMA))


def keep_threshold(p):
    """floor(p * 2^64); member i is kept iff uniform64(seed, i) is below it."""
    if isinstance(p, Decimal):
        with localcontext() as ctx:
            ctx.prec = PRECISION
            return int((p * (1 << 64)).to_integral_value(rounding="ROUND_FLOOR"))
    return int(Fraction(p) * (1 << 64))


def sample_mask(seed, count, threshold):
    if threshold >= 1 << 64:
        return np.ones(count, dtype=bool)
    return uniform64_array(seed, count) < np.uint64(threshold)


def sampling_probability(t, eps, n):
    """p = 1 / (t * n^eps) to PRECISION digits (exact when eps = 0)."""
    eps = _as_exact(eps)
    if t < 1 or n < 1:
        raise DomainError(f"t and n must be positive, got t={t}, n={n}")
    if eps < 0:
        raise DomainError(f"eps must be non-negative, got {eps}")
    if eps == 0:
        return Decimal(1) / Decimal(t) if t > 1 else Decimal(1)
    with localcontext() as ctx:
        ctx.prec = PRECISION
        return 1 / (Decimal(t) * (Decimal(n).ln() * _dec(eps)).exp())


# ---------------------------------------------------------------- sampler

@dataclass(frozen=True)
class SampleCertificate:
    seed: int
    draw_seed: int
    retry: int
    eps: Fraction
    t: int
    n: int
    p: Fraction  # the probability actually used, threshold / 2^64
    family_size: int
    retained: int
    incidences_before: int
    incidences_after: int
    max_pair_codegree: int
    forbidden_t: object  # ceil(3/eps), or None when eps = 0
    size_ok: bool
    incidence_ok: bool
    k2t_ok: bool

    @property
    def accepted(self):
        return self.size_ok and self.incidence_ok and self.k2t_ok

    def to_kv(self):
        out = []
        for k, v in asdict(self).items():
            if isinstance(v, Fraction):
                v = f"{v.numerator}/{v.denominator}"
            out.append(f"{k}={v}")
        out.append(f"accepted={self.accepted}")
        return "\n".join(out) + "\n"


def _subset(family, mask):
    if hasattr(family, "subset"):
        return family.subset(mask)
    seq = list(family)
    return [h for h, keep in zip(seq, mask) if keep]


def sample_family(points, family, eps, t, seed, max_retries=50, n=None, workers=1):
    """Keep each member with probability p = 1/(t n^eps) until three checks pass.

    (i) p|Pi|/10 <= |Pi'| <= 10 p|Pi|; (ii) no two points of P lie on
    ceil(3/eps) or more members of Pi' (vacuous for eps = 0);
    (iii) I(P, Pi') >= p I(P, Pi) / 100. n defaults to |Pi|. Returns
    (certificate, Pi') for the first accepted draw, or for the last one.
    """
    if max_retries < 1:
        raise DomainError("max_retries must be at least 1")
    eps = _as_exact(eps)
    size = len(family)
    if size == 0:
        raise DomainError("empty family")
    n = size if n is None else n
    p_target = sampling_probability(t, eps, n)
    if not 0 < p_target <= 1:
        raise DomainError(f"p = {p_target} is not in (0, 1]")
    threshold = keep_threshold(p_target)
    p = Fraction(threshold, 1 << 64)
    forbidden = ceil(3 / eps) if eps > 0 else None
    before = count_incidences(points, family, workers=workers)

    cert = sub = None
    for retry in range(max_retries):
        draw = seed if retry == 0 else derive_seed(seed, retry)
        mask = sample_mask(draw, size, threshold)
        sub = _subset(family, mask)
        kept = int(mask.sum())
        if kept:
            M = incidence_matrix(points, sub, workers=workers)
            after = int(M.sum())
            codeg = _max_codegree(M.T, None, "points")[0]
        else:
            after, codeg = 0, 0
        cert = SampleCertificate(
            seed=seed, draw_seed=draw, retry=retry, eps=eps, t=t, n=n, p=p,
            family_size=size, retained=kept, incidences_before=before,
            incidences_after=after, max_pair_codegree=codeg, forbidden_t=forbidden,
            size_ok=p * size / 10 <= kept <= 10 * p * size,
            incidence_ok=100 * after >= p * before,
            k2t_ok=forbidden is None or codeg < forbidden,
        )
        if cert.accepted:
            break
    return cert, sub
