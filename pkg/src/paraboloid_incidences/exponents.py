"""Exact exponent algebra for the lower-bound constructions, plus log-log fits."""

from dataclasses import asdict, dataclass
from fractions import Fraction

import numpy as np

from .errors import DomainError


def _q(x):
    if isinstance(x, float):
        return Fraction(str(x))
    return Fraction(x)


def _check_d(d):
    if int(d) != d or d < 4:
        raise DomainError(f"d must be an integer >= 4, got {d}")


def predict_alpha(d, beta):
    """alpha = (beta d + d - 3 beta + 1) / (d - 1)."""
    _check_d(d)
    beta = _q(beta)
    if beta <= 2:
        raise DomainError(f"beta must exceed 2, got {beta}")
    return (beta * d + d - 3 * beta + 1) / Fraction(d - 1)


@dataclass(frozen=True)
class ExponentRecord:
    d: int
    eps: Fraction
    delta: Fraction
    beta: object = None
    gamma: object = None
    alpha: object = None
    m_exponent: Fraction = None
    n_exponent: Fraction = None
    mn_exponent: object = None  # only defined at delta = (d+2)/(d+4)
    n_of_m_exponent: Fraction = None
    intermediate_n_exponent: object = None  # (alpha - gamma (d-4)/(d-1)) / beta
    intermediate_t_exponent: object = None  # gamma / beta

    def to_kv(self):
        def fmt(v):
            if isinstance(v, Fraction):
                return f"{v.numerator}/{v.denominator}"
            return "none" if v is None else str(v)
        return "".join(f"{k}={fmt(v)}\n" for k, v in asdict(self).items())

    def recompute(self):
        """A fresh record from the stored parameters (for consistency checks)."""
        return theorem_exponents(self.d, self.eps, self.delta, self.beta, self.gamma)


def theorem_exponents(d, eps, delta, beta=None, gamma=None):
    """Exponents of I = Omega(m^delta n^((d+2-delta(d+1))/3 - eps)).

    delta = (2d-2)/(2d-1) gives the (m^{(2d-2)/(2d-1)}, n^{d/(2d-1)-eps}) pair,
    and delta = (d+2)/(d+4) balances the two sides at 1 - 2/(d+4) - eps.
    With beta (and optionally gamma) the intermediate-construction exponents
    are filled in as well.
    """
    _check_d(d)
    eps, delta = _q(eps), _q(delta)
    if eps < 0:
        raise DomainError(f"eps must be non-negative, got {eps}")
    if delta <= 0:
        raise DomainError(f"delta must be positive, got {delta}")
    n_exp = (d + 2 - delta * (d + 1)) / 3 - eps
    mn = None
    if delta == Fraction(d + 2, d + 4):
        mn = 1 - Fraction(2, d + 4) - eps
    alpha = inter_n = inter_t = None
    if beta is not None:
        beta = _q(beta)
        alpha = predict_alpha(d, beta)
        g = _q(gamma) if gamma is not None else Fraction(0)
        if g < 0:
            raise DomainError(f"gamma must be non-negative, got {g}")
        inter_n = (alpha - g * Fraction(d - 4, d - 1)) / beta
        inter_t = g / beta
        gamma = g if gamma is not None else None
    return ExponentRecord(d, eps, delta, beta, gamma, alpha, delta, n_exp, mn,
                          (3 - 3 * eps) / Fraction(d + 1), inter_n, inter_t)


def chain_exponent(d, beta):
    """(d+1)/(d-1) (beta-1)/beta + alpha/beta - (d-4)/(d-1), exactly.

    This is the n-exponent of I(P, Pi') before subtracting eps; it does not
    depend on beta and equals (d+2)/(d-1).
    """
    beta = _q(beta)
    alpha = predict_alpha(d, beta)
    return (Fraction(d + 1, d - 1) * (beta - 1) / beta + alpha / beta
            - Fraction(d - 4, d - 1))


def fit_exponent(samples):
    """Least-squares line through (log x, log y): (slope, intercept, residual).

    ``residual`` is the root-mean-square deviation in log space; the
    intercept is the natural log of the fitted constant.
    """
    samples = list(samples)
    if len(samples) < 2:
        raise DomainError("need at least two samples")
    xy = np.array([(float(x), float(y)) for x, y in samples])
    if (xy <= 0).any():
        raise DomainError("samples must be positive")
    lx, ly = np.log(xy[:, 0]), np.log(xy[:, 1])
    if np.ptp(lx) == 0:
        raise DomainError("all x values coincide")
    A = np.column_stack([lx, np.ones_like(lx)])
    (slope, intercept), *_ = np.linalg.lstsq(A, ly, rcond=None)
    resid = float(np.sqrt(np.mean((A @ np.array([slope, intercept]) - ly) ** 2)))
    return float(slope), float(intercept), resid
