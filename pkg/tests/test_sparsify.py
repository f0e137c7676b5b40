from decimal import Decimal, localcontext
from fractions import Fraction
from itertools import combinations
from math import e, exp

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from paraboloid_incidences.errors import DomainError
from paraboloid_incidences.hyperplanes import build_family, dyadic_histogram, select_level
from paraboloid_incidences.incidence import incidence_matrix
from paraboloid_incidences.lattice import point_set_for_bound
from paraboloid_incidences.sparsify import (chernoff_lower, chernoff_tail, chernoff_upper,
                                            derive_seed, keep_threshold, mix64, sample_family,
                                            sample_mask, sampling_probability, uniform64,
                                            uniform64_array)

SEED = 20240601


@pytest.fixture(scope="module")
def selected_b4():
    P = point_set_for_bound(4, 4)
    return P, select_level(dyadic_histogram(build_family(P)), 3).family


@pytest.fixture(scope="module")
def config_b1():
    P = point_set_for_bound(4, 1)
    return P, build_family(P)


# ---------------------------------------------------------------- bounds

def test_bound_examples():
    assert abs(float(chernoff_upper(100, Fraction(1, 2), 10)) - exp(-100 / (100 + 20 / 3))) < 1e-15
    assert abs(float(chernoff_upper(100, Fraction(1, 2), 10)) - 0.3916) < 1e-4
    assert abs(float(chernoff_lower(100, Fraction(1, 2), 10)) - exp(-1)) < 1e-15
    assert abs(float(chernoff_tail(2, Fraction(1, 2), 3)) - e ** 2 / 27) < 1e-15
    assert abs(float(chernoff_tail(10, Fraction(1, 10), 10)) - 1e-10 * e ** 9) < 1e-20
    assert isinstance(chernoff_upper(100, Fraction(1, 2), 10), Decimal)


def test_bound_preconditions():
    for f in (chernoff_upper, chernoff_lower):
        with pytest.raises(DomainError):
            f(100, Fraction(1, 2), 0)
        with pytest.raises(DomainError):
            f(100, 1, 3)
        with pytest.raises(DomainError):
            f(100, 0, 3)
    with pytest.raises(DomainError):
        chernoff_tail(2, Fraction(1, 2), 1)   # k = np
    with pytest.raises(DomainError):
        chernoff_tail(10, Fraction(1, 2), 4)


@given(st.integers(1, 10 ** 6), st.fractions(Fraction(1, 1000), Fraction(999, 1000)),
       st.fractions(Fraction(1, 100), 100))
def test_lower_bound_doubling(n, p, lam):
    b1, b2 = chernoff_lower(n, p, lam), chernoff_lower(n, p, 2 * lam)
    with localcontext() as ctx:
        ctx.prec = 60
        assert abs(b2 - b1 ** 4) <= Decimal(10) ** -40 * b1 ** 4


@given(st.integers(1, 10 ** 4), st.fractions(Fraction(1, 100), Fraction(99, 100)),
       st.fractions(Fraction(1, 100), 50))
def test_bounds_in_unit_interval_and_monotone(n, p, lam):
    for f in (chernoff_upper, chernoff_lower):
        a, b = f(n, p, lam), f(n, p, lam + 1)
        assert 0 < b < a < 1


@given(st.integers(1, 200), st.fractions(Fraction(1, 100), Fraction(99, 100)), st.integers(1, 50))
def test_tail_bound_monotone_in_k(n, p, extra):
    k = int(n * p) + extra
    if k <= n * p:
        k += 1
    a, b = chernoff_tail(n, p, k), chernoff_tail(n, p, k + 1)
    assert 0 < b < a < 1


# ---------------------------------------------------------------- generator

def test_generator_reference_values():
    # SplitMix64 reference: the first output for state 0 is 0xE220A8397B1DCDAF
    assert mix64(0x9E3779B97F4A7C15) == 0xE220A8397B1DCDAF
    assert uniform64(0, 0) == 0xE220A8397B1DCDAF
    assert uniform64_array(0, 3).tolist() == [uniform64(0, i) for i in range(3)]


def test_generator_is_deterministic_and_splittable():
    a = uniform64_array(SEED, 1000)
    assert np.array_equal(a, uniform64_array(SEED, 1000))
    assert not np.array_equal(a, uniform64_array(SEED + 1, 1000))
    assert derive_seed(SEED, 1) == derive_seed(SEED, 1) != derive_seed(SEED, 2)
    assert derive_seed(SEED, "sparsify") != derive_seed(SEED, "other")


def test_keep_rate_is_close_to_p():
    thr = keep_threshold(Fraction(1, 4))
    assert thr == 1 << 62
    mask = sample_mask(SEED, 200000, thr)
    assert abs(mask.mean() - 0.25) < 0.005
    assert sample_mask(SEED, 10, keep_threshold(1)).all()


def test_sampling_probability():
    assert sampling_probability(1, 0, 1000) == 1
    assert sampling_probability(4, Fraction(1, 2), 16) == Fraction(1, 16)
    assert abs(float(sampling_probability(13, Fraction(3, 10), 12131)) - 1 / (13 * 12131 ** 0.3)) < 1e-15


# ---------------------------------------------------------------- sample_family

def test_p_equal_one_keeps_everything(config_b1):
    P, fam = config_b1
    cert, sub = sample_family(P, fam, 0, 1, SEED)
    assert cert.p == 1 and cert.retained == len(fam) and len(sub) == len(fam)
    assert cert.size_ok and cert.incidence_ok and cert.accepted
    assert cert.incidences_after == cert.incidences_before == 837


def test_tiny_p_gives_a_failure_certificate(config_b1):
    P, fam = config_b1
    # p |Pi| = 200 / (10^4 * 200^0) < 1/10 so the size window cannot be met
    cert, sub = sample_family(P, fam, 0, 10 ** 4, SEED, max_retries=1)
    assert not cert.accepted and not cert.size_ok
    assert cert.retry == 0 and cert.retained == len(sub)


def test_reproducible(config_b1):
    P, fam = config_b1
    c1, s1 = sample_family(P, fam, Fraction(1, 2), 1, SEED)
    c2, s2 = sample_family(P, fam, Fraction(1, 2), 1, SEED)
    assert c1 == c2 and s1.members == s2.members
    assert c1.to_kv() == c2.to_kv()


def test_bad_arguments(config_b1):
    P, fam = config_b1
    with pytest.raises(DomainError):
        sample_family(P, fam, 0.3, 1, SEED, max_retries=0)


def test_pair_condition_means_no_forbidden_biclique(config_b1):
    P, fam = config_b1
    cert, sub = sample_family(P, fam, 1, 1, SEED, max_retries=20)
    M = incidence_matrix(P, sub).astype(int)
    worst = max(int(M[:, i] @ M[:, j]) for i, j in combinations(range(M.shape[1]), 2))
    assert worst == cert.max_pair_codegree
    assert cert.k2t_ok == (worst < cert.forbidden_t)


def test_regression_baseline_b4(selected_b4):
    P, fam = selected_b4
    assert len(fam) == 12131
    cert, sub = sample_family(P, fam, 0.3, 13, SEED)
    assert cert.accepted and cert.retry == 0
    assert cert.forbidden_t == 10
    assert (cert.retained, cert.incidences_before, cert.incidences_after, cert.max_pair_codegree) \
        == (49, 269724, 1135, 3)
