import json
import math
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from conftest import crossing_by_quadruples
from ncchaos.errors import DomainError, ValidationError
from ncchaos.freedist import (
    FreeLaw,
    bernoulli_sym,
    cumulants_from_moments,
    free_convolve,
    free_poisson_centered,
    law_from_name,
    mesokurtic,
    point_mass,
    scale,
    semicircular,
    spectral_radius_estimate,
)
from ncchaos.ncpart import catalan, count_nc_no_singleton, enumerate_set_partitions

fractions = st.fractions(min_value=-5, max_value=5, max_denominator=7)


def brute_moment(cumulants, n):
    """Sum over all set partitions filtered to non-crossing ones."""
    total = Fraction(0)
    if n == 0:
        return Fraction(1)
    for p in enumerate_set_partitions(n):
        if crossing_by_quadruples(p.blocks):
            continue
        term = Fraction(1)
        for b in p.blocks:
            term *= cumulants[len(b) - 1] if len(b) <= len(cumulants) else 0
        total += term
    return total


def test_semicircular_moments():
    S = semicircular(1)
    assert S.moments(8) == (1, 0, 1, 0, 2, 0, 5, 0, 14)
    for m in range(8):
        assert S.moment(2 * m) == catalan(m)


def test_semicircular_variance_scaling():
    S = semicircular(Fraction(3))
    assert S.moment(4) == 2 * 9


@pytest.mark.parametrize("lam", [1, 2, Fraction(1, 2), 3])
def test_free_poisson_by_riordan_counts(lam):
    Z = free_poisson_centered(lam)
    for m in range(1, 9):
        expected = sum(Fraction(lam) ** j * count_nc_no_singleton(m, j) for j in range(1, m + 1))
        assert Z.moment(m) == expected


def test_free_poisson_examples():
    assert free_poisson_centered(2).moment(4) == 10
    assert free_poisson_centered(1).moments(6) == (1, 0, 1, 1, 3, 6, 15)


def test_bernoulli_and_mesokurtic():
    B = bernoulli_sym()
    assert B.moments(6) == (1, 0, 1, 0, 1, 0, 1)
    assert B.cumulant(4) == -1
    M = mesokurtic()
    assert math.isclose(M.cumulant(2), 1, abs_tol=1e-12)
    assert abs(M.cumulant(4)) < 1e-12
    assert not M.exact


def test_point_mass():
    P = point_mass(Fraction(3))
    assert P.moment(4) == 81


@given(st.lists(fractions, min_size=1, max_size=7))
def test_moment_recursion_matches_enumeration(cums):
    law = FreeLaw(tuple(cums))
    for n in range(len(cums) + 1):
        assert law.moment(n) == brute_moment(cums, n)


@given(st.lists(fractions, min_size=1, max_size=10))
def test_round_trip(cums):
    law = FreeLaw(tuple(cums))
    ms = law.moments(len(cums))[1:]
    back = cumulants_from_moments(ms)
    assert back.cumulants == law.cumulants


@given(st.lists(fractions, min_size=4, max_size=4))
def test_low_order_closed_forms(ms):
    m1, m2, m3, m4 = ms
    law = cumulants_from_moments(ms)
    assert law.cumulant(1) == m1
    assert law.cumulant(2) == m2 - m1**2
    assert law.cumulant(3) == m3 - 3 * m1 * m2 + 2 * m1**3
    assert law.cumulant(4) == m4 - 2 * m2**2 + 10 * m2 * m1**2 - 4 * m1 * m3 - 5 * m1**4


@given(st.lists(fractions, min_size=1, max_size=6), st.lists(fractions, min_size=1, max_size=6))
def test_free_convolution_adds_cumulants(a, b):
    c = free_convolve(FreeLaw(tuple(a)), FreeLaw(tuple(b)))
    for n in range(1, min(len(a), len(b)) + 1):
        assert c.cumulant(n) == a[n - 1] + b[n - 1]


@given(st.lists(fractions, min_size=1, max_size=6), fractions)
def test_scaling(cums, c):
    law = FreeLaw(tuple(cums))
    s = scale(law, c)
    for n in range(len(cums) + 1):
        assert s.moment(n) == c**n * law.moment(n)


def test_symmetric_laws_have_zero_odd_moments():
    for law in (semicircular(1), bernoulli_sym()):
        assert all(law.moment(k) == 0 for k in range(1, 15, 2))


def test_truncation_and_json():
    law = free_poisson_centered(Fraction(3, 2), order=8)
    assert law.with_order(4).order == 4
    again = FreeLaw.from_json(json.loads(json.dumps(law.to_json())))
    assert again == law


def test_spectral_radius():
    assert 1.5 < spectral_radius_estimate(semicircular(1), 8) <= 2.0 + 1e-9


@pytest.mark.parametrize("name,m4", [("semicircular", 2), ("semicircular:2", 8), ("free-poisson:1", 3),
                                      ("bernoulli-sym", 1)])
def test_law_from_name(name, m4):
    assert law_from_name(name).moment(4) == m4


def test_law_from_inline_json():
    law = law_from_name('{"cumulants": ["0", "1", "0", "0"], "label": "s"}')
    assert law.moment(4) == 2


@pytest.mark.parametrize("bad", ["nonsense", "free-poisson:-1", "semicircular:-2"])
def test_law_from_name_rejects(bad):
    with pytest.raises((ValidationError, DomainError)):
        law_from_name(bad)
