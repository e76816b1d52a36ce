import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from ncchaos.chebyshev import (
    IDENTITY,
    Polynomial,
    cheb_u,
    chebyshev_orthonormality,
    coefficient_table,
    is_admissible,
    polynomial_moment,
    pushforward_law,
    pushforward_moment,
)
from ncchaos.errors import DomainError
from ncchaos.freedist import bernoulli_sym, free_poisson_centered, semicircular

small = st.integers(-6, 6)
polys = st.lists(small, min_size=1, max_size=5).map(lambda c: Polynomial(tuple(c)))


def test_low_orders():
    assert cheb_u(0).coeffs == (1,)
    assert cheb_u(1).coeffs == (0, 1)
    assert cheb_u(2).coeffs == (-1, 0, 1)
    assert cheb_u(3).coeffs == (0, -2, 0, 1)
    assert str(cheb_u(3)) == "-2*x + x^3"
    assert coefficient_table(2) == [[1], [0, 1], [-1, 0, 1]]


@pytest.mark.parametrize("h", range(0, 12))
def test_trigonometric_identity(h):
    # U_h(2 cos t) = sin((h+1) t) / sin t
    for t in np.linspace(0.1, 3.0, 13):
        assert math.isclose(float(cheb_u(h)(2 * math.cos(t))), math.sin((h + 1) * t) / math.sin(t),
                            rel_tol=1e-9, abs_tol=1e-9)


@pytest.mark.parametrize("h", range(0, 10))
def test_monic_and_parity(h):
    u = cheb_u(h)
    assert u.degree == h and u.coeffs[-1] == 1
    assert all(c == 0 for c in u.coeffs[(h + 1) % 2::2])


@pytest.mark.parametrize("j", range(0, 6))
@pytest.mark.parametrize("k", range(0, 6))
def test_orthonormal_under_semicircle(j, k):
    assert chebyshev_orthonormality(j, k) == (1 if j == k else 0)


def test_u2_of_semicircle_is_free_poisson():
    S, Z = semicircular(1), free_poisson_centered(1)
    for m in range(1, 9):
        assert pushforward_moment(S, cheb_u(2), m) == Z.moment(m)
    law = pushforward_law(S, cheb_u(2))
    assert law.cumulants[:8] == (0,) + (1,) * 7


@given(polys, polys, st.fractions(-3, 3, max_denominator=5))
def test_ring_operations_pointwise(p, q, x):
    assert (p + q)(x) == p(x) + q(x)
    assert (p * q)(x) == p(x) * q(x)
    assert (p - q)(x) == p(x) - q(x)
    assert (p ** 2)(x) == p(x) ** 2


@given(polys)
def test_matrix_evaluation_matches_scalar_on_diagonal(p):
    d = np.diag([0.5, -1.0, 2.0])
    out = p(d)
    for i, v in enumerate((0.5, -1.0, 2.0)):
        assert math.isclose(out[i, i], float(p(Fraction(v))), rel_tol=1e-12, abs_tol=1e-12)


def test_polynomial_moment():
    assert polynomial_moment(semicircular(1), IDENTITY ** 4) == 2
    with pytest.raises(DomainError):
        polynomial_moment(semicircular(1, order=2), cheb_u(3))
    with pytest.raises(DomainError):
        cheb_u(-1)


def test_admissibility():
    assert is_admissible(semicircular(1), 3)[0]
    assert is_admissible(bernoulli_sym(), 1)[0]
    ok, m1, m2 = is_admissible(bernoulli_sym(), 2)
    assert not ok and m1 == 0 and m2 == 0
