import json
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from ncchaos.diagnostics import (
    FREE_POISSON,
    INCONCLUSIVE,
    INCONSISTENT,
    SEMICIRCULAR,
    GapRow,
    Thresholds,
    corollary_check,
    family_spec,
    free_poisson_criterion,
    free_poisson_target,
    iterated_cs_check,
    iterated_cs_plan,
    lindeberg_gap,
    non_increasing,
    random_cs_trials,
    ratio_spread,
    semicircular_criterion,
    strictly_decreasing,
)
from ncchaos.errors import DomainError
from ncchaos.freedist import bernoulli_sym, free_poisson_centered, point_mass, semicircular
from ncchaos.freemoments import sum_moment
from ncchaos.kernels import ChebyshevSumSpec, Kernel
from ncchaos.suite import PLAN_EXAMPLES


# -- Cauchy-Schwarz plans ------------------------------------------------------------

@pytest.mark.parametrize("n", sorted(PLAN_EXAMPLES))
def test_plan_examples(n):
    assert iterated_cs_plan(n).multisets == PLAN_EXAMPLES[n]


@pytest.mark.parametrize("n", range(2, 17))
def test_plan_constraints(n):
    plan = iterated_cs_plan(n)
    assert plan.satisfies_constraints()
    # total weight: the powers multiply to a homogeneous bound of degree n
    total = sum(w * 2**s * 2 for I, W in zip(plan.multisets, plan.weights) for s, w in zip(I, W))
    assert total == pytest.approx(n)


def test_plan_rejects_small_n():
    with pytest.raises(DomainError):
        iterated_cs_plan(1)


@given(st.integers(0, 2**32 - 1), st.integers(2, 7), st.integers(1, 5), st.booleans())
def test_cs_inequality_random(seed, n, dim, cplx):
    assert random_cs_trials(n, 1, dim, seed, complex_entries=cplx)[0].holds


def test_cs_n2_is_plain_cauchy_schwarz():
    rng = np.random.default_rng(3)
    a, b = rng.standard_normal((2, 4, 4))
    chk = iterated_cs_check(iterated_cs_plan(2), [a, b])
    assert chk.lhs == pytest.approx(abs(np.trace(a @ b)) / 4)
    rhs = math.sqrt(np.trace(a @ a.T) / 4 * np.trace(b @ b.T) / 4)
    assert chk.rhs == pytest.approx(rhs)


@pytest.mark.parametrize("n", range(2, 9))
def test_cs_equality_for_unitaries(n):
    chk = iterated_cs_check(iterated_cs_plan(n), [np.eye(3)] * n)
    assert chk.lhs == pytest.approx(1) and chk.rhs == pytest.approx(1)


def test_cs_shape_errors():
    with pytest.raises(DomainError):
        iterated_cs_check(iterated_cs_plan(3), [np.eye(2)] * 2)
    with pytest.raises(DomainError):
        iterated_cs_check(iterated_cs_plan(2), [np.eye(2), np.eye(3)])


# -- trends and verdicts ---------------------------------------------------------------

def test_trend_helpers():
    assert non_increasing([3, 2, 2, 1])
    assert not strictly_decreasing([3, 2, 2, 1])
    assert strictly_decreasing([3, 2, 1])


def test_ring_is_semicircular_consistent():
    rep = semicircular_criterion(family_spec("ring", (1, 1)), [20, 40, 80])
    assert rep.verdict == SEMICIRCULAR
    assert all(abs(r.second_moment - 1) < 1e-12 for r in rep.rows)
    assert abs(rep.series("fourth_moment")[-1] - 2) < 0.15
    doc = json.loads(json.dumps(rep.to_json()))
    assert doc["schema_version"] == 1 and doc["verdict"] == SEMICIRCULAR


def test_example2_drifts_to_free_poisson_moment():
    # f ~1~ f - f -> 0 for example2, so the limit is Z(1), whose fourth moment is 3
    rep = semicircular_criterion(family_spec("example2", (1, 1)), list(range(4, 11)))
    m4 = rep.series("fourth_moment")
    assert all(b > a for a, b in zip(m4, m4[1:]))
    assert all(x < 3 for x in m4)
    norms = rep.norm_series(1)
    assert all(b > a for a, b in zip(norms, norms[1:]))
    assert rep.verdict == INCONSISTENT


def test_star_counterexample_is_inconsistent():
    rep = semicircular_criterion(family_spec("star-counterexample", (1, 1)), [5, 10, 20])
    assert rep.verdict == INCONSISTENT
    assert all(x == pytest.approx(2.5) for x in rep.series("fourth_moment"))


def test_single_N_is_inconclusive():
    assert semicircular_criterion(family_spec("ring", (1, 1)), [20]).verdict == INCONCLUSIVE


@pytest.mark.parametrize("name,expected", [("ring", SEMICIRCULAR), ("star-counterexample", INCONSISTENT)])
def test_corollary_order_swap(name, expected):
    v1, v2 = corollary_check(name, [20, 40, 80])
    assert v1.verdict == v2.verdict == expected


def test_free_poisson_targets():
    assert free_poisson_target(1) == 1
    assert free_poisson_target(2) == 6
    Z = free_poisson_centered(2)
    assert Z.moment(4) - 2 * Z.moment(3) == free_poisson_target(2)


def test_poisson_block_is_free_poisson_consistent():
    rep = free_poisson_criterion(family_spec("poisson-block", (1, 1), strict=False, lam=1), 1,
                                 [10, 20, 40, 60])
    assert rep.verdict == FREE_POISSON


def test_ring_is_not_free_poisson():
    rep = free_poisson_criterion(family_spec("ring", (1, 1)), 1, [20, 40, 80])
    assert rep.verdict == INCONSISTENT


def test_free_poisson_parity_check():
    v = np.zeros((4, 4, 4))
    for i in range(4):
        a, b, c = i, (i + 1) % 4, (i + 2) % 4
        v[a, b, c] = v[c, b, a] = 1
    k = Kernel(v / np.linalg.norm(v))
    with pytest.raises(DomainError):
        free_poisson_criterion(lambda N: ChebyshevSumSpec(k, (1, 2, 1)), 1, [4])


# -- Lindeberg gap -------------------------------------------------------------------

def ex2(m, orders=(1, 1)):
    make = family_spec("example2", orders)
    return lambda N: [(make(N), m)]


def test_lindeberg_second_moment_gap_vanishes():
    rows = lindeberg_gap(ex2(2), semicircular(1), free_poisson_centered(1), range(4, 9))
    assert all(r.gap <= 1e-10 for r in rows)
    assert ratio_spread(rows) == 1.0


def test_lindeberg_fourth_moment_ratio():
    rows = lindeberg_gap(ex2(4), semicircular(1), free_poisson_centered(1), range(4, 9))
    assert all(r.gap > 0 for r in rows)
    for r in rows:
        assert r.tau_max == pytest.approx(2 / r.N)
        assert r.moment_x == pytest.approx(sum_moment(family_spec("example2", (1, 1))(r.N),
                                                      semicircular(1), 4))
    assert ratio_spread(rows) < 3


def test_lindeberg_rejects_bad_laws():
    with pytest.raises(DomainError):
        lindeberg_gap(ex2(2), semicircular(1), point_mass(1), [4])
    with pytest.raises(DomainError):
        lindeberg_gap(ex2(2, (2, 2)), bernoulli_sym(), semicircular(1), [4])


def test_ratio_spread_semantics():
    row = lambda r: GapRow(4, 0, 0, 0, 1, r)
    assert ratio_spread([row(0), row(0)]) == 1.0
    assert ratio_spread([row(0), row(1)]) == math.inf
    assert ratio_spread([row(1), row(2)]) == 2.0


def test_thresholds_are_used():
    tight = Thresholds(moment=1e-6, norm=1e-6)
    rep = semicircular_criterion(family_spec("ring", (1, 1)), [20, 40], thresholds=tight)
    assert rep.verdict == INCONSISTENT


def test_example2_is_free_poisson_consistent():
    rep = free_poisson_criterion(family_spec("example2", (1, 1)), 1, [10, 20, 40, 80])
    assert rep.verdict == FREE_POISSON
