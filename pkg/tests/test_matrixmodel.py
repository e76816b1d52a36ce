import numpy as np
import pytest

from ncchaos.chebyshev import cheb_u
from ncchaos.errors import DomainError, ResourceLimitError, ValidationError, limits
from ncchaos.freedist import free_poisson_centered, semicircular
from ncchaos.freemoments import Letter, VariableFamily, Word, sum_moment, word_moment
from ncchaos.kernels import ChebyshevSumSpec, example2, ring
from ncchaos.matrixmodel import (
    MatrixEnsembleSpec,
    TrialSummary,
    chebyshev_sum_matrix,
    empirical_sum_moment,
    empirical_word_moment,
    sample_family,
    sample_matrix,
    sum_moment_trials,
    trace_moment,
    word_moment_trials,
)


def test_gue_is_hermitian_and_normalized():
    m = sample_matrix(MatrixEnsembleSpec(200, 1, "gue", seed=1), 0)
    assert np.allclose(m, m.conj().T)
    assert trace_moment(m @ m) == pytest.approx(1, abs=0.05)
    assert trace_moment(np.linalg.matrix_power(m, 4)) == pytest.approx(2, abs=0.15)


def test_wishart_matches_free_poisson():
    ens = MatrixEnsembleSpec(300, 1, "wishart", seed=2, lam=2)
    m = sample_matrix(ens, 0)
    Z = free_poisson_centered(2)
    assert trace_moment(m) == pytest.approx(0, abs=0.02)
    assert trace_moment(m @ m) == pytest.approx(float(Z.moment(2)), rel=0.05)
    assert trace_moment(m @ m @ m) == pytest.approx(float(Z.moment(3)), rel=0.1)


def test_seeding_is_deterministic_and_per_matrix():
    ens = MatrixEnsembleSpec(20, 3, "gue", seed=5)
    a, b = sample_family(ens, 0), sample_family(ens, 0)
    assert all(np.array_equal(x, y) for x, y in zip(a, b))
    assert not np.array_equal(a[0], a[1])
    assert np.array_equal(sample_family(MatrixEnsembleSpec(20, 5, "gue", seed=5), 0)[2], a[2])
    assert not np.array_equal(sample_family(ens, 1)[0], a[0])


def test_sum_matrix_matches_explicit_loop():
    spec = ChebyshevSumSpec(ring(5), (2, 2))
    mats = sample_family(MatrixEnsembleSpec(6, 5, "gue", seed=3))
    q = chebyshev_sum_matrix(spec, mats)
    u = cheb_u(2)
    direct = sum(spec.kernel.values[i, j] * u(mats[i]) @ u(mats[j]) for i in range(5) for j in range(5))
    assert np.allclose(q, direct)


def test_word_moment_trials_agree_with_exact():
    w = Word((Letter(1), Letter(2), Letter(1, cheb_u(2)), Letter(2), Letter(1)))
    ens = MatrixEnsembleSpec(150, 2, "gue", seed=4)
    summary = word_moment_trials(w, ens, 8)
    exact = float(word_moment(VariableFamily.iid(semicircular(1)), w))
    assert summary.agrees_with(exact)


def test_sum_moment_trials_agree_with_exact():
    spec = ChebyshevSumSpec(example2(5), (1, 1))
    ens = MatrixEnsembleSpec(150, 5, "gue", seed=9)
    summary = sum_moment_trials(spec, ens, 4, trials=8)
    assert summary.agrees_with(sum_moment(spec, semicircular(1), 4))


def test_trial_summary():
    s = TrialSummary.of([1.0, 2.0, 3.0])
    assert s.mean == 2.0
    assert s.std_error == pytest.approx(1 / np.sqrt(3))
    assert s.agrees_with(2.5) and not s.agrees_with(10)


def test_errors():
    with pytest.raises(ValidationError):
        MatrixEnsembleSpec(1, 1)
    with pytest.raises(ValidationError):
        MatrixEnsembleSpec(10, 1, "wigner-ish")
    with pytest.raises(DomainError):
        MatrixEnsembleSpec(10, 1, "wishart", lam=0)
    mats = sample_family(MatrixEnsembleSpec(4, 2, seed=0))
    with pytest.raises(DomainError):
        empirical_word_moment(mats, Word.of(1, 3))
    with pytest.raises(DomainError):
        empirical_sum_moment(ChebyshevSumSpec(example2(5), (1, 1)), mats, 2)
    with limits(matrix_budget=100):
        with pytest.raises(ResourceLimitError):
            sample_family(MatrixEnsembleSpec(20, 2))
    assert empirical_word_moment(mats, Word(())) == 1.0
