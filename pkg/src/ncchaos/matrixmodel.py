"""Random-matrix realizations of free variables, used as a Monte-Carlo check.

Independent GUE matrices are asymptotically free semicircular elements;
centred complex Wishart matrices W - lam*I with aspect ratio lam are
asymptotically free centred free Poisson elements.  Everything here is
statistical and can only fail to falsify the exact engine.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .chebyshev import IDENTITY, cheb_u
from .errors import DomainError, ResourceLimitError, ValidationError, get_limits
from .freemoments import Word
from .kernels import ChebyshevSumSpec

KINDS = {
    "gue": "gaussian-hermitian",
    "gaussian-hermitian": "gaussian-hermitian",
    "semicircular": "gaussian-hermitian",
    "wishart": "shifted-wishart",
    "shifted-wishart": "shifted-wishart",
    "free-poisson": "shifted-wishart",
}


@dataclass(frozen=True)
class MatrixEnsembleSpec:
    dim: int
    count: int
    kind: str = "gaussian-hermitian"
    seed: int = 0
    lam: float = 1.0

    def __post_init__(self):
        if self.dim < 2:
            raise ValidationError("matrix dimension must be at least 2")
        if self.count < 0:
            raise ValidationError("count must be nonnegative")
        try:
            object.__setattr__(self, "kind", KINDS[self.kind])
        except KeyError:
            raise ValidationError(f"unknown ensemble kind {self.kind!r}")
        if self.lam <= 0:
            raise DomainError("Wishart aspect ratio must be positive")


def _rng(seed, trial, idx):
    return np.random.default_rng(np.random.SeedSequence((int(seed), int(trial), int(idx))))


def _complex_gaussian(rng, shape):
    # E|z|^2 = 1
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / math.sqrt(2)


def sample_matrix(spec: MatrixEnsembleSpec, idx: int, trial: int = 0) -> np.ndarray:
    rng = _rng(spec.seed, trial, idx)
    n = spec.dim
    if spec.kind == "gaussian-hermitian":
        g = _complex_gaussian(rng, (n, n))
        return (g + g.conj().T) / math.sqrt(2 * n)
    p = max(1, round(spec.lam * n))
    x = _complex_gaussian(rng, (n, p))
    return x @ x.conj().T / n - spec.lam * np.eye(n)


def sample_family(spec: MatrixEnsembleSpec, trial: int = 0) -> list:
    """``count`` independent Hermitian matrices; matrix k is seeded by (seed, trial, k)."""
    size = spec.dim * spec.dim * spec.count
    budget = get_limits().matrix_budget
    if size > budget:
        raise ResourceLimitError(f"{size} matrix entries exceed the budget {budget}", estimate=size)
    return [sample_matrix(spec, k, trial) for k in range(spec.count)]


def trace_moment(a: np.ndarray) -> float:
    return float(np.trace(a).real / a.shape[0])


def empirical_word_moment(mats, w: Word) -> float:
    """Normalized trace of P_1(M_{v_1}) ... P_n(M_{v_n}); variable ids are 1-based."""
    if not isinstance(w, Word):
        w = Word(w)
    if not w.letters:
        return 1.0
    out = None
    for letter in w.letters:
        if not 1 <= letter.var <= len(mats):
            raise DomainError(f"variable {letter.var} outside 1..{len(mats)}")
        a = letter.poly(mats[letter.var - 1])
        out = a if out is None else out @ a
    return trace_moment(out)


def chebyshev_sum_matrix(spec: ChebyshevSumSpec, mats, chebyshev: bool = True) -> np.ndarray:
    """Q = sum f(i_1..i_d) P_1(M_{i_1}) ... P_d(M_{i_d}), folded from the right."""
    N, d = spec.N, spec.d
    if len(mats) < N:
        raise DomainError(f"need at least N={N} matrices, got {len(mats)}")
    dim = mats[0].shape[0]
    size = N ** (d - 1) * dim * dim
    if size > get_limits().matrix_budget:
        raise ResourceLimitError(f"intermediate of {size} entries exceeds the matrix budget",
                                 estimate=size)
    polys = [cheb_u(h) if chebyshev else IDENTITY for h in spec.orders]
    stacks = {}
    for p in set(polys):
        stacks[p] = np.stack([p(m) for m in mats[:N]])
    g = np.tensordot(spec.kernel.values, stacks[polys[-1]], axes=([d - 1], [0]))
    for slot in range(d - 2, -1, -1):
        g = np.einsum("iab,...ibc->...ac", stacks[polys[slot]], g)
    return g


def empirical_sum_moment(spec: ChebyshevSumSpec, mats, m: int, chebyshev: bool = True) -> float:
    """(1/dim) tr(Q^m)."""
    q = chebyshev_sum_matrix(spec, mats, chebyshev)
    return trace_moment(np.linalg.matrix_power(q, m))


@dataclass(frozen=True)
class TrialSummary:
    values: tuple
    mean: float
    std_error: float

    @classmethod
    def of(cls, values):
        v = np.asarray(values, dtype=float)
        se = float(v.std(ddof=1) / math.sqrt(len(v))) if len(v) > 1 else math.nan
        return cls(tuple(float(x) for x in v), float(v.mean()), se)

    def agrees_with(self, exact: float, k: float = 5.0, floor: float = 1e-9) -> bool:
        return abs(self.mean - exact) <= k * self.std_error + floor


def sum_moment_trials(spec: ChebyshevSumSpec, ens: MatrixEnsembleSpec, m: int, trials: int,
                      chebyshev: bool = True) -> TrialSummary:
    vals = [empirical_sum_moment(spec, sample_family(ens, t), m, chebyshev) for t in range(trials)]
    return TrialSummary.of(vals)


def word_moment_trials(w: Word, ens: MatrixEnsembleSpec, trials: int) -> TrialSummary:
    vals = [empirical_word_moment(sample_family(ens, t), w) for t in range(trials)]
    return TrialSummary.of(vals)
