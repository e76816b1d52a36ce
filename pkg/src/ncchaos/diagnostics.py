"""Finite-N surrogates for the limit theorems on Chebyshev sums.

A criterion is evaluated on a sweep of N.  The verdict is positive when
every criterion quantity is non-increasing along the sweep and, at the
largest N, lies within a threshold of its limit.  One N has no trend and
is reported as inconclusive.

The module also builds the exponent plans of the iterated Cauchy-Schwarz
bound and checks them on random matrices under the normalized trace.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .chebyshev import is_admissible
from .errors import DomainError, ResourceLimitError
from .freedist import FreeLaw, semicircular
from .freemoments import sum_joint_moment
from .kernels import (
    ChebyshevSumSpec,
    Kernel,
    contraction_norm,
    family,
    lifted_midpoint_defect,
    star_norm,
    tau,
)

SEMICIRCULAR = "semicircular-consistent"
FREE_POISSON = "free-poisson-consistent"
INCONSISTENT = "inconsistent"
INCONCLUSIVE = "inconclusive"

TREND_TOL = 1e-12


@dataclass(frozen=True)
class Thresholds:
    moment: float = 0.15
    norm: float = 0.15


@dataclass
class SweepRow:
    N: int
    second_moment: float | None = None
    third_moment: float | None = None
    fourth_moment: float | None = None
    contraction_norms: dict = field(default_factory=dict)
    star_norms: dict = field(default_factory=dict)
    midpoint_defect: float | None = None
    statistic: float | None = None
    error: str | None = None

    def to_json(self) -> dict:
        return {
            "N": self.N,
            "second_moment": self.second_moment,
            "third_moment": self.third_moment,
            "fourth_moment": self.fourth_moment,
            "contraction_norms": {str(k): v for k, v in self.contraction_norms.items()},
            "star_norms": {str(k): v for k, v in self.star_norms.items()},
            "midpoint_defect": self.midpoint_defect,
            "statistic": self.statistic,
            "error": self.error,
        }


@dataclass
class Condition:
    name: str
    satisfied: bool
    detail: str = ""


@dataclass
class ConvergenceReport:
    target: str
    rows: list
    verdict: str
    conditions: list

    @property
    def N_list(self):
        return [r.N for r in self.rows]

    def series(self, name: str):
        return [getattr(r, name) for r in self.rows]

    def norm_series(self, q: int):
        return [r.contraction_norms.get(q) for r in self.rows]

    def to_json(self) -> dict:
        return {
            "schema_version": 1,
            "target": self.target,
            "verdict": self.verdict,
            "conditions": [
                {"name": c.name, "satisfied": c.satisfied, "detail": c.detail}
                for c in self.conditions
            ],
            "rows": [r.to_json() for r in self.rows],
        }


def non_increasing(xs, tol=TREND_TOL) -> bool:
    return all(b <= a + tol for a, b in zip(xs, xs[1:]))


def strictly_decreasing(xs) -> bool:
    return all(b < a for a, b in zip(xs, xs[1:]))


def family_spec(name: str, orders, strict: bool = True, **params) -> Callable[[int], ChebyshevSumSpec]:
    """N -> ChebyshevSumSpec for a built-in kernel family."""
    orders = tuple(orders)

    def make(N):
        return ChebyshevSumSpec(family(name, N, **params), orders, strict=strict)

    make.__name__ = f"{name}{orders}"
    return make


def _trend_condition(name, values, limit, threshold):
    dist = [abs(v - limit) for v in values]
    trend = non_increasing(dist)
    close = dist[-1] < threshold
    return [
        Condition(f"{name} approaches {limit:g}", trend,
                  "distances " + ", ".join(f"{x:.4g}" for x in dist)),
        Condition(f"{name} within {threshold:g} of {limit:g} at N={{N}}", close,
                  f"distance {dist[-1]:.4g}"),
    ]


def _verdict(rows, conditions, positive):
    if any(r.error for r in rows) or len(rows) < 2:
        return INCONCLUSIVE
    return positive if all(c.satisfied for c in conditions) else INCONSISTENT


def _finish(conditions, N):
    for c in conditions:
        c.name = c.name.replace("{N}", str(N))
    return conditions


def semicircular_criterion(spec_for: Callable[[int], ChebyshevSumSpec], N_list,
                           law: FreeLaw | None = None, thresholds: Thresholds = Thresholds(),
                           threads: int | None = None) -> ConvergenceReport:
    """Fourth moment against 2 and the contraction norms ||f ~q~ f|| against 0."""
    law = semicircular(1) if law is None else law
    rows = []
    for N in N_list:
        spec = spec_for(N)
        f, d = spec.kernel, spec.d
        row = SweepRow(N)
        row.contraction_norms = {q: contraction_norm(f, q) for q in range(1, d)}
        row.star_norms = {r: star_norm(f, r) for r in range(1, d + 1)}
        if spec.lifted.m % 2 == 0:
            row.midpoint_defect = lifted_midpoint_defect(spec.lifted)
        try:
            row.second_moment = sum_joint_moment([(spec, 2)], law, threads=threads)
            row.third_moment = sum_joint_moment([(spec, 3)], law, threads=threads)
            row.fourth_moment = sum_joint_moment([(spec, 4)], law, threads=threads)
        except ResourceLimitError as exc:
            row.error = str(exc)
        rows.append(row)
    good = [r for r in rows if r.error is None]
    conditions = []
    if good:
        conditions += _trend_condition("fourth moment", [r.fourth_moment for r in good], 2.0,
                                       thresholds.moment)
        d = len(good[0].contraction_norms) + 1
        for q in range(1, d):
            conditions += _trend_condition(f"||f ~{q}~ f||", [r.contraction_norms[q] for r in good],
                                           0.0, thresholds.norm)
        conditions = _finish(conditions, good[-1].N)
    return ConvergenceReport("semicircular", rows, _verdict(rows, conditions, SEMICIRCULAR),
                             conditions)


def free_poisson_target(lam) -> float:
    """phi(Z^4) - 2 phi(Z^3) = 2 lam^2 - lam for centred free Poisson Z(lam)."""
    return 2 * lam**2 - lam


def free_poisson_criterion(spec_for: Callable[[int], ChebyshevSumSpec], lam, N_list,
                           law: FreeLaw | None = None, thresholds: Thresholds = Thresholds(),
                           threads: int | None = None) -> ConvergenceReport:
    """Contraction conditions for a Z(lam) limit plus phi(Q^4) - 2 phi(Q^3)."""
    law = semicircular(1) if law is None else law
    lam = float(lam)
    rows = []
    for N in N_list:
        spec = spec_for(N)
        d, m = spec.d, spec.lifted.m
        if d % 2 or m % 2:
            raise DomainError(
                f"a free Poisson limit needs both d and h_1+..+h_d even (d={d}, sum={m}); "
                "an even order sum alone does not suffice"
            )
        f = spec.kernel
        row = SweepRow(N)
        row.contraction_norms = {q: contraction_norm(f, q) for q in range(1, d) if q != d // 2}
        row.star_norms = {d // 2 + 1: star_norm(f, d // 2 + 1)}
        row.midpoint_defect = float(np.linalg.norm((_half_contract(f) - f.values).ravel()))
        try:
            row.second_moment = sum_joint_moment([(spec, 2)], law, threads=threads)
            row.third_moment = sum_joint_moment([(spec, 3)], law, threads=threads)
            row.fourth_moment = sum_joint_moment([(spec, 4)], law, threads=threads)
            row.statistic = row.fourth_moment - 2 * row.third_moment
        except ResourceLimitError as exc:
            row.error = str(exc)
        rows.append(row)
    good = [r for r in rows if r.error is None]
    conditions = []
    if good:
        conditions += _trend_condition("second moment", [r.second_moment for r in good], lam,
                                       thresholds.moment)
        conditions += _trend_condition("phi(Q^4) - 2 phi(Q^3)", [r.statistic for r in good],
                                       free_poisson_target(lam), thresholds.moment)
        for q in good[0].contraction_norms:
            conditions += _trend_condition(f"||f ~{q}~ f||", [r.contraction_norms[q] for r in good],
                                           0.0, thresholds.norm)
        for r in good[0].star_norms:
            conditions += _trend_condition(f"||f *{r} f||", [x.star_norms[r] for x in good],
                                           0.0, thresholds.norm)
        conditions += _trend_condition("||f ~d/2~ f - f||", [r.midpoint_defect for r in good],
                                       0.0, thresholds.norm)
        conditions = _finish(conditions, good[-1].N)
    return ConvergenceReport(f"free-poisson({lam:g})", rows,
                             _verdict(rows, conditions, FREE_POISSON), conditions)


def _half_contract(f: Kernel):
    from .kernels import contract

    return contract(f, f.d // 2).values


def corollary_check(name: str, N_list, d: int = 2, thresholds: Thresholds = Thresholds(),
                    **params):
    """Verdicts of the semicircular criterion for inputs U_1(S) and U_2(S) = Z(1)."""
    v1 = semicircular_criterion(family_spec(name, (1,) * d, **params), N_list,
                                thresholds=thresholds)
    v2 = semicircular_criterion(family_spec(name, (2,) * d, **params), N_list,
                                thresholds=thresholds)
    return v1, v2


# -- Lindeberg gap -----------------------------------------------------------------

@dataclass(frozen=True)
class GapRow:
    N: int
    moment_x: float
    moment_y: float
    gap: float
    tau_max: float
    ratio: float


def lindeberg_gap(specs_for: Callable[[int], list], lawX: FreeLaw, lawY: FreeLaw, N_list,
                  threads: int | None = None) -> list:
    """|phi(prod Q_j(U_h(X))^{m_j}) - phi(prod Q_j(Y)^{m_j})| along N.

    ``specs_for(N)`` returns a list of (ChebyshevSumSpec, exponent).
    """
    m1, m2 = lawY.moment(1), lawY.moment(2)
    if abs(m1) > 1e-12 or abs(m2 - 1) > 1e-12:
        raise DomainError(f"Y must be centred with unit variance (phi(Y)={m1}, phi(Y^2)={m2})")
    out = []
    checked = set()
    for N in N_list:
        specs = specs_for(N)
        for spec, _ in specs:
            for h in spec.orders:
                if h in checked:
                    continue
                ok, a, b = is_admissible(lawX, h)
                if not ok:
                    raise DomainError(
                        f"U_{h}(X) is not centred with unit variance: "
                        f"phi(U_{h}(X))={a}, phi(U_{h}(X)^2)={b}"
                    )
                checked.add(h)
        x = sum_joint_moment(specs, lawX, chebyshev=True, threads=threads)
        y = sum_joint_moment(specs, lawY, chebyshev=False, threads=threads)
        t = max(tau(s.kernel) for s, _ in specs)
        gap = abs(x - y)
        out.append(GapRow(N, x, y, gap, t, gap / math.sqrt(t) if t > 0 else math.inf))
    return out


def ratio_spread(rows, floor: float = 1e-12) -> float:
    """max/min of the ratio column; a column that is identically ~0 counts as flat (1)."""
    ratios = [r.ratio for r in rows]
    hi, lo = max(ratios), min(ratios)
    if hi <= floor:
        return 1.0
    if lo <= floor:
        return math.inf
    return hi / lo


# -- iterated Cauchy-Schwarz ---------------------------------------------------------

@dataclass(frozen=True)
class ExponentPlan:
    """Per-position multisets I_l of exponents s_j and the matching powers."""

    n: int
    multisets: tuple
    weights: tuple

    def mandated_sum(self, l: int) -> int:
        """Required value of sum_j 2^{s_j} for position l (1-based)."""
        n = self.n
        if n % 2 == 0:
            return 2 ** (n // 2 - 1)
        return 2 ** ((n - 3) // 2) if l <= (n - 1) // 2 else 2 ** ((n - 1) // 2)

    def mandated_weight(self, l: int) -> float:
        n = self.n
        if n % 2 == 0:
            return 2.0 ** (-(n // 2))
        return 2.0 ** (-((n - 1) // 2)) if l <= (n - 1) // 2 else 2.0 ** (-((n + 1) // 2))

    def satisfies_constraints(self) -> bool:
        return all(
            sum(2**s for s in I) == self.mandated_sum(l)
            and all(w == self.mandated_weight(l) for w in W)
            for l, (I, W) in enumerate(zip(self.multisets, self.weights), start=1)
        )


def _plan_word(word, weight, out):
    """``word`` is a list of (position, v); a leaf contributes s = v with power ``weight``/2."""
    k = len(word)
    if k == 1:
        pos, v = word[0]
        out.append((pos, v, weight / 2))
        return
    cut = k // 2
    for part in (word[:cut], word[cut:]):
        if len(part) == 1:
            _plan_word(part, weight, out)
            continue
        # phi(A A*) = phi(a_1*a_1 a_2 .. a_{k-1} a_k a_k* a_{k-1}* .. a_2*) by traciality
        first, last = part[0], part[-1]
        middle = part[1:-1]
        doubled = [(first[0], first[1] + 1)] + middle + [(last[0], last[1] + 1)] + middle[::-1]
        _plan_word(doubled, weight / 2, out)


def iterated_cs_plan(n: int) -> ExponentPlan:
    """Exponent plan from halving: split at n/2 (odd n: the first half is shorter), recurse."""
    if n < 2:
        raise DomainError("the plan needs n >= 2")
    leaves = []
    _plan_word([(l, 0) for l in range(n)], 1.0, leaves)
    sets = [[] for _ in range(n)]
    weights = [[] for _ in range(n)]
    for pos, s, w in leaves:
        sets[pos].append(s)
        weights[pos].append(w)
    order = [sorted(range(len(S)), key=S.__getitem__) for S in sets]
    return ExponentPlan(
        n,
        tuple(tuple(S[i] for i in o) for S, o in zip(sets, order)),
        tuple(tuple(W[i] for i in o) for W, o in zip(weights, order)),
    )


@dataclass(frozen=True)
class CSCheck:
    lhs: float
    rhs: float
    holds: bool


def normalized_trace(a: np.ndarray) -> complex:
    return np.trace(a) / a.shape[0]


def iterated_cs_check(plan: ExponentPlan, mats, tol: float = 1e-9) -> CSCheck:
    mats = [np.asarray(c) for c in mats]
    if len(mats) != plan.n:
        raise DomainError(f"plan is for {plan.n} factors, got {len(mats)}")
    dim = mats[0].shape
    if any(c.ndim != 2 or c.shape != dim or dim[0] != dim[1] for c in mats):
        raise DomainError("all factors must be square matrices of one dimension")
    prod = mats[0]
    for c in mats[1:]:
        prod = prod @ c
    lhs = float(abs(normalized_trace(prod)))
    rhs = 1.0
    for c, I, W in zip(mats, plan.multisets, plan.weights):
        pos = c @ c.conj().T
        for s, w in zip(I, W):
            val = normalized_trace(np.linalg.matrix_power(pos, 2**s)).real
            rhs *= max(val, 0.0) ** w
    return CSCheck(lhs, rhs, lhs <= rhs + tol)


def random_cs_trials(n: int, trials: int, dim: int, seed: int, complex_entries=False):
    """Run iterated_cs_check on ``trials`` random Gaussian matrix tuples."""
    rng = np.random.default_rng(seed)
    plan = iterated_cs_plan(n)
    out = []
    for _ in range(trials):
        mats = rng.standard_normal((n, dim, dim))
        if complex_entries:
            mats = mats + 1j * rng.standard_normal((n, dim, dim))
        out.append(iterated_cs_check(plan, list(mats)))
    return out
