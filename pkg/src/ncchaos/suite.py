"""End-to-end reproduction checks run by ``ncchaos paper-suite``.

Each group returns a list of ``Check`` records; the suite passes when every
check does.  Groups: worked kernel examples, exact moment identities, the
lifted-kernel and contraction-inequality property suite, and the iterated
Cauchy-Schwarz plans.
"""

from __future__ import annotations

import math
import random
import time
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .chebyshev import cheb_u, pushforward_moment
from .diagnostics import iterated_cs_plan, random_cs_trials
from .freedist import cumulants_from_moments, free_poisson_centered, semicircular
from .kernels import (
    LiftedKernel,
    contract,
    contraction_norm,
    example1,
    example2,
    example3,
    influence_profile,
    lifted_contraction_norm,
    lifted_midpoint_defect,
    materialize_tensor,
    offdiag_constant,
    random_mirror_kernel,
    star_norm,
    tau,
    tensor_contract,
    tensor_contraction_norm,
)
from .ncpart import catalan, count_nc_no_singleton

EXACT_TOL = 1e-12
PROP_TOL = 1e-10


@dataclass
class Check:
    group: str
    name: str
    passed: bool
    detail: str = ""
    seconds: float = 0.0


def _basis_tensor(N, idx):
    T = np.zeros((N,) * len(idx))
    T[tuple(i - 1 for i in idx)] = 1.0
    return T


def worked_examples() -> list:
    out = []
    N = 5
    a = tensor_contract(_basis_tensor(N, (1, 2, 3)), 2, _basis_tensor(N, (3, 2, 1)))
    out.append(Check("examples", "e1e2e3 ~2~ e3e2e1 = e1e1",
                     bool(np.array_equal(a, _basis_tensor(N, (1, 1))))))
    b = tensor_contract(_basis_tensor(N, (1, 2, 3)), 1, _basis_tensor(N, (4, 2, 5)))
    out.append(Check("examples", "e1e2e3 ~1~ e4e2e5 = 0", not np.any(b)))
    ok = True
    for N in range(3, 12):
        c = contract(offdiag_constant(N), 1).values
        off = c[~np.eye(N, dtype=bool)]
        ok &= bool(np.all(np.abs(off - 1) < EXACT_TOL))
        ok &= bool(np.all(np.abs(np.diag(c) - (N - 1) / (N - 2)) < EXACT_TOL))
    out.append(Check("examples", "offdiag-constant ~1~ table, N=3..11", ok))
    ok = True
    for N in range(3, 12):
        p1, p2, p3 = (influence_profile(g(N)) for g in (example1, example2, example3))
        ok &= abs(p1[0] - 1) < EXACT_TOL and bool(np.all(np.abs(p1[1:] - 1 / (N - 1)) < EXACT_TOL))
        ok &= bool(np.all(np.abs(p2 - 2 / N) < EXACT_TOL))
        ok &= abs(p3[0]) < EXACT_TOL and bool(np.all(np.abs(p3[1:] - 2 / (N - 1)) < EXACT_TOL))
        ok &= abs(tau(example1(N)) - 1) < EXACT_TOL
        ok &= abs(tau(example2(N)) - 2 / N) < EXACT_TOL
        ok &= abs(tau(example3(N)) - 2 / (N - 1)) < EXACT_TOL
    out.append(Check("examples", "influence profiles and tau of the three example kernels", ok))
    ok = all(abs(g(N).variance() - 1) < EXACT_TOL for g in (example1, example2, example3)
             for N in range(3, 12))
    out.append(Check("examples", "example kernels have unit variance", ok))
    return out


def _r4_closed(m1, m2, m3, m4):
    return m4 - 2 * m2**2 + 10 * m2 * m1**2 - 4 * m1 * m3 - 5 * m1**4


def _r3_closed(m1, m2, m3):
    return m3 - 3 * m1 * m2 + 2 * m1**3


def moment_identities(seed: int = 0) -> list:
    out = []
    S = semicircular(1)
    out.append(Check("moments", "phi(S^2m) = C_m, m <= 7",
                     all(S.moment(2 * m) == catalan(m) for m in range(8))))
    Z = free_poisson_centered(1)
    ok = all(
        Z.moment(m) == sum(count_nc_no_singleton(m, j) for j in range(1, m + 1))
        for m in range(1, 9)
    )
    out.append(Check("moments", "phi(Z(1)^m) = sum_j R_{m,j}, m <= 8", ok))
    rng = random.Random(seed)
    ok = True
    for _ in range(100):
        ms = [Fraction(rng.randint(-20, 20), rng.randint(1, 9)) for _ in range(4)]
        law = cumulants_from_moments(ms, 4)
        ok &= law.cumulant(3) == _r3_closed(*ms[:3])
        ok &= law.cumulant(4) == _r4_closed(*ms)
    out.append(Check("moments", "closed-form r_3, r_4 vs recursive inversion (100 draws)", ok))
    u2 = cheb_u(2)
    ok = all(pushforward_moment(S, u2, m) == Z.moment(m) for m in range(1, 9))
    out.append(Check("moments", "U_2(S) and Z(1) share moments up to order 8", ok))
    return out


def _random_orders(rng, d):
    half = [int(h) for h in rng.integers(1, 4, size=(d + 1) // 2)]
    return tuple(half + half[: d // 2][::-1])


def proposition_suite(seed: int = 0, kernels: int = 100, inequalities: int = 200,
                      tensor_cap: int = 200_000) -> list:
    rng = np.random.default_rng(seed)
    worst5 = worst6 = 0.0
    done = 0
    while done < kernels:
        d = int(rng.integers(1, 4))
        N = int(rng.integers(2, 6))
        orders = _random_orders(rng, d)
        if N ** sum(orders) > tensor_cap:
            continue
        k = LiftedKernel(random_mirror_kernel(rng, d, N), orders)
        T = materialize_tensor(k)
        for r in range(1, k.m):
            worst5 = max(worst5, abs(lifted_contraction_norm(k, r) - tensor_contraction_norm(T, r)))
        if k.m % 2 == 0:
            dense = np.linalg.norm((tensor_contract(T, k.m // 2) - T).ravel())
            worst6 = max(worst6, abs(lifted_midpoint_defect(k) - dense))
        done += 1
    out = [
        Check("propositions", f"lifted contraction norms = dense oracle ({kernels} kernels)",
              worst5 <= PROP_TOL, f"max error {worst5:.3g}"),
        Check("propositions", f"lifted midpoint defect = dense oracle ({kernels} kernels)",
              worst6 <= PROP_TOL, f"max error {worst6:.3g}"),
    ]
    bad = 0
    for _ in range(inequalities):
        d = int(rng.integers(2, 5))
        f = random_mirror_kernel(rng, d, int(rng.integers(2, 6)))
        for q in range(1, d):
            bad += contraction_norm(f, q) < star_norm(f, q + 1) - PROP_TOL
        bad += contraction_norm(f, 1) < star_norm(f, 1) - PROP_TOL
    out.append(Check("propositions",
                     f"||f ~q~ f|| >= ||f *(q+1) f|| and ||f ~1~ f|| >= ||f *1 f|| ({inequalities} kernels)",
                     bad == 0, f"{bad} violations"))
    bad = 0
    for _ in range(inequalities):
        d = int(rng.integers(2, 5))
        f = random_mirror_kernel(rng, d, int(rng.integers(2, 6)), symmetric=True)
        t = tau(f)
        bad += contraction_norm(f, d - 1) < t / d - PROP_TOL
        if d == 2:
            defect = float(np.linalg.norm((contract(f, 1).values - f.values).ravel()))
            bad += defect < t / 2 - PROP_TOL
    out.append(Check("propositions", f"tau bounds via ~(d-1)~ and the d=2 defect ({inequalities} kernels)",
                     bad == 0, f"{bad} violations"))
    return out


PLAN_EXAMPLES = {
    2: ((0,), (0,)),
    3: ((0,), (1,), (1,)),
    4: ((1,), (1,), (1,), (1,)),
    5: ((1,), (1,), (2,), (1, 1), (2,)),
}


def cauchy_schwarz_plans(seed: int = 7, trials: int = 1000) -> list:
    out = []
    for n, expected in PLAN_EXAMPLES.items():
        plan = iterated_cs_plan(n)
        out.append(Check("cauchy-schwarz", f"plan n={n}", plan.multisets == expected,
                         str(plan.multisets)))
    out.append(Check("cauchy-schwarz", "plan constraints n <= 12",
                     all(iterated_cs_plan(n).satisfies_constraints() for n in range(2, 13))))
    rng = np.random.default_rng(seed)
    bad = 0
    for t in range(trials):
        n = int(rng.integers(2, 7))
        dim = int(rng.integers(1, 7))
        res = random_cs_trials(n, 1, dim, int(rng.integers(2**32)), complex_entries=bool(t % 2))
        bad += not res[0].holds
    out.append(Check("cauchy-schwarz", f"inequality on {trials} random matrix tuples",
                     bad == 0, f"{bad} violations"))
    return out


GROUPS = {
    "examples": worked_examples,
    "moments": moment_identities,
    "propositions": proposition_suite,
    "cauchy-schwarz": cauchy_schwarz_plans,
}


def run_suite(groups=None) -> list:
    out = []
    for name in groups or GROUPS:
        t0 = time.perf_counter()
        checks = GROUPS[name]()
        dt = time.perf_counter() - t0
        for c in checks:
            c.seconds = dt / max(len(checks), 1)
        out.extend(checks)
    return out
