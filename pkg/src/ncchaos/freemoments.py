"""The state phi on words in freely independent variables, and moments of
Chebyshev sums.

Two independent evaluators are provided for words:

* ``word_moment`` sums over non-crossing partitions of the letters whose
  blocks stay inside one variable, weighting each block by the joint free
  cumulant of its letters (mixed cumulants vanish).  An interval recursion
  on the block that contains the first letter keeps this polynomial in
  practice; no monomial expansion is needed.
* ``word_moment_recursive`` uses nothing but the defining property of
  freeness: centre every letter, expand, and drop the alternating centred
  product.

``sum_joint_moment`` applies the partition formula to a whole product of
Chebyshev sums at once: for a partition pi of the letter positions the
kernel part is a tensor contraction with indices tied inside each block.
"""

from __future__ import annotations

import itertools
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

import numpy as np

from .chebyshev import IDENTITY, Polynomial, cheb_u, polynomial_moment
from .errors import DomainError, ResourceLimitError, ValidationError, get_limits
from .freedist import FreeLaw, semicircular
from .kernels import ChebyshevSumSpec
from .ncpart import enumerate_nc2, iter_nc_blocks


def _prod(xs, start=1):
    out = start
    for x in xs:
        out = out * x
    return out


def _mul_polys(polys) -> Polynomial:
    return _prod(polys, Polynomial((1,)))


# -- words and families ---------------------------------------------------

@dataclass(frozen=True)
class Letter:
    var: int
    poly: Polynomial = IDENTITY

    def __post_init__(self):
        if not isinstance(self.poly, Polynomial):
            object.__setattr__(self, "poly", Polynomial(tuple(self.poly)))


@dataclass(frozen=True)
class Word:
    letters: tuple = ()

    def __post_init__(self):
        object.__setattr__(
            self,
            "letters",
            tuple(l if isinstance(l, Letter) else Letter(*l) for l in self.letters),
        )

    @classmethod
    def of(cls, *vars_, poly: Polynomial = IDENTITY):
        """Word X_{v1} X_{v2} ... with a common transform."""
        return cls(tuple(Letter(v, poly) for v in vars_))

    def __len__(self):
        return len(self.letters)

    def __add__(self, other: "Word") -> "Word":
        return Word(self.letters + other.letters)

    def rotate(self, k: int) -> "Word":
        k %= max(len(self), 1)
        return Word(self.letters[k:] + self.letters[:k])

    def adjoint(self) -> "Word":
        """Reversed word; transforms have real coefficients, so each letter is self-adjoint."""
        return Word(self.letters[::-1])

    @property
    def degree(self) -> int:
        return sum(l.poly.degree for l in self.letters)


@dataclass(frozen=True)
class VariableFamily:
    """Mutually free variables; ``laws`` maps var id -> law, ``default`` covers the rest."""

    laws: dict = field(default_factory=dict)
    default: FreeLaw | None = None

    def law(self, var: int) -> FreeLaw:
        law = self.laws.get(var, self.default)
        if law is None:
            raise ValidationError(f"variable {var} has no law in this family")
        return law

    @classmethod
    def iid(cls, law: FreeLaw):
        return cls({}, law)

    def __hash__(self):
        return hash((tuple(sorted(self.laws.items())), self.default))


# -- joint cumulants of one variable ----------------------------------------------

@lru_cache(maxsize=200_000)
def block_cumulant(law: FreeLaw, polys: tuple):
    """Joint free cumulant kappa(p_1(X), ..., p_k(X)) for a single variable X.

    Inverts phi(p_1..p_k) = sum over the block B containing 1 of
    kappa(p_B) times the moments of the products filling the gaps of B.
    """
    k = len(polys)
    total = polynomial_moment(law, _mul_polys(polys))
    if k == 1:
        return total
    for rest in itertools.product((0, 1), repeat=k - 1):
        if all(rest):
            continue  # B = [k] is the unknown itself
        members = [0] + [j + 1 for j, b in enumerate(rest) if b]
        term = block_cumulant(law, tuple(polys[j] for j in members))
        if term == 0:
            continue
        bounds = members + [k]
        for a, b in zip(bounds, bounds[1:]):
            if b > a + 1:
                term = term * polynomial_moment(law, _mul_polys(polys[a + 1:b]))
                if term == 0:
                    break
        total = total - term
    return total


# -- word_moment: monochromatic NC partitions -------------------------------------

def _check_word(fam: VariableFamily, w: Word):
    cap = get_limits().nc_cap
    if len(w) > cap:
        raise ResourceLimitError(f"word of length {len(w)} exceeds the NC cap {cap}")
    for l in w.letters:
        fam.law(l.var)


def word_moment(fam: VariableFamily, w: Word):
    """phi(P_1(X_{v_1}) ... P_n(X_{v_n})) for mutually free X_v."""
    if not isinstance(w, Word):
        w = Word(w)
    _check_word(fam, w)
    letters = w.letters
    n = len(letters)
    laws = [fam.law(l.var) for l in letters]
    F_memo: dict = {}
    H_memo: dict = {}

    def F(i, j):
        # phi of the interval letters[i:j]
        if i >= j:
            return Fraction(1)
        key = (i, j)
        if key not in F_memo:
            F_memo[key] = H(i, j, (letters[i].poly,))
        return F_memo[key]

    def H(p, j, polys):
        # the block of the first letter currently ends at p and holds ``polys``
        key = (p, j, polys)
        if key in H_memo:
            return H_memo[key]
        var = letters[p].var
        total = 0
        kappa = block_cumulant(laws[p], polys)
        if kappa != 0:
            total = kappa * F(p + 1, j)
        for q in range(p + 1, j):
            if letters[q].var != var:
                continue
            gap = F(p + 1, q)
            if gap != 0:
                total = total + gap * H(q, j, polys + (letters[q].poly,))
        H_memo[key] = total
        return total

    return F(0, n)


# -- word_moment_recursive: the freeness definition ------------------------------

def _merge(letters):
    out = []
    for var, poly in letters:
        if out and out[-1][0] == var:
            out[-1] = (var, out[-1][1] * poly)
        else:
            out.append((var, poly))
    return tuple(out)


def word_moment_recursive(fam: VariableFamily, w: Word):
    """Same value as ``word_moment`` by centring and the alternating-product rule."""
    if not isinstance(w, Word):
        w = Word(w)
    _check_word(fam, w)
    memo: dict = {}

    def phi(letters):
        letters = _merge(letters)
        if not letters:
            return Fraction(1)
        if len(letters) == 1:
            var, poly = letters[0]
            return polynomial_moment(fam.law(var), poly)
        if letters in memo:
            return memo[letters]
        means = [polynomial_moment(fam.law(v), p) for v, p in letters]
        centred = [(v, p - c) for (v, p), c in zip(letters, means)]
        total = 0
        n = len(letters)
        # S = positions replaced by their mean; S empty is an alternating centred word
        for mask in range(1, 1 << n):
            coef = 1
            rest = []
            for k in range(n):
                if mask >> k & 1:
                    coef = coef * means[k]
                else:
                    rest.append(centred[k])
            if coef == 0:
                continue
            total = total + coef * phi(tuple(rest))
        memo[letters] = total
        return total

    return phi(tuple((l.var, l.poly) for l in w.letters))


# -- Wick formula -----------------------------------------------------------------

def wick_moment(covariance, indices: Sequence[int]):
    """Sum over non-crossing pairings of prod C[i_r, i_p]; indices are 1-based."""
    n = len(indices)
    if n == 0:
        return Fraction(1)
    if n % 2:
        return Fraction(0)
    C = covariance
    size = len(C)
    if not all(1 <= i <= size for i in indices):
        raise DomainError(f"indices must lie in 1..{size}")
    total = 0
    for pairing in enumerate_nc2(n):
        term = 1
        for a, b in pairing.blocks:
            term = term * C[indices[a - 1] - 1][indices[b - 1] - 1]
            if term == 0:
                break
        total = total + term
    return total


# -- non-commutative polynomials -------------------------------------------------

def nc_power_moment(fam: VariableFamily, terms, k: int):
    """phi(P^k) for P = sum of coef * word, ``terms`` a list of (coef, Word)."""
    total = 0
    for combo in itertools.product(terms, repeat=k):
        coef = _prod(c for c, _ in combo)
        if coef == 0:
            continue
        w = Word(tuple(itertools.chain.from_iterable(t.letters for _, t in combo)))
        total = total + coef * word_moment(fam, w)
    return total


def tetilla_moment(k: int) -> float:
    """phi(T^k) for T = (S_1 S_2 + S_2 S_1) / sqrt(2)."""
    fam = VariableFamily.iid(semicircular(1))
    terms = [(1, Word.of(1, 2)), (1, Word.of(2, 1))]
    return float(nc_power_moment(fam, terms, k)) / 2 ** (k / 2)


# -- Chebyshev sums ------------------------------------------------------------------

@dataclass(frozen=True)
class MomentResult:
    value: float
    exact: bool
    patterns_evaluated: int
    tuples_visited: int
    method: str = "contraction"

    def to_json(self) -> dict:
        return {
            "value": self.value,
            "exact": self.exact,
            "patterns_evaluated": self.patterns_evaluated,
            "tuples_visited": self.tuples_visited,
            "method": self.method,
        }


def _layout(specs, chebyshev):
    """Flatten prod Q_j^{m_j} into letter positions: (copy id, slot, poly) per position."""
    copies = []
    positions = []
    for spec, exponent in specs:
        if exponent < 0:
            raise DomainError("exponents must be nonnegative")
        for _ in range(exponent):
            cid = len(copies)
            copies.append(spec)
            for slot, h in enumerate(spec.orders):
                positions.append((cid, slot, cheb_u(h) if chebyshev else IDENTITY))
    return copies, positions


def _check_specs(specs):
    specs = [(s, int(e)) for s, e in specs]
    if not specs:
        raise ValidationError("need at least one Chebyshev sum")
    Ns = {s.N for s, _ in specs}
    if len(Ns) != 1:
        raise ValidationError(f"all kernels must share N, got {sorted(Ns)}")
    return specs


CHUNK = 64


def sum_joint_moment(specs, law: FreeLaw, chebyshev: bool = True, method: str = "auto",
                     threads: int | None = None, use_cache: bool = True,
                     detail: bool = False):
    """phi(prod_j Q_j^{m_j}) with i.i.d. inputs of law ``law``.

    ``specs`` is a list of (ChebyshevSumSpec, exponent).  With ``chebyshev``
    the letter in slot l of a sum is U_{h_l}(X_i); otherwise it is X_i.
    ``method`` is "contraction" (partition-by-partition tensor contraction),
    "tuples" (explicit index tuples with collision-pattern memoization) or
    "auto" (= contraction).
    """
    specs = _check_specs(specs)
    if method in ("auto", "contraction"):
        res = _sum_by_contraction(specs, law, chebyshev, threads)
    elif method == "tuples":
        res = _sum_by_tuples(specs, law, chebyshev, use_cache)
    else:
        raise ValidationError(f"unknown method {method!r}")
    return res if detail else res.value


def _sum_by_contraction(specs, law, chebyshev, threads):
    copies, positions = _layout(specs, chebyshev)
    n = len(positions)
    if n == 0:
        return MomentResult(1.0, True, 0, 0)
    cap = get_limits().nc_cap
    if n > cap:
        raise ResourceLimitError(
            f"{n} letters exceed the NC cap {cap}; raise --nc-cap to proceed", estimate=n
        )

    def block_ok(block, closed):
        if not closed:
            # kernels vanish on diagonals: one copy cannot put two slots in a block
            return positions[block[-1]][0] not in {positions[p][0] for p in block[:-1]}
        return block_cumulant(law, tuple(positions[p][2] for p in block)) != 0

    partitions = list(iter_nc_blocks(range(n), block_ok))
    arrays = [c.kernel.values for c in copies]

    def term(blocks):
        label = [0] * n
        for b, block in enumerate(blocks):
            for p in block:
                label[p] = b
        kappa = _prod(block_cumulant(law, tuple(positions[p][2] for p in block))
                      for block in blocks)
        operands = []
        for cid, arr in enumerate(arrays):
            operands.append(arr)
            operands.append([label[p] for p in range(n) if positions[p][0] == cid])
        t = np.einsum(*operands, [], optimize="greedy")
        return float(kappa) * float(t)

    def chunk_sum(chunk):
        return sum(term(b) for b in chunk)

    chunks = [partitions[i:i + CHUNK] for i in range(0, len(partitions), CHUNK)]
    workers = threads or 1
    if workers > 1 and len(chunks) > 1:
        with ThreadPoolExecutor(workers) as pool:
            parts = list(pool.map(chunk_sum, chunks))
    else:
        parts = [chunk_sum(c) for c in chunks]
    value = float(sum(parts))  # fixed chunk order: bit-stable across thread counts
    return MomentResult(value, False, len(partitions), 0, "contraction")


def _pattern(idx):
    seen = {}
    return tuple(seen.setdefault(i, len(seen)) for i in idx)


def estimate_tuples(specs) -> int:
    specs = _check_specs(specs)
    return _prod(int(np.count_nonzero(s.kernel.values)) ** e for s, e in specs)


def _sum_by_tuples(specs, law, chebyshev, use_cache):
    copies, positions = _layout(specs, chebyshev)
    budget = get_limits().tuple_budget
    cost = estimate_tuples(specs)
    if cost > budget:
        raise ResourceLimitError(
            f"{cost} index tuples exceed the budget {budget}", estimate=cost
        )
    polys = [p for _, _, p in positions]
    fam = VariableFamily.iid(law)
    supports = [c.kernel.entries() for c in copies]
    cache: dict = {}
    visited = 0
    evaluated = 0
    total = 0.0
    for combo in itertools.product(*supports):
        visited += 1
        weight = 1.0
        idx = []
        for entry_idx, val in combo:
            weight *= val
            idx.extend(entry_idx)
        pat = _pattern(idx)
        if use_cache and pat in cache:
            phi = cache[pat]
        else:
            phi = float(word_moment(fam, Word(tuple(Letter(v, p) for v, p in zip(pat, polys)))))
            evaluated += 1
            if use_cache:
                cache[pat] = phi
        total += weight * phi
    return MomentResult(total, False, evaluated, visited, "tuples")


def sum_moment(spec: ChebyshevSumSpec, law: FreeLaw, m: int, **kw):
    """phi(Q^m) for a single Chebyshev sum."""
    return sum_joint_moment([(spec, m)], law, **kw)
