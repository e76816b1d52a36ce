"""Non-commutative laws described by their free cumulant sequences.

A :class:`FreeLaw` stores r_1, ..., r_K.  Moments come from the
non-crossing moment-cumulant relation, evaluated through its generating
function form

    m_n = sum_{s=1}^{n} r_s [x^{n-s}] M(x)^s,    M(x) = 1 + sum_k m_k x^k,

which is the sum over NC(n) grouped by the block that contains 1.  Exact
``Fraction`` arithmetic is used whenever every cumulant is rational; a law
scaled by an irrational constant carries floats and reports ``exact=False``.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from numbers import Rational
from typing import Sequence

from .errors import DomainError, ValidationError

DEFAULT_ORDER = 16


def _num(x):
    """Coerce to Fraction when exact, otherwise float."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (int, Rational)) and not isinstance(x, bool):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x)
    return float(x)


def is_exact(x) -> bool:
    return isinstance(x, (int, Fraction))


@dataclass(frozen=True)
class FreeLaw:
    cumulants: tuple
    label: str = "law"

    def __post_init__(self):
        object.__setattr__(self, "cumulants", tuple(_num(c) for c in self.cumulants))
        if not self.cumulants:
            raise ValidationError("a law needs at least one cumulant")

    @property
    def order(self) -> int:
        return len(self.cumulants)

    @property
    def exact(self) -> bool:
        return all(is_exact(c) for c in self.cumulants)

    def cumulant(self, n: int):
        if not 1 <= n <= self.order:
            raise DomainError(f"cumulant order {n} outside 1..{self.order} for {self.label}")
        return self.cumulants[n - 1]

    def moment(self, n: int):
        return moments_from_cumulants(self, n)

    def moments(self, n: int) -> tuple:
        """(m_0, m_1, ..., m_n) with m_0 = 1."""
        if n > self.order:
            raise DomainError(
                f"moment order {n} exceeds cumulant order {self.order} of {self.label}"
            )
        return _moment_table(self.cumulants)[: n + 1]

    def with_order(self, order: int) -> "FreeLaw":
        """Truncate the cumulant sequence to ``order`` terms."""
        if order > self.order:
            raise DomainError("cannot extend a cumulant sequence beyond its stored order")
        return FreeLaw(self.cumulants[:order], self.label)

    def to_json(self) -> dict:
        return {
            "label": self.label,
            "cumulants": [str(c) if is_exact(c) else repr(c) for c in self.cumulants],
        }

    @classmethod
    def from_json(cls, obj) -> "FreeLaw":
        if isinstance(obj, str):
            obj = json.loads(obj)
        try:
            cums = obj["cumulants"]
        except (KeyError, TypeError) as exc:
            raise ValidationError("law JSON needs a 'cumulants' array") from exc
        return cls(tuple(_parse_number(c) for c in cums), obj.get("label", "json-law"))


def _parse_number(c):
    if isinstance(c, str):
        try:
            return Fraction(c)
        except ValueError:
            return float(c)
    return _num(c)


def _poly_mul_trunc(a, b, n):
    out = [0] * (n + 1)
    for i, x in enumerate(a[: n + 1]):
        if x == 0:
            continue
        for j, y in enumerate(b[: n + 1 - i]):
            out[i + j] += x * y
    return out


@lru_cache(maxsize=256)
def _moment_table(cumulants: tuple) -> tuple:
    K = len(cumulants)
    m = [Fraction(1)] + [0] * K
    for n in range(1, K + 1):
        # coefficients of M(x)^s up to x^{n-1} only involve m_0..m_{n-1}
        total = 0
        power = [Fraction(1)] + [0] * (n - 1)  # M^0
        for s in range(1, n + 1):
            power = _poly_mul_trunc(power, m[:n], n - s)
            r = cumulants[s - 1]
            if r != 0:
                total += r * power[n - s]
        m[n] = total
    return tuple(m)


def moments_from_cumulants(law: FreeLaw, n: int):
    """m_n = sum over NC(n) of the product of r_{|block|}."""
    if n < 0:
        raise DomainError("moment order must be nonnegative")
    if n > law.order:
        raise DomainError(f"moment order {n} exceeds cumulant order {law.order} of {law.label}")
    return _moment_table(law.cumulants)[n]


def cumulants_from_moments(moments: Sequence, K: int | None = None, label="from-moments") -> FreeLaw:
    """Invert the NC moment-cumulant relation; ``moments`` is (m_1, m_2, ...)."""
    moments = [_num(x) for x in moments]
    K = len(moments) if K is None else K
    if len(moments) < K:
        raise DomainError(f"need {K} moments, got {len(moments)}")
    m = [Fraction(1)] + moments[:K]
    r = []
    for n in range(1, K + 1):
        total = 0
        power = [Fraction(1)] + [0] * (n - 1)
        for s in range(1, n):
            power = _poly_mul_trunc(power, m[:n], n - s)
            total += r[s - 1] * power[n - s]
        r.append(m[n] - total)
    return FreeLaw(tuple(r), label)


def semicircular(variance=1, order: int = DEFAULT_ORDER) -> FreeLaw:
    variance = _num(variance)
    if variance <= 0:
        raise DomainError("semicircular variance must be positive")
    cums = [0] * order
    if order >= 2:
        cums[1] = variance
    return FreeLaw(tuple(cums), f"semicircular({variance})")


def free_poisson_centered(lam=1, order: int = DEFAULT_ORDER) -> FreeLaw:
    """Z(lambda) = X(lambda) - lambda: r_1 = 0 and r_n = lambda for n >= 2."""
    lam = _num(lam)
    if lam <= 0:
        raise DomainError("free Poisson rate must be positive")
    return FreeLaw((0,) + (lam,) * (order - 1), f"free-poisson({lam})")


def bernoulli_sym(order: int = DEFAULT_ORDER) -> FreeLaw:
    """The law (delta_1 + delta_{-1}) / 2."""
    moments = [(1 if k % 2 == 0 else 0) for k in range(1, order + 1)]
    return cumulants_from_moments(moments, order, label="bernoulli-sym")


def point_mass(c=0, order: int = DEFAULT_ORDER) -> FreeLaw:
    return FreeLaw((c,) + (0,) * (order - 1), f"point-mass({c})")


def free_convolve(a: FreeLaw, b: FreeLaw) -> FreeLaw:
    """Free additive convolution: cumulants add (truncated to the common order)."""
    K = min(a.order, b.order)
    return FreeLaw(
        tuple(x + y for x, y in zip(a.cumulants[:K], b.cumulants[:K])),
        f"({a.label} [+] {b.label})",
    )


def scale(a: FreeLaw, c) -> FreeLaw:
    """Law of c * X: r_n -> c^n r_n.  Irrational c gives float cumulants."""
    c = _num(c)
    return FreeLaw(
        tuple(r * c**n for n, r in enumerate(a.cumulants, start=1)), f"{c}*{a.label}"
    )


def mesokurtic(order: int = DEFAULT_ORDER) -> FreeLaw:
    """(Z(1) + Y) / sqrt(2) with Y symmetric Bernoulli: unit variance, r_4 = 0."""
    x = scale(free_convolve(free_poisson_centered(1, order), bernoulli_sym(order)), 1 / math.sqrt(2))
    return FreeLaw(x.cumulants, "mesokurtic")


def spectral_radius_estimate(law: FreeLaw, k: int) -> float:
    """|m_{2k}|^{1/(2k)}, which increases to the spectral radius as k grows."""
    if 2 * k > law.order:
        raise DomainError(f"2k={2 * k} exceeds the law order {law.order}")
    return float(abs(moments_from_cumulants(law, 2 * k))) ** (1.0 / (2 * k))


def law_from_name(spec: str, order: int = DEFAULT_ORDER) -> FreeLaw:
    """Parse 'semicircular[:var]', 'free-poisson:lam', 'bernoulli-sym',
    'mesokurtic', 'point-mass[:c]' or an inline JSON law."""
    spec = spec.strip()
    if spec.startswith("{"):
        return FreeLaw.from_json(spec)
    name, _, arg = spec.partition(":")
    name = name.lower()
    if name in ("semicircular", "semicircle", "gue"):
        return semicircular(Fraction(arg) if arg else 1, order)
    if name in ("free-poisson", "freepoisson", "poisson", "wishart"):
        return free_poisson_centered(Fraction(arg) if arg else 1, order)
    if name in ("bernoulli-sym", "bernoulli", "rademacher"):
        return bernoulli_sym(order)
    if name == "mesokurtic":
        return mesokurtic(order)
    if name == "point-mass":
        return point_mass(Fraction(arg) if arg else 0, order)
    raise ValidationError(f"unknown law {spec!r}")
