"""Chebyshev polynomials of the second kind (monic, orthogonal on [-2, 2]).

U_0 = 1, U_1 = x, U_{h+1} = x U_h - U_{h-1}.  Polynomials are kept as exact
coefficient tuples so that laws of U_h(X) can be computed from the moments
of X without rounding.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .errors import DomainError
from .freedist import FreeLaw, cumulants_from_moments, semicircular


def _trim(coeffs):
    coeffs = list(coeffs)
    while len(coeffs) > 1 and coeffs[-1] == 0:
        coeffs.pop()
    return tuple(coeffs) if coeffs else (0,)


@dataclass(frozen=True)
class Polynomial:
    """Polynomial with coefficients in ascending degree order."""

    coeffs: tuple

    def __post_init__(self):
        object.__setattr__(
            self,
            "coeffs",
            _trim(Fraction(c) if isinstance(c, (int, Fraction)) else c for c in self.coeffs),
        )

    @classmethod
    def x(cls):
        return cls((0, 1))

    @classmethod
    def const(cls, c):
        return cls((c,))

    @property
    def degree(self) -> int:
        return 0 if self.coeffs == (0,) else len(self.coeffs) - 1

    def is_zero(self):
        return self.coeffs == (0,)

    def __add__(self, other):
        other = _as_poly(other)
        n = max(len(self.coeffs), len(other.coeffs))
        a = self.coeffs + (0,) * (n - len(self.coeffs))
        b = other.coeffs + (0,) * (n - len(other.coeffs))
        return Polynomial(tuple(x + y for x, y in zip(a, b)))

    __radd__ = __add__

    def __neg__(self):
        return Polynomial(tuple(-c for c in self.coeffs))

    def __sub__(self, other):
        return self + (-_as_poly(other))

    def __rsub__(self, other):
        return _as_poly(other) - self

    def __mul__(self, other):
        other = _as_poly(other)
        out = [0] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a == 0:
                continue
            for j, b in enumerate(other.coeffs):
                out[i + j] += a * b
        return Polynomial(tuple(out))

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if k < 0:
            raise ValueError("negative power")
        out = Polynomial((1,))
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def __call__(self, x):
        """Horner evaluation; ``x`` may be a scalar or a square matrix."""
        if isinstance(x, np.ndarray) and x.ndim == 2:
            eye = np.eye(x.shape[0], dtype=x.dtype)
            out = float(self.coeffs[-1]) * eye
            for c in reversed(self.coeffs[:-1]):
                out = out @ x + float(c) * eye
            return out
        out = self.coeffs[-1]
        for c in reversed(self.coeffs[:-1]):
            out = out * x + c
        return out

    def __str__(self):
        terms = []
        for k, c in enumerate(self.coeffs):
            if c == 0:
                continue
            mon = "" if k == 0 else ("x" if k == 1 else f"x^{k}")
            if mon and c == 1:
                terms.append(mon)
            elif mon and c == -1:
                terms.append("-" + mon)
            else:
                terms.append(f"{c}{'*' if mon else ''}{mon}")
        return " + ".join(terms).replace("+ -", "- ") or "0"


def _as_poly(p):
    return p if isinstance(p, Polynomial) else Polynomial((p,))


IDENTITY = Polynomial((0, 1))


@lru_cache(maxsize=None)
def cheb_u(h: int) -> Polynomial:
    """U_h via the three-term recurrence."""
    if h < 0:
        raise DomainError("Chebyshev index must be nonnegative")
    prev, cur = Polynomial((1,)), Polynomial((0, 1))
    if h == 0:
        return prev
    for _ in range(h - 1):
        prev, cur = cur, Polynomial.x() * cur - prev
    return cur


def polynomial_moment(law: FreeLaw, p: Polynomial):
    """phi(p(X)) from the moments of X."""
    if p.degree > law.order:
        raise DomainError(
            f"polynomial degree {p.degree} exceeds the cumulant order {law.order} of {law.label}"
        )
    ms = law.moments(p.degree)
    return sum((c * m for c, m in zip(p.coeffs, ms) if c != 0), Fraction(0))


def pushforward_moment(law: FreeLaw, p: Polynomial, k: int):
    """phi(p(X)^k)."""
    if k < 0:
        raise DomainError("k must be nonnegative")
    if k * p.degree > law.order:
        raise DomainError(
            f"k*deg(p) = {k * p.degree} exceeds the cumulant order {law.order} of {law.label}"
        )
    return polynomial_moment(law, p**k)


def pushforward_law(law: FreeLaw, p: Polynomial, order: int | None = None) -> FreeLaw:
    """Law of p(X) as a cumulant sequence (needs order*deg(p) <= law.order)."""
    if order is None:
        order = law.order // max(p.degree, 1)
    moments = [pushforward_moment(law, p, k) for k in range(1, order + 1)]
    return cumulants_from_moments(moments, order, label=f"({p})({law.label})")


def chebyshev_orthonormality(j: int, k: int):
    """phi(U_j(S) U_k(S)) for a standard semicircular S."""
    law = semicircular(1, order=max(j + k, 2))
    return polynomial_moment(law, cheb_u(j) * cheb_u(k))


def is_admissible(law: FreeLaw, h: int) -> tuple[bool, object, object]:
    """Check phi(U_h(X)) == 0 and phi(U_h(X)^2) == 1 (within 1e-12 for float laws)."""
    u = cheb_u(h)
    m1 = pushforward_moment(law, u, 1)
    m2 = pushforward_moment(law, u, 2)
    ok = abs(m1) <= 1e-12 and abs(m2 - 1) <= 1e-12
    return ok, m1, m2


def coefficient_table(hmax: int) -> list[list]:
    return [list(cheb_u(h).coeffs) for h in range(hmax + 1)]
