"""Discrete kernels f: [N]^d -> R and their contraction calculus.

Kernels are backed by a dense float64 array of shape (N,)*d.  Index tuples
are 1-based at every public boundary (JSON, ``entries``, ``influence``)
and 0-based inside numpy.  The lifted kernel

    k_N = sum f(i_1..i_d) e_{i_1}^{(x) h_1} (x) ... (x) e_{i_d}^{(x) h_d}

is represented by (kernel, orders) and is only materialized as a test
oracle; its contraction norms are read off the base kernel.
"""

from __future__ import annotations

import json
import math
import string
from dataclasses import dataclass
from itertools import combinations
from pathlib import Path

import numpy as np

from .errors import DomainError, ResourceLimitError, ValidationError, get_limits

TOL = 1e-10


def _check_dense(N: int, arity: int, what: str, cap: int | None = None):
    cap = get_limits().dense_cap if cap is None else cap
    size = N**arity
    if size > cap:
        raise ResourceLimitError(
            f"{what} needs a dense array of {N}^{arity} = {size} entries (cap {cap})",
            estimate=size,
        )


@dataclass(frozen=True, eq=False)
class Kernel:
    values: np.ndarray
    label: str = "kernel"

    def __post_init__(self):
        v = np.array(self.values, dtype=float)
        if v.ndim < 1:
            raise ValidationError("a kernel needs arity d >= 1")
        if len(set(v.shape)) != 1:
            raise ValidationError(f"kernel array must be cubic, got shape {v.shape}")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @property
    def d(self) -> int:
        return self.values.ndim

    @property
    def N(self) -> int:
        return self.values.shape[0]

    @classmethod
    def zeros(cls, d: int, N: int, label="kernel"):
        _check_dense(N, d, "kernel")
        return cls(np.zeros((N,) * d), label)

    @classmethod
    def from_entries(cls, d: int, N: int, entries, label="kernel"):
        """Build from an iterable of (1-based index tuple, value)."""
        if d < 1 or N < 1:
            raise ValidationError("need d >= 1 and N >= 1")
        _check_dense(N, d, "kernel")
        v = np.zeros((N,) * d)
        for idx, val in entries:
            idx = tuple(int(i) for i in idx)
            if len(idx) != d or not all(1 <= i <= N for i in idx):
                raise ValidationError(f"index {idx} outside [1..{N}]^{d}")
            v[tuple(i - 1 for i in idx)] = float(val)
        return cls(v, label)

    def entries(self):
        """Nonzero entries as (1-based index tuple, value), in lexicographic order."""
        nz = np.argwhere(self.values != 0)
        return [(tuple(int(i) + 1 for i in idx), float(self.values[tuple(idx)])) for idx in nz]

    def __getitem__(self, idx):
        return float(self.values[tuple(i - 1 for i in idx)])

    def mirror(self) -> "Kernel":
        return Kernel(self.values.transpose(tuple(reversed(range(self.d)))), self.label)

    def variance(self) -> float:
        return float(np.sum(self.values**2))

    def norm(self) -> float:
        return math.sqrt(self.variance())

    def scaled(self, c: float) -> "Kernel":
        return Kernel(self.values * c, self.label)

    def to_json(self) -> dict:
        return {
            "d": self.d,
            "N": self.N,
            "label": self.label,
            "entries": [{"idx": list(idx), "val": val} for idx, val in self.entries()],
        }

    @classmethod
    def from_json(cls, obj) -> "Kernel":
        if isinstance(obj, str):
            obj = json.loads(obj)
        try:
            d, N = int(obj["d"]), int(obj["N"])
            entries = [(e["idx"], e["val"]) for e in obj["entries"]]
        except (KeyError, TypeError, ValueError) as exc:
            raise ValidationError(f"malformed kernel JSON: {exc}") from exc
        return cls.from_entries(d, N, entries, obj.get("label", "json-kernel"))

    @classmethod
    def load(cls, path) -> "Kernel":
        return cls.from_json(json.loads(Path(path).read_text()))

    def save(self, path):
        Path(path).write_text(json.dumps(self.to_json(), indent=1))


@dataclass(frozen=True)
class KernelReport:
    mirror: bool
    diagonal_free: bool
    variance: float
    symmetric: bool

    @property
    def ok(self) -> bool:
        return self.mirror and self.diagonal_free and abs(self.variance - 1) <= TOL


def is_mirror_symmetric(f: Kernel, tol: float = 1e-12) -> bool:
    return bool(np.allclose(f.values, f.mirror().values, rtol=0, atol=tol))


def is_symmetric(f: Kernel, tol: float = 1e-12) -> bool:
    from itertools import permutations

    return all(
        np.allclose(f.values, f.values.transpose(p), rtol=0, atol=tol)
        for p in permutations(range(f.d))
    )


def is_diagonal_free(f: Kernel) -> bool:
    return all(
        not np.any(np.diagonal(f.values, axis1=a, axis2=b))
        for a, b in combinations(range(f.d), 2)
    )


def validate(f: Kernel) -> KernelReport:
    """Report the three Chebyshev-sum conditions; never raises."""
    return KernelReport(
        mirror=is_mirror_symmetric(f),
        diagonal_free=is_diagonal_free(f),
        variance=f.variance(),
        symmetric=f.d <= 1 or is_symmetric(f),
    )


def influence_profile(f: Kernel) -> np.ndarray:
    """Inf_1..Inf_N as a length-N array."""
    sq = f.values**2
    out = np.zeros(f.N)
    for axis in range(f.d):
        others = tuple(a for a in range(f.d) if a != axis)
        out += sq.sum(axis=others) if others else sq
    return out


def influence(f: Kernel, i: int) -> float:
    if not 1 <= i <= f.N:
        raise DomainError(f"index {i} outside 1..{f.N}")
    return float(influence_profile(f)[i - 1])


def tau(f: Kernel) -> float:
    return float(influence_profile(f).max())


# -- contractions -----------------------------------------------------------

def _letters(n, start=0):
    pool = string.ascii_letters
    if start + n > len(pool):
        raise ResourceLimitError("kernel arity too large for einsum")
    return pool[start:start + n]


def contract(f: Kernel, q: int) -> Kernel:
    """f ~q~ f: sum over i of f(t, i_1..i_q) f(i_q..i_1, s); arity 2d-2q."""
    d = f.d
    if not 0 <= q < d:
        # q = d is the scalar ||f||^2
        raise DomainError(f"contraction order q={q} outside 0..{d - 1}")
    _check_dense(f.N, 2 * d - 2 * q, "contraction")
    t = _letters(d - q)
    i = _letters(q, d - q)
    s = _letters(d - q, d)
    spec = f"{t}{i},{i[::-1]}{s}->{t}{s}"
    return Kernel(np.einsum(spec, f.values, f.values, optimize=True), f"{f.label}~{q}")


def star_contract(f: Kernel, r: int) -> Kernel:
    """f *_r^{r-1} f(t, g, s) = sum over i of f(t, g, i_1..i_{r-1}) f(i_{r-1}..i_1, g, s)."""
    d = f.d
    if not 1 <= r <= d:
        raise DomainError(f"star contraction order r={r} outside 1..{d}")
    _check_dense(f.N, 2 * d - 2 * r + 1, "star contraction")
    t = _letters(d - r)
    g = _letters(1, d - r)
    i = _letters(r - 1, d - r + 1)
    s = _letters(d - r, d)
    spec = f"{t}{g}{i},{i[::-1]}{g}{s}->{t}{g}{s}"
    return Kernel(np.einsum(spec, f.values, f.values, optimize=True), f"{f.label}*{r}")


def contraction_norm(f: Kernel, q: int) -> float:
    return contract(f, q).norm()


def star_norm(f: Kernel, r: int) -> float:
    return star_contract(f, r).norm()


# -- lifted kernel ------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class LiftedKernel:
    base: Kernel
    orders: tuple

    def __post_init__(self):
        orders = tuple(int(h) for h in self.orders)
        object.__setattr__(self, "orders", orders)
        if len(orders) != self.base.d:
            raise ValidationError(f"{len(orders)} orders given for a kernel of arity {self.base.d}")
        if any(h < 1 for h in orders):
            raise ValidationError("orders must be positive")
        if orders != orders[::-1]:
            raise ValidationError(f"orders {orders} are not palindromic")

    @property
    def m(self) -> int:
        return sum(self.orders)


def _locate(orders, r):
    """Return ('block', q) if r = h_1+..+h_q, else ('inside', q) for r strictly inside block q."""
    acc = 0
    for q, h in enumerate(orders, start=1):
        if r == acc + h:
            return "block", q
        if acc < r < acc + h:
            return "inside", q
        acc += h
    raise AssertionError("unreachable")


def lifted_contraction_norm(k: LiftedKernel, r: int) -> float:
    """||k ~r~ k|| read off the base kernel."""
    if not 1 <= r <= k.m - 1:
        raise DomainError(f"r={r} outside 1..{k.m - 1}")
    kind, q = _locate(k.orders, r)
    if kind == "block":
        return contraction_norm(k.base, q)
    return star_norm(k.base, q)


def lifted_midpoint_defect(k: LiftedKernel) -> float:
    """||k ~m/2~ k - k|| read off the base kernel."""
    if k.m % 2:
        raise DomainError(f"midpoint defect needs m even, got m={k.m}")
    f, d = k.base, k.base.d
    if d % 2 == 0:
        g = contract(f, d // 2)
    else:
        g = star_contract(f, (d + 1) // 2)
    return float(np.linalg.norm((g.values - f.values).ravel()))


def materialize_tensor(k: LiftedKernel, cap: int | None = None) -> np.ndarray:
    """Dense order-m tensor over [N]^m; the oracle for the lifted operations."""
    N, m = k.base.N, k.m
    _check_dense(N, m, "lifted tensor", cap)
    T = np.zeros((N,) * m)
    for idx in np.argwhere(k.base.values != 0):
        pos = tuple(int(i) for i, h in zip(idx, k.orders) for _ in range(h))
        T[pos] = k.base.values[tuple(idx)]
    return T


def tensor_contract(T: np.ndarray, r: int, S: np.ndarray | None = None) -> np.ndarray:
    """T ~r~ S for dense tensors: sum T(t, i_1..i_r) S(i_r..i_1, s); S defaults to T."""
    S = T if S is None else S
    m = T.ndim
    return np.tensordot(T, S, axes=(list(range(m - r, m)), list(reversed(range(r)))))


def tensor_contraction_norm(T: np.ndarray, r: int) -> float:
    """||T ~r~ T|| without forming the output when the contracted side is smaller."""
    m, N = T.ndim, T.shape[0]
    if 2 * (m - r) <= 2 * r:
        return float(np.linalg.norm(tensor_contract(T, r).ravel()))
    # ||A B||^2 = tr((A^T A)(B B^T)) with A: t x i and B: i(reversed) x s
    A = T.reshape(N ** (m - r), N**r)
    B = T.transpose(tuple(reversed(range(r))) + tuple(range(r, m))).reshape(N**r, N ** (m - r))
    return math.sqrt(max(float(np.sum((A.T @ A) * (B @ B.T))), 0.0))


# -- Chebyshev sum description ---------------------------------------------------

@dataclass(frozen=True, eq=False)
class ChebyshevSumSpec:
    """Q = sum f(i_1..i_d) U_{h_1}(x_{i_1}) ... U_{h_d}(x_{i_d}).

    ``strict`` demands unit variance; it is switched off for targets such as
    Z(lambda) whose variance is lambda.
    """

    kernel: Kernel
    orders: tuple
    strict: bool = True

    def __post_init__(self):
        orders = tuple(int(h) for h in self.orders)
        object.__setattr__(self, "orders", orders)
        lifted = LiftedKernel(self.kernel, orders)  # checks length and palindrome
        rep = validate(self.kernel)
        if not rep.mirror:
            raise ValidationError("kernel is not mirror symmetric")
        if not rep.diagonal_free:
            raise ValidationError("kernel does not vanish on diagonals")
        if self.strict and abs(rep.variance - 1) > TOL:
            raise ValidationError(f"kernel variance {rep.variance} is not 1")
        object.__setattr__(self, "_lifted", lifted)

    @property
    def lifted(self) -> LiftedKernel:
        return self._lifted

    @property
    def N(self) -> int:
        return self.kernel.N

    @property
    def d(self) -> int:
        return self.kernel.d


def parse_orders(text: str) -> tuple:
    try:
        return tuple(int(x) for x in text.split(",") if x.strip())
    except ValueError as exc:
        raise ValidationError(f"bad order vector {text!r}") from exc


# -- built-in kernel families ---------------------------------------------------

def _offdiag(N, value, mask=None):
    v = np.full((N, N), float(value))
    np.fill_diagonal(v, 0.0)
    if mask is not None:
        v *= mask
    return v


def example1(N: int) -> Kernel:
    """1/sqrt(2N-2) on (1, i) and (i, 1), i >= 2."""
    if N < 2:
        raise DomainError("example1 needs N >= 2")
    v = np.zeros((N, N))
    c = 1 / math.sqrt(2 * N - 2)
    v[0, 1:] = c
    v[1:, 0] = c
    return Kernel(v, f"example1(N={N})")


def example2(N: int) -> Kernel:
    """1/sqrt(N(N-1)) off the diagonal."""
    if N < 2:
        raise DomainError("example2 needs N >= 2")
    return Kernel(_offdiag(N, 1 / math.sqrt(N * (N - 1))), f"example2(N={N})")


def example3(N: int) -> Kernel:
    """1/sqrt((N-1)(N-2)) off the diagonal with both indices != 1."""
    if N < 3:
        raise DomainError("example3 needs N >= 3")
    v = np.zeros((N, N))
    v[1:, 1:] = _offdiag(N - 1, 1 / math.sqrt((N - 1) * (N - 2)))
    return Kernel(v, f"example3(N={N})")


def offdiag_constant(N: int) -> Kernel:
    """1/sqrt(N-2) off the diagonal (variance N(N-1)/(N-2), not normalized)."""
    if N < 3:
        raise DomainError("offdiag-constant needs N >= 3")
    return Kernel(_offdiag(N, 1 / math.sqrt(N - 2)), f"offdiag-constant(N={N})")


def star_counterexample(N: int) -> Kernel:
    k = example1(N)
    return Kernel(k.values, f"star-counterexample(N={N})")


def ring(N: int) -> Kernel:
    """1/sqrt(2N) on cyclic neighbours (i, i+-1 mod N); contractions vanish like N^-1/2."""
    if N < 3:
        raise DomainError("ring needs N >= 3")
    v = np.zeros((N, N))
    c = 1 / math.sqrt(2 * N)
    for i in range(N):
        v[i, (i + 1) % N] = c
        v[(i + 1) % N, i] = c
    return Kernel(v, f"ring(N={N})")


def poisson_block(N: int, lam: int = 1) -> Kernel:
    """lam disjoint blocks of size b = N // lam, each 1/b off the diagonal.

    f ~1~ f - f = diag(...) + O(1/b), so Q converges to Z(lam) as N grows.
    """
    lam = int(lam)
    if lam < 1 or N // lam < 2:
        raise DomainError("poisson-block needs integer lam >= 1 and N >= 2*lam")
    b = N // lam
    v = np.zeros((N, N))
    for k in range(lam):
        v[k * b:(k + 1) * b, k * b:(k + 1) * b] = _offdiag(b, 1 / b)
    return Kernel(v, f"poisson-block(N={N},lam={lam})")


FAMILIES = {
    "example1": example1,
    "example2": example2,
    "example3": example3,
    "offdiag-constant": offdiag_constant,
    "star-counterexample": star_counterexample,
    "ring": ring,
    "poisson-block": poisson_block,
}


def family(name: str, N: int, **params) -> Kernel:
    try:
        gen = FAMILIES[name]
    except KeyError:
        raise ValidationError(f"unknown kernel family {name!r}; known: {', '.join(FAMILIES)}")
    return gen(N, **params)


def random_mirror_kernel(rng: np.random.Generator, d: int, N: int, symmetric=False,
                         diagonal_free=True, normalize=True) -> Kernel:
    """Random kernel with mirror (or full) symmetry, optionally diagonal-free."""
    from itertools import permutations

    v = rng.standard_normal((N,) * d)
    if symmetric:
        perms = list(permutations(range(d)))
        v = sum(v.transpose(p) for p in perms) / len(perms)
    else:
        v = (v + v.transpose(tuple(reversed(range(d))))) / 2
    if diagonal_free:
        for a, b in combinations(range(d), 2):
            idx = np.indices(v.shape)
            v[idx[a] == idx[b]] = 0.0
    if normalize:
        nrm = np.linalg.norm(v.ravel())
        if nrm > 0:
            v = v / nrm
    return Kernel(v, f"random(d={d},N={N})")
