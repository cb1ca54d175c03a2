"""Local solubility in p-adic units.

Everything here reduces to counting or reaching residues of ``sum a_j x_j^k``
with every ``x_j`` a unit mod ``p^n``.  The per-coefficient value histograms are
convolved, so the cost is ``O(s * p^n * #values)`` rather than ``phi(p^n)^s``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

import numpy as np
import sympy

from .errors import ENUMERATION_BUDGET, RESIDUE_BUDGET, DomainError, check_budget
from .numtheory import euler_phi, factorize, is_prime, lambda_min, primes_up_to, unit_powers, valuation, xi


@dataclass(frozen=True)
class Equation:
    """The diagonal equation a_1 x_1^k + ... + a_s x_s^k = 0."""

    k: int
    a: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "a", tuple(int(x) for x in self.a))
        if self.k < 2:
            raise DomainError(f"exponent k must be >= 2, got {self.k}")
        if len(self.a) < 2:
            raise DomainError("need at least two coefficients")
        if any(x == 0 for x in self.a):
            raise DomainError(f"coefficients must be nonzero: {self.a}")

    @property
    def s(self) -> int:
        return len(self.a)

    @property
    def height(self) -> int:
        return max(abs(x) for x in self.a)

    def evaluate(self, x) -> int:
        return sum(c * int(v) ** self.k for c, v in zip(self.a, x))

    def scaled(self, n: int) -> Equation:
        return Equation(self.k, tuple(n * c for c in self.a))


def mixed_signs(a) -> bool:
    """Soluble in positive reals exactly when the signs are mixed."""
    return any(x > 0 for x in a) and any(x < 0 for x in a)


def _value_hist(c: int, N: int, k: int) -> np.ndarray:
    vals = (c % N) * unit_powers(N, k) % N
    return np.bincount(vals, minlength=N)


def _count_dtype(N: int, s: int):
    return np.int64 if euler_phi(N) ** s < 2**62 else object


def _convolve(dist: np.ndarray, hist: np.ndarray) -> np.ndarray:
    out = np.zeros_like(dist)
    for v in np.flatnonzero(hist):
        out += hist[v] * np.roll(dist, int(v))
    return out


def _count_mod(a, k: int, N: int, target: int = 0) -> int:
    s = len(a)
    check_budget(N, RESIDUE_BUDGET, f"residue table mod {N}")
    dtype = _count_dtype(N, s)
    hists = [_value_hist(c, N, k).astype(dtype) for c in a]
    support = max(int(np.count_nonzero(h)) for h in hists)
    check_budget(N * support * max(s - 2, 1), ENUMERATION_BUDGET, f"convolution mod {N}")
    dist = hists[0]
    for h in hists[1:-1]:
        dist = _convolve(dist, h)
    last = hists[-1]
    idx = (target - np.arange(N)) % N
    return int(np.sum(dist * last[idx]))


def count_unit_solutions(eq: Equation, p: int, n: int, target: int = 0) -> int:
    """M_a(p^n): unit solutions of sum a_j x_j^k = target mod p^n."""
    if n < 0:
        raise DomainError("level must be >= 0")
    if n == 0:
        return 1
    return _count_mod(eq.a, eq.k, p**n, target)


def scaled_count(eq: Equation, p: int, n: int, target: int = 0) -> Fraction:
    """p^n phi(p^n)^(-s) M_a(p^n); constant in n once n >= xi + lambda."""
    N = p**n
    return Fraction(N * count_unit_solutions(eq, p, n, target), euler_phi(N) ** eq.s)


def _reduce(a, p: int, target: int = 0):
    lam = lambda_min(a, p)
    return lam, tuple(c // p**lam for c in a)


@lru_cache(maxsize=200_000)
def _chi_reduced(k: int, p: int, b: tuple[int, ...], target: int) -> Fraction:
    level = xi(p, k)
    N = p**level
    return Fraction(N * _count_mod(b, k, N, target), euler_phi(N) ** len(b))


def chi_p(eq: Equation, p: int) -> Fraction:
    """Exact p-adic unit density chi_p(a).

    With lambda the least valuation and b = a / p^lambda, chi_p(a) = p^lambda chi_p(b)
    and chi_p(b) is read off exactly at level xi(p).
    """
    if not is_prime(p):
        raise DomainError(f"{p} is not prime")
    lam, b = _reduce(eq.a, p)
    N = p ** xi(p, eq.k)
    return p**lam * _chi_reduced(eq.k, p, tuple(c % N for c in b), 0)


def chi_p_inhom(a, n: int, k: int, p: int) -> Fraction:
    """chi_p(a, n) for a_1 x_1^k + ... + a_s x_s^k = n."""
    lam, b = _reduce(a, p)
    if n % p**lam:
        return Fraction(0)
    N = p ** xi(p, k)
    return p**lam * _chi_reduced(k, p, tuple(c % N for c in b), (n // p**lam) % N)


@lru_cache(maxsize=200_000)
def _reachable(k: int, N: int, residues: tuple[int, ...], target: int) -> bool:
    check_budget(N, RESIDUE_BUDGET, f"residue table mod {N}")
    sets = [np.unique((c * unit_powers(N, k)) % N) for c in residues]
    reach = np.zeros(N, dtype=bool)
    reach[sets[0]] = True
    for vals in sets[1:-1]:
        nxt = np.zeros(N, dtype=bool)
        for v in vals:
            nxt |= np.roll(reach, int(v))
        reach = nxt
        if reach.all():
            return True
    return bool(reach[(target - sets[-1]) % N].any())


def is_zp_soluble(eq: Equation, p: int) -> bool:
    """Whether the equation has a solution in p-adic units."""
    lam, b = _reduce(eq.a, p)
    N = p ** xi(p, eq.k)
    return _reachable(eq.k, N, tuple(sorted(c % N for c in b)), 0)


def is_zp_soluble_inhom(a, n: int, k: int, p: int) -> bool:
    lam, b = _reduce(a, p)
    if n % p**lam:
        return False
    N = p ** xi(p, k)
    return _reachable(k, N, tuple(sorted(c % N for c in b)), (n // p**lam) % N)


def inhom_criterion_applies(a, k: int, p: int) -> bool:
    """Sufficient condition for chi_p(a, n) > 0 for every n.

    Holds when (p-1) does not divide k and p divides at most s - 3k coefficients.
    """
    if k % (p - 1) == 0:
        return False
    return sum(1 for c in a if c % p) >= 3 * k


@lru_cache(maxsize=1024)
def p0(s: int, r: int) -> int:
    """Smallest prime p with (p-1)^(s-1) p^(-s/2) > r^(s-1)."""
    if s < 3:
        raise DomainError("p0 needs s >= 3")
    if r < 1:
        raise DomainError("r must be positive")
    p = 2
    # squared form keeps the comparison in exact integers
    while (p - 1) ** (2 * (s - 1)) <= r ** (2 * (s - 1)) * p**s:
        p = int(sympy.nextprime(p))
    return p


def p0_upper_bound(s: int, r: int) -> float:
    return (2 * r) ** (2 * (s - 1) / (s - 2)) + 1


def relevant_primes(eq: Equation) -> tuple[int, ...]:
    """Finite prime set outside of which chi_p > 0 is guaranteed.

    Primes below p0(s, k), primes dividing k, and primes dividing at least
    s - 2 coefficients.
    """
    s = eq.s
    if s < 3:
        raise DomainError("relevant_primes needs s >= 3")
    out = set(primes_up_to(p0(s, eq.k) - 1))
    out.update(p for p, _ in factorize(eq.k))
    counts: dict[int, int] = {}
    for c in eq.a:
        for p, _ in factorize(c):
            counts[p] = counts.get(p, 0) + 1
    out.update(p for p, m in counts.items() if m >= s - 2)
    return tuple(sorted(out))


@dataclass(frozen=True)
class PrimeVerdict:
    soluble: bool
    chi: Fraction
    level: int


@dataclass(frozen=True)
class LocalReport:
    per_prime: dict[int, PrimeVerdict]
    blocker: int | None
    real_positive: bool
    checked_primes: tuple[int, ...]
    equation: Equation = field(repr=False, default=None)

    @property
    def blockers(self) -> tuple[int, ...]:
        return tuple(p for p, v in self.per_prime.items() if not v.soluble)

    @property
    def member_Cprime(self) -> bool:
        return self.real_positive and self.blocker is None


def membership_Cprime(eq: Equation) -> LocalReport:
    """Decide membership of C'(k, s): solubility in positive reals and all Z_p^x."""
    primes = relevant_primes(eq)
    per_prime = {}
    blocker = None
    for p in primes:
        c = chi_p(eq, p)
        per_prime[p] = PrimeVerdict(c > 0, c, xi(p, eq.k) + lambda_min(eq.a, p))
        if c == 0 and blocker is None:
            blocker = p
    return LocalReport(per_prime, blocker, mixed_signs(eq.a), primes, eq)


def is_member(eq: Equation) -> bool:
    """Fast yes/no membership test; stops at the first obstruction."""
    if not mixed_signs(eq.a):
        return False
    return all(is_zp_soluble(eq, p) for p in relevant_primes(eq))


def chi_floor(eq: Equation, p: int) -> Fraction:
    """Lower bound p^(-xi (s-1) + lambda) valid whenever chi_p > 0."""
    e = -xi(p, eq.k) * (eq.s - 1) + lambda_min(eq.a, p)
    return Fraction(p) ** e


def valuation_profile(eq: Equation, p: int) -> tuple[int, ...]:
    return tuple(valuation(c, p) for c in eq.a)
