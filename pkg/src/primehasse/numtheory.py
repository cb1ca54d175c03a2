"""Arithmetic substrate: primes, factorization, valuations and power residues."""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
import sympy

from .errors import DomainError

SIEVE_BOUND = 10**6


@lru_cache(maxsize=8)
def _sieve(n: int) -> np.ndarray:
    flags = np.ones(n + 1, dtype=bool)
    flags[:2] = False
    for p in range(2, math.isqrt(n) + 1):
        if flags[p]:
            flags[p * p :: p] = False
    flags.setflags(write=False)
    return flags


@lru_cache(maxsize=32)
def _primes_array(n: int) -> np.ndarray:
    out = np.flatnonzero(_sieve(max(n, 1)))
    out.setflags(write=False)
    return out


def primes_up_to(n: int) -> list[int]:
    """All primes p <= n, increasing."""
    if n < 2:
        return []
    return [int(p) for p in _primes_array(int(n))]


def primes_between(lo: int, hi: int) -> list[int]:
    """Primes p with lo < p <= hi."""
    if hi < 2 or hi <= lo:
        return []
    arr = _primes_array(int(hi))
    return [int(p) for p in arr[arr > lo]]


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n <= SIEVE_BOUND:
        return bool(_sieve(SIEVE_BOUND)[n])
    return bool(sympy.isprime(n))


def first_primes(count: int, exclude_divisors_of=()) -> list[int]:
    """The first ``count`` primes that divide none of ``exclude_divisors_of``."""
    out = []
    p = 1
    while len(out) < count:
        p = int(sympy.nextprime(p))
        if all(b % p for b in exclude_divisors_of):
            out.append(p)
    return out


@dataclass(frozen=True)
class PrimeFactorization:
    """Factorization of |n| as increasing (prime, exponent) pairs."""

    factors: tuple[tuple[int, int], ...]

    @property
    def primes(self) -> tuple[int, ...]:
        return tuple(p for p, _ in self.factors)

    def value(self) -> int:
        out = 1
        for p, e in self.factors:
            out *= p**e
        return out

    def __iter__(self):
        return iter(self.factors)

    def __len__(self):
        return len(self.factors)


@lru_cache(maxsize=65536)
def factorize(n: int) -> PrimeFactorization:
    """Factor |n| by trial division over the sieve; large cofactors go to sympy."""
    if n == 0:
        raise DomainError("cannot factorize 0")
    m = abs(int(n))
    factors: dict[int, int] = {}
    limit = min(math.isqrt(m), SIEVE_BOUND)
    for p in _primes_array(SIEVE_BOUND):
        p = int(p)
        if p > limit:
            break
        if m % p == 0:
            e = 0
            while m % p == 0:
                m //= p
                e += 1
            factors[p] = e
            limit = min(math.isqrt(m), SIEVE_BOUND)
    if m > 1:
        if m <= SIEVE_BOUND * SIEVE_BOUND:
            factors[m] = factors.get(m, 0) + 1
        else:
            for q, e in sympy.factorint(m).items():
                factors[int(q)] = factors.get(int(q), 0) + int(e)
    return PrimeFactorization(tuple(sorted(factors.items())))


def valuation(n: int, p: int) -> int:
    """Exponent of p in n (n != 0)."""
    if n == 0:
        raise DomainError("valuation of 0 is infinite")
    n = abs(n)
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


def euler_phi(n: int) -> int:
    if n < 1:
        raise DomainError("phi needs n >= 1")
    out = n
    for p, _ in factorize(n):
        out = out // p * (p - 1)
    return out


def mobius(n: int) -> int:
    f = factorize(n)
    if any(e > 1 for _, e in f):
        return 0
    return -1 if len(f) % 2 else 1


def omega(n: int) -> int:
    """Number of distinct prime factors."""
    return len(factorize(n))


def radical_part(n: int, r: int) -> int:
    """The largest divisor of n built only from primes dividing r, i.e. (r;n]."""
    out = 1
    for p, e in factorize(n):
        if r % p == 0:
            out *= p**e
    return out


def _check_prime(p: int) -> None:
    if not is_prime(p):
        raise DomainError(f"{p} is not prime")


def nu(p: int, k: int) -> int:
    """Exact power of p dividing k."""
    return valuation(k, p)


def xi(p: int, k: int) -> int:
    """Lifting level: nu(p)+2 for p = 2, nu(p)+1 otherwise."""
    _check_prime(p)
    if k < 1:
        raise DomainError("exponent k must be >= 1")
    return nu(p, k) + (2 if p == 2 else 1)


def lambda_min(a, p: int) -> int:
    """Minimum p-adic valuation over the coefficient vector."""
    if any(x == 0 for x in a):
        raise DomainError("coefficients must be nonzero")
    return min(valuation(x, p) for x in a)


@dataclass(frozen=True)
class LocalExponents:
    p: int
    nu: int
    xi: int
    lambda_: int


def local_exponents(p: int, k: int, a) -> LocalExponents:
    return LocalExponents(p, nu(p, k), xi(p, k), lambda_min(a, p))


@lru_cache(maxsize=4096)
def unit_residues(q: int) -> np.ndarray:
    """Units of Z/qZ as an increasing int64 array."""
    h = np.arange(q, dtype=np.int64)
    out = h[np.gcd(h, q) == 1] if q > 1 else np.zeros(1, dtype=np.int64)
    out.setflags(write=False)
    return out


@lru_cache(maxsize=4096)
def unit_powers(q: int, k: int) -> np.ndarray:
    """h^k mod q for every unit h mod q, aligned with unit_residues(q)."""
    units = unit_residues(q)
    if q == 1:
        out = np.zeros(1, np.int64)
    elif q < 3_000_000_000:
        out = _powmod(units, k, q)
    else:
        out = np.array([pow(int(h), k, q) for h in units], dtype=np.int64)
    out.setflags(write=False)
    return out


def _powmod(base: np.ndarray, e: int, q: int) -> np.ndarray:
    # square-and-multiply; q < 3e9 keeps every product inside int64
    result = np.ones_like(base) % q
    b = base % q
    while e:
        if e & 1:
            result = result * b % q
        b = b * b % q
        e >>= 1
    return result


def kth_power_residues(p: int, n: int, k: int) -> frozenset[int]:
    """The set {h^k mod p^n : h a unit mod p^n}."""
    _check_prime(p)
    if n < 1:
        raise DomainError("level n must be >= 1")
    return frozenset(int(v) for v in unit_powers(p**n, k))
