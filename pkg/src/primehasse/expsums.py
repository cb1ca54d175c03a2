"""Complete exponential sums W(q, r) and the local factors T_a(q).

W(q, .) is evaluated for every r at once: with c(v) the number of units h
with h^k = v mod q, W(q, r) = sum_v c(v) e(rv/q) = q * ifft(c)[r].
"""

from __future__ import annotations

import threading
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .errors import DomainError
from .numtheory import euler_phi, factorize, unit_powers, unit_residues

TOL = 1e-9

_lock = threading.Lock()


@dataclass(frozen=True)
class ExpSumValue:
    value: complex
    exact_hint: Fraction | None = None

    def __complex__(self):
        return complex(self.value)

    @property
    def real(self) -> float:
        return float(self.value.real)


@lru_cache(maxsize=4096)
def _w_table(q: int, k: int) -> np.ndarray:
    counts = np.bincount(unit_powers(q, k), minlength=q).astype(float)
    out = q * np.fft.ifft(counts)
    out.setflags(write=False)
    return out


def w_table(q: int, k: int) -> np.ndarray:
    """W(q, r) for r = 0..q-1 as a read-only complex array."""
    if q < 1:
        raise DomainError("modulus q must be >= 1")
    if k < 1:
        raise DomainError("exponent k must be >= 1")
    with _lock:
        return _w_table(q, k)


def weyl_sum_W(q: int, r: int, k: int) -> ExpSumValue:
    """W(q, r) = sum over units h mod q of e(r h^k / q)."""
    table = w_table(q, k)
    hint = Fraction(euler_phi(q)) if r % q == 0 else None
    return ExpSumValue(complex(table[r % q]), hint)


def _t_complex(a, q: int, k: int) -> complex:
    if q == 1:
        return 1.0 + 0j
    table = w_table(q, k)
    r = unit_residues(q)
    prod = np.ones(len(r), dtype=complex)
    for c in a:
        prod *= table[(c % q) * r % q]
    return complex(prod.sum() / float(euler_phi(q)) ** len(a))


def _prime_power(q: int):
    f = factorize(q)
    if len(f) == 1:
        return f.factors[0]
    return None


def t_exact_prime_power(a, p: int, n: int, k: int) -> Fraction:
    """T_a(p^n) as an exact rational via consecutive scaled unit-solution counts."""
    from .locals import _count_mod

    def scaled(m):
        if m == 0:
            return Fraction(1)
        N = p**m
        return Fraction(N * _count_mod(tuple(a), k, N), euler_phi(N) ** len(a))

    return scaled(n) - scaled(n - 1)


def local_factor_T(a, q: int, k: int, exact: bool = True) -> ExpSumValue:
    """T_a(q) = phi(q)^(-s) sum over units r of prod_j W(q, a_j r).

    For prime powers the exact rational is also computed and the two paths are
    required to agree to 1e-9.
    """
    a = tuple(int(c) for c in a)
    if any(c == 0 for c in a):
        raise DomainError("coefficients must be nonzero")
    if q < 1:
        raise DomainError("modulus q must be >= 1")
    value = _t_complex(a, q, k)
    hint = None
    if q == 1:
        hint = Fraction(1)
    elif exact:
        pp = _prime_power(q)
        if pp is not None:
            hint = t_exact_prime_power(a, pp[0], pp[1], k)
            if abs(value - float(hint)) > TOL:
                raise ArithmeticError(f"T_a({q}) paths disagree: {value} vs {hint}")
    return ExpSumValue(value, hint)


def t_values(a, q_max: int, k: int) -> np.ndarray:
    """Real parts of T_a(q) for q = 0..q_max (index 0 unused)."""
    out = np.zeros(q_max + 1)
    for q in range(1, q_max + 1):
        out[q] = _t_complex(a, q, k).real
    return out
