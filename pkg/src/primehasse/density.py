"""Densities of locally soluble coefficient vectors.

Exact per-prime densities are counted over coefficient classes mod p^xi(p).
Residues c with the same value set {c h^k} behave identically, so the count
runs over multisets of these classes instead of all p^(xi s) tuples.
"""

from __future__ import annotations

import csv
import itertools
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import comb

import numpy as np

from .errors import ENUMERATION_BUDGET, DomainError, check_budget
from .locals import Equation, is_member, p0
from .numtheory import factorize, is_prime, mobius, primes_between, primes_up_to, unit_powers, xi
from .singular import prime_power_sum_tail


@dataclass(frozen=True)
class PrimeDensity:
    delta_p: Fraction
    delta_prime_p: Fraction
    method: str


@dataclass
class DensityTable:
    s: int
    k: int
    per_prime: dict[int, PrimeDensity]
    delta_infinity: Fraction
    global_value: float
    global_tail_estimate: float
    prime_bound: int
    prefactor: Fraction | None = None

    def rows(self):
        for p in sorted(self.per_prime):
            d = self.per_prime[p]
            yield (p, d.delta_prime_p.numerator, d.delta_prime_p.denominator,
                   d.delta_p.numerator, d.delta_p.denominator, d.method)


def _check_shape(s: int, k: int, p: int | None = None) -> None:
    if s < 4:
        raise DomainError(f"density needs s >= 4, got {s}")
    if k < 2:
        raise DomainError(f"exponent k must be >= 2, got {k}")
    if p is not None and not is_prime(p):
        raise DomainError(f"{p} is not prime")


@lru_cache(maxsize=256)
def _residue_classes(p: int, k: int):
    """Group residues mod p^xi by their set of attainable values c h^k."""
    N = p ** xi(p, k)
    powers = np.unique(unit_powers(N, k))
    groups: dict[tuple[int, ...], list[int]] = {}
    for c in range(N):
        key = tuple(np.unique(c * powers % N).tolist())
        groups.setdefault(key, []).append(c)
    out = []
    for key, members in sorted(groups.items()):
        out.append((np.array(key, dtype=np.int64), len(members), members[0] % p == 0))
    return N, tuple(out)


def _sumset_hits_zero(sets, N: int) -> bool:
    reach = np.zeros(N, dtype=bool)
    reach[sets[0]] = True
    for vals in sets[1:-1]:
        nxt = np.zeros(N, dtype=bool)
        for v in vals:
            nxt |= np.roll(reach, int(v))
        reach = nxt
    return bool(reach[(-sets[-1]) % N].any())


def _multinomial(counts) -> int:
    out = math.factorial(sum(counts))
    for c in counts:
        out //= math.factorial(c)
    return out


def soluble_class_count(s: int, k: int, p: int) -> int:
    """Number of a mod p^xi, not all divisible by p, soluble in units mod p^xi."""
    N, classes = _residue_classes(p, k)
    check_budget(math.comb(len(classes) + s - 1, s) * N, ENUMERATION_BUDGET, "class multisets")
    total = 0
    for combo in itertools.combinations_with_replacement(range(len(classes)), s):
        if all(classes[i][2] for i in combo):
            continue
        if not _sumset_hits_zero([classes[i][0] for i in combo], N):
            continue
        mult = _multinomial([combo.count(i) for i in set(combo)])
        size = 1
        for i in combo:
            size *= classes[i][1]
        total += mult * size
    return total


def closed_form_applies(s: int, k: int, p: int) -> bool:
    """Conservative test for the closed form: p > 2, p does not divide k, p >= p0(s, k)."""
    return p > 2 and k % p != 0 and p >= p0(s, k)


def delta_prime_closed_form(s: int, k: int, p: int) -> Fraction:
    g = math.gcd(p - 1, k)
    q = Fraction(1, p)
    return (1 - q**s - s * (1 - q) * q ** (s - 1)
            - Fraction(s * (s - 1), 2) * (1 - q) ** 2 * (1 - Fraction(1, g)) * q ** (s - 2))


def delta_prime_brute(s: int, k: int, p: int) -> Fraction:
    N = p ** xi(p, k)
    return Fraction(soluble_class_count(s, k, p), N**s)


def delta_prime_p(s: int, k: int, p: int, method: str = "auto") -> Fraction:
    """Density of coefficient vectors soluble in Z_p^x with some a_j prime to p."""
    _check_shape(s, k, p)
    return _delta_prime_with_method(s, k, p, method)[0]


def _delta_prime_with_method(s: int, k: int, p: int, method: str = "auto"):
    if method not in ("auto", "brute", "closed_form"):
        raise DomainError(f"unknown method {method!r}")
    if method == "closed_form" or (method == "auto" and closed_form_applies(s, k, p)):
        return delta_prime_closed_form(s, k, p), "closed_form"
    return delta_prime_brute(s, k, p), "brute"


def delta_p(s: int, k: int, p: int, method: str = "auto") -> Fraction:
    """Density of coefficient vectors soluble in Z_p^x: delta'_p / (1 - p^-s)."""
    return delta_prime_p(s, k, p, method) / (1 - Fraction(1, p**s))


def delta_infinity(s: int) -> Fraction:
    if s < 2:
        raise DomainError("s must be >= 2")
    return 1 - Fraction(1, 2 ** (s - 1))


def delta_tilde(s: int, p: int) -> Fraction:
    """Density at p of vectors with at least three coefficients prime to p."""
    q = Fraction(1, p)
    return sum((comb(s, m) * (1 - q) ** (s - m) * q**m for m in range(s - 2)), Fraction(0))


def delta_tilde_expanded(s: int, p: int) -> Fraction:
    q = Fraction(1, p)
    return 1 - q**s - s * (1 - q) * q ** (s - 1) - Fraction(s * (s - 1), 2) * (1 - q) ** 2 * q ** (s - 2)


def remark_conditions_hold(s: int, k: int, p: int) -> bool:
    """p > 2, p does not divide k, and every class with three units is soluble (checked exhaustively)."""
    if p == 2 or k % p == 0:
        return False
    N, classes = _residue_classes(p, k)
    for combo in itertools.combinations_with_replacement(range(len(classes)), s):
        if sum(1 for i in combo if not classes[i][2]) < 3:
            continue
        if not _sumset_hits_zero([classes[i][0] for i in combo], N):
            return False
    return True


def _deficit_bound(s: int, X: float) -> float:
    # 1 - delta_p <= (p^-s + s p^(1-s) + C(s,2) p^(2-s)) / (1 - p^-s) for closed-form primes
    c = 1 / (1 - X**-s)
    return c * (prime_power_sum_tail(s, X) + s * prime_power_sum_tail(s - 1, X)
                + comb(s, 2) * prime_power_sum_tail(s - 2, X))


def global_density(s: int, k: int, prime_bound: int = 97) -> DensityTable:
    """Truncated product delta_inf * prod_{p <= P} delta_p with a tail estimate."""
    _check_shape(s, k)
    per_prime = {}
    for p in primes_up_to(prime_bound):
        dp, method = _delta_prime_with_method(s, k, p)
        per_prime[p] = PrimeDensity(dp / (1 - Fraction(1, p**s)), dp, method)
    dinf = delta_infinity(s)
    value = float(dinf)
    for d in per_prime.values():
        value *= float(d.delta_p)
    # estimate: explicit deficits on (P, 10P], integral comparison beyond
    deficit = 0.0
    for p in primes_between(prime_bound, 10 * max(prime_bound, 2)):
        deficit += 1 - float(delta_p(s, k, p))
    deficit += _deficit_bound(s, 10 * max(prime_bound, 2))
    pre = dinf
    small = [p for p in per_prime if p < p0(s, k)]
    for p in small:
        pre *= per_prime[p].delta_p
    return DensityTable(s, k, per_prime, dinf, value, value * deficit, prime_bound, pre)


def write_density_csv(table: DensityTable, path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["p", "delta_prime_num", "delta_prime_den", "delta_num", "delta_den", "method"])
        for row in table.rows():
            w.writerow(row)
        w.writerow(["D", repr(table.global_value), "", repr(table.global_tail_estimate), "", "summary"])


# ------------------------------------------------------------ empirical


def _canonical(a: tuple[int, ...]) -> tuple[int, ...]:
    neg = tuple(sorted(-x for x in a))
    return min(a, neg)


def _box_values(A: int) -> list[int]:
    return [v for v in range(-A, A + 1) if v != 0]


def _count_chunk(args):
    s, k, combos = args
    seen: dict[tuple[int, ...], bool] = {}
    total = 0
    for combo in combos:
        key = _canonical(combo)
        hit = seen.get(key)
        if hit is None:
            hit = is_member(Equation(k, combo))
            seen[key] = hit
        if hit:
            counts = [combo.count(v) for v in set(combo)]
            total += _multinomial(counts)
    return total


def empirical_cprime_density(s: int, k: int, A: int, threads: int | None = 1) -> tuple[int, int]:
    """(members, total) over the box of nonzero |a_j| <= A.

    Coordinate permutations and global negation preserve membership, so only
    sorted tuples are tested and each is weighted by its number of orderings.
    """
    if s < 3:
        raise DomainError("empirical density needs s >= 3")
    if A < 1:
        raise DomainError("A must be >= 1")
    total = (2 * A) ** s
    check_budget(total, ENUMERATION_BUDGET, f"box of {total} tuples")
    combos = list(itertools.combinations_with_replacement(_box_values(A), s))
    workers = threads or os.cpu_count() or 1
    if workers <= 1 or len(combos) < 2000:
        return _count_chunk((s, k, combos)), total
    size = math.ceil(len(combos) / workers)
    chunks = [(s, k, combos[i:i + size]) for i in range(0, len(combos), size)]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        members = sum(pool.map(_count_chunk, chunks))
    return members, total


# ------------------------------------------------------- coprime tuples


@dataclass(frozen=True)
class CoprimeSpec:
    """Tuples of length s that are arity-wise r-coprime, i-wise r-coprime to u_i,
    and satisfy a_j = b_j mod q_j."""

    s: int
    arity: int
    r: int = 1
    q: tuple[int, ...] | None = None
    b: tuple[int, ...] | None = None
    u: tuple[int, ...] = field(default=())

    def __post_init__(self):
        if self.s < 1 or self.arity < 1 or self.r < 1:
            raise DomainError("s, arity and r must be positive")
        q = tuple(self.q) if self.q is not None else (1,) * self.s
        b = tuple(self.b) if self.b is not None else (0,) * self.s
        if len(q) != self.s or len(b) != self.s:
            raise DomainError("q and b need one entry per coordinate")
        if any(r_ < 1 for r_ in q) or any(self.r % x for x in q):
            raise DomainError("every q_i must divide r")
        u = tuple(self.u) + (1,) * max(0, self.arity - 1 - len(self.u))
        if any(x < 1 for x in u):
            raise DomainError("u entries must be positive")
        for x, y in itertools.combinations((self.r,) + u, 2):
            if math.gcd(x, y) != 1:
                raise DomainError("r and the u_i must be pairwise coprime")
        object.__setattr__(self, "q", q)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "u", u)


def _strip(x: np.ndarray, r: int) -> np.ndarray:
    """Remove from x every prime factor shared with r."""
    if r == 1:
        return x
    x = x.copy()
    g = np.gcd(x, r)
    while (g > 1).any():
        x = np.where(g > 1, x // g, x)
        g = np.gcd(x, r)
    return x


COPRIME_BUDGET = 2 * 10**9


def _conditions(spec: CoprimeSpec):
    """(subset, modulus) pairs: the stripped gcd of the subset (and the modulus, if any) must be 1."""
    out = []
    if spec.arity <= spec.s:
        out += [(sub, 0) for sub in itertools.combinations(range(spec.s), spec.arity)]
    for i in range(1, min(spec.s, spec.arity - 1) + 1):
        if spec.u[i - 1] != 1:
            out += [(sub, spec.u[i - 1]) for sub in itertools.combinations(range(spec.s), i)]
    return out


def _coprime_table(n: int, g: int, mod: int, r: int) -> np.ndarray:
    """table[x] is True when x shares no prime with g (and with mod, if set) outside r."""
    table = np.ones(n + 1, dtype=bool)
    for p, _ in factorize(g):
        if r % p == 0 or (mod and mod % p):
            continue
        table[::p] = False
    return table


def count_coprime_tuples(spec: CoprimeSpec, n: int) -> int:
    """Exact count of qualifying tuples with 1 <= a_j <= n.

    The leading coordinates are looped in Python and the trailing ones form a
    numpy grid.  For a condition on a subset S, the gcd over the grid part of S
    is precomputed once; each prefix then only needs a length-(n+1) table of
    which grid gcd values are compatible with the prefix gcd.
    """
    s = spec.s
    check_budget(n**s, COPRIME_BUDGET, f"{n}^{s} tuples")
    values = [np.array([v for v in range(1, n + 1) if (v - spec.b[j]) % spec.q[j] == 0], dtype=np.int64)
              for j in range(s)]
    if any(len(v) == 0 for v in values):
        return 0
    m = 1
    while m < s and math.prod(len(values[j]) for j in range(s - m - 1, s)) <= 2**22:
        m += 1
    split = s - m
    grid = [t.ravel() for t in np.meshgrid(*values[split:], indexing="ij")]
    conds = []
    base = np.ones(grid[0].shape, dtype=bool)
    for sub, mod in _conditions(spec):
        head = [j for j in sub if j < split]
        tail = [j - split for j in sub if j >= split]
        if not tail:
            conds.append((head, None, mod))
            continue
        g_tail = np.gcd.reduce([grid[j] for j in tail]) if len(tail) > 1 else grid[tail[0]]
        if not head:
            g = np.gcd(g_tail, mod) if mod else g_tail
            base &= _strip(g, spec.r) == 1
        else:
            conds.append((head, g_tail, mod))
    total = 0
    for prefix in itertools.product(*values[:split]):
        mask = base
        ok = True
        for head, g_tail, mod in conds:
            g_head = math.gcd(*(int(prefix[j]) for j in head))
            if g_tail is None:
                g = math.gcd(g_head, mod) if mod else g_head
                if _strip(np.array([g]), spec.r)[0] != 1:
                    ok = False
                    break
                continue
            mask = mask & _coprime_table(n, g_head, mod, spec.r)[g_tail]
        if ok:
            total += int(np.count_nonzero(mask))
    return total


def count_coprime_naive(spec: CoprimeSpec, n: int) -> int:
    """Direct gcd filter over every tuple; the oracle for count_coprime_tuples."""
    def stripped(x):
        for p, _ in factorize(x) if x else ():
            if spec.r % p == 0:
                while x % p == 0:
                    x //= p
        return x

    total = 0
    for a in itertools.product(range(1, n + 1), repeat=spec.s):
        if any((a[j] - spec.b[j]) % spec.q[j] for j in range(spec.s)):
            continue
        ok = True
        if spec.arity <= spec.s:
            for sub in itertools.combinations(a, spec.arity):
                if stripped(math.gcd(*sub)) != 1:
                    ok = False
                    break
        for i in range(1, min(spec.s, spec.arity - 1) + 1):
            if not ok:
                break
            for sub in itertools.combinations(a, i):
                if stripped(math.gcd(math.gcd(*sub), spec.u[i - 1])) != 1:
                    ok = False
                    break
        total += ok
    return total


def coprime_factor(s: int, arity: int, p: int) -> float:
    return sum(comb(s, m) * (1 - 1 / p) ** (s - m) * p ** (-m) for m in range(min(arity, s + 1)))


@dataclass(frozen=True)
class EulerProduct:
    value: float
    low: float
    high: float
    prime_bound: int

    def __float__(self):
        return self.value


def coprime_density_A(s: int, arity: int, r: int = 1, prime_bound: int = 100_000) -> EulerProduct:
    """Euler product for the density of arity-wise r-coprime s-tuples.

    Factors are at most 1, so the truncated product is an upper bound; the
    lower bound uses 1 - factor_p <= 2^s p^(-arity) for the omitted primes.
    """
    if arity < 2:
        raise DomainError("arity must be >= 2")
    if arity > s:
        return EulerProduct(1.0, 1.0, 1.0, prime_bound)
    ps = np.array([p for p in primes_up_to(prime_bound) if r % p], dtype=float)
    facs = np.zeros_like(ps)
    for m in range(arity):
        facs += comb(s, m) * (1 - 1 / ps) ** (s - m) * ps ** (-m)
    value = float(np.exp(np.sum(np.log(facs))))
    omitted = 2**s * prime_power_sum_tail(arity, prime_bound)
    return EulerProduct(value, value * max(0.0, 1 - omitted), value, prime_bound)


def coprime_density_A_exact_factor(s: int, arity: int, p: int) -> Fraction:
    q = Fraction(1, p)
    return sum((comb(s, m) * (1 - q) ** (s - m) * q**m for m in range(min(arity, s + 1))), Fraction(0))


def f_function(s: int, arity: int, r: int, i: int, u: int) -> Fraction:
    """f_{s,arity,r,i}(u) as an exact rational."""
    out = Fraction(1)
    for p, _ in factorize(u):
        if r % p == 0:
            continue
        num = sum(comb(s, m) * (p - 1) ** (arity - 1 - m) for m in range(i, arity))
        den = sum(comb(s, m) * (p - 1) ** (arity - 1 - m) for m in range(arity))
        out *= 1 - Fraction(num, den)
    return out


def alpha_function(s: int, i: int, d: int) -> Fraction:
    """alpha_{s,i}(d) = d^i prod_{p | d} sum_{m <= i} C(s,m) (1-1/p)^(i-m) p^(-m)."""
    out = Fraction(d) ** i
    for p, _ in factorize(d):
        q = Fraction(1, p)
        out *= sum((comb(s, m) * (1 - q) ** (i - m) * q**m for m in range(i + 1)), Fraction(0))
    return out


def mobius_side(s: int, i: int, r: int, u: int) -> Fraction:
    """sum over d | u, (d, r) = 1 of mu(d) C(s,i)^omega(d) / alpha_{s,i}(d)."""
    total = Fraction(0)
    for d in range(1, u + 1):
        if u % d or math.gcd(d, r) != 1:
            continue
        mu = mobius(d)
        if mu == 0:
            continue
        total += Fraction(mu * comb(s, i) ** len(factorize(d))) / alpha_function(s, i, d)
    return total
