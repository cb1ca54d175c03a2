"""Prime solutions of diagonal equations by meet-in-the-middle.

Coordinates are split into two halves.  The smaller half is tabulated as a
sorted array of partial sums sum a_j p_j^k; the larger half is streamed and
joined on the negated value.  Keys are exact integers, so counts are exact.
"""

from __future__ import annotations

import bisect
import csv
import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ENUMERATION_BUDGET, DomainError, check_budget
from .locals import Equation, LocalReport, membership_Cprime
from .numtheory import is_prime, primes_between

INT64_SAFE = 2**62


@dataclass(frozen=True)
class SolutionRecord:
    x: tuple[int, ...]
    weight: float
    bound: int

    @classmethod
    def checked(cls, eq_a, k: int, x, bound: int, target: int = 0) -> SolutionRecord:
        x = tuple(int(v) for v in x)
        if sum(c * v**k for c, v in zip(eq_a, x)) != target:
            raise ArithmeticError(f"{x} does not solve the equation")
        if not all(is_prime(v) and v <= bound for v in x):
            raise ArithmeticError(f"{x} is not a vector of primes <= {bound}")
        return cls(x, math.prod(math.log(v) for v in x), bound)


@dataclass(frozen=True)
class SearchSummary:
    weighted: float
    unweighted: int
    witness: SolutionRecord | None
    window: float | None = None
    bound: int = 0


def window_cutoff(B: float, psi: float) -> float:
    """Lower cutoff B (log B)^(-psi) of the restricted count."""
    return B * math.log(B) ** (-psi)


def _primes(B: int, lower: float | None) -> list[int]:
    lo = -1 if lower is None else math.floor(lower)
    return primes_between(max(lo, 0), int(B))


def _halves(s: int) -> tuple[list[int], list[int]]:
    small = s // 2
    return list(range(small)), list(range(small, s))


class _HalfTable:
    """All partial sums of one half, sorted, with counts, log weights and a representative."""

    def __init__(self, coeffs, idx, ps, k, exact: bool):
        self.idx = idx
        n = len(ps)
        shape = (n,) * len(idx)
        if not idx:
            vals = np.zeros(1, dtype=object if exact else np.int64)
            logs = np.ones(1)
        elif exact:
            pw = [c * p**k for c in coeffs for p in ps]
            grids = [np.array(pw[j * n:(j + 1) * n], dtype=object) for j in range(len(idx))]
            vals = _outer_sum(grids)
            logs = _outer_prod([np.log(np.array(ps, float))] * len(idx))
        else:
            pk = np.array(ps, dtype=np.int64) ** k
            vals = _outer_sum([c * pk for c in coeffs])
            logs = _outer_prod([np.log(np.array(ps, float))] * len(idx))
        self.shape = shape
        self.vals = vals
        self.logs = logs

    def tuple_at(self, flat: int, ps) -> tuple[int, ...]:
        if not self.idx:
            return ()
        return tuple(ps[i] for i in np.unravel_index(flat, self.shape))


def _outer_sum(arrays):
    out = arrays[0]
    for arr in arrays[1:]:
        out = np.add.outer(out, arr)
    return np.asarray(out).ravel()


def _outer_prod(arrays):
    out = arrays[0]
    for arr in arrays[1:]:
        out = np.multiply.outer(out, arr)
    return np.asarray(out).ravel()


def _needs_exact(a, ps, k) -> bool:
    if not ps:
        return False
    return sum(abs(c) for c in a) * ps[-1] ** k >= INT64_SAFE


def _join(eq_a, k: int, ps: list[int]):
    """Tabulate both halves of the coordinates."""
    s = len(eq_a)
    lo, hi = _halves(s)
    work = len(ps) ** len(hi)
    check_budget(work, ENUMERATION_BUDGET,
                 f"meet-in-the-middle over pi(B)^{len(hi)} = {len(ps)}^{len(hi)}")
    exact = _needs_exact(eq_a, ps, k)
    build = _HalfTable([eq_a[j] for j in lo], lo, ps, k, exact)
    probe = _HalfTable([eq_a[j] for j in hi], hi, ps, k, exact)
    return build, probe, exact


def _match_ranges(build, probe, target, exact):
    """For each probe entry, the [left, right) range of matching build entries in sorted order."""
    if exact:
        order = sorted(range(len(build.vals)), key=lambda i: build.vals[i])
        keys = [build.vals[i] for i in order]
        need = [target - v for v in probe.vals]
        left = np.array([bisect.bisect_left(keys, v) for v in need])
        right = np.array([bisect.bisect_right(keys, v) for v in need])
        return np.array(order), left, right
    order = np.argsort(build.vals, kind="stable")
    keys = build.vals[order]
    need = target - probe.vals
    return order, np.searchsorted(keys, need, "left"), np.searchsorted(keys, need, "right")


def _assemble(s, build, probe, ps, b_flat, p_flat):
    x = [0] * s
    for j, v in zip(build.idx, build.tuple_at(b_flat, ps)):
        x[j] = v
    for j, v in zip(probe.idx, probe.tuple_at(p_flat, ps)):
        x[j] = v
    return tuple(x)


def _count(eq_a, k: int, B: int, lower: float | None, target: int = 0) -> SearchSummary:
    ps = _primes(B, lower)
    if not ps:
        return SearchSummary(0.0, 0, None, lower, B)
    build, probe, exact = _join(eq_a, k, ps)
    order, left, right = _match_ranges(build, probe, target, exact)
    counts = right - left
    unweighted = int(counts.sum())
    if unweighted == 0:
        return SearchSummary(0.0, 0, None, lower, B)
    cum = np.concatenate([[0.0], np.cumsum(build.logs[order])])
    weighted = float(np.sum(probe.logs * (cum[right] - cum[left])))
    first = int(np.flatnonzero(counts)[0])
    x = _assemble(len(eq_a), build, probe, ps, int(order[left[first]]), first)
    witness = SolutionRecord.checked(eq_a, k, x, B, target)
    return SearchSummary(weighted, unweighted, witness, lower, B)


def count_prime_solutions(eq: Equation, B: int, window: float | None = None) -> SearchSummary:
    """rho_a(B): log-weighted and plain counts of prime solutions with all x_j <= B.

    ``window`` is an optional lower cutoff: only primes strictly above it are used.
    """
    if B < 2:
        return SearchSummary(0.0, 0, None, window, int(B))
    return _count(eq.a, eq.k, int(B), window)


def _iter(a, k: int, B: int, window: float | None, target: int):
    ps = _primes(B, window)
    if not ps:
        return
    build, probe, exact = _join(a, k, ps)
    order, left, right = _match_ranges(build, probe, target, exact)
    for pf in np.flatnonzero(right > left):
        for pos in range(left[pf], right[pf]):
            x = _assemble(len(a), build, probe, ps, int(order[pos]), int(pf))
            yield SolutionRecord.checked(a, k, x, B, target)


def iter_solutions(eq: Equation, B: int, window: float | None = None, target: int = 0):
    """Every prime solution with entries <= B, each verified before it is yielded."""
    yield from _iter(eq.a, eq.k, B, window, target)


def naive_solutions(a, k: int, B: int, target: int = 0) -> list[tuple[int, ...]]:
    """Plain s-fold enumeration; the oracle for the meet-in-the-middle join."""
    ps = primes_between(0, B)
    return [x for x in itertools.product(ps, repeat=len(a))
            if sum(c * v**k for c, v in zip(a, x)) == target]


def a_priori_bound(eq: Equation) -> float | None:
    """C |a|^(1/(s_hat - k)) with C = 2^(1/(s_hat - k)), when s_hat >= 3k; else None."""
    s_hat = eq.s - 1 if eq.s % 2 else eq.s - 2
    if s_hat < 3 * eq.k:
        return None
    e = 1 / (s_hat - eq.k)
    return 2**e * eq.height**e


def _smallest_with_target(a, k: int, limit: int, target: int) -> SolutionRecord | None:
    ps = primes_between(0, int(limit))
    if not ps:
        return None

    def has(i):
        return _count(a, k, ps[i], None, target).unweighted > 0

    if not has(len(ps) - 1):
        return None
    lo, hi = 0, len(ps) - 1
    while lo < hi:
        mid = (lo + hi) // 2
        if has(mid):
            hi = mid
        else:
            lo = mid + 1
    return min(_iter(a, k, ps[lo], None, target), key=lambda rec: rec.x)


def smallest_solution(eq: Equation, limit: float | None = None) -> SolutionRecord | None:
    """Lexicographically least prime solution among those with the least maximum entry.

    The search bound defaults to the a priori bound when s_hat >= 3k and must
    be supplied otherwise.
    """
    if limit is None:
        limit = a_priori_bound(eq)
        if limit is None:
            raise DomainError("no default search limit: s_hat < 3k, pass limit explicitly")
    return _smallest_with_target(eq.a, eq.k, int(math.floor(limit)), 0)


def solve_inhomogeneous(a, n: int, k: int, B: int) -> SolutionRecord | None:
    """A prime solution of sum a_j x_j^k = n with entries <= B, or None."""
    a = tuple(int(c) for c in a)
    if not a or any(c == 0 for c in a):
        raise DomainError("coefficients must be nonzero")
    if k < 1:
        raise DomainError("exponent k must be >= 1")
    return _smallest_with_target(a, k, int(B), int(n))


@dataclass(frozen=True)
class ConverseVerdict:
    verdict: str
    witness: SolutionRecord | None
    report: LocalReport | None
    bound: int
    cutoff: float

    @property
    def blocker(self) -> int | None:
        return None if self.report is None else self.report.blocker


def check_partial_converse(eq: Equation, lam: float, B: int = 1000) -> ConverseVerdict:
    """Test the partial converse: a prime solution with every x_j > |a|^lam forces membership."""
    if eq.s < 3:
        raise DomainError("partial converse needs s >= 3")
    cutoff = eq.height**lam
    found = count_prime_solutions(eq, B, window=cutoff)
    if found.witness is None:
        return ConverseVerdict("holds-vacuously", None, None, B, cutoff)
    report = membership_Cprime(eq)
    verdict = "holds-witnessed" if report.member_Cprime else "violated"
    return ConverseVerdict(verdict, found.witness, report, B, cutoff)


# ------------------------------------------------------ mean square


@dataclass
class MeanSquareStats:
    s: int
    k: int
    A: int
    B: int
    tuples: int
    exhaustive: bool
    sum_sq: float
    mean_sq: float
    normalized: float
    rows: list = field(default_factory=list, repr=False)


def _canonical(a):
    return min(tuple(sorted(a)), tuple(sorted(-c for c in a)))


def mean_square_experiment(s: int, k: int, A: int, B: int, sample: int | None = None,
                           seed: int = 0, prime_bound: int = 50, tol: float = 1e-5) -> MeanSquareStats:
    """Mean of |rho_a(B) - S_a J_a B^(s-k)|^2 over |a| <= A.

    ``normalized`` is the (extrapolated) full sum divided by A^(s-2) B^(2s-2k).
    Each quantity is invariant under permutation and negation of a, so it is
    computed once per orbit.
    """
    from .singular import singular_integral, singular_series

    if s < 5:
        raise DomainError("mean square experiment needs s >= 5")
    values = [v for v in range(-A, A + 1) if v != 0]
    total = len(values) ** s
    if sample is None and total <= ENUMERATION_BUDGET // 100:
        tuples = itertools.product(values, repeat=s)
        exhaustive = True
    else:
        n = sample or 1000
        rng = np.random.default_rng(seed)
        tuples = (tuple(int(v) for v in rng.choice(values, size=s)) for _ in range(n))
        exhaustive = False
    cache: dict[tuple[int, ...], tuple[float, float]] = {}
    rows = []
    sum_sq = 0.0
    count = 0
    for a in tuples:
        key = _canonical(a)
        if key not in cache:
            eq = Equation(k, key)
            rho = count_prime_solutions(eq, B).weighted
            pred = 0.0
            S = singular_series(eq, prime_bound)
            if S.value != 0:
                J = singular_integral(eq, tol=tol)
                pred = S.value * J.value * B ** (s - k)
            cache[key] = (rho, pred)
        rho, pred = cache[key]
        err = (rho - pred) ** 2
        rows.append((*a, rho, pred, err))
        sum_sq += err
        count += 1
    mean = sum_sq / count if count else 0.0
    full = mean * total
    norm = full / (A ** (s - 2) * B ** (2 * s - 2 * k))
    return MeanSquareStats(s, k, A, B, count, exhaustive, sum_sq, mean, norm, rows)


def write_msq_csv(stats: MeanSquareStats, path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow([f"a_{j + 1}" for j in range(stats.s)] + ["rho", "prediction", "sq_error"])
        for row in stats.rows:
            w.writerow([*row[:stats.s], repr(row[stats.s]), repr(row[stats.s + 1]), repr(row[stats.s + 2])])
