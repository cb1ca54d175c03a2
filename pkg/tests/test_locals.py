import math
import random
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import brute_scaled, brute_unit_count, coefficients
from primehasse.errors import DomainError
from primehasse.locals import (
    Equation, chi_p, chi_p_inhom, count_unit_solutions, inhom_criterion_applies, is_member,
    is_zp_soluble, is_zp_soluble_inhom, membership_Cprime, p0, p0_upper_bound, relevant_primes,
    scaled_count,
)
from primehasse.numtheory import lambda_min, primes_up_to, xi

SMALL_PRIMES = [2, 3, 5, 7]


def test_equation_validation():
    with pytest.raises(DomainError):
        Equation(1, (1, -1))
    with pytest.raises(DomainError):
        Equation(2, (1, 0, -1))
    with pytest.raises(DomainError):
        Equation(2, (1,))
    eq = Equation(2, (1, 13, -1))
    assert eq.s == 3 and eq.height == 13 and eq.evaluate((2, 3, 11)) == 0


def test_small_counts():
    assert count_unit_solutions(Equation(2, (1, 1, -1)), 3, 1) == 0
    assert count_unit_solutions(Equation(2, (1, -1)), 3, 1) == 4
    assert chi_p(Equation(2, (1, -1)), 3) == 3
    assert chi_p(Equation(2, (1, 13, -1)), 3) == 0


@given(coefficients(2, 4, 20), st.sampled_from([2, 3, 5]), st.integers(1, 2), st.sampled_from([2, 3]))
def test_unit_count_matches_enumeration(a, p, n, k):
    N = p**n
    if N ** len(a) > 5000:
        n, N = 1, p
    assert count_unit_solutions(Equation(k, a), p, n) == brute_unit_count(a, k, N)


@given(coefficients(3, 3, 12), st.sampled_from(SMALL_PRIMES), st.sampled_from([2, 3]))
def test_chi_matches_enumeration(a, p, k):
    eq = Equation(k, a)
    level = xi(p, k) + lambda_min(a, p)
    if (p**level) ** 3 > 300_000:
        return
    assert chi_p(eq, p) == brute_scaled(a, k, p, level)


def test_stabilization_on_random_equations():
    rng = random.Random(1)
    for _ in range(50):
        s = rng.choice([3, 4])
        k = rng.choice([2, 3])
        p = rng.choice([2, 3, 5])
        a = tuple(rng.choice([-1, 1]) * rng.randint(1, 40) for _ in range(s))
        eq = Equation(k, a)
        start = xi(p, k) + lambda_min(a, p)
        vals = [scaled_count(eq, p, start + i) for i in range(3)]
        assert vals[0] == vals[1] == vals[2] == chi_p(eq, p), (a, k, p)


@given(coefficients(3, 5, 50), st.sampled_from(SMALL_PRIMES + [11, 13]), st.sampled_from([2, 3, 4]))
def test_positivity_floor(a, p, k):
    eq = Equation(k, a)
    chi = chi_p(eq, p)
    assert (chi > 0) == is_zp_soluble(eq, p)
    if chi > 0:
        floor = Fraction(p) ** (-xi(p, k) * (eq.s - 1) + lambda_min(a, p))
        assert chi >= floor


@given(coefficients(3, 4, 40), st.sampled_from(SMALL_PRIMES), st.permutations(range(4)))
def test_permutation_and_unit_scaling(a, p, perm):
    eq = Equation(2, a)
    shuffled = Equation(2, tuple(a[i] for i in perm if i < len(a)))
    assert chi_p(shuffled, p) == chi_p(eq, p)
    u = next(v for v in (7, 11, 13, 17) if v != p)
    assert chi_p(Equation(2, tuple(u**2 * c for c in a)), p) == chi_p(eq, p)
    assert chi_p(Equation(2, tuple(p * c for c in a)), p) == p * chi_p(eq, p)


def test_relevant_primes_and_membership():
    eq = Equation(2, (1, 1, 1, -3))
    assert relevant_primes(eq) == (2, 3, 5, 7)
    assert membership_Cprime(eq).member_Cprime and is_member(eq)
    rep = membership_Cprime(Equation(2, (1, 13, -1)))
    assert not rep.member_Cprime and rep.real_positive
    assert 3 in rep.blockers and rep.per_prime[3].soluble is False
    same_sign = membership_Cprime(Equation(2, (1, 2, 3)))
    assert not same_sign.real_positive and not same_sign.member_Cprime


@given(coefficients(3, 4, 25), st.sampled_from([2, 3]))
def test_membership_agrees_with_per_prime_checks(a, k):
    eq = Equation(k, a)
    rep = membership_Cprime(eq)
    expected = any(c > 0 for c in a) and any(c < 0 for c in a)
    expected = expected and all(is_zp_soluble(eq, p) for p in relevant_primes(eq))
    assert rep.member_Cprime == expected == is_member(eq)


def _p0_float(s, r):
    # first prime past which (p-1)^(s-1) p^(-s/2) > r^(s-1), by floating point
    for p in primes_up_to(10**6):
        if (s - 1) * math.log(p - 1 or 1) - s / 2 * math.log(p) > (s - 1) * math.log(r) + 1e-12:
            return p


def test_p0_values():
    assert p0(4, 2) == 11
    assert (p0(3, 1), p0(3, 3), p0(5, 2), p0(5, 3)) == (5, 89, 11, 23)
    for s in (3, 4, 5, 6):
        for r in (1, 2, 3):
            assert p0(s, r) == _p0_float(s, r)


def test_p0_upper_bound_grid():
    for s in range(3, 11):
        for r in range(1, 7):
            assert p0(s, r) <= p0_upper_bound(s, r)


@given(coefficients(2, 3, 15), st.integers(-30, 30), st.sampled_from([2, 3, 5]))
def test_inhomogeneous_density(a, n, p):
    k = 2
    level = xi(p, k) + lambda_min(a, p)
    N = p**level
    if N ** len(a) > 100_000:
        return
    brute = Fraction(N * brute_unit_count(a, k, N, n), (N - N // p) ** len(a))
    assert chi_p_inhom(a, n, k, p) == brute
    assert is_zp_soluble_inhom(a, n, k, p) == (brute > 0)


def test_inhomogeneous_criterion():
    assert not inhom_criterion_applies((1,) * 9, 2, 3)
    assert inhom_criterion_applies((1,) * 6, 2, 5)
    assert not inhom_criterion_applies((1,) * 5, 2, 5)


def test_stabilization_wider_grid():
    rng = random.Random(2)
    for _ in range(50):
        s = rng.randint(3, 6)
        k = rng.choice([2, 3])
        a = tuple(rng.choice([-1, 1]) * rng.randint(1, 30) for _ in range(s))
        eq = Equation(k, a)
        for p in relevant_primes(eq):
            start = xi(p, k) + lambda_min(a, p)
            if p ** (start + 2) > 4000:
                continue  # keep the three-level check cheap
            vals = {scaled_count(eq, p, start + i) for i in range(3)}
            assert vals == {chi_p(eq, p)}, (a, k, p)


@given(coefficients(3, 5, 30), st.integers(1, 5), st.sampled_from([2, 3]))
def test_membership_scaling_invariance(a, n, k):
    eq = Equation(k, a)
    assert is_member(Equation(k, tuple(n * c for c in a))) == is_member(eq)
    assert is_member(Equation(k, tuple(-n * c for c in a))) == is_member(eq)
