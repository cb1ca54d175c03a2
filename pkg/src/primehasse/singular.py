"""Singular series as a certified Euler product, and the singular integral.

The series is the product of exact local densities over small primes.  The
omitted factors are bounded by computing T_a(p) numerically on a further
window of primes and an explicit Weil-type bound beyond it.  The integral is
a panel Gauss-Legendre quadrature of prod_j v(a_j beta) with an analytic
correction for the leading term of the tail.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
from scipy.special import gamma

from .errors import DomainError
from .expsums import _t_complex
from .locals import Equation, chi_p, mixed_signs, relevant_primes
from .numtheory import factorize, lambda_min, primes_between, primes_up_to, xi

# pi(x) < RS_CONST x / log x for x > 1 (Rosser and Schoenfeld)
RS_CONST = 1.25506
DEFAULT_WINDOW = 2000


@dataclass(frozen=True)
class SingularValue:
    value: float
    tail_bound: float
    exact_factors: dict[int, Fraction] = field(default_factory=dict)
    truncation: dict = field(default_factory=dict)
    quadrature: float | None = None
    mixed_signs: bool | None = None

    @property
    def interval(self) -> tuple[float, float]:
        return (self.value - self.tail_bound, self.value + self.tail_bound)


def prime_power_sum_tail(sigma: float, X: float) -> float:
    """Upper bound for the sum of p^(-sigma) over primes p > X (sigma > 1, X >= 2)."""
    if sigma <= 1:
        return math.inf
    return RS_CONST * sigma * X ** (1 - sigma) / ((sigma - 1) * math.log(X))


def _weil_constant(s: int, k: int, X: float) -> float:
    # |W(p,m)| <= (g-1) sqrt(p) + 1 with g = (k; p-1) <= k, so for p > X
    # |T_a(p)| <= ((k-1) sqrt p + 1)^s (p-1)^(1-s) <= K p^(1 - s/2)
    c = (X + 1) / X
    return (k - 1 + X**-0.5) ** s * c ** (s - 1)


def t_prime_analytic_tail(s: int, k: int, X: float, shift: float = 0.0) -> float:
    """Bound for sum over p > X of |T_a(p)| p^shift, valid when p > X implies p does not divide a."""
    return _weil_constant(s, k, X) * prime_power_sum_tail(s / 2 - 1 - shift, X)


def _window(eq: Equation, window) -> int:
    lo = max(eq.height, eq.k, DEFAULT_WINDOW)
    return lo if window is None else max(int(window), eq.height, eq.k)


def singular_series(eq: Equation, prime_bound: int = 100, window: int | None = None) -> SingularValue:
    """Certified Euler product for the singular series (s >= 5).

    Exact factors are taken for p <= prime_bound and every relevant prime.  For
    the remaining primes chi_p - 1 = T_a(p); these are summed numerically up to
    ``window`` and bounded analytically beyond, and the relative error of the
    product is at most exp(sum |T_a(p)|) - 1.
    """
    if eq.s < 5:
        raise DomainError("singular series needs s >= 5 for absolute convergence")
    exact_primes = sorted(set(primes_up_to(prime_bound)) | set(relevant_primes(eq)))
    factors = {p: chi_p(eq, p) for p in exact_primes}
    prod = Fraction(1)
    for p in exact_primes:
        prod *= factors[p]
    P1 = _window(eq, window)
    top = max(exact_primes)
    trunc = {"prime_bound": prime_bound, "exact_primes": len(exact_primes), "window": P1}
    if prod == 0:
        return SingularValue(0.0, 0.0, factors, trunc)
    skipped = set(exact_primes)
    window_sum = 0.0
    count = 0
    for p in primes_between(prime_bound, max(P1, top)):
        if p in skipped:
            continue
        window_sum += abs(_t_complex(eq.a, p, eq.k))
        count += 1
    window_sum += 1e-12 * count
    beyond = t_prime_analytic_tail(eq.s, eq.k, max(P1, top))
    value = float(prod)
    bound = value * math.expm1(window_sum + beyond)
    trunc.update(window_sum=window_sum, analytic_tail=beyond)
    return SingularValue(value, bound, factors, trunc)


def _t_abs_prime_power(eq: Equation, p: int, n: int) -> float:
    return abs(_t_complex(eq.a, p**n, eq.k))


def truncated_series_sum(eq: Equation, Q: int, window: int | None = None) -> SingularValue:
    """Sum of T_a(q) for q <= Q with a Rankin-type bound on the remainder.

    The remainder is bounded two ways and the smaller is kept: the full sum of
    |T_a(q)| (an Euler product) minus its part up to Q, and the Rankin bound
    Q^(-t) prod_p (1 + sum_n |T_a(p^n)| p^(nt)) for 0 < t < s/2 - 2.
    """
    if eq.s < 5:
        raise DomainError("singular series needs s >= 5 for absolute convergence")
    total = 0.0
    for q in range(1, Q + 1):
        total += _t_complex(eq.a, q, eq.k).real
    P1 = _window(eq, window)
    # per-prime lists of (n, |T(p^n)|); beyond xi + lambda the terms vanish
    local = {}
    rel = set(relevant_primes(eq))
    divisors = {p for c in eq.a for p, _ in factorize(c)} | {p for p, _ in factorize(eq.k)}
    for p in primes_up_to(P1):
        if p in rel or p in divisors:
            top = xi(p, eq.k) + lambda_min(eq.a, p)
        else:
            top = 1
        local[p] = [(n, _t_abs_prime_power(eq, p, n) + 1e-12) for n in range(1, top + 1)]
    # route 1: sum of |T(q)| over all q, minus the part already summed
    partial_abs = sum(abs(_t_complex(eq.a, q, eq.k)) for q in range(1, Q + 1))
    log_all = sum(math.log1p(sum(v for _, v in terms)) for terms in local.values())
    log_all += t_prime_analytic_tail(eq.s, eq.k, P1)
    best = max(math.exp(log_all) - partial_abs, 0.0) + 1e-9 * Q
    best_t = None
    # route 2: Rankin, Q^(-t) times the weighted product
    tmax = eq.s / 2 - 2
    if tmax > 0:
        for t in np.linspace(tmax / 20, tmax * 0.95, 19):
            log_prod = 0.0
            for p, terms in local.items():
                log_prod += math.log1p(sum(v * p ** (n * t) for n, v in terms))
            log_prod += t_prime_analytic_tail(eq.s, eq.k, P1, shift=t)
            bound = math.exp(log_prod - t * math.log(Q))
            if bound < best:
                best, best_t = bound, float(t)
    return SingularValue(total, best, {}, {"Q": Q, "rankin_exponent": best_t, "window": P1})


# ---------------------------------------------------------------- integral

_GL_X, _GL_W = np.polynomial.legendre.leggauss(16)
_LAG_X, _LAG_W = np.polynomial.laguerre.laggauss(48)
_SMALL_X, _SMALL_W = np.polynomial.legendre.leggauss(96)
_SWITCH = 2.0
_ASYMPTOTIC_W = 40.0
_ASYMPTOTIC_TERMS = 14


def _laplace_tail(w: np.ndarray, alpha: float) -> np.ndarray:
    """int_0^inf e^(-u) (1 + iu/w)^(alpha-1) du."""
    out = np.empty(w.shape, dtype=complex)
    far = w >= _ASYMPTOTIC_W
    if far.any():
        # asymptotic series sum_n (alpha-1)(alpha-2)...(alpha-n) (i/w)^n;
        # the first omitted term is below 14!/40^14 ~ 3e-12
        z = 1j / w[far]
        acc = np.zeros(z.shape, dtype=complex)
        coef = [1.0]
        for n in range(1, _ASYMPTOTIC_TERMS):
            coef.append(coef[-1] * (alpha - n))
        for c in reversed(coef):
            acc = acc * z + c
        out[far] = acc
    near = ~far
    if near.any():
        y = np.divide.outer(_LAG_X, w[near])
        out[near] = ((1 + 1j * y) ** (alpha - 1)).T @ _LAG_W
    return out


def v_integral(beta, k: int) -> np.ndarray:
    """v(beta) = int_0^1 e(beta x^k) dx, vectorized over beta."""
    beta = np.asarray(beta, dtype=float)
    out = np.empty(beta.shape, dtype=complex)
    small = np.abs(beta) <= _SWITCH
    if small.any():
        x = (_SMALL_X + 1) / 2
        ph = np.exp(2j * np.pi * np.multiply.outer(beta[small], x**k))
        out[small] = ph @ _SMALL_W / 2
    big = ~small
    if big.any():
        b = np.abs(beta[big])
        alpha = 1.0 / k
        w = 2 * np.pi * b
        lead = gamma(alpha) * np.exp(0.5j * np.pi * alpha) * w**-alpha
        # int_1^inf t^(alpha-1) e^(i w t) dt, rotated onto t = 1 + iy
        rest = 1j * np.exp(1j * w) * _laplace_tail(w, alpha) / w
        val = (lead - rest) / k
        out[big] = np.where(beta[big] > 0, val, np.conj(val))
    return out


def v_bound_constant(k: int) -> float:
    """C with |v(beta)| <= C |beta|^(-1/k) for all beta (split at |beta|^(-1/k) plus Kusmin-Landau)."""
    return 1 + 1 / (math.pi * k)


def _integrand(a, k: int, beta: np.ndarray) -> np.ndarray:
    out = np.ones(beta.shape, dtype=complex)
    for c in a:
        out *= v_integral(c * beta, k)
    return out


def singular_integral(eq: Equation, tol: float = 1e-6, R: float | None = None,
                      panel_scale: float = 1.0) -> SingularValue:
    """J_a = integral over the real line of prod_j v(a_j beta) (s >= k + 1).

    The exact sign verdict is independent of the quadrature: J_a is zero exactly
    when all coefficients share a sign, and the value is then reported as 0 with
    the raw quadrature kept in ``quadrature``.
    """
    s, k = eq.s, eq.k
    if s < k + 1:
        raise DomainError(f"singular integral needs s >= k + 1, got s={s}, k={k}")
    alpha = 1.0 / k
    amin = min(abs(c) for c in eq.a)
    asum = sum(abs(c) for c in eq.a)
    if R is None:
        e = (s - 2) / k + 1
        R = max(64.0, tol ** (-1 / e)) / amin
    R = max(float(R), 1.0 / amin)
    # products oscillate at up to sum|a_j| cycles per unit beta
    width = 1.5 / asum / panel_scale
    n_panels = int(math.ceil(R / width))
    edges = np.linspace(0.0, R, n_panels + 1)
    total = 0.0
    chunk = 4096
    for i in range(0, n_panels, chunk):
        j = min(i + chunk, n_panels)
        lo = edges[i:j][:, None]
        hi = edges[i + 1:j + 1][:, None]
        half = (hi - lo) / 2
        nodes = (lo + hi) / 2 + half * _GL_X
        vals = _integrand(eq.a, k, nodes.ravel()).reshape(nodes.shape)
        total += float(np.sum((vals * _GL_W).real * half))
    # leading term of prod_j v(a_j beta) for beta -> +inf
    K = 1.0 + 0j
    for c in eq.a:
        sg = 1 if c > 0 else -1
        K *= gamma(alpha) * np.exp(0.5j * np.pi * alpha * sg) * (2 * np.pi * abs(c)) ** -alpha / k
    correction = 2 * float((K * R ** (1 - s * alpha) / (s * alpha - 1)).real)
    raw = 2 * total + correction
    C = v_bound_constant(k)
    crude = 2 * C**s * np.prod([abs(c) ** -alpha for c in eq.a]) * R ** (1 - s * alpha) / (s * alpha - 1)
    tail = float(crude + abs(correction))
    mixed = mixed_signs(eq.a)
    trunc = {"R": R, "panels": n_panels, "panel_width": width}
    if not mixed:
        return SingularValue(0.0, 0.0, {}, trunc, quadrature=raw, mixed_signs=False)
    return SingularValue(raw, tail, {}, trunc, quadrature=raw, mixed_signs=True)


@dataclass(frozen=True)
class Prediction:
    value: float
    low: float
    high: float
    series: SingularValue
    integral: SingularValue


def predicted_count(eq: Equation, B: float, prime_bound: int = 100, series: SingularValue | None = None,
                    integral: SingularValue | None = None) -> Prediction:
    """S_a J_a B^(s-k) with an interval from the two error bounds."""
    if eq.s < 5:
        raise DomainError("predicted count needs s >= 5")
    S = series if series is not None else singular_series(eq, prime_bound)
    J = integral if integral is not None else singular_integral(eq)
    scale = float(B) ** (eq.s - eq.k)
    value = S.value * J.value * scale
    if S.value == 0 or J.value == 0:
        return Prediction(0.0, 0.0, 0.0, S, J)
    corners = [x * y * scale for x in S.interval for y in J.interval]
    return Prediction(value, min(corners), max(corners), S, J)
