"""Counterexamples: equations soluble in positive reals with no prime solutions.

Three constructions are provided.  Pythagorean equations a^2x^2 + b^2y^2 -
c^2r^2z^2 = 0 and Fermat-type equations a^kx^k + b^ky^k - c^kz^k = 0 are locally
soluble everywhere.  The divisibility-blocked family only forces a single
candidate, so it has no prime solutions but is not locally soluble.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .errors import CertificateRejected, DomainError
from .locals import Equation, LocalReport, membership_Cprime, mixed_signs, p0
from .numtheory import factorize, first_primes, is_prime, primes_up_to, unit_powers, xi
from .search import count_prime_solutions


@dataclass(frozen=True)
class PythagoreanTriple:
    a: int
    b: int
    c: int

    def __post_init__(self):
        if min(self.a, self.b, self.c) < 1:
            raise DomainError("triple entries must be positive")
        if self.a**2 + self.b**2 != self.c**2:
            raise DomainError(f"{self.a}^2 + {self.b}^2 != {self.c}^2")

    @property
    def primitive(self) -> bool:
        return math.gcd(self.a, self.b, self.c) == 1


def pythagorean_params(t: PythagoreanTriple) -> tuple[int, int]:
    """The unique (m, n) with a = m^2 - n^2, b = 2mn, c = m^2 + n^2."""
    if not t.primitive:
        raise DomainError(f"({t.a},{t.b},{t.c}) is not primitive")
    if t.b % 2:
        raise DomainError("b must be the even leg")
    # m^2 = (c + a) / 2 and n^2 = (c - a) / 2
    m, n = math.isqrt((t.c + t.a) // 2), math.isqrt((t.c - t.a) // 2)
    if (m * m - n * n, 2 * m * n, m * m + n * n) != (t.a, t.b, t.c):
        raise DomainError("no parametrization found")
    return m, n


def triple_from_params(m: int, n: int) -> PythagoreanTriple:
    return PythagoreanTriple(m * m - n * n, 2 * m * n, m * m + n * n)


def pythag_bound_C(a: int, b: int, c: int) -> float:
    """Maximum of the four case bounds; every prime solution has z <= C / r."""
    return max(math.sqrt(2) * a * b,
               math.sqrt(a**2 * b**4 / 16 + a**2 * b**2),
               math.sqrt(a**2 * b**2 + 4 * a**4 * b**2),
               a**2 + a * b + b**2 / 2)


def pythag_xy_bounds(a: int, b: int) -> tuple[int, int]:
    """Bounds on x and y over all cases, taking the larger of the stated and derived coprime-case bounds."""
    x = max(a * (a + b), a + b, b, (b // 2) ** 2)
    y = max(b * (a + b // 2), a + b // 2, a, 2 * a * a)
    return x, y


@dataclass
class CounterexampleCert:
    eq: Equation
    family: str
    parameters: dict
    local_checklist: list[tuple[str, bool, str]]
    search_bound: int
    exhaustively_checked: bool
    conditional_on_flt: bool = False

    @property
    def accepted(self) -> bool:
        return all(ok for _, ok, _ in self.local_checklist)


def _reject_if_failed(checks, what: str, witness=None) -> None:
    failures = [(name, note) for name, ok, note in checks if not ok]
    if failures:
        names = "; ".join(f"{n} ({note})" if note else n for n, note in failures)
        raise CertificateRejected(f"{what} rejected: {names}", failures, witness)


def _local_check(eq: Equation) -> tuple[str, bool, str]:
    rep = membership_Cprime(eq)
    if rep.member_Cprime:
        return ("locally soluble everywhere", True, f"checked primes {list(rep.checked_primes)}")
    if not rep.real_positive:
        return ("locally soluble everywhere", False, "no solution in positive reals")
    return ("locally soluble everywhere", False, f"no Z_p^x solution at p in {list(rep.blockers)}")


def build_pythag_counterexample(t: PythagoreanTriple, r: int) -> CounterexampleCert:
    """a^2 x^2 + b^2 y^2 - c^2 r^2 z^2 = 0 with r composite, prime factors 1 mod 4, prime to ab."""
    a, b, c = t.a, t.b, t.c
    checks = [("primitive triple with b even", t.primitive and b % 2 == 0, f"({a},{b},{c})")]
    checks.append(("r > 1 and r not prime", r > 1 and not is_prime(r),
                   f"r = {r}" + (" is prime" if r > 1 and is_prime(r) else "")))
    bad = [p for p, _ in factorize(r)] if r > 0 else []
    bad = [p for p in bad if p % 4 != 1]
    checks.append(("every prime p | r has p = 1 mod 4", r > 0 and not bad,
                   f"offending primes {bad}" if bad else ""))
    ga, gb = math.gcd(r, a), math.gcd(r, b)
    checks.append(("(r;a) = (r;b) = 1", ga == 1 and gb == 1, f"(r;a)={ga}, (r;b)={gb}"))
    _reject_if_failed(checks, "pythagorean construction")
    C = pythag_bound_C(a, b, c)
    eq = Equation(2, (a * a, b * b, -(c * r) ** 2))
    checks.append(_local_check(eq))
    checks.append(("r > C(a,b,c)", r > C, f"C = {C:.6g}, z <= C/r = {C / r:.6g}"))
    xb, yb = pythag_xy_bounds(a, b)
    zmax = math.sqrt(a * a * xb * xb + b * b * yb * yb) / (c * r)
    bound = max(xb, yb, math.floor(zmax), 2)
    _reject_if_failed(checks, "pythagorean construction")
    params = {"a": a, "b": b, "c": c, "r": r, "C": C, "x_bound": xb, "y_bound": yb, "z_max": zmax}
    return CounterexampleCert(eq, "pythagorean", params, checks, bound, True)


def fermat_modulus(k: int) -> int:
    """Q = product of p^xi(p) over primes p < p0(3, k) or p | k."""
    ps = set(primes_up_to(p0(3, k) - 1)) | {p for p, _ in factorize(k)}
    return math.prod(p ** xi(p, k) for p in ps)


def minus_one_is_kth_power(p: int, k: int) -> bool:
    return int(p - 1) in set(unit_powers(p, k).tolist()) if p > 2 else True


def build_fermat_counterexample(k: int, a: int, b: int, c: int, search_bound: int = 50) -> CounterexampleCert:
    """a^k x^k + b^k y^k - c^k z^k = 0; absence of solutions rests on Fermat's Last Theorem."""
    if k < 3:
        raise DomainError("the Fermat family needs k >= 3")
    if min(a, b, c) < 1:
        raise DomainError("a, b, c must be positive")
    Q = fermat_modulus(k)
    pairs = {"(a;b)": math.gcd(a, b), "(a;c)": math.gcd(a, c), "(b;c)": math.gcd(b, c)}
    checks = [("a, b, c pairwise coprime", all(v == 1 for v in pairs.values()),
               ", ".join(f"{n}={v}" for n, v in pairs.items() if v != 1))]
    checks.append(("Q | ab", (a * b) % Q == 0, f"Q = {Q}"))
    bad = [p for p, _ in factorize(c) if not minus_one_is_kth_power(p, k)] if c > 1 else []
    checks.append(("-1 is a k-th power mod every p | c", not bad, f"fails at {bad}" if bad else ""))
    _reject_if_failed(checks, "fermat construction")
    eq = Equation(k, (a**k, b**k, -(c**k)))
    checks.append(_local_check(eq))
    checks.append(("no positive solutions (Fermat's Last Theorem, axiom)", True, "not re-verified"))
    _reject_if_failed(checks, "fermat construction")
    params = {"a": a, "b": b, "c": c, "k": k, "Q": Q}
    return CounterexampleCert(eq, "fermat", params, checks, search_bound, False, True)


def blocked_coefficients(b, primes, k: int, literal: bool = False) -> tuple[int, ...]:
    e = 1 if literal else k
    return tuple(bj * math.prod(p**e for i, p in enumerate(primes) if i != j) for j, bj in enumerate(b))


def build_blocked_family(s: int, k: int, b, literal: bool = False) -> CounterexampleCert:
    """a_j = b_j prod_{i != j} p_i^k over the first s primes not dividing any b_j.

    Modulo p_i only the i-th term survives, so a prime solution must have x_i = p_i.
    The construction is accepted only if that candidate fails on direct substitution.
    ``literal`` uses exponent 1 in the products instead of k.
    """
    b = tuple(int(v) for v in b)
    if s < 2 or len(b) != s:
        raise DomainError("need s >= 2 and one b_j per coordinate")
    if k < 2:
        raise DomainError("exponent k must be >= 2")
    if any(v == 0 for v in b):
        raise DomainError("b_j must be nonzero")
    primes = first_primes(s, exclude_divisors_of=b)
    a = blocked_coefficients(b, primes, k, literal)
    checks = [("coefficients of mixed sign", mixed_signs(a), "")]
    forcing = all(a[i] % p != 0 and all(a[j] % p == 0 for j in range(s) if j != i)
                  for i, p in enumerate(primes))
    checks.append(("divisibility forces x_j = p_j", forcing, f"p = {primes}"))
    value = sum(c * p**k for c, p in zip(a, primes))
    checks.append(("candidate x = p is not a solution", value != 0,
                   f"sum a_j p_j^k = {value}"))
    _reject_if_failed(checks, "blocked construction", witness=tuple(primes) if value == 0 else None)
    eq = Equation(k, a)
    params = {"b": list(b), "primes": primes, "literal": literal, "candidate_value": value}
    return CounterexampleCert(eq, "blocked", params, checks, max(primes), True)


def claimed_counterexample(eq: Equation, search_bound: int) -> CounterexampleCert:
    """Wrap an arbitrary equation as a claim so it can be put through verification."""
    return CounterexampleCert(eq, "claimed", {}, [], search_bound, True)


@dataclass
class VerificationReport:
    verified: bool
    pHp_counterexample: bool
    unconditional: bool
    conditional_on_flt: bool
    member_Cprime: bool
    prime_solutions: int
    search_bound: int
    failures: list[tuple[str, str]] = field(default_factory=list)
    local: LocalReport | None = field(default=None, repr=False)


def verify_counterexample(cert: CounterexampleCert, search_bound_override: int | None = None) -> VerificationReport:
    """Re-run the local checks and the exhaustive prime search for a certificate.

    For the blocked family ``verified`` means the family's own claim (real
    solubility, no prime solutions); such equations are never locally soluble
    at the blocking primes, so ``pHp_counterexample`` stays False for them.
    """
    eq = cert.eq
    bound = int(search_bound_override or cert.search_bound)
    rep = membership_Cprime(eq) if eq.s >= 3 else None
    member = bool(rep and rep.member_Cprime)
    found = count_prime_solutions(eq, bound)
    failures = []
    if found.unweighted:
        failures.append(("no prime solutions", f"solution {found.witness.x} within {bound}"))
    if cert.family == "blocked":
        params = cert.parameters
        if not mixed_signs(eq.a):
            failures.append(("solution in positive reals", "coefficients share a sign"))
        primes = params["primes"]
        if sum(c * p**eq.k for c, p in zip(eq.a, primes)) == 0:
            failures.append(("candidate x = p is not a solution", f"{tuple(primes)} solves it"))
        verified = not failures
        return VerificationReport(verified, verified and member, verified, False, member,
                                  found.unweighted, bound, failures, rep)
    if not member:
        if rep is None or not rep.real_positive:
            failures.append(("locally soluble everywhere", "no solution in positive reals"))
        else:
            failures.append(("locally soluble everywhere", f"no Z_p^x solution at {list(rep.blockers)}"))
    if cert.family == "pythagorean":
        p = cert.parameters
        if not p["r"] > pythag_bound_C(p["a"], p["b"], p["c"]):
            failures.append(("r > C(a,b,c)", "bound does not exclude solutions"))
    verified = not failures
    flt = cert.family == "fermat"
    unconditional = verified and not flt and cert.exhaustively_checked
    return VerificationReport(verified, verified, unconditional, flt, member,
                              found.unweighted, bound, failures, rep)


_FIELDS = ("family", "k", "a", "parameters", "checklist", "search_bound",
           "exhaustively_checked", "conditional_on_flt")


def cert_to_dict(cert: CounterexampleCert) -> dict:
    """Flat record with a fixed field order."""
    return {
        "family": cert.family,
        "k": cert.eq.k,
        "a": [str(c) for c in cert.eq.a],
        "parameters": {key: cert.parameters[key] for key in sorted(cert.parameters)},
        "checklist": [{"name": n, "ok": ok, "note": note} for n, ok, note in cert.local_checklist],
        "search_bound": cert.search_bound,
        "exhaustively_checked": cert.exhaustively_checked,
        "conditional_on_flt": cert.conditional_on_flt,
    }


def cert_from_dict(d: dict) -> CounterexampleCert:
    missing = [f for f in _FIELDS if f not in d]
    if missing:
        raise DomainError(f"certificate is missing fields {missing}")
    eq = Equation(int(d["k"]), tuple(int(c) for c in d["a"]))
    checks = [(c["name"], bool(c["ok"]), c.get("note", "")) for c in d["checklist"]]
    return CounterexampleCert(eq, d["family"], dict(d["parameters"]), checks, int(d["search_bound"]),
                              bool(d["exhaustively_checked"]), bool(d["conditional_on_flt"]))
