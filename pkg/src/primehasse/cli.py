"""Command-line entry point.

Every subcommand prints one JSON document tagged with a ``schema`` name.
Exit codes: 0 success, 1 domain error, 2 resource error, 3 usage error.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import math
import os
import re
import sys
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import counterex, density, locals as loc, search, singular
from .errors import CertificateRejected, DomainError, ResourceError
from .numtheory import xi

SCHEMA_VERSION = 1
_INT_LIST = re.compile(r"^[+-]?\d+(,[+-]?\d+)*$")
# options whose values may start with a minus sign
_LIST_OPTIONS = {"--a", "--b", "--triple"}
# search limit for `smallest` when the a priori bound does not apply
DEFAULT_SMALLEST_LIMIT = 1000


@dataclass(frozen=True)
class CommandResult:
    exit_code: int
    payload: str

    @property
    def document(self) -> dict:
        return json.loads(self.payload)


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def to_jsonable(obj):
    """Plain JSON structure for library results; rationals become {num, den} strings."""
    if isinstance(obj, Fraction):
        return {"num": str(obj.numerator), "den": str(obj.denominator)}
    if isinstance(obj, bool) or obj is None or isinstance(obj, str):
        return obj
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        return x if math.isfinite(x) else repr(x)
    if isinstance(obj, complex):
        return {"re": to_jsonable(obj.real), "im": to_jsonable(obj.imag)}
    if isinstance(obj, loc.Equation):
        return {"k": obj.k, "a": list(obj.a)}
    if isinstance(obj, loc.LocalReport):
        return {
            "equation": to_jsonable(obj.equation),
            "member_Cprime": obj.member_Cprime,
            "real_positive": obj.real_positive,
            "blocker": obj.blocker,
            "blockers": list(obj.blockers),
            "checked_primes": list(obj.checked_primes),
            "per_prime": to_jsonable(obj.per_prime),
        }
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        return {f.name: to_jsonable(getattr(obj, f.name)) for f in dataclasses.fields(obj)}
    if isinstance(obj, dict):
        keys = sorted(obj, key=lambda key: (not isinstance(key, (int, np.integer)), key))
        return {str(key): to_jsonable(obj[key]) for key in keys}
    if isinstance(obj, (list, tuple, np.ndarray)):
        return [to_jsonable(v) for v in obj]
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def _ints(text: str) -> tuple[int, ...]:
    text = text.strip()
    if not _INT_LIST.match(text):
        raise UsageError(f"expected comma-separated integers, got {text!r}")
    return tuple(int(v) for v in text.split(","))


def _equation(args) -> loc.Equation:
    return loc.Equation(args.k, _ints(args.a))


def _doc(schema: str, result, **extra) -> dict:
    out = {"schema": f"primehasse.{schema}", "version": SCHEMA_VERSION}
    out.update({key: to_jsonable(v) for key, v in extra.items()})
    out["result"] = to_jsonable(result)
    return out


# ------------------------------------------------------------- handlers


def cmd_chi(args):
    eq = _equation(args)
    chi = loc.chi_p(eq, args.p)
    return _doc("chi", {"p": args.p, "chi": chi, "soluble": chi > 0,
                        "floor": loc.chi_floor(eq, args.p)}, equation=eq)


def cmd_member(args):
    return _doc("member", loc.membership_Cprime(_equation(args)))


def cmd_series(args):
    eq = _equation(args)
    return _doc("series", singular.singular_series(eq, args.prime_bound), equation=eq)


def cmd_integral(args):
    eq = _equation(args)
    return _doc("integral", singular.singular_integral(eq, tol=args.tol), equation=eq)


def cmd_delta(args):
    density._check_shape(args.s, args.k, args.p)
    dp, method = density._delta_prime_with_method(args.s, args.k, args.p, args.method)
    classes = dp * args.p ** (xi(args.p, args.k) * args.s)
    return _doc("delta", {
        "p": args.p, "delta": dp / (1 - Fraction(1, args.p**args.s)), "delta_prime": dp,
        "method": method, "level": xi(args.p, args.k), "soluble_classes": int(classes),
    }, s=args.s, k=args.k)


def cmd_global_density(args):
    table = density.global_density(args.s, args.k, args.prime_bound)
    if args.csv:
        density.write_density_csv(table, args.csv)
    return _doc("global-density", table)


def cmd_empirical(args):
    members, total = density.empirical_cprime_density(args.s, args.k, args.A, threads=args.threads)
    return _doc("empirical", {"members": members, "total": total,
                              "density": Fraction(members, total)}, s=args.s, k=args.k, A=args.A)


def cmd_search(args):
    eq = _equation(args)
    window = None
    if args.window_psi is not None:
        window = search.window_cutoff(args.B, args.window_psi)
    return _doc("search", search.count_prime_solutions(eq, args.B, window=window), equation=eq)


def cmd_smallest(args):
    eq = _equation(args)
    limit, source = args.limit, "argument"
    if limit is None:
        limit, source = search.a_priori_bound(eq), "a-priori"
        if limit is None:
            limit, source = DEFAULT_SMALLEST_LIMIT, "default"
    rec = search.smallest_solution(eq, limit)
    return _doc("smallest", rec, equation=eq, limit=limit, limit_source=source,
                solution=None if rec is None else list(rec.x))


def cmd_inhom(args):
    a = _ints(args.a)
    rec = search.solve_inhomogeneous(a, args.n, args.k, args.B)
    return _doc("inhom", rec, a=list(a), n=args.n, k=args.k)


def cmd_converse(args):
    eq = _equation(args)
    v = search.check_partial_converse(eq, args.lam, args.B)
    return _doc("converse", v, equation=eq)


def cmd_msq(args):
    stats = search.mean_square_experiment(args.s, args.k, args.A, args.B, sample=args.sample,
                                          seed=args.seed, prime_bound=args.prime_bound)
    if args.csv:
        search.write_msq_csv(stats, args.csv)
    return _doc("msq", stats)


def _cert_doc(cert):
    doc = _doc("certificate", counterex.cert_to_dict(cert))
    doc["certificate"] = doc.pop("result")
    return doc


def cmd_counterexample(args):
    if args.family == "pythag":
        a, b, c = _ints(args.triple)
        cert = counterex.build_pythag_counterexample(counterex.PythagoreanTriple(a, b, c), args.r)
    elif args.family == "fermat":
        Q = counterex.fermat_modulus(args.k)
        a = Q if args.a is None else _ints(args.a)[0]
        cert = counterex.build_fermat_counterexample(args.k, a, args.b_int, args.c)
    else:
        b = _ints(args.b)
        cert = counterex.build_blocked_family(len(b), args.k, b, literal=args.literal)
    doc = _cert_doc(cert)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            json.dump(doc, fh, indent=2)
    return doc


def cmd_verify(args):
    try:
        with open(args.cert, encoding="utf-8") as fh:
            raw = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise DomainError(f"cannot read certificate: {exc}") from None
    cert = counterex.cert_from_dict(raw.get("certificate", raw))
    report = counterex.verify_counterexample(cert, args.search_bound)
    report = dataclasses.replace(report, local=None)
    doc = _doc("verify", report, family=cert.family)
    if not report.verified:
        raise CertificateRejected("certificate rejected: "
                                  + "; ".join(f"{n} ({note})" for n, note in report.failures),
                                  report.failures)
    return doc


def cmd_paper_example(args):
    s, k = 4, 2
    table = density.global_density(s, k, 97)
    rows = {p: {"delta": table.per_prime[p].delta_p, "delta_prime": table.per_prime[p].delta_prime_p,
                "method": table.per_prime[p].method} for p in (2, 3, 5, 7)}
    return _doc("paper-example", {
        "s": s, "k": k,
        "p0": loc.p0(s, k),
        "deltas": rows,
        "soluble_classes_mod_8": density.soluble_class_count(s, k, 2),
        "delta_infinity": table.delta_infinity,
        "prefactor": table.prefactor,
        "global_value": table.global_value,
        "global_tail_estimate": table.global_tail_estimate,
        "prime_bound": table.prime_bound,
    })


# --------------------------------------------------------------- parser


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="primehasse", description="Local-global analysis of diagonal equations in primes.")
    ap.add_argument("--threads", type=int, default=os.cpu_count() or 1,
                    help="worker processes for parallel sweeps (results do not depend on it)")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def eq_parser(name, fn, help_):
        p = sub.add_parser(name, help=help_)
        p.add_argument("--a", required=True, help="coefficients, e.g. 1,13,-1")
        p.add_argument("--k", type=int, required=True)
        p.set_defaults(fn=fn)
        return p

    p = eq_parser("chi", cmd_chi, "local density at one prime")
    p.add_argument("--p", type=int, required=True)
    eq_parser("member", cmd_member, "solubility in positive reals and every p-adic unit group")
    p = eq_parser("series", cmd_series, "singular series with certified tail")
    p.add_argument("--prime-bound", type=int, default=100)
    p = eq_parser("integral", cmd_integral, "singular integral")
    p.add_argument("--tol", type=float, default=1e-6)

    p = sub.add_parser("delta", help="local density of soluble coefficient vectors")
    p.add_argument("--s", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--method", choices=["auto", "brute", "closed_form"], default="auto")
    p.set_defaults(fn=cmd_delta)

    p = sub.add_parser("global-density", help="truncated global density")
    p.add_argument("--s", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--prime-bound", type=int, default=97)
    p.add_argument("--csv")
    p.set_defaults(fn=cmd_global_density)

    p = sub.add_parser("empirical", help="fraction of a coefficient box that is locally soluble")
    p.add_argument("--s", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--A", type=int, required=True)
    p.set_defaults(fn=cmd_empirical)

    p = eq_parser("search", cmd_search, "count prime solutions up to B")
    p.add_argument("--B", type=int, required=True)
    p.add_argument("--window-psi", type=float)
    p = eq_parser("smallest", cmd_smallest, "smallest prime solution")
    p.add_argument("--limit", type=float)
    p = eq_parser("inhom", cmd_inhom, "prime solution of sum a_j x_j^k = n")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--B", type=int, required=True)
    p = eq_parser("converse", cmd_converse, "partial converse check")
    p.add_argument("--lambda", dest="lam", type=float, required=True)
    p.add_argument("--B", type=int, default=1000)

    p = sub.add_parser("msq", help="mean-square deviation from the predicted count")
    p.add_argument("--s", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--A", type=int, required=True)
    p.add_argument("--B", type=int, required=True)
    p.add_argument("--sample", type=int)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--prime-bound", type=int, default=50)
    p.add_argument("--csv")
    p.set_defaults(fn=cmd_msq)

    p = sub.add_parser("counterexample", help="build a counterexample certificate")
    p.add_argument("family", choices=["pythag", "fermat", "blocked"])
    p.add_argument("--triple", default="3,4,5")
    p.add_argument("--r", type=int, default=85)
    p.add_argument("--k", type=int, default=None)
    p.add_argument("--a", help="fermat: coefficient a (default Q)")
    p.add_argument("--b", default="1,1,-1", help="blocked: multipliers b_j")
    p.add_argument("--b-int", type=int, default=1, help="fermat: coefficient b")
    p.add_argument("--c", type=int, default=1)
    p.add_argument("--literal", action="store_true", help="blocked: exponent-1 products")
    p.add_argument("--out", help="also write the certificate to this file")
    p.set_defaults(fn=cmd_counterexample)

    p = sub.add_parser("verify", help="re-check a certificate file")
    p.add_argument("--cert", required=True)
    p.add_argument("--search-bound", type=int)
    p.set_defaults(fn=cmd_verify)

    p = sub.add_parser("paper-example", help="the worked density example for s=4, k=2")
    p.set_defaults(fn=cmd_paper_example)
    return ap


def _glue_lists(argv):
    out, it = [], iter(argv)
    for tok in it:
        if tok in _LIST_OPTIONS:
            nxt = next(it, None)
            out.append(tok if nxt is None else f"{tok}={nxt}")
        else:
            out.append(tok)
    return out


def _error(code: int, kind: str, exc: Exception, **extra) -> CommandResult:
    doc = {"schema": "primehasse.error", "version": SCHEMA_VERSION, "kind": kind, "message": str(exc)}
    doc.update({key: to_jsonable(v) for key, v in extra.items()})
    return CommandResult(code, json.dumps(doc, allow_nan=False))


def run(argv) -> CommandResult:
    try:
        args = build_parser().parse_args(_glue_lists(list(argv)))
        if args.command == "counterexample" and args.k is None:
            args.k = 3 if args.family == "fermat" else 2
        doc = args.fn(args)
    except UsageError as exc:
        return _error(3, "usage", exc)
    except CertificateRejected as exc:
        return _error(1, "rejected", exc, failures=[list(f) for f in exc.failures],
                      witness=exc.witness)
    except DomainError as exc:
        return _error(1, "domain", exc)
    except ResourceError as exc:
        return _error(2, "resource", exc)
    return CommandResult(0, json.dumps(doc, allow_nan=False))


def main(argv=None) -> int:
    res = run(sys.argv[1:] if argv is None else argv)
    print(res.payload)
    return res.exit_code


if __name__ == "__main__":
    sys.exit(main())
