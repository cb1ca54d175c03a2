"""Build and re-verify the three counterexample constructions."""

from primehasse.counterex import (
    PythagoreanTriple, build_blocked_family, build_fermat_counterexample,
    build_pythag_counterexample, fermat_modulus, verify_counterexample,
)
from primehasse.errors import CertificateRejected

certs = [
    build_pythag_counterexample(PythagoreanTriple(3, 4, 5), 85),
    build_fermat_counterexample(3, fermat_modulus(3), 1, 1),
    build_blocked_family(3, 2, (1, 1, -1)),
]
for cert in certs:
    rep = verify_counterexample(cert)
    print(f"{cert.family:12s} a={cert.eq.a if cert.family != 'fermat' else '(Q^3, 1, -1)'}")
    print(f"{'':12s} verified={rep.verified} locally_soluble={rep.member_Cprime} "
          f"unconditional={rep.unconditional} flt={rep.conditional_on_flt}")

try:
    build_blocked_family(3, 2, (1, 1, -1), literal=True)
except CertificateRejected as exc:
    print(f"literal blocked form rejected, witness {exc.witness}")
