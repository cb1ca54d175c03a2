"""Local solubility, singular series and prime-solution searches for diagonal equations in primes."""

from .counterex import (
    CounterexampleCert,
    PythagoreanTriple,
    build_blocked_family,
    build_fermat_counterexample,
    build_pythag_counterexample,
    verify_counterexample,
)
from .density import (
    CoprimeSpec,
    coprime_density_A,
    count_coprime_tuples,
    delta_p,
    delta_prime_p,
    empirical_cprime_density,
    global_density,
)
from .errors import CertificateRejected, DomainError, ResourceError
from .expsums import local_factor_T, weyl_sum_W
from .locals import Equation, chi_p, is_zp_soluble, membership_Cprime, p0
from .search import (
    check_partial_converse,
    count_prime_solutions,
    mean_square_experiment,
    smallest_solution,
    solve_inhomogeneous,
)
from .singular import predicted_count, singular_integral, singular_series

__version__ = "0.1.0"

__all__ = [
    "CertificateRejected", "CoprimeSpec", "CounterexampleCert", "DomainError", "Equation",
    "PythagoreanTriple", "ResourceError", "build_blocked_family", "build_fermat_counterexample",
    "build_pythag_counterexample", "check_partial_converse", "chi_p", "coprime_density_A",
    "count_coprime_tuples", "count_prime_solutions", "delta_p", "delta_prime_p",
    "empirical_cprime_density", "global_density", "is_zp_soluble", "local_factor_T",
    "mean_square_experiment", "membership_Cprime", "p0", "predicted_count", "singular_integral",
    "singular_series", "smallest_solution", "solve_inhomogeneous", "verify_counterexample",
    "weyl_sum_W",
]
