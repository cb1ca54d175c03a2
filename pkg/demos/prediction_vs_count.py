"""Compare log-weighted prime solution counts with S_a J_a B^(s-k)."""

from primehasse.locals import Equation
from primehasse.search import count_prime_solutions
from primehasse.singular import predicted_count, singular_integral, singular_series

eq = Equation(2, (1, 1, 1, 1, -4))
S = singular_series(eq, 100)
J = singular_integral(eq)
print(f"S = {S.value:.4f} +- {S.tail_bound:.2g}   J = {J.value:.6f} +- {J.tail_bound:.1g}")
for B in (100, 300, 1000):
    rho = count_prime_solutions(eq, B).weighted
    pred = predicted_count(eq, B, series=S, integral=J).value
    print(f"B={B:5d}  rho={rho:.4g}  prediction={pred:.4g}  ratio={rho / pred:.3f}")
