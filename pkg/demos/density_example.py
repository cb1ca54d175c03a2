"""Density of locally soluble quaternary quadratic forms in primes.

Prints the exact local densities for s=4, k=2 and the truncated global product.
"""

from primehasse.density import global_density, soluble_class_count

table = global_density(4, 2, prime_bound=97)
print(f"soluble classes mod 8: {soluble_class_count(4, 2, 2)}")
for p in (2, 3, 5, 7, 11, 13):
    d = table.per_prime[p]
    print(f"p={p:3d}  delta_p={d.delta_p}  ({d.method})")
print(f"prefactor over p < p0: {table.prefactor}")
print(f"global density ~ {table.global_value:.5f} (tail estimate {table.global_tail_estimate:.1e})")
