"""Erdos sums over k-almost primes through prime zeta functions.

f(N_k) = sum_{Omega(n)=k} 1/(n log n) equals the integral of P_k(s) over
(1, infinity), where P_k is the k-almost-prime zeta function.  The package
evaluates these integrals with certified brackets and checks them against a
brute-force sieve.
"""
__version__ = "0.1.0"

from .precision import PrecisionContext
from .quadrature import IntegralResult, f_Nk, f_Nk_star, f_table, int_log_zeta_pow, int_prime_zeta_pow
from .bounds import beta_lower_bound, constants

__all__ = [
    "PrecisionContext",
    "IntegralResult",
    "f_Nk",
    "f_Nk_star",
    "f_table",
    "int_log_zeta_pow",
    "int_prime_zeta_pow",
    "beta_lower_bound",
    "constants",
]
