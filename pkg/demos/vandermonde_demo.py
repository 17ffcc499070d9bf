"""Confluent Vandermonde systems: the leading coefficient as a closed form.

For the function with roots (1, -1) and initial values (2, 0), that is
2 cosh t = e^t + e^-t, the coefficient of e^t is F = 1.
"""

from fractions import Fraction

from cfineq.vandermonde import build_vandermonde, f_function, g_function, gauss_solve

print("F for 2 cosh t:", f_function([1, 1], [Fraction(1), Fraction(-1)], [Fraction(2), Fraction(0)]))
print("G for 2 cosh t:", g_function(1, 2, [1, -1], [2, 0]))

# a double root at 2 plus a simple root at -1: f = (a + b t) e^{2t} + c e^{-t}
sig, lams = [2, 1], [Fraction(2), Fraction(-1)]
u = [Fraction(1), Fraction(3), Fraction(-2)]
coeffs = gauss_solve(build_vandermonde(sig, lams), u)
print("Gaussian elimination:", coeffs)
print("closed form for the top coefficient of e^{2t}:", f_function(sig, lams, u), "==", coeffs[sig[0] - 1])
