"""Certified roots of characteristic polynomials and the spectral distance."""

from fractions import Fraction

from cfineq.cfinite import CauchyProblem
from cfineq.poly import check_spectral_vs_coefficient_bound, find_roots, spectral_distance
from cfineq.realnum import format_ball

# z^3 - 2: one real root and a conjugate pair
cubic = CauchyProblem.of([-2, 0, 0], [0, 0, 0]).char_poly(80)
roots = find_roots(cubic, 64)
print("roots of z^3 - 2 (certified disks):")
for r in roots:
    print("  ", format_ball(r, 18))

# a double root at 1 is reported as a cluster of two identical disks
double = CauchyProblem.from_roots([1, 1], [0, 0]).char_poly(80)
print("clusters of (z-1)^2:", [(format_ball(b, 10), idx) for b, idx in find_roots(double, 48).clusters()])

# spectral distance between z^2 - 1 and z^2 - 1.01, next to the coefficient bound
a = find_roots(CauchyProblem.of([-1, 0], [0, 0]).char_poly(80), 48)
b = find_roots(CauchyProblem.of([Fraction(-101, 100), 0], [0, 0]).char_poly(80), 48)
print("spectral distance:", format_ball(spectral_distance(a, b).value, 12))
print("distance <= coefficient bound:", check_spectral_vs_coefficient_bound([-1, 0], [Fraction(-101, 100), 0]))
