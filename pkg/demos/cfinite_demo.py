"""Linear ODEs with constant coefficients as exponential polynomials."""

from fractions import Fraction

from cfineq.cfinite import CauchyProblem, oracle_eventual_compare, solve_exponential_exact, eval_solution
from cfineq.realnum import format_ball

# f'' = f with f(0) = 2, f'(0) = 0, i.e. 2 cosh t
f = CauchyProblem.from_roots([1, -1], [2, 0])
sol = solve_exponential_exact(f)
print("2 cosh t as exponential polynomial:", sol)
print("value at t=1:", format_ball(eval_solution(sol, Fraction(1), 64), 20))

# eventual comparison by exact reasoning: cosh t versus 5 e^{t/2}
g = CauchyProblem.from_roots([Fraction(1, 2)], [5])
print("2 cosh t vs 5 e^{t/2}:", oracle_eventual_compare(f, g).name)
