"""Near-equal pairs can be nudged into exactly equal ones.

This is why equality only ever halts with "they differ": any two functions that
agree closely on their first derivatives sit next to an identical pair.
"""

from fractions import Fraction

from cfineq.cfinite import CauchyProblem
from cfineq.forge import exactly_equal, forge_equal_report

f = CauchyProblem.from_roots([1, Fraction(100001, 100000)], [2, Fraction(200001, 100000)])
g = CauchyProblem.from_roots([1], [2])
r = forge_equal_report(f, g, Fraction(1, 10**4))
print("forged pair exactly equal:", exactly_equal(r.p, r.q))
print("distance moved (initial values plus roots), f side:", float(r.dist_p), " g side:", float(r.dist_q))
print("matched root pairs:", r.matched)
print("forged f initial values:", [str(x) for x in r.p.initial])
# the guaranteed bound is loose for small orders; the measured movement is far below it
print("allowed movement bound:", r.budget.bound_float())
print("within bound:", r.within_bound)
