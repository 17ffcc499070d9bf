"""The semi-decision procedure: it halts on robust instances and keeps
refining on boundary ones until the fuel runs out."""

from fractions import Fraction

from cfineq.cfinite import CauchyProblem
from cfineq.decide import decide_equality, decide_ultimate_inequality
from cfineq.forge import make_boundary_family

cosh2 = CauchyProblem.of([-1, 0], [2, 0])
half = CauchyProblem.from_roots([Fraction(1, 2)], [5])

v = decide_ultimate_inequality(cosh2, half, fuel=20)
print("2 cosh t >= 5 e^{t/2} eventually?", v.outcome.name, "after", v.fuel_used, "iterations at", v.final_precision, "bits")
print("step that fired:", v.witness.fired_steps())

fam = make_boundary_family("shared-dominant-coefficient")
p, q = fam.boundary()
v = decide_ultimate_inequality(p, q, fuel=15)
print("boundary instance:", v.outcome.name, "fuel used", v.fuel_used)

for k in (4, 16, 60):
    p, q = fam.member(k).yes
    v = decide_ultimate_inequality(p, q, fuel=80, trace=False)
    print(f"  perturbation 2^-{k}: {v.outcome.name} after {v.fuel_used} iteration(s)")

# equality: True means the two functions differ; equal pairs never halt
cos_t = CauchyProblem.of([1, 0], [1, 0])
print("cos t vs cosh t differ:", decide_equality(cos_t, CauchyProblem.of([-1, 0], [1, 0]), fuel=10).outcome.name)
print("cosh t vs cosh t:", decide_equality(cosh2, cosh2, fuel=6).outcome.name)
