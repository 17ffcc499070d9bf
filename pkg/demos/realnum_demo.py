"""Outward-rounded balls and names of real numbers.

A name answers "give me a dyadic within 2^-p"; balls built from names always
contain the true value, and widening the precision only shrinks them.
"""

from fractions import Fraction

from cfineq.realnum import ComplexBall, RealName, format_ball, name_to_ball, working_precision

root2 = RealName.sqrt(2)
for p in (8, 32, 96):
    b = name_to_ball(root2, p)
    print(f"sqrt(2) at p={p:3d}: {format_ball(b, 30)}")

# arithmetic stays enclosing even when every operation is rounded to 24 bits
with working_precision(24):
    third = ComplexBall.from_fraction(Fraction(1, 3))
    total = third + third + third
print("1/3 + 1/3 + 1/3 at 24 bits:", format_ball(total), "contains 1:", total.contains(Fraction(1)))

# an adversarial name of 1/2 never reveals the exact dyadic, so sign tests stay honest
tricky = RealName.adversarial(Fraction(1, 2))
print("adversarial 1/2 at p=40:", format_ball(name_to_ball(tricky, 40), 16))
print("pi at p=64:", format_ball(name_to_ball(RealName.pi(), 64), 22))
