import random
from fractions import Fraction

import mpmath
import pytest

from corpus import designed_instance, problem_from_terms
from cfineq.cfinite import (
    CauchyProblem,
    Comparison,
    OracleInapplicable,
    eval_solution,
    extend_recurrence,
    extend_recurrence_exact,
    oracle_eventual_compare,
    qqi_parts,
    solve_exponential,
    solve_exponential_exact,
)
from cfineq.poly import find_roots
from cfineq.realnum import ComplexBall, RealName, working_precision


def test_geometric_prefix():
    p = CauchyProblem.of([-2], [1])
    assert [qqi_parts(x)[0] for x in extend_recurrence_exact(p, 4)] == [1, 2, 4, 8, 16]
    balls = extend_recurrence(p, 4, 40).values
    assert all(b.contains(v) for b, v in zip(balls, [1, 2, 4, 8, 16]))


def test_fibonacci_prefix():
    p = CauchyProblem.of([-1, -1], [0, 1])
    vals = [qqi_parts(x)[0] for x in extend_recurrence_exact(p, 9)]
    assert vals == [0, 1, 1, 2, 3, 5, 8, 13, 21, 34]


def test_cosh_coefficients():
    e = solve_exponential_exact(CauchyProblem.from_roots([1, -1], [2, 0]))
    coeffs = {qqi_parts(t.root)[0]: qqi_parts(t.coeffs[0])[0] for t in e.terms}
    assert coeffs == {1: 1, -1: 1}


def test_double_root_solution_value():
    # (1 + 2t) e^t at t = 1 is 3e
    p = CauchyProblem.from_roots([1, 1], [1, 3])
    e = solve_exponential_exact(p)
    (term,) = e.terms
    assert [qqi_parts(a)[0] for a in term.coeffs] == [1, 2]
    val = eval_solution(e, 1, 80)
    centre, rad = val.re.to_fraction(), val.rad.to_fraction()
    with mpmath.workprec(200):
        err = abs(mpmath.mpf(centre.numerator) / centre.denominator - 3 * mpmath.e)
        assert err <= mpmath.mpf(rad.numerator) / rad.denominator + mpmath.ldexp(1, -150)
    assert val.rad.to_fraction() < Fraction(1, 2**70)


def test_ball_solve_of_irrational_coefficients():
    # f' = sqrt2 f, f(0) = 1
    p = CauchyProblem((-RealName.sqrt(2),), (RealName.rational(1),))
    with working_precision(None):
        roots = find_roots(p.char_poly(100), 60)
    e = solve_exponential(p, roots, 60)
    assert e.terms[0].coeffs[0].contains(1)


def test_derivative_and_recurrence_duality():
    rng = random.Random(3)
    for _ in range(100):
        d = designed_instance(rng)
        for p in (d.f, d.g):
            if p.n == 0:
                continue
            K = p.n + 3
            exact = extend_recurrence_exact(p, K)
            e = solve_exponential_exact(p)
            for k in range(K + 1):
                assert not (e.derivative_at_zero(k) - exact[k])
            with working_precision(None):
                roots = find_roots(p.char_poly(120), 50)
            eb = solve_exponential(p, roots, 50)
            prefix = extend_recurrence(p, K, 60).values
            with working_precision(120):
                for k in range(p.n):
                    assert ComplexBall.coerce(eb.derivative_at_zero(k)).contains(exact[k])
                for k in range(K + 1):
                    assert prefix[k].contains(exact[k])


def test_oracle_examples():
    cosh = CauchyProblem.from_roots([1, -1], [2, 0])
    assert oracle_eventual_compare(cosh, CauchyProblem.from_roots([Fraction(1, 2)], [5])) is Comparison.GE
    cos = CauchyProblem.from_roots([(0, 1), (0, -1)], [1, 0])
    assert oracle_eventual_compare(cos, CauchyProblem.zero()) is Comparison.NOT_GE
    a = CauchyProblem.from_roots([1, 2], [1, 1])
    assert oracle_eventual_compare(a, CauchyProblem.from_roots([1], [1])) is Comparison.EQUAL


def test_oracle_rejects_ties_and_inexact():
    # e^t (1 + cos t) versus 0: real and oscillating terms at the same rate, equal size
    p = problem_from_terms([(1, [1]), ((1, 1), [Fraction(1, 2)]), ((1, -1), [Fraction(1, 2)])])
    with pytest.raises(OracleInapplicable):
        oracle_eventual_compare(p, CauchyProblem.zero())
    # e^t (2 + cos t) is settled: amplitude below the real coefficient
    q = problem_from_terms([(1, [2]), ((1, 1), [Fraction(1, 2)]), ((1, -1), [Fraction(1, 2)])])
    assert oracle_eventual_compare(q, CauchyProblem.zero()) is Comparison.GE
    with pytest.raises(OracleInapplicable):
        oracle_eventual_compare(CauchyProblem((RealName.sqrt(2),), (RealName.rational(1),)), CauchyProblem.zero())


def test_oracle_self_consistency_by_evaluation():
    rng = random.Random(12)
    seen = 0
    while seen < 25:
        d = designed_instance(rng, "real-dominant")
        if oracle_eventual_compare(d.f, d.g) is not Comparison.GE:
            continue
        ef, eg = solve_exponential_exact(d.f), solve_exponential_exact(d.g)
        with working_precision(300):
            vals = [eval_solution(ef, t, 200) - eval_solution(eg, t, 200) for t in (32, 64, 128)]
        assert vals[-1].re_lower() > 0
        seen += 1
