import json
import random
from fractions import Fraction

import pytest

from corpus import designed_instance, equal_pair, pair_differing_at
from cfineq.cfinite import CauchyProblem, Comparison, oracle_eventual_compare
from cfineq.decide import (
    Kleenean,
    Outcome,
    decide_equality,
    decide_ultimate_inequality,
    precision_schedule,
    replay_sets,
)
from cfineq.realnum import ComplexName, RealName

COSH = CauchyProblem.from_roots([1, -1], [2, 0])
EXP = CauchyProblem.from_roots([1], [1])


def adversarial_copy(p: CauchyProblem) -> CauchyProblem:
    def adv(x):
        return RealName.adversarial(x.exact)

    return CauchyProblem(tuple(adv(c) for c in p.coefficients), tuple(adv(u) for u in p.initial))


def test_kleenean_logic():
    T, F, U = Kleenean.TRUE, Kleenean.FALSE, Kleenean.UNKNOWN
    assert ~T is F and ~U is U
    assert (T & U) is U and (F & U) is F and (T & T) is T


def test_worked_examples():
    v = decide_ultimate_inequality(COSH, CauchyProblem.from_roots([Fraction(1, 2)], [5]))
    assert v.outcome is Outcome.TRUE and v.witness.fired_steps()[0].startswith("f-dominant-simple")
    cos = CauchyProblem.from_roots([(0, 1), (0, -1)], [1, 0])
    v = decide_ultimate_inequality(cos, CauchyProblem.zero())
    assert v.outcome is Outcome.FALSE and v.witness.fired_steps() == ["nonreal-oscillation:false"]


@pytest.mark.parametrize("fuel", [10, 20])
def test_shared_dominant_boundary_exhausts(fuel):
    v = decide_ultimate_inequality(COSH, EXP, fuel=fuel)
    assert v.outcome is Outcome.EXHAUSTED and v.fuel_used == fuel
    assert v.witness.fired_steps() == []


def test_orders_zero():
    v = decide_ultimate_inequality(CauchyProblem.zero(), CauchyProblem.zero())
    assert v.outcome is Outcome.TRUE and v.witness.fired_steps() == ["orders-zero"]


def test_rejects_complex_input():
    z = CauchyProblem((ComplexName(RealName.rational(0), RealName.rational(1)),), (RealName.rational(1),))
    with pytest.raises(ValueError):
        decide_ultimate_inequality(z, CauchyProblem.zero())
    assert decide_equality(z, CauchyProblem.zero()).outcome is Outcome.TRUE


def test_precision_schedule_grows():
    vals = [precision_schedule(N, 3, 2, 2) for N in range(10)]
    assert vals == sorted(vals) and len(set(vals)) == 10


def test_soundness_small_corpus():
    rng = random.Random(77)
    halted = 0
    for _ in range(60):
        d = designed_instance(rng)
        truth = oracle_eventual_compare(d.f, d.g)
        v = decide_ultimate_inequality(d.f, d.g, fuel=30, trace=False)
        if v.halted:
            halted += 1
            assert (v.outcome is Outcome.TRUE) == (truth is Comparison.GE)
    assert halted >= 55


def test_name_independence():
    rng = random.Random(5)
    compared = 0
    for _ in range(25):
        d = designed_instance(rng)
        a = decide_ultimate_inequality(d.f, d.g, fuel=30, trace=False)
        b = decide_ultimate_inequality(adversarial_copy(d.f), adversarial_copy(d.g), fuel=30, trace=False)
        if a.halted and b.halted:
            assert a.outcome is b.outcome
            compared += 1
    assert compared >= 20


def test_irrational_inputs():
    f = CauchyProblem((-RealName.sqrt(2),), (RealName.rational(1),))
    g = CauchyProblem((RealName.rational(-1),), (RealName.pi(),))
    assert decide_ultimate_inequality(f, g).outcome is Outcome.TRUE
    assert decide_ultimate_inequality(g, f).outcome is Outcome.FALSE


def test_monotone_halting():
    rng = random.Random(6)
    for _ in range(15):
        d = designed_instance(rng)
        v = decide_ultimate_inequality(d.f, d.g, fuel=40, trace=False)
        if not v.halted:
            continue
        for extra in (0, 5, 20):
            w = decide_ultimate_inequality(d.f, d.g, fuel=v.fuel_used + extra, trace=False)
            assert w.outcome is v.outcome and w.fuel_used == v.fuel_used


def test_step_sets_replay():
    rng = random.Random(8)
    pairs = [(COSH, EXP)] + [(d.f, d.g) for d in (designed_instance(rng) for _ in range(15))]
    for f, g in pairs:
        n, m = f.n, g.n
        v = decide_ultimate_inequality(f, g, fuel=6)
        for rec in v.witness.records:
            if rec.exhausted:
                continue
            assert set(rec.M1) <= set(range(1, n + 1))
            assert set(rec.M2) <= set(range(n + 1, n + m + 1))
            assert not set(rec.C) & set(rec.R)
            if not rec.R:
                assert rec.C == list(range(1, n + m + 1))
            replay = replay_sets(rec, n)
            for key in ("M1", "M2", "R", "MR1", "MR2", "C"):
                assert replay[key] == getattr(rec, key)


def test_trace_is_jsonl():
    v = decide_ultimate_inequality(COSH, EXP, fuel=3)
    lines = v.witness.to_jsonl().splitlines()
    assert len(lines) == 3
    assert [json.loads(x)["N"] for x in lines] == [0, 1, 2]


def test_equality_examples():
    a = CauchyProblem.from_roots([1, 2], [1, 1])
    assert decide_equality(a, EXP, fuel=8).outcome is Outcome.EXHAUSTED
    assert decide_equality(COSH, EXP).outcome is Outcome.TRUE
    assert decide_equality(CauchyProblem.zero(), CauchyProblem.zero(), fuel=3).outcome is Outcome.EXHAUSTED


def test_equality_detects_last_index():
    rng = random.Random(9)
    for n, m in [(1, 1), (2, 1), (2, 3), (0, 2), (3, 0)]:
        f, g = pair_differing_at(rng, n, m, n + m - 1)
        v = decide_equality(f, g)
        assert v.outcome is Outcome.TRUE
        rec = v.witness.records[-1]
        assert [not e.contains_zero() for e in rec.eps] == [j == n + m - 1 for j in range(n + m)]


def test_equal_pairs_never_halt():
    rng = random.Random(10)
    for _ in range(10):
        f, g = equal_pair(rng)
        assert decide_equality(f, g, fuel=6).outcome is Outcome.EXHAUSTED
