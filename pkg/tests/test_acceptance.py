"""Acceptance suite: one check per criterion, each printing a PASS/FAIL line.

Run with pytest, or directly as ``python3 tests/test_acceptance.py``.
"""

from __future__ import annotations

import random
import statistics
import sys
import time
from fractions import Fraction
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).resolve().parent))

from corpus import (  # noqa: E402
    designed_instance,
    equal_pair,
    forgeable_pair,
    pair_differing_at,
)
from cfineq.cfinite import Comparison, OracleInapplicable, oracle_eventual_compare  # noqa: E402
from cfineq.decide import Outcome, decide_equality, decide_ultimate_inequality  # noqa: E402
from cfineq.forge import (  # noqa: E402
    KINDS,
    check_root_addition_defect,
    check_root_elimination_defect,
    exactly_equal,
    forge_equal_report,
    make_boundary_family,
)
from cfineq.poly import check_spectral_vs_coefficient_bound  # noqa: E402
from cfineq.realnum import ComplexBall, working_precision  # noqa: E402
from cfineq.vandermonde import (  # noqa: E402
    build_vandermonde,
    check_cofactor_product_identity,
    check_q_recursions,
    collapse_signature,
    delete_row_col,
    determinant,
    f_function,
    g_function,
    gauss_solve,
    leading_cofactors,
    mat_vec,
    minor_det,
)


def _rq(rng: random.Random, span: int = 5, den: int = 7) -> Fraction:
    return Fraction(rng.randint(-span * den, span * den), rng.randint(1, den))


def _distinct(rng: random.Random, k: int) -> list[Fraction]:
    vals: set[Fraction] = set()
    while len(vals) < k:
        vals.add(_rq(rng))
    return sorted(vals, key=lambda _: rng.random())


def _signature(rng: random.Random, n_max: int) -> list[int]:
    while True:
        sig = [rng.randint(1, 3) for _ in range(rng.randint(1, 3))]
        if sum(sig) <= n_max:
            return sig


# ---------------------------------------------------------------------------
# criteria


def criterion_1() -> tuple[bool, str]:
    rng = random.Random(101)
    t0 = time.perf_counter()
    q_ok = all(
        check_q_recursions([_rq(rng) for _ in range(rng.randint(2, 6))], rng.randint(0, 6), rng.randint(0, 3))
        for _ in range(100)
    )
    top_ok = all(
        leading_cofactors(m1, n, _rq(rng), [_rq(rng) for _ in range(n - m1)])[-1] == 1
        for n in range(1, 9)
        for m1 in range(1, n + 1)
    )
    minors_ok = True
    for n in range(1, 7):
        for m1 in range(1, n + 1):
            for _ in range(50):
                x, ys = _rq(rng), [_rq(rng) for _ in range(n - m1)]
                V = build_vandermonde([m1] + [1] * (n - m1), [x] + ys)
                for j in range(1, n + 1):
                    minors_ok &= minor_det(m1, j, x, ys) == determinant(delete_row_col(V, j, m1))
    collapse_ok = True
    for _ in range(100):
        sig = _signature(rng, 6)
        lams = _distinct(rng, len(sig))
        u = [_rq(rng) for _ in range(sum(sig))]
        m1, pts = collapse_signature(sig, lams)
        collapse_ok &= f_function([m1] + [1] * (len(pts) - 1), pts, u) == gauss_solve(build_vandermonde(sig, lams), u)[m1 - 1]
    product_ok = True
    for _ in range(100):
        m = rng.randint(1, 3)
        n2 = rng.randint(m, m + 2)
        n1 = rng.randint(n2, n2 + 3)
        product_ok &= check_cofactor_product_identity(m, n1, n2, [_rq(rng) for _ in range(n1 - m + 1)], [_rq(rng) for _ in range(n2)])
    elapsed = time.perf_counter() - t0
    ok = q_ok and top_ok and minors_ok and collapse_ok and product_ok and elapsed < 60
    return ok, (f"recursions={q_ok} top-cofactor={top_ok} minors={minors_ok} "
                f"collapse={collapse_ok} product-identity={product_ok} time={elapsed:.1f}s")


def criterion_2() -> tuple[bool, str]:
    rng = random.Random(202)
    agree = resid = 0
    for _ in range(100):
        sig = _signature(rng, 5)
        lams = _distinct(rng, len(sig))
        u = [_rq(rng) for _ in range(sum(sig))]
        a = gauss_solve(build_vandermonde(sig, lams), u)
        agree += f_function(sig, lams, u) == a[sig[0] - 1]
        with working_precision(120):
            V = build_vandermonde(sig, [ComplexBall.from_fraction(x) for x in lams])
            ub = [ComplexBall.from_fraction(x) for x in u]
            ab = gauss_solve(V, ub)
            resid += all((r - t).contains_zero() for r, t in zip(mat_vec(V, ab), ub))
    worked = f_function([1, 1], [1, -1], [2, 0]) == 1 and g_function(1, 2, [1, -1], [2, 0]) == -2
    ok = agree == 100 and resid == 100 and worked
    return ok, f"F=solve {agree}/100, residual contains 0 {resid}/100, worked example F=1: {worked}"


def criterion_3() -> tuple[bool, str]:
    rng = random.Random(303)
    kinds = ["real-dominant", "complex-dominant", "double-root-negative", "positivity", "shared-lower"]
    t0 = time.perf_counter()
    total = halted = wrong = skipped = 0
    for kind in kinds:
        for _ in range(44):
            d = designed_instance(rng, kind)
            try:
                truth = oracle_eventual_compare(d.f, d.g)
            except OracleInapplicable:
                skipped += 1
                continue
            if truth is not d.expected:
                skipped += 1
                continue
            total += 1
            v = decide_ultimate_inequality(d.f, d.g, fuel=40, trace=False)
            if v.halted:
                halted += 1
                wrong += (v.outcome is Outcome.TRUE) != (truth is Comparison.GE)
    elapsed = time.perf_counter() - t0
    rate = halted / total if total else 0.0
    ok = total >= 200 and wrong == 0 and rate >= 0.95 and elapsed < 300
    return ok, f"instances={total} halted={halted} ({rate:.1%}) wrong={wrong} skipped={skipped} time={elapsed:.1f}s"


def criterion_4() -> tuple[bool, str]:
    details = []
    ok = True
    for kind in KINDS:
        p, q = make_boundary_family(kind).boundary()
        outs = []
        for fuel in (10, 20, 40, 60):
            v = decide_ultimate_inequality(p, q, fuel=fuel)
            quiet = v.witness.fired_steps() == []
            outs.append(v.outcome is Outcome.EXHAUSTED and quiet and v.fuel_used == fuel)
        ok &= all(outs)
        details.append(f"{kind}={'ok' if all(outs) else outs}")
    return ok, " ".join(details)


def criterion_5() -> tuple[bool, str]:
    rng = random.Random(505)
    unequal_true = last_index = 0
    for i in range(100):
        n, m = rng.randint(0, 4), rng.randint(0, 4)
        if n + m == 0:
            n = 1
        idx = n + m - 1 if i % 2 == 0 else rng.randrange(n + m)
        last_index += idx == n + m - 1
        f, g = pair_differing_at(rng, n, m, idx)
        unequal_true += decide_equality(f, g, fuel=20, trace=False).outcome is Outcome.TRUE
    equal_exhausted = 0
    for _ in range(50):
        f, g = equal_pair(rng)
        equal_exhausted += decide_equality(f, g, fuel=10, trace=False).outcome is Outcome.EXHAUSTED
    ok = unequal_true == 100 and equal_exhausted == 50
    return ok, f"unequal halted True {unequal_true}/100 (last-index pairs {last_index}); equal Exhausted {equal_exhausted}/50"


def criterion_6() -> tuple[bool, str]:
    rng = random.Random(606)
    exact = bounded = 0
    worst_ratio = 0.0
    for _ in range(100):
        f, g, eps = forgeable_pair(rng)
        r = forge_equal_report(f, g, eps)
        exact += exactly_equal(r.p, r.q)
        bounded += r.within_bound
        worst_ratio = max(worst_ratio, float(max(r.dist_p, r.dist_q)) / r.budget.bound_float())
    small = [Fraction(k, 8) for k in range(-24, 25)]
    add_ok = sum(
        check_root_addition_defect([rng.choice(small) for _ in range(rng.randint(1, 4))],
                                   [rng.choice(small) for _ in range(9)], rng.choice(small))
        for _ in range(100)
    )
    elim_ok = 0
    for _ in range(100):
        a, b = rng.sample(small, 2)
        lams = [rng.choice(small) for _ in range(rng.randint(0, 3))]
        elim_ok += check_root_elimination_defect(a, b, lams, [rng.choice(small) for _ in range(len(lams) + 2)])
    ok = exact == 100 and bounded == 100 and add_ok == 100 and elim_ok == 100
    return ok, (f"exact {exact}/100, within bound {bounded}/100 (max measured/bound {worst_ratio:.2e}), "
                f"root-addition {add_ok}/100, root-elimination {elim_ok}/100")


def criterion_7() -> tuple[bool, str]:
    rng = random.Random(707)
    good = 0
    for _ in range(100):
        n = rng.randint(1, 5)
        c = [rng.randint(-9, 9) for _ in range(n)]
        c2 = [x + rng.randint(-3, 3) for x in c]
        if c2 == c:
            c2[rng.randrange(n)] += 1
        if max(abs(x) for x in c + c2) == 0:
            c[0] = 1
        good += check_spectral_vs_coefficient_bound(c, c2)
    return good == 100, f"inequality holds {good}/100"


def criterion_8() -> tuple[bool, str]:
    fam = make_boundary_family("shared-dominant-coefficient")
    ks = list(range(1, 21))
    iters, walls = [], []
    for k in ks:
        p, q = fam.member(k).yes
        t0 = time.perf_counter()
        v = decide_ultimate_inequality(p, q, fuel=60, trace=False)
        walls.append(time.perf_counter() - t0)
        iters.append(v.fuel_used if v.halted else None)
    halted = all(i is not None for i in iters)
    monotone = halted and all(a <= b for a, b in zip(iters, iters[1:]))
    if halted and len(set(iters)) > 1:
        slope, intercept = statistics.linear_regression(ks, iters)
    else:
        slope, intercept = 0.0, float(iters[0]) if halted else 0.0
    affine = halted and all(i <= slope * k + intercept + 1 for k, i in zip(ks, iters))
    ok = monotone and affine and walls[-1] < 10
    return ok, (f"iterations k=1..20: {iters}; fit slope={slope:.3f} intercept={intercept:.2f}; "
                f"wall time at k=20: {walls[-1]:.3f}s")


CRITERIA = [criterion_1, criterion_2, criterion_3, criterion_4, criterion_5, criterion_6, criterion_7, criterion_8]


def _line(i: int, ok: bool, detail: str) -> str:
    return f"{'PASS' if ok else 'FAIL'} criterion {i}: {detail}"


@pytest.mark.parametrize("index", range(1, len(CRITERIA) + 1))
def test_criterion(index, capsys):
    ok, detail = CRITERIA[index - 1]()
    with capsys.disabled():
        print("\n" + _line(index, ok, detail))
    assert ok, detail


if __name__ == "__main__":
    failures = 0
    for i, crit in enumerate(CRITERIA, start=1):
        ok, detail = crit()
        failures += not ok
        print(_line(i, ok, detail), flush=True)
    sys.exit(1 if failures else 0)
