"""Maximal partial decision procedures: equality and ultimate inequality.

Both procedures run an outer loop over an accuracy index ``N``.  Every test is
a certified ball comparison, so a returned ``True``/``False`` is always
correct; on boundary instances the loop runs until its fuel is spent and the
outcome is ``EXHAUSTED``.
"""

from __future__ import annotations

import enum
import json
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

from .cfinite import CauchyProblem, recurrence_extend
from .poly import RootList, find_roots, from_roots
from .realnum import (
    ComplexBall,
    Dyadic,
    PrecisionExhausted,
    hull,
    name_to_ball,
    working_precision,
)
from .vandermonde import g_function


class Kleenean(enum.Enum):
    TRUE = "true"
    FALSE = "false"
    UNKNOWN = "unknown"

    def __invert__(self) -> "Kleenean":
        if self is Kleenean.TRUE:
            return Kleenean.FALSE
        if self is Kleenean.FALSE:
            return Kleenean.TRUE
        return Kleenean.UNKNOWN

    def __and__(self, other: "Kleenean") -> "Kleenean":
        if Kleenean.FALSE in (self, other):
            return Kleenean.FALSE
        if Kleenean.UNKNOWN in (self, other):
            return Kleenean.UNKNOWN
        return Kleenean.TRUE

    def known(self) -> bool:
        return self is not Kleenean.UNKNOWN


class Outcome(enum.Enum):
    TRUE = "true"
    FALSE = "false"
    EXHAUSTED = "exhausted"


@dataclass
class IterationRecord:
    """Everything computed in one pass of the outer loop (indices are 1-based)."""

    N: int
    M: int
    W: int
    roots: list[ComplexBall] = field(default_factory=list)
    relation: list[list[bool]] = field(default_factory=list)
    M1: list[int] = field(default_factory=list)
    M2: list[int] = field(default_factory=list)
    R: list[int] = field(default_factory=list)
    MR1: list[int] = field(default_factory=list)
    MR2: list[int] = field(default_factory=list)
    C: list[int] = field(default_factory=list)
    L: list[ComplexBall] = field(default_factory=list)
    eps: list[ComplexBall] = field(default_factory=list)
    c_positive: Kleenean = Kleenean.UNKNOWN
    d_positive: Kleenean = Kleenean.UNKNOWN
    differs: Optional[bool] = None
    fired: Optional[str] = None
    exhausted: bool = False
    note: str = ""

    def to_dict(self) -> dict:
        return {
            "N": self.N,
            "M": self.M,
            "W": self.W,
            "roots": [str(r) for r in self.roots],
            "M1": self.M1,
            "M2": self.M2,
            "R": self.R,
            "MR1": self.MR1,
            "MR2": self.MR2,
            "C": self.C,
            "L": [str(x) for x in self.L],
            "eps": [str(x) for x in self.eps],
            "c_positive": self.c_positive.value,
            "d_positive": self.d_positive.value,
            "differs": self.differs,
            "fired": self.fired,
            "precision_exhausted": self.exhausted,
            "note": self.note,
        }


@dataclass
class DecisionTrace:
    subject: str
    n: int
    m: int
    records: list[IterationRecord] = field(default_factory=list)

    def fired_steps(self) -> list[str]:
        return [r.fired for r in self.records if r.fired]

    def to_jsonl(self) -> str:
        return "\n".join(json.dumps(r.to_dict()) for r in self.records)


@dataclass
class Verdict:
    outcome: Outcome
    fuel_used: int
    final_precision: int
    witness: Optional[DecisionTrace] = None

    @property
    def halted(self) -> bool:
        return self.outcome is not Outcome.EXHAUSTED


# ---------------------------------------------------------------------------
# precision policy


def precision_schedule(N: int, B: int, n: int, m: int) -> int:
    """Working precision ``M`` for accuracy index ``N``: a floor of 32 bits plus
    terms growing with the instance size and linearly with ``N``."""
    if N < 0:
        raise ValueError("N must be non-negative")
    k = n + m
    return 32 + 2 * k * (B + 1) + (k + 1) * N


def magnitude_exponent(p: CauchyProblem, q: CauchyProblem) -> int:
    """Integer ``B > log2(max(|u|, |v|, |roots|) + 1)`` (roots bounded by ``1 + max|c|``)."""
    bound = Dyadic(1)
    for prob in (p, q):
        if prob.n == 0:
            continue
        cmax = max(name_to_ball(c, 8).mag_upper() for c in prob.coefficients)
        umax = max(name_to_ball(u, 8).mag_upper() for u in prob.initial)
        bound = max(bound, cmax + 1, umax)
    val = (bound + 1).to_fraction()
    return max(1, math.ceil(math.log2(val)) + 1)


def _query_bits(M: int, n: int, m: int) -> int:
    # clustered roots of multiplicity k need coefficients k times as accurate
    return max(n, m, 1) * (M + 8) + 32


# ---------------------------------------------------------------------------
# equality


def decide_equality(p: CauchyProblem, q: CauchyProblem, fuel: int = 20, max_prec: int = 1 << 14,
                    trace: bool = True) -> Verdict:
    """Halts with ``TRUE`` once ``u_j != v_j`` is certified for some ``j < n + m``.

    The two functions are equal iff their derivative sequences agree on the
    first ``n + m`` indices, so equal pairs never halt.
    """
    if fuel < 1:
        raise ValueError("fuel must be positive")
    K = p.n + q.n
    tr = DecisionTrace("equality", p.n, q.n)
    W = 0
    for N in range(fuel):
        W = min(32 * (N + 1), max_prec)
        rec = IterationRecord(N=N, M=W, W=W)
        if K > 0:
            with working_precision(W + 32):
                u = _prefix(p, K, W)
                v = _prefix(q, K, W)
                diffs = [a - b for a, b in zip(u, v)]
            rec.eps = diffs
            rec.differs = any(not d.contains_zero() for d in diffs)
        else:
            rec.differs = False
        if trace:
            tr.records.append(rec)
        if rec.differs:
            rec.fired = "difference"
            return Verdict(Outcome.TRUE, N + 1, W, tr if trace else None)
    return Verdict(Outcome.EXHAUSTED, fuel, W, tr if trace else None)


def _prefix(p: CauchyProblem, K: int, W: int) -> list[ComplexBall]:
    if p.n == 0:
        return [ComplexBall(0)] * K
    c = [name_to_ball(x, W) for x in p.coefficients]
    u = p.initial_balls(W)
    return recurrence_extend(c, u, K - 1)


# ---------------------------------------------------------------------------
# ultimate inequality


def _rho(b: ComplexBall, M: int) -> Dyadic:
    return max(b.rad, Dyadic(1, -M))


def preceq(a: ComplexBall, b: ComplexBall, M: int) -> bool:
    """Over-approximation of ``Re a <= Re b`` for the enclosed numbers."""
    return a.re - _rho(a, M) <= b.re + _rho(b, M)


def near_real(b: ComplexBall, M: int) -> bool:
    return abs(b.im) <= _rho(b, M)


def compute_sets(roots: Sequence[ComplexBall], n: int, M: int) -> dict:
    """The relation and index sets of one iteration (0-based indices)."""
    total = len(roots)
    rel = [[preceq(roots[j], roots[k], M) for k in range(total)] for j in range(total)]
    all_idx = range(total)
    M1 = [k for k in range(n) if all(rel[j][k] for j in all_idx)]
    M2 = [k for k in range(n, total) if all(rel[j][k] for j in all_idx)]
    R = [j for j in all_idx if near_real(roots[j], M)]
    MR1 = [k for k in R if k < n and all(rel[j][k] for j in R)]
    MR2 = [k for k in R if k >= n and all(rel[j][k] for j in R)]
    C = [j for j in all_idx if all(not rel[j][k] for k in R)]
    return {"relation": rel, "M1": M1, "M2": M2, "R": R, "MR1": MR1, "MR2": MR2, "C": C}


def _threshold_sign(x: ComplexBall, N: int) -> Kleenean:
    t = Dyadic(1, -N)
    if x.re_lower() > t:
        return Kleenean.TRUE
    if x.re_upper() < -t:
        return Kleenean.FALSE
    return Kleenean.UNKNOWN


def _sgn(k: int) -> int:
    return -1 if k % 2 else 1


def decide_ultimate_inequality(p: CauchyProblem, q: CauchyProblem, fuel: int = 40,
                               max_prec: int = 1 << 14, trace: bool = True) -> Verdict:
    """Decide whether ``f(t) >= g(t)`` for all large ``t`` (``f``, ``g`` solve ``p``, ``q``)."""
    if fuel < 1:
        raise ValueError("fuel must be positive")
    if not (p.is_real() and q.is_real()):
        raise ValueError("ultimate inequality needs real problems")
    n, m = p.n, q.n
    tr = DecisionTrace("ultimate-ineq", n, m)
    B = magnitude_exponent(p, q)
    M = precision_schedule(0, B, n, m)
    if n == 0 and m == 0:
        # both functions are identically zero; the instance space is a single point
        rec = IterationRecord(N=0, M=M, W=M, fired="orders-zero")
        tr.records.append(rec)
        return Verdict(Outcome.TRUE, 1, M, tr if trace else None)
    for N in range(fuel):
        M = precision_schedule(N, B, n, m)
        W = _query_bits(M, n, m)
        rec = None
        while True:
            try:
                rec = _iteration(p, q, N, M, W)
                break
            except PrecisionExhausted as exc:
                if 2 * W > max_prec:
                    rec = IterationRecord(N=N, M=M, W=W, exhausted=True, note=str(exc))
                    break
                W *= 2
        if trace:
            tr.records.append(rec)
        if rec.fired:
            out = Outcome.TRUE if rec.fired.endswith(":true") else Outcome.FALSE
            return Verdict(out, N + 1, M, tr if trace else None)
    return Verdict(Outcome.EXHAUSTED, fuel, M, tr if trace else None)


def _iteration(p: CauchyProblem, q: CauchyProblem, N: int, M: int, W: int) -> IterationRecord:
    n, m = p.n, q.n
    rec = IterationRecord(N=N, M=M, W=W)
    with working_precision(W + 64):
        rc = find_roots(p.char_poly(W), M, real=True)
        rd = find_roots(q.char_poly(W), M, real=True)
        roots = list(rc.roots) + list(rd.roots)
        u = p.initial_balls(W)
        v = q.initial_balls(W)
        rec.roots = roots
        sets = compute_sets(roots, n, M)
        rec.relation = sets["relation"]
        one = lambda xs: [i + 1 for i in xs]  # noqa: E731
        rec.M1, rec.M2, rec.R = one(sets["M1"]), one(sets["M2"]), one(sets["R"])
        rec.MR1, rec.MR2, rec.C = one(sets["MR1"]), one(sets["MR2"]), one(sets["C"])
        M1, M2 = sets["M1"], sets["M2"]

        # dominant simple real roots
        if len(M1) == 1:
            j1 = M1[0]
            others = [roots[k] for k in range(n) if k != j1]
            val = g_function(1, n, [roots[j1]] + others, u) * _sgn(n - 1)
            rec.c_positive = _threshold_sign(val, N)
        if len(M2) == 1:
            k1 = M2[0]
            others = [roots[k] for k in range(n, n + m) if k != k1]
            val = g_function(1, m, [roots[k1]] + others, v) * _sgn(m - 1)
            rec.d_positive = _threshold_sign(val, N)
        if len(M1) == 1 and not M2 and rec.c_positive.known():
            rec.fired = f"f-dominant-simple:{rec.c_positive.value}"
            return rec
        if not M1 and len(M2) == 1 and rec.d_positive.known():
            rec.fired = f"g-dominant-simple:{(~rec.d_positive).value}"
            return rec
        if len(M1) == 1 and len(M2) == 1 and rec.c_positive.known() and rec.c_positive == ~rec.d_positive:
            rec.fired = f"both-dominant-simple:{rec.c_positive.value}"
            return rec

        # derivative sequence of f - g
        K = n + m
        cb = [name_to_ball(x, W) for x in p.coefficients]
        db = [name_to_ball(x, W) for x in q.coefficients]
        uu = recurrence_extend(cb, u, K - 1) if n else [ComplexBall(0)] * K
        vv = recurrence_extend(db, v, K - 1) if m else [ComplexBall(0)] * K
        w = [a - b for a, b in zip(uu, vv)]

        # nonreal roots dominating every real candidate
        C = sets["C"]
        if C:
            keep = [roots[j] for j in range(K) if j not in C]
            e_prime = from_roots(keep)
            ell = len(keep)
            wp = recurrence_extend(list(e_prime.coeffs), w[:ell], K - 1) if ell else [ComplexBall(0)] * K
            threshold = Dyadic(1, -M)
            rec.eps = [(w[j] - wp[j]) for j in range(ell, K)]
            if any(abs_lower_ball(e) > threshold for e in rec.eps):
                rec.fired = "nonreal-oscillation:false"
                return rec

        # leading coefficients at the largest real candidates
        L: list[ComplexBall] = []
        MR1, MR2 = sets["MR1"], sets["MR2"]
        if MR1:
            X = hull([roots[k] for k in MR1])
            rest = [roots[k] for k in range(n) if k not in MR1]
            m1 = len(MR1)
            for ell in range(1, m1 + 1):
                g = g_function(ell, n, [X] * (m1 - ell + 1) + rest, u)
                L.append(g.real_part() * _sgn(n - ell))
        if MR2:
            X = hull([roots[k] for k in MR2])
            rest = [roots[k] for k in range(n, K) if k not in MR2]
            m2 = len(MR2)
            for ell in range(1, m2 + 1):
                g = g_function(ell, m, [X] * (m2 - ell + 1) + rest, v)
                L.append(g.real_part() * _sgn(m - ell + 1))
        rec.L = L
        rec.differs = any(not x.contains_zero() for x in w)
        bound = Dyadic(1, -N)
        if L and rec.differs and all(x.re_upper() < -bound for x in L):
            rec.fired = "real-leading-negative:false"
            return rec
    return rec


def abs_lower_ball(b: ComplexBall) -> Dyadic:
    return b.mag_lower()


def replay_sets(rec: IterationRecord, n: int) -> dict:
    """Recompute the index sets of a trace record from its recorded balls (1-based)."""
    sets = compute_sets(rec.roots, n, rec.M)
    return {k: [i + 1 for i in v] for k, v in sets.items() if k != "relation"}
