"""Perturbation constructions: exact equalisation of near-equal pairs and boundary families.

Everything here works in exact Gaussian-rational arithmetic on problems whose
characteristic roots are known exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Callable, Optional, Sequence

import networkx as nx
from networkx.algorithms import bipartite
from sympy.polys.domains import QQ_I

from .cfinite import (
    CauchyProblem,
    Comparison,
    extend_recurrence_exact,
    oracle_eventual_compare,
    qqi,
    qqi_is_zero,
    qqi_parts,
    qqi_poly_from_roots,
    recurrence_extend,
)
from .poly import find_roots
from .realnum import CFineqError, ComplexBall, Dyadic, ball_sqrt_upper, working_precision


class HypothesisViolated(CFineqError, ValueError):
    """The inputs do not satisfy the closeness hypothesis of a construction."""


# Constants of the evaluated perturbation bound
#   bound = (n + m + |c| + |d| + |u| + BASE_OFFSET) ** exponent * eps ** (1 / (4N - 2)),
#   exponent = EXP_SCALE * N * (ceil(log2 N) + 1) + EXP_OFFSET,   N = max(n, m).
# The proof only gives the shape K^{O(N log N)} eps^{1/(4N-2)}; these are the
# smallest round values that dominate every intermediate estimate we track.
FORGE_CONSTANTS = {"BASE_OFFSET": 2, "EXP_SCALE": 2, "EXP_OFFSET": 2}


# ---------------------------------------------------------------------------
# exact helpers


def _abs2(z: Any) -> Fraction:
    re, im = qqi_parts(z)
    return re * re + im * im


def _abs_upper(z: Any) -> Fraction:
    return ball_sqrt_upper(_dyadic_up(_abs2(z))).to_fraction()


def _abs_lower(z: Any) -> Fraction:
    re, im = qqi_parts(z)
    if im == 0:
        return abs(re)
    if re == 0:
        return abs(im)
    return ComplexBall.from_fraction(re, im, prec=96).mag_lower().to_fraction()


def _dyadic_up(q: Fraction) -> Dyadic:
    if Dyadic.is_dyadic(q):
        return Dyadic.coerce(q)
    return Dyadic.from_fraction(q, -128 - max(0, -q.numerator.bit_length() + q.denominator.bit_length()), "ceil")


def _norm_upper(vals: Sequence[Any]) -> Fraction:
    return max((_abs_upper(v) for v in vals), default=Fraction(0))


def _norm_lower(vals: Sequence[Any]) -> Fraction:
    return max((_abs_lower(v) for v in vals), default=Fraction(0))


def exact_roots(p: CauchyProblem, M: int = 96) -> list[Any]:
    """Exact roots when known, else dyadic centres of certified root balls."""
    if p.roots is not None:
        return list(p.roots)
    with working_precision(None):
        rl = find_roots(p.char_poly(4 * M), M)
    return [qqi((r.re.to_fraction(), r.im.to_fraction())) for r in rl.roots]


def _exact_inputs(p: CauchyProblem) -> tuple[list[Any], list[Any], list[Any]]:
    c = p.exact_coefficients()
    u = p.exact_initial()
    if c is None or u is None:
        raise HypothesisViolated("constructions need exact coefficients and initial values")
    return c, u, exact_roots(p)


def _problem(roots: Sequence[Any], initial: Sequence[Any]) -> CauchyProblem:
    return CauchyProblem.from_roots(list(roots), list(initial))


def _matching(a: Sequence[Any], b: Sequence[Any], admissible: Callable[[Fraction], bool]) -> list[tuple[int, int]]:
    """Maximum matching among admissible pairs, minimising the largest matched distance."""
    cost = {(i, j): _abs2(a[i] - b[j]) for i in range(len(a)) for j in range(len(b))}
    cands = sorted({d for d in cost.values() if admissible(d)})
    if not cands:
        return []

    def match(limit: Fraction) -> list[tuple[int, int]]:
        g = nx.Graph()
        left = [("a", i) for i in range(len(a))]
        g.add_nodes_from(left, bipartite=0)
        g.add_nodes_from((("b", j) for j in range(len(b))), bipartite=1)
        g.add_edges_from((("a", i), ("b", j)) for (i, j), d in cost.items() if d <= limit)
        mt = bipartite.hopcroft_karp_matching(g, top_nodes=left)
        return sorted((k[1], v[1]) for k, v in mt.items() if k[0] == "a")

    best = match(cands[-1])
    lo, hi = 0, len(cands) - 1
    while lo < hi:
        mid = (lo + hi) // 2
        if len(match(cands[mid])) == len(best):
            hi = mid
        else:
            lo = mid + 1
    return match(cands[lo])


def root_distance_sq(a: Sequence[Any], b: Sequence[Any]) -> Fraction:
    """Exact squared spectral distance between two root multisets of equal size."""
    if len(a) != len(b):
        raise ValueError("root lists differ in length")
    if not a:
        return Fraction(0)
    pairs = _matching(a, b, lambda d: True)
    if len(pairs) < len(a):
        raise AssertionError("complete bipartite graph must have a perfect matching")
    return max(_abs2(a[i] - b[j]) for i, j in pairs)


def spectral_distance_upper(p_roots: Sequence[Any], p_init: Sequence[Any],
                            q_roots: Sequence[Any], q_init: Sequence[Any]) -> Fraction:
    """Upper bound on ``|u - u'|_inf + d_sigma(roots)``."""
    init = _norm_upper([x - y for x, y in zip(p_init, q_init)])
    roots = ball_sqrt_upper(_dyadic_up(root_distance_sq(p_roots, q_roots))).to_fraction()
    return init + roots


# ---------------------------------------------------------------------------
# forging equal pairs


@dataclass(frozen=True)
class PerturbationBudget:
    eps: Fraction
    N: int
    base: Fraction
    exponent: int

    @property
    def root_power(self) -> int:
        return 4 * self.N - 2

    def eta_exceeds(self, dist_sq: Fraction) -> bool:
        """Whether ``sqrt(dist_sq) < eta = eps**(1/(4N-2))``."""
        return dist_sq ** (2 * self.N - 1) < self.eps

    def admits(self, measured: Fraction) -> bool:
        """Whether ``measured <= base**exponent * eps**(1/(4N-2))`` (exact)."""
        k = self.root_power
        return measured**k <= self.base ** (self.exponent * k) * self.eps

    def bound_float(self) -> float:
        return float(self.base) ** self.exponent * float(self.eps) ** (1 / self.root_power)


def budget(p: CauchyProblem, q: CauchyProblem, eps: Fraction) -> PerturbationBudget:
    c = p.exact_coefficients() or []
    d = q.exact_coefficients() or []
    u = p.exact_initial() or []
    N = max(p.n, q.n, 1)
    base = p.n + q.n + _norm_lower(c) + _norm_lower(d) + _norm_lower(u) + FORGE_CONSTANTS["BASE_OFFSET"]
    exponent = FORGE_CONSTANTS["EXP_SCALE"] * N * (math.ceil(math.log2(N)) + 1) + FORGE_CONSTANTS["EXP_OFFSET"]
    return PerturbationBudget(Fraction(eps), N, Fraction(base), exponent)


@dataclass(frozen=True)
class ForgeResult:
    p: CauchyProblem
    q: CauchyProblem
    budget: PerturbationBudget
    dist_p: Fraction
    dist_q: Fraction
    matched: tuple[tuple[int, int], ...]

    @property
    def within_bound(self) -> bool:
        return self.budget.admits(self.dist_p) and self.budget.admits(self.dist_q)


def prefix_defect(p: CauchyProblem, q: CauchyProblem, upto: Optional[int] = None) -> list[Any]:
    K = p.n + q.n if upto is None else upto
    u = extend_recurrence_exact(p, K)
    v = extend_recurrence_exact(q, K)
    return [a - b for a, b in zip(u, v)]


def exactly_equal(p: CauchyProblem, q: CauchyProblem) -> bool:
    """Exact test of equal solutions via the first ``n + m`` derivatives."""
    K = p.n + q.n
    if K == 0:
        return True
    return all(qqi_is_zero(x) for x in prefix_defect(p, q, K - 1))


def forge_equal_report(p: CauchyProblem, q: CauchyProblem, eps: Any) -> ForgeResult:
    """Perturb a near-equal pair into an exactly equal one, with measurements."""
    eps = Fraction(eps)
    if not 0 < eps < 1:
        raise ValueError("eps must lie in (0, 1)")
    c, u, lam = _exact_inputs(p)
    d, v, mu = _exact_inputs(q)
    n, m = p.n, q.n
    defect = prefix_defect(p, q, n + m)
    worst = max((_abs2(x) for x in defect), default=Fraction(0))
    if worst >= eps * eps:
        raise HypothesisViolated("derivative prefixes differ by at least eps")
    bud = budget(p, q, eps)
    pairs = _matching(lam, mu, bud.eta_exceeds)
    e_roots = [lam[i] for i, _ in pairs]
    matched_mu = {j for _, j in pairs}
    ell = len(e_roots)
    e_poly = qqi_poly_from_roots(e_roots)
    seed = list(u[:ell])
    ext = recurrence_extend(e_poly[:-1], seed, max(n, m)) if ell else [QQ_I.zero] * (max(n, m) + 1)
    u_new = ext[:n]
    v_new = ext[:m]
    q_roots = e_roots + [mu[j] for j in range(m) if j not in matched_mu]
    p_t = _problem(lam, u_new)
    q_t = _problem(q_roots, v_new)
    dist_p = spectral_distance_upper(lam, u, lam, u_new)
    mu_order = [mu[j] for j, _ in sorted(((j, i) for i, j in pairs))] + [mu[j] for j in range(m) if j not in matched_mu]
    dist_q = spectral_distance_upper(mu_order, v, q_roots, v_new)
    return ForgeResult(p_t, q_t, bud, dist_p, dist_q, tuple(pairs))


def forge_equal(p: CauchyProblem, q: CauchyProblem, eps: Any) -> tuple[CauchyProblem, CauchyProblem]:
    r = forge_equal_report(p, q, eps)
    return r.p, r.q


# ---------------------------------------------------------------------------
# replacing a factor of the characteristic polynomial


@dataclass(frozen=True)
class Simplification:
    problem: CauchyProblem
    measured: Fraction
    envelope: Fraction


def _defects(u: Sequence[Any], poly: Sequence[Any], lo: int, hi: int) -> list[Any]:
    m = len(poly) - 1
    out = []
    for k in range(lo, hi + 1):
        acc = u[k]
        for i in range(m):
            acc = acc + poly[i] * u[k - m + i]
        out.append(acc)
    return out


def perturb_to_simpler_report(p: CauchyProblem, e: CauchyProblem, eps: Any) -> Simplification:
    """Swap a factor ``chi_e'`` of ``chi_c`` for ``chi_e`` and re-extend ``e``'s initial values."""
    eps = Fraction(eps)
    c, u, lam = _exact_inputs(p)
    ec, w, er = _exact_inputs(e)
    n, m = p.n, e.n
    if m > n:
        raise HypothesisViolated("the simpler problem must not have larger order")
    pairs = _matching(er, lam, lambda d: d < eps * eps)
    if len(pairs) < m:
        raise HypothesisViolated("roots of e are not within eps of roots of c")
    used = {j for _, j in pairs}
    e_prime_roots = [lam[j] for _, j in sorted(pairs)]
    rest = [lam[j] for j in range(n) if j not in used]
    uu = extend_recurrence_exact(p, n)
    if any(_abs2(w[j] - uu[j]) >= eps * eps for j in range(m)):
        raise HypothesisViolated("initial values differ by at least eps")
    e_prime = qqi_poly_from_roots(e_prime_roots)
    if any(_abs2(x) >= eps * eps for x in _defects(uu, e_prime, m, n)):
        raise HypothesisViolated("c's sequence does not nearly satisfy the e' recurrence")
    e_poly = qqi_poly_from_roots(er)
    ext = recurrence_extend(e_poly[:-1], list(w), n) if m else [QQ_I.zero] * (n + 1)
    u_new = ext[:n]
    result = _problem(list(er) + rest, u_new)
    measured = spectral_distance_upper(list(e_prime_roots) + rest, uu[:n], list(er) + rest, u_new)
    # envelope: eps_j <= eps + m |e'| eps_{j-1} + m |u~| |e' - e|
    ne = _norm_upper(e_prime[:-1])
    nu = _norm_upper(ext[: n + 1])
    diff = _norm_upper([a - b for a, b in zip(e_prime[:-1], e_poly[:-1])])
    E = eps
    for _ in range(m, n + 1):
        E = max(E, eps + m * ne * E + m * nu * diff)
    return Simplification(result, measured, eps + E)


def perturb_to_simpler(p: CauchyProblem, e: CauchyProblem, eps: Any) -> CauchyProblem:
    return perturb_to_simpler_report(p, e, eps).problem


# ---------------------------------------------------------------------------
# one-step defect inequalities


def _max_abs(vals: Sequence[Fraction]) -> Fraction:
    return max((abs(v) for v in vals), default=Fraction(0))


def check_root_addition_defect(c: Sequence, u: Sequence, alpha: Any) -> bool:
    """Adding a root ``alpha`` multiplies the recurrence defect by at most ``1 + |alpha|``.

    ``c`` are real coefficients (ascending, monic omitted), ``u`` a real sequence
    with at least ``len(c) + 2`` terms.
    """
    c = [Fraction(x) for x in c]
    u = [Fraction(x) for x in u]
    alpha = Fraction(alpha)
    n = len(c)
    chi_c = c + [Fraction(1)]
    chi_d = [-alpha * chi_c[0]] + [chi_c[i - 1] - alpha * chi_c[i] for i in range(1, n + 1)] + [Fraction(1)]
    dc = _defects(u, chi_c, n, len(u) - 1)
    dd = _defects(u, chi_d, n + 1, len(u) - 1)
    return _max_abs(dd) <= (1 + abs(alpha)) * _max_abs(dc)


def check_root_elimination_defect(alpha: Any, beta: Any, lams: Sequence, u: Sequence) -> bool:
    """With ``chi_c = (z-alpha) P``, ``chi_d = (z-beta) P``: the ``P``-defect is at most
    ``(eps + delta) / |alpha - beta|``."""
    alpha, beta = Fraction(alpha), Fraction(beta)
    if alpha == beta:
        raise ValueError("alpha and beta must differ")
    lams = [Fraction(x) for x in lams]
    u = [Fraction(x) for x in u]
    n = len(lams) + 1
    if len(u) < n + 1:
        raise ValueError("need u_0..u_n")
    P = _real_poly(lams)
    chi_c = _real_poly(lams + [alpha])
    chi_d = _real_poly(lams + [beta])
    eps = abs(_defects(u, chi_c, n, n)[0])
    delta = abs(_defects(u, chi_d, n, n)[0])
    e0 = abs(_defects(u, P, n - 1, n - 1)[0])
    return e0 * abs(alpha - beta) <= eps + delta


def _real_poly(roots: Sequence[Fraction]) -> list[Fraction]:
    poly = [Fraction(1)]
    for r in roots:
        nxt = [Fraction(0)] * (len(poly) + 1)
        for k, a in enumerate(poly):
            nxt[k + 1] += a
            nxt[k] -= r * a
        poly = nxt
    return poly


# ---------------------------------------------------------------------------
# boundary families


KINDS = ("shared-dominant-coefficient", "identically-equal", "zero-complex-coefficient")


@dataclass(frozen=True)
class FamilyMember:
    k: int
    boundary: tuple[CauchyProblem, CauchyProblem]
    yes: tuple[CauchyProblem, CauchyProblem]
    no: tuple[CauchyProblem, CauchyProblem]
    # further labelled pairs that still sit on the boundary (informational)
    on_boundary: dict = field(default_factory=dict)


@dataclass(frozen=True)
class InstanceFamily:
    kind: str
    make: Callable[[int], FamilyMember]

    def member(self, k: int) -> FamilyMember:
        mem = self.make(k)
        if oracle_eventual_compare(*mem.yes) is not Comparison.GE:
            raise AssertionError(f"{self.kind}: yes-perturbation not GE at k={k}")
        if oracle_eventual_compare(*mem.no) is not Comparison.NOT_GE:
            raise AssertionError(f"{self.kind}: no-perturbation not NOT_GE at k={k}")
        return mem

    def boundary(self) -> tuple[CauchyProblem, CauchyProblem]:
        return self.make(1).boundary


def _shared_dominant(k: int) -> FamilyMember:
    h = Fraction(1, 2**k)
    f = _problem([1, -1], [2, 0])
    g = _problem([1], [1])
    return FamilyMember(
        k,
        (f, g),
        (f, _problem([1 - h], [1])),
        (f, _problem([1 + h], [1])),
        {"value-shift-down": (f, _problem([1], [1 - h])), "value-shift-up": (f, _problem([1], [1 + h]))},
    )


def _identically_equal(k: int) -> FamilyMember:
    h = Fraction(1, 2**k)
    g = _problem([1], [1])
    return FamilyMember(
        k,
        (_problem([1, 2], [1, 1]), g),
        (_problem([1, 2], [1, 1 + h]), g),
        (_problem([1, 2], [1, 1 - h]), g),
    )


def _zero_complex(k: int) -> FamilyMember:
    h = Fraction(1, 2**k)
    zero = CauchyProblem.zero()
    return FamilyMember(
        k,
        (_problem([(0, 1), (0, -1), 0], [1, 0, 0]), zero),
        (_problem([(0, 1), (0, -1), h], [1, h, h * h]), zero),
        (_problem([(h, 1), (h, -1), 0], [1, 0, h]), zero),
    )


def make_boundary_family(kind: str) -> InstanceFamily:
    table = {
        "shared-dominant-coefficient": _shared_dominant,
        "identically-equal": _identically_equal,
        "zero-complex-coefficient": _zero_complex,
    }
    if kind not in table:
        raise ValueError(f"unknown family {kind!r}; choose from {', '.join(KINDS)}")
    return InstanceFamily(kind, table[kind])
