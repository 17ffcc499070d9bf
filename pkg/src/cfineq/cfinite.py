"""Cauchy problems for constant-coefficient linear ODEs and their solutions.

A problem of order ``n`` is ``f^(n) + c[n-1] f^(n-1) + ... + c[0] f = 0`` with
``f^(k)(0) = u[k]``.  Its derivative sequence at 0 is the linear recurrence
``u[j] = -c[n-1] u[j-1] - ... - c[0] u[j-n]``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Optional, Sequence

from sympy.polys.domains import QQ_I

from .poly import CharPoly, RootList
from .realnum import (
    CFineqError,
    ComplexBall,
    ComplexName,
    Dyadic,
    NameLike,
    PrecisionExhausted,
    RealName,
    as_name,
    exact_value,
    name_to_ball,
    working_precision,
)
from .vandermonde import build_vandermonde, gauss_solve, mat_vec


class OracleInapplicable(CFineqError):
    """The exact comparison oracle cannot classify this instance."""


# ---------------------------------------------------------------------------
# exact Gaussian rationals


def qqi(x: Any) -> Any:
    """Convert an exact scalar (int, Fraction, (re, im) pair, Gaussian rational) to ``QQ_I``."""
    if hasattr(x, "x") and hasattr(x, "y"):
        return x
    if isinstance(x, tuple):
        re, im = Fraction(x[0]), Fraction(x[1])
    else:
        re, im = Fraction(x), Fraction(0)
    return QQ_I.new(QQ_I.dom.convert_from(_qq(re), QQ_I.dom), QQ_I.dom.convert_from(_qq(im), QQ_I.dom))


def _qq(q: Fraction):
    from sympy.polys.domains import QQ

    return QQ(q.numerator, q.denominator)


def qqi_parts(z: Any) -> tuple[Fraction, Fraction]:
    return Fraction(int(z.x.numerator), int(z.x.denominator)), Fraction(int(z.y.numerator), int(z.y.denominator))


def qqi_is_zero(z: Any) -> bool:
    return not z.x and not z.y


def qqi_to_name(z: Any) -> NameLike:
    re, im = qqi_parts(z)
    if im == 0:
        return RealName.rational(re)
    return ComplexName(RealName.rational(re), RealName.rational(im))


def qqi_poly_from_roots(roots: Sequence[Any]) -> list[Any]:
    """Ascending coefficients of ``prod (z - r)`` including the leading 1."""
    poly = [QQ_I.one]
    for r in roots:
        nxt = [QQ_I.zero] * (len(poly) + 1)
        for k, a in enumerate(poly):
            nxt[k + 1] += a
            nxt[k] -= r * a
        poly = nxt
    return poly


def group_exact_roots(roots: Sequence[Any]) -> list[tuple[Any, int]]:
    out: list[list] = []
    for r in roots:
        for g in out:
            if qqi_is_zero(g[0] - r):
                g[1] += 1
                break
        else:
            out.append([r, 1])
    return [(r, k) for r, k in out]


# ---------------------------------------------------------------------------
# problems


@dataclass(frozen=True)
class CauchyProblem:
    """Coefficients ``c[0..n-1]`` and initial values ``u[0..n-1]`` given as names.

    ``roots`` optionally records the exact characteristic roots (as Gaussian
    rationals, with multiplicity) for instances built from known roots.
    """

    coefficients: tuple[NameLike, ...]
    initial: tuple[NameLike, ...]
    roots: Optional[tuple[Any, ...]] = field(default=None, compare=False)

    def __post_init__(self) -> None:
        if len(self.coefficients) != len(self.initial):
            raise ValueError("coefficient and initial-value counts differ")
        if self.roots is not None and len(self.roots) != len(self.coefficients):
            raise ValueError("root count does not match the order")

    @property
    def n(self) -> int:
        return len(self.coefficients)

    @classmethod
    def zero(cls) -> "CauchyProblem":
        return cls((), (), ())

    @classmethod
    def of(cls, coefficients: Sequence, initial: Sequence) -> "CauchyProblem":
        """Build from exact values or names."""
        return cls(tuple(_name(c) for c in coefficients), tuple(_name(u) for u in initial))

    @classmethod
    def from_roots(cls, roots: Sequence, initial: Sequence) -> "CauchyProblem":
        """Problem with characteristic roots ``roots`` (exact, with multiplicity)."""
        rs = tuple(qqi(r) for r in roots)
        poly = qqi_poly_from_roots(rs)
        coeffs = tuple(qqi_to_name(c) for c in poly[:-1])
        return cls(coeffs, tuple(_name(u) for u in initial), rs)

    def is_real(self) -> bool:
        return all(isinstance(x, RealName) for x in self.coefficients + self.initial)

    def exact_coefficients(self) -> Optional[list[Any]]:
        vals = [exact_value(c) for c in self.coefficients]
        if any(v is None for v in vals):
            return None
        return [qqi(v) for v in vals]

    def exact_initial(self) -> Optional[list[Any]]:
        vals = [exact_value(u) for u in self.initial]
        if any(v is None for v in vals):
            return None
        return [qqi(v) for v in vals]

    def char_poly(self, p: int) -> CharPoly:
        return CharPoly(tuple(name_to_ball(c, p) for c in self.coefficients))

    def initial_balls(self, p: int) -> list[ComplexBall]:
        return [name_to_ball(u, p) for u in self.initial]

    def with_initial(self, initial: Sequence) -> "CauchyProblem":
        return CauchyProblem(self.coefficients, tuple(_name(u) for u in initial), self.roots)


def _name(x: Any) -> NameLike:
    if isinstance(x, (RealName, ComplexName)):
        return x
    if hasattr(x, "x") and hasattr(x, "y"):
        return qqi_to_name(x)
    if isinstance(x, tuple):
        re, im = Fraction(x[0]), Fraction(x[1])
        return ComplexName(RealName.rational(re), RealName.rational(im)) if im else RealName.rational(re)
    return as_name(x)


# ---------------------------------------------------------------------------
# recurrence prefixes


@dataclass(frozen=True)
class RecurrencePrefix:
    values: tuple[ComplexBall, ...]
    generator: CauchyProblem


def recurrence_extend(coeffs: Sequence, initial: Sequence, K: int) -> list:
    """Values ``u[0..K]`` of the recurrence with ascending monic coefficients ``coeffs`` (no leading 1)."""
    n = len(coeffs)
    vals = list(initial[:n])
    if n == 0:
        return [0] * (K + 1)
    while len(vals) <= K:
        k = len(vals)
        acc = -(coeffs[0] * vals[k - n])
        for i in range(1, n):
            acc = acc - coeffs[i] * vals[k - n + i]
        vals.append(acc)
    return vals[: K + 1]


def extend_recurrence(p: CauchyProblem, K: int, M: int) -> RecurrencePrefix:
    """Ball enclosures of ``u[0..K]`` with inputs queried at ``M`` bits."""
    if K < p.n - 1:
        raise ValueError("K must be at least n - 1")
    if p.n == 0:
        return RecurrencePrefix(tuple(ComplexBall(0) for _ in range(K + 1)), p)
    with working_precision(M + 32):
        c = [name_to_ball(x, M) for x in p.coefficients]
        u = p.initial_balls(M)
        vals = recurrence_extend(c, u, K)
    return RecurrencePrefix(tuple(vals), p)


def extend_recurrence_exact(p: CauchyProblem, K: int) -> list[Any]:
    """Exact prefix ``u[0..K]`` as Gaussian rationals (requires exact inputs)."""
    c = p.exact_coefficients()
    u = p.exact_initial()
    if c is None or u is None:
        raise OracleInapplicable("problem has inexact inputs")
    if p.n == 0:
        return [QQ_I.zero] * (K + 1)
    return recurrence_extend(c, u, K)


# ---------------------------------------------------------------------------
# exponential polynomials


@dataclass(frozen=True)
class ExponentialTerm:
    root: Any
    multiplicity: int
    coeffs: tuple[Any, ...]  # coefficient of t**k exp(root t), k < multiplicity


@dataclass(frozen=True)
class ExponentialPolynomial:
    terms: tuple[ExponentialTerm, ...]

    @property
    def order(self) -> int:
        return sum(t.multiplicity for t in self.terms)

    def derivative_at_zero(self, k: int) -> Any:
        """``f^(k)(0) = sum a_{j,i} k!/(k-i)! lam_j^(k-i)``."""
        total = None
        for term in self.terms:
            for i, a in enumerate(term.coeffs):
                if i > k:
                    break
                factor = math.factorial(k) // math.factorial(k - i)
                contrib = a * (term.root ** (k - i)) * factor if k > i else a * factor
                total = contrib if total is None else total + contrib
        return total if total is not None else 0


def solve_exponential(p: CauchyProblem, roots: RootList, M: int) -> ExponentialPolynomial:
    """Solve the confluent Vandermonde system for the coefficients of each root group.

    Identical root balls form one group whose size is the assumed multiplicity.
    Raises :class:`PrecisionExhausted` when the groups overlap or the system
    cannot be solved with certified pivots.
    """
    if p.n == 0:
        return ExponentialPolynomial(())
    if len(roots) != p.n:
        raise ValueError("root list does not match the order")
    groups = roots.clusters()
    balls = [b for b, _ in groups]
    for i in range(len(balls)):
        for j in range(i + 1, len(balls)):
            if balls[i].overlaps(balls[j]):
                raise PrecisionExhausted("root groups overlap")
    sig = [len(idx) for _, idx in groups]
    with working_precision(M + 32):
        u = p.initial_balls(M)
        V = build_vandermonde(sig, balls, modified=True)
        a = gauss_solve(V, u)
        resid = mat_vec(V, a)
        for r, target in zip(resid, u):
            if not (r - target).contains_zero():
                raise PrecisionExhausted("residual check failed")
    terms = []
    pos = 0
    for ball, k in zip(balls, sig):
        terms.append(ExponentialTerm(ball, k, tuple(a[pos: pos + k])))
        pos += k
    return ExponentialPolynomial(tuple(terms))


def solve_exponential_exact(p: CauchyProblem) -> ExponentialPolynomial:
    """Exact solution for problems built from known roots."""
    if p.n == 0:
        return ExponentialPolynomial(())
    if p.roots is None:
        raise OracleInapplicable("roots are not exactly known")
    u = p.exact_initial()
    if u is None:
        raise OracleInapplicable("initial values are not exact")
    groups = group_exact_roots(p.roots)
    V = build_vandermonde([k for _, k in groups], [r for r, _ in groups], modified=True)
    a = gauss_solve(V, u)
    terms, pos = [], 0
    for r, k in groups:
        terms.append(ExponentialTerm(r, k, tuple(a[pos: pos + k])))
        pos += k
    return ExponentialPolynomial(tuple(terms))


def ball_exp(z: ComplexBall, M: int) -> ComplexBall:
    """Enclosure of ``exp(z)``: argument halving, Taylor series with tail bound, squaring."""
    z = ComplexBall.coerce(z)
    mag = z.mag_upper()
    s = max(0, mag.top() + 2)
    prec = M + 2 * s + 24
    with working_precision(prec):
        w = z.mul_pow2(-s) if s else z
        # |w| <= 1/2: tail after K terms is at most 2 |w|^K / K!
        K = prec // 2 + 4
        term = ComplexBall(1)
        total = ComplexBall(1)
        for k in range(1, K):
            term = term * w / k
            total = total + term
        wmag = w.mag_upper().to_fraction()
        tail = 2 * wmag**K / math.factorial(K)
        total = total.widen(Dyadic.from_fraction(tail, -prec - 8, "ceil") + Dyadic(1, -prec - 8))
        for _ in range(s):
            total = total * total
    return total


def eval_solution(e: ExponentialPolynomial, t: Any, M: int) -> ComplexBall:
    """Enclosure of ``sum a_{j,k} t^k exp(lam_j t)``."""
    t = ComplexBall.coerce(t)
    total = ComplexBall(0)
    with working_precision(M + 32):
        for term in e.terms:
            lam = ComplexBall.coerce(term.root)
            ex = ball_exp(lam * t, M + 16)
            poly = ComplexBall(0)
            for a in reversed(term.coeffs):
                poly = poly * t + ComplexBall.coerce(a)
            total = total + poly * ex
    return total


# ---------------------------------------------------------------------------
# exact eventual comparison


class Comparison(enum.Enum):
    GE = "GE-eventually"
    NOT_GE = "Not-GE-eventually"
    EQUAL = "Identically-equal"


def difference_terms(p: CauchyProblem, q: CauchyProblem) -> list[tuple[Any, list[Any]]]:
    """Exact coefficient polynomials of ``f - g`` per distinct root (zero ones dropped)."""
    fp = solve_exponential_exact(p)
    gp = solve_exponential_exact(q)
    table: list[list] = []

    def add(root: Any, coeffs: Sequence[Any], sign: int) -> None:
        for entry in table:
            if qqi_is_zero(entry[0] - root):
                tgt = entry[1]
                break
        else:
            tgt = []
            table.append([root, tgt])
        while len(tgt) < len(coeffs):
            tgt.append(QQ_I.zero)
        for i, a in enumerate(coeffs):
            tgt[i] = tgt[i] + a if sign > 0 else tgt[i] - a

    for t in fp.terms:
        add(t.root, t.coeffs, 1)
    for t in gp.terms:
        add(t.root, t.coeffs, -1)
    out = []
    for root, coeffs in table:
        while coeffs and qqi_is_zero(coeffs[-1]):
            coeffs.pop()
        if coeffs:
            out.append((root, coeffs))
    return out


def oracle_eventual_compare(p: CauchyProblem, q: CauchyProblem) -> Comparison:
    """Ground truth for ``f(t) >= g(t)`` for all large ``t`` on instances with known roots.

    Among the roots of maximal real part carrying a nonzero coefficient, the
    highest power of ``t`` decides.  A real root alone decides by the sign of
    its coefficient; nonreal roots alone force sign changes.  When both occur
    at the top power, the real coefficient is compared with the oscillation
    amplitude where that is conclusive.
    """
    terms = difference_terms(p, q)
    if not terms:
        return Comparison.EQUAL
    top_re = max(qqi_parts(r)[0] for r, _ in terms)
    dominant = [(r, c) for r, c in terms if qqi_parts(r)[0] == top_re]
    D = max(len(c) - 1 for _, c in dominant)
    lead = [(r, c[D]) for r, c in dominant if len(c) - 1 == D]
    real_lead = [a for r, a in lead if qqi_parts(r)[1] == 0]
    osc = [a for r, a in lead if qqi_parts(r)[1] != 0]
    if not osc:
        re, im = qqi_parts(real_lead[0])
        if im != 0:
            raise OracleInapplicable("real root with nonreal coefficient (complex input)")
        return Comparison.GE if re > 0 else Comparison.NOT_GE
    if not real_lead:
        return Comparison.NOT_GE
    a = qqi_parts(real_lead[0])[0]
    if a <= 0:
        return Comparison.NOT_GE
    amplitude = sum(abs(qqi_parts(c)[0]) + abs(qqi_parts(c)[1]) for c in osc)
    if amplitude < a:
        return Comparison.GE
    raise OracleInapplicable("real and oscillating terms share the top growth rate")
