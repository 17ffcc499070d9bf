"""Monic polynomials with ball coefficients, certified root enclosures, spectral distance."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

import mpmath
import networkx as nx
from networkx.algorithms import bipartite

from .realnum import (
    CFineqError,
    ComplexBall,
    Dyadic,
    PrecisionExhausted,
    ZERO,
    abs_lower,
    abs_upper,
    ball_sqrt_upper,
    hull,
    working_precision,
)


class LengthMismatch(CFineqError, ValueError):
    """Two root lists (or vectors) that must have equal length do not."""


@dataclass(frozen=True)
class CharPoly:
    """``z**n + c[n-1] z**(n-1) + ... + c[0]`` with ball coefficients."""

    coeffs: tuple[ComplexBall, ...]

    @classmethod
    def from_coefficients(cls, coeffs: Sequence) -> "CharPoly":
        return cls(tuple(ComplexBall.coerce(c) for c in coeffs))

    @property
    def degree(self) -> int:
        return len(self.coeffs)

    @property
    def real(self) -> bool:
        return all(c.im.mantissa == 0 for c in self.coeffs)

    def full(self) -> list[ComplexBall]:
        """Ascending coefficient list including the leading 1."""
        return list(self.coeffs) + [ComplexBall(1)]

    def __call__(self, z) -> ComplexBall:
        z = ComplexBall.coerce(z)
        acc = ComplexBall(1)
        for c in reversed(self.coeffs):
            acc = acc * z + c
        return acc

    def max_norm_upper(self) -> Dyadic:
        return max((c.mag_upper() for c in self.coeffs), default=ZERO)

    def __mul__(self, other: "CharPoly") -> "CharPoly":
        a, b = self.full(), other.full()
        out = [ComplexBall(0)] * (len(a) + len(b) - 1)
        for i, x in enumerate(a):
            for j, y in enumerate(b):
                out[i + j] = out[i + j] + x * y
        return CharPoly(tuple(out[:-1]))


def from_roots(roots: Sequence) -> CharPoly:
    """Expand ``prod (z - r)`` by Vieta's formulas."""
    poly = [ComplexBall(1)]
    for r in roots:
        r = ComplexBall.coerce(r)
        nxt = [ComplexBall(0)] * (len(poly) + 1)
        for k, a in enumerate(poly):
            nxt[k + 1] = nxt[k + 1] + a
            nxt[k] = nxt[k] - r * a
        poly = nxt
    return CharPoly(tuple(poly[:-1]))


@dataclass(frozen=True)
class RootList:
    """Root balls listed with multiplicity plus a conjugation pairing.

    ``pairing[i]`` is the index of the mirror image of ``roots[i]``; it is
    ``None`` when the polynomial is not known to be real.
    """

    roots: tuple[ComplexBall, ...]
    pairing: Optional[tuple[int, ...]] = None

    def __len__(self) -> int:
        return len(self.roots)

    def __iter__(self):
        return iter(self.roots)

    def __getitem__(self, i: int) -> ComplexBall:
        return self.roots[i]

    def clusters(self) -> list[tuple[ComplexBall, list[int]]]:
        """Group indices whose balls are identical (same certified disk)."""
        groups: list[tuple[ComplexBall, list[int]]] = []
        for i, r in enumerate(self.roots):
            for ball, idx in groups:
                if _same_ball(ball, r):
                    idx.append(i)
                    break
            else:
                groups.append((r, [i]))
        return groups


def _same_ball(a: ComplexBall, b: ComplexBall) -> bool:
    return a.re == b.re and a.im == b.im and a.rad == b.rad


# ---------------------------------------------------------------------------
# numerical approximation


def _mpc_coeffs(p: CharPoly) -> list:
    # exact conversion: mpmath rounds to its working precision on construction
    bits = max(max(abs(c.re.mantissa).bit_length(), abs(c.im.mantissa).bit_length()) for c in p.full())
    with mpmath.workprec(bits + 8):
        return [mpmath.mpc(_mpf(c.re), _mpf(c.im)) for c in p.full()]


def _mpf(d: Dyadic):
    return mpmath.mpf((d.mantissa, d.exponent)) if d.mantissa else mpmath.mpf(0)


def _horner(coeffs: list, z):
    p = coeffs[-1]
    dp = mpmath.mpc(0)
    for c in reversed(coeffs[:-1]):
        dp = dp * z + p
        p = p * z + c
    return p, dp


def _aberth(coeffs: list, seeds: Optional[list], prec: int, maxiter: int) -> list:
    n = len(coeffs) - 1
    with mpmath.workprec(prec):
        cs = [mpmath.mpc(c) for c in coeffs]
        if seeds is None or len(seeds) != n:
            bound = 1 + max(abs(c) for c in cs[:-1])
            seeds = [
                bound * 0.5 * mpmath.expj(2 * mpmath.pi * k / n + 0.4) + (-cs[-2] / n)
                for k in range(n)
            ]
        z = [mpmath.mpc(s) for s in seeds]
        eps = mpmath.ldexp(1, -prec + 4)
        for _ in range(maxiter):
            moved = False
            for i in range(n):
                p, dp = _horner(cs, z[i])
                if p == 0:
                    continue
                s = mpmath.mpc(0)
                for j in range(n):
                    if j != i:
                        diff = z[i] - z[j]
                        if diff == 0:
                            diff = eps
                        s += 1 / diff
                if dp == 0:
                    dp = eps
                ratio = p / dp
                denom = 1 - ratio * s
                w = ratio / denom if denom != 0 else ratio
                z[i] -= w
                if abs(w) > eps * (1 + abs(z[i])):
                    moved = True
            if not moved:
                break
        return z


def _derivative(coeffs: list, k: int) -> list:
    out = list(coeffs)
    for _ in range(k):
        out = [out[i] * i for i in range(1, len(out))]
    return out


def _newton(coeffs: list, z0, prec: int, iters: int = 200):
    with mpmath.workprec(prec):
        cs = [mpmath.mpc(c) for c in coeffs]
        z = mpmath.mpc(z0)
        tol = mpmath.ldexp(1, -prec + 8)
        for _ in range(iters):
            p, dp = _horner(cs, z)
            if p == 0 or dp == 0:
                break
            step = p / dp
            z -= step
            if abs(step) <= tol * (1 + abs(z)):
                break
        return z


def _to_dyadic(x, exponent: int) -> Dyadic:
    # round the exact binary value of x to a multiple of 2**exponent (no mpmath rounding)
    sign, man, exp, _ = x._mpf_
    if not man:
        return Dyadic(0)
    v = Dyadic(-int(man) if sign else int(man), int(exp))
    return v.round(exponent, "nearest")


# ---------------------------------------------------------------------------
# certification


def taylor_shift(p: CharPoly, c: ComplexBall) -> list[ComplexBall]:
    """Coefficients of ``p(c + z)`` in ascending order."""
    a = p.full()
    n = len(a) - 1
    a = list(a)
    for i in range(n):
        for j in range(n - 1, i - 1, -1):
            a[j] = a[j] + c * a[j + 1]
    return a


def pellet_holds(b: Sequence[ComplexBall], k: int, r: Dyadic) -> bool:
    """Certified ``|b_k| r^k > sum_{j != k} |b_j| r^j`` for every polynomial in the family."""
    lhs = b[k].mag_lower()
    if lhs.mantissa == 0:
        return False
    rhs = ZERO
    rp = Dyadic(1)
    for j, bj in enumerate(b):
        if j == k:
            lhs = lhs * rp
        else:
            rhs = rhs + bj.mag_upper() * rp
        rp = rp * r
    return lhs > rhs


def _certify_cluster(p: CharPoly, center: ComplexBall, k: int, M: int) -> Optional[ComplexBall]:
    with working_precision(None):
        b = taylor_shift(p, center)
        for extra in (3, 2, 1):
            r = Dyadic(1, -(M + extra))
            if pellet_holds(b, k, r):
                return ComplexBall(center.re, center.im, r)
    return None


def _clusterings(approx: list) -> list[list[list[int]]]:
    """Single-linkage clusterings for increasing thresholds."""
    n = len(approx)
    edges = sorted(
        (abs(approx[i] - approx[j]), i, j) for i in range(n) for j in range(i + 1, n)
    )
    parent = list(range(n))

    def find(i: int) -> int:
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    def snapshot() -> list[list[int]]:
        groups: dict[int, list[int]] = {}
        for i in range(n):
            groups.setdefault(find(i), []).append(i)
        return sorted(groups.values())

    out = [snapshot()]
    idx = 0
    while idx < len(edges):
        d = edges[idx][0]
        changed = False
        while idx < len(edges) and edges[idx][0] <= d:
            _, i, j = edges[idx]
            ri, rj = find(i), find(j)
            if ri != rj:
                parent[ri] = rj
                changed = True
            idx += 1
        if changed:
            out.append(snapshot())
    return out


def _disjoint_all(disks: list[ComplexBall]) -> bool:
    for i in range(len(disks)):
        for j in range(i + 1, len(disks)):
            if disks[i].overlaps(disks[j]):
                return False
    return True


def _try_certify(p: CharPoly, approx: list, M: int) -> Optional[list[tuple[ComplexBall, int]]]:
    coeffs = _mpc_coeffs(p)
    for groups in _clusterings(approx):
        disks: list[tuple[ComplexBall, int]] = []
        ok = True
        for g in groups:
            k = len(g)
            prec = k * (M + 16) + 64
            with mpmath.workprec(prec):
                z0 = sum((approx[i] for i in g), mpmath.mpc(0)) / k
            z = _newton(_derivative(coeffs, k - 1), z0, prec) if k <= len(coeffs) - 1 else z0
            exp = -(prec - 8)
            center = ComplexBall(_to_dyadic(z.real, exp), _to_dyadic(z.imag, exp))
            disk = _certify_cluster(p, center, k, M)
            if disk is None:
                ok = False
                break
            disks.append((disk, k))
        if ok and _disjoint_all([d for d, _ in disks]):
            return disks
    return None


def _merge_overlapping(disks: list[tuple[ComplexBall, int]]) -> list[tuple[ComplexBall, int]]:
    while True:
        n = len(disks)
        g = nx.Graph()
        g.add_nodes_from(range(n))
        for i in range(n):
            for j in range(i + 1, n):
                if disks[i][0].overlaps(disks[j][0]):
                    g.add_edge(i, j)
        comps = [sorted(c) for c in nx.connected_components(g)]
        if all(len(c) == 1 for c in comps):
            return disks
        disks = [
            (hull([disks[i][0] for i in c]), sum(disks[i][1] for i in c)) for c in sorted(comps)
        ]


def _symmetrize(disks: list[tuple[ComplexBall, int]]) -> list[tuple[ComplexBall, int]]:
    """Make the disk multiset invariant under complex conjugation."""
    out: list[tuple[ComplexBall, int]] = []
    upper: list[tuple[ComplexBall, int]] = []
    lower: list[tuple[ComplexBall, int]] = []
    for d, k in disks:
        if abs(d.im) <= d.rad:
            out.append((ComplexBall(d.re, 0, d.rad + abs(d.im)), k))
        elif d.im.mantissa > 0:
            upper.append((d, k))
        else:
            lower.append((d, k))
    used = set()
    for d, k in upper:
        partner = None
        for j, (e, kk) in enumerate(lower):
            if j not in used and kk == k and d.overlaps(e.conj()):
                partner = j
                break
        if partner is None:
            raise PrecisionExhausted("root disks could not be conjugate-paired")
        used.add(partner)
        h = hull([d, lower[partner][0].conj()])
        out.append((h, k))
        out.append((h.conj(), k))
    if len(used) != len(lower):
        raise PrecisionExhausted("root disks could not be conjugate-paired")
    merged = _merge_overlapping(out)
    # merging mirrored groups keeps mirror symmetry; snap any hull that became self-conjugate
    fixed = []
    for d, k in merged:
        if d.im.mantissa and abs(d.im) <= d.rad:
            d = ComplexBall(d.re, 0, d.rad + abs(d.im))
        fixed.append((d, k))
    return _merge_overlapping(fixed) if len(fixed) > 1 else fixed


def _pairing(roots: list[ComplexBall]) -> tuple[int, ...]:
    pairing = [-1] * len(roots)
    for i, r in enumerate(roots):
        if pairing[i] >= 0:
            continue
        if r.im.mantissa == 0:
            pairing[i] = i
            continue
        for j in range(len(roots)):
            if j != i and pairing[j] < 0 and _same_ball(roots[j], r.conj()):
                pairing[i], pairing[j] = j, i
                break
        else:
            raise PrecisionExhausted("conjugate pairing failed")
    return tuple(pairing)


def find_roots(p: CharPoly, M: int, seeds: Optional[list] = None, real: Optional[bool] = None) -> RootList:
    """Certified disks of radius at most ``2**-M`` covering every root of ``p``.

    Each disk is listed once per root it contains.  For real polynomials the
    output is closed under conjugation.  Raises :class:`PrecisionExhausted`
    when the coefficient balls are too wide to certify at ``M`` bits.
    """
    n = p.degree
    if real is None:
        real = p.real
    if n == 0:
        return RootList((), () if real else None)
    coeffs = _mpc_coeffs(p)
    limit = n * (M + 16) + 128
    prec = 80
    approx = seeds
    disks = None
    while True:
        approx = _aberth(coeffs, approx, prec, maxiter=60 + 4 * n + prec // 8)
        disks = _try_certify(p, approx, M)
        if disks is not None or prec >= limit:
            break
        prec = min(2 * prec, limit)
    if disks is None:
        raise PrecisionExhausted(f"root certification failed at {M} bits")
    if real:
        disks = _symmetrize(disks)
    else:
        disks = _merge_overlapping(disks)
    bound = Dyadic(1, -M)
    if any(d.rad > bound for d, _ in disks):
        raise PrecisionExhausted(f"root disks wider than 2^-{M}")
    disks.sort(key=lambda dk: (-dk[0].re.to_fraction(), -dk[0].im.to_fraction()))
    roots = [d for d, k in disks for _ in range(k)]
    return RootList(tuple(roots), _pairing(roots) if real else None)


# ---------------------------------------------------------------------------
# spectral distance


@dataclass(frozen=True)
class SpectralMetric:
    """Bottleneck matching value (a real ball) and the matching ``a[j] <-> b[matching[j]]``."""

    value: ComplexBall
    matching: tuple[int, ...]


def _sq_dist(a: ComplexBall, b: ComplexBall) -> Dyadic:
    dr = a.re - b.re
    di = a.im - b.im
    return dr * dr + di * di


def bottleneck_matching(cost: list[list], threshold_key=None) -> tuple[object, tuple[int, ...]]:
    """Minimise the largest matched entry of a square cost matrix.

    Returns ``(value, perm)`` with ``perm[i]`` the column matched to row ``i``.
    """
    n = len(cost)
    if n == 0:
        return None, ()
    values = sorted({v for row in cost for v in row})
    lo, hi = 0, len(values) - 1
    best = None
    while lo <= hi:
        mid = (lo + hi) // 2
        t = values[mid]
        g = nx.Graph()
        left = [("a", i) for i in range(n)]
        g.add_nodes_from(left, bipartite=0)
        g.add_nodes_from((("b", j) for j in range(n)), bipartite=1)
        g.add_edges_from((("a", i), ("b", j)) for i in range(n) for j in range(n) if cost[i][j] <= t)
        m = bipartite.hopcroft_karp_matching(g, top_nodes=left)
        if sum(1 for k in m if k[0] == "a") == n:
            best = (t, tuple(m[("a", i)][1] for i in range(n)))
            hi = mid - 1
        else:
            lo = mid + 1
    assert best is not None
    return best


def _sqrt_bounds(x: Dyadic) -> tuple[Dyadic, Dyadic]:
    hi = ball_sqrt_upper(x)
    if x.mantissa == 0:
        return ZERO, ZERO
    m, e = x.mantissa, x.exponent
    if e % 2:
        m <<= 1
        e -= 1
    m <<= 64
    e -= 64
    import math

    return Dyadic(math.isqrt(m), e // 2), hi


def spectral_distance(a: Sequence[ComplexBall] | RootList, b: Sequence[ComplexBall] | RootList) -> SpectralMetric:
    """Certified ``min over permutations of max |a_j - b_pi(j)|``."""
    a = list(a)
    b = list(b)
    if len(a) != len(b):
        raise LengthMismatch(f"{len(a)} roots vs {len(b)} roots")
    if not a:
        return SpectralMetric(ComplexBall(0), ())
    cost = [[_sq_dist(x, y) for y in b] for x in a]
    sq, perm = bottleneck_matching(cost)
    lo, hi = _sqrt_bounds(sq)
    slack = max(x.rad for x in a) + max(y.rad for y in b)
    lo, hi = lo - slack, hi + slack
    center = (lo + hi).shift(-1)
    rad = (hi - lo).shift(-1)
    return SpectralMetric(ComplexBall(center, 0, rad), perm)


def spectral_distance_bruteforce(a: Sequence, b: Sequence) -> Fraction:
    """Exact squared bottleneck value over all permutations (small inputs)."""
    a = [ComplexBall.coerce(x) for x in a]
    b = [ComplexBall.coerce(y) for y in b]
    if len(a) != len(b):
        raise LengthMismatch("length mismatch")
    best = None
    for perm in itertools.permutations(range(len(b))):
        v = max((_sq_dist(a[i], b[perm[i]]) for i in range(len(a))), default=ZERO)
        if best is None or v < best:
            best = v
    return best.to_fraction() if best is not None else Fraction(0)


# ---------------------------------------------------------------------------
# coefficient perturbation versus root perturbation


def check_spectral_vs_coefficient_bound(c: Sequence, c2: Sequence, max_bits: int = 4096) -> bool:
    """Whether ``d_sigma(c, c2) >= |c - c2|_inf / (n*K)**(2n)`` with ``K`` the larger max-norm.

    Inputs are exact rational coefficient vectors of equal length.  The
    comparison is made with certified root balls, raising precision until the
    answer is decided.
    """
    c = [Fraction(x) for x in c]
    c2 = [Fraction(x) for x in c2]
    if len(c) != len(c2):
        raise LengthMismatch("coefficient vectors differ in length")
    if c == c2:
        raise ValueError("the two coefficient vectors must differ")
    n = len(c)
    d = max(abs(x - y) for x, y in zip(c, c2))
    K = max(max(abs(x) for x in c), max(abs(x) for x in c2))
    rhs = d / (n * K) ** (2 * n) if K else None
    if n == 1:
        # linear case: the roots -c0 and -c0' are exact, so decide exactly
        return rhs is None or abs(c[0] - c2[0]) >= rhs
    M = 32
    while M <= max_bits:
        try:
            with working_precision(None):
                ra = find_roots(CharPoly.from_coefficients(c), M)
                rb = find_roots(CharPoly.from_coefficients(c2), M)
        except PrecisionExhausted:
            M *= 2
            continue
        val = spectral_distance(ra, rb).value
        if rhs is None:  # K == 0 cannot happen for distinct vectors
            return True
        lo = val.re_lower().to_fraction()
        hi = val.re_upper().to_fraction()
        if lo >= rhs:
            return True
        if hi < rhs:
            return False
        M *= 2
    raise PrecisionExhausted("could not decide the spectral/coefficient inequality")
