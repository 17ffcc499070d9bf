"""Confluent Vandermonde matrices, their minors, and the leading-coefficient functions.

All routines are generic over the scalar type: they work for
:class:`~cfineq.realnum.ComplexBall`, :class:`fractions.Fraction` and exact
Gaussian rationals alike.  Only ring operations are used except in
:func:`f_function` and :func:`gauss_solve`.

Notation: ``Q(l, m, i)`` at a point ``(X1, ..., Xl)`` is the complete
homogeneous symmetric polynomial of degree ``m`` in ``X1`` (taken ``i + 1``
times), ``X2``, ..., ``Xl``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Any, Sequence

from .realnum import CFineqError, ComplexBall, PrecisionExhausted


class SingularDenominator(CFineqError, ZeroDivisionError):
    """A trailing root cannot be separated from the distinguished root."""


@dataclass(frozen=True)
class Signature:
    multiplicities: tuple[int, ...]

    def __post_init__(self) -> None:
        if not self.multiplicities or any(m < 1 for m in self.multiplicities):
            raise ValueError("multiplicities must be positive")

    @property
    def n(self) -> int:
        return sum(self.multiplicities)

    @property
    def m1(self) -> int:
        return self.multiplicities[0]


def _zero(x: Any) -> Any:
    return x * 0


def _one(x: Any) -> Any:
    return x * 0 + 1


def _is_zero(x: Any) -> bool:
    """Exact zero test; for balls, whether zero cannot be excluded."""
    if isinstance(x, ComplexBall):
        return x.contains_zero()
    if hasattr(x, "x") and hasattr(x, "y"):  # Gaussian rationals do not compare equal to 0
        return not x.x and not x.y
    return x == 0


# ---------------------------------------------------------------------------
# Q tableau


def q_tableau(point: Sequence, m_max: int, i: int) -> list[list]:
    """``T[l][m] = Q(l, m, i)(point[:l])`` for ``1 <= l <= len(point)``, ``0 <= m <= m_max``.

    Row 0 is unused.  Built from ``Q(1, m, i)(x) = C(m+i, i) x**m`` and
    ``Q(l+1, m, i) = Q(l, m, i) + X_{l+1} Q(l+1, m-1, i)``.
    """
    if not point:
        return [[]]
    x = point[0]
    one = _one(x)
    table: list[list] = [[]]
    row = []
    power = one
    for m in range(m_max + 1):
        row.append(math.comb(m + i, i) * power)
        power = power * x
    table.append(row)
    for ell in range(1, len(point)):
        xn = point[ell]
        prev = table[-1]
        row = [prev[0]]
        for m in range(1, m_max + 1):
            row.append(prev[m] + xn * row[m - 1])
        table.append(row)
    return table


def q_eval(ell: int, m: int, i: int, point: Sequence) -> Any:
    """``Q(ell, m, i)`` at ``point`` (zero for ``m < 0``)."""
    if ell < 1 or len(point) < ell:
        raise ValueError("point must have at least ell entries")
    if m < 0:
        return _zero(point[0])
    return q_tableau(list(point[:ell]), m, i)[ell][m]


def check_q_recursions(point: Sequence, m: int, i: int = 0) -> bool:
    """Check the two difference identities for ``Q`` at ``point = (X1..X_{n+1})``.

    (1) ``Q(n,m,0)(X.., Y) - Q(n,m,0)(X.., Z) = (Y - Z) Q(n+1,m-1,0)(X.., Y, Z)``
        with ``Y = X_n`` and ``Z = X_{n+1}``;
    (2) ``Q(n+1,m,i)(X1..X_{n+1}) - Q(n,m,i+1)(X1..X_n)
        = (X_{n+1} - X1) Q(n+1,m-1,i+1)(X1..X_{n+1})``.
    """
    pts = list(point)
    if len(pts) < 2:
        raise ValueError("need at least two coordinates")
    n = len(pts) - 1
    xs, y, z = pts[: n - 1], pts[n - 1], pts[n]
    lhs1 = q_eval(n, m, 0, xs + [y]) - q_eval(n, m, 0, xs + [z])
    rhs1 = (y - z) * q_eval(n + 1, m - 1, 0, xs + [y, z])
    lhs2 = q_eval(n + 1, m, i, pts) - q_eval(n, m, i + 1, pts[:n])
    rhs2 = (pts[n] - pts[0]) * q_eval(n + 1, m - 1, i + 1, pts)
    return _agree(lhs1, rhs1) and _agree(lhs2, rhs2)


def _agree(a: Any, b: Any) -> bool:
    if isinstance(a, ComplexBall) or isinstance(b, ComplexBall):
        return ComplexBall.coerce(a - b).contains_zero()
    return _is_zero(a - b)


# ---------------------------------------------------------------------------
# matrices


def build_vandermonde(sig: Signature | Sequence[int], lams: Sequence, modified: bool = True) -> list[list]:
    """Confluent Vandermonde matrix; entry ``(p, q)`` of block ``j`` is
    ``C(p-1, q-1) lam_j**(p-q)``, times ``(q-1)!`` when ``modified``."""
    if not isinstance(sig, Signature):
        sig = Signature(tuple(sig))
    if len(lams) != len(sig.multiplicities):
        raise ValueError("one point per block is required")
    n = sig.n
    cols: list[list] = []
    for lam, mult in zip(lams, sig.multiplicities):
        zero = _zero(lam)
        for q in range(1, mult + 1):
            col = []
            for p in range(1, n + 1):
                if p < q:
                    col.append(zero)
                else:
                    coef = math.comb(p - 1, q - 1) * (math.factorial(q - 1) if modified else 1)
                    col.append(coef * lam ** (p - q) if p > q else coef * _one(lam))
            cols.append(col)
    return [[cols[c][r] for c in range(n)] for r in range(n)]


def determinant(a: Sequence[Sequence]) -> Any:
    """Exact determinant by fraction-free elimination (Bareiss) for exact entries,
    cofactor expansion for balls."""
    n = len(a)
    if n == 0:
        return 1
    if isinstance(a[0][0], ComplexBall):
        return _cofactor_det([list(r) for r in a])
    m = [list(r) for r in a]
    sign = 1
    prev = _one(m[0][0])
    for k in range(n - 1):
        if _is_zero(m[k][k]):
            for r in range(k + 1, n):
                if not _is_zero(m[r][k]):
                    m[k], m[r] = m[r], m[k]
                    sign = -sign
                    break
            else:
                return _zero(m[0][0])
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) / prev
        prev = m[k][k]
    return m[n - 1][n - 1] if sign > 0 else -m[n - 1][n - 1]


def _cofactor_det(a: list[list]) -> Any:
    n = len(a)
    if n == 1:
        return a[0][0]
    total = None
    for c in range(n):
        sub = [row[:c] + row[c + 1:] for row in a[1:]]
        term = a[0][c] * _cofactor_det(sub)
        if c % 2:
            term = -term
        total = term if total is None else total + term
    return total


def delete_row_col(a: Sequence[Sequence], j: int, k: int) -> list[list]:
    """Matrix with (1-based) row ``j`` and column ``k`` removed."""
    return [list(row[: k - 1]) + list(row[k:]) for r, row in enumerate(a, start=1) if r != j]


# ---------------------------------------------------------------------------
# minors of V~(m1, 1, ..., 1)


def _h_entries(x: Any, ys: Sequence, m1: int, n: int) -> list[list]:
    """``E[k][d] = h_d(z_0..z_k)`` for the node sequence ``z = (x^(m1-1), ys)``.

    Read from Q tableaux: the first ``m1 - 1`` columns are single-variable
    values ``Q(1, d, k)(x)``, the rest come from the tableau at ``(x, ys)``
    (or at ``ys`` alone when ``m1 = 1``).
    """
    dmax = n
    out: list[list] = []
    if m1 >= 2:
        for k in range(m1 - 1):
            out.append(q_tableau([x], dmax, k)[1])
        if ys:
            tab = q_tableau([x] + list(ys), dmax, m1 - 2)
            for t in range(1, len(ys) + 1):
                out.append(tab[1 + t])
    elif ys:
        tab = q_tableau(list(ys), dmax, 0)
        for t in range(1, len(ys) + 1):
            out.append(tab[t])
    return out


def leading_cofactors(m1: int, n: int, x: Any, ys: Sequence) -> list:
    """``[A_{n,m1,1}, ..., A_{n,m1,n}]`` evaluated at ``(x, ys)``; the last entry is 1."""
    if not 1 <= m1 <= n or len(ys) != n - m1:
        raise ValueError("need 1 <= m1 <= n and n - m1 trailing points")
    ref = x
    one = _one(ref)
    zero = _zero(ref)
    E = _h_entries(x, ys, m1, n)

    def h(k: int, d: int) -> Any:
        if d < 0:
            return zero
        return E[k][d]

    result = []
    for j in range(1, n + 1):
        size = n - j
        # lower Hessenberg block B[a][b] = h_{1+a-b}(z_0..z_{j-1+b}), unit superdiagonal
        dets = [one]
        for k in range(1, size + 1):
            acc = zero
            for i in range(k):
                term = h(j - 1 + i, k - i) * dets[i]
                acc = acc + term if (k - 1 - i) % 2 == 0 else acc - term
            dets.append(acc)
        result.append(dets[size])
    return result


def minor_det(m1: int, j: int, x: Any, ys: Sequence) -> Any:
    """Determinant of ``V~(m1, 1, ..., 1)(x, ys)`` with row ``j`` and column ``m1`` deleted."""
    n = m1 + len(ys)
    if not 1 <= j <= n:
        raise ValueError("row index out of range")
    A = leading_cofactors(m1, n, x, ys)
    scale = _one(x)
    for q in range(1, m1):
        scale = scale * math.factorial(q - 1)
    for i, y in enumerate(ys):
        diff = y - x
        for _ in range(m1 - 1):
            scale = scale * diff
        for yp in ys[:i]:
            scale = scale * (y - yp)
    return scale * A[j - 1]


def g_function(m1: int, n: int, lams: Sequence, u: Sequence) -> Any:
    """``G(m1, n) = sum_j (-1)^(j+m1) A_{n,m1,j} u_{j-1}`` at ``lams = (x, y_1..y_{n-m1})``."""
    if len(u) != n or len(lams) != n - m1 + 1:
        raise ValueError("G expects n initial values and n - m1 + 1 points")
    x, ys = lams[0], list(lams[1:])
    A = leading_cofactors(m1, n, x, ys)
    total = _zero(x) + _zero(u[0])
    for j in range(1, n + 1):
        term = A[j - 1] * u[j - 1]
        total = total + term if (j + m1) % 2 == 0 else total - term
    return total


def g_function_by_expansion(m1: int, n: int, lams: Sequence, u: Sequence) -> Any:
    """Independent evaluation: ``(-1)^(n-m1) sum_k r_k u_k`` with
    ``r(z) = (z - x)^(m1-1) prod (z - y_i)``."""
    x, ys = lams[0], list(lams[1:])
    r = [_one(x)]
    for root in [x] * (m1 - 1) + ys:
        nxt = [_zero(x)] * (len(r) + 1)
        for k, a in enumerate(r):
            nxt[k + 1] = nxt[k + 1] + a
            nxt[k] = nxt[k] - root * a
        r = nxt
    total = _zero(x) + _zero(u[0])
    for k in range(n):
        total = total + r[k] * u[k]
    return total if (n - m1) % 2 == 0 else -total


def collapse_signature(sig: Signature | Sequence[int], lams: Sequence) -> tuple[int, list]:
    """Split trailing blocks into simple points: ``(m1, [lam_1, lam_2 x m2, ...])``."""
    if not isinstance(sig, Signature):
        sig = Signature(tuple(sig))
    if len(lams) != len(sig.multiplicities):
        raise ValueError("one point per block is required")
    pts = [lams[0]]
    for lam, mult in zip(lams[1:], sig.multiplicities[1:]):
        pts.extend([lam] * mult)
    return sig.m1, pts


def f_function(sig: Signature | Sequence[int], lams: Sequence, u: Sequence) -> Any:
    """Coefficient of ``t**(m1-1) exp(lam_1 t)`` in the solution with initial values ``u``."""
    m1, pts = collapse_signature(sig, lams)
    n = len(u)
    if len(pts) != n - m1 + 1:
        raise ValueError("signature does not match the number of initial values")
    x = pts[0]
    denom = _one(x) * math.factorial(m1 - 1)
    for y in pts[1:]:
        d = y - x
        if _is_zero(d):
            raise SingularDenominator("a trailing root meets the distinguished root")
        denom = denom * d
    return g_function(m1, n, pts, u) / denom


def check_cofactor_product_identity(m: int, n1: int, n2: int, lams: Sequence, u: Sequence) -> bool:
    """``G(m, n1)(x, y.., u_ext) == prod_{j>n2} (y_j - x) * G(m, n2)(x, y.., u)``.

    ``lams = (x, y_{m+1}, ..., y_{n1})`` and ``u`` has ``n2`` entries; it is
    extended to ``n1`` entries by the recurrence whose characteristic roots are
    ``x`` (``m`` times) and ``y_{m+1}..y_{n2}``.
    """
    if not m <= n2 <= n1:
        raise ValueError("need m <= n2 <= n1")
    x, ys = lams[0], list(lams[1:])
    if len(ys) != n1 - m or len(u) != n2:
        raise ValueError("dimension mismatch")
    roots = [x] * m + ys[: n2 - m]
    coeffs = _poly_from_roots(roots, x)
    ext = list(u)
    while len(ext) < n1:
        k = len(ext)
        val = _zero(x)
        for i in range(n2):
            val = val - coeffs[i] * ext[k - n2 + i]
        ext.append(val)
    lhs = g_function(m, n1, [x] + ys, ext)
    rhs = g_function(m, n2, [x] + ys[: n2 - m], list(u))
    for y in ys[n2 - m:]:
        rhs = rhs * (y - x)
    return _agree(lhs, rhs)


def _poly_from_roots(roots: Sequence, ref: Any) -> list:
    r = [_one(ref)]
    for root in roots:
        nxt = [_zero(ref)] * (len(r) + 1)
        for k, a in enumerate(r):
            nxt[k + 1] = nxt[k + 1] + a
            nxt[k] = nxt[k] - root * a
        r = nxt
    return r


# ---------------------------------------------------------------------------
# linear solves


def gauss_solve(a: Sequence[Sequence], b: Sequence) -> list:
    """Solve ``a x = b`` by Gaussian elimination with pivoting.

    For ball entries the pivot with the largest certified magnitude is used
    and :class:`PrecisionExhausted` is raised when every candidate contains 0.
    """
    n = len(a)
    m = [list(row) + [b[i]] for i, row in enumerate(a)]
    balls = n > 0 and isinstance(m[0][0], ComplexBall)
    for k in range(n):
        if balls:
            piv = max(range(k, n), key=lambda r: m[r][k].mag_lower().to_fraction())
            if m[piv][k].contains_zero():
                raise PrecisionExhausted("singular or ill-conditioned system at this precision")
        else:
            piv = next((r for r in range(k, n) if not _is_zero(m[r][k])), None)
            if piv is None:
                raise ZeroDivisionError("singular system")
        m[k], m[piv] = m[piv], m[k]
        inv = 1 / m[k][k] if balls else None
        for r in range(k + 1, n):
            if balls:
                f = m[r][k] * inv
            else:
                f = m[r][k] / m[k][k]
            for c in range(k, n + 1):
                m[r][c] = m[r][c] - f * m[k][c]
    x = [None] * n
    for k in range(n - 1, -1, -1):
        acc = m[k][n]
        for c in range(k + 1, n):
            acc = acc - m[k][c] * x[c]
        x[k] = acc / m[k][k]
    return x


def mat_vec(a: Sequence[Sequence], v: Sequence) -> list:
    out = []
    for row in a:
        acc = row[0] * v[0]
        for x, y in zip(row[1:], v[1:]):
            acc = acc + x * y
        out.append(acc)
    return out
