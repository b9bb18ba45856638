"""Local geometric side: Lambda sets, local hyper-Kloosterman sums, delta matrices, and a
brute-force evaluation of the unramified hyper-Kloosterman integral."""

from __future__ import annotations

import itertools
import math
from fractions import Fraction
from typing import Sequence

import numpy as np

from .arith import inverse_mod, prime_divisors, units_mod, valuation
from .local_reps import SatakeParams, shintani_whittaker
from .padic import psi_p


def _val(x: Fraction, p: int) -> float:
    return math.inf if x == 0 else valuation(Fraction(x), p)


def _abs(x: Fraction, p: int) -> float:
    return 0.0 if x == 0 else float(p) ** (-valuation(Fraction(x), p))


def lambda_set(p: int, v_t: int) -> list[Fraction]:
    """Representatives of t Z_p^x / Z_p for t = p^v_t; the singleton {1} when v_t = 0."""
    if v_t > 0:
        raise ValueError("|t| must be at least 1")
    if v_t == 0:
        return [Fraction(1)]
    pk = p ** (-v_t)
    return [Fraction(u, pk) for u in units_mod(pk)]


def _effective_zeta(p: int, zeta: Fraction, xi: Sequence[Fraction]) -> Fraction:
    """zeta itself when |zeta xi_1^-1 xi_2| >= 1, otherwise xi_1 / xi_2."""
    if zeta != 0 and _val(zeta * xi[1] / xi[0], p) <= 0:
        return Fraction(zeta)
    return Fraction(xi[0]) / xi[1]


def kl_local(p: int, y: Fraction, t_vals: Sequence[int], zeta: Fraction, xi: Sequence[Fraction]) -> complex:
    """Local (n-1)-dimensional hyper-Kloosterman sum Kl_p(y, t; zeta, xi), t = diag(p^t_vals)."""
    xi = [Fraction(x) for x in xi]
    n = len(xi)
    y = Fraction(y)
    z = _effective_zeta(p, Fraction(zeta), xi)
    if n == 2:
        return psi_p(y / z, p)
    if len(t_vals) != n - 2:
        raise ValueError("t must have n-2 entries")
    pref = _abs(xi[1] * z, p) ** (n - 2) / math.prod(_abs(x, p) for x in xi[2:])
    pref_phase = psi_p(-xi[1] / xi[2], p)
    sign = (-1) ** n
    base = sign * y / z / xi[1] * xi[n - 1]
    lams = [lambda_set(p, t_vals[j - 2]) for j in range(2, n)]  # lams[j-2] = Lambda_{t_j}
    total = 0j
    for xs in itertools.product(*lams):
        inv = Fraction(1)
        for x in xs:
            inv /= x
        phase = psi_p(base * inv, p)
        for j in range(2, n):
            phase *= psi_p(xi[n - j] / xi[n - j + 1] * xs[j - 2], p)
        total += phase
    return pref * pref_phase * total


def delta_matrix(p: int, t_vals: Sequence[int], zeta: Fraction, xi: Sequence[Fraction]) -> list[Fraction]:
    """Diagonal entries of delta(t; zeta, xi) in both branches."""
    xi = [Fraction(x) for x in xi]
    n = len(xi)
    t = [Fraction(p) ** v for v in t_vals]
    det_t = math.prod(t, start=Fraction(1))
    middle = [t[i - 2] / xi[n + 1 - i] for i in range(2, n)]  # t_i xi_{n+2-i}^-1 (1-based)
    zeta = Fraction(zeta)
    if zeta != 0 and _val(zeta * xi[1] / xi[0], p) < 0:
        return [1 / (zeta * det_t * xi[1])] + middle + [zeta / xi[0]]
    return [1 / (xi[0] * det_t)] + middle + [1 / xi[1]]


def dual_whittaker_diag(entries: Sequence[Fraction], p: int, dual: SatakeParams) -> complex:
    """W~ on a diagonal matrix: Shintani at the dual parameters on the valuation vector."""
    lam = [valuation(Fraction(x), p) for x in entries]
    return shintani_whittaker(lam, dual)


def closed_form_sum(
    p: int, y: Fraction, zeta: Fraction, xi: Sequence[Fraction], dual: SatakeParams, extra: int = 0
) -> tuple[complex, int]:
    """sum over t in T^1 of Kl_p(y, t) W~(a(y) delta(t)), truncated by dominance of the
    valuation vector.  Returns (value, number of t-classes with nonzero Whittaker value)."""
    xi = [Fraction(x) for x in xi]
    n = len(xi)
    y = Fraction(y)
    if n == 2:
        d = delta_matrix(p, [], zeta, xi)
        return kl_local(p, y, [], zeta, xi) * dual_whittaker_diag([y * d[0], d[1]], p, dual), 1
    z = _effective_zeta(p, Fraction(zeta), xi)
    # dominance forces v(t_i) - v(xi_{n+2-i}) >= v(last entry)
    d0 = delta_matrix(p, [0] * (n - 2), zeta, xi)
    floor_last = valuation(d0[-1], p)
    lows = [min(0, floor_last + valuation(xi[n + 1 - i], p)) - extra for i in range(2, n)]
    total = 0j
    count = 0
    for tv in itertools.product(*[range(lo, 1) for lo in lows]):
        d = delta_matrix(p, list(tv), zeta, xi)
        w = dual_whittaker_diag([y * d[0]] + d[1:], p, dual)
        if w == 0:
            continue
        count += 1
        total += kl_local(p, y, list(tv), zeta, xi) * w
    return total, count


# brute force


def iwasawa_upper(g: list[list[Fraction]], p: int) -> list[list[Fraction]]:
    """b upper triangular with g = b k, k in GL_n(Z_p), by exact column reduction."""
    n = len(g)
    b = [row[:] for row in g]
    for r in range(n - 1, -1, -1):
        cols = list(range(r + 1))
        piv = min((c for c in cols if b[r][c] != 0), key=lambda c: valuation(b[r][c], p), default=None)
        if piv is None:
            raise ArithmeticError("singular matrix in Iwasawa reduction")
        if piv != r:
            for row in b:
                row[piv], row[r] = row[r], row[piv]
        pv = b[r][r]
        for c in range(r):
            if b[r][c] != 0:
                f = b[r][c] / pv
                for row in b:
                    row[c] -= f * row[r]
    return b


def _matmul(a, b):
    n = len(a)
    return [[sum((a[i][k] * b[k][j] for k in range(n)), Fraction(0)) for j in range(n)] for i in range(n)]


def _eye(n):
    return [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]


def dual_whittaker(g: list[list[Fraction]], p: int, dual: SatakeParams) -> complex:
    """W~(g) for the spherical contragredient vector: W~(u d k) = conj psi(sum u_{i,i+1}) W~(d)."""
    b = iwasawa_upper(g, p)
    n = len(b)
    diag = [b[i][i] for i in range(n)]
    w = dual_whittaker_diag(diag, p, dual)
    if w == 0:
        return 0j
    s = sum((b[i][i + 1] / b[i + 1][i + 1] for i in range(n - 1)), Fraction(0))
    return psi_p(-s, p) * w


def _right_factor(p, zeta: Fraction, xi: Sequence[Fraction]):
    """diag(1, w_{n-1}) n(-zeta)^T xi^-1."""
    n = len(xi)
    perm = _eye(n)
    perm = [[Fraction(0)] * n for _ in range(n)]
    perm[0][0] = Fraction(1)
    for i in range(1, n):
        perm[i][n - i] = Fraction(1)
    low = _eye(n)
    low[1][0] = -Fraction(zeta)
    xinv = [[Fraction(0)] * n for _ in range(n)]
    for i in range(n):
        xinv[i][i] = 1 / Fraction(xi[i])
    return _matmul(_matmul(perm, low), xinv)


def _left_factor(y: Fraction, x: Sequence[Fraction], n: int):
    m = _eye(n)
    m[0][0] = Fraction(y)
    for i, xi_ in enumerate(x):
        m[i + 1][0] = Fraction(xi_)
    return m


def _left_times(y: Fraction, x: Sequence[Fraction], right):
    """_left_factor(y, x) @ right without the full product: row 0 is y P_0, row i is x_i P_0 + P_i."""
    top = right[0]
    rows = [[y * c for c in top]]
    for i in range(1, len(right)):
        xi_ = x[i - 1] if i - 1 < len(x) else 0
        rows.append([xi_ * a + b for a, b in zip(top, right[i])] if xi_ else right[i][:])
    return rows


def hk_integrand(p, y, x, zeta, xi, dual, right=None) -> complex:
    right = right if right is not None else _right_factor(p, zeta, xi)
    return dual_whittaker(_left_times(Fraction(y), [Fraction(v) for v in x], right), p, dual)


def cell_exponents(p: int, zeta: Fraction, xi: Sequence[Fraction]) -> list[int]:
    """r_i such that the integrand is invariant under x_i -> x_i + p^r_i Z_p.

    Translating x_i by h multiplies the argument on the right by P^-1 (1 + h E_{i+1,1}) P with
    P the fixed right factor; this lies in GL_n(Z_p) as soon as h P^-1 E P is integral.
    """
    n = len(xi)
    P = _right_factor(p, zeta, xi)
    Pinv = _inverse(P)
    out = []
    for i in range(n - 2):
        E = [[Fraction(0)] * n for _ in range(n)]
        E[i + 1][0] = Fraction(1)
        C = _matmul(_matmul(Pinv, E), P)
        vals = [valuation(c, p) for row in C for c in row if c != 0]
        out.append(max(0, -min(vals)) if vals else 0)
    return out


def _inverse(a):
    n = len(a)
    m = [row[:] + _eye(n)[i] for i, row in enumerate(a)]
    for c in range(n):
        piv = next(r for r in range(c, n) if m[r][c] != 0)
        m[c], m[piv] = m[piv], m[c]
        f = m[c][c]
        m[c] = [v / f for v in m[c]]
        for r in range(n):
            if r != c and m[r][c] != 0:
                g = m[r][c]
                m[r] = [v - g * w for v, w in zip(m[r], m[c])]
    return [row[n:] for row in m]


def _box_points(p: int, A: int, r: Sequence[int], outer_only: bool = False):
    """Cell representatives of prod_i p^-A Z_p / p^r_i Z_p; with outer_only, those of the box of
    radius p^(A+1) having some coordinate of valuation exactly -(A+1)."""
    m = len(r)
    if not outer_only:
        yield from itertools.product(*[[Fraction(j, p**A) for j in range(p ** (A + r[i]))] for i in range(m)])
        return
    B = A + 1
    full = [[Fraction(j, p**B) for j in range(p ** (B + r[i]))] for i in range(m)]
    for x in itertools.product(*full):
        if any(v.denominator % p**B == 0 for v in x):
            yield x


def default_box(p: int, zeta: Fraction, xi: Sequence[Fraction]) -> int:
    """Radius exponent A with the integrand supported in (p^-A Z_p)^(n-2).  Independent of y;
    the bound is checked at run time on the next shell out."""
    return abs(_val_or0(Fraction(zeta), p)) + max(abs(valuation(Fraction(x), p)) for x in xi) + 2


def hk_integral_bruteforce(
    p: int,
    y: Fraction,
    zeta: Fraction,
    xi: Sequence[Fraction],
    dual: SatakeParams,
    A: int | None = None,
    check: bool = True,
) -> complex:
    """H_p(y; zeta, xi) = int_{Q_p^{n-2}} W~(a-block(y, x) diag(1, w) n(-zeta)^T xi^-1) dx
    as an exact Riemann sum over the cells on which the integrand is constant.

    With check, the integrand must vanish at every cell of the shell just outside the box.
    """
    xi = [Fraction(x) for x in xi]
    n = len(xi)
    y = Fraction(y)
    zeta = Fraction(zeta)
    right = _right_factor(p, zeta, xi)
    if n == 2:
        return hk_integrand(p, y, [], zeta, xi, dual, right)
    r = cell_exponents(p, zeta, xi)
    A = default_box(p, zeta, xi) if A is None else A
    total = 0j
    for x in _box_points(p, A, r):
        total += dual_whittaker(_left_times(y, x, right), p, dual)
    if check:
        for x in _box_points(p, A, r, outer_only=True):
            if abs(dual_whittaker(_left_times(y, x, right), p, dual)) > 1e-12:
                raise ArithmeticError(f"integrand does not vanish outside p^-{A}; pass a larger A")
    return total * float(p) ** (-sum(r))


def _val_or0(x: Fraction, p: int) -> int:
    return 0 if x == 0 else valuation(x, p)


def shift_is_admissible(p: int, xi: Sequence[Fraction]) -> bool:
    """True when xi_2 / xi_3 is p-integral (always so for the classical shift, where it is c_2).

    Otherwise H_p vanishes identically: with s = xi_2 / xi_3, left translation by 1 + s E_23
    turns into the substitution x -> x - s zeta together with a right factor in GL_n(Z_p), so
    the integral equals conj psi(s) times itself, and psi(s) != 1.  The Kloosterman closed form
    does not see this and is only valid on admissible shifts.
    """
    if len(xi) < 3:
        return True
    return valuation(Fraction(xi[1]) / Fraction(xi[2]), p) >= 0


def verify_geometric_identity(
    p: int, y: Fraction, zeta: Fraction, xi: Sequence[Fraction], dual: SatakeParams, A: int | None = None
) -> dict:
    lhs = hk_integral_bruteforce(p, y, zeta, xi, dual, A)
    rhs, count = closed_form_sum(p, y, zeta, xi, dual)
    wider, _ = closed_form_sum(p, y, zeta, xi, dual, extra=2)
    if abs(wider - rhs) > 1e-12 * max(1.0, abs(rhs)):
        raise ArithmeticError("t-sum truncation is not stable")
    return {
        "lhs": lhs,
        "rhs": rhs,
        "residual": abs(lhs - rhs),
        "t_terms": count,
        "admissible": shift_is_admissible(p, xi),
    }


def kl_product_over_primes(n: int, q: int, y: Fraction, zeta: Fraction, xi_by_p, t_by_p) -> complex:
    """prod over p | q of Kl_p(y, t_p; zeta, xi_p)."""
    out = 1 + 0j
    for p in prime_divisors(q):
        out *= kl_local(p, y, t_by_p[p], zeta, xi_by_p[p])
    return out
