"""Finite Laurent series in one variable, stored as a dense coefficient array plus an offset."""

from __future__ import annotations

import math

import numpy as np


class LaurentSeries:
    """sum_i coeffs[i] * Z^(low + i)."""

    __slots__ = ("coeffs", "low")

    def __init__(self, coeffs=(), low: int = 0):
        c = np.asarray(coeffs, dtype=complex).ravel()
        self.coeffs = c
        self.low = int(low)

    @classmethod
    def monomial(cls, exponent: int, coeff=1.0) -> "LaurentSeries":
        return cls([coeff], exponent)

    @classmethod
    def from_dict(cls, terms: dict) -> "LaurentSeries":
        if not terms:
            return cls()
        lo, hi = min(terms), max(terms)
        c = np.zeros(hi - lo + 1, dtype=complex)
        for k, v in terms.items():
            c[k - lo] += v
        return cls(c, lo)

    @property
    def high(self) -> int:
        return self.low + len(self.coeffs) - 1

    def is_zero(self, tol: float = 0.0) -> bool:
        return not len(self.coeffs) or bool(np.all(np.abs(self.coeffs) <= tol))

    def trim(self, tol: float = 0.0) -> "LaurentSeries":
        nz = np.nonzero(np.abs(self.coeffs) > tol)[0]
        if not len(nz):
            return LaurentSeries()
        return LaurentSeries(self.coeffs[nz[0] : nz[-1] + 1], self.low + nz[0])

    def coeff(self, m: int) -> complex:
        i = m - self.low
        if 0 <= i < len(self.coeffs):
            return complex(self.coeffs[i])
        return 0j

    def terms(self) -> dict[int, complex]:
        return {self.low + i: complex(c) for i, c in enumerate(self.coeffs) if c != 0}

    def __add__(self, other):
        if not isinstance(other, LaurentSeries):
            other = LaurentSeries([other], 0)
        if not len(self.coeffs):
            return other
        if not len(other.coeffs):
            return self
        lo = min(self.low, other.low)
        hi = max(self.high, other.high)
        c = np.zeros(hi - lo + 1, dtype=complex)
        c[self.low - lo : self.low - lo + len(self.coeffs)] += self.coeffs
        c[other.low - lo : other.low - lo + len(other.coeffs)] += other.coeffs
        return LaurentSeries(c, lo)

    __radd__ = __add__

    def __neg__(self):
        return LaurentSeries(-self.coeffs, self.low)

    def __sub__(self, other):
        return self + (-other if isinstance(other, LaurentSeries) else -other)

    def __mul__(self, other):
        if isinstance(other, LaurentSeries):
            if not len(self.coeffs) or not len(other.coeffs):
                return LaurentSeries()
            return LaurentSeries(np.convolve(self.coeffs, other.coeffs), self.low + other.low)
        return LaurentSeries(self.coeffs * other, self.low)

    __rmul__ = __mul__

    def shift(self, k: int) -> "LaurentSeries":
        """Multiply by Z^k."""
        return LaurentSeries(self.coeffs, self.low + k)

    def truncate(self, max_exponent: int) -> "LaurentSeries":
        keep = max_exponent - self.low + 1
        if keep <= 0:
            return LaurentSeries()
        return LaurentSeries(self.coeffs[:keep], self.low)

    def inverse(self, order: int) -> "LaurentSeries":
        """Formal inverse in increasing powers, correct through exponent `order`.

        The lowest nonzero term is factored out, so 1/(a Z^k (1 + ...)) = a^-1 Z^-k (1 - ...).
        """
        s = self.trim()
        if s.is_zero():
            raise ZeroDivisionError("inverse of the zero series")
        a0 = s.coeffs[0]
        n = order + s.low + 1  # number of coefficients needed
        if n <= 0:
            return LaurentSeries()
        b = np.zeros(n, dtype=complex)
        b[0] = 1 / a0
        c = s.coeffs
        for i in range(1, n):
            m = min(i, len(c) - 1)
            b[i] = -np.dot(c[1 : m + 1], b[i - 1 :: -1][:m]) / a0
        return LaurentSeries(b, -s.low)

    def substitute_reciprocal(self, scale) -> "LaurentSeries":
        """Z -> scale / Z."""
        if not len(self.coeffs):
            return LaurentSeries()
        exps = self.low + np.arange(len(self.coeffs))
        c = (self.coeffs * np.power(complex(scale), exps))[::-1]
        return LaurentSeries(c, -self.high)

    def __call__(self, z):
        z = np.asarray(z, dtype=complex)
        exps = self.low + np.arange(len(self.coeffs))
        return np.sum(self.coeffs[:, None] * np.power.outer(z.ravel(), exps).T, axis=0).reshape(z.shape)

    def circle_integral(self, q: float, nodes: int | None = None) -> complex:
        """(log q / 2 pi) * integral over |t| <= pi/log q of S(q^(it)) dt, by the trapezoid rule.

        Exact for trigonometric polynomials once nodes exceed the exponent span.
        """
        span = max(abs(self.low), abs(self.high), 1)
        nodes = nodes or 4 * span + 8
        h = 2 * math.pi / math.log(q) / nodes
        t = -math.pi / math.log(q) + h * np.arange(nodes)
        z = np.exp(1j * t * math.log(q))
        return complex(np.mean(self(z)))

    def allclose(self, other: "LaurentSeries", tol: float = 1e-12) -> bool:
        d = (self - other).trim()
        return d.is_zero(tol)

    def __repr__(self) -> str:
        return f"LaurentSeries({self.terms()!r})"


def polynomial_from_roots(roots, variable_scale=1.0) -> LaurentSeries:
    """prod_i (1 - roots[i] * scale * Z)."""
    out = LaurentSeries([1.0])
    for r in roots:
        out = out * LaurentSeries([1.0, -complex(r) * variable_scale])
    return out


class RationalFunction:
    """num / den with both Laurent polynomials in X."""

    def __init__(self, num: LaurentSeries, den: LaurentSeries | None = None):
        self.num = num
        self.den = den if den is not None else LaurentSeries([1.0])
        if self.den.trim().is_zero():
            raise ZeroDivisionError("zero denominator")

    @classmethod
    def constant(cls, c) -> "RationalFunction":
        return cls(LaurentSeries([c]))

    def __mul__(self, other):
        if isinstance(other, RationalFunction):
            return RationalFunction(self.num * other.num, self.den * other.den)
        if isinstance(other, LaurentSeries):
            return RationalFunction(self.num * other, self.den)
        return RationalFunction(self.num * other, self.den)

    __rmul__ = __mul__

    def substitute_reciprocal(self, scale) -> "RationalFunction":
        """X -> scale / X."""
        return RationalFunction(self.num.substitute_reciprocal(scale), self.den.substitute_reciprocal(scale))

    def expand(self, order: int) -> LaurentSeries:
        """Laurent expansion around X = 0, exact through X^order."""
        num = self.num.trim()
        if num.is_zero():
            return LaurentSeries()
        inv = self.den.inverse(order - num.low)
        return (num * inv).truncate(order)

    def __call__(self, x):
        return self.num(x) / self.den(x)

    def is_monomial(self) -> bool:
        n, d = self.num.trim(), self.den.trim()
        return len(n.coeffs) == 1 and len(d.coeffs) == 1
