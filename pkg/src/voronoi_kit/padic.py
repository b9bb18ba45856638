"""p-adic side: the additive character, characters of Z_p^x, Gauss sums, shell functions and Mellin."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable

import numpy as np

from .arith import (
    TWO_PI_I,
    DirichletCharacter,
    e,
    enumerate_characters,
    epsilon_inverse,
    euler_phi,
    gauss_sum_dirichlet,
    units_mod,
    valuation,
)
from .series import LaurentSeries


def p_fractional_part(x, p: int) -> Fraction:
    """{x}_p in [0, 1): the part of x with p-power denominator."""
    x = Fraction(x)
    if x == 0:
        return Fraction(0)
    den = x.denominator
    k = 0
    while den % p == 0:
        den //= p
        k += 1
    if k == 0:
        return Fraction(0)
    pk = p**k
    # x = A / (pk * den); the p-part is (A * den^-1 mod pk) / pk
    r = (x.numerator * pow(den, -1, pk)) % pk
    return Fraction(r, pk)


def psi_p(x, p: int) -> complex:
    """psi_p(x) = e({x}_p), trivial exactly on Z_p."""
    return e(p_fractional_part(x, p))


def psi_inf(x) -> complex:
    return e(-Fraction(x) if isinstance(x, (int, Fraction)) else -x)


def zeta_local(p: int) -> float:
    """(1 - 1/p)^-1."""
    return 1.0 / (1.0 - 1.0 / p)


@dataclass(frozen=True)
class PadicCharacter:
    """Character of Z_p^x of conductor exponent a, extended by chi(p) = 1."""

    p: int
    conductor_exponent: int
    dirichlet: DirichletCharacter  # primitive, modulus p^a

    @classmethod
    def trivial(cls, p: int) -> "PadicCharacter":
        return cls(p, 0, enumerate_characters(1)[0])

    @classmethod
    def from_dirichlet(cls, chi: DirichletCharacter, p: int) -> "PadicCharacter":
        prim = chi.primitive()
        f = prim.modulus
        a = 0 if f == 1 else valuation(f, p)
        if p**a != f:
            raise ValueError("character is not of p-power conductor")
        return cls(p, a, prim)

    @property
    def is_trivial(self) -> bool:
        return self.conductor_exponent == 0

    def __call__(self, u: int) -> complex:
        """Value on the unit class of the integer u (p-adic unit)."""
        if u % self.p == 0:
            raise ValueError("argument must be a p-adic unit")
        if self.conductor_exponent == 0:
            return 1 + 0j
        return self.dirichlet(u)

    def value_at(self, unit: int, val: int) -> complex:
        """chi(unit * p^val), using chi(p) = 1."""
        return self(unit)

    def values_on(self, level: int) -> np.ndarray:
        """Values on units_mod(p^level) in ascending order; level >= conductor exponent."""
        if level < self.conductor_exponent:
            raise ValueError("level below conductor exponent")
        if level == 0:
            return np.ones(1, dtype=complex)
        us = np.array(units_mod(self.p**level))
        if self.conductor_exponent == 0:
            return np.ones(len(us), dtype=complex)
        return self.dirichlet.values()[us % self.dirichlet.modulus]

    def conj(self) -> "PadicCharacter":
        return PadicCharacter(self.p, self.conductor_exponent, self.dirichlet.conj())

    def __mul__(self, other: "PadicCharacter") -> "PadicCharacter":
        k = max(self.conductor_exponent, other.conductor_exponent)
        if k == 0:
            return self
        vals = self.values_on(k) * other.values_on(k)
        for chi in enumerate_padic_characters(self.p, k):
            if np.allclose(chi.values_on(k), vals, atol=1e-9):
                return chi
        raise ArithmeticError("product character not found")

    def key(self) -> tuple:
        return (self.p, self.conductor_exponent, self.dirichlet.exponents)

    def __repr__(self) -> str:
        return f"PadicCharacter(p={self.p}, a={self.conductor_exponent}, exponents={self.dirichlet.exponents})"


def enumerate_padic_characters(p: int, k: int) -> list[PadicCharacter]:
    """All phi(p^k) characters of conductor exponent <= k, via the Dirichlet characters mod p^k."""
    if k < 0:
        raise ValueError("k must be non-negative")
    return [PadicCharacter.from_dirichlet(chi, p) for chi in enumerate_characters(p**k)]


def _unit_average(values: np.ndarray) -> complex:
    return complex(np.mean(values))


def gauss_sum_padic(a_unit: int, a_val: int, chi: PadicCharacter, method: str = "average") -> complex:
    """G(a, chi) = integral over Z_p^x of psi_p(a y) chi(y) d^x y, unit mass; a = a_unit * p^a_val.

    method="average" evaluates the finite average, method="closed" the closed form.
    """
    p = chi.p
    if a_unit % p == 0:
        raise ValueError("a_unit must be a p-adic unit")
    c = chi.conductor_exponent
    if method == "closed":
        if c == 0:
            if a_val >= 0:
                return 1 + 0j
            if a_val == -1:
                return complex(1 / (1 - p))
            return 0j
        if a_val != -c:
            return 0j
        return zeta_local(p) * p ** (-c / 2) * chi(a_unit) ** -1 * epsilon_inverse(chi.dirichlet)
    if method != "average":
        raise ValueError(f"unknown method {method!r}")
    level = max(c, -a_val, 0)
    if level == 0:
        return 1 + 0j
    pl = p**level
    us = np.array(units_mod(pl))
    if a_val >= 0:
        add = np.ones(len(us), dtype=complex)
    else:
        pc = p ** (-a_val)
        add = np.exp(TWO_PI_I * (((a_unit % pc) * us) % pc) / pc)
    return _unit_average(add * chi.values_on(level))


def gauss_sum_progression(a_unit: int, a_val: int, chi: PadicCharacter, k: int) -> complex:
    """G^k(a, chi) = integral over 1 + p^k Z_p of psi_p(a y) chi(y) d^x y (unit mass on Z_p^x)."""
    if k < 1:
        raise ValueError("k must be at least 1")
    p = chi.p
    level = max(k, -a_val, chi.conductor_exponent)
    pl = p**level
    us = np.array(units_mod(pl))
    chi_vals = chi.values_on(level)
    mask = (us % p**k) == 1
    if a_val >= 0:
        add = np.ones(mask.sum(), dtype=complex)
    else:
        pc = p ** (-a_val)
        add = np.exp(TWO_PI_I * (((a_unit % pc) * us[mask]) % pc) / pc)
    return complex(np.sum(add * chi_vals[mask]) / len(us))


def progression_volume(p: int, k: int) -> float:
    """Vol(1 + p^k Z_p) under the unit-mass measure on Z_p^x."""
    return 1.0 if k == 0 else 1.0 / euler_phi(p**k)


def epsilon_from_gauss(chi: PadicCharacter) -> complex:
    """eps(1/2, chi^-1) recovered from the finite Gauss-sum average at a = p^-a(chi)."""
    c = chi.conductor_exponent
    if c == 0:
        return 1 + 0j
    g = gauss_sum_padic(1, -c, chi, method="average")
    return g / (zeta_local(chi.p) * chi.p ** (-c / 2))


class PadicShellFunction:
    """Phi on Q_p^x, constant on u(1 + p^k Z_p), supported on shells v_min..v_max.

    shells[v] is an array over units_mod(p^k) in ascending order (one entry for k = 0).
    """

    def __init__(self, p: int, level: int, shells: dict[int, Iterable[complex]] | None = None):
        self.p = int(p)
        self.level = int(level)
        self.units = units_mod(self.p**self.level) if self.level else [1]
        self._index = {u: i for i, u in enumerate(self.units)}
        self.shells: dict[int, np.ndarray] = {}
        for v, vals in (shells or {}).items():
            arr = np.asarray(vals, dtype=complex).ravel()
            if len(arr) != len(self.units):
                raise ValueError(f"shell {v} has {len(arr)} values, expected {len(self.units)}")
            self.shells[int(v)] = arr.copy()

    @property
    def v_min(self) -> int | None:
        return min(self.shells) if self.shells else None

    @property
    def v_max(self) -> int | None:
        return max(self.shells) if self.shells else None

    def __call__(self, unit: int, v: int) -> complex:
        if v not in self.shells:
            return 0j
        if unit % self.p == 0:
            raise ValueError("unit must be prime to p")
        r = unit % (self.p**self.level) if self.level else 1
        return complex(self.shells[v][self._index[r]])

    def lift(self, level: int) -> "PadicShellFunction":
        """Same function stored at a finer level."""
        if level < self.level:
            raise ValueError("cannot lift to a coarser level")
        if level == self.level:
            return self
        pl = self.p**self.level if self.level else 1
        new_units = units_mod(self.p**level)
        idx = [self._index[u % pl] if self.level else 0 for u in new_units]
        return PadicShellFunction(self.p, level, {v: arr[idx] for v, arr in self.shells.items()})

    def allclose(self, other: "PadicShellFunction", tol: float = 1e-12) -> bool:
        return self.max_diff(other) <= tol

    def max_diff(self, other: "PadicShellFunction") -> float:
        k = max(self.level, other.level)
        a, b = self.lift(k), other.lift(k)
        worst = 0.0
        for v in set(a.shells) | set(b.shells):
            x = a.shells.get(v, np.zeros(len(a.units)))
            y = b.shells.get(v, np.zeros(len(b.units)))
            worst = max(worst, float(np.max(np.abs(x - y))))
        return worst

    def to_json(self) -> dict:
        return {
            "p": self.p,
            "level": self.level,
            "shells": [
                {"v": v, "units": [[float(z.real), float(z.imag)] for z in self.shells[v]]}
                for v in sorted(self.shells)
            ],
        }

    @classmethod
    def from_json(cls, data) -> "PadicShellFunction":
        if isinstance(data, str):
            data = json.loads(data)
        shells = {s["v"]: [complex(re, im) for re, im in s["units"]] for s in data["shells"]}
        return cls(data["p"], data["level"], shells)

    @classmethod
    def indicator_units(cls, p: int, v: int = 0) -> "PadicShellFunction":
        return cls(p, 0, {v: [1.0]})

    @classmethod
    def indicator_progression(cls, p: int, k: int, v: int = 0) -> "PadicShellFunction":
        """Indicator of p^v (1 + p^k Z_p)."""
        units = units_mod(p**k)
        return cls(p, k, {v: [1.0 if u == 1 else 0.0 for u in units]})

    def __repr__(self) -> str:
        return f"PadicShellFunction(p={self.p}, level={self.level}, shells={sorted(self.shells)})"


class MellinSpectrum:
    """chi -> LaurentSeries in Z; the coefficient of Z^m belongs to shell v = -m."""

    def __init__(self, p: int, entries: dict[PadicCharacter, LaurentSeries] | None = None):
        self.p = p
        self.entries: dict[PadicCharacter, LaurentSeries] = dict(entries or {})

    def __getitem__(self, chi: PadicCharacter) -> LaurentSeries:
        return self.entries.get(chi, LaurentSeries())

    def characters(self) -> list[PadicCharacter]:
        return list(self.entries)

    def max_conductor(self) -> int:
        live = [c.conductor_exponent for c, s in self.entries.items() if not s.trim().is_zero()]
        return max(live, default=0)


def mellin_padic(phi: PadicShellFunction) -> MellinSpectrum:
    """Coefficient of Z^m at chi is the unit-mass average of Phi(u p^-m) chi(u)."""
    spec = MellinSpectrum(phi.p)
    for chi in enumerate_padic_characters(phi.p, phi.level):
        vals = chi.values_on(phi.level)
        terms = {-v: complex(np.mean(arr * vals)) for v, arr in phi.shells.items()}
        spec.entries[chi] = LaurentSeries.from_dict(terms)
    return spec


def mellin_inverse_padic(spec: MellinSpectrum, level: int | None = None) -> PadicShellFunction:
    """Phi(u p^v) = sum_chi chi(u)^-1 * [Z^-v] S(chi)."""
    k = spec.max_conductor() if level is None else level
    out: dict[int, np.ndarray] = {}
    n_units = len(units_mod(spec.p**k)) if k else 1
    for chi, series in spec.entries.items():
        s = series.trim()
        if s.is_zero():
            continue
        if chi.conductor_exponent > k:
            raise ValueError("requested level is below the spectrum's conductor")
        inv = np.conj(chi.values_on(k))
        for m, c in s.terms().items():
            v = -m
            out.setdefault(v, np.zeros(n_units, dtype=complex))
            out[v] = out[v] + c * inv
    return PadicShellFunction(spec.p, k, out)
