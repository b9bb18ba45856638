"""Local representation data: Schur polynomials, spherical Whittaker values, Hecke coefficients,
and the L, epsilon and gamma factors of GL(n) x GL(1) twists."""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Mapping, Sequence

import numpy as np

from .arith import DirichletCharacter, factorize
from .padic import PadicCharacter, enumerate_padic_characters, epsilon_from_gauss
from .series import LaurentSeries, RationalFunction, polynomial_from_roots


def is_dominant(lam: Sequence[int]) -> bool:
    return all(lam[i] >= lam[i + 1] for i in range(len(lam) - 1))


def _check_dominant(lam):
    if not is_dominant(lam):
        raise ValueError(f"partition {tuple(lam)} is not dominant")


def schur_bialternant(lam: Sequence[int], t: Sequence[complex]) -> complex:
    """det(t_j^(lam_i + n - i)) / det(t_j^(n - i)); needs distinct t."""
    _check_dominant(lam)
    n = len(lam)
    t = np.asarray(t, dtype=complex)
    shift = lam[-1]
    lam = [x - shift for x in lam]
    num = np.array([[tj ** (lam[i] + n - 1 - i) for tj in t] for i in range(n)])
    den = np.array([[tj ** (n - 1 - i) for tj in t] for i in range(n)])
    return complex(np.linalg.det(num) / np.linalg.det(den) * np.prod(t) ** shift)


def complete_homogeneous(k_max: int, t: Sequence[complex]) -> np.ndarray:
    """h_0..h_{k_max} of t, from prod 1/(1 - t_i x)."""
    h = np.zeros(k_max + 1, dtype=complex)
    h[0] = 1
    for ti in t:
        # multiply by 1/(1 - ti x): running sum
        for k in range(1, k_max + 1):
            h[k] += ti * h[k - 1]
    return h


def schur_jacobi_trudi(lam: Sequence[int], t: Sequence[complex]) -> complex:
    """det(h_{lam_i - i + j}); valid for repeated entries."""
    _check_dominant(lam)
    n = len(lam)
    t = np.asarray(t, dtype=complex)
    shift = lam[-1]
    lam = [x - shift for x in lam]
    h = complete_homogeneous(max(lam[0] + n, 1), t)

    def hk(k):
        return h[k] if k >= 0 else 0

    m = np.array([[hk(lam[i] - i + j) for j in range(n)] for i in range(n)])
    return complex(np.linalg.det(m) * np.prod(t) ** shift)


def semistandard_tableaux(lam: Sequence[int], n: int):
    """Yield SSYT of shape lam (non-negative parts) with entries 1..n, as lists of rows."""
    shape = [x for x in lam if x > 0]
    cells = [(r, c) for r, length in enumerate(shape) for c in range(length)]
    filling: dict = {}

    def rec(i):
        if i == len(cells):
            yield [[filling[(r, c)] for c in range(shape[r])] for r in range(len(shape))]
            return
        r, c = cells[i]
        lo = 1
        if c > 0:
            lo = max(lo, filling[(r, c - 1)])
        if r > 0:
            lo = max(lo, filling[(r - 1, c)] + 1)
        for v in range(lo, n + 1):
            filling[(r, c)] = v
            yield from rec(i + 1)
        filling.pop((r, c), None)

    yield from rec(0)


def schur_tableaux(lam: Sequence[int], t: Sequence[complex]) -> complex:
    _check_dominant(lam)
    t = list(t)
    shift = lam[-1]
    lam = [x - shift for x in lam]
    total = 0j
    for tab in semistandard_tableaux(lam, len(t)):
        term = 1 + 0j
        for row in tab:
            for v in row:
                term *= t[v - 1]
        total += term
    return total * complex(np.prod(t)) ** shift


def schur(lam: Sequence[int], t: Sequence[complex]) -> complex:
    """s_lam(t); the determinant formula for distinct entries, Jacobi-Trudi otherwise."""
    lam = tuple(int(x) for x in lam)
    t = tuple(complex(x) for x in t)
    if len(lam) != len(t):
        raise ValueError("partition and variables must have the same length")
    return _schur_cached(lam, t)


@lru_cache(maxsize=65536)
def _schur_cached(lam, t):
    distinct = all(abs(a - b) > 1e-6 for a, b in itertools.combinations(t, 2))
    if distinct:
        return schur_bialternant(lam, t)
    return schur_jacobi_trudi(lam, t)


@dataclass(frozen=True)
class SatakeParams:
    p: int
    mu: tuple[complex, ...]

    def __post_init__(self):
        object.__setattr__(self, "mu", tuple(complex(x) for x in self.mu))
        if any(x == 0 for x in self.mu):
            raise ValueError("Satake parameters must be nonzero")

    @property
    def n(self) -> int:
        return len(self.mu)

    @property
    def is_unitary(self) -> bool:
        return all(abs(abs(x) - 1) < 1e-12 for x in self.mu)

    def inverse(self) -> "SatakeParams":
        return SatakeParams(self.p, tuple(1 / x for x in self.mu))

    def central(self) -> complex:
        return complex(np.prod(self.mu))


def modular_exponent(lam: Sequence[int]) -> float:
    n = len(lam)
    return -sum(l * ((n + 1) / 2 - i) for i, l in enumerate(lam, start=1))


def shintani_whittaker(lam: Sequence[int], mu: SatakeParams) -> complex:
    """W(diag(p^lam)) of the normalized spherical Whittaker function: 0 off dominant lam,
    else p^(-sum lam_i ((n+1)/2 - i)) s_lam(mu)."""
    if len(lam) != mu.n:
        raise ValueError("partition length must equal n")
    if not is_dominant(lam):
        return 0j
    return mu.p ** modular_exponent(lam) * schur(lam, mu.mu)


def contragredient_whittaker(lam: Sequence[int], mu: SatakeParams) -> complex:
    """W~(diag(p^lam)) = W(w diag(p^-lam)) for the spherical vector: Shintani at the inverse parameters."""
    return shintani_whittaker(lam, mu.inverse())


def partition_from_exponents(k: Sequence[int]) -> tuple[int, ...]:
    """lam_i = k_i + ... + k_{n-1}, lam_n = 0."""
    k = list(k)
    return tuple(sum(k[i:]) for i in range(len(k))) + (0,)


def hecke_coefficient(model: Mapping[int, SatakeParams], m: Sequence[int]) -> complex:
    """A(m_1, ..., m_{n-1}) by multiplicativity, with A at prime powers given by s_lam(mu_p)."""
    m = [int(x) for x in m]
    if any(x == 0 for x in m):
        return 0j
    m = [abs(x) for x in m]
    primes = set()
    for x in m:
        if x > 1:
            primes.update(factorize(x))
    out = 1 + 0j
    for p in sorted(primes):
        if p not in model:
            raise KeyError(f"no Satake data at p={p}")
        ks = [_vp(x, p) for x in m]
        out *= schur(partition_from_exponents(ks), model[p].mu)
    return out


def _vp(x: int, p: int) -> int:
    v = 0
    while x % p == 0:
        x //= p
        v += 1
    return v


def inverse_model(model: Mapping[int, SatakeParams]) -> dict[int, SatakeParams]:
    return {p: s.inverse() for p, s in model.items()}


def dual_coefficient(model: Mapping[int, SatakeParams], chi: DirichletCharacter, m: Sequence[int]) -> complex:
    """chi(m_1 ... m_{n-1}) A(m_{n-1}, ..., m_1) for m coprime to the modulus of chi."""
    prod = math.prod(abs(int(x)) for x in m)
    if math.gcd(prod, chi.modulus) != 1:
        raise ValueError("m must be coprime to the level")
    return chi(prod) * hecke_coefficient(model, list(reversed(m)))


# local representations


@dataclass(frozen=True)
class Unramified:
    satake: SatakeParams

    @property
    def p(self) -> int:
        return self.satake.p

    @property
    def n(self) -> int:
        return self.satake.n

    @property
    def conductor_exponent(self) -> int:
        return 0

    def dual(self) -> "Unramified":
        return Unramified(self.satake.inverse())

    def to_json(self) -> dict:
        return {"type": "unramified", "p": self.p, "satake": [[z.real, z.imag] for z in self.satake.mu]}


@dataclass(frozen=True)
class TwistMinimal:
    """Cusp-like local data: L(s, chi pi) = 1 for every chi, a(chi pi) = max(a(pi), n a(chi))."""

    p: int
    n: int
    a_pi: int
    eps0: complex
    twists: Mapping[PadicCharacter, complex] = field(default_factory=dict, hash=False, compare=False)

    def __post_init__(self):
        if self.a_pi < 1:
            raise ValueError("a(pi) must be positive")
        for z in [self.eps0, *self.twists.values()]:
            if abs(abs(z) - 1) > 1e-9:
                raise ValueError("root numbers must have modulus one")

    @property
    def conductor_exponent(self) -> int:
        return self.a_pi

    def dual(self) -> "TwistMinimal":
        tw = {chi.conj(): complex(z).conjugate() for chi, z in self.twists.items()}
        return TwistMinimal(self.p, self.n, self.a_pi, complex(self.eps0).conjugate(), tw)

    @classmethod
    def synthetic(cls, p: int, n: int, a_pi: int, max_twist: int, seed: int = 0) -> "TwistMinimal":
        """Random unit root numbers for every chi with 1 <= a(chi) <= max_twist."""
        rng = np.random.default_rng([seed, p, n, a_pi])
        eps0 = complex(np.exp(2j * np.pi * rng.random()))
        tw = {}
        for chi in enumerate_padic_characters(p, max_twist):
            if chi.conductor_exponent:
                tw[chi] = complex(np.exp(2j * np.pi * rng.random()))
        return cls(p, n, a_pi, eps0, tw)

    def to_json(self) -> dict:
        return {
            "type": "twist_minimal",
            "p": self.p,
            "n": self.n,
            "a_pi": self.a_pi,
            "eps0": [self.eps0.real, self.eps0.imag],
            "twists": [
                {"a": chi.conductor_exponent, "exponents": list(chi.dirichlet.exponents), "eps": [z.real, z.imag]}
                for chi, z in self.twists.items()
            ],
        }


LocalRepresentation = Unramified | TwistMinimal


def rep_from_json(data) -> LocalRepresentation:
    if isinstance(data, str):
        data = json.loads(data)
    if data["type"] == "unramified":
        return Unramified(SatakeParams(data["p"], tuple(complex(a, b) for a, b in data["satake"])))
    if data["type"] == "twist_minimal":
        p = data["p"]
        tw = {}
        for item in data["twists"]:
            a = item["a"]
            chi = PadicCharacter(p, a, DirichletCharacter(p**a, tuple(item["exponents"])))
            tw[chi] = complex(*item["eps"])
        return TwistMinimal(p, data["n"], data["a_pi"], complex(*data["eps0"]), tw)
    raise ValueError(f"unknown representation type {data['type']!r}")


def gl1_epsilon(chi: PadicCharacter) -> complex:
    """eps(1/2, chi) for psi_p = e(+{x}_p): the Gauss-sum constant of chi^-1."""
    return epsilon_from_gauss(chi.conj())


def l_factor(rep: LocalRepresentation, chi: PadicCharacter) -> RationalFunction:
    """L(s, chi pi) as a rational function of X = p^-s."""
    if isinstance(rep, TwistMinimal) or not chi.is_trivial:
        return RationalFunction.constant(1.0)
    return RationalFunction(LaurentSeries([1.0]), polynomial_from_roots(rep.satake.mu))


def epsilon_factor(rep: LocalRepresentation, chi: PadicCharacter) -> tuple[complex, int]:
    """(eps(1/2, chi pi), a(chi pi))."""
    a = chi.conductor_exponent
    if isinstance(rep, Unramified):
        if a == 0:
            return 1 + 0j, 0
        # product of GL(1) factors eps(1/2, chi mu_i) = eps(1/2, chi) mu_i^a(chi)
        return gl1_epsilon(chi) ** rep.n * rep.satake.central() ** a, rep.n * a
    if a == 0:
        return complex(rep.eps0), rep.a_pi
    if chi not in rep.twists:
        raise KeyError(f"missing twisted root number for {chi!r}")
    return complex(rep.twists[chi]), max(rep.a_pi, rep.n * a)


def dual_character_twist(rep: LocalRepresentation) -> LocalRepresentation:
    return rep.dual()


def gamma_factor(rep: LocalRepresentation, chi: PadicCharacter, one_minus_s: bool = False) -> RationalFunction:
    """gamma(s, chi pi, psi) = eps(1/2) p^(a/2) X^a L(1-s, chi^-1 pi~) / L(s, chi pi), X = p^-s.

    With one_minus_s the substitution s -> 1-s (X -> p^-1 / X) is applied.
    """
    p = rep.p
    eps, a = epsilon_factor(rep, chi)
    mono = LaurentSeries.monomial(a, eps * p ** (a / 2))
    if isinstance(rep, Unramified) and chi.is_trivial:
        num = polynomial_from_roots(rep.satake.mu) * mono
        # L(1-s, pi~)^-1 = prod (1 - mu_i^-1 p^-1 X^-1)
        den = LaurentSeries([1.0])
        for m in rep.satake.mu:
            den = den * LaurentSeries([-1 / (m * p), 1.0], -1)
        g = RationalFunction(num, den)
    else:
        g = RationalFunction(mono)
    return g.substitute_reciprocal(1 / p) if one_minus_s else g
