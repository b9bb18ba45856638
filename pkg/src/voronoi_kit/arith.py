"""Modular arithmetic, Dirichlet characters, Gauss sums and hyper-Kloosterman sums."""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Mapping, Sequence

import numpy as np

TWO_PI_I = 2j * math.pi


def e(x) -> complex:
    """e(x) = exp(2 pi i x); exact rationals are reduced mod 1 first."""
    if isinstance(x, Fraction):
        x = x - math.floor(x)
    return cmath.exp(TWO_PI_I * float(x))


def factorize(n: int) -> dict[int, int]:
    n = abs(int(n))
    if n == 0:
        raise ValueError("cannot factor 0")
    out: dict[int, int] = {}
    d = 2
    while d * d <= n:
        while n % d == 0:
            out[d] = out.get(d, 0) + 1
            n //= d
        d += 1 if d == 2 else 2
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def prime_divisors(n: int) -> list[int]:
    return sorted(factorize(n))


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    return factorize(n) == {n: 1}


def primes_up_to(n: int) -> list[int]:
    if n < 2:
        return []
    sieve = np.ones(n + 1, dtype=bool)
    sieve[:2] = False
    for i in range(2, int(n**0.5) + 1):
        if sieve[i]:
            sieve[i * i :: i] = False
    return [int(i) for i in np.nonzero(sieve)[0]]


def euler_phi(n: int) -> int:
    out = n
    for p in factorize(n):
        out = out // p * (p - 1)
    return out


def valuation(n, p: int) -> int:
    """p-adic valuation of a nonzero integer or Fraction."""
    if isinstance(n, Fraction):
        return valuation(n.numerator, p) - valuation(n.denominator, p)
    n = int(n)
    if n == 0:
        raise ValueError("valuation of 0")
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


def divisors(n: int) -> list[int]:
    ds = [1]
    for p, k in factorize(n).items():
        ds = [d * p**i for d in ds for i in range(k + 1)]
    return sorted(ds)


def inverse_mod(a: int, m: int) -> int:
    """Inverse of a modulo m in [0, m); modulus 1 gives 0."""
    if m == 1:
        return 0
    if math.gcd(a, m) != 1:
        raise ValueError(f"{a} is not invertible modulo {m}")
    return pow(a, -1, m)


def units_mod(m: int) -> list[int]:
    if m == 1:
        return [0]
    return [u for u in range(1, m) if math.gcd(u, m) == 1]


def _primitive_root_prime_power(p: int, k: int) -> int:
    pk = p**k
    order = p ** (k - 1) * (p - 1)
    qs = prime_divisors(order)
    for g in range(2, pk):
        if g % p == 0:
            continue
        if all(pow(g, order // r, pk) != 1 for r in qs):
            return g
    raise ArithmeticError(f"no primitive root mod {pk}")


@dataclass(frozen=True)
class _Component:
    """Cyclic factor of (Z/p^k)^x: generator (mod p^k), order, and a discrete-log table."""

    p: int
    k: int
    modulus: int
    generator: int
    order: int
    log: tuple  # log[x] for x mod p^k, -1 for non-units


def _cyclic_component(p: int, k: int, g: int, order: int) -> _Component:
    pk = p**k
    log = [-1] * pk
    x = 1
    for i in range(order):
        log[x] = i
        x = x * g % pk
    return _Component(p, k, pk, g, order, tuple(log))


@dataclass(frozen=True)
class UnitGroup:
    modulus: int
    generators: tuple[int, ...]
    orders: tuple[int, ...]
    # local description used for discrete logs: (p^k, [(gen mod p^k, order, table)])
    _local: tuple = field(repr=False, compare=False, default=())

    @property
    def order(self) -> int:
        return math.prod(self.orders)

    def dlog(self, x: int) -> tuple[int, ...] | None:
        """Exponent vector of x in the generators, or None if gcd(x, N) > 1."""
        if math.gcd(x, self.modulus) != 1:
            return None
        out = []
        for pk, comps in self._local:
            r = x % pk
            out.extend(_local_dlog(pk, comps, r))
        return tuple(out)


def _local_dlog(pk, comps, r):
    g, order, table = comps[0]
    if table is not None:
        return [table[r]]
    # 2-power modulus: r = (-1)^a 5^b
    a = 0 if r % 4 == 1 else 1
    if len(comps) == 1:
        return [a]
    table5 = comps[1][2]
    return [a, table5[r if a == 0 else (-r) % pk]]


@lru_cache(maxsize=None)
def unit_group(N: int) -> UnitGroup:
    """Generators and orders of (Z/NZ)^x from the CRT decomposition into prime powers."""
    if N < 1:
        raise ValueError("modulus must be positive")
    gens: list[int] = []
    orders: list[int] = []
    local = []
    for p, k in sorted(factorize(N).items()) if N > 1 else []:
        pk = p**k
        rest = N // pk
        comps = []
        if p == 2:
            if k == 1:
                continue
            comps.append((pk - 1, 2, None))
            if k >= 3:
                order5 = 2 ** (k - 2)
                table = [-1] * pk
                x = 1
                for i in range(order5):
                    table[x] = i
                    x = x * 5 % pk
                comps.append((5, order5, tuple(table)))
        else:
            g = _primitive_root_prime_power(p, k)
            order = pk // p * (p - 1)
            comps.append((g, order, _cyclic_component(p, k, g, order).log))
        for g, order, _ in comps:
            # lift: g mod p^k, 1 mod the cofactor
            lifted = g if rest == 1 else crt([g, 1], [pk, rest])
            gens.append(lifted)
            orders.append(order)
        local.append((pk, tuple(comps)))
    return UnitGroup(N, tuple(gens), tuple(orders), tuple(local))


@lru_cache(maxsize=None)
def _dlog_table(N: int) -> np.ndarray:
    """Row x holds the exponent vector of x (all -1 for non-units)."""
    G = unit_group(N)
    r = len(G.orders)
    table = -np.ones((N, max(r, 1)), dtype=np.int64)
    for x in range(N):
        v = G.dlog(x)
        if v is not None:
            table[x, :r] = v
            if r == 0:
                table[x, 0] = 0
    return table


@dataclass(frozen=True)
class DirichletCharacter:
    """chi mod N, chi(g_i) = e(exponents[i] / orders[i]) on the generators of unit_group(N)."""

    modulus: int
    exponents: tuple[int, ...]

    def __post_init__(self):
        G = unit_group(self.modulus)
        if len(self.exponents) != len(G.orders):
            raise ValueError("exponent vector does not match the unit group")
        object.__setattr__(
            self, "exponents", tuple(int(k) % o for k, o in zip(self.exponents, G.orders))
        )

    @property
    def group(self) -> UnitGroup:
        return unit_group(self.modulus)

    def __call__(self, x: int) -> complex:
        v = self.group.dlog(int(x) % self.modulus)
        if v is None:
            return 0j
        return e(Fraction(sum(Fraction(k * a, o) for k, a, o in zip(self.exponents, v, self.group.orders))))

    def values(self) -> np.ndarray:
        """Array of chi(x) for x = 0..N-1."""
        return _character_values(self)

    @property
    def is_trivial(self) -> bool:
        return all(k == 0 for k in self.exponents)

    @property
    def conductor(self) -> int:
        return _conductor(self)

    @property
    def is_primitive(self) -> bool:
        return self.conductor == self.modulus

    def conj(self) -> "DirichletCharacter":
        return DirichletCharacter(self.modulus, tuple(-k for k in self.exponents))

    def parity(self) -> int:
        """chi(-1) as +1 or -1."""
        return 1 if self(-1).real > 0 else -1

    def primitive(self) -> "DirichletCharacter":
        """The primitive character of modulus conductor(chi) inducing chi."""
        f = self.conductor
        vals = self.values()
        for psi in enumerate_characters(f):
            pv = psi.values()
            if all(abs(vals[x] - pv[x % f]) < 1e-9 for x in range(self.modulus) if math.gcd(x, self.modulus) == 1):
                return psi
        raise ArithmeticError("no inducing primitive character found")

    def __repr__(self) -> str:
        return f"DirichletCharacter(modulus={self.modulus}, exponents={self.exponents})"


@lru_cache(maxsize=4096)
def _character_values(chi: DirichletCharacter) -> np.ndarray:
    G = chi.group
    table = _dlog_table(chi.modulus)
    if not G.orders:
        out = np.ones(chi.modulus, dtype=complex)
        return out
    frac = np.zeros(chi.modulus)
    for i, (k, o) in enumerate(zip(chi.exponents, G.orders)):
        frac = frac + k * table[:, i] / o
    vals = np.exp(TWO_PI_I * frac)
    vals[table[:, 0] < 0] = 0
    vals.setflags(write=False)
    return vals


@lru_cache(maxsize=4096)
def _conductor(chi: DirichletCharacter) -> int:
    N = chi.modulus
    vals = chi.values()
    f = 1
    for p, k in factorize(N).items() if N > 1 else []:
        pk = p**k
        rest = N // pk
        # smallest j with chi trivial on {x = 1 mod p^j, x = 1 mod rest}
        for j in range(k + 1):
            pj = p**j
            ok = True
            for t in range(pk // pj):
                y = 1 + t * pj
                if y % p == 0:
                    continue
                x = crt([y, 1], [pk, rest]) if rest > 1 else y % N
                if abs(vals[x] - 1) > 1e-9:
                    ok = False
                    break
            if ok:
                f *= pj
                break
    return f


@lru_cache(maxsize=None)
def _enumerate(N: int) -> tuple[DirichletCharacter, ...]:
    G = unit_group(N)
    out = [DirichletCharacter(N, ())] if not G.orders else []
    if G.orders:
        for idx in np.ndindex(*G.orders):
            out.append(DirichletCharacter(N, tuple(int(i) for i in idx)))
    return tuple(out)


def enumerate_characters(N: int) -> list[DirichletCharacter]:
    """All phi(N) Dirichlet characters mod N, trivial character first."""
    return list(_enumerate(N))


def primitive_characters(N: int) -> list[DirichletCharacter]:
    return [chi for chi in _enumerate(N) if chi.is_primitive]


def trivial_character(N: int) -> DirichletCharacter:
    return _enumerate(N)[0]


def hecke_character_local_value(chi: DirichletCharacter, p: int, v: int) -> complex:
    """Value omega_p(y) = chi(p)^(-v) of the associated idele class character at an unramified p."""
    if chi.modulus % p == 0:
        raise ValueError(f"p={p} divides the modulus {chi.modulus}")
    return chi(p) ** (-v)


def gauss_sum_dirichlet(chi: DirichletCharacter) -> complex:
    """tau(chi) = sum_{x mod N} chi(x) e(x/N)."""
    N = chi.modulus
    x = np.arange(N)
    return complex(np.sum(chi.values() * np.exp(TWO_PI_I * x / N)))


def epsilon_inverse(chi: DirichletCharacter) -> complex:
    """Root number eps(1/2, chi^-1) = tau(chi*) / sqrt(f) for the primitive chi* of conductor f.

    Equivalently chi(-1) * conj(tau(conj chi*)) / sqrt(f).  The trivial character gives 1.
    This is the constant produced by the p-adic Gauss sum at the matching local character.
    """
    prim = chi.primitive()
    if prim.modulus == 1:
        return 1 + 0j
    return gauss_sum_dirichlet(prim) / math.sqrt(prim.modulus)


# hyper-Kloosterman sums


@dataclass(frozen=True)
class KloostermanSpec:
    n: int
    q: int
    c: tuple[int, ...] = ()
    d: tuple[int, ...] = ()

    def __post_init__(self):
        n = self.n
        if n < 2:
            raise ValueError("dimension n must be at least 2")
        if self.q < 1:
            raise ValueError("modulus q must be positive")
        c = tuple(self.c) if self.c else (1,) * (n - 2)
        d = tuple(self.d) if self.d else (1,) * (n - 2)
        object.__setattr__(self, "c", c)
        object.__setattr__(self, "d", d)
        if len(c) != n - 2 or len(d) != n - 2:
            raise ValueError("c and d must have n-2 entries")
        if any(x == 0 for x in c) or any(x <= 0 for x in d):
            raise ValueError("c entries must be nonzero and d entries positive")
        for j in range(n - 1, 1, -1):
            top = self.q * math.prod(abs(self.ci(i)) for i in range(2, n - j + 2))
            below = math.prod(self.di(i) for i in range(j + 1, n))
            if top % below or (top // below) % self.di(j):
                raise ValueError(f"divisibility chain broken at d_{j}")

    def ci(self, i: int) -> int:
        return self.c[i - 2]

    def di(self, i: int) -> int:
        return self.d[i - 2]

    def layer_modulus(self, j: int) -> int:
        """Modulus of alpha_j: q c_2...c_{n-j+1} / (d_{n-1}...d_j)."""
        top = self.q * math.prod(abs(self.ci(i)) for i in range(2, self.n - j + 2))
        return top // math.prod(self.di(i) for i in range(j, self.n))


@lru_cache(maxsize=4096)
def _units_and_inverses(m: int) -> tuple[np.ndarray, np.ndarray]:
    u = units_mod(m)
    inv = [inverse_mod(a, m) if m > 1 else 0 for a in u]
    return np.array(u, dtype=np.int64), np.array(inv, dtype=np.int64)


def kloosterman_classical(spec: KloostermanSpec, x: int, y: int) -> complex:
    """The nested (n-1)-dimensional Kloosterman sum KL(x, y; q, c, d).

    Layers alpha_j, j = n-1 down to 2, run over units modulo layer_modulus(j); inverses are
    taken at the modulus of the layer in which they appear.  For n = 2 there are no alpha
    variables and the value is the product over p | q of the local sums psi_p(x y / q),
    i.e. e(x y / q).
    """
    n, q = spec.n, spec.q
    if n == 2:
        from .padic import psi_p

        return complex(math.prod((psi_p(Fraction(x * y, q), p) for p in prime_divisors(q)), start=1 + 0j)) if q > 1 else 1 + 0j
    sign = -1 if n % 2 else 1
    top = n - 1
    m_top = spec.layer_modulus(top)
    u_top, _ = _units_and_inverses(m_top)
    first = np.exp(TWO_PI_I * ((sign * x * spec.di(top) * u_top) % q) / q) if q > 1 else np.ones(len(u_top))

    def inner(j: int, prev_inv: int, prev_mod: int) -> complex:
        # phase e(d_j alpha_j inv(alpha_{j+1}) / M_{j+1}) and, at j = 2, e(y inv(alpha_2) / M_2)
        mj = spec.layer_modulus(j)
        u, inv = _units_and_inverses(mj)
        num = (spec.di(j) * u * prev_inv) % prev_mod
        ph = num / prev_mod
        if j == 2:
            ph = ph + ((y * inv) % mj) / mj
            return complex(np.sum(np.exp(TWO_PI_I * ph)))
        total = 0j
        for a, a_inv, w in zip(u, inv, np.exp(TWO_PI_I * ph)):
            total += w * inner(j - 1, int(a_inv), mj)
        return total

    if top == 2:
        _, inv = _units_and_inverses(m_top)
        last = np.exp(TWO_PI_I * ((y * inv) % m_top) / m_top)
        return complex(np.sum(first * last))
    total = 0j
    u_top, inv_top = _units_and_inverses(m_top)
    for a_inv, w in zip(inv_top, first):
        total += w * inner(top - 1, int(a_inv), m_top)
    return total


def kloosterman_term_count(spec: KloostermanSpec) -> int:
    if spec.n == 2:
        return 1
    return math.prod(euler_phi(spec.layer_modulus(j)) for j in range(2, spec.n))


def s_f_sum(
    ell: int,
    m: int,
    a: int,
    q: int,
    n: int,
    twisted_root_numbers: Mapping[DirichletCharacter, complex],
) -> complex:
    """S_f(m; a/(ell q)): sum over primitive chi mod ell of
    chi(-1)^(n-1) chi(m abar q) eps(1/2, f x chi) eps(1/2, chi^-1)."""
    if math.gcd(a, ell) != 1 or math.gcd(q, ell) != 1:
        raise ValueError("a and q must be coprime to ell")
    abar = inverse_mod(a, ell)
    total = 0j
    for chi in primitive_characters(ell):
        if chi not in twisted_root_numbers:
            raise KeyError(f"missing twisted root number for {chi!r}")
        sign = chi(-1) ** (n - 1)
        total += sign * chi(m * abar * q) * twisted_root_numbers[chi] * epsilon_inverse(chi)
    return total


def crt(residues: Sequence[int], moduli: Sequence[int]) -> int:
    x, m = 0, 1
    for r, mi in zip(residues, moduli):
        t = ((r - x) * inverse_mod(m % mi, mi)) % mi if mi > 1 else 0
        x += m * t
        m *= mi
    return x % m
