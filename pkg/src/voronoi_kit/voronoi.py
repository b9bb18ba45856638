"""Both sides of the classical GL(n) Voronoi formula over pluggable coefficient oracles.

Three dual-side modes are provided.  "general" runs the r-sum over the support reported by the
p-adic Bessel engine; "refined" collapses the primes dividing the level into the twisted
root-number sum S_f (twist-minimal data, square-full ell); "ap" uses the closed forms for
progression test functions.
"""

from __future__ import annotations

import csv
import itertools
import math
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

import numpy as np

from .arith import (
    DirichletCharacter,
    KloostermanSpec,
    divisors,
    e,
    enumerate_characters,
    factorize,
    inverse_mod,
    kloosterman_classical,
    prime_divisors,
    primitive_characters,
    s_f_sum,
    trivial_character,
    units_mod,
    valuation,
)
from .bessel_arch import ArchRep, BumpFunction, bessel_transform_real
from .bessel_padic import (
    Modulus,
    ap_support_shells,
    bessel_closed_form_ap,
    bessel_closed_form_ox,
    bessel_general,
    bessel_support_bound,
)
from .local_reps import SatakeParams, TwistMinimal, Unramified, hecke_coefficient, schur
from .padic import PadicCharacter, PadicShellFunction, enumerate_padic_characters


class TruncationError(ArithmeticError):
    pass


# coefficient oracles


def tau_coefficients(n_max: int) -> list[int]:
    """tau(1..n_max) from q prod (1 - q^m)^24.

    The pentagonal-number theorem gives prod (1 - q^m) sparsely; its 24th power f follows from
    k f_k = sum_j (25 j - k) e_j f_(k-j), the power recurrence of a series with e_0 = 1.
    Python integers keep everything exact.
    """
    if n_max < 1:
        return []
    if n_max > 10**6:
        raise ValueError("n_max above 10^6 is not supported")
    top = n_max - 1
    eta = {}
    k = 1
    while True:
        g1, g2 = k * (3 * k - 1) // 2, k * (3 * k + 1) // 2
        if g1 > top:
            break
        eta[g1] = (-1) ** k
        if g2 <= top:
            eta[g2] = (-1) ** k
        k += 1
    js = sorted(eta)
    f = [0] * (top + 1)
    f[0] = 1
    for k in range(1, top + 1):
        s = 0
        for j in js:
            if j > k:
                break
            s += (25 * j - k) * eta[j] * f[k - j]
        f[k] = s // k
    return f


class CoefficientOracle:
    """Hecke-normalized A(m_1, ..., m_(n-1)), A(1, ..., 1) = 1."""

    n: int = 2
    level: int = 1

    def coefficient(self, m: Sequence[int]) -> complex:
        raise NotImplementedError

    def __call__(self, *m: int) -> complex:
        return self.coefficient(m)

    def satake(self, p: int) -> SatakeParams:
        raise KeyError(f"no Satake data at p={p}")


class DeltaOracle(CoefficientOracle):
    """Ramanujan's Delta: A(m) = tau(m) / m^(11/2)."""

    def __init__(self, n_max: int = 10_000):
        self.n = 2
        self.level = 1
        self.n_max = n_max
        self.tau = tau_coefficients(n_max)

    def coefficient(self, m):
        (x,) = m
        x = abs(int(x))
        if x == 0:
            return 0j
        if x > self.n_max:
            raise KeyError(f"tau({x}) beyond the generated range {self.n_max}")
        return complex(self.tau[x - 1] / x**5.5)

    def satake(self, p):
        a = self.coefficient((p,))
        roots = np.roots([1, -a, 1])
        return SatakeParams(p, tuple(roots))


class SatakeOracle(CoefficientOracle):
    """Random tempered Satake data at p not dividing N with prod(mu) = conj(chi(p)); A vanishes
    off the integers prime to N.  Deterministic in the seed."""

    def __init__(self, n: int, chi: DirichletCharacter | None = None, seed: int = 0):
        self.n = n
        self.chi = chi or trivial_character(1)
        self.level = self.chi.modulus
        self.seed = seed
        self.model: dict[int, SatakeParams] = {}

    def satake(self, p):
        if self.level % p == 0:
            raise KeyError(f"p={p} divides the level")
        if p not in self.model:
            rng = np.random.default_rng([self.seed, p])
            mu = list(np.exp(2j * np.pi * rng.random(self.n - 1)))
            mu.append(np.conj(self.chi(p)) / np.prod(mu))
            self.model[p] = SatakeParams(p, tuple(mu))
        return self.model[p]

    def coefficient(self, m):
        m = [abs(int(x)) for x in m]
        if any(x == 0 for x in m):
            return 0j
        prod = math.prod(m)
        if math.gcd(prod, self.level) != 1:
            return 0j
        for p in prime_divisors(prod) if prod > 1 else []:
            self.satake(p)
        return hecke_coefficient(self.model, m)


class CsvOracle(CoefficientOracle):
    def __init__(self, n: int, table: dict[tuple[int, ...], complex], warnings: list[str] | None = None):
        self.n = n
        self.level = 1
        self.table = table
        self.warnings = warnings or []

    def coefficient(self, m):
        key = tuple(abs(int(x)) for x in m)
        if any(x == 0 for x in key):
            return 0j
        if key not in self.table:
            raise KeyError(f"coefficient {key} not in the table")
        return self.table[key]


def ingest_csv(path, n: int, normalization: str = "hecke", weight_shift: float = 0.0) -> CsvOracle:
    """Rows m_1,...,m_(n-1),re,im.  "raw" rows are divided by (m_1...m_(n-1))^weight_shift."""
    if normalization not in ("hecke", "raw"):
        raise ValueError("normalization must be 'hecke' or 'raw'")
    table: dict[tuple[int, ...], complex] = {}
    with open(path, newline="") as fh:
        for lineno, row in enumerate(csv.reader(fh), start=1):
            if not row or all(not c.strip() for c in row) or row[0].lstrip().startswith("#"):
                continue
            if len(row) != n + 1:
                raise ValueError(f"line {lineno}: expected {n + 1} fields, got {len(row)}")
            try:
                key = tuple(int(c) for c in row[: n - 1])
                val = complex(float(row[n - 1]), float(row[n]))
            except ValueError as exc:
                if lineno == 1 and not table:
                    continue  # header
                raise ValueError(f"line {lineno}: {exc}") from None
            if any(k <= 0 for k in key):
                raise ValueError(f"line {lineno}: indices must be positive")
            if key in table:
                raise ValueError(f"line {lineno}: duplicate row for {key}")
            if normalization == "raw":
                val = val / math.prod(key) ** weight_shift
            table[key] = val
    if not table:
        raise ValueError(f"{path}: no coefficient rows")
    one = (1,) * (n - 1)
    if one not in table or abs(table[one] - 1) > 1e-9:
        raise ValueError(f"{path}: A{one} must equal 1")
    warnings = []
    # tempered Hecke eigenvalues satisfy |A(p, 1, ..., 1)| <= n
    big = [k for k, v in table.items() if sum(x > 1 for x in k) == 1 and abs(v) > n * 1.01 and max(k) > 1]
    if big:
        warnings.append(
            f"{len(big)} entries exceed the tempered bound {n}, e.g. {big[0]}; the data may be raw, not Hecke-normalized"
        )
    return CsvOracle(n, table, warnings)


def export_csv(oracle: CoefficientOracle, path, indices: Sequence[Sequence[int]]) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        for m in indices:
            z = oracle.coefficient(m)
            w.writerow([*m, repr(z.real), repr(z.imag)])


# instances


def _rad(x: int) -> int:
    return math.prod(prime_divisors(x)) if x > 1 else 1


def _divides_power(ell: int, base: int) -> bool:
    return all(base % p == 0 for p in prime_divisors(ell)) if ell > 1 else True


@dataclass
class VoronoiInstance:
    n: int
    a: int
    q: int
    phi_inf: BumpFunction
    ell: int = 1
    N: int = 1
    M: int = 1
    chi: DirichletCharacter | None = None
    c: tuple[int, ...] = ()
    phi_p: dict[int, PadicShellFunction] = field(default_factory=dict)
    m_max: int = 1000
    r_span: int = 8  # shells kept above the support bound when the p-adic support is unbounded

    def __post_init__(self):
        n = self.n
        if n < 2:
            raise ValueError("n must be at least 2")
        self.c = tuple(self.c) if self.c else (1,) * (n - 2)
        if len(self.c) != n - 2 or any(x == 0 for x in self.c):
            raise ValueError("c needs n-2 nonzero entries")
        if self.a == 0 or self.q < 1 or self.ell < 1 or self.N < 1 or self.M < 1:
            raise ValueError("need a != 0 and ell, q, N, M >= 1")
        if math.gcd(self.a, self.ell * self.q) != 1:
            raise ValueError("(a, ell q) must be 1")
        if math.gcd(self.q, self.N * self.M) != 1:
            raise ValueError("(q, NM) must be 1")
        if not _divides_power(self.ell, self.N * self.M):
            raise ValueError("ell must divide (NM)^infinity")
        if math.gcd(math.prod(abs(x) for x in self.c), self.M * self.N) != 1:
            raise ValueError("(c_2 ... c_(n-1), MN) must be 1")
        self.chi = self.chi or trivial_character(self.N)
        if self.chi.modulus != self.N:
            raise ValueError("nebentypus must be a character mod N")
        want = set(prime_divisors(self.M)) if self.M > 1 else set()
        if set(self.phi_p) != want:
            raise ValueError(f"phi_p must be given exactly at the primes {sorted(want)} dividing M")

    @property
    def primes(self) -> list[int]:
        return prime_divisors(self.N * self.M) if self.N * self.M > 1 else []

    @property
    def lam(self) -> int:
        n = self.n
        return math.lcm(self.ell, self.N) * self.ell ** (n - 1) * _rad(self.N * self.M) ** n

    def zeta_at(self, p: int) -> Modulus:
        """a / (ell q) as a p-adic unit times a power of p."""
        num, den = self.a, self.ell * self.q
        v = valuation(abs(num), p) - valuation(den, p)
        num //= p ** valuation(abs(num), p)
        den //= p ** valuation(den, p)
        mod = p**40
        return Modulus((num * inverse_mod(den, mod)) % mod, v)

    def d_chains(self) -> list[tuple[int, ...]]:
        """(d_2, ..., d_(n-1)) with d_(n-1) | q c_2, d_(n-2) | q c_2 c_3 / d_(n-1), ..."""
        n, q, c = self.n, self.q, self.c
        if n == 2:
            return [()]
        out = []

        def rec(j, chosen):
            if j < 2:
                out.append(tuple(reversed(chosen)))
                return
            top = q * math.prod(abs(c[i - 2]) for i in range(2, n - j + 2))
            below = math.prod(chosen)
            for dj in divisors(top // below):
                rec(j - 1, chosen + [dj])

        rec(n - 1, [])
        return out


# local data


def local_coords(y: Fraction, p: int, level: int) -> tuple[int, int]:
    """(unit class mod p^level, valuation) of a nonzero rational."""
    num, den = y.numerator, y.denominator
    vn, vd = valuation(abs(num), p), valuation(den, p)
    num //= p**vn
    den //= p**vd
    if level == 0:
        return 1, vn - vd
    mod = p**level
    return (num * inverse_mod(den % mod, mod)) % mod, vn - vd


def kirillov_newvector(rep, phi: PadicShellFunction | None = None) -> PadicShellFunction:
    """Phi_p(y) = phi_p(y) W_p(a(y)) for the newvector W_p.

    Twist-minimal data (L = 1) has W = Char of the units.  Unramified data has the spherical
    W(a(p^k)) = p^(-k(n-1)/2) s_(k,0,...,0)(mu), k >= 0.
    """
    p, n = rep.p, rep.n
    if isinstance(rep, TwistMinimal):
        if phi is None:
            return PadicShellFunction.indicator_units(p)
        return PadicShellFunction(p, phi.level, {0: phi.shells[0]} if 0 in phi.shells else {})
    if phi is None:
        raise ValueError("an unramified prime needs a compactly supported phi_p")
    out = {}
    for v, arr in phi.shells.items():
        if v < 0:
            continue
        w = p ** (-v * (n - 1) / 2) * schur((v,) + (0,) * (n - 1), rep.satake.mu)
        out[v] = arr * w
    return PadicShellFunction(p, phi.level, out)


@dataclass
class _LocalTable:
    p: int
    bessel: PadicShellFunction
    shells: list[int]
    truncated: bool  # support reaches the cutoff, so higher shells were dropped


def _local_tables(inst: VoronoiInstance, local_models: Mapping[int, object]) -> tuple[dict[int, _LocalTable], int]:
    """Bessel tables at p | MN and the denominator lambda with B_p(r / lambda ...) supported on
    integers r.  lambda is the standard lambda_ell unless the engine finds lower shells (test
    functions of level >= 2), in which case it is enlarged at that prime."""
    out = {}
    lam = inst.lam
    for p in inst.primes:
        rep = local_models[p]
        Phi = kirillov_newvector(rep, inst.phi_p.get(p))
        zeta = inst.zeta_at(p)
        v_low = bessel_support_bound(rep, zeta, Phi)
        cutoff = v_low + inst.r_span if isinstance(rep, Unramified) else -v_low + 4 * rep.n
        B = bessel_general(rep, Phi, zeta, cutoff)
        shells = sorted(v for v, arr in B.shells.items() if np.max(np.abs(arr)) > 1e-13)
        out[p] = _LocalTable(p, B, shells, bool(shells) and shells[-1] >= cutoff - 1)
        if shells:
            short = -(shells[0] + valuation(lam, p))
            if short > 0:
                lam *= p**short
    return out, lam


# right-hand side


class _ArchCache:
    def __init__(self, arch: ArchRep, phi: BumpFunction):
        self.arch, self.phi = arch, phi
        self.values: dict[Fraction, complex] = {}
        self.err = 0.0

    def fill(self, ys):
        todo = sorted({y for y in ys if y not in self.values})
        if todo:
            res = bessel_transform_real(self.arch, self.phi, np.array([float(y) for y in todo]))
            for y, v in zip(todo, res.values):
                self.values[y] = complex(v)
            self.err = max(self.err, float(np.max(res.err_est)))

    def __getitem__(self, y):
        return self.values[y]


@dataclass
class RhsReport:
    value: complex
    tail_m: float
    tail_r: float
    terms: int
    mode: str
    timing: float

    @property
    def tail(self) -> float:
        return self.tail_m + self.tail_r


class _KLCache:
    def __init__(self, inst):
        self.inst = inst
        self.cache = {}

    def __call__(self, x, m, d):
        inst = self.inst
        spec = KloostermanSpec(inst.n, inst.q, inst.c, d)
        y_mod = spec.layer_modulus(2) if inst.n > 2 else inst.q
        key = (x % inst.q, m % y_mod, d)
        if key not in self.cache:
            self.cache[key] = kloosterman_classical(spec, x, m)
        return self.cache[key]


def _chi_factor(inst, m, d):
    """chi(mbar q c_2...c_(n-1) / (d_(n-1)...d_2))^-1."""
    N = inst.N
    if N == 1:
        return 1 + 0j
    num = inst.q * math.prod(abs(x) for x in inst.c)
    den = math.prod(d)
    X = num // den
    return complex(np.conj(inst.chi((inverse_mod(m % N, N) * X) % N)))


def _d_weight(inst, d):
    n = inst.n
    return math.prod(d[i - 2] ** (i * (n - i) / 2) for i in range(2, n))


def _y_shape(inst, d) -> Fraction:
    """prod d_i^i / c_i^(n-i) / q^n."""
    n = inst.n
    num = math.prod(d[i - 2] ** i for i in range(2, n))
    den = math.prod(inst.c[i - 2] ** (n - i) for i in range(2, n)) * inst.q**n
    return Fraction(num, den)


def _c_prefactor(inst):
    n = inst.n
    return math.prod(abs(inst.c[i - 2]) ** ((n - i) * (i / 2 - 1)) for i in range(2, n))


def _dual_ms(inst):
    MN = inst.M * inst.N
    pos = [m for m in range(1, inst.m_max + 1) if math.gcd(m, MN) == 1]
    return [s * m for m in pos for s in (1, -1)]


def _coefficient(oracle, d, m):
    return oracle.coefficient(tuple(reversed(d)) + (m,))


def assemble_rhs(
    inst: VoronoiInstance,
    oracle: CoefficientOracle,
    local_models: Mapping[int, object] | None,
    arch: ArchRep,
    mode: str = "general",
    arch_cache: _ArchCache | None = None,
    tail_tol: float | None = None,
) -> RhsReport:
    t0 = time.perf_counter()
    local_models = local_models or {}
    cache = arch_cache or _ArchCache(arch, inst.phi_inf)
    if mode == "general":
        terms = _general_terms(inst, oracle, local_models)
    elif mode == "refined":
        terms = _refined_terms(inst, oracle, local_models)
    elif mode == "ap":
        terms = _ap_terms(inst, oracle, local_models)
    else:
        raise ValueError(f"unknown mode {mode!r}")
    cache.fill(t[1] for t in terms)
    total = 0j
    tail_m = tail_r = 0.0
    for m, y, w, r_last in terms:
        z = w * cache[y]
        total += z
        if abs(m) > inst.m_max // 2:
            tail_m += abs(z)
        if r_last:
            tail_r += abs(z)
    rep = RhsReport(total, tail_m, tail_r, len(terms), mode, time.perf_counter() - t0)
    if tail_tol is not None and rep.tail > tail_tol * max(abs(total), 1e-300):
        hint = f"m_max={2 * inst.m_max}" if tail_m >= tail_r else f"r_span={2 * inst.r_span}"
        raise TruncationError(f"tail estimate {rep.tail:.3g} above tolerance; try {hint}")
    return rep


def _general_terms(inst, oracle, local_models):
    """(m, Y, weight without B_inf, in last r shell) for the general formula."""
    n, q = inst.n, inst.q
    tables, lam = _local_tables(inst, local_models)
    pref = q ** (n - 2) * _c_prefactor(inst)
    abar_lam = inverse_mod(inst.a * lam, q) if q > 1 else 0
    # r runs over products of the allowed prime-power exponents
    choices = []
    for p, t in tables.items():
        vp = valuation(lam, p)
        choices.append([(p, v + vp, t.truncated and v == t.shells[-1]) for v in t.shells])
    rs = []
    for combo in itertools.product(*choices):
        r = math.prod(p**x for p, x, _ in combo)
        rs.append((r, any(last for _, _, last in combo)))
    kl = _KLCache(inst)
    out = []
    for d in inst.d_chains():
        shape = _y_shape(inst, d)
        dw = _d_weight(inst, d)
        for m in _dual_ms(inst):
            A = _coefficient(oracle, d, m)
            if A == 0:
                continue
            base = pref * _chi_factor(inst, m, d) * A / (abs(m) ** ((n - 1) / 2) * dw)
            for r, last in rs:
                Y = Fraction(r * m, lam) * shape
                loc = 1 + 0j
                for p, t in tables.items():
                    u, v = local_coords(Y, p, t.bessel.level)
                    loc *= t.bessel(u, v)
                    if loc == 0:
                        break
                if loc == 0:
                    continue
                x = (abar_lam * inst.ell * r) % q if q > 1 else 0
                out.append((m, Y, base * loc * kl(x, m, d), last))
    return out


def _primitive_local_components(ell: int):
    """Map each primitive chi mod ell to its tuple of local p-adic components."""
    ps = prime_divisors(ell)
    locals_ = []
    for p in ps:
        c = valuation(ell, p)
        locals_.append([chi for chi in enumerate_padic_characters(p, c) if chi.conductor_exponent == c])
    us = units_mod(ell)
    table = {}
    for combo in itertools.product(*locals_):
        vals = tuple(np.round(np.prod([[chi(u) for u in us] for chi in combo], axis=0), 9))
        table[vals] = combo
    out = {}
    for chi in primitive_characters(ell):
        vals = tuple(np.round([chi(u) for u in us], 9))
        out[chi] = table[vals]
    return out


def synthetic_root_numbers(inst: VoronoiInstance, local_models) -> dict[DirichletCharacter, complex]:
    """eps_fin(f x chi) for primitive chi mod ell, assembled from twist-minimal local data.

    Idelically, the component at p | ell picks up chi_p evaluated at the prime-to-p part of
    [N, ell^n], and primes p | N prime to ell contribute their untwisted eps0.
    """
    n, N, ell = inst.n, inst.N, inst.ell
    big = math.lcm(N, ell**n)
    out = {}
    rest = math.prod(complex(local_models[p].eps0) for p in prime_divisors(N) if ell % p)
    for chi, comps in _primitive_local_components(ell).items():
        z = rest
        for chi_p in comps:
            p = chi_p.p
            rep = local_models[p]
            top = max(rep.a_pi, n * chi_p.conductor_exponent)
            z *= complex(rep.twists[chi_p]) * np.conj(chi_p(big // p**top))
        out[chi] = z
    return out


def _refined_terms(inst, oracle, local_models):
    n, q, N, ell = inst.n, inst.q, inst.N, inst.ell
    if inst.M != 1:
        raise ValueError("refined mode has no test functions at finite places (M = 1)")
    if ell == 1 or any(valuation(ell, p) < 2 for p in prime_divisors(ell)):
        raise ValueError("refined mode needs ell > 1 divisible by the square of each prime factor")
    for p in prime_divisors(N):
        if not isinstance(local_models.get(p), TwistMinimal):
            raise ValueError(f"refined mode needs twist-minimal data at p={p}")
        if local_models[p].a_pi != valuation(N, p):
            raise ValueError(f"conductor exponent at p={p} must equal v_p(N)")
    big = math.lcm(N, ell**n)
    eps = synthetic_root_numbers(inst, local_models)
    pref = big ** ((n - 2) / 2) * ell**-0.5 * q ** (n - 2) * _c_prefactor(inst)
    for p in prime_divisors(ell):
        pref /= 1 - 1 / p
    x = (inverse_mod(inst.a * big, q) * ell) % q if q > 1 else 0
    qbar_n = pow(inverse_mod(q, ell), n, ell)
    cbar = [inverse_mod(ci % ell, ell) for ci in inst.c]
    kl = _KLCache(inst)
    sf_cache = {}
    out = []
    for d in inst.d_chains():
        shape = _y_shape(inst, d)
        dw = _d_weight(inst, d)
        # the character argument picks up q^(1-n) prod d_i^i c_i^-(n-i) from the dual variable
        dc = math.prod(d[i - 2] ** i * cbar[i - 2] ** (n - i) for i in range(2, n)) % ell
        for m in _dual_ms(inst):
            A = _coefficient(oracle, d, m)
            if A == 0:
                continue
            m_eff = (m * qbar_n * dc) % ell
            if m_eff not in sf_cache:
                sf_cache[m_eff] = s_f_sum(ell, m_eff, inst.a, q, n, eps)
            w = pref * sf_cache[m_eff] * kl(x, m, d) * _chi_factor(inst, m, d) * A / (abs(m) ** ((n - 1) / 2) * dw)
            out.append((m, Fraction(m, big) * shape, w, False))
    return out


def _ap_terms(inst, oracle, local_models):
    n, q = inst.n, inst.q
    N, M = inst.N, inst.M
    for p in inst.primes:
        if not isinstance(local_models.get(p), TwistMinimal):
            raise ValueError(f"progression mode needs twist-minimal data at p={p}")
    ks = {}
    for p, phi in inst.phi_p.items():
        k = valuation(M, p)
        if phi.allclose(PadicShellFunction.indicator_progression(p, k)) is False:
            raise ValueError(f"phi_{p} must be the indicator of 1 + {p}^{k} Z_p")
        ks[p] = k
    # support shells -max(a, n r') give r = prod p^max(a, n r')
    choices = []
    for p in inst.primes:
        rep, zeta = local_models[p], inst.zeta_at(p)
        if p in ks:
            shells = ap_support_shells(rep, zeta, ks[p])
        else:
            c = 0 if zeta.is_integral else -zeta.val
            shells = {-rep.a_pi} if c == 0 else {-rep.a_pi, -max(rep.a_pi, n * c)}
        choices.append([(p, -v) for v in sorted(shells)])
    pref = q ** (n - 2) * _c_prefactor(inst)
    kl = _KLCache(inst)
    out = []
    for d in inst.d_chains():
        shape = _y_shape(inst, d)
        dw = _d_weight(inst, d)
        for m in _dual_ms(inst):
            A = _coefficient(oracle, d, m)
            if A == 0:
                continue
            base = pref * _chi_factor(inst, m, d) * A / (abs(m) ** ((n - 1) / 2) * dw)
            for combo in itertools.product(*choices):
                r = math.prod(p**s for p, s in combo)
                Y = Fraction(m, r) * shape
                loc = 1 + 0j
                for p in inst.primes:
                    rep, zeta = local_models[p], inst.zeta_at(p)
                    u, v = local_coords(Y, p, 40)
                    if p in ks:
                        loc *= bessel_closed_form_ap(rep, zeta, ks[p], u, v)
                    else:
                        loc *= bessel_closed_form_ox(rep, zeta, u, v)
                if loc == 0:
                    continue
                x = (inverse_mod(inst.a * r, q) * inst.ell) % q if q > 1 else 0
                out.append((m, Y, base * loc * kl(x, m, d), False))
    return out


# left-hand side


@dataclass
class LhsReport:
    value: complex
    terms: int


def assemble_lhs(inst: VoronoiInstance, oracle: CoefficientOracle) -> LhsReport:
    """sum over m of e(am/(ell q)) A(m, c_2, ...) / |m|^((n-1)/2) phi_inf(m) prod phi_p(m)."""
    n = inst.n
    lo, hi = math.floor(inst.phi_inf.a), math.ceil(inst.phi_inf.b)
    total, count = 0j, 0
    for m in range(max(lo, 1), hi + 1):
        w = float(inst.phi_inf(m))
        if w == 0:
            continue
        for p, phi in inst.phi_p.items():
            w *= phi(*local_coords(Fraction(m), p, phi.level))
            if w == 0:
                break
        if w == 0:
            continue
        A = oracle.coefficient((m,) + tuple(inst.c))
        total += e(Fraction(inst.a * m, inst.ell * inst.q)) * A / m ** ((n - 1) / 2) * w
        count += 1
    return LhsReport(total, count)


# end-to-end GL(2) check with Delta


def verify_voronoi_gl2(
    q: int,
    a: int,
    phi: BumpFunction | None = None,
    tol: float = 1e-4,
    n_max: int = 10_000,
    m_max: int | None = None,
    oracle: DeltaOracle | None = None,
) -> dict:
    """LHS against RHS for Delta at level 1, ell = M = 1."""
    t0 = time.perf_counter()
    phi = phi or BumpFunction.plateau(5, 40)
    oracle = oracle or DeltaOracle(n_max)
    # B_inf(m/q^2) decays fast once m/q^2 is a few hundred
    m_max = m_max or min(oracle.n_max, 400 * q * q)
    inst = VoronoiInstance(2, a, q, phi, m_max=m_max)
    lhs = assemble_lhs(inst, oracle)
    rhs = assemble_rhs(inst, oracle, {}, ArchRep.holomorphic(12))
    rel = abs(lhs.value - rhs.value) / abs(lhs.value)
    tail_rel = rhs.tail / abs(lhs.value)
    return {
        "q": q,
        "a": a,
        "lhs": [lhs.value.real, lhs.value.imag],
        "rhs": [rhs.value.real, rhs.value.imag],
        "rel_err": rel,
        "tails": {"m": rhs.tail_m, "r": rhs.tail_r, "relative": tail_rel},
        "m_max": m_max,
        "terms": {"lhs": lhs.terms, "rhs": rhs.terms},
        "timing": time.perf_counter() - t0,
        "pass": bool(rel <= tol and tail_rel <= tol),
    }
