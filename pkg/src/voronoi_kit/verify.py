"""Machine-checkable gates.

Each gate_* function runs one family of checks and returns a GateResult.  The thresholds are
the package's acceptance gates; run_suite() runs all of them in a fixed order.
"""

from __future__ import annotations

import itertools
import math
import time
from dataclasses import asdict, dataclass, field
from fractions import Fraction

import numpy as np

from .arith import KloostermanSpec, kloosterman_classical, primes_up_to, units_mod
from .bessel_arch import ArchRep, BumpFunction, bessel_transform_real
from .bessel_padic import (
    Modulus,
    bessel_closed_form_ap,
    bessel_closed_form_ox,
    bessel_general,
    bessel_support_bound,
    verify_duality,
)
from .geometric import shift_is_admissible, verify_geometric_identity
from .local_reps import (
    SatakeParams,
    TwistMinimal,
    Unramified,
    schur_bialternant,
    schur_jacobi_trudi,
    schur_tableaux,
    shintani_whittaker,
)
from .padic import (
    PadicShellFunction,
    enumerate_padic_characters,
    gauss_sum_padic,
    mellin_inverse_padic,
    mellin_padic,
)


@dataclass
class GateResult:
    name: str
    passed: bool
    error: float
    tol: float
    seconds: float
    details: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        out = asdict(self)
        out["error"] = float(self.error)
        return out

    def line(self) -> str:
        tag = "PASS" if self.passed else "FAIL"
        return f"{tag} {self.name}: error {self.error:.3g} (gate {self.tol:g}) in {self.seconds:.1f}s"


def _timed(name, tol, fn):
    t0 = time.perf_counter()
    err, details = fn()
    dt = time.perf_counter() - t0
    passed = bool(err <= tol) and details.pop("_ok", True)
    return GateResult(name, passed, float(err), tol, dt, details)


# p-adic Gauss sums and Mellin round trip


def gate_gauss(tol: float = 1e-10) -> GateResult:
    def run():
        worst, count = 0.0, 0
        rng = np.random.default_rng(0)
        for p in (2, 3, 5, 7):
            for chi in enumerate_padic_characters(p, 3):
                for v in range(-3, 2):
                    for u in {1, p - 1, int(rng.choice(units_mod(p**3)))}:
                        closed = gauss_sum_padic(u, v, chi, method="closed")
                        avg = gauss_sum_padic(u, v, chi, method="average")
                        worst = max(worst, abs(closed - avg))
                        count += 1
        return worst, {"cases": count}

    return _timed("gauss-sum closed form", tol, run)


def random_shell_function(rng, p: int, level: int, v_lo: int, width: int) -> PadicShellFunction:
    k = len(units_mod(p**level)) if level else 1
    shells = {v: rng.normal(size=k) + 1j * rng.normal(size=k) for v in range(v_lo, v_lo + width)}
    return PadicShellFunction(p, level, shells)


def gate_mellin(tol: float = 1e-12, count: int = 200, seed: int = 1) -> GateResult:
    def run():
        rng = np.random.default_rng(seed)
        worst = 0.0
        for _ in range(count):
            p = int(rng.choice([2, 3, 5, 7]))
            level = int(rng.integers(0, 3))
            width = int(rng.integers(1, 7))
            phi = random_shell_function(rng, p, level, int(rng.integers(-3, 3)), width)
            back = mellin_inverse_padic(mellin_padic(phi), level)
            worst = max(worst, phi.max_diff(back))
        return worst, {"functions": count}

    return _timed("p-adic Mellin round trip", tol, run)


# Bessel engine: duality, closed forms, support


def duality_grid(seed: int = 1):
    """(rep, zeta, label, phi) over the standard grid."""
    rng = np.random.default_rng(seed)
    for p in (2, 3, 5):
        for n in (2, 3):
            reps = [Unramified(SatakeParams(p, tuple(np.exp(2j * np.pi * rng.random(n)))))]
            reps += [TwistMinimal.synthetic(p, n, a, 4) for a in (3, 4, 5)]
            for rep in reps:
                for vz in (-2, -1, 0):
                    zeta = Modulus(1 if p == 2 else 2, vz)
                    k = p - 1
                    rand = PadicShellFunction(
                        p, 1, {0: rng.normal(size=k) + 1j * rng.normal(size=k), 1: rng.normal(size=k)}
                    )
                    yield rep, zeta, "units", PadicShellFunction.indicator_units(p)
                    yield rep, zeta, "ap1", PadicShellFunction.indicator_progression(p, 1)
                    yield rep, zeta, "random", rand


def gate_duality(tol: float = 1e-9, order: int = 40) -> GateResult:
    def run():
        worst, cases = 0.0, 0
        for rep, zeta, _, phi in duality_grid():
            B = bessel_general(rep, phi, zeta, order)
            for chi in enumerate_padic_characters(rep.p, 2):
                worst = max(worst, verify_duality(rep, phi, zeta, chi, order, bessel=B))
                cases += 1
        return worst, {"cases": cases, "order": order}

    return _timed("duality equation", tol, run)


def gate_closed_forms(tol: float = 1e-10, support_tol: float = 1e-12) -> GateResult:
    def run():
        w_ox = w_ap = w_sup = 0.0
        for rep, zeta, label, phi in duality_grid():
            B = bessel_general(rep, phi, zeta, 12)
            lo = bessel_support_bound(rep, zeta, phi)
            for v, arr in B.shells.items():
                if v < lo:
                    w_sup = max(w_sup, float(np.max(np.abs(arr))))
            if not isinstance(rep, TwistMinimal) or label == "random":
                continue
            Bl = B.lift(max(B.level, 1))
            for v in range(lo - 2, 3):
                for u in Bl.units:
                    if label == "units":
                        w_ox = max(w_ox, abs(bessel_closed_form_ox(rep, zeta, u, v) - Bl(u, v)))
                    else:
                        w_ap = max(w_ap, abs(bessel_closed_form_ap(rep, zeta, 1, u, v) - Bl(u, v)))
        ok = w_sup <= support_tol
        return max(w_ox, w_ap), {"ox": w_ox, "ap": w_ap, "below_support": w_sup, "_ok": ok}

    return _timed("closed forms vs engine", tol, run)


# geometric identity


GEOMETRIC_UNITS = {2: 1, 3: 2, 5: 3}


def geometric_grid(n: int):
    for p in (2, 3, 5):
        for vz in (-2, -1, 0):
            xis = [[Fraction(1)] * n]
            xis += [
                [Fraction(p) ** s if i == k else Fraction(1) for i in range(n)] for k in range(n) for s in (-1, 1)
            ]
            for xi in xis:
                for vy in range(4):
                    yield p, vz, xi, vy


def gate_geometric(tol: float = 1e-9, ns=(2, 3), seed: int = 0) -> GateResult:
    """Literal grid.  Points with a non-integral xi_2/xi_3 are tallied separately: there the
    brute-force integral vanishes and the closed form does not."""

    def run():
        rng = np.random.default_rng(seed)
        worst = worst_adm = worst_h = 0.0
        counts = {"admissible": 0, "inadmissible": 0, "failed": 0}
        failures = []
        for n in ns:
            duals = {p: SatakeParams(p, tuple(np.exp(2j * np.pi * rng.random(n)))) for p in (2, 3, 5)}
            for p, vz, xi, vy in geometric_grid(n):
                y = Fraction(p**vy * GEOMETRIC_UNITS[p])
                zeta = Fraction(GEOMETRIC_UNITS[p], p ** (-vz))
                r = verify_geometric_identity(p, y, zeta, xi, duals[p])
                worst = max(worst, r["residual"])
                if shift_is_admissible(p, xi):
                    counts["admissible"] += 1
                    worst_adm = max(worst_adm, r["residual"])
                else:
                    counts["inadmissible"] += 1
                    worst_h = max(worst_h, abs(r["lhs"]))
                if r["residual"] > tol:
                    counts["failed"] += 1
                    if len(failures) < 50:
                        failures.append({"n": n, "p": p, "v_zeta": vz, "xi": [str(x) for x in xi], "v_y": vy})
        details = {
            "counts": counts,
            "admissible_worst": worst_adm,
            "inadmissible_max_H": worst_h,
            "failures": failures,
        }
        return worst, details

    return _timed("geometric identity", tol, run)


# Schur


def gate_schur(tol: float = 1e-9, seed: int = 2) -> GateResult:
    def run():
        rng = np.random.default_rng(seed)
        worst, cases, bad_vanish = 0.0, 0, 0
        for n in range(1, 5):
            for lam in itertools.product(range(7), repeat=n):
                if sum(lam) > 6:
                    continue
                if any(lam[i] < lam[i + 1] for i in range(n - 1)):
                    mu = SatakeParams(3, tuple(np.exp(2j * np.pi * rng.random(n))))
                    if shintani_whittaker(lam, mu) != 0:
                        bad_vanish += 1
                    continue
                r = np.sqrt(rng.uniform(0.25, 4.0, n))
                t = r * np.exp(2j * np.pi * rng.random(n))
                vals = [schur_bialternant(lam, t), schur_jacobi_trudi(lam, t), schur_tableaux(lam, t)]
                scale = max(1.0, abs(vals[2]))
                worst = max(worst, max(abs(v - vals[2]) for v in vals) / scale)
                cases += 1
        return worst, {"partitions": cases, "nonvanishing_nondominant": bad_vanish, "_ok": bad_vanish == 0}

    return _timed("Schur triple oracle", tol, run)


# classical Kloosterman sums


def kloosterman_one_loop(x: int, y: int, q: int) -> complex:
    """S(x, y; q) by a plain loop."""
    total = 0j
    for u in range(q):
        if math.gcd(u, q) == 1:
            total += np.exp(2j * np.pi * ((x * u + y * pow(u, -1, q)) % q) / q)
    return total if q > 1 else 1 + 0j


def gate_kloosterman(tol: float = 1e-9, crt_pairs: int = 1500, seed: int = 3) -> GateResult:
    """One-loop equality for q <= 100, sampled CRT factorization up to q1 q2 <= 10^4, Weil bound
    for p <= 101."""

    def run():
        rng = np.random.default_rng(seed)
        w_loop = w_crt = 0.0
        weil_bad = 0
        for q in range(1, 101):
            spec = KloostermanSpec(3, q)
            xs = range(q) if q <= 30 else rng.integers(0, q, 12)
            ys = range(q) if q <= 30 else rng.integers(0, q, 12)
            for x, y in itertools.product(xs, ys):
                w_loop = max(w_loop, abs(kloosterman_classical(spec, int(x), int(y)) - kloosterman_one_loop(-int(x), int(y), q)))
        pairs = [
            (a, b)
            for a in range(2, 100)
            for b in range(a + 1, 10_000 // a + 1)
            if math.gcd(a, b) == 1
        ]
        pick = rng.choice(len(pairs), size=min(crt_pairs, len(pairs)), replace=False)
        for i in pick:
            q1, q2 = pairs[i]
            x, y = (int(z) for z in rng.integers(-50, 50, 2))
            whole = kloosterman_classical(KloostermanSpec(3, q1 * q2), x, y)
            i2, i1 = pow(q2, -1, q1), pow(q1, -1, q2)
            part = kloosterman_classical(KloostermanSpec(3, q1), x * i2, y * i2) * kloosterman_classical(
                KloostermanSpec(3, q2), x * i1, y * i1
            )
            w_crt = max(w_crt, abs(whole - part))
        for p in primes_up_to(101):
            spec = KloostermanSpec(3, p)
            for x, y in rng.integers(1, p, (10, 2)) if p > 2 else [(1, 1)]:
                if abs(kloosterman_classical(spec, int(x), int(y))) > 2 * math.sqrt(p) + 1e-9:
                    weil_bad += 1
        details = {"one_loop": float(w_loop), "crt": w_crt, "crt_pairs": len(pick), "weil_violations": weil_bad}
        details["_ok"] = weil_bad == 0
        return max(w_loop, w_crt), details

    return _timed("classical Kloosterman", tol, run)


# archimedean decay


def gate_arch_decay(min_exponent: float = 3.0, stability: float = 1e-6, floor: float = 1e-13) -> GateResult:
    """Fitted decay exponent of |B(y)| on y = 1, 2, ..., 128 for tempered n = 2 data.

    Values under `floor` (relative to the largest) are at rounding level and left out of the fit.
    """

    def run():
        rep = ArchRep.principal_series([0.3j, -0.3j])
        phi = BumpFunction.plateau(1, 2)
        ys = np.array([2.0**k for k in range(8)])
        res = bessel_transform_real(rep, phi, ys)
        res2 = bessel_transform_real(rep, phi, ys, T=2 * res.T)
        mags = np.abs(res.values)
        keep = mags > floor * mags.max()
        if keep.sum() >= 2:
            slope = np.polyfit(np.log(ys[keep]), np.log(mags[keep]), 1)[0]
        else:
            slope = -math.inf
        change = float(np.max(np.abs(res.values - res2.values)))
        exponent = float(-slope)
        details = {
            "exponent": exponent,
            "points_fitted": int(keep.sum()),
            "T": res.T,
            "doubling_change": change,
            "abs_values": mags.tolist(),
            "_ok": exponent >= min_exponent,
        }
        return change, details

    return _timed("archimedean decay", stability, run)


# end-to-end


def gate_voronoi_gl2(tol: float = 1e-4, qs=((1, 1), (3, 1), (5, 2), (5, 3)), n_max: int = 10_000) -> GateResult:
    from .voronoi import DeltaOracle, verify_voronoi_gl2

    def run():
        oracle = DeltaOracle(n_max)
        reports = [verify_voronoi_gl2(q, a, tol=tol, oracle=oracle) for q, a in qs]
        worst = max(max(r["rel_err"], r["tails"]["relative"]) for r in reports)
        return worst, {"reports": reports, "_ok": all(r["pass"] for r in reports)}

    return _timed("GL(2) Voronoi with Delta", tol, run)


REFINED_CASES = [
    # n, N, ell, q, a, c, conductor exponents, character index
    (2, 243, 9, 1, 1, (), {3: 5}, 0),
    (2, 243, 9, 5, 2, (), {3: 5}, 7),
    (2, 243 * 125, 9, 7, 4, (), {3: 5, 5: 3}, 0),
    (2, 81, 27, 2, 1, (), {3: 4}, 0),
    (2, 2025, 225, 1, 1, (), {3: 4, 5: 2}, 0),
    (3, 81, 9, 2, 1, (), {3: 4}, 0),
    (3, 81, 9, 5, 2, (2,), {3: 4}, 5),
    (3, 243, 9, 7, 2, (4,), {3: 5}, 0),
]
AP_CASES = [
    # n, N, M, ell, q, a, conductor exponents, c, character index
    (2, 27, 9, 1, 1, 1, {3: 3}, (), 0),
    (2, 243, 9, 9, 5, 2, {3: 5}, (), 0),
    (2, 27, 27, 9, 2, 1, {3: 3}, (), 0),
    (2, 243 * 25, 45, 9, 7, 2, {3: 5, 5: 2}, (), 0),
    (3, 81, 9, 9, 2, 1, {3: 4}, (), 0),
    (3, 81, 3, 9, 5, 2, {3: 4}, (2,), 3),
]


def _arch_for(n: int) -> ArchRep:
    return ArchRep.principal_series([0.3j, -0.3j] if n == 2 else [0.2j, 0.5j, -0.7j])


def refined_instance(case):
    from .arith import enumerate_characters
    from .voronoi import SatakeOracle, VoronoiInstance

    n, N, ell, q, a, c, aps, chi_idx = case
    models = {p: TwistMinimal.synthetic(p, n, ap, 4, seed=7) for p, ap in aps.items()}
    chi = enumerate_characters(N)[chi_idx]
    inst = VoronoiInstance(n, a, q, BumpFunction.plateau(1, 3), ell=ell, N=N, chi=chi, c=c, m_max=40)
    return inst, SatakeOracle(n, chi, seed=1), models


def ap_instance(case):
    from .arith import enumerate_characters, prime_divisors, valuation
    from .voronoi import SatakeOracle, VoronoiInstance

    n, N, M, ell, q, a, aps, c, chi_idx = case
    models = {p: TwistMinimal.synthetic(p, n, ap, 4, seed=11) for p, ap in aps.items()}
    chi = enumerate_characters(N)[chi_idx]
    phis = {p: PadicShellFunction.indicator_progression(p, valuation(M, p)) for p in prime_divisors(M)}
    inst = VoronoiInstance(n, a, q, BumpFunction.plateau(1, 3), ell=ell, N=N, M=M, chi=chi, c=c, phi_p=phis, m_max=40)
    return inst, SatakeOracle(n, chi, seed=2), models


def gate_refined(tol: float = 1e-8) -> GateResult:
    from .voronoi import assemble_rhs

    def run():
        rows = []
        for mode, cases, build in (("refined", REFINED_CASES, refined_instance), ("ap", AP_CASES, ap_instance)):
            for case in cases:
                inst, oracle, models = build(case)
                arch = _arch_for(inst.n)
                g = assemble_rhs(inst, oracle, models, arch, mode="general")
                r = assemble_rhs(inst, oracle, models, arch, mode=mode)
                rel = abs(g.value - r.value) / abs(g.value)
                rows.append(
                    {"mode": mode, "n": inst.n, "N": inst.N, "M": inst.M, "ell": inst.ell, "q": inst.q, "rel_err": float(rel)}
                )
        return max(r["rel_err"] for r in rows), {"cases": rows}

    return _timed("refined and AP modes vs general", tol, run)


GATES = {
    "gauss": gate_gauss,
    "mellin": gate_mellin,
    "duality": gate_duality,
    "closed-forms": gate_closed_forms,
    "geometric": gate_geometric,
    "schur": gate_schur,
    "kloosterman": gate_kloosterman,
    "arch-decay": gate_arch_decay,
    "voronoi-gl2": gate_voronoi_gl2,
    "refined": gate_refined,
}

# what each CLI target runs
TARGETS = {
    "duality": ["duality", "closed-forms"],
    "geometric": ["geometric"],
    "voronoi-gl2": ["voronoi-gl2"],
    "suite": list(GATES),
}


def jsonable(obj):
    """json.dump default= hook for numpy scalars and complex numbers."""
    if isinstance(obj, (np.floating, np.integer, np.bool_)):
        return obj.item()
    if isinstance(obj, complex):
        return {"re": obj.real, "im": obj.imag}
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    raise TypeError(f"not serializable: {type(obj).__name__}")


def run_suite(names=None, log=None) -> list[GateResult]:
    out = []
    for name in names or list(GATES):
        res = GATES[name]()
        if log:
            log(res.line())
        out.append(res)
    return out
