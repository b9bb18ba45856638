"""voronoi-kit command line.

Subcommands print JSON (or CSV where noted) to stdout, or to --out.  A JSON config file given
with --config supplies defaults: its top-level keys are subcommand names, each holding a map of
option names (dashes or underscores) to values.
"""

from __future__ import annotations

import argparse
import csv
import io
import itertools
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import verify as V
from .arith import KloostermanSpec, enumerate_characters, gauss_sum_dirichlet, kloosterman_classical, kloosterman_term_count


def _complex(z) -> dict:
    z = complex(z)
    return {"re": z.real, "im": z.imag}


def _ints(text: str) -> list[int]:
    return [int(x) for x in text.replace(",", " ").split()] if text else []


def _emit(obj, out: str | None):
    text = json.dumps(obj, indent=2, default=V.jsonable)
    if out:
        Path(out).write_text(text + "\n")
    else:
        print(text)


# arithmetic


def cmd_kloosterman(args) -> int:
    spec = KloostermanSpec(args.n, args.q, tuple(_ints(args.c)), tuple(_ints(args.d)))
    val = kloosterman_classical(spec, args.x, args.y)
    _emit({"value": _complex(val), "modulus": args.q, "terms": kloosterman_term_count(spec)}, args.out)
    return 0


def cmd_gauss(args) -> int:
    chars = enumerate_characters(args.modulus)
    if not 0 <= args.char < len(chars):
        raise SystemExit(f"character index must lie in [0, {len(chars)})")
    chi = chars[args.char]
    tau = gauss_sum_dirichlet(chi)
    _emit(
        {
            "value": _complex(tau),
            "modulus": args.modulus,
            "conductor": chi.conductor,
            "exponents": list(chi.exponents),
            "terms": args.modulus,
        },
        args.out,
    )
    return 0


def _load_satake(path):
    """{"n": 3, "satake": {"2": [[re, im], ...], ...}}"""
    from .local_reps import SatakeParams

    data = json.loads(Path(path).read_text())
    model = {int(p): SatakeParams(int(p), tuple(complex(a, b) for a, b in mu)) for p, mu in data["satake"].items()}
    n = int(data.get("n", len(next(iter(model.values())).mu)))
    return n, model


def cmd_hecke(args) -> int:
    from .local_reps import hecke_coefficient

    n, model = _load_satake(args.satake)
    if args.m:
        rows = [tuple(_ints(m)) for m in args.m]
    else:
        smooth = [k for k in range(1, args.m_max + 1) if _is_smooth(k, model)]
        rows = list(itertools.product(smooth, repeat=n - 1))
    buf = io.StringIO()
    w = csv.writer(buf)
    w.writerow([f"m{i}" for i in range(1, n)] + ["re", "im"])
    for m in rows:
        if len(m) != n - 1:
            raise SystemExit(f"index {m} needs {n - 1} entries")
        z = hecke_coefficient(model, m)
        w.writerow([*m, repr(z.real), repr(z.imag)])
    _write_text(buf.getvalue(), args.out)
    return 0


def _is_smooth(k: int, model) -> bool:
    for p in model:
        while k % p == 0:
            k //= p
    return k == 1


def _write_text(text: str, out):
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


# local transforms


def _padic_phi(spec: str, p: int):
    from .padic import PadicShellFunction

    if spec == "units":
        return PadicShellFunction.indicator_units(p)
    if spec.startswith("ap:"):
        return PadicShellFunction.indicator_progression(p, int(spec[3:]))
    if spec.startswith("json:"):
        return PadicShellFunction.from_json(Path(spec[5:]).read_text())
    raise SystemExit(f"unknown test function {spec!r}; use units, ap:k or json:FILE")


def cmd_bessel_p(args) -> int:
    from .bessel_padic import Modulus, bessel_general, bessel_support_bound, verify_duality
    from .local_reps import SatakeParams, TwistMinimal, Unramified, rep_from_json
    from .padic import enumerate_padic_characters

    p, n = args.p, args.n
    if args.rep == "unramified":
        rng = np.random.default_rng(args.seed)
        rep = Unramified(SatakeParams(p, tuple(np.exp(2j * np.pi * rng.random(n)))))
    elif args.rep == "minimal":
        rep = TwistMinimal.synthetic(p, n, args.a_pi, args.max_twist, seed=args.seed)
    elif args.rep.startswith("json:"):
        rep = rep_from_json(Path(args.rep[5:]).read_text())
    else:
        raise SystemExit("--rep must be unramified, minimal or json:FILE")
    phi = _padic_phi(args.phi, p)
    zeta = Modulus(args.zeta_unit, args.zeta_val)
    cutoff = args.cutoff
    B = bessel_general(rep, phi, zeta, cutoff)
    residuals = []
    for chi in enumerate_padic_characters(p, args.check_conductor):
        r = verify_duality(rep, phi, zeta, chi, bessel=B if cutoff >= 40 else None)
        residuals.append({"conductor": chi.conductor_exponent, "exponents": list(chi.dirichlet.exponents), "residual": r})
    _emit(
        {
            "p": p,
            "n": n,
            "rep": rep.to_json(),
            "zeta": {"unit": zeta.unit, "val": zeta.val},
            "support_bound": bessel_support_bound(rep, zeta, phi),
            "bessel": B.to_json(),
            "duality_residuals": residuals,
        },
        args.out,
    )
    return 0


def _arch_rep(spec: str):
    from .bessel_arch import ArchRep

    if spec.startswith("holomorphic:"):
        return ArchRep.holomorphic(int(spec.split(":", 1)[1]))
    if spec.startswith("principal:"):
        return ArchRep.principal_series([complex(x.replace("i", "j")) for x in spec.split(":", 1)[1].split(",")])
    return ArchRep.from_json(Path(spec).read_text())


def _bump(spec: str):
    from .bessel_arch import BumpFunction

    kind, _, rest = spec.partition(":")
    if kind != "plateau":
        raise SystemExit("only plateau:a,b[,ramp] test functions are built in")
    vals = [float(x) for x in rest.split(",")]
    return BumpFunction.plateau(*vals)


def _grid(spec: str) -> np.ndarray:
    if spec.startswith(("lin:", "log:")):
        kind, a, b, k = spec.split(":")
        a, b, k = float(a), float(b), int(k)
        return np.linspace(a, b, k) if kind == "lin" else np.geomspace(a, b, k)
    return np.array([float(x) for x in spec.split(",")])


def cmd_bessel_arch(args) -> int:
    from .bessel_arch import bessel_transform_real

    rep = _arch_rep(args.rep)
    phi = _bump(args.phi)
    ys = _grid(args.y_grid)
    res = bessel_transform_real(rep, phi, ys, sigma=args.sigma, T=args.height)
    buf = io.StringIO()
    w = csv.writer(buf)
    w.writerow(["y", "re", "im", "err_est"])
    for y, v, e in zip(ys, res.values, res.err_est):
        w.writerow([repr(float(y)), repr(float(v.real)), repr(float(v.imag)), repr(float(e))])
    _write_text(buf.getvalue(), args.out)
    if args.plot:
        from .plots import plot_bessel_arch

        plot_bessel_arch(ys, res.values, res.err_est, args.plot, f"{args.phi}, sigma={res.sigma}, T={res.T}")
    return 0


# global assembly


def _build_instance(cfg: dict):
    """VoronoiInstance, oracle, local models and ArchRep from a config mapping."""
    from .local_reps import TwistMinimal, Unramified
    from .padic import PadicShellFunction
    from .voronoi import DeltaOracle, SatakeOracle, VoronoiInstance, ingest_csv

    n = int(cfg.get("n", 2))
    N = int(cfg.get("N", 1))
    chi = enumerate_characters(N)[int(cfg.get("chi", 0))]
    osrc = cfg.get("oracle", {"delta": 10_000})
    if "delta" in osrc:
        oracle = DeltaOracle(int(osrc["delta"]))
    elif "satake" in osrc:
        oracle = SatakeOracle(n, chi, seed=int(osrc["satake"]))
    elif "csv" in osrc:
        oracle = ingest_csv(osrc["csv"], n, osrc.get("normalization", "hecke"), float(osrc.get("weight_shift", 0)))
    else:
        raise SystemExit("oracle must be one of delta, satake, csv")
    phi_p = {}
    for p, spec in cfg.get("phi_p", {}).items():
        phi_p[int(p)] = _padic_phi(spec, int(p))
    inst = VoronoiInstance(
        n,
        int(cfg.get("a", 1)),
        int(cfg.get("q", 1)),
        _bump(cfg.get("phi", "plateau:5,40")),
        ell=int(cfg.get("ell", 1)),
        N=N,
        M=int(cfg.get("M", 1)),
        chi=chi,
        c=tuple(cfg.get("c", ())),
        phi_p=phi_p,
        m_max=int(cfg.get("m_max", 1000)),
        r_span=int(cfg.get("r_span", 8)),
    )
    models = {}
    for p, spec in cfg.get("local", {}).items():
        p = int(p)
        if spec.get("type") == "twist_minimal":
            models[p] = TwistMinimal.synthetic(p, n, int(spec["a_pi"]), int(spec.get("max_twist", 4)), int(spec.get("seed", 0)))
        else:
            models[p] = Unramified(oracle.satake(p))
    for p in inst.primes:
        if p not in models:
            models[p] = Unramified(oracle.satake(p))
    arch = _arch_rep(cfg.get("arch", "holomorphic:12"))
    return inst, oracle, models, arch


def cmd_assemble(args) -> int:
    import time

    from .voronoi import TruncationError, assemble_lhs, assemble_rhs

    cfg = json.loads(Path(args.instance).read_text()) if args.instance else {}
    t0 = time.perf_counter()
    inst, oracle, models, arch = _build_instance(cfg)
    tol = float(cfg.get("tolerance", 1e-4))
    lhs = assemble_lhs(inst, oracle)
    try:
        rhs = assemble_rhs(inst, oracle, models, arch, mode=cfg.get("mode", "general"), tail_tol=cfg.get("tail_tol"))
    except TruncationError as exc:
        _emit({"error": str(exc)}, args.out)
        return 2
    rel = abs(lhs.value - rhs.value) / max(abs(lhs.value), 1e-300)
    report = {
        "lhs": _complex(lhs.value),
        "rhs": _complex(rhs.value),
        "rel_err": rel,
        "tails": {"m": rhs.tail_m, "r": rhs.tail_r},
        "terms": {"lhs": lhs.terms, "rhs": rhs.terms},
        "mode": rhs.mode,
        "timing": time.perf_counter() - t0,
        "pass": bool(rel <= tol),
    }
    _emit(report, args.out)
    return 0 if report["pass"] else 1


# gates


def _run_gates(names, log=True):
    return V.run_suite(names, log=(lambda s: print(s, file=sys.stderr)) if log else None)


def _failures(results):
    return [{"gate": r.name, "error": r.error, "tol": r.tol} for r in results if not r.passed]


def cmd_verify(args) -> int:
    results = _run_gates(V.TARGETS[args.target])
    payload = {"target": args.target, "passed": all(r.passed for r in results), "gates": [r.to_json() for r in results]}
    if args.json:
        Path(args.json).write_text(json.dumps(payload, indent=2, default=V.jsonable) + "\n")
    fails = _failures(results)
    if fails:
        print(json.dumps({"failures": fails}, default=V.jsonable))
        return 1
    return 0


def cmd_report(args) -> int:
    """Run gates and write suite.json, gates.csv and PNG figures into one directory."""
    from .bessel_arch import ArchRep, BumpFunction, bessel_transform_real
    from .plots import plot_bessel_arch, plot_gates, plot_voronoi

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    names = args.gates.split(",") if args.gates else V.TARGETS["suite"]
    results = _run_gates(names)
    (out / "suite.json").write_text(
        json.dumps({"passed": all(r.passed for r in results), "gates": [r.to_json() for r in results]}, indent=2, default=V.jsonable)
        + "\n"
    )
    with open(out / "gates.csv", "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["gate", "passed", "error", "tol", "seconds"])
        for r in results:
            w.writerow([r.name, r.passed, r.error, r.tol, round(r.seconds, 3)])
    plot_gates(results, out / "gates.png")

    ys = np.linspace(-6, 6, 241)
    ys = ys[ys != 0]
    res = bessel_transform_real(ArchRep.holomorphic(12), BumpFunction.plateau(5, 40), ys)
    with open(out / "bessel_arch.csv", "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["y", "re", "im", "err_est"])
        for y, v, e in zip(ys, res.values, res.err_est):
            w.writerow([y, v.real, v.imag, e])
    plot_bessel_arch(ys, res.values, res.err_est, out / "bessel_arch.png", "weight 12, plateau on [5, 40]")

    for r in results:
        if r.name.startswith("GL(2)"):
            reports = r.details["reports"]
            with open(out / "voronoi_gl2.csv", "w", newline="") as fh:
                w = csv.writer(fh)
                w.writerow(["q", "a", "lhs_re", "lhs_im", "rhs_re", "rhs_im", "rel_err", "tail_rel"])
                for rep in reports:
                    w.writerow([rep["q"], rep["a"], *rep["lhs"], *rep["rhs"], rep["rel_err"], rep["tails"]["relative"]])
            plot_voronoi(reports, out / "voronoi_gl2.png")
    fails = _failures(results)
    if fails:
        print(json.dumps({"failures": fails}, default=V.jsonable))
        return 1
    return 0


# checked after --config defaults are merged
REQUIRED = {"kloosterman": ("q",), "gauss": ("modulus",), "hecke": ("satake",), "bessel-p": ("p",), "bessel-arch": ("rep",)}


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="voronoi-kit", description=__doc__.splitlines()[0])
    ap.add_argument("--config", help="JSON file of per-subcommand defaults")
    sub = ap.add_subparsers(dest="command", required=True)

    k = sub.add_parser("kloosterman", help="classical hyper-Kloosterman sum KL(x, y; q, c, d)")
    k.add_argument("--n", type=int, default=3)
    k.add_argument("--q", type=int)
    k.add_argument("--c", default="", help="c_2,...,c_(n-1)")
    k.add_argument("--d", default="", help="d_2,...,d_(n-1)")
    k.add_argument("--x", type=int, default=1)
    k.add_argument("--y", type=int, default=1)
    k.set_defaults(func=cmd_kloosterman)

    g = sub.add_parser("gauss", help="Gauss sum of a Dirichlet character")
    g.add_argument("--modulus", type=int)
    g.add_argument("--char", type=int, default=0, help="index into the enumeration, trivial first")
    g.set_defaults(func=cmd_gauss)

    h = sub.add_parser("hecke", help="coefficient table from Satake data, CSV m1,...,re,im")
    h.add_argument("--satake", help='JSON {"n": n, "satake": {"p": [[re, im], ...]}}')
    h.add_argument("--m", action="append", help="one index vector m1,...,m_(n-1); repeatable")
    h.add_argument("--m-max", type=int, default=12, help="without --m: all smooth indices up to this")
    h.set_defaults(func=cmd_hecke)

    b = sub.add_parser("bessel-p", help="p-adic Bessel transform with duality residuals")
    b.add_argument("--p", type=int)
    b.add_argument("--n", type=int, default=2)
    b.add_argument("--rep", default="unramified", help="unramified, minimal or json:FILE")
    b.add_argument("--a-pi", type=int, default=3)
    b.add_argument("--max-twist", type=int, default=4)
    b.add_argument("--seed", type=int, default=0)
    b.add_argument("--zeta-val", type=int, default=None)
    b.add_argument("--zeta-unit", type=int, default=1)
    b.add_argument("--phi", default="units", help="units, ap:k or json:FILE")
    b.add_argument("--cutoff", type=int, default=40)
    b.add_argument("--check-conductor", type=int, default=2, help="duality residuals for a(chi) up to this")
    b.set_defaults(func=cmd_bessel_p)

    a = sub.add_parser("bessel-arch", help="archimedean Bessel transform, CSV y,re,im,err_est")
    a.add_argument("--rep", help="JSON file, holomorphic:k or principal:mu1,mu2,...")
    a.add_argument("--phi", default="plateau:1,2")
    a.add_argument("--y-grid", default="1,2,4,8,16,32,64,128", help="comma list, lin:a:b:k or log:a:b:k")
    a.add_argument("--sigma", type=float, default=None)
    a.add_argument("--height", type=float, default=None)
    a.add_argument("--plot", help="also write a PNG here")
    a.set_defaults(func=cmd_bessel_arch)

    s = sub.add_parser("assemble", help="both sides of the Voronoi formula for one instance")
    s.add_argument("--instance", help="JSON instance file (see README)")
    s.set_defaults(func=cmd_assemble)

    v = sub.add_parser("verify", help="run acceptance gates; exit 0 iff all pass")
    v.add_argument("target", choices=sorted(V.TARGETS))
    v.add_argument("--json", help="write the full report here")
    v.set_defaults(func=cmd_verify)

    r = sub.add_parser("report", help="gates plus JSON/CSV tables and PNG figures in one directory")
    r.add_argument("--out", default="report")
    r.add_argument("--gates", help="comma list of gate keys (default: all)")
    r.set_defaults(func=cmd_report)

    for p in (k, g, h, b, a, s):
        p.add_argument("--out", help="write output here instead of stdout")
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    if args.config:
        cfg = json.loads(Path(args.config).read_text()).get(args.command, {})
        sub = ap._subparsers._group_actions[0].choices[args.command]
        sub.set_defaults(**{key.replace("-", "_"): val for key, val in cfg.items()})
        args = ap.parse_args(argv)
    missing = [f"--{k.replace('_', '-')}" for k in REQUIRED.get(args.command, ()) if getattr(args, k) is None]
    if missing:
        ap.error(f"{args.command} needs {', '.join(missing)} (on the command line or in --config)")
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
