import numpy as np
import pytest

from voronoi_kit.bessel_padic import (
    Modulus,
    ap_support_shells,
    bessel_closed_form_ap,
    bessel_closed_form_ox,
    bessel_general,
    bessel_support_bound,
    trivial_bound,
    twist_by_modulus,
    verify_duality,
)
from voronoi_kit.local_reps import SatakeParams, TwistMinimal, Unramified
from voronoi_kit.padic import PadicShellFunction, enumerate_padic_characters, psi_p
from fractions import Fraction


def unitary_rep(p, n, seed=0):
    rng = np.random.default_rng([seed, p, n])
    return Unramified(SatakeParams(p, tuple(np.exp(2j * np.pi * rng.random(n)))))


def chars_of_conductor(p, a):
    return [c for c in enumerate_padic_characters(p, a) if c.conductor_exponent == a]


def test_twist_integral_modulus_is_identity():
    phi = PadicShellFunction.indicator_units(5)
    assert twist_by_modulus(phi, Modulus(3, 0)).max_diff(phi) == 0
    assert twist_by_modulus(phi, Modulus(1, None)) is phi


def test_twist_by_p_inverse():
    p = 5
    tw = twist_by_modulus(PadicShellFunction.indicator_units(p), Modulus(2, -1))
    assert tw.level == 1
    for u in tw.units:
        assert abs(tw(u, 0) - psi_p(Fraction(2 * u, p), p)) < 1e-12


def test_twist_is_linear():
    rng = np.random.default_rng(1)
    z = Modulus(7, -2)
    f = PadicShellFunction(3, 1, {0: rng.normal(size=2), 1: rng.normal(size=2)})
    g = PadicShellFunction(3, 2, {0: rng.normal(size=6)})
    s = PadicShellFunction(3, 2, {0: 2 * f.lift(2).shells[0] - 3 * g.shells[0], 1: 2 * f.lift(2).shells[1]})
    lhs = twist_by_modulus(s, z)
    tf, tg = twist_by_modulus(f, z).lift(2), twist_by_modulus(g, z).lift(2)
    rhs = PadicShellFunction(3, 2, {0: 2 * tf.shells[0] - 3 * tg.shells[0], 1: 2 * tf.shells[1]})
    assert lhs.max_diff(rhs) < 1e-12


def test_duality_zero_function():
    rep = unitary_rep(3, 2)
    zero = PadicShellFunction(3, 0, {})
    for chi in enumerate_padic_characters(3, 1):
        assert verify_duality(rep, zero, Modulus(1, None), chi, 20) == 0


def test_duality_unramified_examples():
    rep = unitary_rep(5, 2, 3)
    phi = PadicShellFunction.indicator_units(5)
    triv = enumerate_padic_characters(5, 0)[0]
    assert verify_duality(rep, phi, Modulus(1, None), triv, 40) <= 1e-9


def test_duality_twist_minimal_example():
    rep = TwistMinimal.synthetic(3, 3, 4, 4)
    phi = PadicShellFunction.indicator_units(3)
    for chi in chars_of_conductor(3, 2):
        assert verify_duality(rep, phi, Modulus(2, -2), chi, 40) <= 1e-9


def test_bessel_is_linear():
    rep = TwistMinimal.synthetic(3, 2, 3, 4)
    z = Modulus(2, -1)
    f = PadicShellFunction.indicator_units(3).lift(1)
    g = PadicShellFunction.indicator_progression(3, 1)
    s = PadicShellFunction(3, 1, {0: 2 * f.shells[0] + 5j * g.shells[0]})
    Bs = bessel_general(rep, s, z, 10)
    Bf, Bg = bessel_general(rep, f, z, 10), bessel_general(rep, g, z, 10)
    combo = PadicShellFunction(
        3, Bs.level, {v: 2 * Bf.lift(Bs.level).shells.get(v, 0) + 5j * Bg.lift(Bs.level).shells.get(v, 0) for v in Bs.shells}
    )
    assert Bs.max_diff(combo) < 1e-12


def test_support_bound_respected():
    for p in (2, 3, 5):
        for rep in (unitary_rep(p, 3), TwistMinimal.synthetic(p, 3, 4, 4)):
            for vz in (None, 0, -1, -2):
                z = Modulus(1, vz)
                phi = PadicShellFunction.indicator_units(p)
                B = bessel_general(rep, phi, z, 6)
                lo = bessel_support_bound(rep, z, phi)
                for v, arr in B.shells.items():
                    if v < lo:
                        assert np.max(np.abs(arr)) <= 1e-12
    with pytest.raises(ValueError):
        bessel_general(unitary_rep(3, 2), PadicShellFunction.indicator_units(3), Modulus(1, 0), -10)


def test_support_bound_for_level_two_progression():
    # a level-2 progression behaves like |zeta| = p^2 for the support
    rep = unitary_rep(2, 2, 1)
    phi = PadicShellFunction.indicator_progression(2, 2)
    z = Modulus(1, None)
    B = bessel_general(rep, phi, z, 4)
    lo = bessel_support_bound(rep, z, phi)
    live = [v for v, arr in B.shells.items() if np.max(np.abs(arr)) > 1e-12]
    assert min(live) >= lo


def test_ox_closed_form_equals_engine():
    for p, n, a in [(3, 3, 4), (5, 2, 3), (2, 3, 5)]:
        rep = TwistMinimal.synthetic(p, n, a, 4)
        for vz in (0, -1, -2):
            z = Modulus(2 if p != 2 else 3, vz)
            B = bessel_general(rep, PadicShellFunction.indicator_units(p), z, 8).lift(max(1, -vz))
            for v in range(bessel_support_bound(rep, z) - 1, 3):
                for u in B.units:
                    assert abs(bessel_closed_form_ox(rep, z, u, v) - B(u, v)) < 1e-10


def test_ap_closed_form_example_and_support():
    rep = TwistMinimal.synthetic(3, 3, 4, 4)
    z = Modulus(2, -1)
    B = bessel_general(rep, PadicShellFunction.indicator_progression(3, 1), z, 8)
    allowed = ap_support_shells(rep, z, 1)
    for v in range(-14, 4):
        for u in B.units:
            c = bessel_closed_form_ap(rep, z, 1, u, v)
            assert abs(c - B(u, v)) < 1e-10
            if v not in allowed:
                assert c == 0
    with pytest.raises(ValueError):
        bessel_closed_form_ap(rep, z, 0, 1, 0)


def test_ap_closed_form_integral_zeta_single_shell():
    # k = 1 and integral zeta: the transform lives on the single shell v(y) = -a(pi)
    rep = TwistMinimal.synthetic(5, 3, 4, 2)
    z = Modulus(1, 0)
    B = bessel_general(rep, PadicShellFunction.indicator_progression(5, 1), z, 8)
    for v in range(-8, 2):
        vals = [bessel_closed_form_ap(rep, z, 1, u, v) for u in B.units]
        if v != -4:
            assert all(x == 0 for x in vals)
        for u, c in zip(B.units, vals):
            assert abs(c - B(u, v)) < 1e-10
    assert max(abs(bessel_closed_form_ap(rep, z, 1, u, -4)) for u in B.units) > 0


def test_missing_root_number_is_reported():
    rep = TwistMinimal(3, 2, 3, 1.0)
    with pytest.raises(KeyError):
        bessel_closed_form_ox(rep, Modulus(1, -1), 1, -3)


def test_trivial_bound_summed_form_holds():
    # the displayed exponent is recorded, not asserted; the summed one must hold
    violations = 0
    for p in (3, 5, 7):
        for n in (2, 3):
            for a in (3, 4, 5):
                rep = TwistMinimal.synthetic(p, n, a, 3, seed=p + n + a)
                for vz in (-1, -2, -3):
                    z = Modulus(2, vz)
                    tb = trivial_bound(rep, z)
                    B = bessel_general(rep, PadicShellFunction.indicator_units(p), z, 0)
                    peak = max(float(np.max(np.abs(arr))) for arr in B.shells.values())
                    assert peak <= tb["constant"] * p ** tb["summed_exponent"] + 1e-9
                    if peak > tb["constant"] * p ** tb["displayed_exponent"] + 1e-9:
                        violations += 1
    assert violations > 0
