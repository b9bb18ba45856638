import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from voronoi_kit.arith import enumerate_characters
from voronoi_kit.local_reps import (
    SatakeParams,
    TwistMinimal,
    Unramified,
    contragredient_whittaker,
    dual_coefficient,
    epsilon_factor,
    gamma_factor,
    hecke_coefficient,
    inverse_model,
    is_dominant,
    l_factor,
    rep_from_json,
    schur,
    schur_bialternant,
    schur_jacobi_trudi,
    schur_tableaux,
    shintani_whittaker,
)
from voronoi_kit.padic import PadicShellFunction, enumerate_padic_characters
from voronoi_kit.voronoi import kirillov_newvector


def unitary(p, n, seed):
    rng = np.random.default_rng([seed, p, n])
    return SatakeParams(p, tuple(np.exp(2j * np.pi * rng.random(n))))


def test_schur_examples():
    assert schur((0, 0, 0), (0.3, 2, 1j)) == 1
    t = (0.5, 1.5j, -2)
    assert abs(schur((1, 0, 0), t) - sum(t)) < 1e-12
    assert abs(schur_tableaux((2, 1, 0), (1, 1, 1)) - 8) < 1e-12
    # repeated entries route to Jacobi-Trudi
    assert abs(schur((2, 1, 0), (1, 1, 1)) - 8) < 1e-12
    with pytest.raises(ValueError):
        schur_bialternant((0, 1), (1, 2))


def dominant_partitions(n, max_size):
    for lam in itertools.product(range(max_size + 1), repeat=n):
        if sum(lam) <= max_size and is_dominant(lam):
            yield lam


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 4), st.integers(0, 2**32 - 1))
def test_schur_three_evaluators_agree(n, seed):
    rng = np.random.default_rng(seed)
    t = np.sqrt(rng.uniform(0.25, 4.0, n)) * np.exp(2j * np.pi * rng.random(n))
    for lam in dominant_partitions(n, 6):
        ref = schur_tableaux(lam, t)
        scale = max(1.0, abs(ref))
        assert abs(schur_bialternant(lam, t) - ref) <= 1e-9 * scale
        assert abs(schur_jacobi_trudi(lam, t) - ref) <= 1e-9 * scale


def test_shintani_examples():
    mu = unitary(5, 3, 0)
    assert shintani_whittaker((0, 1, 0), mu) == 0
    assert abs(shintani_whittaker((0, 0, 0), mu) - 1) < 1e-12
    assert abs(shintani_whittaker((1, 0, 0), mu) - sum(mu.mu) / 5) < 1e-12


def test_shintani_vanishes_exactly_off_dominant():
    mu = unitary(3, 4, 1)
    for lam in itertools.product(range(-1, 3), repeat=4):
        val = shintani_whittaker(lam, mu)
        if not is_dominant(lam):
            assert val == 0


def test_hecke_coefficient_examples():
    model = {2: unitary(2, 3, 0), 3: unitary(3, 3, 1)}
    assert hecke_coefficient(model, (1, 1)) == 1
    a, b, c = model[2].mu
    assert abs(hecke_coefficient(model, (2, 1)) - (a + b + c)) < 1e-12
    assert hecke_coefficient(model, (0, 3)) == 0
    with pytest.raises(KeyError):
        hecke_coefficient(model, (5, 1))


def test_hecke_multiplicativity_and_trivial_bound():
    model = {p: unitary(p, 3, p) for p in (2, 3, 5, 7)}
    for m1, m2 in itertools.product([1, 2, 4, 3, 9, 6, 12], repeat=2):
        for k1, k2 in itertools.product([1, 5, 25, 7, 35], repeat=2):
            lhs = hecke_coefficient(model, (m1 * k1, m2 * k2))
            rhs = hecke_coefficient(model, (m1, m2)) * hecke_coefficient(model, (k1, k2))
            assert abs(lhs - rhs) < 1e-9
        A = hecke_coefficient(model, (m1, m2))
        # |A(m)| <= prod |m_i|^(i(n-i)/2)
        assert abs(A) <= m1 ** (1 * 2 / 2) * m2 ** (2 * 1 / 2) + 1e-9


def test_dual_coefficient_matches_inverse_parameters():
    chi = enumerate_characters(7)[2]
    model = {}
    for p in (2, 3, 5):
        mu = list(unitary(p, 3, p).mu[:2])
        mu.append(np.conj(chi(p)) / np.prod(mu))
        model[p] = SatakeParams(p, tuple(mu))
    inv = inverse_model(model)
    for m in itertools.product([1, 2, 4, 8, 3, 9, 5, 6], repeat=2):
        assert abs(dual_coefficient(model, chi, m) - hecke_coefficient(inv, m)) < 1e-9
    assert dual_coefficient(model, chi, (1, 1)) == 1
    with pytest.raises(ValueError):
        dual_coefficient(model, chi, (7, 1))


def test_dual_coefficient_n2():
    chi = enumerate_characters(5)[1]
    model = {2: SatakeParams(2, (1j, np.conj(chi(2)) / 1j))}
    for k in range(5):
        assert abs(dual_coefficient(model, chi, (2**k,)) - chi(2**k) * hecke_coefficient(model, (2**k,))) < 1e-12


def test_contragredient_is_shintani_at_inverse():
    mu = unitary(3, 3, 4)
    lam = (2, 1, 0)
    assert abs(contragredient_whittaker(lam, mu) - shintani_whittaker(lam, mu.inverse())) < 1e-15


def test_l_factor_cases():
    tm = TwistMinimal.synthetic(3, 3, 4, 2)
    for chi in enumerate_padic_characters(3, 2):
        L = l_factor(tm, chi)
        assert abs(L(0.37) - 1) < 1e-15
    un = Unramified(SatakeParams(5, (1,)))
    triv = enumerate_padic_characters(5, 0)[0]
    x = 0.3
    assert abs(l_factor(un, triv)(x) - 1 / (1 - x)) < 1e-12
    ram = [c for c in enumerate_padic_characters(5, 1) if not c.is_trivial][0]
    un2 = Unramified(unitary(5, 2, 3))
    assert abs(l_factor(un2, ram)(x) - 1) < 1e-15


def test_epsilon_factor_conductors():
    un = Unramified(unitary(3, 3, 0))
    triv = enumerate_padic_characters(3, 0)[0]
    assert epsilon_factor(un, triv) == (1, 0)
    tm = TwistMinimal.synthetic(3, 3, 5, 2)
    chars = enumerate_padic_characters(3, 2)
    one = [c for c in chars if c.conductor_exponent == 1][0]
    two = [c for c in chars if c.conductor_exponent == 2][0]
    assert epsilon_factor(tm, one)[1] == 5
    assert epsilon_factor(tm, two)[1] == 6
    for c in chars:
        assert abs(abs(epsilon_factor(tm, c)[0]) - 1) < 1e-12
        assert abs(abs(epsilon_factor(un, c)[0]) - 1) < 1e-12
    bare = TwistMinimal(3, 3, 5, 1.0)
    with pytest.raises(KeyError):
        epsilon_factor(bare, one)


def test_gamma_twist_minimal_is_monomial():
    tm = TwistMinimal.synthetic(5, 2, 3, 2)
    for chi in enumerate_padic_characters(5, 2):
        g = gamma_factor(tm, chi)
        assert g.is_monomial()


def test_gamma_unitary_on_critical_line():
    for p, n in [(2, 1), (3, 2), (5, 3)]:
        rep = Unramified(unitary(p, n, 9))
        for chi in enumerate_padic_characters(p, 1):
            g = gamma_factor(rep, chi)
            for t in np.linspace(-7, 7, 10):
                X = p ** -(0.5 + 1j * t)
                assert abs(abs(g(X)) - 1) < 1e-10


def test_gamma_tate_unramified():
    # n = 1, mu = 1: gamma(s) = (1 - p^-s) / (1 - p^(s-1))
    p = 3
    g = gamma_factor(Unramified(SatakeParams(p, (1,))), enumerate_padic_characters(p, 0)[0])
    for s in (0.3 + 0.2j, 1.7, -0.4 + 3j):
        X = p**-s
        assert abs(g(X) - (1 - p**-s) / (1 - p ** (s - 1))) < 1e-12


def test_representation_json_round_trip():
    tm = TwistMinimal.synthetic(3, 2, 4, 2, seed=5)
    back = rep_from_json(tm.to_json())
    assert back.a_pi == 4 and abs(back.eps0 - tm.eps0) < 1e-15
    assert {c.key(): z for c, z in back.twists.items()} == pytest.approx({c.key(): z for c, z in tm.twists.items()})
    un = Unramified(unitary(5, 3, 2))
    assert rep_from_json(un.to_json()) == un


def test_twist_minimal_rejects_non_unit_root_numbers():
    with pytest.raises(ValueError):
        TwistMinimal(3, 2, 3, 0.5)
    with pytest.raises(ValueError):
        TwistMinimal(3, 2, 0, 1.0)


def test_kirillov_support_law():
    rng = np.random.default_rng(0)
    for p in (2, 3, 5):
        phi = PadicShellFunction(p, 1, {v: rng.normal(size=p - 1) for v in range(-2, 3)})
        for rep in (Unramified(unitary(p, 3, 1)), TwistMinimal.synthetic(p, 3, 3, 1)):
            W = kirillov_newvector(rep, phi)
            assert all(v >= 0 for v in W.shells)
