import cmath
import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from voronoi_kit.arith import units_mod
from voronoi_kit.padic import (
    MellinSpectrum,
    PadicShellFunction,
    enumerate_padic_characters,
    epsilon_from_gauss,
    gauss_sum_padic,
    gauss_sum_progression,
    mellin_inverse_padic,
    mellin_padic,
    progression_volume,
    psi_inf,
    psi_p,
)
from voronoi_kit.arith import epsilon_inverse
from voronoi_kit.verify import random_shell_function


def test_psi_p_examples():
    assert psi_p(7, 5) == 1
    assert abs(psi_p(Fraction(1, 5), 5) - cmath.exp(2j * math.pi / 5)) < 1e-12
    assert psi_p(Fraction(1, 5), 3) == 1


def test_product_formula_on_rationals():
    # psi_inf(x) * prod_p psi_p(x) = 1 for rational x
    for x in (Fraction(1, 5), Fraction(7, 12), Fraction(-3, 50), Fraction(11, 9)):
        total = psi_inf(x)
        for p in (2, 3, 5):
            total *= psi_p(x, p)
        assert abs(total - 1) < 1e-12


def test_enumerate_padic_characters_counts():
    assert len(enumerate_padic_characters(7, 0)) == 1
    five = enumerate_padic_characters(5, 1)
    assert len(five) == 4
    assert sum(c.conductor_exponent == 1 for c in five) == 3
    assert len(enumerate_padic_characters(2, 3)) == 4


def test_gauss_sum_examples_small_p():
    triv = enumerate_padic_characters(5, 0)[0]
    assert gauss_sum_padic(1, 0, triv) == 1
    assert abs(gauss_sum_padic(1, -1, triv) - (-0.25)) < 1e-12
    assert abs(gauss_sum_padic(1, -2, triv)) < 1e-12
    chi = [c for c in enumerate_padic_characters(5, 1) if c.conductor_exponent == 1][0]
    assert abs(gauss_sum_padic(2, -2, chi)) < 1e-12


@pytest.mark.parametrize("p", [2, 3, 5, 7])
def test_gauss_sum_closed_vs_average(p):
    for chi in enumerate_padic_characters(p, 3):
        for v in range(-3, 2):
            for u in (1, p + 1, 2 * p - 1):
                if u % p == 0:
                    continue
                a = gauss_sum_padic(u, v, chi, method="average")
                b = gauss_sum_padic(u, v, chi, method="closed")
                assert abs(a - b) < 1e-10


def test_gauss_constant_matches_root_number_pin():
    # the GL(1) constant shared with the Dirichlet side
    for p, k in [(3, 1), (3, 2), (5, 1), (5, 3), (2, 3), (7, 2)]:
        for chi in enumerate_padic_characters(p, k):
            assert abs(epsilon_from_gauss(chi) - epsilon_inverse(chi.dirichlet)) < 1e-10


def test_gauss_progression_examples():
    triv = enumerate_padic_characters(3, 0)[0]
    for k in (1, 2, 3):
        for v in range(-k, 2):
            # psi(a y) = psi(a) on the whole progression once v(a) >= -k
            want = psi_p(Fraction(1, 3**-v) if v < 0 else 1, 3) * progression_volume(3, k)
            assert abs(gauss_sum_progression(1, v, triv, k) - want) < 1e-12
    # a(chi) > max(k, -v(a)) kills the sum
    for chi in enumerate_padic_characters(3, 3):
        if chi.conductor_exponent == 3:
            assert abs(gauss_sum_progression(1, -1, chi, 2)) < 1e-12
    # k = 1, v(a) = -3: brute force average at level 3
    g = gauss_sum_progression(2, -3, triv, 1)
    us = np.array(units_mod(27))
    mask = us % 3 == 1
    brute = np.sum(np.exp(2j * np.pi * (2 * us[mask] % 27) / 27)) / len(us)
    assert abs(g - brute) < 1e-12


def test_gauss_sum_large_unit_is_reduced_first():
    # units carried modulo p^40 must not overflow the phase computation
    chi = [c for c in enumerate_padic_characters(3, 2) if c.conductor_exponent == 2][0]
    big = 3**40 - 1
    small = big % 9
    assert abs(gauss_sum_padic(big, -2, chi) - gauss_sum_padic(small, -2, chi)) < 1e-12
    assert abs(gauss_sum_progression(big, -3, chi, 1) - gauss_sum_progression(big % 27, -3, chi, 1)) < 1e-12


def test_mellin_examples():
    for p in (2, 3, 5):
        spec = mellin_padic(PadicShellFunction.indicator_units(p))
        assert spec.characters() and all(c.is_trivial for c in spec.characters())
        assert spec[spec.characters()[0]].terms() == {0: 1}
        shifted = mellin_padic(PadicShellFunction.indicator_units(p, 1))
        assert shifted[shifted.characters()[0]].terms() == {-1: 1}
    spec = mellin_padic(PadicShellFunction.indicator_progression(5, 1))
    for chi in spec.characters():
        assert abs(spec[chi].coeff(0) - 0.25) < 1e-12


def test_mellin_inverse_examples():
    phi = PadicShellFunction.indicator_units(3)
    assert mellin_inverse_padic(mellin_padic(phi)).max_diff(phi) == 0
    zero = mellin_inverse_padic(MellinSpectrum(3), 0)
    assert zero.shells == {}
    rng = np.random.default_rng(5)
    phi = random_shell_function(rng, 3, 2, -1, 5)
    assert mellin_inverse_padic(mellin_padic(phi), 2).max_diff(phi) <= 1e-12


@settings(max_examples=50, deadline=None)
@given(st.sampled_from([2, 3, 5, 7]), st.integers(0, 2), st.integers(-3, 3), st.integers(1, 6), st.integers(0, 2**32 - 1))
def test_mellin_round_trip_property(p, level, v_lo, width, seed):
    phi = random_shell_function(np.random.default_rng(seed), p, level, v_lo, width)
    assert mellin_inverse_padic(mellin_padic(phi), level).max_diff(phi) <= 1e-12


def test_shell_function_lift_and_json():
    rng = np.random.default_rng(2)
    phi = random_shell_function(rng, 5, 1, 0, 2)
    lifted = phi.lift(2)
    assert lifted.max_diff(phi) == 0
    for u in units_mod(25):
        assert lifted(u, 1) == phi(u, 1)
    back = PadicShellFunction.from_json(phi.to_json())
    assert back.max_diff(phi) == 0
    with pytest.raises(ValueError):
        phi.lift(0)
    with pytest.raises(ValueError):
        phi(5, 0)
