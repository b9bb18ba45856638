import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from voronoi_kit.arith import (
    DirichletCharacter,
    KloostermanSpec,
    crt,
    enumerate_characters,
    epsilon_inverse,
    euler_phi,
    gauss_sum_dirichlet,
    hecke_character_local_value,
    kloosterman_classical,
    primitive_characters,
    s_f_sum,
    unit_group,
)
from voronoi_kit.verify import kloosterman_one_loop


def test_unit_group_small_moduli():
    assert unit_group(1).order == 1
    g8 = unit_group(8)
    assert g8.order == 4
    assert sorted(g8.orders) == [2, 2]
    g45 = unit_group(45)
    assert g45.order == 24
    # every unit has a discrete log and the logs are distinct
    logs = {g45.dlog(x) for x in range(45) if math.gcd(x, 45) == 1}
    assert len(logs) == 24
    assert g45.dlog(3) is None


def test_enumerate_characters_counts_and_conductors():
    assert len(enumerate_characters(1)) == 1
    assert enumerate_characters(1)[0].conductor == 1
    six = enumerate_characters(6)
    assert len(six) == 2
    assert sorted(c.conductor for c in six) == [1, 3]
    five = enumerate_characters(5)
    assert sorted(c.conductor for c in five) == [1, 5, 5, 5]
    assert len(primitive_characters(5)) == 3


@pytest.mark.parametrize("N", [5, 8, 12, 21])
def test_character_orthogonality(N):
    chars = enumerate_characters(N)
    units = [x for x in range(N) if math.gcd(x, N) == 1]
    for a in chars:
        for b in chars:
            s = sum(a(x) * b(x).conjugate() for x in units)
            assert abs(s - (len(units) if a == b else 0)) < 1e-9


def test_hecke_character_local_value():
    chi4 = enumerate_characters(4)[1]
    assert hecke_character_local_value(enumerate_characters(7)[0], 3, 5) == 1
    assert abs(hecke_character_local_value(chi4, 3, 1) - (-1)) < 1e-12
    for chi in enumerate_characters(9):
        assert hecke_character_local_value(chi, 2, 0) == 1
    with pytest.raises(ValueError):
        hecke_character_local_value(chi4, 2, 1)


def test_gauss_sum_examples():
    assert abs(gauss_sum_dirichlet(enumerate_characters(1)[0]) - 1) < 1e-12
    for chi in primitive_characters(5):
        assert abs(abs(gauss_sum_dirichlet(chi)) - math.sqrt(5)) < 1e-12
    # trivial character mod a prime gives the Ramanujan sum mu(p) = -1
    assert abs(gauss_sum_dirichlet(enumerate_characters(7)[0]) + 1) < 1e-12


@pytest.mark.parametrize("N", range(3, 101))
def test_gauss_sum_product_identity(N):
    for chi in primitive_characters(N):
        lhs = gauss_sum_dirichlet(chi) * gauss_sum_dirichlet(chi.conj())
        assert abs(lhs - chi(-1) * N) < 1e-8 * N


def test_epsilon_inverse_is_unit_and_trivial_is_one():
    assert epsilon_inverse(enumerate_characters(1)[0]) == 1
    for chi in enumerate_characters(27):
        assert abs(abs(epsilon_inverse(chi)) - 1) < 1e-12


def test_kloosterman_examples():
    assert kloosterman_classical(KloostermanSpec(3, 1), 4, 7) == 1
    s = kloosterman_classical(KloostermanSpec(3, 5), -1, 1)
    assert abs(s - (2 + 2 * math.cos(4 * math.pi / 5))) < 1e-12
    assert abs(s - 0.381966) < 1e-6
    for x in range(-3, 4):
        for y in range(-3, 4):
            assert abs(kloosterman_classical(KloostermanSpec(3, 2), x, y) - (-1) ** (x + y)) < 1e-12


def test_kloosterman_crt_q15():
    spec = KloostermanSpec(3, 15)
    for x in range(15):
        for y in range(15):
            rhs = kloosterman_classical(KloostermanSpec(3, 3), x * 2, y * 2) * kloosterman_classical(
                KloostermanSpec(3, 5), x * 2, y * 2
            )
            # inverse of 5 mod 3 is 2, inverse of 3 mod 5 is 2
            assert abs(kloosterman_classical(spec, x, y) - rhs) < 1e-9


def test_kloosterman_n2_is_additive_character():
    for q in (1, 4, 9, 10):
        for x in range(-4, 5):
            assert abs(kloosterman_classical(KloostermanSpec(2, q), x, 3) - cmath.exp(2j * math.pi * 3 * x / q)) < 1e-12


def test_kloosterman_n4_term_count_and_realness():
    spec = KloostermanSpec(4, 6, (2, 1), (3, 2))
    val = kloosterman_classical(spec, 1, 5)
    assert np.isfinite(val.real)
    with pytest.raises(ValueError):
        KloostermanSpec(3, 6, (1,), (4,))


@settings(max_examples=60, deadline=None)
@given(st.integers(2, 60), st.integers(-100, 100), st.integers(-100, 100))
def test_kloosterman_matches_one_loop(q, x, y):
    assert abs(kloosterman_classical(KloostermanSpec(3, q), x, y) - kloosterman_one_loop(-x, y, q)) < 1e-9


@settings(max_examples=40, deadline=None)
@given(st.sampled_from([p for p in range(3, 102) if all(p % d for d in range(2, p))]), st.integers(1, 10**6))
def test_weil_bound(p, seed):
    rng = np.random.default_rng(seed)
    x, y = (int(v) for v in rng.integers(1, p, 2))
    assert abs(kloosterman_classical(KloostermanSpec(3, p), x, y)) <= 2 * math.sqrt(p) + 1e-9


def test_s_f_trivial_level_returns_supplied_root_number():
    triv = enumerate_characters(1)[0]
    assert abs(s_f_sum(1, 5, 1, 1, 3, {triv: 0.6 + 0.8j}) - (0.6 + 0.8j)) < 1e-12


def test_s_f_level_nine_matches_direct_sum():
    ell, m, a, q, n = 9, 4, 2, 5, 3
    roots = {chi: 1 + 0j for chi in primitive_characters(ell)}
    # phi(9) = 6 characters, of which the two induced from conductor 1 and 3 are imprimitive
    assert len(roots) == 4
    abar = pow(a, -1, ell)
    direct = 0j
    for chi in roots:
        tau = sum(chi.primitive()(x) * cmath.exp(2j * math.pi * x / ell) for x in range(ell))
        direct += chi(-1) ** (n - 1) * chi(m * abar * q) * tau / 3
    assert abs(s_f_sum(ell, m, a, q, n, roots) - direct) < 1e-9


def test_s_f_missing_character_is_named():
    roots = {chi: 1 for chi in primitive_characters(9)[1:]}
    with pytest.raises(KeyError, match="DirichletCharacter"):
        s_f_sum(9, 1, 1, 1, 2, roots)


@settings(max_examples=30, deadline=None)
@given(st.sampled_from([4, 8, 9, 25, 27, 16]), st.integers(1, 10**6))
def test_s_f_count_bound(ell, seed):
    rng = np.random.default_rng(seed)
    roots = {chi: complex(np.exp(2j * np.pi * rng.random())) for chi in primitive_characters(ell)}
    p = min(d for d in range(2, ell + 1) if ell % d == 0)
    bound = euler_phi(ell) - (euler_phi(ell // p) if ell % (p * p) == 0 else 0)
    m = int(rng.integers(1, 1000)) * (1 if ell % 2 else 2) + 1
    while math.gcd(m, ell) > 1:
        m += 1
    assert abs(s_f_sum(ell, m, 1, 1, 2, roots)) <= bound + 1e-9


def test_crt_reconstruction():
    assert crt([2, 3], [3, 5]) == 8
    assert crt([0], [1]) == 0
