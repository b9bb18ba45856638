import math
from fractions import Fraction as F

import numpy as np
import pytest

from voronoi_kit.arith import KloostermanSpec, factorize, kloosterman_classical, prime_divisors
from voronoi_kit.geometric import (
    closed_form_sum,
    delta_matrix,
    hk_integral_bruteforce,
    kl_local,
    lambda_set,
    shift_is_admissible,
    verify_geometric_identity,
)
from voronoi_kit.local_reps import SatakeParams
from voronoi_kit.padic import valuation
from voronoi_kit.verify import GEOMETRIC_UNITS, geometric_grid


def dual(p, n, seed=0):
    rng = np.random.default_rng([seed, p, n])
    return SatakeParams(p, tuple(np.exp(2j * np.pi * rng.random(n))))


def test_lambda_set_sizes():
    assert lambda_set(7, 0) == [F(1)]
    assert len(lambda_set(5, -1)) == 4
    assert sorted(lambda_set(2, -2)) == [F(1, 4), F(3, 4)]
    with pytest.raises(ValueError):
        lambda_set(3, 1)


def test_kl_local_n2_is_additive_character():
    from voronoi_kit.padic import psi_p

    for p in (2, 3, 5):
        for vy in range(-2, 3):
            y = F(p) ** vy * 2
            assert abs(kl_local(p, y, [], F(1, p), [F(1), F(1)]) - psi_p(y * p, p)) < 1e-12


def test_kl_local_branches_agree_on_boundary():
    # |zeta xi_1^-1 xi_2| = 1 sits in the zeta branch, which must equal the xi_1/xi_2 branch
    p = 3
    xi = [F(1), F(1), F(1)]
    for y in (F(1), F(2, 9), F(5, 27)):
        a = kl_local(p, y, [-1], F(1), xi)
        b = kl_local(p, y, [-1], F(0), xi)
        assert abs(a - b) < 1e-12


def test_delta_matrix_valuations():
    p = 3
    d = delta_matrix(p, [-1], F(1, 3), [F(1), F(1), F(1)])
    assert [valuation(x, p) for x in d] == [2, -1, -1]
    d = delta_matrix(p, [-1], F(1), [F(1), F(1), F(1)])
    assert [valuation(x, p) for x in d] == [1, -1, 0]


def test_admissibility_rule():
    assert shift_is_admissible(3, [F(1), F(1)])
    assert shift_is_admissible(3, [F(1), F(3), F(1)])
    assert not shift_is_admissible(3, [F(1), F(1, 3), F(1)])
    assert not shift_is_admissible(3, [F(1), F(1), F(3)])


def test_identity_n2_full_grid():
    for p in (2, 3, 5):
        W = dual(p, 2, 1)
        for pp, vz, xi, vy in geometric_grid(2):
            if pp != p:
                continue
            y = F(p**vy * GEOMETRIC_UNITS[p])
            zeta = F(GEOMETRIC_UNITS[p], p ** (-vz))
            r = verify_geometric_identity(p, y, zeta, xi, W)
            assert r["residual"] <= 1e-9


@pytest.mark.parametrize(
    "p,vz,xi,vy",
    [
        (2, -1, [F(1), F(1), F(1)], 0),
        (3, -2, [F(1), F(3), F(1)], 1),
        (3, 0, [F(1, 3), F(1), F(1)], 2),
        (5, -1, [F(1), F(1), F(1, 5)], 0),
    ],
)
def test_identity_n3_admissible(p, vz, xi, vy):
    y = F(p**vy * GEOMETRIC_UNITS[p])
    zeta = F(GEOMETRIC_UNITS[p], p ** (-vz))
    r = verify_geometric_identity(p, y, zeta, xi, dual(p, 3))
    assert r["admissible"]
    assert r["residual"] <= 1e-9


@pytest.mark.parametrize("p,xi", [(3, [F(1), F(1, 3), F(1)]), (2, [F(1), F(1), F(2)])])
def test_bruteforce_vanishes_on_inadmissible_shift(p, xi):
    y = F(GEOMETRIC_UNITS[p])
    zeta = F(GEOMETRIC_UNITS[p], p)
    H = hk_integral_bruteforce(p, y, zeta, xi, dual(p, 3))
    assert abs(H) <= 1e-12
    # the closed form does not vanish there, which is why the shift is excluded
    rhs, _ = closed_form_sum(p, y, zeta, xi, dual(p, 3))
    assert abs(rhs) > 0.01


def test_local_product_matches_classical_hyper_kloosterman():
    # squarefree q <= 30: prod_p Kl_p(g m / q^3, t=p^-1; a/q, 1) = q * S(abar g, m; q)
    worst = 0.0
    for q in range(2, 31):
        if any(e > 1 for e in factorize(q).values()):
            continue
        spec = KloostermanSpec(3, q)
        for a in range(1, q):
            if math.gcd(a, q) > 1:
                continue
            abar = pow(a, -1, q)
            for g0 in (1, -1, 7):
                if math.gcd(g0, q) > 1:
                    continue
                for m in (-5, -1, 1, 2, 6, 12):
                    lhs = 1
                    for p in prime_divisors(q):
                        lhs *= kl_local(p, F(g0 * m, q**3), [-1], F(a, q), [1, 1, 1])
                    worst = max(worst, abs(lhs - q * kloosterman_classical(spec, abar * g0, m)))
    assert worst <= 1e-9
