"""p-adic Bessel transforms: the general engine (Mellin inversion of the duality equation),
closed forms for twist-minimal data, support bounds and the duality verifier."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .arith import TWO_PI_I, epsilon_inverse, units_mod
from .local_reps import LocalRepresentation, TwistMinimal, Unramified, epsilon_factor, gamma_factor
from .padic import (
    PadicCharacter,
    PadicShellFunction,
    enumerate_padic_characters,
    gauss_sum_padic,
    gauss_sum_progression,
    zeta_local,
)
from .series import LaurentSeries, RationalFunction


@dataclass(frozen=True)
class Modulus:
    """zeta = unit * p^val; val=None encodes zeta = 0."""

    unit: int = 1
    val: int | None = None

    @property
    def is_integral(self) -> bool:
        return self.val is None or self.val >= 0


def twist_by_modulus(phi: PadicShellFunction, zeta: Modulus) -> PadicShellFunction:
    """Phi^zeta(y) = psi_p(y zeta) Phi(y), stored at the level that keeps it exact."""
    p = phi.p
    if zeta.val is None or not phi.shells:
        return phi
    need = max([phi.level] + [-(v + zeta.val) for v in phi.shells])
    lifted = phi.lift(need)
    us = np.array(lifted.units)
    out = {}
    for v, arr in lifted.shells.items():
        w = v + zeta.val
        if w >= 0:
            out[v] = arr.copy()
        else:
            pc = p ** (-w)
            out[v] = arr * np.exp(TWO_PI_I * (((zeta.unit % pc) * us) % pc) / pc)
    return PadicShellFunction(p, need, out)


def bessel_support_bound(rep: LocalRepresentation, zeta: Modulus, phi: PadicShellFunction | None = None) -> int:
    """v_low with B(y) = 0 whenever v(y) < v_low, for Phi supported on the units.

    For a Phi living on several shells, each shell m is a dilate of a unit-supported function
    with modulus zeta p^m, so its contribution is shifted down by m; the minimum is returned.
    A Phi of level k >= 2 brings in characters of conductor k, which acts like |zeta| = p^k.
    """
    if phi is not None and phi.shells:
        return min(_shell_bound(rep, zeta, m, phi.level) - m for m in phi.shells)
    return _shell_bound(rep, zeta, 0, 0)


def _shell_bound(rep, zeta: Modulus, m: int, level: int) -> int:
    n, a = rep.n, rep.conductor_exponent
    c = 0 if zeta.val is None else max(0, -(zeta.val + m))
    if level >= 2:
        c = max(c, level)
    if c == 0:
        return -(n + a)
    return -((n - 1) * c + n + max(a, c))


def _rhs_series(rep, phi_z: PadicShellFunction, chi: PadicCharacter, order: int) -> LaurentSeries:
    """chi(-1)^(n-1) gamma(1-s, chi pi) * int Phi^zeta chi |y|^(1-s-(n-1)/2) d^x y, in X = p^-s."""
    n, p = rep.n, rep.p
    if chi.conductor_exponent > phi_z.level:
        return LaurentSeries()  # orthogonality: the Mellin coefficients vanish
    vals = chi.values_on(phi_z.level)
    terms = {}
    for m, arr in phi_z.shells.items():
        c = complex(np.mean(arr * vals))
        if c != 0:
            terms[-m] = c * p ** (m * (n - 3) / 2)
    if not terms:
        return LaurentSeries()
    mellin = LaurentSeries.from_dict(terms)
    g = gamma_factor(rep, chi, one_minus_s=True)
    sign = chi(-1) ** (n - 1)
    return RationalFunction(g.num * mellin * sign, g.den).expand(order)


def bessel_general(
    rep: LocalRepresentation, phi: PadicShellFunction, zeta: Modulus, cutoff: int
) -> PadicShellFunction:
    """B_{pi, Phi^zeta} on shells v(y) <= cutoff by Mellin inversion of the duality equation."""
    if phi.p != rep.p:
        raise ValueError("prime mismatch between representation and test function")
    v_low = bessel_support_bound(rep, zeta, phi)
    if cutoff < v_low:
        raise ValueError(f"cutoff {cutoff} is below the support lower bound {v_low}")
    phi_z = twist_by_modulus(phi, zeta)
    K = phi_z.level
    p, n = rep.p, rep.n
    n_units = len(units_mod(p**K)) if K else 1
    shells: dict[int, np.ndarray] = {}
    for chi in enumerate_padic_characters(p, K):
        series = _rhs_series(rep, phi_z, chi, cutoff).trim()
        if series.is_zero():
            continue
        chi_vals = chi.values_on(K)
        for v, c in series.terms().items():
            b = c * p ** (-v * (n - 1) / 2)
            shells.setdefault(v, np.zeros(n_units, dtype=complex))
            shells[v] = shells[v] + b * chi_vals
    return PadicShellFunction(p, K, shells)


def verify_duality(
    rep: LocalRepresentation,
    phi: PadicShellFunction,
    zeta: Modulus,
    chi: PadicCharacter,
    order: int | None = None,
    bessel: PadicShellFunction | None = None,
) -> float:
    """Max Laurent-coefficient mismatch (through X^order) between the two sides of the duality
    equation at the character chi."""
    n, p = rep.n, rep.p
    a_chi = chi.conductor_exponent
    vz = 0 if zeta.val is None else abs(zeta.val)
    D = order if order is not None else n * (rep.conductor_exponent + a_chi + vz) + 10
    B = bessel if bessel is not None else bessel_general(rep, phi, zeta, D)
    # left side: sum_v avg(B(u p^v) chi^-1(u)) p^(v(n-1)/2) X^v
    level = max(B.level, a_chi)
    Bl = B.lift(level)
    inv = np.conj(chi.values_on(level))
    lhs = LaurentSeries.from_dict(
        {v: complex(np.mean(arr * inv)) * p ** (v * (n - 1) / 2) for v, arr in Bl.shells.items() if v <= D}
    )
    rhs = _rhs_series(rep, twist_by_modulus(phi, zeta), chi, D)
    diff = (lhs - rhs).truncate(D)
    return float(np.max(np.abs(diff.coeffs))) if len(diff.coeffs) else 0.0


def bessel_closed_form_ox(rep: TwistMinimal, zeta: Modulus, y_unit: int, y_val: int) -> complex:
    """B for Phi = Char of Z_p^x under the twist-minimal assumption, case by case in |zeta|."""
    p, n, a = rep.p, rep.n, rep.a_pi
    if zeta.is_integral:
        return complex(rep.eps0) * p ** (a * (n - 2) / 2) if y_val == -a else 0j
    c = -zeta.val
    total = 0j
    if c == 1 and y_val == -a:
        total += complex(rep.eps0) * p ** (a * (n - 2) / 2) / (1 - p)
    top = max(a, n * c)
    if y_val != -top:
        return total
    zinv_y = y_unit * pow(zeta.unit, -1, p**c)
    for chi in enumerate_padic_characters(p, c):
        if chi.conductor_exponent != c:
            continue
        if chi not in rep.twists:
            raise KeyError(f"missing twisted root number for {chi!r}")
        total += (
            chi(-1) ** (n - 1)
            * chi(zinv_y)
            * rep.twists[chi]
            * epsilon_inverse(chi.dirichlet)
            * zeta_local(p)
            * p ** (-c / 2)
            * p ** (top * (n - 2) / 2)
        )
    return total


def bessel_closed_form_ap(rep: TwistMinimal, zeta: Modulus, k: int, y_unit: int, y_val: int) -> complex:
    """B for Phi = Char of 1 + p^k Z_p: the finite sum over a(chi) <= max(k, -v(zeta)) of
    G^k(zeta, chi) eps(1/2, chi pi) chi(-1)^(n-1) chi(y) p^(a(chi pi)(n-2)/2) [v(y) = -a(chi pi)]."""
    if k < 1:
        raise ValueError("k must be at least 1")
    p, n = rep.p, rep.n
    zv = 0 if zeta.val is None else zeta.val
    zu = zeta.unit if zeta.val is not None else 1
    r_max = max(k, -zv)
    total = 0j
    for chi in enumerate_padic_characters(p, r_max):
        eps, a_twist = epsilon_factor(rep, chi)
        if y_val != -a_twist:
            continue
        g = gauss_sum_progression(zu, zv if zeta.val is not None else 0, chi, k)
        if g == 0:
            continue
        total += g * eps * chi(-1) ** (n - 1) * chi(y_unit) * p ** (a_twist * (n - 2) / 2)
    return total


def ap_support_shells(rep: TwistMinimal, zeta: Modulus, k: int) -> set[int]:
    """The compact set v(y) = -max(a(pi), n r), 0 <= r <= max(k, -v(zeta))."""
    zv = 0 if zeta.val is None else zeta.val
    return {-max(rep.a_pi, rep.n * r) for r in range(0, max(k, -zv) + 1)}


def trivial_bound(rep: TwistMinimal, zeta: Modulus) -> dict:
    """Exponents for |B| with Phi = Char of units, constant (1 - 1/p)^-1.

    "displayed" is max(a, -n v(zeta))(n-2)/2 + 3 v(zeta)/2; "summed" replaces 3 v(zeta)/2 by
    -v(zeta)/2, which is what summing absolute values over the characters of conductor
    -v(zeta) gives.  Only the summed exponent is a valid bound in general.
    """
    n, a = rep.n, rep.a_pi
    vz = 0 if zeta.val is None or zeta.val > 0 else zeta.val
    top = max(a, -n * vz)
    return {
        "displayed_exponent": top * (n - 2) / 2 + 3 * vz / 2,
        "summed_exponent": top * (n - 2) / 2 - vz / 2,
        "constant": zeta_local(rep.p),
    }
