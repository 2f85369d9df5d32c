"""Modular and elliptic special functions in the conventions used here.

q-Pochhammer, Dedekind eta, Jacobi theta constants, Eisenstein series with
the zeta-normalized companions G_k = zeta(k) E_k, the Serre derivative,
the two (2,5)-model characters, and Weierstrass half-period values.

Series are exact-order objects from :mod:`rcftlab.series`; numeric
evaluation at a point uses adaptive summation with an Im(tau) >= 0.8
convergence guard.

A documentation note on two displays that the implementation does not
reproduce (both recorded in the verification suites as flagged cases
rather than silently corrected):

* the product (q)_inf expands as 1 - q - q^2 + q^5 + q^7 - ... by the
  pentagonal-number pattern; a source display shows "+ q^2",
* theta2^4/theta3^4 = 16 q^(1/2) (1 - 8 q^(1/2) + 44 q - 192 q^(3/2) + ...);
  a source display shows -64 for the third correction coefficient.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .series import SeriesError, TruncatedSeries

__all__ = [
    "ModularPoint",
    "CharacterSeries",
    "pochhammer",
    "eta_series",
    "theta_constants",
    "eisenstein_series",
    "zeta_even",
    "serre_derivative",
    "rogers_ramanujan",
    "rr_product_form",
    "character_ode_residual",
    "jacobi_identity_residual",
    "theta_numeric",
    "eta_numeric",
    "eisenstein_numeric",
    "rr_numeric",
    "weierstrass_e_values",
    "e_cubic_residual",
    "serre_e_identity_residuals",
    "b0_expansion_check",
]

#: numeric evaluation guard: adaptive sums are only trusted above this
CONVERGENCE_MIN_IM = 0.8

_ZETA_EVEN = {2: math.pi ** 2 / 6, 4: math.pi ** 4 / 90, 6: math.pi ** 6 / 945}
_EIS_COEF = {2: -24, 4: 240, 6: -504}


@dataclass(frozen=True)
class ModularPoint:
    """A point tau in the upper half plane with nome q = e^{2 pi i tau}."""

    tau: complex

    def __post_init__(self):
        if self.tau.imag <= 0:
            raise ValueError(f"tau must have positive imaginary part, got {self.tau}")

    @property
    def q(self) -> complex:
        return cmath.exp(2j * cmath.pi * self.tau)

    def require_convergent(self):
        if self.tau.imag < CONVERGENCE_MIN_IM:
            raise ValueError(
                f"Im tau = {self.tau.imag} below convergence guard {CONVERGENCE_MIN_IM}"
            )


# ----------------------------------------------------------------------
# q-series
# ----------------------------------------------------------------------

def pochhammer(order: int, n: int | None = None) -> TruncatedSeries:
    """(q)_n = prod_{k=1}^n (1 - q^k); n=None gives (q)_inf to the order."""
    if order < 1:
        raise ValueError("order must be >= 1")
    kmax = order if n is None else min(n, order)
    out = TruncatedSeries.constant(1.0, order)
    for k in range(1, kmax + 1):
        out = out * TruncatedSeries.from_dict(1, {0: 1.0, k: -1.0}, order)
    return out


def eta_series(order: int) -> TruncatedSeries:
    """Dedekind eta as a q-series on the 1/24 exponent grid."""
    return pochhammer(order).shifted((1, 24))


def theta_constants(order: int) -> tuple[TruncatedSeries, TruncatedSeries, TruncatedSeries]:
    """theta_2, theta_3, theta_4 at z=0 as q-series.

    theta2 = 2 q^{1/8} sum q^{n(n+1)/2} (denom 8),
    theta3 = 1 + 2 sum q^{n^2/2},  theta4 with alternating signs (denom 2).
    """
    t2 = {}
    nmax = int(math.isqrt(8 * order) + 2)
    for n in range(nmax):
        num = (2 * n + 1) ** 2  # exponent (n + 1/2)^2/2 = (2n+1)^2/8
        if num < 8 * order:
            t2[num] = t2.get(num, 0) + 2.0
    th2 = TruncatedSeries.from_dict(8, t2, 8 * order)
    t3, t4 = {0: 1.0}, {0: 1.0}
    for n in range(1, nmax):
        num = n * n  # exponent n^2/2 on the denom-2 grid
        if num < 2 * order:
            t3[num] = t3.get(num, 0) + 2.0
            t4[num] = t4.get(num, 0) + 2.0 * (-1) ** n
    th3 = TruncatedSeries.from_dict(2, t3, 2 * order)
    th4 = TruncatedSeries.from_dict(2, t4, 2 * order)
    return th2, th3, th4


def zeta_even(k: int) -> float:
    try:
        return _ZETA_EVEN[k]
    except KeyError:
        raise ValueError(f"unsupported Eisenstein weight {k}") from None


def eisenstein_series(k: int, order: int) -> TruncatedSeries:
    """E_k(q) = 1 - (2k/B_k) sum sigma_{k-1}(n) q^n for k in {2, 4, 6}.

    The zeta-normalized G_k equals zeta_even(k) * E_k.
    """
    if k not in _EIS_COEF:
        raise ValueError(f"unsupported Eisenstein weight {k}")
    coef = _EIS_COEF[k]
    terms = {0: 1.0}
    sig = np.zeros(order, dtype=float)
    for d in range(1, order):
        for m in range(d, order, d):
            sig[m] += d ** (k - 1)
    for m in range(1, order):
        terms[m] = coef * sig[m]
    return TruncatedSeries.from_dict(1, terms, order)


def serre_derivative(f: TruncatedSeries, weight) -> TruncatedSeries:
    """Serre derivative of weight ell: q df/dq - (ell/12) E2 f."""
    ell = float(Fraction(weight) if not isinstance(weight, float) else weight)
    order = int(math.ceil(f.trunc))
    e2 = eisenstein_series(2, max(order, 2))
    return f.qdq() - (ell / 12.0) * (e2 * f)


# ----------------------------------------------------------------------
# Rogers-Ramanujan characters
# ----------------------------------------------------------------------

@dataclass(frozen=True)
class CharacterSeries:
    """One torus character: variant 'h0' leads with q^{11/60}, 'g0' with q^{-1/60}."""

    variant: str
    series: TruncatedSeries = field(repr=False)

    def __post_init__(self):
        if self.variant not in ("h0", "g0"):
            raise ValueError("variant must be 'h0' or 'g0'")


def _rr_sum_form(variant: str, order: int) -> TruncatedSeries:
    out = TruncatedSeries.zero(order)
    n = 0
    while True:
        e = n * n + n if variant == "h0" else n * n
        if e >= order:
            break
        term = TruncatedSeries.monomial(1.0, e, order) / pochhammer(order, n)
        out = out + term
        n += 1
    return out


def rogers_ramanujan(variant: str, order: int) -> CharacterSeries:
    """Sum-form character series, shifted to its 1/60 leading exponent."""
    body = _rr_sum_form(variant, order)
    shift = Fraction(11, 60) if variant == "h0" else Fraction(-1, 60)
    return CharacterSeries(variant, body.shifted(shift))


def rr_product_form(variant: str, order: int) -> TruncatedSeries:
    """Product side of the Rogers-Ramanujan identities (without the q-power).

    h0: prod over n = +-2 mod 5 of (1-q^n)^{-1};  g0: n = +-1 mod 5.
    """
    residues = (2, 3) if variant == "h0" else (1, 4)
    out = TruncatedSeries.constant(1.0, order)
    for n in range(1, order):
        if n % 5 in residues:
            out = out / TruncatedSeries.from_dict(1, {0: 1.0, n: -1.0}, order)
    return out


def character_ode_residual(variant: str, order: int,
                           f: TruncatedSeries | None = None) -> TruncatedSeries:
    """Residual of the second-order character equation D_2 D_0 f - (11/3600) E4 f.

    With f one of the two characters the residual vanishes to truncation;
    passing an arbitrary series shows the equation is nontrivial.
    """
    if order < 5:
        raise ValueError("order must be >= 5")
    if f is None:
        f = rogers_ramanujan(variant, order).series
    e4 = eisenstein_series(4, order)
    lhs = serre_derivative(serre_derivative(f, 0), 2)
    return lhs - Fraction(11, 3600) * (e4 * f)


def jacobi_identity_residual(order: int) -> TruncatedSeries:
    """theta2^4 + theta4^4 - theta3^4 as a q-series (zero to truncation)."""
    th2, th3, th4 = theta_constants(order)
    return th2.pow_int(4) + th4.pow_int(4) - th3.pow_int(4)


# ----------------------------------------------------------------------
# numeric evaluation
# ----------------------------------------------------------------------

def theta_numeric(i: int, point: ModularPoint, deriv: int = 0) -> complex:
    """theta_i(0 | tau), or its deriv-th derivative with respect to tau.

    Summed over the integer index with adaptive cutoff: stop once the last
    term falls below 1e-16 of the partial sum.
    """
    point.require_convergent()
    a = {2: 0.5, 3: 0.0, 4: 0.0}[i]
    b = {2: 0.0, 3: 0.0, 4: 0.5}[i]
    tau = point.tau
    total = 0j
    n = 0
    while True:
        shell = 0j
        for m in ((n,) if n == 0 else (n, -n)):
            e = (m + a) ** 2 / 2.0
            term = cmath.exp(2j * cmath.pi * (e * tau + (m + a) * b))
            shell += (2j * cmath.pi * e) ** deriv * term
        total += shell
        if n > 1 and abs(shell) < 1e-16 * max(abs(total), 1e-300):
            break
        if n > 600:
            raise ValueError("theta sum did not converge")
        n += 1
    return total


def eta_numeric(point: ModularPoint) -> complex:
    point.require_convergent()
    q = point.q
    out = cmath.exp(2j * cmath.pi * point.tau / 24)
    n, prod = 1, 1.0 + 0j
    while True:
        t = q ** n
        prod *= (1.0 - t)
        if abs(t) < 1e-18:
            break
        n += 1
    return out * prod


def eisenstein_numeric(k: int, point: ModularPoint) -> complex:
    point.require_convergent()
    if k not in _EIS_COEF:
        raise ValueError(f"unsupported Eisenstein weight {k}")
    q = point.q
    total = 1.0 + 0j
    n = 1
    while True:
        sig = sum(d ** (k - 1) for d in range(1, n + 1) if n % d == 0)
        t = _EIS_COEF[k] * sig * q ** n
        total += t
        if abs(t) < 1e-17 * abs(total):
            break
        n += 1
        if n > 4000:
            raise ValueError("Eisenstein sum did not converge")
    return total


def rr_numeric(variant: str, point: ModularPoint) -> complex:
    """Character value at the point, via the sum form."""
    point.require_convergent()
    q = point.q
    lead = q ** (11 / 60) if variant == "h0" else q ** (-1 / 60)
    total = 0j
    n = 0
    poch = 1.0 + 0j
    while True:
        if n > 0:
            poch *= (1.0 - q ** n)
        e = n * n + n if variant == "h0" else n * n
        t = q ** e / poch
        total += t
        if n > 1 and abs(t) < 1e-17 * abs(total):
            break
        n += 1
    return lead * total


# ----------------------------------------------------------------------
# half-period values and their cubic
# ----------------------------------------------------------------------

def weierstrass_e_values(point: ModularPoint) -> tuple[complex, complex, complex]:
    """(xi0, xi1, xi2): Weierstrass values at the half periods of the
    lattice 2 pi i (Z + tau Z), written in quartic theta combinations.

    xi1 = (theta2^4 + theta3^4)/12, xi0 = (-theta2^4 + theta4^4)/12,
    xi2 = -(theta3^4 + theta4^4)/12; they sum to zero.
    """
    t2 = theta_numeric(2, point) ** 4
    t3 = theta_numeric(3, point) ** 4
    t4 = theta_numeric(4, point) ** 4
    return (t4 - t2) / 12.0, (t2 + t3) / 12.0, (-t3 - t4) / 12.0


def e_cubic_residual(point: ModularPoint) -> float:
    """Max residual of xi^3 - 30 G4' xi - 70 G6' over the three half-period
    values, with the G's taken for the 2 pi i scaled lattice:
    G_k' = G_k/(2 pi i)^k, which reduces the cubic to
    xi^3 - (E4/48) xi + E6/864 = 0.
    """
    e4 = eisenstein_numeric(4, point)
    e6 = eisenstein_numeric(6, point)
    res = 0.0
    for xi in weierstrass_e_values(point):
        res = max(res, abs(xi ** 3 - e4 / 48.0 * xi + e6 / 864.0))
    return res


def serre_e_identity_residuals(point: ModularPoint) -> dict[int, float]:
    """|(-2 D theta_k / theta_k) - e_k| for k = 2, 3, 4, evaluated at the point.

    D is the Serre derivative at weight 1/2; e_2 = xi2, e_3 = xi0, e_4 = xi1.
    """
    xi0, xi1, xi2 = weierstrass_e_values(point)
    e2n = eisenstein_numeric(2, point)
    expected = {2: xi2, 3: xi0, 4: xi1}
    out = {}
    for k in (2, 3, 4):
        th = theta_numeric(k, point)
        dth = theta_numeric(k, point, deriv=1) / (2j * cmath.pi)  # (1/2pi i) d/dtau
        serre = dth - (0.5 / 12.0) * e2n * th
        out[k] = abs(-2.0 * serre / th - expected[k])
    return out


def b0_expansion_check(order: int = 4) -> dict:
    """theta2^4/theta3^4 on the q^(1/2) grid, against the quoted expansion.

    Returns the computed series, the first four coefficients on the half
    integer grid, the quoted coefficients 16*(1, -8, 44, -64), and the
    residual series of (computed - quoted) truncated below q^2.  The fourth
    computed coefficient is -3072 = 16*(-192); the quoted -64 does not
    match and is reported, not corrected away.
    """
    if order < 2:
        raise ValueError("order must be >= 2 on the 1/2 grid")
    th2, th3, _ = theta_constants(order + 2)
    ratio = th2.pow_int(4) / th3.pow_int(4)
    computed = [ratio.coeff(Fraction(k, 2)) for k in (1, 2, 3, 4)]
    quoted = [16.0, -128.0, 704.0, -1024.0]
    quoted_series = TruncatedSeries.from_dict(
        2, {1: 16.0, 2: -128.0, 3: 704.0, 4: -1024.0}, 4)
    residual = (ratio - quoted_series).truncated(2)
    return {
        "series": ratio,
        "computed": computed,
        "quoted": quoted,
        "residual_below_q2": residual,
    }
