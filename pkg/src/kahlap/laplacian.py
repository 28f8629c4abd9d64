"""Kahler and complex Euclidean Laplacians; operator powers at the origin.

Powers are computed by iterating the operator on jets.  The only subtlety
is the truncation budget: one Laplacian application costs two degrees of
validity, so evaluating the k-th power at the origin needs the metric valid
to degree 2k-2 and the test function exact (a polynomial jet).  Working
degrees are capped along the chain -- the s-th intermediate result is only
needed through degree 2(k-s) -- which keeps high-dimensional runs cheap.

The expanded origin formulas for the second and third powers on an Einstein
metric in normal coordinates are implemented as independent cross-checks of
the iteration (they use only origin derivatives of g_inv and of the test
function, no operator iteration).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .geometry import MetricJet
from .jets import (
    DimensionMismatchError,
    InsufficientOrderError,
    Jet,
    KahlapError,
    _mul_capped,
)
from .rationals import ZERO


@dataclass(frozen=True)
class LaplacianBudget:
    """Truncation accounting for iterated Laplacians.

    ``required_order`` is the default potential order 2k+2 (one spare degree
    pair beyond the hard floor 2k coming from the two potential derivatives
    that build the metric).
    """

    k: int
    potential_order: int

    @property
    def required_order(self) -> int:
        return 2 * self.k + 2

    @property
    def satisfied(self) -> bool:
        return self.potential_order >= self.required_order


def require_budget(m: MetricJet, phi: Jet, k: int) -> None:
    """Raise InsufficientOrderError unless Lap^k phi(0) is computable exactly."""
    if k < 1:
        raise ValueError("k must be >= 1")
    if not phi.exact:
        raise InsufficientOrderError(
            "test functions must be exact polynomial jets",
            required_order=2 * k + 2,
        )
    if m.valid < 2 * k - 2:
        raise InsufficientOrderError(
            f"metric valid to {m.valid} < {2 * k - 2}; "
            f"build the potential at order >= {2 * k + 2}",
            required_order=2 * k + 2,
        )


def euclidean_laplacian(phi: Jet) -> Jet:
    """sum_i d^2 phi / dz_i dzb_i."""
    acc = None
    for i in range(1, phi.dim + 1):
        term = phi.diff_hol(i).diff_anti(i)
        acc = term if acc is None else acc + term
    return acc


def kahler_laplacian(m: MetricJet, phi: Jet, cap: int | None = None) -> Jet:
    """sum_{a,b} g_inv[a][b] * d^2 phi / dz_b dzb_a.

    Result validity is min(metric valid, phi valid - 2).  ``cap`` truncates
    the output degree (used by the power schedule).
    """
    if phi.dim != m.dim:
        raise DimensionMismatchError(
            f"metric dimension {m.dim} vs jet dimension {phi.dim}"
        )
    out_order = phi.order if cap is None else min(cap, phi.order)
    x = m.g_inv
    acc = None
    for a in range(m.dim):
        for b in range(m.dim):
            hess = phi.diff_hol(b + 1).diff_anti(a + 1)
            if hess.is_zero and acc is not None:
                continue
            term = _mul_capped(x[a][b], hess, out_order)
            acc = term if acc is None else acc + term
    return acc


def powers_at_origin(m: MetricJet | None, phi: Jet, kmax: int) -> list:
    """[Lap^1 phi(0), ..., Lap^kmax phi(0)]; m None means the Euclidean one.

    Intermediate jets are truncated to the degree actually needed by the
    remaining applications.
    """
    if m is None:
        values = []
        psi = phi
        for _ in range(kmax):
            psi = euclidean_laplacian(psi)
            values.append(psi.eval0())
        return values
    require_budget(m, phi, kmax)
    values = []
    psi = phi
    for s in range(1, kmax + 1):
        psi = kahler_laplacian(m, psi, cap=2 * (kmax - s))
        values.append(psi.eval0())
    return values


def power_at_origin(m: MetricJet | None, phi: Jet, k: int):
    """Lap^k phi(0) exactly (Kahler for a MetricJet, Euclidean for None)."""
    return powers_at_origin(m, phi, k)[k - 1]


def euclidean_moments(phi: Jet, kmax: int) -> list:
    """[Lapc^j phi(0)] for j = 1..kmax (exact, cheap)."""
    return powers_at_origin(None, phi, kmax)


# ----------------------------------------------------------------------
# expanded origin identities


@dataclass(frozen=True)
class PowerIdentity:
    lhs: object
    rhs: object

    @property
    def passed(self) -> bool:
        return self.lhs == self.rhs


class NotEinsteinError(KahlapError):
    """The identity is only asserted for Einstein metrics."""


def _require_einstein(m: MetricJet):
    e = m.einstein
    if not e.is_einstein:
        raise NotEinsteinError(
            "identity asserted only for Einstein metrics in normal coordinates"
        )
    return e.lam


def second_power_check(m: MetricJet, phi: Jet) -> PowerIdentity:
    """Lap^2 phi(0) = (Lapc^2 + lam*Lapc) phi(0) on Einstein metrics in
    normal coordinates."""
    lam = _require_einstein(m)
    lhs = power_at_origin(m, phi, 2)
    mom = euclidean_moments(phi, 2)
    rhs = mom[1] + lam * mom[0]
    return PowerIdentity(lhs=lhs, rhs=rhs)


def deriv_at0(jet: Jet, alpha, beta):
    """d^alpha dbar^beta jet at 0 = coefficient times factorials."""
    from .jets import BiIndex

    c = jet.coefficient(BiIndex(tuple(alpha), tuple(beta)))
    if c == 0:
        return ZERO
    mult = 1
    for e in alpha:
        mult *= math.factorial(e)
    for e in beta:
        mult *= math.factorial(e)
    return c * mult


def _unit(n, i):
    return tuple(1 if k == i else 0 for k in range(n))


def _unit2(n, i, j):
    return tuple((1 if k == i else 0) + (1 if k == j else 0) for k in range(n))


def third_power_rhs(m: MetricJet, phi: Jet):
    """Expanded third-power value at the origin for an Einstein metric in
    normal coordinates:

        (Lapc^3 + 3 lam Lapc^2 + lam^2 Lapc) phi(0)
        + 2 sum d_l dbar_h X[i][j] * d_j d_h dbar_l dbar_i phi
        +   sum d_l d_h   X[i][j] * d_j dbar_h dbar_l dbar_i phi
        +   sum dbar_l dbar_h X[i][j] * d_j d_h d_l dbar_i phi
        +   sum d_l d_h dbar_l dbar_h X[i][j] * d_j dbar_i phi

    with X = g_inv, all derivative coefficients evaluated at 0.  Requires
    the inverse metric valid through degree 4.
    """
    lam = _require_einstein(m)
    if m.valid < 4:
        raise InsufficientOrderError(
            "third-power expansion needs metric valid degree >= 4",
            required_order=8,
        )
    n = m.dim
    x = m.g_inv
    mom = euclidean_moments(phi, 3)
    total = mom[2] + 3 * lam * mom[1] + lam * lam * mom[0]
    for i in range(n):
        for j in range(n):
            xij = x[i][j]
            for l in range(n):
                for h in range(n):
                    c_mixed = deriv_at0(xij, _unit(n, l), _unit(n, h))
                    if c_mixed != 0:
                        f = deriv_at0(phi, _unit2(n, j, h), _unit2(n, l, i))
                        if f != 0:
                            total += 2 * c_mixed * f
                    c_holhol = deriv_at0(xij, _unit2(n, l, h), (0,) * n)
                    if c_holhol != 0:
                        f = _phi_deriv(phi, (j,), (h, l, i), n)
                        if f != 0:
                            total += c_holhol * f
                    c_antianti = deriv_at0(xij, (0,) * n, _unit2(n, l, h))
                    if c_antianti != 0:
                        f = _phi_deriv(phi, (j, h, l), (i,), n)
                        if f != 0:
                            total += c_antianti * f
                    c_quartic = deriv_at0(xij, _unit2(n, l, h), _unit2(n, l, h))
                    if c_quartic != 0:
                        f = deriv_at0(phi, _unit(n, j), _unit(n, i))
                        if f != 0:
                            total += c_quartic * f
    return total


def _phi_deriv(phi: Jet, hol_indices, anti_indices, n):
    alpha = [0] * n
    beta = [0] * n
    for idx in hol_indices:
        alpha[idx] += 1
    for idx in anti_indices:
        beta[idx] += 1
    return deriv_at0(phi, tuple(alpha), tuple(beta))


def third_power_check(m: MetricJet, phi: Jet) -> PowerIdentity:
    """Direct Lap^3 phi(0) against the expanded right-hand side."""
    return PowerIdentity(
        lhs=power_at_origin(m, phi, 3), rhs=third_power_rhs(m, phi)
    )


def inverse_metric_cross_hessian(m: MetricJet, i: int, j: int):
    """The four origin curvature coefficients coupling directions i and j
    (1-based): (d_i dbar_i X[j][j], d_j dbar_j X[i][i], d_j dbar_i X[i][j],
    d_i dbar_j X[j][i]) at 0, X = g_inv."""
    n = m.dim
    x = m.g_inv
    i -= 1
    j -= 1
    return (
        deriv_at0(x[j][j], _unit(n, i), _unit(n, i)),
        deriv_at0(x[i][i], _unit(n, j), _unit(n, j)),
        deriv_at0(x[i][j], _unit(n, j), _unit(n, i)),
        deriv_at0(x[j][i], _unit(n, i), _unit(n, j)),
    )
