"""Kahler metric jets: inverse, determinant, Ricci and Einstein data.

The metric of a potential jet F is its mixed Hessian g[i][j] = d^2 F /
dz_i dzb_j (both indices 0-based here, rows holomorphic).  The Laplacian
contraction used throughout the package is

    (Lap f) = sum_{a,b} ginv[a][b] * d^2 f / dz_b dzb_a,

i.e. the trace of (matrix inverse of g) times the mixed Hessian of f.  The
transposition convention is pinned by a test: a potential |F(z)|^2 pulled
back from flat space through a holomorphic map F must make Lap(|F_k|^2)
constant.  Under this convention the Einstein constants of the standard
catalog come out as lambda(hyperbolic n) = -(n+1), lambda(Fubini-Study n)
= n+1 with g(0) = I.

Ricci is computed two independent ways: from -d dbar log det(g) (series
determinant, then log), and from the curvature-style contraction of metric
derivatives; the agreement of the two routes on every catalog metric is a
standing cross-check of the series machinery.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .jets import (
    InsufficientOrderError,
    Jet,
    KahlapError,
    _mul_capped,
)
from .rationals import ZERO, rat

Matrix = tuple[tuple[Jet, ...], ...]


class DegenerateMetricError(KahlapError):
    """Metric constant term singular or not positive definite."""


class NormalizationError(KahlapError):
    """Normal-coordinate reduction needs a non-rational linear change."""


# ----------------------------------------------------------------------
# rational constant matrices


def _rational_inverse(rows):
    """Inverse of a rational matrix via Gauss-Jordan; None when singular."""
    n = len(rows)
    aug = [[rat(rows[i][j]) for j in range(n)] + [rat(1 if k == i else 0) for k in range(n)] for i in range(n)]
    for col in range(n):
        piv = next((r for r in range(col, n) if aug[r][col] != 0), None)
        if piv is None:
            return None
        aug[col], aug[piv] = aug[piv], aug[col]
        inv_p = rat(1) / aug[col][col]
        aug[col] = [x * inv_p for x in aug[col]]
        for r in range(n):
            if r != col and aug[r][col] != 0:
                f = aug[r][col]
                aug[r] = [x - f * y for x, y in zip(aug[r], aug[col])]
    return [row[n:] for row in aug]


def _leading_minors_positive(rows) -> bool:
    n = len(rows)
    work = [[rat(rows[i][j]) for j in range(n)] for i in range(n)]
    # fraction-free-enough: track determinant of each leading block by elimination
    det = rat(1)
    for k in range(n):
        if work[k][k] == 0:
            return False
        det = det * work[k][k]
        if det <= 0:
            return False
        inv_p = rat(1) / work[k][k]
        for i in range(k + 1, n):
            f = work[i][k] * inv_p
            for j in range(k, n):
                work[i][j] = work[i][j] - f * work[k][j]
    return True


# ----------------------------------------------------------------------
# jet matrices


def mat_mul(a: Sequence[Sequence[Jet]], b: Sequence[Sequence[Jet]], cap: int) -> Matrix:
    """Matrix product with every jet product capped at degree ``cap``.

    Entries come back at the ambient order of ``a``'s entries so they mix
    freely with uncapped jets; their validity is bounded by ``cap``.
    """
    n = len(a)
    m = len(b[0])
    inner = len(b)
    ambient = a[0][0].order
    out = []
    for i in range(n):
        row = []
        for j in range(m):
            acc = None
            for k in range(inner):
                p = _mul_capped(a[i][k], b[k][j], cap).lifted(ambient)
                acc = p if acc is None else acc + p
            row.append(acc)
        out.append(tuple(row))
    return tuple(out)


def series_matrix_inverse(g: Matrix, target_valid: int) -> Matrix:
    """Inverse of a jet matrix with invertible constant term.

    Newton iteration X <- X(2I - GX): each step doubles the guaranteed
    correct degree, with all products capped at the current step's target.
    """
    n = len(g)
    dim = g[0][0].dim
    order = g[0][0].order
    g0 = [[entry.constant_term() for entry in row] for row in g]
    g0inv = _rational_inverse(g0)
    if g0inv is None:
        raise DegenerateMetricError("degenerate metric at origin")
    x: Matrix = tuple(
        tuple(Jet.constant(dim, order, g0inv[i][j]) for j in range(n)) for i in range(n)
    )
    v = 0
    two_i = tuple(
        tuple(Jet.constant(dim, order, 2 if i == j else 0) for j in range(n))
        for i in range(n)
    )
    while v < target_valid:
        v = min(2 * v + 1, target_valid)
        gx = mat_mul(g, x, v)
        corr = tuple(
            tuple(two_i[i][j] - gx[i][j] for j in range(n)) for i in range(n)
        )
        x = mat_mul(x, corr, v)
    # Newton's convergence degree, not the muls' bookkeeping, bounds validity
    valid = min(target_valid, min(e._veff for row in g for e in row))
    return tuple(
        tuple(Jet._raw(dim, order, valid, False, e._grades) for e in row) for row in x
    )


def series_determinant(mat: Matrix) -> Jet:
    """Determinant by pivoted elimination with exact series division.

    Pivots need a nonzero constant coefficient; for metric matrices g(0) is
    invertible, so a suitable pivot always exists after row swaps.
    """
    n = len(mat)
    dim = mat[0][0].dim
    order = mat[0][0].order
    work = [list(row) for row in mat]
    sign = 1
    det = Jet.one(dim, order)
    for k in range(n):
        piv = next(
            (r for r in range(k, n) if work[r][k].constant_term() != 0), None
        )
        if piv is None:
            return Jet.zero(dim, order)
        if piv != k:
            work[k], work[piv] = work[piv], work[k]
            sign = -sign
        pivot = work[k][k]
        det = _mul_capped(det, pivot, order)
        pinv = pivot.inv1()
        for i in range(k + 1, n):
            if work[i][k].is_zero:
                continue
            factor = _mul_capped(work[i][k], pinv, order)
            for j in range(k, n):
                work[i][j] = work[i][j] - _mul_capped(factor, work[k][j], order)
    return det if sign == 1 else -det


# ----------------------------------------------------------------------
# the metric object


@dataclass(frozen=True)
class EinsteinData:
    """Result of the proportionality test Ric = lambda * g.

    ``lam`` is Ric[0][0](0)/g[0][0](0) whether or not the metric is
    Einstein; it is the Einstein constant exactly when ``is_einstein``.
    ``checked_degree`` is the jet degree through which Ric - lam*g was
    verified to vanish.
    """

    is_einstein: bool
    lam: object
    checked_degree: int


@dataclass(frozen=True)
class NormalityReport:
    """Outcome of the normal-coordinate test at the origin."""

    ok: bool
    identity_at_origin: bool
    first_order_vanishes: bool
    offenders: tuple[str, ...]

    def __bool__(self) -> bool:
        return self.ok


class MetricJet:
    """Metric matrix of jets together with its series inverse.

    The inverse is computed lazily (Newton) and cached; ``valid`` bounds the
    degree through which g * g_inv equals the identity.
    """

    __slots__ = ("dim", "order", "valid", "g", "_g_inv", "_einstein")

    def __init__(self, g: Matrix):
        n = len(g)
        entry = g[0][0]
        self.dim = n
        self.order = entry.order
        self.valid = min(e._veff for row in g for e in row)
        self.valid = min(self.valid, self.order)
        self.g = g
        self._g_inv = None
        self._einstein = None
        for i in range(n):
            for j in range(i, n):
                if g[i][j].conj() != g[j][i]:
                    raise DegenerateMetricError(
                        f"metric not Hermitian: entry ({i + 1},{j + 1})"
                    )
        g0 = [[e.constant_term() for e in row] for row in g]
        if _rational_inverse(g0) is None:
            raise DegenerateMetricError("degenerate metric at origin")
        # Sylvester's criterion; g0 is symmetric by the Hermitian check above
        if not _leading_minors_positive(g0):
            raise DegenerateMetricError("metric not positive definite at origin")

    @property
    def g_inv(self) -> Matrix:
        if self._g_inv is None:
            self._g_inv = series_matrix_inverse(self.g, self.valid)
        return self._g_inv

    @property
    def einstein(self) -> EinsteinData:
        if self._einstein is None:
            self._einstein = einstein_data(self)
        return self._einstein


def metric_from_potential(phi: Jet) -> MetricJet:
    """Mixed Hessian of a potential jet, as a MetricJet."""
    if phi._veff < 2:
        raise InsufficientOrderError(
            "potential must be valid at least to degree 2", required_order=2
        )
    n = phi.dim
    g = tuple(
        tuple(phi.diff_hol(i + 1).diff_anti(j + 1) for j in range(n))
        for i in range(n)
    )
    return MetricJet(g)


# ----------------------------------------------------------------------
# Ricci, two routes


def ricci(m: MetricJet) -> Matrix:
    """Ric[i][j] = -d_i dbar_j log det(g)."""
    det = series_determinant(m.g)
    c0 = det.constant_term()
    det_unit = det.scale(rat(1) / c0)  # log of the positive constant drops out
    logdet = det_unit.log1()
    n = m.dim
    return tuple(
        tuple(-(logdet.diff_hol(i + 1).diff_anti(j + 1)) for j in range(n))
        for i in range(n)
    )


def ricci_contracted(m: MetricJet, cap: int | None = None) -> Matrix:
    """Ricci from the curvature-style contraction of metric derivatives:

        Ric[i][j] = sum_{a,b} X[a][b] * ( -d_b dbar_a g[i][j]
                    + sum_{c,d} X[c][d] * d_b g[i][c] * dbar_a g[d][j] )

    with X = g_inv.  Independent of the determinant route; products are
    capped at ``cap`` when given (the comparison degree), which keeps the
    n^2 matrix products cheap.
    """
    n = m.dim
    cap = m.order if cap is None else cap
    x = m.g_inv
    da_g = [
        tuple(tuple(m.g[i][c].diff_hol(b + 1) for c in range(n)) for i in range(n))
        for b in range(n)
    ]
    db_g = [
        tuple(tuple(m.g[d][j].diff_anti(a + 1) for j in range(n)) for d in range(n))
        for a in range(n)
    ]
    #   P_b = (d_b g) X ;  Q_ab = P_b (dbar_a g)
    p = [mat_mul(da_g[b], x, cap) for b in range(n)]
    ambient = m.order
    acc = [[None] * n for _ in range(n)]
    for a in range(n):
        for b in range(n):
            q = mat_mul(p[b], db_g[a], cap)
            hess = tuple(
                tuple(m.g[i][j].diff_hol(b + 1).diff_anti(a + 1) for j in range(n))
                for i in range(n)
            )
            for i in range(n):
                for j in range(n):
                    term = _mul_capped(x[a][b], q[i][j] - hess[i][j], cap)
                    term = term.lifted(ambient)
                    acc[i][j] = term if acc[i][j] is None else acc[i][j] + term
    return tuple(tuple(row) for row in acc)


def matrices_agree(a: Matrix, b: Matrix, through: int | None = None) -> bool:
    return all(
        ea.agrees(eb, through) for ra, rb in zip(a, b) for ea, eb in zip(ra, rb)
    )


def einstein_data(m: MetricJet) -> EinsteinData:
    """Proportionality test Ric = lam*g through the common valid degree."""
    ric = ricci(m)
    lam = ric[0][0].eval0() / m.g[0][0].eval0()
    checked = min(m.valid - 2, m.order)
    is_e = True
    for i in range(m.dim):
        for j in range(m.dim):
            diff = ric[i][j] - m.g[i][j].scale(lam)
            if not diff.agrees(Jet.zero(diff.dim, diff.order), checked):
                is_e = False
    return EinsteinData(is_einstein=is_e, lam=lam, checked_degree=checked)


# ----------------------------------------------------------------------
# normal coordinates


def normality_report(m: MetricJet) -> NormalityReport:
    """g(0) = I and all first-order metric coefficients vanish."""
    n = m.dim
    offenders = []
    id_ok = True
    for i in range(n):
        for j in range(n):
            want = 1 if i == j else 0
            if m.g[i][j].constant_term() != want:
                id_ok = False
                offenders.append(f"g[{i + 1}][{j + 1}](0) != {want}")
    first_ok = True
    for i in range(n):
        for j in range(n):
            if m.g[i][j]._grades.get(1):
                first_ok = False
                offenders.append(f"g[{i + 1}][{j + 1}] has degree-1 terms")
    return NormalityReport(
        ok=id_ok and first_ok,
        identity_at_origin=id_ok,
        first_order_vanishes=first_ok,
        offenders=tuple(offenders),
    )


def in_normal_coordinates(m: MetricJet) -> bool:
    return normality_report(m).ok


def pullback(phi: Jet, components: Sequence[Jet]) -> Jet:
    """Compose phi with a holomorphic polynomial map.

    ``components[i]`` is the jet (over the source variables) substituted for
    z_{i+1}; conjugate components are substituted for zb_{i+1}.  All
    components must have zero constant term so the composition is again a
    jet around the origin.
    """
    from .jets import ConstantTermError, DimensionMismatchError

    if len(components) != phi.dim:
        raise DimensionMismatchError(
            f"need {phi.dim} components, got {len(components)}"
        )
    order = components[0].order
    src_dim = components[0].dim
    for comp in components:
        if comp.dim != src_dim or comp.order != order:
            raise DimensionMismatchError("components must share dim and order")
        if comp.constant_term() != 0:
            raise ConstantTermError("embedding components must vanish at 0")
    conj_components = [c.conj() for c in components]
    pow_cache: dict[tuple[int, int, bool], Jet] = {}

    def power(idx: int, e: int, anti: bool) -> Jet:
        if e == 0:
            return Jet.one(src_dim, order)
        key = (idx, e, anti)
        got = pow_cache.get(key)
        if got is None:
            base = conj_components[idx] if anti else components[idx]
            got = _mul_capped(power(idx, e - 1, anti), base, order)
            pow_cache[key] = got
        return got

    total = Jet.zero(src_dim, order)
    limit = min(phi._veff, phi.order)
    for bi, c in phi.terms():
        if bi.degree > limit:
            continue
        prod = None
        for idx, e in enumerate(bi.hol):
            if e:
                p = power(idx, e, False)
                prod = p if prod is None else _mul_capped(prod, p, order)
        for idx, e in enumerate(bi.anti):
            if e:
                p = power(idx, e, True)
                prod = p if prod is None else _mul_capped(prod, p, order)
        if prod is None:
            prod = Jet.one(src_dim, order)
        total = total + prod.scale(c)
    valid = min(limit, total._veff, order)
    exact = total.exact and phi.exact
    return Jet._raw(src_dim, order, valid, exact, total._grades)


def to_normal_coordinates(phi: Jet) -> Jet:
    """Quadratic coordinate correction that kills first metric derivatives.

    Requires g(0) = I exactly over the rationals: a linear normalization
    would in general need irrational scalings, which exact mode refuses.
    The substitution is w_j -> w_j + (1/2) A[j][k][l] w_k w_l with
    A[j][k][l] = -d g[l][j] / dz_k at 0.
    """
    m = metric_from_potential(phi)
    n = phi.dim
    for i in range(n):
        for j in range(n):
            want = 1 if i == j else 0
            if m.g[i][j].constant_term() != want:
                raise NormalizationError(
                    "requires irrational linear normalization: g(0) != I"
                )
    order = phi.order
    components = []
    for j in range(n):
        comp = Jet.variable(n, order, j + 1)
        quad = Jet.zero(n, order)
        for k in range(n):
            for l in range(n):
                a_jkl = -(m.g[l][j].diff_hol(k + 1).eval0())
                if a_jkl != 0:
                    wk = Jet.variable(n, order, k + 1)
                    wl = Jet.variable(n, order, l + 1)
                    quad = quad + (wk * wl).scale(rat(1, 2) * a_jkl)
        components.append(comp + quad)
    corrected = pullback(phi, components)
    if corrected._veff >= 3:
        check = normality_report(metric_from_potential(corrected))
        if not check.ok:
            raise KahlapError(
                f"normal-coordinate correction failed: {check.offenders}"
            )
    return corrected


# ----------------------------------------------------------------------
# the trace identity at the origin


@dataclass(frozen=True)
class TraceIdentity:
    """S[i][j] = sum_h d_h dbar_h g_inv[i][j] at 0, compared with lam*I."""

    matrix: tuple[tuple[object, ...], ...]
    lam: object
    is_einstein: bool
    passed: bool


def inverse_metric_second_trace(m: MetricJet) -> tuple[tuple[object, ...], ...]:
    """The matrix S[i][j] = sum_h d_h dbar_h g_inv[i][j] evaluated at 0."""
    n = m.dim
    x = m.g_inv
    out = []
    for i in range(n):
        row = []
        for j in range(n):
            acc = ZERO
            for h in range(n):
                acc += x[i][j].diff_hol(h + 1).diff_anti(h + 1).eval0()
            row.append(acc)
        out.append(tuple(row))
    return tuple(out)


def trace_identity_check(m: MetricJet) -> TraceIdentity:
    """Passes iff the metric is Einstein and S equals lam * identity."""
    s = inverse_metric_second_trace(m)
    e = m.einstein
    ok = e.is_einstein and all(
        s[i][j] == (e.lam if i == j else 0)
        for i in range(m.dim)
        for j in range(m.dim)
    )
    return TraceIdentity(matrix=s, lam=e.lam, is_einstein=e.is_einstein, passed=ok)
