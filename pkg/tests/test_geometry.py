"""Metric construction, Ricci (two routes), Einstein data, normal
coordinates, and pullbacks."""

import pytest

from kahlap.catalog import (
    Flat,
    FubiniStudy,
    Hyperbolic,
    Polydisc,
    Product,
    TypeI,
    diagonal_embedding,
    potential,
)
from kahlap.geometry import (
    DegenerateMetricError,
    NormalizationError,
    einstein_data,
    in_normal_coordinates,
    matrices_agree,
    metric_from_potential,
    normality_report,
    pullback,
    ricci,
    ricci_contracted,
    series_determinant,
    to_normal_coordinates,
    trace_identity_check,
)
from kahlap.jets import BiIndex, Jet
from kahlap.rationals import rat


def bi(hol, anti):
    return BiIndex(tuple(hol), tuple(anti))


def hyp1_metric(order=8):
    return metric_from_potential(potential(Hyperbolic(1), order))


# ----------------------------------------------------------------------
# metric_from_potential


def test_flat_metric_is_identity():
    m = metric_from_potential(Jet.abs_square_sum(2, 6))
    one = Jet.one(2, 6)
    zero = Jet.zero(2, 6)
    assert m.g[0][0] == one and m.g[1][1] == one
    assert m.g[0][1] == zero and m.g[1][0] == zero
    assert m.g_inv[0][0].agrees(one) and m.g_inv[0][1].agrees(zero)


def test_hyperbolic_metric_closed_form():
    m = hyp1_metric(6)
    # g = 1/(1-t)^2 = sum (m+1) t^m, ginv = (1-t)^2
    expected_g = Jet(1, 6, [(bi((k,), (k,)), k + 1) for k in range(3)])
    assert m.g[0][0].agrees(expected_g)
    expected_inv = Jet(1, 6, [(bi((0,), (0,)), 1), (bi((1,), (1,)), -2), (bi((2,), (2,)), 1)])
    assert m.g_inv[0][0].agrees(expected_inv)


def test_type1_metric_identity_at_origin(type1_metric_order8):
    m = type1_metric_order8
    for i in range(4):
        for j in range(4):
            assert m.g[i][j].constant_term() == (1 if i == j else 0)


def test_degenerate_metric_rejected():
    # |z1 + z2|^2 has singular constant metric [[1,1],[1,1]]
    z1 = Jet.variable(2, 4, 1)
    z2 = Jet.variable(2, 4, 2)
    s = z1 + z2
    with pytest.raises(DegenerateMetricError):
        metric_from_potential(s * s.conj())


def test_metric_inverse_identity_property():
    for spec in (Hyperbolic(2), FubiniStudy(2), TypeI(2, 2)):
        m = metric_from_potential(potential(spec, 6))
        n = m.dim
        for i in range(n):
            for j in range(n):
                acc = None
                for k in range(n):
                    p = m.g[i][k] * m.g_inv[k][j]
                    acc = p if acc is None else acc + p
                target = Jet.constant(acc.dim, acc.order, 1 if i == j else 0)
                assert acc.agrees(target)


def test_metric_hermitian_symmetry(type1_metric_order8):
    m = type1_metric_order8
    for i in range(4):
        for j in range(4):
            assert m.g[i][j].conj() == m.g[j][i]


# ----------------------------------------------------------------------
# the contraction convention, pinned by an isometry oracle


def test_laplacian_convention_flat_pullback():
    """Potential |z1|^2 + |z2 + z1^2|^2 is flat space in funny coordinates;
    the Laplacian of |z2 + z1^2|^2 must be identically 1."""
    from kahlap.laplacian import kahler_laplacian

    z1 = Jet.variable(2, 6, 1)
    z2 = Jet.variable(2, 6, 2)
    f2 = z2 + z1 * z1
    phi = z1 * z1.conj() + f2 * f2.conj()
    m = metric_from_potential(phi)
    lap = kahler_laplacian(m, f2 * f2.conj())
    assert lap.agrees(Jet.one(2, 6))


# ----------------------------------------------------------------------
# Ricci and Einstein data


def test_flat_ricci_vanishes():
    m = metric_from_potential(Jet.abs_square_sum(2, 6))
    assert all(e.is_zero for row in ricci(m) for e in row)


def test_hyperbolic_ricci_proportional():
    m = hyp1_metric(8)
    ric = ricci(m)
    assert ric[0][0].agrees(m.g[0][0].scale(-2), 4)


def test_projective_space_ricci():
    m = metric_from_potential(potential(FubiniStudy(2), 8))
    ric = ricci(m)
    for i in range(2):
        for j in range(2):
            assert ric[i][j].agrees(m.g[i][j].scale(3), 4)


@pytest.mark.parametrize(
    "spec,lam",
    [
        (Hyperbolic(1), -2),
        (Hyperbolic(2), -3),
        (Hyperbolic(3), -4),
        (FubiniStudy(1), 2),
        (FubiniStudy(2), 3),
        (FubiniStudy(3), 4),
        (Polydisc(2), -2),
    ],
)
def test_einstein_constants(spec, lam):
    e = einstein_data(metric_from_potential(potential(spec, 8)))
    assert e.is_einstein and e.lam == lam


def test_type1_einstein(type1_metric_order8):
    e = type1_metric_order8.einstein
    assert e.is_einstein and e.lam == -4


def test_product_not_einstein():
    m = metric_from_potential(potential(Product(Flat(1), Hyperbolic(1)), 6))
    e = einstein_data(m)
    assert not e.is_einstein
    ric = ricci(m)
    assert ric[0][0].eval0() == 0 and ric[1][1].eval0() == -2


def test_ricci_two_routes_agree_on_catalog():
    for spec in (Hyperbolic(2), FubiniStudy(2), Polydisc(2), TypeI(2, 2)):
        m = metric_from_potential(potential(spec, 8))
        assert matrices_agree(ricci(m), ricci_contracted(m, cap=4), 4), spec.label()


def test_determinant_times_inverse_det():
    m = metric_from_potential(potential(Hyperbolic(2), 8))
    det = series_determinant(m.g)
    # det of the closed-form hyperbolic metric is (1-t)^(-(n+1))
    t = Jet.abs_square_sum(2, 8)
    target = ((Jet.one(2, 8) - t).inv1())
    cube = target * target * target
    assert det.agrees(cube, 6)


# ----------------------------------------------------------------------
# normal coordinates


def test_catalog_entries_are_normal():
    for spec in (Flat(2), Hyperbolic(2), FubiniStudy(3), Polydisc(2), TypeI(2, 2)):
        m = metric_from_potential(potential(spec, 6))
        assert in_normal_coordinates(m), spec.label()


def test_non_normal_first_derivatives():
    phi = Jet(
        1,
        6,
        [(bi((1,), (1,)), 1), (bi((2,), (1,)), rat(1, 2)), (bi((1,), (2,)), rat(1, 2))],
    )
    report = normality_report(metric_from_potential(phi))
    assert not report.ok and report.identity_at_origin and not report.first_order_vanishes


def test_non_normal_scaling():
    phi = Jet(1, 6, [(bi((1,), (1,)), 2)])
    report = normality_report(metric_from_potential(phi))
    assert not report.ok and not report.identity_at_origin


def test_to_normal_coordinates_fixes_example():
    phi = Jet(
        1,
        6,
        [(bi((1,), (1,)), 1), (bi((2,), (1,)), rat(1, 2)), (bi((1,), (2,)), rat(1, 2))],
    )
    fixed = to_normal_coordinates(phi)
    assert in_normal_coordinates(metric_from_potential(fixed))


def test_to_normal_coordinates_identity_when_already_normal():
    phi = potential(Hyperbolic(1), 6)
    assert to_normal_coordinates(phi).agrees(phi)


def test_to_normal_coordinates_rejects_scaled_metric():
    phi = Jet(1, 6, [(bi((1,), (1,)), 2)])
    with pytest.raises(NormalizationError):
        to_normal_coordinates(phi)


# ----------------------------------------------------------------------
# trace identity at the origin


def test_trace_identity_hyperbolic():
    tc = trace_identity_check(hyp1_metric(6))
    assert tc.passed and tc.matrix[0][0] == -2


def test_trace_identity_type1(type1_metric_order8):
    tc = trace_identity_check(type1_metric_order8)
    assert tc.passed
    for i in range(4):
        for j in range(4):
            assert tc.matrix[i][j] == (-4 if i == j else 0)


def test_trace_identity_product_fails():
    m = metric_from_potential(potential(Product(Flat(1), Hyperbolic(1)), 6))
    tc = trace_identity_check(m)
    assert not tc.passed and not tc.is_einstein
    assert tc.matrix[0][0] == 0 and tc.matrix[1][1] == -2
    assert tc.matrix[0][1] == 0 and tc.matrix[1][0] == 0


# ----------------------------------------------------------------------
# pullback


def test_pullback_identity_map():
    phi = potential(Hyperbolic(2), 6)
    comps = [Jet.variable(2, 6, i) for i in (1, 2)]
    assert pullback(phi, comps).agrees(phi)


def test_pullback_projection():
    phi = Jet.abs_square_sum(2, 6)
    comps = [Jet.variable(1, 6, 1), Jet.zero(1, 6)]
    assert pullback(phi, comps) == Jet.abs_square_sum(1, 6)


def test_pullback_diagonal_gives_polydisc():
    phi = potential(TypeI(2, 2), 8)
    emb = diagonal_embedding(2, 2, 8)
    pulled = pullback(phi, emb.component_jets(8))
    assert pulled.agrees(potential(Polydisc(2), 8), 8)


def test_metric_commutes_with_diagonal_pullback():
    """Restricting the metric matrix to the embedded directions equals the
    metric of the pulled-back potential (the embedding is linear)."""
    phi = potential(TypeI(2, 2), 8)
    emb = diagonal_embedding(2, 2, 8)
    comps = emb.component_jets(8)
    pulled_metric = metric_from_potential(pullback(phi, comps))
    big = metric_from_potential(phi)
    for a in range(2):
        for b in range(2):
            restricted = pullback(big.g[a][b], comps)
            assert restricted.agrees(pulled_metric.g[a][b])
