"""Laplacian application, operator powers, budgets, expanded identities,
and the univariate radial-reduction oracle."""

import pytest

from kahlap import radial
from kahlap.catalog import (
    Flat,
    FubiniStudy,
    Hyperbolic,
    Polydisc,
    Product,
    TypeI,
    potential,
)
from kahlap.geometry import metric_from_potential
from kahlap.jets import BiIndex, InsufficientOrderError, Jet
from kahlap.laplacian import (
    LaplacianBudget,
    NotEinsteinError,
    euclidean_laplacian,
    euclidean_moments,
    inverse_metric_cross_hessian,
    kahler_laplacian,
    power_at_origin,
    powers_at_origin,
    second_power_check,
    third_power_check,
    third_power_rhs,
)
from kahlap.rationals import rat


def bi(hol, anti):
    return BiIndex(tuple(hol), tuple(anti))


def mono(dim, order, hol, anti):
    return Jet(dim, order, [(bi(hol, anti), 1)])


@pytest.fixture(scope="module")
def hyp1():
    return metric_from_potential(potential(Hyperbolic(1), 10))


@pytest.fixture(scope="module")
def fs1():
    return metric_from_potential(potential(FubiniStudy(1), 10))


# ----------------------------------------------------------------------
# Euclidean Laplacian


def test_euclidean_examples():
    assert euclidean_laplacian(mono(1, 4, (2,), (2,))) == mono(1, 4, (1,), (1,)).scale(4)
    got = euclidean_laplacian(mono(2, 4, (1, 1), (1, 1)))
    want = mono(2, 4, (0, 1), (0, 1)) + mono(2, 4, (1, 0), (1, 0))
    assert got == want
    assert euclidean_laplacian(mono(1, 4, (2,), (0,))).is_zero


def test_euclidean_moment_closed_form():
    # Lapc^k (z^alpha zb^alpha)(0) = k! * prod(alpha_i!) when |alpha| = k
    import math

    for alpha in ((2,), (3,)):
        phi = mono(1, 8, alpha, alpha)
        k = sum(alpha)
        assert euclidean_moments(phi, k)[k - 1] == math.factorial(alpha[0]) ** 2
    phi = mono(2, 8, (2, 1), (2, 1))
    assert euclidean_moments(phi, 3)[2] == 12  # 3! * 2! * 1!


def test_flat_equals_euclidean():
    m = metric_from_potential(Jet.abs_square_sum(2, 8))
    phi = mono(2, 8, (2, 1), (1, 2))
    assert kahler_laplacian(m, phi).agrees(euclidean_laplacian(phi))


# ----------------------------------------------------------------------
# Kahler Laplacian on curved metrics


def test_hyperbolic_laplacian_of_z1_fourth(hyp1):
    got = kahler_laplacian(hyp1, mono(1, 10, (2,), (2,)))
    want = Jet(1, 10, [(bi((1,), (1,)), 4), (bi((2,), (2,)), -8), (bi((3,), (3,)), 4)])
    assert got.agrees(want)


def test_bidegree_balance_is_preserved(hyp1):
    phi = mono(1, 10, (2,), (3,))
    out = kahler_laplacian(hyp1, phi)
    assert all(sum(b.hol) - sum(b.anti) == -1 for b, _ in out.terms())


def test_unbalanced_powers_vanish_at_origin(hyp1):
    for hol, anti in (((2,), (1,)), ((3,), (1,)), ((1,), (3,))):
        phi = mono(1, 10, hol, anti)
        for k in (1, 2, 3):
            assert power_at_origin(hyp1, phi, k) == 0


def test_power_values_hyperbolic(hyp1):
    t2 = mono(1, 10, (2,), (2,))
    assert power_at_origin(hyp1, t2, 2) == 4
    assert power_at_origin(hyp1, t2, 3) == -40


def test_power_values_fubini_study(fs1):
    t2 = mono(1, 10, (2,), (2,))
    assert power_at_origin(fs1, t2, 3) == 40


def test_powers_chain_matches_single_calls(hyp1):
    t1 = mono(1, 10, (1,), (1,))
    chain = powers_at_origin(hyp1, t1, 4)
    assert chain == [power_at_origin(hyp1, t1, k) for k in (1, 2, 3, 4)]
    assert chain == [1, -2, 8, -56]


def test_linearity_of_powers(hyp1):
    a = mono(1, 10, (1,), (1,))
    b = mono(1, 10, (2,), (2,))
    combo = a.scale(rat(2, 3)) + b.scale(-5)
    for k in (1, 2, 3):
        expect = rat(2, 3) * power_at_origin(hyp1, a, k) - 5 * power_at_origin(hyp1, b, k)
        assert power_at_origin(hyp1, combo, k) == expect


def test_budget_enforced():
    m = metric_from_potential(potential(Hyperbolic(1), 6))  # metric valid 4
    t = mono(1, 6, (1,), (1,))
    assert power_at_origin(m, t, 3) == 8  # needs metric valid 4 exactly
    with pytest.raises(InsufficientOrderError) as err:
        power_at_origin(m, t, 4)
    assert err.value.required_order == 10
    assert LaplacianBudget(4, 6).required_order == 10
    assert not LaplacianBudget(4, 6).satisfied


def test_budget_rejects_inexact_test_function(hyp1):
    rough = potential(Hyperbolic(1), 10)  # not exact (log series)
    with pytest.raises(InsufficientOrderError):
        power_at_origin(hyp1, rough, 2)


# ----------------------------------------------------------------------
# expanded identities


def test_second_power_identity_examples(hyp1):
    chk = second_power_check(hyp1, mono(1, 10, (2,), (2,)))
    assert chk.passed and chk.lhs == 4
    chk = second_power_check(hyp1, mono(1, 10, (1,), (1,)))
    assert chk.passed and chk.lhs == -2


def test_second_power_identity_type1(type1_metric_order8):
    phi = mono(4, 8, (1, 1, 0, 0), (1, 1, 0, 0))
    assert second_power_check(type1_metric_order8, phi).passed


def test_second_power_rejects_non_einstein():
    m = metric_from_potential(potential(Product(Flat(1), Hyperbolic(1)), 6))
    with pytest.raises(NotEinsteinError):
        second_power_check(m, mono(2, 6, (1, 0), (1, 0)))


def test_third_power_rhs_flat_is_pure_euclidean():
    m = metric_from_potential(Jet.abs_square_sum(2, 8))
    phi = mono(2, 8, (2, 1), (2, 1))
    assert third_power_rhs(m, phi) == euclidean_moments(phi, 3)[2]


def test_third_power_identity_hyperbolic(hyp1):
    chk = third_power_check(hyp1, mono(1, 10, (2,), (2,)))
    assert chk.passed and chk.lhs == -40


def test_third_power_identity_polydisc():
    m = metric_from_potential(potential(Polydisc(2), 8))
    chk = third_power_check(m, mono(2, 8, (1, 1), (1, 1)))
    assert chk.passed and chk.lhs == -12


def test_cross_hessian_type1_frame_pair(type1_metric_order8):
    values = inverse_metric_cross_hessian(type1_metric_order8, 1, 2)
    assert all(v == 0 for v in values)


def test_cross_hessian_hyperbolic_2():
    m = metric_from_potential(potential(Hyperbolic(2), 8))
    values = inverse_metric_cross_hessian(m, 1, 2)
    # ginv = (1-t)(delta - zb_i z_j): the four coefficients are all -1
    assert sum(values, rat(0)) == -4


# ----------------------------------------------------------------------
# the radial-reduction oracle


FROZEN_HYP = {
    1: [1, -2, 8, -56],
    2: [0, 4, -40, 496],
    3: [0, 0, 36, -1008],
    4: [0, 0, 0, 576],
}


def test_oracle_frozen_values():
    f = radial.hyperbolic_profile(12)
    for m, column in FROZEN_HYP.items():
        got = [radial.power_at_origin(f, m, k) for k in (1, 2, 3, 4)]
        assert got == column


def test_oracle_metric_profile_hyperbolic():
    f = radial.hyperbolic_profile(8)
    ginv = radial.inverse_profile(f)
    # (1-t)^2
    assert ginv.coefficient(0) == 1
    assert ginv.coefficient(1) == -2
    assert ginv.coefficient(2) == 1


@pytest.mark.parametrize("name", ["hyp", "fs"])
def test_oracle_agrees_with_engine(name, hyp1, fs1):
    profile = radial.hyperbolic_profile(12) if name == "hyp" else radial.fubini_study_profile(12)
    metric = hyp1 if name == "hyp" else fs1
    for m in range(1, 5):
        phi = mono(1, 10, (m,), (m,))
        for k in range(1, 5):
            assert radial.power_at_origin(profile, m, k) == power_at_origin(
                metric, phi, k
            ), (name, m, k)


def test_oracle_flat_profile():
    f = radial.flat_profile(10)
    import math

    for m in range(1, 4):
        assert radial.power_at_origin(f, m, m) == math.factorial(m) ** 2


def test_oracle_agrees_with_engine_on_random_profile():
    from kahlap.catalog import Radial, potential
    from kahlap.jets import UniSeries

    coeffs = (rat(1), rat(-3, 4), rat(2, 5), rat(1, 7))
    profile = UniSeries(12, {i + 1: c for i, c in enumerate(coeffs)})
    engine = metric_from_potential(potential(Radial(coeffs, 1), 10))
    for m in range(1, 5):
        phi = mono(1, 10, (m,), (m,))
        for k in range(1, 5):
            assert radial.power_at_origin(profile, m, k) == power_at_origin(
                engine, phi, k
            ), (m, k)
