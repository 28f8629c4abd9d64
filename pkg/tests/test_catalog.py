"""Catalog constructors, gates, duality, the diagonal embedding, and the
spec-string grammar."""

import pytest

from kahlap.catalog import (
    CatalogGateError,
    Custom,
    DualOf,
    Flat,
    FubiniStudy,
    Hyperbolic,
    Polydisc,
    Product,
    Radial,
    SpecParseError,
    TypeI,
    TypeIDual,
    TypeIII,
    TypeIV,
    diagonal_embedding,
    diagonal_restriction_check,
    dual_potential,
    gate_status,
    matrix_slots,
    parse_spec,
    potential,
    standard_entries,
)
from kahlap.geometry import einstein_data, in_normal_coordinates, metric_from_potential
from kahlap.jets import BiIndex, Jet
from kahlap.rationals import rat


def bi(hol, anti):
    return BiIndex(tuple(hol), tuple(anti))


# ----------------------------------------------------------------------
# potentials, exact coefficients


def test_hyperbolic_series():
    phi = potential(Hyperbolic(1), 6)
    want = Jet(
        1,
        6,
        [(bi((1,), (1,)), 1), (bi((2,), (2,)), rat(1, 2)), (bi((3,), (3,)), rat(1, 3))],
    )
    assert phi.agrees(want)


def test_polydisc_series():
    phi = potential(Polydisc(2), 4)
    want = Jet(
        2,
        4,
        [
            (bi((1, 0), (1, 0)), 1),
            (bi((0, 1), (0, 1)), 1),
            (bi((2, 0), (2, 0)), rat(1, 2)),
            (bi((0, 2), (0, 2)), rat(1, 2)),
        ],
    )
    assert phi.agrees(want)


def test_type1_quadratic_and_quartic():
    phi = potential(TypeI(2, 2), 4)
    # quadratic part: sum of |z_i|^2 over the 4 matrix entries
    for i in range(4):
        e = tuple(1 if k == i else 0 for k in range(4))
        assert phi.coefficient(bi(e, e)) == 1
    # quartic: 1/2 tr((ZZ*)^2) contains |z1|^4 / ... with coefficient 1/2
    assert phi.coefficient(bi((2, 0, 0, 0), (2, 0, 0, 0))) == rat(1, 2)


def test_matrix_slot_ordering_is_diagonal_first():
    assert matrix_slots(2, 2) == [(0, 0), (1, 1), (0, 1), (1, 0)]
    assert matrix_slots(2, 3)[:2] == [(0, 0), (1, 1)]


def test_flat_potential_is_exact():
    assert potential(Flat(3), 6).exact


def test_radial_polynomial_profile():
    spec = Radial((rat(1), rat(1, 2)), 2)
    phi = potential(spec, 6)
    s = Jet.abs_square_sum(2, 6)
    assert phi.agrees(s + (s * s).scale(rat(1, 2)))


def test_potentials_have_zero_constant_and_balanced_terms():
    for spec in (Hyperbolic(2), FubiniStudy(2), Polydisc(2), TypeI(2, 2), TypeIV(2)):
        phi = potential(spec, 6)
        assert phi.constant_term() == 0
        for b, _ in phi.terms():
            assert sum(b.hol) == sum(b.anti), spec.label()


def test_every_standard_entry_is_normal_or_gated():
    for spec in standard_entries():
        ok, _ = gate_status(spec, 6)
        if ok:
            m = metric_from_potential(potential(spec, 6))
            assert in_normal_coordinates(m), spec.label()


# ----------------------------------------------------------------------
# einstein self-checks


@pytest.mark.parametrize(
    "spec,lam",
    [
        (FubiniStudy(1), 2),
        (FubiniStudy(3), 4),
        (Hyperbolic(3), -4),
        (Polydisc(3), -2),
        (TypeI(2, 2), -4),
        (TypeI(2, 3), -5),
        (TypeIDual(2, 2), 4),
        (TypeIV(2), -4),
    ],
)
def test_einstein_constants_of_entries(spec, lam):
    e = einstein_data(metric_from_potential(potential(spec, 6)))
    assert e.is_einstein and e.lam == lam


def test_type3_rank_one_is_hyperbolic():
    assert potential(TypeIII(1), 6) == potential(Hyperbolic(1), 6)


def test_type3_rank_two_gate_rejects():
    with pytest.raises(CatalogGateError):
        potential(TypeIII(2), 6)
    ok, message = gate_status(TypeIII(2), 6)
    assert not ok and "self-check" in message


def test_custom_gate_rejects_non_normal():
    z1 = Jet.variable(2, 6, 1)
    z2 = Jet.variable(2, 6, 2)
    f2 = z2 + z1 * z1
    crooked = z1 * z1.conj() + f2 * f2.conj()  # not normal at 0
    with pytest.raises(CatalogGateError):
        potential(Custom(crooked), 6)


def test_custom_accepts_normal_potential():
    phi = potential(Hyperbolic(2), 6)
    assert potential(Custom(phi, name="h2"), 6) == phi


# ----------------------------------------------------------------------
# duality


def test_dual_pairs_are_exact_jets():
    assert potential(DualOf(Hyperbolic(2)), 8) == potential(FubiniStudy(2), 8)
    assert potential(DualOf(TypeI(2, 2)), 8) == potential(TypeIDual(2, 2), 8)


def test_dual_is_involution_on_catalog():
    for spec in (Hyperbolic(2), FubiniStudy(1), Polydisc(2), TypeI(2, 2)):
        phi = potential(spec, 6)
        assert dual_potential(dual_potential(phi)) == phi


def test_type1_rank_one_degeneration():
    assert potential(TypeI(1, 3), 8) == potential(Hyperbolic(3), 8)
    assert potential(TypeI(3, 1), 8) == potential(Hyperbolic(3), 8)


def test_type1_restricts_to_polydisc_on_diagonal_variables():
    # setting the off-diagonal entries to zero (variables 3, 4) leaves the
    # polydisc potential -- same content as the pullback route, via restrict
    phi = potential(TypeI(2, 2), 8)
    assert phi.restrict([1, 2]).agrees(potential(Polydisc(2), 8))


# ----------------------------------------------------------------------
# embedding and restriction


def test_diagonal_embedding_shapes():
    emb = diagonal_embedding(2, 2, 6)
    assert emb.source_dim == 2 and emb.target_dim == 4
    comps = emb.component_jets(6)
    assert comps[0] == Jet.variable(2, 6, 1)
    assert comps[1] == Jet.variable(2, 6, 2)
    assert comps[2].is_zero and comps[3].is_zero
    emb = diagonal_embedding(2, 3, 6)
    assert emb.source_dim == 2 and emb.target_dim == 6


@pytest.mark.parametrize("p,q", [(1, 1), (2, 2), (2, 3)])
def test_diagonal_restriction(p, q):
    rc = diagonal_restriction_check(p, q, 8)
    assert rc.potential_matches and rc.metric_matches


# ----------------------------------------------------------------------
# grammar


@pytest.mark.parametrize(
    "text",
    [
        "flat:2",
        "fs:3",
        "hyp:1",
        "polydisc:2",
        "type1:2,2",
        "type1dual:2,3",
        "type3:2",
        "type4:2",
        "radial:1,1/2,-2/3:2",
        "product(flat:1,hyp:1)",
        "dual(type1:2,2)",
        "product(product(flat:1,flat:1),hyp:2)",
    ],
)
def test_parse_round_trip(text):
    assert parse_spec(text).label() == text


@pytest.mark.parametrize(
    "text",
    ["nope:1", "flat", "flat:0", "type1:2", "radial::2", "product(flat:1)", "hyp:x"],
)
def test_parse_rejects(text):
    with pytest.raises(SpecParseError):
        parse_spec(text)


def test_product_block_structure():
    phi = potential(Product(Flat(1), Hyperbolic(1)), 6)
    assert phi.coefficient(bi((1, 0), (1, 0))) == 1
    assert phi.coefficient(bi((0, 2), (0, 2))) == rat(1, 2)
    assert phi.coefficient(bi((1, 1), (1, 1))) == 0


def test_polydisc_golden_text():
    import pathlib

    golden = pathlib.Path(__file__).parent / "golden" / "polydisc2_order6.txt"
    phi = potential(Polydisc(2), 6)
    assert phi.to_text() + "\n" == golden.read_text()
    assert Jet.from_text(2, 6, golden.read_text()).agrees(phi)
