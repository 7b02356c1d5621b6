"""Symbolic powers, fresh generators, annihilators and the 3x2 table."""

import pytest

from symdet import (
    QQ,
    Polynomial,
    ideal_combine,
    ideal_membership,
    ideals_equal,
    groebner_basis,
    make_ideal,
    parse_poly,
)
from symdet.biratio import inverse_representatives, source_inversion_factor
from symdet.linmat import (
    MatrixSpec,
    fixture_matrix,
    minors_ideal,
    random_general_matrix,
    signed_maximal_minors,
)
from symdet.sympow import (
    annihilator_quotient,
    eisenbud_mazur_check,
    fresh_generators,
    symbolic_generator_table,
    symbolic_power,
    table_to_json,
)


@pytest.fixture(scope="module")
def c3q():
    return minors_ideal(fixture_matrix("fix-c3", QQ), 2)


def test_requires_provenance(rx3q):
    I = make_ideal(rx3q, [parse_poly("x1", rx3q)])
    with pytest.raises(ValueError):
        symbolic_power(I, 2)


def test_radical_first_power_equal(c3q):
    res = symbolic_power(c3q, 1)
    assert res.equal and res.saturation_exponent == 0


def test_low_powers_equal_high_power_strict(fp):
    L, _ = random_general_matrix(MatrixSpec(4, 3, fp, seed=3))
    I = minors_ideal(L, 3)
    assert symbolic_power(I, 1).equal
    res2 = symbolic_power(I, 2)
    assert not res2.equal
    assert res2.saturation_exponent >= 1
    # witnesses: the source inversion factors sit strictly between the powers
    delta = signed_maximal_minors(L)
    for rep in inverse_representatives(L):
        D = source_inversion_factor(delta, rep)
        assert ideal_membership(D, res2.symbolic)
        assert not ideal_membership(D, res2.ordinary)


def test_symbolic_contains_ordinary(c3q):
    res = symbolic_power(c3q, 2)
    assert all(ideal_membership(g, res.symbolic) for g in res.ordinary.generators)


def test_monotone_filtration(c3q):
    results = {r: symbolic_power(c3q, r) for r in (1, 2, 3)}
    for a in (1, 2):
        for b in (1, 2):
            if a + b > 3:
                continue
            target = results[a + b].symbolic
            for ga in results[a].symbolic.generators:
                for gb in results[b].symbolic.generators:
                    assert ideal_membership(ga * gb, target)


def test_two_saturation_routes_agree(c3q, fp):
    for r in (2, 3):
        auto = symbolic_power(c3q, r, method="auto")
        elim = symbolic_power(c3q, r, method="elim")
        assert ideals_equal(auto.symbolic, elim.symbolic)
        assert auto.saturation_exponent == elim.saturation_exponent
    L, _ = random_general_matrix(MatrixSpec(4, 3, fp, seed=3))
    I = minors_ideal(L, 3)
    a = symbolic_power(I, 2, method="auto")
    b = symbolic_power(I, 2, method="elim")
    assert ideals_equal(a.symbolic, b.symbolic)


def test_wide_matrix_stays_ordinary(fp):
    # m < n: the powers are saturated throughout the tested range
    L, _ = random_general_matrix(MatrixSpec(3, 4, fp, seed=4))
    I = minors_ideal(L, 2)
    for r in (1, 2, 3):
        assert symbolic_power(I, r).equal


def test_scaled_factors_fall_into_ordinary_power(fp):
    # m = n + 1: each x_k * D_s lies in the ordinary power
    L, _ = random_general_matrix(MatrixSpec(4, 3, fp, seed=3))
    I = minors_ideal(L, 3)
    res2 = symbolic_power(I, 2)
    delta = signed_maximal_minors(L)
    xs = [Polynomial.variable(I.ring, f"x{i+1}") for i in range(3)]
    for rep in inverse_representatives(L):
        D = source_inversion_factor(delta, rep)
        for x in xs:
            assert ideal_membership(x * D, res2.ordinary)


# ---------------------------------------------------------------------------
# fresh generators
# ---------------------------------------------------------------------------


def test_fresh_requires_lower(c3q):
    with pytest.raises(ValueError):
        fresh_generators(c3q, 3, [symbolic_power(c3q, 1)])


def test_fresh_counts_small(fp, c3q):
    r1 = symbolic_power(c3q, 1)
    assert dict(fresh_generators(c3q, 2, [r1])) == {3: 1}
    L, _ = random_general_matrix(MatrixSpec(4, 3, fp, seed=3))
    I = minors_ideal(L, 3)
    s1 = symbolic_power(I, 1)
    assert dict(fresh_generators(I, 2, [s1])) == {5: 3}


# ---------------------------------------------------------------------------
# annihilators
# ---------------------------------------------------------------------------


def test_annihilator_equal_powers_is_unit(fp):
    L, _ = random_general_matrix(MatrixSpec(3, 4, fp, seed=4))
    I = minors_ideal(L, 2)
    ann = annihilator_quotient(I, 2)
    assert [str(g) for g in groebner_basis(ann).basis] == ["1"]


def test_annihilator_first_nontrivial(c3q):
    ann = annihilator_quotient(c3q, 2)
    xs = [Polynomial.variable(c3q.ring, f"x{i+1}") for i in range(3)]
    assert ideals_equal(ann, make_ideal(c3q.ring, xs))


def test_annihilator_degree_four(fp):
    L, _ = random_general_matrix(MatrixSpec(3, 3, fp, seed=5))
    I = minors_ideal(L, 2)
    ann = annihilator_quotient(I, 4)
    xs = [Polynomial.variable(I.ring, f"x{i+1}") for i in range(3)]
    expected = ideal_combine("power", make_ideal(I.ring, xs), 2)
    assert ideals_equal(ann, expected)


def test_eisenbud_mazur_small():
    L, _ = random_general_matrix(MatrixSpec(3, 3, QQ, seed=5))
    table = eisenbud_mazur_check(L, 3)
    assert [row.d for row in table.rows] == [2, 3]
    assert table.all_match()
    for row in table.rows:
        e = row.d // 2
        assert all(g.total_degree() == e for g in row.expected.generators)


def test_eisenbud_mazur_requires_shape(fp):
    L, _ = random_general_matrix(MatrixSpec(4, 3, QQ, seed=1))
    with pytest.raises(Exception):
        eisenbud_mazur_check(L, 3)
    Lp, _ = random_general_matrix(MatrixSpec(3, 3, fp, seed=1))
    with pytest.raises(ValueError):
        eisenbud_mazur_check(Lp, 3)


# ---------------------------------------------------------------------------
# generator tables
# ---------------------------------------------------------------------------


def test_table_cremona_case():
    L = fixture_matrix("fix-c3", QQ)
    rows = symbolic_generator_table(L, 4)
    assert rows[0] == {"r": 1, "equal": True, "satExponent": 0, "freshDegrees": [2, 2, 2]}
    assert rows[1] == {"r": 2, "equal": False, "satExponent": 1, "freshDegrees": [3]}
    assert rows[2]["freshDegrees"] == [] and rows[3]["freshDegrees"] == []
    doc = table_to_json(rows)
    assert '"freshDegrees"' in doc


def test_table_implicitization_case(fp):
    L, _ = random_general_matrix(MatrixSpec(4, 3, fp, seed=3))
    rows = symbolic_generator_table(L, 5)
    assert rows[0]["freshDegrees"] == [3, 3, 3, 3]
    assert rows[1]["freshDegrees"] == [5, 5, 5]
    assert rows[2]["freshDegrees"] == []
    assert rows[3]["freshDegrees"] == []
    assert rows[4]["freshDegrees"] == [12]
