"""Prime-field arithmetic and exact linear algebra."""

import itertools
import random

import pytest

from hsagg.fields import (
    ElementSet,
    FieldSpec,
    FqMatrix,
    elementary_symmetric,
    extended_vandermonde,
    extended_vandermonde_subdet,
    find_primitive_element,
    generalized_vandermonde_det,
    is_prime,
    next_prime,
    vandermonde,
    vandermonde_det,
)

from conftest import cofactor_det, minor_rank, multiplicative_order, square_and_multiply

F3 = FieldSpec.for_prime(3)
F5 = FieldSpec.for_prime(5)
F7 = FieldSpec.for_prime(7)
F13 = FieldSpec.for_prime(13)
F17 = FieldSpec.for_prime(17)
F101 = FieldSpec.for_prime(101)


# ---------------------------------------------------------------------------
# primes and primitive elements
# ---------------------------------------------------------------------------


def test_is_prime_small():
    primes = {2, 3, 5, 7, 11, 13, 17, 19, 23}
    for n in range(25):
        assert is_prime(n) == (n in primes)


def test_next_prime():
    assert next_prime(2) == 2
    assert next_prime(8) == 11
    assert next_prime(14) == 17


def test_primitive_element_17_is_3():
    # exhaustive order check over all candidate residues
    assert find_primitive_element(17) == 3
    for g in range(2, 17):
        order = multiplicative_order(g, 17)
        if g < 3:
            assert order < 16
        if g == 3:
            assert order == 16


def test_primitive_element_small_fields():
    assert find_primitive_element(3) == 2
    assert find_primitive_element(5) == 2
    assert multiplicative_order(2, 5) == 4
    assert find_primitive_element(2) == 1


def test_primitive_element_rejects_composite():
    with pytest.raises(ValueError):
        find_primitive_element(9)


def test_fieldspec_rejects_non_generator():
    with pytest.raises(ValueError):
        FieldSpec(17, 2)  # order of 2 mod 17 is 8
    with pytest.raises(ValueError):
        FieldSpec(10, 3)


# ---------------------------------------------------------------------------
# field ops
# ---------------------------------------------------------------------------


def test_field_ops_examples():
    assert F3.add(2, 2) == 1
    assert F5.inv(2) == 3
    assert F5.mul(2, F5.inv(2)) == 1
    assert F17.pow(3, 16) == 1


def test_pow_matches_square_and_multiply_oracle():
    rng = random.Random(7)
    for _ in range(50):
        a = rng.randrange(17)
        e = rng.randrange(64)
        assert F17.pow(a, e) == square_and_multiply(a, e, 17)


def test_inverse_of_zero_rejected():
    with pytest.raises(ZeroDivisionError):
        F5.inv(0)
    with pytest.raises(ZeroDivisionError):
        F5.pow(0, -1)


def test_field_axioms_exhaustive_f5():
    els = range(5)
    for a in els:
        for b in els:
            assert F5.add(a, b) == F5.add(b, a)
            assert F5.mul(a, b) == F5.mul(b, a)
            for c in els:
                assert F5.mul(a, F5.add(b, c)) == F5.add(F5.mul(a, b), F5.mul(a, c))
    for a in range(1, 5):
        assert F5.mul(a, F5.inv(a)) == 1


# ---------------------------------------------------------------------------
# rank and determinant
# ---------------------------------------------------------------------------


def test_rank_identity_and_zero():
    assert FqMatrix.identity(F7, 3).rank() == 3
    assert FqMatrix.from_rows(F5, [[0, 0], [0, 0]]).rank() == 0
    assert FqMatrix(0, 0, (), F5).rank() == 0


def test_rank_matches_minor_enumeration_oracle():
    rng = random.Random(11)
    for _ in range(40):
        m = rng.randrange(1, 6)
        n = rng.randrange(1, 6)
        rows = [[rng.randrange(5) for _ in range(n)] for _ in range(m)]
        assert FqMatrix.from_rows(F5, rows).rank() == minor_rank(rows, 5)


def test_det_vandermonde_product_value():
    # nodes {0,1,2} over F_7: (1-0)(2-0)(2-1) = 2
    m = vandermonde(F7, [0, 1, 2], 3)
    assert m.det() == 2
    assert vandermonde_det(F7, [0, 1, 2]) == 2


def test_det_singular():
    assert FqMatrix.from_rows(F5, [[1, 1], [1, 1]]).det() == 0


def test_det_empty_matrix_is_one():
    assert FqMatrix(0, 0, (), F5).det() == 1


def test_det_matches_cofactor_oracle():
    rng = random.Random(3)
    for _ in range(25):
        rows = [[rng.randrange(101) for _ in range(4)] for _ in range(4)]
        assert FqMatrix.from_rows(F101, rows).det() == cofactor_det(rows, 101)


def test_det_requires_square():
    with pytest.raises(ValueError):
        FqMatrix.from_rows(F5, [[1, 2, 3], [4, 0, 1]]).det()


def test_matrix_rejects_non_canonical_entries():
    with pytest.raises(ValueError):
        FqMatrix(1, 2, (1, 7), F5)


# ---------------------------------------------------------------------------
# Vandermonde constructions
# ---------------------------------------------------------------------------


def test_vandermonde_examples():
    assert vandermonde(F5, [0], 1).row_list() == [(1,)]
    g = 3
    m = vandermonde(F17, [g, g * g % 17], 2)
    assert m.row_list() == [(1, 3), (1, 9)]
    m = vandermonde(F7, [0, 1, 2], 3)
    assert m.row_list() == [(1, 0, 0), (1, 1, 1), (1, 2, 4)]


def test_vandermonde_requires_enough_nodes():
    with pytest.raises(ValueError):
        vandermonde(F5, [0, 1], 3)


def test_vandermonde_mds_property_exhaustive():
    # every n x n row-submatrix of a distinct-node Vandermonde is nonsingular
    for q in (11, 13):
        field = FieldSpec.for_prime(q)
        nodes = list(range(8))
        for n in (2, 3, 4):
            m = vandermonde(field, nodes, n)
            for idx in itertools.combinations(range(8), n):
                assert m.take_rows(idx).det() != 0


def test_extended_vandermonde_example():
    m = extended_vandermonde(F5, [0, 1], 2)
    assert m.row_list() == [(3, 4), (1, 0), (1, 1)]
    assert m.column_sums() == (0, 0)
    dets = [m.take_rows(idx).det() for idx in itertools.combinations(range(3), 2)]
    assert dets == [1, 4, 1]


def test_extended_vandermonde_parity_row():
    m = extended_vandermonde(F7, [0, 1, 2], 2)
    assert m.row(0) == (4, 4)


def test_extended_vandermonde_zero_row_sum_many():
    rng = random.Random(23)
    for _ in range(30):
        q = rng.choice([5, 7, 11, 13])
        field = FieldSpec.for_prime(q)
        size = rng.randrange(1, min(q, 6))
        nodes = rng.sample(range(q), size)
        n = rng.randrange(1, size + 1)
        m = extended_vandermonde(field, nodes, n)
        assert m.column_sums() == tuple([0] * n)


# ---------------------------------------------------------------------------
# symmetric polynomials and determinant identities
# ---------------------------------------------------------------------------


def test_elementary_symmetric_examples():
    assert elementary_symmetric(F101, [1, 2, 3], 2) == 11
    assert elementary_symmetric(F101, [1, 2, 3], 0) == 1
    assert elementary_symmetric(F101, [], 0) == 1
    assert elementary_symmetric(F101, [1, 2, 3], 3) == 6


def test_elementary_symmetric_range_check():
    with pytest.raises(ValueError):
        elementary_symmetric(F101, [1, 2], 3)
    with pytest.raises(ValueError):
        elementary_symmetric(F101, [1, 2], -1)


def test_generalized_vandermonde_consecutive_powers():
    nodes = [2, 5, 6]
    assert generalized_vandermonde_det(F101, nodes, [0, 1, 2]) == vandermonde(
        F101, nodes, 3
    ).det()


def test_generalized_vandermonde_single_missing_power():
    # missing exponent 2 from {0,1,3}: det = V(X) * e_1(X) = 2 * 6 = 12
    assert generalized_vandermonde_det(F101, [1, 2, 3], [0, 1, 3]) == 12


def test_generalized_vandermonde_single_element():
    assert generalized_vandermonde_det(F101, [7], [5]) == pow(7, 5, 101)


def test_generalized_vandermonde_rejects_bad_powers():
    with pytest.raises(ValueError):
        generalized_vandermonde_det(F101, [1, 2], [1])
    with pytest.raises(ValueError):
        generalized_vandermonde_det(F101, [1, 2], [2, 1])
    with pytest.raises(ValueError):
        generalized_vandermonde_det(F101, [1, 2], [-1, 0])


def test_missing_power_identity_sweep():
    # all node sets of size <= 6 from a small pool, all single-missing exponents
    field = F101
    pool = [1, 4, 7, 9, 12, 15]
    for size in range(1, 7):
        for nodes in itertools.combinations(pool, size):
            for missing in range(size + 1):
                powers = [p for p in range(size + 1) if p != missing]
                lhs = generalized_vandermonde_det(field, nodes, powers)
                rhs = (
                    vandermonde_det(field, nodes)
                    * elementary_symmetric(field, nodes, size - missing)
                    % 101
                )
                assert lhs == rhs


def test_subdet_closed_form_matches_elimination():
    # primary dual-route property: closed form vs assembled-submatrix det
    rng = random.Random(99)
    for _ in range(100):
        q = rng.choice([11, 13, 17, 101])
        field = FieldSpec.for_prime(q)
        m = rng.randrange(2, 8)
        nodes = rng.sample(range(q), m)
        n = rng.randrange(1, m + 1)
        idx = sorted(rng.sample(range(m), n - 1))
        closed = extended_vandermonde_subdet(field, nodes, idx)
        assembled = extended_vandermonde(field, nodes, n).take_rows(
            [0] + [1 + i for i in idx]
        )
        assert closed == assembled.det()


def test_subdet_full_selection_single_term():
    # when indices omit exactly one node, the sum collapses to one product
    field = F13
    nodes = [0, 2, 7, 11]
    for omitted in range(4):
        idx = [i for i in range(4) if i != omitted]
        expected = pow(-1, 4, 13) * vandermonde_det(field, [nodes[i] for i in idx])
        for j in idx:
            expected = expected * (nodes[omitted] - nodes[j]) % 13
        assert extended_vandermonde_subdet(field, nodes, idx) == expected % 13


def test_subdet_repeated_node_is_zero():
    assert extended_vandermonde_subdet(F13, [1, 1, 5], [0, 1]) == 0


def test_subdet_rejects_bad_indices():
    with pytest.raises(ValueError):
        extended_vandermonde_subdet(F13, [1, 2, 3], [0, 3])
    with pytest.raises(ValueError):
        extended_vandermonde_subdet(F13, [1, 2, 3], [1, 1])


# ---------------------------------------------------------------------------
# ElementSet and serialization
# ---------------------------------------------------------------------------


def test_element_set_distinctness():
    assert ElementSet.of([0, 1, 2]).is_distinct()
    assert not ElementSet.of([0, 1, 1]).is_distinct()
    s = ElementSet.of([4, 2])
    assert list(s) == [4, 2] and len(s) == 2 and s[0] == 4


def test_matrix_json_round_trip():
    m = extended_vandermonde(F7, [0, 1, 2], 3)
    obj = m.to_json_obj()
    assert obj == {"q": 7, "rows": 4, "cols": 3, "data": list(m.entries)}
    again = FqMatrix.from_json_obj(obj, F7)
    assert again == m
    derived = FqMatrix.from_json_obj(obj)
    assert derived.entries == m.entries


def test_matrix_json_modulus_mismatch():
    m = vandermonde(F7, [0, 1], 2)
    with pytest.raises(ValueError):
        FqMatrix.from_json_obj(m.to_json_obj(), F5)
