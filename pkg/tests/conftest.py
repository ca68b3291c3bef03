"""Shared fixtures: golden schemes and independent test oracles.

The oracles here deliberately avoid the library's elimination code paths:
determinants expand by cofactors, rank enumerates square minors, and
modular powers use an explicit square-and-multiply loop.  They are slow
but independent, which is the point.
"""

from __future__ import annotations

import itertools

import pytest

from hsagg import FieldSpec
from hsagg.schemes import CoefficientScheme, import_scheme

# ---------------------------------------------------------------------------
# Independent oracles
# ---------------------------------------------------------------------------


def cofactor_det(rows: list[list[int]], q: int) -> int:
    """Determinant by recursive cofactor expansion along the first row."""
    n = len(rows)
    if n == 0:
        return 1
    if n == 1:
        return rows[0][0] % q
    total = 0
    for j in range(n):
        minor = [r[:j] + r[j + 1 :] for r in rows[1:]]
        term = rows[0][j] * cofactor_det(minor, q)
        total = (total + (-term if j % 2 else term)) % q
    return total


def minor_rank(rows: list[list[int]], q: int) -> int:
    """Rank as the largest size of a nonsingular square minor."""
    m = len(rows)
    n = len(rows[0]) if m else 0
    for k in range(min(m, n), 0, -1):
        for ri in itertools.combinations(range(m), k):
            for ci in itertools.combinations(range(n), k):
                sub = [[rows[i][j] for j in ci] for i in ri]
                if cofactor_det(sub, q) != 0:
                    return k
    return 0


def square_and_multiply(a: int, e: int, q: int) -> int:
    """Modular exponentiation oracle, independent of builtin pow."""
    result = 1 % q
    base = a % q
    while e:
        if e & 1:
            result = result * base % q
        base = base * base % q
        e >>= 1
    return result


def multiplicative_order(a: int, q: int) -> int:
    """Order of a in F_q* by direct enumeration."""
    assert a % q != 0
    value = a % q
    for k in range(1, q):
        if value == 1:
            return k
        value = value * a % q
    raise AssertionError("element order not found")


# ---------------------------------------------------------------------------
# Golden schemes
# ---------------------------------------------------------------------------

# Hand-built keys for the (U, V, T) = (2, 3, 1) network over F_3: three
# direct masks, two difference masks and one closing mask, using 4 source
# symbols.  Row order is user-lexicographic.
GOLDEN_2x3_F3_ROWS = [
    (1, 0, 0, 0),
    (0, 1, 0, 0),
    (0, 0, 1, 0),
    (2, 0, 0, 1),
    (0, 2, 0, 1),
    (0, 0, 2, 1),
]


def golden_2x3_f3_obj() -> dict:
    return {
        "U": 2,
        "V": 3,
        "T": 1,
        "q": 3,
        "gamma": None,
        "kind": "external",
        "elements": [],
        "H": {
            "q": 3,
            "rows": 6,
            "cols": 4,
            "data": [x for row in GOLDEN_2x3_F3_ROWS for x in row],
        },
        "row_index": [
            ["1,1", 0], ["1,2", 1], ["1,3", 2],
            ["2,1", 3], ["2,2", 4], ["2,3", 5],
        ],
    }


def golden_3x2_f17_obj() -> dict:
    """Hand-built 6x4 matrix over F_17 for (3, 2, 2), with primitive gamma = 3.

    Vandermonde rows on the geometric nodes {0, g, g^2, g^3, g^4} plus a
    trailing parity row equal to the negated sum of the others (its first
    entry is -5 mod 17 = 12).
    """
    q, g = 17, 3
    field = FieldSpec.for_prime(q)
    nodes = [0] + [field.pow(g, i) for i in range(1, 5)]
    rows = [[field.pow(x, j) for j in range(4)] for x in nodes]
    parity = [(-sum(r[j] for r in rows)) % q for j in range(4)]
    rows.append(parity)
    return {
        "U": 3,
        "V": 2,
        "T": 2,
        "q": q,
        "gamma": g,
        "kind": "external",
        "elements": [],
        "H": {"q": q, "rows": 6, "cols": 4, "data": [x for r in rows for x in r]},
        "row_index": [
            ["1,1", 0], ["1,2", 1],
            ["2,1", 2], ["2,2", 3],
            ["3,1", 4], ["3,2", 5],
        ],
    }


@pytest.fixture(scope="session")
def golden_2x3_f3() -> CoefficientScheme:
    return import_scheme(golden_2x3_f3_obj())


@pytest.fixture(scope="session")
def golden_3x2_f17() -> CoefficientScheme:
    return import_scheme(golden_3x2_f17_obj())
