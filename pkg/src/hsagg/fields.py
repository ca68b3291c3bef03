"""Exact linear algebra over prime fields.

Residues are canonical integers in ``[0, q)``, matrices are immutable, and
rank/determinant use exact Gaussian elimination, so there are no tolerance
questions anywhere.  Everything in this module is a pure function of its
arguments and safe for unrestricted concurrent use.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Sequence

__all__ = [
    "FieldSpec",
    "FqMatrix",
    "ElementSet",
    "is_prime",
    "next_prime",
    "find_primitive_element",
    "vandermonde",
    "extended_vandermonde",
    "vandermonde_det",
    "elementary_symmetric",
    "generalized_vandermonde_det",
    "extended_vandermonde_subdet",
]

# Witness set making Miller-Rabin deterministic for n < 3.3 * 10^24.
_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


def is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin primality test."""
    if n < 2:
        return False
    for p in _MR_BASES:
        if n % p == 0:
            return n == p
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _MR_BASES:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def next_prime(n: int) -> int:
    """Smallest prime >= n."""
    k = max(2, n)
    while not is_prime(k):
        k += 1
    return k


def _prime_factors(n: int) -> tuple[int, ...]:
    out = []
    d = 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1
    if n > 1:
        out.append(n)
    return tuple(out)


def find_primitive_element(q: int) -> int:
    """Smallest residue g >= 2 whose multiplicative order mod q is q - 1.

    For q = 2 the multiplicative group is trivial and 1 is returned.
    """
    if not is_prime(q):
        raise ValueError(f"modulus {q} is not prime")
    if q == 2:
        return 1
    factors = _prime_factors(q - 1)
    for g in range(2, q):
        if all(pow(g, (q - 1) // p, q) != 1 for p in factors):
            return g
    raise AssertionError("unreachable: every prime modulus has a primitive root")


@dataclass(frozen=True)
class FieldSpec:
    """A prime field F_q together with a generator of its multiplicative group."""

    q: int
    primitive_element: int

    def __post_init__(self) -> None:
        if not is_prime(self.q):
            raise ValueError(f"modulus {self.q} is not prime")
        g = self.primitive_element
        if not 0 <= g < self.q:
            raise ValueError(f"primitive element {g} is not a canonical residue mod {self.q}")
        if self.q == 2:
            if g != 1:
                raise ValueError("the multiplicative group of F_2 is generated by 1")
            return
        if g < 2 or any(pow(g, (self.q - 1) // p, self.q) == 1 for p in _prime_factors(self.q - 1)):
            raise ValueError(f"{g} does not generate the multiplicative group of F_{self.q}")

    @classmethod
    def for_prime(cls, q: int) -> "FieldSpec":
        """Field with the canonical (smallest) primitive element."""
        return cls(q, find_primitive_element(q))

    def canon(self, a: int) -> int:
        return a % self.q

    def add(self, a: int, b: int) -> int:
        return (a + b) % self.q

    def sub(self, a: int, b: int) -> int:
        return (a - b) % self.q

    def mul(self, a: int, b: int) -> int:
        return a * b % self.q

    def neg(self, a: int) -> int:
        return -a % self.q

    def inv(self, a: int) -> int:
        """Multiplicative inverse; zero has none and signals a degenerate pivot."""
        if a % self.q == 0:
            raise ZeroDivisionError(f"inverse of zero in F_{self.q}")
        return pow(a, -1, self.q)

    def pow(self, a: int, e: int) -> int:
        """a**e mod q; negative exponents require a to be invertible."""
        if e < 0 and a % self.q == 0:
            raise ZeroDivisionError(f"inverse of zero in F_{self.q}")
        return pow(a, e, self.q)

    def dot(self, xs: Sequence[int], ys: Sequence[int]) -> int:
        if len(xs) != len(ys):
            raise ValueError(f"dot product length mismatch: {len(xs)} vs {len(ys)}")
        return sum(x * y for x, y in zip(xs, ys)) % self.q


@dataclass(frozen=True)
class ElementSet:
    """An ordered list of field residues used as Vandermonde nodes.

    Duplicates are representable on purpose: several determinant identities
    are exercised on degenerate node sets.  Constructions that require
    distinct nodes must check :meth:`is_distinct`.
    """

    elements: tuple[int, ...]

    @classmethod
    def of(cls, xs) -> "ElementSet":
        return cls(tuple(int(x) for x in xs))

    def is_distinct(self) -> bool:
        return len(set(self.elements)) == len(self.elements)

    def __len__(self) -> int:
        return len(self.elements)

    def __iter__(self) -> Iterator[int]:
        return iter(self.elements)

    def __getitem__(self, i):
        return self.elements[i]


@dataclass(frozen=True)
class FqMatrix:
    """Immutable dense matrix over F_q with row-major entries."""

    rows: int
    cols: int
    entries: tuple[int, ...]
    field: FieldSpec

    def __post_init__(self) -> None:
        if self.rows < 0 or self.cols < 0:
            raise ValueError("matrix dimensions must be nonnegative")
        if len(self.entries) != self.rows * self.cols:
            raise ValueError(
                f"{self.rows}x{self.cols} matrix needs {self.rows * self.cols} entries, "
                f"got {len(self.entries)}"
            )
        q = self.field.q
        if any(not 0 <= e < q for e in self.entries):
            raise ValueError(f"entries must be canonical residues in [0, {q})")

    @classmethod
    def from_rows(cls, field: FieldSpec, rows: Sequence[Sequence[int]]) -> "FqMatrix":
        nrows = len(rows)
        ncols = len(rows[0]) if nrows else 0
        if any(len(r) != ncols for r in rows):
            raise ValueError("ragged rows")
        flat = tuple(int(x) % field.q for r in rows for x in r)
        return cls(nrows, ncols, flat, field)

    @classmethod
    def identity(cls, field: FieldSpec, n: int) -> "FqMatrix":
        return cls.from_rows(field, [[1 if i == j else 0 for j in range(n)] for i in range(n)])

    def entry(self, i: int, j: int) -> int:
        return self.entries[i * self.cols + j]

    def row(self, i: int) -> tuple[int, ...]:
        return self.entries[i * self.cols : (i + 1) * self.cols]

    def row_list(self) -> list[tuple[int, ...]]:
        return [self.row(i) for i in range(self.rows)]

    def take_rows(self, indices: Sequence[int]) -> "FqMatrix":
        """Submatrix of the given rows, in the given order (all columns)."""
        return FqMatrix.from_rows(self.field, [self.row(i) for i in indices])

    def column_sums(self) -> tuple[int, ...]:
        q = self.field.q
        return tuple(
            sum(self.entry(i, j) for i in range(self.rows)) % q for j in range(self.cols)
        )

    def matvec(self, vec: Sequence[int]) -> tuple[int, ...]:
        if len(vec) != self.cols:
            raise ValueError(f"vector length {len(vec)} != column count {self.cols}")
        q = self.field.q
        return tuple(sum(a * b for a, b in zip(self.row(i), vec)) % q for i in range(self.rows))

    def rank(self) -> int:
        """Row rank via exact Gaussian elimination (first-nonzero pivoting)."""
        q = self.field.q
        a = [list(self.row(i)) for i in range(self.rows)]
        r = 0
        for c in range(self.cols):
            pivot = next((i for i in range(r, self.rows) if a[i][c]), None)
            if pivot is None:
                continue
            a[r], a[pivot] = a[pivot], a[r]
            inv = pow(a[r][c], -1, q)
            a[r] = [x * inv % q for x in a[r]]
            for i in range(r + 1, self.rows):
                f = a[i][c]
                if f:
                    a[i] = [(x - f * y) % q for x, y in zip(a[i], a[r])]
            r += 1
            if r == self.rows:
                break
        return r

    def det(self) -> int:
        """Exact determinant; the empty 0x0 matrix has determinant 1."""
        if self.rows != self.cols:
            raise ValueError(f"determinant of non-square {self.rows}x{self.cols} matrix")
        q = self.field.q
        n = self.rows
        a = [list(self.row(i)) for i in range(n)]
        det = 1
        for c in range(n):
            pivot = next((i for i in range(c, n) if a[i][c]), None)
            if pivot is None:
                return 0
            if pivot != c:
                a[c], a[pivot] = a[pivot], a[c]
                det = -det % q
            det = det * a[c][c] % q
            inv = pow(a[c][c], -1, q)
            for i in range(c + 1, n):
                f = a[i][c]
                if f:
                    factor = f * inv % q
                    a[i] = [(x - factor * y) % q for x, y in zip(a[i], a[c])]
        return det

    def to_json_obj(self) -> dict:
        return {
            "q": self.field.q,
            "rows": self.rows,
            "cols": self.cols,
            "data": list(self.entries),
        }

    @classmethod
    def from_json_obj(cls, obj: dict, field: FieldSpec | None = None) -> "FqMatrix":
        try:
            q, rows, cols, data = obj["q"], obj["rows"], obj["cols"], obj["data"]
        except (KeyError, TypeError) as exc:
            raise ValueError(f"matrix document missing field: {exc}") from exc
        if field is None:
            field = FieldSpec.for_prime(q)
        elif field.q != q:
            raise ValueError(f"matrix modulus {q} does not match field modulus {field.q}")
        return cls(rows, cols, tuple(int(x) for x in data), field)


def vandermonde(field: FieldSpec, xs: Sequence[int], n: int) -> FqMatrix:
    """|xs| x n matrix whose i-th row is (1, x_i, x_i^2, ..., x_i^(n-1))."""
    if len(xs) < n:
        raise ValueError(f"need at least {n} nodes, got {len(xs)}")
    q = field.q
    return FqMatrix.from_rows(field, [[pow(x % q, j, q) for j in range(n)] for x in xs])


def extended_vandermonde(field: FieldSpec, xs: Sequence[int], n: int) -> FqMatrix:
    """Vandermonde matrix on xs prefixed with a parity row.

    Row 0 is the negated sum of the Vandermonde rows, so all rows of the
    result sum to the zero vector by construction.
    """
    vm = vandermonde(field, xs, n)
    parity = tuple(field.neg(s) for s in vm.column_sums())
    return FqMatrix.from_rows(field, [parity, *vm.row_list()])


def vandermonde_det(field: FieldSpec, xs: Sequence[int]) -> int:
    """Product formula: prod_{i<j} (x_j - x_i), so 1 for |xs| <= 1."""
    q = field.q
    out = 1
    for i in range(len(xs)):
        for j in range(i + 1, len(xs)):
            out = out * (xs[j] - xs[i]) % q
    return out


def elementary_symmetric(field: FieldSpec, xs: Sequence[int], k: int) -> int:
    """Degree-k elementary symmetric polynomial of xs; e_0 is the empty product 1."""
    if not 0 <= k <= len(xs):
        raise ValueError(f"degree {k} out of range for {len(xs)} elements")
    q = field.q
    e = [1] + [0] * k
    for x in xs:
        for j in range(min(k, len(e) - 1), 0, -1):
            e[j] = (e[j] + e[j - 1] * x) % q
    return e[k]


def generalized_vandermonde_det(field: FieldSpec, xs: Sequence[int], powers: Sequence[int]) -> int:
    """Determinant of [x_i^p_j] for a strictly increasing exponent set."""
    if len(powers) != len(xs):
        raise ValueError(f"need {len(xs)} exponents, got {len(powers)}")
    if any(p < 0 for p in powers) or any(a >= b for a, b in zip(powers, powers[1:])):
        raise ValueError("exponents must be nonnegative and strictly increasing")
    q = field.q
    mat = FqMatrix.from_rows(field, [[pow(x % q, p, q) for p in powers] for x in xs])
    return mat.det()


def extended_vandermonde_subdet(field: FieldSpec, xs: Sequence[int], indices: Sequence[int]) -> int:
    """Closed-form determinant of a parity-row submatrix of extended_vandermonde.

    With n = |indices| + 1, this is the determinant of the n x n submatrix
    formed by row 0 of ``extended_vandermonde(xs, n)`` together with the
    Vandermonde rows of the nodes selected by ``indices`` (ascending):

        (-1)^n * V(xs[I]) * sum_{i not in I} prod_{j in I} (x_i - x_j)

    evaluated without any elimination, so it can serve as one side of a
    dual-route check against :meth:`FqMatrix.det`.
    """
    m = len(xs)
    idx = sorted(indices)
    if len(set(idx)) != len(idx):
        raise ValueError("row indices must be distinct")
    if idx and (idx[0] < 0 or idx[-1] >= m):
        raise ValueError(f"row indices must lie in [0, {m})")
    n = len(idx) + 1
    q = field.q
    chosen = [xs[i] for i in idx]
    total = 0
    excluded = set(idx)
    for i in range(m):
        if i in excluded:
            continue
        p = 1
        for j in idx:
            p = p * (xs[i] - xs[j]) % q
        total = (total + p) % q
    sign = pow(-1, n, q)
    return sign * vandermonde_det(field, chosen) % q * total % q
