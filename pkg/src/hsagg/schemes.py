"""Construction, persistence and validation of key-coefficient schemes.

A scheme is a UV x n coefficient matrix H over a prime field together with
an assignment of matrix rows to users.  Every user's mask is the inner
product of its row with the pool of n i.i.d. source symbols; the rows sum
to the zero vector so the masks cancel during aggregation.

The optimal construction takes H as a Vandermonde matrix on UV - 1
geometrically spaced nodes (x_0 = 0, x_{i+1} - x_i = gamma^{i+1}) plus a
parity row, searched over (q, gamma) until every n x n submatrix is
certifiably nonsingular.  The search is deterministic: smallest valid q
first, then smallest valid gamma.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass

from .errors import CorrectnessViolation, InfeasibleConfiguration, SchemeFormatError
from .fields import (
    ElementSet,
    FieldSpec,
    FqMatrix,
    extended_vandermonde,
    extended_vandermonde_subdet,
    next_prime,
)
from .rates import HsaConfig, optimal_source_rate

__all__ = [
    "KIND_EXTENDED_VANDERMONDE",
    "KIND_BASELINE",
    "KIND_EXTERNAL",
    "SchemeParams",
    "CoefficientScheme",
    "KeyMaterial",
    "build_elements",
    "search_gamma",
    "build_scheme",
    "build_baseline",
    "derive_keys",
    "import_scheme",
    "scheme_to_json",
]

KIND_EXTENDED_VANDERMONDE = "extended_vandermonde"
KIND_BASELINE = "baseline"
KIND_EXTERNAL = "external"
_KINDS = (KIND_EXTENDED_VANDERMONDE, KIND_BASELINE, KIND_EXTERNAL)

# The gamma search provably succeeds for large enough q; this cap only
# guards against runaway loops on malformed inputs.
_PRIME_SEARCH_LIMIT = 10**6


@dataclass(frozen=True)
class SchemeParams:
    """Everything needed to reconstruct a scheme deterministically.

    gamma and elements are populated only for the extended-Vandermonde
    construction; imported and baseline schemes carry what their documents
    declare.
    """

    cfg: HsaConfig
    field: FieldSpec
    gamma: int | None
    elements: ElementSet | None
    n_source: int


@dataclass(frozen=True, eq=False)
class CoefficientScheme:
    """A coefficient matrix H plus the user -> row assignment."""

    params: SchemeParams
    H: FqMatrix
    row_index: dict[tuple[int, int], int]
    kind: str
    insecure_by_construction: bool = False

    @property
    def cfg(self) -> HsaConfig:
        return self.params.cfg

    @property
    def field(self) -> FieldSpec:
        return self.params.field

    @property
    def n_source(self) -> int:
        return self.params.n_source

    def coefficient_row(self, u: int, v: int) -> tuple[int, ...]:
        return self.H.row(self.row_index[(u, v)])

    def has_zero_row_sum(self) -> bool:
        return all(s == 0 for s in self.H.column_sums())

    def __eq__(self, other) -> bool:
        if not isinstance(other, CoefficientScheme):
            return NotImplemented
        return (
            self.params == other.params
            and self.H == other.H
            and self.row_index == other.row_index
            and self.kind == other.kind
            and self.insecure_by_construction == other.insecure_by_construction
        )

    def to_json_obj(self) -> dict:
        cfg = self.cfg
        obj = {
            "U": cfg.U,
            "V": cfg.V,
            "T": cfg.T,
            "q": self.field.q,
            "gamma": self.params.gamma,
            "kind": self.kind,
            "elements": list(self.params.elements) if self.params.elements is not None else [],
            "H": self.H.to_json_obj(),
            "row_index": [
                [f"{u},{v}", self.row_index[(u, v)]] for (u, v) in cfg.users()
            ],
        }
        if self.insecure_by_construction:
            obj["insecure_by_construction"] = True
        return obj


@dataclass(frozen=True)
class KeyMaterial:
    """One source key vector and the per-user masks derived from it."""

    source: tuple[int, ...]
    individual: dict[tuple[int, int], int]


def build_elements(gamma: int, count: int, field: FieldSpec) -> ElementSet:
    """Nodes x_0 = 0, x_i = gamma + gamma^2 + ... + gamma^i reduced mod q.

    Modular wraparound can collide nodes; callers reject such gammas.
    """
    if count < 1:
        raise ValueError(f"need at least one node, got {count}")
    q = field.q
    xs = [0]
    step = 1
    for i in range(1, count):
        step = step * gamma % q
        xs.append((xs[-1] + step) % q)
    return ElementSet(tuple(xs))


def _parity_submatrices_nonsingular(field: FieldSpec, xs: ElementSet, n: int) -> bool:
    # Submatrices avoiding the parity row are Vandermonde minors, nonsingular
    # whenever the nodes are distinct; only parity-row submatrices need work.
    for idx in itertools.combinations(range(len(xs)), n - 1):
        if extended_vandermonde_subdet(field, xs, idx) == 0:
            return False
    return True


def search_gamma(cfg: HsaConfig, field: FieldSpec) -> int | None:
    """Smallest gamma in [2, q-1] giving distinct nodes and a fully MDS matrix.

    Returns None when no gamma works in this field (including the pigeonhole
    case UV - 1 > q, where distinct nodes cannot exist).
    """
    n = optimal_source_rate(cfg)
    m = cfg.n_users - 1
    if m > field.q:
        return None
    for gamma in range(2, field.q):
        xs = build_elements(gamma, m, field)
        if not xs.is_distinct():
            continue
        if _parity_submatrices_nonsingular(field, xs, n):
            return gamma
    return None


def _extended_row_index(cfg: HsaConfig) -> dict[tuple[int, int], int]:
    # Parity row goes to the last user (U, V); everyone else takes the
    # Vandermonde rows in lexicographic order.
    index = {(cfg.U, cfg.V): 0}
    row = 1
    for user in cfg.users():
        if user == (cfg.U, cfg.V):
            continue
        index[user] = row
        row += 1
    return index


def build_scheme(cfg: HsaConfig, q_hint: int | None = None) -> CoefficientScheme:
    """Deterministically build the optimal scheme for a feasible configuration.

    The prime search starts at q_hint (rounded up to a prime) or at the
    smallest prime >= UV + 1, advancing to the next prime whenever no gamma
    certifies in the current field.
    """
    if not cfg.feasible:
        raise InfeasibleConfiguration(cfg.U, cfg.V, cfg.T)
    n = optimal_source_rate(cfg)
    q = next_prime(q_hint if q_hint is not None else cfg.n_users + 1)
    while q <= _PRIME_SEARCH_LIMIT:
        field = FieldSpec.for_prime(q)
        gamma = search_gamma(cfg, field)
        if gamma is not None:
            elements = build_elements(gamma, cfg.n_users - 1, field)
            H = extended_vandermonde(field, elements, n)
            params = SchemeParams(cfg, field, gamma, elements, n)
            return CoefficientScheme(params, H, _extended_row_index(cfg), KIND_EXTENDED_VANDERMONDE)
        q = next_prime(q + 1)
    raise RuntimeError(f"no certifying (q, gamma) found below q = {_PRIME_SEARCH_LIMIT}")


def _baseline_matrix(field: FieldSpec, n_users: int) -> FqMatrix:
    rows = [[1 if i == j else 0 for j in range(n_users - 1)] for i in range(n_users - 1)]
    rows.append([field.neg(1)] * (n_users - 1))
    return FqMatrix.from_rows(field, rows)


def build_baseline(
    cfg: HsaConfig, q_hint: int | None = None, force_infeasible: bool = False
) -> CoefficientScheme:
    """Naive per-user keying: identity block plus an all-(-1) parity row.

    Uses UV - 1 source symbols.  With force_infeasible an out-of-region
    configuration is still materialized (for attack demos) and the scheme is
    labelled insecure_by_construction.
    """
    infeasible = not cfg.feasible
    if infeasible and not force_infeasible:
        raise InfeasibleConfiguration(cfg.U, cfg.V, cfg.T)
    # Any prime works for this construction; default to the smallest odd one.
    field = FieldSpec.for_prime(next_prime(q_hint if q_hint is not None else 3))
    H = _baseline_matrix(field, cfg.n_users)
    row_index = {user: i for i, user in enumerate(cfg.users())}
    params = SchemeParams(cfg, field, None, None, cfg.n_users - 1)
    return CoefficientScheme(
        params, H, row_index, KIND_BASELINE, insecure_by_construction=infeasible
    )


def derive_keys(scheme: CoefficientScheme, source) -> KeyMaterial:
    """Per-user masks as exact inner products of coefficient rows with source."""
    source = tuple(int(x) % scheme.field.q for x in source)
    if len(source) != scheme.n_source:
        raise ValueError(
            f"source vector has length {len(source)}, scheme needs {scheme.n_source}"
        )
    field = scheme.field
    individual = {
        user: field.dot(scheme.coefficient_row(*user), source) for user in scheme.cfg.users()
    }
    return KeyMaterial(source, individual)


def _parse_user_label(label: str) -> tuple[int, int]:
    try:
        u, v = label.split(",")
        return int(u), int(v)
    except (ValueError, AttributeError) as exc:
        raise SchemeFormatError(f"bad user label {label!r}, expected 'u,v'") from exc


def import_scheme(obj: dict) -> CoefficientScheme:
    """Validate a scheme document and return the in-memory scheme.

    Structural problems raise SchemeFormatError; a matrix whose rows do not
    sum to zero can never reproduce the input sum and raises
    CorrectnessViolation.
    """
    if not isinstance(obj, dict):
        raise SchemeFormatError("scheme document must be a JSON object")
    try:
        U, V, T, q = int(obj["U"]), int(obj["V"]), int(obj["T"]), int(obj["q"])
        h_obj = obj["H"]
        row_entries = obj["row_index"]
    except (KeyError, TypeError, ValueError) as exc:
        raise SchemeFormatError(f"scheme document missing or malformed field: {exc}") from exc

    try:
        cfg = HsaConfig(U, V, T)
        field = FieldSpec.for_prime(q)
        H = FqMatrix.from_json_obj(h_obj, field)
    except ValueError as exc:
        raise SchemeFormatError(str(exc)) from exc

    if H.rows != cfg.n_users:
        raise SchemeFormatError(f"H has {H.rows} rows, expected UV = {cfg.n_users}")
    if H.cols < 1:
        raise SchemeFormatError("H must have at least one column")

    if not isinstance(row_entries, list) or len(row_entries) != cfg.n_users:
        raise SchemeFormatError(f"row_index must list all {cfg.n_users} users")
    row_index: dict[tuple[int, int], int] = {}
    for entry in row_entries:
        try:
            label, row = entry
            row = int(row)
        except (TypeError, ValueError) as exc:
            raise SchemeFormatError(f"bad row_index entry {entry!r}") from exc
        user = _parse_user_label(label)
        if user in row_index:
            raise SchemeFormatError(f"duplicate row_index entry for user {user}")
        row_index[user] = row
    if set(row_index) != set(cfg.users()):
        raise SchemeFormatError("row_index users do not match the U x V grid")
    if sorted(row_index.values()) != list(range(cfg.n_users)):
        raise SchemeFormatError("row_index rows must be a permutation of 0..UV-1")

    if any(s != 0 for s in H.column_sums()):
        raise CorrectnessViolation(
            "coefficient rows do not sum to zero; the masks cannot cancel"
        )

    kind = obj.get("kind", KIND_EXTERNAL)
    if kind not in _KINDS:
        raise SchemeFormatError(f"unknown scheme kind {kind!r}")

    gamma = obj.get("gamma")
    if gamma is not None:
        try:
            gamma = int(gamma)
        except (TypeError, ValueError) as exc:
            raise SchemeFormatError(f"bad gamma value {gamma!r}") from exc
    elements_raw = obj.get("elements") or []
    elements: ElementSet | None = None

    if kind == KIND_EXTENDED_VANDERMONDE:
        if gamma is None:
            raise SchemeFormatError("extended_vandermonde schemes must declare gamma")
        elements = ElementSet.of(elements_raw)
        if len(elements) != cfg.n_users - 1 or not elements.is_distinct():
            raise SchemeFormatError("extended_vandermonde schemes need UV-1 distinct nodes")
        if elements != build_elements(gamma, cfg.n_users - 1, field):
            raise SchemeFormatError("nodes do not follow the declared gamma spacing")
        if H != extended_vandermonde(field, elements, H.cols):
            raise SchemeFormatError("H does not match the declared node construction")
        if row_index != _extended_row_index(cfg):
            raise SchemeFormatError("extended_vandermonde schemes use the canonical row order")
    elif kind == KIND_BASELINE:
        if gamma is not None:
            raise SchemeFormatError("baseline schemes carry no gamma")
        if H != _baseline_matrix(field, cfg.n_users):
            raise SchemeFormatError("H does not match the baseline construction")
        if row_index != {user: i for i, user in enumerate(cfg.users())}:
            raise SchemeFormatError("baseline schemes use the natural row order")

    params = SchemeParams(cfg, field, gamma, elements, H.cols)
    return CoefficientScheme(
        params, H, row_index, kind,
        insecure_by_construction=bool(obj.get("insecure_by_construction", False)),
    )


def scheme_to_json(scheme: CoefficientScheme, pretty: bool = False) -> str:
    """Canonical serialization; identical schemes yield identical bytes."""
    return json.dumps(scheme.to_json_obj(), sort_keys=True, indent=2 if pretty else None) + "\n"
