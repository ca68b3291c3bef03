"""Security certification and refutation for coefficient schemes.

Two layers of checking:

* Rank audit.  Sufficient conditions for security are full row rank of
  two families of matrices, enumerated exhaustively over every collusion
  set of size at most T.  For a relay u and collusion set C, the matrix
  stacks the coefficient rows of u's non-colluding cluster members on the
  colluders' rows.  For the server, it stacks whole-cluster row sums of
  the non-fully-covered clusters (the last one omitted; the zero row sum
  makes it dependent) on the colluders' rows.  Sampling would silently
  weaken a universally quantified guarantee, so the audit either runs the
  full enumeration or refuses with a budget error.

* Exact independence oracle.  The definitional security statements are
  zero conditional mutual information.  For desk-scale fields they are
  decided by enumerating every (input, source-key) tuple and checking the
  count-product identity N(a,b,c) * N(c) == N(a,c) * N(b,c) in exact
  integers for every cell, which is equivalent to zero conditional MI and
  involves no floating point.

The attack below demonstrates the infeasibility boundary: a relay that
colludes with every inter-cluster user reconstructs its own cluster's
input sum from any zero-row-sum linear scheme.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

from .errors import AuditBudgetExceeded, CorrectnessViolation
from .fields import FqMatrix
from .protocol import RoundTranscript
from .schemes import CoefficientScheme

__all__ = [
    "CollusionSet",
    "RankViolation",
    "AuditReport",
    "IndependenceVerdict",
    "relay_condition_matrix",
    "server_condition_matrix",
    "audit",
    "exact_independence_check",
    "infeasibility_attack",
    "DEFAULT_RANK_BUDGET",
    "DEFAULT_ENUMERATION_CAP",
]

DEFAULT_RANK_BUDGET = 10**6
DEFAULT_ENUMERATION_CAP = 10**7


@dataclass(frozen=True)
class CollusionSet:
    """A canonical (sorted, duplicate-free) set of colluding user labels."""

    members: tuple[tuple[int, int], ...]

    @classmethod
    def of(cls, users) -> "CollusionSet":
        members = tuple(sorted(set((int(u), int(v)) for u, v in users)))
        return cls(members)

    def __post_init__(self) -> None:
        if list(self.members) != sorted(set(self.members)):
            raise ValueError("collusion set must be sorted and duplicate-free")

    def __len__(self) -> int:
        return len(self.members)

    def __iter__(self):
        return iter(self.members)


def _check_collusion(scheme: CoefficientScheme, tset: CollusionSet) -> None:
    cfg = scheme.cfg
    if any(not (1 <= u <= cfg.U and 1 <= v <= cfg.V) for (u, v) in tset):
        raise ValueError("collusion set contains labels outside the user grid")
    if len(tset) > cfg.T:
        raise ValueError(f"collusion set of size {len(tset)} exceeds budget T = {cfg.T}")


def relay_condition_matrix(
    scheme: CoefficientScheme, u: int, tset: CollusionSet
) -> FqMatrix:
    """Rows that must stay independent for relay u against collusion tset.

    Stacks the rows of relay u's cluster members that are not colluding,
    then one row per colluder; (V - T_in) + |tset| rows in total.
    """
    _check_collusion(scheme, tset)
    cfg = scheme.cfg
    if not 1 <= u <= cfg.U:
        raise ValueError(f"relay id {u} out of range [1, {cfg.U}]")
    colluders = set(tset)
    rows = [
        scheme.coefficient_row(u, v)
        for v in range(1, cfg.V + 1)
        if (u, v) not in colluders
    ]
    rows.extend(scheme.coefficient_row(*t) for t in tset)
    return FqMatrix.from_rows(scheme.field, rows)


def _cluster_sum_row(scheme: CoefficientScheme, u: int) -> tuple[int, ...]:
    q = scheme.field.q
    cols = scheme.H.cols
    total = [0] * cols
    for v in range(1, scheme.cfg.V + 1):
        row = scheme.coefficient_row(u, v)
        total = [(a + b) % q for a, b in zip(total, row)]
    return tuple(total)


def server_condition_matrix(scheme: CoefficientScheme, tset: CollusionSet) -> FqMatrix:
    """Rows that must stay independent for the server against collusion tset.

    With F clusters fully covered by tset and the others listed ascending,
    stacks the whole-cluster coefficient sums of all but the last uncovered
    cluster, then one row per colluder; (U - F - 1) + |tset| rows.
    """
    _check_collusion(scheme, tset)
    cfg = scheme.cfg
    colluders = set(tset)
    uncovered = [
        u
        for u in range(1, cfg.U + 1)
        if not all((u, v) in colluders for v in range(1, cfg.V + 1))
    ]
    rows = [_cluster_sum_row(scheme, u) for u in uncovered[:-1]]
    rows.extend(scheme.coefficient_row(*t) for t in tset)
    return FqMatrix.from_rows(scheme.field, rows)


@dataclass(frozen=True)
class RankViolation:
    kind: str  # "relay" or "server"
    relay: int | None
    collusion: CollusionSet
    observed_rank: int
    required_rank: int

    def to_json_obj(self) -> dict:
        return {
            "kind": self.kind,
            "relay": self.relay,
            "collusion": [list(t) for t in self.collusion],
            "observed_rank": self.observed_rank,
            "required_rank": self.required_rank,
        }


@dataclass(frozen=True)
class AuditReport:
    relay_ok: bool
    server_ok: bool
    checks_performed: int
    violations: tuple[RankViolation, ...]

    @property
    def passed(self) -> bool:
        return self.relay_ok and self.server_ok

    def to_json_obj(self) -> dict:
        return {
            "relay_ok": self.relay_ok,
            "server_ok": self.server_ok,
            "checks_performed": self.checks_performed,
            "violations": [v.to_json_obj() for v in self.violations],
        }


def audit(scheme: CoefficientScheme, budget: int = DEFAULT_RANK_BUDGET) -> AuditReport:
    """Exhaustive rank audit over every collusion set of size at most T.

    Enumerates all violations, not just the first, in a canonical order so
    reports are identical across runs.
    """
    cfg = scheme.cfg
    users = cfg.users()
    planned = (cfg.U + 1) * sum(math.comb(cfg.n_users, t) for t in range(cfg.T + 1))
    if planned > budget:
        raise AuditBudgetExceeded(
            f"audit needs {planned} rank checks, budget is {budget}"
        )

    violations: list[RankViolation] = []
    checks = 0
    for t in range(cfg.T + 1):
        for combo in itertools.combinations(users, t):
            tset = CollusionSet(combo)
            for u in range(1, cfg.U + 1):
                m = relay_condition_matrix(scheme, u, tset)
                checks += 1
                r = m.rank()
                if r < m.rows:
                    violations.append(RankViolation("relay", u, tset, r, m.rows))
            m = server_condition_matrix(scheme, tset)
            checks += 1
            r = m.rank()
            if r < m.rows:
                violations.append(RankViolation("server", None, tset, r, m.rows))

    violations.sort(key=lambda v: (v.kind, v.relay or 0, v.collusion.members))
    return AuditReport(
        relay_ok=not any(v.kind == "relay" for v in violations),
        server_ok=not any(v.kind == "server" for v in violations),
        checks_performed=checks,
        violations=tuple(violations),
    )


@dataclass(frozen=True)
class IndependenceVerdict:
    passed: bool
    mode: str
    relay: int | None
    collusion: CollusionSet
    tuples_enumerated: int
    # (c, a, b, N_abc, N_c, N_ac, N_bc) for the first failing cell
    witness: tuple | None = None

    def to_json_obj(self) -> dict:
        return {
            "passed": self.passed,
            "mode": self.mode,
            "relay": self.relay,
            "collusion": [list(t) for t in self.collusion],
            "tuples_enumerated": self.tuples_enumerated,
            "witness": None if self.witness is None else repr(self.witness),
        }


def exact_independence_check(
    scheme: CoefficientScheme,
    mode: str,
    tset: CollusionSet,
    relay: int | None = None,
    cap: int = DEFAULT_ENUMERATION_CAP,
) -> IndependenceVerdict:
    """Decide a definitional security statement by complete enumeration (L = 1).

    relay mode: are relay `relay`'s received messages independent of the
    full input set, given the colluders' inputs and masks?
    server mode: are the relay-to-server messages independent of the input
    set, given the total input sum and the colluders' inputs and masks?

    Enumerates every (W, N) tuple and tests the count-product identity for
    every cell of the resulting contingency table.  Exact integers only.
    """
    if mode not in ("relay", "server"):
        raise ValueError(f"mode must be 'relay' or 'server', got {mode!r}")
    if mode == "relay" and relay is None:
        raise ValueError("relay mode needs a relay id")
    if mode == "server" and relay is not None:
        raise ValueError("server mode takes no relay id")
    _check_collusion(scheme, tset)
    if mode == "relay" and not 1 <= relay <= scheme.cfg.U:
        raise ValueError(f"relay id {relay} out of range")

    cfg = scheme.cfg
    q = scheme.field.q
    n_users = cfg.n_users
    n = scheme.n_source
    total = q ** (n_users + n)
    if total > cap:
        raise AuditBudgetExceeded(
            f"exact check needs {total} tuples, cap is {cap}; refusing to sample"
        )

    users = cfg.users()
    uidx = {user: i for i, user in enumerate(users)}
    hrows = [scheme.coefficient_row(*user) for user in users]
    t_idx = [uidx[t] for t in tset]
    clusters = [
        [uidx[(u, v)] for v in range(1, cfg.V + 1)] for u in range(1, cfg.U + 1)
    ]
    relay_members = clusters[relay - 1] if mode == "relay" else None

    # Mask vectors for every source draw, in user order.
    z_table = [
        tuple(sum(h * nval for h, nval in zip(row, nvec)) % q for row in hrows)
        for nvec in itertools.product(range(q), repeat=n)
    ]

    n_abc: dict = {}
    n_ac: dict = {}
    n_bc: dict = {}
    n_c: dict = {}
    for w in itertools.product(range(q), repeat=n_users):
        cluster_w = [sum(w[i] for i in cl) % q for cl in clusters]
        total_w = sum(cluster_w) % q
        for z in z_table:
            if mode == "relay":
                a = tuple((w[i] + z[i]) % q for i in relay_members)
                c = tuple((w[i], z[i]) for i in t_idx)
            else:
                a = tuple(
                    (cw + sum(z[i] for i in cl)) % q
                    for cw, cl in zip(cluster_w, clusters)
                )
                c = (total_w,) + tuple((w[i], z[i]) for i in t_idx)
            n_abc[(a, w, c)] = n_abc.get((a, w, c), 0) + 1
            n_ac[(a, c)] = n_ac.get((a, c), 0) + 1
            n_bc[(w, c)] = n_bc.get((w, c), 0) + 1
            n_c[c] = n_c.get(c, 0) + 1

    # Support lists per conditioning value; zero joint cells with positive
    # marginals are failures, so iterate the full support product.
    a_support: dict = {}
    for (a, c) in n_ac:
        a_support.setdefault(c, []).append(a)
    b_support: dict = {}
    for (b, c) in n_bc:
        b_support.setdefault(c, []).append(b)

    for c, count_c in n_c.items():
        for a in a_support[c]:
            ac = n_ac[(a, c)]
            for b in b_support[c]:
                joint = n_abc.get((a, b, c), 0)
                bc = n_bc[(b, c)]
                if joint * count_c != ac * bc:
                    return IndependenceVerdict(
                        False, mode, relay, tset, total,
                        witness=(c, a, b, joint, count_c, ac, bc),
                    )
    return IndependenceVerdict(True, mode, relay, tset, total)


def infeasibility_attack(
    scheme: CoefficientScheme, transcript: RoundTranscript
) -> tuple[int, ...]:
    """Relay 1 plus all inter-cluster colluders recover cluster 1's input sum.

    The colluders' inputs and masks reproduce every other relay's message;
    adding relay 1's own message yields the total input sum, and
    subtracting the colluders' known inputs leaves cluster 1's sum.  The
    result is checked against ground truth before returning: this attack
    is total against any zero-row-sum linear scheme.
    """
    cfg = scheme.cfg
    q = scheme.field.q
    L = transcript.inputs.L
    W = transcript.inputs.W

    recovered = []
    for pos in range(L):
        key = transcript.keys[pos]
        total = transcript.Y[1][pos]
        known_inputs = 0
        for u in range(2, cfg.U + 1):
            for v in range(1, cfg.V + 1):
                total = (total + W[(u, v)][pos] + key.individual[(u, v)]) % q
                known_inputs = (known_inputs + W[(u, v)][pos]) % q
        recovered.append((total - known_inputs) % q)

    truth = tuple(
        sum(W[(1, v)][pos] for v in range(1, cfg.V + 1)) % q for pos in range(L)
    )
    if tuple(recovered) != truth:
        raise CorrectnessViolation(
            "attack reconstruction mismatch; transcript does not come from a "
            "zero-row-sum linear scheme"
        )
    return tuple(recovered)
