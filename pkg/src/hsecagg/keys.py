"""Trusted key dealer: base randomness and derived per-user keys.

The dealer samples one masking vector N (length L) and one privacy vector
S (length T) per user, then hands user (u, v) the key
``Z = (N_{u,v}, {[Q_{i,j}]_{u,v}})`` where
``[Q_{i,j}]_{u,v} = (N_{i,j} || S_{i,j}) . alpha_{u,v}``.
The full (N, S) collection is the source key; the dealer never sees inputs.
"""
from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from math import comb

import numpy as np

from .errors import DimensionMismatch
from .io import fmt_vec, parse_header, parse_kv, parse_vec
from .mds import MdsMatrix
from .params import SystemParams, User
from .views import RowBuilder, cond_mi, stack_views

KEY_STREAM = 0
INPUT_STREAM = 1
DEFAULT_COLLUDER_CAP = 10**5


@dataclass(frozen=True)
class BaseRandomness:
    params: SystemParams
    seed: int
    N: dict
    S: dict


@dataclass(frozen=True)
class KeyMaterial:
    params: SystemParams
    seed: int
    N: dict
    S: dict
    Q: np.ndarray  # Q[col(i,j), col(u,v)] = [Q_{i,j}]_{u,v}
    mds: MdsMatrix

    def key(self, user: User) -> tuple[np.ndarray, np.ndarray]:
        """Z_{u,v}: the own mask and the U*V scalars in column order of (i, j)."""
        return self.N[user], self.Q[:, self.params.col(user)]

    def q_scalar(self, source: User, target: User) -> int:
        return int(self.Q[self.params.col(source), self.params.col(target)])


def sample_base(params: SystemParams, seed: int) -> BaseRandomness:
    """Draw i.i.d. uniform N and S vectors from a seeded key stream."""
    rng = np.random.default_rng([seed, KEY_STREAM])
    users = list(params.users())
    n = rng.integers(0, params.q, size=(len(users), params.L), dtype=np.int64)
    s = rng.integers(0, params.q, size=(len(users), params.T), dtype=np.int64)
    return BaseRandomness(params, seed,
                          {x: n[i] for i, x in enumerate(users)},
                          {x: s[i] for i, x in enumerate(users)})


def derive_keys(base: BaseRandomness, mds: MdsMatrix) -> KeyMaterial:
    params = base.params
    if mds.params.q != params.q or mds.alpha.shape != (params.decode_size, params.num_users):
        raise DimensionMismatch(
            f"alpha {mds.alpha.shape} over q={mds.params.q} does not fit {params.header()}")
    users = list(params.users())
    ns = np.array([np.concatenate([base.N[x], base.S[x]]) for x in users], dtype=np.int64)
    Q = params.field.matmul(ns, mds.alpha)
    return KeyMaterial(params, base.seed, base.N, base.S, Q, mds)


def deal(params: SystemParams, mds: MdsMatrix, seed: int) -> KeyMaterial:
    return derive_keys(sample_base(params, seed), mds)


def colluder_sets(params: SystemParams, cap: int = DEFAULT_COLLUDER_CAP, seed: int = 0):
    """All user sets of size <= T, or a seeded sample of ``cap`` of them.

    Returns (sets, exhaustive).
    """
    users = list(params.users())
    total = sum(comb(len(users), t) for t in range(params.T + 1))
    if total <= cap:
        sets = [c for t in range(params.T + 1) for c in combinations(users, t)]
        return sets, True
    rng = np.random.default_rng([seed, 2])
    seen = {()}
    while len(seen) < cap:
        t = int(rng.integers(1, params.T + 1))
        pick = rng.choice(len(users), size=t, replace=False)
        seen.add(tuple(sorted(users[i] for i in pick)))
    return sorted(seen, key=lambda c: (len(c), c)), False


@dataclass
class AuditEntry:
    colluders: tuple
    t_privacy_mi: int
    key_independence_mi: int

    @property
    def passed(self) -> bool:
        return self.t_privacy_mi == 0 and self.key_independence_mi == 0


@dataclass
class AuditReport:
    entries: list
    exhaustive: bool

    @property
    def passed(self) -> bool:
        return all(e.passed for e in self.entries)


def key_entropy_audit(params: SystemParams, mds: MdsMatrix, cap: int = DEFAULT_COLLUDER_CAP,
                      seed: int = 0) -> AuditReport:
    """Check the key privacy identities for every colluding set |T| <= T.

    For each set: the colluders' Q-scalars are independent of all masks N,
    and the non-colluders' masks are independent of the colluders' masks
    together with their Q-scalars.
    """
    if params.T == 0:
        return AuditReport([], True)
    rb = RowBuilder(params, mds.alpha)
    field = params.field
    lay = rb.layout
    all_n = stack_views(lay, (rb.n(x) for x in params.users()))
    sets, exhaustive = colluder_sets(params, cap, seed)
    entries = []
    for cset in sets:
        if not cset:
            continue
        qs = stack_views(lay, (rb.q_scalars(t) for t in cset))
        own = stack_views(lay, (rb.n(t) for t in cset))
        rest = stack_views(lay, (rb.n(x) for x in params.users() if x not in cset))
        entries.append(AuditEntry(cset, cond_mi(field, qs, all_n),
                                  cond_mi(field, rest, own + qs)))
    return AuditReport(entries, exhaustive)


def key_rank(params: SystemParams, mds: MdsMatrix, user: User) -> int:
    """H(Z_user) in q-ary units."""
    rb = RowBuilder(params, mds.alpha)
    return params.field.rank(rb.key(user).matrix)


def dump(km: KeyMaterial) -> str:
    lines = [km.params.header(), f"seed={km.seed}"]
    for user in km.params.users():
        n, qs = km.key(user)
        lines.append(f"user={user[0]},{user[1]} N={fmt_vec(n)} S={fmt_vec(km.S[user])} "
                     f"Z={fmt_vec(qs)}")
    return "\n".join(lines) + "\n"


def load(text: str, mds: MdsMatrix) -> KeyMaterial:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    params = parse_header(lines[0])
    seed = int(parse_kv(lines[1])["seed"])
    N, S = {}, {}
    for ln in lines[2:]:
        kv = parse_kv(ln)
        u, v = (int(x) for x in kv["user"].split(","))
        N[(u, v)] = np.array(parse_vec(kv["N"]), dtype=np.int64)
        S[(u, v)] = np.array(parse_vec(kv["S"]), dtype=np.int64).reshape(params.T)
    km = derive_keys(BaseRandomness(params, seed, N, S), mds)
    for ln in lines[2:]:
        kv = parse_kv(ln)
        u, v = (int(x) for x in kv["user"].split(","))
        if parse_vec(kv["Z"]) != [int(x) for x in km.key((u, v))[1]]:
            raise ValueError(f"Z of user ({u},{v}) disagrees with N, S and alpha")
    return km
