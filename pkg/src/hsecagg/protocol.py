"""One session of the two-round, two-hop aggregation protocol.

Round 1: every user uploads ``X1 = W + N`` and each relay forwards the sum
of its surviving users' uploads.  After signaling the round-1 survivor set
S1, every user in S1 uploads the single symbol
``X2 = sum_{(i,j) in S1} [Q_{i,j}]_{u,v}`` and each relay forwards V0 of
them.  The server solves the alpha-submatrix system for the aggregated
(N || S) and strips the aggregated mask off the round-1 sum.
"""
from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from typing import Mapping, Optional, Sequence

import numpy as np

from .dropout import DropoutPattern, validate
from .errors import (InsufficientSymbols, LengthMismatch, MissingMessage,
                     NotSurviving, SingularDecode, SingularMatrix, TooFewSurvivors)
from .field import PrimeField
from .io import fmt_users, fmt_vec
from .keys import INPUT_STREAM, KeyMaterial
from .mds import MdsMatrix
from .params import SystemParams, User

POLICIES = ("lowest-index", "seeded-random")


@dataclass(frozen=True)
class RateTuple:
    Rx1: Fraction
    Ry1: Fraction
    Rx2: Fraction
    Ry2: Fraction

    def __iter__(self):
        return iter((self.Rx1, self.Ry1, self.Rx2, self.Ry2))

    def __str__(self):
        return "(" + ", ".join(str(r) for r in self) + ")"


def sample_inputs(params: SystemParams, seed: int, draw: tuple = ()) -> dict:
    """Uniform inputs from a stream disjoint from the key dealer's.

    ``draw`` extends the seed so a campaign can take many independent draws.
    """
    rng = np.random.default_rng([seed, INPUT_STREAM, *draw])
    w = rng.integers(0, params.q, size=(params.num_users, params.L), dtype=np.int64)
    return {x: w[i] for i, x in enumerate(params.users())}


def user_round1(field: PrimeField, W: np.ndarray, Z) -> np.ndarray:
    """X1 = W + N, with N the first component of the user's key."""
    N = np.asarray(Z[0])
    W = np.asarray(W)
    if W.shape != N.shape:
        raise LengthMismatch(f"input has length {W.size}, mask has {N.size}")
    return (W + N) % field.q


def relay_round1(field: PrimeField, messages: Mapping[User, np.ndarray],
                 survivors: Sequence[User]) -> np.ndarray:
    """Componentwise sum of the uploads of ``survivors`` only."""
    if not survivors:
        raise TooFewSurvivors("relay has no surviving users")
    try:
        parts = [np.asarray(messages[x]) for x in survivors]
    except KeyError as e:
        raise MissingMessage(f"no round-1 upload from user {e.args[0]}") from None
    return np.sum(parts, axis=0) % field.q


def server_signaling(U1, V1: Mapping[int, Sequence[User]]) -> tuple[User, ...]:
    """S1 as the union of the survivor reports of relays in U1, sorted."""
    return tuple(sorted({x for u in U1 for x in V1[u]}))


def user_round2(field: PrimeField, params: SystemParams, user: User, Z,
                S1: Sequence[User]) -> int:
    if user not in S1:
        raise NotSurviving(f"user {user} is not in the round-1 survivor set")
    qs = np.asarray(Z[1])
    return int(qs[[params.col(x) for x in S1]].sum() % field.q)


def relay_round2(x2: Mapping[User, int], survivors: Sequence[User], V0: int,
                 policy: str = "lowest-index",
                 rng: Optional[np.random.Generator] = None):
    """Pick V0 of the round-2 survivors and forward their symbols.

    Returns (selection, [(user, symbol), ...]) with the selection sorted.
    """
    survivors = sorted(survivors)
    if len(survivors) < V0:
        raise TooFewSurvivors(f"{len(survivors)} round-2 survivors, need {V0}")
    if policy == "lowest-index":
        chosen = survivors[:V0]
    elif policy == "seeded-random":
        rng = rng if rng is not None else np.random.default_rng()
        idx = rng.choice(len(survivors), size=V0, replace=False)
        chosen = sorted(survivors[i] for i in idx)
    else:
        raise ValueError(f"unknown selection policy {policy!r}")
    try:
        return chosen, [(x, int(x2[x])) for x in chosen]
    except KeyError as e:
        raise MissingMessage(f"no round-2 upload from user {e.args[0]}") from None


@dataclass
class Decode:
    total: np.ndarray
    key_sum: np.ndarray
    used: list
    surplus_consistent: bool


def server_decode(params: SystemParams, mds: MdsMatrix, Y1: Mapping[int, np.ndarray],
                  Y2: Mapping[int, Sequence], U1, U2) -> Decode:
    """Recover sum_{S1} W from the relays' round-1 sums and coded symbols.

    The first U0*V0 symbols in (relay, user) order are decoded; any surplus
    symbols are checked against the solution.
    """
    field = params.field
    m, L = params.decode_size, params.L
    symbols = [pair for u in sorted(U2) for pair in Y2[u]]
    if len(symbols) < m:
        raise InsufficientSymbols(f"{len(symbols)} coded symbols, need {m}")
    used, extra = symbols[:m], symbols[m:]
    a = mds.columns([x for x, _ in used]).T
    y = np.array([s for _, s in used], dtype=np.int64)
    try:
        key_sum = field.solve(a, y)
    except SingularMatrix as e:
        raise SingularDecode(str(e)) from None
    consistent = all(int(field.matmul(mds.column(x), key_sum)) == s for x, s in extra)
    round1 = np.sum([Y1[u] for u in sorted(U1)], axis=0) % field.q
    return Decode((round1 - key_sum[:L]) % field.q, key_sum, [x for x, _ in used], consistent)


@dataclass
class Transcript:
    params: SystemParams
    seed: int
    pattern: DropoutPattern
    policy: str
    X1: dict = dc_field(default_factory=dict)
    Y1: dict = dc_field(default_factory=dict)
    S1: tuple = ()
    X2: dict = dc_field(default_factory=dict)
    Q: dict = dc_field(default_factory=dict)
    Y2: dict = dc_field(default_factory=dict)
    decoded: Optional[np.ndarray] = None
    surplus_consistent: bool = True

    def symbol_counts(self) -> dict:
        """Worst-case message length of each message family, in symbols."""
        return {
            "X1": max(len(x) for x in self.X1.values()),
            "Y1": max(len(y) for y in self.Y1.values()),
            "X2": 1 if self.X2 else 0,
            "Y2": max((len(y) for y in self.Y2.values()), default=0),
        }

    def rates(self) -> RateTuple:
        c, L = self.symbol_counts(), self.params.L
        return RateTuple(*(Fraction(c[k], L) for k in ("X1", "Y1", "X2", "Y2")))

    def dump(self) -> str:
        lines = [self.params.header(), f"seed={self.seed} policy={self.policy}",
                 self.pattern.line(), f"S1={fmt_users(self.S1)}"]
        lines += [f"X1{x}={fmt_vec(v)}" for x, v in sorted(self.X1.items())]
        lines += [f"Y1({u})={fmt_vec(v)}" for u, v in sorted(self.Y1.items())]
        lines += [f"X2{x}={v}" for x, v in sorted(self.X2.items())]
        lines += [f"Y2({u})=" + ",".join(f"{x[0]}.{x[1]}:{s}" for x, s in v)
                  for u, v in sorted(self.Y2.items())]
        dec = "absent" if self.decoded is None else fmt_vec(self.decoded)
        lines.append(f"decoded={dec} surplus_consistent={self.surplus_consistent}")
        return "\n".join(lines) + "\n"


def run_session(params: SystemParams, keys: KeyMaterial, W: Mapping[User, np.ndarray],
                pattern: DropoutPattern, policy: str = "lowest-index",
                seed: int = 0) -> Transcript:
    """Execute hop 1, relay sums, signaling, round 2 and the server decode.

    Every user uploads X1 and every relay forwards Y1 before any relay
    drops; relays outside U1 are recorded but ignored by the server.  A
    relay in U1 whose round-2 survivors fall below V0 sends no Y2.
    """
    bad = validate(params, pattern)
    if bad:
        raise ValueError(f"inadmissible pattern: {bad}")
    field = params.field
    tr = Transcript(params, seed, pattern, policy)
    for x in params.users():
        tr.X1[x] = user_round1(field, W[x], keys.key(x))
    for u in range(1, params.U + 1):
        tr.Y1[u] = relay_round1(field, tr.X1, pattern.v1(u))
    U1 = pattern.relays1()
    tr.S1 = server_signaling(U1, {u: pattern.v1(u) for u in U1})
    for x in tr.S1:
        tr.X2[x] = user_round2(field, params, x, keys.key(x), tr.S1)
    for u in U1:
        survivors = pattern.v2(u)
        if len(survivors) < params.V0:
            continue
        rng = np.random.default_rng([seed, 4, u])
        tr.Q[u], tr.Y2[u] = relay_round2(tr.X2, survivors, params.V0, policy, rng)
    U2 = pattern.relays2()
    dec = server_decode(params, keys.mds, {u: tr.Y1[u] for u in U1},
                        {u: tr.Y2[u] for u in U2}, U1, U2)
    tr.decoded, tr.surplus_consistent = dec.total, dec.surplus_consistent
    return tr


def plaintext_sum(params: SystemParams, W: Mapping[User, np.ndarray],
                  users: Sequence[User]) -> np.ndarray:
    total = np.zeros(params.L, dtype=np.int64)
    for x in users:
        total = (total + W[x]) % params.q
    return total
