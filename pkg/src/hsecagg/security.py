"""Exact relay and server security checks for concrete dropout patterns.

Views follow the delayed-availability adversary: relay u eventually sees
every round-1 upload of its cluster and the round-2 upload of every
round-1 survivor it reported; the server sees every relay's round-1 sum and
the round-2 forward of every relay alive after round 1.  Leakage is
``I(view; all inputs | conditioning)`` computed by ranks over F_q.
"""
from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from typing import Iterable, Optional, Sequence

import numpy as np

from .dropout import DropoutPattern
from .keys import DEFAULT_COLLUDER_CAP, colluder_sets
from .params import SystemParams, User
from .views import Conditioned, LinearView, RowBuilder, cond_mi, stack_views


def _builder(params: SystemParams, alpha) -> RowBuilder:
    return alpha if isinstance(alpha, RowBuilder) else RowBuilder(params, getattr(alpha, "alpha", alpha))


def relay_round2_senders(pattern: DropoutPattern, u: int) -> list[User]:
    """Users of relay u that upload in round 2: V1[u] if u survived round 1."""
    return pattern.v1(u) if pattern.U1 >> (u - 1) & 1 else []


def view_relay(params: SystemParams, alpha, pattern: DropoutPattern, u: int,
               colluders: Sequence[User] = (), masked: bool = True, strict: bool = False):
    """(observed, conditioning, inputs) views for relay u.

    ``masked=False`` drops the round-1 mask (negative control).  ``strict``
    adds the colluders' own uploads to the observed view.
    """
    if len(colluders) > params.T:
        raise ValueError(f"{len(colluders)} colluders exceed T={params.T}")
    rb = _builder(params, alpha)
    lay = rb.layout
    s1 = pattern.S1
    observed = [rb.x1(x, masked) for x in params.cluster(u)]
    observed += [rb.x2(x, s1) for x in relay_round2_senders(pattern, u)]
    if strict:
        observed += [rb.x1(t, masked) for t in colluders]
        observed += [rb.x2(t, s1) for t in colluders if t in s1]
    return stack_views(lay, observed), rb.colluders(colluders), rb.all_inputs()


def selections(params: SystemParams, pattern: DropoutPattern, policy: str = "lowest-index",
               seed: int = 0) -> dict:
    """Relay choices Q_u for every relay in U1 that can forward V0 symbols."""
    from .protocol import relay_round2

    out = {}
    for u in pattern.relays1():
        survivors = pattern.v2(u)
        if len(survivors) >= params.V0:
            rng = np.random.default_rng([seed, 4, u])
            out[u], _ = relay_round2({x: 0 for x in survivors}, survivors, params.V0, policy, rng)
    return out


def view_server(params: SystemParams, alpha, pattern: DropoutPattern,
                colluders: Sequence[User] = (), masked: bool = True,
                chosen: Optional[dict] = None):
    """(observed, conditioning, inputs) views for the server.

    Conditioning holds the desired sum over S1 followed by the colluders'
    inputs and keys.
    """
    if len(colluders) > params.T:
        raise ValueError(f"{len(colluders)} colluders exceed T={params.T}")
    rb = _builder(params, alpha)
    lay = rb.layout
    chosen = selections(params, pattern) if chosen is None else chosen
    s1 = pattern.S1
    observed = [rb.y1(pattern.v1(u), masked) for u in range(1, params.U + 1)]
    observed += [rb.x2(x, s1) for u in sorted(chosen) for x in chosen[u]]
    target = LinearView(np.zeros((params.L, lay.ncols), dtype=np.int64),
                        [f"sumW({k + 1})" for k in range(params.L)])
    for x in s1:
        target.matrix = (target.matrix + rb.w(x).matrix) % params.q
    return stack_views(lay, observed), target + rb.colluders(colluders), rb.all_inputs()


def check_relay_security(params: SystemParams, alpha, pattern: DropoutPattern, u: int,
                         colluders: Sequence[User] = (), **kw) -> int:
    v, c, w = view_relay(params, alpha, pattern, u, colluders, **kw)
    return cond_mi(params.field, v, w, c)


def check_server_security(params: SystemParams, alpha, pattern: DropoutPattern,
                          colluders: Sequence[User] = (), **kw) -> int:
    v, c, w = view_server(params, alpha, pattern, colluders, **kw)
    return cond_mi(params.field, v, w, c)


@dataclass
class Record:
    kind: str
    pattern: object
    relay: Optional[int]
    colluders: tuple
    mi: int

    @property
    def passed(self) -> bool:
        return self.mi == 0

    def line(self) -> str:
        relay = "-" if self.relay is None else self.relay
        coll = "[" + ",".join(f"({u},{v})" for u, v in self.colluders) + "]"
        return (f"kind={self.kind} pattern={self.pattern} relay={relay} colluders={coll} "
                f"mi={self.mi} pass={str(self.passed).lower()}")


@dataclass
class SecurityReport:
    records: list = dc_field(default_factory=list)
    colluder_sets: int = 0
    exhaustive_colluders: bool = True
    views_evaluated: int = 0

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.records)

    def failures(self) -> list:
        return [r for r in self.records if not r.passed]

    def count(self, kind: str) -> int:
        return sum(r.kind == kind for r in self.records)


def sweep_security(params: SystemParams, alpha, patterns: Iterable, policy: str = "lowest-index",
                   seed: int = 0, colluder_cap: int = DEFAULT_COLLUDER_CAP,
                   relays: bool = True, server: bool = True, masked: bool = True,
                   strict: bool = False) -> SecurityReport:
    """Relay and server checks over every (pattern, colluding set[, relay]).

    ``patterns`` yields (pattern_id, pattern).  Views that coincide across
    patterns are evaluated once: a relay view depends only on the relay,
    its reported survivors and S1, and a server view only on the round-1
    sets and the relay selections.
    """
    rb = _builder(params, alpha)
    field, lay = params.field, rb.layout
    sets, exhaustive = colluder_sets(params, colluder_cap, seed)
    report = SecurityReport(colluder_sets=len(sets), exhaustive_colluders=exhaustive)
    memo: dict = {}
    conditioners: dict = {}

    def measure(key, cond_key, build):
        if key not in memo:
            v, c, _ = build()
            if cond_key not in conditioners:
                conditioners[cond_key] = Conditioned(field, lay, c)
            memo[key] = conditioners[cond_key].leakage(v)
        return memo[key]

    for pid, pat in patterns:
        chosen = selections(params, pat, policy, seed) if server else None
        for cset in sets:
            if relays:
                for u in range(1, params.U + 1):
                    senders = tuple(relay_round2_senders(pat, u))
                    key = ("relay", u, senders, pat.S1 if senders else (), cset)
                    mi = measure(key, ("relay", cset),
                                 lambda: view_relay(params, rb, pat, u, cset,
                                                    masked=masked, strict=strict))
                    report.records.append(Record("relay", pid, u, cset, mi))
            if server:
                key = ("server", pat.U1, pat.V1,
                       tuple((u, tuple(q)) for u, q in sorted(chosen.items())), cset)
                mi = measure(key, ("server", pat.S1, cset),
                             lambda: view_server(params, rb, pat, cset,
                                                 masked=masked, chosen=chosen))
                report.records.append(Record("server", pid, None, cset, mi))
    report.views_evaluated = len(memo)
    return report


@dataclass
class NestedSumEntry:
    users: tuple  # (U1, U2, U3)
    per_relay: tuple  # (V1, V2, V3)
    mi: int


def nested_triples(params: SystemParams):
    """All 0 <= U1 < U2 < U3 <= U and 1 <= V1 <= V2 <= V3 <= V."""
    U, V = params.U, params.V
    for a in range(0, U + 1):
        for b in range(a + 1, U + 1):
            for c in range(b + 1, U + 1):
                for x in range(1, V + 1):
                    for y in range(x, V + 1):
                        for z in range(y, V + 1):
                            yield (a, b, c), (x, y, z)


def nested_sum_views(params: SystemParams, alpha, users, per_relay):
    """(sum over the middle block, sum over the outer block + inner inputs/keys)."""
    rb = _builder(params, alpha)
    (U1, U2, U3), (V1, V2, V3) = users, per_relay

    def block_sum(nu, nv, tag):
        m = np.zeros((params.L, rb.layout.ncols), dtype=np.int64)
        for u in range(1, nu + 1):
            for v in range(1, nv + 1):
                m = (m + rb.w((u, v)).matrix) % params.q
        return LinearView(m, [f"{tag}({k + 1})" for k in range(params.L)])

    inner = [(u, v) for u in range(1, U1 + 1) for v in range(1, V1 + 1)]
    a = block_sum(U2, V2, "mid")
    b = block_sum(U3, V3, "outer") + stack_views(rb.layout, (rb.w(x) + rb.key(x) for x in inner))
    return a, b


def check_lemma2(params: SystemParams, alpha) -> list:
    """Independence of nested block sums given the innermost users' inputs and keys."""
    rb = _builder(params, alpha)
    out = []
    for users, per_relay in nested_triples(params):
        a, b = nested_sum_views(params, rb, users, per_relay)
        out.append(NestedSumEntry(users, per_relay, cond_mi(params.field, a, b)))
    return out
