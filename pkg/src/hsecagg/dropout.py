"""Admissible dropout patterns: validation, enumeration and sampling.

A pattern fixes the round-1 survivors V1[u] of every relay, the relays U1
alive after round 1, the round-2 survivors V2[u] and the relays U2 alive
after round 2.  Sets of users are stored per relay as bitmasks (bit v-1
set iff user (u, v) is present); sets of relays as bitmasks over u-1.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from itertools import product
from typing import Iterator

import numpy as np

from .errors import EnumerationTooLarge
from .io import parse_kv
from .params import SystemParams, User

DEFAULT_ENUMERATION_CAP = 10**7


def bits(mask: int) -> list[int]:
    """1-based positions of the set bits."""
    out, i = [], 1
    while mask:
        if mask & 1:
            out.append(i)
        mask >>= 1
        i += 1
    return out


def popcount(mask: int) -> int:
    return bin(mask).count("1")


def to_mask(indices) -> int:
    m = 0
    for i in indices:
        m |= 1 << (i - 1)
    return m


@dataclass(frozen=True, order=True)
class DropoutPattern:
    U1: int
    U2: int
    V1: tuple[int, ...]
    V2: tuple[int, ...]

    @property
    def num_relays(self) -> int:
        return len(self.V1)

    def relays1(self) -> list[int]:
        return bits(self.U1)

    def relays2(self) -> list[int]:
        return bits(self.U2)

    def v1(self, u: int) -> list[User]:
        return [(u, v) for v in bits(self.V1[u - 1])]

    def v2(self, u: int) -> list[User]:
        return [(u, v) for v in bits(self.V2[u - 1])]

    @cached_property
    def S1(self) -> tuple[User, ...]:
        """Round-1 survivors under surviving relays, in (u, v) order."""
        return tuple(x for u in bits(self.U1) for x in self.v1(u))

    def line(self) -> str:
        return (f"U1={self.U1} U2={self.U2} V1={','.join(map(str, self.V1))} "
                f"V2={','.join(map(str, self.V2))}")

    @classmethod
    def parse(cls, line: str) -> "DropoutPattern":
        kv = parse_kv(line)
        return cls(int(kv["U1"]), int(kv["U2"]),
                   tuple(int(x) for x in kv["V1"].split(",")),
                   tuple(int(x) for x in kv["V2"].split(",")))

    @classmethod
    def from_sets(cls, params: SystemParams, V1: dict, U1, V2: dict, U2) -> "DropoutPattern":
        """Build from 1-based sets; V1/V2 map relay u to users (u, v) or indices v."""
        def mask(users):
            return to_mask(x[1] if isinstance(x, tuple) else x for x in users)
        return cls(to_mask(U1), to_mask(U2),
                   tuple(mask(V1.get(u, ())) for u in range(1, params.U + 1)),
                   tuple(mask(V2.get(u, ())) for u in range(1, params.U + 1)))


def full_survival(params: SystemParams) -> DropoutPattern:
    every = (1 << params.V) - 1
    relays = (1 << params.U) - 1
    return DropoutPattern(relays, relays, (every,) * params.U, (every,) * params.U)


def validate(params: SystemParams, p: DropoutPattern) -> list[str]:
    """Every violated admissibility rule, with the offending relay; empty if ok."""
    out = []
    U, V = params.U, params.V
    full_users, full_relays = (1 << V) - 1, (1 << U) - 1
    if len(p.V1) != U or len(p.V2) != U:
        return [f"expected {U} per-relay user sets"]
    if p.U1 & ~full_relays or p.U2 & ~full_relays:
        out.append("relay set outside [U]")
    if p.U2 & ~p.U1:
        out.append("round-2 relay set not nested in round-1 relay set")
    if popcount(p.U1) < params.U0:
        out.append(f"|U1|={popcount(p.U1)} below U0={params.U0}")
    if popcount(p.U2) < params.U0:
        out.append(f"|U2|={popcount(p.U2)} below U0={params.U0}")
    for u in range(1, U + 1):
        a, b = p.V1[u - 1], p.V2[u - 1]
        if a & ~full_users or b & ~full_users:
            out.append(f"relay {u}: user outside its cluster")
        if b & ~a:
            out.append(f"relay {u}: round-2 set not nested in round-1 set")
        if popcount(a) < params.V0:
            out.append(f"relay {u}: |V1|={popcount(a)} below V0={params.V0}")
        if p.U2 >> (u - 1) & 1 and popcount(b) < params.V0:
            out.append(f"relay {u}: |V2|={popcount(b)} below V0={params.V0}")
        if not p.U1 >> (u - 1) & 1 and b:
            out.append(f"relay {u}: round-2 survivors under a relay lost in round 1")
    return out


def _submasks(mask: int) -> list[int]:
    """All submasks of ``mask`` in ascending order."""
    return sorted({s for s in _iter_submasks(mask)})


def _iter_submasks(mask: int):
    s = mask
    while True:
        yield s
        if s == 0:
            return
        s = (s - 1) & mask


def _relay_options(params: SystemParams):
    full = (1 << params.V) - 1
    v1_opts = [m for m in range(full + 1) if popcount(m) >= params.V0]
    relay_masks = [m for m in range(1 << params.U) if popcount(m) >= params.U0]
    return v1_opts, relay_masks


def _v2_options(params: SystemParams, v1: int, in_u1: bool, in_u2: bool) -> list[int]:
    if not in_u1:
        return [0]
    subs = _submasks(v1)
    return [m for m in subs if popcount(m) >= params.V0] if in_u2 else subs


def count_patterns(params: SystemParams) -> int:
    v1_opts, relay_masks = _relay_options(params)
    total = 0
    for u1 in relay_masks:
        for u2 in (m for m in relay_masks if m & ~u1 == 0):
            prod = 1
            for u in range(params.U):
                prod *= sum(len(_v2_options(params, a, bool(u1 >> u & 1), bool(u2 >> u & 1)))
                            for a in v1_opts)
            total += prod
    return total


def enumerate_patterns(params: SystemParams,
                       cap: int = DEFAULT_ENUMERATION_CAP) -> Iterator[DropoutPattern]:
    """Every admissible pattern exactly once, ordered by (U1, U2, V1, V2) masks."""
    n = count_patterns(params)
    if n > cap:
        raise EnumerationTooLarge(f"{n} patterns exceed the cap of {cap}; sample instead")
    return _generate(params)


def _generate(params: SystemParams) -> Iterator[DropoutPattern]:
    v1_opts, relay_masks = _relay_options(params)
    for u1 in relay_masks:
        for u2 in (m for m in relay_masks if m & ~u1 == 0):
            for v1 in product(v1_opts, repeat=params.U):
                choices = [_v2_options(params, a, bool(u1 >> u & 1), bool(u2 >> u & 1))
                           for u, a in enumerate(v1)]
                for v2 in product(*choices):
                    yield DropoutPattern(u1, u2, v1, v2)


def _random_subset(rng, mask: int, floor: int) -> int:
    members = bits(mask)
    k = int(rng.integers(floor, len(members) + 1))
    return to_mask(int(x) for x in rng.choice(members, size=k, replace=False))


def _draw(params: SystemParams, rng) -> DropoutPattern:
    full_users, full_relays = (1 << params.V) - 1, (1 << params.U) - 1
    while True:
        u1 = _random_subset(rng, full_relays, params.U0)
        u2 = _random_subset(rng, u1, params.U0)
        v1 = tuple(_random_subset(rng, full_users, params.V0) for _ in range(params.U))
        v2 = []
        for u, a in enumerate(v1):
            if not u1 >> u & 1:
                v2.append(0)
            else:
                v2.append(_random_subset(rng, a, params.V0 if u2 >> u & 1 else 0))
        p = DropoutPattern(u1, u2, v1, tuple(v2))
        if not validate(params, p):
            return p


def sample(params: SystemParams, seed: int) -> DropoutPattern:
    """A seed-deterministic admissible pattern (not uniform over patterns)."""
    return _draw(params, np.random.default_rng([seed, 3]))


def sample_many(params: SystemParams, count: int, seed: int) -> list[DropoutPattern]:
    """``count`` patterns from one seeded stream; repeats are possible."""
    rng = np.random.default_rng([seed, 3])
    return [_draw(params, rng) for _ in range(count)]
