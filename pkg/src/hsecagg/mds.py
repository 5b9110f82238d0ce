"""Construction and certification of T-private MDS coding matrices.

The coding matrix alpha has U0*V0 rows and one column per user.  It is
MDS when every U0*V0 x U0*V0 column-submatrix is nonsingular, and T-private
when, in addition, its last T rows form an MDS matrix on their own.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field as dc_field
from itertools import combinations
from math import comb
from pathlib import Path
from typing import Optional, Sequence

import numpy as np
from sympy import nextprime

from .errors import (CertificationTooLarge, DimensionMismatch,
                     InsufficientField, SearchExhausted)
from .field import PrimeField
from .params import SystemParams, User

log = logging.getLogger(__name__)

DEFAULT_SUBSET_CAP = 10**6
DEFAULT_PRIME_CEILING = 10**4
DEFAULT_RANDOM_BUDGET = 20


@dataclass(frozen=True)
class MdsMatrix:
    params: SystemParams
    alpha: np.ndarray = dc_field(repr=False)
    generators: Optional[tuple[int, ...]] = None
    exponents: Optional[tuple[int, ...]] = None

    def __post_init__(self):
        p = self.params
        if self.alpha.shape != (p.decode_size, p.num_users):
            raise DimensionMismatch(
                f"alpha has shape {self.alpha.shape}, expected "
                f"({p.decode_size}, {p.num_users})")
        self.alpha.setflags(write=False)

    @property
    def q(self) -> int:
        return self.params.q

    def column(self, user: User) -> np.ndarray:
        return self.alpha[:, self.params.col(user)]

    def columns(self, users: Sequence[User]) -> np.ndarray:
        return self.alpha[:, [self.params.col(x) for x in users]]


def build_candidate(params: SystemParams, generators: Optional[Sequence[int]] = None,
                    exponents: Optional[Sequence[int]] = None) -> MdsMatrix:
    """Power-basis candidate: entry (r, k) is generators[r] ** exponents[k] mod q.

    Defaults are generators 1..U0*V0 and exponents 0..U*V-1, so user (u, v)
    gets the column (1, 2**k, 3**k, ...) with k = V*(u-1) + v - 1.  The
    result is not certified.
    """
    q = params.q
    n, m = params.num_users, params.decode_size
    if q is None or q <= n:
        raise InsufficientField(f"need q > U*V = {n}, got q={q}")
    gens = tuple(range(1, m + 1)) if generators is None else tuple(int(g) % q for g in generators)
    exps = tuple(range(n)) if exponents is None else tuple(int(e) for e in exponents)
    if len(gens) != m or len(exps) != n:
        raise DimensionMismatch(f"need {m} generators and {n} exponents")
    if 0 in gens or len(set(gens)) != m:
        raise ValueError(f"generators must be distinct and nonzero mod {q}: {gens}")
    if len(set(exps)) != n:
        raise ValueError("exponents must be distinct")
    alpha = np.array([[pow(g, e, q) for e in exps] for g in gens], dtype=np.int64)
    return MdsMatrix(params, alpha, gens, exps)


def _maximal_minors_nonsingular(field: PrimeField, mat: np.ndarray, cap: int) -> bool:
    k, n = mat.shape
    if k == 0:
        return True
    if k > n:
        return False
    total = comb(n, k)
    if total > cap:
        raise CertificationTooLarge(f"{total} column subsets exceed the cap of {cap}")
    return all(field.rank(mat[:, cols]) == k for cols in combinations(range(n), k))


def certify_mds(candidate, q: Optional[int] = None, cap: int = DEFAULT_SUBSET_CAP) -> bool:
    """True iff every maximal square column-submatrix is nonsingular.

    ``candidate`` may be an :class:`MdsMatrix` or a bare array (then ``q`` is
    required).  The check is exhaustive over all column subsets.
    """
    mat, field = _unpack(candidate, q)
    return _maximal_minors_nonsingular(field, mat, cap)


def certify_t_private(candidate, T: int, q: Optional[int] = None,
                      cap: int = DEFAULT_SUBSET_CAP) -> bool:
    """True iff T == 0 or the last T rows form an MDS matrix."""
    mat, field = _unpack(candidate, q)
    if T > mat.shape[0]:
        raise ValueError(f"T={T} exceeds the row count {mat.shape[0]}")
    if T == 0:
        return True
    return _maximal_minors_nonsingular(field, mat[-T:], cap)


def is_certified(m: MdsMatrix, cap: int = DEFAULT_SUBSET_CAP) -> bool:
    return certify_mds(m, cap=cap) and certify_t_private(m, m.params.T, cap=cap)


def _unpack(candidate, q):
    if isinstance(candidate, MdsMatrix):
        return np.asarray(candidate.alpha), PrimeField(candidate.q)
    if q is None:
        raise ValueError("q is required for a bare matrix")
    field = PrimeField(q)
    return field.matrix(candidate), field


@dataclass
class SearchResult:
    q: int
    mds: MdsMatrix
    canonical: bool
    attempts: int


def find_t_private_mds(params: SystemParams, prime_ceiling: int = DEFAULT_PRIME_CEILING,
                       random_budget: int = DEFAULT_RANDOM_BUDGET, seed: int = 0,
                       cap: int = DEFAULT_SUBSET_CAP, q: Optional[int] = None) -> SearchResult:
    """Smallest prime q > U*V admitting a certified T-private MDS matrix.

    Primes are tried in ascending order.  For each prime the canonical
    generators 1..U0*V0 are tried first, then ``random_budget`` seeded draws
    of distinct nonzero generators.  A given ``q`` restricts the search to
    that single prime.
    """
    n, m = params.num_users, params.decode_size
    attempts = 0
    if q is not None:
        PrimeField(q)
        if q <= n:
            raise InsufficientField(f"q={q} must exceed U*V={n}")
        prime_ceiling = q
    else:
        q = nextprime(n)
    while q <= prime_ceiling:
        p = params.with_q(q)
        rng = np.random.default_rng([seed, q])
        trials = [None] + [
            tuple(int(g) for g in rng.choice(np.arange(1, q), size=m, replace=False))
            for _ in range(random_budget)
        ]
        for gens in trials:
            attempts += 1
            cand = build_candidate(p, generators=gens)
            if is_certified(cand, cap=cap):
                log.info("certified alpha at q=%d after %d attempts", q, attempts)
                return SearchResult(q, cand, gens is None, attempts)
        q = nextprime(q)
    raise SearchExhausted(f"no certified matrix found up to q={prime_ceiling}")


def dump(m: MdsMatrix) -> str:
    lines = [m.params.header()]
    lines += [" ".join(str(int(x)) for x in row) for row in m.alpha]
    return "\n".join(lines) + "\n"


def load(text: str, trust: bool = False) -> MdsMatrix:
    """Parse :func:`dump` output; re-certifies unless ``trust`` is set."""
    from .io import parse_header

    lines = [ln for ln in text.splitlines() if ln.strip()]
    params = parse_header(lines[0])
    alpha = params.field.matrix([[int(x) for x in ln.split()] for ln in lines[1:]])
    m = MdsMatrix(params, alpha)
    if not trust and not is_certified(m):
        raise ValueError("imported matrix failed MDS / T-privacy certification")
    return m


def save(m: MdsMatrix, path) -> None:
    Path(path).write_text(dump(m))
