"""System parameters and the feasibility gate."""
from __future__ import annotations

from dataclasses import dataclass, replace
from functools import cached_property
from itertools import product
from typing import Iterator, Optional

from .errors import InfeasibleParameters
from .field import PrimeField

User = tuple[int, int]

INFEASIBLE_REASON = (
    "optimal rate region is empty when U0*V0 <= T: the surviving users cannot "
    "supply both the masking randomness and the decoding degrees of freedom"
)


def is_feasible(U0: int, V0: int, T: int) -> bool:
    return U0 * V0 > T


@dataclass(frozen=True)
class SystemParams:
    """The tuple (U, V, U0, V0, T, q) with the derived block length L.

    Relays are numbered 1..U and user (u, v) is the v-th user of relay u,
    both 1-based.  ``q`` may be left as None until a field is chosen by the
    MDS search.
    """

    U: int
    V: int
    U0: int
    V0: int
    T: int
    q: Optional[int] = None

    def __post_init__(self):
        problems = []
        if self.U < 2:
            problems.append(f"U={self.U} must be at least 2")
        if not 1 <= self.U0 <= self.U:
            problems.append(f"U0={self.U0} must lie in [1, U]")
        if not 1 <= self.V0 <= self.V:
            problems.append(f"V0={self.V0} must lie in [1, V]")
        if self.T < 0:
            problems.append(f"T={self.T} must be nonnegative")
        if problems:
            raise ValueError("; ".join(problems))
        if not is_feasible(self.U0, self.V0, self.T):
            raise InfeasibleParameters(
                f"infeasible parameters U0={self.U0}, V0={self.V0}, T={self.T}: "
                + INFEASIBLE_REASON)
        if self.q is not None:
            PrimeField(self.q)

    @property
    def L(self) -> int:
        return self.U0 * self.V0 - self.T

    @property
    def num_users(self) -> int:
        return self.U * self.V

    @property
    def decode_size(self) -> int:
        """Number of coded symbols the server needs, U0*V0."""
        return self.U0 * self.V0

    @cached_property
    def field(self) -> PrimeField:
        if self.q is None:
            raise ValueError("field modulus not chosen yet")
        return PrimeField(self.q)

    def with_q(self, q: int) -> "SystemParams":
        return replace(self, q=q)

    def users(self) -> Iterator[User]:
        return iter(product(range(1, self.U + 1), range(1, self.V + 1)))

    def cluster(self, u: int) -> list[User]:
        return [(u, v) for v in range(1, self.V + 1)]

    def col(self, user: User) -> int:
        """0-based column of user (u, v) in alpha: V*(u-1) + (v-1)."""
        u, v = user
        return self.V * (u - 1) + (v - 1)

    def header(self) -> str:
        q = "auto" if self.q is None else self.q
        return f"U={self.U} V={self.V} U0={self.U0} V0={self.V0} T={self.T} q={q}"


EXAMPLE_1 = SystemParams(U=2, V=2, U0=2, V0=1, T=0)
EXAMPLE_2 = SystemParams(U=3, V=3, U0=2, V0=2, T=2)
