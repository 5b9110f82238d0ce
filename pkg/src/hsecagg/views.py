"""Linear views of the stacked secret vector and rank-based information.

Every protocol symbol is a homogeneous linear functional of the stacked
vector ``(W || N || S)`` over F_q, where W holds all inputs, N all masking
vectors and S all privacy vectors.  A :class:`LinearView` is a matrix with
one row per observed symbol.  Because all of W, N and S are uniform, the
q-ary entropy of a view is the rank of its matrix, so mutual information
reduces to rank arithmetic.
"""
from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from typing import Iterable, Sequence

import numpy as np

from .field import PrimeField
from .params import SystemParams, User


class Layout:
    """Column indexing of the stacked secret vector for one parameter set."""

    def __init__(self, params: SystemParams):
        self.params = params
        n, L, T = params.num_users, params.L, params.T
        self.w_off = 0
        self.n_off = n * L
        self.s_off = 2 * n * L
        self.ncols = 2 * n * L + n * T

    def w(self, user: User) -> slice:
        c = self.params.col(user) * self.params.L
        return slice(self.w_off + c, self.w_off + c + self.params.L)

    def n(self, user: User) -> slice:
        c = self.params.col(user) * self.params.L
        return slice(self.n_off + c, self.n_off + c + self.params.L)

    def s(self, user: User) -> slice:
        c = self.params.col(user) * self.params.T
        return slice(self.s_off + c, self.s_off + c + self.params.T)

    @property
    def w_block(self) -> slice:
        return slice(0, self.n_off)

    @property
    def key_block(self) -> slice:
        return slice(self.n_off, self.ncols)

    def stack(self, W: dict, N: dict, S: dict) -> np.ndarray:
        """Concrete stacked vector from per-user W, N, S dictionaries."""
        x = np.zeros(self.ncols, dtype=np.int64)
        for user in self.params.users():
            x[self.w(user)] = W[user]
            x[self.n(user)] = N[user]
            x[self.s(user)] = S[user]
        return x


@dataclass
class LinearView:
    matrix: np.ndarray
    labels: list[str] = dc_field(default_factory=list)

    @property
    def rows(self) -> int:
        return self.matrix.shape[0]

    def __add__(self, other: "LinearView") -> "LinearView":
        return LinearView(np.vstack([self.matrix, other.matrix]), self.labels + other.labels)

    def apply(self, field: PrimeField, x: np.ndarray) -> np.ndarray:
        return field.matmul(self.matrix, x)


def empty_view(layout: Layout) -> LinearView:
    return LinearView(np.zeros((0, layout.ncols), dtype=np.int64), [])


def stack_views(layout: Layout, views: Iterable[LinearView]) -> LinearView:
    out = empty_view(layout)
    for v in views:
        out = out + v
    return out


class RowBuilder:
    """Emits the linear functional of every symbol the scheme produces."""

    def __init__(self, params: SystemParams, alpha: np.ndarray):
        self.params = params
        self.layout = Layout(params)
        self.alpha = np.asarray(alpha, dtype=np.int64)
        self.q = params.q

    def _unit_rows(self, sl: slice, tag: str) -> LinearView:
        k = sl.stop - sl.start
        m = np.zeros((k, self.layout.ncols), dtype=np.int64)
        m[np.arange(k), np.arange(sl.start, sl.stop)] = 1
        return LinearView(m, [f"{tag}({i + 1})" for i in range(k)])

    def w(self, user: User) -> LinearView:
        return self._unit_rows(self.layout.w(user), f"W{user}")

    def n(self, user: User) -> LinearView:
        return self._unit_rows(self.layout.n(user), f"N{user}")

    def x1(self, user: User, masked: bool = True) -> LinearView:
        """Round-1 upload W + N (just W when ``masked`` is off)."""
        v = self.w(user)
        if masked:
            v.matrix = (v.matrix + self.n(user).matrix) % self.q
        v.labels = [f"X1{user}({i + 1})" for i in range(v.rows)]
        return v

    def y1(self, survivors: Sequence[User], masked: bool = True) -> LinearView:
        m = np.zeros((self.params.L, self.layout.ncols), dtype=np.int64)
        for user in survivors:
            m = (m + self.x1(user, masked).matrix) % self.q
        return LinearView(m, [f"Y1({i + 1})" for i in range(self.params.L)])

    def q_scalar_vector(self, source: User, target: User) -> np.ndarray:
        """Functional of [Q_source]_target = (N_source || S_source) . alpha_target."""
        row = np.zeros(self.layout.ncols, dtype=np.int64)
        col = self.alpha[:, self.params.col(target)]
        L = self.params.L
        row[self.layout.n(source)] = col[:L]
        row[self.layout.s(source)] = col[L:]
        return row

    def q_scalars(self, target: User) -> LinearView:
        rows = [self.q_scalar_vector(src, target) for src in self.params.users()]
        labels = [f"Q{src}@{target}" for src in self.params.users()]
        return LinearView(np.array(rows, dtype=np.int64), labels)

    def key(self, user: User) -> LinearView:
        """All symbols of Z_user: N_user followed by its U*V Q-scalars."""
        return self.n(user) + self.q_scalars(user)

    def x2(self, user: User, s1: Iterable[User]) -> LinearView:
        row = np.zeros(self.layout.ncols, dtype=np.int64)
        for src in s1:
            row = (row + self.q_scalar_vector(src, user)) % self.q
        return LinearView(row[None, :], [f"X2{user}"])

    def colluders(self, colluders: Iterable[User]) -> LinearView:
        """Conditioning rows {W_t, Z_t} for every colluding user."""
        return stack_views(self.layout, (self.w(t) + self.key(t) for t in colluders))

    def all_inputs(self) -> LinearView:
        return self._unit_rows(self.layout.w_block, "W")


def entropy(field: PrimeField, view: LinearView) -> int:
    """q-ary entropy of a linear image of a uniform vector: its rank."""
    return field.rank(view.matrix)


def cond_mi(field: PrimeField, a: LinearView, b: LinearView, c: LinearView | None = None) -> int:
    """I(A; B | C) in q-ary units via rank[A;C] + rank[B;C] - rank[A;B;C] - rank[C]."""
    cm = c.matrix if c is not None else np.zeros((0, a.matrix.shape[1]), dtype=np.int64)
    if not (a.matrix.shape[1] == b.matrix.shape[1] == cm.shape[1]):
        raise ValueError("views act on different secret spaces")
    r_ac = field.rank(np.vstack([a.matrix, cm]))
    r_bc = field.rank(np.vstack([b.matrix, cm]))
    r_abc = field.rank(np.vstack([a.matrix, b.matrix, cm]))
    r_c = field.rank(cm)
    return r_ac + r_bc - r_abc - r_c


class Conditioned:
    """Precomputed conditioning for repeated ``I(view; all inputs | C)`` queries.

    With B the identity on the input block, the rank formula collapses to
    ``(rank[V;C] - rank C) - (rank[V;C]_K - rank C_K)`` where ``_K`` keeps
    only key columns.  Both differences are ranks of V reduced against a
    fixed echelon form of C, computed once.
    """

    def __init__(self, field: PrimeField, layout: Layout, c: LinearView):
        self.field = field
        self.keys = layout.key_block
        self._full = field.rref(c.matrix) if c.rows else (c.matrix, [])
        kc = c.matrix[:, self.keys]
        self._key = field.rref(kc) if c.rows else (kc, [])

    def _excess(self, v: np.ndarray, echelon) -> int:
        r, piv = echelon
        if piv:
            v = (v - self.field.matmul(v[:, piv], r[:len(piv)])) % self.field.q
        return self.field.rank(v)

    def leakage(self, v: LinearView) -> int:
        return self._excess(v.matrix, self._full) - self._excess(v.matrix[:, self.keys], self._key)
