"""Exact arithmetic and dense linear algebra over a prime field F_q.

Field elements are plain Python ints in ``[0, q)``; matrices are 2-D numpy
arrays of int64 holding reduced residues.  The modulus lives on a
:class:`PrimeField` context object shared by everything in a session, never
on individual elements.
"""
from __future__ import annotations

from functools import cached_property

import numpy as np
from sympy import isprime

from .errors import DimensionMismatch, InvalidOperand, SingularMatrix

# Row operations form products below q**2; keep those inside int64.
MAX_MODULUS = 2**31


class PrimeField:
    """The field of integers modulo a prime ``q``."""

    def __init__(self, q: int):
        q = int(q)
        if q < 2 or not isprime(q):
            raise ValueError(f"field modulus must be prime, got {q}")
        if q >= MAX_MODULUS:
            raise ValueError(f"modulus {q} exceeds supported bound {MAX_MODULUS}")
        self.q = q

    def __repr__(self):
        return f"PrimeField({self.q})"

    def __eq__(self, other):
        return isinstance(other, PrimeField) and other.q == self.q

    def __hash__(self):
        return hash(("PrimeField", self.q))

    # -- scalars ---------------------------------------------------------

    def __call__(self, value: int) -> int:
        return int(value) % self.q

    def add(self, a: int, b: int) -> int:
        return (a + b) % self.q

    def sub(self, a: int, b: int) -> int:
        return (a - b) % self.q

    def neg(self, a: int) -> int:
        return (-a) % self.q

    def mul(self, a: int, b: int) -> int:
        return (a * b) % self.q

    def inv(self, a: int) -> int:
        a %= self.q
        if a == 0:
            raise InvalidOperand("zero has no inverse")
        return pow(a, -1, self.q)

    def div(self, a: int, b: int) -> int:
        return (a * self.inv(b)) % self.q

    def pow(self, a: int, e: int) -> int:
        return pow(a % self.q, e, self.q)

    def arith(self, a: int, b: int, kind: str) -> int:
        """Dispatch one binary operation by name: add, sub, mul or div."""
        ops = {"add": self.add, "sub": self.sub, "mul": self.mul,
               "div": self.div, "inv-div": self.div}
        try:
            op = ops[kind]
        except KeyError:
            raise ValueError(f"unknown operation {kind!r}") from None
        return op(self(a), self(b))

    # -- arrays ----------------------------------------------------------

    def array(self, data, ndmin: int = 0) -> np.ndarray:
        """Reduce ``data`` into a fresh int64 array of residues."""
        arr = np.array(data, dtype=object if _needs_object(data) else np.int64,
                       ndmin=ndmin)
        return np.mod(arr, self.q).astype(np.int64)

    def matrix(self, rows) -> np.ndarray:
        m = self.array(rows, ndmin=2)
        if m.ndim != 2:
            raise DimensionMismatch(f"expected a 2-D matrix, got shape {m.shape}")
        return m

    def zeros(self, rows: int, cols: int) -> np.ndarray:
        return np.zeros((rows, cols), dtype=np.int64)

    def identity(self, n: int) -> np.ndarray:
        return np.eye(n, dtype=np.int64)

    def random(self, shape, rng: np.random.Generator) -> np.ndarray:
        return rng.integers(0, self.q, size=shape, dtype=np.int64)

    @cached_property
    def _dot_chunk(self) -> int:
        # Largest inner dimension whose partial sums cannot overflow int64.
        return max(1, (2**63 - 1) // ((self.q - 1) ** 2 or 1))

    def matmul(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        a = np.asarray(a, dtype=np.int64)
        b = np.asarray(b, dtype=np.int64)
        if a.shape[-1] != b.shape[0]:
            raise DimensionMismatch(f"cannot multiply {a.shape} by {b.shape}")
        n = a.shape[-1]
        step = self._dot_chunk
        if n <= step:
            return (a @ b) % self.q
        out = np.zeros(a.shape[:-1] + b.shape[1:], dtype=np.int64)
        for lo in range(0, n, step):
            out = (out + (a[..., lo:lo + step] @ b[lo:lo + step]) % self.q) % self.q
        return out

    # -- elimination -----------------------------------------------------

    def rref(self, m: np.ndarray) -> tuple[np.ndarray, list[int]]:
        """Reduced row echelon form and pivot columns.

        Pivoting takes the first nonzero entry in each column; with exact
        arithmetic no numerical pivot selection is needed.
        """
        q = self.q
        r = np.array(m, dtype=np.int64, ndmin=2) % q
        rows, cols = r.shape
        pivots = []
        row = 0
        for col in range(cols):
            if row == rows:
                break
            nz = np.flatnonzero(r[row:, col])
            if nz.size == 0:
                continue
            p = row + int(nz[0])
            if p != row:
                r[[row, p]] = r[[p, row]]
            r[row] = (r[row] * pow(int(r[row, col]), -1, q)) % q
            factors = r[:, col].copy()
            factors[row] = 0
            hit = np.flatnonzero(factors)
            if hit.size:
                r[hit] = (r[hit] - np.outer(factors[hit], r[row])) % q
            pivots.append(col)
            row += 1
        return r, pivots

    def rank(self, m: np.ndarray) -> int:
        m = np.asarray(m)
        if m.size == 0:
            return 0
        # Eliminate along the shorter side; rank is transpose invariant.
        if m.shape[0] > m.shape[1]:
            m = m.T
        return len(self.rref(m)[1])

    def solve(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        """Return ``x`` with ``a @ x == b`` for square nonsingular ``a``."""
        a = np.array(a, dtype=np.int64, ndmin=2)
        b = np.asarray(b, dtype=np.int64)
        vector = b.ndim == 1
        if vector:
            b = b[:, None]
        n = a.shape[0]
        if a.shape != (n, n):
            raise DimensionMismatch(f"solve needs a square matrix, got {a.shape}")
        if b.shape[0] != n:
            raise DimensionMismatch(f"right-hand side has {b.shape[0]} rows, expected {n}")
        r, pivots = self.rref(np.hstack([a % self.q, b % self.q]))
        if pivots[:n] != list(range(n)):
            raise SingularMatrix(f"matrix of size {n} has rank {sum(p < n for p in pivots)}")
        x = r[:n, n:]
        return x[:, 0] if vector else x

    def inverse(self, a: np.ndarray) -> np.ndarray:
        a = np.asarray(a)
        return self.solve(a, self.identity(a.shape[0]))

    def is_nonsingular(self, a: np.ndarray) -> bool:
        a = np.asarray(a)
        return a.shape[0] == a.shape[1] and self.rank(a) == a.shape[0]


def _needs_object(data) -> bool:
    # Arbitrary Python ints (possibly huge or negative) are reduced exactly.
    try:
        return any(abs(int(x)) >= 2**62 for x in np.ravel(np.array(data, dtype=object)))
    except (TypeError, ValueError):
        return False
