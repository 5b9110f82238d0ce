import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from hsecagg.errors import DimensionMismatch, InvalidOperand, SingularMatrix
from hsecagg.field import PrimeField

from oracles import rowspace_rank


def test_scalar_examples():
    f5, f7 = PrimeField(5), PrimeField(7)
    assert f5.add(3, 4) == 2
    assert f5.arith(1, 2, "inv-div") == 3
    assert f5.div(1, 2) == 3
    assert f7.mul(4, 5) == 6


def test_rejects_composite_and_huge_moduli():
    for q in (1, 4, 9, 2**31 + 11):
        with pytest.raises(ValueError):
            PrimeField(q)


def test_inverse_of_zero_raises():
    with pytest.raises(InvalidOperand):
        PrimeField(7).inv(0)
    with pytest.raises(ZeroDivisionError):
        PrimeField(7).div(3, 0)


@given(st.sampled_from([2, 3, 5, 7, 11, 101, 2**31 - 1]), st.integers(0, 2**40), st.integers(0, 2**40))
def test_field_axioms(q, a, b):
    f = PrimeField(q)
    a, b = f(a), f(b)
    assert f.sub(f.add(a, b), b) == a
    assert f.mul(a, b) == f.mul(b, a)
    if a:
        assert f.mul(a, f.inv(a)) == 1


def test_rank_examples():
    f = PrimeField(5)
    assert f.rank(f.identity(3)) == 3
    assert f.rank(f.matrix([[1, 2], [2, 4]])) == 1
    assert f.rank(f.zeros(0, 4)) == 0


def test_rank_matches_rowspace_oracle():
    f = PrimeField(3)
    rng = np.random.default_rng(11)
    for _ in range(20):
        m = f.random((6, 9), rng)
        assert f.rank(m) == rowspace_rank(3, m)
    # sparse low-rank cases too
    for _ in range(10):
        m = f.matmul(f.random((6, 2), rng), f.random((2, 9), rng))
        assert f.rank(m) == rowspace_rank(3, m)


@settings(max_examples=50)
@given(st.integers(0, 10**6))
def test_rank_invariances(seed):
    f = PrimeField(7)
    rng = np.random.default_rng(seed)
    a, b = f.random((4, 6), rng), f.random((3, 6), rng)
    r = f.rank(a)
    assert r <= 4
    assert f.rank(a[::-1]) == r
    assert f.rank(a * np.array([[3], [1], [6], [2]]) % 7) == r
    assert f.rank(a.T) == r
    rab = f.rank(np.vstack([a, b]))
    assert max(r, f.rank(b)) <= rab <= r + f.rank(b)


def test_solve_examples():
    f = PrimeField(5)
    x = f.solve(f.matrix([[1, 1], [1, 2]]), f.matrix([[3], [4]]))
    assert x.tolist() == [[2], [1]]
    b = f.array([4, 0, 3])
    assert f.solve(f.identity(3), b).tolist() == b.tolist()


def test_solve_round_trip():
    f = PrimeField(11)
    rng = np.random.default_rng(5)
    while True:
        a = f.random((4, 4), rng)
        if f.is_nonsingular(a):
            break
    for _ in range(100):
        b = f.random(4, rng)
        assert np.array_equal(f.matmul(a, f.solve(a, b)), b)
    assert np.array_equal(f.matmul(a, f.inverse(a)), f.identity(4))


def test_solve_errors():
    f = PrimeField(5)
    with pytest.raises(SingularMatrix):
        f.solve(f.matrix([[1, 2], [2, 4]]), f.array([1, 1]))
    with pytest.raises(DimensionMismatch):
        f.solve(f.identity(2), f.array([1, 2, 3]))


def test_matmul_does_not_overflow_near_max_modulus():
    q = 2**31 - 1
    f = PrimeField(q)
    a = np.full((3, 64), q - 1, dtype=np.int64)
    b = np.full((64, 2), q - 1, dtype=np.int64)
    assert f.matmul(a, b).tolist() == [[64 % q] * 2] * 3
