import numpy as np
from hypothesis import given, settings, strategies as st

from hsecagg.field import PrimeField
from hsecagg.params import SystemParams
from hsecagg.views import Conditioned, Layout, LinearView, cond_mi, entropy

from oracles import distributional_mi


def view(m):
    m = np.asarray(m, dtype=np.int64)
    return LinearView(m, [f"r{i}" for i in range(m.shape[0])])


def random_triple(rng, q, n):
    rows = rng.integers(0, 4, size=3)
    return [view(rng.integers(0, q, size=(r, n))) for r in rows]


def test_rank_mi_matches_distribution_oracle():
    rng = np.random.default_rng(2024)
    for i in range(120):
        q = (2, 3)[i % 2]
        n = int(rng.integers(1, 8 if q == 2 else 7))
        a, b, c = random_triple(rng, q, n)
        got = cond_mi(PrimeField(q), a, b, c)
        want = distributional_mi(q, a.matrix, b.matrix, c.matrix)
        assert abs(got - want) < 1e-9, (q, a.matrix, b.matrix, c.matrix)


def test_textbook_cases():
    f = PrimeField(5)
    a = view([[1, 2, 0, 0], [0, 1, 0, 0]])
    assert cond_mi(f, a, view(a.matrix.copy())) == entropy(f, a) == 2
    assert cond_mi(f, a, view([[0, 0, 1, 4]])) == 0
    # conditioning on the difference makes two copies fully dependent
    x, y = view([[1, 0, 0, 0]]), view([[0, 1, 0, 0]])
    assert cond_mi(f, x, y) == 0
    assert cond_mi(f, x, y, view([[1, 4, 0, 0]])) == 1


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**32), st.sampled_from([2, 3, 5, 7]))
def test_mi_properties(seed, q):
    f = PrimeField(q)
    rng = np.random.default_rng(seed)
    a, b, c = random_triple(rng, q, 6)
    mi = cond_mi(f, a, b, c)
    assert mi >= 0
    assert mi == cond_mi(f, b, a, c)
    if a.rows:
        scale = rng.integers(1, q, size=(a.rows, 1))
        perm = rng.permutation(a.rows)
        assert cond_mi(f, view(a.matrix[perm] * scale[perm] % q), b, c) == mi
    if c.rows:
        assert cond_mi(f, a, b, view(c.matrix[::-1])) == mi


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**32))
def test_conditioned_fast_path_equals_rank_formula(seed):
    p = SystemParams(2, 2, 2, 1, 1, q=7)
    lay = Layout(p)
    f = p.field
    rng = np.random.default_rng(seed)
    n = lay.ncols
    v = view(rng.integers(0, 7, size=(int(rng.integers(0, 5)), n)))
    c = view(rng.integers(0, 7, size=(int(rng.integers(0, 5)), n)) * (rng.random(n) < 0.5))
    w = view(np.eye(n, dtype=np.int64)[lay.w_block])
    assert Conditioned(f, lay, c).leakage(v) == cond_mi(f, v, w, c)


def test_layout_column_count():
    p = SystemParams(3, 3, 2, 2, 2, q=11)
    lay = Layout(p)
    assert lay.ncols == 9 * 2 + 9 * 2 + 9 * 2
    assert lay.w((1, 1)) == slice(0, 2) and lay.n((1, 1)) == slice(18, 20)
    assert lay.s((3, 3)) == slice(36 + 16, 36 + 18)
