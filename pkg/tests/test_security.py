import numpy as np
import pytest

from hsecagg.dropout import DropoutPattern, enumerate_patterns, full_survival, sample_many
from hsecagg.keys import deal
from hsecagg.mds import MdsMatrix, build_candidate, is_certified
from hsecagg.params import SystemParams
from hsecagg.protocol import run_session, sample_inputs
from hsecagg.security import (check_lemma2, check_relay_security, check_server_security,
                              nested_triples, nested_sum_views, selections, sweep_security,
                              view_relay, view_server)
from hsecagg.views import Layout, RowBuilder, cond_mi

from oracles import distributional_mi


def stacked(p, km, W):
    return Layout(p).stack(W, km.N, km.S)


def test_example1_full_survival(ex1):
    p, m = ex1
    full = full_survival(p)
    assert check_relay_security(p, m, full, 1) == 0
    assert check_server_security(p, m, full, ()) == 0
    v, c, w = view_server(p, m, full)
    assert c.rows == p.L
    # the conditioning rows are the all-user sum
    want = np.zeros_like(c.matrix)
    for x in p.users():
        want[:, Layout(p).w(x)] += np.eye(p.L, dtype=np.int64)
    assert np.array_equal(c.matrix, want)


def test_example2_worked_cases(ex2):
    p, m = ex2
    full = full_survival(p)
    cset = ((1, 1), (2, 1))
    v, c, _ = view_relay(p, m, full, 1, cset)
    assert v.rows == 3 * p.L + 3
    assert check_relay_security(p, m, full, 1, cset) == 0
    assert check_server_security(p, m, full, cset) == 0


def test_view_row_census(ex2):
    p, m = ex2
    for pat in sample_many(p, 50, 1):
        chosen = selections(p, pat)
        for u in range(1, p.U + 1):
            v, _, _ = view_relay(p, m, pat, u)
            in_u1 = pat.U1 >> (u - 1) & 1
            assert v.rows == p.V * p.L + (len(pat.v1(u)) if in_u1 else 0)
        v, _, _ = view_server(p, m, pat, chosen=chosen)
        assert v.rows == p.U * p.L + p.V0 * len(chosen)


def test_views_replay_transcripts(ex2):
    p, m = ex2
    km = deal(p, m, 3)
    for i, pat in enumerate(sample_many(p, 40, 3)):
        W = sample_inputs(p, 3, (i,))
        tr = run_session(p, km, W, pat)
        x = stacked(p, km, W)
        for u in range(1, p.U + 1):
            v, _, _ = view_relay(p, m, pat, u)
            want = [s for y in p.cluster(u) for s in tr.X1[y]]
            if pat.U1 >> (u - 1) & 1:
                want += [tr.X2[y] for y in pat.v1(u)]
            assert v.apply(p.field, x).tolist() == want
        v, c, _ = view_server(p, m, pat, chosen=tr.Q)
        want = [s for u in range(1, p.U + 1) for s in tr.Y1[u]]
        want += [s for u in sorted(tr.Y2) for _, s in tr.Y2[u]]
        assert v.apply(p.field, x).tolist() == want
        assert c.apply(p.field, x).tolist() == tr.decoded.tolist()


def test_unmasked_control_leaks(ex1):
    p, m = ex1
    assert check_relay_security(p, m, full_survival(p), 1, masked=False) > 0
    assert check_server_security(p, m, full_survival(p), masked=False) > 0


def test_non_private_matrix_leaks(ex2):
    p, m = ex2
    alpha = m.alpha.copy()
    alpha[-1] = alpha[-2]
    bad = MdsMatrix(p, alpha)
    assert not is_certified(bad)
    rep = sweep_security(p, bad, [(0, full_survival(p))], relays=False)
    assert not rep.passed


def test_sweep_example1_all_zero(ex1):
    p, m = ex1
    rep = sweep_security(p, m, enumerate(enumerate_patterns(p)))
    assert rep.passed and rep.count("relay") == 50 and rep.count("server") == 25


def test_strict_mode_changes_nothing_here(ex2):
    p, m = ex2
    pats = list(enumerate(sample_many(p, 20, 4)))
    a = sweep_security(p, m, pats, server=False, colluder_cap=20)
    b = sweep_security(p, m, pats, server=False, colluder_cap=20, strict=True)
    assert [r.mi for r in a.records] == [r.mi for r in b.records]


def test_record_line_format(ex1):
    p, m = ex1
    rep = sweep_security(p, m, [(7, full_survival(p))])
    assert rep.records[0].line() == "kind=relay pattern=7 relay=1 colluders=[] mi=0 pass=true"
    assert rep.records[-1].line() == "kind=server pattern=7 relay=- colluders=[] mi=0 pass=true"


def test_too_many_colluders(ex1):
    p, m = ex1
    with pytest.raises(ValueError):
        view_relay(p, m, full_survival(p), 1, ((1, 1),))


def test_relay_leak_mechanism_example2(ex2):
    """Relay 1 plus colluders (2,1),(2,2) span W(1,1) + W(1,2).

    With S1 = clusters 1 and 2, the relay's two round-2 symbols and the two
    colluders' own-column scalars give four independent projections of the
    aggregated keys, which pins down the aggregated mask.
    """
    p, m = ex2
    pat = DropoutPattern(0b011, 0b011, (0b011, 0b011, 0b011), (0b011, 0b011, 0))
    cset = ((2, 1), (2, 2))
    assert check_relay_security(p, m, pat, 1, cset) == p.L
    v, c, _ = view_relay(p, m, pat, 1, cset)
    rb = RowBuilder(p, m.alpha)
    target = (rb.w((1, 1)).matrix + rb.w((1, 2)).matrix) % p.q
    f = p.field
    known = np.vstack([v.matrix, c.matrix])
    assert f.rank(np.vstack([known, target])) == f.rank(known)


def test_relay_leak_confirmed_by_distribution_oracle():
    # smallest shape with (U0-1)*V0 <= T: two single-user relays, one colluder
    p = SystemParams(2, 1, 2, 1, 1, q=3)
    m = build_candidate(p)
    assert is_certified(m)
    v, c, w = view_relay(p, m, full_survival(p), 1, ((2, 1),))
    got = cond_mi(p.field, v, w, c)
    assert got == 1
    assert abs(distributional_mi(3, v.matrix, w.matrix, c.matrix) - got) < 1e-9


def test_nested_triples_and_example2(ex2):
    p, m = ex2
    triples = list(nested_triples(p))
    assert ((1, 2, 3), (2, 2, 2)) in triples
    assert len(triples) == 4 * 10
    assert all(e.mi == 0 for e in check_lemma2(p, m))


@pytest.mark.parametrize("shape", [(2, 2, 1, 1, 0), (3, 1, 1, 1, 0)])
def test_nested_sums_against_distribution_oracle(shape):
    p = SystemParams(*shape, q=3)
    alpha = np.random.default_rng(0).integers(1, 3, size=(p.decode_size, p.num_users))
    for users, per_relay in nested_triples(p):
        a, b = nested_sum_views(p, alpha, users, per_relay)
        got = cond_mi(p.field, a, b)
        assert got == 0
        assert abs(distributional_mi(3, a.matrix, b.matrix) - got) < 1e-9
