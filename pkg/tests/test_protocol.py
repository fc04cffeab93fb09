import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from mwrc import _kernels
from mwrc.protocol import (
    MessageTuple,
    batch_recover,
    check_decodability,
    coefficient_matrix,
    decode_downlink,
    encode_downlink,
    format_transcripts,
    is_prime,
    parse_transcripts,
    random_window,
    rank_mod_q,
    recover_all,
    run_tuple,
    run_window,
    uplink_round,
    user_system_rank,
)
from mwrc.schedule import build_schedule


def brute_force_recover(L, q, pairs, sums, own_id, own_msg):
    """All message tuples consistent with the sums and the user's own message."""
    hits = []
    for w in itertools.product(range(q), repeat=L):
        if w[own_id - 1] != own_msg:
            continue
        if all((w[i - 1] + w[j - 1]) % q == s for (i, j), s in zip(pairs, sums)):
            hits.append(w)
    return hits


def test_is_prime():
    assert [n for n in range(30) if is_prime(n)] == [2, 3, 5, 7, 11, 13, 17, 19, 23, 29]


def test_message_tuple_validation():
    with pytest.raises(ValueError, match="prime"):
        MessageTuple(4, (1, 2, 3))
    with pytest.raises(ValueError):
        MessageTuple(5, (1, 5, 0))
    with pytest.raises(ValueError):
        MessageTuple(5, (1,))
    t = MessageTuple(5, (1, 2, 4))
    assert t[1] == 1 and t[3] == 4 and t.num_users == 3


def test_uplink_round_example():
    t = MessageTuple(5, (1, 2, 4))
    funcs = uplink_round(t, build_schedule(3), 1)
    assert [(f.block, f.pair, f.value) for f in funcs] == [(1, (1, 2), 3), (2, (2, 3), 1)]
    # brute-force oracle over the same pairs
    assert [(t[i] + t[j]) % 5 for i, j in [(1, 2), (2, 3)]] == [3, 1]


def test_uplink_round_zero_and_xor():
    assert all(f.value == 0 for f in uplink_round(MessageTuple(7, (0,) * 4), build_schedule(4), 2))
    assert [f.value for f in uplink_round(MessageTuple(2, (1, 1)), build_schedule(2), 1)] == [0]


def test_uplink_round_consumes_schedule():
    for L in range(2, 7):
        sched = build_schedule(L)
        for m in range(1, L + 1):
            t = MessageTuple(3, (0,) * L)
            assert tuple(f.pair for f in uplink_round(t, sched, m)) == sched.pairs(m)


def test_encode_downlink_examples():
    assert encode_downlink([3, 1], 5) == 8
    assert encode_downlink([0, 0, 0], 7) == 0
    with pytest.raises(ValueError):
        encode_downlink([5], 5)


def test_downlink_random_round_trip():
    rng = np.random.default_rng(0x5EED_0001)
    for _ in range(1000):
        q = int(rng.choice([2, 3, 5, 7, 11]))
        k = int(rng.integers(1, 8))
        x = [int(v) for v in rng.integers(0, q, size=k)]
        assert decode_downlink(encode_downlink(x, q), q, k) == x


@pytest.mark.parametrize("q,k", [(2, 10), (3, 5), (5, 5), (7, 4), (31, 4)])
def test_downlink_bijective_exhaustive(q, k):
    assert q**k <= 10**6
    seen = set()
    for x in itertools.product(range(q), repeat=k):
        U = encode_downlink(x, q)
        assert 0 <= U < q**k
        seen.add(U)
        assert tuple(decode_downlink(U, q, k)) == x
    assert len(seen) == q**k


def test_decode_downlink_range():
    with pytest.raises(ValueError):
        decode_downlink(25, 5, 2)


def test_recover_all_example():
    sched = build_schedule(3)
    U = encode_downlink([3, 1], 5)
    assert recover_all(1, 1, U, sched, 1, 5) == [2, 4]
    hits = brute_force_recover(3, 5, sched.pairs(1), [3, 1], 1, 1)
    assert hits == [(1, 2, 4)]


def test_recover_all_exhaustive_five_users_binary():
    sched = build_schedule(5)
    for w in itertools.product(range(2), repeat=5):
        t = MessageTuple(2, w)
        for m in range(1, 6):
            U = encode_downlink(uplink_round(t, sched, m), 2)
            for i in range(1, 6):
                rec = recover_all(i, w[i - 1], U, sched, m, 2)
                assert rec == [w[j] for j in range(5) if j != i - 1]


def test_recover_all_wrong_own_message_is_deterministic():
    sched = build_schedule(4)
    w = (1, 3, 0, 2)
    q = 5
    U = encode_downlink(uplink_round(MessageTuple(q, w), sched, 1), q)
    bad = recover_all(1, (w[0] + 1) % q, U, sched, 1, q)
    # path 1-2-3-4: the error alternates sign along the path
    assert bad == [(w[1] - 1) % q, (w[2] + 1) % q, (w[3] - 1) % q]
    assert bad == recover_all(1, (w[0] + 1) % q, U, sched, 1, q)


@settings(max_examples=200, deadline=None)
@given(
    L=st.integers(2, 8),
    q=st.sampled_from([2, 3, 5, 7, 13]),
    m=st.integers(1, 8),
    data=st.data(),
)
def test_recover_all_property(L, q, m, data):
    m = (m - 1) % L + 1
    w = tuple(data.draw(st.lists(st.integers(0, q - 1), min_size=L, max_size=L)))
    tr = run_tuple(MessageTuple(q, w), build_schedule(L), m)
    assert tr.success
    for i, rec in tr.per_user_recovered.items():
        assert rec == tuple(w[j] for j in range(L) if j != i - 1)


# -- windows ------------------------------------------------------------------


def test_run_window_seeded():
    seed = 0x0123_4567_89AB_CDEF
    res = run_window(random_window(4, 3, seed), 3, seed)
    assert res.success and res.seed == seed
    assert [t.tuple_index for t in res.transcripts] == [1, 2, 3, 4]
    for t in res.transcripts:
        assert t.seed == seed
        assert 0 <= t.downlink_index < 3**3
        assert tuple(f.pair for f in t.relay_functions) == build_schedule(4).pairs(t.tuple_index)


def test_run_window_two_users():
    res = run_window([MessageTuple(2, (1, 0)), MessageTuple(2, (1, 1))], 2)
    assert res.success
    assert [len(t.relay_functions) for t in res.transcripts] == [1, 1]


def test_run_window_many_seeds():
    ok = sum(run_window(random_window(6, 7, s), 7, s).success for s in range(100))
    assert ok == 100


def test_run_window_validation():
    a = MessageTuple(3, (0, 1, 2))
    b = MessageTuple(5, (0, 1, 2))
    with pytest.raises(ValueError, match="modulus"):
        run_window([a, b, a], 3)
    with pytest.raises(ValueError):
        run_window([a, a], 3)
    with pytest.raises(ValueError):
        run_window([], 3)
    with pytest.raises(ValueError):
        run_window([a, a, a], 4)


def test_transcript_detects_failure():
    tr = run_tuple(MessageTuple(5, (1, 2, 4)), build_schedule(3), 1)
    rec = dict(tr.per_user_recovered)
    rec[2] = (0, 0)
    broken = type(tr)(**{**tr.__dict__, "per_user_recovered": rec})
    assert tr.success and not broken.success


def test_transcript_text_round_trip():
    res = run_window(random_window(3, 5, 42), 5, 42)
    text = format_transcripts(res.transcripts)
    assert parse_transcripts(text) == list(res.transcripts)
    first = text.splitlines()[:4]
    assert first[0].startswith("T 1 5 42 ")
    assert first[1].startswith("B 1 1 1 2 ")
    assert first[3].startswith("U 1 ")


def test_transcript_golden_example():
    tr = run_tuple(MessageTuple(5, (1, 2, 4)), build_schedule(3), 1)
    assert format_transcripts([tr]) == (
        "T 1 5 - 1 2 4\n"
        "B 1 1 1 2 3\n"
        "B 1 2 2 3 1\n"
        "U 1 8\n"
        "R 1 1 2 4\n"
        "R 1 2 1 4\n"
        "R 1 3 1 2\n"
    )


def test_parse_rejects_garbage():
    with pytest.raises(ValueError):
        parse_transcripts("B 1 1 1 2 3\n")
    with pytest.raises(ValueError):
        parse_transcripts("T 1 5 - 1 2\nX 1\n")


# -- rank witnesses ----------------------------------------------------------


def test_rank_mod_q_basics():
    assert rank_mod_q(np.eye(3, dtype=int), 5) == 3
    assert rank_mod_q(np.array([[1, 1], [1, 1]]), 3) == 1
    # 2 == 0 mod 2
    assert rank_mod_q(np.array([[2, 0], [0, 1]]), 2) == 1


@pytest.mark.parametrize("L", range(2, 7))
@pytest.mark.parametrize("q", [2, 3, 5])
def test_rank_witness(L, q):
    sched = build_schedule(L)
    for m in range(1, L + 1):
        A = coefficient_matrix(sched, m)
        assert A.shape == (L - 1, L)
        assert rank_mod_q(A, q) == L - 1
        for u in range(1, L + 1):
            assert user_system_rank(sched, m, u, q) == L
        for drop in range(1, L):
            assert all(user_system_rank(sched, m, u, q, drop=drop) < L for u in range(1, L + 1))


# -- batch kernels ------------------------------------------------------------


@pytest.mark.parametrize("backend", sorted(_kernels.IMPLEMENTATIONS))
@pytest.mark.parametrize("L,q", [(2, 2), (3, 5), (5, 3), (6, 2)])
def test_batch_recover_exhaustive(backend, L, q):
    sched = build_schedule(L)
    msgs = np.array(list(itertools.product(range(q), repeat=L)))
    for m in range(1, L + 1):
        rec = batch_recover(msgs, sched, m, q, backend)
        assert rec.shape == (msgs.shape[0], L, L)
        assert np.array_equal(rec, np.broadcast_to(msgs[:, None, :], rec.shape))


def test_backends_agree_on_corrupted_input():
    if "numba" not in _kernels.IMPLEMENTATIONS:
        pytest.skip("numba not installed")
    rng = np.random.default_rng(7)
    msgs = rng.integers(0, 11, size=(500, 7))
    sums = rng.integers(0, 11, size=(500, 6))
    order = np.array([3, 4, 5, 6, 0, 1, 2])
    steps = np.arange(6)
    a = _kernels.recover(sums, msgs, order, steps, 11, "numpy")
    b = _kernels.recover(sums, msgs, order, steps, 11, "numba")
    assert np.array_equal(a, b)


def test_batch_matches_scalar_path():
    rng = np.random.default_rng(11)
    L, q = 5, 7
    sched = build_schedule(L)
    msgs = rng.integers(0, q, size=(50, L))
    for m in range(1, L + 1):
        rec = batch_recover(msgs, sched, m, q)
        for t, w in enumerate(msgs):
            U = encode_downlink(uplink_round(MessageTuple(q, tuple(w)), sched, m), q)
            for i in range(1, L + 1):
                scalar = recover_all(i, int(w[i - 1]), U, sched, m, q)
                assert scalar == [int(rec[t, i - 1, j]) for j in range(L) if j != i - 1]


def test_check_decodability_sampling_branch():
    rep = check_decodability(4, 5, max_exhaustive=10, samples=300, seed=3)
    assert not rep.exhaustive and rep.trials == 300 and rep.success
