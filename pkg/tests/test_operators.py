import itertools
import warnings

import pytest
from hypothesis import given, strategies as st

from focusst.errors import InvalidArgument, InvalidGranularity, TypeMismatch
from focusst.operators import (RaggedJoinWarning, SplitPolicy, filter_stream, join, join_checked,
                               split, timestamp)
from focusst.props import timestamp_oracle
from focusst.stream import BIT, NAT, Message, TimedStreamPrefix, msg_holds

A, B, C = 1, 2, 3
policies = st.sampled_from(list(SplitPolicy))
bit_streams = st.lists(st.lists(st.integers(0, 1), max_size=4).map(tuple), max_size=8)


def P(*ivs, typ=NAT):
    return TimedStreamPrefix(typ, tuple(tuple(iv) for iv in ivs))


def all_streams(length, max_msgs, alphabet=(0, 1)):
    ivs = [iv for m in range(max_msgs + 1) for iv in itertools.product(alphabet, repeat=m)]
    for n in range(length + 1):
        yield from itertools.product(ivs, repeat=n)


class TestSplit:
    def test_first(self):
        assert split(P((A, B)), 2, SplitPolicy.FIRST) == P((A, B), ())

    def test_last(self):
        assert split(P((A, B)), 2, SplitPolicy.LAST) == P((), (A, B))

    def test_distribute(self):
        assert split(P((A, B, C)), 2, SplitPolicy.DISTRIBUTE) == P((A,), (B, C))
        assert split(P((A,)), 3, "distribute") == P((A,), (), ())

    @pytest.mark.parametrize("policy", list(SplitPolicy))
    def test_identity(self, policy):
        s = P((A, B), (), (C,))
        assert split(s, 1, policy) == s

    def test_bad_factor(self):
        with pytest.raises(InvalidGranularity):
            split(P((A,)), 0)

    @given(bit_streams, st.integers(1, 5))
    def test_distribute_placement_oracle(self, ivs, n):
        # recount: message i of each source interval lands in sub-interval min(i, n-1)
        out = split(P(*ivs, typ=BIT), n, SplitPolicy.DISTRIBUTE).intervals
        for t, iv in enumerate(ivs):
            block = out[t * n:(t + 1) * n]
            expected = [[] for _ in range(n)]
            for i, v in enumerate(iv):
                expected[min(i, n - 1)].append(v)
            assert [list(b) for b in block] == expected

    @given(bit_streams, st.integers(1, 5), policies)
    def test_order_and_length(self, ivs, n, p):
        s = P(*ivs, typ=BIT)
        out = split(s, n, p)
        assert len(out) == n * len(s)
        assert out.flatten() == s.flatten()

    @given(bit_streams, st.integers(1, 5))
    def test_distribute_never_grows(self, ivs, n):
        s = P(*ivs, typ=BIT)
        k = max(map(len, ivs), default=0)
        assert msg_holds(split(s, n, SplitPolicy.DISTRIBUTE), k)


class TestJoin:
    def test_concat(self):
        assert join(P((A,), (B, C)), 2) == P((A, B, C))

    def test_empties(self):
        assert join(P((), ()), 2) == P(())

    def test_ragged_warns(self):
        with pytest.warns(RaggedJoinWarning):
            out = join(P((A,), (B,), (C,)), 2)
        assert out == P((A, B), (C,))
        assert join_checked(P((A,), (B,), (C,)), 2)[1] is True

    def test_exact_does_not_warn(self):
        with warnings.catch_warnings():
            warnings.simplefilter("error")
            join(P((A,), (B,)), 2)

    def test_bad_factor(self):
        with pytest.raises(InvalidGranularity):
            join(P(), 0)

    @given(bit_streams, st.integers(1, 5), policies)
    def test_round_trip(self, ivs, n, p):
        s = P(*ivs, typ=BIT)
        assert join(split(s, n, p), n) == s


class TestTimestamp:
    def test_examples(self):
        s = P((), (A,), (B, C))
        assert timestamp(s, 1) == 1
        assert timestamp(s, 3) == 2
        assert timestamp(P(()), 1) is None

    def test_k_counts_from_one(self):
        with pytest.raises(InvalidArgument):
            timestamp(P((A,)), 0)

    def test_exhaustive_small(self):
        n = 0
        for ivs in all_streams(4, 2):
            s = P(*ivs, typ=BIT)
            for k in range(1, 10):
                assert timestamp(s, k) == timestamp_oracle(ivs, k)
            n += 1
        assert n == sum(7 ** L for L in range(5))

    def test_exhaustive_length_patterns(self):
        # timestamp ignores payloads, so every interval-size pattern covers all payloads
        for L in range(9):
            for sizes in itertools.product(range(4), repeat=L):
                ivs = tuple((0,) * m for m in sizes)
                s = P(*ivs, typ=BIT)
                for k in range(1, sum(sizes) + 2):
                    assert timestamp(s, k) == timestamp_oracle(ivs, k)

    @given(st.lists(st.lists(st.integers(0, 1), max_size=3).map(tuple), max_size=8))
    def test_payload_independent(self, ivs):
        # licenses the size-pattern enumeration above as a full exhaustive check
        zeroed = tuple((0,) * len(iv) for iv in ivs)
        a, b = P(*ivs, typ=BIT), P(*zeroed, typ=BIT)
        assert all(timestamp(a, k) == timestamp(b, k) for k in range(1, 26))

    @given(bit_streams)
    def test_monotone(self, ivs):
        s = P(*ivs, typ=BIT)
        stamps = [timestamp(s, k) for k in range(1, len(s.flatten()) + 1)]
        assert stamps == sorted(stamps)


class TestFilter:
    def test_example(self):
        assert filter_stream([Message(BIT, 1)], P((1, 0, 1), typ=BIT)) == P((1, 1), typ=BIT)

    def test_empty_set(self):
        assert filter_stream([], P((1, 0), (1,), typ=BIT)) == P((), (), typ=BIT)

    def test_full_set(self):
        s = P((1, 0), (), (0,), typ=BIT)
        assert filter_stream([Message(BIT, 0), Message(BIT, 1)], s) == s

    def test_type_checked(self):
        with pytest.raises(TypeMismatch):
            filter_stream([Message(NAT, 1)], P((1,), typ=BIT))

    @given(bit_streams, st.sets(st.integers(0, 1)))
    def test_idempotent(self, ivs, M):
        M = [Message(BIT, v) for v in M]
        once = filter_stream(M, P(*ivs, typ=BIT))
        assert filter_stream(M, once) == once

    @given(bit_streams, st.sets(st.integers(0, 1)), st.integers(1, 4))
    def test_commutes_with_join(self, ivs, M, n):
        M = [Message(BIT, v) for v in M]
        s = P(*ivs, typ=BIT)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", RaggedJoinWarning)
            assert filter_stream(M, join(s, n)) == join(filter_stream(M, s), n)
