import json

import pytest
from hypothesis import given, strategies as st

from focusst.errors import EmptyIntervalError, IntervalIndexError, TypeMismatch
from focusst.runtime import ChannelGenerator
from focusst.stream import (
    BIT, BOOL, NAT, ConstGenerator, CycleGenerator, EnumType, FunctionGenerator, ListType,
    Message, RecordType, RecordValue, TimedStreamPrefix, TimeInterval, UniformGenerator, Variant,
    first_message, first_violation, interval_at, msg_holds, prefix_from_json, prefix_to_json,
    truncate, ts_holds,
)

PUMP = EnumType("WaterPumpState", ("PumpOn", "PumpOff"))
SHAPE = RecordType("Shape", (Variant("Circle", (("r", NAT),)),
                             Variant("Rect", (("w", NAT), ("h", NAT))), Variant("Empty", ())))


def P(*ivs, typ=NAT):
    return TimedStreamPrefix(typ, tuple(tuple(iv) for iv in ivs))


streams = st.lists(st.lists(st.integers(0, 3), max_size=4).map(tuple), max_size=8).map(
    lambda ivs: TimedStreamPrefix(NAT, tuple(ivs)))


class TestTypes:
    def test_enum_constructors_distinct(self):
        with pytest.raises(TypeMismatch):
            EnumType("E", ("A", "A"))

    def test_record_constructors_and_selectors_distinct(self):
        with pytest.raises(TypeMismatch):
            RecordType("R", (Variant("A", ()), Variant("A", ())))
        with pytest.raises(TypeMismatch):
            RecordType("R", (Variant("A", (("x", NAT), ("x", BIT))),))

    def test_bit_payload(self):
        Message(BIT, 1)
        with pytest.raises(TypeMismatch):
            Message(BIT, 2)
        with pytest.raises(TypeMismatch):
            Message(NAT, True)

    def test_enum_and_record_tags(self):
        assert Message(PUMP, "PumpOff").value == "PumpOff"
        with pytest.raises(TypeMismatch):
            Message(PUMP, "PumpOnn")
        Message(SHAPE, RecordValue("Rect", (2, 3)))
        with pytest.raises(TypeMismatch):
            Message(SHAPE, RecordValue("Rect", (2,)))
        with pytest.raises(TypeMismatch):
            Message(SHAPE, RecordValue("Square", (2,)))

    def test_list_type(self):
        Message(ListType(BIT), (0, 1, 1))
        with pytest.raises(TypeMismatch):
            Message(ListType(BIT), (0, 2))


class TestPrefix:
    def test_heterogeneous_interval_rejected(self):
        with pytest.raises(TypeMismatch):
            P((1, "x"))
        with pytest.raises(TypeMismatch):
            P((1, 2), typ=BIT)
        with pytest.raises(TypeMismatch):
            TimedStreamPrefix(NAT, ([1],))

    def test_time_interval_of_messages(self):
        iv = TimeInterval.of([Message(NAT, 3), Message(NAT, 9)])
        assert iv.values == (3, 9) and len(iv) == 2
        with pytest.raises(TypeMismatch):
            TimeInterval.of([Message(NAT, 3), Message(BIT, 1)])

    def test_interval_at(self):
        s = P((), (1,))
        assert interval_at(s, 0).values == ()
        assert interval_at(s, 1).values == (1,)
        with pytest.raises(IntervalIndexError):
            interval_at(s, 2)

    def test_interval_at_boiler_step0(self, boiler_rules):
        from focusst.runtime import run
        trace = run(boiler_rules, 3, seed=5)
        assert interval_at(trace.channels["boiler.waterLevel"], 0).values == (500,)

    def test_msg_holds(self):
        assert msg_holds(P((), (1,)), 1)
        assert not msg_holds(P((1, 0)), 1)
        assert msg_holds(P(), 0)

    def test_ts_holds(self):
        assert ts_holds(P((5,), (7,)))
        s = P((5,), ())
        assert not ts_holds(s) and msg_holds(s, 1)
        assert not ts_holds(P((5, 6)))

    def test_first_violation(self):
        assert first_violation(P((5,), (7,))) is None
        assert first_violation(P((5,), (), (1,))) == 1
        assert first_violation(P((5,), (1, 2), (1, 2, 3)), 2) == 2
        assert first_violation(P(), 0) is None

    def test_first_message(self):
        assert first_message(TimeInterval(NAT, (500,))) == Message(NAT, 500)
        assert first_message((3, 9)) == 3
        with pytest.raises(EmptyIntervalError):
            first_message(TimeInterval(NAT, ()))
        with pytest.raises(EmptyIntervalError):
            first_message(())

    @given(streams)
    def test_ts_implies_msg1(self, s):
        assert not ts_holds(s) or msg_holds(s, 1)

    @given(streams, st.integers(0, 5), st.integers(0, 5))
    def test_msg_monotone_in_k(self, s, k1, k2):
        k1, k2 = min(k1, k2), max(k1, k2)
        assert not msg_holds(s, k1) or msg_holds(s, k2)


class TestGenerators:
    def test_truncate_const(self):
        assert truncate(ConstGenerator(NAT, (1,)), 3).intervals == ((1,), (1,), (1,))

    def test_truncate_zero(self):
        assert truncate(CycleGenerator(NAT, ((1,), ())), 0).intervals == ()

    def test_truncate_boiler_level(self, boiler_rules):
        g = ChannelGenerator(boiler_rules, "boiler.waterLevel", seed=3)
        assert truncate(g, 1).intervals == ((500,),)

    @given(st.integers(0, 30), st.integers(0, 30), st.integers(0, 1000))
    def test_prefix_coherence(self, n1, n2, seed):
        n1, n2 = min(n1, n2), max(n1, n2)
        g = UniformGenerator(NAT, 0, 9, "x", seed)
        long = truncate(g, n2)
        assert truncate(g, n1).intervals == long.intervals[:n1]
        assert all(interval_at(long, t).values == g.produce(t) for t in range(n2))

    def test_uniform_seeded(self):
        a = [UniformGenerator(NAT, 0, 100, "s", 1).produce(t) for t in range(50)]
        b = [UniformGenerator(NAT, 0, 100, "s").with_seed(1).produce(t) for t in range(50)]
        c = [UniformGenerator(NAT, 0, 100, "s", 2).produce(t) for t in range(50)]
        assert a == b and a != c
        assert all(0 <= iv[0] <= 100 for iv in a)

    def test_channel_generator_matches_run(self, boiler_rules):
        from focusst.runtime import run
        g = ChannelGenerator(boiler_rules, "converter.controlSignalTS", seed=9)
        trace = run(boiler_rules, 40, seed=9)
        assert truncate(g, 40) == trace.channels["converter.controlSignalTS"]

    def test_function_generator_checks_type(self):
        g = FunctionGenerator(BIT, lambda t: [t % 3])
        assert g.produce(1) == (1,)
        with pytest.raises(TypeMismatch):
            g.produce(2)


class TestJson:
    def test_scalar_layout(self):
        s = P((), (1, 2))
        assert json.dumps(prefix_to_json(s)) == "[[], [1, 2]]"

    def test_record_layout(self):
        s = TimedStreamPrefix(SHAPE, ((RecordValue("Rect", (2, 3)),), (RecordValue("Empty", ()),)))
        data = prefix_to_json(s)
        assert data == [[{"con": "Rect", "w": 2, "h": 3}], [{"con": "Empty"}]]
        assert prefix_from_json(SHAPE, json.loads(json.dumps(data))) == s

    @given(st.lists(st.lists(st.sampled_from(["PumpOn", "PumpOff"]), max_size=3).map(tuple),
                    max_size=6))
    def test_enum_round_trip(self, ivs):
        s = TimedStreamPrefix(PUMP, tuple(ivs))
        assert prefix_from_json(PUMP, json.loads(json.dumps(prefix_to_json(s)))) == s

    @given(st.lists(st.lists(st.lists(st.integers(0, 1), max_size=3).map(tuple),
                             max_size=3).map(tuple), max_size=4))
    def test_list_round_trip(self, ivs):
        typ = ListType(BIT)
        s = TimedStreamPrefix(typ, tuple(ivs))
        assert prefix_from_json(typ, json.loads(json.dumps(prefix_to_json(s)))) == s

    def test_bad_payload(self):
        with pytest.raises(TypeMismatch):
            prefix_from_json(BIT, [[2]])
        with pytest.raises(TypeMismatch):
            prefix_from_json(BOOL, [[1]])
