"""Messages, time intervals and finite timed-stream prefixes.

Payloads are stored as plain Python values so that the runtime can move them
around cheaply:

========== ==========================================
Nat        ``int`` >= 0
Bit        ``int`` 0 or 1
Bool       ``bool``
Enum       ``str`` (the constructor name)
List       ``tuple`` of element payloads
Record     :class:`RecordValue`
========== ==========================================

A time interval is a tuple of payloads; a prefix is a tuple of intervals.
:class:`Message` and :class:`TimeInterval` wrap payloads together with their
type at the API boundary.
"""
from __future__ import annotations

from dataclasses import dataclass
from itertools import chain
from typing import Any, Callable, Iterable, Iterator, Sequence

from .errors import EmptyIntervalError, IntervalIndexError, TypeMismatch


class MessageType:
    """Base class of all message types."""

    def conforms(self, value: Any) -> bool:
        raise NotImplementedError

    def describe(self) -> str:
        raise NotImplementedError

    def __str__(self):
        return self.describe()


@dataclass(frozen=True)
class NatType(MessageType):
    def conforms(self, value):
        return type(value) is int and value >= 0

    def describe(self):
        return "Nat"


@dataclass(frozen=True)
class BitType(MessageType):
    def conforms(self, value):
        return type(value) is int and (value == 0 or value == 1)

    def describe(self):
        return "Bit"


@dataclass(frozen=True)
class BoolType(MessageType):
    def conforms(self, value):
        return type(value) is bool

    def describe(self):
        return "Bool"


@dataclass(frozen=True)
class EnumType(MessageType):
    name: str
    constructors: tuple[str, ...]

    def __post_init__(self):
        if len(set(self.constructors)) != len(self.constructors):
            raise TypeMismatch(f"enumeration {self.name} has duplicate constructors")
        if not self.constructors:
            raise TypeMismatch(f"enumeration {self.name} has no constructors")

    def conforms(self, value):
        return type(value) is str and value in self.constructors

    def describe(self):
        return self.name


@dataclass(frozen=True)
class ListType(MessageType):
    element: MessageType

    def conforms(self, value):
        return type(value) is tuple and all(self.element.conforms(v) for v in value)

    def describe(self):
        # element is None only for the empty literal <> during type checking
        return "<>" if self.element is None else f"<{self.element.describe()}>"


@dataclass(frozen=True)
class Variant:
    constructor: str
    selectors: tuple[tuple[str, MessageType], ...] = ()

    def selector_type(self, name):
        for sel, typ in self.selectors:
            if sel == name:
                return typ
        return None


@dataclass(frozen=True)
class RecordType(MessageType):
    name: str
    variants: tuple[Variant, ...]

    def __post_init__(self):
        cons = [v.constructor for v in self.variants]
        if len(set(cons)) != len(cons):
            raise TypeMismatch(f"record {self.name} has duplicate constructors")
        for v in self.variants:
            sels = [s for s, _ in v.selectors]
            if len(set(sels)) != len(sels):
                raise TypeMismatch(
                    f"record {self.name}: duplicate selectors in {v.constructor}")

    def variant(self, constructor):
        for v in self.variants:
            if v.constructor == constructor:
                return v
        return None

    def conforms(self, value):
        if type(value) is not RecordValue:
            return False
        v = self.variant(value.con)
        if v is None or len(v.selectors) != len(value.fields):
            return False
        return all(typ.conforms(x) for (_, typ), x in zip(v.selectors, value.fields))

    def describe(self):
        return self.name


NAT = NatType()
BIT = BitType()
BOOL = BoolType()


@dataclass(frozen=True)
class RecordValue:
    """Payload of a record message: constructor tag plus positional fields."""
    con: str
    fields: tuple = ()


@dataclass(frozen=True)
class Message:
    type: MessageType
    value: Any

    def __post_init__(self):
        if not self.type.conforms(self.value):
            raise TypeMismatch(f"{self.value!r} is not a value of type {self.type}")

    def __str__(self):
        return format_value(self.value)


@dataclass(frozen=True)
class TimeInterval:
    """The messages transmitted on one channel during one time unit."""
    type: MessageType
    values: tuple = ()

    def __post_init__(self):
        if not all(self.type.conforms(v) for v in self.values):
            raise TypeMismatch(f"interval {self.values!r} is not homogeneous of type {self.type}")

    @classmethod
    def of(cls, messages: Sequence[Message], type: MessageType | None = None):
        if type is None:
            if not messages:
                raise TypeMismatch("cannot infer the type of an empty interval")
            type = messages[0].type
        for m in messages:
            if m.type != type:
                raise TypeMismatch(f"message {m} has type {m.type}, expected {type}")
        return cls(type, tuple(m.value for m in messages))

    @property
    def messages(self) -> tuple[Message, ...]:
        return tuple(Message(self.type, v) for v in self.values)

    def __len__(self):
        return len(self.values)

    def __iter__(self):
        return iter(self.values)

    def __str__(self):
        return "<" + ", ".join(format_value(v) for v in self.values) + ">"


def _validator(typ: MessageType) -> Callable[[Any], bool]:
    # specialised checks for the common scalar channels; runtime traces are long
    if isinstance(typ, NatType):
        return lambda v: type(v) is int and v >= 0
    if isinstance(typ, BitType):
        return lambda v: type(v) is int and (v == 0 or v == 1)
    return typ.conforms


def _fast_conforms(typ, intervals) -> bool:
    # bulk check done in C; False only means "look closer", not "invalid"
    if not set(map(type, intervals)) <= {tuple}:
        return False
    flat = list(chain.from_iterable(intervals))
    if not flat:
        return True
    if isinstance(typ, (NatType, BitType)):
        if not set(map(type, flat)) <= {int} or min(flat) < 0:
            return False
        return isinstance(typ, NatType) or max(flat) <= 1
    if isinstance(typ, EnumType):
        return set(map(type, flat)) <= {str} and set(flat) <= set(typ.constructors)
    return False


@dataclass(frozen=True)
class TimedStreamPrefix:
    """The first ``len(intervals)`` time intervals of a timed stream."""
    element_type: MessageType
    intervals: tuple = ()

    def __post_init__(self):
        if _fast_conforms(self.element_type, self.intervals):
            return
        ok = _validator(self.element_type)
        for t, iv in enumerate(self.intervals):
            if type(iv) is not tuple:
                raise TypeMismatch(f"interval {t} must be a tuple, got {type(iv).__name__}")
            for v in iv:
                if not ok(v):
                    raise TypeMismatch(
                        f"interval {t}: {v!r} is not a value of type {self.element_type}")

    @classmethod
    def from_lists(cls, element_type: MessageType, intervals: Iterable[Iterable[Any]]):
        return cls(element_type, tuple(tuple(iv) for iv in intervals))

    def __len__(self):
        return len(self.intervals)

    def __iter__(self) -> Iterator[TimeInterval]:
        return (TimeInterval(self.element_type, iv) for iv in self.intervals)

    def flatten(self) -> tuple:
        return tuple(v for iv in self.intervals for v in iv)

    def with_intervals(self, intervals) -> "TimedStreamPrefix":
        return TimedStreamPrefix(self.element_type, tuple(intervals))

    def __str__(self):
        return "<" + ", ".join(
            "<" + ", ".join(format_value(v) for v in iv) + ">" for iv in self.intervals) + ">"


def interval_at(s: TimedStreamPrefix, t: int) -> TimeInterval:
    """Return the ``t``-th time interval of ``s``."""
    if t < 0 or t >= len(s.intervals):
        raise IntervalIndexError(f"interval {t} is outside a prefix of length {len(s.intervals)}")
    return TimeInterval(s.element_type, s.intervals[t])


def msg_holds(s: TimedStreamPrefix, k: int) -> bool:
    """True iff every interval of ``s`` carries at most ``k`` messages."""
    return all(len(iv) <= k for iv in s.intervals)


def ts_holds(s: TimedStreamPrefix) -> bool:
    """True iff every interval of ``s`` carries exactly one message."""
    return all(len(iv) == 1 for iv in s.intervals)


def first_violation(s: TimedStreamPrefix, k: int | None = None) -> int | None:
    """Index of the first interval breaking ``ts`` (k is None) or ``msg k``."""
    lens = list(map(len, s.intervals))
    if k is None:
        if lens.count(1) == len(lens):
            return None
        return next(t for t, n in enumerate(lens) if n != 1)
    if max(lens, default=0) <= k:
        return None
    return next(t for t, n in enumerate(lens) if n > k)


def first_message(iv) -> Message | Any:
    """Head of an interval.

    Returns a :class:`Message` for a :class:`TimeInterval` and the bare payload
    for a plain tuple of payloads.
    """
    if isinstance(iv, TimeInterval):
        if not iv.values:
            raise EmptyIntervalError("first message of an empty interval")
        return Message(iv.type, iv.values[0])
    if not iv:
        raise EmptyIntervalError("first message of an empty interval")
    return iv[0]


class StreamGenerator:
    """An infinite timed stream, produced lazily interval by interval.

    Subclasses implement :meth:`produce`, which must be a deterministic
    function of ``t`` and the generator's own parameters (including any seed),
    and provide an ``element_type`` attribute.
    """

    def produce(self, t: int) -> tuple:
        raise NotImplementedError

    def with_seed(self, seed: int) -> "StreamGenerator":
        return self


@dataclass(frozen=True)
class ConstGenerator(StreamGenerator):
    element_type: MessageType
    interval: tuple = ()

    def produce(self, t):
        return self.interval


@dataclass(frozen=True)
class CycleGenerator(StreamGenerator):
    element_type: MessageType
    intervals: tuple = ((),)

    def produce(self, t):
        return self.intervals[t % len(self.intervals)]


@dataclass(frozen=True)
class UniformGenerator(StreamGenerator):
    """One uniformly drawn Nat per interval, from a counter-based seeded hash."""
    element_type: MessageType
    lo: int
    hi: int
    name: str = ""
    seed: int = 0

    def produce(self, t):
        from .rng import counter_draw
        return (counter_draw(self.seed, self.name, t, self.lo, self.hi),)

    def with_seed(self, seed):
        return UniformGenerator(self.element_type, self.lo, self.hi, self.name, seed)


class FunctionGenerator(StreamGenerator):
    def __init__(self, element_type: MessageType, fn: Callable[[int], Iterable[Any]]):
        self.element_type = element_type
        self._fn = fn

    def produce(self, t):
        iv = tuple(self._fn(t))
        if not all(self.element_type.conforms(v) for v in iv):
            raise TypeMismatch(f"generator produced {iv!r} for type {self.element_type}")
        return iv


def truncate(g: StreamGenerator, n: int) -> TimedStreamPrefix:
    """The first ``n`` intervals of the infinite stream ``g``."""
    return TimedStreamPrefix(g.element_type, tuple(g.produce(t) for t in range(n)))


# -- literal formatting and JSON ---------------------------------------------

def format_value(v) -> str:
    if type(v) is bool:
        return "true" if v else "false"
    if type(v) is tuple:
        return "<" + ", ".join(format_value(x) for x in v) + ">"
    if type(v) is RecordValue:
        return f"{v.con}(" + ", ".join(format_value(x) for x in v.fields) + ")"
    return str(v)


def value_to_json(typ: MessageType, v):
    if isinstance(typ, ListType):
        return [value_to_json(typ.element, x) for x in v]
    if isinstance(typ, RecordType):
        variant = typ.variant(v.con)
        out = {"con": v.con}
        for (sel, st), x in zip(variant.selectors, v.fields):
            out[sel] = value_to_json(st, x)
        return out
    return v


def value_from_json(typ: MessageType, data):
    if isinstance(typ, ListType):
        if not isinstance(data, list):
            raise TypeMismatch(f"expected a JSON array for {typ}")
        return tuple(value_from_json(typ.element, x) for x in data)
    if isinstance(typ, RecordType):
        if not isinstance(data, dict) or "con" not in data:
            raise TypeMismatch(f"expected a record object for {typ}")
        variant = typ.variant(data["con"])
        if variant is None:
            raise TypeMismatch(f"unknown constructor {data['con']!r} for {typ}")
        fields = tuple(value_from_json(st, data[sel]) for sel, st in variant.selectors)
        return RecordValue(data["con"], fields)
    if not typ.conforms(data):
        raise TypeMismatch(f"{data!r} is not a value of type {typ}")
    return data


def prefix_to_json(s: TimedStreamPrefix) -> list:
    typ = s.element_type
    if isinstance(typ, (NatType, BitType, BoolType, EnumType)):
        return [list(iv) for iv in s.intervals]
    return [[value_to_json(typ, v) for v in iv] for iv in s.intervals]


def prefix_from_json(element_type: MessageType, data) -> TimedStreamPrefix:
    if not isinstance(data, list):
        raise TypeMismatch("a serialized prefix is a JSON array of arrays")
    return TimedStreamPrefix(element_type, tuple(
        tuple(value_from_json(element_type, v) for v in iv) for iv in data))
