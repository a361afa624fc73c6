"""Executable timed-stream specifications: streams, operators, spatial checks,
a specification language, a network simulator with contract monitors, and
diagram export."""
from .diagram import DiagramStyle, export_dot
from .errors import (CausalityCycle, ConfigurationError, EmptyIntervalError, EmptySubcomponents,
                     FocusError, IntervalIndexError, InvalidArgument, InvalidGranularity,
                     SelectorError, SpecError, StepError, TypeMismatch, UnknownReference)
from .loader import load_network
from .operators import SplitPolicy, filter_stream, join, join_checked, split, timestamp
from .parser import parse_network, parse_source, parse_spec
from .printer import pretty_print, print_network
from .reference import ReferenceCase, load_reference
from .runtime import (ChannelGenerator, MonitorVerdict, Simulator, Status, Trace, load_trace,
                      monitor, run, step)
from .spatial import (Space, SpObject, Zone, check_all, check_margin, check_speed_limit,
                      check_zone_nesting, composite_rad)
from .stream import (BIT, BOOL, NAT, EnumType, ListType, Message, RecordType, TimedStreamPrefix,
                     TimeInterval, first_message, msg_holds, truncate, ts_holds)
from .validate import topological_order, validate, validate_network

__version__ = "0.1.0"

__all__ = [
    "DiagramStyle",
    "export_dot",
    "CausalityCycle",
    "ConfigurationError",
    "EmptyIntervalError",
    "EmptySubcomponents",
    "FocusError",
    "IntervalIndexError",
    "InvalidArgument",
    "InvalidGranularity",
    "SelectorError",
    "SpecError",
    "StepError",
    "TypeMismatch",
    "UnknownReference",
    "load_network",
    "SplitPolicy",
    "filter_stream",
    "join",
    "join_checked",
    "split",
    "timestamp",
    "parse_network",
    "parse_source",
    "parse_spec",
    "pretty_print",
    "print_network",
    "ReferenceCase",
    "load_reference",
    "ChannelGenerator",
    "MonitorVerdict",
    "Simulator",
    "Status",
    "Trace",
    "load_trace",
    "monitor",
    "run",
    "step",
    "Space",
    "SpObject",
    "Zone",
    "check_all",
    "check_margin",
    "check_speed_limit",
    "check_zone_nesting",
    "composite_rad",
    "BIT",
    "BOOL",
    "NAT",
    "EnumType",
    "ListType",
    "Message",
    "RecordType",
    "TimedStreamPrefix",
    "TimeInterval",
    "first_message",
    "msg_holds",
    "truncate",
    "ts_holds",
    "topological_order",
    "validate",
    "validate_network",
]
