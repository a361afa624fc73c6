"""Execution of networks interval by interval, traces, and contract monitors."""
from __future__ import annotations

import enum
import gc
import json
from dataclasses import dataclass, field
from functools import partial
from typing import NamedTuple, Optional

from .compiler import compile_expr_function, compile_network
from .errors import ConfigurationError, FocusError, InvalidArgument, SpecError
from .model import (
    Causality, IntervalPred, IntervalRef, MsgPred, Network, StreamEqPred, TruePred, TsPred, walk,
)
from .rng import ChoiceStream
from .stream import (
    StreamGenerator, TimedStreamPrefix, first_violation, prefix_from_json, prefix_to_json,
    value_from_json, value_to_json,
)
from .validate import errors_only, validate_network

TRACE_SCHEMA = "focusst-trace/1"


class Status(enum.Enum):
    SATISFIED = "Satisfied"
    VIOLATED = "Violated"
    VACUOUS = "VacuouslySatisfied"


@dataclass(frozen=True)
class MonitorVerdict:
    label: str
    status: Status
    first_violation_step: Optional[int] = None
    detail: str = ""

    def __post_init__(self):
        if self.status is Status.VIOLATED and self.first_violation_step is None:
            raise InvalidArgument(f"violated verdict {self.label} needs a step")


class ChoiceRecord(NamedTuple):
    step: int
    component: str
    label: str
    variable: str
    value: int


# builds records from plain tuples without a Python-level __new__ per choice
_choice_record = partial(tuple.__new__, ChoiceRecord)


@dataclass(frozen=True)
class RuntimeEvent:
    """Something the monitors and the user should hear about.

    ``kind`` is ``fault`` (a rule could not be evaluated), ``underflow``
    (Nat subtraction saturated at 0) or ``nondeterminism`` (several guards
    held at once; ``label`` lists them, the first one fired).
    """
    kind: str
    step: int
    component: str
    label: str
    detail: str = ""


@dataclass(frozen=True)
class ComponentState:
    locals: dict
    pending_outputs: dict = field(default_factory=dict)


@dataclass
class Trace:
    network: str
    horizon: int
    seed: int
    channels: dict
    choices: list
    events: list
    verdicts: list = field(default_factory=list)
    local_names: dict = field(default_factory=dict)  # component -> local names
    snapshots: dict = field(default_factory=dict)    # component -> [tuple of local values]

    def states(self, component: str) -> list:
        """Per-step state at the start of each interval for ``component``."""
        names = self.local_names[component]
        pending_of = [c[len(component) + 1:] for c in self.channels
                      if c.startswith(component + ".")]
        out = []
        for t, values in enumerate(self.snapshots[component]):
            pend = {}
            for c in pending_of:
                s = self.channels[f"{component}.{c}"]
                if t + 1 < len(s.intervals):
                    pend[c] = s.intervals[t + 1]
            out.append(ComponentState(dict(zip(names, values)), pend))
        return out

    def verdict(self, label: str) -> MonitorVerdict:
        for v in self.verdicts:
            if v.label == label:
                return v
        raise KeyError(label)

    @property
    def warnings(self) -> list:
        return [e for e in self.events if e.kind != "fault"]

    def to_json(self, net: Network | None = None) -> str:
        types = _local_types(net) if net is not None else {}
        states = {}
        for comp in sorted(self.snapshots):
            names = self.local_names[comp]
            cols = list(zip(*self.snapshots[comp])) if self.snapshots[comp] else [()] * len(names)
            states[comp] = {
                n: [value_to_json(types[(comp, n)], v) if (comp, n) in types else v for v in col]
                for n, col in zip(names, cols)
            }
        doc = {
            "schema": TRACE_SCHEMA,
            "network": self.network,
            "horizon": self.horizon,
            "seed": self.seed,
            "channels": {name: prefix_to_json(self.channels[name]) for name in sorted(self.channels)},
            "states": states,
            "choices": [[c.step, c.component, c.label, c.variable, c.value] for c in self.choices],
            "verdicts": [
                {"label": v.label, "status": v.status.value,
                 "firstViolationStep": v.first_violation_step, "detail": v.detail}
                for v in self.verdicts
            ],
            "warnings": [
                {"kind": e.kind, "step": e.step, "component": e.component,
                 "label": e.label, "detail": e.detail}
                for e in self.events
            ],
        }
        return json.dumps(doc, separators=(",", ":")) + "\n"

    @classmethod
    def from_json(cls, text: str, net: Network) -> "Trace":
        doc = json.loads(text)
        if doc.get("schema") != TRACE_SCHEMA:
            raise ConfigurationError(f"unsupported trace schema {doc.get('schema')!r}")
        channels = {}
        for name, data in doc["channels"].items():
            typ = net.channel_type(name)
            if typ is None:
                raise ConfigurationError(f"trace channel {name} is not part of network {net.name}")
            channels[name] = prefix_from_json(typ, data)
        types = _local_types(net)
        local_names, snapshots = {}, {}
        for comp, cols in doc.get("states", {}).items():
            names = list(cols)
            local_names[comp] = names
            decoded = [[value_from_json(types[(comp, n)], v) for v in cols[n]] for n in names]
            snapshots[comp] = [tuple(row) for row in zip(*decoded)] if names else \
                [()] * doc["horizon"]
        verdicts = [MonitorVerdict(v["label"], Status(v["status"]), v["firstViolationStep"],
                                   v["detail"]) for v in doc.get("verdicts", [])]
        events = [RuntimeEvent(e["kind"], e["step"], e["component"], e["label"], e["detail"])
                  for e in doc.get("warnings", [])]
        choices = [ChoiceRecord(*c) for c in doc.get("choices", [])]
        return cls(doc.get("network", net.name), doc["horizon"], doc.get("seed", 0), channels,
                   choices, events, verdicts, local_names, snapshots)

    def save(self, path, net: Network | None = None):
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(self.to_json(net))


def load_trace(path, net: Network) -> Trace:
    with open(path, encoding="utf-8") as fh:
        return Trace.from_json(fh.read(), net)


def _local_types(net):
    return {(i.name, v.name): v.type for i in net.instances for v in i.spec.locals}


# -- simulation ----------------------------------------------------------------------

class _Recorder:
    """Hooks called from generated code; collects events for one run."""

    def __init__(self, names, guarded_labels):
        self.names = names
        self.guarded = guarded_labels
        self.events = []
        self.choices = []

    def fault(self, t, i, label, exc):
        self.events.append(RuntimeEvent("fault", t, self.names[i], label, str(exc)))

    def under(self, value, t, i, label):
        comp = self.names[i] if i >= 0 else ""
        self.events.append(RuntimeEvent("underflow", t, comp, label,
                                        f"Nat subtraction gave {value}, saturated to 0"))
        return 0

    def nondet(self, t, i, mask):
        labels = [lab for bit, lab in enumerate(self.guarded[i]) if mask >> bit & 1]
        self.events.append(RuntimeEvent("nondeterminism", t, self.names[i], ",".join(labels),
                                        f"guards of {', '.join(labels)} hold; {labels[0]} fired"))


class Simulator:
    """A validated, compiled network ready to be stepped or run."""

    def __init__(self, net: Network):
        problems = errors_only(validate_network(net))
        if problems:
            raise SpecError(problems)
        self.net = net
        self._nc, self.source, ns = compile_network(net)
        self._run_fn = ns["_run"]
        self._step_fn = ns["_step"]
        self.order = [i.name for i in self._nc.order]
        self._names = [i.name for i in net.instances]
        self._guarded = [[r.label for r in i.spec.rules if r.guard is not None]
                         for i in net.instances]
        self._outputs = [f"{i.name}.{c.name}" for i in net.instances for c in i.spec.outputs]

    def initial_state(self) -> tuple:
        """Locals from their ``local`` declarations, pending outputs from I* guarantees."""
        values = []
        for inst in self.net.instances:
            spec = inst.spec
            values.extend(v.init.value for v in spec.locals)
            if spec.causality is Causality.STRONG:
                init = {}
                for g in spec.initial:
                    init[g.channel] = compile_expr_function(g.expr, (), spec.types)(0)
                for dst, src in spec.mirrors().items():
                    if dst not in init and src in init:
                        init[dst] = init[src]
                values.extend(init.get(c.name, ()) for c in spec.outputs)
        return tuple(values)

    def _recorder(self):
        return _Recorder(self._names, self._guarded)

    def _generators(self, seed):
        return [s.generator.with_seed(seed) for s in self.net.stimuli]

    def step(self, state, t: int, rng: ChoiceStream, externals: dict | None = None,
             recorder=None):
        """One interval: returns (new state, {channel: interval at t})."""
        rec = recorder or self._recorder()
        if externals is None:
            externals = {s.name: g.produce(t) for s, g in
                         zip(self.net.stimuli, self._generators(rng.seed))}
        ext = []
        for s in self.net.stimuli:
            iv = tuple(externals[s.name])
            if not all(s.type.conforms(v) for v in iv):
                raise ConfigurationError(f"stimulus {s.name}: {iv!r} is not a {s.type} interval")
            ext.append(iv)
        choices = []
        new_state, outs = self._step_fn(state, t, ext, rng.bits, choices, rec.fault, rec.under,
                                        rec.nondet)
        rec.choices.extend(map(_choice_record, choices))
        intervals = dict(zip(self._outputs, outs))
        intervals.update((s.name, iv) for s, iv in zip(self.net.stimuli, ext))
        return new_state, intervals

    def run(self, horizon: int, seed: int = 0, monitored: bool = True) -> Trace:
        if not isinstance(horizon, int) or horizon < 1:
            raise InvalidArgument(f"horizon must be at least 1, got {horizon!r}")
        rec = self._recorder()
        rng = ChoiceStream(seed)
        gens = [g.produce for g in self._generators(seed)]
        choices = []
        # the loop allocates millions of acyclic tuples; collection passes only cost time
        gc_was_enabled = gc.isenabled()
        gc.disable()
        try:
            _, hist, snaps = self._run_fn(horizon, self.initial_state(), gens, rng.bits, choices,
                                          rec.fault, rec.under, rec.nondet)
        finally:
            if gc_was_enabled:
                gc.enable()
        channels = {}
        names = self._outputs + [s.name for s in self.net.stimuli]
        types = [c.type for i in self.net.instances for c in i.spec.outputs] + \
                [s.type for s in self.net.stimuli]
        for name, typ, h in zip(names, types, hist):
            channels[name] = TimedStreamPrefix(typ, tuple(h))
        trace = Trace(
            self.net.name, horizon, seed, channels,
            list(map(_choice_record, choices)),
            rec.events,
            local_names={i.name: [v.name for v in i.spec.locals] for i in self.net.instances},
            snapshots={i.name: s for i, s in zip(self.net.instances, snaps)},
        )
        if monitored:
            trace.verdicts = monitor(trace, self.net)
        return trace


def run(net: Network, horizon: int, seed: int = 0) -> Trace:
    """Execute ``net`` for ``horizon`` intervals and monitor the result."""
    if not isinstance(horizon, int) or horizon < 1:
        raise InvalidArgument(f"horizon must be at least 1, got {horizon!r}")
    return Simulator(net).run(horizon, seed)


def step(net: Network, state, externals, t: int, rng: ChoiceStream):
    """Functional single step; ``state=None`` starts from the initial state."""
    sim = Simulator(net)
    if state is None:
        state = sim.initial_state()
    return sim.step(state, t, rng, externals)


class ChannelGenerator(StreamGenerator):
    """A network channel viewed as an infinite stream (simulated on demand)."""

    def __init__(self, net: Network, channel: str, seed: int = 0):
        typ = net.channel_type(channel)
        if typ is None:
            raise ConfigurationError(f"no channel {channel} in network {net.name}")
        self.element_type = typ
        self.channel = channel
        self.seed = seed
        self._sim = Simulator(net)
        self._rng = ChoiceStream(seed)
        self._state = self._sim.initial_state()
        self._gens = self._sim._generators(seed)
        self._rec = self._sim._recorder()
        self._cache = []

    def produce(self, t):
        while len(self._cache) <= t:
            n = len(self._cache)
            ext = {s.name: g.produce(n) for s, g in zip(self._sim.net.stimuli, self._gens)}
            self._state, ivs = self._sim.step(self._state, n, self._rng, ext, self._rec)
            self._cache.append(ivs[self.channel])
        return self._cache[t]

    def with_seed(self, seed):
        return ChannelGenerator(self._sim.net, self.channel, seed)


# -- monitoring ----------------------------------------------------------------------

def _pred_check(pred, streams: dict, types, horizon):
    """Return (first violation step or None, detail) for a stream predicate."""
    if isinstance(pred, TruePred):
        return None, ""
    if isinstance(pred, TsPred):
        t = first_violation(streams[pred.channel])
        return t, f"{pred.channel} carries {len(streams[pred.channel].intervals[t])} messages" \
            if t is not None else ""
    if isinstance(pred, MsgPred):
        t = first_violation(streams[pred.channel], pred.k)
        return t, f"{pred.channel} carries more than {pred.k} messages" if t is not None else ""
    if isinstance(pred, StreamEqPred):
        a, b = streams[pred.left].intervals, streams[pred.right].intervals
        if a == b:
            return None, ""
        for t, (x, y) in enumerate(zip(a, b)):
            if x != y:
                return t, f"{pred.left} and {pred.right} differ"
        return None, ""
    if isinstance(pred, IntervalPred):
        params = tuple(dict.fromkeys(e.channel for e in walk(pred.expr)
                                     if isinstance(e, IntervalRef)))
        fn = compile_expr_function(pred.expr, params, types)
        cols = [streams[p].intervals for p in params]
        try:
            if all(map(fn, range(horizon), *cols)):
                return None, ""
        except FocusError:
            pass
        # slow path only to locate the first failing step
        for t in range(horizon):
            try:
                ok = fn(t, *[c[t] for c in cols])
            except FocusError as exc:
                return t, str(exc)
            if not ok:
                return t, "predicate false"
        return None, ""
    raise TypeError(f"unknown predicate {pred!r}")


def _contract(prefix, spec, streams, horizon, rule_issues=None, choice_issues=None):
    """Verdicts for one contract: assumptions, then guarantees (or vacuity)."""
    verdicts = []
    broken = None
    for a in spec.assumptions:
        t, detail = _pred_check(a.pred, streams, spec.types, horizon)
        if t is None:
            verdicts.append(MonitorVerdict(f"{prefix}{a.label}", Status.SATISFIED))
        else:
            verdicts.append(MonitorVerdict(f"{prefix}{a.label}", Status.VIOLATED, t, detail))
            if broken is None or t < broken[1]:
                broken = (a.label, t)
    if broken is not None:
        why = f"assumption {broken[0]} violated at step {broken[1]}"
        for label in spec.gar_labels():
            verdicts.append(MonitorVerdict(f"{prefix}{label}", Status.VACUOUS, None, why))
        return verdicts
    for g in spec.initial:
        expected = compile_expr_function(g.expr, (), spec.types)(0)
        got = streams[g.channel].intervals[0]
        if got == expected:
            verdicts.append(MonitorVerdict(f"{prefix}{g.label}", Status.SATISFIED))
        else:
            verdicts.append(MonitorVerdict(f"{prefix}{g.label}", Status.VIOLATED, 0,
                                           f"{g.channel} starts with {got!r}, expected {expected!r}"))
    gar = []
    for r in spec.rules:
        issues = sorted((rule_issues or {}).get(r.label, []) + (choice_issues or {}).get(r.label, []))
        if issues:
            t, detail = issues[0]
            gar.append(MonitorVerdict(f"{prefix}{r.label}", Status.VIOLATED, t, detail))
        else:
            gar.append(MonitorVerdict(f"{prefix}{r.label}", Status.SATISFIED))
    for g in spec.guarantees:
        t, detail = _pred_check(g.pred, streams, spec.types, horizon)
        if t is None:
            gar.append(MonitorVerdict(f"{prefix}{g.label}", Status.SATISFIED))
        else:
            gar.append(MonitorVerdict(f"{prefix}{g.label}", Status.VIOLATED, t, detail))
    verdicts += sorted(gar, key=lambda v: _label_number(v.label))
    return verdicts


def _label_number(label):
    digits = label[len(label.rstrip("0123456789")):]
    return int(digits) if digits else 0


def monitor(trace: Trace, net: Network) -> list:
    """Check every component contract and every system property over ``trace``."""
    if trace.horizon < 1:
        raise InvalidArgument("cannot monitor an empty trace")
    wiring = net.wiring
    for name, s in trace.channels.items():
        if len(s.intervals) != trace.horizon:
            raise ConfigurationError(f"channel {name} has {len(s.intervals)} intervals, "
                                     f"expected {trace.horizon}")
    issues = {}
    for e in trace.events:
        if e.kind in ("fault", "underflow"):
            issues.setdefault((e.component, e.label), []).append((e.step, f"{e.kind}: {e.detail}"))
    ranges = {}
    for inst in net.instances:
        for r in inst.spec.rules:
            for c in r.choices:
                ranges[(inst.name, r.label, c.var)] = (c.lo, c.hi)
    choice_issues = {}
    for c in trace.choices:
        lo, hi = ranges.get((c.component, c.label, c.variable), (None, None))
        if lo is None or not lo <= c.value <= hi:
            choice_issues.setdefault((c.component, c.label), []).append(
                (c.step, f"choice {c.variable}={c.value} outside its range"))

    def channel(ref):
        if ref not in trace.channels:
            raise ConfigurationError(f"trace has no channel {ref}")
        return trace.channels[ref]

    verdicts = []
    for inst in net.instances:
        spec = inst.spec
        streams = {}
        for c in spec.inputs:
            streams[c.name] = channel(wiring[f"{inst.name}.{c.name}"])
        for c in spec.outputs:
            streams[c.name] = channel(f"{inst.name}.{c.name}")
        rule_issues = {lab: v for (comp, lab), v in issues.items() if comp == inst.name}
        ch_issues = {lab: v for (comp, lab), v in choice_issues.items() if comp == inst.name}
        verdicts += _contract(f"{inst.name}.", spec, streams, trace.horizon, rule_issues, ch_issues)
    for prop in net.properties:
        streams = {}
        for pc, ref in prop.bindings:
            if prop.spec.channel(pc) is None:
                raise ConfigurationError(f"property {prop.name} has no channel {pc}")
            streams[pc] = channel(ref)
        verdicts += _contract(f"{prop.name}.", prop.spec, streams, trace.horizon)
    return verdicts


def violated(verdicts) -> list:
    return [v for v in verdicts if v.status is Status.VIOLATED]
