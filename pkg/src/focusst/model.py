"""AST for component specifications and networks.

Nodes are frozen dataclasses.  Source spans are carried for diagnostics but
never take part in equality, so a re-parsed pretty-printed spec compares equal
to the original.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Optional, Union

from .stream import Message, MessageType, StreamGenerator


@dataclass(frozen=True)
class SourceSpan:
    file: str
    line: int
    column: int
    length: int = 1

    def __str__(self):
        return f"{self.file}:{self.line}:{self.column}"


class Severity(enum.Enum):
    ERROR = "error"
    WARNING = "warning"


@dataclass(frozen=True)
class Diagnostic:
    severity: Severity
    message: str
    span: Optional[SourceSpan] = None
    label: Optional[str] = None

    def __str__(self):
        where = f"{self.span}: " if self.span else ""
        label = f"[{self.label}] " if self.label else ""
        return f"{where}{self.severity.value}: {label}{self.message}"


def _span():
    return field(default=None, compare=False, repr=False)


# -- expressions ----------------------------------------------------------------

@dataclass(frozen=True)
class NatLit:
    value: int
    span: Optional[SourceSpan] = _span()


@dataclass(frozen=True)
class BoolLit:
    value: bool
    span: Optional[SourceSpan] = _span()


@dataclass(frozen=True)
class EnumLit:
    name: str
    span: Optional[SourceSpan] = _span()


@dataclass(frozen=True)
class RecordLit:
    con: str
    args: tuple = ()
    span: Optional[SourceSpan] = _span()


@dataclass(frozen=True)
class Select:
    expr: "Expr"
    selector: str
    span: Optional[SourceSpan] = _span()


@dataclass(frozen=True)
class LocalRef:
    name: str
    span: Optional[SourceSpan] = _span()


@dataclass(frozen=True)
class ChoiceRef:
    name: str
    span: Optional[SourceSpan] = _span()


@dataclass(frozen=True)
class IntervalRef:
    """``ti(channel, t)``: the current interval of a channel."""
    channel: str
    span: Optional[SourceSpan] = _span()


@dataclass(frozen=True)
class ListLit:
    items: tuple = ()
    span: Optional[SourceSpan] = _span()


@dataclass(frozen=True)
class First:
    expr: "Expr"
    span: Optional[SourceSpan] = _span()


@dataclass(frozen=True)
class BinOp:
    op: str
    left: "Expr"
    right: "Expr"
    span: Optional[SourceSpan] = _span()


@dataclass(frozen=True)
class Not:
    expr: "Expr"
    span: Optional[SourceSpan] = _span()


@dataclass(frozen=True)
class IfExpr:
    cond: "Expr"
    then: "Expr"
    orelse: "Expr"
    span: Optional[SourceSpan] = _span()


Expr = Union[NatLit, BoolLit, EnumLit, RecordLit, Select, LocalRef, ChoiceRef,
             IntervalRef, ListLit, First, BinOp, Not, IfExpr]

ARITH_OPS = ("+", "-")
COMPARE_OPS = ("=", "/=", "<", "<=", ">", ">=")
BOOL_OPS = ("and", "or", "->")


def walk(e):
    """Yield ``e`` and all its sub-expressions."""
    yield e
    if isinstance(e, (Select, First, Not)):
        yield from walk(e.expr)
    elif isinstance(e, BinOp):
        yield from walk(e.left)
        yield from walk(e.right)
    elif isinstance(e, IfExpr):
        yield from walk(e.cond)
        yield from walk(e.then)
        yield from walk(e.orelse)
    elif isinstance(e, (RecordLit, ListLit)):
        for a in (e.args if isinstance(e, RecordLit) else e.items):
            yield from walk(a)


# -- statements and rules -------------------------------------------------------

@dataclass(frozen=True)
class LocalTarget:
    name: str


@dataclass(frozen=True)
class OutputTarget:
    channel: str


@dataclass(frozen=True)
class Assign:
    target: Union[LocalTarget, OutputTarget]
    expr: Expr
    span: Optional[SourceSpan] = _span()


@dataclass(frozen=True)
class Block:
    """Conjunction of assignments and conditionals; empty means ``skip``."""
    items: tuple = ()


@dataclass(frozen=True)
class IfStmt:
    cond: Expr
    then: Block
    orelse: Block
    span: Optional[SourceSpan] = _span()


def paths(block: Block):
    """Enumerate execution paths as lists of (conditions, assignments)."""
    def go(items, conds, acc):
        if not items:
            yield conds, acc
            return
        head, rest = items[0], items[1:]
        if isinstance(head, Assign):
            yield from go(rest, conds, acc + [head])
        else:
            yield from go(head.then.items + rest, conds + [(head.cond, True)], acc)
            yield from go(head.orelse.items + rest, conds + [(head.cond, False)], acc)
    yield from go(tuple(block.items), [], [])


def block_exprs(block: Block):
    for item in block.items:
        if isinstance(item, Assign):
            yield item.expr
        else:
            yield item.cond
            yield from block_exprs(item.then)
            yield from block_exprs(item.orelse)


def block_targets(block: Block) -> set:
    out = set()
    for item in block.items:
        if isinstance(item, Assign):
            out.add(item.target)
        else:
            out |= block_targets(item.then) | block_targets(item.orelse)
    return out


@dataclass(frozen=True)
class Choice:
    """``choose var in lo..hi``: an existential witness resolved by a seeded draw."""
    var: str
    lo: int
    hi: int


@dataclass(frozen=True)
class TransitionRule:
    label: str
    body: Block
    guard: Optional[Expr] = None
    choices: tuple = ()
    span: Optional[SourceSpan] = _span()


# -- predicates -------------------------------------------------------------------

@dataclass(frozen=True)
class TsPred:
    channel: str


@dataclass(frozen=True)
class MsgPred:
    channel: str
    k: int


@dataclass(frozen=True)
class TruePred:
    pass


@dataclass(frozen=True)
class IntervalPred:
    """``forall t: expr`` over the current intervals of the referenced channels."""
    expr: Expr


@dataclass(frozen=True)
class StreamEqPred:
    """Two outputs carry identical streams."""
    left: str
    right: str


Pred = Union[TsPred, MsgPred, TruePred, IntervalPred, StreamEqPred]


@dataclass(frozen=True)
class Labeled:
    label: str
    pred: Pred
    span: Optional[SourceSpan] = _span()


@dataclass(frozen=True)
class InitialGuarantee:
    """``y[0] = expr``: the step-0 interval of a delayed output."""
    label: str
    channel: str
    expr: Expr
    span: Optional[SourceSpan] = _span()


# -- components ----------------------------------------------------------------------

class Causality(enum.Enum):
    STRONG = "strongly"
    WEAK = "weakly"


class Polarity(enum.Enum):
    IN = "in"
    OUT = "out"


@dataclass(frozen=True)
class ChannelDecl:
    name: str
    type: MessageType
    polarity: Polarity
    span: Optional[SourceSpan] = _span()


@dataclass(frozen=True)
class LocalVarDecl:
    name: str
    type: MessageType
    init: Message
    span: Optional[SourceSpan] = _span()


@dataclass(frozen=True)
class ComponentSpec:
    name: str
    causality: Causality = Causality.STRONG
    channels: tuple = ()
    locals: tuple = ()
    assumptions: tuple = ()
    initial: tuple = ()
    rules: tuple = ()
    guarantees: tuple = ()
    types: tuple = ()
    span: Optional[SourceSpan] = _span()

    def channel(self, name) -> Optional[ChannelDecl]:
        for c in self.channels:
            if c.name == name:
                return c
        return None

    def local(self, name) -> Optional[LocalVarDecl]:
        for v in self.locals:
            if v.name == name:
                return v
        return None

    @property
    def inputs(self):
        return tuple(c for c in self.channels if c.polarity is Polarity.IN)

    @property
    def outputs(self):
        return tuple(c for c in self.channels if c.polarity is Polarity.OUT)

    def gar_labels(self):
        return ([g.label for g in self.initial] + [r.label for r in self.rules]
                + [g.label for g in self.guarantees])

    def mirrors(self) -> dict:
        """Outputs defined as copies of another output via a stream-equality guarantee."""
        assigned = set()
        for r in self.rules:
            assigned |= {t.channel for t in block_targets(r.body) if isinstance(t, OutputTarget)}
        out = {}
        for g in self.guarantees:
            if isinstance(g.pred, StreamEqPred):
                a, b = g.pred.left, g.pred.right
                if a in assigned and b not in assigned:
                    out[b] = a
                elif b in assigned and a not in assigned:
                    out[a] = b
        return out


# -- networks -----------------------------------------------------------------------

@dataclass(frozen=True)
class Instance:
    name: str
    spec: ComponentSpec
    span: Optional[SourceSpan] = _span()


@dataclass(frozen=True)
class Stimulus:
    name: str
    type: MessageType
    generator: StreamGenerator
    span: Optional[SourceSpan] = _span()


@dataclass(frozen=True)
class Wire:
    """``source -> target``; sources are ``inst.port`` or a stimulus name."""
    source: str
    target: str
    span: Optional[SourceSpan] = _span()


@dataclass(frozen=True)
class PropertyBinding:
    spec: ComponentSpec
    bindings: tuple  # (property channel, network channel) pairs
    span: Optional[SourceSpan] = _span()

    @property
    def name(self):
        return self.spec.name


@dataclass(frozen=True)
class Network:
    name: str
    instances: tuple = ()
    wires: tuple = ()
    stimuli: tuple = ()
    properties: tuple = ()
    post_update: bool = False
    uses: tuple = ()
    span: Optional[SourceSpan] = _span()

    def instance(self, name) -> Optional[Instance]:
        for i in self.instances:
            if i.name == name:
                return i
        return None

    def stimulus(self, name) -> Optional[Stimulus]:
        for s in self.stimuli:
            if s.name == name:
                return s
        return None

    @property
    def wiring(self) -> dict:
        return {w.target: w.source for w in self.wires}

    def channel_type(self, ref: str) -> Optional[MessageType]:
        if "." in ref:
            inst_name, port = ref.split(".", 1)
            inst = self.instance(inst_name)
            decl = inst.spec.channel(port) if inst else None
            return decl.type if decl else None
        stim = self.stimulus(ref)
        return stim.type if stim else None
