"""Well-formedness and type checking of specifications and networks."""
from __future__ import annotations

import graphlib
import re

from .errors import CausalityCycle
from .model import (
    Assign, BinOp, BoolLit, Causality, ChoiceRef, ComponentSpec, Diagnostic, EnumLit,
    First, IfExpr, IntervalPred, IntervalRef, ListLit, LocalRef, LocalTarget, MsgPred,
    NatLit, Network, Not, Polarity, RecordLit, Select, Severity,
    StreamEqPred, TruePred, TsPred, block_targets, paths, walk,
)
from .stream import BOOL, NAT, BitType, EnumType, ListType, RecordType

IDENT = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")
ANY_LIST = ListType(None)  # type of the empty list literal


def constructors(types) -> dict:
    """Map every constructor name to the declared type that owns it."""
    out = {}
    for typ in types:
        if isinstance(typ, EnumType):
            for c in typ.constructors:
                out.setdefault(c, typ)
        elif isinstance(typ, RecordType):
            for v in typ.variants:
                out.setdefault(v.constructor, typ)
    return out


def same_type(a, b) -> bool:
    if isinstance(a, ListType) and isinstance(b, ListType):
        if a.element is None or b.element is None:
            return True
        return same_type(a.element, b.element)
    return a == b


class Env:
    """Names visible to an expression and which channels it may read."""

    def __init__(self, spec: ComponentSpec, readable, choices=(), label=None):
        self.spec = spec
        self.cons = constructors(spec.types)
        self.locals = {v.name: v.type for v in spec.locals}
        self.choices = {c: NAT for c in choices}
        self.readable = readable  # callable(ChannelDecl) -> error text or None
        self.label = label


class Checker:
    def __init__(self, diags):
        self.diags = diags

    def error(self, msg, span=None, label=None):
        self.diags.append(Diagnostic(Severity.ERROR, msg, span, label))

    # inference returns None after reporting an error
    def infer(self, e, env: Env):
        lab = env.label
        if isinstance(e, NatLit):
            if type(e.value) is not int or e.value < 0:
                self.error(f"{e.value!r} is not a natural number", e.span, lab)
                return None
            return NAT
        if isinstance(e, BoolLit):
            return BOOL
        if isinstance(e, EnumLit):
            typ = env.cons.get(e.name)
            if typ is None:
                self.error(f"unknown constructor {e.name}", e.span, lab)
                return None
            if isinstance(typ, RecordType):
                return self._record(RecordLit(e.name, (), e.span), typ, env)
            return typ
        if isinstance(e, RecordLit):
            typ = env.cons.get(e.con)
            if not isinstance(typ, RecordType):
                self.error(f"unknown record constructor {e.con}", e.span, lab)
                return None
            return self._record(e, typ, env)
        if isinstance(e, Select):
            typ = self.infer(e.expr, env)
            if typ is None:
                return None
            if not isinstance(typ, RecordType):
                self.error(f"selector .{e.selector} applied to {typ}", e.span, lab)
                return None
            found = [v.selector_type(e.selector) for v in typ.variants]
            found = [f for f in found if f is not None]
            if not found:
                self.error(f"{typ} has no selector {e.selector}", e.span, lab)
                return None
            return found[0]
        if isinstance(e, LocalRef):
            if e.name not in env.locals:
                self.error(f"unknown local variable {e.name}", e.span, lab)
                return None
            return env.locals[e.name]
        if isinstance(e, ChoiceRef):
            if e.name not in env.choices:
                self.error(f"{e.name} is not bound by choose", e.span, lab)
                return None
            return NAT
        if isinstance(e, IntervalRef):
            decl = env.spec.channel(e.channel)
            if decl is None:
                self.error(f"unknown channel {e.channel}", e.span, lab)
                return None
            problem = env.readable(decl)
            if problem:
                self.error(problem, e.span, lab)
                return None
            return ListType(decl.type)
        if isinstance(e, ListLit):
            if not e.items:
                return ANY_LIST
            # infer from a non-literal item so that <1, ft(bits[t])> is a Bit list
            lead = next((i for i in e.items if not _is_literalish(i)), e.items[0])
            first = self.infer(lead, env)
            if first is None:
                return None
            for item in e.items:
                if item is not lead and not self.check(item, first, env):
                    return None
            return ListType(first)
        if isinstance(e, First):
            typ = self.infer(e.expr, env)
            if typ is None:
                return None
            if not isinstance(typ, ListType):
                self.error(f"ft applied to non-list of type {typ}", e.span, lab)
                return None
            if typ.element is None:
                self.error("ft of the empty list", e.span, lab)
                return None
            return typ.element
        if isinstance(e, Not):
            return BOOL if self.check(e.expr, BOOL, env) else None
        if isinstance(e, IfExpr):
            if not self.check(e.cond, BOOL, env):
                return None
            lead, other = e.then, e.orelse
            if _is_literalish(lead) and not _is_literalish(other):
                lead, other = other, lead
            t1 = self.infer(lead, env)
            if t1 is None:
                return None
            if isinstance(t1, ListType) and t1.element is None:
                return self.infer(other, env)
            return t1 if self.check(other, t1, env) else None
        if isinstance(e, BinOp):
            if e.op in ("+", "-"):
                ok = self.check(e.left, NAT, env) & self.check(e.right, NAT, env)
                return NAT if ok else None
            if e.op in ("<", "<=", ">", ">="):
                ok = self.check(e.left, NAT, env) & self.check(e.right, NAT, env)
                return BOOL if ok else None
            if e.op in ("and", "or", "->"):
                ok = self.check(e.left, BOOL, env) & self.check(e.right, BOOL, env)
                return BOOL if ok else None
            if e.op in ("=", "/="):
                lt = self.infer(e.left, env)
                if lt is None:
                    return None
                if _is_literalish(e.left) and not _is_literalish(e.right):
                    rt = self.infer(e.right, env)
                    if rt is None:
                        return None
                    return BOOL if self.check(e.left, rt, env) else None
                return BOOL if self.check(e.right, lt, env) else None
            self.error(f"unknown operator {e.op}", e.span, lab)
            return None
        self.error(f"not an expression: {e!r}", None, lab)
        return None

    def _record(self, e, typ, env):
        variant = typ.variant(e.con)
        if len(e.args) != len(variant.selectors):
            self.error(f"{e.con} takes {len(variant.selectors)} arguments, got {len(e.args)}",
                       e.span, env.label)
            return None
        ok = True
        for arg, (_, st) in zip(e.args, variant.selectors):
            ok &= self.check(arg, st, env)
        return typ if ok else None

    def check(self, e, expected, env) -> bool:
        """Check ``e`` against ``expected``; numeric and list literals adapt to Bit."""
        if isinstance(e, NatLit) and isinstance(expected, BitType):
            if e.value in (0, 1) and type(e.value) is int:
                return True
            self.error(f"{e.value} is not a bit", e.span, env.label)
            return False
        if isinstance(e, ListLit) and isinstance(expected, ListType) and expected.element is not None:
            return all([self.check(i, expected.element, env) for i in e.items])
        if isinstance(e, IfExpr):
            return (self.check(e.cond, BOOL, env) & self.check(e.then, expected, env)
                    & self.check(e.orelse, expected, env))
        actual = self.infer(e, env)
        if actual is None:
            return False
        if not same_type(actual, expected):
            self.error(f"expected {expected}, got {actual}", getattr(e, "span", None), env.label)
            return False
        return True


def _is_literalish(e):
    """Expressions whose type adapts to context (Nat literals may be Bits)."""
    if isinstance(e, NatLit):
        return True
    if isinstance(e, ListLit):
        return all(_is_literalish(i) for i in e.items)
    if isinstance(e, IfExpr):
        return _is_literalish(e.then) and _is_literalish(e.orelse)
    return False


def _uses_interval(e):
    return any(isinstance(x, IntervalRef) for x in walk(e))


def validate(spec: ComponentSpec) -> list[Diagnostic]:
    """All well-formedness problems of ``spec``; empty when it is valid."""
    diags: list[Diagnostic] = []
    chk = Checker(diags)
    err = chk.error

    def ident(name, what, span):
        if not isinstance(name, str) or not IDENT.match(name):
            err(f"invalid {what} name {name!r}", span)

    ident(spec.name, "component", spec.span)
    seen = {}
    for c in spec.channels:
        ident(c.name, "channel", c.span)
        if c.name in seen:
            err(f"channel {c.name} declared twice", c.span)
        seen[c.name] = c
    for v in spec.locals:
        ident(v.name, "local", v.span)
        if v.name in seen:
            err(f"local {v.name} clashes with another declaration", v.span)
        seen[v.name] = v
        if v.init.type != v.type:
            err(f"initial value of {v.name} has type {v.init.type}, expected {v.type}", v.span)
    cons = constructors(spec.types)
    all_cons = []
    for typ in spec.types:
        if isinstance(typ, EnumType):
            all_cons += list(typ.constructors)
        elif isinstance(typ, RecordType):
            all_cons += [v.constructor for v in typ.variants]
    for c in set(all_cons):
        if all_cons.count(c) > 1:
            err(f"constructor {c} declared by more than one type", spec.span)
    for name in seen:
        if name in cons:
            err(f"{name} is both a constructor and a variable/channel", seen[name].span)

    def lab_ok(label, prefix, span):
        if not re.fullmatch(prefix + r"[0-9]+", label or ""):
            err(f"label {label!r} should be numbered {prefix}1, {prefix}2, ...", span, label)

    labels = []
    for a in spec.assumptions:
        lab_ok(a.label, "A", a.span)
        labels.append(a.label)
    for g in spec.initial:
        lab_ok(g.label, "I", g.span)
        labels.append(g.label)
    for r in spec.rules:
        lab_ok(r.label, "B", r.span)
        labels.append(r.label)
    for g in spec.guarantees:
        lab_ok(g.label, "B", g.span)
        labels.append(g.label)
    for lab in set(labels):
        if labels.count(lab) > 1:
            err(f"label {lab} used more than once", spec.span, lab)

    strong = spec.causality is Causality.STRONG

    def inputs_only(decl):
        if decl.polarity is not Polarity.IN:
            return f"{decl.name} is an output; only inputs may be read here"
        return None

    def body_read(decl):
        if decl.polarity is Polarity.IN or strong:
            return None
        return f"weakly-causal {spec.name} cannot read its own output {decl.name}"

    def any_channel(decl):
        return None

    # assumptions
    for a in spec.assumptions:
        p = a.pred
        if isinstance(p, (TsPred, MsgPred)):
            decl = spec.channel(p.channel)
            if decl is None:
                err(f"unknown channel {p.channel}", a.span, a.label)
            elif decl.polarity is not Polarity.IN:
                err(f"assumption on output {p.channel}", a.span, a.label)
            if isinstance(p, MsgPred) and (type(p.k) is not int or p.k < 0):
                err("msg bound must be a natural number", a.span, a.label)
        elif isinstance(p, IntervalPred):
            chk.check(p.expr, BOOL, Env(spec, inputs_only, label=a.label))
            _no_locals(p.expr, err, a)
        elif isinstance(p, StreamEqPred):
            err("stream equality is a guarantee, not an assumption", a.span, a.label)
        elif not isinstance(p, TruePred):
            err(f"unsupported assumption {p!r}", a.span, a.label)

    # initial guarantees
    init_seen = set()
    for g in spec.initial:
        if not strong:
            err(f"weakly-causal {spec.name} has no delayed outputs to initialise", g.span, g.label)
        decl = spec.channel(g.channel)
        if decl is None or decl.polarity is not Polarity.OUT:
            err(f"{g.channel} is not an output channel", g.span, g.label)
            continue
        if g.channel in init_seen:
            err(f"second initial guarantee for {g.channel}", g.span, g.label)
        init_seen.add(g.channel)
        if _uses_interval(g.expr) or any(isinstance(x, ChoiceRef) for x in walk(g.expr)):
            err("initial guarantees must be constant", g.span, g.label)
            continue
        chk.check(g.expr, ListType(decl.type), Env(spec, any_channel, label=g.label))

    # transition rules
    unguarded_targets = {}
    guarded_targets = {}
    for r in spec.rules:
        names = [c.var for c in r.choices]
        for c in r.choices:
            ident(c.var, "choice variable", r.span)
            if c.var in seen or c.var in cons:
                err(f"choose variable {c.var} shadows another name", r.span, r.label)
            if type(c.lo) is not int or type(c.hi) is not int or c.lo < 0 or c.lo > c.hi:
                err(f"empty or invalid choose range {c.lo}..{c.hi}", r.span, r.label)
        if len(set(names)) != len(names):
            err("choose variable bound twice", r.span, r.label)
        if r.guard is not None:
            chk.check(r.guard, BOOL, Env(spec, inputs_only, label=r.label))
            if any(isinstance(x, ChoiceRef) for x in walk(r.guard)):
                err("guards cannot use choose variables", r.span, r.label)
        env = Env(spec, body_read, names, r.label)
        _check_block(r.body, spec, env, chk)
        for conds, assigns in paths(r.body):
            targets = [a.target for a in assigns]
            for t in set(targets):
                if targets.count(t) > 1:
                    err(f"{_target_name(t)} assigned more than once", r.span, r.label)
        bucket = guarded_targets if r.guard is not None else unguarded_targets
        for t in block_targets(r.body):
            bucket.setdefault(t, []).append(r.label)
    for t, labs in unguarded_targets.items():
        if len(labs) > 1:
            err(f"{_target_name(t)} assigned by unconditional rules {', '.join(labs)}", spec.span)
        if t in guarded_targets:
            err(f"{_target_name(t)} assigned by unconditional rule {labs[0]} and by guarded "
                f"rule {guarded_targets[t][0]}", spec.span)

    # monitor-only guarantees
    for g in spec.guarantees:
        p = g.pred
        if isinstance(p, (TsPred, MsgPred)):
            if spec.channel(p.channel) is None:
                err(f"unknown channel {p.channel}", g.span, g.label)
        elif isinstance(p, IntervalPred):
            chk.check(p.expr, BOOL, Env(spec, any_channel, label=g.label))
            _no_locals(p.expr, err, g)
        elif isinstance(p, StreamEqPred):
            a, b = spec.channel(p.left), spec.channel(p.right)
            if a is None or b is None:
                err(f"unknown channel in {p.left} = {p.right}", g.span, g.label)
            elif a.type != b.type:
                err(f"{p.left} and {p.right} carry different types", g.span, g.label)
        elif not isinstance(p, TruePred):
            err(f"unsupported guarantee {p!r}", g.span, g.label)
    return diags


def _no_locals(expr, err, item):
    if any(isinstance(x, (LocalRef, ChoiceRef)) for x in walk(expr)):
        err("stream predicates cannot refer to local variables", item.span, item.label)


def _target_name(t):
    return f"{t.name}'" if isinstance(t, LocalTarget) else t.channel


def _check_block(block, spec, env, chk):
    for item in block.items:
        if isinstance(item, Assign):
            t = item.target
            if isinstance(t, LocalTarget):
                typ = env.locals.get(t.name)
                if typ is None:
                    chk.error(f"{t.name}' assigns an undeclared local", item.span, env.label)
                    continue
                chk.check(item.expr, typ, env)
            else:
                decl = spec.channel(t.channel)
                if decl is None:
                    chk.error(f"unknown channel {t.channel}", item.span, env.label)
                    continue
                if decl.polarity is not Polarity.OUT:
                    chk.error(f"cannot assign input channel {t.channel}", item.span, env.label)
                    continue
                if t.channel in spec.mirrors():
                    chk.error(f"{t.channel} is defined by stream equality and cannot be assigned",
                              item.span, env.label)
                chk.check(item.expr, ListType(decl.type), env)
        else:
            chk.check(item.cond, BOOL, env)
            _check_block(item.then, spec, env, chk)
            _check_block(item.orelse, spec, env, chk)


def errors_only(diags):
    return [d for d in diags if d.severity is Severity.ERROR]


# -- networks -------------------------------------------------------------------

def same_step_edges(net: Network):
    """(producer, consumer) instance pairs connected with zero delay."""
    edges = []
    for w in net.wires:
        if "." not in w.source:
            continue
        src = net.instance(w.source.split(".", 1)[0])
        dst = w.target.split(".", 1)[0]
        if src is not None and src.spec.causality is Causality.WEAK:
            edges.append((src.name, dst))
    return edges


def topological_order(net: Network):
    """Firing order within one time interval.

    A weakly-causal producer must fire before every consumer of its output;
    delayed (strongly-causal) outputs are already fixed at the start of the
    interval and impose no ordering.
    """
    ts = graphlib.TopologicalSorter()
    for inst in net.instances:
        ts.add(inst.name)
    for src, dst in same_step_edges(net):
        ts.add(dst, src)
    try:
        order = list(ts.static_order())
    except graphlib.CycleError as exc:
        raise CausalityCycle(exc.args[1]) from None
    by_name = {i.name: i for i in net.instances}
    return [by_name[n] for n in order]


def validate_network(net: Network) -> list[Diagnostic]:
    diags = []

    def err(msg, span=None, label=None):
        diags.append(Diagnostic(Severity.ERROR, msg, span, label))

    names = [i.name for i in net.instances] + [s.name for s in net.stimuli]
    for n in set(names):
        if names.count(n) > 1:
            err(f"{n} declared twice in network {net.name}", net.span)
    for i in net.instances:
        if not IDENT.match(i.name):
            err(f"invalid instance name {i.name!r}", i.span)
        for d in errors_only(validate(i.spec)):
            diags.append(Diagnostic(d.severity, f"{i.name}: {d.message}", d.span, d.label))
    targets = {}
    for w in net.wires:
        if w.target in targets:
            err(f"{w.target} wired twice", w.span)
        targets[w.target] = w.source
        dst_inst = net.instance(w.target.split(".", 1)[0]) if "." in w.target else None
        if dst_inst is None:
            err(f"unknown component in wire target {w.target}", w.span)
            continue
        ddecl = dst_inst.spec.channel(w.target.split(".", 1)[1])
        if ddecl is None or ddecl.polarity is not Polarity.IN:
            err(f"{w.target} is not an input channel", w.span)
            continue
        if "." in w.source:
            src_inst = net.instance(w.source.split(".", 1)[0])
            sdecl = src_inst.spec.channel(w.source.split(".", 1)[1]) if src_inst else None
            if src_inst is None:
                err(f"unknown component in wire source {w.source}", w.span)
                continue
            if sdecl is None or sdecl.polarity is not Polarity.OUT:
                err(f"{w.source} is not an output channel", w.span)
                continue
            stype = sdecl.type
        else:
            stim = net.stimulus(w.source)
            if stim is None:
                err(f"unknown stimulus {w.source}", w.span)
                continue
            stype = stim.type
        if stype != ddecl.type:
            err(f"type mismatch: {w.source} carries {stype}, {w.target} expects {ddecl.type}",
                w.span)
    for i in net.instances:
        for c in i.spec.inputs:
            if f"{i.name}.{c.name}" not in targets:
                err(f"unwired input channel {i.name}.{c.name}", i.span)
    for p in net.properties:
        if p.spec.rules or p.spec.initial:
            err(f"property {p.name} must consist of predicates only", p.span)
        for d in errors_only(validate(p.spec)):
            diags.append(Diagnostic(d.severity, f"{p.name}: {d.message}", d.span, d.label))
        bound = dict(p.bindings)
        for c in p.spec.channels:
            if c.name not in bound:
                err(f"property {p.name}: channel {c.name} is not bound", p.span)
        for pc, src in p.bindings:
            decl = p.spec.channel(pc)
            if decl is None:
                err(f"property {p.name} has no channel {pc}", p.span)
                continue
            typ = net.channel_type(src)
            if typ is None:
                err(f"unknown network channel {src}", p.span)
            elif typ != decl.type:
                err(f"type mismatch: {src} carries {typ}, {p.name}.{pc} expects {decl.type}",
                    p.span)
    if not diags:
        try:
            topological_order(net)
        except CausalityCycle as exc:
            err(str(exc), net.span)
    return diags
