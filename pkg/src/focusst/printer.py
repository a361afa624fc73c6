"""Canonical text for specifications; ``parse_spec(pretty_print(s)) == s``."""
from __future__ import annotations

from .model import (
    Assign, BinOp, BoolLit, Causality, ChoiceRef, ComponentSpec, EnumLit, First, IfExpr,
    IntervalPred, IntervalRef, ListLit, LocalRef, LocalTarget, MsgPred, NatLit,
    Network, Not, RecordLit, Select, StreamEqPred, TruePred, TsPred,
)
from .stream import (BitType, BoolType, ConstGenerator, CycleGenerator, EnumType, ListType,
                     NatType, UniformGenerator, format_value)

# binding strength; higher binds tighter
PREC = {"->": 1, "or": 2, "and": 3, "not": 4, "cmp": 5, "+": 6, "-": 6, "postfix": 7, "atom": 8}


def type_name(typ) -> str:
    if isinstance(typ, NatType):
        return "Nat"
    if isinstance(typ, BitType):
        return "Bit"
    if isinstance(typ, BoolType):
        return "Bool"
    if isinstance(typ, ListType):
        return f"<{type_name(typ.element)}>"
    return typ.name


def type_decl(typ) -> str:
    if isinstance(typ, EnumType):
        return f"type {typ.name} = " + " | ".join(typ.constructors)
    alts = []
    for v in typ.variants:
        sels = ", ".join(f"{s}: {type_name(t)}" for s, t in v.selectors)
        alts.append(f"{v.constructor}({sels})")
    return f"type {typ.name} = " + " | ".join(alts)


def _prec(e):
    if isinstance(e, BinOp):
        return PREC["cmp"] if e.op in ("=", "/=", "<", "<=", ">", ">=") else PREC[e.op]
    if isinstance(e, Not):
        return PREC["not"]
    if isinstance(e, Select):
        return PREC["postfix"]
    return PREC["atom"]


def expr(e, min_prec=0) -> str:
    text = _expr(e)
    return f"({text})" if _prec(e) < min_prec else text


def _expr(e) -> str:
    if isinstance(e, NatLit):
        return str(e.value)
    if isinstance(e, BoolLit):
        return "true" if e.value else "false"
    if isinstance(e, (EnumLit,)):
        return e.name
    if isinstance(e, (LocalRef, ChoiceRef)):
        return e.name
    if isinstance(e, RecordLit):
        return f"{e.con}(" + ", ".join(expr(a) for a in e.args) + ")"
    if isinstance(e, Select):
        return f"{expr(e.expr, PREC['postfix'])}.{e.selector}"
    if isinstance(e, IntervalRef):
        return f"{e.channel}[t]"
    if isinstance(e, ListLit):
        return "<" + ", ".join(expr(i, PREC["+"]) for i in e.items) + ">"
    if isinstance(e, First):
        return f"ft({expr(e.expr)})"
    if isinstance(e, Not):
        return f"not {expr(e.expr, PREC['not'])}"
    if isinstance(e, IfExpr):
        return f"if {expr(e.cond)} then {expr(e.then)} else {expr(e.orelse)} fi"
    if isinstance(e, BinOp):
        p = _prec(e)
        if e.op == "->":
            return f"{expr(e.left, p + 1)} -> {expr(e.right, p)}"
        if p == PREC["cmp"]:
            return f"{expr(e.left, p + 1)} {e.op} {expr(e.right, p + 1)}"
        return f"{expr(e.left, p)} {e.op} {expr(e.right, p + 1)}"
    raise TypeError(f"cannot print {e!r}")


def pred(p) -> str:
    if isinstance(p, TsPred):
        return f"ts({p.channel})"
    if isinstance(p, MsgPred):
        return f"msg({p.channel}, {p.k})"
    if isinstance(p, TruePred):
        return "true"
    if isinstance(p, IntervalPred):
        return f"forall t: {expr(p.expr)}"
    if isinstance(p, StreamEqPred):
        return f"{p.left} = {p.right}"
    raise TypeError(f"cannot print {p!r}")


def _target(t, strong):
    if isinstance(t, LocalTarget):
        return f"{t.name}'"
    return f"{t.channel}[t+1]" if strong else f"{t.channel}[t]"


def block(b, strong, indent) -> str:
    if not b.items:
        return "skip"
    parts = []
    for item in b.items:
        if isinstance(item, Assign):
            parts.append(f"{_target(item.target, strong)} = {expr(item.expr, PREC['not'])}")
        else:
            pad = " " * (indent + 2)
            parts.append(
                f"if {expr(item.cond)}\n"
                f"{pad}then {block(item.then, strong, indent + 4)}\n"
                f"{pad}else {block(item.orelse, strong, indent + 4)}\n"
                f"{pad}fi")
    sep = "\n" + " " * indent + "and "
    return sep.join(parts)


def pretty_print(spec: ComponentSpec, with_types: bool = True) -> str:
    """Canonical source text for ``spec``, including the types it can see."""
    out = []
    if with_types:
        out.extend(type_decl(t) for t in spec.types)
        if spec.types:
            out.append("")
    strong = spec.causality is Causality.STRONG
    out.append(f"spec {spec.name} {spec.causality.value} causal")
    for c in spec.channels:
        out.append(f"  {c.polarity.value} {c.name}: {type_name(c.type)}")
    for v in spec.locals:
        out.append(f"  local {v.name}: {type_name(v.type)} = {format_value(v.init.value)}")
    out.append("  asm")
    for a in spec.assumptions:
        out.append(f"    {a.label}: {pred(a.pred)}")
    out.append("  gar")
    for g in spec.initial:
        out.append(f"    {g.label}: {g.channel}[0] = {expr(g.expr)}")
    for label, item in _merge(spec.rules, spec.guarantees):
        if hasattr(item, "pred"):
            out.append(f"    {label}: {pred(item.pred)}")
            continue
        head = f"    {label}: "
        if item.choices:
            head += ", ".join(f"choose {c.var} in {c.lo}..{c.hi}" for c in item.choices) + ";\n      "
        if item.guard is not None:
            head += f"{expr(item.guard)}\n      ==> "
        out.append(head + block(item.body, strong, 6))
    return "\n".join(out) + "\n"


def _merge(rules, preds):
    # interleave by label number while keeping each list's own order, so the
    # parser (which separates them again) reproduces both exactly
    rules, preds = list(rules), list(preds)
    while rules or preds:
        if preds and (not rules or _label_key(preds[0].label) < _label_key(rules[0].label)):
            item = preds.pop(0)
        else:
            item = rules.pop(0)
        yield item.label, item


def _label_key(label):
    digits = "".join(ch for ch in label if ch.isdigit())
    return (label.rstrip("0123456789"), int(digits) if digits else 0, label)


def _generator(g) -> str:
    if isinstance(g, UniformGenerator):
        return f"uniform {g.lo}..{g.hi}"
    if isinstance(g, CycleGenerator):
        return "cycle " + ", ".join(format_value(iv) for iv in g.intervals)
    if isinstance(g, ConstGenerator):
        return "silent" if not g.interval else f"const {format_value(g.interval)}"
    raise TypeError(f"generator {g!r} has no textual form")


def print_network(net: Network) -> str:
    out = [f"network {net.name}"]
    out.extend(f'  uses "{u}"' for u in net.uses)
    out.extend(f"  component {i.name}: {i.spec.name}" for i in net.instances)
    out.extend(f"  stimulus {s.name}: {type_name(s.type)} = {_generator(s.generator)}"
               for s in net.stimuli)
    out.extend(f"  connect {w.source} -> {w.target}" for w in net.wires)
    for p in net.properties:
        binds = ", ".join(f"{a} = {b}" for a, b in p.bindings)
        out.append(f"  property {p.name}({binds})")
    if net.post_update:
        out.append("  option post_update")
    return "\n".join(out) + "\nend\n"
