"""Translate a network into Python source for fast interval-by-interval execution.

The whole network becomes two generated functions sharing one step body:

``_run(horizon, ...)``
    keeps every local, pending output and channel interval in a Python local
    variable and loops over time, recording channel histories and state
    snapshots;
``_step(state, t, externals, ...)``
    performs a single time interval on an explicit state tuple.

Naming scheme inside the generated code (i = instance index, k = local index,
j = output index, s = stimulus index):

``L{i}_{k}``  local at the start of the interval      ``N{i}_{k}``  its next value
``O{i}_{j}``  output interval emitted this interval   ``P{i}_{j}``  pending delayed output
``E{s}``      stimulus interval                        ``C{i}_{r}_{v}`` choose witness

Effects of a rule are committed only after all of its right-hand sides have
been evaluated, so a rule that faults (``ft`` of an empty interval, wrong
record variant) leaves no partial update behind.
"""
from __future__ import annotations

from .errors import EmptyIntervalError, FocusError, SelectorError, StepError
from .model import (
    Assign, BinOp, BoolLit, Causality, ChoiceRef, EnumLit, First, IfExpr, IntervalRef,
    ListLit, LocalRef, LocalTarget, NatLit, Network, Not, OutputTarget, RecordLit, Select,
    block_targets,
)
from .stream import RecordType, RecordValue
from .validate import constructors, topological_order

PY_OPS = {"=": "==", "/=": "!=", "<": "<", "<=": "<=", ">": ">", ">=": ">="}


def _empty():
    raise EmptyIntervalError("ft of an empty interval")


def _ft(x):
    if not x:
        raise EmptyIntervalError("ft of an empty interval")
    return x[0]


def _sel(value, index_by_con):
    i = index_by_con.get(value.con)
    if i is None:
        raise SelectorError(f"selector not defined for variant {value.con}")
    return value.fields[i]


HELPERS = {"_empty": _empty, "_ft": _ft, "_sel": _sel, "_R": RecordValue, "_Fault": FocusError,
           "_StepError": StepError}


class ExprContext:
    """How names in one expression map to generated variables."""

    def __init__(self, unit, local=None, choice=None, channel=None, where="0,''"):
        self.unit = unit
        self.local = local or (lambda n: _missing("local", n))
        self.choice = choice or (lambda n: _missing("choice", n))
        self.channel = channel or (lambda n: _missing("channel", n))
        self.where = where  # "instance, label" literal passed to the underflow hook


def _missing(kind, name):
    raise KeyError(f"no {kind} {name} in this context")


class CodeUnit:
    """Accumulates constants and temporaries for one generated module."""

    def __init__(self, types):
        self.ns = dict(HELPERS)
        self.cons = constructors(types)
        self._n = 0

    def fresh(self, prefix="_v"):
        self._n += 1
        return f"{prefix}{self._n}"

    def const(self, value):
        if value is None or type(value) in (int, bool, str):
            return repr(value)
        name = self.fresh("_K")
        self.ns[name] = value
        return name

    def expr(self, e, ctx: ExprContext) -> str:
        go = lambda x: self.expr(x, ctx)  # noqa: E731
        if isinstance(e, NatLit):
            return repr(e.value)
        if isinstance(e, BoolLit):
            return "True" if e.value else "False"
        if isinstance(e, EnumLit):
            if isinstance(self.cons.get(e.name), RecordType):
                return self.const(RecordValue(e.name, ()))
            return repr(e.name)
        if isinstance(e, RecordLit):
            args = "".join(go(a) + ", " for a in e.args)
            return f"_R({e.con!r}, ({args}))"
        if isinstance(e, Select):
            return f"_sel({go(e.expr)}, {self._selector_map(e.selector)})"
        if isinstance(e, LocalRef):
            return ctx.local(e.name)
        if isinstance(e, ChoiceRef):
            return ctx.choice(e.name)
        if isinstance(e, IntervalRef):
            return ctx.channel(e.channel)
        if isinstance(e, ListLit):
            return "(" + "".join(go(i) + ", " for i in e.items) + ")"
        if isinstance(e, First):
            inner = go(e.expr)
            if inner.isidentifier():
                return f"({inner}[0] if {inner} else _empty())"
            return f"_ft({inner})"
        if isinstance(e, Not):
            return f"(not {go(e.expr)})"
        if isinstance(e, IfExpr):
            return f"({go(e.then)} if {go(e.cond)} else {go(e.orelse)})"
        if isinstance(e, BinOp):
            a, b = go(e.left), go(e.right)
            if e.op == "+":
                return f"({a} + {b})"
            if e.op == "-":
                v = self.fresh("_d")
                return f"({v} if ({v} := {a} - {b}) >= 0 else _under({v}, t, {ctx.where}))"
            if e.op == "and":
                return f"({a} and {b})"
            if e.op == "or":
                return f"({a} or {b})"
            if e.op == "->":
                return f"((not {a}) or {b})"
            return f"({a} {PY_OPS[e.op]} {b})"
        raise TypeError(f"cannot compile {e!r}")

    def _selector_map(self, selector):
        mapping = {}
        for typ in set(self.cons.values()):
            if isinstance(typ, RecordType):
                for v in typ.variants:
                    for idx, (sel, _) in enumerate(v.selectors):
                        if sel == selector:
                            mapping[v.constructor] = idx
        return self.const(mapping)


class Lines:
    def __init__(self):
        self.lines = []

    def add(self, indent, text):
        self.lines.append("    " * indent + text)

    def text(self):
        return "\n".join(self.lines) + "\n"


class NetworkCompiler:
    def __init__(self, net: Network):
        self.net = net
        types = []
        for inst in net.instances:
            types.extend(inst.spec.types)
        self.unit = CodeUnit(types)
        self.order = topological_order(net)
        self.index = {inst.name: i for i, inst in enumerate(net.instances)}
        self.stim_index = {s.name: k for k, s in enumerate(net.stimuli)}
        self.post_update = net.post_update
        wiring = net.wiring
        # output variable for every "inst.port" and stimulus name
        self.source_var = {}
        for i, inst in enumerate(net.instances):
            for j, c in enumerate(inst.spec.outputs):
                self.source_var[f"{inst.name}.{c.name}"] = f"O{i}_{j}"
        for k, s in enumerate(net.stimuli):
            self.source_var[s.name] = f"E{k}"
        self.input_var = {}
        for inst in net.instances:
            for c in inst.spec.inputs:
                self.input_var[(inst.name, c.name)] = self.source_var[wiring[f"{inst.name}.{c.name}"]]

    # -- per-instance layout --------------------------------------------------------
    def local_vars(self, i):
        spec = self.net.instances[i].spec
        return [f"L{i}_{k}" for k in range(len(spec.locals))]

    def pending_vars(self, i):
        spec = self.net.instances[i].spec
        if spec.causality is not Causality.STRONG:
            return []
        return [f"P{i}_{j}" for j in range(len(spec.outputs))]

    def state_vars(self):
        out = []
        for i in range(len(self.net.instances)):
            out += self.local_vars(i) + self.pending_vars(i)
        return out

    def output_vars(self):
        out = []
        for i, inst in enumerate(self.net.instances):
            out += [f"O{i}_{j}" for j in range(len(inst.spec.outputs))]
        return out

    # -- code generation ----------------------------------------------------------------
    def generate(self) -> str:
        body = Lines()
        for inst in self.order:
            self.component(body, self.index[inst.name], 0)
        body_lines = body.lines

        state = self.state_vars()
        outs = self.output_vars()
        stims = [f"E{k}" for k in range(len(self.net.stimuli))]
        emit = []
        for i, inst in enumerate(self.net.instances):
            if inst.spec.causality is Causality.STRONG:
                emit += [f"O{i}_{j} = P{i}_{j}" for j in range(len(inst.spec.outputs))]

        src = Lines()
        hooks = "_bits, _CH, _fault, _under, _nondet"
        # single step on an explicit state
        src.add(0, f"def _step(_state, t, _E, {hooks}):")
        if state:
            src.add(1, f"({', '.join(state)},) = _state")
        for k, v in enumerate(stims):
            src.add(1, f"{v} = _E[{k}]")
        for line in emit:
            src.add(1, line)
        for line in body_lines:
            src.add(1, line)
        src.add(1, f"return ({''.join(v + ', ' for v in state)}), ({''.join(v + ', ' for v in outs)})")
        src.add(0, "")
        # whole run
        src.add(0, f"def _run(horizon, _state, _X, {hooks}):")
        if state:
            src.add(1, f"({', '.join(state)},) = _state")
        hist = [f"H_{v}" for v in outs + stims]
        snaps = [f"S{i}" for i in range(len(self.net.instances))]
        for h in hist + snaps:
            src.add(1, f"{h} = []")
        for k, v in enumerate(stims):
            src.add(1, f"_X{k} = _X[{k}]")
        src.add(1, "t = 0")
        src.add(1, "try:")
        src.add(2, "for t in range(horizon):")
        for k, v in enumerate(stims):
            src.add(3, f"{v} = _X{k}(t)")
        for line in emit:
            src.add(3, line)
        for i in range(len(self.net.instances)):
            lv = self.local_vars(i)
            src.add(3, f"S{i}.append(({''.join(v + ', ' for v in lv)}))")
        for line in body_lines:
            src.add(3, line)
        for h, v in zip(hist, outs + stims):
            src.add(3, f"{h}.append({v})")
        src.add(1, "except Exception as _x:")
        src.add(2, "raise _StepError(t, _x) from _x")
        src.add(1, f"return ({''.join(v + ', ' for v in state)}), "
                   f"[{', '.join(hist)}], [{', '.join(snaps)}]")
        return src.text()

    def component(self, out: Lines, i, ind):
        inst = self.net.instances[i]
        spec = inst.spec
        strong = spec.causality is Causality.STRONG
        local_idx = {v.name: k for k, v in enumerate(spec.locals)}
        out_idx = {c.name: j for j, c in enumerate(spec.outputs)}
        mirrors = spec.mirrors()
        assigned_locals = set()
        for r in spec.rules:
            assigned_locals |= {t.name for t in block_targets(r.body) if isinstance(t, LocalTarget)}
        if self.post_update:
            assigned_locals = set(local_idx)
        assigned_locals = sorted(assigned_locals, key=local_idx.get)

        def write_var(target):
            if isinstance(target, LocalTarget):
                return f"N{i}_{local_idx[target.name]}"
            j = out_idx[target.channel]
            return f"P{i}_{j}" if strong else f"O{i}_{j}"

        def channel(name):
            if name in out_idx:
                return f"O{i}_{out_idx[name]}"
            return self.input_var[(inst.name, name)]

        def ctx_for(label, choices, locals_prefix="L"):
            cmap = {c.var: f"C{i}_{label}_{c.var}" for c in choices}
            return ExprContext(
                self.unit,
                local=lambda n: f"{locals_prefix}{i}_{local_idx[n]}",
                choice=lambda n: cmap[n],
                channel=channel,
                where=f"{i}, {label!r}",
            )

        out.add(ind, f"# {inst.name}: {spec.name} ({spec.causality.value} causal)")
        for name in assigned_locals:
            k = local_idx[name]
            out.add(ind, f"N{i}_{k} = L{i}_{k}")
        for c in spec.outputs:
            if c.name not in mirrors:
                out.add(ind, f"{write_var(OutputTarget(c.name))} = ()")

        unguarded = [r for r in spec.rules if r.guard is None]
        guarded = [r for r in spec.rules if r.guard is not None]
        if self.post_update:
            phases = [("locals", True), ("outputs", False)]
        else:
            phases = [("all", True)]

        for phase, first in phases:
            def keep(target, phase=phase):
                if phase == "all":
                    return True
                return isinstance(target, LocalTarget) == (phase == "locals")

            def rule_code(r, ind):
                cond_ctx = ctx_for(r.label, r.choices)
                val_ctx = ctx_for(r.label, r.choices, "N" if phase == "outputs" else "L")
                out.add(ind, "try:")
                if first:
                    for c in r.choices:
                        var = f"C{i}_{r.label}_{c.var}"
                        # same rejection sampling as ChoiceStream.draw, inlined
                        span = c.hi - c.lo + 1
                        k = span.bit_length()
                        out.add(ind + 1, f"{var} = _bits({k})")
                        out.add(ind + 1, f"while {var} >= {span}:")
                        out.add(ind + 2, f"{var} = _bits({k})")
                        out.add(ind + 1, f"{var} += {c.lo}")
                        out.add(ind + 1, f"_CH.append((t, {inst.name!r}, {r.label!r}, {c.var!r}, {var}))")
                n0 = len(out.lines)
                self.block(out, list(r.body.items), [], ind + 1, cond_ctx, val_ctx, write_var, keep)
                if len(out.lines) == n0:
                    out.add(ind + 1, "pass")
                out.add(ind, "except _Fault as _e:")
                out.add(ind + 1, f"_fault(t, {i}, {r.label!r}, _e)")

            for r in unguarded:
                rule_code(r, ind)
            if guarded:
                if first:
                    out.add(ind, f"_en{i} = 0")
                    for bit, r in enumerate(guarded):
                        gctx = ctx_for(r.label, ())
                        out.add(ind, "try:")
                        out.add(ind + 1, f"if {self.unit.expr(r.guard, gctx)}:")
                        out.add(ind + 2, f"_en{i} |= {1 << bit}")
                        out.add(ind, "except _Fault as _e:")
                        out.add(ind + 1, f"_fault(t, {i}, {r.label!r}, _e)")
                    out.add(ind, f"if _en{i} & (_en{i} - 1):")
                    out.add(ind + 1, f"_nondet(t, {i}, _en{i})")
                for bit, r in enumerate(guarded):
                    kw = "if" if bit == 0 else "elif"
                    out.add(ind, f"{kw} _en{i} & {1 << bit}:")
                    rule_code(r, ind + 1)

        for name in assigned_locals:
            k = local_idx[name]
            out.add(ind, f"L{i}_{k} = N{i}_{k}")
        for dst, src in mirrors.items():
            out.add(ind, f"{write_var(OutputTarget(dst))} = {write_var(OutputTarget(src))}")

    def block(self, out, items, acc, ind, cond_ctx, val_ctx, write_var, keep):
        """Emit the decision tree for a rule body; leaves commit their assignments."""
        if not items:
            chosen = [a for a in acc if keep(a.target)]
            if len(chosen) == 1:
                a = chosen[0]
                out.add(ind, f"{write_var(a.target)} = {self.unit.expr(a.expr, val_ctx)}")
            elif chosen:
                temps = []
                for a in chosen:
                    v = self.unit.fresh()
                    temps.append((v, a))
                    out.add(ind, f"{v} = {self.unit.expr(a.expr, val_ctx)}")
                for v, a in temps:
                    out.add(ind, f"{write_var(a.target)} = {v}")
            return
        head, rest = items[0], items[1:]
        if isinstance(head, Assign):
            self.block(out, rest, acc + [head], ind, cond_ctx, val_ctx, write_var, keep)
            return
        out.add(ind, f"if {self.unit.expr(head.cond, cond_ctx)}:")
        n0 = len(out.lines)
        self.block(out, list(head.then.items) + rest, acc, ind + 1, cond_ctx, val_ctx, write_var, keep)
        if len(out.lines) == n0:
            out.add(ind + 1, "pass")
        out.add(ind, "else:")
        n0 = len(out.lines)
        self.block(out, list(head.orelse.items) + rest, acc, ind + 1, cond_ctx, val_ctx, write_var, keep)
        if len(out.lines) == n0:
            out.add(ind + 1, "pass")


def compile_network(net: Network):
    """Return (source, namespace) with ``_step`` and ``_run`` defined."""
    nc = NetworkCompiler(net)
    source = nc.generate()
    ns = nc.unit.ns
    exec(compile(source, f"<focusst network {net.name}>", "exec"), ns)
    return nc, source, ns


def compile_expr_function(expr, params, types, under=None):
    """Compile ``expr`` into ``f(t, *intervals)`` where channel names map to ``params``.

    Used by the monitors for ``forall t:`` predicates and for constant
    initial guarantees.
    """
    unit = CodeUnit(types)
    index = {p: f"_a{k}" for k, p in enumerate(params)}
    ctx = ExprContext(unit, channel=lambda n: index[n], where="-1, ''")
    code = unit.expr(expr, ctx)
    unit.ns["_under"] = under or (lambda v, t, i, label: 0)
    args = "".join(f", _a{k}" for k in range(len(params)))
    src = f"def _f(t{args}):\n    return {code}\n"
    exec(compile(src, "<focusst expr>", "exec"), unit.ns)
    return unit.ns["_f"]
