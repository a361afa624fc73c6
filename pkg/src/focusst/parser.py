"""Lexer and recursive-descent parser for ``.fst`` sources.

A source file holds type declarations, component specifications and
networks, in any number::

    type WaterPumpState = PumpOn | PumpOff

    spec Controller weakly causal
      in  waterLevel: Nat
      out controlSignal: Bit
      local pump: WaterPumpState = PumpOff
      asm
        A1: ts(waterLevel)
      gar
        B1: pump = PumpOff and ft(waterLevel[t]) > 300 ==> pump' = PumpOff and controlSignal = <>
        ...

The grammar is token based; line breaks are insignificant.  Comments run
from ``--`` to the end of the line.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field, replace

from .errors import SpecError
from .model import (
    Assign, BinOp, Block, BoolLit, Causality, ChannelDecl, Choice, ChoiceRef, ComponentSpec,
    Diagnostic, EnumLit, First, IfExpr, IfStmt, InitialGuarantee, Instance, IntervalPred,
    IntervalRef, Labeled, ListLit, LocalRef, LocalTarget, LocalVarDecl, MsgPred, NatLit, Network,
    Not, OutputTarget, Polarity, PropertyBinding, RecordLit, Select, Severity, SourceSpan,
    Stimulus, StreamEqPred, TransitionRule, TruePred, TsPred, Wire,
)
from .stream import (BIT, BOOL, NAT, ConstGenerator, CycleGenerator, EnumType, ListType,
                     Message, RecordType, RecordValue, UniformGenerator, Variant)
from .errors import TypeMismatch
from .validate import constructors, errors_only, validate, validate_network

KEYWORDS = {
    "spec", "weakly", "strongly", "causal", "in", "out", "local", "init", "asm", "gar", "end",
    "type", "if", "then", "else", "fi", "choose", "and", "or", "not", "true", "false",
    "ts", "msg", "ft", "ti", "forall", "t", "skip", "network", "uses", "component",
    "connect", "stimulus", "property", "const", "cycle", "uniform", "silent", "option",
}
SECTION = {"in", "out", "local", "init", "asm", "gar", "end", "spec", "type", "network"}
TOP = {"spec", "type", "network"}
BUILTIN_TYPES = {"Nat": NAT, "Bool": BOOL, "Bit": BIT}

SYMBOLS = ["==>", "..", "->", "<=", ">=", "/=", "!=", "<>", "=", "<", ">", "+", "-",
           "(", ")", "[", "]", ",", ":", ";", ".", "@", "|", "'", "{", "}"]
UNICODE = {"∧": "and", "∨": "or", "¬": "not", "→": "->", "≤": "<=", "≥": ">=", "≠": "/=",
           "⟨": "<", "⟩": ">", "∀": "forall", "⇒": "==>"}
TOKEN_RE = re.compile(
    r"(?P<ws>[ \t\r]+)|(?P<nl>\n)|(?P<comment>--[^\n]*)"
    r"|(?P<ident>[A-Za-z_][A-Za-z0-9_]*)|(?P<nat>[0-9]+)|(?P<string>\"[^\"\n]*\")"
    r"|(?P<sym>" + "|".join(re.escape(s) for s in SYMBOLS) + ")"
    r"|(?P<uni>[" + "".join(UNICODE) + "])"
)


@dataclass
class Token:
    kind: str  # ident, kw, nat, string, sym, eof
    text: str
    line: int
    col: int

    def span(self, file):
        return SourceSpan(file, self.line, self.col, max(len(self.text), 1))


class ParseError(Exception):
    def __init__(self, message, token):
        super().__init__(message)
        self.token = token


def tokenize(text: str, file: str = "<input>"):
    tokens, diags = [], []
    line, line_start, pos = 1, 0, 0
    while pos < len(text):
        m = TOKEN_RE.match(text, pos)
        col = pos - line_start + 1
        if m is None:
            diags.append(Diagnostic(Severity.ERROR, f"unexpected character {text[pos]!r}",
                                    SourceSpan(file, line, col, 1)))
            pos += 1
            continue
        kind, val = m.lastgroup, m.group()
        if kind == "nl":
            line += 1
            line_start = m.end()
        elif kind == "ident":
            tokens.append(Token("kw" if val in KEYWORDS else "ident", val, line, col))
        elif kind == "nat":
            tokens.append(Token("nat", val, line, col))
        elif kind == "string":
            tokens.append(Token("string", val[1:-1], line, col))
        elif kind == "sym":
            tokens.append(Token("sym", val, line, col))
        elif kind == "uni":
            mapped = UNICODE[val]
            tokens.append(Token("kw" if mapped in KEYWORDS else "sym", mapped, line, col))
        pos = m.end()
    tokens.append(Token("eof", "", line, pos - line_start + 1))
    return tokens, diags


@dataclass
class NetworkDecl:
    """A parsed but not yet resolved network: component names are still strings."""
    name: str
    uses: list = field(default_factory=list)
    components: list = field(default_factory=list)   # (inst, spec name, span)
    wires: list = field(default_factory=list)
    stimuli: list = field(default_factory=list)
    properties: list = field(default_factory=list)   # (spec name, bindings, span)
    options: list = field(default_factory=list)
    span: SourceSpan = None


@dataclass
class SourceUnit:
    types: dict = field(default_factory=dict)
    specs: list = field(default_factory=list)
    networks: list = field(default_factory=list)
    diagnostics: list = field(default_factory=list)

    def spec(self, name):
        for s in self.specs:
            if s.name == name:
                return s
        return None


class Parser:
    def __init__(self, text, file="<input>"):
        self.file = file
        self.toks, self.diags = tokenize(text, file)
        self.i = 0
        self.types = {}
        self.causality = Causality.STRONG

    # -- token helpers --------------------------------------------------------------
    @property
    def tok(self):
        return self.toks[self.i]

    def peek(self, k=1):
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def at(self, text, kind=None):
        t = self.tok
        return t.text == text and t.kind in ((kind,) if kind else ("kw", "sym"))

    def advance(self):
        t = self.tok
        if t.kind != "eof":
            self.i += 1
        return t

    def accept(self, text):
        if self.at(text):
            return self.advance()
        return None

    def expect(self, text, what=None):
        if self.at(text):
            return self.advance()
        raise ParseError(f"expected {what or repr(text)}, found {self.describe(self.tok)}", self.tok)

    def ident(self, what="identifier"):
        if self.tok.kind == "ident":
            return self.advance()
        raise ParseError(f"expected {what}, found {self.describe(self.tok)}", self.tok)

    def nat(self):
        if self.tok.kind == "nat":
            return int(self.advance().text)
        raise ParseError(f"expected a natural number, found {self.describe(self.tok)}", self.tok)

    @staticmethod
    def describe(tok):
        return "end of input" if tok.kind == "eof" else repr(tok.text)

    def span(self, tok=None):
        return (tok or self.tok).span(self.file)

    def error(self, msg, tok=None):
        self.diags.append(Diagnostic(Severity.ERROR, msg, self.span(tok)))

    def item_start(self):
        t = self.tok
        if t.kind == "eof":
            return True
        if t.kind == "kw" and t.text in SECTION:
            return True
        return t.kind == "ident" and self.peek().text == ":" and self.peek().kind == "sym"

    def recover(self, stop, origin):
        """Skip to the next point where ``stop()`` holds, always past ``origin``."""
        if self.i == origin and self.tok.kind != "eof":
            self.advance()
        while not stop():
            self.advance()

    # -- top level ------------------------------------------------------------------
    def unit(self) -> SourceUnit:
        unit = SourceUnit(types=self.types)
        if self.tok.kind == "eof":
            self.error("expected spec header")
        while self.tok.kind != "eof":
            origin = self.i
            try:
                if self.at("type"):
                    self.type_decl()
                elif self.at("spec"):
                    unit.specs.append(self.spec_decl())
                elif self.at("network"):
                    unit.networks.append(self.network_decl())
                else:
                    raise ParseError(f"expected 'spec', 'type' or 'network', found "
                                     f"{self.describe(self.tok)}", self.tok)
            except ParseError as exc:
                self.error(str(exc), exc.token)
                self.recover(lambda: self.tok.kind == "eof" or
                             (self.tok.kind == "kw" and self.tok.text in TOP), origin)
        unit.diagnostics = self.diags
        return unit

    # -- types ----------------------------------------------------------------------
    def type_expr(self):
        if self.accept("<"):
            inner = self.type_expr()
            self.expect(">")
            return ListType(inner)
        if self.at("<>"):
            raise ParseError("expected an element type inside < >", self.tok)
        tok = self.ident("a type")
        if tok.text in BUILTIN_TYPES:
            return BUILTIN_TYPES[tok.text]
        if tok.text in self.types:
            return self.types[tok.text]
        raise ParseError(f"unknown type {tok.text}", tok)

    def type_decl(self):
        self.expect("type")
        name_tok = self.ident("a type name")
        name = name_tok.text
        if name in BUILTIN_TYPES or name in self.types:
            raise ParseError(f"type {name} already defined", name_tok)
        self.expect("=")
        if self.accept("{"):
            cons = [self.ident("a constructor").text]
            while self.accept(","):
                cons.append(self.ident("a constructor").text)
            self.expect("}")
            self.types[name] = self._enum(name, cons, name_tok)
            return
        if self.at("<") or (self.tok.kind == "ident" and self.tok.text in
                            set(BUILTIN_TYPES) | set(self.types) and not self.peek().text in ("|", "(")):
            self.types[name] = self.type_expr()
            return
        alts = [self.alternative()]
        while self.accept("|"):
            alts.append(self.alternative())
        if any(sels is not None for _, sels in alts):
            variants = tuple(Variant(c, tuple(sels or ())) for c, sels in alts)
            try:
                self.types[name] = RecordType(name, variants)
            except TypeMismatch as exc:
                raise ParseError(str(exc), name_tok)
        else:
            self.types[name] = self._enum(name, [c for c, _ in alts], name_tok)

    def _enum(self, name, cons, tok):
        try:
            return EnumType(name, tuple(cons))
        except TypeMismatch as exc:
            raise ParseError(str(exc), tok)

    def alternative(self):
        con = self.ident("a constructor").text
        if not self.accept("("):
            return con, None
        sels = []
        if not self.at(")"):
            while True:
                sel = self.ident("a selector").text
                self.expect(":")
                sels.append((sel, self.type_expr()))
                if not self.accept(","):
                    break
        self.expect(")")
        return con, sels

    # -- specs -----------------------------------------------------------------------
    def spec_decl(self) -> ComponentSpec:
        head = self.expect("spec")
        name = self.ident("a component name").text
        causality = Causality.STRONG
        if self.at("weakly") or self.at("strongly"):
            causality = Causality(self.advance().text)
            self.expect("causal")
        self.causality = causality
        channels, local_decls, asm, initial, items = [], [], [], [], []
        inits = []
        while True:
            if self.tok.kind == "eof" or (self.tok.kind == "kw" and self.tok.text in TOP):
                break
            if self.accept("end"):
                break
            origin = self.i
            try:
                if self.at("in") or self.at("out"):
                    pol = Polarity(self.advance().text)
                    channels.extend(self.channel_decls(pol))
                elif self.accept("local"):
                    local_decls.extend(self.local_decls())
                elif self.accept("init"):
                    inits.extend(self.init_decls())
                elif self.accept("asm"):
                    while self.tok.kind == "ident" and self.item_start():
                        asm.append(self.guarded_item(self.assumption_item))
                elif self.accept("gar"):
                    while self.tok.kind == "ident" and self.item_start():
                        item = self.guarded_item(self.gar_item)
                        if item is not None:
                            (initial if isinstance(item, InitialGuarantee) else items).append(item)
                else:
                    raise ParseError(f"expected a section keyword, found {self.describe(self.tok)}",
                                     self.tok)
            except ParseError as exc:
                self.error(str(exc), exc.token)
                self.recover(lambda: self.tok.kind == "eof" or (
                    self.tok.kind == "kw" and self.tok.text in SECTION), origin)
        spec = ComponentSpec(
            name=name, causality=causality, channels=tuple(channels), locals=(),
            assumptions=tuple(a for a in asm if a is not None), initial=tuple(initial),
            types=named_types(self.types), span=self.span(head))
        local_decls = self.merge_inits(local_decls, inits)
        spec = replace(spec, locals=tuple(self.resolve_local(spec, d) for d in local_decls))
        rules, preds = [], []
        for item in items:
            item = self.resolve_item(spec, item)
            if isinstance(item, TransitionRule):
                rules.append(item)
            else:
                preds.append(item)
        asm_resolved = tuple(self.resolve_pred_item(spec, a) for a in spec.assumptions)
        init_resolved = tuple(replace(g, expr=self.resolve_expr(spec, g.expr, ())) for g in initial)
        return replace(spec, rules=tuple(rules), guarantees=tuple(preds),
                       assumptions=asm_resolved, initial=init_resolved)

    def guarded_item(self, fn):
        origin = self.i
        try:
            return fn()
        except ParseError as exc:
            self.error(str(exc), exc.token)
            self.recover(self.item_start, origin)
            return None

    def channel_decls(self, pol):
        out = []
        while True:
            tok = self.ident("a channel name")
            self.expect(":")
            out.append(ChannelDecl(tok.text, self.type_expr(), pol, self.span(tok)))
            if not self.accept(","):
                return out

    def local_decls(self):
        out = []
        while True:
            tok = self.ident("a variable name")
            self.expect(":")
            typ = self.type_expr()
            value = self.additive() if self.accept("=") else None
            out.append((tok, typ, value))
            if not self.accept(","):
                return out

    def init_decls(self):
        out = []
        while True:
            tok = self.ident("a variable name")
            self.expect("=")
            out.append((tok, self.additive()))
            if not self.accept(","):
                return out

    def merge_inits(self, decls, inits):
        """Attach ``init v = e`` values to ``local v: T`` declarations."""
        given = {}
        for tok, value in inits:
            if tok.text in given:
                self.error(f"second initial value for {tok.text}", tok)
            given[tok.text] = (tok, value)
        out = []
        names = set()
        for tok, typ, value in decls:
            names.add(tok.text)
            if tok.text in given:
                if value is not None:
                    self.error(f"{tok.text} is initialised twice", given[tok.text][0])
                value = given[tok.text][1]
            if value is None:
                self.error(f"local {tok.text} has no initial value", tok)
            out.append((tok, typ, value))
        for name, (tok, _) in given.items():
            if name not in names:
                self.error(f"init for undeclared local {name}", tok)
        return out

    def label(self):
        tok = self.ident("a label")
        self.expect(":")
        return tok

    def assumption_item(self):
        lab = self.label()
        return Labeled(lab.text, self.stream_pred(), self.span(lab))

    def stream_pred(self):
        if self.accept("ts"):
            self.expect("(")
            ch = self.ident("a channel").text
            self.expect(")")
            return TsPred(ch)
        if self.accept("msg"):
            self.expect("(")
            ch = self.ident("a channel").text
            self.expect(",")
            k = self.nat()
            self.expect(")")
            return MsgPred(ch, k)
        if self.accept("forall"):
            self.expect("t")
            self.expect(":")
            return IntervalPred(self.expr())
        if self.accept("true"):
            return TruePred()
        raise ParseError(f"expected ts(..), msg(..), forall t: .. or true, found "
                         f"{self.describe(self.tok)}", self.tok)

    def gar_item(self):
        lab = self.label()
        span = self.span(lab)
        if self.at("ts") or self.at("msg") or self.at("forall") or (
                self.at("true") and self._ends_item(1)):
            return Labeled(lab.text, self.stream_pred(), span)
        # initial guarantee: y[0] = e  or  ti(y, 0) = e
        if self.tok.kind == "ident" and self.peek().text == "[" and self.peek(2).kind == "nat":
            ch = self.advance().text
            self.expect("[")
            if self.nat() != 0:
                raise ParseError("initial guarantees fix interval 0", self.tok)
            self.expect("]")
            self.expect("=")
            return InitialGuarantee(lab.text, ch, self.expr(), span)
        if self.at("ti") and self.peek(3).kind == "nat":
            self.advance()
            self.expect("(")
            ch = self.ident("a channel").text
            self.expect(",")
            if self.nat() != 0:
                raise ParseError("initial guarantees fix interval 0", self.tok)
            self.expect(")")
            self.expect("=")
            return InitialGuarantee(lab.text, ch, self.expr(), span)
        return self.rule(lab.text, span)

    def _ends_item(self, k):
        save = self.i
        self.i = min(self.i + k, len(self.toks) - 1)
        try:
            return self.item_start()
        finally:
            self.i = save

    def rule(self, label, span):
        choices = []
        while self.accept("choose"):
            var = self.ident("a variable").text
            self.expect("in")
            lo = self.nat()
            self.expect("..")
            hi = self.nat()
            choices.append(Choice(var, lo, hi))
            if not self.accept(","):
                self.expect(";")
                break
        guard = None
        if self._guard_ahead():
            guard = self.expr()
            self.expect("==>")
        body = self.block()
        return TransitionRule(label, body, guard, tuple(choices), span)

    def _guard_ahead(self):
        j = self.i
        while True:
            t = self.toks[j]
            if t.kind == "eof":
                return False
            if t.kind == "sym" and t.text == "==>":
                return True
            if t.kind == "kw" and t.text in SECTION and t.text != "in":
                return False
            if t.kind == "ident" and self.toks[j + 1].text == ":" and self.toks[j + 1].kind == "sym":
                return False
            j += 1

    # -- statements --------------------------------------------------------------------
    def block(self):
        if self.accept("skip"):
            return Block(())
        items = [self.stmt_item()]
        while self.accept("and"):
            items.append(self.stmt_item())
        return Block(tuple(items))

    def stmt_item(self):
        if self.at("if"):
            tok = self.advance()
            cond = self.expr()
            self.expect("then")
            then = self.block()
            self.expect("else")
            orelse = self.block()
            self.expect("fi")
            return IfStmt(cond, then, orelse, self.span(tok))
        tok = self.tok
        if self.at("ti"):
            self.advance()
            self.expect("(")
            ch = self.ident("a channel").text
            self.expect(",")
            self._check_offset(self.time_index(), tok)
            self.expect(")")
            target = OutputTarget(ch)
        else:
            name = self.ident("an assignment target").text
            if self.accept("'"):
                target = LocalTarget(name)
            else:
                offset = None
                if self.accept("["):
                    offset = self.time_index()
                    self.expect("]")
                elif self.accept("@"):
                    self.expect("t")
                    offset = 0
                self._check_offset(offset, tok)
                target = OutputTarget(name)
        self.expect("=")
        return Assign(target, self.not_expr(), self.span(tok))

    def _check_offset(self, offset, tok):
        if offset is None:
            return
        strong = self.causality is Causality.STRONG
        if strong and offset == 0:
            raise ParseError("a strongly-causal component writes its outputs at t+1", tok)
        if not strong and offset == 1:
            raise ParseError("a weakly-causal component writes its outputs at t", tok)

    def time_index(self):
        self.expect("t")
        if self.accept("+"):
            if self.nat() != 1:
                raise ParseError("only t and t+1 are valid time indices", self.tok)
            return 1
        return 0

    # -- expressions -------------------------------------------------------------------
    def expr(self):
        left = self.or_expr()
        if self.at("->"):
            tok = self.advance()
            return BinOp("->", left, self.expr(), self.span(tok))
        return left

    def or_expr(self):
        left = self.and_expr()
        while self.at("or"):
            tok = self.advance()
            left = BinOp("or", left, self.and_expr(), self.span(tok))
        return left

    def and_expr(self):
        left = self.not_expr()
        while self.at("and"):
            tok = self.advance()
            left = BinOp("and", left, self.not_expr(), self.span(tok))
        return left

    def not_expr(self):
        if self.at("not"):
            tok = self.advance()
            return Not(self.not_expr(), self.span(tok))
        return self.comparison()

    def comparison(self):
        left = self.additive()
        for op in ("=", "/=", "!=", "<=", ">=", "<", ">"):
            if self.at(op):
                tok = self.advance()
                return BinOp("/=" if op == "!=" else op, left, self.additive(), self.span(tok))
        return left

    def additive(self):
        left = self.postfix()
        while self.at("+") or self.at("-"):
            tok = self.advance()
            left = BinOp(tok.text, left, self.postfix(), self.span(tok))
        return left

    def postfix(self):
        e = self.primary()
        while self.at(".") and self.peek().kind == "ident":
            self.advance()
            tok = self.advance()
            e = Select(e, tok.text, self.span(tok))
        return e

    def primary(self):
        tok = self.tok
        sp = self.span(tok)
        if tok.kind == "nat":
            self.advance()
            return NatLit(int(tok.text), sp)
        if self.accept("true"):
            return BoolLit(True, sp)
        if self.accept("false"):
            return BoolLit(False, sp)
        if self.accept("("):
            e = self.expr()
            self.expect(")")
            return e
        if self.accept("<>"):
            return ListLit((), sp)
        if self.accept("<"):
            if self.accept(">"):
                return ListLit((), sp)
            items = [self.additive()]
            while self.accept(","):
                items.append(self.additive())
            self.expect(">", "'>' closing the list")
            return ListLit(tuple(items), sp)
        if self.accept("if"):
            cond = self.expr()
            self.expect("then")
            then = self.expr()
            self.expect("else")
            orelse = self.expr()
            self.expect("fi")
            return IfExpr(cond, then, orelse, sp)
        if self.accept("ft"):
            if self.accept("."):
                return First(self.primary(), sp)
            self.expect("(")
            e = self.expr()
            self.expect(")")
            return First(e, sp)
        if self.accept("ti"):
            self.expect("(")
            ch = self.ident("a channel").text
            self.expect(",")
            if self.time_index() != 0:
                raise ParseError("only the current interval ti(x, t) can be read", tok)
            self.expect(")")
            return IntervalRef(ch, sp)
        if tok.kind == "ident":
            self.advance()
            if self.accept("["):
                if self.time_index() != 0:
                    raise ParseError("only the current interval x[t] can be read", tok)
                self.expect("]")
                return IntervalRef(tok.text, sp)
            if self.accept("@"):
                self.expect("t")
                return IntervalRef(tok.text, sp)
            if self.accept("("):
                args = []
                if not self.at(")"):
                    args.append(self.expr())
                    while self.accept(","):
                        args.append(self.expr())
                self.expect(")")
                return RecordLit(tok.text, tuple(args), sp)
            return LocalRef(tok.text, sp)
        raise ParseError(f"expected an expression, found {self.describe(tok)}", tok)

    # -- name resolution ----------------------------------------------------------------
    def resolve_expr(self, spec, e, choices):
        cons = constructors(spec.types)
        local_names = {v.name for v in spec.locals}

        def go(e):
            if isinstance(e, LocalRef):
                if e.name in choices:
                    return ChoiceRef(e.name, e.span)
                if e.name in local_names:
                    return e
                if e.name in cons:
                    return EnumLit(e.name, e.span)
                return e
            if isinstance(e, Select):
                return replace(e, expr=go(e.expr))
            if isinstance(e, First):
                return replace(e, expr=go(e.expr))
            if isinstance(e, Not):
                return replace(e, expr=go(e.expr))
            if isinstance(e, BinOp):
                return replace(e, left=go(e.left), right=go(e.right))
            if isinstance(e, IfExpr):
                return replace(e, cond=go(e.cond), then=go(e.then), orelse=go(e.orelse))
            if isinstance(e, ListLit):
                return replace(e, items=tuple(go(i) for i in e.items))
            if isinstance(e, RecordLit):
                return replace(e, args=tuple(go(a) for a in e.args))
            return e
        return go(e)

    def resolve_block(self, spec, block, choices):
        items = []
        for item in block.items:
            if isinstance(item, Assign):
                items.append(replace(item, expr=self.resolve_expr(spec, item.expr, choices)))
            else:
                items.append(replace(item, cond=self.resolve_expr(spec, item.cond, choices),
                                     then=self.resolve_block(spec, item.then, choices),
                                     orelse=self.resolve_block(spec, item.orelse, choices)))
        return Block(tuple(items))

    def resolve_item(self, spec, item):
        if isinstance(item, Labeled):
            return self.resolve_pred_item(spec, item)
        rule = item
        # `y1 = y2` between two outputs is a stream equality, not an assignment
        if (rule.guard is None and not rule.choices and len(rule.body.items) == 1
                and isinstance(rule.body.items[0], Assign)):
            a = rule.body.items[0]
            if (isinstance(a.target, OutputTarget) and isinstance(a.expr, LocalRef)
                    and spec.local(a.expr.name) is None):
                other = spec.channel(a.expr.name)
                if other is not None and other.polarity is Polarity.OUT:
                    return Labeled(rule.label, StreamEqPred(a.target.channel, a.expr.name), rule.span)
        choices = {c.var for c in rule.choices}
        guard = self.resolve_expr(spec, rule.guard, ()) if rule.guard is not None else None
        return replace(rule, guard=guard, body=self.resolve_block(spec, rule.body, choices))

    def resolve_pred_item(self, spec, item):
        if isinstance(item.pred, IntervalPred):
            return replace(item, pred=IntervalPred(self.resolve_expr(spec, item.pred.expr, ())))
        return item

    def resolve_local(self, spec, decl):
        tok, typ, expr = decl
        if expr is None:
            return LocalVarDecl(tok.text, typ, _default_message(typ), self.span(tok))
        expr = self.resolve_expr(spec, expr, ())
        try:
            value = const_value(expr, typ, constructors(spec.types))
        except (TypeMismatch, ValueError) as exc:
            self.error(f"initial value of {tok.text}: {exc}", tok)
            value = None
        if value is None:
            return LocalVarDecl(tok.text, typ, _default_message(typ), self.span(tok))
        return LocalVarDecl(tok.text, typ, value, self.span(tok))

    # -- networks ------------------------------------------------------------------------
    def network_decl(self) -> NetworkDecl:
        head = self.expect("network")
        decl = NetworkDecl(self.ident("a network name").text, span=self.span(head))
        while True:
            if self.tok.kind == "eof" or (self.tok.kind == "kw" and self.tok.text in TOP):
                break
            if self.accept("end"):
                break
            origin = self.i
            try:
                self.network_item(decl)
            except ParseError as exc:
                self.error(str(exc), exc.token)
                self.recover(lambda: self.tok.kind == "eof" or (
                    self.tok.kind == "kw" and self.tok.text in
                    {"uses", "component", "connect", "stimulus", "property", "option", "end"} | TOP),
                    origin)
        return decl

    def network_item(self, decl):
        tok = self.tok
        if self.accept("uses"):
            if self.tok.kind != "string":
                raise ParseError("expected a quoted file name", self.tok)
            decl.uses.append(self.advance().text)
        elif self.accept("component"):
            inst = self.ident("an instance name").text
            self.expect(":")
            decl.components.append((inst, self.ident("a component name").text, self.span(tok)))
        elif self.accept("connect"):
            src = self.channel_ref()
            self.expect("->")
            dst = self.channel_ref()
            decl.wires.append(Wire(src, dst, self.span(tok)))
        elif self.accept("stimulus"):
            name = self.ident("a stimulus name").text
            self.expect(":")
            typ = self.type_expr()
            self.expect("=")
            decl.stimuli.append(Stimulus(name, typ, self.generator(typ, name), self.span(tok)))
        elif self.accept("property"):
            name = self.ident("a property name").text
            self.expect("(")
            binds = []
            while True:
                ch = self.ident("a property channel").text
                self.expect("=")
                binds.append((ch, self.channel_ref()))
                if not self.accept(","):
                    break
            self.expect(")")
            decl.properties.append((name, tuple(binds), self.span(tok)))
        elif self.accept("option"):
            decl.options.append(self.ident("an option").text)
        else:
            raise ParseError(f"expected a network item, found {self.describe(tok)}", tok)

    def channel_ref(self):
        first = self.ident("a channel reference").text
        if self.accept("."):
            return first + "." + self.ident("a port").text
        return first

    def generator(self, typ, name):
        cons = constructors(self.types.values())
        if self.accept("silent"):
            return ConstGenerator(typ, ())
        if self.accept("const"):
            return ConstGenerator(typ, self.interval_literal(typ, cons))
        if self.accept("cycle"):
            ivs = [self.interval_literal(typ, cons)]
            while self.accept(","):
                ivs.append(self.interval_literal(typ, cons))
            return CycleGenerator(typ, tuple(ivs))
        if self.accept("uniform"):
            tok = self.tok
            lo = self.nat()
            self.expect("..")
            hi = self.nat()
            if lo > hi or typ != NAT:
                raise ParseError("uniform needs a Nat stimulus and lo <= hi", tok)
            return UniformGenerator(typ, lo, hi, name)
        raise ParseError("expected silent, const, cycle or uniform", self.tok)

    def interval_literal(self, typ, cons):
        tok = self.tok
        e = self.primary()
        if not isinstance(e, ListLit):
            raise ParseError("expected an interval literal <...>", tok)
        e = self.resolve_expr(ComponentSpec("_", types=named_types(self.types)), e, ())
        try:
            return const_value(e, ListType(typ), cons).value
        except (TypeMismatch, ValueError) as exc:
            raise ParseError(str(exc), tok)


def named_types(types: dict) -> tuple:
    """Declared enumeration and record types, without aliases or duplicates."""
    return tuple(dict.fromkeys(t for t in types.values() if isinstance(t, (EnumType, RecordType))))


def const_value(e, typ, cons) -> Message:
    """Evaluate a literal expression to a message of type ``typ``."""
    def go(e, typ):
        if isinstance(e, NatLit):
            return e.value
        if isinstance(e, BoolLit):
            return e.value
        if isinstance(e, EnumLit):
            owner = cons.get(e.name)
            if isinstance(owner, RecordType):
                return RecordValue(e.name, ())
            return e.name
        if isinstance(e, LocalRef):
            raise ValueError(f"unknown constructor {e.name}")
        if isinstance(e, ListLit):
            if not isinstance(typ, ListType):
                raise TypeMismatch(f"list literal where {typ} is expected")
            return tuple(go(i, typ.element) for i in e.items)
        if isinstance(e, RecordLit):
            owner = cons.get(e.con)
            if not isinstance(owner, RecordType):
                raise ValueError(f"unknown constructor {e.con}")
            variant = owner.variant(e.con)
            if len(variant.selectors) != len(e.args):
                raise TypeMismatch(f"{e.con} takes {len(variant.selectors)} arguments")
            return RecordValue(e.con, tuple(go(a, st) for a, (_, st) in zip(e.args, variant.selectors)))
        raise ValueError("initial values must be literals")
    return Message(typ, go(e, typ))


def _default_message(typ):
    if typ == NAT or typ == BIT:
        return Message(typ, 0)
    if typ == BOOL:
        return Message(typ, False)
    if isinstance(typ, EnumType):
        return Message(typ, typ.constructors[0])
    if isinstance(typ, ListType):
        return Message(typ, ())
    v = typ.variants[0]
    return Message(typ, RecordValue(v.constructor, tuple(_default_message(st).value for _, st in v.selectors)))


# -- public entry points ----------------------------------------------------------------

def parse_source(text: str, file: str = "<input>") -> SourceUnit:
    """Parse a whole ``.fst`` source; raises SpecError on any error."""
    try:
        p = Parser(text, file)
        unit = p.unit()
    except RecursionError:
        raise SpecError([Diagnostic(Severity.ERROR, "input nested too deeply",
                                    SourceSpan(file, 1, 1, 1))]) from None
    diags = list(unit.diagnostics)
    for spec in unit.specs:
        diags.extend(validate(spec))
    if errors_only(diags):
        raise SpecError(errors_only(diags))
    unit.diagnostics = diags
    return unit


def parse_spec(text: str, file: str = "<input>") -> ComponentSpec:
    """Parse source text holding exactly one component specification."""
    unit = parse_source(text, file)
    if len(unit.specs) != 1:
        raise SpecError([Diagnostic(Severity.ERROR,
                                    f"expected exactly one spec, found {len(unit.specs)}",
                                    SourceSpan(file, 1, 1, 1))])
    return unit.specs[0]


def resolve_network(decl: NetworkDecl, registry: dict) -> Network:
    """Bind a parsed network to component specs from ``registry`` (name -> spec)."""
    diags = []
    instances = []
    for inst, spec_name, span in decl.components:
        spec = registry.get(spec_name)
        if spec is None:
            diags.append(Diagnostic(Severity.ERROR, f"unknown component {spec_name}", span))
            continue
        instances.append(Instance(inst, spec, span))
    props = []
    for name, binds, span in decl.properties:
        spec = registry.get(name)
        if spec is None:
            diags.append(Diagnostic(Severity.ERROR, f"unknown component {name}", span))
            continue
        props.append(PropertyBinding(spec, binds, span))
    post_update = False
    for opt in decl.options:
        if opt == "post_update":
            post_update = True
        elif opt != "pre_update":
            diags.append(Diagnostic(Severity.ERROR, f"unknown option {opt}", decl.span))
    if diags:
        raise SpecError(diags)
    net = Network(decl.name, tuple(instances), tuple(decl.wires), tuple(decl.stimuli),
                  tuple(props), post_update, tuple(decl.uses), decl.span)
    problems = errors_only(validate_network(net))
    if problems:
        raise SpecError(problems)
    return net


def parse_network(text: str, registry: dict, file: str = "<input>") -> Network:
    """Parse the single network in ``text`` against already-parsed component specs."""
    unit = parse_source(text, file)
    if len(unit.networks) != 1:
        raise SpecError([Diagnostic(Severity.ERROR,
                                    f"expected exactly one network, found {len(unit.networks)}",
                                    SourceSpan(file, 1, 1, 1))])
    registry = dict(registry)
    for s in unit.specs:
        registry.setdefault(s.name, s)
    return resolve_network(unit.networks[0], registry)
