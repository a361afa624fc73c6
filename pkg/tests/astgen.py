"""Random well-typed component specifications, built directly as ASTs."""
import random

from focusst.model import (
    Assign, BinOp, Block, BoolLit, Causality, ChannelDecl, Choice, ChoiceRef, ComponentSpec,
    EnumLit, First, IfExpr, IfStmt, InitialGuarantee, IntervalPred, IntervalRef, Labeled, ListLit,
    LocalRef, LocalTarget, LocalVarDecl, MsgPred, NatLit, Not, OutputTarget, Polarity, RecordLit,
    Select, StreamEqPred, TransitionRule, TruePred, TsPred,
)
from focusst.stream import (BIT, BOOL, NAT, EnumType, Message, RecordType, RecordValue,
                            Variant)

COLOR = EnumType("Color", ("Red", "Green", "Blue"))
POINT = RecordType("Point", (Variant("Pt", (("px", NAT), ("py", BIT))), Variant("Void", ())))
TYPES = (COLOR, POINT)
SCALARS = (NAT, BIT, BOOL, COLOR, POINT)


def literal_value(rng, typ):
    if typ == NAT:
        return rng.randint(0, 20)
    if typ == BIT:
        return rng.randint(0, 1)
    if typ == BOOL:
        return rng.random() < 0.5
    if typ == COLOR:
        return rng.choice(COLOR.constructors)
    if typ == POINT:
        if rng.random() < 0.3:
            return RecordValue("Void", ())
        return RecordValue("Pt", (rng.randint(0, 9), rng.randint(0, 1)))
    raise TypeError(typ)


def literal_expr(typ, v):
    if typ in (NAT, BIT):
        return NatLit(v)
    if typ == BOOL:
        return BoolLit(v)
    if typ == COLOR:
        return EnumLit(v)
    if v.con == "Void":
        return EnumLit("Void")
    return RecordLit("Pt", (NatLit(v.fields[0]), NatLit(v.fields[1])))


class SpecGen:
    def __init__(self, rng: random.Random):
        self.rng = rng

    def spec(self, index=0) -> ComponentSpec:
        rng = self.rng
        causality = rng.choice([Causality.STRONG, Causality.WEAK])
        self.strong = causality is Causality.STRONG
        n_in, n_out, n_loc = rng.randint(0, 3), rng.randint(0, 3), rng.randint(0, 3)
        self.inputs = [ChannelDecl(f"in{k}", rng.choice(SCALARS), Polarity.IN) for k in range(n_in)]
        self.outputs = [ChannelDecl(f"out{k}", rng.choice(SCALARS), Polarity.OUT) for k in range(n_out)]
        self.locals = []
        for k in range(n_loc):
            typ = rng.choice(SCALARS)
            self.locals.append(LocalVarDecl(f"v{k}", typ, Message(typ, literal_value(rng, typ))))
        channels = self.inputs + self.outputs
        rng.shuffle(channels)

        assumptions = []
        for k, c in enumerate(self.inputs[:rng.randint(0, len(self.inputs))]):
            kind = rng.randrange(4)
            if kind == 0:
                pred = TsPred(c.name)
            elif kind == 1:
                pred = MsgPred(c.name, rng.randint(0, 3))
            elif kind == 2:
                pred = TruePred()
            else:
                self.readable = self.inputs
                self.choice_vars = []
                self.local_ok = False
                pred = IntervalPred(self.expr(BOOL, 2))
            assumptions.append(Labeled(f"A{k + 1}", pred))

        initial = []
        if self.strong:
            for c in self.outputs:
                if rng.random() < 0.6:
                    v = [literal_value(rng, c.type) for _ in range(rng.randint(0, 2))]
                    initial.append(InitialGuarantee(f"I{len(initial) + 1}", c.name,
                                                    ListLit(tuple(literal_expr(c.type, x) for x in v))))

        # output pairs related by stream equality are left unassigned
        mirrored = set()
        extra = []
        if len(self.outputs) >= 2 and rng.random() < 0.3:
            a, b = self.outputs[0], self.outputs[1]
            if a.type == b.type:
                extra.append(StreamEqPred(a.name, b.name))
                mirrored.add(b.name)
        targets = [LocalTarget(v.name) for v in self.locals] + \
                  [OutputTarget(c.name) for c in self.outputs if c.name not in mirrored]
        rng.shuffle(targets)

        rules = []
        n_rules = rng.randint(0, 4)
        free = list(targets)
        guarded_pool = []
        for _ in range(n_rules):
            guarded = rng.random() < 0.5
            if guarded:
                if not guarded_pool:
                    take = rng.randint(0, len(free))
                    guarded_pool, free = free[:take], free[take:]
                mine = [t for t in guarded_pool if rng.random() < 0.7]
            else:
                take = rng.randint(0, len(free))
                mine, free = free[:take], free[take:]
            rules.append(self.rule(mine, guarded))
        labels = iter(range(1, 100))
        rules = [TransitionRule(f"B{next(labels)}", r.body, r.guard, r.choices) for r in rules]

        preds = []
        for p in extra:
            preds.append(p)
        for c in self.outputs + self.inputs:
            if rng.random() < 0.2:
                preds.append(rng.choice([TsPred(c.name), MsgPred(c.name, rng.randint(0, 2))]))
        if rng.random() < 0.3:
            self.readable = self.inputs + self.outputs
            self.choice_vars = []
            self.local_ok = False
            preds.append(IntervalPred(self.expr(BOOL, 2)))
        guarantees = tuple(Labeled(f"B{next(labels)}", p) for p in preds)
        return ComponentSpec(
            name=f"Gen{index}", causality=causality, channels=tuple(channels),
            locals=tuple(self.locals), assumptions=tuple(assumptions), initial=tuple(initial),
            rules=tuple(rules), guarantees=guarantees, types=TYPES)

    # -- rules -------------------------------------------------------------------------
    def rule(self, targets, guarded):
        rng = self.rng
        choices = []
        if rng.random() < 0.3:
            for k in range(rng.randint(1, 2)):
                lo = rng.randint(0, 5)
                choices.append(Choice(f"c{k}", lo, lo + rng.randint(0, 5)))
        guard = None
        if guarded:
            self.readable = self.inputs
            self.choice_vars = []
            self.local_ok = True
            guard = self.expr(BOOL, 3)
        self.readable = self.inputs + (self.outputs if self.strong else [])
        self.choice_vars = [c.var for c in choices]
        self.local_ok = True
        return TransitionRule("B0", self.block(targets, 2), guard, tuple(choices))

    def block(self, targets, depth):
        rng = self.rng
        targets = list(targets)
        rng.shuffle(targets)
        items = []
        if depth > 0 and targets and rng.random() < 0.4:
            k = rng.randint(1, len(targets))
            inner, targets = targets[:k], targets[k:]
            then = self.block([t for t in inner if rng.random() < 0.8], depth - 1)
            orelse = self.block([t for t in inner if rng.random() < 0.8], depth - 1)
            items.append(IfStmt(self.expr(BOOL, 2), then, orelse))
        for t in targets:
            items.append(Assign(t, self.target_expr(t)))
        rng.shuffle(items)
        return Block(tuple(items))

    def target_expr(self, t):
        if isinstance(t, LocalTarget):
            typ = next(v.type for v in self.locals if v.name == t.name)
            return self.expr(typ, 3)
        typ = next(c.type for c in self.outputs if c.name == t.channel)
        return self.interval_expr(typ, 2)

    def interval_expr(self, typ, depth):
        rng = self.rng
        same = [c for c in self.readable if c.type == typ]
        r = rng.random()
        if same and r < 0.25:
            return IntervalRef(rng.choice(same).name)
        if depth > 0 and r < 0.35:
            return IfExpr(self.expr(BOOL, depth - 1), self.interval_expr(typ, depth - 1),
                          self.interval_expr(typ, depth - 1))
        return ListLit(tuple(self.expr(typ, depth) for _ in range(rng.randint(0, 2))))

    # -- expressions -------------------------------------------------------------------
    def atoms(self, typ):
        rng = self.rng
        out = [literal_expr(typ, literal_value(rng, typ))]
        if self.local_ok:
            out += [LocalRef(v.name) for v in self.locals if v.type == typ]
        if typ == NAT:
            out += [ChoiceRef(c) for c in self.choice_vars]
        chans = [c for c in self.readable if c.type == typ]
        out += [First(IntervalRef(c.name)) for c in chans]
        return out

    def expr(self, typ, depth):
        rng = self.rng
        if depth <= 0 or rng.random() < 0.3:
            return rng.choice(self.atoms(typ))
        d = depth - 1
        if typ == NAT:
            k = rng.randrange(4)
            if k == 0:
                return BinOp(rng.choice(["+", "-"]), self.expr(NAT, d), self.expr(NAT, d))
            if k == 1:
                return IfExpr(self.expr(BOOL, d), self.expr(NAT, d), self.expr(NAT, d))
            if k == 2:
                return Select(self.expr(POINT, d), "px")
            return rng.choice(self.atoms(NAT))
        if typ == BIT:
            k = rng.randrange(3)
            if k == 0:
                return Select(self.expr(POINT, d), "py")
            if k == 1:
                return IfExpr(self.expr(BOOL, d), self.expr(BIT, d), self.expr(BIT, d))
            return rng.choice(self.atoms(BIT))
        if typ == BOOL:
            k = rng.randrange(7)
            if k == 0:
                return BinOp(rng.choice(["=", "/=", "<", "<=", ">", ">="]),
                             self.expr(NAT, d), self.expr(NAT, d))
            if k == 1:
                return BinOp(rng.choice(["and", "or", "->"]), self.expr(BOOL, d), self.expr(BOOL, d))
            if k == 2:
                return Not(self.expr(BOOL, d))
            if k == 3:
                other = rng.choice([BIT, COLOR, POINT])
                return BinOp(rng.choice(["=", "/="]), self.expr(other, d), self.expr(other, d))
            if k == 4:
                chans = [c for c in self.readable]
                if chans:
                    c = rng.choice(chans)
                    return BinOp(rng.choice(["=", "/="]), IntervalRef(c.name),
                                 self.interval_expr(c.type, d))
            if k == 5:
                return IfExpr(self.expr(BOOL, d), self.expr(BOOL, d), self.expr(BOOL, d))
            return rng.choice(self.atoms(BOOL))
        if typ == COLOR:
            if rng.random() < 0.3:
                return IfExpr(self.expr(BOOL, d), self.expr(COLOR, d), self.expr(COLOR, d))
            return rng.choice(self.atoms(COLOR))
        if typ == POINT:
            if rng.random() < 0.4:
                return RecordLit("Pt", (self.expr(NAT, d), self.expr(BIT, d)))
            return rng.choice(self.atoms(POINT))
        raise TypeError(typ)


def random_spec(seed: int, index: int = 0) -> ComponentSpec:
    return SpecGen(random.Random(seed)).spec(index)
