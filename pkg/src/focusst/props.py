"""Randomized law checking for the stream operators and the reference controllers.

Each law has a generator of random cases, a checker and a shrinker.  When a
case fails, it is shrunk greedily (drop intervals, drop messages, lower
values, lower the factor) until no smaller case still fails, and the result
is reported as the counterexample.

``inject_fault=True`` swaps in a deliberately broken ``split`` so the
harness itself can be seen to catch and minimize a failure.
"""
from __future__ import annotations

import random
from dataclasses import dataclass
from types import SimpleNamespace
from typing import Callable, Optional

from . import operators
from .model import Instance, Network, Stimulus, Wire
from .operators import SplitPolicy
from .rng import ChoiceStream
from .stream import BIT, ConstGenerator, Message, TimedStreamPrefix, msg_holds, ts_holds

WATER_LEVELS = (0, 300, 301, 699, 700, 1000)


def _broken_split(s, n, policy=SplitPolicy.FIRST):
    # loses everything past the n-th message of an interval under Distribute
    out = operators.split(s, n, policy)
    if SplitPolicy(policy) is not SplitPolicy.DISTRIBUTE or n == 1:
        return out
    ivs = [iv if (k % n) != n - 1 else iv[:1] for k, iv in enumerate(out.intervals)]
    return out.with_intervals(ivs)


def default_ops():
    return SimpleNamespace(split=operators.split, join=lambda s, n: operators.join_checked(s, n)[0],
                           timestamp=operators.timestamp, filter=operators.filter_stream)


def _prefix(ivs):
    return TimedStreamPrefix(BIT, tuple(tuple(iv) for iv in ivs))


def _rand_stream(rng, max_len=8, max_msgs=3, ts=False):
    n = rng.randint(0, max_len)
    if ts:
        return tuple((rng.randint(0, 1),) for _ in range(n))
    return tuple(tuple(rng.randint(0, 1) for _ in range(rng.randint(0, max_msgs))) for _ in range(n))


def _shrink_stream(ivs):
    for i in range(len(ivs)):
        yield ivs[:i] + ivs[i + 1:]
    for i, iv in enumerate(ivs):
        for j in range(len(iv)):
            yield ivs[:i] + (iv[:j] + iv[j + 1:],) + ivs[i + 1:]
    for i, iv in enumerate(ivs):
        for j, v in enumerate(iv):
            if v:
                yield ivs[:i] + (iv[:j] + (0,) + iv[j + 1:],) + ivs[i + 1:]


def _shrink_fields(case, stream_key="s", int_keys=("n",), lower=1):
    for s in _shrink_stream(case[stream_key]):
        yield {**case, stream_key: s}
    for k in int_keys:
        if case[k] > lower:
            yield {**case, k: case[k] - 1}


@dataclass(frozen=True)
class Law:
    name: str
    generate: Callable
    check: Callable
    shrink: Callable = lambda case: iter(())


def _split_join(c, ops):
    s = _prefix(c["s"])
    return ops.join(ops.split(s, c["n"], c["policy"]), c["n"]) == s


def _split_order(c, ops):
    s = _prefix(c["s"])
    return ops.split(s, c["n"], c["policy"]).flatten() == s.flatten()


def _distribute_bound(c, ops):
    s = _prefix(c["s"])
    k = max((len(iv) for iv in c["s"]), default=0)
    return not msg_holds(s, k) or msg_holds(ops.split(s, c["n"], SplitPolicy.DISTRIBUTE), k)


def timestamp_oracle(ivs, k):
    owner = [t for t, iv in enumerate(ivs) for _ in iv]
    return owner[k - 1] if k <= len(owner) else None


def _timestamp(c, ops):
    s = _prefix(c["s"])
    total = len(s.flatten())
    return all(ops.timestamp(s, k) == timestamp_oracle(c["s"], k) for k in range(1, total + 2))


def _timestamp_monotone(c, ops):
    s = _prefix(c["s"])
    stamps = [ops.timestamp(s, k) for k in range(1, len(s.flatten()) + 1)]
    return stamps == sorted(stamps)


def _filter_idempotent(c, ops):
    s = _prefix(c["s"])
    M = [Message(BIT, v) for v in c["M"]]
    once = ops.filter(M, s)
    return ops.filter(M, once) == once and all(
        a == tuple(v for v in b if v in c["M"]) for a, b in zip(once.intervals, s.intervals))


def _filter_join(c, ops):
    s = _prefix(c["s"])
    M = [Message(BIT, v) for v in c["M"]]
    return ops.filter(M, ops.join(s, c["n"])) == ops.join(ops.filter(M, s), c["n"])


def _ts_msg1(c, ops):
    s = _prefix(c["s"])
    return not ts_holds(s) or msg_holds(s, 1)


def _gen_split(rng):
    return {"s": _rand_stream(rng), "n": rng.randint(1, 5), "policy": rng.choice(list(SplitPolicy))}


def _gen_filter(rng):
    return {"s": _rand_stream(rng), "n": rng.randint(1, 5),
            "M": tuple(sorted(rng.sample((0, 1), rng.randint(0, 2))))}


def _gen_ts(rng):
    return {"s": _rand_stream(rng, ts=rng.random() < 0.5), "n": 1}


# -- controller equivalence ------------------------------------------------------------

def controller_harness(spec) -> Network:
    """The Controller alone, its waterLevel input fed by an external stimulus."""
    level = spec.channel("waterLevel").type
    return Network(f"{spec.name}Harness", (Instance("controller", spec),),
                   (Wire("level", "controller.waterLevel"),),
                   (Stimulus("level", level, ConstGenerator(level, ())),))


def controller_trajectory(sim, levels):
    """Outputs and pump states of a Controller harness driven by ``levels``."""
    state = sim.initial_state()
    rng = ChoiceStream(0)
    outs, locs = [], [state]
    for t, v in enumerate(levels):
        state, ivs = sim.step(state, t, rng, {"level": (v,)})
        outs.append(ivs["controller.controlSignal"])
        locs.append(state)
    return outs, locs


def _controller_law():
    from .reference import load_reference
    from .runtime import Simulator
    sims = [Simulator(controller_harness(load_reference(n)[0].instance("controller").spec))
            for n in ("steamboiler-rules", "steamboiler-ifthenelse")]

    def gen(rng):
        return {"levels": tuple(rng.choice(WATER_LEVELS) for _ in range(rng.randint(0, 6)))}

    def check(c, ops):
        a, b = (controller_trajectory(s, c["levels"]) for s in sims)
        return a == b

    def shrink(c):
        lv = c["levels"]
        for i in range(len(lv)):
            yield {"levels": lv[:i] + lv[i + 1:]}

    return Law("controller variants agree", gen, check, shrink)


def laws(include_controller=True):
    out = [
        Law("join(split(s,n,p),n) = s", _gen_split, _split_join, _shrink_fields),
        Law("split keeps message order", _gen_split, _split_order, _shrink_fields),
        Law("distribute never grows intervals", _gen_split, _distribute_bound, _shrink_fields),
        Law("timestamp matches count oracle", _gen_split, _timestamp, _shrink_fields),
        Law("timestamp is monotone", _gen_split, _timestamp_monotone, _shrink_fields),
        Law("filter is idempotent", _gen_filter, _filter_idempotent, _shrink_fields),
        Law("filter commutes with join", _gen_filter, _filter_join, _shrink_fields),
        Law("ts implies msg 1", _gen_ts, _ts_msg1, _shrink_fields),
    ]
    if include_controller:
        out.append(_controller_law())
    return out


@dataclass
class LawResult:
    name: str
    passed: int
    failed: int
    counterexample: Optional[dict] = None


def shrink(law: Law, case, ops, budget=10_000):
    """Greedy shrinking: keep taking the first smaller case that still fails."""
    changed = True
    while changed and budget > 0:
        changed = False
        for smaller in law.shrink(case):
            budget -= 1
            if not law.check(smaller, ops):
                case, changed = smaller, True
                break
    return case


def run_laws(trials: int, seed: int = 0, inject_fault: bool = False, selected=None) -> list:
    ops = default_ops()
    if inject_fault:
        ops.split = _broken_split
    results = []
    for k, law in enumerate(selected if selected is not None else laws()):
        rng = random.Random(f"{seed}:{k}")
        res = LawResult(law.name, 0, 0)
        for _ in range(trials):
            case = law.generate(rng)
            if law.check(case, ops):
                res.passed += 1
            else:
                res.failed += 1
                if res.counterexample is None:
                    res.counterexample = shrink(law, case, ops)
        results.append(res)
    return results


def format_case(case: dict) -> str:
    parts = []
    for k, v in case.items():
        if k == "s":
            v = "<" + ", ".join("<" + ", ".join(map(str, iv)) + ">" for iv in v) + ">"
        elif isinstance(v, SplitPolicy):
            v = v.value
        parts.append(f"{k}={v}")
    return ", ".join(parts)
