"""Architecture diagrams in Graphviz DOT.

Components are filled by causality (strongly causal blue, weakly causal
green) inside a white cluster for the composite network.  A wire's colour
comes from the strongest stream property declared for it on either end:
``ts`` (red), ``msg`` with at most one message (blue), nothing (black).
"""
from __future__ import annotations

from dataclasses import dataclass, field

from .model import Causality, MsgPred, Network, TsPred


def _component_defaults():
    return {"strongly": "blue", "weakly": "green", "composite": "white"}


def _stream_defaults():
    return {"ts": "red", "msg1": "blue", "none": "black"}


@dataclass(frozen=True)
class DiagramStyle:
    component_color: dict = field(default_factory=_component_defaults)
    stream_color: dict = field(default_factory=_stream_defaults)


def _quote(s: str) -> str:
    return '"' + s.replace("\\", "\\\\").replace('"', '\\"') + '"'


def _declared(spec, channel):
    preds = [a.pred for a in spec.assumptions] + [g.pred for g in spec.guarantees]
    return [p for p in preds if getattr(p, "channel", None) == channel]


def stream_property(net: Network, source: str, target: str) -> str:
    """``ts``, ``msg1`` or ``none`` for the wire ``source -> target``."""
    preds = []
    for end in (source, target):
        if "." in end:
            inst = net.instance(end.split(".", 1)[0])
            if inst is not None:
                preds += _declared(inst.spec, end.split(".", 1)[1])
    if any(isinstance(p, TsPred) for p in preds):
        return "ts"
    if any(isinstance(p, MsgPred) and p.k <= 1 for p in preds):
        return "msg1"
    return "none"


def export_dot(net: Network, style: DiagramStyle | None = None) -> str:
    style = style or DiagramStyle()
    lines = [f"digraph {_quote(net.name)} {{",
             "  rankdir=LR;",
             "  node [shape=box, style=filled];",
             f"  subgraph {_quote('cluster_' + net.name)} {{",
             f"    label={_quote(net.name)};",
             "    style=filled;",
             f"    fillcolor={_quote(style.component_color['composite'])};"]
    for inst in net.instances:
        color = style.component_color[inst.spec.causality.value]
        font = "white" if inst.spec.causality is Causality.STRONG else "black"
        lines.append(f"    {_quote(inst.name)} [label={_quote(inst.name + ': ' + inst.spec.name)}, "
                     f"fillcolor={_quote(color)}, fontcolor={font}];")
    lines.append("  }")
    for stim in net.stimuli:
        lines.append(f"  {_quote(stim.name)} [shape=plaintext, style=solid];")
    for w in net.wires:
        src = w.source.split(".", 1)[0]
        dst = w.target.split(".", 1)[0]
        port = w.source.split(".", 1)[1] if "." in w.source else w.source
        color = style.stream_color[stream_property(net, w.source, w.target)]
        lines.append(f"  {_quote(src)} -> {_quote(dst)} [label={_quote(port)}, "
                     f"color={_quote(color)}];")
    lines.append("}")
    return "\n".join(lines) + "\n"
