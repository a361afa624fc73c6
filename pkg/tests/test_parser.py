import random

import pytest

from focusst.errors import SpecError
from focusst.model import Causality
from focusst.parser import parse_network, parse_source, parse_spec
from focusst.printer import pretty_print, print_network
from focusst.reference import REFERENCES, load_reference, specs_dir

from astgen import random_spec
from fuzz import fuzz, mutate, seed_corpus

SPEC_FILES = sorted({f for case in REFERENCES.values() for f in case.sources})


def text(name):
    return (specs_dir() / name).read_text()


def diag_messages(src, parse=parse_spec):
    with pytest.raises(SpecError) as ei:
        parse(src)
    return [str(d) for d in ei.value.diagnostics]


def test_controller_rules_shape():
    spec = parse_spec(text("controller.fst"))
    assert spec.name == "Controller" and spec.causality is Causality.WEAK
    assert [r.label for r in spec.rules] == ["B1", "B2", "B3", "B4"]
    assert all(r.guard is not None for r in spec.rules)
    (pump,) = spec.locals
    assert pump.name == "pump" and pump.init.value == "PumpOff"


def test_controller_ifthenelse_shape():
    spec = parse_spec(text("controller_ifthenelse.fst"))
    assert [r.label for r in spec.rules] == ["B1"] and spec.rules[0].guard is None


def test_boiler_shape():
    spec = parse_spec(text("steamboiler.fst"))
    assert spec.causality is Causality.STRONG
    assert [(g.label, g.channel) for g in spec.initial] == [("I1", "waterLevel")]
    (choice,) = spec.rules[0].choices
    assert (choice.var, choice.lo, choice.hi) == ("r", 1, 10)


def test_unknown_constructor_in_init():
    src = text("controller.fst").replace(
        "local pump: WaterPumpState = PumpOff", "local pump: WaterPumpState\n  init pump = PumpOnn")
    (msg,) = diag_messages(src)
    assert "unknown constructor PumpOnn" in msg and msg.startswith("<input>:")


def test_init_section_equivalent_to_inline():
    inline = parse_spec(text("controller.fst"))
    split = parse_spec(text("controller.fst").replace(
        "local pump: WaterPumpState = PumpOff", "local pump: WaterPumpState\n  init pump = PumpOff"))
    assert split == inline


def test_empty_file():
    assert diag_messages("") == ["<input>:1:1: error: expected spec header"]


def test_positions_reported():
    src = "spec X weakly causal\n in a: Nat\n out b: Nat\n asm\n gar\n  B1: b[t] = <ft(a[t]) + true>\nend"
    (msg,) = diag_messages(src)
    assert msg == "<input>:6:26: error: [B1] expected Nat, got Bool"


def test_weak_component_cannot_delay():
    src = "spec X weakly causal\n in a: Nat\n out b: Nat\n asm\n gar\n  B1: b[t+1] = a[t]\nend"
    assert "weakly-causal" in diag_messages(src)[0]


def test_deep_nesting_is_a_diagnostic():
    src = "spec X weakly causal\n out b: Nat\n gar\n  B1: b[t] = <" + "(" * 5000 + "1" + ")" * 5000 + ">\nend"
    assert diag_messages(src, parse_source)


REGISTRY = {s.name: s for f in SPEC_FILES for s in parse_source(text(f)).specs}
NET = """network N
  component boiler: SteamBoiler
  component controller: Controller
  component converter: Converter
  connect boiler.waterLevel -> controller.waterLevel
  connect controller.controlSignal -> converter.controlSignal
  connect converter.controlSignalTS -> boiler.controlSignalTS
end
"""


def net_errors(src):
    return diag_messages(src, lambda t: parse_network(t, REGISTRY))


def test_network_ok():
    assert parse_network(NET, REGISTRY).name == "N"


def test_network_type_mismatch():
    src = NET.replace("connect boiler.waterLevel -> controller.waterLevel",
                      "connect converter.controlSignalTS -> controller.waterLevel")
    assert net_errors(src) == ["<input>:5:3: error: type mismatch: converter.controlSignalTS "
                               "carries Bit, controller.waterLevel expects Nat"]


def test_network_unwired_input():
    src = NET.replace("  connect converter.controlSignalTS -> boiler.controlSignalTS\n", "")
    assert net_errors(src) == ["<input>:2:3: error: unwired input channel boiler.controlSignalTS"]


def test_network_unknown_names():
    assert "unknown component Nope" in net_errors(NET.replace("SteamBoiler", "Nope"))[0]
    assert "not an output channel" in net_errors(NET.replace("boiler.waterLevel ->", "boiler.waterLevl ->"))[0]


class TestRoundTrip:
    @pytest.mark.parametrize("name", SPEC_FILES)
    def test_reference_specs(self, name):
        for spec in parse_source(text(name)).specs:
            assert parse_spec(pretty_print(spec)) == spec

    @pytest.mark.parametrize("name", sorted(REFERENCES))
    def test_reference_networks(self, name):
        net = load_reference(name)[0]
        reg = {i.spec.name: i.spec for i in net.instances} | {p.spec.name: p.spec for p in net.properties}
        again = parse_network(print_network(net), reg)
        assert print_network(again) == print_network(net)
        assert again.instances == net.instances and again.wires == net.wires

    def test_random_specs(self):
        for seed in range(200):
            spec = random_spec(seed, seed)
            assert parse_spec(pretty_print(spec)) == spec, seed

    def test_printer_is_canonical(self):
        for seed in range(50):
            once = pretty_print(random_spec(seed, seed))
            assert pretty_print(parse_spec(once)) == once


def test_mutations_give_diagnostics_only():
    stats = fuzz(1500, seed=11)
    assert stats.crashes == []
    assert stats.rejected > 0 and stats.accepted + stats.rejected == 1500


def test_mutator_is_deterministic():
    corpus = seed_corpus()
    a = [mutate(corpus[0], random.Random(s)) for s in range(20)]
    b = [mutate(corpus[0], random.Random(s)) for s in range(20)]
    assert a == b
