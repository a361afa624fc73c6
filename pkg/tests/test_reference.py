import pytest

from focusst.errors import UnknownReference
from focusst.reference import FACTS, REFERENCES, load_reference
from focusst.runtime import run


@pytest.mark.parametrize("name", sorted(REFERENCES))
def test_expected_verdicts(name):
    net, case = load_reference(name)
    tr = run(net, 1000, seed=0)
    assert {v.label: v.status.value for v in tr.verdicts} == case.expected_verdicts


def test_unknown():
    with pytest.raises(UnknownReference):
        load_reference("nope")


def test_fact_provenance():
    assert {k for k, (_, src) in FACTS.items() if src == "DERIVED"} == {"envelope_min", "envelope_max"}
    assert FACTS["initial_water_level"][0] == 500
    assert FACTS["drift_range"][0] == (1, 10)


def test_variants_differ_only_in_controller():
    a, _ = load_reference("steamboiler-rules")
    b, _ = load_reference("steamboiler-ifthenelse")
    assert [i.name for i in a.instances] == [i.name for i in b.instances]
    assert a.wires == b.wires and a.properties == b.properties
    assert a.instance("boiler") == b.instance("boiler")
    assert a.instance("controller") != b.instance("controller")
